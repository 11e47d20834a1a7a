int a[100000], b[100000], c[100000];
int i, v;

main()
{
  /* Loop1 */
  for (i = 0; i < 100000; i++)
  {
    v = input();
    a[i] = v;
    v = input();
    b[i] = v;
  }
  /* Loop2 */
  for (i = 0; i < 100000; i++)
  {
    c[i] = a[i] + b[i];
  }
  /* Loop3 */
  for (i = 0; i < 100000; i++)
  {
    assert(c[i] == a[i] + b[i]);
  }
}
