#include "suite.hpp"

#include <gtest/gtest.h>

using namespace arrwit;
using arrwit::testing::run_differential_suite;

TEST(Fuzz, SoundnessPrecisionAndConformance) {
  auto st = run_differential_suite(2024, 600);
  std::printf("checked %d, skipped %d (budget), unsafe originals %d, precise %d, precise with OOB originals %d\n",
              st.checked, st.skipped, st.unsafe_original, st.precise, st.precise_out_of_bounds);
  EXPECT_EQ(st.unsound, 0);
  EXPECT_EQ(st.inconsistent, 0);
  EXPECT_EQ(st.nonconformant, 0);
  EXPECT_GE(st.checked, 500);
  // the suite is only useful if both outcomes and the precise subset show up
  EXPECT_GT(st.unsafe_original, 20);
  EXPECT_GT(st.precise, 20);
  for (std::size_t k = 0; k < st.failures.size() && k < 5; ++k) ADD_FAILURE() << st.failures[k];
}

TEST(Fuzz, SecondSeed) {
  auto st = run_differential_suite(77, 300);
  EXPECT_EQ(st.unsound, 0);
  EXPECT_EQ(st.inconsistent, 0);
  EXPECT_EQ(st.nonconformant, 0);
}
