"""Validate --report output against the schema and check it is byte-stable.

usage: check_report.py ARRWIT_BIN SCHEMA FIXTURES_DIR WORK_DIR
"""
import json
import pathlib
import subprocess
import sys

import jsonschema

# a few shapes the fixtures don't cover
EXTRA = {
    "outside.c": "int x; main() { assert(x == 0); }\n",
    "zero_trip.c": "int a[4]; int i; main() { for (i = 2; i < 2; i++) { a[i] = 1; } }\n",
    "unknown.c": "int a[4]; int i; int n; main() { n = input(); "
                 "for (i = 0; i < n; i++) { a[i] = 1; } }\n",
}


def report_for(binary, src, work):
    out = work / (src.stem + ".report.json")
    subprocess.run([binary, "transform", str(src), "-o", str(work / (src.stem + ".out.c")),
                    "--report=" + str(out)], check=True)
    return out.read_bytes()


def main():
    binary, schema_path, fixtures, work = sys.argv[1:5]
    work = pathlib.Path(work) / "report_check"
    work.mkdir(parents=True, exist_ok=True)
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)

    sources = sorted(pathlib.Path(fixtures).glob("fig[0-9].c"))
    for name, text in EXTRA.items():
        (work / name).write_text(text)
        sources.append(work / name)

    for src in sources:
        first = report_for(binary, src, work)
        if report_for(binary, src, work) != first:
            sys.exit(f"{src.name}: report differs between runs")
        doc = json.loads(first)
        jsonschema.validate(doc, schema)
        if list(doc) != ["arrays", "loops", "assertions"]:
            sys.exit(f"{src.name}: top-level key order {list(doc)}")
        print(f"{src.name}: ok ({len(doc['loops'])} loops, {len(doc['assertions'])} assertions)")


if __name__ == "__main__":
    main()
