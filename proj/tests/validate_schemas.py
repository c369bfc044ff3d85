"""Run each CLI subcommand on a small input and validate its JSON output against schemas/."""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

CLI = sys.argv[1]
ROOT = pathlib.Path(sys.argv[2])
SCHEMAS = ROOT / "schemas"
CONFIGS = ROOT / "configs"

RUNS = [
    ("spectrum", ["spectrum", "--d", "26", "--max-level", "2"]),
    ("spectrum", ["spectrum", "--d", "4", "--max-level", "1", "--momentum", "1,1,0,0"]),
    ("noghost", ["noghost", "--d", "26", "--level", "2"]),
    ("noghost", ["noghost", "--d", "27", "--level", "2"]),
    ("virasoro-check", ["virasoro-check", "--d", "4", "--mmax", "2", "--level", "2"]),
    ("measure", ["measure", "--d", "2", "--check", "invariance"]),
    ("measure", ["measure", "--d", "3", "--check", "lightcone"]),
    ("measure", ["measure", "--d", "2", "--check", "fiber"]),
    ("commutator", ["commutator", "--config", str(CONFIGS / "commutator_bumps.json")]),
    ("decay-scan", ["decay-scan", "--config", str(CONFIGS / "decay_gaussian.json")]),
    ("field-ccr", ["field-ccr", "--d", "3", "--jmax", "2", "--probes", "3", "--max-quanta", "2"]),
    ("observable-check", ["observable-check"]),
]


def main():
    failures = 0
    for name, args in RUNS:
        schema = json.loads((SCHEMAS / f"{name}.v1.json").read_text())
        jsonschema.Draft202012Validator.check_schema(schema)
        with tempfile.TemporaryDirectory() as tmp:
            out = pathlib.Path(tmp) / "out.json"
            proc = subprocess.run([CLI, *args, "--out", str(out)], capture_output=True, text=True)
            if proc.returncode not in (0, 1):
                print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
                failures += 1
                continue
            doc = json.loads(out.read_text())
        errors = sorted(jsonschema.Draft202012Validator(schema).iter_errors(doc), key=lambda e: list(e.path))
        for e in errors:
            print(f"FAIL {' '.join(args)}: {list(e.path)}: {e.message}")
        failures += bool(errors)
        if not errors:
            print(f"ok   {' '.join(args)}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
