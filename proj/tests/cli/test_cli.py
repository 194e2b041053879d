"""End-to-end checks of the nnverify binary: exit codes and JSON reports.

usage: test_cli.py <nnverify binary> <data dir> <schema dir>
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

BIN, DATA, SCHEMAS = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
failures = []


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(args, expect_code, schema_name=None, check=None):
    label = " ".join(str(a) for a in args)
    with tempfile.TemporaryDirectory() as tmp:
        report = Path(tmp) / "report.json"
        cmd = [BIN, *map(str, args)]
        if schema_name:
            cmd += ["--json", str(report)]
        proc = subprocess.run(cmd, capture_output=True, text=True, cwd=tmp, timeout=300)
        if proc.returncode != expect_code:
            failures.append(f"{label}: exit {proc.returncode}, expected {expect_code}\n"
                            f"{proc.stderr.strip()}")
            return None
        if not schema_name:
            return None
        try:
            doc = json.loads(report.read_text())
            stdout_doc = json.loads(proc.stdout)
            jsonschema.validate(doc, schema(schema_name))
        except (ValueError, jsonschema.ValidationError, OSError) as e:
            failures.append(f"{label}: {e}")
            return None
        if doc != stdout_doc:
            failures.append(f"{label}: --json file differs from stdout")
        if check:
            try:
                check(doc)
            except AssertionError as e:
                failures.append(f"{label}: {e}")
        return doc


def expect(cond, msg):
    if not cond:
        raise AssertionError(msg)


motivating, three_layer, voc = DATA / "motivating.nnet", DATA / "three_layer.nnet", DATA / "vocalic.nnet"
phi = DATA / "phi.json"

# Motivating example: the verdict flips with the arithmetic.
run(["verify", motivating, phi, "--fixedbv", "<4,6>"], 1, "verdict",
    lambda d: (expect(d["verdict"] == "UNSAFE", d["verdict"]),
               expect(d["witness"]["replayed"], "witness not replayed"),
               expect(d["witness"]["fxp_trace"]["outputs"][-1][0] == 2.6875, "f")))
run(["verify", motivating, phi, "--float-oracle"], 0, "verdict",
    lambda d: expect(d["witness"] is None, "SAFE with a witness"))
run(["--fixedbv", "<32,32>", "verify", motivating, phi], 0, "verdict")
run(["verify", motivating, phi, "--rounding", "nearest", "--fixedbv", "<4,6>"], 0, "verdict")
run(["verify", voc, DATA / "adversarial_A.json"], 1, "verdict",
    lambda d: expect(d["witness"]["distance"] <= 1.5, "witness outside the ball"))
run(["verify", voc, DATA / "adversarial_A.json", "--budget", "5",
     "--no-interval-analysis"], 2, "verdict",
    lambda d: expect(d["verdict"] == "UNKNOWN", d["verdict"]))
run(["verify", voc, DATA / "adversarial_A.json", "--parallel"], 1, "verdict")

# Coverage.
run(["coverage", "--potentials", DATA / "u_potentials.json",
     DATA / "u_noisy_potentials.json", "--method", "ss"], 0, "coverage",
    lambda d: (expect(d["covered_pairs"] == [["n_{1,1}", "n_{4,2}"], ["n_{4,2}", "n_{5,3}"]],
                      d["covered_pairs"]),
               expect(abs(d["ratio"] - 3 / 14) < 1e-12, d["ratio"]),
               expect(d["literal"] is False, "literal")))
run(["coverage", "--net", three_layer, "--inputs", DATA / "ex1.json", DATA / "ex2.json",
     "--method", "ss", "--float-oracle"], 0, "coverage",
    lambda d: expect(["n_{3,1}", "n_{1,2}"] in d["covered_pairs"], d["covered_pairs"]))
run(["coverage", "--net", motivating, "--goal", DATA / "sv_goal.json"], 1, "verdict",
    lambda d: expect(d["witness"]["coverage"] >= 0.5, "coverage below goal"))
run(["coverage", "--net", three_layer, "--inputs", DATA / "ex1.json"], 3)

# Intervals, conversion, conformance, benchmark generation.
run(["intervals", three_layer, "--box", "1:1,-3:-1"], 0, "intervals",
    lambda d: expect(d["bounds"]["potentials"][0][0][0] <= -1.3 <=
                     d["bounds"]["potentials"][0][0][1], "bound misses -1.3"))
run(["intervals", voc, "--box", ",".join(["0:1"] * 25), "--widen", "-20:20"], 0, "intervals")
run(["intervals", motivating, "--box", "0:1,0:1", "--fixed-point", "--fixedbv", "<8,8>"], 0,
    "intervals")
run(["convert", "0.749", "--fixedbv", "<4,6>"], 0, "convert",
    lambda d: expect(d["raw"] == 48 and d["value"] == 0.75, d))
run(["convert", "0.749", "--fixedbv", "<4,6>", "--rounding", "truncate"], 0, "convert",
    lambda d: expect(d["raw"] == 47, d))
run(["conformance", voc, "--formats", "<2,2> <8,8> <32,32>"], 0, "conformance",
    lambda d: expect(d["reports"][-1]["summary"]["max_abs_dev"] <= 1e-6, "<32,32> deviation"))
run(["gen-bench", "--out", "bench", "--non-vocalic", "3"], 0, "gen-bench",
    lambda d: expect(d["files"] == 5 + 5 * 20 + 3, d["files"]))

# Errors.
run(["verify", DATA / "missing.nnet", phi], 3)
run(["verify", motivating, DATA / "missing.json"], 3)
run(["verify", motivating, phi, "--fixedbv", "<4;6>"], 3)
run(["convert", "abc"], 3)
run(["no-such-command"], 3)

if failures:
    print("\n".join(failures))
    sys.exit(1)
print("all CLI checks passed")
