#!/usr/bin/env python3
"""End-to-end cases for the command-line tool: exit codes, error envelopes,
output formats, artifacts, and worker determinism."""

import json
import os
import subprocess
import sys
import tempfile

BIN = sys.argv[1] if len(sys.argv) > 1 else "build/twistlab"
FAILURES = []


def run(*args, **kw):
    env = dict(os.environ)
    env.update(kw.pop("env", {}))
    return subprocess.run([BIN, *args], capture_output=True, text=True,
                          env=env, **kw)


def check(name, cond, extra=""):
    if cond:
        print(f"ok   {name}")
    else:
        print(f"FAIL {name} {extra}")
        FAILURES.append(name)


def envelope(proc):
    try:
        return json.loads(proc.stderr.strip().splitlines()[-1])
    except (json.JSONDecodeError, IndexError):
        return {}


# analyze: profile facts in JSON form
p = run("--label", "53a1", "analyze", "--format", "json")
doc = json.loads(p.stdout)
check("analyze-json", p.returncode == 0
      and doc["conductor"] == 53
      and doc["root_number"] == -1
      and doc["mod2_image"] == "full S3"
      and doc["omega_density_prediction"] == "2/3"
      and doc["lambda2"] == 1)

p = run("--label", "15a7", "analyze", "--format", "json")
doc = json.loads(p.stdout)
check("analyze-two-torsion", p.returncode == 0
      and doc["rational_two_torsion"] is True
      and doc["omega_density_prediction"] == "1/1")

# twist certificates
p = run("--label", "15a7", "twist", "--d", "29", "--format", "json")
doc = json.loads(p.stdout)
check("twist-proved", p.returncode == 0
      and doc["conclusion"].startswith("CorankOneProved")
      and doc["lambda_twist"] == 2)

p = run("--label", "15a7", "twist", "--d", "15")
check("twist-not-coprime", p.returncode == 2
      and envelope(p).get("code") == "HypothesisViolated")

p = run("--label", "53a1", "twist", "--d", "12")
check("twist-not-squarefree", p.returncode == 2
      and envelope(p).get("code") == "NonSquarefree")

# classify-prime across formats
p = run("--label", "53a1", "classify-prime", "--ell", "13", "--format", "json")
doc = json.loads(p.stdout)
check("classify-in-M", p.returncode == 0 and doc["in_M"] is True)

p = run("--label", "53a1", "classify-prime", "--ell", "13", "--format", "tsv")
check("classify-tsv", p.returncode == 0 and "in_M\ttrue" in p.stdout)

p = run("--label", "53a1", "classify-prime", "--ell", "53")
check("classify-bad-prime", p.returncode == 2
      and envelope(p).get("code") == "BadPrime")

# construct: prescribed lambda, worked examples
p = run("--label", "17a4", "construct", "--lambda", "0", "--format", "json")
doc = json.loads(p.stdout)
check("construct-identity", p.returncode == 0 and doc["d"] == 1)

p = run("--label", "17a4", "construct", "--lambda", "4", "--format", "json")
doc = json.loads(p.stdout)
check("construct-15", p.returncode == 0 and doc["d"] == 15
      and doc["lambda_check"] == 4)

p = run("--label", "53a1", "construct", "--lambda", "2")
check("construct-parity", p.returncode == 2
      and envelope(p).get("code") == "HypothesisViolated")

# census: artifacts, tiny-X well-formedness, determinism
with tempfile.TemporaryDirectory() as tmp:
    a = os.path.join(tmp, "a")
    b = os.path.join(tmp, "b")
    p = run("--label", "53a1", "census", "--limit", "2000", "--out", a,
            "--workers", "1")
    names = sorted(os.listdir(a)) if os.path.isdir(a) else []
    check("census-artifacts", p.returncode == 0 and names ==
          ["primes.csv", "ratio_series.tsv", "report.json", "twists.csv"],
          str(names))
    with open(os.path.join(a, "report.json")) as f:
        rep = json.load(f)
    check("census-report", rep["squarefree_census"]["total"] == 795
          and rep["squarefree_census"]["n_Omega"] == 192)
    with open(os.path.join(a, "primes.csv")) as f:
        head = f.readline().strip()
    check("census-primes-header",
          head == "ell,mod8,chi,in_omega,n_ell,in_M,in_P")

    p = run("--label", "53a1", "census", "--limit", "2000", "--out", b,
            "--workers", "3")
    with open(os.path.join(a, "report.json"), "rb") as f:
        ra = f.read()
    with open(os.path.join(b, "report.json"), "rb") as f:
        rb = f.read()
    check("census-determinism", p.returncode == 0 and ra == rb)

    p = run("--label", "53a1", "census", "--limit", "10", "--out",
            os.path.join(tmp, "tiny"))
    with open(os.path.join(tmp, "tiny", "report.json")) as f:
        rep = json.load(f)
    check("census-tiny", p.returncode == 0 and rep["prime_census"] is None
          and rep["squarefree_census"]["total"] == 4)

    p = run("--label", "53a1", "census", "--limit", "200000000")
    check("census-guard", p.returncode == 2
          and envelope(p).get("code") == "ResourceLimit")

# curve files: bare a-invariants work, singular models are refused
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "c.json")
    with open(path, "w") as f:
        json.dump({"a_invariants": [0, -1, 1, -10, -20]}, f)
    p = run("--curve-file", path, "analyze", "--format", "json")
    doc = json.loads(p.stdout)
    check("curve-file", p.returncode == 0 and doc["conductor"] == 11
          and doc["label"] == "11x1")

    with open(path, "w") as f:
        json.dump({"a_invariants": [0, 0, 0, 0, 0]}, f)
    p = run("--curve-file", path, "analyze")
    check("curve-file-singular", p.returncode == 2
          and envelope(p).get("code") == "SingularCurve")

    p = run("--curve-file", path, "--label", "53a1", "analyze")
    check("two-sources", p.returncode == 2
          and envelope(p).get("code") == "BadInput")

# labels and usage errors
p = run("--label", "nonsense!", "analyze")
check("bad-label", p.returncode == 2 and envelope(p).get("code") == "BadInput")

p = run("--label", "11a1", "analyze", "--offline")
check("offline-miss", p.returncode == 2
      and envelope(p).get("code") == "NotFound")

p = run()
check("no-subcommand", p.returncode == 2
      and envelope(p).get("code") == "BadInput")

p = run("--label", "53a1", "analyze", "--format", "yaml")
check("bad-format", p.returncode == 2
      and "format" in envelope(p).get("clause", ""))

p = run("--help")
check("help", p.returncode == 0 and "census" in p.stdout)

print(f"{len(FAILURES)} failures")
sys.exit(1 if FAILURES else 0)
