"""End-to-end checks of the daeo command-line driver.

Usage: cli_tests.py <daeo binary> <schema file>
"""

import csv
import io
import json
import math
import os
import subprocess
import sys
import tempfile

import jsonschema

DAEO = sys.argv[1]
SCHEMA = json.load(open(sys.argv[2]))
TAU = math.log(2.0) / 3.0

failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def run(*args):
    return subprocess.run([DAEO, *args], capture_output=True, text=True)


def rows_of(text):
    return [[float(v) for v in r] for r in list(csv.reader(io.StringIO(text)))[1:]]


def validates(doc):
    try:
        jsonschema.validate(doc, SCHEMA)
        return True
    except jsonschema.ValidationError as err:
        print(err)
        return False


# Event row near ln2/3 at dt = 0.25.
r = run("solve", "--problem", "simple", "--dt", "0.25")
check(r.returncode == 0, "solve simple dt=0.25 succeeds")
rows = rows_of(r.stdout)
events = [row for row in rows if row[4] == 1.0]
check(len(events) == 1, "exactly one event row")
check(abs(events[0][0] - TAU) <= 0.2 * 0.25**2, "event row within 0.2 dt^2 of ln2/3")
check(all(b[0] > a[0] for a, b in zip(rows, rows[1:])), "rows strictly increasing in t")

r = run("solve", "--dt", "0.25", "--mode", "no-events")
check(r.returncode == 0 and all(row[4] == 0.0 for row in rows_of(r.stdout)),
      "no event rows without event correction")

# Files, sidecar and schema.
with tempfile.TemporaryDirectory() as d:
    out = os.path.join(d, "traj.csv")
    r = run("solve", "--dt", "0.05", "--out", out)
    check(r.returncode == 0 and r.stdout == "", "solve --out writes nothing to stdout")
    side = json.load(open(os.path.join(d, "traj.json")))
    check(validates(side), "csv sidecar validates against the schema")
    check(side["counts"]["steps"] == 20, "sidecar step count")
    csv_rows = rows_of(open(out).read())
    check(side["events"][0]["tau"] == next(r[0] for r in csv_rows if r[4] == 1.0),
          "sidecar event tau equals the event row")

    cfg = os.path.join(d, "solver.cfg")
    open(cfg, "w").write("# coarse\ndt = 0.25\nmode = no-events\n")
    r = run("solve", "--config", cfg, "--format", "json")
    doc = json.loads(r.stdout)
    check(doc["config"]["dt"] == "0.25" and doc["config"]["mode"] == "no-events",
          "config file is applied")
    r = run("solve", "--config", cfg, "--dt", "0.1", "--format", "json")
    check(float(json.loads(r.stdout)["config"]["dt"]) == 0.1, "flags override the config file")

r = run("solve", "--problem", "robust", "--dt", "0.01", "--reopt-period", "10",
        "--format", "json")
check(r.returncode == 0, "robust reopt 10 succeeds")
doc = json.loads(r.stdout)
check(validates(doc), "json output with rows validates against the schema")
check(doc["counts"]["global_searches"] == math.ceil(doc["counts"]["steps"] / 10) + 1,
      "robust global-search count is ceil(steps/10)+1")
check(len({row[3] for row in doc["rows"]}) > 1, "robust optimizer count varies")

# json rows reproduce the csv rows.
a = rows_of(run("solve", "--dt", "0.1").stdout)
b = json.loads(run("solve", "--dt", "0.1", "--format", "json").stdout)["rows"]
check(a == b, "csv and json rows agree bit-exactly")

# Convergence and bench.
r = run("convergence", "--dt", "0.1")
check(r.returncode == 0 and "# slope_with_events: n/a" in r.stdout,
      "single-dt convergence reports n/a slopes")
r = run("convergence", "--dt", "0.1,0.05,0.025", "--format", "json")
doc = json.loads(r.stdout)
check(len(doc["rows"]) == 3 and doc["slope_with_events"] is not None,
      "convergence json has rows and slopes")
r = run("bench", "--dt", "0.25", "--reps", "2", "--format", "json")
doc = json.loads(r.stdout)
check(r.returncode == 0 and len(doc["rows"]) == 3 and all(x["ms_min"] > 0 for x in doc["rows"]),
      "bench dt=0.25 runs all modes with positive times")

# Exit codes.
check(run("solve", "--dt", "-1").returncode == 2, "dt <= 0 exits 2")
check(run("solve", "--dt", "0").returncode == 2, "dt = 0 exits 2")
check(run("solve", "--problem", "nope").returncode == 2, "unknown problem exits 2")
check(run("solve", "--bogus").returncode == 2, "unknown flag exits 2")
check(run("solve", "--mode", "sometimes").returncode == 2, "unknown mode exits 2")
check(run().returncode == 2, "missing subcommand exits 2")
with tempfile.TemporaryDirectory() as d:
    cfg = os.path.join(d, "bad.cfg")
    open(cfg, "w").write("newton_max_iter = 1\nnewton_tol = 1e-300\n")
    r = run("solve", "--problem", "robust", "--dt", "0.1", "--config", cfg)
    check(r.returncode == 3, "solver failure exits 3")
    check("at t = " in r.stderr, "solver failure reports the failing t")
    open(cfg, "w").write("no_such_key = 1\n")
    check(run("solve", "--config", cfg).returncode == 2, "unknown config key exits 2")

print(f"{len(failures)} failure(s)")
sys.exit(1 if failures else 0)
