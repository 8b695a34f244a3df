"""End-to-end checks of the hgf_lab command line and of the result schema.

Usage: cli_and_schema.py <hgf_lab binary> <schema file> <configs dir>
"""

import json
import os
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

BIN, SCHEMA, CONFIGS = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
failures = []


def check(cond, what):
    print(("ok   " if cond else "FAIL ") + what)
    if not cond:
        failures.append(what)


def lab(*args, env=None):
    full_env = dict(os.environ)
    full_env.pop("HGF_THREADS", None)
    full_env.update(env or {})
    return subprocess.run([BIN, *args], capture_output=True, text=True, env=full_env)


def result_files(root):
    return sorted(Path(root).glob("*/*.jsonl"))


def validate_file(path, validator):
    records = [json.loads(line) for line in path.read_text().splitlines()]
    for r in records:
        validator.validate(r)
    order = [r["record"] for r in records]
    kinds_ok = order[0] == "header" and order[-1] == "footer" and order[-2] == "summary"
    kinds_ok = kinds_ok and all(k == "entry" for k in order[1:-2])
    return records, kinds_ok


schema = json.loads(SCHEMA.read_text())
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

with tempfile.TemporaryDirectory() as tmp:
    runs = {
        "ballot": ["ballot", "--n-grid", "2", "--n-grid", "5", "--n-grid", "10", "--reps", "2000"],
        "perturbation": ["perturbation", "--n-grid", "2", "--n-grid", "4", "--eps", "0.1", "--reps", "2000"],
        "mean_measure": ["mean_measure", "--ladder", "1,10", "--ladder", "2,5", "--reps", "20"],
        "avoidance": ["avoidance", "--ladder", "2,5", "--reps", "20"],
        "max_law": ["max_law", "--ladder", "2,4", "--reps", "120", "--window", "-1,inf"],
        "overlap_census": ["overlap_census", "--ladder", "2,5", "--reps", "20"],
        "log_correction": ["log_correction", "--ladder", "2,2", "--ladder", "3,3", "--ladder", "4,4", "--reps", "20"],
        "chen_stein_budget": ["chen_stein_budget", "--ladder", "2,5", "--reps", "20"],
    }
    for kind, args in runs.items():
        out = Path(tmp) / kind
        p = lab(*args, "--out", str(out), "--seed", "3")
        check(p.returncode == 0, f"{kind}: exit 0 ({p.stderr.strip()})")
        files = result_files(out)
        check(len(files) == 1, f"{kind}: one result file")
        if files:
            try:
                records, order_ok = validate_file(files[0], validator)
                check(order_ok, f"{kind}: record order header, entries, summary, footer")
                check(records[0]["kind"] == kind, f"{kind}: header names the kind")
                check(files[0].stem == records[0]["config_hash"], f"{kind}: file named by config hash")
                check(records[-1]["gaussian_draws"] == records[-1]["expected_draws"], f"{kind}: draw accounting")
                check(files[0].with_suffix("").with_suffix(".plot.csv").exists(), f"{kind}: plot table written")
            except jsonschema.ValidationError as e:
                check(False, f"{kind}: schema validation: {e.message}")

    # Same config from a file, rerun: new directory, identical statistics.
    cfg = Path(tmp) / "ballot.json"
    cfg.write_text(json.dumps({"kind": "ballot", "n_grid": [3, 6], "reps": 5000, "master_seed": 8}))
    out = Path(tmp) / "rerun"
    a = lab("run", "--config", str(cfg), "--out", str(out))
    b = lab("ballot", "--config", str(cfg), "--out", str(out), "--threads", "4")
    c = lab("ballot", "--config", str(cfg), "--out", str(out), env={"HGF_THREADS": "3"})
    check(a.returncode == b.returncode == c.returncode == 0, "config-file runs succeed")
    files = result_files(out)
    check(len(files) == 3 and len({f.parent for f in files}) == 3, "reruns land in fresh directories")
    blocks = [[l for l in f.read_text().splitlines()[1:-1]] for f in files]
    check(blocks[0] == blocks[1] == blocks[2], "statistics blocks identical across reruns and threads")
    footers = sorted(json.loads(f.read_text().splitlines()[-1])["threads"] for f in files)
    check(footers == [1, 3, 4], "thread count from default, HGF_THREADS and --threads")

    both = lab("ballot", "--config", str(cfg), "--out", str(out), "--threads", "2", env={"HGF_THREADS": "5"})
    newest = max(result_files(out), key=lambda f: f.parent.name)
    check(both.returncode == 0 and json.loads(newest.read_text().splitlines()[-1])["threads"] == 2,
          "--threads overrides HGF_THREADS")

    # Exit codes.
    check(lab("avoidance", "--ladder", "1,1", "--out", tmp).returncode == 2, "invalid ladder exits 2")
    check(lab("perturbation", "--n-grid", "4", "--eps", "0", "--out", tmp).returncode == 2, "eps = 0 exits 2")
    check(lab("avoidance", "--ladder", "2,20", "--out", tmp).returncode == 3, "oversized tree exits 3")
    check(lab("avoidance", "--ladder", "2,8", "--budget", "1000", "--out", tmp).returncode == 3, "--budget exits 3")
    check(lab("ballot", "--bogus").returncode == 2, "unknown flag exits 2")
    check(lab("run", "--config", str(Path(tmp) / "missing.json")).returncode == 2, "missing config exits 2")
    bad = Path(tmp) / "bad.json"
    bad.write_text('{"kind": "ballot", "n_grid": [4], "colour": 1}')
    p = lab("run", "--config", str(bad), "--out", tmp)
    check(p.returncode == 2 and "colour" in p.stderr, "unknown config field is named in the diagnostic")
    check(lab("avoidance", "--config", str(cfg), "--out", tmp).returncode == 2, "subcommand and config kind must agree")

    # Shipped example configs validate (not run: some are long).
    shipped = sorted(CONFIGS.glob("*.json"))
    check(len(shipped) == len(runs), "one shipped config per kind")
    for f in shipped:
        p = lab("run", "--config", str(f), "--check")
        check(p.returncode == 0 and p.stdout.startswith(f.stem + " "), f"{f.name}: validates")

sys.exit(1 if failures else 0)
