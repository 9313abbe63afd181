#!/usr/bin/env python3
"""Recompute Mean / Var / Best-k for every arm from persisted run files.

Reads <run_dir>/runs/*.json (role "arm" only), aggregates per arm, and
compares against <run_dir>/report.json. Exit status 0 when every value
matches exactly, 1 otherwise.

    reaggregate.py out/synthetic_default [--json]
"""

import argparse
import glob
import json
import os
import sys
from collections import defaultdict


def mean(xs):
    if not xs:
        return 0.0
    total = 0.0
    for x in xs:
        total += x
    return total / len(xs)


def population_variance(xs):
    if not xs:
        return 0.0
    m = mean(xs)
    total = 0.0
    for x in xs:
        total += (x - m) * (x - m)
    return total / len(xs)


def best_of_top_dev(dev, test, k):
    # sorted() is stable, so equal dev scores keep seed order.
    order = sorted(range(len(dev)), key=lambda i: -dev[i])
    return max(test[i] for i in order[:k])


def aggregate(runs, best_k):
    valid = [r for r in sorted(runs, key=lambda r: r["seed"]) if r["valid"]]
    test = [r["test"]["f_beta"] for r in valid]
    dev = [r["best_dev_f"] for r in valid]
    out = {"runs_aggregated": len(valid), "mean_raw": 0.0, "var_raw": 0.0, "best_k_raw": 0.0,
           "mean_precision": 0.0, "mean_recall": 0.0}
    if valid:
        out["mean_raw"] = mean(test)
        out["var_raw"] = population_variance(test)
        out["best_k_raw"] = best_of_top_dev(dev, test, min(best_k, len(valid)))
        out["mean_precision"] = mean([r["test"]["precision"] for r in valid])
        out["mean_recall"] = mean([r["test"]["recall"] for r in valid])
    out["mean"] = 100.0 * out["mean_raw"]
    out["var"] = 1e4 * out["var_raw"]
    out["best_k"] = 100.0 * out["best_k_raw"]
    return out


def load_runs(run_dir):
    by_arm = defaultdict(list)
    best_k = None
    for path in sorted(glob.glob(os.path.join(run_dir, "runs", "*.json"))):
        with open(path) as f:
            doc = json.load(f)
        if doc.get("role") != "arm":
            continue
        by_arm[doc["arm"]].append(doc)
        best_k = doc["protocol"]["best_k"]
    return by_arm, best_k


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("run_dir")
    parser.add_argument("--json", action="store_true", help="print recomputed aggregates")
    args = parser.parse_args()

    by_arm, best_k = load_runs(args.run_dir)
    if not by_arm:
        print(f"no arm runs under {args.run_dir}/runs", file=sys.stderr)
        return 1
    recomputed = {arm: aggregate(runs, best_k) for arm, runs in by_arm.items()}
    if args.json:
        json.dump(recomputed, sys.stdout, indent=2, sort_keys=True)
        print()

    with open(os.path.join(args.run_dir, "report.json")) as f:
        report = json.load(f)
    mismatches = 0
    reported = {a["name"]: a for a in report["arms"]}
    if set(reported) != set(recomputed):
        print(f"arm sets differ: report {sorted(reported)} vs runs {sorted(recomputed)}")
        mismatches += 1
    for name in sorted(set(reported) & set(recomputed)):
        for key, value in recomputed[name].items():
            if reported[name][key] != value:
                print(f"{name}.{key}: report {reported[name][key]!r} recomputed {value!r}")
                mismatches += 1
    if mismatches:
        print(f"{mismatches} mismatch(es)")
        return 1
    print(f"{len(recomputed)} arms reproduced exactly")
    return 0


if __name__ == "__main__":
    sys.exit(main())
