#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-Python scan kernels.

Times ``pair_scan`` on synthetic entities of growing size, asserts both
backends return identical pairs, and (with --mine) times a full mining run
in a subprocess per backend via the SACMINE_PURE_PYTHON switch.
"""

import argparse
import os
import random
import re
import subprocess
import sys
import tempfile
import time

import numpy as np

from sacmine.kernels import py_kernels

try:
    from sacmine.kernels import _ckernels
except ImportError:
    _ckernels = None


def synthetic_entity(rng, n, n_concepts=6, time_range=500, max_len=12):
    spans = sorted((s := rng.randrange(time_range), s + rng.randint(1, max_len))
                   for _ in range(n))
    starts = np.asarray([a for a, _ in spans], dtype=np.int64)
    ends = np.asarray([b for _, b in spans], dtype=np.int64)
    concepts = np.asarray([rng.randrange(n_concepts) for _ in spans],
                          dtype=np.int64)
    return starts, ends, concepts


def time_backend(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_pair_scan(sizes, repeats, seed):
    rng = random.Random(seed)
    print(f"{'n':>6} {'sac':>4} {'python':>12} {'compiled':>12} {'speedup':>8}")
    for n in sizes:
        starts, ends, concepts = synthetic_entity(rng, n)
        for sac_code, label in ((0, "none"), (2, "csac")):
            args = (starts, ends, concepts, 0, -1, sac_code)
            t_py, out_py = time_backend(py_kernels.pair_scan, args, repeats)
            if _ckernels is None:
                print(f"{n:>6} {label:>4} {t_py * 1e3:>10.2f}ms {'-':>12} {'-':>8}")
                continue
            t_c, out_c = time_backend(_ckernels.pair_scan, args, repeats)
            for a, b in zip(out_py, out_c):
                assert np.array_equal(np.asarray(a), np.asarray(b)), \
                    "backend outputs differ"
            print(f"{n:>6} {label:>4} {t_py * 1e3:>10.2f}ms {t_c * 1e3:>10.2f}ms "
                  f"{t_py / t_c:>7.1f}x")


def bench_full_mine(seed):
    env_base = {**os.environ}
    with tempfile.TemporaryDirectory() as tmp:
        ivf = os.path.join(tmp, "iv.csv")
        subprocess.run([sys.executable, "-m", "sacmine.cli", "gen", "--out", ivf,
                        "--entities", "60", "--chain", "6", "--noise", "40",
                        "--seed", str(seed)], check=True, env=env_base)
        outputs, mine_ms = {}, {}
        for backend, extra in (("compiled", {}), ("python", {"SACMINE_PURE_PYTHON": "1"})):
            out = os.path.join(tmp, f"tirps_{backend}.txt")
            proc = subprocess.run([sys.executable, "-m", "sacmine.cli", "mine",
                                   "--in", ivf, "--out", out, "--min-vs", "0.2",
                                   "--sac", "csac"],
                                  check=True, env={**env_base, **extra},
                                  capture_output=True, text=True)
            mine_ms[backend] = int(re.search(r"runtime_ms=(\d+)", proc.stdout)[1])
            with open(out, "rb") as f:
                outputs[backend] = re.sub(rb"runtime_ms=\d+", b"", f.read())
        assert outputs["compiled"] == outputs["python"], "mining outputs differ"
        print(f"\nfull mine (60 entities, ~46 intervals each, csac, min_vs=0.2): "
              f"compiled {mine_ms['compiled']}ms, python {mine_ms['python']}ms, "
              f"speedup {mine_ms['python'] / mine_ms['compiled']:.1f}x "
              "(identical output)")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="50,100,200,400",
                    help="comma-separated entity sizes")
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--mine", action="store_true",
                    help="also time a full mining run per backend")
    ns = ap.parse_args(argv)
    if _ckernels is None:
        print("note: compiled kernels unavailable, timing pure Python only")
    bench_pair_scan([int(s) for s in ns.sizes.split(",")], ns.repeats, ns.seed)
    if ns.mine:
        bench_full_mine(ns.seed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
