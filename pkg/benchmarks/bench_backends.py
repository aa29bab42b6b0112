"""Time the compiled and pure-Python backends on the same runs.

Both backends must produce identical results for the same seed; the script
checks that before reporting the speed-up.

    python benchmarks/bench_backends.py --iterations 2000 --repeat 3
"""
import argparse
import statistics
import sys
import time

from gsemo import _backend, instances
from gsemo.diagnostics import Landscape
from gsemo.engines import RunConfig, gsemo, one_plus_one_ea

WORKLOADS = {
    "gsemo/cut-n12": (gsemo, lambda: instances.cut_instances(12)[2][1], None),
    "gsemo/coverage-n12-k4": (gsemo, instances.coverage, 4),
    "gsemo/regression-n10-k3": (gsemo, instances.regression, 3),
    "gsemo/multiplicative-n12-k4": (gsemo, lambda: instances.perturbed_coverage("multiplicative"), 4),
    "oneplusone/coverage-n12-k4": (one_plus_one_ea, instances.coverage, 4),
}


def timed(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--iterations", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)
    if not _backend.COMPILED:
        print("compiled kernels unavailable; nothing to compare", file=sys.stderr)
        return 1

    print(f"{'workload':32} {'python s':>10} {'compiled s':>11} {'speed-up':>9}  identical")
    ok = True
    for name, (engine, make, k) in WORKLOADS.items():
        f = make()
        cfg = RunConfig(args.seed, args.iterations, k=k)
        tp, rp = timed(lambda: engine(f, cfg, backend="python"), args.repeat)
        tc, rc = timed(lambda: engine(f, cfg, backend="compiled"), args.repeat)
        same = rp.fingerprint() == rc.fingerprint()
        ok &= same
        print(f"{name:32} {tp:10.4f} {tc:11.5f} {tp / tc:8.0f}x  {same}")

    f = instances.regression(12, seed=3002)
    _backend_compiled = _backend.COMPILED
    tc, fast = timed(lambda: Landscape(f).table, args.repeat)
    _backend.COMPILED = False
    try:
        tp, slow = timed(lambda: Landscape(f).table, args.repeat)
    finally:
        _backend.COMPILED = _backend_compiled
    same = bool((fast == slow).all())
    ok &= same
    print(f"{'tabulate/regression-n12':32} {tp:10.4f} {tc:11.5f} {tp / tc:8.0f}x  {same}")
    return 0 if ok else 2


if __name__ == "__main__":
    sys.exit(main())
