"""Compare the compiled and pure-Python point-enumeration kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeat R]
"""

import argparse
import time

from ulm import _kernels_py, model, oracle

try:
    from ulm import _kernels
except ImportError:  # pragma: no cover
    _kernels = None

CASES = [
    ("spl special fiber (5,1,2,1)", lambda: model.build_components(model.build_spl_chart(5, 1, 2, 1)).special_fiber),
    ("class special fiber (5,1,3,1)", lambda: model.build_components(model.build_class_presentation(5, 1, 3, 1)).special_fiber),
    ("spl special fiber (6,1,2,1)", lambda: model.build_components(model.build_spl_chart(6, 1, 2, 1)).special_fiber),
    ("quiver incidence cone (5,1)", lambda: model.build_exc_incidence(5, 1)[0].ideal),
    ("Bl incidence cone (6,1)", lambda: model.build_exc_incidence(6, 1)[1].ideal),
]


def bench(fn, args, repeat):
    best, count = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        count, _pts = fn(*args)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return count, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--q", type=int, default=3)
    ns = ap.parse_args()
    print(f"{'case':34} {'count':>7} {'python s':>9} {'compiled s':>10} {'speedup':>8}")
    for name, make in CASES:
        I = make()
        polys, kinds, args = oracle.compile_ideal(I, ns.q)
        call = (polys, I.ring.nvars, ns.q, kinds, args)
        c_py, t_py = bench(_kernels_py.enumerate_points, call, ns.repeat)
        if _kernels is None:
            print(f"{name:34} {c_py:7d} {t_py:9.3f} {'n/a':>10} {'n/a':>8}")
            continue
        c_cy, t_cy = bench(_kernels.enumerate_points, call, ns.repeat)
        assert c_py == c_cy, (name, c_py, c_cy)
        print(f"{name:34} {c_py:7d} {t_py:9.3f} {t_cy:10.4f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
