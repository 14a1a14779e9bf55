"""Time the compiled and pure-Python roof kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json]

Both backends do identical arithmetic, so the roof values printed alongside
the timings must agree (exactly for the coherence objectives).
"""
import argparse
import json
import time

import numpy as np

from cohconc import _pykernels, kernels
from cohconc.monotones import COHERENCE_K, ENTANGLEMENT_K, QI, MonotoneId
from cohconc.roof import RoofProblem, _Objective, minimize_roof
from cohconc.states import random_mixed

WORKLOADS = [
    ("C2 d=4 rank=3", 4, 3, MonotoneId(COHERENCE_K, 2)),
    ("C3 d=5 rank=3", 5, 3, MonotoneId(COHERENCE_K, 3)),
    ("Qi d=6 rank=4", 6, 4, MonotoneId(QI)),
    ("E2 d=3x3 rank=2", 9, 2, MonotoneId(ENTANGLEMENT_K, 2)),
]


def _best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_sweep(impl, W0, obj, repeat):
    def go():
        W = W0.copy()
        vals = impl.row_values(W, obj.kind, obj.k, obj.dloc, obj.scale, obj.subsets, 0.0)
        for _ in range(20):
            impl.sweep(W, vals, obj.kind, obj.k, obj.dloc, obj.scale, obj.subsets, 0.1, True, 0.0)
        return float(vals.sum())
    return _best_of(go, repeat)


def bench_roof(impl, problem, repeat):
    saved = kernels.impl
    kernels.impl = impl
    try:
        return _best_of(lambda: minimize_roof(problem).value, repeat)
    finally:
        kernels.impl = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    if not kernels.compiled_available():
        raise SystemExit("compiled extension not built; run pip install -e . --no-build-isolation")
    from cohconc import _ckernels

    rows = []
    for name, d, rank, mid in WORKLOADS:
        rho = random_mixed(d, rank, 1)
        obj = _Objective(mid, d)
        rng = np.random.default_rng(0)
        W0 = rng.normal(size=(rank * rank, d)) + 1j * rng.normal(size=(rank * rank, d))
        W0 = np.ascontiguousarray(W0 / np.linalg.norm(W0))
        problem = RoofProblem(rho, mid, restarts=4, seed=0)
        for what, fn in (("20 sweeps", lambda impl: bench_sweep(impl, W0, obj, args.repeat)),
                         ("roof, 4 restarts", lambda impl: bench_roof(impl, problem, args.repeat))):
            tc, vc = fn(_ckernels)
            tp, vp = fn(_pykernels)
            rows.append({"workload": name, "task": what, "cython_s": tc, "python_s": tp,
                         "speedup": tp / tc, "value_delta": abs(vc - vp)})

    if args.json:
        print(json.dumps(rows, indent=1))
        return
    print(f"{'workload':18} {'task':18} {'cython [s]':>11} {'python [s]':>11} {'speedup':>8} {'|delta|':>9}")
    for r in rows:
        print(f"{r['workload']:18} {r['task']:18} {r['cython_s']:11.4f} {r['python_s']:11.3f} "
              f"{r['speedup']:7.1f}x {r['value_delta']:9.2g}")


if __name__ == "__main__":
    main()
