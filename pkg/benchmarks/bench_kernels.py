"""Compare the compiled kernels with the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Each workload is run through both implementations on identical inputs;
results are checked for agreement before timings are reported.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from supercoh import _pykernels, kernels
from supercoh.bar import bar_complex, coboundary_csr
from supercoh.groups import FiniteAbelianGroup

try:
    from supercoh import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def _time(fn, repeat: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def workloads():
    rng = np.random.default_rng(0)
    dense = (rng.random((400, 600)) < 0.5).astype(np.uint8)
    packed = kernels.pack_bits(dense)
    yield ("gf2_rref 400x600 random", "gf2_rref",
           lambda impl: impl.gf2_rref(packed.copy(), 600), lambda r: r[0])

    bar = bar_complex(FiniteAbelianGroup([2, 2, 2]))
    cob = bar.coboundary_gf2(3)
    cpacked = kernels.pack_bits(cob)
    yield (f"gf2_rref bar delta^3 (Z/2)^3 {cob.shape[0]}x{cob.shape[1]}", "gf2_rref",
           lambda impl: impl.gf2_rref(cpacked.copy(), cob.shape[1]), lambda r: r[0])

    mat = rng.integers(0, 64, size=(60, 60)).astype(np.int64)
    mat[:, ::3] *= 4
    yield ("local_smith 60x60 mod 2^8", "local_smith",
           lambda impl: impl.local_smith(mat.copy(), 2, 256), lambda r: sorted(r))

    bar4 = bar_complex(FiniteAbelianGroup([4, 4]))
    indptr, indices, data, k = coboundary_csr(bar4, 2)
    yield (f"sparse_unit_eliminate bar delta^2 Z/4+Z/4 ({len(indptr) - 1} rows)", "sparse_unit_eliminate",
           lambda impl: impl.sparse_unit_eliminate(indptr.copy(), indices.copy(), data.copy(), k, 2, 64),
           lambda r: r[0])


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled kernels are not built; only the fallback is available")
    print(f"{'workload':58} {'cython s':>10} {'python s':>10} {'speedup':>8}")
    for name, fn_name, call, key in workloads():
        tp, rp = _time(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:58} {'-':>10} {tp:10.4f} {'-':>8}")
            continue
        tc, rc = _time(lambda: call(_ckernels), args.repeat)
        if key(rc) != key(rp):
            raise SystemExit(f"{name}: implementations disagree")
        print(f"{name:58} {tc:10.4f} {tp:10.4f} {tp / tc:8.1f}x")


if __name__ == "__main__":
    main()
