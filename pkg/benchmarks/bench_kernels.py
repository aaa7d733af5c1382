"""Compare the numba and numpy Malcev kernels on random GF(p) table batches.

    python3 benchmarks/bench_kernels.py [--batch 20000] [--dims 3 4 5] [--p 5]

The two backends must agree on every mask; timings exclude numba's
first-call compilation (one warm-up call per shape).
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from malcevext import kernels
from malcevext.field import GF
from malcevext.sampling import skew_tensor


def batch(p: int, n: int, size: int, density: float, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    F = GF(p)
    return np.stack([skew_tensor(F, rng, n, n, density) for _ in range(size)])


def timed(fn, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--batch", type=int, default=20000)
    ap.add_argument("--dims", type=int, nargs="+", default=[3, 4, 5])
    ap.add_argument("--p", type=int, default=5)
    ap.add_argument("--density", type=float, default=0.3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"backend available: {kernels.backend()}")
    print(f"{'dim':>4} {'batch':>7} {'numpy s':>9} {'numba s':>9} {'parallel s':>10} {'speedup':>8} {'malcev':>7}")
    for n in args.dims:
        Cs = batch(args.p, n, args.batch, args.density, args.seed)
        ref = kernels.malcev_mask(Cs, args.p, use_numba=False)
        t_np = timed(lambda: kernels.malcev_mask(Cs, args.p, use_numba=False), repeat=1)
        if kernels.HAVE_NUMBA:
            kernels.malcev_mask(Cs[:2], args.p, use_numba=True)
            kernels.malcev_mask(Cs[:2], args.p, use_numba=True, parallel=True)
            got = kernels.malcev_mask(Cs, args.p, use_numba=True)
            par = kernels.malcev_mask(Cs, args.p, use_numba=True, parallel=True)
            assert np.array_equal(ref, got) and np.array_equal(ref, par), "backends disagree"
            t_nb = timed(lambda: kernels.malcev_mask(Cs, args.p, use_numba=True))
            t_par = timed(lambda: kernels.malcev_mask(Cs, args.p, use_numba=True, parallel=True))
            print(f"{n:>4} {len(Cs):>7} {t_np:>9.3f} {t_nb:>9.3f} {t_par:>10.3f} "
                  f"{t_np / t_nb:>7.1f}x {int(ref.sum()):>7}")
        else:
            print(f"{n:>4} {len(Cs):>7} {t_np:>9.3f} {'-':>9} {'-':>10} {'-':>8} {int(ref.sum()):>7}")


if __name__ == "__main__":
    main()
