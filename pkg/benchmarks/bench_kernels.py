"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--dims 3 4 6] [--repeat 5]

Each row reports the best per-call time of both backends and their ratio.
The ``moments`` row is the full pipeline used by the detectors: apply the
Reduction map on the second factor, eigensolve, then form power sums.
"""
import argparse
import timeit

import numpy as np

from posmap import _pykernels, states
from posmap._backend import compiled_kernels


def _random_density(rng, n):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = A @ A.conj().T
    return np.ascontiguousarray(rho / np.trace(rho))


def _antisymmetric(rng, d):
    A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    U = A - A.T
    return np.ascontiguousarray(U / np.linalg.norm(U, 2))


def _moments(kern, rho, d):
    out = kern.reduction_second(rho, d, d, 0.5)
    ev = np.linalg.eigvalsh(out / np.trace(out).real)
    return kern.power_sums(np.ascontiguousarray(ev), 5)


def cases(d, rng):
    rho = _random_density(rng, d * d)
    U = _antisymmetric(rng, d)
    ev = np.ascontiguousarray(np.linalg.eigvalsh(rho))
    return {
        "partial_transpose": lambda k: k.partial_transpose(rho, d, d, True),
        "reduction_second": lambda k: k.reduction_second(rho, d, d, 0.5),
        "gen_choi_second": lambda k: k.gen_choi_second(rho, d, d, 1),
        "breuer_hall_second": lambda k: k.breuer_hall_second(rho, d, d, U),
        "power_sums": lambda k: k.power_sums(ev, 5),
        "moments": lambda k: _moments(k, rho, d),
    }


def best_time(func, repeat):
    timer = timeit.Timer(func)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", type=int, nargs="+", default=[3, 4, 6])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    ck = compiled_kernels()
    if ck is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation` first")
    rng = np.random.default_rng(0)
    # sanity: both backends agree before we time them
    rho = _random_density(rng, 9)
    assert np.allclose(ck.reduction_second(rho, 3, 3, 0.5), _pykernels.reduction_second(rho, 3, 3, 0.5))
    assert np.allclose(_moments(ck, rho, 3), _moments(_pykernels, rho, 3))

    print(f"{'kernel':<20} {'d':>3} {'cython (us)':>12} {'numpy (us)':>12} {'speedup':>8}")
    for d in args.dims:
        for name, call in cases(d, rng).items():
            t_c = best_time(lambda: call(ck), args.repeat) * 1e6
            t_p = best_time(lambda: call(_pykernels), args.repeat) * 1e6
            print(f"{name:<20} {d:>3} {t_c:>12.2f} {t_p:>12.2f} {t_p / t_c:>7.1f}x")

    tiles = np.ascontiguousarray(states.tiles_upb_state())
    t_c = best_time(lambda: _moments(ck, tiles, 3), args.repeat) * 1e6
    t_p = best_time(lambda: _moments(_pykernels, tiles, 3), args.repeat) * 1e6
    print(f"{'moments(tiles)':<20} {3:>3} {t_c:>12.2f} {t_p:>12.2f} {t_p / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
