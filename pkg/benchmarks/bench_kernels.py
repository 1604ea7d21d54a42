"""Compare the compiled and pure-Python kernel backends.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--size 100000]

Prints the best wall time per kernel for each backend, the speed-up and the
largest absolute difference between the two outputs.
"""

import argparse
import sys
import timeit

import numpy as np

from ggcport import _kernels
from ggcport.mixing import FiniteGammaConvolution, Gig, _series
from ggcport.sampling import _gig_key, gig_envelope


def _cases(size):
    conv = FiniteGammaConvolution([(0.7, 0.5), (2.0, 1.0), (1.3, 3.0)])
    ser = _series(conv)
    y = np.linspace(1e-3, ser.upper, size)
    args = (ser.coeffs, ser.rho, ser.beta_min, ser.v, ser.log_c)
    law = Gig(0.5, 1.0, 2.0)
    env = gig_envelope(law).as_tuple()
    key = _gig_key(1)
    index = np.arange(size, dtype=np.uint64)
    return {
        "moschopoulos_coefficients": lambda k: k.moschopoulos_coefficients(ser.ratios, ser.alphas, 400),
        "moschopoulos_pdf": lambda k: k.moschopoulos_pdf(y, *args),
        "moschopoulos_cdf": lambda k: k.moschopoulos_cdf(y, *args),
        "gig_log_rejection": lambda k: k.gig_log_rejection(key, 0, size // 10, law.lam, law.a, law.b, env)[0],
        "counter_uniform": lambda k: k.counter_uniform(key, index, 0),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--size", type=int, default=100_000)
    args = p.parse_args(argv)
    if _kernels.compiled is None:
        print("compiled backend unavailable; build with `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    backends = {"cython": _kernels.compiled, "python": _kernels.python}
    print(f"{'kernel':<28}{'cython [ms]':>12}{'python [ms]':>13}{'speed-up':>10}{'max |diff|':>12}")
    for name, fn in _cases(args.size).items():
        best, out = {}, {}
        for label, mod in backends.items():
            out[label] = np.asarray(fn(mod), dtype=float)
            best[label] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(out["cython"] - out["python"])))
        print(
            f"{name:<28}{1e3 * best['cython']:>12.3f}{1e3 * best['python']:>13.3f}"
            f"{best['python'] / best['cython']:>9.1f}x{diff:>12.2e}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
