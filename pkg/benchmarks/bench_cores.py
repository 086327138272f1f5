"""Compare the pure-Python and Cython-compiled evaluator kernels.

Both kernels are compiled from the same source
(``updcheck/runtime/_evalcore.py``); this script times each on two
interpreter-bound workloads — a tight arithmetic loop and naive recursion —
and reports the speedup.  Run it from a checkout after ``pip install -e .``::

    python benchmarks/bench_cores.py [--scale N] [--reps N]
"""

from __future__ import annotations

import argparse
import statistics
import time

from updcheck.project import RawPackage, link_program
from updcheck.registry import Version
from updcheck.runtime import _evalcore
from updcheck.runtime.interp import Interpreter

try:
    from updcheck.runtime import _evalcore_c
except ImportError:
    _evalcore_c = None

WORKLOAD = """\
package bench;

fn spin(n: int) -> int {
    var acc: int = 0;
    var i: int = 0;
    while i < n {
        acc = acc + i * 3 % 7;
        if acc > 1000 {
            acc = acc - 1000;
        }
        i = i + 1;
    }
    return acc;
}

fn fib(n: int) -> int {
    if n < 2 {
        return n;
    }
    return fib(n - 1) + fib(n - 2);
}
"""


def build_program():
    raw = RawPackage(name="bench", version=Version.parse("0.0.0"),
                     origin="client", sources=[("src/bench.ml0", WORKLOAD)])
    return link_program([raw])


def time_kernel(program, kernel, scale: int, reps: int) -> dict[str, float]:
    interp = Interpreter(program, kernel=kernel, fuel=10 ** 12)
    results = {}
    for label, fn, args in (("spin", "bench.spin", [scale * 10_000]),
                            ("fib", "bench.fib", [min(24, scale + 18)])):
        samples = []
        for _ in range(reps):
            t0 = time.perf_counter()
            interp.call(fn, args)
            samples.append(time.perf_counter() - t0)
        results[label] = statistics.median(samples)
    return results


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--scale", type=int, default=10,
                        help="workload size multiplier (default %(default)s)")
    parser.add_argument("--reps", type=int, default=5,
                        help="repetitions per measurement, median is "
                             "reported (default %(default)s)")
    args = parser.parse_args()

    program = build_program()
    pure = time_kernel(program, _evalcore, args.scale, args.reps)
    print(f"{'workload':<10} {'pure':>10}", end="")
    if _evalcore_c is not None and not _evalcore_c.__file__.endswith(".py"):
        compiled = time_kernel(program, _evalcore_c, args.scale, args.reps)
        print(f" {'compiled':>10} {'speedup':>9}")
        for label in pure:
            ratio = pure[label] / compiled[label]
            print(f"{label:<10} {pure[label] * 1e3:>8.2f}ms "
                  f"{compiled[label] * 1e3:>8.2f}ms {ratio:>8.2f}x")
    else:
        print()
        for label in pure:
            print(f"{label:<10} {pure[label] * 1e3:>8.2f}ms")
        print("compiled kernel not available; showing pure kernel only")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
