"""Benchmark the hot kernels across backends: numba vs numpy vs pure Python.

Times three workloads and verifies that every backend returns bit-identical
results:

* convolution squares of ball elements (the certificate inner loop),
* conjugate-length scans over a large ball (the displacement oracle),
* the growth scan of a retraction over the rank-3 ball.

Usage: python benchmarks/bench_kernels.py [--heavy]
"""

import argparse
import hashlib
import time

from freenorm import GroupContext, convolve, parse_element
from freenorm import _kernels
from freenorm.selfless import RetractionFamily, _growth_cache, _scan_map_growth
from freenorm.treegeo import displacement_by_ball_scan
from freenorm.algebra import AlgebraElement

BACKENDS = ("numba", "numpy", "python")


def checksum(x: AlgebraElement) -> str:
    return hashlib.sha256(x.serialize().encode()).hexdigest()[:12]


def ball_element(ctx: GroupContext, radius: int) -> AlgebraElement:
    return AlgebraElement(ctx, {w: 1 for w in ctx.enumerate_ball(radius)})


def timed(fn, warmup: bool):
    if warmup:
        fn()  # first call may trigger JIT compilation
    started = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - started


def bench_convolution(heavy: bool) -> None:
    f2 = GroupContext.parse("a|b")
    radius = 5 if heavy else 4
    x = ball_element(f2, radius)
    print(f"\nconvolution: squaring the B({radius}) indicator ({len(x)} terms, "
          f"{len(x) ** 2} pairs)")
    digests = set()
    for backend in BACKENDS:
        if backend == "python" and heavy:
            print(f"  {backend:>6}: skipped (quadratic dict fold at this size)")
            continue
        out, dt = timed(lambda: convolve(x, x, backend=backend), warmup=(backend == "numba"))
        digests.add(checksum(out))
        print(f"  {backend:>6}: {dt * 1000:8.1f} ms   sha256[:12]={checksum(out)}")
    assert len(digests) == 1, "backends disagree"


def bench_power_chain() -> None:
    f2 = GroupContext.parse("a|b")
    x = parse_element("1*a + 1*a^-1 + 1*b + 1*b^-1", f2)
    y = convolve(x.adjoint(), x)
    print("\npower chain: (x* x)^4 for the generator sum (radius-8 support)")
    digests = set()
    for backend in BACKENDS:
        out, dt = timed(lambda: y.power(4, backend=backend), warmup=(backend == "numba"))
        digests.add(checksum(out))
        print(f"  {backend:>6}: {dt * 1000:8.1f} ms   terms={len(out)}")
    assert len(digests) == 1, "backends disagree"


def bench_displacement_scan(heavy: bool) -> None:
    f2 = GroupContext.parse("a|b")
    g = f2.word("b^3.a.b^-3")
    radius = 12 if heavy else 10
    count = f2.ball_count(radius)
    print(f"\ndisplacement oracle: min d(gv, v) over B({radius}) ({count} vertices)")
    for backend in ("numba", "numpy"):  # array scan, "python" flag maps to numpy here
        _kernels.set_backend(backend)
        try:
            out, dt = timed(lambda: displacement_by_ball_scan(g, radius), warmup=(backend == "numba"))
        finally:
            _kernels.set_backend(None)
        print(f"  {backend:>6}: {dt * 1000:8.1f} ms   min={out}")


def bench_growth_scan(heavy: bool) -> None:
    ctx = GroupContext.parse("x|y|a")
    family = RetractionFamily(ctx, ctx.word("x"))
    radius = 8 if heavy else 6
    ret = family.at(radius)
    print(f"\ngrowth scan: images over B({radius}) of the rank-3 ball "
          f"({ctx.ball_count(radius)} words)")
    values = set()
    for backend in BACKENDS:
        if backend == "python" and heavy:
            print(f"  {backend:>6}: skipped (recursive scan at this size)")
            continue
        _kernels.set_backend(backend)
        try:
            def run():
                _growth_cache.clear()
                return _scan_map_growth(ret, radius)
            out, dt = timed(run, warmup=(backend == "numba"))
        finally:
            _kernels.set_backend(None)
        values.add(tuple(out))
        print(f"  {backend:>6}: {dt * 1000:8.1f} ms   f={out[radius]}")
    assert len(values) == 1, "backends disagree"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--heavy", action="store_true", help="larger workloads")
    args = parser.parse_args()
    print(f"active default backend: {_kernels.active_backend()}")
    bench_convolution(args.heavy)
    bench_power_chain()
    bench_displacement_scan(args.heavy)
    bench_growth_scan(args.heavy)


if __name__ == "__main__":
    main()
