"""Time the compiled kernels against the pure-Python ones.

    python benchmarks/bench_kernels.py [--repeat N] [--size S]

Also times an end-to-end check (IND-CPA advantage of the 4-bit Vernam
system) under each backend, each in a fresh interpreter.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from catcrypt import _kernels


def cases(size, rng):
    a = rng.integers(0, 2, (size, size)).astype(np.uint8)
    b = rng.integers(0, 2, (size, size)).astype(np.uint8)
    x = rng.integers(0, 5, (size, size)).astype(np.int64)
    y = rng.integers(0, 5, (size, size)).astype(np.int64)
    table = rng.integers(-1, 64, (256, 4 * size)).astype(np.int64)
    g = rng.integers(-1, 64, (16, 64)).astype(np.int64)
    f = rng.integers(-1, 64, (64, 4 * size)).astype(np.int64)
    return {
        "bool_matmul": lambda k: k.bool_matmul(a, b),
        "int_matmul": lambda k: k.int_matmul(x, y),
        "seed_histogram": lambda k: k.seed_histogram(table, 64),
        "compose_tables": lambda k: k.compose_tables(g, f),
    }


END_TO_END = "from catcrypt import corpus, games; games.ind_cpa_advantage(corpus.otp_system(4), 4)"


def end_to_end(pure: bool) -> float:
    env = dict(os.environ)
    env.pop("CATCRYPT_PURE_PYTHON", None)
    if pure:
        env["CATCRYPT_PURE_PYTHON"] = "1"
    code = f"import time; t = time.perf_counter(); {END_TO_END}; print(time.perf_counter() - t)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--size", type=int, default=96)
    args = p.parse_args(argv)
    if _kernels.compiled is None:
        print("compiled kernels are not built; only the pure-Python timings are shown")
    backends = [_kernels.python] + ([_kernels.compiled] if _kernels.compiled is not None else [])
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}" + "".join(f"{k.NAME:>12}" for k in backends) + f"{'speedup':>10}")
    for name, fn in cases(args.size, rng).items():
        results = [fn(k) for k in backends]
        assert all(np.array_equal(results[0], r) for r in results), f"{name}: backends disagree"
        times = [min(timeit.repeat(lambda k=k: fn(k), number=1, repeat=args.repeat)) for k in backends]
        speed = f"{times[0] / times[-1]:>9.1f}x" if len(times) > 1 else ""
        print(f"{name:<16}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times) + speed)
    py = end_to_end(True)
    line = f"{'otp-4 advantage':<16}{py * 1e3:>10.2f}ms"
    if _kernels.compiled is not None:
        c = end_to_end(False)
        line += f"{c * 1e3:>10.2f}ms{py / c:>9.1f}x"
    print(line)


if __name__ == "__main__":
    main()
