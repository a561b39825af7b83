"""Compare the compiled and pure-Python word-map kernels.

    python benchmarks/bench_kernels.py [--length 64] [--repeat 200]
"""
import argparse
import timeit

import numpy as np

from repwitness import kernels
from repwitness.liegrp import random_unit
from repwitness.solver import ConstraintSystem, solve
from repwitness.words import parse_word


def letters(rng, n, length):
    return (rng.integers(1, n + 1, size=length) * rng.choice([-1, 1], size=length)).astype(np.int_)


def bench(impl, words, targets, g, repeat):
    w = words[0]
    return {
        "eval_word": timeit.timeit(lambda: impl.eval_word(w, g), number=repeat) / repeat,
        "word_jacobian": timeit.timeit(lambda: impl.word_jacobian(w, g), number=repeat) / repeat,
        "system": timeit.timeit(lambda: impl.system(words, targets, g), number=repeat) / repeat,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--length", type=int, default=64)
    ap.add_argument("--generators", type=int, default=4)
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n = args.generators
    words = [letters(rng, n, args.length) for _ in range(4)]
    targets = random_unit(rng, 4)
    g = random_unit(rng, n)

    impls = [kernels.python_backend]
    if kernels.compiled_backend is not None:
        impls.append(kernels.compiled_backend)
    else:
        print("compiled backend unavailable (not built, or REPWITNESS_PURE set); timing pure Python only")

    results = {impl.BACKEND: bench(impl, words, targets, g, args.repeat) for impl in impls}
    print(f"words of {args.length} letters in F_{n}, mean of {args.repeat} calls")
    print(f"{'kernel':<16}" + "".join(f"{name:>14}" for name in results) + ("    speedup" if len(results) == 2 else ""))
    for op in ("eval_word", "word_jacobian", "system"):
        row = [results[name][op] for name in results]
        line = f"{op:<16}" + "".join(f"{t * 1e6:>11.1f} us" for t in row)
        if len(row) == 2:
            line += f"   {row[0] / row[1]:>7.1f}x"
        print(line)

    # end-to-end: a genus-3 product of commutators = -1
    sys_ = ConstraintSystem(6, [(parse_word("[x1,x4][x2,x5][x3,x6]", 6), -np.eye(4)[0])])
    t = timeit.timeit(lambda: solve(sys_, seed=0), number=20) / 20
    print(f"solve (genus 3, {kernels.BACKEND} backend): {t * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
