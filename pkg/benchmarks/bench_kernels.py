"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--size 300] [--json]

Each kernel is run on identical seeded inputs in both backends; the
outputs are compared before any timing is reported.
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time

from algen.kernels import backends


def mul_inputs(rng, n):
    def side():
        keys = sorted(rng.sample(range(1 << 24), n))
        degs = sorted(rng.randrange(40) for _ in range(n))
        coefs = [rng.randint(-10 ** 6, 10 ** 6) for _ in range(n)]
        return keys, degs, coefs
    return side() + side()


def echelon_inputs(rng, n):
    return [[rng.randint(-50, 50) for _ in range(n + 3)] for _ in range(n)], n + 3


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def bench(size, repeat, seed):
    rng = random.Random(seed)
    mul_args = mul_inputs(rng, size)
    ech_rows, ncols = echelon_inputs(rng, max(8, size // 10))
    results = {}
    for name, mod in backends().items():
        t_mul, r_mul = best_of(lambda: mod.mul_packed(*mul_args, 30), repeat)
        t_ech, r_ech = best_of(lambda: mod.echelon([r[:] for r in ech_rows], ncols), repeat)
        results[name] = {"mul_packed": t_mul, "echelon": t_ech, "_out": (r_mul, r_ech)}
    outs = [v.pop("_out") for v in results.values()]
    if any(o != outs[0] for o in outs):
        raise SystemExit("backends disagree")
    return results


def end_to_end():
    code = ("import time;from algen.corpus import reconstruction_corpus;"
            "from algen.generator import build_gen;from algen.pit import find_annihilator;"
            "from algen.reconstruction import run_reconstruction;t=time.perf_counter()\n"
            "for P,n in reconstruction_corpus():\n"
            " G=build_gen(P,n)\n"
            " for D in range(1,5):\n"
            "  A=find_annihilator(G,D)\n"
            "  if A: break\n"
            " run_reconstruction(A,G,D)\n"
            "print(time.perf_counter()-t)")
    out = {}
    for name, env in (("cython", "0"), ("python", "1")):
        if name not in backends():
            continue
        res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True,
                             env=dict(os.environ, ALGEN_PURE_PYTHON=env), check=True)
        out[name] = float(res.stdout.strip())
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=300)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--end-to-end", action="store_true", help="also time the reconstruction corpus")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    res = bench(args.size, args.repeat, args.seed)
    if args.end_to_end:
        for name, t in end_to_end().items():
            res[name]["reconstruction_corpus"] = t
    if args.json:
        print(json.dumps(res, indent=2, sort_keys=True))
        return
    kernels = sorted(next(iter(res.values())))
    print(f"{'kernel':<24}" + "".join(f"{b:>12}" for b in res) + "     speedup")
    for k in kernels:
        row = [res[b][k] for b in res]
        sp = res["python"][k] / res["cython"][k] if "cython" in res else 1.0
        print(f"{k:<24}" + "".join(f"{x * 1e3:>10.2f}ms" for x in row) + f"   {sp:>8.2f}x")


if __name__ == "__main__":
    main()
