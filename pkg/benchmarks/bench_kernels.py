"""Compare the numba and numpy quadrature backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Times (a) one block of Matsubara-term integrals and (b) full free energy +
pressure evaluations, and checks that both backends give the same numbers.
"""
import argparse
import time

import numpy as np

from filmcasimir import FilmSystem, builtin_material, compute
from filmcasimir import _kernels as K
from filmcasimir._jit import JIT_ENABLED


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def block_inputs(n_terms=2000, a=20.0):
    l = np.arange(1, n_terms + 1)
    xi = l * 0.162433
    e1 = 1 + 8.6 ** 2 / xi ** 2
    e2 = 1 + 9.66 ** 2 / xi ** 2
    q2 = (xi / 197.3269804) ** 2
    ymin = 2 * a * np.sqrt(e2 * q2)
    return a, np.full(l.size, K.MATSUBARA), e1, e2, q2, ymin


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--terms", type=int, default=2000)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if JIT_ENABLED else [])
    if not JIT_ENABLED:
        print("numba unavailable or disabled: timing the numpy backend only")

    a, regime, e1, e2, q2, ymin = block_inputs(args.terms)
    # warm-up compiles the kernels
    for b in backends:
        K.integrate_block(a, K.FREE_ENERGY, regime[:4], e1[:4], e2[:4], q2[:4], ymin[:4], backend=b)

    print(f"{'case':<48}{'backend':<8}{'best [ms]':>11}")
    ref = {}
    for b in backends:
        t, (J, _, _) = best_of(lambda: K.integrate_block(a, K.FREE_ENERGY, regime, e1, e2, q2, ymin,
                                                         backend=b), args.repeat)
        ref.setdefault("block", J)
        print(f"{f'{args.terms} Matsubara terms, a={a:g} nm':<48}{b:<8}{1e3 * t:>11.2f}")
        dev = np.max(np.abs(J - ref["block"]) / np.maximum(np.abs(ref["block"]), 1e-300))
        if dev > 1e-12:
            print(f"  warning: backends differ by {dev:.1e}")

    cases = [("Ag", "Cu", 50.0, "simple-drude"), ("Ag", "Cu", 15.0, "simple-plasma"),
             ("Au", "Al", 100.0, "simple-plasma")]
    for film, plate, thick, variant in cases:
        s = FilmSystem(builtin_material(film), builtin_material(plate), thick, variant=variant,
                       allow_thin=True)
        vals = {}
        for b in backends:
            t, r = best_of(lambda: compute(s, backend=b), args.repeat)
            vals[b] = r
            label = f"F,P {film}/{plate} {thick:g} nm {variant} (l_max {r.l_max})"
            print(f"{label:<48}{b:<8}{1e3 * t:>11.2f}")
        if len(vals) == 2:
            d = abs(vals["numba"].free_energy / vals["numpy"].free_energy - 1)
            print(f"  numba vs numpy F rel. diff {d:.1e}")


if __name__ == "__main__":
    main()
