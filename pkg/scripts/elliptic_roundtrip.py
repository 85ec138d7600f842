"""Random elliptic curves through (B, W) and back.

For each curve: closure of B, gap sequence, dim(B & K(-m)) against m, and
recovery of (a, b) from B alone.
"""
import argparse
import random
import time

from flagcohom.field import Field, format_scalar
from flagcohom.krichever import (GeometricData, check_ring_closure, gap_sequence, hilbert_dims, phi,
                                 reconstruct_affine_ring)
from flagcohom.presets import Elliptic, discriminant


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--field", default="q")
    ap.add_argument("--prec", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--bound", type=int, default=50, help="coefficients drawn from [-bound, bound]")
    args = ap.parse_args()
    field = Field.parse(args.field)
    rng = random.Random(args.seed)
    failures = 0
    start = time.perf_counter()
    for _ in range(args.count):
        a, b = rng.randint(-args.bound, args.bound), rng.randint(-args.bound, args.bound)
        if not discriminant(a, b, field):
            continue
        pair = phi(GeometricData(Elliptic(field(a), field(b)), field, precision=args.prec))
        ring = check_ring_closure(pair.B)
        gaps = gap_sequence(pair.B)
        dims = hilbert_dims(pair, range(1, pair.B.window_pole + 1)).sequence()
        rec = reconstruct_affine_ring(pair)
        ok = (ring.passed and gaps == [1] and dims == list(range(1, len(dims) + 1))
              and (rec.params["a"], rec.params["b"]) == (field(a), field(b)))
        failures += not ok
        print(f"a={a:>4} b={b:>4}  closure={'pass' if ring.passed else 'FAIL'} gaps={gaps} "
              f"recovered=({format_scalar(rec.params['a'])}, {format_scalar(rec.params['b'])}) "
              f"{'ok' if ok else 'MISMATCH'}")
    print(f"field={field.tag} precision={args.prec} failures={failures} "
          f"runtime={time.perf_counter() - start:.2f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
