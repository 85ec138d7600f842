"""Print h^i(P^n, O(d)) from the flag complex next to the closed form.

    python scripts/cohomology_table.py --n 1 2 3 --d -6 6 --field fp:1000000007
"""
import argparse
import time

from flagcohom.complex import projective_space_oracle, total_cohomology
from flagcohom.field import Field
from flagcohom.presets import proj_space_family, window_radius
from flagcohom.series import Window


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--d", type=int, nargs=2, default=[-6, 6], metavar=("LO", "HI"))
    ap.add_argument("--field", default="q")
    ap.add_argument("--extra-margin", type=int, default=0, help="widen every window by this much")
    args = ap.parse_args()
    field = Field.parse(args.field)
    start = time.perf_counter()
    mismatches = 0
    print(f"{'n':>2} {'d':>3}  {'window':<24} {'computed':<16} {'closed form':<16} ok")
    for n in args.n:
        for d in range(args.d[0], args.d[1] + 1):
            w = Window.cube(n, window_radius(d) + args.extra_margin)
            rep = total_cohomology(proj_space_family(n, d, field), w, keep_exponents=False)
            oracle = projective_space_oracle(n, d)
            ok = rep.dims == oracle and not rep.boundary_contact
            mismatches += not ok
            print(f"{n:>2} {d:>3}  {str(w):<24} {str(rep.dims):<16} {str(oracle):<16} {'yes' if ok else 'NO'}")
    print(f"field={field.tag} mismatches={mismatches} runtime={time.perf_counter() - start:.2f}s")
    return 1 if mismatches else 0


if __name__ == "__main__":
    raise SystemExit(main())
