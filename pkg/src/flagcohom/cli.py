"""Command-line harness.

Exit codes: 0 all checks pass, 1 a law or closure check failed, 2 bad input
or configuration, 3 result touches the window boundary (unreliable),
4 insufficient series precision.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .complex import alternating_sign, d_squared_zero, total_cohomology
from .cones import family_check_intersections, family_check_monotone
from .config import COMMANDS, RunConfig, build_config, parse_config_text
from .errors import (FlagCohomError, InconsistentInputError, PrecisionError,
                     PresetInconsistencyError, UsageError)
from .krichever import (check_module_closure, check_ring_closure, counterexample_check,
                        gap_sequence, graded_reduction, hilbert_dims, phi,
                        reconstruct_affine_ring)
from .presets import ideal_point_family, proj_space_family

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_UNRELIABLE, EXIT_PRECISION = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flagcohom", description="Flag-adelic cohomology and the (B, W) construction.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", type=Path, help="plain-text config file; flags override it")
    p.add_argument("--scheme", choices=["pn", "p1", "elliptic", "ideal"])
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--position", choices=["off-y1", "on-y1-off-y2"])
    p.add_argument("--sheaf", choices=["mQ", "O"])
    p.add_argument("--twists", help="comma-separated twists of the bundle, e.g. 0,1")
    p.add_argument("--field", help="q or fp:<p>")
    p.add_argument("--window", help="e.g. [-8,8]x[-8,8]")
    p.add_argument("--prec", type=int, help="series precision N")
    p.add_argument("--max-pole", type=int)
    p.add_argument("--m", help="range like 0..5")
    p.add_argument("--hint", choices=["p1", "elliptic"])
    p.add_argument("--corrupt-sign", action="store_true",
                   help="test fixture: use a constant face sign instead of (-1)^i")
    p.add_argument("--out", type=Path, help="write records here and the resolved config to <out>.conf")
    p.add_argument("--verbose", action="store_true")
    return p


def resolve(argv: list[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if args.config is not None:
        try:
            values.update(parse_config_text(args.config.read_text()))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if values.get("command", args.command) != args.command:
            raise UsageError(f"config is for command {values['command']!r}, not {args.command!r}")
    values["command"] = args.command
    flag_map = {"scheme": args.scheme, "n": args.n, "d": args.d, "a": args.a, "b": args.b,
                "position": args.position, "sheaf": args.sheaf, "twists": args.twists,
                "field": args.field, "window": args.window, "precision": args.prec,
                "max_pole": args.max_pole, "m": args.m, "hint": args.hint}
    for k, v in flag_map.items():
        if v is not None:
            values[k] = str(v)
    if args.scheme is not None and args.config is not None:
        # switching scheme on the command line drops the file's parameter block
        values["scheme"] = args.scheme
    if args.corrupt_sign:
        values["corrupt_sign"] = "1"
    if args.verbose:
        values["verbose"] = "1"
    if args.command == "counterexample" and "scheme" not in values:
        values["scheme"] = "ideal"
    return build_config(values), args.out


# ------------------------------------------------------------------ commands
def _family(cfg: RunConfig):
    if cfg.scheme == "pn":
        return proj_space_family(cfg.int_param("n"), cfg.int_param("d", 0), cfg.field)
    if cfg.scheme == "p1":
        return proj_space_family(1, cfg.int_param("d", 0), cfg.field)
    if cfg.scheme == "ideal":
        return ideal_point_family(cfg.param("position", "off-y1"), cfg.field)
    raise UsageError(f"command {cfg.command} supports schemes pn, p1, ideal; got {cfg.scheme}")


def _corrupt(cfg: RunConfig) -> bool:
    return dict(cfg.extra).get("corrupt_sign") == "1"


def cmd_cohomology(cfg: RunConfig, out: list[str]) -> int:
    fam = _family(cfg)
    window = cfg.resolved_window()
    rep = total_cohomology(fam, window, keep_exponents=cfg.verbose)
    out.append(f"cohomology of {fam.name} over {cfg.field.tag} on {window}")
    out.extend(rep.lines())
    if rep.boundary_contact:
        out.append("warning: nonzero classes touch the window boundary; enlarge the window")
    out.append(rep.record(family=fam.name, graded=int(rep.graded)))
    if cfg.verbose:
        out.extend(rep.exponent_records())
    return EXIT_UNRELIABLE if rep.boundary_contact else EXIT_OK


def cmd_verify(cfg: RunConfig, out: list[str]) -> int:
    fam = _family(cfg)
    window = cfg.resolved_window()
    sign = (lambda i: 1) if _corrupt(cfg) else alternating_sign
    reports = [family_check_monotone(fam, window), family_check_intersections(fam, window)]
    dd = d_squared_zero(fam, window, sign)
    out.append(f"law checks for {fam.name} on {window}")
    for r in reports:
        out.append(f"{r.check}: {'pass' if r.passed else 'FAIL'} ({len(r.violations)} violations)")
        out.append(r.record())
    out.append(f"d_squared_zero: {'pass' if dd else 'FAIL'}")
    out.append(f"record=law check=d_squared_zero verdict={'pass' if dd else 'fail'} "
               f"sign={'constant' if _corrupt(cfg) else 'alternating'}")
    ok = dd and all(r.passed for r in reports)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_krichever(cfg: RunConfig, out: list[str]) -> int:
    pair = phi(cfg.geometric_data())
    out.append(f"(B, W) for {cfg.scheme} over {cfg.field.tag}, rank {len(pair.W)}")
    if cfg.verbose:
        out.extend(pair.records())
    else:
        out.append(pair.records()[0])
    checks = [check_ring_closure(pair.B, pair.window), check_module_closure(pair.B, pair.W, pair.window)]
    for r in checks:
        out.append(f"{r.check}: {'pass' if r.passed else 'FAIL'} ({r.checked} products)")
        out.append(r.record())
    if pair.n == 1:
        out.append("record=gaps values={" + ",".join(map(str, gap_sequence(pair.B, pair.window))) + "}")
    lo, hi = cfg.m_range
    hil = hilbert_dims(pair, range(lo, hi + 1))
    out.append("record=hilbert m=" + f"{lo}..{hi} dims=" + ",".join(map(str, hil.sequence()))
               + f" unreliable={int(hil.unreliable)}")
    if not all(r.passed for r in checks):
        return EXIT_VIOLATION
    return EXIT_UNRELIABLE if hil.unreliable else EXIT_OK


def cmd_reduce(cfg: RunConfig, out: list[str]) -> int:
    if cfg.scheme != "pn":
        raise UsageError("reduce needs scheme pn with n >= 2")
    pair = phi(cfg.geometric_data())
    lo, hi = cfg.m_range
    res = graded_reduction(pair, range(lo, hi + 1))
    out.append(f"graded reduction on {pair.window}, m = {lo}..{hi}")
    for m in sorted(res.dims):
        dims = " ".join(f"dim_{k}={v}" for k, v in sorted(res.dims[m].items()))
        out.append(f"record=reduce m={m} {dims}")
    for mm in res.mismatches:
        out.append(f"record=reduce_mismatch m={mm['m']} space={mm['space']} "
                   f"exponent=({','.join(map(str, mm['exponent']))})")
    out.append(f"record=reduce_summary agree={int(res.agree)}")
    return EXIT_OK if res.agree else EXIT_VIOLATION


def cmd_reconstruct(cfg: RunConfig, out: list[str]) -> int:
    if cfg.scheme not in ("elliptic", "p1"):
        raise UsageError("reconstruct supports schemes elliptic and p1")
    pair = phi(cfg.geometric_data())
    hint = dict(cfg.extra).get("hint")
    try:
        res = reconstruct_affine_ring(pair, hint)
    except InconsistentInputError as exc:
        out.append(f"inconsistent input: {exc}")
        out.append("record=reconstruct verdict=inconsistent")
        return EXIT_VIOLATION
    out.append(f"recovered {res.kind} curve of genus {res.genus}")
    out.append(res.record())
    return EXIT_OK


def cmd_counterexample(cfg: RunConfig, out: list[str]) -> int:
    if cfg.scheme != "ideal":
        raise UsageError("counterexample runs on scheme ideal")
    position = cfg.param("position", "off-y1")
    window = cfg.resolved_window()
    main = counterexample_check(position, cfg.sheaf, cfg.field, window)
    control_sheaf = "O" if cfg.sheaf == "mQ" else "mQ"
    control = counterexample_check(position, control_sheaf, cfg.field, window)
    for rep in (main, control):
        verdict = "violated" if rep.violated else "holds"
        out.append(f"{rep.identity} for {rep.sheaf}: {verdict}")
        out.append(rep.record())
    mq = main if cfg.sheaf == "mQ" else control
    o = control if cfg.sheaf == "mQ" else main
    # success means the expected failure for m_Q was found and O_X behaves
    return EXIT_OK if mq.violated and not o.violated else EXIT_VIOLATION


HANDLERS = {"cohomology": cmd_cohomology, "verify": cmd_verify, "krichever": cmd_krichever,
            "reduce": cmd_reduce, "reconstruct": cmd_reconstruct, "counterexample": cmd_counterexample}


def run(argv: list[str]) -> tuple[int, list[str]]:
    """Run a command; returns (exit code, output lines)."""
    out: list[str] = []
    try:
        cfg, out_path = resolve(argv)
        out.append(cfg.one_line())
        code = HANDLERS[cfg.command](cfg, out)
    except PresetInconsistencyError as exc:
        out.append(f"error: {exc}")
        out.append("record=error kind=preset_inconsistency")
        return EXIT_VIOLATION, out
    except PrecisionError as exc:
        out.append(f"error: {exc}")
        out.append("record=error kind=precision")
        return EXIT_PRECISION, out
    except (UsageError, FlagCohomError) as exc:
        out.append(f"error: {exc}")
        out.append("record=error kind=usage")
        return EXIT_USAGE, out
    out.append(f"record=exit code={code}")
    if out_path is not None:
        try:
            out_path.write_text("\n".join(out) + "\n")
            Path(str(out_path) + ".conf").write_text(cfg.to_text())
        except OSError as exc:
            out.append(f"error: cannot write output: {exc}")
            return EXIT_USAGE, out
    return code, out


def main(argv: list[str] | None = None) -> int:
    code, lines = run(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if code in (EXIT_OK, EXIT_VIOLATION, EXIT_UNRELIABLE) else sys.stderr
    print("\n".join(lines), file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
