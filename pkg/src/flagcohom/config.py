"""Plain-text run configuration.

One ``key = value`` per line, ``#`` comments.  The scheme is a block::

    command = cohomology
    scheme = pn { n = 2, d = -3 }
    field = Fp(1000000007)
    window = [-8,8]x[-8,8]
    precision = 40

Command-line flags override file values.  ``RunConfig.to_text`` writes the
fully resolved configuration in the same grammar, so a persisted config
reproduces its run.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import UsageError
from .field import QQ, Field
from .krichever import DEFAULT_MAX_POLE, GeometricData
from .presets import POSITIONS, Elliptic, IdealPoint, ProjLine, ProjSpace, window_radius
from .series import Window

COMMANDS = ("cohomology", "krichever", "verify", "counterexample", "reduce", "reconstruct")
SCHEMES = {"pn": ("n", "d"), "p1": ("d",), "elliptic": ("a", "b"), "ideal": ("position",)}

_BLOCK = re.compile(r"^\s*(\w+)\s*(?:\{(.*)\})?\s*$")


@dataclass(frozen=True)
class RunConfig:
    command: str
    scheme: str = "pn"
    params: tuple[tuple[str, str], ...] = ()
    field: Field = QQ
    window: Window | None = None
    precision: int = 40
    max_pole: int = DEFAULT_MAX_POLE
    twists: tuple[int, ...] | None = None
    m_range: tuple[int, int] = (0, 5)
    sheaf: str = "mQ"
    verbose: bool = False
    extra: tuple[tuple[str, str], ...] = dc_field(default=())

    def param(self, key: str, default=None):
        return dict(self.params).get(key, default)

    def int_param(self, key: str, default: int | None = None) -> int:
        v = self.param(key)
        if v is None:
            if default is None:
                raise UsageError(f"scheme {self.scheme} needs parameter {key}")
            return default
        try:
            return int(v)
        except ValueError:
            raise UsageError(f"parameter {key} must be an integer, got {v!r}") from None

    @property
    def n(self) -> int:
        if self.scheme == "pn":
            return self.int_param("n")
        return 2 if self.scheme == "ideal" else 1

    def scheme_model(self):
        if self.scheme == "pn":
            return ProjSpace(self.int_param("n"), self.int_param("d", 0))
        if self.scheme == "p1":
            return ProjLine(self.int_param("d", 0))
        if self.scheme == "elliptic":
            try:
                a = Fraction(self.param("a", "0"))
                b = Fraction(self.param("b", "0"))
            except ValueError:
                raise UsageError("elliptic a, b must be rationals") from None
            return Elliptic(self.field(a), self.field(b))
        if self.scheme == "ideal":
            pos = self.param("position", "off-y1")
            if pos not in POSITIONS:
                raise UsageError(f"position must be one of {POSITIONS}")
            return IdealPoint(pos)
        raise UsageError(f"unknown scheme {self.scheme!r}")

    def resolved_window(self) -> Window:
        if self.window is not None:
            if self.window.n != self.n:
                raise UsageError(f"window {self.window} has {self.window.n} variables, scheme needs {self.n}")
            return self.window
        if self.scheme == "ideal" or self.command == "counterexample":
            return Window.cube(2, 3)
        d = self.int_param("d", 0) if self.scheme in ("pn", "p1") else 0
        twists = self.twists or (d,)
        radius = window_radius(max(abs(t) for t in twists + (d,)))
        if self.command == "reduce":
            radius = max(radius, self.m_range[1] + 2 + max(abs(t) for t in twists + (d,)))
        if self.command in ("krichever", "reconstruct"):
            radius = max(radius, 4, self.m_range[1] + 2)
        return Window.cube(self.n, radius)

    def geometric_data(self) -> GeometricData:
        model = self.scheme_model()
        window = self.resolved_window() if self.scheme in ("pn", "p1") else None
        return GeometricData(model, self.field, self.twists, window, self.precision, self.max_pole)

    def to_text(self) -> str:
        params = ", ".join(f"{k} = {v}" for k, v in self.params)
        lines = [f"command = {self.command}",
                 f"scheme = {self.scheme} {{ {params} }}" if params else f"scheme = {self.scheme}",
                 f"field = {self.field.tag}"]
        if self.scheme != "elliptic":
            lines.append(f"window = {self.resolved_window()}")
        if self.scheme == "elliptic":
            lines.append(f"precision = {self.precision}")
            lines.append(f"max_pole = {self.max_pole}")
        if self.twists is not None:
            lines.append("twists = (" + ", ".join(map(str, self.twists)) + ")")
        if self.command in ("krichever", "reduce"):
            lines.append(f"m = {self.m_range[0]}..{self.m_range[1]}")
        if self.command == "counterexample":
            lines.append(f"sheaf = {self.sheaf}")
        lines.append(f"verbose = {int(self.verbose)}")
        for k, v in self.extra:
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    def one_line(self) -> str:
        return "record=config " + " ".join(
            line.replace(" = ", "=").replace(" ", "") for line in self.to_text().splitlines())


def parse_scheme(text: str) -> tuple[str, tuple[tuple[str, str], ...]]:
    m = _BLOCK.match(text)
    if m is None:
        raise UsageError(f"cannot parse scheme block {text!r}")
    kind = m.group(1).lower()
    if kind not in SCHEMES:
        raise UsageError(f"unknown scheme {kind!r}; choose from {sorted(SCHEMES)}")
    params = []
    if m.group(2) and m.group(2).strip():
        for item in m.group(2).split(","):
            key, sep, val = item.partition("=")
            if not sep:
                raise UsageError(f"bad scheme parameter {item!r}")
            key = key.strip()
            if key not in SCHEMES[kind]:
                raise UsageError(f"scheme {kind} has no parameter {key!r}")
            params.append((key, val.strip()))
    return kind, tuple(params)


def parse_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*", str(text))
    if m is None:
        raise UsageError(f"expected a range like 0..5, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo > hi:
        raise UsageError(f"empty range {text!r}")
    return lo, hi


def parse_twists(text: str) -> tuple[int, ...]:
    items = [x for x in re.split(r"[,\s()]+", text) if x]
    try:
        return tuple(int(x) for x in items)
    except ValueError:
        raise UsageError(f"bad twist list {text!r}") from None


def parse_config_text(text: str) -> dict:
    """Raw key -> value strings, in file order."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise UsageError(f"line {lineno}: expected key = value")
        out[key.strip().lower()] = val.strip()
    return out


def build_config(values: dict) -> RunConfig:
    """Turn raw string values (file and flag overrides merged) into a RunConfig."""
    values = dict(values)
    command = values.pop("command", None)
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    scheme, params = parse_scheme(values.pop("scheme", "pn"))
    overrides = {k: values.pop(k) for k in list(values) if k in ("n", "d", "a", "b", "position")}
    if overrides:
        merged = dict(params)
        for k, v in overrides.items():
            if v is None:
                continue
            if k not in SCHEMES[scheme]:
                raise UsageError(f"--{k} does not apply to scheme {scheme}")
            merged[k] = str(v)
        params = tuple((k, merged[k]) for k in SCHEMES[scheme] if k in merged)
    else:
        params = tuple((k, dict(params)[k]) for k in SCHEMES[scheme] if k in dict(params))
    kw = {}
    if values.get("field") is not None:
        kw["field"] = Field.parse(values.pop("field"))
    if values.get("window") is not None:
        kw["window"] = Window.parse(values.pop("window"))
    for key in ("precision", "max_pole"):
        if values.get(key) is not None:
            try:
                kw[key] = int(values.pop(key))
            except ValueError:
                raise UsageError(f"{key} must be an integer") from None
    if values.get("twists") is not None:
        kw["twists"] = parse_twists(values.pop("twists"))
    if values.get("m") is not None:
        kw["m_range"] = parse_range(values.pop("m"))
    if values.get("sheaf") is not None:
        sheaf = values.pop("sheaf")
        if sheaf not in ("mQ", "O"):
            raise UsageError("sheaf must be mQ or O")
        kw["sheaf"] = sheaf
    if values.get("verbose") is not None:
        kw["verbose"] = str(values.pop("verbose")).lower() in ("1", "true", "yes")
    extra = tuple(sorted((k, str(v)) for k, v in values.items() if v is not None))
    known_extra = {"corrupt_sign", "hint"}
    unknown = [k for k, _ in extra if k not in known_extra]
    if unknown:
        raise UsageError(f"unknown configuration keys {unknown}")
    cfg = RunConfig(command, scheme, params, extra=extra, **kw)
    if scheme in ("pn",):
        cfg.int_param("n")
    cfg.resolved_window()
    return cfg
