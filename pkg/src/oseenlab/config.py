"""Run configuration: an INI file with sections [domain], [params], [data], [run].

Example::

    [domain]
    family = ellipse
    a = 2
    b = 1

    [params]
    mu = 1
    f = auto

    [data]
    manufactured = yes

    [run]
    N = 8, 16, 32
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace

from .errors import ConfigError, OseenLabError
from .expr import parse_expression
from .geometry import ConvexDomain, disk, ellipse, log_cap, power_cap

SECTIONS = {
    "domain": {"family", "radius", "a", "b", "q", "center", "blend"},
    "params": {"mu", "nu", "gamma", "f", "sigma"},
    "data": {"f1", "f2", "g", "b", "manufactured"},
    "run": {"n", "seed", "degree", "poincare_samples", "trace_tol", "energy_ratio", "residual_tol", "delta_clip"},
}
FAMILIES = ("disk", "circle", "ellipse", "power", "log-cap")


@dataclass(frozen=True)
class DomainSettings:
    family: str = "disk"
    radius: float = 1.0
    a: float | None = None
    b: float | None = None
    q: float | None = None
    center: tuple = (0.0, 0.0)
    blend: tuple | None = None

    def build(self) -> ConvexDomain:
        fam = self.family
        if fam in ("disk", "circle"):
            return disk(self.radius, self.center)
        if fam == "ellipse":
            return ellipse(self.a if self.a is not None else 2.0, self.b if self.b is not None else 1.0, self.center)
        if fam == "power":
            if self.q is None:
                raise ConfigError("[domain] family 'power' needs q")
            return power_cap(self.q, self.a or 1.0, self.b or 1.0, self.center, self.blend)
        if fam == "log-cap":
            return log_cap(self.a or 1.0, self.b or 1.0, self.center, self.blend)
        raise ConfigError(f"unknown domain family {fam!r}")

    def label(self) -> str:
        if self.family == "power":
            return f"power-{self.q:g}"
        return self.family


@dataclass(frozen=True)
class RunConfig:
    domain: DomainSettings = field(default_factory=DomainSettings)
    mu: float = 1.0
    nu: float = 1.0
    gamma: float = 1.0
    f: float | None = None  # None: automatic threshold
    sigma: float | None = None  # None: 1e4 * mu
    F1: str = "0"
    F2: str = "0"
    G: str = "0"
    B: str = "0"
    manufactured: bool = False
    N: tuple = (16,)
    seed: int = 0
    degree: int = 6  # scalar spaces of the decomposition
    poincare_samples: int = 100
    trace_tol: float = 1e-2
    energy_ratio: float = 1.5
    residual_tol: float = 1e-4
    delta_clip: float = 1e-3

    def with_n(self, ns) -> "RunConfig":
        return replace(self, N=_check_n(tuple(ns), "--n-override"))

    @property
    def has_zero_data(self) -> bool:
        return not self.manufactured and all(parse_expression(e) == 0 for e in (self.F1, self.F2, self.G, self.B))


def _check_n(ns, where):
    if not ns:
        raise ConfigError(f"{where}: empty N list")
    if any(n < 1 for n in ns):
        raise ConfigError(f"{where}: N must be positive")
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ConfigError(f"{where}: N list must be strictly increasing, got {list(ns)}")
    return ns


def _float(sec, key, raw, positive=False, allow_auto=False):
    if allow_auto and raw.strip().lower() == "auto":
        return None
    try:
        v = float(raw)
    except ValueError:
        raise ConfigError(f"[{sec}] {key} = {raw!r}: not a number") from None
    if not math.isfinite(v):
        raise ConfigError(f"[{sec}] {key}: must be finite")
    if positive and v <= 0:
        raise ConfigError(f"[{sec}] {key}: must be positive")
    return v


def _int(sec, key, raw):
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"[{sec}] {key} = {raw!r}: not an integer") from None


def _tuple(sec, key, raw, n=2):
    parts = [p for p in raw.replace(",", " ").split()]
    if len(parts) != n:
        raise ConfigError(f"[{sec}] {key}: expected {n} numbers")
    return tuple(_float(sec, key, p) for p in parts)


def parse_n_list(raw: str, where: str = "[run] N") -> tuple:
    try:
        ns = tuple(int(p) for p in raw.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"{where}: expected integers, got {raw!r}") from None
    return _check_n(ns, where)


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    cp.optionxform = str.lower
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    for sec in cp.sections():
        if sec not in SECTIONS:
            raise ConfigError(f"unknown section [{sec}]")
        bad = set(cp[sec]) - SECTIONS[sec]
        if bad:
            raise ConfigError(f"[{sec}] unknown keys: {', '.join(sorted(bad))}")
    kw = {}
    d = cp["domain"] if cp.has_section("domain") else {}
    fam = d.get("family", "disk").strip().lower()
    if fam not in FAMILIES:
        raise ConfigError(f"[domain] family {fam!r} not one of {', '.join(FAMILIES)}")
    dkw = {"family": fam}
    for key in ("radius", "a", "b", "q"):
        if key in d:
            dkw[key] = _float("domain", key, d[key], positive=True)
    if "center" in d:
        dkw["center"] = _tuple("domain", "center", d["center"])
    if "blend" in d:
        dkw["blend"] = _tuple("domain", "blend", d["blend"])
    kw["domain"] = DomainSettings(**dkw)

    p = cp["params"] if cp.has_section("params") else {}
    for key in ("mu", "nu", "gamma"):
        if key in p:
            kw[key] = _float("params", key, p[key])
    if "f" in p:
        kw["f"] = _float("params", "f", p["f"], allow_auto=True)
    if "sigma" in p:
        kw["sigma"] = _float("params", "sigma", p["sigma"], allow_auto=True)

    data = cp["data"] if cp.has_section("data") else {}
    for key, name in (("f1", "F1"), ("f2", "F2"), ("g", "G"), ("b", "B")):
        if key in data:
            try:
                parse_expression(data[key])
            except OseenLabError as exc:
                raise ConfigError(f"[data] {name}: {exc}") from None
            kw[name] = data[key].strip()
    if "manufactured" in data:
        try:
            kw["manufactured"] = cp.getboolean("data", "manufactured")
        except ValueError:
            raise ConfigError("[data] manufactured: expected yes/no") from None

    r = cp["run"] if cp.has_section("run") else {}
    if "n" in r:
        kw["N"] = parse_n_list(r["n"])
    if "seed" in r:
        kw["seed"] = _int("run", "seed", r["seed"])
        if not 0 <= kw["seed"] < 2**64:
            raise ConfigError("[run] seed must be an unsigned 64-bit integer")
    for key in ("degree", "poincare_samples"):
        if key in r:
            kw[key] = _int("run", key, r[key])
            if kw[key] < 1:
                raise ConfigError(f"[run] {key} must be positive")
    for key in ("trace_tol", "energy_ratio", "residual_tol", "delta_clip"):
        if key in r:
            kw[key] = _float("run", key, r[key], positive=True)

    cfg = RunConfig(**kw)
    validate(cfg)
    return cfg


def validate(cfg: RunConfig) -> None:
    if cfg.mu <= 0:
        raise ConfigError("[params] mu must be positive")
    if cfg.nu + 2 * cfg.mu <= 0:
        raise ConfigError(f"[params] nu + 2 mu must be positive (nu={cfg.nu:g}, mu={cfg.mu:g})")
    if cfg.gamma <= 0:
        raise ConfigError("[params] gamma must be positive")
    if cfg.f is not None and cfg.f < 0:
        raise ConfigError("[params] f must be nonnegative")
    if cfg.sigma is not None and cfg.sigma < 0:
        raise ConfigError("[params] sigma must be nonnegative")
    if cfg.manufactured and cfg.domain.family not in ("disk", "circle", "ellipse"):
        raise ConfigError("[data] manufactured solutions need a disk or ellipse domain")


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
