"""Run configuration: a line-based ``key = value`` format with ``[suite.<name>]`` sections."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError

SUITES = (
    "representation",
    "splitting",
    "power_series",
    "slice_cauchy",
    "kernel_membership",
    "borel_pompeiu_G",
    "borel_pompeiu_Ha",
    "borel_pompeiu_Du",
    "cauchy_type_G",
    "cauchy_type_Ha",
    "cauchy_type_Du",
    "stokes_G",
    "stokes_Ha",
    "stokes_Du",
    "conformal_G",
    "conformal_Ha",
    "du_relation",
)

FAMILY_NAMES = ("identity", "affine", "power", "exp", "sin", "log", "rotation")

# keys allowed inside [suite.<name>] sections
SECTION_KEYS = ("tolerance", "points", "a")


@dataclass(frozen=True)
class RunConfig:
    suites: tuple = SUITES
    a: tuple = ("affine", "exp")
    r: tuple = (2.0, 2.0, 2.0)
    s: tuple = (1.0, 1.0, 1.0)
    alpha: tuple = (2.0, 2.0, 2.0)
    c: tuple = (0.5, 0.5, 0.5, 0.5)
    moebius: tuple = (2.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    domain_center: tuple = (0.0, 2.0, 0.0, 0.0)
    domain_radius: float = 0.5
    contour_nodes: int = 256
    surface_nodes: tuple = (32, 32, 32)
    radial_nodes: int = 24
    fd_step: float = 1e-5
    richardson: bool = True
    seed: int = 0x5EED
    output: str = ""
    timing: bool = True
    sections: tuple = ()  # ((suite, ((key, value), ...)), ...)

    def section(self, suite) -> dict:
        for name, items in self.sections:
            if name == suite:
                return dict(items)
        return {}

    def family_params(self) -> dict:
        return {"r": self.r, "s": self.s, "alpha": self.alpha, "c": self.c}


def _floats(text, n=None, name=""):
    try:
        vals = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{name}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise ConfigError(f"{name}: expected {n} numbers, got {len(vals)}")
    return vals


def _positive_int(text, name):
    try:
        v = int(text, 0)
    except ValueError:
        raise ConfigError(f"{name}: expected an integer, got {text!r}") from None
    if v <= 0:
        raise ConfigError(f"{name}: must be positive")
    return v


def _bool(text, name):
    t = text.strip().lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"{name}: expected a boolean, got {text!r}")


def _names(text, allowed, name):
    vals = tuple(v.strip() for v in text.split(",") if v.strip())
    for v in vals:
        if v not in allowed:
            raise ConfigError(f"{name}: unknown entry {v!r}")
    return vals


def _parse_value(key, text):
    if key == "suites":
        return _names(text, SUITES, key)
    if key == "a":
        return _names(text, FAMILY_NAMES, key)
    if key in ("r", "s", "alpha"):
        vals = _floats(text, name=key)
        if len(vals) == 1:
            vals = vals * 3
        if len(vals) != 3:
            raise ConfigError(f"{key}: expected 1 or 3 numbers")
        if key != "s" and any(v == 0 for v in vals):
            raise ConfigError(f"{key}: entries must be nonzero")
        return vals
    if key == "c":
        return _floats(text, 4, key)
    if key == "moebius":
        return _floats(text, 16, key)
    if key == "domain_center":
        return _floats(text, 4, key)
    if key in ("domain_radius", "fd_step"):
        (v,) = _floats(text, 1, key)
        if v <= 0:
            raise ConfigError(f"{key}: must be positive")
        return v
    if key in ("contour_nodes", "radial_nodes"):
        return _positive_int(text, key)
    if key == "surface_nodes":
        parts = [p for p in text.split(",") if p.strip()]
        vals = tuple(_positive_int(p.strip(), key) for p in parts)
        if len(vals) == 1:
            vals = vals * 3
        if len(vals) != 3:
            raise ConfigError(f"{key}: expected 1 or 3 integers")
        return vals
    if key == "seed":
        try:
            v = int(text, 0)
        except ValueError:
            raise ConfigError(f"seed: expected an integer, got {text!r}") from None
        if not 0 <= v < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        return v
    if key in ("richardson", "timing"):
        return _bool(text, key)
    if key == "output":
        return text.strip()
    raise ConfigError(f"unknown key {key!r}")


def _parse_section_value(key, text):
    if key == "tolerance":
        (v,) = _floats(text, 1, key)
        if v <= 0:
            raise ConfigError("tolerance must be positive")
        return v
    if key == "points":
        return _positive_int(text, key)
    if key == "a":
        return _names(text, FAMILY_NAMES, key)
    raise ConfigError(f"unknown key {key!r}")


_TOP_KEYS = tuple(f.name for f in fields(RunConfig) if f.name != "sections")


def parse_config(text: str) -> RunConfig:
    """Parse a configuration document; unknown keys and bad values raise ``ConfigError``."""
    values = {}
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("malformed section header", lineno)
            name = line[1:-1].strip()
            if not name.startswith("suite."):
                raise ConfigError(f"unknown section {name!r}", lineno)
            suite = name[len("suite."):]
            if suite not in SUITES:
                raise ConfigError(f"unknown suite {suite!r}", lineno)
            current = suite
            sections.setdefault(suite, {})
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", lineno)
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        try:
            if current is None:
                if key not in _TOP_KEYS:
                    raise ConfigError(f"unknown key {key!r}")
                values[key] = _parse_value(key, val)
            else:
                if key not in SECTION_KEYS:
                    raise ConfigError(f"unknown key {key!r} in [suite.{current}]")
                sections[current][key] = _parse_section_value(key, val)
        except ConfigError as exc:
            if exc.line is None:
                raise ConfigError(str(exc), lineno) from None
            raise
    secs = tuple((name, tuple(sorted(items.items()))) for name, items in sorted(sections.items()))
    return replace(RunConfig(), sections=secs, **values)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(_fmt(x) for x in v)
    return str(v)


def format_config(cfg: RunConfig) -> str:
    """Effective configuration in the same format ``parse_config`` reads."""
    lines = []
    for key in _TOP_KEYS:
        v = getattr(cfg, key)
        if key == "seed":
            lines.append(f"seed = {v:#x}")
        elif key == "output" and not v:
            continue
        else:
            lines.append(f"{key} = {_fmt(v)}")
    for name, items in cfg.sections:
        lines.append("")
        lines.append(f"[suite.{name}]")
        for k, v in items:
            lines.append(f"{k} = {_fmt(v)}")
    return "\n".join(lines) + "\n"
