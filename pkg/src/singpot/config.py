"""``key = value`` scenario configuration files."""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

KINDS = ("special", "elliptic", "parabolic", "kernel", "verifyall")
PRESET_NAMES = ("laplacian", "checkerboard", "smooth", "anisotropic")


class ConfigError(ValueError):
    """Malformed or out-of-range configuration; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


def _floats(text: str) -> tuple:
    out = []
    for part in text.replace(";", ",").split(","):
        part = part.strip()
        if part:
            out.append(math.inf if part.lower() in ("inf", "infinity") else float(part))
    return tuple(out)


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario parameters.

    ``n`` is the node count per grid axis; 0 selects the kind's default.
    ``ks`` lists the mollification levels (``inf`` is the singular
    potential).  ``kernel_A`` lists the potential strengths of kernel runs.
    """

    kind: str = "verifyall"
    d: int = 3
    A: float = 1.0
    beta: float = 0.0
    lam: float = 1.0
    Lam: float = 1.0
    coefficients: str = "laplacian"
    n: int = 0
    grading: float = -1.0
    ks: tuple = (math.inf,)
    T: float = 0.2
    M: int = 400
    seed: int = 0
    grid_scale: float = 1.0
    kernel_A: tuple = (0.0, 1.0, 2.0)
    source_z: float = 0.5
    source_eps: float = 0.06
    kernel_t0: float = 0.004
    kernel_steps: int = 2000
    decay_tol: float = 0.05
    kernel_tol: float = 0.1
    holder_tol: float = 0.05
    energy_tol: float = 1e-10
    spread_limit: float = 10.0

    def echo(self) -> str:
        lines = []
        for name, key in _KEY_OF_FIELD.items():
            v = getattr(self, name)
            if isinstance(v, tuple):
                v = ", ".join(_fmt(x) for x in v)
            else:
                v = _fmt(v)
            lines.append(f"{key} = {v}")
        return "\n".join(lines) + "\n"

    def as_dict(self) -> dict:
        out = {}
        for name, key in _KEY_OF_FIELD.items():
            v = getattr(self, name)
            out[key] = [_fmt(x) if isinstance(x, float) and math.isinf(x) else x for x in v] \
                if isinstance(v, tuple) else v
        return out

    def with_overrides(self, **kw) -> "ScenarioConfig":
        cfg = replace(self, **{k: v for k, v in kw.items() if v is not None})
        validate(cfg)
        return cfg


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


# config-file key -> (field name, parser)
_KEYS = {
    "kind": ("kind", lambda s: s.strip().lower()),
    "d": ("d", int),
    "A": ("A", float),
    "beta": ("beta", float),
    "lambda": ("lam", float),
    "Lambda": ("Lam", float),
    "coefficients": ("coefficients", lambda s: s.strip().lower()),
    "n": ("n", int),
    "grading": ("grading", float),
    "k": ("ks", _floats),
    "T": ("T", float),
    "M": ("M", int),
    "seed": ("seed", int),
    "grid_scale": ("grid_scale", float),
    "kernel_A": ("kernel_A", _floats),
    "source_z": ("source_z", float),
    "source_eps": ("source_eps", float),
    "kernel_t0": ("kernel_t0", float),
    "kernel_steps": ("kernel_steps", int),
    "decay_tol": ("decay_tol", float),
    "kernel_tol": ("kernel_tol", float),
    "holder_tol": ("holder_tol", float),
    "energy_tol": ("energy_tol", float),
    "spread_limit": ("spread_limit", float),
}
_KEY_OF_FIELD = {v[0]: k for k, v in _KEYS.items()}
assert set(_KEY_OF_FIELD) == {f.name for f in fields(ScenarioConfig)}


def validate(cfg: ScenarioConfig) -> None:
    def bad(key, msg):
        raise ConfigError(f"{key}: {msg}", key=key)

    if cfg.kind not in KINDS:
        bad("kind", f"expected one of {', '.join(KINDS)}")
    if cfg.d < 3:
        bad("d", "dimension must be at least 3")
    if not cfg.A > 0:
        bad("A", "potential strength must be positive")
    if cfg.beta < 0:
        bad("beta", "must be nonnegative")
    if not cfg.lam > 0:
        bad("lambda", "must be positive")
    if cfg.Lam < cfg.lam:
        bad("Lambda", "must be at least lambda")
    if cfg.coefficients not in PRESET_NAMES:
        bad("coefficients", f"expected one of {', '.join(PRESET_NAMES)}")
    if cfg.coefficients == "laplacian" and cfg.lam != cfg.Lam:
        bad("Lambda", "the laplacian preset needs lambda = Lambda")
    if cfg.n != 0 and cfg.n < 5:
        bad("n", "need at least 5 nodes per axis (0 selects the default)")
    if cfg.grading != -1.0 and not 0.0 <= cfg.grading < 1.0:
        bad("grading", "must lie in [0, 1)")
    if not cfg.ks or any(not k > 0 for k in cfg.ks):
        bad("k", "levels must be positive")
    if any(b <= a for a, b in zip(cfg.ks, cfg.ks[1:])):
        bad("k", "levels must be strictly increasing")
    if not cfg.T > 0:
        bad("T", "must be positive")
    if cfg.M < 1:
        bad("M", "must be at least 1")
    if cfg.seed < 0:
        bad("seed", "must be nonnegative")
    if not 0 < cfg.grid_scale <= 4:
        bad("grid_scale", "must lie in (0, 4]")
    if not cfg.kernel_A or any(a < 0 for a in cfg.kernel_A):
        bad("kernel_A", "strengths must be nonnegative")
    if not 0 < cfg.source_z < 1:
        bad("source_z", "must lie in (0, 1)")
    if not cfg.source_eps > 0:
        bad("source_eps", "must be positive")
    if not cfg.kernel_t0 > 0:
        bad("kernel_t0", "must be positive")
    if cfg.kernel_steps < 1:
        bad("kernel_steps", "must be at least 1")
    for key in ("decay_tol", "kernel_tol", "holder_tol", "energy_tol", "spread_limit"):
        if not getattr(cfg, key) > 0:
            bad(key, "must be positive")


def parse_config(text: str) -> ScenarioConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    An empty text gives the all-defaults ``verifyall`` scenario.

    Raises
    ------
    ConfigError
        On syntax errors, unknown or repeated keys, bad values, or values
        outside their documented ranges.
    """
    values = {}
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in _KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        if key in seen:
            raise ConfigError(f"key {key!r} repeats line {seen[key]}", lineno, key)
        seen[key] = lineno
        name, conv = _KEYS[key]
        try:
            values[name] = conv(val)
        except ValueError:
            raise ConfigError(f"bad value {val!r} for {key}", lineno, key) from None
    cfg = ScenarioConfig(**values)
    try:
        validate(cfg)
    except ConfigError as exc:
        raise ConfigError(str(exc), seen.get(exc.key), exc.key) from None
    return cfg


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
