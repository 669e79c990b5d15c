"""Run configuration: flat ``key = value`` text with '#' comments.

Keys (defaults in parentheses):

    l_ab (2.0)  l_bc (3.0)  s (2.0)  t (3.0)  r0 (2.0)    Bricard linkage
    t_m (0.4)  t_n (0.6)                                 m, n along aq
    bary_y, bary_v (0.2, 0.2, 0.6)                        y, v weights
    off_x, off_u (0.5, 0.4)                               x, u foot and distance
    k (auto)                                              homothety factor
    grid (101)                                            samples over the flex interval
    path_samples (201)                                    samples on P_n flex paths
    n_list (1, 10, 100)                                   n for P_n certificates
    convergence_n (1, 2, 5, ..., 1000)                    n for the convergence table
    lemma_samples (20)   lemma_radius (1e-3)  seed (0)    Lemma check perturbations
    tol_edge (1e-10)  tol_angle (1e-9)  tol_bellows (1e-8)
    tol_flex_drift (1e-9)  tol_dihedral (1e-3)  tol_lemma (1e-8)
    tol_convergence (1e-12)  tol_oracle (1e-6)
    out_dir (out)
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path

from .assembly import AuxPlacement
from .bricard import BricardConfig


class ConfigError(ValueError):
    pass


DEFAULT_CONVERGENCE_N = (1, 2, 3, 5, 8, 10, 20, 50, 100, 200, 500, 1000)


@dataclass(frozen=True)
class RunConfig:
    l_ab: float = 2.0
    l_bc: float = 3.0
    s: float = 2.0
    t: float = 3.0
    r0: float = 2.0
    t_m: float = 0.4
    t_n: float = 0.6
    bary_y: tuple = (0.2, 0.2, 0.6)
    bary_v: tuple = (0.2, 0.2, 0.6)
    off_x: tuple = (0.5, 0.4)
    off_u: tuple = (0.5, 0.4)
    k: float | None = None
    grid: int = 101
    path_samples: int = 201
    n_list: tuple = (1, 10, 100)
    convergence_n: tuple = DEFAULT_CONVERGENCE_N
    lemma_samples: int = 20
    lemma_radius: float = 1e-3
    seed: int = 0
    tol_edge: float = 1e-10
    tol_angle: float = 1e-9
    tol_bellows: float = 1e-8
    tol_flex_drift: float = 1e-9
    tol_dihedral: float = 1e-3
    tol_lemma: float = 1e-8
    tol_convergence: float = 1e-12
    tol_oracle: float = 1e-6
    out_dir: str = "out"

    def __post_init__(self):
        for f in fields(self):
            if f.name.startswith("tol_") or f.name == "lemma_radius":
                v = getattr(self, f.name)
                if not v > 0:
                    raise ConfigError(f"{f.name} must be positive, got {v}")
        if self.grid < 2 or self.path_samples < 2:
            raise ConfigError("grid and path_samples need at least 2 samples")
        if self.lemma_samples < 1:
            raise ConfigError("lemma_samples must be at least 1")
        if any(int(n) < 1 for n in self.n_list + self.convergence_n):
            raise ConfigError("n values must be positive integers")
        # surfaces the validation rules of the parameter types
        self.bricard
        self.aux

    @property
    def bricard(self) -> BricardConfig:
        return BricardConfig(self.l_ab, self.l_bc, self.s, self.t, self.r0)

    @property
    def aux(self) -> AuxPlacement:
        return AuxPlacement(self.t_m, self.t_n, self.bary_y, self.bary_v, self.off_x, self.off_u, self.k)

    def as_dict(self) -> dict:
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v) for f in fields(self)}

    def with_overrides(self, **kw) -> "RunConfig":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


_FIELDS = {f.name: f for f in fields(RunConfig)}
_TUPLES = {"bary_y", "bary_v", "off_x", "off_u", "n_list", "convergence_n"}
_INTS = {"grid", "path_samples", "lemma_samples", "seed"}


def _parse_value(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _TUPLES:
            conv = int if key in ("n_list", "convergence_n") else float
            return tuple(conv(x) for x in raw.replace("(", "").replace(")", "").replace(",", " ").split())
        if key == "k":
            return None if raw.lower() in ("", "auto", "none") else float(raw)
        if key == "out_dir":
            return raw
        if key in _INTS:
            return int(raw)
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _parse_value(key, raw)
    try:
        return replace(base or RunConfig(), **values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig()
    return parse_config(Path(path).read_text())


def dump_config(cfg: RunConfig) -> str:
    lines = []
    for key, v in cfg.as_dict().items():
        if v is None:
            v = "auto"
        elif isinstance(v, list):
            v = ", ".join(repr(x) for x in v)
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"
