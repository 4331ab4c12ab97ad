"""Run manifests: a flat key = value configuration format and its validation.

A configuration file is plain text, one ``key = value`` per line, ``#`` for
comments.  Shape parameters use the ``shape.<name>`` prefix.  All keys are
validated against the shapes catalog and the solver invariants before any
compute starts; errors cite the offending key and line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import domains
from .solver import SolverConfig

__all__ = ["ConfigError", "RunManifest", "parse_config_file", "build_manifest"]


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


_MODES = ("partition", "eigen", "table1")
_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


@dataclass(frozen=True)
class RunManifest:
    """Validated description of one experiment."""

    experiment: str
    mode: str
    dim: int
    n: int
    shape: str
    shape_params: dict
    k: int
    solver: SolverConfig
    seeds: tuple[int, ...]
    metric: str
    out: Path
    source: str = "<memory>"

    def mask(self):
        from .grid import GridSpec

        return domains.make_mask(GridSpec(self.dim, self.n), self.shape, self.shape_params)


def parse_config_file(path: str | Path) -> dict[str, tuple[str, int]]:
    """Read a flat config file into {key: (raw value, line number)}."""
    out: dict[str, tuple[str, int]] = {}
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = stripped.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"{path}:{lineno}: empty key")
        if key in out:
            raise ConfigError(f"{path}:{lineno}: duplicate key '{key}' (first at line {out[key][1]})")
        out[key] = (value.strip(), lineno)
    return out


_TOP_KEYS = {
    "experiment", "mode", "dim", "n", "shape", "k", "variant", "adaptive",
    "adaptive_stop", "level_tol", "inner_norm", "tau0", "tau_min", "tol", "tol_u", "tol_phi",
    "max_outer", "max_inner", "tau_eval", "seed", "seeds", "seed_list",
    "metric", "out", "max_reseeds",
}


def _fail(source: str, key: str, lineno: int | None, msg: str) -> None:
    loc = f"{source}:{lineno}: " if lineno is not None else f"{source}: "
    raise ConfigError(f"{loc}key '{key}': {msg}")


class _Reader:
    def __init__(self, raw: dict[str, tuple[str, int]], source: str):
        self.raw = dict(raw)
        self.source = source

    def take(self, key: str, default=None):
        if key in self.raw:
            return self.raw.pop(key)
        return (default, None) if default is not None else (None, None)

    def typed(self, key: str, caster, default=None, required=False):
        value, lineno = self.take(key)
        if value is None:
            if required:
                _fail(self.source, key, None, "is required")
            return default
        if not isinstance(value, str):
            return value
        try:
            return caster(value)
        except (ValueError, KeyError):
            _fail(self.source, key, lineno, f"cannot parse {value!r}")


def _as_bool(s: str) -> bool:
    return _BOOL[s.lower()]


def build_manifest(raw: dict, source: str = "<config>") -> RunManifest:
    """Validate a flat key/value mapping (values may be raw strings) into a manifest."""
    normalized: dict[str, tuple] = {}
    for key, val in raw.items():
        normalized[key] = val if isinstance(val, tuple) else (val, None)
    shape_params_raw = {k[len("shape."):]: normalized.pop(k) for k in list(normalized) if k.startswith("shape.")}

    for key, (_, lineno) in normalized.items():
        if key not in _TOP_KEYS:
            _fail(source, key, lineno, "unknown key")

    r = _Reader(normalized, source)
    experiment = r.typed("experiment", str, default="run")
    mode = r.typed("mode", str, default="partition")
    if mode not in _MODES:
        _fail(source, "mode", None, f"must be one of {_MODES}, got {mode!r}")
    dim = r.typed("dim", int, default=2)
    n = r.typed("n", int, required=(mode != "table1"), default=512)
    shape = r.typed("shape", str, required=(mode == "partition"), default="square")
    k = r.typed("k", int, default=1, required=(mode == "partition"))

    shape_params = {}
    for name, (val, lineno) in shape_params_raw.items():
        try:
            shape_params[name] = float(val)
        except ValueError:
            _fail(source, f"shape.{name}", lineno, f"cannot parse {val!r} as a number")

    # solver knobs; 'tol' is shorthand setting tau_min (the eigen ladder
    # tolerance); defaults live on SolverConfig, only explicit keys pass through
    solver_kwargs = {}
    for key, caster in [
        ("tau0", float), ("tau_min", float), ("tol_u", float), ("tol_phi", int),
        ("max_outer", int), ("max_inner", int), ("variant", str),
        ("adaptive", _as_bool), ("adaptive_stop", str), ("level_tol", float), ("inner_norm", str),
        ("max_reseeds", int), ("tau_eval", float),
    ]:
        value = r.typed(key, caster, default=None)
        if value is not None:
            solver_kwargs[key] = value
    tol = r.typed("tol", float, default=None)
    if tol is not None:
        if "tau_min" in solver_kwargs and solver_kwargs["tau_min"] != tol:
            _fail(source, "tol", None, "conflicts with an explicit tau_min")
        solver_kwargs["tau_min"] = tol

    # seeds: single 'seed', count 'seeds', or explicit 'seed_list'
    seed_single = r.typed("seed", int, default=None)
    seed_count = r.typed("seeds", int, default=None)
    seed_list_raw, seed_list_line = r.take("seed_list")
    if sum(x is not None for x in (seed_single, seed_count, seed_list_raw)) > 1:
        _fail(source, "seed", None, "give only one of seed / seeds / seed_list")
    if seed_list_raw is not None:
        try:
            seeds = tuple(int(s) for s in str(seed_list_raw).split(",") if s.strip())
        except ValueError:
            _fail(source, "seed_list", seed_list_line, f"cannot parse {seed_list_raw!r}")
        if not seeds:
            _fail(source, "seed_list", seed_list_line, "is empty")
    elif seed_count is not None:
        if seed_count < 1:
            _fail(source, "seeds", None, f"must be >= 1, got {seed_count}")
        seeds = tuple(range(seed_count))
    else:
        seeds = (seed_single if seed_single is not None else 0,)

    metric = r.typed("metric", str, default=None)
    out = Path(r.typed("out", str, default=f"results/{experiment}"))

    # cross-field validation
    if mode != "table1":
        if shape not in domains.shape_names():
            _fail(source, "shape", None,
                  f"unknown shape '{shape}'; known: {', '.join(domains.shape_names())}")
        if domains.shape_dim(shape) not in (0, dim):
            _fail(source, "shape", None, f"'{shape}' needs dim={domains.shape_dim(shape)}, config says dim={dim}")
        known = domains.default_params(shape)
        unknown = set(shape_params) - set(known)
        if unknown:
            _fail(source, "shape", None, f"'{shape}' has no parameters {sorted(unknown)}; accepts {sorted(known)}")
    if mode == "partition" and k < 1:
        _fail(source, "k", None, f"must be >= 1, got {k}")
    if dim not in (2, 3):
        _fail(source, "dim", None, f"must be 2 or 3, got {dim}")
    if n < 4 or (n & (n - 1)) != 0:
        _fail(source, "n", None, f"must be a power of two >= 4, got {n}")
    if metric is None:
        metric = "periodic" if shape == "torus" else "euclidean"
    elif metric not in ("periodic", "euclidean"):
        _fail(source, "metric", None, f"must be 'periodic' or 'euclidean', got {metric!r}")

    try:
        solver = SolverConfig(**solver_kwargs)
    except ValueError as exc:
        raise ConfigError(f"{source}: solver configuration invalid: {exc}") from exc

    if r.raw:
        leftover = ", ".join(sorted(r.raw))
        raise ConfigError(f"{source}: unhandled keys: {leftover}")

    return RunManifest(
        experiment=experiment,
        mode=mode,
        dim=dim,
        n=n,
        shape=shape,
        shape_params=shape_params,
        k=k,
        solver=solver,
        seeds=seeds,
        metric=metric,
        out=out,
        source=source,
    )


def load_manifest(path: str | Path) -> RunManifest:
    return build_manifest(parse_config_file(path), source=str(path))
