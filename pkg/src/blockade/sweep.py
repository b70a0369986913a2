"""Parameter sweeps over the full pipeline and their CSV output.

Configs are flat sectioned key-value files (configparser syntax) with
sections [model], [sweep], [solver], [output].  All numbers are in units
of κ.  Example::

    [model]
    g = 11
    J = 2
    F_a = 0.1

    [sweep]
    axis1 = delta_a, -20, 20, 201
    link_delta_b = 2/3 * delta_a
    link_delta_c = 1/3 * delta_a
    link_delta_sigma = delta_a

    [output]
    path = fig3a.csv
    format = csv

Unknown keys are hard errors.  Presets named after the reproduced figures
expand to full configs.
"""

import configparser
import csv
import io
import math
import os
import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

from . import dynamics, observables
from .model import ModelParams, build_hamiltonian
from .observables import ObservableSet

MODEL_KEYS = tuple(f.name for f in fields(ModelParams))
SWEEPABLE_KEYS = tuple(k for k in MODEL_KEYS
                       if not k.startswith("n_"))

CSV_COLUMNS = ("N_a", "N_b", "N_c", "g2_a", "g2_b", "g2_c", "g3_a",
               "tag", "residual")


class ConfigError(ValueError):
    """Malformed sweep configuration."""


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in SWEEPABLE_KEYS:
            raise ConfigError(f"unknown sweep parameter {self.name!r}")
        if self.count < 2:
            raise ConfigError(f"axis {self.name}: point count must be >= 2")
        if self.start == self.stop:
            raise ConfigError(f"axis {self.name}: start equals stop")

    def values(self):
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + i * step for i in range(self.count)]


@dataclass(frozen=True)
class Linkage:
    """Dependent parameter bound to coeff * source at every grid point."""

    target: str
    coeff: float
    source: str

    def __post_init__(self):
        for name in (self.target, self.source):
            if name not in SWEEPABLE_KEYS:
                raise ConfigError(f"unknown linked parameter {name!r}")


@dataclass
class SweepConfig:
    base: ModelParams
    axis1: Axis
    axis2: Axis | None = None
    links: tuple = ()
    method: str = "direct"
    residual_tol: float = 1e-10
    evolve_tol: float = 1e-9
    evolve_t_max: float = 500.0
    workers: int = 1
    out_path: str = "sweep.csv"
    out_format: str = "csv"

    def __post_init__(self):
        linked = {ln.target for ln in self.links}
        for ax in (self.axis1, self.axis2):
            if ax is not None and ax.name in linked:
                raise ConfigError(
                    f"parameter {ax.name!r} is both a sweep axis and a "
                    "linkage target"
                )
        if self.method not in ("direct", "evolve"):
            raise ConfigError(f"unknown solver method {self.method!r}")
        if self.out_format not in ("csv", "svg", "both"):
            raise ConfigError(f"unknown output format {self.out_format!r}")


@dataclass
class SweepRecord:
    """One grid point: resolved parameters, observables, diagnostics."""

    axis_values: dict
    params: ModelParams
    obs: ObservableSet | None
    residual: float | None
    wall_time: float
    failed: bool = False
    error: str = ""


_LINK_RE = re.compile(
    r"^\s*(?:(\(?[-+0-9.eE/*]+\)?)\s*\*\s*)?([A-Za-z_]\w*)\s*$")
_NUM_RE = re.compile(r"^\(?\s*([-+]?[0-9.eE+-]+)\s*(?:/\s*([0-9.eE+-]+))?\s*\)?$")


def _parse_coeff(text: str) -> float:
    m = _NUM_RE.match(text.strip())
    if not m:
        raise ConfigError(f"cannot parse linkage coefficient {text!r}")
    num = float(m.group(1))
    return num / float(m.group(2)) if m.group(2) else num


def parse_linkage(target: str, expr: str) -> Linkage:
    m = _LINK_RE.match(expr)
    if not m:
        raise ConfigError(
            f"cannot parse linkage {target} = {expr!r} "
            "(expected 'coeff * param' or 'param')"
        )
    coeff = _parse_coeff(m.group(1)) if m.group(1) else 1.0
    return Linkage(target, coeff, m.group(2))


def _parse_axis(key: str, text: str) -> Axis:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ConfigError(
            f"{key} must be 'name, start, stop, count', got {text!r}"
        )
    try:
        return Axis(parts[0], float(parts[1]), float(parts[2]),
                    int(parts[3]))
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from exc


def load_config(text: str) -> SweepConfig:
    """Parse and validate a sweep configuration document."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keys are case sensitive (F_a vs f_a)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config parse failure: {exc}") from exc
    known_sections = {"model", "sweep", "solver", "output"}
    unknown = set(cp.sections()) - known_sections
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    model_kwargs = {}
    preset_name = None
    for key, val in cp.items("model") if cp.has_section("model") else []:
        if key == "preset":
            preset_name = val.strip()
            continue
        if key not in MODEL_KEYS:
            raise ConfigError(f"unknown [model] key {key!r}")
        model_kwargs[key] = (int(val) if key.startswith("n_")
                             else float(val))

    if preset_name is not None:
        cfg = preset(preset_name)
        base = cfg.base.with_(**model_kwargs)
        cfg.base = base
    else:
        base = ModelParams(**model_kwargs)
        cfg = SweepConfig(base=base, axis1=Axis("delta_a", -20.0, 20.0, 201))

    if cp.has_section("sweep"):
        links = list(cfg.links) if preset_name else []
        for key, val in cp.items("sweep"):
            if key == "axis1":
                cfg.axis1 = _parse_axis(key, val)
            elif key == "axis2":
                cfg.axis2 = _parse_axis(key, val)
            elif key.startswith("link_"):
                links.append(parse_linkage(key[len("link_"):], val))
            else:
                raise ConfigError(f"unknown [sweep] key {key!r}")
        cfg.links = tuple(links)

    if cp.has_section("solver"):
        for key, val in cp.items("solver"):
            if key == "method":
                cfg.method = val.strip()
            elif key == "residual_tol":
                cfg.residual_tol = float(val)
            elif key == "evolve_tol":
                cfg.evolve_tol = float(val)
            elif key == "evolve_t_max":
                cfg.evolve_t_max = float(val)
            elif key == "workers":
                cfg.workers = int(val)
            else:
                raise ConfigError(f"unknown [solver] key {key!r}")

    if cp.has_section("output"):
        for key, val in cp.items("output"):
            if key == "path":
                cfg.out_path = val.strip()
            elif key == "format":
                cfg.out_format = val.strip()
            else:
                raise ConfigError(f"unknown [output] key {key!r}")

    cfg.__post_init__()  # re-validate after mutation
    return cfg


def _fig3_links():
    return (parse_linkage("delta_b", "2/3 * delta_a"),
            parse_linkage("delta_c", "1/3 * delta_a"),
            parse_linkage("delta_sigma", "delta_a"))


def preset(name: str) -> SweepConfig:
    """Sweep configuration reproducing one of the reference figures.

    Axis ranges bracket every analytically predicted feature and are
    overridable; they default to 201 points.
    """
    links3 = _fig3_links()
    fig5ab = dict(delta_a=8.0, g=6.2, J=3.0, delta_b=6.0, delta_c=2.0,
                  delta_sigma=8.0)
    fig5cd = dict(delta_a=7.0, J=1.0, delta_b=3.0, delta_c=4.0,
                  delta_sigma=7.0, F_a=0.05, g=5.5)
    table = {
        "fig3a": (dict(g=11.0, J=2.0, F_a=0.1, F_b=0.05, F_c=0.05,
                       delta_a=math.sqrt(125.0)),
                  Axis("delta_a", -20.0, 20.0, 201), links3),
        "fig3b": (dict(g=3.0, J=4.0, F_a=0.02, F_b=0.01, F_c=0.01,
                       delta_a=5.0),
                  Axis("delta_a", -15.0, 15.0, 201), links3),
        "fig4a": (dict(g=8.0, J=2.0, F_a=0.1, delta_a=9.9389),
                  Axis("delta_a", 8.0, 13.0, 201), links3),
        "fig4b": (dict(g=8.0, J=4.0, F_a=0.1, delta_a=10.3397),
                  Axis("delta_a", 8.0, 13.0, 201), links3),
        "fig4c": (dict(g=8.0, J=6.0, F_a=0.1, delta_a=10.9572),
                  Axis("delta_a", 8.0, 13.0, 201), links3),
        "fig4d": (dict(delta_a=7.0, J=1.0, F_a=0.1, g=5.66),
                  Axis("g", 4.0, 7.0, 201), links3),
        "fig4e": (dict(delta_a=7.0, J=2.0, F_a=0.1, g=5.55),
                  Axis("g", 4.0, 7.0, 201), links3),
        "fig4f": (dict(delta_a=7.0, J=3.0, F_a=0.1, g=5.34),
                  Axis("g", 4.0, 7.0, 201), links3),
        "fig5a": (dict(fig5ab, F_a=0.1),
                  Axis("F_a", 0.01, 1.0, 201), ()),
        "fig5b": (dict(fig5ab, F_a=0.1),
                  Axis("J", -6.0, 6.0, 201), ()),
        "fig5c": (fig5cd, Axis("g", -8.0, 8.0, 201), ()),
        "fig5d": (fig5cd, Axis("g", -8.0, 8.0, 201), ()),
    }
    if name not in table:
        raise ConfigError(
            f"unknown preset {name!r}; known: {', '.join(sorted(table))}"
        )
    model_kwargs, axis, links = table[name]
    cfg = SweepConfig(base=ModelParams(**model_kwargs), axis1=axis,
                      links=links, out_path=f"{name}.csv")
    return cfg


def preset_names():
    return ("fig3a", "fig3b", "fig4a", "fig4b", "fig4c", "fig4d", "fig4e",
            "fig4f", "fig5a", "fig5b", "fig5c", "fig5d")


def resolve_point(base: ModelParams, links, **axis_values) -> ModelParams:
    """Apply swept values, then linkage rules, to the base parameters."""
    p = base.with_(**axis_values)
    if links:
        p = p.with_(**{ln.target: ln.coeff * getattr(p, ln.source)
                       for ln in links})
    return p


def solve_point(cfg: SweepConfig, axis_values: dict) -> SweepRecord:
    """Run the full pipeline at one grid point."""
    t0 = time.perf_counter()
    try:
        p = resolve_point(cfg.base, cfg.links, **axis_values)
        if cfg.method == "direct":
            rho, residual = dynamics.steady_state(
                p, "direct", residual_tol=cfg.residual_tol)
        else:
            rho, residual = dynamics.steady_state(
                p, "evolve", tol=cfg.evolve_tol, t_max=cfg.evolve_t_max)
        obs = observables.compute_observables(rho, p.space())
        return SweepRecord(axis_values, p, obs, residual,
                           time.perf_counter() - t0)
    except Exception as exc:
        return SweepRecord(axis_values, cfg.base, None, None,
                           time.perf_counter() - t0,
                           failed=True, error=f"{type(exc).__name__}: {exc}")


def grid_points(cfg: SweepConfig):
    """Axis value dicts in deterministic grid order (axis1 outer)."""
    if cfg.axis2 is None:
        return [{cfg.axis1.name: v} for v in cfg.axis1.values()]
    return [{cfg.axis1.name: v1, cfg.axis2.name: v2}
            for v1 in cfg.axis1.values() for v2 in cfg.axis2.values()]


def run_sweep(cfg: SweepConfig, workers: int | None = None):
    """Solve every grid point; output order is grid order regardless of
    execution order.  Raises only if every point fails."""
    points = grid_points(cfg)
    if workers is None:
        workers = cfg.workers
    if workers <= 1:
        records = [solve_point(cfg, pt) for pt in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(lambda pt: solve_point(cfg, pt), points))
    if all(r.failed for r in records):
        first = records[0].error
        raise RuntimeError(f"all {len(records)} grid points failed "
                           f"(first error: {first})")
    return records


def default_workers() -> int:
    env = os.environ.get("BLOCKADE_THREADS", "")
    if env.strip():
        return max(int(env), 1)
    return 1


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def csv_text(records) -> str:
    """CSV payload: axis columns, observables, tag, residual."""
    if not records:
        raise ValueError("no records to write")
    axis_names = list(records[0].axis_values)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(axis_names + list(CSV_COLUMNS))
    for r in records:
        row = [_fmt(r.axis_values[a]) for a in axis_names]
        if r.failed or r.obs is None:
            row += [""] * 7 + ["failed", _fmt(r.residual)]
        else:
            o = r.obs
            row += [_fmt(o.N_a), _fmt(o.N_b), _fmt(o.N_c),
                    _fmt(o.g2_a), _fmt(o.g2_b), _fmt(o.g2_c),
                    _fmt(o.g3_a), o.tag, _fmt(r.residual)]
        w.writerow(row)
    return buf.getvalue()


def write_csv(records, path) -> None:
    """Write records to a UTF-8 CSV file (one header row, one row per
    grid point, full-precision floats, undefined correlations empty)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(records))
