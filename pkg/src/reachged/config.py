"""Run configuration: flat INI sections, one key per model symbol.

::

    [ensemble]   K N L p_D p_E p_F v_D v_E v_F mu_F
    [thresholds] tau tau_F
    [costs]      c_minus c_plus rho p_E_cap
    [run]        seed replications instances p_D_grid slope_variant
                 w_comm w_comp output_path output_format workers

``rho`` may list several targets (``rho = 0.80, 0.90, 0.95``); ``p_D_grid``
is ``start, stop, steps``. Omitted keys take the defaults below, and an
omitted ``tau_F`` follows ``tau / 2``.
"""
import configparser
from dataclasses import dataclass, field, replace

from reachged.ensemble import EnsembleParams
from reachged.metrics import Thresholds
from reachged.theory import SLOPE_VARIANTS, CostModel

OUTPUT_FORMATS = ("csv", "json")

_INT = int
_FLOAT = float

SCHEMA = {
    "ensemble": {
        "K": _INT, "N": _INT, "L": _INT,
        "p_D": _FLOAT, "p_E": _FLOAT, "p_F": _FLOAT,
        "v_D": _FLOAT, "v_E": _FLOAT, "v_F": _FLOAT, "mu_F": _FLOAT,
    },
    "thresholds": {"tau": _FLOAT, "tau_F": _FLOAT},
    "costs": {"c_minus": _FLOAT, "c_plus": _FLOAT, "rho": "floats", "p_E_cap": _FLOAT},
    "run": {
        "seed": _INT, "replications": _INT, "instances": _INT, "p_D_grid": "grid",
        "slope_variant": str, "w_comm": _FLOAT, "w_comp": _FLOAT,
        "output_path": str, "output_format": str, "workers": _INT,
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    ensemble: EnsembleParams = field(default_factory=EnsembleParams)
    thresholds: Thresholds = field(default_factory=Thresholds)
    costs: CostModel = field(default_factory=CostModel)
    rhos: tuple = (0.9,)
    seed: int = 20240601
    replications: int = 200
    instances: int = 1000
    p_D_grid: tuple = (0.01, 1.0, 100)
    slope_variant: str = "threshold_aware"
    latency_weights: tuple = (1.0, 1.0)
    output_path: str = ""
    output_format: str = "csv"
    workers: int | None = None

    def costs_for(self, rho):
        return replace(self.costs, rho=rho)


def _convert(section, key, kind, raw):
    try:
        if kind == "floats":
            values = tuple(float(x) for x in raw.split(",") if x.strip())
            if not values:
                raise ValueError("empty list")
            return values
        if kind == "grid":
            parts = [x.strip() for x in raw.split(",")]
            if len(parts) != 3:
                raise ValueError("expected 'start, stop, steps'")
            return float(parts[0]), float(parts[1]), int(parts[2])
        if kind is _INT:
            return int(raw, 0)
        return kind(raw.strip())
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} ({exc})") from None


def parse_config(text):
    """Parse and validate config text into a :class:`RunConfig`."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    values = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            values[(section, key)] = _convert(section, key, SCHEMA[section][key], raw)

    def pick(section):
        return {k: v for (s, k), v in values.items() if s == section}

    try:
        ensemble = EnsembleParams(**pick("ensemble"))
    except ValueError as exc:
        raise ConfigError(f"[ensemble] {exc}") from None
    try:
        thresholds = Thresholds(**pick("thresholds"))
    except ValueError as exc:
        raise ConfigError(f"[thresholds] {exc}") from None

    cost_kw = pick("costs")
    rhos = cost_kw.pop("rho", RunConfig.rhos)
    try:
        costs = CostModel(rho=rhos[0], **cost_kw)
        for rho in rhos[1:]:
            replace(costs, rho=rho)
    except ValueError as exc:
        raise ConfigError(f"[costs] {exc}") from None

    run = pick("run")
    grid = run.pop("p_D_grid", RunConfig.p_D_grid)
    start, stop, steps = grid
    if steps < 2:
        raise ConfigError(f"[run] p_D_grid: steps must be >= 2, got {steps}")
    if not 0 < start < stop <= 1:
        raise ConfigError(f"[run] p_D_grid: need 0 < start < stop <= 1, got {start}, {stop}")
    weights = (run.pop("w_comm", 1.0), run.pop("w_comp", 1.0))
    if min(weights) < 0:
        raise ConfigError("[run] latency weights must be nonnegative")
    if run.get("slope_variant", "threshold_aware") not in SLOPE_VARIANTS:
        raise ConfigError(f"[run] slope_variant must be one of {SLOPE_VARIANTS}")
    if run.get("output_format", "csv") not in OUTPUT_FORMATS:
        raise ConfigError(f"[run] output_format must be one of {OUTPUT_FORMATS}")
    if not 0 <= run.get("seed", 0) < 2 ** 64:
        raise ConfigError("[run] seed must be a 64-bit unsigned integer")
    for key in ("replications", "instances", "workers"):
        if key in run and run[key] < 1:
            raise ConfigError(f"[run] {key} must be positive")
    return RunConfig(
        ensemble=ensemble, thresholds=thresholds, costs=costs, rhos=tuple(rhos),
        p_D_grid=(start, stop, steps), latency_weights=weights, **run,
    )


def load_config(path):
    if path is None:
        return parse_config("")
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())
