"""Experiment configuration: YAML text <-> validated dataclasses."""
from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field

import jsonschema
import yaml

from .geometry import ParametricCurve, ThinInclusion

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "dump_config",
    "apply_override",
    "SCHEMA",
]


class ConfigError(ValueError):
    """Invalid experiment configuration; ``path`` locates the bad field."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_range = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "inclusions": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["x", "y", "range"],
                "properties": {
                    "name": {"type": "string"},
                    "x": {"type": "array", "items": _num, "minItems": 1},
                    "y": {"type": "array", "items": _num, "minItems": 1},
                    "range": _range,
                    "half_thickness": _pos,
                    "permittivity": _pos,
                    "permeability": _pos,
                },
            },
        },
        "data": {"type": "array", "items": {"type": "string"}},
        "directions": {"type": "integer", "minimum": 4},
        "frequency": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["single", "list", "band"]},
                "wavelength": _pos,
                "wavelengths": {"type": "array", "items": _pos, "minItems": 1},
                "longest": _pos,
                "shortest": _pos,
                "count": {"type": "integer", "minimum": 2},
            },
        },
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"spacing": {"oneOf": [_pos, {"type": "null"}]}},
        },
        "noise": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "snr_db": {"oneOf": [_num, {"type": "null"}]},
                "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1},
            },
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "x_range": _range,
                "y_range": _range,
                "nx": {"type": "integer", "minimum": 2},
                "ny": {"type": "integer", "minimum": 2},
            },
        },
        "functionals": {
            "type": "array",
            "items": {"enum": ["SM", "SF", "MM", "MF"]},
            "minItems": 1,
        },
        "test_vector": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"c": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3}},
        },
        "signal_dim": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "strategy": {"enum": ["auto", "truth", "ratio", "gap", "fixed"]},
                "families": {"enum": [1, 3]},
                "tau": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "dim": {"type": "integer", "minimum": 1},
                "common": {"type": "boolean"},
            },
        },
        "filter": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["auto", "none", "single", "multi", "custom", "region_split"]},
                "threshold": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "regions": {
                    "type": "array",
                    "items": {"type": "array", "items": _num, "minItems": 4, "maxItems": 4},
                },
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": ["csv", "pgm", "png"]}},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": {"type": "array", "minItems": 1},
        },
        "workers": {"type": "integer", "minimum": 1},
    },
}


@dataclass
class InclusionConfig:
    x: list
    y: list
    range: list
    half_thickness: float = 0.015
    permittivity: float = 5.0
    permeability: float = 5.0
    name: str = ""

    def build(self):
        curve = ParametricCurve(tuple(self.x), tuple(self.y), tuple(self.range))
        return ThinInclusion(curve, self.half_thickness, self.permittivity,
                             self.permeability, self.name)


@dataclass
class FrequencyConfig:
    kind: str = "single"
    wavelength: float = 0.4
    wavelengths: list = field(default_factory=list)
    longest: float = 0.6
    shortest: float = 0.3
    count: int = 10

    def omegas(self):
        """Angular frequencies in increasing order.

        A band is split evenly in omega between 2 pi / longest and
        2 pi / shortest.
        """
        if self.kind == "single":
            return [2 * math.pi / self.wavelength]
        if self.kind == "list":
            return sorted(2 * math.pi / lam for lam in self.wavelengths)
        lo, hi = 2 * math.pi / self.longest, 2 * math.pi / self.shortest
        step = (hi - lo) / (self.count - 1)
        return [lo + k * step for k in range(self.count)]


@dataclass
class NoiseConfig:
    snr_db: float | None = 10.0
    seed: int = 0


@dataclass
class GridConfig:
    x_range: list = field(default_factory=lambda: [-1.0, 1.0])
    y_range: list = field(default_factory=lambda: [-1.0, 1.0])
    nx: int = 128
    ny: int = 128


@dataclass
class SignalDimConfig:
    strategy: str = "auto"
    families: int = 1
    tau: float = 0.01
    dim: int = 1
    common: bool = False


@dataclass
class FilterConfig:
    kind: str = "auto"
    threshold: float | None = None
    regions: list = field(default_factory=list)


@dataclass
class OutputConfig:
    dir: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "pgm"])


@dataclass
class ExperimentConfig:
    inclusions: list = field(default_factory=list)
    data: list = field(default_factory=list)
    directions: int = 64
    frequency: FrequencyConfig = field(default_factory=FrequencyConfig)
    sampling_spacing: float | None = None
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    functionals: list = field(default_factory=list)
    test_vector_c: list = field(default_factory=lambda: [1.0, 0.0, 1.0])
    signal_dim: SignalDimConfig = field(default_factory=SignalDimConfig)
    filter: FilterConfig = field(default_factory=FilterConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    sweep: dict = field(default_factory=dict)
    workers: int = 1

    @property
    def multi(self):
        return self.frequency.kind != "single"

    def build_inclusions(self):
        return [inc.build() for inc in self.inclusions]

    def to_dict(self):
        d = asdict(self)
        out = {
            "inclusions": d["inclusions"],
            "data": d["data"],
            "directions": d["directions"],
            "frequency": {k: v for k, v in d["frequency"].items() if v != []},
            "sampling": {"spacing": d["sampling_spacing"]},
            "noise": d["noise"],
            "grid": d["grid"],
            "functionals": list(d["functionals"]),
            "test_vector": {"c": d["test_vector_c"]},
            "signal_dim": d["signal_dim"],
            "filter": {k: v for k, v in d["filter"].items() if v is not None},
            "output": d["output"],
            "workers": d["workers"],
        }
        if self.sweep:
            out["sweep"] = copy.deepcopy(self.sweep)
        return out


def _floats(seq):
    return [float(v) for v in seq]


def _from_dict(raw):
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise ConfigError(exc.message, path or "<root>") from None

    cfg = ExperimentConfig()
    for i, inc in enumerate(raw.get("inclusions", [])):
        item = InclusionConfig(
            x=_floats(inc["x"]),
            y=_floats(inc["y"]),
            range=_floats(inc["range"]),
            half_thickness=float(inc.get("half_thickness", 0.015)),
            permittivity=float(inc.get("permittivity", 5.0)),
            permeability=float(inc.get("permeability", 5.0)),
            name=inc.get("name", ""),
        )
        if not item.range[0] < item.range[1]:
            raise ConfigError("range must be increasing", f"inclusions/{i}/range")
        cfg.inclusions.append(item)
    cfg.data = list(raw.get("data", []))
    if not cfg.inclusions and not cfg.data:
        raise ConfigError("either inclusions or data must be given", "<root>")
    cfg.directions = int(raw.get("directions", 64))

    freq = raw.get("frequency", {})
    kind = freq.get("kind")
    if kind is None:
        kind = "list" if "wavelengths" in freq else "band" if "longest" in freq or "count" in freq else "single"
    cfg.frequency = FrequencyConfig(
        kind=kind,
        wavelength=float(freq.get("wavelength", 0.4)),
        wavelengths=_floats(freq.get("wavelengths", [])),
        longest=float(freq.get("longest", 0.6)),
        shortest=float(freq.get("shortest", 0.3)),
        count=int(freq.get("count", 10)),
    )
    if kind == "list" and not cfg.frequency.wavelengths:
        raise ConfigError("list frequencies need wavelengths", "frequency/wavelengths")
    if kind == "band" and not cfg.frequency.longest > cfg.frequency.shortest:
        raise ConfigError("band needs longest > shortest", "frequency")

    spacing = raw.get("sampling", {}).get("spacing")
    cfg.sampling_spacing = None if spacing is None else float(spacing)

    noise = raw.get("noise", {})
    snr = noise.get("snr_db", 10.0)
    cfg.noise = NoiseConfig(None if snr is None else float(snr), int(noise.get("seed", 0)))

    grid = raw.get("grid", {})
    cfg.grid = GridConfig(_floats(grid.get("x_range", [-1, 1])), _floats(grid.get("y_range", [-1, 1])),
                          int(grid.get("nx", 128)), int(grid.get("ny", 128)))
    for key in ("x_range", "y_range"):
        lo, hi = getattr(cfg.grid, key)
        if not lo < hi:
            raise ConfigError("range must be increasing", f"grid/{key}")

    cfg.functionals = list(raw.get("functionals", ["MF"] if cfg.multi else ["SF"]))
    for i, kind_ in enumerate(cfg.functionals):
        is_multi = kind_ in ("MM", "MF")
        if is_multi != cfg.multi:
            raise ConfigError(f"{kind_} does not match the frequency kind {cfg.frequency.kind!r}",
                              f"functionals/{i}")
    if cfg.multi and len(cfg.frequency.omegas()) < 2:
        raise ConfigError("multi-frequency imaging needs at least two frequencies", "frequency")

    c = _floats(raw.get("test_vector", {}).get("c", [1.0, 0.0, 1.0]))
    if not any(c):
        raise ConfigError("c must be nonzero", "test_vector/c")
    cfg.test_vector_c = c

    sd = raw.get("signal_dim", {})
    cfg.signal_dim = SignalDimConfig(sd.get("strategy", "auto"), int(sd.get("families", 1)),
                                     float(sd.get("tau", 0.01)), int(sd.get("dim", 1)),
                                     bool(sd.get("common", False)))
    if cfg.signal_dim.strategy == "truth" and not cfg.inclusions:
        raise ConfigError("truth strategy needs inclusions", "signal_dim/strategy")

    flt = raw.get("filter", {})
    cfg.filter = FilterConfig(flt.get("kind", "auto"),
                              None if flt.get("threshold") is None else float(flt["threshold"]),
                              [_floats(r) for r in flt.get("regions", [])])
    if cfg.filter.kind == "custom" and cfg.filter.threshold is None:
        raise ConfigError("custom filter needs a threshold", "filter/threshold")
    if cfg.filter.kind == "region_split" and not cfg.filter.regions:
        raise ConfigError("region_split filter needs regions", "filter/regions")

    out = raw.get("output", {})
    cfg.output = OutputConfig(out.get("dir", "out"), list(out.get("formats", ["csv", "pgm"])))
    cfg.sweep = copy.deepcopy(raw.get("sweep", {}))
    cfg.workers = int(raw.get("workers", 1))
    return cfg


def parse_config(text):
    """Parse YAML text into an :class:`ExperimentConfig`."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"not valid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a mapping", "<root>")
    return _from_dict(raw)


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def dump_config(cfg):
    """Canonical YAML text; ``parse_config(dump_config(c)) == c``."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=None)


def apply_override(cfg, dotted, value):
    """Return a new config with ``dotted`` (e.g. ``noise.snr_db``) set to ``value``.

    Paths address the YAML layout; list items use integer keys
    (``inclusions.0.permittivity``).
    """
    raw = cfg.to_dict()
    keys = dotted.split(".")
    node = raw
    for key in keys[:-1]:
        if isinstance(node, list):
            node = node[int(key)]
        else:
            node = node.setdefault(key, {})
    last = keys[-1]
    if isinstance(node, list):
        node[int(last)] = value
    else:
        node[last] = value
    return _from_dict(raw)
