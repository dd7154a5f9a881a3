"""Field models as data: chart, Lagrangian, strains and optional reference identities.

A model file is JSON::

    {
      "name": "mindlin",
      "independent": ["t", "X", "Y"],
      "dependent": ["w", "psi", "phi"],
      "lagrangian": {"kinetic": "...", "potential": "..."},   # or a single string
      "parameters": {"rho": 7850, ...},                        # optional numeric defaults
      "strains": [{"name": "Gamma_x", "expr": "-psi_X"}, ...], # optional
      "state_order": ["p_w", ...],                             # optional
      "resultants": [{"name": "M_x", "expr": "...", "jet": "psi_X", "sign": -1}],
      "golden_residuals": {"w": "..."},
      "reference_operator": [["0", "dX", ...], ...]
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError, JetPHError
from .symbolic import Expression, normalize
from .textio import Chart, parse
from .variational import Density


@dataclass(frozen=True)
class Resultant:
    name: str
    expr: Expression
    jet: Expression
    sign: int


@dataclass(frozen=True)
class FieldModel:
    name: str
    chart: Chart
    lagrangian: Density
    kinetic: Expression | None = None
    potential: Expression | None = None
    parameters: dict = field(default_factory=dict)
    strains: tuple = ()
    state_order: tuple = ()
    resultants: tuple = ()
    golden_residuals: dict = field(default_factory=dict)
    reference_operator: tuple = ()

    def parse(self, text: str) -> Expression:
        return parse(text, self.chart)


PRESETS = ("mindlin", "wave1d")


def _require(d: dict, key: str, kind):
    if key not in d:
        raise ConfigError(f"model config is missing {key!r}")
    if not isinstance(d[key], kind):
        raise ConfigError(f"model config field {key!r} has the wrong type")
    return d[key]


def model_from_dict(d: dict) -> FieldModel:
    if not isinstance(d, dict):
        raise ConfigError("model config must be a JSON object")
    try:
        indep = _require(d, "independent", list)
        deps = _require(d, "dependent", list)
        chart = Chart.from_names(indep, deps, time=bool(d.get("time", True)))
        lag = _require(d, "lagrangian", (str, dict))
        if isinstance(lag, str):
            kinetic = potential = None
            expr = parse(lag, chart)
        else:
            kinetic = parse(lag.get("kinetic", "0"), chart)
            potential = parse(lag.get("potential", "0"), chart)
            expr = normalize(kinetic - potential)
        strains = tuple((s["name"], parse(s["expr"], chart)) for s in d.get("strains", []))
        resultants = tuple(
            Resultant(r["name"], parse(r["expr"], chart), parse(r["jet"], chart), int(r.get("sign", 1)))
            for r in d.get("resultants", [])
        )
        golden = {chart.dep(k): parse(v, chart) for k, v in d.get("golden_residuals", {}).items()}
        ref = tuple(tuple(str(c) for c in row) for row in d.get("reference_operator", []))
        return FieldModel(
            name=str(d.get("name", "model")),
            chart=chart,
            lagrangian=Density(chart, expr),
            kinetic=kinetic,
            potential=potential,
            parameters=dict(d.get("parameters", {})),
            strains=strains,
            state_order=tuple(d.get("state_order", ())),
            resultants=resultants,
            golden_residuals=golden,
            reference_operator=ref,
        )
    except ConfigError:
        raise
    except (JetPHError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid model config: {exc}") from exc


def load_model_dict(source) -> dict:
    """JSON from a preset name or a file path."""
    if isinstance(source, dict):
        return source
    name = str(source)
    if name in PRESETS:
        text = resources.files("jetph").joinpath("presets").joinpath(f"{name}.json").read_text()
    else:
        path = Path(name)
        if not path.is_file():
            raise ConfigError(f"model config not found: {name}")
        text = path.read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed model config {name}: {exc}") from exc


def load_model(source) -> FieldModel:
    return model_from_dict(load_model_dict(source))
