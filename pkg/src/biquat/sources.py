"""Source and initial-data fields described by JSON objects.

Supported types::

    {"type": "gaussian", "amplitude": <bq>, "center": [x1, x2, x3], "width": s,
     "velocity": [v1, v2, v3]}
    {"type": "gaussian", "charge": q, "center": ..., "width": s, "velocity": ...,
     "eps": 1, "mu": 1}
    {"type": "plane", "xi": [..], "amplitude": <bq>, "sign": 1, "branch": 1}
    {"type": "table", "path": "grid.jsonl"}

``<bq>`` is the biquaternion text form {"s": [re, im], "v": [[re, im] x 3]}.
A Gaussian is exp(-|x - center - velocity tau|^2 / width^2), truncated at
``cutoff`` widths (default 8) so that it has a finite support ball.  The
``charge`` form builds Theta = i rho + J for a charge moving with the given
velocity, which satisfies charge conservation.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .algebra import Biquaternion
from .diffops import BqField, GridBqField
from .waves import plane_wave_solution

SOURCE_TYPES = ("gaussian", "plane", "table")


@dataclass(frozen=True)
class SourceSpec:
    """A field together with the spatial ball outside which it vanishes (if any)."""

    field: BqField
    support: Optional[tuple] = None
    description: str = ""


def _vec(obj, name, n=3):
    v = obj.get(name, [0.0] * n)
    if not isinstance(v, list) or len(v) != n:
        raise ValueError(f'"{name}" must be a list of {n} numbers')
    return np.asarray(v, dtype=float)


def gaussian_source(amplitude: Biquaternion, center, width: float, velocity=(0, 0, 0),
                    cutoff: float = 8.0) -> SourceSpec:
    c = np.asarray(center, float)
    v = np.asarray(velocity, float)
    amp = amplitude.components
    R = cutoff * width

    def ev(tau, x):
        d = np.asarray(x, float) - c - np.asarray(tau, float)[..., None] * v
        r2 = np.sum(d * d, axis=-1)
        g = np.where(r2 < R * R, np.exp(-r2 / width ** 2), 0.0)
        return g[..., None] * amp

    support = (c, R) if not np.any(v) else None
    return SourceSpec(BqField(ev, note="gaussian"), support, "gaussian")


def charge_pulse(q: float, center, width: float, velocity=(0, 0, 0), eps: float = 1.0,
                 mu: float = 1.0, cutoff: float = 8.0) -> SourceSpec:
    """Theta = i rho_E/sqrt(eps) + sqrt(mu) rho_E v for a moving Gaussian charge."""
    c = np.asarray(center, float)
    v = np.asarray(velocity, float)
    R = cutoff * width
    norm = q / (math.pi ** 1.5 * width ** 3)

    def ev(tau, x):
        d = np.asarray(x, float) - c - np.asarray(tau, float)[..., None] * v
        r2 = np.sum(d * d, axis=-1)
        rho = norm * np.where(r2 < R * R, np.exp(-r2 / width ** 2), 0.0)
        out = np.empty(np.shape(rho) + (4,), dtype=complex)
        out[..., 0] = 1j * rho / math.sqrt(eps)
        out[..., 1:] = math.sqrt(mu) * rho[..., None] * v
        return out

    support = (c, R) if not np.any(v) else None
    return SourceSpec(BqField(ev, note="charge pulse"), support, "charge pulse")


def source_from_obj(obj: dict, base_dir: Path | None = None) -> SourceSpec:
    if not isinstance(obj, dict) or "type" not in obj:
        raise ValueError('source must be an object with a "type" key')
    kind = obj["type"]
    if kind == "gaussian":
        width = float(obj.get("width", 1.0))
        if width <= 0:
            raise ValueError('"width" must be positive')
        center = _vec(obj, "center")
        velocity = _vec(obj, "velocity")
        cutoff = float(obj.get("cutoff", 8.0))
        if "charge" in obj:
            return charge_pulse(float(obj["charge"]), center, width, velocity,
                                float(obj.get("eps", 1.0)), float(obj.get("mu", 1.0)), cutoff)
        amp = Biquaternion.from_json_obj(obj.get("amplitude", {"s": [1, 0], "v": [[0, 0]] * 3}))
        return gaussian_source(amp, center, width, velocity, cutoff)
    if kind == "plane":
        amp = Biquaternion.from_json_obj(obj.get("amplitude", {"s": [1, 0], "v": [[0, 0]] * 3}))
        sign = int(obj.get("sign", 1))
        branch = int(obj.get("branch", 1))
        field = plane_wave_solution(sign, _vec(obj, "xi"), amp, branch)
        return SourceSpec(field, None, "plane")
    if kind == "table":
        if "path" not in obj:
            raise ValueError('table source needs a "path"')
        path = Path(obj["path"])
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        grid = GridBqField.loads(path.read_text())
        return SourceSpec(grid.as_field(), None, "table")
    raise ValueError(f"unknown source type {kind!r}; expected one of {SOURCE_TYPES}")


def source_from_json(text: str) -> SourceSpec:
    return source_from_obj(json.loads(text))
