import json
import math

import numpy as np
import pytest

from biquat import diffops as dops
from biquat.algebra import Biquaternion
from biquat.errors import ParseError
from biquat.quadrature import QuadratureSpec, ball_rule
from biquat.sources import charge_pulse, gaussian_source, source_from_json, source_from_obj


def test_gaussian_values_and_support():
    amp = Biquaternion(1.0, [0, 2j, 0])
    src = gaussian_source(amp, [1, 0, 0], 0.5, cutoff=4)
    c, R = src.support
    np.testing.assert_array_equal(c, [1, 0, 0])
    assert R == 2.0
    val = src.field.at([0.0, 1.5, 0, 0])
    assert val.isclose(amp * math.exp(-1.0))
    assert src.field.at([0.0, 3.5, 0, 0]) == Biquaternion()


def test_moving_gaussian_has_no_static_support():
    src = gaussian_source(Biquaternion(1.0), [0, 0, 0], 0.5, velocity=[0.5, 0, 0])
    assert src.support is None
    assert src.field.at([2.0, 1.0, 0, 0]).isclose(Biquaternion(1.0))


def test_charge_pulse_total_charge():
    # ∫ rho_E dV = q, and Theta's scalar part is i rho_E / sqrt(eps)
    th = charge_pulse(2.0, [0, 0, 0], 0.4, eps=4.0)
    y, _, w = ball_rule(th.support[1], QuadratureSpec(48, 12))
    vals = th.field(np.zeros(len(w)), y)
    assert np.sum(w * vals[:, 0]).imag * 2.0 == pytest.approx(2.0, rel=1e-8)
    np.testing.assert_array_equal(vals[:, 1:], 0)


def test_source_from_obj_gaussian_and_charge():
    src = source_from_obj({"type": "gaussian", "amplitude": {"s": [0, 1], "v": [[1, 0], [0, 0], [0, 0]]},
                           "center": [0, 0, 0], "width": 1.0})
    assert src.field.at([0, 0, 0, 0]) == Biquaternion(1j, [1, 0, 0])
    ch = source_from_obj({"type": "gaussian", "charge": 1.0, "width": 0.5, "velocity": [0.2, 0, 0]})
    v = ch.field.at([0, 0, 0, 0])
    assert v.scalar.real == 0 and v.scalar.imag > 0
    np.testing.assert_allclose(v.vector, [0.2 * v.scalar.imag, 0, 0])


def test_source_from_obj_plane():
    src = source_from_obj({"type": "plane", "xi": [0, 0, 1.0], "sign": -1})
    p = [0.3, 0.1, 0.2, 0.4]
    assert dops.bigradient(-1, src.field, p).norm() < 1e-14


def test_source_from_obj_table(tmp_path):
    g = dops.GridBqField.sample(dops.BqField.constant(Biquaternion(2.0, [0, 1j, 0])),
                                [0, 0, 0, 0], [0.5] * 4, [2, 2, 2, 2])
    (tmp_path / "grid.jsonl").write_text(g.dumps())
    src = source_from_json(json.dumps({"type": "table", "path": str(tmp_path / "grid.jsonl")}))
    assert src.field.at([0.25, 0.25, 0.25, 0.25]).isclose(Biquaternion(2.0, [0, 1j, 0]))
    rel = source_from_obj({"type": "table", "path": "grid.jsonl"}, tmp_path)
    assert rel.field.at([0, 0, 0, 0]).isclose(Biquaternion(2.0, [0, 1j, 0]))
    (tmp_path / "bad.jsonl").write_text("not json\n")
    with pytest.raises(ParseError):
        source_from_obj({"type": "table", "path": "bad.jsonl"}, tmp_path)


@pytest.mark.parametrize("obj", [
    {"type": "spline"},
    {"center": [0, 0, 0]},
    {"type": "gaussian", "width": -1.0},
    {"type": "gaussian", "center": [0, 0]},
    {"type": "table"},
])
def test_source_from_obj_rejects(obj):
    with pytest.raises(ValueError):
        source_from_obj(obj)
