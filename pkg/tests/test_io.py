import json
import math

import pytest

from afcecho.io import (
    curves_to_csv,
    curves_to_json,
    format_float,
    grid_to_csv,
    grid_to_json,
    json_number,
    read_curves_csv,
)
from afcecho.sweep import Axis, fidelity_vs_efficiency_curves, sweep


@pytest.mark.parametrize("x,text", [
    (1.0, "1.00000000000e+00"),
    (2 / 3, "6.66666666667e-01"),
    (-0.0, "0.00000000000e+00"),
    (1e-300, "1.00000000000e-300"),
    (math.inf, "inf"),
    (None, ""),
])
def test_format_float(x, text):
    assert format_float(x) == text


def test_twelve_significant_digits():
    mantissa = format_float(math.pi).split("e")[0].replace(".", "")
    assert len(mantissa) == 12


def test_json_number():
    assert json_number(math.inf) == "inf"
    assert json_number(None) is None
    assert json_number(1 / 3) == float("3.33333333333e-01")


def test_grid_csv_long_format():
    g = sweep(Axis("b", 0, 1, 2), Axis("finesse", 2, 4, 3), {"chi": 0.0})
    lines = grid_to_csv(g, ["hello"]).splitlines()
    assert lines[0] == "# hello"
    assert lines[1] == "b,finesse,eta,snr,fidelity,f_opt,in_region"
    assert len(lines) == 2 + 6
    # b = 1, chi = 0: no echo and an undefined SNR leave empty fields
    assert lines[-1].split(",")[2:] == ["0.00000000000e+00", "", "", "", "false"]
    assert lines[2].split(",")[3] == "inf"


def test_grid_json_row_major():
    g = sweep(Axis("b", 0, 0.2, 2), Axis("finesse", 2, 4, 3), {"chi": 0.5})
    doc = json.loads(grid_to_json(g, {"figure": 9}))
    assert doc["meta"] == {"figure": 9}
    assert doc["shape"] == [2, 3] and doc["order"] == "row-major"
    assert [a["name"] for a in doc["axes"]] == ["b", "finesse"]
    assert doc["fixed"] == {"chi": 0.5}
    assert doc["data"]["eta"][1 * 3 + 2] == pytest.approx(g.points[1][2].eta, rel=1e-11)


def test_curves_roundtrip():
    curves = fidelity_vs_efficiency_curves(0.1, [0.0, 1.0])
    text = curves_to_csv(curves, ["x"])
    assert "\r" not in text
    back = read_curves_csv(text)
    assert [c["chi"] for c in back] == [0.0, 1.0]
    for c, r in zip(curves, back):
        assert r["b"] == 0.1
        assert r["finesse"] == list(c.finesse)
        assert r["eta"] == pytest.approx(list(c.eta), rel=1e-11)
        assert r["fidelity"] == pytest.approx(list(c.fidelity), rel=1e-11)
        for g, rg in zip(c.f_opt_gap, r["f_opt_gap"]):
            assert (g is None) == (rg is None)


def test_curves_json():
    doc = json.loads(curves_to_json(fidelity_vs_efficiency_curves(0, [1.0], points=3)))
    (c,) = doc["curves"]
    assert c["finesse"] == [2.0, 6.5, 11.0]
    assert c["eta"][0] == pytest.approx(16 / math.pi**2, rel=1e-11)
