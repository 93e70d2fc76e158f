import math

import pytest
from hypothesis import given, strategies as st

from chirpranging.errors import ParameterError
from chirpranging.power import (RECEIVER_COMPONENTS, ComponentBudget, battery_life,
                                duty_cycle_power, raw_battery_life)


def test_component_cells():
    pb = duty_cycle_power()
    rows = {r[0]: r[1:] for r in pb.rows()}
    assert rows["LDO + MEMS"][0] == pytest.approx(407.2, abs=0.1)
    assert rows["LDO + MEMS"][1] == pytest.approx(107.9, abs=0.1)
    assert rows["LDO + MEMS"][2] == pytest.approx(515.1, abs=0.1)
    assert rows["OPAMP 1"] == pytest.approx((293.4, 0.0, 293.4), abs=0.1)
    assert rows["ADC (nRF52)"] == pytest.approx((1080.0, 6833.2, 7913.2), abs=0.1)
    assert rows["Total"][0] == pytest.approx(2074.0, abs=0.1)


def test_totals_are_sums():
    pb = duty_cycle_power()
    for name, a, p, t in pb.rows():
        assert a + p == pytest.approx(t)
    assert pb.total_nw == pytest.approx(sum(c.total_nw for c in pb.components))
    assert pb.duty_cycle == 0.001


def test_full_duty_cycle():
    pb = duty_cycle_power(active_time=1.0, period=1.0)
    assert pb.passive_nw == 0.0
    assert pb.active_nw == pytest.approx(3.6e3 * sum(c.active_current for c in RECEIVER_COMPONENTS))


@given(st.floats(1e-6, 1.0))
def test_linear_in_duty_cycle(d):
    lo = duty_cycle_power(active_time=1e-12, period=1.0)
    hi = duty_cycle_power(active_time=1.0, period=1.0)
    mid = duty_cycle_power(active_time=d, period=1.0)
    lo_total = 3.6e3 * sum(c.passive_current for c in RECEIVER_COMPONENTS)
    expect = (1 - d) * lo_total + d * hi.total_nw
    assert mid.total_nw == pytest.approx(expect, rel=1e-9)
    assert lo.total_nw == pytest.approx(lo_total, rel=1e-9)


def test_invalid_duty_cycle():
    with pytest.raises(ParameterError):
        duty_cycle_power(active_time=0.0)
    with pytest.raises(ParameterError):
        duty_cycle_power(active_time=2.0, period=1.0)
    with pytest.raises(ParameterError):
        duty_cycle_power(supply_voltage=0.0)
    with pytest.raises(ParameterError):
        ComponentBudget("x", -1.0, 0.0)


def test_battery_life_examples():
    assert battery_life(9014.9) == 8.5
    raw = raw_battery_life(9014.9)
    assert 9014.9 / 3.6 / 1e3 == pytest.approx(2.504, abs=1e-3)
    assert raw == pytest.approx(225_000 / 2.504 / 8766, rel=1e-3)
    assert raw == pytest.approx(10.25, abs=0.01)
    assert battery_life(0.0) == 8.5
    assert battery_life(9014.9, shelf_life=math.inf) == pytest.approx(raw)
