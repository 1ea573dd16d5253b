import pytest

from ionize.params import (
    DeviceParams,
    ParameterError,
    TransmonParams,
    dumps,
    fitted_device,
    fitted_transmon,
    loads,
)


def test_fitted_values():
    tp = fitted_transmon()
    assert tp.e_c == pytest.approx(0.1496)
    assert tp.e_j == pytest.approx((14.0286, -0.1425, 0.0084, -0.0023))
    dev = fitted_device()
    assert dev.omega_r == pytest.approx(6.4043)
    assert dev.g == pytest.approx(0.060)


@pytest.mark.parametrize("kwargs", [
    {"e_c": 0.0},
    {"e_c": -0.1},
    {"e_j": ()},
    {"e_j": (-1.0,)},
    {"e_j": (1.0,) * 5},
    {"charge_cutoff": 0},
    {"kept_levels": 0},
    {"kept_levels": 100, "charge_cutoff": 40},
])
def test_transmon_invariants_rejected(kwargs):
    base = dict(e_c=0.15, e_j=(14.0,), n_g=0.0)
    base.update(kwargs)
    with pytest.raises(ParameterError):
        TransmonParams(**base)


@pytest.mark.parametrize("kwargs", [
    {"omega_r": 0.0},
    {"omega_r": -1.0},
    {"resonator_cutoff": 1},
])
def test_device_invariants_rejected(kwargs):
    base = dict(transmon=fitted_transmon(), omega_r=6.4, g=0.06,
                resonator_cutoff=6)
    base.update(kwargs)
    with pytest.raises(ParameterError):
        DeviceParams(**base)


def test_with_ng():
    tp = fitted_transmon().with_ng(0.3)
    assert tp.n_g == 0.3
    assert tp.e_j == fitted_transmon().e_j


def test_json_round_trip_transmon():
    tp = fitted_transmon(n_g=0.25)
    text = dumps(tp)
    assert "e_c_ghz" in text and "e_j_ghz" in text
    assert loads(text, TransmonParams) == tp


def test_json_round_trip_device():
    dev = fitted_device()
    assert loads(dumps(dev), DeviceParams) == dev
