import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from suborbital_power.orbit_geometry import (
    TABLE_SHELLS,
    OrbitShell,
    SnLinkGeometry,
    cumulative_measure,
    integration_limits,
    intensity_measure,
    interferer_path_loss,
    satellite_density,
    slant_range,
    sn_path_gain,
    sn_path_loss_db,
)
from suborbital_power.qos_link import LinkParams

LEO = TABLE_SHELLS[0]
# mpmath: 60000 / (4 pi (6371 km + 350 km)^2), per m^2
LEO_DENSITY = 1.056996612725361e-10
# mpmath: segmented law at d = 1000 km, L = 350 km, L_r = 100 km, in km units
FPL_1000KM = 8.759543413309375e-07
# mpmath: -20 log10(lambda / 4 pi) at 12 GHz, then +25 log10(1e5)
PL_D0_DB = 54.03140814283587
PL_100KM_DB = 179.0314081428359


def test_leo_density():
    assert LEO.density == pytest.approx(LEO_DENSITY, rel=1e-13)
    # per square kilometer
    assert LEO.density * 1e6 == pytest.approx(1.057e-4, rel=1e-3)


def test_density_domain():
    with pytest.raises(ValueError):
        satellite_density(0, 350e3)


def test_shell_validation():
    with pytest.raises(ValueError, match="atmosphere_ref"):
        OrbitShell(altitude=100e3, satellites=10)
    with pytest.raises(ValueError, match="satellites"):
        OrbitShell(altitude=350e3, satellites=0)
    with pytest.raises(ValueError, match="tx_power"):
        OrbitShell(altitude=350e3, satellites=10, tx_power=-1.0)


def test_path_loss_frozen():
    assert interferer_path_loss(1000e3, LEO) == pytest.approx(FPL_1000KM, rel=1e-13)


def test_path_loss_at_zenith_distance():
    # 100**-2.5 + 250**-2
    assert interferer_path_loss(350e3, LEO) == pytest.approx(2.6e-5, rel=1e-13)


def test_path_loss_vectorized_and_decreasing():
    d = np.linspace(400e3, 5000e3, 200)
    f = interferer_path_loss(d, LEO)
    assert f.shape == d.shape
    assert np.all(np.diff(f) < 0.0)
    assert f[17] == interferer_path_loss(float(d[17]), LEO)


def test_path_loss_unit_switch():
    metric = OrbitShell(altitude=350e3, satellites=60000, pathloss_unit_km=False)
    x, lr, big_l = 1e6, 1e5, 3.5e5
    expected = (lr * x / big_l) ** -2.5 + ((x * x - lr * x) / big_l) ** -2.0
    assert interferer_path_loss(1e6, metric) == pytest.approx(expected, rel=1e-13)


def test_path_loss_below_atmosphere_rejected():
    with pytest.raises(ValueError, match="atmosphere"):
        interferer_path_loss(50e3, LEO)


def test_sn_path_loss_frozen():
    params = LinkParams()
    geom = SnLinkGeometry.from_link(replace(params, sn_distance=1.0))
    assert sn_path_loss_db(geom) == pytest.approx(PL_D0_DB, abs=1e-10)
    geom = SnLinkGeometry.from_link(params)
    assert sn_path_loss_db(geom) == pytest.approx(PL_100KM_DB, abs=1e-10)
    assert sn_path_gain(geom) == pytest.approx(10 ** (-PL_100KM_DB / 10), rel=1e-12)


def test_sn_geometry_validation():
    with pytest.raises(ValueError):
        SnLinkGeometry(0.5, 1.0, 0.025, 2.5)


@pytest.mark.parametrize("measure", ["area", "literal"])
@pytest.mark.parametrize("shell", TABLE_SHELLS)
def test_intensity_is_derivative_of_cumulative(shell, measure):
    lo, hi = shell.altitude * 1.01, shell.altitude * 20
    count, _ = quad(lambda d: intensity_measure(d, shell, measure), lo, hi, epsrel=1e-12)
    diff = cumulative_measure(hi, shell, measure) - cumulative_measure(lo, shell, measure)
    assert count == pytest.approx(diff, rel=1e-9)


def test_area_measure_is_disc_count():
    d = 1500e3
    r2 = d * d - LEO.altitude ** 2
    assert cumulative_measure(d, LEO) == pytest.approx(LEO.density * math.pi * r2, rel=1e-14)
    assert cumulative_measure(LEO.altitude, LEO, "literal") == 0.0


def test_unknown_measure():
    with pytest.raises(ValueError, match="measure"):
        intensity_measure(1e6, LEO, "volume")


def test_limits_example():
    win = integration_limits(0.3, 0.1, 0.4, 350e3)
    assert win == pytest.approx((875e3, 1750e3))


def test_limits_floor_and_empty():
    win = integration_limits(0.05, 0.1, 0.28, 350e3, u_floor=0.01)
    assert win.upper == pytest.approx(350e3 / 0.01)
    assert integration_limits(0.5, 0.1, 0.28, 350e3) is None


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.01, 0.3), st.floats(0.05, 0.5), st.floats(2e5, 5e6))
def test_limits_invert_to_u_interval(steer, hw, sat_hw, altitude):
    win = integration_limits(steer, hw, sat_hw, altitude)
    lo = max(steer - hw, -sat_hw, 0.01)
    hi = min(steer + hw, sat_hw, 1.0)
    if hi <= lo:
        assert win is None
    else:
        assert altitude / win.lower == pytest.approx(hi, rel=1e-12)
        assert altitude / win.upper == pytest.approx(lo, rel=1e-12)


def test_slant_range_limits():
    assert slant_range(math.pi / 2, 350e3) == pytest.approx(350e3, rel=1e-12)
    # flat mapping L / sin(el) overestimates at low elevation
    el = math.radians(10)
    assert slant_range(el, 350e3) < 350e3 / math.sin(el)
