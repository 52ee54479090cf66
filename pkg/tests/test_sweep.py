import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ptdiscord import (
    Classification,
    GridSpec,
    PhaseScanTable,
    SystemParams,
    asymptotic_correlations,
    correlation_report,
    correlation_series,
    phase_scan,
    propagate_covariance,
    propagate_mean_field,
    pt_line_profile,
    stationary_covariance,
    threshold_curve,
)
from ptdiscord.sweep import SCHEMA_VERSION


@pytest.mark.parametrize("gain,expected", [(0.5, 0.5), (1.0, 1.0), (2.0, 0.5), (3.0, 1.0 / 3.0)])
def test_threshold_curve(gain, expected):
    assert threshold_curve(gain) == pytest.approx(expected, rel=1e-15)


def test_threshold_curve_scales_with_g():
    assert threshold_curve(4.0, g=2.0) == pytest.approx(1.0)
    assert threshold_curve(1.0, g=2.0) == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_threshold_curve_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        threshold_curve(bad)


def test_grid_spec():
    assert_allclose(GridSpec(3.0, 3).values, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        GridSpec(3.0, 1)
    with pytest.raises(ValueError):
        GridSpec(0.0, 4)


# --- asymptotics -------------------------------------------------------------


def test_exact_phase_decays():
    res = asymptotic_correlations(SystemParams.gain_loss(0.5, 0.5))
    assert res.classification is Classification.DECAYED
    assert max(res.discord_GL_inf, res.discord_LG_inf) < 1e-4


def test_broken_phase_saturates():
    res = asymptotic_correlations(SystemParams.gain_loss(1.5, 1.5))
    assert res.classification is Classification.SATURATED
    assert 0 < res.discord_GL_inf < 1 and 0 < res.discord_LG_inf < 1
    assert res.mutual_info_slope > 0
    assert res.horizon_used <= 200.0


def test_fully_stable_matches_stationary():
    p = SystemParams.gain_loss(0.5, 1.5)
    res = asymptotic_correlations(p)
    rep = correlation_report(stationary_covariance(p))
    assert res.classification is Classification.SATURATED
    assert abs(res.discord_GL_inf - rep.discord_GL) < 1e-6
    assert abs(res.discord_LG_inf - rep.discord_LG) < 1e-6
    # saturated mutual information
    assert abs(res.mutual_info_slope) < 1e-6


def test_pure_loss_decays():
    res = asymptotic_correlations(SystemParams.gain_loss(0.0, 1.0))
    assert res.classification is Classification.DECAYED
    assert max(res.discord_GL_inf, res.discord_LG_inf) < 1e-9


def test_asymptotics_in_units_of_g():
    a = asymptotic_correlations(SystemParams.gain_loss(1.5, 1.5))
    b = asymptotic_correlations(SystemParams.gain_loss(3.0, 3.0, g=2.0))
    assert a.classification is b.classification
    assert a.horizon_used == pytest.approx(b.horizon_used)
    assert_allclose((a.discord_GL_inf, a.discord_LG_inf), (b.discord_GL_inf, b.discord_LG_inf),
                    rtol=1e-9)


def test_tiny_guard_budget_is_undetermined():
    res = asymptotic_correlations(SystemParams.gain_loss(3.0, 3.0), window=60.0,
                                  max_log10_guard=100.0)
    assert res.classification is Classification.UNDETERMINED
    assert "overflow" in res.reason


# --- time series -------------------------------------------------------------


def test_correlation_series_sampling():
    p = SystemParams.gain_loss(0.5, 0.5)
    rows = list(correlation_series(p, 2.0, stride=0.5, psi0=[1.0, 0.5j]))
    assert [t for t, *_ in rows] == [0.0, 0.5, 1.0, 1.5, 2.0]
    t, rep, quad = rows[-1]
    assert_allclose(rep.discord_GL, correlation_report(propagate_covariance(np.eye(4), p, 2.0)).discord_GL,
                    atol=1e-12)
    ref = propagate_mean_field(np.array([1.0, 0.5j]), p, 2.0)
    assert_allclose(quad, ref.quadratures(), rtol=1e-12, atol=1e-14)


def test_correlation_series_starts_uncorrelated():
    _, rep, quad = next(correlation_series(SystemParams.gain_loss(1.5, 1.5), 1.0))
    assert rep.mutual_information == 0.0
    assert np.all(quad == 0.0)


# --- phase scan ----------------------------------------------------------------


@pytest.fixture(scope="module")
def small_scan():
    return phase_scan(GridSpec(1.5, 3), workers=1, t_max=100.0)


def test_small_scan(small_scan):
    tab = small_scan
    assert tab.classification.shape == (3, 3)
    assert set(tab.classification.ravel()) <= {c.value for c in Classification}
    # gain 0.5, loss 1: fully stable, finite discord
    assert tab.stable[0, 1] and tab.classification[0, 1] == "saturated"
    # gain 1, loss 0.5: unstable, below threshold
    assert not tab.stable[1, 0] and tab.classification[1, 0] == "decayed"
    assert list(np.diag(tab.pt_class)) == ["exact", "exceptional_point", "broken"]
    assert tab.pt_class[0, 2] == "not_pt_symmetric"


def test_scan_json_round_trip(small_scan):
    text = small_scan.to_json()
    data = json.loads(text)
    assert data["schema_version"] == SCHEMA_VERSION
    assert {"grid", "settings", "tolerances", "version", "units"} <= set(data["metadata"])
    assert len(data["cells"]) == 9
    assert PhaseScanTable.from_json(text) == small_scan


def test_scan_rejects_unknown_schema(small_scan):
    data = small_scan.to_dict()
    data["schema_version"] = 99
    with pytest.raises(ValueError):
        PhaseScanTable.from_dict(data)


def test_scan_parallel_matches_serial(small_scan):
    par = phase_scan(GridSpec(1.5, 3), workers=2, t_max=100.0)
    assert par == small_scan
    assert par.to_json() == small_scan.to_json()


def test_single_row_scan():
    tab = phase_scan(GridSpec(3.0, 2), workers=1, gains=[0.5], losses=[0.5, 1.5])
    assert tab.classification.shape == (1, 2)
    assert list(tab.classification[0]) == ["decayed", "saturated"]


# --- PT line ---------------------------------------------------------------------


def test_pt_line_profile_exact_phase_vanishes():
    prof = pt_line_profile([0.5])
    assert prof.shape == (1, 3)
    assert prof[0, 0] == 0.5
    assert_allclose(prof[0, 1:], 0.0, atol=1e-4)


def test_pt_line_profile_rejects_nonpositive():
    with pytest.raises(ValueError):
        pt_line_profile([0.0])
