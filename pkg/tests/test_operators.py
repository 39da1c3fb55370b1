import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coulomblab.errors import DomainError, ResourceError
from coulomblab.geometry import Cut, Disk, Rect
from coulomblab.kernel import Erfc, FiniteN, Ginibre, erfc_F
from coulomblab.operators import (BoundParams, Spectrum, bound_params, build, counting, disk_eigenvalues,
                                  fit_constant, h_factor, normalized_deviation, pfad_rhs, plunge_count,
                                  refined_spectrum, required_constant, spectrum, two_moment_plunge_bound,
                                  window_reach)

# P(k+1, R^2), k = 0, 1, 2, from mpmath
GAMMA_ORACLE = {
    1.0: [0.632120558828558, 0.264241117657115, 0.0803013970713942],
    2.0: [0.981684361111266, 0.908421805556329, 0.761896694446456],
    3.0: [0.999876590195913, 0.998765901959133, 0.993767804893623],
}


def spec_of(kernel, W, h=0.1, **kw):
    return spectrum(build(kernel, W, h), **kw)


def padded(a, b):
    m = max(len(a), len(b))
    A, B = np.zeros(m), np.zeros(m)
    A[:len(a)], B[:len(b)] = a, b
    return A, B


def test_closed_form_oracle():
    for R, ref in GAMMA_ORACLE.items():
        assert np.allclose(disk_eigenvalues(R)[:3], ref, atol=1e-14)


def test_ginibre_trace_on_unit_disk():
    assert build(Ginibre(), Disk(0j, 1), 0.05).trace() == pytest.approx(1.0, abs=0.02)


def test_erfc_trace_on_unit_disk():
    assert build(Erfc(0.0), Disk(0j, 1), 0.05).trace() == pytest.approx(0.5, abs=0.02)


def test_empty_window():
    op = build(Ginibre(), Cut(Disk(0j, 1), 0.0, -5.0), 0.1)
    assert op.size == 0
    assert len(spectrum(op)) == 0


@pytest.mark.parametrize("R", [1.0, 2.0, 3.0])
def test_disk_spectrum_matches_incomplete_gamma(R):
    s = spec_of(Ginibre(), Disk(0j, R))
    a, b = padded(s.eigenvalues, disk_eigenvalues(R))
    keep = (a > 0.01) | (b > 0.01)
    assert np.max(np.abs(a - b)[keep]) <= 0.01
    assert s.eigenvalues[:2] == pytest.approx(GAMMA_ORACLE[R][:2], abs=0.01)


def test_counting_examples():
    s = spec_of(Ginibre(), Disk(0j, 3))
    assert counting(s, 0.5) == 9
    assert counting(s, s.eigenvalues[0] - 1e-9) >= 1
    assert counting(Spectrum.from_raw(np.zeros(5)), 0.5) == 0


def test_spectrum_type_invariants():
    s = spec_of(Ginibre(), Disk(0.2j, 2.5))
    assert np.all(np.diff(s.eigenvalues) <= 0)
    assert np.all((s.eigenvalues >= 0) & (s.eigenvalues <= 1))
    assert s.trace == pytest.approx(float(np.sum(s.eigenvalues)), rel=1e-12)
    assert s.hs_sq <= s.trace
    assert s.excursion <= 0.02


def test_eigen_routes_agree():
    op = build(Ginibre(), Disk(0j, 2.0), 0.1)
    a = spectrum(op, method="dense").eigenvalues
    b = spectrum(op, method="lowrank").eigenvalues
    A, B = padded(a, b)
    assert np.max(np.abs(A - B)) <= 1e-8
    fop = build(FiniteN(40), Disk(0.9 + 0j, 0.3), 0.01)
    c = spectrum(fop, method="factor").eigenvalues
    d = spectrum(fop, method="dense").eigenvalues
    C, D = padded(c, d)
    assert np.max(np.abs(C - D)) <= 1e-8
    with pytest.raises(DomainError):
        spectrum(op, method="jacobi")


def test_dense_cap():
    op = build(Ginibre(), Disk(0j, 3), 0.1, dense_cap=100)
    with pytest.raises(ResourceError):
        op.matrix


def test_two_moment_bound():
    s = spec_of(Ginibre(), Disk(0j, 3))
    assert plunge_count(s, 0.1) <= two_moment_plunge_bound(s, 0.1)
    proj = Spectrum.from_raw(np.array([1.0, 1.0, 0.0]))
    assert plunge_count(proj, 0.2) == 0 and two_moment_plunge_bound(proj, 0.2) >= 0
    assert two_moment_plunge_bound(s, 0.5) == math.ceil(4 * (s.trace - s.hs_sq) - 1e-9)


def test_h_factor():
    assert h_factor(1.0) == 1.0
    assert h_factor(3.0) == pytest.approx(9 * math.log(3), abs=1e-12)
    assert h_factor(3.0) == pytest.approx(9.8875, abs=1e-4)


def test_pfad_rhs_gap_grows_as_alpha_shrinks():
    W = Disk(0j, 3)
    params = bound_params(W, 1.0)
    gaps = [pfad_rhs(W, a, 0.0, params) - pfad_rhs(W, a, 0.0, params, "lower") for a in (0.3, 0.1, 0.03, 0.01)]
    assert all(x < y for x, y in zip(gaps, gaps[1:]))
    with pytest.raises(DomainError):
        pfad_rhs(W, 0.6, 0.0, params)
    with pytest.raises(DomainError):
        pfad_rhs(W, 0.1, 0.0, params, "middle")


WINDOWS = [Disk(0.3 + 0.2j, 2.0), Cut(Disk(0j, 2.5), 0.6, 0.8), Cut(Disk(0.5j, 2.0), 2.5, 0.0)]


@pytest.mark.parametrize("W", WINDOWS)
def test_compression_domination(W):
    g = spec_of(Ginibre(), W).eigenvalues
    for l in (-1.0, 0.5, 2.0):
        e = spec_of(Erfc(l), W).eigenvalues
        E, G = padded(e, g)
        assert np.all(E <= G + 0.01)


@pytest.mark.parametrize("l", [-1.0, 0.5, 2.0, 0.37])
def test_translation_covariance(l):
    # 0.37 is not a lattice multiple, so the two grids really differ
    W = Cut(Disk(0j, 2), 0.7, 1.0)
    a = spec_of(Erfc(l), W).eigenvalues
    b = spec_of(Erfc(0.0), W.translated(-l)).eigenvalues
    A, B = padded(a, b)
    assert np.max(np.abs(A - B)) <= 0.01


@pytest.mark.parametrize("a", [0.0, 1.0])
def test_lower_bound_counting(a):
    W = Disk(complex(a - 2.0), 2.0)
    s0 = spec_of(Erfc(0.0), W)
    sg = spec_of(Ginibre(), W)
    ratio = erfc_F(2 * a).real / (4 * erfc_F(-2 * a).real)
    for alpha in (0.1, 0.3):
        assert counting(s0, 1 - alpha) >= counting(sg, 1 - ratio * alpha ** 2) - 1


def test_window_reach():
    assert window_reach(Erfc(0.5), Disk(1 + 0j, 1.0)) == pytest.approx(1.5)
    assert window_reach(Ginibre(), Disk(0j, 1.0)) == -math.inf


def test_refined_spectrum_is_accepted_on_disks():
    rs = refined_spectrum(Ginibre(), Disk(0j, 2.0))
    assert rs.accepted and rs.max_shift < 0.01 and rs.checked == 8


def test_fitted_constant_small_family():
    C, rows = fit_constant([Ginibre(), Erfc(0.0)], [Disk(0j, 2.0), Disk(0j, 3.0)])
    assert 0 < C <= 10
    assert len(rows) == 16
    for r in rows:
        assert r["required"] <= C


def test_required_constant_makes_bounds_hold():
    W = Cut(Disk(0j, 3.0), 0.0, 1.0)
    s = spec_of(Erfc(0.0), W)
    p1 = bound_params(W, 1.0)
    a = window_reach(Erfc(0.0), W)
    for alpha in (0.3, 0.03):
        c = required_constant(s, W, alpha, a, p1)
        p = BoundParams(max(c, 1e-9) * (1 + 1e-9), p1.eta, p1.kappa)
        assert counting(s, alpha) <= pfad_rhs(W, alpha, a, p) + 1e-9
        assert counting(s, 1 - alpha) >= pfad_rhs(W, alpha, a, p, "lower") - 1e-9


def test_normalized_deviation_non_negative():
    W = Disk(0j, 3.0)
    s = spec_of(Ginibre(), W)
    assert normalized_deviation(s, W, 0.1, bound_params(W, 1.0)) >= 0


@settings(max_examples=10, deadline=None)
@given(st.floats(0.5, 2.5))
def test_trace_equals_scaled_area_for_ginibre(R):
    assert build(Ginibre(), Disk(0j, R), 0.05).trace() == pytest.approx(R * R, rel=0.03)


def test_normalized_deviation_shortfall_uses_reach_penalty():
    W = Disk(0j, 4.0)
    s = spectrum(build(Erfc(0.0), W, 0.1))
    params = bound_params(W, 1.0)
    plain = normalized_deviation(s, W, 0.1, params)
    penalised = normalized_deviation(s, W, 0.1, params, a=4.0)
    assert penalised == pytest.approx(plain / h_factor(4.0))
