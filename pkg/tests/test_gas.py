import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from coulomblab.errors import DomainError
from coulomblab.gas import (Configuration, SamplerConfig, fekete, gradient, hamiltonian, interpolation_constant,
                            lagrange_abs_max, lagrange_log, max_exterior_distance, metropolis, min_separation,
                            reproducing_identity_residual, sample, sampling_inequality_ratio, submean_ratio)
from coulomblab.kernel import weighted_basis
from coulomblab.potential import GINIBRE, RadialPotential


@pytest.fixture(scope="module")
def fekete32():
    return fekete(32, GINIBRE)


def test_configuration_invariants():
    with pytest.raises(DomainError):
        Configuration(np.array([0j, 0j]))
    with pytest.raises(DomainError):
        Configuration(np.array([0j, complex(np.nan, 0)]))
    cfg = Configuration(np.array([0.1 + 0.2j, -0.3j]), {"seed": 3})
    back = Configuration.from_csv(cfg.to_csv())
    assert np.array_equal(back.points, cfg.points)
    assert '"seed": 3' in cfg.sidecar()


def test_sampler_config_validation():
    with pytest.raises(DomainError):
        SamplerConfig(c=0.0)
    with pytest.raises(DomainError):
        SamplerConfig(sweeps=10, burn_in=20)


def test_hamiltonian_examples():
    assert hamiltonian(Configuration(np.array([0j, 1 + 0j])), GINIBRE) == pytest.approx(2, abs=1e-14)
    assert hamiltonian(Configuration(np.array([-0.5 + 0j, 0.5 + 0j])), GINIBRE) == pytest.approx(1, abs=1e-14)
    assert hamiltonian(np.array([0j, 0j]), GINIBRE) == math.inf


def test_far_point_dominated_by_confinement():
    pts = np.array([0.1 + 0.2j, -0.3 + 0j, 0.25j])
    far = np.append(pts, 10 + 0j)
    gain = hamiltonian(far, GINIBRE) - hamiltonian(pts, GINIBRE)
    # n grows from 3 to 4: the new point pays 4 Q(10) and every old point one more Q
    confinement = 4 * 100 + float(np.sum(np.abs(pts) ** 2))
    assert gain == pytest.approx(confinement, rel=0.05)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 2 * math.pi), st.floats(1.0, 3.0))
def test_hamiltonian_permutation_and_rotation_invariant(seed, angle, p):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=7) + 1j * rng.normal(size=7)
    pot = RadialPotential(p)
    H = hamiltonian(pts, pot)
    assert hamiltonian(rng.permutation(pts), pot) == pytest.approx(H, rel=1e-12)
    assert hamiltonian(pts * np.exp(1j * angle), pot) == pytest.approx(H, rel=1e-12)


def test_gradient_examples():
    assert np.max(np.abs(gradient(np.array([-0.5 + 0j, 0.5 + 0j]), GINIBRE))) <= 1e-14
    z = 0.3 - 0.7j
    assert gradient(np.array([z]), GINIBRE)[0] == pytest.approx(2 * z, abs=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=5) + 1j * rng.normal(size=5)
    pot = RadialPotential(1.0 + 0.5 * seed)
    g = gradient(z, pot)
    eps = 1e-6
    fd = np.zeros(5, complex)
    for j in range(5):
        for unit in (1, 1j):
            zp, zm = z.copy(), z.copy()
            zp[j] += eps * unit
            zm[j] -= eps * unit
            fd[j] += unit * (hamiltonian(zp, pot) - hamiltonian(zm, pot)) / (2 * eps)
    assert np.max(np.abs(g - fd)) <= 1e-6 * np.max(np.abs(g))


def test_fekete_pair():
    cfg = fekete(2, GINIBRE, tol=1e-10)
    assert abs(cfg.points[0] - cfg.points[1]) == pytest.approx(1, abs=1e-6)
    assert cfg.meta["H"] == pytest.approx(1, abs=1e-8)


def test_fekete_single_point():
    cfg = fekete(1, GINIBRE)
    assert cfg.points[0] == 0 and cfg.meta["H"] == 0


def test_fekete_stationary_and_descending():
    hist = []
    cfg = fekete(24, RadialPotential(1.5), tol=1e-8, history=hist)
    assert np.max(np.abs(gradient(cfg, RadialPotential(1.5)))) <= 1e-8 * 24
    assert all(b <= a + 1e-9 * abs(a) for a, b in zip(hist, hist[1:]))


def test_detailed_balance_two_point_oracle():
    n = 2
    beta = 2 * math.log(2)
    res = metropolis(np.array([0.3 + 0j, -0.4 + 0.1j]), GINIBRE, beta, 0.8, 40_000, seed=11,
                     adapt_sweeps=500, record=lambda p: abs(p[0] - p[1]) ** 2)
    r2 = np.array(res.trace)[::10]
    D = stats.kstest(r2, stats.gamma(a=beta + 1, scale=1 / beta).cdf).statistic
    assert D <= 0.05


def test_cold_chain_finds_fekete_pair():
    res = metropolis(np.array([0.9 + 0j, -0.1 + 0.3j]), GINIBRE, 5000.0, 0.05, 4000, seed=2, adapt_sweeps=2000)
    assert abs(res.points[0] - res.points[1]) == pytest.approx(1.0, abs=0.05)


def test_sampler_is_deterministic():
    sc = SamplerConfig(c=2.0, sweeps=60, burn_in=30, seed=9)
    a = sample(64, GINIBRE, sc)
    b = sample(64, GINIBRE, sc)
    assert np.array_equal(a.points, b.points)
    c = sample(64, GINIBRE, SamplerConfig(c=2.0, sweeps=60, burn_in=30, seed=10))
    assert not np.array_equal(a.points, c.points)


def test_sampler_needs_two_points():
    with pytest.raises(DomainError):
        sample(1, GINIBRE, SamplerConfig())


@pytest.mark.parametrize("seed", range(5))
def test_sample_separation_and_containment(seed):
    n = 256
    cfg = sample(n, GINIBRE, SamplerConfig(c=2.0, sweeps=400, burn_in=200, seed=seed))
    assert math.sqrt(n) * min_separation(cfg) >= 0.2
    assert math.sqrt(n) * max_exterior_distance(cfg, GINIBRE) <= 6
    assert 0.1 <= cfg.meta["acceptance"] <= 0.9


def test_lagrange_examples(fekete32):
    lm, ph = lagrange_log(fekete32, GINIBRE, 3, fekete32.points[3])
    assert lm == pytest.approx(0, abs=1e-12) and ph == pytest.approx(1, abs=1e-12)
    lm, _ = lagrange_log(fekete32, GINIBRE, 3, fekete32.points[5])
    assert lm == -math.inf


def test_lagrange_bounded_at_fekete(fekete32):
    assert lagrange_abs_max(fekete32, GINIBRE) <= 10


def test_reproducing_identity():
    rng = np.random.default_rng(4)
    cfg = Configuration(0.6 * (rng.normal(size=8) + 1j * rng.normal(size=8)))
    for _ in range(5):
        z, w = (complex(*rng.uniform(-1.4, 1.4, 2)) for _ in range(2))
        assert reproducing_identity_residual(cfg, GINIBRE, z, w) <= 1e-8
    assert reproducing_identity_residual(cfg, GINIBRE, cfg.points[2], 0.3j) <= 1e-12
    one = Configuration(np.array([0.2 - 0.1j]))
    assert reproducing_identity_residual(one, GINIBRE, 0.5 + 0.5j, -0.3j) <= 1e-10
    with pytest.raises(DomainError):
        reproducing_identity_residual(fekete(65, GINIBRE, tol=1e-3), GINIBRE, 0j, 0j)


def test_submean_ratio():
    assert submean_ratio(GINIBRE, 64, 0.1 + 0.2j, 1.0) <= 10
    c = np.zeros((1, 16), complex)
    c[0, 0] = 1.0
    a = submean_ratio(GINIBRE, 16, 0j, 1.0, coefficients=c)
    assert math.isfinite(a) and a == submean_ratio(GINIBRE, 16, 0j, 1.0, coefficients=c)
    rng = np.random.default_rng(0)
    c = rng.normal(size=(3, 16)) + 1j * rng.normal(size=(3, 16))
    assert submean_ratio(GINIBRE, 16, 0.3j, 1.0, coefficients=c) == pytest.approx(
        submean_ratio(GINIBRE, 16, 0.3j, 1.0, coefficients=(2 - 3j) * c), rel=1e-12)


def test_sampling_inequality(fekete32):
    assert sampling_inequality_ratio(fekete32, GINIBRE, 0.5) <= 50
    c = np.zeros((1, 16), complex)
    c[0, 0] = 1.0
    phi0 = weighted_basis(GINIBRE, 32, fekete32.points, 1)[:, 0]
    bound = 1.0 / (np.sum(np.abs(phi0) ** 2) / 32)
    assert sampling_inequality_ratio(fekete32, GINIBRE, 0.5, coefficients=c) <= bound * (1 + 1e-12)
    rng = np.random.default_rng(1)
    c = rng.normal(size=(2, 16)) + 0j
    assert sampling_inequality_ratio(fekete32, GINIBRE, 0.5, coefficients=c) == pytest.approx(
        sampling_inequality_ratio(fekete32, GINIBRE, 0.5, coefficients=7 * c), rel=1e-12)
    with pytest.raises(DomainError):
        sampling_inequality_ratio(fekete32, GINIBRE, 1.2)


def test_interpolation_constant():
    assert interpolation_constant(fekete(16, GINIBRE), GINIBRE, 1.5) <= 100
    with pytest.raises(DomainError):
        interpolation_constant(fekete(4, GINIBRE), GINIBRE, 0.9)
