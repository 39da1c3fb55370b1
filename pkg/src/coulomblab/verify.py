"""Quick property checks run by the ``verify`` experiment.

Each check returns ``(property, value, tolerance, passed)``.  Together they
take well under a minute on one core.
"""

from __future__ import annotations

import math

import numpy as np

from . import bargmann, discrepancy, gas, geometry, kernel, operators, potential
from .geometry import Cut, Disk, Polygon, Rect
from .kernel import Erfc, FiniteN, Ginibre
from .potential import GINIBRE


def _le(prop, value, tol):
    return prop, float(value), tol, bool(value <= tol)


def _pad(a, b):
    m = max(len(a), len(b))
    A, B = np.zeros(m), np.zeros(m)
    A[:len(a)], B[:len(b)] = a, b
    return A, B


def window_areas():
    err = max(abs(Disk(0j, 1).area() - math.pi), abs(Rect(0j, 2, 3).area() - 6),
              abs(Cut(Disk(0j, 1), 0.0, 0.0).area() - math.pi / 2))
    return _le("exact areas of disk, rectangle and half disk", err, 1e-12)


def window_perimeters():
    tri = Polygon((0j, 3 + 0j, 4j))
    err = max(abs(tri.perimeter() - 12), abs(Cut(Disk(0j, 1), 0.0, 0.0).perimeter() - (2 * math.pi + 2)))
    return _le("triangle and cut-disk perimeters", err, 1e-12)


def isoperimetric():
    wins = [Disk(0j, 1.3), Rect(0j, 1, 5), Polygon((0j, 3 + 0j, 4j)), Cut(Disk(0j, 2), 0.4, 0.5)]
    worst = min(w.perimeter() ** 2 - 4 * math.pi * w.area() for w in wins)
    return _le("perimeter^2 >= 4 pi area (negated margin)", -worst, 1e-9)


def kappa_segment():
    E = [np.linspace(0, 2, 201).astype(complex)]
    return _le("regularity constant of a segment equals 1", abs(geometry.regularity_kappa(E, 1.0) - 1), 0.05)


def quadrature_square():
    g = geometry.quadrature(Rect(0j, 1, 1), 0.1)
    return _le("cell-centre rule on the unit square sums to 1/pi", abs(g.total_weight - 1 / math.pi), 1e-12)


def droplet_mass():
    pot = potential.RadialPotential(2.0)
    err = max(abs(pot.droplet_radius() - 2 ** -0.25),
              abs(potential.equilibrium_mass(GINIBRE, Disk(0j, 0.5)) - 0.25),
              abs(potential.equilibrium_mass(pot, Disk(0j, 2.0)) - 1.0))
    return _le("droplet radius and equilibrium masses", err, 1e-3)


def erfc_value():
    return _le("F(1) against the normal tail", abs(kernel.erfc_F(1.0) - 0.158655253931457), 1e-10)


def finite_kernel_origin():
    return _le("K_1024(0, 0) = 1024", abs(FiniteN(1024).diagonal(np.array([0j]))[0] - 1024), 1e-8)


def diagonal_bulk():
    z = 0.8 * np.exp(2j * math.pi * np.arange(16) / 16)
    return _le("|K_n(z,z) - n dQ(z)| at |z| = 0.8, n = 1024", float(np.max(kernel.diag_check(GINIBRE, z, 1024))), 1e-6)


def boundary_modulus():
    v = kernel.rescaled_modulus(GINIBRE, 1.0, 4096, 1.0, 0j, 0j)
    return _le("rescaled boundary kernel at the origin vs 1/2", abs(float(v) - 0.5), 0.02)


def disk_oracle():
    worst, count = 0.0, None
    for R in (1.0, 2.0, 3.0):
        spec = operators.spectrum(operators.build(Ginibre(), Disk(0j, R), 0.1))
        exact = operators.disk_eigenvalues(R)
        a, b = _pad(spec.eigenvalues, exact)
        keep = (a > 0.01) | (b > 0.01)
        worst = max(worst, float(np.max(np.abs(a - b)[keep])))
        if R == 3.0:
            count = operators.counting(spec, 0.5)
    return "disk eigenvalues vs P(k+1, R^2); count(1/2) at R=3 is 9", worst, 0.01, bool(worst <= 0.01 and count == 9)


def erfc_trace():
    op = operators.build(Erfc(0.0), Disk(0j, 1), 0.05)
    return _le("erfc(l=0) trace on the unit disk vs 1/2", abs(op.trace() - 0.5), 0.02)


def translation_covariance():
    W = Cut(Disk(0j, 2), 0.7, 1.0)
    worst = 0.0
    for l in (-1.0, 0.5, 2.0):
        a = operators.spectrum(operators.build(Erfc(l), W, 0.1)).eigenvalues
        b = operators.spectrum(operators.build(Erfc(0.0), W.translated(-l), 0.1)).eigenvalues
        A, B = _pad(a, b)
        worst = max(worst, float(np.max(np.abs(A - B))))
    return _le("erfc(l) on W vs erfc(0) on W - l", worst, 0.01)


def compression():
    W = Disk(0.3 + 0.2j, 2.0)
    g = operators.spectrum(operators.build(Ginibre(), W, 0.1)).eigenvalues
    worst = -1.0
    for l in (-1.0, 0.5, 2.0):
        e = operators.spectrum(operators.build(Erfc(l), W, 0.1)).eigenvalues
        E, G = _pad(e, g)
        worst = max(worst, float(np.max(E - G)))
    return _le("erfc eigenvalues dominated by Ginibre eigenvalues", worst, 0.01)


def lower_counting():
    worst = -math.inf
    for a in (0.0, 1.0):
        W = Disk(complex(a - 2.0), 2.0)
        s0 = operators.spectrum(operators.build(Erfc(0.0), W, 0.1))
        sg = operators.spectrum(operators.build(Ginibre(), W, 0.1))
        ratio = kernel.erfc_F(2 * a).real / (4 * kernel.erfc_F(-2 * a).real)
        for alpha in (0.1, 0.3):
            gap = operators.counting(sg, 1 - ratio * alpha ** 2) - 1 - operators.counting(s0, 1 - alpha)
            worst = max(worst, gap)
    return _le("Ginibre count at the sharpened threshold minus erfc count (minus slack 1)", worst, 0)


def counting_bound_constant():
    C, _ = operators.fit_constant([Ginibre(), Erfc(0.0)], [Disk(0j, 2.0), Disk(0j, 3.0)])
    return _le("counting-bound constant fitted on disks of radius 2, 3", C, 10.0)


def halfline_diagonal():
    G = bargmann.halfline_gram(bargmann.HermiteBasis(8), 0.0)
    return _le("half-line Gram diagonal at l=0 vs 1/2", float(np.max(np.abs(np.diag(G) - 0.5))), 1e-8)


def lemcd():
    return _le("direct erfc matrix vs half-line Gram, m=8, l=0", bargmann.lemcd_residual(8, 0.0), 1e-3)


def bargmann_ground():
    z = np.array([0.3 + 0.4j, -1.1 + 0.2j, 0.7j])
    Bpsi = bargmann.bargmann_transform(lambda t: bargmann.hermite_functions(1, t)[0], z)
    return _le("B psi_0 = e_0", float(np.max(np.abs(Bpsi - bargmann.FockBasis(1)(z)[:, 0]))), 1e-10)


def hamiltonian_pairs():
    err = max(abs(gas.hamiltonian(gas.Configuration(np.array([0j, 1 + 0j])), GINIBRE) - 2),
              abs(gas.hamiltonian(gas.Configuration(np.array([-0.5 + 0j, 0.5 + 0j])), GINIBRE) - 1))
    return _le("two-point Hamiltonian oracles", err, 1e-12)


def fekete_pair():
    cfg = gas.fekete(2, GINIBRE, tol=1e-10)
    err = max(abs(abs(cfg.points[0] - cfg.points[1]) - 1), abs(cfg.meta["H"] - 1) * 100)
    return _le("Fekete pair distance 1 (and energy 1, scaled by 100)", err, 1e-6)


def gradient_fd():
    rng = np.random.default_rng(5)
    z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    g = gas.gradient(z, GINIBRE)
    eps = 1e-6
    fd = np.zeros(5, complex)
    for j in range(5):
        for unit in (1, 1j):
            zp, zm = z.copy(), z.copy()
            zp[j] += eps * unit
            zm[j] -= eps * unit
            d = (gas.hamiltonian(zp, GINIBRE) - gas.hamiltonian(zm, GINIBRE)) / (2 * eps)
            fd[j] += d * unit
    return _le("gradient vs central differences (relative)", float(np.max(np.abs(g - fd)) / np.max(np.abs(g))), 1e-6)


def reproducing_identity():
    rng = np.random.default_rng(3)
    cfg = gas.Configuration(rng.standard_normal(8) * 0.5 + 1j * rng.standard_normal(8) * 0.5)
    worst = max(gas.reproducing_identity_residual(cfg, GINIBRE, complex(*rng.uniform(-1.4, 1.4, 2)),
                                                  complex(*rng.uniform(-1.4, 1.4, 2))) for _ in range(5))
    return _le("K_n(z,w) = sum_j l_j(z) K_n(z_j, w) at n = 8", worst, 1e-8)


def expected_counts():
    err = max(abs(discrepancy.expected_count(GINIBRE, 0j, Disk(0j, 2), 100) - 4),
              abs(discrepancy.expected_count(GINIBRE, 1 + 0j, Disk(0j, 2), 100, "boundary_limit", 0.0, 0.0) - 2))
    return _le("expected counts in the finite and boundary-limit forms", err, 1e-9)


def sandwich():
    cfg = gas.fekete(64, GINIBRE)
    rep = discrepancy.landau_sandwich(cfg, GINIBRE, 1 + 0j, Disk(0j, 3.0), 64, 0.3, 10.0)
    ok = rep.holds and rep.nested
    return "window counts bracket the spectral counts (n=64, gamma=0.3, C=10)", float(ok), 1.0, bool(ok)


CHECKS = {f.__name__: f for f in [
    window_areas, window_perimeters, isoperimetric, kappa_segment, quadrature_square, droplet_mass, erfc_value,
    finite_kernel_origin, diagonal_bulk, boundary_modulus, disk_oracle, erfc_trace, translation_covariance,
    compression, lower_counting, counting_bound_constant, halfline_diagonal, lemcd, bargmann_ground,
    hamiltonian_pairs, fekete_pair, gradient_fd, reproducing_identity, expected_counts, sandwich,
]}
