import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coulomblab.errors import DomainError
from coulomblab.geometry import Cut, Disk, Rect, quadrature
from coulomblab.potential import GINIBRE, RadialPotential, equilibrium_mass, micro_frame, signed_distance


def test_droplet_radius():
    assert GINIBRE.droplet_radius() == 1.0
    assert RadialPotential(2.0).droplet_radius() == pytest.approx(0.840896415253715, abs=1e-12)
    with pytest.raises(DomainError):
        RadialPotential(0.4).droplet_radius()


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_droplet_mass_by_quadrature(p):
    pot = RadialPotential(p)
    g = quadrature(pot.droplet, 0.002)
    assert float(np.sum(pot.laplacian(g.nodes)) * g.weight) == pytest.approx(1.0, abs=1e-3)


def test_equilibrium_mass_examples():
    assert equilibrium_mass(GINIBRE, Disk(0j, 0.5)) == pytest.approx(0.25, abs=1e-3)
    assert equilibrium_mass(GINIBRE, Disk(0j, 2)) == pytest.approx(1.0, abs=1e-3)
    for theta in (0.0, 1.1, 4.0):
        assert equilibrium_mass(GINIBRE, Cut(Disk(0j, 1), theta, 0.0)) == pytest.approx(0.5, abs=1e-3)


def test_equilibrium_mass_radial_p2():
    pot = RadialPotential(2.0)
    assert equilibrium_mass(pot, Disk(0j, 0.5)) == pytest.approx(2 * 0.5 ** 4, abs=1e-6)


def test_equilibrium_mass_additive_and_monotone():
    pot = RadialPotential(1.5)
    left = Cut(Disk(0.1j, 0.6), 0.0, 0.2)
    right = Cut(Disk(0.1j, 0.6), math.pi, -0.2)
    whole = equilibrium_mass(pot, Disk(0.1j, 0.6))
    assert equilibrium_mass(pot, left) + equilibrium_mass(pot, right) == pytest.approx(whole, abs=1e-6)
    assert equilibrium_mass(pot, Disk(0.1j, 0.3)) <= whole


def test_signed_distance():
    assert signed_distance(GINIBRE, 0.5) == 0.5
    assert signed_distance(GINIBRE, 2 * np.exp(1j * math.pi / 3)) == pytest.approx(-1)
    assert signed_distance(GINIBRE, np.exp(0.3j)) == pytest.approx(0, abs=1e-15)


def test_micro_frame():
    n = 10_000
    f = micro_frame(GINIBRE, 1 - 3 / math.sqrt(n), n)
    assert f.theta == 0 and f.l == pytest.approx(3)
    f = micro_frame(GINIBRE, 1j * (1 + 2 / math.sqrt(n)), n)
    assert f.theta == pytest.approx(math.pi / 2) and f.l == pytest.approx(-2)
    assert micro_frame(GINIBRE, 0.5, 10 ** 6).bulk
    with pytest.raises(DomainError):
        micro_frame(GINIBRE, 0j, 100)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 3), st.floats(0.1, 2), st.floats(0, 2 * math.pi))
def test_laplacian_and_gradient_vs_finite_differences(p, r, phi):
    pot = RadialPotential(p)
    z = r * complex(math.cos(phi), math.sin(phi))
    e = 1e-4 * r
    Q = lambda w: float(pot.Q(w))
    lap = (Q(z + e) + Q(z - e) + Q(z + 1j * e) + Q(z - 1j * e) - 4 * Q(z)) / (4 * e * e)
    assert lap == pytest.approx(float(pot.laplacian(z)), rel=1e-6)
    gx = (Q(z + e) - Q(z - e)) / (2 * e)
    gy = (Q(z + 1j * e) - Q(z - 1j * e)) / (2 * e)
    assert abs(complex(gx, gy) - complex(pot.grad(z))) <= 1e-6 * abs(complex(pot.grad(z)))


def test_serialisation():
    from coulomblab.potential import potential_from_dict
    assert potential_from_dict(RadialPotential(1.5).to_dict()) == RadialPotential(1.5)
    with pytest.raises(DomainError):
        potential_from_dict({"family": "general"})
