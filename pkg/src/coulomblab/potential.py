"""Radial external potentials ``Q(z) = |z|^{2p}`` and their droplets.

The Laplacian convention is ``Δ = (∂xx + ∂yy)/4`` and the area element is
``dA = dx dy / pi``, so the equilibrium measure of a radial potential is
``ΔQ dA`` restricted to the droplet disk of radius ``p^{-1/(2p)}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError
from .geometry import Disk, Window

__all__ = ["Potential", "RadialPotential", "GINIBRE", "MicroFrame", "micro_frame",
           "droplet_radius", "equilibrium_mass", "signed_distance", "potential_from_dict",
           "BULK_THRESHOLD"]

BULK_THRESHOLD = 50.0


class Potential:
    """Interface for external potentials.

    Only radial potentials are implemented; non-radial droplets would need an
    obstacle-problem solver.
    """

    def Q(self, z):
        raise NotImplementedError("general potentials are not implemented")

    def grad(self, z):
        raise NotImplementedError("general potentials are not implemented")

    def laplacian(self, z):
        raise NotImplementedError("general potentials are not implemented")

    def droplet_radius(self) -> float:
        raise NotImplementedError("general potentials are not implemented")


@dataclass(frozen=True)
class RadialPotential(Potential):
    p: float = 1.0

    def __post_init__(self):
        if not (self.p > 0 and math.isfinite(self.p)):
            raise DomainError(f"exponent p must be positive, got {self.p}")

    def Q(self, z):
        return np.abs(z) ** (2 * self.p)

    def logQ_radial(self, r):
        return 2 * self.p * np.log(r)

    def grad(self, z):
        """Gradient as a complex number ``∂x Q + i ∂y Q``."""
        z = np.asarray(z, dtype=complex)
        return 2 * self.p * np.abs(z) ** (2 * self.p - 2) * z

    def laplacian(self, z):
        """``ΔQ = p^2 |z|^{2p-2}`` with the quarter-Laplacian."""
        return self.p ** 2 * np.abs(np.asarray(z)) ** (2 * self.p - 2)

    def droplet_radius(self) -> float:
        if self.p < 0.5:
            raise DomainError("droplet radius needs p >= 1/2")
        return self.p ** (-1.0 / (2 * self.p))

    @property
    def droplet(self) -> Disk:
        return Disk(0j, self.droplet_radius())

    def mass_in_ball(self, r):
        """``μ(B_r(0)) = p r^{2p}`` capped at one."""
        r = np.minimum(np.asarray(r, dtype=float), self.droplet_radius())
        return self.p * r ** (2 * self.p)

    def to_dict(self) -> dict:
        return {"family": "radial", "p": float(self.p)}


GINIBRE = RadialPotential(1.0)


def potential_from_dict(d: dict) -> RadialPotential:
    if d.get("family") != "radial":
        raise DomainError(f"unsupported potential family {d.get('family')!r}")
    return RadialPotential(float(d["p"]))


def droplet_radius(pot: RadialPotential) -> float:
    return pot.droplet_radius()


def equilibrium_mass(pot: RadialPotential, W: Window) -> float:
    """``μ(W) = ∫_{W∩S} ΔQ dA``.

    Uses the radial layer-cake form ``∫_0^R ΔQ(r) dA(W ∩ B_r)/dr dr``, which
    after integrating by parts reads
    ``ΔQ(R) A(R)/π - ∫_0^R (ΔQ)'(r) A(r)/π dr`` with ``A(r) = |W ∩ B_r|``.
    Intersection areas are exact, so only a 1-D quadrature remains.
    """
    R = pot.droplet_radius()
    A = lambda r: W.disk_intersection_area(0j, r) if r > 0 else 0.0
    total = pot.p ** 2 * R ** (2 * pot.p - 2) * A(R) / math.pi
    if pot.p != 1.0:
        dlap = lambda r: pot.p ** 2 * (2 * pot.p - 2) * r ** (2 * pot.p - 3)
        val, _ = integrate.quad(lambda r: dlap(r) * A(r) / math.pi, 0.0, R, limit=200, epsabs=1e-10)
        total -= val
    return float(min(max(total, 0.0), 1.0))


def signed_distance(pot: RadialPotential, z):
    """Positive inside the droplet, negative outside: ``R - |z|``."""
    d = pot.droplet_radius() - np.abs(z)
    return float(d) if np.ndim(d) == 0 else d


@dataclass(frozen=True)
class MicroFrame:
    """Outer normal direction ``theta`` and microscopic position ``l`` (``inf`` in the bulk)."""

    theta: float
    l: float

    @property
    def bulk(self) -> bool:
        return math.isinf(self.l)


def micro_frame(pot: RadialPotential, p_n: complex, n: int, bulk_threshold: float = BULK_THRESHOLD) -> MicroFrame:
    p_n = complex(p_n)
    l = math.sqrt(n) * signed_distance(pot, p_n)
    if l >= bulk_threshold:
        theta = math.atan2(p_n.imag, p_n.real) % (2 * math.pi) if p_n != 0 else 0.0
        return MicroFrame(theta, math.inf)
    if p_n == 0:
        raise DomainError("boundary frame needs p_n != 0")
    return MicroFrame(math.atan2(p_n.imag, p_n.real) % (2 * math.pi), l)
