"""Reproducing kernels: Ginibre, translated erfc, and finite-n weighted polynomials.

All kernels are Hermitian, ``K(z, w) = conj(K(w, z))``, and are normalised
against ``dA = dx dy / pi``.  Evaluation broadcasts over ``z`` and ``w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .errors import DomainError, ResourceError
from .potential import GINIBRE, RadialPotential, potential_from_dict

__all__ = [
    "erfc_F",
    "Kernel",
    "Ginibre",
    "Erfc",
    "FiniteN",
    "kernel_from_dict",
    "rescaled_modulus",
    "diag_check",
    "offdiag_decay_profile",
    "fit_decay_rate",
    "weighted_basis",
    "log_monomial_norms",
]

_SQRT2 = math.sqrt(2.0)
_CLAMP = 40.0


def erfc_F(z, return_flag: bool = False):
    """``F(z) = erfc(z/√2)/2`` for complex ``z``.

    Backed by the Faddeeva-based ``scipy.special.erfc``.  Inside the cone
    ``|Im z| < |Re z|`` values with ``Re z < -40`` are set to 1 and values with
    ``Re z > 40`` to 0; the second case raises the underflow flag, returned as
    a boolean array when ``return_flag`` is set.
    """
    z = np.asarray(z, dtype=complex)
    out = 0.5 * special.erfc(z / _SQRT2)
    cone = np.abs(z.imag) < np.abs(z.real)
    lo = cone & (z.real < -_CLAMP)
    hi = cone & (z.real > _CLAMP)
    out = np.where(lo, 1.0 + 0j, np.where(hi, 0j, out))
    if out.ndim == 0:
        out = complex(out)
    if return_flag:
        return out, hi
    return out


def _log_ginibre(z, w):
    return z * np.conj(w) - 0.5 * np.abs(z) ** 2 - 0.5 * np.abs(w) ** 2


def log_monomial_norms(pot: RadialPotential, n: int, N: int) -> np.ndarray:
    """``log h_k`` for ``h_k = ∫ |z|^{2k} e^{-nQ} dA = Γ((k+1)/p) / (p n^{(k+1)/p})``, ``k < N``."""
    p = pot.p
    k = np.arange(N)
    return special.gammaln((k + 1) / p) - math.log(p) - (k + 1) / p * math.log(n)


def weighted_basis(pot: RadialPotential, n: int, z, N: int, log_norms=None) -> np.ndarray:
    """Orthonormal ``z^k e^{-nQ(z)/2} / sqrt(h_k)`` for ``k < N``; shape ``z.shape + (N,)``."""
    z = np.asarray(z, dtype=complex)
    logh = log_monomial_norms(pot, n, N) if log_norms is None else log_norms[:N]
    k = np.arange(N)
    r = np.abs(z)[..., None]
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = np.where(k == 0, 0.0, k * np.log(r)) - 0.5 * logh - 0.5 * n * pot.Q(r)
    return np.exp(mag + 1j * k * np.angle(z)[..., None])


class Kernel:
    """Common interface; subclasses implement ``__call__``."""

    def __call__(self, z, w):
        raise NotImplementedError

    def matrix(self, X, Y=None) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        Y = X if Y is None else np.asarray(Y, dtype=complex)
        return self(X[:, None], Y[None, :])

    def diagonal(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=complex)
        return self(X, X).real

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Ginibre(Kernel):
    """``G(z, w) = exp(z conj(w) - |z|^2/2 - |w|^2/2)``."""

    def __call__(self, z, w):
        return np.exp(_log_ginibre(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex)))

    def diagonal(self, X):
        return np.ones(np.shape(X))

    def to_dict(self):
        return {"type": "ginibre"}


@dataclass(frozen=True)
class Erfc(Kernel):
    """``F_l(z, w) = G(z, w) F(z + conj(w) - 2l)``.

    The product is formed through the scaled function ``erfcx`` so that the
    Gaussian growth of ``erfc`` for large negative arguments cancels against
    the decay of ``G`` without overflow.
    """

    l: float = 0.0

    def __call__(self, z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        lg = _log_ginibre(z, w)
        u = (z + np.conj(w) - 2 * self.l) / _SQRT2
        pos = u.real >= 0
        us = np.where(pos, u, -u)
        tail = 0.5 * special.erfcx(us) * np.exp(lg - us * us)
        return np.where(pos, tail, np.exp(lg) - tail)

    def diagonal(self, X):
        X = np.asarray(X, dtype=complex)
        return 0.5 * special.erfc((2 * X.real - 2 * self.l) / _SQRT2)

    def to_dict(self):
        return {"type": "erfc", "l": float(self.l)}


@dataclass(frozen=True)
class FiniteN(Kernel):
    """Reproducing kernel of weighted polynomials of degree below ``n``.

    ``K_n(z, w) = Σ_{k<n} φ_k(z) conj(φ_k(w))`` with
    ``φ_k(z) = z^k e^{-nQ(z)/2} / sqrt(h_k)``.  For ``Q = |z|^{2p}`` the norms
    are ``h_k = Γ((k+1)/p) / (p n^{(k+1)/p})``.  Each ``φ_k`` is built from its
    logarithm, so no intermediate quantity overflows.
    """

    n: int = 1
    pot: RadialPotential = GINIBRE
    cap: int = 20000
    log_norms: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be at least 1")
        if self.n > self.cap:
            raise ResourceError(f"FiniteN kernel with n={self.n} exceeds cap {self.cap}")
        object.__setattr__(self, "log_norms", log_monomial_norms(self.pot, self.n, self.n))

    def basis(self, z) -> np.ndarray:
        """Orthonormal functions ``φ_0..φ_{n-1}`` at ``z``; shape ``z.shape + (n,)``."""
        return weighted_basis(self.pot, self.n, z, self.n, self.log_norms)

    def _rows(self, X, chunk=None):
        X = np.asarray(X, dtype=complex).ravel()
        chunk = chunk or max(1, 4_000_000 // self.n)
        for s in range(0, len(X), chunk):
            yield s, self.basis(X[s:s + chunk])

    def __call__(self, z, w):
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        out = np.empty(z.shape, dtype=complex)
        zf, wf, of = z.ravel(), w.ravel(), out.reshape(-1)
        chunk = max(1, 2_000_000 // self.n)
        for s in range(0, len(zf), chunk):
            of[s:s + chunk] = np.sum(self.basis(zf[s:s + chunk]) * np.conj(self.basis(wf[s:s + chunk])), axis=-1)
        return out

    def matrix(self, X, Y=None):
        X = np.asarray(X, dtype=complex).ravel()
        PX = self.basis(X)
        PY = PX if Y is None else self.basis(np.asarray(Y, dtype=complex).ravel())
        return PX @ PY.conj().T

    def diagonal(self, X):
        X = np.asarray(X, dtype=complex)
        out = np.empty(X.size)
        for s, B in self._rows(X):
            out[s:s + len(B)] = np.sum(np.abs(B) ** 2, axis=-1)
        return out.reshape(X.shape)

    def to_dict(self):
        return {"type": "finite_n", "n": int(self.n), "potential": self.pot.to_dict()}


def kernel_from_dict(d: dict) -> Kernel:
    kind = d.get("type")
    if kind == "ginibre":
        return Ginibre()
    if kind == "erfc":
        return Erfc(float(d.get("l", 0.0)))
    if kind == "finite_n":
        return FiniteN(int(d["n"]), potential_from_dict(d.get("potential", {"family": "radial", "p": 1.0})))
    raise DomainError(f"unknown kernel type {kind!r}")


def zoom_inverse(pot: RadialPotential, p_n: complex, N: int):
    """Return ``z -> p_n + z e^{i theta} / sqrt(N ΔQ(p_n))`` with ``theta = arg p_n``."""
    p_n = complex(p_n)
    rot = p_n / abs(p_n) if p_n != 0 else 1.0
    lap = float(pot.laplacian(p_n))
    if not lap > 0:
        raise DomainError("zoom map needs ΔQ(p_n) > 0")
    scale = math.sqrt(N * lap)
    return lambda z: p_n + np.asarray(z) * rot / scale


def rescaled_modulus(pot: RadialPotential, p_n: complex, n: int, rho: float, z, w,
                     kernel: FiniteN | None = None, outer: bool = False):
    """``|K_N(Γ^{-1} z, Γ^{-1} w)| / (N ΔQ(p_n))`` with ``N = floor(rho n)``.

    With ``outer`` set, ``z`` and ``w`` are 1-D and the full matrix of values
    is returned.
    """
    if not 0 < rho < 2:
        raise DomainError("rho must lie in (0, 2)")
    N = int(math.floor(rho * n))
    K = kernel if kernel is not None else FiniteN(N, pot)
    inv = zoom_inverse(pot, p_n, N)
    vals = K.matrix(inv(z), inv(w)) if outer else K(inv(z), inv(w))
    return np.abs(vals) / (N * float(pot.laplacian(p_n)))


def diag_check(pot: RadialPotential, z, n: int, kernel: FiniteN | None = None):
    """``|K_n(z, z) - n ΔQ(z)|``."""
    K = kernel if kernel is not None else FiniteN(n, pot)
    z = np.asarray(z, dtype=complex)
    return np.abs(K.diagonal(z) - n * pot.laplacian(z))


def offdiag_decay_profile(pot: RadialPotential, z: complex, n: int, radii, n_angles: int = 64,
                          kernel: FiniteN | None = None) -> np.ndarray:
    """Maximum over directions of ``|K_n(z, z + r e^{iφ})|`` for each radius."""
    K = kernel if kernel is not None else FiniteN(n, pot)
    radii = np.asarray(radii, dtype=float)
    phi = 2 * math.pi * np.arange(n_angles) / n_angles
    w = complex(z) + radii[:, None] * np.exp(1j * phi)[None, :]
    return np.abs(K(complex(z), w)).max(axis=1)


def fit_decay_rate(profile, radii, n: int) -> float:
    """Least-squares ``ε`` in ``profile ≈ n e^{-ε √n r}`` over the given radii."""
    x = math.sqrt(n) * np.asarray(radii, dtype=float)
    y = np.log(np.asarray(profile, dtype=float) / n)
    slope = np.polyfit(x, y, 1)[0]
    return float(-slope)
