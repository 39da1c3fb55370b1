"""Finite-rank checks of the erfc projection as a conjugated half-line cut-off.

The weighted Bargmann transform used here is

    Bφ(z) = (2/π)^{1/4} ∫ φ(t) exp(2tz - t^2 - z^2/2 - |z|^2/2) dt,

a unitary map from ``L^2(R)`` onto the Fock space with kernel ``G``.  It sends
the Hermite functions ``ψ_k(t) = 2^{1/4} h_k(√2 t)`` (with ``h_k`` the standard
Hermite functions) to the monomials ``e_k(z) = z^k e^{-|z|^2/2} / sqrt(k!)``,
with no extra phase.  In these bases the erfc projection ``P_l`` becomes the
half-line Gram matrix ``∫_{-∞}^{l} ψ_j ψ_k``, which is what
:func:`lemcd_residual` compares against a direct two-dimensional quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import linalg, special

from .errors import DomainError, NumericalError
from .geometry import Disk, Window, quadrature
from .kernel import Erfc, Ginibre

__all__ = [
    "hermite_functions",
    "HermiteBasis",
    "FockBasis",
    "halfline_gram",
    "erfc_matrix_direct",
    "lemcd_residual",
    "window_gram",
    "covariance_spectra",
    "bargmann_transform",
]


def hermite_functions(m: int, t) -> np.ndarray:
    """``ψ_0..ψ_{m-1}`` at ``t``; shape ``(m,) + t.shape``.

    Uses the three-term recurrence on the functions themselves, so nothing
    overflows for large degree.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty((m,) + t.shape)
    if m == 0:
        return out
    out[0] = (2 / math.pi) ** 0.25 * np.exp(-t * t)
    if m > 1:
        out[1] = 2 * t * out[0]
    for k in range(1, m - 1):
        out[k + 1] = 2 * t / math.sqrt(k + 1) * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def _gauss(a: float, b: float, n: int):
    x, w = leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


@dataclass(frozen=True)
class HermiteBasis:
    m: int
    T: float = 16.0
    nodes: int | None = None

    @property
    def n_nodes(self) -> int:
        return self.nodes if self.nodes is not None else 4 * self.m + 200

    def grid(self, a: float | None = None, b: float | None = None):
        a = -self.T if a is None else a
        b = self.T if b is None else b
        return _gauss(a, b, self.n_nodes)

    def __call__(self, t) -> np.ndarray:
        return hermite_functions(self.m, t)

    def gram(self) -> np.ndarray:
        t, w = self.grid()
        psi = self(t)
        return (psi * w) @ psi.T


@dataclass(frozen=True)
class FockBasis:
    m: int

    def __call__(self, z) -> np.ndarray:
        """``e_0..e_{m-1}`` at ``z``; shape ``z.shape + (m,)``."""
        z = np.asarray(z, dtype=complex)
        k = np.arange(self.m)
        r = np.abs(z)[..., None]
        with np.errstate(divide="ignore", invalid="ignore"):
            logmag = np.where(k == 0, 0.0, k * np.log(r)) - 0.5 * special.gammaln(k + 1) - 0.5 * r * r
        return np.exp(logmag + 1j * k * np.angle(z)[..., None])


def bargmann_transform(phi, z, T: float = 16.0, nodes: int = 400) -> np.ndarray:
    """Apply ``B`` to a callable ``phi`` by Gauss-Legendre quadrature on ``[-T, T]``."""
    t, w = _gauss(-T, T, nodes)
    z = np.asarray(z, dtype=complex)
    expo = (2 * t * z[..., None] - t * t - 0.5 * z[..., None] ** 2 - 0.5 * np.abs(z[..., None]) ** 2)
    return (2 / math.pi) ** 0.25 * np.sum(phi(t) * w * np.exp(expo), axis=-1)


def halfline_gram(basis: HermiteBasis, l: float) -> np.ndarray:
    """``G[j, k] = ∫_{-∞}^{l} ψ_j ψ_k dt``, truncated at ``-T``.

    ``l >= T`` (including ``inf``) is the full line ``[-T, T]``.
    """
    if l >= basis.T:
        l = basis.T
    elif basis.T < abs(l) + 10 - 1e-12:
        raise DomainError(f"T={basis.T} must be at least |l| + 10 = {abs(l) + 10}")
    t, w = basis.grid(-basis.T, l)
    psi = basis(t)
    G = (psi * w) @ psi.T
    return 0.5 * (G + G.T)


def _fock_nodes(m: int, spacing: float):
    rad = math.sqrt(m) + 6.0
    k = np.arange(-math.ceil(rad / spacing), math.ceil(rad / spacing) + 1) * spacing
    Z = (k[:, None] + 1j * k[None, :]).ravel()
    return Z[np.abs(Z) <= rad], spacing * spacing / math.pi


def erfc_matrix_direct(fock: FockBasis, l: float, spacing: float = 0.25, residual_tol: float = 1e-4) -> np.ndarray:
    """``A[j, k] = <e_j, P_l e_k>`` by direct quadrature of the erfc kernel.

    Both integrals use the trapezoid rule on a square grid clipped to
    ``|z| <= sqrt(m) + 6``; ``l = inf`` uses the Ginibre kernel.  The grid is
    rejected when the discrete Gram matrix of the ``e_k`` deviates from the
    identity by more than ``residual_tol``.
    """
    if fock.m > 12:
        raise DomainError("erfc_matrix_direct supports m <= 12")
    Z, w = _fock_nodes(fock.m, spacing)
    E = fock(Z)
    resid = float(np.max(np.abs(w * E.conj().T @ E - np.eye(fock.m))))
    if resid > residual_tol:
        raise NumericalError(f"Fock quadrature residual {resid:.3g} exceeds {residual_tol}", residual=resid)
    kern = Ginibre() if math.isinf(l) else Erfc(l)
    WE = w * E
    A = np.zeros((fock.m, fock.m), dtype=complex)
    block = 1024
    for s in range(0, len(Z), block):
        Fb = kern.matrix(Z[s:s + block], Z)
        A += WE[s:s + block].conj().T @ (Fb @ WE)
    return A


def lemcd_residual(m: int, l: float, spacing: float = 0.25) -> float:
    """Max-entry gap between the direct erfc matrix and the half-line Gram matrix."""
    T = max(16.0, abs(l) + 10.0) if math.isfinite(l) else 16.0
    A = erfc_matrix_direct(FockBasis(m), l, spacing)
    G = halfline_gram(HermiteBasis(m, T), l)
    return float(np.max(np.abs(A - G)))


def window_gram(fock: FockBasis, W: Window, h: float = 0.02, n_r: int = 96, n_theta: int = 256) -> np.ndarray:
    """``<e_j, χ_W e_k>``.  Disks use a polar product rule; other windows a lattice."""
    if isinstance(W, Disk):
        r, wr = _gauss(0.0, W.radius, n_r)
        th = 2 * math.pi * np.arange(n_theta) / n_theta
        Z = (W.center + r[:, None] * np.exp(1j * th)[None, :]).ravel()
        wts = (wr[:, None] * r[:, None] * np.full(n_theta, 2 * math.pi / n_theta)[None, :]).ravel() / math.pi
    else:
        grid = quadrature(W, h)
        Z, wts = grid.nodes, np.full(len(grid), grid.weight)
    E = fock(Z)
    A = (wts[:, None] * E).conj().T @ E
    return 0.5 * (A + A.conj().T)


def _psd_sqrt(A: np.ndarray) -> np.ndarray:
    lam, V = linalg.eigh(A)
    return (V * np.sqrt(np.clip(lam, 0.0, None))) @ V.conj().T


def covariance_spectra(m: int, W: Window, l: float, T: float | None = None):
    """Spectra of the truncated operators on ``(W, l)`` and ``(W - l, 0)``.

    Each is computed as ``A^{1/2} H A^{1/2}`` with ``A`` the window Gram matrix
    and ``H`` the half-line Gram matrix; this has the same nonzero spectrum as
    the half-line-compressed window operator and stays accurate once the
    window is resolved by the first ``m`` modes.
    """
    T = max(16.0, abs(l) + 10.0) if T is None else T
    basis = HermiteBasis(m, T)
    fock = FockBasis(m)
    out = []
    for win, cut in ((W, l), (W.translated(-l), 0.0)):
        S = _psd_sqrt(window_gram(fock, win))
        M = S @ halfline_gram(basis, cut) @ S
        out.append(np.sort(linalg.eigvalsh(0.5 * (M + M.conj().T)))[::-1])
    return out[0], out[1]
