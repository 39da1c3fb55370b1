"""Concentration operators ``P M_W P`` by Nyström discretisation.

A window ``W`` is covered by the cell-centre lattice of :func:`geometry.quadrature`
and the operator becomes the Hermitian matrix
``A[j, k] = sqrt(w_j w_k) K(x_j, x_k)``.  Its nonzero spectrum approximates that
of the integral operator.

Two eigen-routes are available.  The dense route calls LAPACK on the full
matrix.  The low-rank route runs a pivoted Cholesky factorisation
``A ≈ L L^H`` that touches only the pivot columns, then diagonalises the small
Gram matrix ``L^H L``.  Reproducing kernels restricted to bounded windows have
rapidly decaying spectra, so the rank stays near ``|W|/pi`` plus a boundary
layer and the low-rank route handles grids far beyond the dense cap.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .errors import DomainError, NumericalError, ResourceError
from .geometry import Cut, Disk, QuadratureGrid, Window, boundary_set, quadrature, regularity_kappa
from .kernel import Erfc, FiniteN, Ginibre, Kernel, erfc_F
from .potential import RadialPotential

__all__ = [
    "ConcentrationOperator",
    "Spectrum",
    "BoundParams",
    "build",
    "spectrum",
    "counting",
    "two_moment_plunge_bound",
    "plunge_count",
    "h_factor",
    "bound_term",
    "pfad_rhs",
    "bound_params",
    "normalized_deviation",
    "required_constant",
    "window_reach",
    "fit_constant",
    "DISK_FAMILY",
    "ALPHAS",
    "disk_eigenvalues",
    "refined_spectrum",
    "DENSE_CAP",
]

DENSE_CAP = 6000
DENSE_AUTO_LIMIT = 1500
DROP_BELOW = 1e-12
ERFC_TRUNCATION = 12.0


@dataclass(frozen=True)
class ConcentrationOperator:
    kernel: Kernel
    window: Window
    grid: QuadratureGrid
    dense_cap: int = DENSE_CAP

    @property
    def size(self) -> int:
        return len(self.grid)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def matrix(self) -> np.ndarray:
        if self.size > self.dense_cap:
            raise ResourceError(f"{self.size} nodes exceed the dense cap {self.dense_cap}")
        A = self.grid.weight * self.kernel.matrix(self.nodes)
        return 0.5 * (A + A.conj().T)

    def diagonal(self) -> np.ndarray:
        return self.grid.weight * self.kernel.diagonal(self.nodes)

    def column(self, j: int) -> np.ndarray:
        return self.grid.weight * self.kernel.matrix(self.nodes, self.nodes[j:j + 1])[:, 0]

    def trace(self) -> float:
        return float(np.sum(self.diagonal()))


@dataclass(frozen=True)
class Spectrum:
    """Descending clamped eigenvalues above the drop threshold."""

    eigenvalues: np.ndarray
    trace: float
    hs_sq: float
    excursion: float = 0.0
    method: str = "dense"
    rank: int = 0

    @classmethod
    def from_raw(cls, raw, method="dense") -> "Spectrum":
        raw = np.sort(np.asarray(raw, dtype=float))[::-1]
        if len(raw):
            excursion = max(0.0, float(raw[0]) - 1.0, -float(raw[-1]))
        else:
            excursion = 0.0
        if excursion > 0.02:
            warnings.warn(f"eigenvalues left [0, 1] by {excursion:.3g}; grid too coarse?", RuntimeWarning)
        lam = np.clip(raw[raw >= DROP_BELOW], 0.0, 1.0)
        return cls(lam, float(lam.sum()), float(np.sum(lam ** 2)), excursion, method, len(raw))

    def __len__(self):
        return len(self.eigenvalues)


@dataclass(frozen=True)
class BoundParams:
    """Constants entering the spectral bounds; ``C_univ`` is fitted and then frozen."""

    C_univ: float
    eta: float | None = None
    kappa: float | None = None


def build(kernel: Kernel, W: Window, h: float = 0.1, cap: int = 400_000,
          support_radius: float | None = None, dense_cap: int = DENSE_CAP) -> ConcentrationOperator:
    """Discretise ``P M_W P`` for ``kernel`` on the lattice of spacing ``h``.

    Erfc windows are truncated to ``Re z <= l + 12`` first.  For finite-n
    kernels, ``support_radius`` restricts nodes to the disk of that radius
    (the enlarged droplet ``S_{M+s}``).
    """
    if isinstance(kernel, Erfc):
        x0, x1, _, _ = W.bbox()
        if x1 > kernel.l + ERFC_TRUNCATION:
            W = Cut(W, 0.0, kernel.l + ERFC_TRUNCATION)
    if isinstance(W, Cut) and W.status == "empty":
        return ConcentrationOperator(kernel, W, QuadratureGrid(np.empty(0, complex), h * h / math.pi, h), dense_cap)
    grid = quadrature(W, h, cap=cap)
    if support_radius is not None:
        keep = np.abs(grid.nodes) <= support_radius
        grid = QuadratureGrid(grid.nodes[keep], grid.weight, grid.h)
    return ConcentrationOperator(kernel, W, grid, dense_cap)


def _pivoted_cholesky(op: ConcentrationOperator, tol: float, max_rank: int | None = None) -> np.ndarray:
    d = op.diagonal().astype(float).copy()
    N = len(d)
    max_rank = N if max_rank is None else min(max_rank, N)
    L = np.zeros((N, min(max_rank, 64)), dtype=complex)
    r = 0
    while r < max_rank:
        j = int(np.argmax(d))
        if d[j] <= tol:
            break
        if r == L.shape[1]:
            L = np.hstack([L, np.zeros((N, min(L.shape[1], max_rank - r)), dtype=complex)])
        c = op.column(j) - L[:, :r] @ np.conj(L[j, :r])
        c /= math.sqrt(d[j])
        L[:, r] = c
        d -= np.abs(c) ** 2
        d[j] = 0.0
        r += 1
    return L[:, :r]


def spectrum(op: ConcentrationOperator, method: str = "auto", tol: float = 1e-13) -> Spectrum:
    """Eigenvalues of the discretised operator.

    ``method`` is ``"dense"``, ``"lowrank"``, ``"factor"`` (finite-n kernels,
    through the n x n Gram matrix of the weighted basis) or ``"auto"``.
    """
    N = op.size
    if N == 0:
        return Spectrum(np.empty(0), 0.0, 0.0, method="empty")
    if method == "auto":
        if isinstance(op.kernel, FiniteN):
            method = "factor"
        else:
            method = "dense" if N <= DENSE_AUTO_LIMIT else "lowrank"
    try:
        if method == "dense":
            raw = linalg.eigvalsh(op.matrix)
        elif method == "factor":
            B = op.kernel.basis(op.nodes)
            G = op.grid.weight * (B.conj().T @ B)
            raw = linalg.eigvalsh(0.5 * (G + G.conj().T))
        elif method == "lowrank":
            L = _pivoted_cholesky(op, tol)
            G = L.conj().T @ L
            raw = linalg.eigvalsh(0.5 * (G + G.conj().T)) if G.size else np.empty(0)
        else:
            raise DomainError(f"unknown eigen method {method!r}")
    except linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return Spectrum.from_raw(raw, method)


def counting(s: Spectrum, alpha: float) -> int:
    """``#{k : λ_k > alpha}``."""
    return int(np.count_nonzero(s.eigenvalues > alpha))


def plunge_count(s: Spectrum, delta: float) -> int:
    lam = s.eigenvalues
    return int(np.count_nonzero((lam > delta) & (lam < 1 - delta)))


def two_moment_plunge_bound(s: Spectrum, delta: float) -> int:
    """``ceil((trace - hs_sq) / (delta (1 - delta)))`` bounds the plunge count."""
    if not 0 < delta < 0.5 + 1e-15:
        raise DomainError("delta must lie in (0, 1/2]")
    return int(math.ceil((s.trace - s.hs_sq) / (delta * (1 - delta)) - 1e-9))


def h_factor(x: float) -> float:
    return 1.0 if x <= 2 else x * x * math.log(x)


def bound_params(W: Window, C_univ: float, eta: float | None = None, spacing_ratio: float = 100.0) -> BoundParams:
    """Fill in ``eta`` (default: diameter) and the regularity constant of the boundary set."""
    eta = W.diameter() if eta is None else eta
    E = boundary_set(W, eta / spacing_ratio)
    return BoundParams(C_univ, eta, regularity_kappa(E, eta))


def bound_term(W: Window, alpha: float, params: BoundParams) -> float:
    """``H^1(∂W)/kappa * (sqrt(log 1/alpha) + log(1/alpha)/eta) * log(1 + log 1/alpha)``."""
    if params.eta is None or params.kappa is None:
        params = bound_params(W, params.C_univ, params.eta)
    L = math.log(1.0 / alpha)
    return W.perimeter() / params.kappa * (math.sqrt(L) + L / params.eta) * math.log1p(L)


def pfad_rhs(W: Window, alpha: float, a: float, params: BoundParams, side: str = "upper") -> float:
    """Right-hand sides of the two-sided counting bound at threshold ``alpha``.

    ``side="upper"`` bounds ``#{λ > alpha}`` from above; ``side="lower"`` bounds
    ``#{λ > 1 - alpha}`` from below, with the penalty ``h(a)`` for windows
    reaching ``a`` beyond the cut line.
    """
    if not 0 < alpha < 0.5:
        raise DomainError("alpha must lie in (0, 1/2)")
    term = params.C_univ * bound_term(W, alpha, params)
    base = W.area() / math.pi
    if side == "upper":
        return base + term
    if side == "lower":
        return base - h_factor(a) * term
    raise DomainError(f"side must be 'upper' or 'lower', got {side!r}")


def normalized_deviation(s: Spectrum, W: Window, delta: float, params: BoundParams, reference: float | None = None,
                         a: float = -math.inf) -> float:
    """``|#{λ > delta} - reference| / bound_term``, with reference ``|W|/pi`` by default.

    A shortfall below the reference is further divided by ``h(a)``, the
    penalty for windows reaching ``a`` past the cut line.
    """
    reference = W.area() / math.pi if reference is None else reference
    dev = counting(s, delta) - reference
    if dev < 0:
        dev = -dev / h_factor(a)
    return dev / bound_term(W, delta, params)


def window_reach(kernel: Kernel, W: Window) -> float:
    """Smallest ``a`` with ``W ⊂ {Re z <= a + l}`` for an erfc kernel; ``-inf`` otherwise."""
    if isinstance(kernel, Erfc):
        return W.bbox()[1] - kernel.l
    return -math.inf


def required_constant(s: Spectrum, W: Window, alpha: float, a: float, params: BoundParams) -> float:
    """Smallest constant for which both counting bounds hold at ``alpha``."""
    bt = bound_term(W, alpha, params)
    base = W.area() / math.pi
    upper = (counting(s, alpha) - base) / bt
    lower = (base - counting(s, 1 - alpha)) / (h_factor(a) * bt)
    return max(upper, lower, 0.0)


ALPHAS = (0.3, 0.1, 0.03, 0.01)
DISK_FAMILY = (2.0, 3.0, 4.0, 5.0)


def fit_constant(kernels, windows, alphas=ALPHAS, h: float = 0.1) -> tuple[float, list[dict]]:
    """Fit the counting-bound constant as the largest requirement over all
    ``(kernel, window, alpha)`` triples.  Spectra are refined once (``h/√2``)."""
    rows = []
    for kern in kernels:
        for W in windows:
            rs = refined_spectrum(kern, W, h)
            params = bound_params(W, 1.0)
            a = window_reach(kern, W)
            for alpha in alphas:
                rows.append({"kernel": kern.to_dict(), "window": W.to_dict(), "alpha": alpha,
                             "required": required_constant(rs.fine, W, alpha, a, params),
                             "refinement_shift": rs.max_shift})
    return max(r["required"] for r in rows), rows


def disk_eigenvalues(R: float, kmax: int | None = None) -> np.ndarray:
    """Ginibre concentration eigenvalues on a centred disk: ``P(k+1, R^2)``."""
    from scipy.special import gammainc

    kmax = int(max(4 * R * R + 40, 60)) if kmax is None else kmax
    return gammainc(np.arange(1, kmax + 1), R * R)


@dataclass(frozen=True)
class RefinedSpectrum:
    coarse: Spectrum
    fine: Spectrum
    checked: int
    max_shift: float
    accepted: bool = field(default=False)


def refined_spectrum(kernel: Kernel, W: Window, h: float = 0.1, tol: float = 0.01, **kw) -> RefinedSpectrum:
    """Spectrum at ``h`` and ``h/√2``; accepted when the leading ``2|W|/pi``
    eigenvalues move by less than ``tol``."""
    coarse = spectrum(build(kernel, W, h, **kw))
    fine = spectrum(build(kernel, W, h / math.sqrt(2), **kw))
    m = max(1, int(math.ceil(2 * W.area() / math.pi)))
    a = np.zeros(m)
    b = np.zeros(m)
    a[:min(m, len(coarse))] = coarse.eigenvalues[:m]
    b[:min(m, len(fine))] = fine.eigenvalues[:m]
    shift = float(np.max(np.abs(a - b)))
    return RefinedSpectrum(coarse, fine, m, shift, shift < tol)
