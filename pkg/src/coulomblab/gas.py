"""Two-dimensional Coulomb gas: energy, Metropolis sampling, Fekete points.

The Hamiltonian counts every unordered pair twice,

    H(z) = Σ_{j≠k} log(1/|z_j - z_k|) + n Σ_j Q(z_j),

and the Gibbs density at inverse temperature β is proportional to
``exp(-β H)``.  The O(n^2) loops are compiled with numba.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import linalg, special
from scipy.spatial import cKDTree

from .errors import ConvergenceError, DomainError, NumericalError
from .kernel import FiniteN, weighted_basis
from .potential import RadialPotential

__all__ = [
    "Configuration",
    "SamplerConfig",
    "hamiltonian",
    "gradient",
    "metropolis",
    "sample",
    "fekete",
    "equilibrium_draws",
    "min_separation",
    "max_exterior_distance",
    "lagrange_log",
    "lagrange_abs_max",
    "reproducing_identity_residual",
    "submean_ratio",
    "sampling_inequality_ratio",
    "interpolation_constant",
]


@dataclass(frozen=True)
class Configuration:
    """Immutable set of ``n`` distinct finite points."""

    points: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=complex).ravel()
        if not np.all(np.isfinite(pts)):
            raise DomainError("configuration contains non-finite points")
        if len(np.unique(pts)) != len(pts):
            raise DomainError("configuration contains coincident points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    def rotated(self, angle: float) -> "Configuration":
        return Configuration(self.points * np.exp(1j * angle), dict(self.meta))

    def to_csv(self) -> str:
        rows = ["re,im"] + [f"{z.real:.17g},{z.imag:.17g}" for z in self.points]
        return "\n".join(rows) + "\n"

    def sidecar(self) -> str:
        return json.dumps({"n": self.n, **self.meta}, sort_keys=True, indent=2)

    @classmethod
    def from_csv(cls, text: str, meta: dict | None = None) -> "Configuration":
        rows = [r for r in text.strip().splitlines()[1:] if r]
        pts = [complex(float(a), float(b)) for a, b in (r.split(",") for r in rows)]
        return cls(np.array(pts, dtype=complex), meta or {})


@dataclass(frozen=True)
class SamplerConfig:
    """Metropolis settings.  ``proposal_sigma`` is in units of ``1/sqrt(n)``;
    ``None`` starts from ``1/sqrt(beta)`` (that is ``1/sqrt(n beta)`` in absolute
    units)."""

    c: float = 2.0
    proposal_sigma: float | None = None
    sweeps: int = 400
    burn_in: int = 200
    seed: int = 0

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError("c must be positive")
        if self.sweeps < self.burn_in:
            raise DomainError("sweeps must be at least burn_in")
        if self.proposal_sigma is not None and not self.proposal_sigma > 0:
            raise DomainError("proposal_sigma must be positive")


@numba.njit(cache=True)
def _q(x, y, p):
    r2 = x * x + y * y
    if p == 1.0:
        return r2
    return r2 ** p


@numba.njit(cache=True)
def _energy(x, y, p):
    n = x.shape[0]
    e = 0.0
    for j in range(n):
        for k in range(j + 1, n):
            dx = x[j] - x[k]
            dy = y[j] - y[k]
            e -= math.log(dx * dx + dy * dy)
        e += n * _q(x[j], y[j], p)
    return e


@numba.njit(cache=True)
def _grad(x, y, p):
    n = x.shape[0]
    gx = np.zeros(n)
    gy = np.zeros(n)
    for j in range(n):
        for k in range(j + 1, n):
            dx = x[j] - x[k]
            dy = y[j] - y[k]
            r2 = dx * dx + dy * dy
            fx = 2.0 * dx / r2
            fy = 2.0 * dy / r2
            gx[j] -= fx
            gy[j] -= fy
            gx[k] += fx
            gy[k] += fy
        r2 = x[j] * x[j] + y[j] * y[j]
        c = n * 2.0 * p * (r2 ** (p - 1.0) if p != 1.0 else 1.0)
        gx[j] += c * x[j]
        gy[j] += c * y[j]
    return gx, gy


@numba.njit(cache=True)
def _sweep(x, y, p, beta, sigma, nx, ny, logu):
    n = x.shape[0]
    accepted = 0
    for i in range(n):
        xo = x[i]
        yo = y[i]
        xn = xo + sigma * nx[i]
        yn = yo + sigma * ny[i]
        dH = 0.0
        prod = 1.0
        bad = False
        for k in range(n):
            if k == i:
                continue
            ax = xo - x[k]
            ay = yo - y[k]
            bx = xn - x[k]
            by = yn - y[k]
            rn = bx * bx + by * by
            if rn == 0.0:
                bad = True
                break
            prod *= (ax * ax + ay * ay) / rn
            if prod > 1e100 or prod < 1e-100:
                dH += math.log(prod)
                prod = 1.0
        if bad:
            continue
        dH += math.log(prod) + n * (_q(xn, yn, p) - _q(xo, yo, p))
        if logu[i] < -beta * dH:
            x[i] = xn
            y[i] = yn
            accepted += 1
    return accepted


def _xy(points):
    pts = np.asarray(points, dtype=complex)
    return np.ascontiguousarray(pts.real), np.ascontiguousarray(pts.imag)


def hamiltonian(cfg, pot: RadialPotential) -> float:
    """Ordered-pair Hamiltonian; ``inf`` when two points coincide."""
    pts = cfg.points if isinstance(cfg, Configuration) else np.asarray(cfg, dtype=complex)
    if len(np.unique(pts)) != len(pts):
        return math.inf
    x, y = _xy(pts)
    return float(_energy(x, y, float(pot.p)))


def gradient(cfg, pot: RadialPotential) -> np.ndarray:
    """Gradient of the Hamiltonian as complex numbers ``∂x H + i ∂y H``."""
    pts = cfg.points if isinstance(cfg, Configuration) else np.asarray(cfg, dtype=complex)
    if len(np.unique(pts)) != len(pts):
        raise DomainError("gradient undefined at coincident points")
    x, y = _xy(pts)
    gx, gy = _grad(x, y, float(pot.p))
    return gx + 1j * gy


def equilibrium_draws(n: int, pot: RadialPotential, rng: np.random.Generator) -> np.ndarray:
    """``n`` i.i.d. draws from the equilibrium measure (``μ(B_r) = p r^{2p}``)."""
    u = rng.random(n)
    r = (u / pot.p) ** (1.0 / (2 * pot.p))
    return r * np.exp(2j * math.pi * rng.random(n))


def _sweep_rng(seed: int, sweep: int) -> np.random.Generator:
    # counter-based: the stream of sweep k depends only on (seed, k)
    return np.random.Generator(np.random.Philox(key=seed & (2 ** 64 - 1), counter=sweep))


@dataclass
class ChainResult:
    points: np.ndarray
    sigma: float
    acceptance: float
    trace: list


def metropolis(points, pot: RadialPotential, beta: float, sigma: float, sweeps: int, seed: int,
               adapt_sweeps: int = 0, target: float = 0.4, record=None) -> ChainResult:
    """Run single-particle Gaussian-proposal Metropolis sweeps.

    During the first ``adapt_sweeps`` sweeps ``sigma`` is nudged toward the
    ``target`` acceptance rate.  ``record`` (a function of the point array)
    is evaluated after every post-adaptation sweep.
    """
    x, y = _xy(points)
    x, y = x.copy(), y.copy()
    n = len(x)
    p = float(pot.p)
    trace = []
    acc_total = 0
    counted = 0
    for k in range(sweeps):
        g = _sweep_rng(seed, k + 1)
        nx = g.standard_normal(n)
        ny = g.standard_normal(n)
        logu = np.log(g.random(n))
        a = _sweep(x, y, p, beta, sigma, nx, ny, logu)
        if k < adapt_sweeps:
            sigma *= math.exp(a / n - target)
        else:
            acc_total += a
            counted += n
            if record is not None:
                trace.append(record(x + 1j * y))
    rate = acc_total / counted if counted else float("nan")
    return ChainResult(x + 1j * y, sigma, rate, trace)


def sample(n: int, pot: RadialPotential, sc: SamplerConfig) -> Configuration:
    """Metropolis sample at ``beta = c log n`` started from i.i.d. equilibrium draws."""
    if n < 2:
        raise DomainError("sampling needs n >= 2")
    beta = sc.c * math.log(n)
    init = equilibrium_draws(n, pot, _sweep_rng(sc.seed, 0))
    unit = sc.proposal_sigma if sc.proposal_sigma is not None else 1.0 / math.sqrt(beta)
    res = metropolis(init, pot, beta, unit / math.sqrt(n), sc.sweeps, sc.seed, adapt_sweeps=sc.burn_in)
    if not 0.1 <= res.acceptance <= 0.9:
        warnings.warn(f"Metropolis acceptance {res.acceptance:.3f} outside [0.1, 0.9]", RuntimeWarning)
    meta = {"c": sc.c, "seed": sc.seed, "sweeps": sc.sweeps, "burn_in": sc.burn_in, "beta": beta,
            "sigma": res.sigma * math.sqrt(n), "acceptance": res.acceptance, "potential": pot.to_dict()}
    return Configuration(res.points, meta)


def _hessian(x, y, p):
    """Dense ``2n x 2n`` Hessian in the ordering ``(x_0..x_{n-1}, y_0..y_{n-1})``."""
    n = len(x)
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    r2 = dx * dx + dy * dy
    np.fill_diagonal(r2, 1.0)
    r4 = r2 * r2
    hxx = 2 * (dx * dx - dy * dy) / r4
    hxy = 4 * dx * dy / r4
    for h in (hxx, hxy):
        np.fill_diagonal(h, 0.0)
    # each unordered pair carries -log|d|^2; off-diagonal blocks get -h
    Hxx, Hxy = -hxx, -hxy
    np.fill_diagonal(Hxx, hxx.sum(axis=1))
    np.fill_diagonal(Hxy, hxy.sum(axis=1))
    Hyy = -Hxx
    rr = x * x + y * y
    a = 2 * p * rr ** (p - 1) if p != 1 else np.full(n, 2.0)
    b = 2 * p * (2 * p - 2) * rr ** (p - 2) if p != 1 else np.zeros(n)
    Hxx = Hxx + np.diag(n * (a + b * x * x))
    Hyy = Hyy + np.diag(n * (a + b * y * y))
    Hxy = Hxy + np.diag(n * b * x * y)
    return np.block([[Hxx, Hxy], [Hxy, Hyy]])


def fekete(n: int, pot: RadialPotential, tol: float = 1e-8, seed: int = 0, max_iter: int = 20_000,
           start=None, history: list | None = None, newton_max_n: int = 1500) -> Configuration:
    """Minimise the Hamiltonian, stopping once ``max |grad| <= tol n``.

    Gradient descent with Barzilai-Borwein steps and Armijo backtracking
    brings the gradient down to ``1e-3 n``; Newton steps with a
    pseudo-inverse of ``|Hessian|`` (the rotation is a zero mode) finish the job,
    since near the minimum energy differences drown in rounding.  Every
    accepted step lowers the energy, up to rounding in the Newton phase.
    ``history``, when given, receives the energy after every accepted step.
    """
    if n < 1:
        raise DomainError("n must be positive")
    if n == 1:
        return Configuration(np.zeros(1, complex), {"H": 0.0, "iterations": 0, "grad_max": 0.0})
    p = float(pot.p)
    if start is None:
        z = equilibrium_draws(n, pot, np.random.default_rng(seed))
    else:
        z = np.asarray(start, dtype=complex).copy()
    x, y = _xy(z)
    H = _energy(x, y, p)
    gx, gy = _grad(x, y, p)
    t = 1.0 / n
    it = 0
    switch = max(tol, 1e-3) * n if n <= newton_max_n else tol * n

    def gmax():
        return math.sqrt(float(np.max(gx * gx + gy * gy)))

    def done():
        return Configuration(x + 1j * y, {"H": float(H), "iterations": it, "grad_max": gmax()})

    while gmax() > switch:
        if it >= max_iter:
            raise ConvergenceError(f"Fekete descent hit {max_iter} iterations", best=Configuration(x + 1j * y),
                                   residual=gmax())
        g2 = float(np.sum(gx * gx + gy * gy))
        while True:
            xn, yn = x - t * gx, y - t * gy
            Hn = _energy(xn, yn, p)
            if math.isfinite(Hn) and Hn <= H - 1e-4 * t * g2:
                break
            t *= 0.5
            if t < 1e-30:
                raise ConvergenceError("line search failed", best=Configuration(x + 1j * y), residual=gmax())
        gxn, gyn = _grad(xn, yn, p)
        sx, sy, ux, uy = xn - x, yn - y, gxn - gx, gyn - gy
        su = float(np.sum(sx * ux + sy * uy))
        t = float(np.sum(sx * sx + sy * sy)) / su if su > 0 else 2 * t
        x, y, H, gx, gy = xn, yn, Hn, gxn, gyn
        it += 1
        if history is not None:
            history.append(float(H))
    for _ in range(100):
        if gmax() <= tol * n:
            return done()
        lam, V = linalg.eigh(_hessian(x, y, p))
        # |λ| keeps the step a descent direction if a saddle is nearby
        keep = np.abs(lam) > 1e-10 * np.abs(lam).max()
        g = np.concatenate([gx, gy])
        step = -(V[:, keep] @ ((V[:, keep].T @ g) / np.abs(lam[keep])))
        slack = 1e-12 * max(1.0, abs(H))
        a = 1.0
        while True:
            xn, yn = x + a * step[:n], y + a * step[n:]
            Hn = _energy(xn, yn, p)
            if math.isfinite(Hn) and Hn <= H + slack:
                break
            a *= 0.5
            if a < 1e-12:
                raise ConvergenceError("Newton line search failed", best=Configuration(x + 1j * y), residual=gmax())
        x, y, H = xn, yn, Hn
        gx, gy = _grad(x, y, p)
        it += 1
        if history is not None:
            history.append(float(H))
    if gmax() <= tol * n:
        return done()
    raise ConvergenceError("Newton phase did not reach tolerance", best=Configuration(x + 1j * y), residual=gmax())


def min_separation(cfg: Configuration) -> float:
    pts = cfg.points
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    d, _ = tree.query(np.column_stack([pts.real, pts.imag]), k=2)
    return float(d[:, 1].min())


def max_exterior_distance(cfg: Configuration, pot: RadialPotential) -> float:
    """``max_j d(z_j, S)`` for the droplet disk ``S``."""
    return float(np.max(np.maximum(np.abs(cfg.points) - pot.droplet_radius(), 0.0)))


def lagrange_log(cfg: Configuration, pot: RadialPotential, j: int, z):
    """``(log|ℓ_j(z)|, ℓ_j(z)/|ℓ_j(z)|)`` for the weighted Lagrange polynomial.

    The log-magnitude is ``-inf`` at the other nodes.
    """
    pts = cfg.points
    zj = pts[j]
    others = np.delete(pts, j)
    z = np.asarray(z, dtype=complex)
    num = z[..., None] - others
    den = zj - others
    with np.errstate(divide="ignore"):
        logmag = (np.sum(np.log(np.abs(num)), axis=-1) - np.sum(np.log(np.abs(den)))
                  - 0.5 * cfg.n * (pot.Q(z) - pot.Q(zj)))
    phase_angle = np.sum(np.angle(num), axis=-1) - np.sum(np.angle(den))
    return logmag, np.exp(1j * phase_angle)


def lagrange_values(cfg: Configuration, pot: RadialPotential, z) -> np.ndarray:
    """Matrix ``ℓ_j(z_i)``; shape ``z.shape + (n,)``."""
    z = np.asarray(z, dtype=complex)
    out = np.empty(z.shape + (cfg.n,), dtype=complex)
    for j in range(cfg.n):
        lm, ph = lagrange_log(cfg, pot, j, z)
        out[..., j] = np.exp(lm) * ph
    return out


def lagrange_abs_max(cfg: Configuration, pot: RadialPotential, spacing: float = 0.02, margin: float = 0.5) -> float:
    """``max_j sup |ℓ_j|`` over a square grid covering the droplet plus ``margin``."""
    R = pot.droplet_radius() + margin
    g = np.arange(-R, R + spacing / 2, spacing)
    Z = (g[:, None] + 1j * g[None, :]).ravel()
    Z = Z[np.abs(Z) <= R]
    best = 0.0
    for j in range(cfg.n):
        lm, _ = lagrange_log(cfg, pot, j, Z)
        best = max(best, float(np.exp(np.max(lm))))
    return best


def reproducing_identity_residual(cfg: Configuration, pot: RadialPotential, z, w) -> float:
    """``|K_n(z,w) - Σ_j ℓ_j(z) K_n(z_j, w)| / (1 + |K_n(z,w)|)``."""
    if cfg.n > 64:
        raise DomainError("reproducing identity check is limited to n <= 64")
    K = FiniteN(cfg.n, pot)
    z = complex(z)
    w = complex(w)
    direct = K(z, w)
    ell = lagrange_values(cfg, pot, z)
    interp = np.sum(ell * K(cfg.points, w))
    return float(abs(direct - interp) / (1 + abs(direct)))


def _disk_rule(center: complex, radius: float, n_r: int = 24, n_t: int = 48):
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = 0.5 * radius * (x + 1)
    wr = 0.5 * radius * w * r
    th = 2 * math.pi * np.arange(n_t) / n_t
    Z = center + r[:, None] * np.exp(1j * th)[None, :]
    W = wr[:, None] * np.full(n_t, 2.0 / n_t)[None, :]  # dA = r dr dθ / π
    return Z.ravel(), W.ravel()


def submean_ratio(pot: RadialPotential, n: int, z0: complex, s: float, trials: int = 20, seed: int = 0,
                  coefficients=None) -> float:
    """Max over random ``f`` in ``W_n`` of ``|f(z0)| / ((n/s^2) ∫_{B_{s/√n}(z0)} |f| dA)``.

    ``coefficients`` (shape ``(trials, n)``) overrides the random draws.
    """
    if coefficients is None:
        rng = np.random.default_rng(seed)
        coefficients = rng.standard_normal((trials, n)) + 1j * rng.standard_normal((trials, n))
    coefficients = np.atleast_2d(coefficients)
    Z, W = _disk_rule(complex(z0), s / math.sqrt(n))
    B = weighted_basis(pot, n, Z, n)
    b0 = weighted_basis(pot, n, np.array([complex(z0)]), n)[0]
    vals = np.abs(B @ coefficients.T)
    means = (n / s ** 2) * (W @ vals)
    return float(np.max(np.abs(coefficients @ b0) / means))


def sampling_inequality_ratio(cfg: Configuration, pot: RadialPotential, rho: float, trials: int = 20,
                              seed: int = 0, M: float = 4.0, coefficients=None) -> float:
    """Max over random ``f`` in ``W_{⌊ρn⌋}`` of ``∫_{S_M}|f|^2 / ((1/n) Σ_j |f(z_j)|^2)``.

    ``S_M`` is the droplet enlarged by ``M/sqrt(n)``; its mass for each
    orthonormal monomial is a regularised incomplete gamma function.
    """
    if not 0 < rho < 1:
        raise DomainError("rho must lie in (0, 1)")
    n = cfg.n
    N = max(1, int(math.floor(rho * n)))
    if coefficients is None:
        rng = np.random.default_rng(seed)
        coefficients = rng.standard_normal((trials, N)) + 1j * rng.standard_normal((trials, N))
    coefficients = np.atleast_2d(coefficients)
    r = pot.droplet_radius() + M / math.sqrt(n)
    k = np.arange(N)
    mass = special.gammainc((k + 1) / pot.p, n * r ** (2 * pot.p))
    num = (np.abs(coefficients) ** 2) @ mass
    Phi = weighted_basis(pot, n, cfg.points, N)
    den = np.sum(np.abs(coefficients @ Phi.T) ** 2, axis=1) / n
    if np.any(den <= 0):
        raise NumericalError("degenerate sample: a test function vanishes on every point")
    return float(np.max(num / den))


def interpolation_constant(cfg: Configuration, pot: RadialPotential, rho: float) -> float:
    """Worst ``n (ρ-1)^2 ||f||^2`` over least-norm interpolants of the data ``δ_{jm}``
    in ``W_{⌈ρn⌉}``."""
    if not rho > 1:
        raise DomainError("rho must exceed 1")
    n = cfg.n
    N = int(math.ceil(rho * n))
    Phi = weighted_basis(pot, n, cfg.points, N)
    G = Phi @ Phi.conj().T
    norms = np.real(np.diag(linalg.inv(G)))
    return float(n * (rho - 1) ** 2 * np.max(norms))
