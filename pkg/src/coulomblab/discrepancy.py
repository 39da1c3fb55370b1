"""Window counts, expected counts and discrepancy sweeps for gas configurations.

Windows are given in microscopic units and placed at ``p + W/sqrt(n)``.  All
windows are closed: points on the boundary are counted.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError
from .geometry import Cut, Disk, Window, _lens_area
from .kernel import Erfc, FiniteN, Ginibre
from .operators import build, counting, spectrum
from .potential import RadialPotential, equilibrium_mass, micro_frame
from .gas import Configuration, SamplerConfig, min_separation, sample

__all__ = [
    "count_in",
    "expected_count",
    "sup_discrepancy",
    "theorem_normaliser",
    "DiscrepancyRow",
    "DiscrepancyReport",
    "boundary_sweep",
    "bulk_sweep",
    "SandwichReport",
    "landau_sandwich",
    "limit_count",
    "limit_window",
    "finite_count",
    "MODES",
]

MODES = ("cdis", "exact_mu", "local_bulk", "boundary_limit")


def _xy(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).ravel()
    return np.column_stack([z.real, z.imag])


def count_in(cfg: Configuration, p: complex, W: Window, n: int) -> int:
    """Number of points of ``cfg`` in the closed window ``p + W/sqrt(n)``."""
    if cfg.n == 0:
        return 0
    return int(np.count_nonzero(W.contains(math.sqrt(n) * (cfg.points - complex(p)))))


def expected_count(pot: RadialPotential, p: complex, W: Window, n: int, mode: str = "cdis",
                   theta: float | None = None, l: float | None = None) -> float:
    """Predicted number of points in ``p + W/sqrt(n)``.

    ``cdis``: ``(n/π) ΔQ(p) |(p + W/√n) ∩ S|``.
    ``exact_mu``: ``n μ(p + W/√n)``.
    ``local_bulk``: ``ΔQ(p) |W|/π``.
    ``boundary_limit``: ``ΔQ(p) |W ∩ {Re(z e^{-iθ}) <= l}|/π``; ``theta`` and
    ``l`` default to the microscopic frame of ``p``.
    """
    p = complex(p)
    lap = float(pot.laplacian(p))
    if mode == "cdis":
        Wn = W.transformed(scale=1 / math.sqrt(n), shift=p)
        return n / math.pi * lap * Wn.disk_intersection_area(0j, pot.droplet_radius())
    if mode == "exact_mu":
        return n * equilibrium_mass(pot, W.transformed(scale=1 / math.sqrt(n), shift=p))
    if mode == "local_bulk":
        return lap * W.area() / math.pi
    if mode == "boundary_limit":
        if theta is None or l is None:
            frame = micro_frame(pot, p, n)
            theta = frame.theta if theta is None else theta
            l = frame.l if l is None else l
        if math.isinf(l):
            return lap * W.area() / math.pi
        return lap * Cut(W, theta, l).area() / math.pi
    raise DomainError(f"unknown mode {mode!r}; expected one of {MODES}")


def _p_grid(pot: RadialPotential, n: int, spacing: float, offset: tuple[float, float], margin: float) -> np.ndarray:
    R = pot.droplet_radius() + margin
    k = np.arange(-math.ceil(R / spacing) - 1, math.ceil(R / spacing) + 2) * spacing
    P = ((k + offset[0])[:, None] + 1j * (k + offset[1])[None, :]).ravel()
    return P[np.abs(P) <= R]


def _counts(cfg: Configuration, P: np.ndarray, W: Window, n: int, tree: cKDTree | None = None) -> np.ndarray:
    """Closed-window counts at every ``p`` in ``P``."""
    sq = math.sqrt(n)
    tree = tree if tree is not None else cKDTree(_xy(cfg.points))
    if isinstance(W, Disk):
        centres = P + W.center / sq
        r = W.radius / sq
        return np.asarray(tree.query_ball_point(_xy(centres), r * (1 + 1e-12), return_length=True), dtype=int)
    x0, x1, y0, y1 = W.bbox()
    mid = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    rad = 0.5 * math.hypot(x1 - x0, y1 - y0) * (1 + 1e-9)
    lists = tree.query_ball_point(_xy(P + mid / sq), rad / sq)
    lens = np.fromiter((len(a) for a in lists), dtype=int, count=len(lists))
    if lens.sum() == 0:
        return np.zeros(len(P), dtype=int)
    idx = np.fromiter((i for a in lists for i in a), dtype=int, count=int(lens.sum()))
    owner = np.repeat(np.arange(len(P)), lens)
    inside = W.contains(sq * (cfg.points[idx] - P[owner]))
    return np.bincount(owner[inside], minlength=len(P))


def _expected_many(pot: RadialPotential, P: np.ndarray, W: Window, n: int, mode: str) -> np.ndarray:
    if mode == "local_bulk":
        return pot.laplacian(P) * W.area() / math.pi
    if mode == "cdis" and isinstance(W, Disk):
        sq = math.sqrt(n)
        d = np.abs(P + W.center / sq)
        return n / math.pi * pot.laplacian(P) * _lens_area(d, W.radius / sq, pot.droplet_radius())
    return np.array([expected_count(pot, p, W, n, mode) for p in P])


def sup_discrepancy(cfg: Configuration, pot: RadialPotential, W: Window, n: int, spacing: float | None = None,
                    offset_seed: int | None = None, mode: str = "cdis", region=None, margin: float = 10.0):
    """Grid maximum of ``|count_in - expected_count|`` over ``p``.

    ``p`` runs over a square lattice of the given spacing (default
    ``0.2/sqrt(n)``) covering ``S + B_{margin/sqrt(n)}``, shifted by a random
    offset drawn from ``offset_seed``.  ``region`` (a predicate on a ``p``
    array) restricts the sup.  Returns ``(sup, argmax p, count, expected)``.
    The grid maximum never exceeds the true supremum.
    """
    sq = math.sqrt(n)
    spacing = 0.2 / sq if spacing is None else spacing
    if spacing > 0.2 / sq * (1 + 1e-12):
        raise DomainError("p-grid spacing must be at most 0.2/sqrt(n)")
    off = (0.0, 0.0) if offset_seed is None else tuple(np.random.default_rng(offset_seed).random(2) * spacing)
    P = _p_grid(pot, n, spacing, off, margin / sq)
    if region is not None:
        P = P[region(P)]
    if len(P) == 0:
        return math.nan, complex("nan"), 0, math.nan
    counts = _counts(cfg, P, W, n)
    expect = _expected_many(pot, P, W, n, mode)
    dev = np.abs(counts - expect)
    j = int(np.argmax(dev))
    return float(dev[j]), complex(P[j]), int(counts[j]), float(expect[j])


def theorem_normaliser(W: Window) -> float:
    """``H^1(∂W) sqrt(log|W|) log(1 + log|W|)``, the growth of the boundary law."""
    A = W.area()
    if A < 2:
        raise DomainError("the normaliser needs |W| >= 2")
    L = math.log(A)
    return W.perimeter() * math.sqrt(L) * math.log1p(L)


@dataclass(frozen=True)
class DiscrepancyRow:
    n: int
    c: float
    seed: int
    window: str
    scale: float
    p: complex
    count: int
    expected: float
    discrepancy: float
    flag: str = ""

    def fields(self) -> list:
        f = lambda x: f"{x:.17g}"
        return [self.n, f(self.c), self.seed, self.window, f(self.scale), f(self.p.real), f(self.p.imag),
                self.count, f(self.expected), f(self.discrepancy), self.flag]

    def csv(self) -> str:
        return _csv_lines([self.fields()]).rstrip("\n")


CSV_HEADER = "n,c,seed,window,scale,p_re,p_im,count,expected,discrepancy,flag"


def _csv_lines(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


@dataclass
class DiscrepancyReport:
    rows: list[DiscrepancyRow] = field(default_factory=list)
    fits: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        return _csv_lines([CSV_HEADER.split(",")] + [r.fields() for r in self.rows])

    def summary(self) -> dict:
        return {"fits": self.fits, "rows": len(self.rows)}


def _seed_sample(n: int, pot: RadialPotential, c: float, seed: int, sweeps: int, burn_in: int) -> Configuration:
    return sample(n, pot, SamplerConfig(c=c, sweeps=sweeps, burn_in=burn_in, seed=seed))


def _boundary_task(pot, c, n, seed, L_list, sweeps, burn_in, band, slope_max, cfg=None):
    R = pot.droplet_radius()
    sq = math.sqrt(n)
    cfg = cfg if cfg is not None else _seed_sample(n, pot, c, seed, sweeps, burn_in)
    region = lambda P: np.abs(sq * (R - np.abs(P))) <= band
    rows, sups = [], []
    for L in L_list:
        sup, p, cnt, exp = sup_discrepancy(cfg, pot, Disk(0j, L), n, offset_seed=seed, region=region)
        rows.append(DiscrepancyRow(n, c, seed, f"disk{L:g}", L, p, cnt, exp, sup))
        sups.append(sup)
    keep = [i for i, L in enumerate(L_list) if L >= 2]
    logL = np.log([L_list[i] for i in keep])
    fit_sups = [sups[i] for i in keep]
    ratios = [float(sups[i] / theorem_normaliser(Disk(0j, L_list[i]))) for i in keep]
    multi = len(keep) > 1
    slope = float(np.polyfit(logL, np.log(np.maximum(fit_sups, 1e-12)), 1)[0]) if multi else math.nan
    fit = {
        "slope": slope,
        "sups": [float(v) for v in sups],
        "ratios": ratios,
        "ratio_max": max(ratios, default=math.nan),
        "ratio_trend": float(np.polyfit(logL, ratios, 1)[0]) if multi else math.nan,
        "pass": bool(slope <= slope_max),
        "acceptance": cfg.meta.get("acceptance"),
    }
    return rows, fit


def boundary_sweep(pot: RadialPotential, c: float, n_list, L_list, seeds, sweeps: int = 800, burn_in: int = 500,
                   band: float = 2.0, slope_max: float = 1.4, configs: dict | None = None,
                   map_fn=map) -> DiscrepancyReport:
    """Sup discrepancy of ``Disk(L)`` windows at ``p`` with ``|sqrt(n) d(p)| <= band``.

    Per ``(n, seed)`` the fit records the least-squares slope of ``log sup``
    against ``log L`` (``L >= 2`` only) and the ratios ``sup / theorem_normaliser``.
    ``configs`` maps ``(n, seed)`` to a ready configuration and bypasses the
    sampler.  ``map_fn`` must preserve order; results are merged in task order.
    """
    L_list = sorted(float(L) for L in L_list)
    tasks = [(n, seed) for n in n_list for seed in seeds]
    configs = configs or {}
    results = list(map_fn(lambda t: _boundary_task(pot, c, t[0], t[1], L_list, sweeps, burn_in, band, slope_max,
                                                   configs.get(t)), tasks))
    report = DiscrepancyReport()
    per_seed = {}
    for (n, seed), (rows, fit) in zip(tasks, results):
        report.rows.extend(rows)
        per_seed[f"{n}/{seed}"] = fit
    passed = sum(v["pass"] for v in per_seed.values())
    report.fits = {
        "per_seed": per_seed,
        "slope_max": slope_max,
        "passed": passed,
        "total": len(per_seed),
        "majority_pass": passed * 2 > len(per_seed),
        "C_fit": max((v["ratio_max"] for v in per_seed.values()), default=math.nan),
        "L": L_list,
    }
    return report


def _bulk_task(pot, c, n, seed, windows, M_bulk, sweeps, burn_in, cfg=None):
    R = pot.droplet_radius()
    depth = M_bulk * math.log(n) / math.sqrt(n)
    if depth >= R:
        return [DiscrepancyRow(n, c, seed, wid, 1.0, complex("nan"), 0, math.nan, math.nan, "empty-bulk")
                for wid in windows]
    cfg = cfg if cfg is not None else _seed_sample(n, pot, c, seed, sweeps, burn_in)
    region = lambda P: R - np.abs(P) >= depth
    rows = []
    for wid, win in windows.items():
        sup, p, cnt, exp = sup_discrepancy(cfg, pot, win, n, offset_seed=seed, mode="local_bulk",
                                           region=region, margin=0.0)
        rows.append(DiscrepancyRow(n, c, seed, wid, 1.0, p, cnt, exp, sup))
    return rows


def bulk_sweep(pot: RadialPotential, c: float, n_list, W, seeds, M_bulk: float = 3.0, sweeps: int = 800,
               burn_in: int = 500, configs: dict | None = None, map_fn=map) -> DiscrepancyReport:
    """Sup of ``|count - ΔQ(p)|W|/π|`` over ``p`` with ``d(p, S^c) >= M_bulk log n / sqrt(n)``.

    ``W`` is a window or a mapping of window ids to windows; each is reported
    as ``sup / perimeter``.  An empty bulk region yields flagged rows.
    """
    windows = W if isinstance(W, dict) else {"W": W}
    tasks = [(n, seed) for n in n_list for seed in seeds]
    configs = configs or {}
    results = list(map_fn(lambda t: _bulk_task(pot, c, t[0], t[1], windows, M_bulk, sweeps, burn_in,
                                               configs.get(t)), tasks))
    report = DiscrepancyReport()
    ratios: dict[str, list[float]] = {k: [] for k in windows}
    for rows in results:
        report.rows.extend(rows)
        for r in rows:
            if not r.flag:
                ratios[r.window].append(float(r.discrepancy / windows[r.window].perimeter()))
    report.fits = {
        "ratio_by_window": ratios,
        "C_fit": max((max(v) for v in ratios.values() if v), default=math.nan),
        "M_bulk": M_bulk,
    }
    return report


def finite_count(pot: RadialPotential, p: complex, W: Window, n: int, rho: float, M: float, s: float,
                 alpha: float | None = None, h: float = 0.1):
    """Spectrum of ``T_{ρ,n}``: the ``W_{⌊ρn⌋}`` concentration operator on
    ``(p + W/√n) ∩ S_{M+s}``, discretised at microscopic spacing ``h``.

    Returns the spectrum, or the count above ``alpha`` when given.
    """
    N = int(math.floor(rho * n))
    sq = math.sqrt(n)
    op = build(FiniteN(N, pot), W.transformed(scale=1 / sq, shift=complex(p)), h=h / sq,
               support_radius=pot.droplet_radius() + (M + s) / sq)
    spec = spectrum(op, method="factor")
    return spec if alpha is None else counting(spec, alpha)


def limit_window(pot: RadialPotential, p: complex, W: Window, n: int, rho: float, M: float, s: float):
    """``(Ω̃, frame, m)`` with ``Ω̃ = m (e^{-iθ} W ∩ {Re z <= M + s + l})`` and
    ``m = sqrt(ρ ΔQ(p))``.  In the bulk the cut is dropped."""
    frame = micro_frame(pot, p, n)
    m = math.sqrt(rho * float(pot.laplacian(complex(p))))
    rotated = W.transformed(rotation=-frame.theta)
    if frame.bulk:
        return rotated.transformed(scale=m), frame, m
    return Cut(rotated, 0.0, M + s + frame.l).transformed(scale=m), frame, m


def limit_count(pot: RadialPotential, p: complex, W: Window, n: int, rho: float, M: float, s: float,
                alpha: float | None = None, h: float = 0.1):
    """Spectrum of the limiting operator ``P_{ml} M_{Ω̃} P_{ml}`` (see :func:`limit_window`);
    the bulk uses the Ginibre kernel."""
    Wt, frame, m = limit_window(pot, p, W, n, rho, M, s)
    op = build(Ginibre() if frame.bulk else Erfc(m * frame.l), Wt, h=h)
    spec = spectrum(op)
    return spec if alpha is None else counting(spec, alpha)


@dataclass(frozen=True)
class SandwichReport:
    n: int
    gamma: float
    C_fit: float
    M: float
    s: float
    N_minus: int
    N: int
    N_plus: int
    upper_count: int
    lower_count: int
    upper_threshold: float
    lower_threshold: float

    @property
    def nested(self) -> bool:
        return self.N_minus <= self.N <= self.N_plus

    @property
    def holds(self) -> bool:
        return self.N_plus >= self.upper_count and self.N_minus <= self.lower_count

    def to_dict(self) -> dict:
        return {**asdict(self), "nested": self.nested, "holds": self.holds}


def landau_sandwich(cfg: Configuration, pot: RadialPotential, p: complex, W: Window, n: int | None = None,
                    gamma: float = 0.3, C_fit: float = 10.0, M: float = 4.0, s: float | None = None,
                    h: float = 0.1) -> SandwichReport:
    """Compare window counts with the spectra of ``T_{1∓γ,n}``.

    Checks ``N^+ >= #{λ(T_{1-γ,n}) > 1 - γ²/C}`` and
    ``N^- <= #{λ(T_{1+γ,n}) > γ²/C}``, where ``N^±`` count points in the
    ``s/√n`` dilation and erosion of ``p + W/√n``.  ``s`` defaults to
    ``0.3 sqrt(n)`` times the minimum separation of ``cfg``.
    """
    n = cfg.n if n is None else n
    if not 0 < gamma < 1:
        raise DomainError("gamma must lie in (0, 1)")
    sq = math.sqrt(n)
    s = 0.3 * sq * min_separation(cfg) if s is None else s
    u = sq * (cfg.points - complex(p))
    N = int(np.count_nonzero(W.contains(u)))
    N_plus = int(np.count_nonzero(W.dilation_contains(u, s)))
    N_minus = int(np.count_nonzero(W.erosion_contains(u, s)))
    thr = gamma ** 2 / C_fit
    upper = finite_count(pot, p, W, n, 1 - gamma, M, s, 1 - thr, h)
    lower = finite_count(pot, p, W, n, 1 + gamma, M, s, thr, h)
    return SandwichReport(n, gamma, C_fit, M, s, N_minus, N, N_plus, upper, lower, 1 - thr, thr)
