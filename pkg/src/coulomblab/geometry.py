"""Planar observation windows and the geometry used to measure them.

Points in the plane are complex numbers throughout.  Four window shapes are
supported: :class:`Disk`, :class:`Rect`, :class:`Polygon` and :class:`Cut`
(a base window intersected with the half-plane ``Re(z e^{-i theta}) <= l``).
All windows are closed sets and immutable.

Areas are Lebesgue measure.  Quadrature weights, on the other hand, refer to
``dA = dx dy / pi``, the area element used by every kernel in the package.

For a :class:`Cut` the boundary *set* is the full base boundary together with
the chord ``base interior ∩ {Re(z e^{-i theta}) = l}``.  Perimeters and
regularity constants of cuts follow that convention; the topological boundary
is only used for distance queries.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError, InvalidWindowError, ResourceError

__all__ = [
    "Window",
    "Disk",
    "Rect",
    "Polygon",
    "Cut",
    "QuadratureGrid",
    "window_from_dict",
    "area",
    "perimeter",
    "boundary_set",
    "polyline_length",
    "regularity_kappa",
    "parallel_area",
    "quadrature",
]

# used to polygonize disks when a cut of a cut has no closed form
_DISK_POLYGON_VERTICES = 1 << 14
_REL_EPS = 1e-12


def _c(value) -> complex:
    if isinstance(value, (list, tuple)):
        return complex(value[0], value[1])
    return complex(value)


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _shoelace(v: np.ndarray) -> float:
    """Signed area of a closed polygon given by its vertices (no repeat)."""
    if len(v) < 3:
        return 0.0
    w = np.roll(v, -1)
    return 0.5 * float(np.sum(v.real * w.imag - w.real * v.imag))


def _clip_halfplane(v: np.ndarray, theta: float, l: float) -> np.ndarray:
    """Clip a polygon to ``Re(z e^{-i theta}) <= l`` (Sutherland-Hodgman)."""
    if len(v) == 0:
        return v
    rot = np.exp(-1j * theta)
    s = (v * rot).real - l
    out = []
    n = len(v)
    for i in range(n):
        a, b = v[i], v[(i + 1) % n]
        sa, sb = s[i], s[(i + 1) % n]
        if sa <= 0:
            out.append(a)
        if (sa < 0 < sb) or (sb < 0 < sa):
            t = sa / (sa - sb)
            out.append(a + t * (b - a))
    return np.asarray(out, dtype=complex)


def _orient(a, b, c):
    return (b - a).real * (c - a).imag - (b - a).imag * (c - a).real


def _self_intersects(v: np.ndarray) -> bool:
    """Proper crossing between any two non-adjacent edges of a closed polygon."""
    n = len(v)
    a, b = v, np.roll(v, -1)
    for i in range(n - 2):
        j = np.arange(i + 2, n if i > 0 else n - 1)
        if len(j) == 0:
            continue
        d1, d2 = _orient(a[j], b[j], a[i]), _orient(a[j], b[j], b[i])
        d3, d4 = _orient(a[i], b[i], a[j]), _orient(a[i], b[i], b[j])
        if np.any((d1 * d2 < 0) & (d3 * d4 < 0)):
            return True
    return False


def _point_segment_distance(z: np.ndarray, a: complex, b: complex) -> np.ndarray:
    d = b - a
    dd = abs(d) ** 2
    if dd == 0.0:
        return np.abs(z - a)
    t = np.clip(((z - a) * np.conj(d)).real / dd, 0.0, 1.0)
    return np.abs(z - (a + t * d))


def _polygon_disk_area(v: np.ndarray, center: complex, radius: float) -> float:
    """Area of a polygon intersected with a disk, summed over edge triangles at once."""
    if len(v) < 3 or radius <= 0:
        return 0.0
    a = v - center
    d = np.roll(a, -1) - a
    A = np.abs(d) ** 2
    B = 2.0 * (np.conj(a) * d).real
    C = np.abs(a) ** 2 - radius * radius
    disc = B * B - 4 * A * C
    sq = np.sqrt(np.maximum(disc, 0.0))
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = np.where((disc > 0) & (A > 0), (-B - sq) / (2 * A), 1.0)
        t2 = np.where((disc > 0) & (A > 0), (-B + sq) / (2 * A), 1.0)
    knots = [np.zeros_like(A), np.clip(t1, 0, 1), np.clip(t2, 0, 1), np.ones_like(A)]
    total = 0.0
    for t0, t1_ in zip(knots[:-1], knots[1:]):
        p, q = a + t0 * d, a + t1_ * d
        inside = np.abs(a + 0.5 * (t0 + t1_) * d) < radius
        tri = 0.5 * (np.conj(p) * q).imag
        arc = 0.5 * radius * radius * np.angle(q * np.conj(p))
        total += float(np.sum(np.where(inside, tri, arc)))
    return abs(total)


def _lens_area(d, r1: float, r2: float):
    """Area of the intersection of two disks with centers ``d`` apart (vectorized in d)."""
    d = np.asarray(d, dtype=float)
    out = np.zeros_like(d)
    small, big = min(r1, r2), max(r1, r2)
    inside = d <= big - small
    out[inside] = math.pi * small * small
    part = (d > big - small) & (d < r1 + r2)
    if np.any(part):
        dp = d[part]
        c1 = np.clip((dp * dp + r1 * r1 - r2 * r2) / (2 * dp * r1), -1.0, 1.0)
        c2 = np.clip((dp * dp + r2 * r2 - r1 * r1) / (2 * dp * r2), -1.0, 1.0)
        k = (-dp + r1 + r2) * (dp + r1 - r2) * (dp - r1 + r2) * (dp + r1 + r2)
        out[part] = r1 * r1 * np.arccos(c1) + r2 * r2 * np.arccos(c2) - 0.5 * np.sqrt(np.maximum(k, 0.0))
    return out


class Window:
    """Common interface of all observation windows."""

    kind = "window"

    def area(self) -> float:
        raise NotImplementedError

    def perimeter(self) -> float:
        raise NotImplementedError

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    def bbox(self) -> tuple[float, float, float, float]:
        raise NotImplementedError

    def boundary(self, spacing: float, full_base: bool = True) -> list[np.ndarray]:
        """Polylines sampling the boundary set with segment length <= spacing."""
        raise NotImplementedError

    def line_intervals(self, q0: complex, u: complex) -> list[tuple[float, float]]:
        """Parameter intervals ``t`` where ``q0 + t*u`` lies in the window."""
        raise NotImplementedError

    def transformed(self, scale: float = 1.0, rotation: float = 0.0, shift: complex = 0.0) -> "Window":
        """Image under ``z -> shift + scale * exp(i rotation) * z``."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError

    def polygon(self):
        """Exact polygonal description, or ``None`` if the window has curved edges."""
        return None

    def distance_to_boundary(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        x0, x1, y0, y1 = self.bbox()
        spacing = max(x1 - x0, y1 - y0, 1e-12) / 4000
        pts = np.concatenate(self.boundary(spacing, full_base=False) or [np.empty(0, complex)])
        if len(pts) == 0:
            return np.full(z.shape, np.inf)
        tree = cKDTree(np.column_stack([pts.real, pts.imag]))
        d, _ = tree.query(np.column_stack([z.ravel().real, z.ravel().imag]))
        return d.reshape(z.shape)

    def diameter(self) -> float:
        x0, x1, y0, y1 = self.bbox()
        return math.hypot(x1 - x0, y1 - y0)

    def translated(self, shift: complex) -> "Window":
        return self.transformed(shift=shift)

    def disk_intersection_area(self, center: complex, radius: float) -> float:
        """Lebesgue measure of ``W ∩ B(center, radius)``."""
        poly = self.polygon()
        if poly is None:
            poly = _polygonize(self)
        return _polygon_disk_area(poly, center, radius)

    def dilation_contains(self, z, s: float) -> np.ndarray:
        """Membership in ``{z : d(z, W) < s}``."""
        z = np.asarray(z, dtype=complex)
        return self.contains(z) | (self.distance_to_boundary(z) < s)

    def erosion_contains(self, z, s: float) -> np.ndarray:
        """Membership in ``{z in W : d(z, boundary) > s}``."""
        z = np.asarray(z, dtype=complex)
        return self.contains(z) & (self.distance_to_boundary(z) > s)


@dataclass(frozen=True)
class Disk(Window):
    center: complex = 0j
    radius: float = 1.0
    kind = "disk"

    def __post_init__(self):
        object.__setattr__(self, "center", _c(self.center))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise InvalidWindowError(f"disk radius must be positive, got {self.radius}")

    def area(self):
        return math.pi * self.radius ** 2

    def perimeter(self):
        return 2 * math.pi * self.radius

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(z - self.center) <= self.radius * (1 + _REL_EPS)

    def bbox(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)

    def boundary(self, spacing, full_base=True):
        m = max(16, int(math.ceil(2 * math.pi * self.radius / spacing)))
        t = np.linspace(0.0, 2 * math.pi, m + 1)
        return [self.center + self.radius * np.exp(1j * t)]

    def line_intervals(self, q0, u):
        u = u / abs(u)
        w = q0 - self.center
        b = (np.conj(u) * w).real
        c = abs(w) ** 2 - self.radius ** 2
        disc = b * b - c
        if disc <= 0:
            return []
        sq = math.sqrt(disc)
        return [(-b - sq, -b + sq)]

    def transformed(self, scale=1.0, rotation=0.0, shift=0.0):
        return Disk(shift + scale * np.exp(1j * rotation) * self.center, self.radius * scale)

    def distance_to_boundary(self, z):
        z = np.asarray(z, dtype=complex)
        return np.abs(np.abs(z - self.center) - self.radius)

    def disk_intersection_area(self, center, radius):
        return float(_lens_area(abs(_c(center) - self.center), self.radius, radius))

    def dilation_contains(self, z, s):
        z = np.asarray(z, dtype=complex)
        return np.abs(z - self.center) < self.radius + s

    def erosion_contains(self, z, s):
        z = np.asarray(z, dtype=complex)
        return np.abs(z - self.center) < self.radius - s

    def to_dict(self):
        return {"type": "disk", "center": _pair(self.center), "radius": float(self.radius)}


@dataclass(frozen=True)
class Polygon(Window):
    """Simple polygon.  Vertices are stored counterclockwise without repetition."""

    vertices: tuple = field(default_factory=tuple)
    kind = "polygon"

    def __post_init__(self):
        v = np.asarray([_c(p) for p in self.vertices], dtype=complex)
        if len(v) > 1 and v[0] == v[-1]:
            v = v[:-1]
        if len(v) < 3:
            raise InvalidWindowError("polygon needs at least three vertices")
        a = _shoelace(v)
        if abs(a) <= 1e-14 * max(1.0, float(np.max(np.abs(v))) ** 2):
            raise InvalidWindowError("degenerate polygon with zero area")
        if a < 0:
            v = v[::-1]
        if _self_intersects(v):
            raise InvalidWindowError("polygon is not simple")
        object.__setattr__(self, "vertices", tuple(complex(p) for p in v))

    @property
    def _v(self) -> np.ndarray:
        return np.asarray(self.vertices, dtype=complex)

    def polygon(self):
        return self._v

    def area(self):
        return _shoelace(self._v)

    def perimeter(self):
        v = self._v
        return float(np.sum(np.abs(np.roll(v, -1) - v)))

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        v = self._v
        w = np.roll(v, -1)
        x, y = z.real, z.imag
        inside = np.zeros(z.shape, dtype=bool)
        on_edge = np.zeros(z.shape, dtype=bool)
        scale = max(1.0, float(np.max(np.abs(v))))
        for a, b in zip(v, w):
            cond = (a.imag > y) != (b.imag > y)
            with np.errstate(divide="ignore", invalid="ignore"):
                xint = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            inside ^= cond & (x < xint)
            on_edge |= _point_segment_distance(z, a, b) <= _REL_EPS * scale
        return inside | on_edge

    def bbox(self):
        v = self._v
        return (float(v.real.min()), float(v.real.max()), float(v.imag.min()), float(v.imag.max()))

    def boundary(self, spacing, full_base=True):
        v = self._v
        pts = []
        for a, b in zip(v, np.roll(v, -1)):
            m = max(1, int(math.ceil(abs(b - a) / spacing)))
            pts.append(a + (b - a) * np.arange(m) / m)
        pts.append(v[:1])
        return [np.concatenate(pts)]

    def line_intervals(self, q0, u):
        u = u / abs(u)
        v = self._v
        ts = []
        for a, b in zip(v, np.roll(v, -1)):
            d = b - a
            den = (np.conj(u) * d).imag
            if den == 0.0:
                continue
            # solve q0 + t u = a + s d
            w = a - q0
            t = (np.conj(w) * d).imag / den
            s = (np.conj(w) * u).imag / den
            if -1e-12 <= s <= 1 + 1e-12:
                ts.append(t)
        ts = sorted(set(ts))
        out = []
        for t0, t1 in zip(ts[:-1], ts[1:]):
            if t1 - t0 <= 0:
                continue
            if self.contains(q0 + 0.5 * (t0 + t1) * u):
                if out and abs(out[-1][1] - t0) < 1e-12:
                    out[-1] = (out[-1][0], t1)
                else:
                    out.append((t0, t1))
        return out

    def transformed(self, scale=1.0, rotation=0.0, shift=0.0):
        return Polygon(tuple(shift + scale * np.exp(1j * rotation) * self._v))

    def distance_to_boundary(self, z):
        z = np.asarray(z, dtype=complex)
        v = self._v
        d = np.full(z.shape, np.inf)
        for a, b in zip(v, np.roll(v, -1)):
            d = np.minimum(d, _point_segment_distance(z, a, b))
        return d

    def to_dict(self):
        return {"type": "polygon", "vertices": [_pair(p) for p in self.vertices]}


@dataclass(frozen=True)
class Rect(Window):
    """Axis-aligned rectangle with lower-left ``corner``."""

    corner: complex = 0j
    width: float = 1.0
    height: float = 1.0
    kind = "rect"

    def __post_init__(self):
        object.__setattr__(self, "corner", _c(self.corner))
        if not (self.width > 0 and self.height > 0):
            raise InvalidWindowError("rectangle sides must be positive")

    def polygon(self):
        c = self.corner
        return np.array([c, c + self.width, c + self.width + 1j * self.height, c + 1j * self.height])

    def _as_polygon(self) -> Polygon:
        return Polygon(tuple(self.polygon()))

    def area(self):
        return self.width * self.height

    def perimeter(self):
        return 2 * (self.width + self.height)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        c = self.corner
        tx = _REL_EPS * max(1.0, abs(c.real) + self.width)
        ty = _REL_EPS * max(1.0, abs(c.imag) + self.height)
        return ((z.real >= c.real - tx) & (z.real <= c.real + self.width + tx)
                & (z.imag >= c.imag - ty) & (z.imag <= c.imag + self.height + ty))

    def bbox(self):
        c = self.corner
        return (c.real, c.real + self.width, c.imag, c.imag + self.height)

    def boundary(self, spacing, full_base=True):
        return self._as_polygon().boundary(spacing)

    def line_intervals(self, q0, u):
        return self._as_polygon().line_intervals(q0, u)

    def transformed(self, scale=1.0, rotation=0.0, shift=0.0):
        if math.remainder(rotation, 2 * math.pi) == 0.0:
            return Rect(shift + scale * self.corner, self.width * scale, self.height * scale)
        return self._as_polygon().transformed(scale, rotation, shift)

    def distance_to_boundary(self, z):
        return self._as_polygon().distance_to_boundary(z)

    def to_dict(self):
        return {"type": "rect", "corner": _pair(self.corner), "width": float(self.width),
                "height": float(self.height)}


@dataclass(frozen=True)
class Cut(Window):
    """``base ∩ {z : Re(z e^{-i theta}) <= l}``.

    Cuts that miss the base entirely give an empty window (``status == "empty"``);
    cuts beyond the base leave it unchanged (``status == "full"``).  Neither is an
    error.
    """

    base: Window = field(default_factory=Disk)
    theta: float = 0.0
    l: float = 0.0
    kind = "cut"

    def __post_init__(self):
        if not isinstance(self.base, Window):
            raise InvalidWindowError("cut base must be a window")
        object.__setattr__(self, "theta", float(self.theta) % (2 * math.pi))
        object.__setattr__(self, "l", float(self.l))

    @property
    def normal(self) -> complex:
        return complex(np.exp(1j * self.theta))

    def _in_halfplane(self, z, tol=0.0):
        return (np.asarray(z, dtype=complex) * np.conj(self.normal)).real <= self.l + tol

    def polygon(self):
        bp = self.base.polygon()
        if bp is None:
            return None
        return _clip_halfplane(bp, self.theta, self.l)

    def area(self):
        if isinstance(self.base, Disk):
            r = self.base.radius
            d = self.l - (self.base.center * np.conj(self.normal)).real
            if d >= r:
                return self.base.area()
            if d <= -r:
                return 0.0
            return r * r * math.acos(-d / r) + d * math.sqrt(r * r - d * d)
        return max(_shoelace(_polygonize(self)), 0.0)

    @property
    def status(self) -> str:
        a = self.area()
        if a <= 0.0:
            return "empty"
        if a >= self.base.area() * (1 - 1e-12):
            return "full"
        return "cut"

    def chord_intervals(self) -> list[tuple[float, float]]:
        """Parameter intervals of the cut line inside the base.

        The line is ``l e^{i theta} + t i e^{i theta}``.
        """
        q0 = self.l * self.normal
        return self.base.line_intervals(q0, 1j * self.normal)

    def chord_length(self) -> float:
        return float(sum(t1 - t0 for t0, t1 in self.chord_intervals()))

    def area_status_ok(self) -> bool:
        return self.status != "empty"

    def perimeter(self):
        if self.status == "empty":
            return 0.0
        return self.base.perimeter() + self.chord_length()

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        tol = _REL_EPS * max(1.0, abs(self.l))
        return self.base.contains(z) & self._in_halfplane(z, tol)

    def bbox(self):
        poly = self.polygon()
        if poly is not None and len(poly):
            return (float(poly.real.min()), float(poly.real.max()),
                    float(poly.imag.min()), float(poly.imag.max()))
        if isinstance(self.base, Disk) and self.status == "cut":
            c, r = self.base.center, self.base.radius
            pts = [c + r * u for u in (1, -1, 1j, -1j) if self._in_halfplane(c + r * u)]
            q0, u = self.l * self.normal, 1j * self.normal
            pts += [q0 + t * u for iv in self.chord_intervals() for t in iv]
            pts = np.array(pts)
            return (float(pts.real.min()), float(pts.real.max()), float(pts.imag.min()), float(pts.imag.max()))
        return self.base.bbox()

    def boundary(self, spacing, full_base=True):
        lines = []
        for pl in self.base.boundary(spacing, full_base):
            if full_base:
                lines.append(pl)
                continue
            keep = self._in_halfplane(pl, 1e-12)
            # split the base polyline into runs lying in the half-plane
            idx = np.flatnonzero(np.diff(np.concatenate([[0], keep.astype(int), [0]])))
            for s, e in zip(idx[::2], idx[1::2]):
                if e - s >= 2:
                    lines.append(pl[s:e])
        q0, u = self.l * self.normal, 1j * self.normal
        for t0, t1 in self.chord_intervals():
            m = max(1, int(math.ceil((t1 - t0) / spacing)))
            lines.append(q0 + u * np.linspace(t0, t1, m + 1))
        return lines

    def line_intervals(self, q0, u):
        u = u / abs(u)
        rot = np.conj(self.normal)
        a = (q0 * rot).real
        b = (u * rot).real
        if b == 0.0:
            lim = (-np.inf, np.inf) if a <= self.l else None
        elif b > 0:
            lim = (-np.inf, (self.l - a) / b)
        else:
            lim = ((self.l - a) / b, np.inf)
        if lim is None:
            return []
        out = []
        for t0, t1 in self.base.line_intervals(q0, u):
            s0, s1 = max(t0, lim[0]), min(t1, lim[1])
            if s1 > s0:
                out.append((s0, s1))
        return out

    def transformed(self, scale=1.0, rotation=0.0, shift=0.0):
        theta = self.theta + rotation
        l = scale * self.l + (shift * np.exp(-1j * theta)).real
        return Cut(self.base.transformed(scale, rotation, shift), theta, l)

    def disk_intersection_area(self, center, radius):
        return _polygon_disk_area(_polygonize(self), center, radius)

    def to_dict(self):
        return {"type": "cut", "base": self.base.to_dict(), "theta": self.theta, "l": self.l}


@functools.lru_cache(maxsize=64)
def _polygonize(w: Window) -> np.ndarray:
    poly = w.polygon()
    if poly is not None:
        return poly
    if isinstance(w, Disk):
        # circumscribed-area-matched polygon: scale so the polygon area equals pi r^2
        m = _DISK_POLYGON_VERTICES
        t = 2 * math.pi * np.arange(m) / m
        rr = w.radius * math.sqrt(2 * math.pi / (m * math.sin(2 * math.pi / m)))
        return w.center + rr * np.exp(1j * t)
    if isinstance(w, Cut):
        return _clip_halfplane(_polygonize(w.base), w.theta, w.l)
    raise InvalidWindowError(f"cannot polygonize {type(w).__name__}")


def window_from_dict(d: dict) -> Window:
    """Inverse of ``Window.to_dict``."""
    try:
        kind = d["type"]
        if kind == "disk":
            return Disk(_c(d["center"]), float(d["radius"]))
        if kind == "rect":
            return Rect(_c(d["corner"]), float(d["width"]), float(d["height"]))
        if kind == "polygon":
            return Polygon(tuple(_c(p) for p in d["vertices"]))
        if kind == "cut":
            return Cut(window_from_dict(d["base"]), float(d["theta"]), float(d["l"]))
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidWindowError(f"malformed window description: {exc}") from exc
    raise InvalidWindowError(f"unknown window type {d.get('type')!r}")


def area(w: Window) -> float:
    return w.area()


def perimeter(w: Window) -> float:
    return w.perimeter()


def boundary_set(w: Window, spacing: float) -> list[np.ndarray]:
    """Boundary set of ``w`` as polylines (cuts include the full base boundary)."""
    return w.boundary(spacing, full_base=True)


def _segments(E) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(E, np.ndarray):
        E = [E]
    a, b = [], []
    for pl in E:
        pl = np.asarray(pl, dtype=complex)
        if len(pl) >= 2:
            a.append(pl[:-1])
            b.append(pl[1:])
        elif len(pl) == 1:
            a.append(pl)
            b.append(pl)
    if not a:
        return np.empty(0, complex), np.empty(0, complex)
    return np.concatenate(a), np.concatenate(b)


def polyline_length(E) -> float:
    a, b = _segments(E)
    return float(np.sum(np.abs(b - a)))


def _h1_in_balls(a, b, centers, r):
    """H^1 of the polyline segments ``a->b`` inside ``B_r(c)`` for each center."""
    d = b - a
    A = np.abs(d) ** 2
    w = a[None, :] - centers[:, None]
    B = (np.conj(w) * d[None, :]).real
    C = np.abs(w) ** 2 - r * r
    disc = B * B - A[None, :] * C
    ok = (disc > 0) & (A[None, :] > 0)
    sq = np.sqrt(np.where(ok, disc, 0.0))
    Asafe = np.where(A > 0, A, 1.0)[None, :]
    t0 = np.clip((-B - sq) / Asafe, 0.0, 1.0)
    t1 = np.clip((-B + sq) / Asafe, 0.0, 1.0)
    frac = np.where(ok, np.maximum(t1 - t0, 0.0), 0.0)
    return frac @ np.sqrt(A)


def regularity_kappa(E, eta: float, ratio: float = 1.05, r_min: float | None = None) -> float:
    """Numerical lower Ahlfors constant of a polyline boundary set at scale ``eta``.

    Infimum of ``H^1(E ∩ B_r(z)) / r`` over polyline vertices ``z`` and radii on
    the geometric grid ``eta, eta/ratio, ...`` down to ``r_min`` (default: two
    segment lengths).  Centers between vertices are not visited, so the value
    can overshoot the true infimum slightly.
    """
    a, b = _segments(E)
    if len(a) == 0:
        raise DomainError("boundary set is empty")
    if eta <= 0:
        raise DomainError("eta must be positive")
    seg = float(np.max(np.abs(b - a)))
    if r_min is None:
        r_min = min(eta, 2.0 * seg) if seg > 0 else eta
    radii = [eta]
    while radii[-1] / ratio >= r_min:
        radii.append(radii[-1] / ratio)
    centers = np.unique(np.concatenate([a, b]))
    best = np.inf
    chunk = max(1, 2_000_000 // max(len(a), 1))
    for r in radii:
        for s in range(0, len(centers), chunk):
            h1 = _h1_in_balls(a, b, centers[s:s + chunk], r)
            best = min(best, float(h1.min()) / r)
    return best


def parallel_area(E, r: float, resolution: int = 40) -> float:
    """Area of ``E + B_r(0)`` for a polyline set ``E`` by fine-grid counting.

    The counting grid has ``resolution`` cells per ``r`` and is restricted to
    coarse cells near ``E``.
    """
    if r <= 0:
        return 0.0
    a, b = _segments(E)
    if len(a) == 0:
        return 0.0
    # densify the polyline so nearest-sample distance is accurate
    step = r / 20.0
    pts = []
    for pa, pb in zip(a, b):
        m = max(1, int(math.ceil(abs(pb - pa) / step)))
        pts.append(pa + (pb - pa) * np.arange(m + 1) / m)
    pts = np.concatenate(pts)
    tree = cKDTree(np.column_stack([pts.real, pts.imag]))
    g = r / resolution
    cell = r
    keys = np.unique(np.column_stack([np.floor(pts.real / cell), np.floor(pts.imag / cell)]).astype(np.int64), axis=0)
    off = np.array([(i, j) for i in (-1, 0, 1) for j in (-1, 0, 1)], dtype=np.int64)
    keys = np.unique((keys[:, None, :] + off[None, :, :]).reshape(-1, 2), axis=0)
    k = np.arange(resolution)
    sub = (k + 0.5) * g
    sx, sy = np.meshgrid(sub, sub, indexing="ij")
    sx, sy = sx.ravel(), sy.ravel()
    count = 0
    block = max(1, 400_000 // len(sx))
    for s in range(0, len(keys), block):
        kk = keys[s:s + block]
        X = (kk[:, 0:1] * cell + sx[None, :]).ravel()
        Y = (kk[:, 1:2] * cell + sy[None, :]).ravel()
        d, _ = tree.query(np.column_stack([X, Y]), distance_upper_bound=r * 1.000001)
        count += int(np.count_nonzero(d <= r))
    return count * g * g


@dataclass(frozen=True)
class QuadratureGrid:
    """Cell-center lattice restricted to a window; every node has weight ``h^2/pi``."""

    nodes: np.ndarray
    weight: float
    h: float

    def __len__(self):
        return len(self.nodes)

    @property
    def total_weight(self) -> float:
        return self.weight * len(self.nodes)


def quadrature(w: Window, h: float, cap: int = 2_000_000) -> QuadratureGrid:
    """Lattice ``((i+1/2)h, (j+1/2)h)`` clipped to ``w``.

    The lattice is anchored at the origin, so translating a window by a
    multiple of ``h`` translates its grid.
    """
    if h <= 0:
        raise DomainError("h must be positive")
    if h > 0.25 + 1e-15:
        raise DomainError(f"grid spacing {h} exceeds 0.25")
    x0, x1, y0, y1 = w.bbox()
    if w.kind == "cut" and w.status == "empty":
        return QuadratureGrid(np.empty(0, complex), h * h / math.pi, h)
    diam = w.diameter()
    if h > diam / 4 * (1 + 1e-12):
        raise DomainError(f"grid spacing {h} exceeds diam/4 = {diam / 4}")
    i = np.arange(math.floor(x0 / h - 0.5), math.ceil(x1 / h - 0.5) + 1)
    j = np.arange(math.floor(y0 / h - 0.5), math.ceil(y1 / h - 0.5) + 1)
    xs, ys = (i + 0.5) * h, (j + 0.5) * h
    if len(xs) * len(ys) > 20 * cap:
        raise ResourceError(f"bounding box holds {len(xs) * len(ys)} lattice points")
    nodes = []
    total = 0
    rows = max(1, 1_000_000 // max(len(ys), 1))
    for s in range(0, len(xs), rows):
        Z = (xs[s:s + rows, None] + 1j * ys[None, :]).ravel()
        Z = Z[w.contains(Z)]
        total += len(Z)
        if total > cap:
            raise ResourceError(f"quadrature grid exceeds cap of {cap} nodes")
        nodes.append(Z)
    nodes = np.concatenate(nodes) if nodes else np.empty(0, complex)
    return QuadratureGrid(nodes, h * h / math.pi, h)
