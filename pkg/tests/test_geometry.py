import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coulomblab.errors import DomainError, InvalidWindowError, ResourceError
from coulomblab.geometry import (Cut, Disk, Polygon, Rect, area, boundary_set, parallel_area, perimeter,
                                 polyline_length, quadrature, regularity_kappa, window_from_dict)


def circle(r=1.0, m=700):
    t = 2 * math.pi * np.arange(m + 1) / m
    return [r * np.exp(1j * t)]


def test_areas():
    assert area(Disk(0j, 1)) == pytest.approx(math.pi, abs=1e-14)
    assert area(Rect(0j, 2, 3)) == pytest.approx(6, abs=1e-14)
    assert area(Cut(Disk(0j, 1), 0.0, 0.0)) == pytest.approx(math.pi / 2, abs=1e-14)


def test_perimeters():
    assert perimeter(Disk(0j, 1)) == pytest.approx(2 * math.pi, abs=1e-14)
    assert perimeter(Polygon((0j, 3 + 0j, 4j))) == pytest.approx(12, abs=1e-14)
    assert perimeter(Cut(Disk(0j, 1), 0.0, 0.0)) == pytest.approx(2 * math.pi + 2, abs=1e-14)


def test_degenerate_polygon_rejected():
    with pytest.raises(InvalidWindowError):
        Polygon((0j, 1 + 0j, 2 + 0j))
    with pytest.raises(InvalidWindowError):
        Polygon((0j, 1 + 1j, 1 + 0j, 1j))  # bow tie


def test_polygon_orientation_normalised():
    cw = Polygon((0j, 1j, 1 + 1j, 1 + 0j))
    assert area(cw) == pytest.approx(1.0)


def test_cut_status_flags():
    D = Disk(0j, 1)
    assert Cut(D, 0.0, -2.0).status == "empty"
    assert Cut(D, 0.0, 2.0).status == "full"
    assert Cut(D, 0.0, 0.3).status == "cut"
    assert area(Cut(D, 0.0, 2.0)) == pytest.approx(math.pi)
    assert area(Cut(D, 0.0, -2.0)) == 0.0


def test_cut_segment_area_matches_polygon_clip():
    # disk segment formula vs clipping a fine polygon
    seg = Cut(Disk(0.2 + 0.1j, 1.5), 0.9, 0.4).area()
    poly = Cut(Polygon(tuple(0.2 + 0.1j + 1.5 * np.exp(2j * math.pi * np.arange(4000) / 4000))), 0.9, 0.4).area()
    assert seg == pytest.approx(poly, rel=1e-5)


def test_nested_cut_area():
    W = Cut(Cut(Disk(0j, 1), 0.0, 0.0), math.pi / 2, 0.0)
    assert W.area() == pytest.approx(math.pi / 4, rel=1e-6)


@pytest.mark.parametrize("d", [
    {"type": "disk", "center": [0.5, -1], "radius": 2},
    {"type": "rect", "corner": [0, 0], "width": 1, "height": 3},
    {"type": "polygon", "vertices": [[0, 0], [2, 0], [0, 1]]},
    {"type": "cut", "base": {"type": "disk", "center": [0, 0], "radius": 1}, "theta": 0.3, "l": 0.2},
])
def test_json_round_trip(d):
    W = window_from_dict(d)
    assert window_from_dict(W.to_dict()) == W


def test_unknown_window_type():
    with pytest.raises(InvalidWindowError):
        window_from_dict({"type": "ellipse"})


def test_closed_containment():
    assert Disk(0j, 1).contains(np.array([1 + 0j]))[0]
    assert Rect(0j, 1, 1).contains(np.array([1 + 1j]))[0]


def test_kappa_circle_small_scale():
    assert regularity_kappa(circle(), 1.0) == pytest.approx(2.0, abs=0.05)


def test_kappa_circle_full_scale():
    assert regularity_kappa(circle(), 2 * math.pi) == pytest.approx(1.0, abs=0.05)


def test_kappa_segment():
    E = [np.linspace(0, 2, 201).astype(complex)]
    assert regularity_kappa(E, 1.0) == pytest.approx(1.0, abs=0.05)


def test_kappa_empty_errors():
    with pytest.raises((DomainError, ValueError)):
        regularity_kappa([], 1.0)


def test_kappa_of_cut_at_least_half_base():
    base = Disk(0j, 1)
    eta = 1.0
    kb = regularity_kappa(boundary_set(base, eta / 100), eta)
    kc = regularity_kappa(boundary_set(Cut(base, 0.0, 0.3), eta / 100), eta)
    assert kc >= kb / 2 - 0.05


def test_kappa_rrb_bounds_for_connected_boundaries():
    for W in (Disk(0j, 1.5), Rect(0j, 2, 1)):
        L = W.perimeter()
        k = regularity_kappa(boundary_set(W, L / 100), L)
        assert 1 - 0.05 <= k <= 2 + 0.05


def test_parallel_area_circle():
    assert parallel_area(circle(), 0.1) == pytest.approx(0.4 * math.pi, rel=0.02)


def test_parallel_area_segment():
    E = [np.linspace(0, 2, 401).astype(complex)]
    assert parallel_area(E, 0.5) == pytest.approx(2 * 2 * 0.5 + math.pi * 0.25, rel=0.02)


def test_parallel_area_small_radius_recovers_length():
    E = circle(m=2000)
    assert parallel_area(E, 0.01) / (2 * 0.01) == pytest.approx(polyline_length(E), rel=0.01)


def test_polyline_length():
    assert polyline_length(circle(m=4000)) == pytest.approx(2 * math.pi, rel=1e-6)


def test_quadrature_disk():
    g = quadrature(Disk(0j, 1), 0.01)
    assert g.total_weight == pytest.approx(1.0, abs=0.01)


def test_quadrature_square_exact():
    g = quadrature(Rect(0j, 1, 1), 0.1)
    assert g.total_weight == pytest.approx(1 / math.pi, abs=1e-14)
    assert np.all(Rect(0j, 1, 1).contains(g.nodes))


def test_quadrature_empty_cut():
    assert len(quadrature(Cut(Disk(0j, 1), 0.0, -3.0), 0.1)) == 0


def test_quadrature_limits():
    with pytest.raises(DomainError):
        quadrature(Disk(0j, 1), 0.3)
    with pytest.raises(ResourceError):
        quadrature(Disk(0j, 50), 0.01, cap=1000)


def test_quadrature_weight_error_bound():
    for W, h in ((Disk(0.3j, 2), 0.07), (Polygon((0j, 3 + 0j, 1 + 2j)), 0.05), (Cut(Disk(0j, 2), 1.0, 0.5), 0.1)):
        g = quadrature(W, h)
        assert abs(g.total_weight - W.area() / math.pi) <= 3 * h * W.perimeter() / math.pi


@settings(max_examples=40, deadline=None)
@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(-3, 3), st.floats(-3, 3))
def test_isoperimetric_rect(w, h, x, y):
    W = Rect(complex(x, y), w, h)
    assert W.perimeter() ** 2 >= 4 * math.pi * W.area() * (1 - 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3), st.floats(0, 2 * math.pi), st.floats(-3, 3))
def test_isoperimetric_cut_disk(r, theta, l):
    W = Cut(Disk(0j, r), theta, l)
    if W.status != "empty":
        assert W.perimeter() ** 2 >= 4 * math.pi * W.area() * (1 - 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 3), st.floats(0, 2 * math.pi), st.floats(-2, 2))
def test_cut_areas_complement(r, theta, l):
    D = Disk(0.3 - 0.2j, r)
    a = Cut(D, theta, l).area()
    b = Cut(D, (theta + math.pi) % (2 * math.pi), -l).area()
    assert a + b == pytest.approx(D.area(), rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 2), st.floats(0, 2 * math.pi), st.floats(-2, 2), st.floats(-2, 2))
def test_transform_scales_area(scale, rot, sx, sy):
    W = Polygon((0j, 2 + 0j, 1 + 1.5j))
    T = W.transformed(scale, rot, complex(sx, sy))
    assert T.area() == pytest.approx(scale ** 2 * W.area(), rel=1e-9)
    assert T.perimeter() == pytest.approx(scale * W.perimeter(), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.5, 1.5), st.floats(-3, 3), st.floats(0.0, 5.0), st.floats(0.0, 1.0), st.sampled_from([0, 1, 2]))
def test_limit_domain_area_estimate(rho, l, M, s, shape):
    from coulomblab.discrepancy import limit_window
    from coulomblab.potential import RadialPotential

    pot = RadialPotential(1.5)
    n = 10_000
    R = pot.droplet_radius()
    theta = 0.7
    p = (R - l / math.sqrt(n)) * complex(math.cos(theta), math.sin(theta))
    W = [Disk(0.3j, 2.0), Rect(-1 - 1j, 3, 2), Polygon((0j, 3 + 0j, 1 + 2j))][shape]
    Wt, frame, _ = limit_window(pot, p, W, n, rho, M, s)
    lap = float(pot.laplacian(p))
    ref = lap * Cut(W, frame.theta, frame.l).area()
    slack = abs(rho - 1) * lap * W.area() + 2 * lap * (M + s) * W.perimeter()
    assert abs(Wt.area() - ref) <= slack + 1e-9


def test_cut_disk_bbox_is_tight():
    assert Cut(Disk(0j, 2.0), 0.0, 0.0).bbox() == pytest.approx((-2.0, 0.0, -2.0, 2.0))
    x0, x1, y0, y1 = Cut(Disk(0j, 3.0), 0.7, 1.0).bbox()
    z = quadrature(Cut(Disk(0j, 3.0), 0.7, 1.0), 0.02).nodes
    assert x1 >= z.real.max() and x1 - z.real.max() < 0.05
    assert Cut(Disk(0j, 2.0), 0.0, 5.0).bbox() == Disk(0j, 2.0).bbox()
