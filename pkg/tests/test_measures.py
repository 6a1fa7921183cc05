import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rktlab.errors import DomainError
from rktlab.measures import (
    Arc,
    AreaDensity,
    BoundaryDensity,
    CarlesonWindow,
    Measure,
    arclength,
    boundary_rn_lower_bound,
    carleson_window,
    measure_from_dict,
    measure_to_dict,
    normalized_arclength,
    refine_window_to_arc,
    upper_half_arclength,
    window_infimum_scan,
    window_mass,
)
from rktlab.numerics import TWO_PI


def oracle_window_mass(mu: Measure, w: CarlesonWindow) -> float:
    """Independent direct implementation: clipped piece-by-piece sums."""
    r_lo = 1.0 - w.depth
    lo = w.arc.start
    total = 0.0
    # boundary: integrate the step function by brute subdivision of the arc
    m = 200_000
    ts = lo + (np.arange(m) + 0.5) * (w.arc.length / m)
    total += float(np.sum(mu.boundary.value_at(ts))) * (w.arc.length / m)
    for z, mass in mu.atoms:
        if abs(z) == 0.0:
            continue
        ang = math.atan2(z.imag, z.real)
        d = abs((ang - w.arc.center + math.pi) % TWO_PI - math.pi)
        if abs(z) >= r_lo and d <= w.arc.length / 2:
            total += mass
    if mu.area is not None:
        for r0, r1, a0, a1, val in mu.area.cells():
            rlo, rhi = max(r0, r_lo), min(r1, 1.0)
            if rhi <= rlo:
                continue
            ts = np.linspace(a0, a1, 20_001)
            inside = np.array([1.0 if w.arc.contains(t) else 0.0 for t in 0.5 * (ts[:-1] + ts[1:])])
            ang_len = float(np.sum(inside)) * (a1 - a0) / 20_000
            total += val * 0.5 * (rhi**2 - rlo**2) * ang_len
    return total


class TestArc:
    def test_wrapping_contains(self):
        arc = Arc(0.0, 1.0)
        assert arc.contains(0.49)
        assert arc.contains(-0.49)
        assert not arc.contains(0.51)
        arc2 = Arc(2 * math.pi - 0.1, 0.4)
        assert arc2.contains(0.05)

    def test_invalid(self):
        with pytest.raises(DomainError):
            Arc(0.0, 0.0)
        with pytest.raises(DomainError):
            Arc(0.0, 7.0)

    def test_window_depth_clamped(self):
        w = carleson_window(Arc(0.0, math.pi))
        assert w.depth == 1.0
        w2 = carleson_window(Arc(0.0, 0.25))
        assert w2.depth == 0.25


class TestWindowMass:
    def test_arclength_gives_arc_length(self):
        mu = arclength()
        for arc in (Arc(0.3, 0.7), Arc(5.9, 1.2), Arc(0.0, TWO_PI)):
            for h in (0.1, 0.5, 1.0):
                assert window_mass(mu, CarlesonWindow(arc, h)) == pytest.approx(arc.length, rel=1e-13)

    def test_atom_below_depth(self):
        mu = Measure(atoms=((0.5 + 0.0j, 1.0),))
        assert window_mass(mu, CarlesonWindow(Arc(0.0, 1.0), 0.3)) == 0.0

    def test_atom_inside_window(self):
        mu = Measure(atoms=((0.5 + 0.0j, 1.0),))
        assert window_mass(mu, CarlesonWindow(Arc(0.0, 0.2), 0.6)) == 1.0

    def test_additivity_over_partition(self):
        mu = Measure(
            atoms=((0.93 * np.exp(0.37j), 0.7), (0.99 * np.exp(2.1j), 0.4)),
            boundary=BoundaryDensity(np.array([0.0, 1.0, 4.0]), np.array([0.3, 1.7, 0.3])),
            area=AreaDensity.constant(0.5),
        )
        arc = Arc(0.8, 1.6)
        h = arc.length / 8
        whole = window_mass(mu, CarlesonWindow(arc, h))
        parts = sum(
            window_mass(mu, CarlesonWindow(Arc(arc.start + (k + 0.5) * arc.length / 8, arc.length / 8), h))
            for k in range(8)
        )
        assert abs(parts - whole) <= 1e-12 * max(1.0, whole)

    def test_oracle_agreement(self):
        mu = Measure(
            atoms=((0.9 * np.exp(1.3j), 0.25),),
            boundary=BoundaryDensity(np.array([0.5, 2.0, 5.0]), np.array([0.2, 1.1, 0.0])),
            area=AreaDensity(
                np.array([0.0, 0.5, 1.0]),
                np.array([0.0, math.pi, TWO_PI]),
                np.array([[0.3, 0.0], [0.1, 0.9]]),
            ),
        )
        for arc, h in ((Arc(1.0, 0.8), 0.4), (Arc(6.0, 1.5), 0.9), (Arc(3.0, 2.5), 1.0)):
            w = CarlesonWindow(arc, h)
            assert window_mass(mu, w) == pytest.approx(oracle_window_mass(mu, w), rel=2e-4)

    @given(
        center=st.floats(0, TWO_PI - 1e-9),
        length=st.floats(0.01, 2.0),
        h1=st.floats(0.05, 0.5),
        h2=st.floats(0.5, 1.0),
    )
    @settings(max_examples=50, deadline=None, derandomize=True)
    def test_monotone_in_depth(self, center, length, h1, h2):
        mu = Measure(
            atoms=((0.7 * np.exp(0.9j), 0.5),),
            boundary=BoundaryDensity(np.array([0.0, 3.0]), np.array([0.4, 0.1])),
            area=AreaDensity.constant(0.2),
        )
        arc = Arc(center, length)
        m1 = window_mass(mu, CarlesonWindow(arc, min(h1, h2)))
        m2 = window_mass(mu, CarlesonWindow(arc, max(h1, h2)))
        assert m1 <= m2 + 1e-12

    @given(center=st.floats(0, TWO_PI - 1e-9), length=st.floats(0.01, 1.0), h=st.floats(0.05, 1.0))
    @settings(max_examples=50, deadline=None, derandomize=True)
    def test_monotone_in_arc(self, center, length, h):
        mu = Measure(
            boundary=BoundaryDensity(np.array([0.0, 2.0, 4.0]), np.array([0.5, 0.0, 1.2])),
            area=AreaDensity.constant(0.3),
        )
        small = Arc(center, length)
        big = Arc(center, min(2.0 * length, TWO_PI))
        assert window_mass(mu, CarlesonWindow(small, h)) <= window_mass(mu, CarlesonWindow(big, h)) + 1e-12


class TestWindowScan:
    def test_arclength_ratio_one(self):
        scan = window_infimum_scan(arclength(), 6)
        assert scan.ratio == pytest.approx(1.0, abs=1e-12)
        for _, ratio, _ in scan.table:
            assert ratio == pytest.approx(1.0, abs=1e-12)

    def test_half_circle_starves(self):
        scan = window_infimum_scan(upper_half_arclength(), 12)
        assert scan.ratio < 2.0**-10
        assert math.pi < scan.witness.center < TWO_PI

    def test_half_plus_atoms_deep_ratio(self):
        # density 1/2 everywhere plus a few boundary atoms: deep arcs that
        # miss every atom see exactly ratio 1/2
        atoms = tuple((np.exp(2j * math.pi * k / 8), 0.05) for k in range(8))
        mu = Measure(atoms=atoms, boundary=BoundaryDensity.constant(0.5))
        scan = window_infimum_scan(mu, 8)
        assert scan.ratio == pytest.approx(0.5, abs=1e-12)
        # brute force over the scanned arcs with the oracle mass
        g = 6
        length = TWO_PI * 2.0**-g
        ratios = []
        for m in range(1, 2 ** (g + 1) + 1):
            arc = Arc(0.5 * length * m, length)
            ratios.append(oracle_window_mass(mu, carleson_window(arc)) / length)
        assert min(ratios) == pytest.approx(0.5, rel=1e-3)

    def test_scan_dominates_boundary_minimum(self):
        mu = Measure(
            boundary=BoundaryDensity(np.array([0.0, 2.5]), np.array([0.8, 1.4])),
            area=AreaDensity.constant(0.1),
        )
        rn = boundary_rn_lower_bound(mu)
        for depth in (2, 5, 9):
            scan = window_infimum_scan(mu, depth)
            assert scan.ratio >= rn.value - 1e-12


class TestBoundaryRN:
    def test_constant(self):
        assert boundary_rn_lower_bound(arclength()).value == 1.0

    def test_two_pieces(self):
        mu = Measure(boundary=BoundaryDensity(np.array([0.0, math.pi]), np.array([2.0, 0.5])))
        assert boundary_rn_lower_bound(mu).value == 0.5

    def test_boundary_atoms_flagged(self):
        mu = Measure(atoms=((np.exp(0.4j), 1.0),))
        res = boundary_rn_lower_bound(mu)
        assert res.value == 0.0
        assert res.boundary_atoms_present

    def test_interior_atom_not_flagged(self):
        mu = Measure(atoms=((0.5 + 0.0j, 1.0),), boundary=BoundaryDensity.constant(1.0))
        res = boundary_rn_lower_bound(mu)
        assert res.value == 1.0
        assert not res.boundary_atoms_present

    @given(center=st.floats(0, TWO_PI - 1e-9), length=st.floats(0.01, 2.0))
    @settings(max_examples=50, deadline=None, derandomize=True)
    def test_lower_bound_implies_window_ratio(self, center, length):
        # density >= c forces every window ratio >= c
        mu = Measure(boundary=BoundaryDensity(np.array([0.0, 1.0, 3.0]), np.array([0.7, 1.9, 0.9])))
        arc = Arc(center, length)
        ratio = window_mass(mu, carleson_window(arc)) / arc.length
        assert ratio >= 0.7 - 1e-12


class TestRefineToArc:
    def test_arclength_constant(self):
        masses = refine_window_to_arc(arclength(), Arc(1.0, 0.8), [0.5, 0.25, 0.125])
        assert np.allclose(masses, 0.8)

    def test_area_measure_annulus_formula(self):
        mu = Measure(area=AreaDensity.constant(1.0))
        arc = Arc(0.0, 1.0)
        depths = [0.5, 0.25, 0.125, 0.0625]
        masses = refine_window_to_arc(mu, arc, depths)
        expected = [h * (1.0 - h / 2.0) for h in depths]  # |I| * (1 - (1-h)^2)/2
        assert np.allclose(masses, expected, rtol=1e-14)

    def test_boundary_atom_isolated_in_limit(self):
        mu = Measure(
            atoms=((np.exp(0.2j), 0.3), (0.5 * np.exp(0.2j), 9.0)),
            boundary=BoundaryDensity.constant(1.0),
        )
        arc = Arc(0.2, 0.5)
        masses = refine_window_to_arc(mu, arc, [0.5, 0.1, 0.01, 0.001])
        assert masses[-1] == pytest.approx(0.3 + 0.5, abs=1e-12)
        assert np.all(np.diff(masses) <= 1e-12)

    def test_finite_scale_chain(self):
        # window scan ratio at finite depth bounds the refined arc mass up to
        # the area mass still visible at the scanned depth (<= dens * h_g)
        mu = Measure(
            boundary=BoundaryDensity(np.array([0.0, 2.0]), np.array([1.0, 0.6])),
            area=AreaDensity.constant(0.4),
        )
        depth = 8
        scan = window_infimum_scan(mu, depth)
        h_scan = TWO_PI * 2.0**-depth
        slack = 0.4 * h_scan
        arc = Arc(4.0, 0.3)
        masses = refine_window_to_arc(mu, arc, [0.25, 0.1, 0.01, 0.001])
        assert masses[-1] >= (scan.ratio - slack) * arc.length - 1e-12


class TestSerialization:
    def test_roundtrip(self):
        mu = Measure(
            atoms=((0.3 + 0.4j, 1.5),),
            boundary=BoundaryDensity(np.array([0.1, 2.0]), np.array([0.5, 1.0])),
            area=AreaDensity(
                np.array([0.0, 1.0]), np.array([0.0, TWO_PI]), np.array([[0.25]])
            ),
        )
        doc = measure_to_dict(mu)
        back = measure_from_dict(doc)
        assert back.atoms == mu.atoms
        assert np.array_equal(back.boundary.breakpoints, mu.boundary.breakpoints)
        assert np.array_equal(back.boundary.values, mu.boundary.values)
        assert np.array_equal(back.area.values, mu.area.values)
        arc, h = Arc(0.7, 0.9), 0.35
        assert window_mass(back, CarlesonWindow(arc, h)) == window_mass(mu, CarlesonWindow(arc, h))

    def test_schema_fields(self):
        doc = measure_to_dict(normalized_arclength())
        assert set(doc) == {"atoms", "boundary_density"}
        assert doc["boundary_density"]["values"] == [1.0 / TWO_PI]

    def test_validation(self):
        with pytest.raises(DomainError):
            Measure(atoms=((1.5 + 0.0j, 1.0),))
        with pytest.raises(DomainError):
            Measure(atoms=((0.5 + 0.0j, -1.0),))
        with pytest.raises(DomainError):
            BoundaryDensity(np.array([0.0, 1.0]), np.array([-0.5, 1.0]))
