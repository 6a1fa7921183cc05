import math

import numpy as np
import pytest

from rktlab.errors import DomainError
from rktlab.paley_wiener import (
    SamplingSequence,
    bandlimit_check,
    carleson_sanity,
    generating_witness,
    gram_min_eigenvalue,
    kadets_point,
    pw_kernel_norm_sq,
    pw_normalization,
    rkt_lower_bound_scan,
    rkt_sum,
    witness_contrast,
)


class TestKadetsPoints:
    def test_even(self):
        assert kadets_point(2) == 2.125

    def test_odd(self):
        assert kadets_point(1) == 0.875

    def test_negative_odd(self):
        assert kadets_point(-3) == -3.125

    def test_negative_even(self):
        assert kadets_point(-2) == -1.875

    def test_deleted_origin(self):
        with pytest.raises(DomainError):
            kadets_point(0)


class TestSequence:
    def test_separation_exact(self):
        seq = SamplingSequence.kadets(256)
        sanity = carleson_sanity(seq)
        assert sanity.separation == 0.75
        assert sanity.strip_width == 0.0

    def test_integer_lattice_separation(self):
        seq = SamplingSequence.from_points([float(n) for n in range(-5, 6)])
        assert carleson_sanity(seq).separation == 1.0

    def test_single_point_convention(self):
        seq = SamplingSequence.from_points([3.0])
        assert carleson_sanity(seq).separation == math.inf


class TestKernelNorm:
    def test_real_point(self):
        assert pw_kernel_norm_sq(1.5) == 1.0

    def test_imaginary_unit(self):
        exact = math.sinh(2 * math.pi) / (2 * math.pi)
        assert pw_kernel_norm_sq(1j) == pytest.approx(exact, rel=1e-13)
        assert exact == pytest.approx(42.61, rel=1e-3)

    def test_l2_integral_oracle(self):
        # |sinc(pi(x - lam))|^2 integrated over the line
        lam = 0.3 + 1.0j
        xs = np.linspace(-2000.0, 2000.0, 256_001)
        u = math.pi * (xs - lam.real)
        v = math.pi * lam.imag
        vals = (np.sin(u) ** 2 + math.sinh(v) ** 2) / (u * u + v * v)
        integral = np.trapezoid(vals, xs)
        assert pw_kernel_norm_sq(lam) == pytest.approx(integral, rel=1e-3)

    def test_small_imaginary_series(self):
        t = 1e-5
        exact = math.sinh(2 * math.pi * t) / (2 * math.pi * t)
        assert pw_kernel_norm_sq(complex(0, t)) == pytest.approx(exact, rel=1e-12)

    def test_decay_profile_bracket(self):
        # frozen: c_lam^2 / ((1+t) e^{-2 pi t}) stays within [0.99, 11.2] on [0, 8]
        for t in np.linspace(0.0, 8.0, 33):
            c2 = pw_normalization(complex(0, t)) ** 2
            ratio = c2 / ((1.0 + t) * math.exp(-2.0 * math.pi * t))
            assert 0.99 <= ratio <= 11.2


class TestRktSum:
    def test_own_node_dominates(self):
        # the own-node term alone contributes 1 at every sequence point
        # (away from the truncation edge, where the tail bound needs margin)
        seq = SamplingSequence.kadets(128)
        for x in seq.points[np.abs(seq.points) <= 64.0]:
            assert rkt_sum(float(x), seq).low >= 1.0

    def test_high_strip_bracket(self):
        # frozen: values at |Im| > 1 stay within [0.5, 1.5]
        seq = SamplingSequence.kadets(512)
        for lam in (2j, 1.5j, 0.7 + 1.25j, 3.2 - 2.0j):
            iv = rkt_sum(lam, seq)
            assert 0.5 <= iv.low <= iv.high <= 1.5

    def test_per_term_strip_bracket(self):
        # each term against |Im lam| / |x_n - lam|^2, |Im| in [1, 2]
        seq = SamplingSequence.kadets(64)
        for lam in (1.5j, 0.4 + 1.0j, 2.0 - 2.0j):
            b = lam.imag
            c2 = pw_normalization(lam) ** 2
            for x in seq.points[:40]:
                u = math.pi * (x - lam.real)
                term = c2 * (math.sin(u) ** 2 + math.sinh(math.pi * b) ** 2) / (u * u + (math.pi * b) ** 2)
                ratio = term * ((x - lam.real) ** 2 + b * b) / abs(b)
                assert 0.31 <= ratio <= 0.33

    def test_nearest_point_floor(self):
        seq = SamplingSequence.kadets(256)
        lam = 0.4375
        d = float(np.min(np.abs(seq.points - lam)))
        floor = np.sinc(d) ** 2
        assert rkt_sum(lam, seq).low >= floor * (1.0 - 1e-12)

    def test_truncation_stability(self):
        lam = 0.3 + 0.4j
        full = rkt_sum(lam, SamplingSequence.kadets(1024))
        half = rkt_sum(lam, SamplingSequence.kadets(512))
        assert abs(full.low - half.low) <= (half.high - half.low) + 1e-12

    def test_minimum_truncation(self):
        with pytest.raises(DomainError):
            rkt_sum(0.5, SamplingSequence.kadets(32))


class TestScan:
    # frozen regression value: first full run of the 128x128 scan at N=1024
    FROZEN_DELTA = 0.051078971997090154

    def test_delta_regression(self):
        seq = SamplingSequence.kadets(1024)
        scan = rkt_lower_bound_scan(seq)
        assert scan.delta > 0.0
        assert scan.delta == pytest.approx(self.FROZEN_DELTA, rel=1e-9)
        # the starving region is the deleted-origin gap
        assert abs(scan.witness) < 0.5

    def test_high_strip_subgrid(self):
        seq = SamplingSequence.kadets(1024)
        scan = rkt_lower_bound_scan(seq, resolution=(64, 64))
        mask = np.abs(scan.im_grid) > 1.0
        sub_min = float(np.min(scan.low[mask, :]))
        assert sub_min >= 0.5 * scan.delta

    def test_grid_contains_sequence_point(self):
        seq = SamplingSequence.kadets(256)
        scan = rkt_lower_bound_scan(seq, re_range=(0.0, 4.0), im_range=(-1.0, 1.0), resolution=(65, 65))
        # min property: the reported minimum is <= every grid value
        assert scan.delta <= float(np.max(scan.low))

    def test_resolution_floor(self):
        seq = SamplingSequence.kadets(256)
        with pytest.raises(DomainError):
            rkt_lower_bound_scan(seq, resolution=(32, 128))


class TestWitness:
    def test_vanishes_at_sequence_point(self):
        seq = SamplingSequence.kadets(512)
        wit = generating_witness(seq, np.array([kadets_point(3), kadets_point(-7)]))
        assert wit.values[0] == 0.0
        assert wit.values[1] == 0.0

    def test_value_one_at_origin(self):
        seq = SamplingSequence.kadets(512)
        wit = generating_witness(seq, np.array([0.0]))
        assert wit.values[0] == 1.0

    def test_contrast_pair(self):
        seq = SamplingSequence.kadets(1024)
        ratio, l2, values, xs = witness_contrast(seq)
        assert ratio < 1e-6
        assert l2 > 0.1
        assert bandlimit_check(values, 256.0, 8) < 0.05

    def test_truncation_floor(self):
        with pytest.raises(DomainError):
            generating_witness(SamplingSequence.kadets(256), np.array([0.0]))

    def test_grid_range_guard(self):
        seq = SamplingSequence.kadets(512)
        with pytest.raises(DomainError):
            generating_witness(seq, np.array([200.0]))


class TestBandlimit:
    def test_sinc_in_band(self):
        n = 2048
        xs = (np.arange(n) - n // 2) / 8.0
        assert bandlimit_check(np.sinc(xs), 256.0, 8) < 0.02

    def test_double_rate_sinc_out_of_band(self):
        n = 2048
        xs = (np.arange(n) - n // 2) / 8.0
        assert bandlimit_check(np.sinc(2.0 * xs), 256.0, 8) > 0.4

    def test_grid_requirements(self):
        with pytest.raises(DomainError):
            bandlimit_check(np.ones(100), 100.0, 1)


class TestGramCrossCheck:
    def test_min_eigenvalue_reported_positive(self):
        # diagnostic only: the completed system is a Riesz sequence, so the
        # Gram spectrum stays away from zero across truncations
        seq = SamplingSequence.kadets(256)
        prev = None
        for t in (8, 16, 32):
            val = gram_min_eigenvalue(seq, t)
            assert val > 0.05
            prev = val
