"""H^p reproducing kernels, norms, and the embedding-constant testers.

Conventions (stated wherever constants are reported):

  * ||f||_p uses the normalized measure d(theta)/(2*pi) on the circle;
  * measures and arc lengths |I| are in plain radians.

Hence for a measure with boundary density c (radians convention) the
reverse-embedding ratio is bounded below by 2*pi*c, while window ratios
mu(S_I)/|I| are bounded below by c with no extra factor.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, PrecisionWarning
from .measures import Arc, Measure
from .numerics import (
    RADIAL_CAP,
    TWO_PI,
    CircleQuadrature,
    DiskGrid,
    circle_quadrature,
    ensure_point,
    gauss_legendre_panel,
    wrap_angle,
)

DEFAULT_SEED = 0xC0FFEE

#: Window depths below this are outside the supported resolution.
MIN_WINDOW_DEPTH = 2.0**-16


@dataclass(frozen=True)
class HardyConfig:
    """Exponent pair and quadrature parameters for one H^p session."""

    p: float
    p_conj: float
    quadrature: CircleQuadrature
    base_panels: int
    nodes_per_panel: int
    target_tol: float

    def __post_init__(self):
        if not 1.0 < self.p < math.inf:
            raise DomainError(f"p must lie in (1, inf), got {self.p}")
        if abs(1.0 / self.p + 1.0 / self.p_conj - 1.0) > 1e-14:
            raise DomainError("conjugate exponent pair is inconsistent")


def hardy_config(
    p: float,
    base_panels: int = 64,
    nodes_per_panel: int = 16,
    target_tol: float = 1e-10,
) -> HardyConfig:
    p = float(p)
    if not 1.0 < p < math.inf:
        raise DomainError(f"p must lie in (1, inf), got {p}")
    quad = circle_quadrature(
        base_panels=base_panels, nodes_per_panel=nodes_per_panel, target_tol=target_tol
    )
    return HardyConfig(
        p=p,
        p_conj=p / (p - 1.0),
        quadrature=quad,
        base_panels=base_panels,
        nodes_per_panel=nodes_per_panel,
        target_tol=target_tol,
    )


@dataclass(frozen=True)
class HardyFunction:
    """Polynomial in the monomial basis (ascending coefficients)."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        if c.ndim != 1 or not np.all(np.isfinite(c.view(float))):
            raise DomainError("coefficients must be a finite 1-d array")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return int(self.coeffs.size - 1)

    def __call__(self, z):
        return np.polyval(self.coeffs[::-1], z)

    def is_zero(self) -> bool:
        return bool(np.all(self.coeffs == 0.0))


def random_polynomials(count: int, max_degree: int = 32, seed: int = DEFAULT_SEED):
    """Seeded family of random polynomials with complex Gaussian coefficients."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        c = (rng.standard_normal(max_degree + 1) + 1j * rng.standard_normal(max_degree + 1))
        out.append(HardyFunction(c / math.sqrt(2.0)))
    return out


def vanishing_polynomial(points: Sequence[complex]) -> HardyFunction:
    """Monic product prod (z - xi) over the given points."""
    c = np.array([1.0 + 0.0j])
    for xi in points:
        c = np.convolve(c, np.array([-complex(xi), 1.0 + 0.0j]))
    return HardyFunction(c[:: 1])


def hp_norm(f: HardyFunction, cfg: HardyConfig) -> float:
    """(integral of |f|^p d(theta)/(2*pi))^(1/p) over the boundary circle."""
    vals = np.abs(f(np.exp(1j * cfg.quadrature.nodes))) ** cfg.p
    mean = float(np.dot(cfg.quadrature.weights, vals)) / TWO_PI
    return mean ** (1.0 / cfg.p)


@dataclass(frozen=True)
class HardyKernel:
    """Evaluator of k_lam(z) = 1 / (1 - conj(lam) z)."""

    lam: complex

    def __call__(self, z):
        return 1.0 / (1.0 - np.conj(self.lam) * np.asarray(z))


def kernel(lam: complex) -> HardyKernel:
    lam = ensure_point(lam)
    if abs(lam) >= 1.0:
        raise DomainError(f"kernel point must lie in the open disk, got |lam|={abs(lam)}")
    return HardyKernel(lam)


def _kernel_rule(cfg: HardyConfig, lam: complex, breakpoints=()) -> CircleQuadrature:
    r = abs(lam)
    scale = max(0.5 * (1.0 - r), 2.0**-24)
    phi = math.atan2(lam.imag, lam.real)
    return circle_quadrature(
        breakpoints=breakpoints,
        peaks=[(phi, scale)],
        base_panels=cfg.base_panels,
        nodes_per_panel=cfg.nodes_per_panel,
        target_tol=cfg.target_tol,
    )


def _kernel_pth_mean(lam: complex, cfg: HardyConfig) -> float:
    """integral of |k_lam|^p d(theta)/(2*pi) by the peak-refined rule."""
    rule = _kernel_rule(cfg, lam)
    r = abs(lam)
    phi = math.atan2(lam.imag, lam.real)
    return _kernels.kernel_pow_circle_sum(rule.nodes, rule.weights, r, phi, cfg.p) / TWO_PI


def kernel_norm(lam: complex, cfg: HardyConfig) -> float:
    """||k_lam||_p by quadrature; for p = 2 this matches (1-|lam|^2)^(-1/2)."""
    lam = ensure_point(lam)
    r = abs(lam)
    if r >= 1.0:
        raise DomainError(f"kernel point must lie in the open disk, got |lam|={r}")
    if 1.0 - r < (1.0 - RADIAL_CAP) * (1.0 - 1e-9):
        warnings.warn(
            f"1-|lam|={1.0 - r:.3e} is beyond the grid cap {1.0 - RADIAL_CAP:.3e}; "
            "the quadrature is reported at reduced confidence",
            PrecisionWarning,
        )
    return _kernel_pth_mean(lam, cfg) ** (1.0 / cfg.p)


def _polar_cell_nodes(r0, r1, a0, a1, peak_angle, scale, nodes=8, max_ang_width=math.pi / 16):
    """Product Gauss-Legendre nodes on the polar cell [r0,r1] x [a0,a1],
    graded angularly toward peak_angle and radially toward the outer edge."""
    r_edges = _graded_edges(r0, r1, r1, max(scale, (r1 - r0) / 32.0))
    # map the peak into the angular interval (or to its nearest endpoint)
    off = wrap_angle(peak_angle - a0)
    width = a1 - a0
    if off <= width:
        attract = a0 + off
    else:
        attract = a1 if (off - width) < (TWO_PI - off) else a0
    a_edges = _graded_edges(a0, a1, attract, max(scale, min(width, max_ang_width)))
    rs, wr = _edges_to_nodes(r_edges, nodes)
    ts, wt = _edges_to_nodes(a_edges, nodes)
    rho = np.repeat(rs, ts.size)
    ang = np.tile(ts, rs.size)
    wts = np.repeat(wr * rs, ts.size) * np.tile(wt, rs.size)  # dA = r dr dtheta
    return rho, ang, wts


def _graded_edges(lo: float, hi: float, attract: float, scale: float) -> np.ndarray:
    """1-d edges on [lo, hi], dyadically graded toward the attract point."""
    width = hi - lo
    if width <= scale:
        return np.array([lo, hi])
    a = min(max(attract, lo), hi)
    edges = {lo, hi, a}
    d = width
    while d > scale:
        for e in (a - d, a + d):
            if lo < e < hi:
                edges.add(e)
        d *= 0.5
    for e in (a - d, a + d):
        if lo < e < hi:
            edges.add(e)
    return np.array(sorted(edges))


def _edges_to_nodes(edges: np.ndarray, n: int):
    xs = []
    ws = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre_panel(float(lo), float(hi), n)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def rkt_functional(mu: Measure, lam: complex, cfg: HardyConfig) -> float:
    """integral of |K_lam|^p d(mu) for the normalized kernel K_lam."""
    lam = ensure_point(lam)
    r = abs(lam)
    if r >= 1.0:
        raise DomainError(f"kernel point must lie in the open disk, got |lam|={r}")
    phi = math.atan2(lam.imag, lam.real)
    p = cfg.p
    num = 0.0
    for z, mass in mu.atoms:
        az = abs(z)
        s = math.sin(0.5 * (math.atan2(z.imag, z.real) - phi)) if az > 0.0 else 0.0
        d2 = (1.0 - r * az) ** 2 + 4.0 * r * az * s * s
        num += mass * d2 ** (-0.5 * p)
    if mu.boundary.total() > 0.0:
        rule = _kernel_rule(cfg, lam, breakpoints=mu.boundary.breakpoints)
        dens = mu.boundary.value_at(rule.nodes)
        num += _kernels.kernel_pow_circle_sum(rule.nodes, rule.weights * dens, r, phi, p)
    if mu.area is not None:
        scale = max(0.5 * (1.0 - r), 2.0**-24)
        for r0, r1, a0, a1, val in mu.area.cells():
            rho, ang, wts = _polar_cell_nodes(r0, r1, a0, a1, phi, scale)
            num += val * _kernels.kernel_pow_disk_sum(rho, ang, wts, r, phi, p)
    return num / _kernel_pth_mean(lam, cfg)


class RktScan(NamedTuple):
    value: float
    witness: complex
    rows: np.ndarray  # columns (re_lambda, im_lambda, rkt_value)


def rkt_infimum_scan(mu: Measure, cfg: HardyConfig, grid: DiskGrid, include_origin: bool = True) -> RktScan:
    """Minimum of the kernel functional over the grid; estimates the best
    uniform lower constant over all kernel points."""
    lams = list(grid.points())
    if include_origin:
        lams.insert(0, 0.0 + 0.0j)
    rows = np.empty((len(lams), 3))
    best = math.inf
    witness = None
    for i, lam in enumerate(lams):
        v = rkt_functional(mu, lam, cfg)
        rows[i] = (lam.real, lam.imag, v)
        if v < best:
            best = v
            witness = lam
    return RktScan(best, witness, rows)


def _measure_pth_integral_poly(mu: Measure, f: HardyFunction, cfg: HardyConfig) -> float:
    p = cfg.p
    total = 0.0
    for z, mass in mu.atoms:
        total += mass * abs(f(z)) ** p
    if mu.boundary.total() > 0.0:
        rule = circle_quadrature(
            breakpoints=mu.boundary.breakpoints,
            base_panels=cfg.base_panels,
            nodes_per_panel=cfg.nodes_per_panel,
            target_tol=cfg.target_tol,
        )
        dens = mu.boundary.value_at(rule.nodes)
        vals = np.abs(f(np.exp(1j * rule.nodes))) ** p
        total += float(np.dot(rule.weights * dens, vals))
    if mu.area is not None:
        for r0, r1, a0, a1, val in mu.area.cells():
            rho, ang, wts = _polar_cell_nodes(r0, r1, a0, a1, 0.0, scale=(r1 - r0) / 8.0, nodes=12)
            vals = np.abs(f(rho * np.exp(1j * ang))) ** p
            total += val * float(np.dot(wts, vals))
    return total


def reverse_embedding_ratio(mu: Measure, f: HardyFunction, cfg: HardyConfig) -> float:
    """integral |f|^p d(mu) divided by ||f||_p^p."""
    if f.is_zero():
        raise DomainError("reverse embedding ratio is undefined for the zero function")
    norm = hp_norm(f, cfg)
    if norm == 0.0:
        raise DomainError("function has zero H^p norm")
    return _measure_pth_integral_poly(mu, f, cfg) / norm**cfg.p


# ---------------------------------------------------------------------------
# the window averages phi_h and their limit profile
# ---------------------------------------------------------------------------


def phi_h(z: complex, arc: Arc, h: float, cfg: HardyConfig, nodes: int = 8) -> float:
    """Window average (1/h) * integral over S_{I,h} of
    (1-|lam|^2)^(p-1) / |1 - conj(lam) z|^p dA(lam)."""
    z = ensure_point(z)
    rho = abs(z)
    if rho > 1.0 + 1e-12:
        raise DomainError("z must lie in the closed disk")
    rho = min(rho, 1.0)
    h = float(h)
    if not MIN_WINDOW_DEPTH * (1.0 - 1e-12) <= h <= min(arc.length, 1.0) * (1.0 + 1e-12):
        raise DomainError(f"depth h={h} must lie in [2^-16, min(|I|, 1)]")
    psi = math.atan2(z.imag, z.real) if rho > 0.0 else 0.0
    t_edges = _graded_edges(0.0, h, 0.0, max(h * 2.0**-20, 2.0**-30))
    start = arc.start
    width = arc.length
    off = wrap_angle(psi - start)
    if off <= width:
        attract = start + off
    else:
        attract = start + width if (off - width) < (TWO_PI - off) else start
    ang_scale = max(0.25 * (1.0 - rho), 2.0**-26)
    a_edges = _graded_edges(start, start + width, attract, ang_scale)
    ts, wts = _edges_to_nodes(t_edges, nodes)
    angs, wangs = _edges_to_nodes(a_edges, nodes)
    return _kernels.phi_h_window_sum(ts, wts, angs, wangs, rho, psi, cfg.p) / h


class PhiHRecord(NamedTuple):
    z: complex
    kind: str  # "interior" | "off_arc" | "endpoint"
    values: np.ndarray
    exponent: float | None
    bracket: tuple | None


def classify_against_arc(z: complex, arc: Arc, angle_tol: float = 1e-9) -> str:
    """Locate z relative to the closed arc: on its interior, at an endpoint,
    or off the closed arc (which includes every interior point of the disk)."""
    if abs(z) < 1.0 - 1e-9:
        return "off_arc"
    theta = math.atan2(z.imag, z.real)
    d = abs(wrap_angle(theta - arc.center + math.pi) - math.pi)
    half = 0.5 * arc.length
    if abs(d - half) <= angle_tol:
        return "endpoint"
    return "interior" if d < half else "off_arc"


def phi_h_limit_profile(arc: Arc, hs: Sequence[float], zs: Sequence[complex], cfg: HardyConfig):
    """Evaluate phi_h along a decreasing depth sequence and classify each z.

    Off the closed arc the values decay like h^(p-1) (the fitted exponent is
    reported); on the open arc they stabilize in a bracket; arc endpoints are
    flagged indeterminate and carry no fit.
    """
    hs = np.asarray(hs, dtype=float)
    if hs.ndim != 1 or hs.size < 2 or np.any(np.diff(hs) >= 0.0):
        raise DomainError("hs must be a strictly decreasing sequence of depths")
    records = []
    for z in zs:
        z = ensure_point(z)
        kind = classify_against_arc(z, arc)
        if kind == "endpoint":
            records.append(PhiHRecord(z, kind, np.array([]), None, None))
            continue
        vals = np.array([phi_h(z, arc, float(h), cfg) for h in hs])
        exponent = None
        bracket = None
        if kind == "off_arc":
            if np.all(vals > 0.0):
                exponent = float(np.polyfit(np.log(hs), np.log(vals), 1)[0])
            else:
                exponent = math.inf
        else:
            bracket = (float(vals.min()), float(vals.max()))
        records.append(PhiHRecord(z, kind, vals, exponent, bracket))
    return records


def phi_h_measure_integral(
    mu: Measure, arc: Arc, h: float, cfg: HardyConfig, outer_panels: int = 16, outer_nodes: int = 8
) -> float:
    """integral of phi_h d(mu), evaluated pointwise over the measure parts."""
    total = 0.0
    for z, mass in mu.atoms:
        total += mass * phi_h(z, arc, h, cfg)
    if mu.boundary.total() > 0.0:
        rule = circle_quadrature(
            breakpoints=mu.boundary.breakpoints,
            peaks=[(arc.start, h), (arc.end, h)],
            base_panels=outer_panels,
            nodes_per_panel=outer_nodes,
            target_tol=cfg.target_tol,
        )
        dens = mu.boundary.value_at(rule.nodes)
        vals = np.array([phi_h(complex(np.exp(1j * t)), arc, h, cfg) for t in rule.nodes])
        total += float(np.dot(rule.weights * dens, vals))
    if mu.area is not None:
        for r0, r1, a0, a1, val in mu.area.cells():
            rho, ang, wts = _polar_cell_nodes(r0, r1, a0, a1, arc.center, scale=(r1 - r0) / 4.0, nodes=4)
            vals = np.array([phi_h(rr * complex(np.exp(1j * aa)), arc, h, cfg) for rr, aa in zip(rho, ang)])
            total += val * float(np.dot(wts, vals))
    return total
