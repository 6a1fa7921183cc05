"""Finite-dimensional model spaces K_Theta = H^2 - Theta H^2 for finite
Blaschke products, with Clark systems and the deleted-point perturbation.

A finite Blaschke product is analytic across the closed disk, its boundary
spectrum is empty, and every object here (Clark points, kernel norms,
Gram matrices, the perturbed measure) is exactly computable at dimension
N = number of zeros.  The orthonormal basis used internally is the
Takenaka-Malmquist family built from the zeros; every reported quantity is
basis-independent and cross-checked against closed kernel formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import ndimage
from scipy.optimize import brentq

from .errors import DegenerateSystemError, DomainError, PrecisionError
from .measures import Measure
from .numerics import (
    TWO_PI,
    DiskGrid,
    circle_quadrature,
    eigen_hermitian,
    ensure_point,
    null_vector,
    wrap_angle,
)


@dataclass(frozen=True)
class BlaschkeProduct:
    """Theta(z) = front * prod (z - a_j) / (1 - conj(a_j) z), |a_j| < 1."""

    zeros: np.ndarray
    front: complex = 1.0 + 0.0j

    def __post_init__(self):
        a = np.atleast_1d(np.asarray(self.zeros, dtype=np.complex128))
        if a.ndim != 1 or a.size == 0 or not np.all(np.isfinite(a.view(float))):
            raise DomainError("zeros must be a finite nonempty 1-d array")
        if np.any(np.abs(a) >= 1.0 - 1e-9):
            raise DomainError("zeros must lie strictly inside the disk")
        front = complex(self.front)
        if abs(abs(front) - 1.0) > 1e-12:
            raise DomainError("front constant must be unimodular")
        object.__setattr__(self, "zeros", a)
        object.__setattr__(self, "front", front)

    @property
    def degree(self) -> int:
        return int(self.zeros.size)

    def __call__(self, z):
        z = np.asarray(z, dtype=np.complex128)
        zz = z[..., None]
        factors = (zz - self.zeros) / (1.0 - np.conj(self.zeros) * zz)
        out = self.front * np.prod(factors, axis=-1)
        return out if out.shape else complex(out)

    def boundary_derivative_abs(self, zeta):
        """|Theta'(zeta)| for |zeta| = 1: sum (1-|a|^2)/|zeta - a|^2."""
        zeta = np.asarray(zeta, dtype=np.complex128)
        zz = zeta[..., None]
        terms = (1.0 - np.abs(self.zeros) ** 2) / np.abs(zz - self.zeros) ** 2
        out = np.sum(terms, axis=-1)
        return out if out.shape else float(out)


def kernel_value(theta: BlaschkeProduct, lam: complex, z) -> np.ndarray:
    """Closed kernel formula (1 - conj(Theta(lam)) Theta(z)) / (1 - conj(lam) z)."""
    tl = np.conj(theta(lam))
    z = np.asarray(z, dtype=np.complex128)
    return (1.0 - tl * theta(z)) / (1.0 - np.conj(lam) * z)


@dataclass(frozen=True)
class ModelSpaceBasis:
    """Takenaka-Malmquist orthonormal basis e_0..e_{N-1} of K_Theta."""

    theta: BlaschkeProduct

    @property
    def dim(self) -> int:
        return self.theta.degree

    def eval_matrix(self, zs) -> np.ndarray:
        """Matrix E with E[i, k] = e_k(z_i)."""
        a = self.theta.zeros
        zs = np.atleast_1d(np.asarray(zs, dtype=np.complex128))
        zz = zs[:, None]
        denom = 1.0 - np.conj(a) * zz
        factors = (zz - a) / denom
        blaschke = np.concatenate(
            [np.ones((zs.size, 1), dtype=np.complex128), np.cumprod(factors, axis=1)[:, :-1]],
            axis=1,
        )
        scale = np.sqrt(1.0 - np.abs(a) ** 2)
        return scale * blaschke / denom

    def numerator_matrix(self) -> np.ndarray:
        """Row k: ascending monomial coefficients of the numerator of e_k
        over the common denominator Q(z) = prod (1 - conj(a_j) z)."""
        a = self.theta.zeros
        n = a.size
        rows = np.zeros((n, n), dtype=np.complex128)
        for k in range(n):
            poly = np.array([math.sqrt(1.0 - abs(a[k]) ** 2)], dtype=np.complex128)
            for j in range(k):
                poly = np.convolve(poly, np.array([-a[j], 1.0], dtype=np.complex128))
            for j in range(k + 1, n):
                poly = np.convolve(poly, np.array([1.0, -np.conj(a[j])], dtype=np.complex128))
            rows[k, : poly.size] = poly
        return rows

    def q_coeffs(self) -> np.ndarray:
        """Ascending coefficients of Q(z) = prod (1 - conj(a_j) z)."""
        q = np.array([1.0], dtype=np.complex128)
        for aj in self.theta.zeros:
            q = np.convolve(q, np.array([1.0, -np.conj(aj)], dtype=np.complex128))
        return q

    def boundary_gram(self, base_panels: int = 64, nodes_per_panel: int = 16) -> np.ndarray:
        """Gram matrix of the basis by boundary quadrature (test oracle)."""
        peaks = [
            (math.atan2(aj.imag, aj.real), max(0.5 * (1.0 - abs(aj)), 2.0**-24))
            for aj in self.theta.zeros
            if abs(aj) > 0.0
        ]
        rule = circle_quadrature(peaks=peaks, base_panels=base_panels, nodes_per_panel=nodes_per_panel)
        e = self.eval_matrix(np.exp(1j * rule.nodes))
        return (e.conj().T * rule.weights) @ e / TWO_PI


@dataclass(frozen=True)
class ModelSpaceFunction:
    """Element of K_Theta in basis coordinates."""

    basis: ModelSpaceBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.basis.dim,):
            raise DomainError("coefficient vector does not match the basis dimension")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, z):
        out = self.basis.eval_matrix(z) @ self.coeffs
        return out if np.ndim(z) else complex(out[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))


@dataclass(frozen=True)
class ModelKernel:
    """Kernel k_lam of K_Theta with its exact squared norm."""

    lam: complex
    coords: np.ndarray  # conj(e_k(lam)): coordinates in the basis
    norm_sq: float
    basis: ModelSpaceBasis

    def __call__(self, z):
        out = self.basis.eval_matrix(z) @ self.coords
        return out if np.ndim(z) else complex(out[0])


def model_kernel(theta: BlaschkeProduct, lam: complex, basis: ModelSpaceBasis | None = None) -> ModelKernel:
    """Kernel at lam with norm^2 = (1-|Theta(lam)|^2)/(1-|lam|^2) inside the
    disk and |Theta'(lam)| on the boundary (finite Blaschke products are
    analytic across the circle, so boundary points are always admissible)."""
    lam = ensure_point(lam)
    r = abs(lam)
    if r > 1.0 + 1e-12:
        raise DomainError("kernel point must lie in the closed disk")
    basis = basis or ModelSpaceBasis(theta)
    if r < 1.0 - 1e-12:
        norm_sq = (1.0 - abs(theta(lam)) ** 2) / (1.0 - r * r)
    else:
        lam = lam / r
        norm_sq = float(theta.boundary_derivative_abs(np.array([lam]))[0])
    coords = np.conj(basis.eval_matrix(np.array([lam]))[0])
    return ModelKernel(lam, coords, float(norm_sq), basis)


# ---------------------------------------------------------------------------
# Clark systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClarkSystem:
    """Solutions of Theta = alpha on the circle with their kernel weights."""

    theta: BlaschkeProduct
    alpha: complex
    angles: np.ndarray
    weights: np.ndarray  # |Theta'(zeta_n)|

    @property
    def points(self) -> np.ndarray:
        return np.exp(1j * self.angles)

    @property
    def dim(self) -> int:
        return int(self.angles.size)


def clark_points(theta: BlaschkeProduct, alpha: complex) -> ClarkSystem:
    """All N boundary solutions of Theta(zeta) = alpha, by monotone-phase
    bracketing and Brent refinement; weights |Theta'| from the zero data."""
    alpha = complex(alpha)
    if abs(abs(alpha) - 1.0) > 1e-12:
        raise DomainError("alpha must be unimodular")
    n = theta.degree
    # sampling density: the boundary phase moves at speed |Theta'|
    probe = np.exp(1j * np.linspace(0.0, TWO_PI, 512, endpoint=False))
    max_speed = float(np.max(theta.boundary_derivative_abs(probe)))
    m = max(4096, int(32 * max_speed))
    thetas = np.linspace(0.0, TWO_PI, m + 1)
    u = np.unwrap(np.angle(theta(np.exp(1j * thetas)) * np.conj(alpha)))
    winding = u[-1] - u[0]
    if abs(winding - TWO_PI * n) > 1e-6:
        raise PrecisionError(
            f"boundary phase winding {winding:.6f} does not match 2*pi*N={TWO_PI * n:.6f}"
        )

    def local(thetav: float) -> float:
        return float(np.angle(theta(np.exp(1j * thetav)) * np.conj(alpha)))

    k_start = math.ceil(u[0] / TWO_PI - 1e-12)
    roots = []
    for k in range(k_start, k_start + n):
        target = TWO_PI * k
        i = int(np.searchsorted(u, target, side="left"))
        if i == 0:
            roots.append(float(thetas[0]))
            continue
        lo, hi = float(thetas[i - 1]), float(thetas[i])
        flo, fhi = u[i - 1] - target, u[i] - target
        if flo == 0.0:
            roots.append(lo)
            continue
        if fhi == 0.0:
            roots.append(hi)
            continue
        if not (flo < 0.0 < fhi):
            raise PrecisionError(
                f"bracket failure near theta in [{lo:.9f}, {hi:.9f}] for level {k}"
            )
        roots.append(float(brentq(local, lo, hi, xtol=1e-15, rtol=8.9e-16)))
    angles = np.array(sorted(wrap_angle(t) for t in roots))
    pts = np.exp(1j * angles)
    resid = float(np.max(np.abs(theta(pts) - alpha)))
    if resid > 1e-12:
        raise PrecisionError(
            f"Clark point residual {resid:.3e} exceeds 1e-12 at angles {angles!r}"
        )
    weights = np.asarray(theta.boundary_derivative_abs(pts), dtype=float)
    return ClarkSystem(theta=theta, alpha=alpha, angles=angles, weights=weights)


def clark_kernel_coords(basis: ModelSpaceBasis, points: np.ndarray) -> np.ndarray:
    """Rows: coordinates of the normalized kernels at the given points."""
    e = basis.eval_matrix(points)
    coords = np.conj(e)
    norms = np.linalg.norm(coords, axis=1, keepdims=True)
    return coords / norms


# ---------------------------------------------------------------------------
# the deleted-and-perturbed system
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PerturbedSystem:
    """Clark system with the first point deleted and the next one nudged.

    xi_1 = exp(i(arg zeta_1 + epsilon)); xi_n = zeta_n for n >= 2.  The
    discrete measure puts mass |Theta'(xi_n)|^-1 at each retained point.
    """

    clark: ClarkSystem
    epsilon: float
    xi_angles: np.ndarray
    basis: ModelSpaceBasis

    @property
    def theta(self) -> BlaschkeProduct:
        return self.clark.theta

    @property
    def xi_points(self) -> np.ndarray:
        return np.exp(1j * self.xi_angles)

    @property
    def masses(self) -> np.ndarray:
        return 1.0 / np.asarray(self.theta.boundary_derivative_abs(self.xi_points), dtype=float)

    @property
    def zeta0(self) -> complex:
        return complex(self.clark.points[0])

    def xi_coords(self) -> np.ndarray:
        return clark_kernel_coords(self.basis, self.xi_points)

    def zeta0_coords(self) -> np.ndarray:
        return clark_kernel_coords(self.basis, np.array([self.zeta0]))[0]

    def min_overlap(self) -> float:
        """min_n |<K_xi1, K_zeta_n>|: the nonvanishing margin of the nudged
        kernel against the whole original system."""
        xi1 = clark_kernel_coords(self.basis, self.xi_points[:1])
        zc = clark_kernel_coords(self.basis, self.clark.points)
        return float(np.min(np.abs(xi1 @ zc.conj().T)))

    def measure(self) -> Measure:
        return Measure(atoms=tuple(zip(self.xi_points, self.masses)))


def build_theorem2_measure(
    theta: BlaschkeProduct, alpha: complex = 1.0 + 0.0j, epsilon: float | None = None
) -> PerturbedSystem:
    """Assemble the deleted-point system for a finite Blaschke product.

    epsilon defaults to 0.05 times the phase gap between zeta_1 and its
    nearest neighbor; epsilon = 0 is rejected (the nudged point must differ
    from zeta_1) and so is any epsilon that collides with another point.
    """
    clark = clark_points(theta, alpha)
    n = clark.dim
    if n < 2:
        raise DomainError("the construction needs dimension >= 2")
    angles = clark.angles
    gap_low = wrap_angle(angles[1] - angles[0])
    gap_high = wrap_angle(angles[2 % n] - angles[1])
    if epsilon is None:
        epsilon = 0.05 * min(gap_low, gap_high)
    epsilon = float(epsilon)
    if epsilon == 0.0:
        raise DomainError("epsilon = 0 leaves xi_1 equal to zeta_1")
    if not -gap_low < epsilon < gap_high:
        raise DomainError(
            f"epsilon = {epsilon} moves xi_1 out of the phase cell "
            f"(-{gap_low}, {gap_high}) around zeta_1"
        )
    xi_angles = np.concatenate([[wrap_angle(angles[1] + epsilon)], angles[2:]])
    sys = PerturbedSystem(
        clark=clark, epsilon=epsilon, xi_angles=xi_angles, basis=ModelSpaceBasis(theta)
    )
    if sys.min_overlap() < 1e-12:
        raise DomainError(
            "perturbed kernel is numerically orthogonal to a Clark kernel; "
            "choose a different epsilon"
        )
    return sys


class Witness(NamedTuple):
    function: ModelSpaceFunction
    mu_norm_sq: float
    value_at_zeta0: complex


def witness_function(sys: PerturbedSystem) -> Witness:
    """Unit-norm element vanishing at every retained point xi_n (n >= 1)
    but not at the deleted point."""
    if sys.basis.dim < 2:
        raise DomainError("witness construction needs dimension >= 2")
    rows = sys.basis.eval_matrix(sys.xi_points)
    try:
        coeffs = null_vector(rows)
    except DegenerateSystemError as exc:  # distinct points: cannot happen
        raise DegenerateSystemError(f"evaluation system degenerate: {exc}") from exc
    f = ModelSpaceFunction(sys.basis, coeffs)
    vals = sys.basis.eval_matrix(sys.xi_points) @ coeffs
    mu_norm_sq = float(np.sum(sys.masses * np.abs(vals) ** 2))
    return Witness(f, mu_norm_sq, f(sys.zeta0))


def witness_ratio(sys: PerturbedSystem, f: ModelSpaceFunction) -> float:
    """||f||^2_{L2(mu)} / ||f||_2^2 for the perturbed discrete measure."""
    nrm = f.norm()
    if nrm == 0.0:
        raise DomainError("zero function")
    vals = f.basis.eval_matrix(sys.xi_points) @ f.coeffs
    return float(np.sum(sys.masses * np.abs(vals) ** 2)) / nrm**2


def phi(sys: PerturbedSystem, z) -> np.ndarray:
    """phi(z) = |<K_zeta0, K_z>|^2 via the closed form
    |(Theta(zeta0)-Theta(z))/(zeta0-z)|^2 / |Theta'(zeta0)| *
    (1-|z|^2)/(1-|Theta(z)|^2), for z in the open disk."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("phi is evaluated on the open disk")
    theta = sys.theta
    z0 = sys.zeta0
    w0 = float(theta.boundary_derivative_abs(np.array([z0]))[0])
    tz = theta(z)
    quot = np.abs((theta(z0) - tz) / (z0 - z)) ** 2
    out = quot / w0 * (1.0 - np.abs(z) ** 2) / (1.0 - np.abs(tz) ** 2)
    return out if out.size > 1 else float(out[0])


def phi_inner(sys: PerturbedSystem, z) -> np.ndarray:
    """phi via basis coordinates (cross-check route)."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    e = sys.basis.eval_matrix(z)
    norms_sq = np.sum(np.abs(e) ** 2, axis=1)
    zc = np.conj(sys.basis.eval_matrix(np.array([sys.zeta0]))[0])
    w0 = float(np.sum(np.abs(zc) ** 2))
    numer = np.abs(e @ zc) ** 2
    out = numer / (w0 * norms_sq)
    return out if out.size > 1 else float(out[0])


def psi(sys: PerturbedSystem, delta: float, grid: DiskGrid, include_origin: bool = True) -> float:
    """Grid supremum of phi over the disk minus the ball |z - zeta0| < delta."""
    if delta <= 0.0:
        raise DomainError("delta must be positive")
    zs = grid.points()
    if include_origin:
        zs = np.concatenate([[0.0 + 0.0j], zs])
    mask = np.abs(zs - sys.zeta0) >= delta
    if not np.any(mask):
        raise DomainError("delta excludes the entire grid")
    return float(np.max(phi(sys, zs[mask])))


class RieszBounds(NamedTuple):
    lower: float
    upper: float
    eta: float


def riesz_bounds(sys: PerturbedSystem) -> RieszBounds:
    """Extreme eigenvalues of the Gram of {K_zeta0} union {K_xi_n}:
    the frame window (1-eta, 1+eta) of the perturbed system."""
    c = np.vstack([sys.zeta0_coords()[None, :], sys.xi_coords()])
    gram = c @ c.conj().T
    gram = 0.5 * (gram + gram.conj().T)
    evals, _ = eigen_hermitian(gram)
    eta = float(max(abs(1.0 - evals[0]), abs(evals[-1] - 1.0)))
    return RieszBounds(1.0 - eta, 1.0 + eta, eta)


class ModelScan(NamedTuple):
    delta: float
    witness: complex
    zs: np.ndarray
    phi_vals: np.ndarray
    mu_norm_sq: np.ndarray


def rkt_model_scan(sys: PerturbedSystem, grid: DiskGrid, include_origin: bool = True) -> ModelScan:
    """Grid minimum of ||K_z||^2_{L2(mu)} = sum_{n>=1} |<K_z, K_xi_n>|^2,
    with the phi profile alongside for the decomposition identity."""
    zs = grid.points()
    if include_origin:
        zs = np.concatenate([[0.0 + 0.0j], zs])
    e = sys.basis.eval_matrix(zs)
    coords = np.conj(e)
    coords /= np.linalg.norm(coords, axis=1, keepdims=True)
    u = sys.xi_coords()
    inner = coords @ u.conj().T
    mu_norm_sq = np.sum(np.abs(inner) ** 2, axis=1)
    phi_vals = np.asarray(phi(sys, zs))
    i = int(np.argmin(mu_norm_sq))
    return ModelScan(float(mu_norm_sq[i]), complex(zs[i]), zs, phi_vals, mu_norm_sq)


def backward_shift(f: ModelSpaceFunction) -> ModelSpaceFunction:
    """S* f = (f - f(0))/z in basis coordinates; K_Theta is S*-invariant."""
    basis = f.basis
    nm = basis.numerator_matrix()
    p = nm.T @ f.coeffs  # ascending numerator coefficients, length N
    q = basis.q_coeffs()  # length N+1
    f0 = p[0]  # Q(0) = 1
    full = np.zeros(q.size, dtype=np.complex128)
    full[: p.size] = p
    full -= f0 * q
    shifted = full[1:]  # exact division by z: constant term is zero
    coeffs = np.linalg.solve(nm.T, shifted)
    return ModelSpaceFunction(basis, coeffs)


class SeparatingPair(NamedTuple):
    f1: ModelSpaceFunction
    f2: ModelSpaceFunction
    determinant: complex
    degenerate: bool
    used_fallback: bool


def separating_pair(
    theta: BlaschkeProduct,
    zeta: complex,
    zeta0: complex,
    initial: tuple | None = None,
    tol: float = 1e-8,
) -> SeparatingPair:
    """Two continuous elements whose value vectors at (zeta, zeta0) are
    linearly independent.

    Starts from basis elements; if their value vectors are dependent, forms
    the combination vanishing at both points, strips leading zeros with the
    backward shift, normalizes f(0) = 1, and returns (S*f, S*S*f).  A
    determinant below tolerance is flagged degenerate: the dependence
    algebra then forces zeta = zeta0.
    """
    zeta = ensure_point(zeta)
    zeta0 = ensure_point(zeta0)
    if abs(abs(zeta) - 1.0) > 1e-9 or abs(abs(zeta0) - 1.0) > 1e-9:
        raise DomainError("both points must lie on the boundary circle")
    if abs(zeta - zeta0) <= 1e-12:
        raise DomainError("the two points must be distinct")
    basis = ModelSpaceBasis(theta)
    n = basis.dim
    if n < 2:
        raise DomainError("need dimension >= 2 for a separating pair")
    if initial is None:
        c1 = np.zeros(n, dtype=np.complex128)
        c1[0] = 1.0
        c2 = np.zeros(n, dtype=np.complex128)
        c2[1] = 1.0
        h1 = ModelSpaceFunction(basis, c1)
        h2 = ModelSpaceFunction(basis, c2)
    else:
        h1, h2 = initial
    v = np.array([[h1(zeta), h1(zeta0)], [h2(zeta), h2(zeta0)]])
    det = complex(v[0, 0] * v[1, 1] - v[0, 1] * v[1, 0])
    scale = float(np.max(np.abs(v))) ** 2 + 1e-300
    if abs(det) > tol * scale:
        return SeparatingPair(h1, h2, det, False, False)
    # dependent values: build f = c1 h1 + c2 h2 with f(zeta) = f(zeta0) = 0
    row = v[:, 0] if np.linalg.norm(v[:, 0]) >= np.linalg.norm(v[:, 1]) else v[:, 1]
    comb = null_vector(row[None, :])
    f = ModelSpaceFunction(basis, comb[0] * h1.coeffs + comb[1] * h2.coeffs)
    for _ in range(n):
        if abs(f(0.0)) > 1e-12 * f.norm():
            break
        f = backward_shift(f)
    f0 = f(0.0)
    if abs(f0) <= 1e-12 * max(f.norm(), 1e-300):
        raise DegenerateSystemError("combination vanished identically under the shift")
    f = ModelSpaceFunction(basis, f.coeffs / f0)
    g = backward_shift(f)
    h = backward_shift(g)
    det2 = complex(g(zeta) * h(zeta0) - g(zeta0) * h(zeta))
    return SeparatingPair(g, h, det2, abs(det2) <= tol, True)


def sublevel_component_count(theta: BlaschkeProduct, eps: float = 0.5, resolution: int = 512) -> int:
    """Number of connected components of {z in D : |Theta(z)| < eps} on a
    pixel grid (one component is the one-component sanity check)."""
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    xs = np.linspace(-1.0, 1.0, resolution)
    re, im = np.meshgrid(xs, xs)
    z = re + 1j * im
    inside = np.abs(z) < 1.0
    mask = np.zeros_like(inside)
    vals = np.abs(theta(z[inside]))
    mask[inside] = vals < eps
    _, count = ndimage.label(mask)
    return int(count)
