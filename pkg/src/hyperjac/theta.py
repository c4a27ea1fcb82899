r"""Riemann theta functions by truncated lattice sums.

All functions here evaluate

.. math::

    \theta\begin{bmatrix}\varepsilon\\ \delta\end{bmatrix}(\tau, z)
    = \sum_{n \in \mathbb{Z}^g + \varepsilon/2}
      \exp\bigl(\pi i (n, \tau n) + 2\pi i (n, z + \delta/2)\bigr)

over the lattice points inside an ellipsoid.  Writing ``Y = Im(tau)``,
``y = Im(z)`` and ``c = Y^{-1} y``, the modulus of a term is
``exp(pi y^T Y^{-1} y) * exp(-pi (n + c)^T Y (n + c))``.  The first factor is
the growth envelope; the ellipsoid ``(n + c)^T Y (n + c) <= r^2`` is chosen
so that the neglected terms sum to at most ``eps_abs`` times the envelope.

The tail estimate counts lattice points by packing disjoint balls of radius
``rho/2`` around them, where ``rho = sqrt(pi * lambda_min(Y))`` is a lower
bound on the shortest nonzero vector of the scaled lattice.  This gives, in
the scaled coordinates ``x``, ``|x|^2 = pi (n + c)^T Y (n + c)``,

.. math::

    \sum_{|x| > R} h(|x|) \le g (2/\rho)^g
        \int_{R - \rho}^\infty h(s) (s + \rho/2)^{g-1} \, ds

for any ``h`` decreasing on ``[R - rho, inf)``.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import gamma, gammaincc

from .chars import BinaryVector, Characteristic, enumerate_vectors

DEFAULT_EPS = 1e-15
SAFETY_MARGIN = 5.0
LATTICE_CAP = 10**8


class ThetaError(ValueError):
    """Raised for invalid theta function input."""


class LatticeCapError(ThetaError):
    """The truncation ellipsoid holds more lattice points than allowed."""


class PeriodMatrix:
    """A point of the Siegel upper half-space.

    The matrix is symmetrized after the symmetry check, and the Cholesky
    factor of its imaginary part is kept for lattice enumeration.

    Parameters
    ----------
    entries : array_like
        Square complex matrix.
    sym_tol : float
        Allowed relative asymmetry, measured entrywise against ``max(1, |tau|)``.
    """

    def __init__(self, entries, sym_tol: float = 1e-12):
        a = np.array(entries, dtype=complex)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ThetaError(f"period matrix must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ThetaError("period matrix has non-finite entries")
        scale = max(1.0, float(np.abs(a).max()))
        asym = float(np.abs(a - a.T).max())
        if asym > sym_tol * scale:
            raise ThetaError(f"period matrix is not symmetric (max asymmetry {asym:.3e})")
        a = (a + a.T) / 2
        imag = a.imag.copy()
        eig = np.linalg.eigvalsh(imag)
        if eig[0] <= 0:
            raise ThetaError(
                f"imaginary part is not positive definite (smallest eigenvalue {eig[0]:.3e})"
            )
        self.g = a.shape[0]
        self.matrix = a
        self.imag = imag
        self.imag_inv = np.linalg.inv(imag)
        # upper triangular R with Y = R^T R
        self.chol = np.linalg.cholesky(imag).T
        self.lambda_min = float(eig[0])
        for arr in (self.matrix, self.imag, self.imag_inv, self.chol):
            arr.setflags(write=False)

    def doubled(self) -> "PeriodMatrix":
        return PeriodMatrix(2 * self.matrix)

    def digest(self) -> str:
        """Short stable fingerprint of the exact matrix entries."""
        data = np.ascontiguousarray(self.matrix, dtype=np.complex128).tobytes()
        return hashlib.sha256(data).hexdigest()[:16]

    def __repr__(self) -> str:
        return f"PeriodMatrix(g={self.g}, digest={self.digest()})"


TauLike = Union[PeriodMatrix, np.ndarray, Sequence]


def as_period_matrix(tau: TauLike) -> PeriodMatrix:
    return tau if isinstance(tau, PeriodMatrix) else PeriodMatrix(tau)


@dataclass(frozen=True)
class TruncationSpec:
    """Truncation request and, after evaluation, what was actually used.

    ``radius`` is in ellipsoid units: the summed points satisfy
    ``(n + c)^T Im(tau) (n + c) <= radius**2``.  ``tail_bound`` is the absolute
    bound on the neglected terms, envelope included.
    """

    eps_abs: float = DEFAULT_EPS
    radius: Optional[float] = None
    term_count: int = 0
    tail_bound: Optional[float] = None
    max_points: int = LATTICE_CAP

    def __post_init__(self):
        if not self.eps_abs > 0:
            raise ThetaError(f"eps_abs must be positive, got {self.eps_abs}")


DEFAULT_SPEC = TruncationSpec()


def _as_vector(z, g: int) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if z.shape != (g,):
        raise ThetaError(f"argument must have length {g}, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ThetaError("argument has non-finite entries")
    return z


def _gauss_moment(k: int, lower: float) -> float:
    """``int_lower^inf s^k exp(-s^2) ds`` for ``lower >= 0``."""
    a = (k + 1) / 2
    return 0.5 * gamma(a) * gammaincc(a, lower * lower)


def tail_bound(radius_x: float, rho: float, g: int, lin: float = 0.0, const: float = 1.0) -> float:
    """Bound on ``sum_{|x| > radius_x} (lin*|x| + const) exp(-|x|^2)`` over a lattice.

    ``rho`` must not exceed the shortest nonzero lattice vector, and
    ``radius_x - rho`` must be at least ``1/sqrt(2)`` so the summand is
    decreasing on the integration range.
    """
    lower = radius_x - rho
    if lower < 1 / math.sqrt(2):
        return math.inf
    h = rho / 2
    total = 0.0
    for j in range(g):
        coef = math.comb(g - 1, j) * h ** (g - 1 - j)
        total += coef * (lin * _gauss_moment(j + 1, lower) + const * _gauss_moment(j, lower))
    return g * (2 / rho) ** g * total


def _choose_radius(tau: PeriodMatrix, eps: float, lin: float, const: float):
    rho = math.sqrt(math.pi * tau.lambda_min)
    rx = math.sqrt(math.log(1 / eps) + SAFETY_MARGIN)
    rx = max(rx, rho + 1 / math.sqrt(2))
    bound = tail_bound(rx, rho, tau.g, lin, const)
    while bound > eps:
        rx += 0.05
        bound = tail_bound(rx, rho, tau.g, lin, const)
    return rx, bound


def _ellipsoid_points(chol: np.ndarray, center: np.ndarray, r2: float, cap: int) -> np.ndarray:
    """Integer ``m`` with ``|chol @ (m + center)|^2 <= r2``; ``chol`` upper triangular."""
    g = len(center)
    det = float(np.prod(np.diag(chol)))
    r = math.sqrt(r2)
    # ellipsoid volume plus a boundary allowance
    estimate = math.pi ** (g / 2) / math.gamma(g / 2 + 1) * (r + g * 0.5 * chol.max()) ** g / det
    if estimate > cap:
        raise LatticeCapError(f"ellipsoid would hold about {estimate:.3g} points (cap {cap})")
    pts = np.zeros((1, 0), dtype=np.int64)
    rem = np.array([r2])
    for i in range(g - 1, -1, -1):
        if pts.shape[1]:
            off = (pts + center[i + 1 :]) @ chol[i, i + 1 :]
        else:
            off = np.zeros(len(pts))
        rii = chol[i, i]
        half = np.sqrt(np.maximum(rem, 0.0)) / rii
        mid = -off / rii - center[i]
        lo = np.ceil(mid - half).astype(np.int64)
        hi = np.floor(mid + half).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total > cap:
            raise LatticeCapError(f"ellipsoid holds more than {cap} points")
        parent = np.repeat(np.arange(len(pts)), cnt)
        start = np.repeat(lo, cnt)
        step = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        mi = start + step
        val = rii * (mi + center[i]) + off[parent]
        rem = rem[parent] - val * val
        pts = np.column_stack([mi, pts[parent]])
    return pts


def _lattice_sum(tau: PeriodMatrix, z: np.ndarray, eps_half: np.ndarray, delta_half: np.ndarray,
                 spec: TruncationSpec, gradient: bool = False):
    """Core sum over ``n in Z^g + eps_half`` with phase shift ``delta_half``.

    Returns ``(value, used_spec)``; ``value`` is a length-g vector of partial
    derivatives when ``gradient`` is set.
    """
    y = z.imag
    c = tau.imag_inv @ y
    envelope = math.exp(math.pi * float(y @ c))
    if gradient:
        # |2 pi n_j| <= 2 sqrt(pi/lambda_min) |x| + 2 pi |c|
        lin = 2 * math.sqrt(math.pi / tau.lambda_min)
        const = 2 * math.pi * float(np.linalg.norm(c))
    else:
        lin, const = 0.0, 1.0
    rx, bound = _choose_radius(tau, spec.eps_abs, lin, const)
    r2 = rx * rx / math.pi
    m = _ellipsoid_points(tau.chol, eps_half + c, r2, spec.max_points)
    n = m + eps_half
    quad = np.einsum("ij,jk,ik->i", n, tau.matrix, n)
    phase = 1j * math.pi * (quad + 2 * (n @ (z + delta_half)))
    terms = np.exp(phase)
    if gradient:
        value = (2j * math.pi) * (terms @ n)
    else:
        value = terms.sum()
    used = replace(spec, radius=math.sqrt(r2), term_count=len(m), tail_bound=bound * envelope)
    return value, used


def _finish(value, used, full_output):
    return (value, used) if full_output else value


def theta_char(tau: TauLike, z, c: Characteristic, spec: TruncationSpec = DEFAULT_SPEC,
               full_output: bool = False):
    """Theta function with characteristic ``c`` by a direct half-integer lattice sum.

    Returns the complex value, or ``(value, TruncationSpec)`` when
    ``full_output`` is set.
    """
    tau = as_period_matrix(tau)
    z = _as_vector(z, tau.g)
    if c.g != tau.g:
        raise ThetaError(f"characteristic {c} has genus {c.g}, tau has genus {tau.g}")
    value, used = _lattice_sum(tau, z, c.eps.to_array() / 2, c.delta.to_array() / 2, spec)
    return _finish(complex(value), used, full_output)


def theta(tau: TauLike, z, spec: TruncationSpec = DEFAULT_SPEC, full_output: bool = False):
    """Riemann's theta function, i.e. characteristic ``[0;0]``."""
    tau = as_period_matrix(tau)
    return theta_char(tau, z, Characteristic.zero(tau.g), spec, full_output)


def theta_char_shift_route(tau: TauLike, z, c: Characteristic,
                           spec: TruncationSpec = DEFAULT_SPEC) -> complex:
    """``theta[c](z)`` recovered from Riemann's theta at the shifted point.

    Uses ``theta[eps;delta](z) = e[(eps, tau eps)/4 + (eps, z) + (eps, delta)/2]
    * theta(z + (tau eps + delta)/2)`` with ``e[x] = exp(pi i x)`` and the
    integer scalar product ``(eps, delta)``.
    """
    tau = as_period_matrix(tau)
    z = _as_vector(z, tau.g)
    e = c.eps.to_array()
    d = c.delta.to_array()
    shifted = theta(tau, z + (tau.matrix @ e + d) / 2, spec)
    factor = np.exp(1j * math.pi * (e @ tau.matrix @ e / 4 + e @ z + (e @ d) / 2))
    return complex(factor * shifted)


def theta2(tau: TauLike, z, eps: BinaryVector, spec: TruncationSpec = DEFAULT_SPEC,
           full_output: bool = False):
    """Second order theta ``Theta[eps](tau, z) = theta[eps;0](2 tau, 2 z)``."""
    tau = as_period_matrix(tau)
    z = _as_vector(z, tau.g)
    c = Characteristic(eps, BinaryVector.zero(tau.g))
    return theta_char(tau.doubled(), 2 * z, c, spec, full_output)


def _bits(v, g: int) -> np.ndarray:
    if isinstance(v, BinaryVector):
        return v.to_array()
    a = np.asarray(v, dtype=float)
    if a.shape != (g,):
        raise ThetaError(f"expected an integer vector of length {g}")
    return a


def theta2_shift_factor(tau: TauLike, z, delta: BinaryVector, a, b):
    """Right-hand side data for a half-period shift of a second order theta.

    For integer vectors ``a, b`` returns ``(factor, target)`` such that
    ``Theta[delta](z + (tau a + b)/2) = factor * Theta[target](z)``.
    """
    tau = as_period_matrix(tau)
    z = _as_vector(z, tau.g)
    av, bv = _bits(a, tau.g), _bits(b, tau.g)
    dv = delta.to_array()
    sign = -1.0 if int(round(dv @ bv)) % 2 else 1.0
    factor = sign * np.exp(1j * math.pi * (-0.5 * (av @ tau.matrix @ av) - 2 * (av @ z)))
    target = BinaryVector.from_bits((np.rint(dv + av).astype(int)) % 2)
    return complex(factor), target


def theta2_shifted(tau: TauLike, z, delta: BinaryVector, a, b,
                   spec: TruncationSpec = DEFAULT_SPEC, tol: float = 1e-9) -> complex:
    """``Theta[delta](z + (tau a + b)/2)``, cross-checked against the half-period rule.

    Raises
    ------
    ThetaError
        If the direct value and ``factor * Theta[delta + a](z)`` disagree
        beyond ``tol`` relative to their combined size plus the tail bounds.
    """
    tau = as_period_matrix(tau)
    z = _as_vector(z, tau.g)
    av, bv = _bits(a, tau.g), _bits(b, tau.g)
    direct, used_d = theta2(tau, z + (tau.matrix @ av + bv) / 2, delta, spec, full_output=True)
    factor, target = theta2_shift_factor(tau, z, delta, a, b)
    other, used_o = theta2(tau, z, target, spec, full_output=True)
    rhs = factor * other
    slack = used_d.tail_bound + abs(factor) * used_o.tail_bound
    if abs(direct - rhs) > tol * (abs(direct) + abs(rhs)) + slack:
        raise ThetaError(
            f"half-period shift rule violated: {direct!r} vs {rhs!r} (delta={delta})"
        )
    return direct


@dataclass(frozen=True)
class KummerVector:
    """Second order theta values ``Theta[eps](z)`` indexed in lexicographic order."""

    coords: np.ndarray
    g: int

    def __post_init__(self):
        if self.coords.shape != (2 ** self.g,):
            raise ThetaError("Kummer vector has the wrong length")
        if not np.any(self.coords != 0):
            raise ThetaError("Kummer vector vanished identically; numerics fault")

    def __getitem__(self, eps: BinaryVector) -> complex:
        return complex(self.coords[eps.mask])

    def normalized(self) -> np.ndarray:
        """Scale so the coordinate of largest modulus equals one."""
        k = int(np.argmax(np.abs(self.coords)))
        return self.coords / self.coords[k]


def kummer(tau: TauLike, z, spec: TruncationSpec = DEFAULT_SPEC) -> KummerVector:
    """The Kummer image ``K(z) = (Theta[eps](z))_eps``."""
    tau = as_period_matrix(tau)
    z = _as_vector(z, tau.g)
    coords = np.array([theta2(tau, z, eps, spec) for eps in enumerate_vectors(tau.g)])
    return KummerVector(coords, tau.g)


def projective_distance(u, v) -> float:
    """Entrywise distance after normalizing both by ``u``'s largest coordinate."""
    u = np.asarray(getattr(u, "coords", u))
    v = np.asarray(getattr(v, "coords", v))
    k = int(np.argmax(np.abs(u)))
    if v[k] == 0:
        return math.inf
    return float(np.abs(u / u[k] - v / v[k]).max())


def riemann_bilinear_check(tau: TauLike, c: Characteristic, z, w,
                           spec: TruncationSpec = DEFAULT_SPEC) -> float:
    """Relative residual of the bilinear addition theorem.

    Compares ``theta[c](z) theta[c](w)`` with
    ``sum_sigma (-1)^(delta, sigma + eps) Theta[sigma + eps]((z+w)/2) Theta[sigma]((z-w)/2)``
    and returns ``|LHS - RHS| / (1 + |LHS| + |RHS|)``.  The ``(delta, eps)``
    part of the sign only matters for odd ``c``.
    """
    tau = as_period_matrix(tau)
    z = _as_vector(z, tau.g)
    w = _as_vector(w, tau.g)
    lhs = theta_char(tau, z, c, spec) * theta_char(tau, w, c, spec)
    rhs = 0j
    for sigma in enumerate_vectors(tau.g):
        sign = -1 if c.delta.dot(sigma + c.eps) else 1
        rhs += sign * theta2(tau, (z + w) / 2, sigma + c.eps, spec) * theta2(tau, (z - w) / 2, sigma, spec)
    return abs(lhs - rhs) / (1 + abs(lhs) + abs(rhs))


def theta_gradient(tau: TauLike, z, spec: TruncationSpec = DEFAULT_SPEC,
                   c: Optional[Characteristic] = None, full_output: bool = False):
    """Gradient of ``theta[c](tau, z)`` in ``z`` by the differentiated lattice sum."""
    tau = as_period_matrix(tau)
    z = _as_vector(z, tau.g)
    c = c or Characteristic.zero(tau.g)
    value, used = _lattice_sum(tau, z, c.eps.to_array() / 2, c.delta.to_array() / 2, spec,
                               gradient=True)
    return _finish(np.asarray(value, dtype=complex), used, full_output)
