r"""Period matrices of real hyperelliptic curves.

For ``y^2 = prod_i (x - p_i)`` with real ``p_1 < ... < p_{2g+2}``, the
integrals of ``x^{j-1} dx / y`` between consecutive branch points are computed
along the real axis on the sheet where ``y > 0`` right of ``p_{2g+2}``,
continuing ``y`` through the upper half-plane.  Across each branch point the
square root picks up a factor ``i``, so on ``(p_k, p_{k+1})``

.. math::

    y = i^{2g+2-k} \sqrt{|P(x)|}.

With ``I_k`` the integral over ``[p_k, p_{k+1}]``, the cycles are

* ``a_1 = 2 I_1`` and ``a_i = 2 I_{2i-1} + a_{i-1}``,
* ``b_i = 2 I_{2i}``,

which is the left-to-right skewer basis: after normalizing the a-periods, the
Weierstrass points land on the half periods returned by
:func:`weierstrass_images`.  Each segment integral has inverse square-root
singularities at both ends, so Gauss-Chebyshev quadrature integrates it with
spectral accuracy.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .chars import Characteristic, basis_vector, half_period_characteristic, s_vector
from .theta import DEFAULT_SPEC, PeriodMatrix, TruncationSpec, theta

DEFAULT_NODES = 256
MAX_NODES = 1 << 15
CONVERGENCE_TOL = 1e-9
SYMMETRY_TOL = 1e-8


class PeriodError(ValueError):
    """Raised when the period computation fails its own consistency checks."""


class QuadratureError(PeriodError):
    """Node doubling never reached the convergence tolerance."""


@dataclass(frozen=True)
class BranchConfig:
    """Strictly increasing real branch points ``p_1 < ... < p_{2g+2}``, ``g >= 2``."""

    points: Tuple[float, ...]

    def __post_init__(self):
        pts = tuple(float(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) % 2 or len(pts) < 6:
            raise ValueError(f"need an even number (>= 6) of branch points, got {len(pts)}")
        if not all(math.isfinite(p) for p in pts):
            raise ValueError("branch points must be finite")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("branch points must be strictly increasing")

    @property
    def g(self) -> int:
        return len(self.points) // 2 - 1

    @classmethod
    def parse(cls, text: str) -> "BranchConfig":
        """Accept a JSON array or a comma separated list."""
        text = text.strip()
        if text.startswith("["):
            values = json.loads(text)
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
        return cls(tuple(values))


def gauss_chebyshev(n: int) -> Tuple[np.ndarray, float]:
    """Nodes of the ``n``-point rule for weight ``(1 - t^2)^{-1/2}``; all weights are ``pi/n``."""
    k = np.arange(1, n + 1)
    return np.cos((2 * k - 1) * np.pi / (2 * n)), math.pi / n


def segment_integrals(points: Sequence[float], nodes: int) -> np.ndarray:
    """``I[k, j] = int_{p_{k+1}}^{p_{k+2}} x^j dx / y`` for ``k = 0..2g``, ``j = 0..g-1``.

    Indices are 0-based; the sheet convention is the one in the module docstring.
    """
    p = np.asarray(points, dtype=float)
    g = len(p) // 2 - 1
    t, w = gauss_chebyshev(nodes)
    out = np.empty((2 * g + 1, g), dtype=complex)
    powers = np.arange(g)
    for k in range(2 * g + 1):
        mid, half = (p[k] + p[k + 1]) / 2, (p[k + 1] - p[k]) / 2
        x = mid + half * t
        others = np.delete(p, [k, k + 1])
        rest = np.sqrt(np.abs(np.prod(x[:, None] - others[None, :], axis=1)))
        # after x = mid + half*t the endpoint factors become half * sqrt(1 - t^2)
        j_real = w * ((x[:, None] ** powers[None, :]) / rest[:, None]).sum(axis=0)
        n_right = 2 * g + 2 - (k + 1)
        out[k] = j_real * (1j) ** (-n_right)
    return out


@dataclass(frozen=True)
class PeriodData:
    """Raw periods (rows: differentials, columns: cycles) and the normalized ``tau``."""

    a_periods: np.ndarray
    b_periods: np.ndarray
    tau: PeriodMatrix
    nodes: int
    convergence_delta: float
    symmetry_error: float

    def to_json(self) -> dict:
        def pairs(m):
            return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m)]
        return {
            "genus": self.tau.g,
            "a_periods": pairs(self.a_periods),
            "b_periods": pairs(self.b_periods),
            "tau": pairs(self.tau.matrix),
            "quad_nodes": self.nodes,
            "convergence_delta": self.convergence_delta,
            "symmetry_error": self.symmetry_error,
        }


def _cycles(seg: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    g = seg.shape[1]
    a = [2 * seg[0]]
    for i in range(2, g + 1):
        a.append(2 * seg[2 * i - 2] + a[-1])
    b = [2 * seg[2 * i - 1] for i in range(1, g + 1)]
    return np.array(a).T, np.array(b).T


def _relative_change(coarse: np.ndarray, fine: np.ndarray) -> float:
    scale = np.abs(fine).max(axis=1)
    return float((np.abs(fine - coarse).max(axis=1) / scale).max())


def period_matrix(cfg: BranchConfig, quad_nodes: int = DEFAULT_NODES,
                  tol: float = CONVERGENCE_TOL, max_nodes: int = MAX_NODES) -> PeriodData:
    """Normalized period matrix of ``y^2 = prod (x - p_i)`` in the skewer basis.

    The node count starts at ``quad_nodes`` and doubles until the segment
    integrals change by less than ``tol`` (relative to each segment's largest
    entry).  ``convergence_delta`` is the change at the last doubling.

    Raises
    ------
    QuadratureError
        If ``max_nodes`` is reached without convergence.
    PeriodError
        If ``tau`` is not symmetric to ``1e-8`` or ``Im(tau)`` is not positive
        definite, which would mean the sheet bookkeeping is wrong.
    """
    if quad_nodes < 1:
        raise ValueError("quad_nodes must be positive")
    n = quad_nodes
    coarse = segment_integrals(cfg.points, n)
    while True:
        fine = segment_integrals(cfg.points, 2 * n)
        delta = _relative_change(coarse, fine)
        if delta < tol:
            break
        if 2 * n >= max_nodes:
            raise QuadratureError(
                f"quadrature did not converge: change {delta:.3e} at {2 * n} nodes"
            )
        n, coarse = 2 * n, fine
    # report the coarser rule, whose error the doubling bounds
    a, b = _cycles(coarse)
    t = np.linalg.solve(a, b)
    sym = float(np.abs(t - t.T).max() / np.abs(t).max())
    if sym > SYMMETRY_TOL:
        raise PeriodError(f"period matrix not symmetric (relative error {sym:.3e})")
    try:
        tau = PeriodMatrix((t + t.T) / 2)
    except ValueError as exc:
        raise PeriodError(f"normalized periods are not in the Siegel space: {exc}") from None
    return PeriodData(a, b, tau, n, delta, sym)


@dataclass(frozen=True)
class WeierstrassImages:
    """Abel-Jacobi images ``A(p_1), ..., A(p_{2g+2})`` based at ``p_1``.

    ``half_periods[i] = (a, b)`` are integer vectors with
    ``images[i] = (tau a + b) / 2`` exactly, so the lift to ``C^g`` is kept.
    """

    images: np.ndarray
    half_periods: Tuple[Tuple[np.ndarray, np.ndarray], ...]
    r_shift: np.ndarray

    @property
    def g(self) -> int:
        return self.images.shape[1]

    def point(self, i: int) -> np.ndarray:
        """``A(p_i)`` with the 1-based branch point index."""
        return self.images[i - 1]

    def characteristic(self, i: int, j: int) -> Characteristic:
        """Characteristic of the half period ``A(p_i) + A(p_j)``."""
        ai, bi = self.half_periods[i - 1]
        aj, bj = self.half_periods[j - 1]
        return half_period_characteristic(ai + aj, bi + bj)


def weierstrass_half_periods(g: int) -> List[Tuple[np.ndarray, np.ndarray]]:
    """Integer pairs ``(a, b)`` with ``A(p_k) = (tau a + b)/2``, ``k = 1..2g+2``."""
    def vec(v):
        return np.array(v.bits, dtype=int)
    zero = np.zeros(g, dtype=int)
    out = [(zero, zero)]
    for i in range(1, g + 1):
        s_prev, s_i, e_i = vec(s_vector(g, i - 1)), vec(s_vector(g, i)), vec(basis_vector(g, i))
        out.append((s_prev, e_i + 2 * s_prev))   # p_{2i}
        out.append((s_i, e_i + 2 * s_prev))      # p_{2i+1}
    out.append((vec(s_vector(g, g)), zero))      # p_{2g+2}
    return out


def weierstrass_images(tau) -> WeierstrassImages:
    """Images of all Weierstrass points and the shift ``R = A(p_2)``."""
    tau = tau if isinstance(tau, PeriodMatrix) else PeriodMatrix(tau)
    hp = weierstrass_half_periods(tau.g)
    images = np.array([(tau.matrix @ a + b) / 2 for a, b in hp])
    images.setflags(write=False)
    return WeierstrassImages(images, tuple(hp), images[1].copy())


def normalized_theta(tau: PeriodMatrix, z: np.ndarray, spec: TruncationSpec = DEFAULT_SPEC) -> float:
    """``|theta(z)|`` divided by its growth envelope ``exp(pi y^T Y^{-1} y)``."""
    y = np.asarray(z).imag
    return abs(theta(tau, z, spec)) * math.exp(-math.pi * float(y @ tau.imag_inv @ y))


def riemann_vanishing_check(tau, images: WeierstrassImages, spec: TruncationSpec = DEFAULT_SPEC,
                            vanish_tol: float = 1e-8) -> dict:
    """Compare ``theta(A(p_j) + R)`` with the parity of ``A(p_2) + A(p_j)``.

    Returns per-point records with the predicted parity, the envelope
    normalized value and whether the two agree: odd points must vanish below
    ``vanish_tol`` and even points must stay above it.
    """
    tau = tau if isinstance(tau, PeriodMatrix) else PeriodMatrix(tau)
    if images.g != tau.g:
        raise ValueError("genus of images and tau differ")
    records = []
    for j in range(1, 2 * tau.g + 3):
        char = images.characteristic(2, j)
        value = normalized_theta(tau, images.point(j) + images.r_shift, spec)
        odd = char.is_odd()
        records.append({
            "point": j,
            "characteristic": str(char),
            "parity": "odd" if odd else "even",
            "value": value,
            "consistent": (value < vanish_tol) if odd else (value >= vanish_tol),
        })
    zeros = [r["point"] for r in records if r["parity"] == "odd"]
    return {
        "genus": tau.g,
        "vanishing_points": zeros,
        "expected_vanishing_points": [2 * k + 2 for k in range(1, tau.g + 1)],
        "records": records,
        "consistent": all(r["consistent"] for r in records),
    }
