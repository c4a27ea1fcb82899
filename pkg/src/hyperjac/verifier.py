"""Numerical checks of the addition formula chain, the cubics and multisecant ranks.

Residuals are scale free: the modulus of a signed sum divided by the sum of
the moduli of its terms.  Theta values vary over many orders of magnitude
across ``z`` and ``tau``, so absolute residuals would not be comparable.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .chars import BinaryVector, enumerate_vectors
from .identities import CubicIdentity, HalfPeriodSpec, cubic_identity
from .periods import weierstrass_images
from .theta import (DEFAULT_SPEC, PeriodMatrix, TruncationSpec, as_period_matrix, kummer,
                    theta, theta_char)

DENOMINATOR_TOL = 1e-10
RANK_THRESHOLD = 1e-8
AMBIGUITY_BAND = 1e-4


class DenominatorError(ArithmeticError):
    """A theta value in a denominator is too close to zero; resample the inputs."""


@dataclass
class IdentityReport:
    identity_id: str
    tolerance: float
    samples: List[dict] = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((s["residual"] for s in self.samples), default=0.0)

    @property
    def verdict(self) -> str:
        return "pass" if self.max_residual < self.tolerance else "fail"

    def add(self, residual: float, **inputs) -> None:
        self.samples.append({"inputs": inputs, "residual": float(residual)})

    def to_json(self) -> dict:
        return {
            "identity_id": self.identity_id,
            "tolerance": self.tolerance,
            "samples": self.samples,
            "max_residual": self.max_residual,
            "verdict": self.verdict,
        }


@dataclass
class SecantReport:
    """Singular value rank decision for a stack of normalized Kummer rows.

    ``decided_rank`` is ``None`` when some relative singular value falls in the
    ambiguity band ``[threshold, band)``; ``gap_ratio`` is then that value.
    """

    matrix_shape: Tuple[int, int]
    singular_values: List[float]
    decided_rank: Optional[int]
    gap_ratio: float
    threshold: float = RANK_THRESHOLD

    @property
    def ambiguous(self) -> bool:
        return self.decided_rank is None

    def to_json(self) -> dict:
        return {
            "matrix_shape": list(self.matrix_shape),
            "singular_values": self.singular_values,
            "decided_rank": self.decided_rank,
            "gap_ratio": self.gap_ratio,
            "ambiguous": self.ambiguous,
        }


def _vec(z, g: int) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape != (g,):
        raise ValueError(f"expected a vector of length {g}, got shape {z.shape}")
    return z


def _scale_free(terms) -> float:
    terms = np.asarray(terms, dtype=complex)
    total = float(np.abs(terms).sum())
    return float(abs(terms.sum())) / total if total else 0.0


def _envelope(tau: PeriodMatrix, z) -> float:
    y = np.asarray(z).imag
    return math.exp(math.pi * float(y @ tau.imag_inv @ y))


def _checked_theta(tau: PeriodMatrix, z, spec: TruncationSpec) -> complex:
    value = theta(tau, z, spec)
    if abs(value) < DENOMINATOR_TOL * _envelope(tau, z):
        raise DenominatorError(f"theta vanishes in a denominator at {np.round(z, 6)}")
    return value


@dataclass(frozen=True)
class AdditionData:
    """Points ``P = 0``, ``A_1..A_g``, ``Q`` and the shift ``R`` of the addition formula."""

    Q: np.ndarray
    A: Tuple[np.ndarray, ...]
    R: np.ndarray
    half_periods: Optional[HalfPeriodSpec] = None

    @property
    def points(self) -> List[np.ndarray]:
        """``[P, A_1, ..., A_g, Q]``."""
        return [np.zeros_like(self.Q), *self.A, self.Q]


def hyperelliptic_data(tau) -> AdditionData:
    """``Q = R = A(p_2)`` and ``A_k = A(p_{2k+2})`` from the Weierstrass images."""
    tau = as_period_matrix(tau)
    w = weierstrass_images(tau)
    g = tau.g
    return AdditionData(w.point(2), tuple(w.point(2 * k + 2) for k in range(1, g + 1)),
                        w.r_shift, HalfPeriodSpec.hyperelliptic(g))


def random_siegel(g: int, rng: np.random.Generator) -> PeriodMatrix:
    """``S + i (Q^T Q + g I)`` with ``S`` symmetric uniform on ``[-0.4, 0.4]``, ``Q`` on ``[-0.3, 0.3]``."""
    s = rng.uniform(-0.4, 0.4, (g, g))
    s = np.triu(s) + np.triu(s, 1).T
    q = rng.uniform(-0.3, 0.3, (g, g))
    return PeriodMatrix(s + 1j * (q.T @ q + g * np.eye(g)))


def random_point(tau, rng: np.random.Generator) -> np.ndarray:
    """``tau a + b`` with ``a, b`` uniform on ``[-1/2, 1/2)^g``: a point of the fundamental cell."""
    tau = as_period_matrix(tau)
    a = rng.uniform(-0.5, 0.5, tau.g)
    b = rng.uniform(-0.5, 0.5, tau.g)
    return tau.matrix @ a + b


# -- addition formula ---------------------------------------------------------

def fact1_terms(tau, points: Sequence, R, x, y, spec: TruncationSpec = DEFAULT_SPEC) -> np.ndarray:
    """Terms of the cleared-denominator addition formula, all moved to one side.

    ``points`` is ``[P, A_1, ..., A_g, Q]`` with ``P = 0``.  Returns
    ``[LHS, -RHS_1, term_1, ..., term_g]`` whose sum vanishes on a Jacobian.

    Raises
    ------
    DenominatorError
        When a theta that divides in the original formula is below
        ``1e-10`` of its envelope.
    """
    tau = as_period_matrix(tau)
    g = tau.g
    pts = [_vec(p, g) for p in points]
    if len(pts) != g + 2:
        raise ValueError(f"need g + 2 = {g + 2} points, got {len(pts)}")
    if np.any(pts[0] != 0):
        raise ValueError("the first point must be P = 0")
    A, Q = pts[1:-1], pts[-1]
    R, x, y = _vec(R, g), _vec(x, g), _vec(y, g)

    def th(u):
        return theta(tau, u, spec)

    for u in (Q + R, x + y + R, x + R, y + R):
        _checked_theta(tau, u, spec)
    dens = [_checked_theta(tau, 2 * a + R, spec) for a in A]
    tR = th(R)
    out = [th(Q + x + y + R) * th(Q + R) * th(x + R) * th(y + R),
           -th(x + y + R) * tR * th(Q + x + R) * th(Q + y + R)]
    for a, den in zip(A, dens):
        out.append(tR * th(Q + a + R) * th(Q - a + x + y + R) * th(a + x + R) * th(a + y + R) / den)
    return np.array(out)


def eval_fact1(tau, points: Sequence, R, x, y, spec: TruncationSpec = DEFAULT_SPEC) -> float:
    """Scale-free residual of the addition formula at ``(x, y)``."""
    return _scale_free(fact1_terms(tau, points, R, x, y, spec))


def _kummer_at(tau, z, spec) -> np.ndarray:
    return kummer(tau, z, spec).coords


def mess_terms(tau, Q, A: Sequence, R, z, spec: TruncationSpec = DEFAULT_SPEC) -> np.ndarray:
    """Per-``sigma`` terms of the bracketed coefficients ``b_sigma(z)``.

    Returns an array of shape ``(2^g, g + 2)``; row sums are ``b_sigma``.
    """
    tau = as_period_matrix(tau)
    g = tau.g
    Q, R, z = _vec(Q, g), _vec(R, g), _vec(z, g)
    A = [_vec(a, g) for a in A]

    def th(u):
        return theta(tau, u, spec)

    tR = th(R)
    cols = [th(Q + 2 * z + R) * th(Q + R) * _kummer_at(tau, z + R, spec),
            -th(2 * z + R) * tR * _kummer_at(tau, Q + z + R, spec)]
    for a in A:
        den = _checked_theta(tau, 2 * a + R, spec)
        coef = tR * th(Q + a + R) * th(Q - a + 2 * z + R) / den
        cols.append(coef * _kummer_at(tau, a + z + R, spec))
    return np.column_stack(cols)


def eval_mess(tau, Q, A: Sequence, R, z, w, sigma: BinaryVector,
              spec: TruncationSpec = DEFAULT_SPEC) -> float:
    """Scale-free residual of the coefficient ``b_sigma(z)`` of ``Theta[sigma](w)``.

    ``w`` is accepted for the signature of the chain but does not enter
    ``b_sigma``; see :func:`chain_consistency` for the recombination.
    """
    return _scale_free(mess_terms(tau, Q, A, R, z, spec)[sigma.mask])


def lastadd_terms(tau, Q, A: Sequence, R, z, spec: TruncationSpec = DEFAULT_SPEC,
                  ratios: Optional[Sequence[complex]] = None) -> np.ndarray:
    """Terms of the all-second-order form, shape ``(2^g, g + 2)``.

    Column ``0`` and ``1`` hold the ``Q``-free and ``Q`` parts, column
    ``k + 1`` the ``A_k`` part with its coefficient ``theta(R)/theta(2A_k + R)``.
    ``ratios`` overrides those coefficients, e.g. by their closed form at half
    periods.
    """
    tau = as_period_matrix(tau)
    g = tau.g
    Q, R, z = _vec(Q, g), _vec(R, g), _vec(z, g)
    A = [_vec(a, g) for a in A]
    k_z = _kummer_at(tau, z, spec)
    k_qzr = _kummer_at(tau, Q + z + R, spec)
    k_zr = _kummer_at(tau, z + R, spec)
    cols = [(k_qzr @ k_z) * k_zr, -(k_zr @ k_z) * k_qzr]
    if ratios is None:
        tR = theta(tau, R, spec)
        ratios = [tR / _checked_theta(tau, 2 * a + R, spec) for a in A]
    for a, ratio in zip(A, ratios):
        cols.append(ratio * (k_qzr @ _kummer_at(tau, z - a, spec)) * _kummer_at(tau, a + z + R, spec))
    return np.column_stack(cols)


def eval_lastadd(tau, Q, A: Sequence, R, z, sigma: BinaryVector,
                 spec: TruncationSpec = DEFAULT_SPEC) -> float:
    """Scale-free residual of the second-order form for one ``sigma``."""
    return _scale_free(lastadd_terms(tau, Q, A, R, z, spec)[sigma.mask])


def half_period_ratio(tau, hp: HalfPeriodSpec, k: int) -> complex:
    """Closed form of ``theta(R) / theta(2 A_k + R)`` at half periods (1-based ``k``).

    ``e[(a_k, tau a_k) + (a, tau a_k)] * (-1)^(a_k, b)``, ``e[x] = exp(pi i x)``.
    """
    tau = as_period_matrix(tau)
    ak = hp.alpha_k[k - 1].to_array()
    a = hp.alpha.to_array()
    sign = -1 if hp.alpha_k[k - 1].dot(hp.beta) else 1
    return complex(sign * np.exp(1j * math.pi * (ak @ tau.matrix @ ak + a @ tau.matrix @ ak)))


def half_period_ratio_check(tau, data: AdditionData, spec: TruncationSpec = DEFAULT_SPEC) -> float:
    """Largest relative gap between computed and closed-form coefficient ratios."""
    tau = as_period_matrix(tau)
    if data.half_periods is None:
        raise ValueError("addition data carries no half-period description")
    worst = 0.0
    tR = theta(tau, data.R, spec)
    for k, a in enumerate(data.A, start=1):
        computed = tR / theta(tau, 2 * a + data.R, spec)
        closed = half_period_ratio(tau, data.half_periods, k)
        worst = max(worst, float(abs(computed - closed) / abs(closed)))
    return worst


def chain_consistency(tau, data: AdditionData, x, y, spec: TruncationSpec = DEFAULT_SPEC) -> dict:
    """Cross-check the three forms of the addition formula at one ``(x, y)``.

    ``fact1_vs_mess`` compares the addition formula sum with ``sum_sigma b_sigma(z)
    Theta[sigma](w)``; ``mess_vs_lastadd`` compares ``b_sigma`` from theta
    products with its all-second-order form.  Both are normalized by the
    corresponding term magnitudes.
    """
    tau = as_period_matrix(tau)
    x, y = _vec(x, tau.g), _vec(y, tau.g)
    z, w = (x + y) / 2, (x - y) / 2
    f1 = fact1_terms(tau, data.points, data.R, x, y, spec)
    mess = mess_terms(tau, data.Q, data.A, data.R, z, spec)
    last = lastadd_terms(tau, data.Q, data.A, data.R, z, spec)
    k_w = _kummer_at(tau, w, spec)
    b_mess = mess.sum(axis=1)
    b_last = last.sum(axis=1)
    recombined = b_mess @ k_w
    scale1 = float(np.abs(f1).sum() + np.abs(mess).sum(axis=1) @ np.abs(k_w))
    scale2 = np.abs(mess).sum(axis=1) + np.abs(last).sum(axis=1)
    return {
        "fact1_vs_mess": float(abs(f1.sum() - recombined) / scale1),
        "mess_vs_lastadd": float((np.abs(b_mess - b_last) / scale2).max()),
    }


# -- cubics -------------------------------------------------------------------

def _cubic_from_kummer(identity: CubicIdentity, k: np.ndarray) -> Tuple[complex, float]:
    terms = [m.coefficient * k[m.factors[0].mask] * k[m.factors[1].mask] * k[m.factors[2].mask]
             for m in identity.monomials]
    if not terms:
        return 0j, 0.0
    return complex(sum(terms)), _scale_free(terms)


def eval_cubic(tau, identity: CubicIdentity, z, spec: TruncationSpec = DEFAULT_SPEC):
    """Value of the cubic at ``z`` and its scale-free residual."""
    tau = as_period_matrix(tau)
    if identity.genus != tau.g:
        raise ValueError(f"identity has genus {identity.genus}, tau has genus {tau.g}")
    return _cubic_from_kummer(identity, _kummer_at(tau, _vec(z, tau.g), spec))


def eval_family(tau, family: Dict[BinaryVector, CubicIdentity], z,
                spec: TruncationSpec = DEFAULT_SPEC) -> Dict[BinaryVector, float]:
    """Residual of every cubic in ``family`` at one ``z``, sharing the Kummer vector."""
    tau = as_period_matrix(tau)
    k = _kummer_at(tau, _vec(z, tau.g), spec)
    return {s: _cubic_from_kummer(ident, k)[1] for s, ident in sorted(family.items())}


def factor_check_genus3(tau, sigma: BinaryVector, z, spec: TruncationSpec = DEFAULT_SPEC) -> float:
    """Compare the genus-3 cubic with ``1/2 Theta[101+sigma](z) theta[101;111](2z) theta[101;111](0)``.

    Both sides come from independent evaluations: the cubic from second order
    thetas, the product from first order thetas with characteristic.  Returns
    ``|cubic - product| / (|cubic terms| + |product|)``.
    """
    from .chars import Characteristic

    tau = as_period_matrix(tau)
    if tau.g != 3:
        raise ValueError("factor_check_genus3 needs genus 3")
    z = _vec(z, 3)
    ident = cubic_identity(3, sigma)
    k = _kummer_at(tau, z, spec)
    terms = [m.coefficient * k[m.factors[0].mask] * k[m.factors[1].mask] * k[m.factors[2].mask]
             for m in ident.monomials]
    c = Characteristic.parse("[101;111]")
    shifted = sigma + BinaryVector.from_str("101")
    product = 0.5 * k[shifted.mask] * theta_char(tau, 2 * z, c, spec) * theta_char(tau, np.zeros(3), c, spec)
    scale = float(np.abs(terms).sum()) + abs(product)
    return abs(sum(terms) - product) / scale if scale else 0.0


def nondegeneracy_check(tau, family: Dict[BinaryVector, CubicIdentity], z_samples: Sequence,
                        spec: TruncationSpec = DEFAULT_SPEC, tol: float = 1e-8) -> dict:
    """Check that the coefficients in front of the Kummer factors are not all ``~0``.

    For each cubic the quadratic coefficient of every Kummer factor is
    evaluated at all ``z_samples`` relative to ``max |Theta|^2``; a coefficient
    counts as nonzero if it exceeds ``tol`` at some sample.  Empty identities
    are vacuous and count as degenerate.
    """
    tau = as_period_matrix(tau)
    ks = [_kummer_at(tau, _vec(z, tau.g), spec) for z in z_samples]
    per_sigma = {}
    for sigma, ident in sorted(family.items()):
        if ident.is_empty():
            per_sigma[str(sigma)] = {"vacuous": True, "nondegenerate": False, "max_coefficient": 0.0}
            continue
        coeffs = ident.coefficients
        if coeffs is None:
            coeffs = cubic_identity(ident.genus, sigma).coefficients
        best = 0.0
        for k in ks:
            norm = float(np.abs(k).max()) ** 2
            for pairs in coeffs.values():
                val = sum(c * k[a.mask] * k[b.mask] for (a, b), c in pairs.items())
                best = max(best, float(abs(val)) / norm)
        per_sigma[str(sigma)] = {"vacuous": False, "nondegenerate": bool(best > tol), "max_coefficient": best}
    vacuous = all(r["vacuous"] for r in per_sigma.values())
    return {
        "vacuous": vacuous,
        "nondegenerate": (not vacuous) and all(r["nondegenerate"] or r["vacuous"] for r in per_sigma.values()),
        "per_sigma": per_sigma,
    }


# -- multisecants ---------------------------------------------------------------

def decide_rank(matrix: np.ndarray, threshold: float = RANK_THRESHOLD,
                band: float = AMBIGUITY_BAND) -> SecantReport:
    """Rank from the relative singular values ``s_i / s_1``.

    Values below ``threshold`` count as zero, values at or above ``band`` as
    nonzero; anything in between leaves the rank undecided.
    """
    m = np.asarray(matrix)
    s = np.linalg.svd(m, compute_uv=False)
    rel = s / s[0] if s[0] else np.zeros_like(s)
    in_band = [r for r in rel if threshold <= r < band]
    if in_band:
        return SecantReport(m.shape, [float(v) for v in s], None, float(in_band[0]), threshold)
    rank = int((rel >= band).sum())
    gap = float(rel[rank]) if rank < len(rel) else 0.0
    return SecantReport(m.shape, [float(v) for v in s], rank, gap, threshold)


def kummer_rows(tau, points: Sequence, z, spec: TruncationSpec = DEFAULT_SPEC) -> np.ndarray:
    """Rows ``K(point_i + z)``, each scaled so its largest entry is one."""
    tau = as_period_matrix(tau)
    z = _vec(z, tau.g)
    return np.array([kummer(tau, _vec(p, tau.g) + z, spec).normalized() for p in points])


def secant_rank(tau, points: Sequence, z, spec: TruncationSpec = DEFAULT_SPEC,
                threshold: float = RANK_THRESHOLD) -> SecantReport:
    """Numerical rank of the Kummer images ``K(point_i + z)``."""
    if len(points) < 2:
        raise ValueError("secant_rank needs at least two points")
    return decide_rank(kummer_rows(tau, points, z, spec), threshold)


def multisecant_points(x: Sequence, A: Sequence) -> List[np.ndarray]:
    """Points ``A_i + (sum x - sum A)/2`` whose Kummer images span an ``m``-plane.

    ``x`` holds ``m`` curve points and ``A`` holds ``m + 2``.
    """
    if len(A) != len(x) + 2:
        raise ValueError("need m curve points and m + 2 base points")
    shift = (np.sum(x, axis=0) - np.sum(A, axis=0)) / 2
    return [np.asarray(a) + shift for a in A]


def general_position_pairs(tau, points: Sequence, spec: TruncationSpec = DEFAULT_SPEC) -> dict:
    """For each pair ``(k, l)`` the rank of ``K(A_i - (A_k + A_l)/2)``.

    The general position condition asks for some pair with rank exactly
    ``len(points) - 1``; every pair is reported.
    """
    tau = as_period_matrix(tau)
    n = len(points)
    out = {}
    for k, l in itertools.combinations(range(n), 2):
        y = -(np.asarray(points[k]) + np.asarray(points[l])) / 2
        rep = secant_rank(tau, points, y, spec)
        out[f"{k},{l}"] = rep.decided_rank
    return {"pairs": out, "satisfied": [p for p, r in out.items() if r == n - 1]}


# -- final remark -------------------------------------------------------------

def order_two_points(tau) -> List[np.ndarray]:
    """All ``2^{2g}`` points ``(tau a + b)/2`` with ``a, b`` in ``{0, 1}^g``."""
    tau = as_period_matrix(tau)
    vecs = [v.to_array() for v in enumerate_vectors(tau.g)]
    return [(tau.matrix @ a + b) / 2 for a in vecs for b in vecs]


def final_remark_experiment(tau, rng: np.random.Generator, n_random: int = 5,
                            n_order_two: Optional[int] = None, tol: float = 1e-8,
                            spec: TruncationSpec = DEFAULT_SPEC) -> dict:
    """Do small cubic residuals at ``z = 0`` come with small residuals elsewhere?

    Evaluates the whole family at ``z = 0``, at points of order two (all of
    them unless ``n_order_two`` asks for a random subset) and at random
    points.  Report only; no verdict.
    """
    tau = as_period_matrix(tau)
    if tau.g not in (3, 4):
        raise ValueError("the experiment is set up for genus 3 or 4")
    from .identities import gen_cubics

    family = gen_cubics(tau.g)

    def worst(z):
        return max(eval_family(tau, family, z, spec).values())

    pts = order_two_points(tau)
    if n_order_two is not None and n_order_two < len(pts):
        idx = sorted(rng.choice(len(pts), n_order_two, replace=False))
        pts = [pts[i] for i in idx]
    at_zero = worst(np.zeros(tau.g))
    at_two = max(worst(p) for p in pts)
    at_random = max(worst(random_point(tau, rng)) for _ in range(n_random))
    return {
        "genus": tau.g,
        "tolerance": tol,
        "z0_max_residual": float(at_zero),
        "order_two_points": len(pts),
        "order_two_max_residual": float(at_two),
        "random_max_residual": float(at_random),
        "z0_small": bool(at_zero < tol),
        "implication_holds": bool(at_zero >= tol or at_two < 10 * tol),
    }


# -- suites -------------------------------------------------------------------

SUITES = ("fact1", "mess", "lastadd", "cubics", "secant", "nondegeneracy", "final-remark")
DEFAULT_TOLERANCES = {"fact1": 1e-8, "mess": 1e-8, "lastadd": 1e-8, "cubics": 1e-6}
MAX_RESAMPLES = 100


def pairs(v) -> list:
    """Complex scalar or array as nested ``[re, im]`` pairs."""
    arr = np.asarray(v, dtype=complex)
    if arr.ndim == 0:
        return [float(arr.real), float(arr.imag)]
    return [pairs(x) for x in arr]


def random_addition_data(tau, rng: np.random.Generator) -> AdditionData:
    """Generic ``Q``, ``A_k`` and ``R``, the negative control of the addition formula."""
    tau = as_period_matrix(tau)
    pts = [random_point(tau, rng) for _ in range(tau.g + 2)]
    return AdditionData(pts[0], tuple(pts[1:-1]), pts[-1])


def _draw_xy(tau, data: AdditionData, rng: np.random.Generator, spec: TruncationSpec):
    """Random ``(x, y)`` with every denominator away from zero, for the addition formula."""
    for _ in range(MAX_RESAMPLES):
        x, y = random_point(tau, rng), random_point(tau, rng)
        try:
            fact1_terms(tau, data.points, data.R, x, y, spec)
        except DenominatorError:
            continue
        return x, y
    raise DenominatorError("no admissible sample after resampling")


def _map(fn, items, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def run_suite(name: str, tau, data: AdditionData, rng: np.random.Generator, *,
              samples: int = 10, tolerance: Optional[float] = None, threads: int = 1,
              spec: TruncationSpec = DEFAULT_SPEC) -> dict:
    """Run one named suite and return its JSON report.

    All random inputs are drawn from ``rng`` before any evaluation, and
    results are collected in input order, so the report does not depend on
    ``threads``.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    tau = as_period_matrix(tau)
    g = tau.g
    tol = tolerance if tolerance is not None else DEFAULT_TOLERANCES.get(name, RANK_THRESHOLD)

    if name in ("fact1", "mess", "lastadd"):
        xy = [_draw_xy(tau, data, rng, spec) for _ in range(samples)]
        report = IdentityReport(name, tol)

        def one(p):
            x, y = p
            z = (x + y) / 2
            if name == "fact1":
                return eval_fact1(tau, data.points, data.R, x, y, spec)
            fn = mess_terms if name == "mess" else lastadd_terms
            terms = fn(tau, data.Q, data.A, data.R, z, spec)
            return max(_scale_free(row) for row in terms)

        for (x, y), r in zip(xy, _map(one, xy, threads)):
            report.add(r, x=pairs(x), y=pairs(y))
        out = report.to_json()
        if name == "lastadd" and data.half_periods is not None:
            out["half_period_ratio_error"] = half_period_ratio_check(tau, data, spec)
        if name == "mess":
            chain = _map(lambda p: chain_consistency(tau, data, p[0], p[1], spec), xy, threads)
            out["chain_consistency"] = max(max(c.values()) for c in chain)
        return out

    if name == "cubics":
        from .identities import gen_cubics

        family = gen_cubics(g)
        zs = [np.zeros(g, dtype=complex)] + [random_point(tau, rng) for _ in range(samples)]
        report = IdentityReport(f"cubics-g{g}", tol)
        for z, res in zip(zs, _map(lambda z: eval_family(tau, family, z, spec), zs, threads)):
            worst = max(res, key=res.get)
            report.add(res[worst], z=pairs(z), sigma=str(worst))
        return report.to_json()

    if name == "nondegeneracy":
        from .identities import gen_cubics

        zs = [random_point(tau, rng) for _ in range(samples)]
        res = nondegeneracy_check(tau, gen_cubics(g), zs, spec)
        return {"identity_id": "nondegeneracy", "vacuous": res["vacuous"],
                "per_sigma": res["per_sigma"],
                "verdict": "pass" if res["nondegenerate"] else "fail"}

    if name == "secant":
        pts = [np.zeros(g, dtype=complex), data.Q, *data.A]
        zs = [random_point(tau, rng) for _ in range(samples)]
        reps = _map(lambda z: secant_rank(tau, pts, z, spec), zs, threads)
        ranks = [r.decided_rank for r in reps]
        return {"identity_id": "secant", "expected_rank": g + 1,
                "samples": [{"z": pairs(z), **r.to_json()} for z, r in zip(zs, reps)],
                "verdict": "pass" if all(r == g + 1 for r in ranks) else "fail"}

    res = final_remark_experiment(tau, rng, n_random=samples,
                                  n_order_two=None if g == 3 else 32, spec=spec)
    return {"identity_id": "final-remark", **res, "verdict": "report"}
