"""Cubic identities among second order theta functions.

Every term of the hyperelliptic addition formula is a product of three second
order thetas ``Theta[a](z) Theta[b](z) Theta[c](z)``, labelled by binary
vectors.  Terms are generated with their signs, then merged exactly as
multisets of labels; nothing in this module touches floating point.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

from .chars import BinaryVector, basis_vector, enumerate_vectors, s_vector

MIN_GENUS = 2
MAX_GENUS = 6


@dataclass(frozen=True)
class Monomial:
    """``sign * mult * Theta[a] Theta[b] Theta[c]`` with ``a <= b <= c``.

    ``kummer`` records which factor plays the role of the Kummer image in a
    raw (uncancelled) term; it is dropped by :func:`canonicalize`.
    """

    factors: Tuple[BinaryVector, BinaryVector, BinaryVector]
    sign: int = 1
    mult: int = 1
    kummer: Optional[BinaryVector] = None

    def __post_init__(self):
        if len(self.factors) != 3:
            raise ValueError("a monomial has exactly three factors")
        if len({f.g for f in self.factors}) != 1:
            raise ValueError("monomial factors have different lengths")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if self.mult < 1:
            raise ValueError(f"multiplicity must be positive, got {self.mult}")
        object.__setattr__(self, "factors", tuple(sorted(self.factors)))

    @property
    def coefficient(self) -> int:
        return self.sign * self.mult

    def key(self) -> str:
        return ".".join(str(f) for f in self.factors)

    def to_json(self) -> dict:
        return {"sign": self.sign, "mult": self.mult, "factors": [str(f) for f in self.factors]}

    @classmethod
    def from_json(cls, data: dict) -> "Monomial":
        return cls(tuple(BinaryVector.from_str(f) for f in data["factors"]),
                   int(data["sign"]), int(data["mult"]))


# Kummer label -> {(a, b): integer coefficient}
Coefficients = Dict[BinaryVector, Dict[Tuple[BinaryVector, BinaryVector], int]]


@dataclass(frozen=True)
class CubicIdentity:
    """``sum sign * mult * Theta[a] Theta[b] Theta[c] = 0`` in canonical form.

    ``content`` is the gcd that was divided out of the merged multiplicities.
    ``coefficients`` optionally keeps, for each Kummer factor, the quadratic
    coefficient in front of it before cancellation; it is not serialized.
    """

    genus: int
    sigma: BinaryVector
    monomials: Tuple[Monomial, ...]
    content: int = 1
    coefficients: Optional[Coefficients] = field(default=None, compare=False, repr=False)

    def is_empty(self) -> bool:
        return not self.monomials

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "sigma": str(self.sigma),
            "content": self.content,
            "monomials": [m.to_json() for m in self.monomials],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CubicIdentity":
        return cls(int(data["genus"]), BinaryVector.from_str(data["sigma"]),
                   tuple(Monomial.from_json(m) for m in data["monomials"]),
                   int(data.get("content", 1)))

    def render(self) -> str:
        """Display text: positive terms ``=`` negative terms, ``0`` if empty."""
        def side(ms):
            parts = []
            for m in ms:
                term = "*".join(str(f) for f in m.factors)
                parts.append(term if m.mult == 1 else f"{m.mult}*{term}")
            return " + ".join(parts) or "0"
        if self.is_empty():
            return "0 = 0"
        pos = [m for m in self.monomials if m.sign > 0]
        neg = [m for m in self.monomials if m.sign < 0]
        return f"{side(pos)} = {side(neg)}"


@dataclass(frozen=True)
class HalfPeriodSpec:
    """Half-period data ``Q = (tau a0 + b0)/2``, ``A_k = (tau a_k + b_k)/2``, ``R = (tau a + b)/2``."""

    alpha: BinaryVector
    beta: BinaryVector
    alpha_0: BinaryVector
    beta_0: BinaryVector
    alpha_k: Tuple[BinaryVector, ...]
    beta_k: Tuple[BinaryVector, ...]

    def __post_init__(self):
        g = self.alpha.g
        vecs = (self.alpha, self.beta, self.alpha_0, self.beta_0, *self.alpha_k, *self.beta_k)
        if any(v.g != g for v in vecs):
            raise ValueError("all half-period vectors must have the same length")
        if len(self.alpha_k) != g or len(self.beta_k) != g:
            raise ValueError(f"alpha_k and beta_k must each hold {g} vectors")

    @property
    def g(self) -> int:
        return self.alpha.g

    @classmethod
    def hyperelliptic(cls, g: int) -> "HalfPeriodSpec":
        """Weierstrass-point data for the left-to-right branch point labelling.

        ``R = Q = A(p_2) = e_1/2`` and ``A_k = A(p_{2k+2})``, so
        ``alpha = alpha_0 = 0``, ``beta = beta_0 = e_1``,
        ``alpha_k = s_k`` and ``beta_k = e_{k+1}`` with ``e_{g+1} = 0``.
        """
        zero = BinaryVector.zero(g)
        e1 = basis_vector(g, 1)
        return cls(zero, e1, zero, e1,
                   tuple(s_vector(g, k) for k in range(1, g + 1)),
                   tuple(basis_vector(g, k + 1) for k in range(1, g + 1)))


def _sgn(parity: int) -> int:
    return -1 if parity & 1 else 1


def raw_terms_addhyp(spec: HalfPeriodSpec, sigma: BinaryVector) -> List[Monomial]:
    """All terms of the half-period addition formula, right side moved left.

    Emits ``2^g`` left-hand terms, ``g * 2^g`` terms for the points ``A_k`` and
    ``2^g`` terms for the point ``Q``, in that order, with no cancellation.
    """
    if sigma.g != spec.g:
        raise ValueError(f"sigma has length {sigma.g}, spec has genus {spec.g}")
    a, b, a0, b0 = spec.alpha, spec.beta, spec.alpha_0, spec.beta_0
    terms = []
    for eps in enumerate_vectors(spec.g):
        s = _sgn(eps.dot(b + b0))
        terms.append(Monomial((eps + a + a0, eps, sigma + a), s, kummer=sigma + a))
    for ak, bk in zip(spec.alpha_k, spec.beta_k):
        for eps in enumerate_vectors(spec.g):
            s = -_sgn(eps.dot(b + b0 + bk) + sigma.dot(bk))
            terms.append(Monomial((eps + a + a0, eps + ak, sigma + a + ak), s, kummer=sigma + a + ak))
    for eps in enumerate_vectors(spec.g):
        s = -_sgn(eps.dot(b) + sigma.dot(b0))
        terms.append(Monomial((eps + a, eps, sigma + a + a0), s, kummer=sigma + a + a0))
    return terms


def kummer_coefficients(terms: Sequence[Monomial]) -> Coefficients:
    """Group raw terms by their Kummer factor into merged quadratic coefficients."""
    groups: Dict[BinaryVector, Dict[Tuple[BinaryVector, BinaryVector], int]] = defaultdict(dict)
    for t in terms:
        if t.kummer is None:
            raise ValueError("term carries no Kummer label")
        rest = list(t.factors)
        rest.remove(t.kummer)
        pair = tuple(sorted(rest))
        group = groups[t.kummer]
        group[pair] = group.get(pair, 0) + t.coefficient
    return {k: {p: c for p, c in sorted(v.items()) if c} for k, v in sorted(groups.items())}


def canonicalize(terms: Sequence[Monomial], genus: Optional[int] = None,
                 sigma: Optional[BinaryVector] = None, keep_coefficients: bool = False) -> CubicIdentity:
    """Merge equal label multisets, drop zeros, sort, and divide out the content.

    The identity is normalized so that its first monomial has positive sign.
    """
    if terms:
        lengths = {f.g for t in terms for f in t.factors}
        if len(lengths) != 1:
            raise ValueError("terms mix factors of different lengths")
        g = lengths.pop()
    else:
        g = genus
    if genus is not None and genus != g:
        raise ValueError(f"terms have genus {g}, expected {genus}")
    net: Dict[Tuple[BinaryVector, ...], int] = defaultdict(int)
    for t in terms:
        net[t.factors] += t.coefficient
    merged = sorted((f, c) for f, c in net.items() if c)
    content = reduce(gcd, (abs(c) for _, c in merged), 0) or 1
    flip = -1 if merged and merged[0][1] < 0 else 1
    monomials = tuple(
        Monomial(f, 1 if flip * c > 0 else -1, abs(c) // content) for f, c in merged
    )
    if sigma is None:
        sigma = BinaryVector.zero(g)
    coeffs = kummer_coefficients(terms) if keep_coefficients else None
    return CubicIdentity(g, sigma, monomials, content * flip, coeffs)


def cubic_identity(g: int, sigma: BinaryVector) -> CubicIdentity:
    """The hyperelliptic cubic for one ``sigma``, with Kummer coefficients kept."""
    spec = HalfPeriodSpec.hyperelliptic(g)
    return canonicalize(raw_terms_addhyp(spec, sigma), g, sigma, keep_coefficients=True)


def gen_cubics(g: int) -> Dict[BinaryVector, CubicIdentity]:
    """The full ``sigma``-indexed family of hyperelliptic cubics for genus ``g``."""
    if not MIN_GENUS <= g <= MAX_GENUS:
        raise ValueError(f"genus must be in {MIN_GENUS}..{MAX_GENUS}, got {g}")
    return {sigma: cubic_identity(g, sigma) for sigma in enumerate_vectors(g)}


def family_to_json(family: Dict[BinaryVector, CubicIdentity]) -> str:
    """Deterministic JSON text for a cubic family, sorted by ``sigma``."""
    items = [family[s].to_json() for s in sorted(family)]
    return json.dumps(items, indent=1) + "\n"


def parse_cubic(text: str, genus: int, sigma: BinaryVector) -> CubicIdentity:
    """Read ``a.b.c + ... = d.e.f + ...`` into canonical form (left side positive)."""
    lhs, rhs = text.split("=")
    terms = []
    for side, sign in ((lhs, 1), (rhs, -1)):
        for chunk in side.split("+"):
            chunk = chunk.strip()
            if not chunk or chunk == "0":
                continue
            labels = [BinaryVector.from_str(x) for x in chunk.replace("*", ".").split(".")]
            terms.append(Monomial(tuple(labels), sign))
    return canonicalize(terms, genus, sigma)
