"""Binary vectors and theta characteristics over (Z/2Z)^g.

A :class:`BinaryVector` is stored as a bit mask whose leftmost coordinate is
the most significant bit, so that integer order and lexicographic order of the
``'0'/'1'`` strings coincide.  Coordinates are 1-based in the helpers that
mirror the usual ``e_k`` / ``s_k`` notation and 0-based everywhere else.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, List

import numpy as np

MAX_GENUS = 16


@dataclass(frozen=True, order=True)
class BinaryVector:
    """An element of (Z/2Z)^g.

    Parameters
    ----------
    mask : int
        Bit mask, coordinate ``i`` (0-based) lives in bit ``g - 1 - i``.
    g : int
        Ambient genus.
    """

    mask: int
    g: int

    def __post_init__(self):
        if not 1 <= self.g <= MAX_GENUS:
            raise ValueError(f"genus must be in 1..{MAX_GENUS}, got {self.g}")
        if not 0 <= self.mask < (1 << self.g):
            raise ValueError(f"mask {self.mask} does not fit in {self.g} bits")

    @classmethod
    def from_str(cls, text: str) -> "BinaryVector":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a binary vector: {text!r}")
        return cls(int(text, 2), len(text))

    @classmethod
    def from_bits(cls, bits) -> "BinaryVector":
        bits = [int(b) for b in bits]
        if any(b not in (0, 1) for b in bits):
            raise ValueError(f"entries must be 0 or 1: {bits}")
        return cls.from_str("".join(map(str, bits)))

    @classmethod
    def zero(cls, g: int) -> "BinaryVector":
        return cls(0, g)

    @property
    def bits(self) -> tuple:
        return tuple((self.mask >> (self.g - 1 - i)) & 1 for i in range(self.g))

    def to_array(self) -> np.ndarray:
        return np.array(self.bits, dtype=float)

    def __str__(self) -> str:
        return format(self.mask, f"0{self.g}b")

    def __repr__(self) -> str:
        return f"BinaryVector('{self}')"

    def __add__(self, other: "BinaryVector") -> "BinaryVector":
        return add_mod2(self, other)

    def dot(self, other: "BinaryVector") -> int:
        """Scalar product reduced mod 2."""
        _check_same_length(self, other)
        return bin(self.mask & other.mask).count("1") & 1

    def is_zero(self) -> bool:
        return self.mask == 0


def _check_same_length(a: BinaryVector, b: BinaryVector) -> None:
    if a.g != b.g:
        raise ValueError(f"length mismatch: {a} has length {a.g}, {b} has length {b.g}")


def add_mod2(a: BinaryVector, b: BinaryVector) -> BinaryVector:
    """Componentwise sum mod 2."""
    _check_same_length(a, b)
    return BinaryVector(a.mask ^ b.mask, a.g)


def basis_vector(g: int, k: int) -> BinaryVector:
    """``e_k`` for ``1 <= k <= g``; ``e_{g+1}`` is read as the zero vector."""
    if k == g + 1:
        return BinaryVector.zero(g)
    if not 1 <= k <= g:
        raise ValueError(f"basis index {k} out of range 1..{g + 1}")
    return BinaryVector(1 << (g - k), g)


def s_vector(g: int, k: int) -> BinaryVector:
    """``s_k = e_1 + ... + e_k``: first ``k`` entries one, rest zero."""
    if not 0 <= k <= g:
        raise ValueError(f"k must be in 0..{g}, got {k}")
    return BinaryVector(((1 << k) - 1) << (g - k), g)


def enumerate_vectors(g: int) -> List[BinaryVector]:
    """All ``2**g`` vectors in lexicographic order, leftmost bit most significant."""
    if not 1 <= g <= MAX_GENUS:
        raise ValueError(f"genus must be in 1..{MAX_GENUS}, got {g}")
    return [BinaryVector(m, g) for m in range(1 << g)]


@dataclass(frozen=True, order=True)
class Characteristic:
    """A theta characteristic ``[eps; delta]``."""

    eps: BinaryVector
    delta: BinaryVector

    def __post_init__(self):
        _check_same_length(self.eps, self.delta)

    @property
    def g(self) -> int:
        return self.eps.g

    @classmethod
    def parse(cls, text: str) -> "Characteristic":
        m = re.fullmatch(r"\s*\[\s*([01]+)\s*;\s*([01]+)\s*\]\s*", text)
        if m is None:
            raise ValueError(f"invalid characteristic string: {text!r}")
        return cls(BinaryVector.from_str(m.group(1)), BinaryVector.from_str(m.group(2)))

    @classmethod
    def zero(cls, g: int) -> "Characteristic":
        return cls(BinaryVector.zero(g), BinaryVector.zero(g))

    def parity(self) -> str:
        return parity(self)

    def is_odd(self) -> bool:
        return self.eps.dot(self.delta) == 1

    def __str__(self) -> str:
        return f"[{self.eps};{self.delta}]"


def parity(c: Characteristic) -> str:
    """``'even'`` or ``'odd'`` according to ``(eps, delta) mod 2``."""
    return "odd" if c.eps.dot(c.delta) else "even"


def all_characteristics(g: int) -> Iterator[Characteristic]:
    vecs = enumerate_vectors(g)
    for e in vecs:
        for d in vecs:
            yield Characteristic(e, d)


def half_period_characteristic(point_eps, point_delta) -> Characteristic:
    """Reduce a half period ``(tau*a + b)/2`` with integer ``a, b`` to ``[a mod 2; b mod 2]``."""
    a = np.asarray(point_eps, dtype=int) % 2
    b = np.asarray(point_delta, dtype=int) % 2
    return Characteristic(BinaryVector.from_bits(a), BinaryVector.from_bits(b))
