"""Riemann theta functions, hyperelliptic period matrices and the cubic
theta identities that detect hyperelliptic Jacobians."""
from .chars import BinaryVector, Characteristic
from .identities import CubicIdentity, Monomial, cubic_identity, gen_cubics
from .periods import BranchConfig, period_matrix, weierstrass_images
from .theta import PeriodMatrix, TruncationSpec, kummer, theta, theta2, theta_char

__all__ = [
    "BinaryVector", "Characteristic", "CubicIdentity", "Monomial", "cubic_identity", "gen_cubics",
    "BranchConfig", "period_matrix", "weierstrass_images",
    "PeriodMatrix", "TruncationSpec", "kummer", "theta", "theta2", "theta_char",
]
__version__ = "0.1.0"
