"""Divisibility of central binomial coefficients C(2n,n).

Exact counting of n with n^l | C(2n,n) or gcd(n, C(2n,n)) = 1 via Kummer's
carry criterion, plus high-precision computation of the limiting densities.
"""

from .kummer import (
    PrimePower,
    Factorization,
    CarryReport,
    digit_sum,
    carries,
    divides_power,
    is_coprime_cbc,
    large_prime_filter,
)
from .counting import SegmentSpec, CountTable, count_range, merge
from .constants import DensityEstimate, compute_cl, compute_coprime_c, asymptotic_cl
from .montecarlo import MCResult, mc_estimate

__all__ = [
    "PrimePower",
    "Factorization",
    "CarryReport",
    "digit_sum",
    "carries",
    "divides_power",
    "is_coprime_cbc",
    "large_prime_filter",
    "SegmentSpec",
    "CountTable",
    "count_range",
    "merge",
    "DensityEstimate",
    "compute_cl",
    "compute_coprime_c",
    "asymptotic_cl",
    "MCResult",
    "mc_estimate",
]

__version__ = "0.1.0"
