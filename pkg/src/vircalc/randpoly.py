"""Seeded random polynomial generators shared by the test suites.

The CLI selftest and the pytest suites draw from these with an explicit
random.Random instance; VIRCALC_SEED pins the seed for reproducibility.
"""

from __future__ import annotations

import os
import random

from .poly import BiPoly, Q, UniPoly


def rng_from_env(default: int = 0) -> random.Random:
    seed = os.environ.get("VIRCALC_SEED")
    return random.Random(int(seed) if seed else default)


def rand_rational(rng: random.Random, num: int = 5, den: int = 3) -> Q:
    return Q(rng.randint(-num, num), rng.randint(1, den))


def rand_unipoly(rng: random.Random, deg: int, lo: int = -4, hi: int = 4) -> UniPoly:
    """Random nonzero polynomial of degree exactly deg."""
    c = {e: Q(rng.randint(lo, hi)) for e in range(deg)}
    lead = 0
    while not lead:
        lead = rng.randint(lo, hi)
    c[deg] = Q(lead)
    return UniPoly(c)


def rand_bipoly(
    rng: random.Random, sdeg: int, tdeg: int, terms: int = 8, lo: int = -4, hi: int = 4
) -> BiPoly:
    """Random nonzero polynomial within the (sdeg, tdeg) degree box."""
    d = {}
    for _ in range(terms):
        key = (rng.randint(0, sdeg), rng.randint(0, tdeg))
        d[key] = Q(rng.randint(lo, hi))
    p = BiPoly(d)
    return p if p else BiPoly.const(1)
