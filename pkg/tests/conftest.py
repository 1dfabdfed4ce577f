import random
from fractions import Fraction

import pytest

from psdocalc.diffpoly import DiffPoly, jet
from psdocalc.psdop import PsdOp


@pytest.fixture
def rng():
    return random.Random(20240811)


SYMBOLS = "fghpq"


def random_coeff(rng, n, max_terms=2, symbols=SYMBOLS):
    out = DiffPoly.zero()
    for _ in range(rng.randint(1, max_terms)):
        profile = {}
        if rng.random() < 0.5:
            i = rng.randrange(n)
            d = tuple(1 if j == i else 0 for j in range(n))
            profile[d] = rng.randint(1, 2)
        c = rng.randint(-4, 4) or 1
        out = out + DiffPoly.from_jet(jet(rng.choice(symbols), profile)).scale(Fraction(c))
    return out


def random_operator(rng, n, depth=4, max_terms=3, top=1, windowed=True):
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        e = tuple(rng.randint(-depth, top) for _ in range(n))
        terms[e] = random_coeff(rng, n)
    window = (-depth,) * n if windowed else None
    return PsdOp(n, terms, window)


def random_unital(rng, n, depth=3, max_terms=2, hat=True):
    from psdocalc import multiindex as mi

    terms = {mi.zero(n): DiffPoly.constant(1)}
    for _ in range(rng.randint(1, max_terms)):
        if hat:
            e = tuple(rng.randint(-depth, -1) for _ in range(n))
        else:
            e = tuple(
                rng.randint(-depth, 0) if i < n - 1 else rng.randint(-depth, -1)
                for i in range(n)
            )
        if e != mi.zero(n):
            terms[e] = random_coeff(rng, n, max_terms=1)
    return PsdOp(n, terms, (-depth,) * n)
