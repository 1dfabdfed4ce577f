"""Multi-index arithmetic on fixed-length integer tuples.

A multi-index is a plain ``tuple[int, ...]``; the dimension is its length.
Comparison ``leq`` is componentwise and only a partial order, so ``not
leq(a, b)`` does not imply ``leq(b, a)``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product as _cartesian

from .errors import DimensionError

MultiIndex = tuple


def check_dim(alpha, n):
    if len(alpha) != n:
        raise DimensionError(f"expected a multi-index of length {n}, got {alpha!r}")
    return alpha


def zero(n):
    return (0,) * n


def ones(n):
    return (1,) * n


def unit(n, i):
    """Standard basis vector e_i, 0-based."""
    return tuple(1 if j == i else 0 for j in range(n))


def add(a, b):
    return tuple(x + y for x, y in zip(a, b, strict=True))


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b, strict=True))


def neg(a):
    return tuple(-x for x in a)


def total(a):
    """Total degree |a|."""
    return sum(a)


def leq(a, b):
    """Componentwise a <= b."""
    if len(a) != len(b):
        raise DimensionError(f"dimension mismatch: {a!r} vs {b!r}")
    return all(x <= y for x, y in zip(a, b))


def geq(a, b):
    return leq(b, a)


def is_nonneg(a):
    return all(x >= 0 for x in a)


def in_zplus(a):
    """Membership in the positive cone: a >= 0 and |a| >= 1."""
    return is_nonneg(a) and total(a) >= 1


def axis(a):
    """Return i if a == e_i, else None."""
    if sum(a) == 1 and all(x in (0, 1) for x in a):
        return a.index(1)
    return None


@lru_cache(maxsize=None)
def _binom1(a, k):
    """Generalized binomial coefficient C(a, k) for integer a, k >= 0."""
    if k < 0:
        raise ValueError(f"lower index must be nonnegative, got {k}")
    num = 1
    for j in range(k):
        num *= a - j
    den = 1
    for j in range(2, k + 1):
        den *= j
    q, r = divmod(num, den)
    assert r == 0
    return q


def binomial(alpha, gamma):
    """Product of componentwise generalized binomials C(alpha_i, gamma_i).

    Defined for arbitrary integer alpha (falling factorials), gamma >= 0.
    """
    if len(alpha) != len(gamma):
        raise DimensionError(f"dimension mismatch: {alpha!r} vs {gamma!r}")
    if not is_nonneg(gamma):
        raise ValueError(f"lower multi-index must be nonnegative, got {gamma!r}")
    result = 1
    for a, g in zip(alpha, gamma):
        result *= _binom1(a, g)
        if result == 0:
            return 0
    return result


def iter_box(lo, hi):
    """All multi-indices alpha with lo <= alpha <= hi, componentwise inclusive."""
    if len(lo) != len(hi):
        raise DimensionError(f"dimension mismatch: {lo!r} vs {hi!r}")
    ranges = [range(a, b + 1) for a, b in zip(lo, hi)]
    return (tuple(t) for t in _cartesian(*ranges))


def iter_zplus(n, max_total):
    """All alpha in the positive cone with |alpha| <= max_total."""
    for a in iter_box(zero(n), (max_total,) * n):
        if 1 <= total(a) <= max_total:
            yield a


def iter_ones_cone(n, max_total):
    """All alpha >= (1, ..., 1) with |alpha| <= max_total."""
    if max_total < n:
        return
    for a in iter_box(ones(n), (max_total - n + 1,) * n):
        if total(a) <= max_total:
            yield a
