"""
Gauss hypergeometric series.

Terminating series F(-n, b; c; x) are summed term by term with compensated
summation (or exactly, for rational inputs) and carry a condition-number
estimate sum|term| / |sum term|. At x = 2, where the series alternates and
cancels badly, values for growing n come from the contiguous recurrence in n.
Non-terminating series are only needed for x < 1: x <= 0 is mapped to
[0, 1) with the Pfaff transformation.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Union

import numpy as np
from scipy.special import gamma, rgamma

from errors import ConvergenceError, DomainError, PoleError
from specfun.kernels import is_exact

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex, Fraction]

# Above this length a direct sum at x = 2 loses more digits than the recurrence
DIRECT_SUM_MAX_AT_TWO = 8
MAX_SERIES_TERMS = 500_000
TAIL_REL = 1e-17


@dataclass(frozen=True)
class SeriesResult:
    value: Scalar
    terms: int
    condition: float = 1.0
    tail_estimate: float = 0.0
    exact: bool = False


class CompensatedSum:
    """Complex accumulator; value is math.fsum over the real and imaginary parts"""

    def __init__(self):
        self.real_parts: List[float] = []
        self.imag_parts: List[float] = []
        # plain running total, good enough for stopping tests inside a loop
        self.running = 0j
        self.magnitude = 0.0

    def add(self, term: complex):
        term = complex(term)
        self.real_parts.append(term.real)
        self.imag_parts.append(term.imag)
        self.running += term
        self.magnitude += abs(term)

    @property
    def value(self) -> complex:
        return complex(math.fsum(self.real_parts), math.fsum(self.imag_parts))


def nonpositive_integer(value: Scalar, tol: float = 1e-12) -> Optional[int]:
    """-value if value is 0, -1, -2, ... (within tol), else None"""
    w = complex(value)
    if abs(w.imag) > tol or w.real > tol:
        return None
    rounded = round(w.real)
    if abs(w.real - rounded) > tol:
        return None
    return -int(rounded)


def terminating_series(n: int, b: Scalar, c: Scalar, x: Scalar,
                       exact: Optional[bool] = None) -> SeriesResult:
    """sum_{j=0}^{n} (-n)_j (b)_j / ((c)_j j!) x^j"""
    if n < 0:
        raise DomainError(f"Terminating series needs n >= 0, got {n}")
    for j in range(n):
        if c + j == 0:
            raise PoleError(f"c = {c} hits a pole before the series F(-{n}, b; c; x) terminates")
    if exact is None:
        exact = is_exact(b, c, x)
    if exact:
        b, c, x = Fraction(b), Fraction(c), Fraction(x)
        term, total, magnitude = Fraction(1), Fraction(1), Fraction(1)
        for j in range(n):
            term = term * (j - n) * (b + j) / ((c + j) * (j + 1)) * x
            total += term
            magnitude += abs(term)
        condition = float(magnitude / abs(total)) if total != 0 else math.inf
        return SeriesResult(total, n + 1, condition, 0.0, True)
    b, c, x = complex(b), complex(c), complex(x)
    acc = CompensatedSum()
    term = 1.0 + 0j
    acc.add(term)
    for j in range(n):
        term = term * (j - n) * (b + j) / ((c + j) * (j + 1)) * x
        acc.add(term)
    value = acc.value
    condition = acc.magnitude / abs(value) if value != 0 else math.inf
    return SeriesResult(value, n + 1, condition)


def iter_terminating_sequence(b: Scalar, c: Scalar, x: Scalar = 2,
                              exact: Optional[bool] = None) -> Iterator[Scalar]:
    """
    F(-j, b; c; x) for j = 0, 1, 2, ... from the contiguous relation
    (c + j) F_{j+1} = (2j + c - (b + j) x) F_j + j (x - 1) F_{j-1}.
    """
    if exact is None:
        exact = is_exact(b, c, x)
    if exact:
        b, c, x = Fraction(b), Fraction(c), Fraction(x)
        one = Fraction(1)
    else:
        b, c, x = complex(b), complex(c), complex(x)
        one = 1.0 + 0j
    yield one
    if c == 0:
        raise PoleError("c = 0 is a pole of F(-1, b; c; x)")
    previous, current = one, one - b * x / c
    yield current
    j = 1
    while True:
        if c + j == 0:
            raise PoleError(f"c = {c} hits a pole at order {j + 1}")
        previous, current = current, ((2 * j + c - (b + j) * x) * current + j * (x - 1) * previous) / (c + j)
        yield current
        j += 1


def terminating_sequence(n_max: int, b: Scalar, c: Scalar, x: Scalar = 2,
                         exact: Optional[bool] = None) -> List[Scalar]:
    """F(-j, b; c; x) for j = 0..n_max"""
    if n_max < 0:
        return []
    return list(itertools.islice(iter_terminating_sequence(b, c, x, exact), n_max + 1))


def hyp2f1_terminating(n: int, b: Scalar, c: Scalar, x: Scalar,
                       exact: Optional[bool] = None) -> Scalar:
    """F(-n, b; c; x), exactly n + 1 terms"""
    if exact is None:
        exact = is_exact(b, c, x)
    if not exact and complex(x) == 2 and n > DIRECT_SUM_MAX_AT_TWO:
        return terminating_sequence(n, b, c, 2, exact=False)[n]
    return terminating_series(n, b, c, x, exact=exact).value


def hyp2f1_result(a: Scalar, b: Scalar, c: Scalar, x: float,
                  max_terms: int = MAX_SERIES_TERMS) -> SeriesResult:
    if isinstance(x, complex) or np.iscomplexobj(x):
        raise DomainError(f"hyp2f1 takes a real argument, got {x}")
    x = float(x)
    if x >= 1.0:
        raise DomainError(f"hyp2f1 is only provided for x < 1, got {x}")
    for first, second in ((a, b), (b, a)):
        n = nonpositive_integer(first)
        if n is not None:
            return terminating_series(n, second, c, x, exact=False)
    if nonpositive_integer(c) is not None:
        raise PoleError(f"c = {c} is a nonpositive integer and the series does not terminate")
    if x < 0.0:
        y = x / (x - 1.0)
        inner = hyp2f1_result(a, c - b, c, y, max_terms)
        prefactor = np.exp(-complex(a) * math.log1p(-x))
        return SeriesResult(prefactor * inner.value, inner.terms, inner.condition,
                            abs(prefactor) * inner.tail_estimate)
    return _convergent_series(complex(a), complex(b), complex(c), x, max_terms)


def _convergent_series(a: complex, b: complex, c: complex, x: float,
                       max_terms: int) -> SeriesResult:
    acc = CompensatedSum()
    term = 1.0 + 0j
    acc.add(term)
    if x == 0.0:
        return SeriesResult(acc.value, 1)
    tail = math.inf
    for j in range(max_terms):
        nxt = term * (a + j) * (b + j) / ((c + j) * (j + 1)) * x
        acc.add(nxt)
        ratio = abs(nxt) / abs(term) if term != 0 else 0.0
        term = nxt
        scale = max(abs(acc.running), 1e-300)
        if ratio < 1.0:
            tail = abs(term) * ratio / (1.0 - ratio)
            if tail <= TAIL_REL * scale or term == 0:
                value = acc.value
                condition = acc.magnitude / abs(value) if value != 0 else math.inf
                return SeriesResult(value, j + 2, condition, tail)
    raise ConvergenceError(
        f"hyp2f1({a}, {b}; {c}; {x}) did not converge in {max_terms} terms",
        partial=acc.value, tail_estimate=tail,
    )


def hyp2f1(a: Scalar, b: Scalar, c: Scalar, x: float) -> complex:
    """Gauss hypergeometric function for real x < 1"""
    return complex(hyp2f1_result(a, b, c, x).value)


def gauss_sum(a: Scalar, b: Scalar, c: Scalar) -> complex:
    """F(a, b; c; 1) = Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b)), Re(c-a-b) > 0"""
    a, b, c = complex(a), complex(b), complex(c)
    if (c - a - b).real <= 0:
        raise DomainError(f"Gauss sum needs Re(c - a - b) > 0, got {c - a - b}")
    return complex(gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b))
