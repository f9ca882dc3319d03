"""Gamma ratios, Hermite functions, Gauss-Hermite nodes and Legendre polynomials"""

import functools
import logging
import math
from fractions import Fraction
from numbers import Rational
from typing import Tuple, Union

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.special import loggamma

from errors import DomainError, PoleError

logger = logging.getLogger(__name__)

Scalar = Union[int, float, complex, Fraction]

PRODUCT_SHIFT_MAX = 32
HERMITE_MAX_ORDER = 128
# e^{-x^2/2} underflows past this
HERMITE_UNDERFLOW_X = 38.0


def is_exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def gamma_ratio_shift(z: Scalar, k: int) -> Scalar:
    """
    Gamma(z + k) / Gamma(z) without evaluating Gamma at a pole.

    Finite products for |k| <= 32 (exact for rational z), log-gamma
    differences beyond that unless z sits on a pole.
    """
    if k == 0:
        return Fraction(1) if is_exact(z) else 1.0 + 0j
    on_pole = (not is_exact(z) and complex(z).imag == 0
               and complex(z).real <= 0 and float(complex(z).real).is_integer())
    if abs(k) <= PRODUCT_SHIFT_MAX or is_exact(z) or on_pole:
        return _shift_product(z, k)
    w = complex(z)
    if (w + k).imag == 0 and (w + k).real <= 0 and float((w + k).real).is_integer():
        raise PoleError(f"Gamma({w + k}) in numerator is a pole")
    return complex(np.exp(loggamma(w + k) - loggamma(w)))


def _shift_product(z: Scalar, k: int) -> Scalar:
    exact = is_exact(z)
    result = Fraction(1) if exact else 1.0 + 0j
    if k > 0:
        for j in range(k):
            result *= z + j
        return result
    for j in range(1, -k + 1):
        factor = z - j
        if factor == 0:
            raise PoleError(f"Gamma({z}{k:+d})/Gamma({z}) has a zero denominator factor")
        result /= factor
    return result


def rgamma_integer(m: int) -> Fraction:
    """1/Gamma(m) for integer m (zero on the poles)"""
    if m <= 0:
        return Fraction(0)
    return Fraction(1, math.factorial(m - 1))


@functools.lru_cache(maxsize=64)
def gauss_hermite(order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for the weight e^{-x^2}; read-only, shared"""
    nodes, weights = hermgauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def hermite_psi_table(n_max: int, x, weighted: bool = True,
                      max_order: int = HERMITE_MAX_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """
    Psi_0..Psi_{n_max} at the points x by the normalised three-term recurrence
    Psi_{n+1} = sqrt(2/(n+1)) x Psi_n - sqrt(n/(n+1)) Psi_{n-1}.

    With ``weighted=False`` the Gaussian e^{-x^2/2} is left out, which is what
    Gauss-Hermite quadrature wants. Returns (table, underflow) where underflow
    flags points at which the weighted values were set to zero.
    """
    if n_max > max_order:
        raise DomainError(f"Hermite order {n_max} exceeds the configured maximum {max_order}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    table = np.zeros((n_max + 1, x.size))
    underflow = np.zeros(x.size, dtype=bool)
    if weighted:
        underflow = np.abs(x) > HERMITE_UNDERFLOW_X
        table[0] = np.where(underflow, 0.0, math.pi ** -0.25 * np.exp(-0.5 * x * x))
    else:
        table[0] = math.pi ** -0.25
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * x * table[0]
    for n in range(1, n_max):
        table[n + 1] = (math.sqrt(2.0 / (n + 1)) * x * table[n]
                        - math.sqrt(n / (n + 1)) * table[n - 1])
    if underflow.any():
        logger.debug(f"Hermite functions underflowed at {int(underflow.sum())} points")
    return table, underflow


def hermite_psi(n: int, x, max_order: int = HERMITE_MAX_ORDER):
    """
    L^2-normalised Hermite function (e^{-x^2}/(2^n n! sqrt(pi)))^{1/2} H_n(x).
    Returns (value, underflow): past the underflow range of e^{-x^2/2} the
    value is 0 and the flag is set.
    """
    if n < 0:
        raise DomainError(f"Hermite order must be nonnegative, got {n}")
    table, underflow = hermite_psi_table(n, x, weighted=True, max_order=max_order)
    values = table[n]
    if np.ndim(x) == 0:
        return float(values[0]), bool(underflow[0])
    return values, underflow


def legendre_p(tau: int, u: float) -> float:
    """P_tau(u) by Bonnet's recurrence, u = cosh(alpha) >= 1"""
    if tau < 0:
        raise DomainError(f"Legendre degree must be nonnegative, got {tau}")
    if u < 1.0:
        raise DomainError(f"Legendre argument must be >= 1, got {u}")
    previous, current = 1.0, u
    if tau == 0:
        return previous
    for j in range(1, tau):
        previous, current = current, ((2 * j + 1) * u * current - j * previous) / (j + 1)
    return current
