"""
Irreducible representations of SU(1,1) realised on operators F(z, z*).

A label (tau, epsilon) fixes the basis D_k = (z*)^{2k'} f_k(zeta) for k >= 0
and D_k = (-1)^{2 epsilon} f_k(zeta) z^{-2k'} for k < 0, where zeta = z* z and
k' = k + epsilon.
The ladder superoperators H-, H+, H are commutators with z^2, z*^2 and zeta.
"""

import io
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import gamma

from algebra.fock_operator import (
    FockOperator,
    FockSpace,
    ShiftedDiagonalOperator,
    annihilation,
    creation,
    interior_residual,
    number_operator,
    random_operator,
    trace_inner_product,
)
from errors import DomainError, PoleError
from specfun.hypergeometric import terminating_sequence
from specfun.kernels import gamma_ratio_shift, rgamma_integer

logger = logging.getLogger(__name__)

Scalar = Union[complex, Fraction]

HALF = Fraction(1, 2)
INTEGER_TOL = 1e-12
CONVENTIONS = ("series", "literal")


def _as_tau(value) -> Scalar:
    if isinstance(value, Rational):
        return Fraction(value)
    return complex(value)


def _integer_value(value: Scalar) -> Optional[int]:
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else None
    w = complex(value)
    if abs(w.imag) > INTEGER_TOL or abs(w.real - round(w.real)) > INTEGER_TOL:
        return None
    return int(round(w.real))


@dataclass(frozen=True)
class IrrepLabel:
    tau: Scalar
    epsilon: Fraction = Fraction(0)

    def __post_init__(self):
        eps = Fraction(self.epsilon).limit_denominator(2)
        if eps not in (0, HALF) or abs(float(self.epsilon) - float(eps)) > INTEGER_TOL:
            raise DomainError(f"epsilon must be 0 or 1/2, got {self.epsilon}")
        object.__setattr__(self, 'epsilon', eps)
        object.__setattr__(self, 'tau', _as_tau(self.tau))

    @property
    def exact(self) -> bool:
        return isinstance(self.tau, Fraction)

    def to_json(self) -> Dict:
        tau = complex(self.tau)
        return {'tau': [tau.real, tau.imag], 'epsilon': float(self.epsilon)}


class SeriesKind(str, Enum):
    CONTINUOUS = "continuous"
    DISCRETE_PAIR = "discrete_pair"
    FINITE = "finite"


@dataclass(frozen=True)
class KRange:
    """Integers lo..hi, either end may be open (None)"""

    lo: Optional[int] = None
    hi: Optional[int] = None

    def __contains__(self, k: int) -> bool:
        return (self.lo is None or k >= self.lo) and (self.hi is None or k <= self.hi)

    def __str__(self) -> str:
        lo = "-inf" if self.lo is None else str(self.lo)
        hi = "inf" if self.hi is None else str(self.hi)
        return f"[{lo}, {hi}]"


@dataclass(frozen=True)
class SeriesClass:
    kind: SeriesKind
    k_ranges: Tuple[KRange, ...]

    def contains(self, k: int) -> bool:
        return any(k in r for r in self.k_ranges)


def classify(label: IrrepLabel) -> SeriesClass:
    tau_plus = _integer_value(label.tau + label.epsilon)
    if tau_plus is None:
        return SeriesClass(SeriesKind.CONTINUOUS, (KRange(),))
    tau_minus = tau_plus - int(2 * label.epsilon)
    if tau_minus < 0:
        return SeriesClass(SeriesKind.DISCRETE_PAIR, (KRange(hi=tau_minus), KRange(lo=-tau_plus)))
    return SeriesClass(SeriesKind.FINITE, (KRange(lo=-tau_plus, hi=tau_minus),))


# -- coefficients C_kn ----------------------------------------------------

def coefficient_c(label: IrrepLabel, k: int, n: int) -> Scalar:
    """C_kn = Gamma(1 + tau + epsilon + k + n) / Gamma(1 + 2 epsilon + 2k + n)"""
    numerator = label.tau + label.epsilon + k + n + 1
    denominator = int(2 * label.epsilon) + 2 * k + n + 1
    reciprocal = rgamma_integer(denominator)
    pole = _integer_value(numerator)
    if pole is not None and pole <= 0:
        raise PoleError(f"C_{k},{n} has Gamma({numerator}) in the numerator")
    if label.exact and pole is not None:
        return math.factorial(pole - 1) * reciprocal
    return complex(gamma(complex(numerator))) * float(reciprocal)


def coefficient_c_normalized(label: IrrepLabel, k: int, n: int) -> Scalar:
    """C_kn / Gamma(1 + tau + epsilon), exact for rational tau"""
    shift = gamma_ratio_shift(label.tau + label.epsilon + 1, k + n)
    return shift * rgamma_integer(int(2 * label.epsilon) + 2 * k + n + 1)


def recurrence_residuals(label: IrrepLabel, k: int, n: int) -> Tuple[Scalar, Scalar]:
    """
    Residuals of
      n C_{k,n-1} + (k+eps+tau)/(2k+2eps+n-1) C_{k-1,n} - (2k+2eps+n) C_{k,n}
      C_{k,n+1} - C_{k,n+2} - (k+eps-tau) C_{k+1,n}
    in the normalised coefficients. The middle term of the first is written as
    (k+eps+tau) P(k-1+n) / Gamma(2k+2eps+n), which has no 0/0 at 2k+2eps+n = 1.
    """
    c = lambda kk, nn: coefficient_c_normalized(label, kk, nn)
    eps, tau = label.epsilon, label.tau
    two_eps = int(2 * eps)
    first = n * c(k, n - 1) if n > 0 else 0
    middle = ((k + eps + tau) * gamma_ratio_shift(tau + eps + 1, k - 1 + n)
              * rgamma_integer(2 * k + two_eps + n))
    r1 = first + middle - (2 * k + two_eps + n) * c(k, n)
    r2 = c(k, n + 1) - c(k, n + 2) - (k + eps - tau) * c(k + 1, n)
    return r1, r2


# -- functions f_k(zeta) --------------------------------------------------

def reduced_index(label: IrrepLabel, k: int) -> Fraction:
    """k' = k + eps for k >= 0, and -k - eps (reflection with eps -> -eps) for k < 0"""
    return k + label.epsilon if k >= 0 else -k - label.epsilon


def _prefactor(label: IrrepLabel, kprime: Fraction, convention: str) -> Scalar:
    if convention not in CONVENTIONS:
        raise DomainError(f"Unknown f convention {convention!r}, expected one of {CONVENTIONS}")
    top = label.tau + kprime + 1
    pole = _integer_value(top)
    if pole is not None and pole <= 0:
        raise PoleError(f"Gamma({top}) pole in f prefactor")
    if label.exact and pole is not None and kprime.denominator == 1:
        sign = (-1) ** int(kprime) if convention == "literal" else 1
        return sign * Fraction(2) ** int(kprime) * math.factorial(pole - 1) * rgamma_integer(int(2 * kprime) + 1)
    base = math.log(2.0) + (1j * math.pi if convention == "literal" else 0.0)
    power = complex(np.exp(float(kprime) * base))
    return power * complex(gamma(complex(top))) * float(rgamma_integer(int(2 * kprime) + 1))


def gamma_prefactor(label: IrrepLabel, kprime: Fraction) -> complex:
    """Gamma(1 + tau + k') / Gamma(1 + 2k')"""
    return complex(_prefactor(label, kprime, "series")) / 2.0 ** float(kprime)


def f_values(label: IrrepLabel, k: int, zeta_max: int, convention: str = "series") -> List[Scalar]:
    """f_k(0..zeta_max) = prefactor * F(-zeta, 1 + tau + k'; 1 + 2k'; 2)"""
    kprime = reduced_index(label, k)
    prefactor = _prefactor(label, kprime, convention)
    exact = isinstance(prefactor, Fraction)
    b = label.tau + kprime + 1
    c = 2 * kprime + 1
    hyp = terminating_sequence(zeta_max, b if exact else complex(b), c if exact else float(c), 2, exact=exact)
    return [prefactor * value for value in hyp]


def f_value(label: IrrepLabel, k: int, zeta: int, convention: str = "series") -> Scalar:
    if zeta < 0:
        raise DomainError(f"zeta runs over the spectrum 0, 1, 2, ..., got {zeta}")
    return f_values(label, k, zeta, convention)[zeta]


def f_series_value(label: IrrepLabel, k: int, zeta: int) -> Scalar:
    """sum_n (-1)^n 2^{n+k'} / n! C_kn zeta (zeta-1)...(zeta-n+1), the defining expansion"""
    kprime = reduced_index(label, k)
    reduced = IrrepLabel(label.tau, 0)
    total: Scalar = 0
    falling = 1
    for n in range(zeta + 1):
        coeff = _c_reduced(reduced, kprime, n)
        term = (-1) ** n * falling * coeff / math.factorial(n)
        total += term * 2 ** n
        falling *= zeta - n
    if isinstance(total, Fraction) and kprime.denominator == 1:
        return Fraction(2) ** int(kprime) * total
    return 2.0 ** float(kprime) * complex(total)


def _c_reduced(label: IrrepLabel, kprime: Fraction, n: int) -> Scalar:
    top = label.tau + kprime + n + 1
    pole = _integer_value(top)
    if pole is not None and pole <= 0:
        raise PoleError(f"Gamma({top}) pole in C")
    reciprocal = rgamma_integer(int(2 * kprime) + n + 1)
    if label.exact and pole is not None:
        return math.factorial(pole - 1) * reciprocal
    return complex(gamma(complex(top))) * float(reciprocal)


# -- basis operators D_k --------------------------------------------------

@dataclass(frozen=True, eq=False)
class DOperator:
    label: IrrepLabel
    k: int
    op: ShiftedDiagonalOperator
    convention: str = "series"

    @property
    def shift(self) -> int:
        return self.op.shift

    def as_operator(self) -> FockOperator:
        return self.op.as_operator()


def d_shift(label: IrrepLabel, k: int) -> int:
    return int(2 * (k + label.epsilon))


def reflection_sign(label: IrrepLabel, k: int) -> int:
    """
    (-1)^{2 eps} on the k < 0 branch. For eps = 1/2 the step from D_0 = z* f(zeta)
    to D_-1 = f(zeta) z flips the sign that the reflected f carries.
    """
    return -1 if k < 0 and label.epsilon == HALF else 1


def _check_k(label: IrrepLabel, k: int, space: FockSpace) -> int:
    series = classify(label)
    if not series.contains(k):
        ranges = ", ".join(str(r) for r in series.k_ranges)
        raise DomainError(f"k={k} lies outside the invariant subspaces {ranges} of {label}")
    shift = d_shift(label, k)
    if abs(shift) >= space.dim:
        raise DomainError(f"D_{k} shifts by {shift}, beyond the truncation N={space.dim}")
    return shift


def d_operator(label: IrrepLabel, k: int, space: FockSpace, convention: str = "series") -> DOperator:
    """
    (D_k)_{mt} = sqrt(m!/t!) f_k(t) for k >= 0 and sign * sqrt(t!/m!) f_k(m) for k < 0,
    m = t + 2k', with sign from reflection_sign
    """
    shift = _check_k(label, k, space)
    sign = reflection_sign(label, k)
    f = [sign * complex(v) for v in f_values(label, k, space.dim - 1, convention)]

    def entry(t: int) -> complex:
        m = t + shift
        if shift >= 0:
            return math.sqrt(math.prod(range(t + 1, m + 1))) * f[t]
        return math.sqrt(math.prod(range(m + 1, t + 1))) * f[m]

    op = ShiftedDiagonalOperator.from_function(space, shift, entry)
    return DOperator(label, k, op, convention)


def d_operator_product(label: IrrepLabel, k: int, space: FockSpace,
                       convention: str = "series") -> FockOperator:
    """The same D_k built as (z*)^{2k'} f_k(zeta) or f_k(zeta) z^{2|k'|}"""
    shift = _check_k(label, k, space)
    sign = reflection_sign(label, k)
    f = FockOperator.diagonal(space, [sign * complex(v) for v in f_values(label, k, space.dim - 1, convention)])
    if shift >= 0:
        return creation(space).power(shift) @ f
    return f @ annihilation(space).power(-shift)


# -- ladder superoperators ------------------------------------------------

def ladder_minus(f: FockOperator) -> FockOperator:
    """H-(F) = [F, z^2] / 2"""
    z2 = annihilation(f.space).power(2)
    return 0.5 * (f @ z2 - z2 @ f)


def ladder_plus(f: FockOperator) -> FockOperator:
    """H+(F) = [z*^2, F] / 2"""
    zs2 = creation(f.space).power(2)
    return 0.5 * (zs2 @ f - f @ zs2)


def ladder_h(f: FockOperator) -> FockOperator:
    zeta = number_operator(f.space)
    return 0.5 * (zeta @ f - f @ zeta)


def _relative(lhs: FockOperator, rhs: FockOperator) -> float:
    size = min(lhs.interior, rhs.interior)
    if size <= 0:
        logger.debug("Empty interior block in ladder comparison")
        return float('nan')
    scale = max(1.0, float(np.max(np.abs(lhs.interior_block(size)))),
                float(np.max(np.abs(rhs.interior_block(size)))))
    return interior_residual(lhs, rhs, size) / scale


def ladder_residuals(label: IrrepLabel, k: int, space: FockSpace,
                     convention: str = "series") -> Dict[str, float]:
    """
    Relative interior residuals of
      H- D_k = -(k+tau+eps) D_{k-1},  H+ D_k = (k-tau+eps) D_{k+1},  H D_k = (k+eps) D_k.
    Neighbours outside the invariant subspace (or the truncation) are skipped.
    """
    d_k = d_operator(label, k, space, convention).as_operator()
    tau, eps = complex(label.tau), float(label.epsilon)
    residuals = {'h': _relative(ladder_h(d_k), (k + eps) * d_k)}
    neighbours = {'minus': (k - 1, -(k + tau + eps), ladder_minus),
                  'plus': (k + 1, k - tau + eps, ladder_plus)}
    for name, (neighbour, coefficient, ladder) in neighbours.items():
        try:
            target = d_operator(label, neighbour, space, convention).as_operator()
        except DomainError as e:
            logger.debug(f"Skipping {name} ladder at k={k}: {e}")
            continue
        residuals[name] = _relative(ladder(d_k), coefficient * target)
    return residuals


def boundary_operators(label: IrrepLabel, space: FockSpace,
                       convention: str = "series") -> Dict[int, FockOperator]:
    """
    For the discrete pair, the operators the ladder reaches through 0 * pole at
    the subspace edges: (-1)^zeta times D_j of the finite label (-1 - tau, eps),
    for j strictly between the two subspaces. At tau = -1, eps = 0 this is the
    identity alone. Empty for the other kinds.
    """
    series = classify(label)
    if series.kind != SeriesKind.DISCRETE_PAIR:
        return {}
    lower, upper = series.k_ranges
    finite = IrrepLabel(-1 - label.tau, label.epsilon)
    basis = {}
    for j in range(lower.hi + 1, upper.lo):
        if abs(d_shift(finite, j)) >= space.dim:
            continue
        op = d_operator(finite, j, space, convention).op
        parity = np.array([(-1) ** ((t + op.shift) % 2) for t in range(space.dim)], dtype=float)
        basis[j] = ShiftedDiagonalOperator(space, op.shift, op.values * parity).as_operator()
    return basis


def remove_boundary(block: np.ndarray, basis: Dict[int, np.ndarray]) -> Tuple[np.ndarray, Dict[int, complex]]:
    """Project the boundary operators out of a dense block; the basis blocks sit on distinct diagonals"""
    remainder = np.array(block, dtype=complex)
    coefficients = {}
    for j, b in basis.items():
        weight = float(np.vdot(b, b).real)
        if weight == 0.0:
            continue
        coefficient = complex(np.vdot(b, remainder) / weight)
        remainder -= coefficient * b
        coefficients[j] = coefficient
    return remainder, coefficients


@dataclass(frozen=True)
class WeightCheck:
    label: IrrepLabel
    coefficients: Dict[str, complex]
    # interior norms of the ladder image relative to D, with any boundary component removed
    image_norms: Dict[str, float]
    # boundary component of the image when the neighbour is a pole (discrete pair)
    boundary: Dict[str, complex] = field(default_factory=dict)


def highest_lowest_weight_check(label: IrrepLabel, space: FockSpace,
                                convention: str = "series") -> WeightCheck:
    """
    At the subspace edges k = tau - eps (top) and k = -tau - eps (bottom)
    the ladder coefficients vanish and the image H+ D_top, H- D_bottom is
    measured as an operator. For the discrete pair the neighbour sits on a
    gamma pole; the image is then the finite residue, a boundary operator,
    which is projected out and reported while the remainder must vanish.
    """
    series = classify(label)
    if series.kind == SeriesKind.CONTINUOUS:
        raise DomainError(f"{label} has no highest or lowest weight")
    tau, eps = complex(label.tau), float(label.epsilon)
    top = _integer_value(label.tau - label.epsilon)
    bottom = -_integer_value(label.tau + label.epsilon)
    coefficients, norms, boundary = {}, {}, {}
    edge_basis = boundary_operators(label, space, convention)
    for name, k, coefficient, ladder, neighbour in (
        (f"H+ D_{top}", top, top - tau + eps, ladder_plus, top + 1),
        (f"H- D_{bottom}", bottom, -(bottom + tau + eps), ladder_minus, bottom - 1),
    ):
        coefficients[name] = coefficient
        if abs(d_shift(label, k)) >= space.dim:
            continue
        d_k = d_operator(label, k, space, convention).as_operator()
        image = ladder(d_k)
        size = image.interior
        if size <= 0:
            norms[name] = float('nan')
            continue
        block = image.interior_block(size)
        if not series.contains(neighbour):
            if neighbour not in edge_basis:
                logger.debug(f"{name}: boundary operator at D_{neighbour} does not fit N={space.dim}")
                continue
            residue = {neighbour: edge_basis[neighbour].interior_block(size)}
            block, found = remove_boundary(block, residue)
            boundary[name] = found.get(neighbour, 0j)
            logger.debug(f"{name}: boundary component {boundary[name]} at D_{neighbour}")
        scale = max(1.0, float(np.max(np.abs(d_k.interior_block(size)))))
        norms[name] = float(np.max(np.abs(block))) / scale
    return WeightCheck(label, coefficients, norms, boundary)


def lie_algebra_residuals(f: FockOperator) -> Dict[str, float]:
    """[H+, H-] = 2H and [H, H+-] = +-H+- applied to F, on the interior block"""
    plus, minus, h = ladder_plus(f), ladder_minus(f), ladder_h(f)
    return {
        '[H+,H-] = 2H': interior_residual(ladder_plus(minus) - ladder_minus(plus), 2.0 * h),
        '[H,H+] = H+': interior_residual(ladder_h(plus) - ladder_plus(h), plus),
        '[H,H-] = -H-': interior_residual(ladder_h(minus) - ladder_minus(h), -minus),
    }


def real_structure_check(space: FockSpace, rng: np.random.Generator,
                         shifts: Iterable[int] = (-2, 0, 2)) -> Dict[str, float]:
    """
    Adjoints of the ladders under (F, G) = tr(F^dagger G):
    (H+ F, G) = -(F, H- G) and (H F, G) = (F, H G).
    """
    f = random_operator(space, shifts, rng)
    g = random_operator(space, shifts, rng)
    plus = trace_inner_product(ladder_plus(f), g) + trace_inner_product(f, ladder_minus(g))
    h = trace_inner_product(ladder_h(f), g) - trace_inner_product(f, ladder_h(g))
    return {'H+ vs -H-': abs(plus), 'H self-adjoint': abs(h)}


# -- export ---------------------------------------------------------------

def export_csv(label: IrrepLabel, k_values: Iterable[int], space: FockSpace,
               table: str = "d", convention: str = "series") -> str:
    """f-table or D diagonals as columns k, t, re, im with a '# {tau, epsilon, N}' header"""
    rows = []
    for k in k_values:
        if table == "f":
            values = f_values(label, k, space.dim - 1, convention)
            rows.extend((k, t, complex(v)) for t, v in enumerate(values))
        elif table == "d":
            op = d_operator(label, k, space, convention).op
            rows.extend((k, t, complex(op.values[t])) for t in space.columns(op.shift))
        else:
            raise DomainError(f"Unknown table {table!r}, expected 'f' or 'd'")
    frame = pd.DataFrame({
        'k': [r[0] for r in rows],
        't': [r[1] for r in rows],
        're': [r[2].real for r in rows],
        'im': [r[2].imag for r in rows],
    })
    header = dict(label.to_json(), N=space.dim, convention=convention)
    buffer = io.StringIO()
    buffer.write(f"# {json.dumps(header, sort_keys=True)}\n")
    frame.to_csv(buffer, index=False, float_format='%.17g')
    return buffer.getvalue()
