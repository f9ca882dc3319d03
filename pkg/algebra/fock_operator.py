"""
Truncated Fock-space operator algebra.

Operators are stored as sparse sets of shifted diagonals: a term with shift d
has its nonzero entries at (t + d, t). Values are kept column-indexed in an
array of length N, zero wherever the row t + d falls outside the truncation.

Each FockOperator carries a ``margin``: the number of trailing rows/columns
that truncation may have corrupted. Products grow the margin by the overlap
of the factors' shifts; comparisons are made on the interior block
[0, N - margin).
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence

import numpy as np

from errors import DimensionMismatchError, DomainError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FockSpace:
    """Span of |0>..|N-1>"""

    dim: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise DomainError(f"Fock space dimension must be an integer >= 2, got {self.dim}")

    def columns(self, shift: int) -> range:
        """Columns t for which row t + shift lies inside the truncation"""
        return range(max(0, -shift), min(self.dim, self.dim - shift))


@dataclass(frozen=True, eq=False)
class ShiftedDiagonalOperator:
    """Single diagonal m = t + shift with column-indexed values"""

    space: FockSpace
    shift: int
    values: np.ndarray

    def __post_init__(self):
        n = self.space.dim
        if abs(self.shift) >= n:
            raise DomainError(f"Shift {self.shift} does not fit a space of dimension {n}")
        values = np.zeros(n, dtype=complex)
        raw = np.asarray(self.values, dtype=complex)
        cols = self.space.columns(self.shift)
        if raw.shape != (n,):
            raise DimensionMismatchError(
                f"Expected {n} column values for shift {self.shift}, got shape {raw.shape}"
            )
        values[cols.start:cols.stop] = raw[cols.start:cols.stop]
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @classmethod
    def from_function(cls, space: FockSpace, shift: int,
                      fn: Callable[[int], complex]) -> 'ShiftedDiagonalOperator':
        values = np.zeros(space.dim, dtype=complex)
        for t in space.columns(shift):
            values[t] = fn(t)
        return cls(space, shift, values)

    def entry(self, m: int, t: int) -> complex:
        if m - t != self.shift or not (0 <= m < self.space.dim and 0 <= t < self.space.dim):
            return 0j
        return complex(self.values[t])

    def adjoint(self) -> 'ShiftedDiagonalOperator':
        values = np.zeros(self.space.dim, dtype=complex)
        cols = self.space.columns(self.shift)
        values[cols.start + self.shift:cols.stop + self.shift] = np.conj(
            self.values[cols.start:cols.stop]
        )
        return ShiftedDiagonalOperator(self.space, -self.shift, values)

    def to_dense(self) -> np.ndarray:
        n = self.space.dim
        matrix = np.zeros((n, n), dtype=complex)
        cols = np.arange(self.space.columns(self.shift).start, self.space.columns(self.shift).stop)
        matrix[cols + self.shift, cols] = self.values[cols]
        return matrix

    def as_operator(self, margin: int = 0) -> 'FockOperator':
        return FockOperator(self.space, {self.shift: self.values}, margin)


@dataclass(frozen=True, eq=False)
class FockOperator:
    """Finite sum of shifted diagonals, at most one per shift"""

    space: FockSpace
    terms: Mapping[int, np.ndarray] = field(default_factory=dict)
    margin: int = 0

    def __post_init__(self):
        merged: Dict[int, np.ndarray] = {}
        for shift, values in dict(self.terms).items():
            diag = ShiftedDiagonalOperator(self.space, int(shift), values)
            merged[diag.shift] = diag.values
        object.__setattr__(self, 'terms', merged)
        object.__setattr__(self, 'margin', int(min(max(self.margin, 0), self.space.dim)))

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, space: FockSpace) -> 'FockOperator':
        return cls(space, {})

    @classmethod
    def identity(cls, space: FockSpace) -> 'FockOperator':
        return cls.diagonal(space, np.ones(space.dim))

    @classmethod
    def diagonal(cls, space: FockSpace, values: Sequence[complex]) -> 'FockOperator':
        return cls(space, {0: np.asarray(values, dtype=complex)})

    @classmethod
    def from_dense(cls, matrix: np.ndarray, margin: int = 0, atol: float = 0.0) -> 'FockOperator':
        matrix = np.asarray(matrix, dtype=complex)
        n = matrix.shape[0]
        if matrix.shape != (n, n):
            raise DimensionMismatchError(f"Expected a square matrix, got {matrix.shape}")
        space = FockSpace(n)
        terms = {}
        for shift in range(-(n - 1), n):
            cols = space.columns(shift)
            idx = np.arange(cols.start, cols.stop)
            diag = matrix[idx + shift, idx]
            if np.any(np.abs(diag) > atol):
                values = np.zeros(n, dtype=complex)
                values[idx] = diag
                terms[shift] = values
        return cls(space, terms, margin)

    # -- inspection -------------------------------------------------------

    @property
    def shifts(self) -> Sequence[int]:
        return sorted(self.terms)

    @property
    def interior(self) -> int:
        """Size of the leading block unaffected by truncation"""
        return self.space.dim - self.margin

    def term(self, shift: int) -> ShiftedDiagonalOperator:
        values = self.terms.get(shift, np.zeros(self.space.dim, dtype=complex))
        return ShiftedDiagonalOperator(self.space, shift, values)

    def to_dense(self) -> np.ndarray:
        matrix = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        for shift in self.terms:
            matrix += self.term(shift).to_dense()
        return matrix

    def interior_block(self, size: Optional[int] = None) -> np.ndarray:
        size = self.interior if size is None else size
        return self.to_dense()[:size, :size]

    # -- algebra ----------------------------------------------------------

    def _check_space(self, other: 'FockOperator'):
        if not isinstance(other, FockOperator):
            raise TypeError(f"Expected FockOperator, got {type(other).__name__}")
        if other.space != self.space:
            raise DimensionMismatchError(
                f"Fock spaces differ: {self.space.dim} vs {other.space.dim}"
            )

    def __add__(self, other: 'FockOperator') -> 'FockOperator':
        self._check_space(other)
        terms = {s: v.copy() for s, v in self.terms.items()}
        for shift, values in other.terms.items():
            terms[shift] = terms[shift] + values if shift in terms else values.copy()
        return FockOperator(self.space, terms, max(self.margin, other.margin))

    def __neg__(self) -> 'FockOperator':
        return self.scale(-1.0)

    def __sub__(self, other: 'FockOperator') -> 'FockOperator':
        return self + (-other)

    def scale(self, factor: complex) -> 'FockOperator':
        return FockOperator(self.space, {s: factor * v for s, v in self.terms.items()}, self.margin)

    def __mul__(self, factor: complex) -> 'FockOperator':
        return self.scale(factor)

    __rmul__ = __mul__

    def __matmul__(self, other: 'FockOperator') -> 'FockOperator':
        self._check_space(other)
        n = self.space.dim
        cols = np.arange(n)
        terms: Dict[int, np.ndarray] = {}
        for d_b, b in other.terms.items():
            idx = cols + d_b
            inside = (idx >= 0) & (idx < n)
            for d_a, a in self.terms.items():
                shift = d_a + d_b
                if abs(shift) >= n:
                    continue
                values = np.zeros(n, dtype=complex)
                values[inside] = a[idx[inside]] * b[inside]
                terms[shift] = terms[shift] + values if shift in terms else values
        pos_b = max([0] + [s for s in other.terms])
        neg_a = max([0] + [-s for s in self.terms])
        margin = max(self.margin, other.margin) + min(pos_b, neg_a)
        return FockOperator(self.space, terms, margin)

    def power(self, n: int) -> 'FockOperator':
        if n < 0:
            raise DomainError("Negative operator powers are not defined")
        result = FockOperator.identity(self.space)
        for _ in range(n):
            result = result @ self
        return result

    def adjoint(self) -> 'FockOperator':
        terms = {}
        for shift in self.terms:
            adj = self.term(shift).adjoint()
            terms[adj.shift] = adj.values
        return FockOperator(self.space, terms, self.margin)


# -- generators -----------------------------------------------------------

def annihilation(space: FockSpace) -> FockOperator:
    """z|n> = sqrt(n)|n-1>"""
    return ShiftedDiagonalOperator.from_function(space, -1, lambda t: np.sqrt(t)).as_operator()


def creation(space: FockSpace) -> FockOperator:
    """z*|n> = sqrt(n+1)|n+1>"""
    return ShiftedDiagonalOperator.from_function(space, 1, lambda t: np.sqrt(t + 1)).as_operator()


def number_operator(space: FockSpace) -> FockOperator:
    return FockOperator.diagonal(space, np.arange(space.dim, dtype=float))


def falling_factorial_diagonal(n: int, space: FockSpace) -> FockOperator:
    """Diagonal t(t-1)...(t-n+1), equal to (z*)^n z^n on the whole truncation"""
    if n < 0:
        raise DomainError(f"Falling factorial order must be nonnegative, got {n}")
    t = np.arange(space.dim, dtype=float)
    values = np.ones(space.dim)
    for j in range(n):
        values = values * (t - j)
    return FockOperator.diagonal(space, values)


def commutator(a: FockOperator, b: FockOperator) -> FockOperator:
    return a @ b - b @ a


def trace_inner_product(f: FockOperator, g: FockOperator) -> complex:
    """(F, G) = tr(F^dagger G); only equal shifts pair up"""
    f._check_space(g)
    total = 0j
    for shift in set(f.terms) & set(g.terms):
        total += complex(np.sum(np.conj(f.terms[shift]) * g.terms[shift]))
    return total


def interior_residual(a: FockOperator, b: FockOperator, size: Optional[int] = None) -> float:
    """Max-norm of a - b over the common interior block"""
    a._check_space(b)
    if size is None:
        size = min(a.interior, b.interior)
    if size <= 0:
        logger.debug("Empty interior block, residual undefined")
        return float('nan')
    diff = (a - b).to_dense()[:size, :size]
    return float(np.max(np.abs(diff))) if diff.size else 0.0


def random_operator(space: FockSpace, shifts: Iterable[int],
                    rng: np.random.Generator) -> FockOperator:
    terms = {}
    for shift in shifts:
        terms[shift] = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    return FockOperator(space, terms)
