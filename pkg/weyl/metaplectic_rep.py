"""
Metaplectic (Weyl) representation of SU(1,1) on the truncated Fock space.

U(k(psi)) is diagonal, U(h(alpha)) has the closed hypergeometric form below
(parity-even, half dense), and U(g) is assembled from the Cartan factors of g.
Dense truncations are only trusted on a leading interior block whose rows
lose at most ``leak_tol`` of their squared norm past the cutoff.
"""

import io
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np
import pandas as pd

from algebra.fock_operator import FockSpace, annihilation, creation
from errors import DimensionMismatchError, DomainError
from group.su11_group import (
    CartanAngles,
    GroupElement,
    cartan_decompose,
    compose,
    h_element,
    k_element,
)
from specfun.hypergeometric import hyp2f1_terminating
from specfun.kernels import gauss_hermite, hermite_psi_table

logger = logging.getLogger(__name__)

DEFAULT_LEAK_TOL = 1e-10
LEAK_TERMS_MAX = 20_000
QUADRATURE_EXTRA_NODES = 8


class BlockSource(str, Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    CARTAN_PRODUCT = "cartan_product"


@dataclass(frozen=True, eq=False)
class UnitaryBlock:
    space: FockSpace
    entries: np.ndarray
    source: BlockSource
    element: Optional[GroupElement] = None
    angles: Optional[CartanAngles] = None
    # total rapidity of the factors, which sets the leakage past the cutoff
    rapidity: float = 0.0

    def __post_init__(self):
        entries = np.array(self.entries, dtype=complex)
        n = self.space.dim
        if entries.shape != (n, n):
            raise DimensionMismatchError(f"Expected a {n}x{n} block, got {entries.shape}")
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def sign(self) -> int:
        return self.angles.sign if self.angles is not None else 1

    def interior(self, leak_tol: float = DEFAULT_LEAK_TOL) -> int:
        return interior_size(self.rapidity, self.space, leak_tol)

    def unitarity_residual(self, size: Optional[int] = None) -> float:
        """max |U^dagger U - I| over the leading size x size block"""
        size = self.interior() if size is None else size
        if size <= 0:
            return float('nan')
        block = self.entries[:, :size]
        gram = block.conj().T @ block
        return float(np.max(np.abs(gram - np.eye(size))))

    def metadata(self) -> Dict:
        return {
            'N': self.space.dim,
            'g': self.element.to_json() if self.element is not None else None,
            'source': self.source.value,
            'unitarity_residual': self.unitarity_residual(),
        }

    def to_json(self) -> str:
        payload = dict(self.metadata())
        payload['entries'] = [[[v.real, v.imag] for v in row] for row in self.entries]
        return json.dumps(payload, sort_keys=True)

    def to_csv(self) -> str:
        """Row-major m, n, re, im with a '# {metadata}' header line"""
        n = self.space.dim
        rows, cols = np.divmod(np.arange(n * n), n)
        flat = self.entries.reshape(-1)
        frame = pd.DataFrame({'m': rows, 'n': cols, 're': flat.real, 'im': flat.imag})
        buffer = io.StringIO()
        buffer.write(f"# {json.dumps(self.metadata(), sort_keys=True)}\n")
        frame.to_csv(buffer, index=False, float_format='%.17g')
        return buffer.getvalue()


# -- closed form ----------------------------------------------------------

def _closed_log_magnitude(m: int, n: int, s: float, c: float) -> Tuple[float, int]:
    """log|prefactor| and sign of U_mn(h) for n >= m, n + m even, without F"""
    j = (n - m) // 2
    if s == 0.0:
        return (0.0, 1) if j == 0 else (-math.inf, 1)
    log_mag = (-j * math.log(2.0) - math.lgamma(j + 1)
               + 0.5 * (math.lgamma(n + 1) - math.lgamma(m + 1))
               + j * math.log(abs(s)) - 0.5 * (n + m + 1) * math.log(c))
    sign = -1 if (s < 0 and j % 2) else 1
    return log_mag, sign


def _closed_hypergeometric(m: int, n: int, s: float) -> float:
    """F(-m/2, (1-m)/2; 1 + (n-m)/2; -s^2); one numerator parameter terminates"""
    j = (n - m) // 2
    if m % 2 == 0:
        value = hyp2f1_terminating(m // 2, 0.5 * (1 - m), 1 + j, -s * s, exact=False)
    else:
        value = hyp2f1_terminating((m - 1) // 2, -0.5 * m, 1 + j, -s * s, exact=False)
    return complex(value).real


def squeeze_element(m: int, n: int, alpha: float) -> float:
    """U_mn(h(alpha)); zero for odd m + n, swap rule U_mn(alpha) = U_nm(-alpha) for m > n"""
    if m < 0 or n < 0:
        raise DomainError(f"Fock indices must be nonnegative, got ({m}, {n})")
    if (m + n) % 2:
        return 0.0
    if m > n:
        return squeeze_element(n, m, -alpha)
    s, c = math.sinh(0.5 * alpha), math.cosh(0.5 * alpha)
    log_mag, sign = _closed_log_magnitude(m, n, s, c)
    if log_mag == -math.inf:
        return 0.0
    return sign * math.exp(log_mag) * _closed_hypergeometric(m, n, s)


def u_phase(psi: float, space: FockSpace) -> UnitaryBlock:
    """U(k(psi))|n> = e^{-i n psi/2}|n>"""
    n = np.arange(space.dim)
    return UnitaryBlock(space, np.diag(np.exp(-0.5j * psi * n)), BlockSource.CLOSED_FORM,
                        element=k_element(psi))


def u_squeeze_closed(alpha: float, space: FockSpace) -> UnitaryBlock:
    n = space.dim
    entries = np.zeros((n, n))
    for row in range(n):
        for col in range(row % 2, n, 2):
            entries[row, col] = squeeze_element(row, col, alpha)
    return UnitaryBlock(space, entries, BlockSource.CLOSED_FORM,
                        element=h_element(alpha), rapidity=abs(alpha))


def u_squeeze_quadrature(alpha: float, space: FockSpace, order: Optional[int] = None) -> UnitaryBlock:
    """
    e^{alpha/4} int Psi_m(x) Psi_n(e^{alpha/2} x) dx by Gauss-Hermite quadrature.

    With x = y sqrt(2/(1+lam^2)) the Gaussian factors combine to e^{-y^2} and
    the remaining integrand is a polynomial of degree m + n, integrated
    exactly once the order reaches N.
    """
    n = space.dim
    order = n + QUADRATURE_EXTRA_NODES if order is None else order
    if 2 * order - 1 < 2 * (n - 1):
        raise DomainError(f"Quadrature order {order} cannot integrate degree {2 * (n - 1)} exactly")
    lam = math.exp(0.5 * alpha)
    scale = math.sqrt(2.0 / (1.0 + lam * lam))
    nodes, weights = gauss_hermite(order)
    x = scale * nodes
    left, _ = hermite_psi_table(n - 1, x, weighted=False, max_order=max(n, 128))
    right, _ = hermite_psi_table(n - 1, lam * x, weighted=False, max_order=max(n, 128))
    entries = math.exp(0.25 * alpha) * scale * (left * weights) @ right.T
    logger.debug(f"Quadrature U(h({alpha})) with {order} nodes on N={n}")
    return UnitaryBlock(space, entries, BlockSource.QUADRATURE,
                        element=h_element(alpha), rapidity=abs(alpha))


def u_of_g(g: GroupElement, space: FockSpace) -> UnitaryBlock:
    """U(k(phi)) U(h(alpha)) U(k(psi)) from the Cartan angles of g"""
    angles = cartan_decompose(g)
    left = np.exp(-0.5j * angles.phi * np.arange(space.dim))
    right = np.exp(-0.5j * angles.psi * np.arange(space.dim))
    middle = u_squeeze_closed(angles.alpha, space).entries
    entries = left[:, None] * middle * right[None, :]
    if angles.sign < 0:
        logger.debug(f"Cartan angles of {g} reproduce -g; metaplectic sign recorded")
    return UnitaryBlock(space, entries, BlockSource.CARTAN_PRODUCT,
                        element=g, angles=angles, rapidity=angles.alpha)


# -- truncation control ---------------------------------------------------

def row_leakage(row: int, alpha: float, dim: int) -> float:
    """sum_{m >= dim} |U_row,m(h(alpha))|^2, the squared norm lost past the cutoff"""
    s, c = math.sinh(0.5 * abs(alpha)), math.cosh(0.5 * abs(alpha))
    if s == 0.0:
        return 0.0
    start = dim + ((dim + row) % 2)
    total = 0.0
    previous = math.inf
    for col in range(start, start + 2 * LEAK_TERMS_MAX, 2):
        log_mag, _ = _closed_log_magnitude(row, col, s, c)
        hyp = abs(_closed_hypergeometric(row, col, s))
        term = math.exp(2.0 * log_mag) * hyp * hyp if hyp > 0 else 0.0
        total += term
        if term < previous and term <= 1e-20 * max(total, 1e-300):
            return total
        previous = term
    logger.debug(f"Leakage sum for row {row}, alpha={alpha} stopped at the term cap")
    return total


def interior_size(alpha: float, space: FockSpace, leak_tol: float = DEFAULT_LEAK_TOL) -> int:
    """Number of leading rows whose leakage stays below leak_tol"""
    size = 0
    for row in range(space.dim):
        if row_leakage(row, alpha, space.dim) > leak_tol:
            break
        size += 1
    logger.debug(f"Interior block {size}/{space.dim} at alpha={alpha}, leak_tol={leak_tol}")
    return size


def grow_truncation(alpha: float, space: FockSpace, leak_tol: float = DEFAULT_LEAK_TOL,
                    min_interior: int = 8, max_dim: int = 128) -> Tuple[FockSpace, int]:
    """Double N (capped at max_dim) until the interior block holds min_interior rows"""
    dim = space.dim
    size = interior_size(alpha, FockSpace(dim), leak_tol)
    while size < min_interior and dim < max_dim:
        dim = min(2 * dim, max_dim)
        size = interior_size(alpha, FockSpace(dim), leak_tol)
    if dim != space.dim:
        logger.debug(f"Truncation raised from {space.dim} to {dim} for alpha={alpha}")
    if size < min_interior:
        logger.warning(f"Interior block {size} < {min_interior} at N={dim}, alpha={alpha}")
    return FockSpace(dim), size


def margin_heuristic(total_alpha: float, dim: int) -> int:
    """Rows to drop by the rule of thumb N (1 - 1/cosh^2(A/2))"""
    return int(math.ceil(dim * math.tanh(0.5 * abs(total_alpha)) ** 2))


# -- checks ---------------------------------------------------------------

@dataclass(frozen=True)
class HomomorphismResult:
    residual: float
    phase: complex
    interior: int
    margin_heuristic: int


@dataclass(frozen=True)
class IntertwiningResult:
    residual: float
    orientation: str
    interior: int
    residuals: Dict[str, float] = field(default_factory=dict)


def homomorphism_residual(g1: GroupElement, g2: GroupElement, space: FockSpace,
                          leak_tol: float = DEFAULT_LEAK_TOL) -> HomomorphismResult:
    """
    max |U(g1) U(g2) - phase * U(g1 g2)| on the interior block, the global
    phase taken from the (0, 0) entries.
    """
    u1, u2 = u_of_g(g1, space), u_of_g(g2, space)
    u12 = u_of_g(compose(g1, g2), space)
    size = min(u1.interior(leak_tol), u2.interior(leak_tol))
    heuristic = margin_heuristic(u1.rapidity + u2.rapidity, space.dim)
    if size <= 0:
        logger.debug("Empty interior block for the homomorphism check")
        return HomomorphismResult(float('nan'), 1.0 + 0j, 0, heuristic)
    product = (u1.entries @ u2.entries)[:size, :size]
    target = u12.entries[:size, :size]
    ratio = product[0, 0] / target[0, 0]
    phase = ratio / abs(ratio)
    residual = float(np.max(np.abs(product - phase * target)))
    return HomomorphismResult(residual, complex(phase), size, heuristic)


def intertwining_residual(g: GroupElement, space: FockSpace,
                          leak_tol: float = DEFAULT_LEAK_TOL) -> IntertwiningResult:
    """
    Compare U z U^-1 and U^-1 z U against g z = a z + b z*, and against the
    transposed action a z + conj(b) z*. The reported residual is the smaller
    of the two orientations against g z.
    """
    block = u_of_g(g, space)
    size = block.interior(leak_tol) - 1
    if size <= 0:
        logger.debug("Empty interior block for the intertwining check")
        return IntertwiningResult(float('nan'), 'U z U^-1', 0)
    u = block.entries
    z = annihilation(space).to_dense()
    zs = creation(space).to_dense()
    conjugated = {
        'U z U^-1': u @ z @ u.conj().T,
        'U^-1 z U': u.conj().T @ z @ u,
    }
    targets = {
        'g z': g.a * z + g.b * zs,
        'g^T z': g.a * z + g.b.conjugate() * zs,
    }
    residuals = {}
    for orientation, lhs in conjugated.items():
        for name, rhs in targets.items():
            diff = (lhs - rhs)[:size, :size]
            residuals[f"{orientation} vs {name}"] = float(np.max(np.abs(diff)))
    best = min(conjugated, key=lambda o: residuals[f"{o} vs g z"])
    return IntertwiningResult(residuals[f"{best} vs g z"], best, size, residuals)


def scaling_check(alpha: float, m: int, x: np.ndarray, space: FockSpace) -> float:
    """max |sum_n U_nm Psi_n(x) - e^{alpha/4} Psi_m(e^{alpha/2} x)| over the points x"""
    if m >= space.dim:
        raise DomainError(f"Index {m} outside the truncation {space.dim}")
    x = np.asarray(x, dtype=float)
    column = u_squeeze_closed(alpha, space).entries[:, m].real
    table, _ = hermite_psi_table(space.dim - 1, x, max_order=max(space.dim, 128))
    lhs = column @ table
    scaled, _ = hermite_psi_table(m, math.exp(0.5 * alpha) * x, max_order=max(space.dim, 128))
    rhs = math.exp(0.25 * alpha) * scaled[m]
    return float(np.max(np.abs(lhs - rhs)))

