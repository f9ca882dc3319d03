"""
SU(1,1) elements g = [[a, b], [conj(b), conj(a)]] with |a|^2 - |b|^2 = 1,
their composition, inversion and the Cartan factorisation
g = k(phi) h(alpha) k(psi).
"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from algebra.fock_operator import FockOperator, FockSpace, annihilation, creation
from errors import DomainError

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * math.pi
CONSTRAINT_TOL = 1e-12
DEGENERATE_TOL = 1e-14


@dataclass(frozen=True)
class GroupElement:
    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        det = abs(a) ** 2 - abs(b) ** 2
        if not det > 0:
            raise DomainError(f"|a|^2 - |b|^2 must be positive, got {det}")
        scale = 1.0 / math.sqrt(det)
        object.__setattr__(self, 'a', a * scale)
        object.__setattr__(self, 'b', b * scale)

    @classmethod
    def identity(cls) -> 'GroupElement':
        return cls(1.0, 0.0)

    @property
    def constraint_residual(self) -> float:
        return abs(abs(self.a) ** 2 - abs(self.b) ** 2 - 1.0)

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.b.conjugate(), self.a.conjugate()]])

    def transpose(self) -> 'GroupElement':
        """g^T = (a, conj(b)), again in SU(1,1)"""
        return GroupElement(self.a, self.b.conjugate())

    def distance(self, other: 'GroupElement') -> float:
        return max(abs(self.a - other.a), abs(self.b - other.b))

    def to_json(self) -> Dict[str, float]:
        return {
            're_a': self.a.real, 'im_a': self.a.imag,
            're_b': self.b.real, 'im_b': self.b.imag,
        }

    @classmethod
    def from_json(cls, data: Dict[str, float]) -> 'GroupElement':
        return cls(complex(data['re_a'], data['im_a']), complex(data['re_b'], data['im_b']))


@dataclass(frozen=True)
class CartanAngles:
    """
    Angles of g = k(phi) h(alpha) k(psi).

    phi and psi are kept in [0, 4*pi): the half angles e^{i psi/2} appear in
    the Weyl representation, so psi and psi + 2*pi are different points.
    ``sign`` is +1 when cartan_compose(angles) reproduces the decomposed
    element and -1 when it reproduces its negative.
    """

    phi: float
    alpha: float
    psi: float
    sign: int = 1

    def __post_init__(self):
        if self.alpha < 0:
            raise DomainError(f"Rapidity alpha must be nonnegative, got {self.alpha}")
        if self.sign not in (1, -1):
            raise DomainError(f"sign must be +1 or -1, got {self.sign}")
        object.__setattr__(self, 'phi', float(self.phi) % FOUR_PI)
        object.__setattr__(self, 'psi', float(self.psi) % FOUR_PI)
        object.__setattr__(self, 'alpha', float(self.alpha))

    def to_json(self) -> Dict[str, float]:
        return {'phi': self.phi, 'alpha': self.alpha, 'psi': self.psi}

    @classmethod
    def from_json(cls, data: Dict[str, float]) -> 'CartanAngles':
        return cls(data['phi'], data['alpha'], data['psi'])


def k_element(psi: float) -> GroupElement:
    return GroupElement(cmath.exp(0.5j * psi), 0.0)


def h_element(alpha: float) -> GroupElement:
    return GroupElement(math.cosh(0.5 * alpha), math.sinh(0.5 * alpha))


def compose(g1: GroupElement, g2: GroupElement) -> GroupElement:
    a = g1.a * g2.a + g1.b * g2.b.conjugate()
    b = g1.a * g2.b + g1.b * g2.a.conjugate()
    return GroupElement(a, b)


def inverse(g: GroupElement) -> GroupElement:
    return GroupElement(g.a.conjugate(), -g.b)


def cartan_compose(c: CartanAngles) -> GroupElement:
    half_a = 0.5 * c.alpha
    a = cmath.exp(0.5j * (c.phi + c.psi)) * math.cosh(half_a)
    b = cmath.exp(0.5j * (c.phi - c.psi)) * math.sinh(half_a)
    return GroupElement(a, b)


def cartan_decompose(g: GroupElement) -> CartanAngles:
    """
    Angles with phi + psi = 2 arg(a) and phi - psi = 2 arg(b).

    alpha is taken from |b| (alpha = 2 arsinh|b| = 2 arcosh|a|), which stays
    accurate near the identity. For b = 0 the split of phi + psi is free and
    psi is fixed to 0.
    """
    alpha = 2.0 * math.asinh(abs(g.b))
    p = 2.0 * cmath.phase(g.a)
    if abs(g.b) < DEGENERATE_TOL:
        phi, psi = p, 0.0
    else:
        q = 2.0 * cmath.phase(g.b)
        phi, psi = 0.5 * (p + q), 0.5 * (p - q)
    angles = CartanAngles(phi, alpha, psi)
    rebuilt = cartan_compose(angles)
    if rebuilt.distance(g) > rebuilt.distance(GroupElement(-g.a, -g.b)):
        angles = CartanAngles(phi, alpha, psi, sign=-1)
        logger.debug(f"Cartan angles reproduce -g for g={g}")
    return angles


def act_on_generators(g: GroupElement, space: FockSpace) -> Tuple[FockOperator, FockOperator]:
    """(g z, g z*) = (a z + b z*, conj(b) z + conj(a) z*)"""
    z, zs = annihilation(space), creation(space)
    return z * g.a + zs * g.b, z * g.b.conjugate() + zs * g.a.conjugate()


def random_element(rng: np.random.Generator, alpha_max: float = 1.0) -> GroupElement:
    angles = CartanAngles(
        rng.uniform(0.0, FOUR_PI), rng.uniform(0.0, alpha_max), rng.uniform(0.0, FOUR_PI)
    )
    return cartan_compose(angles)
