"""
Matrix elements t_kn(g) of the irreducible representations in the D-basis,
T(g) D_n = sum_k t_kn(g) D_k, as functions of the Cartan angles of g.
"""

import cmath
import io
import json
import logging
import math
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import expm

from errors import DomainError
from group.su11_group import CartanAngles
from irrep.irrep_basis import IrrepLabel, classify
from specfun.hypergeometric import hyp2f1
from specfun.kernels import gamma_ratio_shift

logger = logging.getLogger(__name__)

PHASE_CONVENTIONS = ("asymmetric", "literal")


@dataclass(frozen=True)
class TMatrixEntry:
    label: IrrepLabel
    k: int
    n: int
    angles: CartanAngles
    value: complex

    def to_json(self) -> Dict:
        return {
            **self.label.to_json(), 'k': self.k, 'n': self.n,
            **self.angles.to_json(), 'value': [self.value.real, self.value.imag],
        }


def _check_indices(label: IrrepLabel, *indices: int):
    series = classify(label)
    for index in indices:
        if not series.contains(index):
            ranges = ", ".join(str(r) for r in series.k_ranges)
            raise DomainError(f"Index {index} lies outside the invariant subspaces {ranges} of {label}")


def _boost_part(tau: complex, epsilon: float, k: int, n: int, alpha: float) -> complex:
    """t_kn(h(alpha)) for k >= n"""
    s, c = math.sinh(0.5 * alpha), math.cosh(0.5 * alpha)
    jump = k - n
    if s == 0.0:
        return 1.0 + 0j if jump == 0 else 0j
    ratio = complex(gamma_ratio_shift(1 + tau - epsilon - k, jump))
    power = s ** jump / c ** (k + n + 2 * epsilon) / math.factorial(jump)
    hyp = hyp2f1(-tau - epsilon - n, 1 + tau - epsilon - n, 1 + jump, -s * s)
    return ratio * power * hyp


def t_boost(label: IrrepLabel, k: int, n: int, alpha: float) -> complex:
    """t_kn(h(alpha)); for k < n the substitution (k, n, eps) -> (-k, -n, -eps)"""
    tau, eps = complex(label.tau), float(label.epsilon)
    if k >= n:
        return _boost_part(tau, eps, k, n, alpha)
    return _boost_part(tau, -eps, -k, -n, alpha)


def t_phase(label: IrrepLabel, k: int, n: int, angles: CartanAngles,
            phase_convention: str = "asymmetric") -> complex:
    if phase_convention not in PHASE_CONVENTIONS:
        raise DomainError(f"Unknown phase convention {phase_convention!r}, expected one of {PHASE_CONVENTIONS}")
    eps = float(label.epsilon)
    right = n if phase_convention == "asymmetric" else k
    return cmath.exp(-1j * (k + eps) * angles.phi - 1j * (right + eps) * angles.psi)


def t_element(label: IrrepLabel, k: int, n: int, angles: CartanAngles,
              phase_convention: str = "asymmetric") -> complex:
    _check_indices(label, k, n)
    value = t_phase(label, k, n, angles, phase_convention) * t_boost(label, k, n, angles.alpha)
    return complex(value)


def t_entry(label: IrrepLabel, k: int, n: int, angles: CartanAngles,
            phase_convention: str = "asymmetric") -> TMatrixEntry:
    return TMatrixEntry(label, k, n, angles, t_element(label, k, n, angles, phase_convention))


def t_block(label: IrrepLabel, k_values: Sequence[int], angles: CartanAngles,
            phase_convention: str = "asymmetric") -> np.ndarray:
    """B[i, j] = t_{k_i, k_j}, so that block(g1) @ block(g2) = block(g1 g2) on closed ranges"""
    k_values = list(k_values)
    block = np.zeros((len(k_values), len(k_values)), dtype=complex)
    for i, k in enumerate(k_values):
        for j, n in enumerate(k_values):
            block[i, j] = t_element(label, k, n, angles, phase_convention)
    return block


def finite_k_values(label: IrrepLabel) -> list:
    """The whole index range of a finite representation"""
    series = classify(label)
    if len(series.k_ranges) != 1 or series.k_ranges[0].lo is None or series.k_ranges[0].hi is None:
        raise DomainError(f"{label} is not finite-dimensional")
    return list(range(series.k_ranges[0].lo, series.k_ranges[0].hi + 1))


def boost_generator(label: IrrepLabel, k_values: Sequence[int]) -> np.ndarray:
    """
    E1 = -(H+ + H-)/2 in the D-basis, with H+ D_n = (n-tau+eps) D_{n+1} and
    H- D_n = -(n+tau+eps) D_{n-1}; T(h(alpha)) = exp(alpha E1).
    """
    tau, eps = complex(label.tau), float(label.epsilon)
    index = {k: i for i, k in enumerate(k_values)}
    generator = np.zeros((len(index), len(index)), dtype=complex)
    for n, j in index.items():
        if n + 1 in index:
            generator[index[n + 1], j] += -0.5 * (n - tau + eps)
        if n - 1 in index:
            generator[index[n - 1], j] += 0.5 * (n + tau + eps)
    return generator


def t_block_expm(label: IrrepLabel, k_values: Sequence[int], angles: CartanAngles,
                 phase_convention: str = "asymmetric") -> np.ndarray:
    """t_block from the matrix exponential of the generators (exact on finite ranges)"""
    k_values = list(k_values)
    eps = float(label.epsilon)
    weights = np.array([k + eps for k in k_values])
    left = np.exp(-1j * weights * angles.phi)
    right = np.exp(-1j * weights * angles.psi)
    boost = expm(angles.alpha * boost_generator(label, k_values))
    if phase_convention == "asymmetric":
        return left[:, None] * boost * right[None, :]
    return (left * right)[:, None] * boost


def unitarity_defect(block: np.ndarray, window: int = 0) -> float:
    """max |B^dagger B - I| over the block with ``window`` indices dropped at each edge"""
    size = block.shape[0]
    inner = slice(window, size - window)
    if size - 2 * window <= 0:
        return float('nan')
    gram = block.conj().T @ block
    return float(np.max(np.abs(gram[inner, inner] - np.eye(size - 2 * window))))


def export_csv(label: IrrepLabel, k_values: Sequence[int], angles: CartanAngles,
               phase_convention: str = "asymmetric") -> str:
    """CSV (k, n, re, im) with a '# {tau, epsilon, phi, alpha, psi}' header"""
    block = t_block(label, k_values, angles, phase_convention)
    rows = [(k, n, block[i, j]) for i, k in enumerate(k_values) for j, n in enumerate(k_values)]
    frame = pd.DataFrame({
        'k': [r[0] for r in rows],
        'n': [r[1] for r in rows],
        're': [r[2].real for r in rows],
        'im': [r[2].imag for r in rows],
    })
    header = {**label.to_json(), **angles.to_json(), 'phase_convention': phase_convention}
    buffer = io.StringIO()
    buffer.write(f"# {json.dumps(header, sort_keys=True)}\n")
    frame.to_csv(buffer, index=False, float_format='%.17g')
    return buffer.getvalue()
