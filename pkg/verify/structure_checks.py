import logging
import math
from typing import Dict, Sequence

import numpy as np

from algebra.fock_operator import FockSpace, random_operator
from errors import DomainError
from group.su11_group import GroupElement, cartan_decompose, compose, h_element, inverse
from irrep.irrep_basis import (
    IrrepLabel,
    SeriesKind,
    classify,
    d_operator,
    d_operator_product,
    f_series_value,
    f_value,
    highest_lowest_weight_check,
    ladder_residuals,
    lie_algebra_residuals,
    real_structure_check,
    recurrence_residuals,
)
from repmat.matrix_elements import finite_k_values, t_block, t_block_expm, unitarity_defect
from specfun.hypergeometric import terminating_series
from specfun.kernels import gamma_ratio_shift
from verify.report import VerificationReport
from weyl.metaplectic_rep import (
    homomorphism_residual,
    intertwining_residual,
    grow_truncation,
    scaling_check,
    u_squeeze_closed,
    u_squeeze_quadrature,
)

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


class StructureVerifier:
    """
    Checks of the algebraic structure: coefficient recurrences, the two
    constructions of D_k, ladder and Lie-algebra relations, the finite
    t-blocks, and the Weyl representation matrices
    """

    def __init__(self, config: Dict = None):
        self.config = config or {}
        self.tolerance = self.config.get('tolerance', 1e-9)
        self.tolerances = self.config.get('tolerances', {})
        self.leak_tolerance = self.config.get('leak_tolerance', 1e-10)
        self.min_interior = self.config.get('min_interior', 8)
        self.max_dim = self.config.get('max_dim', 128)
        self.f_convention = self.config.get('f_convention', 'series')
        self.phase_convention = self.config.get('phase_convention', 'asymmetric')

    def tolerance_for(self, identity_id: str) -> float:
        return float(self.tolerances.get(identity_id, self.tolerance))

    def _report(self, identity_id: str, params: Dict, residual: float, **kwargs) -> VerificationReport:
        return VerificationReport(identity_id, params, float(residual), self.tolerance_for(identity_id), **kwargs)

    # -- irrep ---------------------------------------------------------------

    def check_recurrence(self, label: IrrepLabel, k: int, n: int) -> VerificationReport:
        """Both C_kn recurrences; exactly zero for rational tau"""
        r1, r2 = recurrence_residuals(label, k, n)
        params = {**label.to_json(), 'k': k, 'n': n}
        return self._report('c_recurrence', params, max(abs(complex(r1)), abs(complex(r2))),
                            extra={'exact': label.exact, 'first': r1, 'second': r2})

    def check_f_series(self, label: IrrepLabel, k: int, zeta: int) -> VerificationReport:
        """Closed form of f_k against its defining expansion in falling factorials"""
        closed = complex(f_value(label, k, zeta, 'series'))
        series = complex(f_series_value(label, k, zeta))
        literal = complex(f_value(label, k, zeta, 'literal'))
        params = {**label.to_json(), 'k': k, 'zeta': zeta}
        return self._report('f_series', params, abs(closed - series) / max(1.0, abs(series)),
                            extra={'series': series, 'literal_convention': literal})

    def check_d_constructions(self, label: IrrepLabel, k: int, space: FockSpace) -> VerificationReport:
        """Entry formula for D_k against (z*)^{2k'} f(zeta) / f(zeta) z^{2|k'|}"""
        explicit = d_operator(label, k, space, self.f_convention).as_operator()
        product = d_operator_product(label, k, space, self.f_convention)
        scale = max(1.0, float(np.max(np.abs(explicit.to_dense()))))
        residual = float(np.max(np.abs(explicit.to_dense() - product.to_dense()))) / scale
        params = {**label.to_json(), 'k': k, 'N': space.dim}
        return self._report('d_constructions', params, residual, extra={'margin': product.margin})

    def check_ladder(self, label: IrrepLabel, k: int, space: FockSpace) -> VerificationReport:
        residuals = ladder_residuals(label, k, space, self.f_convention)
        params = {**label.to_json(), 'k': k, 'N': space.dim}
        return self._report('ladder', params, max(residuals.values()), extra=residuals)

    def check_weights(self, label: IrrepLabel, space: FockSpace) -> VerificationReport:
        result = highest_lowest_weight_check(label, space, self.f_convention)
        values = [abs(c) for c in result.coefficients.values()] + list(result.image_norms.values())
        params = {**label.to_json(), 'N': space.dim}
        return self._report('edge_weights', params, max(values),
                            extra={'coefficients': result.coefficients, 'image_norms': result.image_norms,
                                   'boundary': result.boundary})

    def check_lie_algebra(self, space: FockSpace, seed: int,
                          shifts: Sequence[int] = (-3, -1, 0, 2)) -> VerificationReport:
        rng = np.random.default_rng(seed)
        residuals = lie_algebra_residuals(random_operator(space, shifts, rng))
        params = {'N': space.dim, 'seed': seed, 'shifts': list(shifts)}
        return self._report('lie_algebra', params, max(residuals.values()), extra=residuals)

    def check_real_structure(self, space: FockSpace, seed: int) -> VerificationReport:
        residuals = real_structure_check(space, np.random.default_rng(seed))
        params = {'N': space.dim, 'seed': seed}
        return self._report('real_structure', params, max(residuals.values()), extra=residuals)

    def check_chu_vandermonde(self, n: int, b, c) -> VerificationReport:
        """F(-n, b; c; 1) = (c - b)_n / (c)_n"""
        value = terminating_series(n, b, c, 1).value
        expected = gamma_ratio_shift(c - b, n) / gamma_ratio_shift(c, n)
        params = {'n': n, 'b': complex(b), 'c': complex(c)}
        return self._report('chu_vandermonde', params, abs(complex(value) - complex(expected)))

    # -- repmat --------------------------------------------------------------

    def check_t_group_law(self, label: IrrepLabel, g1: GroupElement, g2: GroupElement) -> VerificationReport:
        """block(g1) block(g2) = block(g1 g2) on the full range of a finite representation"""
        k_values = finite_k_values(label)
        blocks = [t_block(label, k_values, cartan_decompose(g), self.phase_convention)
                  for g in (g1, g2, compose(g1, g2))]
        residual = float(np.max(np.abs(blocks[0] @ blocks[1] - blocks[2])))
        inverse_block = t_block(label, k_values, cartan_decompose(inverse(g1)), self.phase_convention)
        inverse_residual = float(np.max(np.abs(blocks[0] @ inverse_block - np.eye(len(k_values)))))
        params = {**label.to_json(), 'g1': g1.to_json(), 'g2': g2.to_json()}
        return self._report('t_group_law', params, max(residual, inverse_residual),
                            extra={'product': residual, 'inverse': inverse_residual})

    def check_t_expm(self, label: IrrepLabel, g: GroupElement) -> VerificationReport:
        """Closed-form t-block against exp(alpha E1) with the k-phases"""
        k_values = finite_k_values(label)
        angles = cartan_decompose(g)
        closed = t_block(label, k_values, angles, self.phase_convention)
        oracle = t_block_expm(label, k_values, angles, self.phase_convention)
        scale = max(1.0, float(np.max(np.abs(oracle))))
        params = {**label.to_json(), 'g': g.to_json()}
        return self._report('t_expm', params, float(np.max(np.abs(closed - oracle))) / scale)

    def check_principal_unitarity(self, label: IrrepLabel, half_width: int, alpha: float) -> VerificationReport:
        """B^dagger B = I on the inner half of the k-window for a principal-series label"""
        if classify(label).kind != SeriesKind.CONTINUOUS:
            raise DomainError(f"{label} is not in the continuous series")
        k_values = list(range(-half_width, half_width + 1))
        block = t_block(label, k_values, cartan_decompose(h_element(alpha)),
                        self.phase_convention)
        window = half_width // 2
        defect = unitarity_defect(block, window)
        params = {**label.to_json(), 'half_width': half_width, 'alpha': alpha}
        return self._report('principal_unitarity', params, defect,
                            extra={'full_block_defect': unitarity_defect(block)})

    # -- weyl ----------------------------------------------------------------

    def check_weyl_oracle(self, alpha: float, space: FockSpace, m_max: int = 20) -> VerificationReport:
        """Closed-form U(h(alpha)) against Gauss-Hermite quadrature for m, n <= m_max"""
        space = FockSpace(max(space.dim, m_max + 1))
        closed = u_squeeze_closed(alpha, space).entries[:m_max + 1, :m_max + 1]
        oracle = u_squeeze_quadrature(alpha, space).entries[:m_max + 1, :m_max + 1]
        rows, cols = np.indices(closed.shape)
        parity_nonzeros = int(np.count_nonzero(closed[(rows + cols) % 2 == 1]))
        residual = float(np.max(np.abs(closed - oracle)))
        if parity_nonzeros:
            residual = math.inf
        params = {'alpha': alpha, 'm_max': m_max}
        return self._report('weyl_oracle', params, residual, extra={'parity_nonzeros': parity_nonzeros})

    def _grown(self, alpha: float, space: FockSpace, leak_tol: float = None, min_interior: int = None):
        leak_tol = self.leak_tolerance if leak_tol is None else leak_tol
        min_interior = self.min_interior if min_interior is None else min_interior
        return grow_truncation(alpha, space, leak_tol, min_interior, self.max_dim)

    def check_unitarity(self, alpha: float, space: FockSpace) -> VerificationReport:
        params = {'alpha': alpha, 'N': space.dim}
        space, size = self._grown(alpha, space)
        block = u_squeeze_closed(alpha, space)
        return self._report('weyl_unitarity', params, block.unitarity_residual(size),
                            extra={'interior': size, 'N_used': space.dim})

    def check_homomorphism(self, g1: GroupElement, g2: GroupElement, space: FockSpace) -> VerificationReport:
        params = {'g1': g1.to_json(), 'g2': g2.to_json(), 'N': space.dim}
        alpha = max(cartan_decompose(g1).alpha, cartan_decompose(g2).alpha)
        space, _ = self._grown(alpha, space)
        result = homomorphism_residual(g1, g2, space, self.leak_tolerance)
        return self._report('weyl_homomorphism', params, result.residual,
                            extra={'phase': result.phase, 'interior': result.interior,
                                   'margin_heuristic': result.margin_heuristic, 'N_used': space.dim})

    def check_intertwining(self, g: GroupElement, space: FockSpace) -> VerificationReport:
        """
        Asserts the best of U z U^-1, U^-1 z U against g z and g^T z; the
        residual against g z alone and the winning combination are reported.
        """
        params = {'g': g.to_json(), 'N': space.dim}
        space, _ = self._grown(cartan_decompose(g).alpha, space, min_interior=self.min_interior + 1)
        result = intertwining_residual(g, space, self.leak_tolerance)
        best = min(result.residuals, key=result.residuals.get) if result.residuals else None
        residual = result.residuals[best] if best else float('nan')
        return self._report('weyl_intertwining', params, residual,
                            extra={'best': best, 'gz_residual': result.residual,
                                   'gz_orientation': result.orientation, 'residuals': result.residuals,
                                   'interior': result.interior, 'N_used': space.dim})

    def check_scaling(self, alpha: float, m: int, space: FockSpace) -> VerificationReport:
        """
        Column m enters the sum over all n < N, so the truncation grows until
        the squared norm it loses past N is below (tolerance / 10)^2.
        """
        params = {'alpha': alpha, 'm': m, 'N': space.dim}
        leak_tol = min(self.leak_tolerance, (0.1 * self.tolerance_for('weyl_scaling')) ** 2)
        space, size = self._grown(alpha, space, leak_tol, m + 1)
        points = np.linspace(-3.0, 3.0, 10)
        residual = scaling_check(alpha, m, points, space)
        return self._report('weyl_scaling', params, residual, extra={'interior': size, 'N_used': space.dim})
