import cmath
import math
import logging
from collections import deque
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
from scipy.special import gamma

from algebra.fock_operator import FockSpace, trace_inner_product
from errors import ConvergenceError, DomainError
from group.su11_group import GroupElement, cartan_decompose
from irrep.irrep_basis import (
    IrrepLabel,
    KRange,
    SeriesKind,
    boundary_operators,
    classify,
    d_operator,
    f_values,
    gamma_prefactor,
    reduced_index,
    remove_boundary,
)
from repmat.matrix_elements import t_element
from specfun.hypergeometric import (
    CompensatedSum,
    hyp2f1,
    hyp2f1_terminating,
    iter_terminating_sequence,
    nonpositive_integer,
    terminating_series,
)
from specfun.kernels import is_exact, legendre_p
from verify.report import VerificationReport
from weyl.metaplectic_rep import grow_truncation, u_of_g

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SERIES_WINDOW = 8


class IdentityVerifier:
    """
    Checks of the addition theorems, their sandwiched forms, the generating
    function and regulated orthogonality, and the Legendre and unity identities
    """

    def __init__(self, config: Dict = None):
        self.config = config or {}
        self.tolerance = self.config.get('tolerance', 1e-9)
        self.tolerances = self.config.get('tolerances', {})
        self.leak_tolerance = self.config.get('leak_tolerance', 1e-10)
        self.min_interior = self.config.get('min_interior', 8)
        self.max_dim = self.config.get('max_dim', 128)
        self.series_rel = self.config.get('series_rel', 1e-14)
        self.series_floor = self.config.get('series_floor', 1e-15)
        self.series_cap = self.config.get('series_cap', 200_000)
        self.f_convention = self.config.get('f_convention', 'series')
        self.phase_convention = self.config.get('phase_convention', 'asymmetric')
        self.sandwich_c_order = self.config.get('sandwich_c_order', 'nk')
        self._d_cache: Dict[Tuple, Optional[np.ndarray]] = {}
        self._space_cache: Dict[Tuple, Tuple[FockSpace, int]] = {}
        self._u_cache: Dict[Tuple, np.ndarray] = {}
        self._expansion_cache: Dict[Tuple, np.ndarray] = {}

    def tolerance_for(self, identity_id: str) -> float:
        return float(self.tolerances.get(identity_id, self.tolerance))

    # -- shared pieces -----------------------------------------------------

    def _space_for(self, g: GroupElement, space: FockSpace) -> Tuple[FockSpace, int]:
        """Enlarge the truncation until the measured interior block holds min_interior rows"""
        alpha = cartan_decompose(g).alpha
        key = (round(alpha, 15), space.dim)
        if key in self._space_cache:
            return self._space_cache[key]
        self._space_cache[key] = grow_truncation(alpha, space, self.leak_tolerance,
                                                 self.min_interior, self.max_dim)
        return self._space_cache[key]

    def _d_dense(self, label: IrrepLabel, k: int, space: FockSpace) -> Optional[np.ndarray]:
        key = (label, k, space.dim, self.f_convention)
        if key not in self._d_cache:
            try:
                self._d_cache[key] = d_operator(label, k, space, self.f_convention).op.to_dense()
            except DomainError as e:
                logger.debug(f"D_{k} unavailable for {label} at N={space.dim}: {e}")
                self._d_cache[key] = None
        return self._d_cache[key]

    def _require_d(self, label: IrrepLabel, k: int, space: FockSpace) -> np.ndarray:
        d_k = self._d_dense(label, k, space)
        if d_k is None:
            raise DomainError(f"D_{k} cannot be built for {label} at N={space.dim}")
        return d_k

    def _u(self, g: GroupElement, space: FockSpace) -> np.ndarray:
        key = (g.a, g.b, space.dim)
        if key not in self._u_cache:
            self._u_cache[key] = u_of_g(g, space).entries
        return self._u_cache[key]

    @staticmethod
    def _subspace(label: IrrepLabel, k: int) -> KRange:
        for k_range in classify(label).k_ranges:
            if k in k_range:
                return k_range
        raise DomainError(f"k={k} lies outside every invariant subspace of {label}")

    def _window(self, label: IrrepLabel, k: int, width: int) -> List[int]:
        """Indices n of the subspace of k with |2(n + eps)| < width"""
        k_range = self._subspace(label, k)
        eps = float(label.epsilon)
        bound = int(math.ceil(width / 2.0)) + 1
        return [n for n in range(-bound, bound + 1)
                if n in k_range and abs(2 * (n + eps)) < width]

    def _t(self, label: IrrepLabel, n: int, k: int, g: GroupElement) -> complex:
        return t_element(label, n, k, cartan_decompose(g), self.phase_convention)

    def _expansion(self, label: IrrepLabel, k: int, g: GroupElement, space: FockSpace,
                   order: str = 'nk') -> np.ndarray:
        """sum_n t_nk(g) D_n (or t_kn with order='kn') over all n that fit the truncation"""
        key = (label, k, g.a, g.b, space.dim, order)
        if key in self._expansion_cache:
            return self._expansion_cache[key]
        total = np.zeros((space.dim, space.dim), dtype=complex)
        for n in self._window(label, k, space.dim):
            d_n = self._d_dense(label, n, space)
            if d_n is None:
                continue
            coefficient = self._t(label, n, k, g) if order == 'nk' else self._t(label, k, n, g)
            total += coefficient * d_n
        self._expansion_cache[key] = total
        return total

    @staticmethod
    def _label_params(label: IrrepLabel, k: int, g: GroupElement, space: FockSpace) -> Dict:
        return {**label.to_json(), 'k': k, 'g': g.to_json(), 'N': space.dim}

    @staticmethod
    def _relative(difference: complex, reference: float) -> float:
        return float(abs(difference) / max(1.0, reference))

    # -- addition theorem and sandwiches -----------------------------------

    def check_addition(self, label: IrrepLabel, k: int, g: GroupElement,
                       space: FockSpace) -> VerificationReport:
        """
        U(g) D_k U*(g) = sum_n t_nk(g) D_n over the subspace containing k,
        compared on the measured interior block.

        Each entry (l, s) of the right side receives the single n with
        l - s = 2(n + eps), so the n-window |2(n + eps)| < interior is
        complete inside the block and the tail estimate is zero there.

        For the discrete pair the subspace is invariant only up to the
        boundary operators reached through 0 * pole at its edge. Their
        component is projected out of the difference and reported under
        'boundary'; the residual is what remains.
        """
        identity_id = 'addition'
        params = self._label_params(label, k, g, space)
        space, size = self._space_for(g, space)
        params['N_used'] = space.dim
        difference, rhs, window = self.addition_difference(label, k, g, space, size)
        kind = classify(label).kind
        boundary: Dict[int, complex] = {}
        if kind == SeriesKind.DISCRETE_PAIR and size:
            blocks = {j: op.to_dense()[:size, :size]
                      for j, op in boundary_operators(label, space, self.f_convention).items()}
            difference, boundary = remove_boundary(difference, blocks)
        scale = float(np.max(np.abs(rhs))) if size else 0.0
        residual = float(np.max(np.abs(difference))) / max(1.0, scale) if size else float('nan')
        edges = [n for n in (min(window, default=None), max(window, default=None)) if n is not None]
        edge_coefficient = max((abs(self._t(label, n, k, g)) for n in edges), default=0.0)
        return VerificationReport(
            identity_id, params, residual, self.tolerance_for(identity_id),
            tail_estimate=0.0,
            message=f"interior {size}/{space.dim}, {len(window)} terms",
            extra={'interior': size, 'window': [min(window, default=0), max(window, default=0)],
                   'edge_coefficient': edge_coefficient, 'kind': kind.value,
                   'boundary': {str(j): c for j, c in boundary.items()}},
        )

    def addition_difference(self, label: IrrepLabel, k: int, g: GroupElement, space: FockSpace,
                            size: int) -> Tuple[np.ndarray, np.ndarray, List[int]]:
        """
        U D_k U* - sum_n t_nk D_n on the leading size x size block at this
        truncation, with the right side and the n-window
        """
        d_k = self._require_d(label, k, space)
        u = self._u(g, space)
        lhs = (u @ d_k @ u.conj().T)[:size, :size]
        rhs = np.zeros((size, size), dtype=complex)
        window = self._window(label, k, size)
        for n in window:
            d_n = self._d_dense(label, n, space)
            if d_n is not None:
                rhs += self._t(label, n, k, g) * d_n[:size, :size]
        return lhs - rhs, rhs, window

    def _check_entry(self, space_size: int, l: int, s: int):
        if not (0 <= l < space_size and 0 <= s < space_size):
            raise DomainError(f"Entry ({l}, {s}) lies outside the interior block of size {space_size}")

    def check_sandwich_a(self, label: IrrepLabel, k: int, g: GroupElement, l: int, s: int,
                         space: FockSpace) -> VerificationReport:
        """sum_{m,t} U_lm conj(U_st) (D_k)_mt = sum_n t_nk (D_n)_ls"""
        identity_id = 'sandwich_a'
        params = dict(self._label_params(label, k, g, space), l=l, s=s)
        space, size = self._space_for(g, space)
        self._check_entry(size, l, s)
        d_k = self._require_d(label, k, space)
        u = self._u(g, space)
        lhs = complex(u[l, :] @ d_k @ u[s, :].conj())
        rhs = 0j
        n_twice = l - s - 2 * float(label.epsilon)
        if float(n_twice).is_integer() and int(n_twice) % 2 == 0:
            n = int(n_twice) // 2
            if n in self._subspace(label, k):
                d_n = self._d_dense(label, n, space)
                if d_n is not None:
                    rhs = self._t(label, n, k, g) * d_n[l, s]
        residual = self._relative(lhs - rhs, abs(rhs))
        return VerificationReport(identity_id, params, residual, self.tolerance_for(identity_id),
                                  extra={'lhs': lhs, 'rhs': rhs, 'N_used': space.dim})

    def check_sandwich_b(self, label: IrrepLabel, k: int, g: GroupElement, l: int, s: int,
                         space: FockSpace) -> VerificationReport:
        """sum_m U_lm (D_k)_ms = sum_m sum_n t_nk (D_n)_lm U_ms"""
        identity_id = 'sandwich_b'
        params = dict(self._label_params(label, k, g, space), l=l, s=s)
        space, size = self._space_for(g, space)
        self._check_entry(size, l, s)
        d_k = self._require_d(label, k, space)
        u = self._u(g, space)
        lhs = complex(u[l, :] @ d_k[:, s])
        expansion_row = self._expansion(label, k, g, space)[l, :]
        rhs = complex(expansion_row @ u[:, s])
        residual = self._relative(lhs - rhs, abs(rhs))
        return VerificationReport(identity_id, params, residual, self.tolerance_for(identity_id),
                                  extra={'lhs': lhs, 'rhs': rhs, 'N_used': space.dim})

    def check_sandwich_c(self, label: IrrepLabel, k: int, g: GroupElement, l: int, s: int,
                         space: FockSpace) -> VerificationReport:
        """
        (D_k)_ls = sum_{m,t} conj(U_ml) U_ts sum_n t (D_n)_mt with t = t_nk,
        the form that follows from the addition theorem. The transposed index
        order t_kn is evaluated as well and reported.

        The double sum runs over every m, t of the truncation, where the
        expansion grows while U decays, so it is evaluated at N and at 2N
        (up to max_dim). The larger one is used and the difference is the
        tail estimate.
        """
        identity_id = 'sandwich_c'
        params = dict(self._label_params(label, k, g, space), l=l, s=s)
        space, size = self._space_for(g, space)
        self._check_entry(size, l, s)
        lhs = complex(self._require_d(label, k, space)[l, s])
        wide = FockSpace(max(space.dim, min(2 * space.dim, self.max_dim)))
        residuals, tails = {}, {}
        for order in ('nk', 'kn'):
            values = [self._contract_c(label, k, g, l, s, truncation, order)
                      for truncation in (space, wide)]
            residuals[order] = self._relative(lhs - values[-1], abs(lhs))
            tails[order] = abs(values[-1] - values[0]) if wide.dim > space.dim else float('nan')
        chosen = self.sandwich_c_order
        other = 'kn' if chosen == 'nk' else 'nk'
        return VerificationReport(
            identity_id, params, residuals[chosen], self.tolerance_for(identity_id),
            tail_estimate=tails[chosen],
            extra={'order': chosen, f'order_{other}_residual': residuals[other],
                   'N_used': wide.dim, 'N_compared': space.dim},
        )

    def _contract_c(self, label: IrrepLabel, k: int, g: GroupElement, l: int, s: int,
                    space: FockSpace, order: str) -> complex:
        u = self._u(g, space)
        expansion = self._expansion(label, k, g, space, order)
        return complex(u[:, l].conj() @ expansion @ u[:, s])

    # -- series identities -------------------------------------------------

    def _adaptive_sum(self, terms: Iterator, ratio: float, exact: bool = False) -> Tuple[complex, int, float]:
        """
        Sum terms whose magnitudes are bounded by a polynomial times ratio^n.
        Stops once max(last window) * ratio / (1 - ratio) falls below
        series_rel * |sum| or series_floor.
        """
        acc = CompensatedSum()
        exact_total = Fraction(0)
        recent = deque(maxlen=SERIES_WINDOW)
        tail = math.inf
        count = 0
        for term in terms:
            if exact:
                exact_total += term
            else:
                acc.add(complex(term))
            count += 1
            recent.append(abs(complex(term)))
            if ratio == 0.0:
                return (exact_total if exact else acc.value), count, 0.0
            if count >= SERIES_WINDOW:
                tail = max(recent) * ratio / (1.0 - ratio)
                total = abs(complex(exact_total)) if exact else abs(acc.running)
                if tail <= max(self.series_rel * total, self.series_floor):
                    return (exact_total if exact else acc.value), count, tail
            if count >= self.series_cap:
                break
        partial = exact_total if exact else acc.value
        raise ConvergenceError(f"Series did not converge in {count} terms", partial=partial,
                               tail_estimate=tail)

    def _genfun_terms(self, a, b, lam, s, exact: bool) -> Iterator:
        """Gamma(n+lam)/(n! Gamma(lam)) s^n F(-n, a; lam; 2) F(-n, b; lam; 2)"""
        fa = iter_terminating_sequence(a, lam, 2, exact=exact)
        fb = iter_terminating_sequence(b, lam, 2, exact=exact)
        coefficient = Fraction(1) if exact else 1.0 + 0j
        power = Fraction(1) if exact else 1.0
        n = 0
        for va, vb in zip(fa, fb):
            yield coefficient * power * va * vb
            coefficient = coefficient * (lam + n) / (n + 1)
            power = power * s
            n += 1

    def _genfun_rhs(self, a, b, lam, s, exact: bool) -> complex:
        """(1-s)^{a+b-lam} (1+s)^{-a-b} F(a, b; lam; 4s/(1+s)^2)"""
        x = 4 * s / (1 + s) ** 2
        if exact:
            first = a + b - lam
            if Fraction(first).denominator == 1 and Fraction(a + b).denominator == 1:
                prefactor = (1 - s) ** int(first) * (1 + s) ** int(-(a + b))
                for p, q in ((a, b), (b, a)):
                    n = nonpositive_integer(p)
                    if n is not None:
                        return terminating_series(n, q, lam, x, exact=True).value * prefactor
                return complex(prefactor) * hyp2f1(a, b, lam, float(x))
        a, b, lam, s = complex(a), complex(b), complex(lam), float(s)
        prefactor = cmath.exp((a + b - lam) * math.log1p(-s) - (a + b) * math.log1p(s))
        return prefactor * hyp2f1(a, b, lam, float(x))

    def _genfun(self, a, b, lam, s) -> Tuple[complex, complex, int, float, bool]:
        if not 0 <= s < 1:
            raise DomainError(f"Generating function needs 0 <= s < 1, got {s}")
        if nonpositive_integer(lam) is not None:
            raise DomainError(f"lambda must not be a nonpositive integer, got {lam}")
        exact = is_exact(a, b, lam, s)
        lhs, terms, tail = self._adaptive_sum(self._genfun_terms(a, b, lam, s, exact), float(s), exact)
        rhs = self._genfun_rhs(a, b, lam, s, exact)
        return complex(lhs), complex(rhs), terms, tail, exact

    def check_generating_function(self, a, b, lam, s) -> VerificationReport:
        identity_id = 'generating_function'
        params = {'a': complex(a), 'b': complex(b), 'lambda': complex(lam), 's': float(s)}
        lhs, rhs, terms, tail, exact = self._genfun(a, b, lam, s)
        difference = abs(lhs - rhs)
        return VerificationReport(
            identity_id, params, difference, self.tolerance_for(identity_id), tail_estimate=tail,
            message=f"{terms} terms",
            extra={'relative': difference / max(1.0, abs(rhs)), 'exact': exact, 'terms': terms},
        )

    def check_orthogonality_structural(self, label1: IrrepLabel, label2: IrrepLabel, k: int, m: int,
                                       space: FockSpace) -> VerificationReport:
        """(D_k, D'_m) = tr(D_k^dagger D'_m) vanishes identically when the shifts differ"""
        identity_id = 'orthogonality_structural'
        params = {'label1': label1.to_json(), 'label2': label2.to_json(), 'k': k, 'm': m, 'N': space.dim}
        first = d_operator(label1, k, space, self.f_convention).as_operator()
        second = d_operator(label2, m, space, self.f_convention).as_operator()
        value = trace_inner_product(first, second)
        same_shift = first.shifts == second.shifts
        residual = 0.0 if same_shift else abs(value)
        return VerificationReport(identity_id, params, residual, 0.0,
                                  message="same shift, not structural" if same_shift else "",
                                  extra={'inner_product': value, 'same_shift': same_shift})

    def check_orthogonality_regulated(self, label1: IrrepLabel, label2: IrrepLabel, k: int, s: float,
                                      mu: float = 0.0) -> VerificationReport:
        """
        sum_n s^n (n+2k')!/n! conj(f_k(n)) f'_k(n)
          = 4^{k'} conj(G) G' Gamma(lam) (1-s)^{a+b-lam} (1+s)^{-a-b} F(a, b; lam; 4s/(1+s)^2)
        with G = Gamma(1+tau+k')/Gamma(1+2k'), a = 1 + conj(tau) + k', b = 1 + tau' + k',
        lam = 1 + 2k' + mu. For mu > 0 the f are replaced by F(-n, .; lam; 2).
        The unconjugated pairing a = 1 + tau + k' is reported alongside.
        """
        identity_id = 'orthogonality_regulated'
        if label1.epsilon != label2.epsilon:
            raise DomainError("Regulated orthogonality pairs labels with equal epsilon")
        params = {'label1': label1.to_json(), 'label2': label2.to_json(), 'k': k, 's': s, 'mu': mu}
        kprime = reduced_index(label1, k)
        kp = float(kprime)
        lam = 1 + 2 * kp + mu
        tau1, tau2 = complex(label1.tau), complex(label2.tau)
        norm = 4.0 ** kp * gamma_prefactor(label1, kprime).conjugate() * gamma_prefactor(label2, kprime)
        norm *= complex(gamma(lam))
        if mu == 0.0:
            lhs, terms, tail = self._adaptive_sum(self._ortho_terms(label1, label2, k, s), float(s))
        else:
            a, b = 1 + tau1.conjugate() + kp, 1 + tau2 + kp
            series, terms, tail = self._adaptive_sum(self._genfun_terms(a, b, lam, s, False), float(s))
            lhs = norm * series
        pairings = {
            'conjugated': (1 + tau1.conjugate() + kp, 1 + tau2 + kp),
            'plain': (1 + tau1 + kp, 1 + tau2 + kp),
        }
        residuals = {}
        for name, (a, b) in pairings.items():
            rhs = norm * self._genfun_rhs(a, b, lam, s, False)
            residuals[name] = abs(lhs - rhs) / max(1.0, abs(rhs))
        trend = [[t, abs(norm * self._genfun_rhs(*pairings['conjugated'], lam, t, False))]
                 for t in self.config.get('ortho_trend_s', [0.5, 0.7, 0.9])]
        return VerificationReport(
            identity_id, params, residuals['conjugated'], self.tolerance_for(identity_id),
            tail_estimate=tail, message=f"{terms} terms",
            extra={'plain_pairing_residual': residuals['plain'], 'trend': trend, 'terms': terms},
        )

    def _ortho_terms(self, label1: IrrepLabel, label2: IrrepLabel, k: int, s: float) -> Iterator:
        kprime = reduced_index(label1, k)
        kp = float(kprime)
        p1 = complex(f_values(label1, k, 0, self.f_convention)[0])
        p2 = complex(f_values(label2, k, 0, self.f_convention)[0])
        f1 = iter_terminating_sequence(1 + complex(label1.tau) + kp, 1 + 2 * kp, 2, exact=False)
        f2 = iter_terminating_sequence(1 + complex(label2.tau) + kp, 1 + 2 * kp, 2, exact=False)
        weight = complex(gamma(1 + 2 * kp))
        power = 1.0
        n = 0
        for v1, v2 in zip(f1, f2):
            yield power * weight * (p1 * v1).conjugate() * (p2 * v2)
            weight = weight * (n + 1 + 2 * kp) / (n + 1)
            power *= s
            n += 1

    # -- closing identities ------------------------------------------------

    def _legendre_terms(self, tau: int, alpha: float) -> Iterator:
        th2 = math.tanh(0.5 * alpha) ** 2
        hyp = iter_terminating_sequence(1 + tau, 1, 2, exact=False)
        coefficient = math.sqrt(math.pi)
        power = 1.0
        n = 0
        while True:
            even = next(hyp)
            yield coefficient * power * even
            next(hyp)
            coefficient *= (n + 0.5) / (n + 1)
            power *= th2
            n += 1

    def check_legendre_identity(self, tau: int, alpha: float) -> VerificationReport:
        """
        P_tau(cosh a) = 1/(sqrt(pi) cosh(a/2)) sum_n Gamma(n+1/2)/n! tanh^{2n}(a/2) F(-2n, 1+tau; 1; 2)

        The variant with F(-2n, 1+tau; 1+n; -sinh^2(a/2)) is summed over the
        same number of terms and reported as printed_residual.
        """
        identity_id = 'legendre'
        if alpha < 0 or tau < 0:
            raise DomainError(f"Legendre identity needs tau >= 0 and alpha >= 0, got {tau}, {alpha}")
        params = {'tau': tau, 'alpha': alpha}
        th2 = math.tanh(0.5 * alpha) ** 2
        c = math.cosh(0.5 * alpha)
        series, terms, tail = self._adaptive_sum(self._legendre_terms(tau, alpha), th2)
        value = series.real / (math.sqrt(math.pi) * c)
        expected = legendre_p(tau, math.cosh(alpha))
        printed = self._legendre_printed(tau, alpha, terms)
        return VerificationReport(
            identity_id, params, abs(value - expected), self.tolerance_for(identity_id),
            tail_estimate=tail / (math.sqrt(math.pi) * c), message=f"{terms} terms",
            extra={'value': value, 'legendre': expected, 'terms': terms,
                   'printed_residual': abs(printed - expected)},
        )

    @staticmethod
    def _legendre_printed(tau: int, alpha: float, terms: int) -> float:
        th2 = math.tanh(0.5 * alpha) ** 2
        x = -math.sinh(0.5 * alpha) ** 2
        total = CompensatedSum()
        coefficient, power = math.sqrt(math.pi), 1.0
        for n in range(terms):
            total.add(coefficient * power * complex(hyp2f1_terminating(2 * n, 1 + tau, 1 + n, x, exact=False)))
            coefficient *= (n + 0.5) / (n + 1)
            power *= th2
        return total.value.real / (math.sqrt(math.pi) * math.cosh(0.5 * alpha))

    def check_unity_identity(self, tau: int, alpha: float) -> VerificationReport:
        """
        sum_{n=0}^{tau} (-1)^n (tau+n)! / ((n!)^2 (tau-n)!) tanh^{2n}(a/2) F(-tau, 1+tau; 1+n; -sinh^2(a/2)) = 1

        Coefficient fixed by expanding both sides in x = sinh^2(a/2), see
        docs/unity_sign_derivation.md. The printed reading (-1)^{n!} is reported.
        """
        identity_id = 'unity'
        if alpha < 0 or tau < 0:
            raise DomainError(f"Unity identity needs tau >= 0 and alpha >= 0, got {tau}, {alpha}")
        params = {'tau': tau, 'alpha': alpha}
        th2 = math.tanh(0.5 * alpha) ** 2
        x = -math.sinh(0.5 * alpha) ** 2
        derived, printed = 0.0, 0.0
        for n in range(tau + 1):
            magnitude = (math.factorial(tau + n)
                         / (math.factorial(n) ** 2 * math.factorial(tau - n)))
            hyp = complex(hyp2f1_terminating(tau, 1 + tau, 1 + n, x, exact=False)).real
            term = magnitude * th2 ** n * hyp
            derived += (-1) ** n * term
            printed += (-1) ** math.factorial(n) * term
        return VerificationReport(
            identity_id, params, abs(derived - 1.0), self.tolerance_for(identity_id),
            extra={'value': derived, 'printed_sign_residual': abs(printed - 1.0)},
        )
