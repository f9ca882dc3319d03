import logging
import time
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from algebra.fock_operator import FockSpace
from errors import PoleError, SU11Error
from group.su11_group import CartanAngles, GroupElement, cartan_compose, h_element, k_element, random_element
from irrep.irrep_basis import IrrepLabel, SeriesKind, classify, reduced_index
from verify.identity_verifier import IdentityVerifier
from verify.report import VerificationReport, failed_report, sort_reports
from verify.structure_checks import StructureVerifier

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)

SUITES = ('addition', 'sandwich', 'ortho', 'genfun', 'legendre', 'unity', 'algebra', 'weyl')

# Grids sized so `verify all` stays a desk-scale run at N = 32
DEFAULT_GRIDS: Dict[str, Dict] = {
    'addition': {
        'labels': [(1, 0), (2, 0), (HALF, HALF), (complex(-0.5, 1.0), 0), (-1, 0)],
        'k': [-1, 0, 1],
        'count': 20,
        'alpha_max': 1.0,
    },
    'sandwich': {
        'labels': [(1, 0), (2, 0), (complex(-0.5, 1.0), 0)],
        'k': [0, 1],
        'count': 2,
        'points': 10,
        'alpha_max': 1.0,
    },
    'ortho': {
        'labels': [(1, 0), (2, 0), (HALF, HALF), (complex(-0.5, 1.0), 0), (complex(-0.5, 2.0), HALF)],
        'k': [-2, -1, 0, 1, 2],
        'pairs': [(complex(-0.5, 1.0), complex(-0.5, 2.0), 0)],
        's': [0.5, 0.7, 0.9],
        'mu': [0.0, 0.25],
    },
    'genfun': {
        'exact': [(-1, 2, 3, Fraction(2, 5)), (0, 0, 1, Fraction(1, 2)), (-2, Fraction(1, 2), 2, Fraction(1, 4)),
                  (1, 1, 2, Fraction(1, 3)), (Fraction(3, 2), -1, Fraction(5, 2), Fraction(3, 5))],
        'count': 35,
        's_max': 0.6,
        'ortho_labels': [complex(-0.5, 1.0), complex(-0.5, 2.0), complex(-0.5, 0.5)],
        'ortho_s': [0.3, 0.6, 0.9],
    },
    'legendre': {'tau': [0, 1, 2, 3], 'alpha': [0.25, 0.5, 1.0, 2.0]},
    'unity': {'tau': [0, 1, 2, 3], 'alpha': [0.0, 0.3, 1.0, 2.0]},
    'algebra': {
        'recurrence_tau': [-1, -HALF, 0, HALF, 1, 2],
        'recurrence_k': list(range(-4, 5)),
        'recurrence_n': 10,
        'labels': [(complex(-0.5, 1.0), 0), (complex(-0.5, 1.0), HALF), (-1, 0), (-1, HALF),
                   (0, 0), (1, 0), (2, 0), (HALF, HALF), (Fraction(3, 2), HALF)],
        'k_max': 6,
        'zeta_max': 6,
        'seeds': [0, 1, 2, 3, 4],
        'chu_vandermonde': [(4, 3, 2), (6, HALF, Fraction(5, 2)), (5, complex(1.0, 2.0), complex(0.5, -1.0))],
        'group_law_count': 10,
        'principal': [(complex(-0.5, 1.0), 0), (complex(-0.5, 0.5), HALF)],
        'principal_half_width': 16,
        'principal_alpha': [0.25, 0.5],
    },
    'weyl': {
        'oracle_alpha': [0.3, 1.0, 2.0],
        'oracle_m_max': 20,
        'unitarity_alpha': [0.25, 0.5, 1.0, 1.5, 2.0],
        'pairs': 100,
        'alpha_max': 1.0,
        'intertwining_count': 20,
        'scaling_alpha': [0.3, 1.0],
        'scaling_m': [0, 1, 2, 3, 4, 5],
    },
}


def as_label(entry) -> IrrepLabel:
    if isinstance(entry, IrrepLabel):
        return entry
    tau, eps = entry
    return IrrepLabel(tau, eps)


class SuiteRunner:
    """Runs verification suites over their parameter grids and collects sorted reports"""

    def __init__(self, config: Dict = None):
        self.config = config or {}
        self.dim = self.config.get('dim', 32)
        self.seed = self.config.get('seed', 0)
        self.grids = self.config.get('grids', {})
        self.identities = IdentityVerifier(self.config.get('verifier', {}))
        self.structure = StructureVerifier(self.config.get('verifier', {}))
        self.durations: Dict[str, float] = {}
        self.skipped = 0

    def grid(self, suite: str) -> Dict:
        return {**DEFAULT_GRIDS.get(suite, {}), **self.grids.get(suite, {})}

    @property
    def space(self) -> FockSpace:
        return FockSpace(self.dim)

    def _rng(self, suite: str) -> np.random.Generator:
        # Each suite draws from its own stream so suite selection does not shift samples
        return np.random.default_rng([self.seed, SUITES.index(suite)])

    def _group_elements(self, suite: str, grid: Dict) -> List[GroupElement]:
        """
        Explicit Cartan triples from grid['g'], or seeded random elements; unless
        g is 'random' the identity, a pure boost and a pure rotation lead the list.
        """
        chosen = grid.get('g')
        if chosen and chosen != 'random':
            return [cartan_compose(CartanAngles(*triple)) for triple in chosen]
        rng = self._rng(suite)
        randoms = [random_element(rng, grid['alpha_max']) for _ in range(grid['count'])]
        if chosen == 'random':
            return randoms
        return [GroupElement.identity(), h_element(0.5), k_element(0.7)] + randoms

    def _guard(self, identity_id: str, params: Dict, check: Callable[[], VerificationReport],
               tolerance: float, skip_poles: bool = False) -> Optional[VerificationReport]:
        try:
            return check()
        except PoleError as e:
            if skip_poles:
                self.skipped += 1
                logger.debug(f"Skipping {identity_id} {params}: {e}")
                return None
            logger.error(f"{identity_id} {params} failed: {e}")
            return failed_report(identity_id, params, tolerance, str(e))
        except SU11Error as e:
            logger.error(f"{identity_id} {params} failed: {e}")
            return failed_report(identity_id, params, tolerance, str(e))

    def run(self, suite: str) -> List[VerificationReport]:
        """Run one suite, or every suite for 'all'"""
        if suite == 'all':
            reports = []
            for name in SUITES:
                reports.extend(self.run(name))
            return sort_reports(reports)
        if suite not in SUITES:
            raise ValueError(f"Unknown suite '{suite}', expected one of {SUITES + ('all',)}")
        logger.info(f"Running suite '{suite}' at N={self.dim}")
        start = time.perf_counter()
        reports = [r for r in getattr(self, f'_suite_{suite}')(self.grid(suite)) if r is not None]
        self.durations[suite] = time.perf_counter() - start
        failed = sum(1 for r in reports if not r.passed)
        logger.info(f"Suite '{suite}': {len(reports)} checks, {failed} failed "
                    f"in {self.durations[suite]:.1f}s")
        return sort_reports(reports)

    # -- suites ----------------------------------------------------------------

    def _label_ks(self, labels: Iterable, ks: Iterable[int]):
        for entry in labels:
            label = as_label(entry)
            series = classify(label)
            for k in ks:
                if series.contains(k):
                    yield label, k

    def _suite_addition(self, grid: Dict) -> Iterable[Optional[VerificationReport]]:
        tol = self.identities.tolerance_for('addition')
        elements = self._group_elements('addition', grid)
        for label, k in self._label_ks(grid['labels'], grid['k']):
            for g in elements:
                params = {**label.to_json(), 'k': k, 'g': g.to_json()}
                yield self._guard('addition', params,
                                  lambda: self.identities.check_addition(label, k, g, self.space), tol)

    def _suite_sandwich(self, grid: Dict) -> Iterable[Optional[VerificationReport]]:
        rng = self._rng('sandwich')
        elements = self._group_elements('sandwich', grid)
        checks = {
            'sandwich_a': self.identities.check_sandwich_a,
            'sandwich_b': self.identities.check_sandwich_b,
            'sandwich_c': self.identities.check_sandwich_c,
        }
        for label, k in self._label_ks(grid['labels'], grid['k']):
            for g in elements:
                for _ in range(grid['points']):
                    l, s = (int(v) for v in rng.integers(0, 8, size=2))
                    for identity_id, check in checks.items():
                        params = {**label.to_json(), 'k': k, 'g': g.to_json(), 'l': l, 's': s}
                        yield self._guard(identity_id, params,
                                          lambda: check(label, k, g, l, s, self.space),
                                          self.identities.tolerance_for(identity_id))

    def _suite_ortho(self, grid: Dict) -> Iterable[Optional[VerificationReport]]:
        labels = [as_label(entry) for entry in grid['labels']]
        for label1 in labels:
            for label2 in labels:
                for k in grid['k']:
                    for m in grid['k']:
                        if k == m and label1.epsilon == label2.epsilon:
                            continue
                        if not (classify(label1).contains(k) and classify(label2).contains(m)):
                            continue
                        params = {'label1': label1.to_json(), 'label2': label2.to_json(), 'k': k, 'm': m}
                        yield self._guard(
                            'orthogonality_structural', params,
                            lambda: self.identities.check_orthogonality_structural(
                                label1, label2, k, m, self.space), 0.0)
        tol = self.identities.tolerance_for('orthogonality_regulated')
        for tau1, tau2, eps in grid['pairs']:
            label1, label2 = IrrepLabel(tau1, eps), IrrepLabel(tau2, eps)
            for s in grid['s']:
                for mu in grid['mu']:
                    params = {'label1': label1.to_json(), 'label2': label2.to_json(), 'k': 0, 's': s, 'mu': mu}
                    yield self._guard(
                        'orthogonality_regulated', params,
                        lambda: self.identities.check_orthogonality_regulated(label1, label2, 0, s, mu), tol)

    def _suite_genfun(self, grid: Dict) -> Iterable[Optional[VerificationReport]]:
        tol = self.identities.tolerance_for('generating_function')
        rng = self._rng('genfun')
        samples = list(grid['exact'])
        for _ in range(grid['count']):
            a = complex(rng.uniform(-2.0, 3.0), rng.uniform(-1.0, 1.0))
            b = complex(rng.uniform(-2.0, 3.0), rng.uniform(-1.0, 1.0))
            samples.append((a, b, float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.0, grid['s_max']))))
        # Orthogonality substitution a = 1 + conj(tau) + k', b = 1 + tau' + k', lambda = 1 + 2k'
        taus = grid['ortho_labels']
        for tau1, tau2 in zip(taus, taus[1:] + taus[:1]):
            kprime = float(reduced_index(IrrepLabel(tau1, 0), 0))
            for s in grid['ortho_s']:
                samples.append((1 + complex(tau1).conjugate() + kprime, 1 + complex(tau2) + kprime,
                                1 + 2 * kprime, s))
        for a, b, lam, s in samples:
            params = {'a': complex(a), 'b': complex(b), 'lambda': complex(lam), 's': float(s)}
            yield self._guard('generating_function', params,
                              lambda: self.identities.check_generating_function(a, b, lam, s), tol)

    def _suite_legendre(self, grid: Dict) -> Iterable[Optional[VerificationReport]]:
        tol = self.identities.tolerance_for('legendre')
        for tau in grid['tau']:
            for alpha in grid['alpha']:
                yield self._guard('legendre', {'tau': tau, 'alpha': alpha},
                                  lambda: self.identities.check_legendre_identity(tau, alpha), tol)

    def _suite_unity(self, grid: Dict) -> Iterable[Optional[VerificationReport]]:
        tol = self.identities.tolerance_for('unity')
        for tau in grid['tau']:
            for alpha in grid['alpha']:
                yield self._guard('unity', {'tau': tau, 'alpha': alpha},
                                  lambda: self.identities.check_unity_identity(tau, alpha), tol)

    def _suite_algebra(self, grid: Dict) -> Iterable[Optional[VerificationReport]]:
        sv = self.structure
        space = self.space
        for tau in grid['recurrence_tau']:
            for eps in (0, HALF):
                label = IrrepLabel(tau, eps)
                for k in grid['recurrence_k']:
                    for n in range(grid['recurrence_n'] + 1):
                        params = {**label.to_json(), 'k': k, 'n': n}
                        yield self._guard('c_recurrence', params, lambda: sv.check_recurrence(label, k, n),
                                          0.0, skip_poles=True)

        ks = range(-grid['k_max'], grid['k_max'] + 1)
        for label, k in self._label_ks(grid['labels'], ks):
            params = {**label.to_json(), 'k': k, 'N': space.dim}
            yield self._guard('ladder', params, lambda: sv.check_ladder(label, k, space),
                              sv.tolerance_for('ladder'))
            yield self._guard('d_constructions', params, lambda: sv.check_d_constructions(label, k, space),
                              sv.tolerance_for('d_constructions'))
            for zeta in range(grid['zeta_max'] + 1):
                zparams = {**label.to_json(), 'k': k, 'zeta': zeta}
                yield self._guard('f_series', zparams, lambda: sv.check_f_series(label, k, zeta),
                                  sv.tolerance_for('f_series'), skip_poles=True)

        for index, entry in enumerate(grid['labels']):
            label = as_label(entry)
            kind = classify(label).kind
            if kind != SeriesKind.CONTINUOUS:
                yield self._guard('edge_weights', label.to_json(), lambda: sv.check_weights(label, space),
                                  sv.tolerance_for('edge_weights'))
            if kind == SeriesKind.FINITE:
                rng = np.random.default_rng([self.seed, SUITES.index('algebra'), index])
                for _ in range(grid['group_law_count']):
                    g1, g2 = random_element(rng), random_element(rng)
                    yield self._guard('t_group_law', label.to_json(),
                                      lambda: sv.check_t_group_law(label, g1, g2), sv.tolerance_for('t_group_law'))
                    yield self._guard('t_expm', label.to_json(), lambda: sv.check_t_expm(label, g1),
                                      sv.tolerance_for('t_expm'))

        for entry in grid['principal']:
            label = as_label(entry)
            for alpha in grid['principal_alpha']:
                yield self._guard('principal_unitarity', {**label.to_json(), 'alpha': alpha},
                                  lambda: sv.check_principal_unitarity(label, grid['principal_half_width'], alpha),
                                  sv.tolerance_for('principal_unitarity'))

        for seed in grid['seeds']:
            yield self._guard('lie_algebra', {'seed': seed}, lambda: sv.check_lie_algebra(space, seed),
                              sv.tolerance_for('lie_algebra'))
            yield self._guard('real_structure', {'seed': seed}, lambda: sv.check_real_structure(space, seed),
                              sv.tolerance_for('real_structure'))

        for n, b, c in grid['chu_vandermonde']:
            yield self._guard('chu_vandermonde', {'n': n, 'b': complex(b), 'c': complex(c)},
                              lambda: sv.check_chu_vandermonde(n, b, c), sv.tolerance_for('chu_vandermonde'))

    def _suite_weyl(self, grid: Dict) -> Iterable[Optional[VerificationReport]]:
        sv = self.structure
        space = self.space
        for alpha in grid['oracle_alpha']:
            yield self._guard('weyl_oracle', {'alpha': alpha},
                              lambda: sv.check_weyl_oracle(alpha, space, grid['oracle_m_max']),
                              sv.tolerance_for('weyl_oracle'))
        for alpha in grid['unitarity_alpha']:
            yield self._guard('weyl_unitarity', {'alpha': alpha}, lambda: sv.check_unitarity(alpha, space),
                              sv.tolerance_for('weyl_unitarity'))
        rng = self._rng('weyl')
        for _ in range(grid['pairs']):
            g1, g2 = random_element(rng, grid['alpha_max']), random_element(rng, grid['alpha_max'])
            params = {'g1': g1.to_json(), 'g2': g2.to_json()}
            yield self._guard('weyl_homomorphism', params, lambda: sv.check_homomorphism(g1, g2, space),
                              sv.tolerance_for('weyl_homomorphism'))
        for _ in range(grid['intertwining_count']):
            g = random_element(rng, grid['alpha_max'])
            yield self._guard('weyl_intertwining', {'g': g.to_json()}, lambda: sv.check_intertwining(g, space),
                              sv.tolerance_for('weyl_intertwining'))
        for alpha in grid['scaling_alpha']:
            for m in grid['scaling_m']:
                yield self._guard('weyl_scaling', {'alpha': alpha, 'm': m},
                                  lambda: sv.check_scaling(alpha, m, space), sv.tolerance_for('weyl_scaling'))
