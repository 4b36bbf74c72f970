"""Monte Carlo checks of the closed forms in :mod:`reachged.theory`.

Replication ``r`` of every experiment draws ``(D, E, F)`` from
``(master_seed, stream, r)`` only, so results do not depend on the worker
count or on scheduling. Per-replication values land in index-ordered slots
and are reduced with ``math.fsum``.

The same replication indices are used at every grid point (common random
numbers): raising ``p_D`` only turns spikes into slabs, the slab values stay.
"""
import math
from dataclasses import dataclass

import numpy as np

from reachged import theory
from reachged._parallel import parallel_map
from reachged.ensemble import sample_instance
from reachged.linalg import matmul
from reachged.metrics import ged_between, squared_error


@dataclass(frozen=True)
class EstimateWithError:
    mean: float
    std_error: float
    replications: int
    seed: int

    @classmethod
    def from_samples(cls, samples, seed):
        n = len(samples)
        if n < 2:
            raise ValueError("need at least two replications")
        values = [float(x) for x in samples]
        mean = math.fsum(values) / n
        var = math.fsum((x - mean) ** 2 for x in values) / (n - 1)
        return cls(mean, math.sqrt(var / n), n, seed)

    def z(self, target):
        if self.std_error == 0.0:
            return 0.0 if self.mean == target else math.copysign(math.inf, self.mean - target)
        return (self.mean - target) / self.std_error


@dataclass(frozen=True)
class RiskResult:
    empirical: EstimateWithError
    theoretical: float
    energy_bias_theoretical: float

    @property
    def z_score(self):
        return self.empirical.z(self.theoretical)

    @property
    def energy_bias_z_score(self):
        return self.empirical.z(self.energy_bias_theoretical)


def run_risk_experiment(params, replications, master_seed, workers=None):
    """Empirical ``E ||DE - F||_F^2`` against the exact moment (and the energy-bias variant)."""
    if replications < 30:
        raise ValueError("risk experiment needs at least 30 replications")

    def one(r):
        D, E, F = sample_instance(params, master_seed, r)
        return squared_error(matmul(D, E), F)

    samples = parallel_map(one, replications, workers)
    return RiskResult(
        empirical=EstimateWithError.from_samples(samples, master_seed),
        theoretical=theory.expected_frobenius_risk(params),
        energy_bias_theoretical=theory.energy_bias_frobenius_risk(params),
    )


@dataclass(frozen=True)
class ReachResult:
    empirical_q: EstimateWithError
    surrogate_q: float
    atom_at_zero: float
    atom_at_zero_exact: float

    @property
    def gap(self):
        return self.empirical_q.mean - self.surrogate_q


def run_reach_experiment(params, p_D, p_E, tau, replications, master_seed, workers=None):
    """Fraction of two-hop entries with ``|A| >= tau`` versus ``2 Q(tau / sigma_A)``.

    Also reports the empirical and exact mass of exact zeros in ``A``, the
    part of the law the Gaussian surrogate cannot see.
    """
    point = params.with_point(p_D, p_E)
    cells = params.K * params.L
    if replications < 2 or replications * cells < 100_000:
        raise ValueError("reach experiment needs replications * K * L >= 1e5")

    def one(r):
        D, E, _ = sample_instance(point, master_seed, r)
        A = matmul(D, E)
        return (np.count_nonzero(np.abs(A) >= tau) / cells, np.count_nonzero(A == 0.0))

    rows = parallel_map(one, replications, workers)
    zeros = sum(z for _, z in rows)
    return ReachResult(
        empirical_q=EstimateWithError.from_samples([q for q, _ in rows], master_seed),
        surrogate_q=theory.reach_probability_surrogate(params, p_D, p_E, tau),
        atom_at_zero=zeros / (replications * cells),
        atom_at_zero_exact=(1.0 - p_D * p_E) ** params.N,
    )


@dataclass(frozen=True)
class GedResult:
    empirical_ged: EstimateWithError
    empirical_cost: EstimateWithError
    empirical_q: EstimateWithError
    p_S: float
    surrogate_q: float
    theoretical_ged: float
    theoretical_cost: float
    decoupled_ged: float

    @property
    def z_surrogate(self):
        return self.empirical_ged.z(self.theoretical_ged)

    @property
    def z_decoupled(self):
        return self.empirical_ged.z(self.decoupled_ged)


def run_ged_experiment(params, p_D, p_E, thresholds, costs, replications, master_seed, workers=None):
    """Empirical thresholded GED and weighted cost at one operating point.

    ``decoupled_ged`` plugs the empirical reach fraction into
    ``K L (p_S (1 - q) + (1 - p_S) q)``, which isolates the independence of
    the two supports from the accuracy of the Gaussian surrogate.
    """
    if replications < 30:
        raise ValueError("GED experiment needs at least 30 replications")
    point = params.with_point(p_D, p_E)
    cells = params.K * params.L

    def one(r):
        D, E, F = sample_instance(point, master_seed, r)
        b = ged_between(matmul(D, E), F, thresholds)
        return b.total, costs.c_minus * b.misses + costs.c_plus * b.extras, b.predicted_edges / cells

    rows = parallel_map(one, replications, workers)
    q_emp = EstimateWithError.from_samples([q for _, _, q in rows], master_seed)
    p_S = theory.demand_support_prob(params, thresholds.tau_F)
    q_surr = theory.reach_probability_surrogate(params, p_D, p_E, thresholds.tau)
    return GedResult(
        empirical_ged=EstimateWithError.from_samples([g for g, _, _ in rows], master_seed),
        empirical_cost=EstimateWithError.from_samples([c for _, c, _ in rows], master_seed),
        empirical_q=q_emp,
        p_S=p_S,
        surrogate_q=q_surr,
        theoretical_ged=theory.ged_from_probabilities(params, q_surr, p_S),
        theoretical_cost=cells * theory.expected_edge_cost(q_surr, p_S, costs),
        decoupled_ged=theory.ged_from_probabilities(params, q_emp.mean, p_S),
    )


@dataclass(frozen=True)
class ConcentrationDiagnostic:
    scale: int
    normalized_mean: float
    normalized_std: float
    replications: int


def concentration_diagnostic(params_by_scale, thresholds, replications, master_seed, workers=None):
    """Standard deviation of ``GED / (K L)`` at each ensemble size, sorted by ``K L``."""
    params_by_scale = sorted(params_by_scale, key=lambda p: p.K * p.L)
    if len(params_by_scale) < 3:
        raise ValueError("need at least three scales")
    out = []
    for params in params_by_scale:
        cells = params.K * params.L

        def one(r, params=params, cells=cells):
            D, E, F = sample_instance(params, master_seed, r)
            return ged_between(matmul(D, E), F, thresholds).total / cells

        est = EstimateWithError.from_samples(parallel_map(one, replications, workers), master_seed)
        out.append(ConcentrationDiagnostic(
            scale=cells,
            normalized_mean=est.mean,
            normalized_std=est.std_error * math.sqrt(est.replications),
            replications=replications,
        ))
    return out
