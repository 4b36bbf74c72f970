"""Closed-form typical-case laws under the spike-and-slab ensemble.

Reach probabilities use the Gaussian surrogate ``q = 2 Q(tau / sigma_A)`` with
``sigma_A**2 = N p_D p_E v_D v_E``. The true law of a two-hop entry has an
atom at zero of mass ``(1 - p_D p_E)**N``; the surrogate ignores it on
purpose and :mod:`reachged.montecarlo` reports the gap.
"""
import math
from dataclasses import dataclass

import numpy as np

from reachged._backend import kernels

SLOPE_VARIANTS = ("threshold_aware", "raw_pF")
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class CostModel:
    c_minus: float = 10.0
    c_plus: float = 0.25
    rho: float = 0.9
    p_E_cap: float = 0.2

    def __post_init__(self):
        if not (self.c_minus > 0 and self.c_plus > 0):
            raise ValueError("costs must be positive")
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if not 0 < self.p_E_cap <= 1:
            raise ValueError(f"p_E_cap must lie in (0, 1], got {self.p_E_cap}")


@dataclass(frozen=True)
class Infeasible:
    """A root that exists but violates its admissible range (``required`` may be ``inf``)."""

    required: float

    def __bool__(self):
        return False


def is_feasible(value):
    return not isinstance(value, Infeasible)


@dataclass(frozen=True)
class OperatingPoint:
    p_D: float
    p_E: float
    tau: float
    tau_F: float
    sigma_A: float
    q: float
    p_S: float


def gaussian_Q(x):
    """Standard normal upper tail ``P(Z >= x)``."""
    return 0.5 * math.erfc(x / _SQRT2)


def gaussian_Q_inv(p, tol=1e-13):
    """Inverse of :func:`gaussian_Q` on ``(0, 1)``.

    Seeded by the AS241 quantile, polished by Newton steps that fall back to
    bisection whenever a step leaves the current bracket.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"gaussian_Q_inv needs p in (0, 1), got {p}")
    x = -float(kernels.norm_ppf(np.array([p], dtype=np.float64))[0])
    lo, hi = -40.0, 40.0
    for _ in range(200):
        f = gaussian_Q(x) - p
        if abs(f) <= tol * min(p, 1.0 - p) or hi - lo <= 1e-15 * max(1.0, abs(x)):
            break
        # Q is decreasing: f > 0 means x is too small
        if f > 0:
            lo = max(lo, x)
        else:
            hi = min(hi, x)
        step = f / (_INV_SQRT_2PI * math.exp(-0.5 * x * x))
        nxt = x + step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if nxt == x:
            break
        x = nxt
    return x


def sigma_A(params, p_D, p_E):
    """Standard deviation of a two-hop strength at densities ``(p_D, p_E)``."""
    for name, p in (("p_D", p_D), ("p_E", p_E)):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return math.sqrt(params.N * p_D * p_E * params.v_D * params.v_E)


def two_hop_energy(params, p_D=None, p_E=None):
    p_D = params.p_D if p_D is None else p_D
    p_E = params.p_E if p_E is None else p_E
    return params.N * p_D * p_E * params.v_D * params.v_E


def expected_frobenius_risk(params):
    """Exact ``E ||DE - F||_F**2``.

    Per entry ``A`` has mean zero and variance ``t = N p_D p_E v_D v_E``,
    independent of ``F``, so the second moment is ``t + E[F**2]`` with
    ``E[F**2] = p_F (v_F + mu_F**2)``.
    """
    t = two_hop_energy(params)
    return params.K * params.L * (t + params.p_F * (params.v_F + params.mu_F ** 2))


def energy_bias_frobenius_risk(params):
    """``K L (t + p_F v_F + (t - p_F mu_F)**2)``: the risk with ``t`` standing in for the mean of ``A``.

    This expression is not the second moment of the zero-mean ensemble (it
    exceeds :func:`expected_frobenius_risk` by ``K L t**2`` when ``mu_F = 0``);
    it is kept so the two can be compared against simulation.
    """
    t = two_hop_energy(params)
    return params.K * params.L * (t + params.p_F * params.v_F + (t - params.p_F * params.mu_F) ** 2)


def reach_probability_surrogate(params, p_D, p_E, tau):
    if not tau > 0:
        raise ValueError("tau must be positive")
    s = sigma_A(params, p_D, p_E)
    if s == 0.0:
        return 0.0
    return reach_from_ratio(tau / s)


def reach_from_ratio(ratio):
    """``2 Q(ratio)`` clamped to ``[0, 1]``; ``ratio`` is the dimensionless threshold ``tau / sigma_A``."""
    return min(1.0, max(0.0, 2.0 * gaussian_Q(ratio)))


def demand_support_prob(params, tau_F):
    if not tau_F > 0:
        raise ValueError("tau_F must be positive")
    return params.p_F * 2.0 * gaussian_Q(tau_F / math.sqrt(params.v_F))


def expected_edge_cost(q, p_S, costs):
    """Per-edge expected cost, affine in ``q``."""
    return costs.c_minus * p_S * (1.0 - q) + costs.c_plus * (1.0 - p_S) * q


def boundary_slope(p_S, costs, variant="threshold_aware", p_F=None):
    """Slope of the per-edge cost in ``q``.

    ``threshold_aware`` weighs with the demand-support probability ``p_S``;
    ``raw_pF`` weighs with the raw demand density ``p_F`` instead.
    """
    if variant == "threshold_aware":
        w = p_S
    elif variant == "raw_pF":
        if p_F is None:
            raise ValueError("raw_pF slope needs p_F")
        w = p_F
    else:
        raise ValueError(f"unknown slope variant {variant!r}; choose from {SLOPE_VARIANTS}")
    return costs.c_plus * (1.0 - w) - costs.c_minus * w


def expected_ged(params, p_D, p_E, tau, tau_F):
    q = reach_probability_surrogate(params, p_D, p_E, tau)
    p_S = demand_support_prob(params, tau_F)
    return ged_from_probabilities(params, q, p_S)


def ged_from_probabilities(params, q, p_S):
    """``K L (p_S (1 - q) + (1 - p_S) q)``: expected GED when supports are independent."""
    return params.K * params.L * (p_S * (1.0 - q) + (1.0 - p_S) * q)


def _recall_ratio(rho):
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    return gaussian_Q_inv(rho / 2.0)


def recall_line_pE(params, p_D, tau, rho):
    """Smallest ``p_E`` with surrogate reach ``>= rho`` at ``p_D``.

    Returns :class:`Infeasible` when that ``p_E`` exceeds 1 or ``p_D == 0``.
    """
    if not 0.0 <= p_D <= 1.0:
        raise ValueError(f"p_D must lie in [0, 1], got {p_D}")
    z = _recall_ratio(rho)
    if p_D == 0.0 or z == 0.0:
        return Infeasible(math.inf)
    p_E = tau ** 2 / (params.N * p_D * params.v_D * params.v_E * z ** 2)
    return p_E if p_E <= 1.0 else Infeasible(p_E)


def knee_pD(params, tau, rho, p_E_cap):
    """``p_D`` at which the recall line meets the compute cap."""
    if not 0 < p_E_cap <= 1:
        raise ValueError(f"p_E_cap must lie in (0, 1], got {p_E_cap}")
    z = _recall_ratio(rho)
    if z == 0.0:
        return Infeasible(math.inf)
    p_D = tau ** 2 / (params.N * p_E_cap * params.v_D * params.v_E * z ** 2)
    return p_D if p_D <= 1.0 else Infeasible(p_D)


def operating_point(params, p_D, p_E, thresholds):
    s = sigma_A(params, p_D, p_E)
    return OperatingPoint(
        p_D=p_D,
        p_E=p_E,
        tau=thresholds.tau,
        tau_F=thresholds.tau_F,
        sigma_A=s,
        q=reach_probability_surrogate(params, p_D, p_E, thresholds.tau),
        p_S=demand_support_prob(params, thresholds.tau_F),
    )
