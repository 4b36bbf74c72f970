"""Design map: boundary-rule decision, two-branch ``p_D`` sweeps, knee marking.

For each ``p_D`` the sweep evaluates two branches:

* ``cap``: run compute at the cap, ``p_E = p_E_cap``;
* ``recall``: run compute just hard enough to meet the recall target,
  ``p_E = recall_line_pE(p_D, rho)``; infeasible while that exceeds the cap.

They meet at the knee, the smallest ``p_D`` whose recall line reaches the cap.
"""
from dataclasses import dataclass

from reachged import theory

ACTIONS = ("maximize_q", "minimize_q_subject_to_recall", "indifferent")
REGIMES = ("cap_binding", "recall_binding", "infeasible")
INDIFFERENCE_TOL = 1e-12


@dataclass(frozen=True)
class Decision:
    slope: float
    variant: str
    action: str


def decide_from_slope(slope, variant="threshold_aware"):
    if abs(slope) <= INDIFFERENCE_TOL:
        action = "indifferent"
    elif slope < 0:
        action = "maximize_q"
    else:
        action = "minimize_q_subject_to_recall"
    return Decision(slope, variant, action)


def boundary_decision(params, costs, thresholds, slope_variant="threshold_aware"):
    """Misses dearer than extras (negative slope) means push reach up, otherwise hold it at the recall line."""
    p_S = theory.demand_support_prob(params, thresholds.tau_F)
    slope = theory.boundary_slope(p_S, costs, slope_variant, params.p_F)
    return decide_from_slope(slope, slope_variant)


def latency_proxy(params, p_D, p_E, w_comm=1.0, w_comp=1.0):
    """Expected user fan-out plus expected server activation, ``w_comm N p_D + w_comp N p_E``.

    An artifact convention for plotting, not a derived latency model.
    """
    if w_comm < 0 or w_comp < 0:
        raise ValueError("latency weights must be nonnegative")
    return w_comm * params.N * p_D + w_comp * params.N * p_E


@dataclass(frozen=True)
class SweepRow:
    rho: float
    p_D: float
    branch: str
    regime: str
    p_E: float
    q: float | None
    expected_ged: float | None
    weighted_cost: float | None
    latency: float | None
    at_knee: bool
    knee_pD_exact: float | None

    @property
    def feasible(self):
        return self.regime != "infeasible"


def p_D_grid(start, stop, steps):
    if steps < 2:
        raise ValueError("grid needs at least two steps")
    if not 0 < start < stop <= 1:
        raise ValueError(f"grid must satisfy 0 < start < stop <= 1, got {start}, {stop}")
    h = (stop - start) / (steps - 1)
    return [start + i * h for i in range(steps - 1)] + [stop]


def _knee_index(grid, knee):
    if not theory.is_feasible(knee):
        return None
    step = max(b - a for a, b in zip(grid, grid[1:]))
    i = min(range(len(grid)), key=lambda j: abs(grid[j] - knee))
    return i if abs(grid[i] - knee) <= step else None


def sweep_pd(params, costs, thresholds, grid, latency_weights=(1.0, 1.0), envelope=False):
    """Rows for both branches at every grid point (and the cost-optimal envelope if asked).

    Infeasible recall rows are kept with ``p_E`` set to the required (over-cap)
    value and the outcome columns left empty.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("empty p_D grid")
    if any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] <= 0 or grid[-1] > 1:
        raise ValueError("grid must be strictly increasing in (0, 1]")
    rho, cap, tau = costs.rho, costs.p_E_cap, thresholds.tau
    p_S = theory.demand_support_prob(params, thresholds.tau_F)
    cells = params.K * params.L
    knee = theory.knee_pD(params, tau, rho, cap)
    knee_exact = knee if theory.is_feasible(knee) else None
    k_idx = _knee_index(grid, knee)
    w_comm, w_comp = latency_weights

    def evaluated(p_D, branch, regime, p_E, i):
        q = theory.reach_probability_surrogate(params, p_D, p_E, tau)
        return SweepRow(
            rho=rho, p_D=p_D, branch=branch, regime=regime, p_E=p_E, q=q,
            expected_ged=theory.ged_from_probabilities(params, q, p_S),
            weighted_cost=cells * theory.expected_edge_cost(q, p_S, costs),
            latency=latency_proxy(params, p_D, p_E, w_comm, w_comp),
            at_knee=(i == k_idx), knee_pD_exact=knee_exact,
        )

    rows = []
    for i, p_D in enumerate(grid):
        cap_row = evaluated(p_D, "cap", "cap_binding", cap, i)
        need = theory.recall_line_pE(params, p_D, tau, rho)
        if theory.is_feasible(need) and need <= cap:
            recall_row = evaluated(p_D, "recall", "recall_binding", need, i)
        else:
            required = need if theory.is_feasible(need) else need.required
            recall_row = SweepRow(rho, p_D, "recall", "infeasible", required, None, None, None,
                                  None, i == k_idx, knee_exact)
        rows.extend((cap_row, recall_row))
        if envelope:
            rows.append(_envelope_row(cap_row, recall_row, rho))
    return rows


def _envelope_row(cap_row, recall_row, rho):
    candidates = [r for r in (cap_row, recall_row)
                  if r.feasible and r.q >= rho - 1e-9]
    if not candidates:
        return SweepRow(rho, cap_row.p_D, "envelope", "infeasible", None, None, None, None,
                        None, cap_row.at_knee, cap_row.knee_pD_exact)
    best = min(candidates, key=lambda r: r.weighted_cost)
    return SweepRow(rho, best.p_D, "envelope", best.regime, best.p_E, best.q, best.expected_ged,
                    best.weighted_cost, best.latency, best.at_knee, best.knee_pD_exact)
