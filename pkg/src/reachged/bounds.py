"""Deterministic norm and GED inequalities evaluated on concrete ``(D, E, F)``.

Each check returns a :class:`BoundReport` (or a small result record) holding
both sides and the actual value. :func:`run_battery` sweeps a seeded battery
of random and adversarial instances and collects any violation together with
the record needed to regenerate it.
"""
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from reachged._parallel import parallel_map
from reachged.ensemble import SeedSpec, sample_spike_slab
from reachged.linalg import (
    ShapeError,
    as_matrix,
    entrywise_l1,
    frobenius_inner,
    frobenius_norm,
    matmul,
    singular_values,
)
from reachged.metrics import Thresholds, error_norms, ged_between

TIGHTNESS_TOL = 1e-6
FP_REL = 1e-9
PROP3_FORMS = ("one_sided", "absolute")


def fp_tol(actual):
    return FP_REL * max(1.0, abs(actual))


@dataclass(frozen=True)
class BoundReport:
    name: str
    lower: float
    actual: float
    upper: float

    @property
    def slack_lower(self):
        return self.actual - self.lower

    @property
    def slack_upper(self):
        return self.upper - self.actual

    @property
    def tight_lower(self):
        return abs(self.slack_lower) <= TIGHTNESS_TOL * max(abs(self.actual), abs(self.lower))

    @property
    def tight_upper(self):
        if math.isinf(self.upper):
            return False
        return abs(self.slack_upper) <= TIGHTNESS_TOL * max(abs(self.actual), abs(self.upper))

    @property
    def tight(self):
        return self.tight_lower or self.tight_upper

    @property
    def holds(self):
        tol = fp_tol(self.actual)
        return self.lower - tol <= self.actual <= self.upper + tol


class BoundViolation(AssertionError):
    """A deterministic inequality failed beyond floating-point tolerance."""

    def __init__(self, report, reproducer):
        self.report = report
        self.reproducer = reproducer
        super().__init__(f"{report.name} violated: {report}; reproduce with {self.record()}")

    def record(self):
        return json.dumps(self.reproducer, sort_keys=True)


def check(report, reproducer=None):
    """Return ``report`` or raise :class:`BoundViolation`."""
    if not report.holds:
        raise BoundViolation(report, reproducer or {})
    return report


def _conform(D, E, F):
    D, E, F = as_matrix(D), as_matrix(E), as_matrix(F)
    if D.shape[1] != E.shape[0] or F.shape != (D.shape[0], E.shape[1]):
        raise ShapeError(f"nonconformable shapes D{D.shape} E{E.shape} F{F.shape}")
    return D, E, F


def triangle_bounds(D, E, F):
    """``| ||DE|| - ||F|| | <= ||DE - F|| <= ||DE|| + ||F||`` (Frobenius).

    Lower side is tight when ``DE`` and ``F`` are positively colinear, upper
    side when they are negatively colinear.
    """
    D, E, F = _conform(D, E, F)
    A = matmul(D, E)
    a, f = frobenius_norm(A), frobenius_norm(F)
    return BoundReport("triangle", abs(a - f), frobenius_norm(A - F), a + f)


@dataclass(frozen=True)
class OrthogonalityResult:
    orthogonal: bool
    pythagorean_holds: bool | None
    lhs: float
    rhs: float


def orthogonality_check(D, E, F, tol=1e-12):
    """Pythagorean identity ``||DE-F||^2 = ||DE||^2 + ||F||^2`` when ``<DE, F>_F`` vanishes.

    The identity is only tested when ``|<DE,F>| <= tol ||DE|| ||F||``;
    otherwise ``pythagorean_holds`` is ``None``.
    """
    D, E, F = _conform(D, E, F)
    A = matmul(D, E)
    a, f = frobenius_norm(A), frobenius_norm(F)
    lhs = frobenius_norm(A - F) ** 2
    rhs = a * a + f * f
    orthogonal = abs(frobenius_inner(A, F)) <= tol * a * f
    holds = None
    if orthogonal:
        holds = abs(lhs - rhs) <= 1e-9 * max(rhs, 1e-300)
    return OrthogonalityResult(orthogonal, holds, lhs, rhs)


def submultiplicative_bounds(D, E, F, sv_D=None, sv_E=None):
    """``||DE-F|| <= ||D||_F ||E||_2 + ||F||`` and ``<= ||D||_2 ||E||_F + ||F||``."""
    D, E, F = _conform(D, E, F)
    sv_D = singular_values(D) if sv_D is None else sv_D
    sv_E = singular_values(E) if sv_E is None else sv_E
    actual = frobenius_norm(matmul(D, E) - F)
    f = frobenius_norm(F)
    return (
        BoundReport("submult_DF_E2", 0.0, actual, frobenius_norm(D) * sv_E[0] + f),
        BoundReport("submult_D2_EF", 0.0, actual, sv_D[0] * frobenius_norm(E) + f),
    )


def _left_floor(sv, M):
    """``min ||x^T M|| / ||x||`` over all ``x``: zero when ``M`` has more rows than columns."""
    return 0.0 if M.shape[0] > M.shape[1] else float(sv[-1])


def _right_floor(sv, M):
    """``min ||M y|| / ||y||`` over all ``y``: zero when ``M`` has more columns than rows."""
    return 0.0 if M.shape[1] > M.shape[0] else float(sv[-1])


def singular_lower_bounds(D, E, F, form="one_sided", sv_D=None, sv_E=None):
    """Lower bounds from ``||DE||_F >= s(E) ||D||_F`` and ``||DE||_F >= s(D) ||E||_F``.

    ``form="one_sided"`` reports ``max(0, s ||.||_F - ||F||_F)`` with ``s``
    the smallest gain of the factor over the whole shared dimension (zero
    when the factor has a nontrivial kernel there). This is what the trace
    argument plus the reverse triangle inequality actually proves.

    ``form="absolute"`` reports ``| sigma_min ||.||_F - ||F||_F |`` with
    ``sigma_min`` the smallest of the ``min(rows, cols)`` singular values.
    That version can fail, e.g. for ``F = DE`` whenever ``||F|| >
    sigma_min ||D||``; it is kept for comparison only.
    """
    if form not in PROP3_FORMS:
        raise ValueError(f"unknown form {form!r}; choose from {PROP3_FORMS}")
    D, E, F = _conform(D, E, F)
    sv_D = singular_values(D) if sv_D is None else sv_D
    sv_E = singular_values(E) if sv_E is None else sv_E
    actual = frobenius_norm(matmul(D, E) - F)
    f = frobenius_norm(F)
    if form == "one_sided":
        lo_E = max(0.0, frobenius_norm(D) * _left_floor(sv_E, E) - f)
        lo_D = max(0.0, _right_floor(sv_D, D) * frobenius_norm(E) - f)
        suffix = ""
    else:
        lo_E = abs(frobenius_norm(D) * float(sv_E[-1]) - f)
        lo_D = abs(float(sv_D[-1]) * frobenius_norm(E) - f)
        suffix = "_abs"
    return (
        BoundReport("singular_lower_E" + suffix, lo_E, actual, math.inf),
        BoundReport("singular_lower_D" + suffix, lo_D, actual, math.inf),
    )


@dataclass(frozen=True)
class GedNormLink:
    ged: int
    bound_abs: float
    bound_full: float

    @property
    def holds(self):
        return (
            self.ged <= self.bound_abs + fp_tol(self.bound_abs)
            and self.bound_abs <= self.bound_full + fp_tol(self.bound_full)
        )

    def as_reports(self):
        return (
            BoundReport("ged_vs_abs_norm", 0.0, float(self.ged), self.bound_abs),
            BoundReport("abs_norm_vs_norm", 0.0, self.bound_abs, self.bound_full),
        )


def ged_norm_link(D, E, F, thresholds):
    """Thresholded GED against ``|| |DE|-|F| ||_F^2 / g^2 <= ||DE-F||_F^2 / g^2``, ``g = min(tau, tau_F)``.

    The second inequality always holds. The first needs every disagreeing
    entry to sit at least ``g`` away from the other side's magnitude, which a
    miss with ``|DE|`` just under ``tau`` and ``|F|`` just over ``tau_F`` does
    not; :attr:`GedNormLink.holds` reports it instead of asserting.
    """
    D, E, F = _conform(D, E, F)
    A = matmul(D, E)
    norms = error_norms(A, F)
    g2 = thresholds.gap ** 2
    return GedNormLink(
        ged=ged_between(A, F, thresholds).total,
        bound_abs=norms.abs_frobenius ** 2 / g2,
        bound_full=norms.frobenius ** 2 / g2,
    )


def l1_l2_sandwich(X):
    """``||X||_1 / sqrt(rows cols) <= ||X||_F <= ||X||_1``."""
    X = as_matrix(X)
    l1 = entrywise_l1(X)
    return BoundReport("l1_l2", l1 / math.sqrt(X.size), frobenius_norm(X), l1)


def instance_reports(D, E, F, thresholds, include_absolute=False):
    """Every report for one instance, sharing the product and the decompositions."""
    D, E, F = _conform(D, E, F)
    sv_D = singular_values(D)
    sv_E = singular_values(E)
    A = matmul(D, E)
    reports = [triangle_bounds(D, E, F)]
    reports.extend(submultiplicative_bounds(D, E, F, sv_D, sv_E))
    reports.extend(singular_lower_bounds(D, E, F, "one_sided", sv_D, sv_E))
    if include_absolute:
        reports.extend(singular_lower_bounds(D, E, F, "absolute", sv_D, sv_E))
    reports.extend(ged_norm_link(D, E, F, thresholds).as_reports())
    reports.append(l1_l2_sandwich(A - F))
    return reports


# ---------------------------------------------------------------- battery

BATTERY_DENSITIES = (0.0, 0.1, 0.5, 1.0)
BATTERY_KINDS = ("random", "zero", "rank1", "hub")
_KIND_WEIGHTS = (0.7, 0.1, 0.1, 0.1)


def battery_instance(seed, index, dim_range=(2, 64)):
    """Instance ``index`` of the seeded battery: ``(D, E, F, reproducer)``."""
    rng = np.random.default_rng([seed, index])
    K, N, L = (int(x) for x in rng.integers(dim_range[0], dim_range[1] + 1, size=3))
    p_D, p_E, p_F = (float(x) for x in rng.choice(BATTERY_DENSITIES, size=3))
    kind = str(rng.choice(BATTERY_KINDS, p=_KIND_WEIGHTS))
    D = sample_spike_slab(K, N, p_D, 0.5, 0.0, SeedSpec(seed, 0, index))
    E = sample_spike_slab(N, L, p_E, 0.5, 0.0, SeedSpec(seed, 1, index))
    F = sample_spike_slab(K, L, p_F, 0.5, 0.0, SeedSpec(seed, 2, index))
    if kind == "zero":
        which = int(rng.integers(3))
        D, E, F = [np.zeros_like(M) if i == which else M for i, M in enumerate((D, E, F))]
    elif kind == "rank1":
        u = sample_spike_slab(K, 1, max(p_D, 0.5), 1.0, 0.0, SeedSpec(seed, 3, index))
        v = sample_spike_slab(1, N, max(p_D, 0.5), 1.0, 0.0, SeedSpec(seed, 4, index))
        x = sample_spike_slab(N, 1, max(p_E, 0.5), 1.0, 0.0, SeedSpec(seed, 5, index))
        y = sample_spike_slab(1, L, max(p_E, 0.5), 1.0, 0.0, SeedSpec(seed, 6, index))
        D, E = u @ v, x @ y
    elif kind == "hub":
        E = np.array(E)
        col = int(rng.integers(L))
        E[:, col] = 50.0 * sample_spike_slab(N, 1, 1.0, 1.0, 0.0, SeedSpec(seed, 7, index))[:, 0]
    reproducer = {
        "seed": int(seed), "index": int(index), "kind": kind,
        "K": K, "N": N, "L": L, "p_D": p_D, "p_E": p_E, "p_F": p_F,
    }
    return as_matrix(D), as_matrix(E), as_matrix(F), reproducer


@dataclass
class BoundStats:
    checked: int = 0
    violations: int = 0
    tight: int = 0
    min_rel_slack: float = math.inf

    def add(self, report):
        self.checked += 1
        if not report.holds:
            self.violations += 1
        if report.tight:
            self.tight += 1
        slacks = [report.slack_lower]
        if not math.isinf(report.upper):
            slacks.append(report.slack_upper)
        scale = max(abs(report.actual), 1e-300)
        self.min_rel_slack = min(self.min_rel_slack, min(slacks) / scale)


@dataclass
class BatteryResult:
    seed: int
    instances: int
    stats: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def violations_for(self, name):
        return self.stats[name].violations if name in self.stats else 0


def run_battery(instances, seed, thresholds=None, include_absolute=False, dim_range=(2, 64),
                informational=("singular_lower_E_abs", "singular_lower_D_abs"), workers=None):
    """Check every bound on ``instances`` seeded instances.

    Names in ``informational`` are tallied but never recorded as violations.
    """
    thresholds = thresholds or Thresholds()
    result = BatteryResult(seed=seed, instances=instances)

    def one(index):
        D, E, F, repro = battery_instance(seed, index, dim_range)
        return repro, instance_reports(D, E, F, thresholds, include_absolute)

    for repro, reports in parallel_map(one, instances, workers):
        for report in reports:
            result.stats.setdefault(report.name, BoundStats()).add(report)
            if not report.holds and report.name not in informational:
                result.violations.append({**repro, "bound": report.name, **asdict(report)})
    return result
