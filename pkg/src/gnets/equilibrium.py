"""Nash tests, monotonicity at perturbed fixed points, and endpoint classification."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .expectations import deviation_values, numerators_denominators
from .model import GNet, InfoSet
from .profile import Profile, describe_block

NASH_TOL = 1e-6
RESIDUAL_TOL = 1e-8
UNREACHABLE_TOL = 1e-14


@dataclass(frozen=True)
class InfoSetReport:
    info_set: InfoSet
    label: str
    max_ratio: float            # max over actions of u_j, the relative conditional EU
    support: tuple[bool, ...]
    violation: float
    unreachable: bool = False


@dataclass(frozen=True)
class NashVerdict:
    is_nash: bool
    worst_violation: float
    per_infoset: list[InfoSetReport] = field(default_factory=list)

    @property
    def violators(self) -> list[InfoSetReport]:
        return [r for r in self.per_infoset if not r.unreachable and r.violation > 0]

    def worst(self) -> InfoSetReport | None:
        live = [r for r in self.per_infoset if not r.unreachable]
        return max(live, key=lambda r: r.violation, default=None)


class Label(str, enum.Enum):
    NASH = "Nash"
    FIXED_POINT_NON_NASH = "FixedPointNonNash"
    ROBUST_CANDIDATE = "RobustCandidate"
    NONE = "None"


@dataclass(frozen=True)
class EquilibriumClass:
    label: Label
    residual: float
    slack: float
    verdict: NashVerdict


def conditional_ratios(net: GNet, values: np.ndarray):
    """u_j = Ntilde_j / D_j per decision coordinate, plus D per coordinate."""
    nt = deviation_values(net, values)
    lay = net.layout
    num = np.zeros(lay.n)
    num[lay.decision_coords] = values[lay.decision_coords] * nt[lay.decision_coords]
    den = np.bincount(lay.coord_block, num, minlength=len(lay.blocks))[lay.coord_block]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den > UNREACHABLE_TOL, nt / np.where(den > 0, den, 1.0), np.nan)
    return ratio, den


def _decision_blocks(net: GNet):
    lay = net.layout
    return [(i, b) for i, b in enumerate(lay.blocks) if not b.nature and len(b.actions) > 1]


def is_nash_prop3(net: GNet, p: Profile, tol: float = NASH_TOL) -> NashVerdict:
    """Nash iff every u_j <= 1, with u_j = 1 wherever p_j > 0 (at reachable info sets)."""
    values = p.values
    ratio, den = conditional_ratios(net, values)
    reports = []
    worst = 0.0
    for i, b in _decision_blocks(net):
        sl = slice(b.start, b.stop)
        label = describe_block(net, i)
        support = tuple(bool(x) for x in values[sl] > tol)
        if den[b.start] <= UNREACHABLE_TOL:
            reports.append(InfoSetReport(b.info_set, label, float("nan"), support, 0.0, True))
            continue
        r = ratio[sl]
        v1 = float(np.max(r - 1.0))
        on = r[np.array(support)]
        v2 = float(np.max(np.abs(on - 1.0))) if on.size else 0.0
        v = max(v1, v2, 0.0)
        worst = max(worst, v)
        reports.append(InfoSetReport(b.info_set, label, float(np.max(r)), support, v))
    return NashVerdict(worst <= tol, worst, reports)


def is_nash_inequality(net: GNet, p: Profile, tol: float = NASH_TOL) -> NashVerdict:
    """Nash iff no pure one-shot deviation at any reachable info set raises conditional EU.

    Computed by explicit re-evaluation of the deviated profile over the
    enumerated states, independently of the ratio form.
    """
    lay = net.layout
    values = p.values
    states = lay.states
    reports = []
    worst = 0.0
    for i, b in _decision_blocks(net):
        node = net.nodes[b.node]
        u = lay.utilities[node.player]
        mask = np.ones(len(states), dtype=bool)
        for m, hv in zip(node.parents, b.parent_values):
            mask &= states[:, m] == hv
        base_probs = np.prod(values[lay.idx[mask]], axis=1)
        base = float((u[mask] * base_probs).sum())
        label = describe_block(net, i)
        support = tuple(bool(x) for x in values[b.start:b.stop] > tol)
        if base <= UNREACHABLE_TOL:
            reports.append(InfoSetReport(b.info_set, label, float("nan"), support, 0.0, True))
            continue
        best = 0.0
        for pos in range(len(b.actions)):
            dev = values.copy()
            dev[b.start:b.stop] = 0.0
            dev[b.start + pos] = 1.0
            val = float((u[mask] * np.prod(dev[lay.idx[mask]], axis=1)).sum())
            best = max(best, val)
        v = max((best - base) / base, 0.0)
        worst = max(worst, v)
        reports.append(InfoSetReport(b.info_set, label, best / base, support, v))
    return NashVerdict(worst <= tol, worst, reports)


def fixed_point_residual(net: GNet, p: Profile) -> float:
    """max_j |p_j - N_j / D_j| over reachable decision blocks (boundary safe)."""
    num, den = numerators_denominators(net, p.values)
    lay = net.layout
    worst = 0.0
    for i, b in _decision_blocks(net):
        d = den[b.start]
        if d <= UNREACHABLE_TOL:
            continue
        sl = slice(b.start, b.stop)
        worst = max(worst, float(np.max(np.abs(p.values[sl] - num[sl] / d))))
    return worst


class NotAFixedPoint(ValueError):
    pass


@dataclass(frozen=True)
class MonotonicityReport:
    holds: bool
    witnesses: list[tuple[str, int, int]]   # (info set, better action, worse action)


def check_prop4_monotonicity(net: GNet, p: Profile, eps: float, tol: float = RESIDUAL_TOL) -> MonotonicityReport:
    """At a fixed point of f_eps, strictly higher u_j must mean strictly higher p_j."""
    from .first_equilibrium import residual_F_eps

    res = float(np.max(np.abs(residual_F_eps(net, p, eps)), initial=0.0))
    if res > tol:
        raise NotAFixedPoint(f"residual {res:.3e} exceeds {tol:.1e}")
    ratio, den = conditional_ratios(net, p.values)
    margin = 10 * tol
    witnesses = []
    for i, b in _decision_blocks(net):
        if den[b.start] <= UNREACHABLE_TOL:
            continue
        r = ratio[b.start:b.stop]
        q = p.values[b.start:b.stop]
        for a in range(len(r)):
            for c in range(len(r)):
                if r[a] - r[c] > margin and not q[a] > q[c]:
                    witnesses.append((describe_block(net, i), b.actions[a], b.actions[c]))
    return MonotonicityReport(not witnesses, witnesses)


def classify(net: GNet, p: Profile, provenance: str = "user", tol: float = NASH_TOL,
             residual_tol: float = RESIDUAL_TOL) -> EquilibriumClass:
    """Label a profile. provenance is one of 'homotopy', 'polynomial', 'user'."""
    verdict = is_nash_prop3(net, p, tol)
    res = fixed_point_residual(net, p)
    if verdict.is_nash:
        label = Label.ROBUST_CANDIDATE if provenance == "homotopy" else Label.NASH
    elif res <= residual_tol:
        label = Label.FIXED_POINT_NON_NASH
    else:
        label = Label.NONE
    return EquilibriumClass(label, res, verdict.worst_violation, verdict)
