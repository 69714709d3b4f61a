"""First equilibrium: follow F_eps(p) = p - eps*z - (1-eps)*v(p) from eps = 1 down to eps ~ 0."""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .equilibrium import EquilibriumClass, UNREACHABLE_TOL, classify
from .expectations import BoundaryError, leave_one_out, numerators_denominators, value_map
from .model import GNet, PotentialTable
from .profile import Profile
from .tracking import Homotopy, PathPoint, TrackedPath, TrackerConfig, track

FACE_TOL = 1e-7


class DegenerateGame(RuntimeError):
    def __init__(self, message, path: TrackedPath | None = None):
        super().__init__(message)
        self.path = path


def uniform_target(net: GNet) -> np.ndarray:
    return net.layout.base.copy()


def f_epsilon(net: GNet, p: Profile, eps: float) -> Profile:
    """eps * z + (1 - eps) * v(p), blockwise on decision coordinates."""
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    v = value_map(net, p).values
    z = uniform_target(net)
    out = v.copy()
    dc = net.layout.decision_coords
    out[dc] = eps * z[dc] + (1 - eps) * v[dc]
    return Profile(net, out)


def residual_F_eps(net: GNet, p: Profile, eps: float) -> np.ndarray:
    """p - f_eps(p) over free coordinates."""
    fc = net.layout.free_coords
    if eps == 0:
        from .expectations import residual_F
        return residual_F(net, p)
    return p.values[fc] - f_epsilon(net, p, eps).values[fc]


def jacobian_N(net: GNet, values: np.ndarray) -> np.ndarray:
    """dN_j / dp_m for all coordinates, from the state expansion of N."""
    lay = net.layout
    n = lay.n
    loo = leave_one_out(net, values)
    flat = np.zeros(n * n)
    nn = lay.idx.shape[1]
    for k, owner in enumerate(lay.owners):
        if owner is None or len(lay.idx) == 0:
            continue
        u = lay.utilities[owner]
        rows = lay.idx[:, k] * n
        for l in range(nn):
            flat += np.bincount(rows + lay.idx[:, l], u * loo[:, l], minlength=n * n)
    return flat.reshape(n, n)


def jacobian_value_map(net: GNet, values: np.ndarray) -> np.ndarray:
    """dv/dp restricted to free rows and columns (quotient rule on N/D)."""
    lay = net.layout
    fc = lay.free_coords
    jn = jacobian_N(net, values)
    num, den = numerators_denominators(net, values)
    jd = np.zeros_like(jn)
    for b in lay.blocks:
        if b.nature:
            continue
        jd[b.start:b.stop] = jn[b.start:b.stop].sum(axis=0)
    jv = np.zeros((len(fc), len(fc)))
    for r, j in enumerate(fc):
        d = den[j]
        if d <= UNREACHABLE_TOL:
            jv[r, r] = 1.0
            continue
        jv[r] = (jn[j, fc] * d - num[j] * jd[j, fc]) / d**2
    return jv


def jacobian_F_eps(net: GNet, p: Profile, eps: float) -> np.ndarray:
    if np.any(p.values[net.layout.decision_coords] <= 0):
        raise BoundaryError("Jacobian requires an interior profile")
    return np.eye(len(net.layout.free_coords)) - (1 - eps) * jacobian_value_map(net, p.values)


def _v_free(net: GNet, values: np.ndarray) -> np.ndarray:
    num, den = numerators_denominators(net, values)
    fc = net.layout.free_coords
    d = den[fc]
    safe = np.where(d > UNREACHABLE_TOL, d, 1.0)
    return np.where(d > UNREACHABLE_TOL, num[fc] / safe, values[fc])


def _homotopy(net: GNet) -> Homotopy:
    lay = net.layout
    fc = lay.free_coords
    z = uniform_target(net)[fc]

    def full(y):
        v = lay.base.copy()
        v[fc] = y
        return v

    def value(y, t):
        eps = 1 - t
        return y - eps * z - (1 - eps) * _v_free(net, full(y))

    def jac_x(y, t):
        return np.eye(len(fc)) - t * jacobian_value_map(net, full(y))

    def jac_t(y, t):
        return z - _v_free(net, full(y))

    return Homotopy(value, jac_x, jac_t)


@dataclass
class DampedResult:
    profile: Profile
    iterations: int
    residual: float
    converged: bool


def damped_fixed_point(net: GNet, eps: float, damping: float = 0.5, tol: float = 1e-12,
                       max_iters: int = 20_000, start: Profile | None = None,
                       newton_polish: bool = True) -> DampedResult:
    """Iterate p <- p + damping * (f_eps(p) - p) from the uniform profile.

    f_eps keeps every coordinate at least eps/|block|, so iterates stay
    interior. Slowly spiralling cases finish with a few Newton steps.
    """
    if not 0 < damping <= 1:
        raise ValueError("damping must lie in (0, 1]")
    lay = net.layout
    fc = lay.free_coords
    y = (start.values if start is not None else lay.base)[fc].copy()
    H = _homotopy(net)
    t = 1 - eps
    res = np.inf
    it = 0
    for it in range(1, max_iters + 1):
        r = H.value(y, t)
        res = float(np.max(np.abs(r), initial=0.0))
        if res <= tol:
            break
        y = y - damping * r
    if res > tol and newton_polish:
        for _ in range(50):
            r = H.value(y, t)
            res = float(np.max(np.abs(r), initial=0.0))
            if res <= tol:
                break
            y = y + np.linalg.solve(H.jac_x(y, t), -r)
    v = lay.base.copy()
    v[fc] = y
    return DampedResult(Profile(net, v), it, res, res <= tol)


def perturb_payoffs(net: GNet, scale: float, rng: np.random.Generator) -> GNet:
    """Multiply every non-reference potential entry by (1 + delta), delta ~ U[-scale, scale]."""
    tables = []
    for t in net.potentials:
        w = np.array(t.weights, dtype=float)
        ref = net.nodes[t.node].reference
        factor = 1 + rng.uniform(-scale, scale, size=w.shape)
        factor[ref] = 1.0
        tables.append(PotentialTable(t.player, t.node, t.neighbors, w * factor))
    return net.with_potentials(tables)


def polish_endpoint(net: GNet, values: np.ndarray, face_tol: float = FACE_TOL,
                    tol: float = 1e-13, max_iters: int = 30) -> np.ndarray:
    """Snap tiny coordinates to zero, then Newton on F = p - v(p) within that face."""
    lay = net.layout
    v = values.copy()
    for b in lay.blocks:
        if not b.free:
            continue
        row = v[b.start:b.stop]
        row[row < face_tol] = 0.0
        row /= row.sum()
    support = [j for b in lay.blocks if b.free
               for j in range(b.start, b.stop) if v[j] > 0 and np.count_nonzero(v[b.start:b.stop]) > 1]
    if not support:
        return v
    fc = list(lay.free_coords)
    pos = [fc.index(j) for j in support]
    cand = v.copy()
    for _ in range(max_iters):
        vf = _v_free(net, cand)
        res = cand[support] - vf[pos]
        if np.max(np.abs(res)) <= tol:
            break
        jac = np.eye(len(support)) - jacobian_value_map(net, cand)[np.ix_(pos, pos)]
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError:
            return v
        cand[support] += step
        if np.any(cand[support] <= 0):
            return v
    vf = _v_free(net, cand)
    if np.max(np.abs(cand[support] - vf[pos])) <= 1e-11 and np.max(np.abs(cand - v)) < 1e-4:
        return cand
    return v


# Paths that approach a face at rate sqrt(eps) are still ~1e-4 away at eps = 1e-8.
FACE_LADDER = (FACE_TOL, 1e-6, 1e-5, 1e-4, 1e-3)


def extract_limit(net: GNet, raw: np.ndarray):
    """Polish the tracked endpoint on the smallest face whose polished point is Nash."""
    first = None
    for ft in FACE_LADDER:
        cand = polish_endpoint(net, raw, ft)
        cls = classify(net, Profile(net, cand), "homotopy")
        if first is None:
            first = (cand, cls)
        if cls.verdict.is_nash:
            return cand, cls
    return first


@dataclass
class FirstEquilibrium:
    profile: Profile
    classification: EquilibriumClass
    path: TrackedPath
    perturbed: bool = False
    attempts: int = 1
    unperturbed: EquilibriumClass | None = None
    seconds: float = 0.0
    components: list = field(default_factory=list)


def _trace_writer(handle, net):
    if handle is None:
        return None

    def write(pt: PathPoint):
        coords = " ".join(repr(float(c)) for c in pt.x)
        handle.write(f"{pt.t!r} {pt.step!r} {pt.residual!r} {coords}\n")
    return write


def track_first_equilibrium(net: GNet, cfg: TrackerConfig | None = None, trace=None,
                            max_retries: int = 3) -> FirstEquilibrium:
    """Track the convex-linear homotopy from the uniform profile to its endpoint."""
    cfg = cfg or TrackerConfig()
    started = time.perf_counter()
    lay = net.layout
    if len(lay.free_coords) == 0:
        prof = Profile(net, lay.base.copy())
        cls = classify(net, prof, "homotopy")
        path = TrackedPath([PathPoint(1.0, np.zeros(0), 0.0, 0.0)], "converged")
        return FirstEquilibrium(prof, cls, path, seconds=time.perf_counter() - started)
    rng = np.random.default_rng(cfg.rng_seed)
    work = net
    path = None
    for attempt in range(max_retries + 1):
        if attempt:
            work = perturb_payoffs(net, cfg.payoff_perturbation_scale, rng)
        H = _homotopy(work)
        y0 = uniform_target(work)[work.layout.free_coords]
        path = track(H, y0, cfg, cfg.endpoint_t,
                     admissible=lambda y, t: bool(np.all(y > 0)),
                     on_accept=_trace_writer(trace, work))
        if path.status == "converged":
            break
    else:
        raise DegenerateGame(f"homotopy failed after {max_retries} payoff perturbations: {path.message}", path)
    raw = lay.base.copy()
    raw[lay.free_coords] = path.end.x
    values, cls = extract_limit(work, raw)
    prof = Profile(net, values)
    unperturbed = classify(net, prof, "homotopy") if work is not net else None
    return FirstEquilibrium(prof, cls, path, perturbed=work is not net, attempts=attempt + 1,
                            unperturbed=unperturbed, seconds=time.perf_counter() - started)


@dataclass
class ComponentRun:
    nodes: tuple[str, ...]
    accepted_steps: int
    seconds: float


def first_equilibrium_decomposed(net: GNet, cfg: TrackerConfig | None = None) -> FirstEquilibrium:
    """Track each strategically independent component on its own and stitch the blocks."""
    from .decomposition import decompose, embed, project

    cfg = cfg or TrackerConfig()
    started = time.perf_counter()
    values = net.layout.base.copy()
    runs = []
    total_steps = 0
    perturbed = False
    for comp in decompose(net):
        if not comp.free_coordinates:
            continue
        sub = project(net, comp)
        res = track_first_equilibrium(sub, replace(cfg))
        embed(net, sub, res.profile.values, values)
        perturbed |= res.perturbed
        total_steps += res.path.accepted
        runs.append(ComponentRun(tuple(sub.nodes[k].name for k in range(len(sub.nodes))),
                                 res.path.accepted, res.seconds))
    prof = Profile(net, values)
    cls = classify(net, prof, "homotopy")
    path = TrackedPath([PathPoint(1.0, prof.free, 0.0, 0.0)], "converged")
    return FirstEquilibrium(prof, cls, path, perturbed=perturbed, seconds=time.perf_counter() - started,
                            components=runs)
