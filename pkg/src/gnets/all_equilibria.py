"""All equilibria by total-degree homotopy on the cleared-denominator system.

For every free decision coordinate j except one eliminated coordinate per
block, G_j = D_j * p_j - N_j. The start system is
alpha_j^d_j * x_j^d_j - beta_j^d_j with random complex alpha, beta, and each of
its prod(d_j) roots is tracked along (1 - t) G0 + t G to t = 1.
"""
from __future__ import annotations

import itertools
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .equilibrium import Label, classify
from .expectations import numerators_denominators, symbolic_decomposition
from .model import GNet
from .poly import Poly, PolySystem
from .profile import Profile, describe_block
from .tracking import Homotopy, TrackerConfig, newton, track


@dataclass
class SolveConfig:
    seed: int = 0
    tol: float = 1e-6                 # Nash slack
    divergence: float = 1e8
    cluster_radius: float = 1e-6
    imag_tol: float = 1e-7
    range_tol: float = 1e-7
    unreachable_tol: float = 1e-8
    residual_tol: float = 1e-10
    workers: int = 1
    tracker: TrackerConfig = field(default_factory=lambda: TrackerConfig(
        initial_step=0.01, min_step=1e-13, max_step=0.1, corrector_tol=1e-11,
        max_newton_iters=8, endpoint_t=1.0))


@dataclass
class EquilibriumSystem:
    """G together with the bookkeeping needed to map roots back to profiles."""

    net: GNet
    system: PolySystem
    var_coords: list[int]                 # flat profile coordinate of each variable
    eliminated: dict[int, list[int]]      # eliminated coordinate -> kept coordinates of its block
    dropped_blocks: list[int]             # free blocks with D identically zero

    @property
    def degrees(self) -> list[int]:
        return self.system.degrees

    @property
    def total_degree(self) -> int:
        return self.system.total_degree if len(self.system) else 1

    def full_values(self, x) -> np.ndarray:
        x = np.asarray(x)
        lay = self.net.layout
        vals = lay.base.astype(complex if np.iscomplexobj(x) else float)
        vals[self.var_coords] = x
        for e, kept in self.eliminated.items():
            vals[e] = 1 - vals[kept].sum()
        return vals


def build_poly_system(net: GNet) -> EquilibriumSystem:
    lay = net.layout
    sym = symbolic_decomposition(net)
    fc = [int(c) for c in lay.free_coords]
    old_index = {c: i for i, c in enumerate(fc)}
    nv_old = len(fc)

    dropped = []
    live_blocks = []
    for bi in lay.free_blocks:
        b = lay.blocks[bi]
        den = Poly(nv_old)
        for c in range(b.start, b.stop):
            den = den + sym[c]
        if den.chop().is_zero():
            dropped.append(bi)
        else:
            live_blocks.append(bi)

    var_coords = []
    eliminated = {}
    for bi in live_blocks:
        b = lay.blocks[bi]
        kept = list(range(b.start, b.stop - 1))
        var_coords.extend(kept)
        eliminated[b.stop - 1] = kept
    nv = len(var_coords)
    new_index = {c: i for i, c in enumerate(var_coords)}
    images = [None] * nv_old
    for c in fc:
        if c in new_index:
            images[old_index[c]] = Poly.var(nv, new_index[c])
        elif c in eliminated:
            img = Poly.const(nv, 1.0)
            for k in eliminated[c]:
                img = img - Poly.var(nv, new_index[k])
            images[old_index[c]] = img
        else:
            images[old_index[c]] = Poly.const(nv, lay.base[c])

    equations = []
    names = []
    for bi in live_blocks:
        b = lay.blocks[bi]
        numer = {c: sym[c].substitute(images) if nv_old else sym[c] for c in range(b.start, b.stop)}
        den = Poly(nv)
        for c in range(b.start, b.stop):
            den = den + numer[c]
        for c in range(b.start, b.stop - 1):
            g = (den * Poly.var(nv, new_index[c]) - numer[c]).chop()
            equations.append(g)
            node = net.nodes[b.node]
            names.append(f"{describe_block(net, bi)} = {node.domain[lay.coord_value[c]]}")
    system = PolySystem(equations, names)
    return EquilibriumSystem(net, system, var_coords, eliminated, dropped)


@dataclass
class StartSystem:
    alpha: np.ndarray
    beta: np.ndarray
    degrees: list[int]

    def __call__(self, x):
        d = np.array(self.degrees)
        return self.alpha**d * x**d - self.beta**d

    def jacobian(self, x):
        d = np.array(self.degrees)
        return np.diag(d * self.alpha**d * x ** (d - 1))

    def roots(self) -> list[np.ndarray]:
        per_var = [self.beta[i] / self.alpha[i] * np.exp(2j * np.pi * np.arange(d) / d)
                   for i, d in enumerate(self.degrees)]
        return [np.array(r) for r in itertools.product(*per_var)]


def build_start_system(esys: EquilibriumSystem, seed: int = 0) -> tuple[StartSystem, list[np.ndarray]]:
    rng = np.random.default_rng(seed)
    n = len(esys.system)

    def draw():
        return rng.uniform(0.5, 1.5, n) * np.exp(2j * np.pi * rng.uniform(0, 1, n))

    start = StartSystem(draw(), draw(), list(esys.degrees))
    roots = start.roots()
    for r in roots:
        if np.max(np.abs(start(r)), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(start.beta) ** np.array(start.degrees))):
            raise ArithmeticError("start root failed verification")
    return start, roots


@dataclass
class ComplexPathResult:
    index: int
    endpoint: np.ndarray
    status: str          # converged | diverged | truncated
    residual: float
    steps: int
    multiplicity: int = 1


def _homotopy(esys: EquilibriumSystem, start: StartSystem) -> Homotopy:
    G = esys.system

    def value(x, t):
        return (1 - t) * start(x) + t * G(x)

    def jac_x(x, t):
        return (1 - t) * start.jacobian(x) + t * G.jacobian(x)

    def jac_t(x, t):
        return G(x) - start(x)

    return Homotopy(value, jac_x, jac_t)


def _track_one(esys, start, root, index, cfg: SolveConfig) -> ComplexPathResult:
    H = _homotopy(esys, start)
    G = esys.system
    big = cfg.divergence
    path = track(H, root.astype(complex), cfg.tracker, 1.0,
                 diverged=lambda x: bool(np.max(np.abs(x)) > big))
    x = path.end.x
    steps = path.accepted
    if path.status == "diverged":
        return ComplexPathResult(index, x, "diverged", float("inf"), steps)
    t_end = path.end.t
    if path.status == "failed" and t_end < 0.99:
        return ComplexPathResult(index, x, "truncated", float("inf"), steps)
    # endpoint polish on G itself; singular endpoints converge slowly, so no contraction test
    root_x, res, _, ok = newton(Homotopy(lambda y, t: G(y), lambda y, t: G.jacobian(y), None),
                                x, 1.0, cfg.residual_tol, 60, contraction=False)
    if np.max(np.abs(root_x)) > big:
        return ComplexPathResult(index, root_x, "diverged", res, steps)
    if ok or res <= cfg.residual_tol:
        if np.max(np.abs(root_x - x)) < 1e-2 or path.status == "converged":
            return ComplexPathResult(index, root_x, "converged", res, steps)
    return ComplexPathResult(index, x, "truncated", res, steps)


def track_all_paths(esys: EquilibriumSystem, start: StartSystem, roots, cfg: SolveConfig) -> list[ComplexPathResult]:
    if len(esys.system) == 0:
        return [ComplexPathResult(0, np.zeros(0, dtype=complex), "converged", 0.0, 0)]
    jobs = list(enumerate(roots))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda ir: _track_one(esys, start, ir[1], ir[0], cfg), jobs))
    else:
        results = [_track_one(esys, start, r, i, cfg) for i, r in jobs]
    _cluster(results, cfg.cluster_radius)
    return results


def _cluster(results: list[ComplexPathResult], radius: float):
    conv = [r for r in results if r.status == "converged"]
    used = set()
    for r in conv:
        if r.index in used:
            continue
        group = [s for s in conv if s.index not in used and np.max(np.abs(s.endpoint - r.endpoint)) < radius]
        for s in group:
            used.add(s.index)
            s.multiplicity = len(group)


@dataclass
class EquilibriumReport:
    nash: list[Profile]
    fixed_points_non_nash: list[Profile]
    complex_or_infeasible_count: int
    path_statistics: dict[str, int]
    total_degree: int
    paths_tracked: int
    degrees: list[int] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    seconds: float = 0.0
    paths: list[ComplexPathResult] = field(default_factory=list)


def _dedupe(profiles: list[Profile], radius: float) -> list[Profile]:
    out: list[Profile] = []
    for p in profiles:
        if all(p.distance(q) >= radius for q in out):
            out.append(p)
    return out


def filter_and_classify(net: GNet, esys: EquilibriumSystem, results: list[ComplexPathResult],
                        cfg: SolveConfig | None = None) -> EquilibriumReport:
    cfg = cfg or SolveConfig()
    lay = net.layout
    stats = dict(nash=0, fixed_point_non_nash=0, not_fixed_point=0, complex=0, outside_simplex=0,
                 diverged=0, truncated=0)
    nash, non_nash, notes = [], [], []
    for r in results:
        if r.status != "converged":
            stats[r.status] += 1
            continue
        vals = esys.full_values(r.endpoint)
        if not _real_and_in_range(vals, cfg):
            xr = _real_projection(esys, r.endpoint, cfg)
            if xr is not None:
                vals = esys.full_values(xr).astype(complex)
                notes.append(f"path {r.index}: singular endpoint, real point recovered on its solution set")
        _, den = numerators_denominators(net, vals)
        loose = []           # free blocks not pinned down by G at this root
        for bi in lay.free_blocks:
            b = lay.blocks[bi]
            if abs(den[b.start]) <= cfg.unreachable_tol:
                loose.append(bi)
        pinned = np.ones(lay.n, dtype=bool)
        for bi in loose:
            b = lay.blocks[bi]
            pinned[b.start:b.stop] = False
        if np.max(np.abs(vals.imag[pinned]), initial=0.0) >= cfg.imag_tol:
            stats["complex"] += 1
            continue
        real = vals.real.copy()
        if np.any(real[pinned] < -cfg.range_tol) or np.any(real[pinned] > 1 + cfg.range_tol):
            stats["outside_simplex"] += 1
            continue
        real = np.clip(real, 0.0, 1.0)
        for bi in lay.free_blocks:
            b = lay.blocks[bi]
            s = real[b.start:b.stop].sum()
            real[b.start:b.stop] = real[b.start:b.stop] / s if s > 0 else 1.0 / len(b.actions)
        prof, cls = _settle_loose_blocks(net, real, loose, cfg)
        if loose:
            notes.append(f"path {r.index}: unreachable info sets "
                         + "; ".join(describe_block(net, bi) for bi in loose))
        if cls.label == Label.NASH:
            stats["nash"] += 1
            nash.append(prof)
        elif cls.label == Label.FIXED_POINT_NON_NASH:
            stats["fixed_point_non_nash"] += 1
            non_nash.append(prof)
        else:
            stats["not_fixed_point"] += 1
    complex_count = stats["complex"] + stats["outside_simplex"]
    return EquilibriumReport(_dedupe(nash, cfg.cluster_radius), _dedupe(non_nash, cfg.cluster_radius),
                             complex_count, stats, esys.total_degree, len(results), list(esys.degrees),
                             sorted(set(notes)), paths=results)


def _real_and_in_range(vals, cfg: SolveConfig) -> bool:
    return (np.max(np.abs(vals.imag), initial=0.0) < cfg.imag_tol
            and np.all(vals.real >= -cfg.range_tol) and np.all(vals.real <= 1 + cfg.range_tol))


def _real_projection(esys: EquilibriumSystem, x, cfg: SolveConfig, iters: int = 30):
    """Real solution near a complex endpoint lying on a positive-dimensional solution set.

    Such endpoints are generic, hence complex, points of a curve or surface
    of roots. Only singular endpoints qualify; the real part is clipped into
    range and Gauss-Newton (minimum-norm steps) pulls it back onto the set.
    """
    jac = esys.system.jacobian(x)
    sv = np.linalg.svd(jac, compute_uv=False)
    if len(sv) == 0 or sv[-1] > 1e-6 * max(1.0, sv[0]):
        return None
    xr = np.clip(np.real(x), 0.0, 1.0)
    for _ in range(iters):
        res = np.real(esys.system(xr))
        if np.max(np.abs(res)) <= cfg.residual_tol:
            break
        xr = xr + np.linalg.lstsq(np.real(esys.system.jacobian(xr)), -res, rcond=None)[0]
    if np.max(np.abs(np.real(esys.system(xr)))) > cfg.residual_tol:
        return None
    if not _real_and_in_range(esys.full_values(xr).astype(complex), cfg):
        return None
    return xr


def _settle_loose_blocks(net: GNet, real: np.ndarray, loose: list[int], cfg: SolveConfig):
    """Pick behavior at unreachable info sets that supports the rest as an equilibrium, if any does.

    G vanishes identically on such blocks, so the root says nothing about
    them. Candidates per block: each pure action, uniform, the root's value.
    """
    lay = net.layout
    if not loose:
        prof = Profile(net, real)
        return prof, classify(net, prof, "polynomial", cfg.tol)
    options = []
    for bi in loose:
        b = lay.blocks[bi]
        k = len(b.actions)
        opts = [np.eye(k)[a] for a in range(k)] + [np.full(k, 1.0 / k), real[b.start:b.stop].copy()]
        options.append(opts)
    for n_tried, combo in enumerate(itertools.product(*options)):
        if n_tried >= 512:
            break
        vals = real.copy()
        for bi, row in zip(loose, combo):
            b = lay.blocks[bi]
            vals[b.start:b.stop] = row
        prof = Profile(net, vals)
        cls = classify(net, prof, "polynomial", cfg.tol)
        if cls.label == Label.NASH:
            return prof, cls
    vals = real.copy()
    prof = Profile(net, vals)
    return prof, classify(net, prof, "polynomial", cfg.tol)


def all_equilibria(net: GNet, cfg: SolveConfig | None = None) -> EquilibriumReport:
    cfg = cfg or SolveConfig()
    started = time.perf_counter()
    esys = build_poly_system(net)
    if len(esys.system) == 0:
        results = track_all_paths(esys, None, [], cfg)
    else:
        start, roots = build_start_system(esys, cfg.seed)
        results = track_all_paths(esys, start, roots, cfg)
    report = filter_and_classify(net, esys, results, cfg)
    if esys.dropped_blocks:
        report.notes.append("structurally unreachable info sets: "
                            + "; ".join(describe_block(net, bi) for bi in esys.dropped_blocks))
    report.seconds = time.perf_counter() - started
    return report


def all_equilibria_decomposed(net: GNet, cfg: SolveConfig | None = None) -> EquilibriumReport:
    """Solve each independent component separately; the joint Nash set is their product."""
    from .decomposition import decompose, embed, project

    cfg = cfg or SolveConfig()
    started = time.perf_counter()
    parts = []
    stats: dict[str, int] = {}
    tracked = 0
    degrees = []
    notes = []
    cmplx = 0
    for comp in decompose(net):
        if not comp.free_coordinates:
            continue
        sub = project(net, comp)
        rep = all_equilibria(sub, cfg)
        parts.append((sub, rep))
        tracked += rep.paths_tracked
        degrees.append(rep.total_degree)
        cmplx += rep.complex_or_infeasible_count
        for k, v in rep.path_statistics.items():
            stats[k] = stats.get(k, 0) + v
        notes += [f"[{', '.join(n.name for n in sub.nodes)}] {n}" for n in rep.notes]
    nash = []
    for combo in itertools.product(*(rep.nash for _, rep in parts)):
        vals = net.layout.base.copy()
        for (sub, _), prof in zip(parts, combo):
            embed(net, sub, prof.values, vals)
        nash.append(Profile(net, vals))
    non_nash = []
    # paths add up across components; the joint Bezout number would be their product
    report = EquilibriumReport(nash, non_nash, cmplx, stats, int(sum(degrees)), tracked, degrees, notes)
    report.seconds = time.perf_counter() - started
    return report
