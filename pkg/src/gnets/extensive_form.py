"""Extensive-form trees, their conversion to G frames, and the agent-form oracle.

Conversion groups tree nodes into stage variables. Stages a play can skip
get an extra ``inactive`` value, forced by the CPT (chance stages) or by
action availability (decision stages). Each decision stage observes a
minimal set of earlier stages that identifies its information sets.
Payoffs are factored along the stage order by the chain rule and the
resulting tables are pruned wherever a ratio test shows no dependence.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .model import NATURE, GNet, GNode, PotentialTable, check

INACTIVE = "inactive"
RATIO_TOL = 1e-9
MAX_AGENT_ENTRIES = 10**6
MAX_ORACLE_PROFILES = 10**5


class UnsupportedStructure(ValueError):
    """The tree is outside what the conversion supports (e.g. imperfect recall)."""


class OracleTooLarge(ValueError):
    pass


# -- trees -------------------------------------------------------------------

@dataclass
class EfNode:
    name: str
    kind: str                              # chance | decision | leaf
    parent: str | None = None
    via: str | None = None                 # parent's action leading here
    player: str | None = None
    infoset: str | None = None
    actions: tuple[str, ...] = ()
    probs: tuple[float, ...] = ()
    payoffs: dict[str, float] = field(default_factory=dict)
    stage: str | None = None


@dataclass
class EfTree:
    players: tuple[str, ...]
    nodes: dict[str, EfNode]

    def __post_init__(self):
        self.children: dict[tuple[str, str], str] = {}
        roots = []
        for nd in self.nodes.values():
            if nd.parent is None:
                roots.append(nd.name)
                continue
            if nd.parent not in self.nodes:
                raise ValueError(f"{nd.name}: unknown parent {nd.parent!r}")
            par = self.nodes[nd.parent]
            if nd.via not in par.actions:
                raise ValueError(f"{nd.name}: {par.name} has no action {nd.via!r}")
            key = (nd.parent, nd.via)
            if key in self.children:
                raise ValueError(f"{nd.name}: {nd.parent}/{nd.via} already has a child")
            self.children[key] = nd.name
        if len(roots) != 1:
            raise ValueError(f"tree needs exactly one root, found {roots}")
        self.root = roots[0]
        self._validate()

    def _validate(self):
        for nd in self.nodes.values():
            if nd.kind == "leaf":
                if set(nd.payoffs) != set(self.players):
                    raise ValueError(f"leaf {nd.name} needs a payoff for each of {self.players}")
                if any(v <= 0 for v in nd.payoffs.values()):
                    raise ValueError(f"leaf {nd.name}: payoffs must be strictly positive")
                continue
            if not nd.actions:
                raise ValueError(f"{nd.name} has no actions")
            for a in nd.actions:
                if (nd.name, a) not in self.children:
                    raise ValueError(f"{nd.name}/{a} leads nowhere")
            if nd.kind == "chance":
                if len(nd.probs) != len(nd.actions) or any(q < 0 for q in nd.probs) \
                        or abs(sum(nd.probs) - 1) > 1e-12:
                    raise ValueError(f"chance node {nd.name}: probabilities must sum to 1")
            elif nd.kind == "decision":
                if nd.player not in self.players:
                    raise ValueError(f"{nd.name}: unknown player {nd.player!r}")
            else:
                raise ValueError(f"{nd.name}: unknown kind {nd.kind!r}")
        for label, members in self.infosets.items():
            first = self.nodes[members[0]]
            for m in members[1:]:
                nd = self.nodes[m]
                if nd.player != first.player or nd.actions != first.actions:
                    raise ValueError(f"info set {label} mixes players or action sets")
        self.check_perfect_recall()

    def path(self, name: str) -> list[tuple[str, str]]:
        """(node, action) pairs from the root down to ``name``."""
        out = []
        nd = self.nodes[name]
        while nd.parent is not None:
            out.append((nd.parent, nd.via))
            nd = self.nodes[nd.parent]
        return out[::-1]

    def depth(self, name: str) -> int:
        return len(self.path(name))

    @property
    def infosets(self) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for nd in self.nodes.values():
            if nd.kind == "decision":
                out.setdefault(nd.infoset or nd.name, []).append(nd.name)
        return out

    @property
    def leaves(self) -> list[str]:
        return [n for n, nd in self.nodes.items() if nd.kind == "leaf"]

    def check_perfect_recall(self):
        for label, members in self.infosets.items():
            player = self.nodes[members[0]].player
            histories = set()
            for m in members:
                own = tuple((self._label(n), a) for n, a in self.path(m)
                            if self.nodes[n].kind == "decision" and self.nodes[n].player == player)
                histories.add(own)
            if len(histories) > 1:
                raise UnsupportedStructure(f"imperfect recall at info set {label}")

    def _label(self, name):
        nd = self.nodes[name]
        return nd.infoset or nd.name

    def reach_probability(self, name: str) -> float:
        q = 1.0
        for n, a in self.path(name):
            nd = self.nodes[n]
            if nd.kind == "chance":
                q *= nd.probs[nd.actions.index(a)]
        return q

    def agent_form(self) -> "AgentForm":
        """Agent form computed straight from the tree (independent of any conversion)."""
        labels = [lab for lab, mem in self.infosets.items() if len(self.nodes[mem[0]].actions) > 1]
        agents = [Agent(lab, self.nodes[self.infosets[lab][0]].player,
                        self.nodes[self.infosets[lab][0]].actions) for lab in labels]
        sizes = tuple(len(a.actions) for a in agents)
        _guard(len(agents) * math.prod(sizes), MAX_AGENT_ENTRIES)
        pos = {lab: i for i, lab in enumerate(labels)}
        tensors = {pl: np.zeros(sizes) for pl in self.players}
        for leaf in self.leaves:
            q = self.reach_probability(leaf)
            fixed = {}
            for n, a in self.path(leaf):
                nd = self.nodes[n]
                lab = self._label(n)
                if nd.kind == "decision" and lab in pos:
                    fixed[pos[lab]] = nd.actions.index(a)
            sl = tuple(fixed.get(i, slice(None)) for i in range(len(agents)))
            for pl in self.players:
                tensors[pl][sl] += q * self.nodes[leaf].payoffs[pl]
        return AgentForm(agents, [tensors[a.player] for a in agents])


# -- conversion ----------------------------------------------------------------

@dataclass
class Conversion:
    net: GNet
    stages: list[str]
    # tree info-set label -> (node index, parent assignment)
    infoset_blocks: dict[str, tuple[int, tuple[int, ...]]]

    def tree_strategies(self, values: np.ndarray) -> dict[str, dict[str, float]]:
        """Map a net profile back to {info set: {action: probability}}."""
        lay = self.net.layout
        out = {}
        for lab, (k, h) in self.infoset_blocks.items():
            b = lay.block_of(k, h)
            dom = self.net.nodes[k].domain
            out[lab] = {dom[a]: float(values[b.start + i]) for i, a in enumerate(b.actions)}
        return out


def _stage_key(tree: EfTree, nd: EfNode):
    if nd.stage:
        return nd.stage
    owner = NATURE if nd.kind == "chance" else nd.player
    return f"{owner}@{tree.depth(nd.name)}"


def ef_conversion(tree: EfTree) -> Conversion:
    inner = [nd for nd in tree.nodes.values() if nd.kind != "leaf"]
    stage_of = {nd.name: _stage_key(tree, nd) for nd in inner}
    order: list[str] = []
    for nd in sorted(inner, key=lambda nd: tree.depth(nd.name)):
        if stage_of[nd.name] not in order:
            order.append(stage_of[nd.name])
    sidx = {s: i for i, s in enumerate(order)}
    for lab, members in tree.infosets.items():
        if len({stage_of[m] for m in members}) > 1:
            raise UnsupportedStructure(f"info set {lab} spans several stages; label them with stage=")
    kinds = {}
    for nd in inner:
        kinds.setdefault(stage_of[nd.name], set()).add(
            NATURE if nd.kind == "chance" else nd.player)
    for s, owners in kinds.items():
        if len(owners) > 1:
            raise UnsupportedStructure(f"stage {s} mixes owners {sorted(owners)}")

    # every play, as stage -> action (absent = inactive)
    plays = []
    for leaf in tree.leaves:
        row = {}
        for n, a in tree.path(leaf):
            s = stage_of[n]
            if s in row:
                raise UnsupportedStructure(f"a play passes stage {s} twice; label stages explicitly")
            row[s] = (n, a)
        plays.append((leaf, row))

    domains = []
    for s in order:
        acts: list[str] = []
        for nd in inner:
            if stage_of[nd.name] == s:
                acts += [a for a in nd.actions if a not in acts]
        if any(s not in row for _, row in plays):
            if INACTIVE in acts:
                raise UnsupportedStructure(f"action name {INACTIVE!r} is reserved")
            acts.append(INACTIVE)
        domains.append(tuple(acts))

    def value(row, s):
        dom = domains[sidx[s]]
        return dom.index(row[s][1]) if s in row else dom.index(INACTIVE)

    # reference point: the first play in file order
    ref_row = plays[0][1]
    refs = [value(ref_row, s) for s in order]

    def project(row, stages):
        return tuple(value(row, t) for t in stages)

    parents: list[tuple[int, ...]] = []
    for i, s in enumerate(order):
        earlier = order[:i]
        # what each play looks like at this stage: the tree node's info set / chance node, or inactive
        tag = []
        for _, row in plays:
            if s in row:
                nd = tree.nodes[row[s][0]]
                tag.append(("c", nd.actions, nd.probs) if nd.kind == "chance" else ("d", tree._label(nd.name)))
            else:
                tag.append(("-",))
        is_chance = NATURE in kinds[s]
        cand = list(earlier)
        if not is_chance:
            # drop stages an info set cannot observe (differ inside the info set)
            for t in earlier:
                seen: dict = {}
                for (leaf, row), g in zip(plays, tag):
                    if g[0] == "d" and seen.setdefault(g, value(row, t)) != value(row, t):
                        cand.remove(t)
                        break

        def separates(stages):
            seen: dict = {}
            for (_, row), g in zip(plays, tag):
                if seen.setdefault(project(row, stages), g) != g:
                    return False
            return True

        if not separates(cand):
            raise UnsupportedStructure(f"stage {s}: observable stages cannot identify its info sets")
        for t in reversed(list(cand)):
            trial = [u for u in cand if u != t]
            if separates(trial):
                cand = trial
        parents.append(tuple(sidx[t] for t in cand))

    # nodes, availability and CPTs
    nodes, cpts = [], {}
    infoset_blocks: dict[str, tuple[int, tuple[int, ...]]] = {}
    for i, s in enumerate(order):
        dom = domains[i]
        pstages = [order[m] for m in parents[i]]
        seen = {}
        for (_, row) in plays:
            h = project(row, pstages)
            seen[h] = row[s][0] if s in row else None
        psizes = [len(domains[m]) for m in parents[i]]
        inactive = dom.index(INACTIVE) if INACTIVE in dom else None
        if NATURE in kinds[s]:
            cpt = np.zeros(tuple(psizes) + (len(dom),))
            for h in itertools.product(*(range(z) for z in psizes)):
                nm = seen.get(h)
                if nm is None:
                    cpt[h + ((inactive if inactive is not None else 0),)] = 1.0
                else:
                    nd = tree.nodes[nm]
                    for a, q in zip(nd.actions, nd.probs):
                        cpt[h + (dom.index(a),)] = q
            cpts[i] = cpt
            nodes.append(GNode(s, NATURE, dom, parents[i], refs[i]))
            continue
        player = next(iter(kinds[s]))
        avail = {}
        for h in itertools.product(*(range(z) for z in psizes)):
            nm = seen.get(h, "?")
            if nm is None:
                avail[h] = (inactive,)
            elif nm == "?":
                # never reached by any play: pin it so it adds no unknowns
                avail[h] = (inactive if inactive is not None else refs[i],)
            else:
                nd = tree.nodes[nm]
                avail[h] = tuple(dom.index(a) for a in nd.actions)
                infoset_blocks[tree._label(nm)] = (i, h)
        avail = {h: a for h, a in avail.items() if a != tuple(range(len(dom)))}
        nodes.append(GNode(s, player, dom, parents[i], refs[i], avail))

    tables, uarcs = _factor_payoffs(tree, order, domains, plays, value, refs)
    net = check(GNet(tuple(nodes), tuple(tree.players), tuple(uarcs), tuple(tables), cpts))
    return Conversion(net, order, infoset_blocks)


def ef_to_gframe(tree: EfTree) -> GNet:
    return ef_conversion(tree).net


def _factor_payoffs(tree, order, domains, plays, value, refs):
    """Chain-rule potentials along the stage order, pruned by a ratio test."""
    sizes = tuple(len(d) for d in domains)
    tables, uarcs = [], []
    for pl in tree.players:
        u = np.full(sizes, np.nan)
        for leaf, row in plays:
            u[tuple(value(row, s) for s in order)] = tree.nodes[leaf].payoffs[pl]
        u = u / u[tuple(refs)]
        # unreachable joint states carry no probability; give them utility 1
        u[np.isnan(u)] = 1.0
        prev = None
        for k in range(len(order)):
            # u evaluated with stages after k at the reference point
            sl = tuple(slice(None) if m <= k else refs[m] for m in range(len(order)))
            cur = u[sl]
            if prev is None:
                w = cur
            else:
                ref_k = np.take(cur, [refs[k]], axis=k)
                w = cur / ref_k
            prev = cur
            # w has axes over stages 0..k; node k first
            w = np.moveaxis(w, k, 0)
            nbrs = list(range(k))
            for m in reversed(range(k)):
                ax = 1 + nbrs.index(m)
                first = np.take(w, [0], axis=ax)
                if np.all(np.abs(w - first) <= RATIO_TOL * np.abs(first)):
                    w = first.squeeze(axis=ax)
                    nbrs.remove(m)
            if np.all(np.abs(w - 1.0) <= RATIO_TOL):
                continue
            w = np.array(w, dtype=float)
            w[refs[k]] = 1.0
            tables.append(PotentialTable(pl, k, tuple(nbrs), w))
            uarcs += [(pl, m, k) for m in nbrs]
    return tables, uarcs


# -- agent form ------------------------------------------------------------------

@dataclass(frozen=True)
class Agent:
    label: str
    player: str
    actions: tuple[str, ...]


@dataclass
class AgentForm:
    agents: list[Agent]
    payoffs: list[np.ndarray]      # payoffs[i][a_0, ..., a_m] for agent i
    blocks: list[int] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a.actions) for a in self.agents)

    def dump(self) -> str:
        """Plain-text tensor listing, one pure profile per line."""
        lines = ["agents " + " ".join(f"{a.label}:{a.player}:{','.join(a.actions)}" for a in self.agents)]
        for idx in itertools.product(*(range(s) for s in self.shape)):
            vals = " ".join(repr(float(t[idx])) for t in self.payoffs)
            lines.append(" ".join(map(str, idx)) + " : " + vals)
        return "\n".join(lines) + "\n"


def _guard(count, limit):
    if count > limit:
        raise OracleTooLarge(f"{count} entries exceeds the oracle limit {limit}")


def to_agent_form(net: GNet) -> AgentForm:
    """One pseudo-player per free information set; payoffs are ex-ante expected utilities."""
    lay = net.layout
    free = list(lay.free_blocks)
    agents = []
    for bi in free:
        b = lay.blocks[bi]
        node = net.nodes[b.node]
        h = ",".join(f"{net.nodes[m].name}={net.nodes[m].domain[v]}" for m, v in zip(node.parents, b.parent_values))
        agents.append(Agent(f"{node.name}|{h}" if h else node.name, node.player,
                            tuple(node.domain[a] for a in b.actions)))
    sizes = tuple(len(a.actions) for a in agents)
    _guard(len(agents) * math.prod(sizes), MAX_AGENT_ENTRIES)
    profiles = list(itertools.product(*(range(s) for s in sizes)))
    vals = np.repeat(lay.base[None, :], len(profiles), axis=0)
    for r, combo in enumerate(profiles):
        for bi, a in zip(free, combo):
            b = lay.blocks[bi]
            vals[r, b.start:b.stop] = 0.0
            vals[r, b.start + a] = 1.0
    eu = {pl: np.zeros(len(profiles)) for pl in net.players}
    if len(lay.idx):
        chunk = max(1, 4_000_000 // lay.idx.size)
        for lo in range(0, len(profiles), chunk):
            probs = vals[lo:lo + chunk][:, lay.idx].prod(axis=2)
            for pl in net.players:
                eu[pl][lo:lo + chunk] = probs @ lay.utilities[pl]
    eu = {pl: e.reshape(sizes) for pl, e in eu.items()}
    return AgentForm(agents, [eu[a.player] for a in agents], free)


def agents_to_values(net: GNet, agent: AgentForm, strategies) -> np.ndarray:
    v = net.layout.base.copy()
    for bi, s in zip(agent.blocks, strategies):
        b = net.layout.blocks[bi]
        v[b.start:b.stop] = s
    return v


def values_to_agents(net: GNet, agent: AgentForm, values) -> list[np.ndarray]:
    lay = net.layout
    return [np.asarray(values[lay.blocks[bi].start:lay.blocks[bi].stop], dtype=float) for bi in agent.blocks]


# -- support-enumeration oracle -------------------------------------------------

@dataclass
class OraclePiece:
    """Equilibria sharing one support pattern.

    ``solution`` gives every agent's probabilities as sympy expressions in
    ``params`` (some unconstrained probabilities); ``constraints`` must be
    >= 0 and ``positive`` > 0 on the piece. With no params the piece is a point.
    """

    support: tuple[tuple[int, ...], ...]
    solution: list[list]
    params: list
    constraints: list
    positive: list
    witness: list[np.ndarray]

    @property
    def isolated(self) -> bool:
        return not self.params

    def contains(self, strategies, tol: float = 1e-6) -> bool:
        """Closure membership: q matches the parametrization and weakly satisfies every constraint."""
        q = [np.asarray(s, dtype=float) for s in strategies]
        for i, sup in enumerate(self.support):
            off = [a for a in range(len(q[i])) if a not in sup]
            if np.any(np.abs(q[i][off]) > tol):
                return False
        subs = {}
        for p in self.params:
            i, a = _param_pos(p)
            subs[p] = q[i][a]
        for i, row in enumerate(self.solution):
            for a, expr in enumerate(row):
                try:
                    val = complex(expr.subs(subs).evalf())
                except (TypeError, ZeroDivisionError):
                    return False
                if not np.isfinite(val) or abs(val - q[i][a]) > tol:
                    return False
        for c in self.constraints:
            if float(c.subs(subs).evalf()) < -tol:
                return False
        return True


def _param_pos(sym):
    _, i, a = sym.name.split("_")
    return int(i), int(a)


def oracle_support_enumeration(agent: AgentForm, max_grid: int = 41) -> list[OraclePiece]:
    """All agent-form Nash equilibria, grouped by support pattern.

    Indifference systems are solved exactly with rational payoffs. Pieces
    with one free parameter are checked with exact interval arithmetic;
    pieces with more are checked on a grid.
    """
    import sympy as sp

    sizes = agent.shape
    _guard(math.prod(sizes), MAX_ORACLE_PROFILES)
    m = len(sizes)
    if m == 0:
        return [OraclePiece((), [], [], [], [], [])]
    pay = [np.vectorize(lambda x: sp.Rational(repr(float(x))), otypes=[object])(t) for t in agent.payoffs]
    syms = [[sp.Symbol(f"p_{i}_{a}") for a in range(s)] for i, s in enumerate(sizes)]
    pieces = []
    subsets = [[c for r in range(1, s + 1) for c in itertools.combinations(range(s), r)] for s in sizes]
    for support in itertools.product(*subsets):
        # probabilities: zero off support, last support action takes the remainder
        probs = []
        unknowns = []
        for i, sup in enumerate(support):
            row = [sp.Integer(0)] * sizes[i]
            for a in sup[:-1]:
                row[a] = syms[i][a]
                unknowns.append(syms[i][a])
            row[sup[-1]] = 1 - sum((syms[i][a] for a in sup[:-1]), sp.Integer(0))
            probs.append(row)
        eus = [_action_values(pay[i], probs, i) for i in range(m)]
        eqs = []
        for i, sup in enumerate(support):
            for a in sup[:-1]:
                e = sp.expand(eus[i][a] - eus[i][sup[-1]])
                if e != 0:
                    eqs.append(e)
        if eqs:
            sols = sp.solve(eqs, unknowns, dict=True)
        else:
            sols = [{}]
        for sol in sols:
            sol_probs = [[sp.simplify(x.subs(sol)) for x in row] for row in probs]
            params = sorted({s for row in sol_probs for x in row for s in x.free_symbols}, key=str)
            positive = [sol_probs[i][a] for i, sup in enumerate(support) for a in sup]
            cons = []
            for i, sup in enumerate(support):
                best = eus[i][sup[-1]].subs(sol)
                for a in range(sizes[i]):
                    if a not in sup:
                        cons.append(sp.simplify(best - eus[i][a].subs(sol)))
            witness = _feasible_point(sol_probs, params, positive, cons, max_grid)
            if witness is not None:
                pieces.append(OraclePiece(tuple(support), sol_probs, params, cons, positive, witness))
    return pieces


def _action_values(pay, probs, i):
    """Expected payoff of each of agent i's pure actions against the others' mixtures."""
    import sympy as sp

    sizes = pay.shape
    out = []
    for a in range(sizes[i]):
        total = sp.Integer(0)
        for idx in itertools.product(*(range(s) for s in sizes)):
            if idx[i] != a:
                continue
            w = pay[idx]
            for j, x in enumerate(idx):
                if j != i:
                    w = w * probs[j][x]
                    if w == 0:
                        break
            total += w
        out.append(total)
    return out


def _feasible_point(sol_probs, params, positive, cons, max_grid):
    import sympy as sp

    def numeric(subs):
        return [np.array([float(x.subs(subs)) for x in row]) for row in sol_probs]

    if not params:
        if any(not sp.nsimplify(x).is_real for row in sol_probs for x in row):
            return None
        if all(sp.nsimplify(x) > 0 for x in positive) and all(sp.nsimplify(c) >= 0 for c in cons):
            return numeric({})
        return None
    if len(params) == 1:
        (t,) = params
        region = sp.Interval(0, 1)
        try:
            for x in positive:
                region = region & sp.solve_univariate_inequality(x > 0, t, relational=False)
            for c in cons:
                region = region & sp.solve_univariate_inequality(c >= 0, t, relational=False)
        except (NotImplementedError, TypeError, ValueError):
            region = None
        if region is not None:
            if region.is_empty:
                return None
            pt = _pick(region)
            return numeric({t: pt})
    for vals in itertools.product(np.linspace(0, 1, max_grid), repeat=len(params)):
        subs = dict(zip(params, map(sp.Rational, map(str, vals))))
        try:
            if all(x.subs(subs) > 0 for x in positive) and all(c.subs(subs) >= 0 for c in cons):
                return numeric(subs)
        except TypeError:
            continue
    return None


def _pick(region):
    import sympy as sp

    if isinstance(region, sp.Union):
        region = region.args[0]
    if isinstance(region, sp.FiniteSet):
        return next(iter(region))
    lo, hi = region.inf, region.sup
    return (lo + hi) / 2


def nash_matches(net: GNet, agent: AgentForm, pieces: list[OraclePiece], profiles, tol: float = 1e-6):
    """(unmatched solver profiles, oracle pieces with no solver profile in their closure)."""
    strat = [values_to_agents(net, agent, p.values) for p in profiles]
    stray = [p for p, s in zip(profiles, strat) if not any(pc.contains(s, tol) for pc in pieces)]
    missed = [pc for pc in pieces if not any(pc.contains(s, tol) for s in strat)]
    return stray, missed


def fraction(text: str) -> float:
    """Parse a decimal or an exact a/b fraction."""
    return float(Fraction(text.strip()))
