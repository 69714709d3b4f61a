"""Line-oriented text formats: game files, extensive-form files and solution files.

Game file::

    players 1 2
    node Type player=nature domain=S,W
    node Drink player=1 domain=B,Q parents=Type
    reference Type=S, Drink=B
    avail Drink | Type=W : B
    uarc 1 Type Drink
    potential 1 Drink | Type=S : Q=1/2
    cpt Type | : S=9/10, W=1/10

Numbers may be decimals or fractions ``a/b``. ``#`` starts a comment.
Declarations must come in the order nodes, arcs, tables.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import NATURE, GNet, GNode, InvalidNet, PotentialTable, validate
from .profile import Profile

# section ranks: later keywords may not precede earlier ones
_RANK = {"players": 0, "node": 1, "reference": 1, "avail": 1, "uarc": 2, "potential": 3, "cpt": 3}


class ParseError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        self.line, self.col, self.message = line, col, message
        super().__init__(f"line {line}, column {col}: {message}")


def _number(text: str, line: int, col: int) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ParseError(line, col, f"malformed number {text.strip()!r}") from None


@dataclass
class _Tok:
    """A raw line with helpers that report positions."""

    text: str
    line: int

    def col(self, fragment: str) -> int:
        i = self.text.find(fragment)
        return i + 1 if i >= 0 else 1

    def fail(self, fragment: str, message: str):
        raise ParseError(self.line, self.col(fragment), message)


def _lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].rstrip()
        if body.strip():
            yield _Tok(body, n)


def _keyvals(tok: _Tok, parts: list[str]) -> dict[str, str]:
    out = {}
    for p in parts:
        if "=" not in p:
            tok.fail(p, f"expected key=value, got {p!r}")
        k, v = p.split("=", 1)
        out[k] = v
    return out


def _split_table(tok: _Tok):
    """'<head> | <assign> : <entries>' -> (head words, assignment pairs, entry pairs)."""
    if ":" not in tok.text:
        tok.fail(tok.text.split()[0], "expected ':' before the entries")
    head, entries = tok.text.split(":", 1)
    if "|" in head:
        head, assign = head.split("|", 1)
    else:
        assign = ""
    pairs = []
    for item in filter(None, (s.strip() for s in assign.split(","))):
        if "=" not in item:
            tok.fail(item, f"expected node=value, got {item!r}")
        pairs.append(tuple(s.strip() for s in item.split("=", 1)))
    vals = [s.strip() for s in entries.split(",") if s.strip()]
    return head.split(), pairs, vals


def parse_game(text: str) -> GNet:
    players: tuple[str, ...] = ()
    nodes: list[dict] = []
    names: dict[str, int] = {}
    uarcs: list[tuple[str, int, int]] = []
    tables: dict[tuple[str, int], dict] = {}
    cpt_rows: dict[int, dict] = {}
    rank = 0

    def node_of(tok, name):
        if name not in names:
            tok.fail(name, f"unknown node {name!r}")
        return names[name]

    def value_of(tok, k, val):
        dom = nodes[k]["domain"]
        if val not in dom:
            tok.fail(val, f"{val!r} is not a value of {nodes[k]['name']}")
        return dom.index(val)

    for tok in _lines(text):
        words = tok.text.split()
        kw = words[0]
        if kw not in _RANK:
            tok.fail(kw, f"unknown keyword {kw!r}")
        if _RANK[kw] < rank:
            tok.fail(kw, f"{kw!r} must come before later sections (nodes, then arcs, then tables)")
        rank = _RANK[kw]
        if kw == "players":
            if players:
                tok.fail(kw, "players declared twice")
            players = tuple(words[1:])
            if not players:
                tok.fail(kw, "no players listed")
        elif kw == "node":
            if len(words) < 2:
                tok.fail(kw, "node needs a name")
            name = words[1]
            if name in names:
                tok.fail(name, f"duplicate node {name!r}")
            kv = _keyvals(tok, words[2:])
            for key in kv:
                if key not in ("player", "domain", "parents"):
                    tok.fail(key, f"unknown node attribute {key!r}")
            if "player" not in kv or "domain" not in kv:
                tok.fail(name, "node needs player= and domain=")
            pl = kv["player"]
            if pl != NATURE and pl not in players:
                tok.fail(pl, f"unknown player {pl!r}")
            parents = tuple(node_of(tok, p) for p in kv.get("parents", "").split(",") if p)
            domain = tuple(kv["domain"].split(","))
            names[name] = len(nodes)
            nodes.append(dict(name=name, player=pl, domain=domain, parents=parents, reference=0, available={}))
        elif kw == "reference":
            for item in filter(None, (s.strip() for s in tok.text[len(kw):].split(","))):
                if "=" not in item:
                    tok.fail(item, "expected node=value")
                nm, val = (s.strip() for s in item.split("=", 1))
                k = node_of(tok, nm)
                nodes[k]["reference"] = value_of(tok, k, val)
        elif kw == "avail":
            head, pairs, vals = _split_table(tok)
            if len(head) != 2:
                tok.fail(kw, "expected 'avail <node> | <assignment> : <values>'")
            k = node_of(tok, head[1])
            h = _parent_assignment(tok, nodes, names, k, pairs, node_of, value_of)
            nodes[k]["available"][h] = tuple(value_of(tok, k, v) for v in vals)
        elif kw == "uarc":
            if len(words) != 4:
                tok.fail(kw, "expected 'uarc <player> <nodeA> <nodeB>'")
            if words[1] not in players:
                tok.fail(words[1], f"unknown player {words[1]!r}")
            uarcs.append((words[1], node_of(tok, words[2]), node_of(tok, words[3])))
        elif kw == "potential":
            head, pairs, vals = _split_table(tok)
            if len(head) != 3:
                tok.fail(kw, "expected 'potential <player> <node> | <assignment> : <entries>'")
            pl, k = head[1], node_of(tok, head[2])
            if pl not in players:
                tok.fail(pl, f"unknown player {pl!r}")
            nbrs = tuple(node_of(tok, nm) for nm, _ in pairs)
            for m in nbrs:
                if not any(p == pl and {a, b} == {k, m} for p, a, b in uarcs):
                    tok.fail(nodes[m]["name"], f"no utility arc for player {pl} between "
                                               f"{nodes[k]['name']} and {nodes[m]['name']}")
            tab = tables.setdefault((pl, k), {"nbrs": nbrs, "rows": {}, "line": tok.line})
            if tab["nbrs"] != nbrs:
                tok.fail(head[2], "all lines of a table must condition on the same neighbors")
            hv = tuple(value_of(tok, m, v) for m, (_, v) in zip(nbrs, pairs))
            for item in vals:
                if "=" not in item:
                    tok.fail(item, "expected value=weight")
                val, w = (s.strip() for s in item.split("=", 1))
                key = (value_of(tok, k, val), hv)
                if key in tab["rows"]:
                    tok.fail(item, "duplicate potential entry")
                tab["rows"][key] = _number(w, tok.line, tok.col(item))
        elif kw == "cpt":
            head, pairs, vals = _split_table(tok)
            if len(head) != 2:
                tok.fail(kw, "expected 'cpt <node> | <assignment> : <entries>'")
            k = node_of(tok, head[1])
            if nodes[k]["player"] != NATURE:
                tok.fail(head[1], "CPTs belong to Nature nodes only")
            h = _parent_assignment(tok, nodes, names, k, pairs, node_of, value_of)
            rows = cpt_rows.setdefault(k, {})
            if h in rows:
                tok.fail(head[1], "duplicate CPT row")
            row = np.zeros(len(nodes[k]["domain"]))
            for item in vals:
                if "=" not in item:
                    tok.fail(item, "expected value=probability")
                val, q = (s.strip() for s in item.split("=", 1))
                row[value_of(tok, k, val)] = _number(q, tok.line, tok.col(item))
            rows[h] = row

    gnodes = tuple(GNode(n["name"], n["player"], n["domain"], n["parents"], n["reference"], n["available"])
                   for n in nodes)
    pots = []
    for (pl, k), tab in tables.items():
        shape = (len(gnodes[k].domain),) + tuple(len(gnodes[m].domain) for m in tab["nbrs"])
        w = np.full(shape, np.nan)
        w[gnodes[k].reference] = 1.0
        for (a, hv), x in tab["rows"].items():
            w[(a,) + hv] = x
        pots.append(PotentialTable(pl, k, tab["nbrs"], w))
    cpts = {}
    for k, rows in cpt_rows.items():
        shape = tuple(len(gnodes[m].domain) for m in gnodes[k].parents) + (len(gnodes[k].domain),)
        c = np.full(shape, np.nan)
        for h, row in rows.items():
            c[h] = row
        cpts[k] = c
    net = GNet(gnodes, players, tuple(uarcs), tuple(pots), cpts)
    problems = validate(net)
    if problems:
        raise InvalidNet(problems)
    return net


def _parent_assignment(tok, nodes, names, k, pairs, node_of, value_of):
    given = {node_of(tok, nm): value_of(tok, node_of(tok, nm), v) for nm, v in pairs}
    parents = nodes[k]["parents"]
    if set(given) != set(parents):
        tok.fail(nodes[k]["name"], f"assignment must cover exactly the parents of {nodes[k]['name']}")
    return tuple(given[m] for m in parents)


def _num(x: float) -> str:
    return repr(float(x))


def print_game(net: GNet) -> str:
    out = ["players " + " ".join(net.players)]
    for nd in net.nodes:
        line = f"node {nd.name} player={nd.player} domain={','.join(nd.domain)}"
        if nd.parents:
            line += " parents=" + ",".join(net.nodes[m].name for m in nd.parents)
        out.append(line)
    refs = [f"{nd.name}={nd.domain[nd.reference]}" for nd in net.nodes if nd.reference]
    if refs:
        out.append("reference " + ", ".join(refs))
    for nd in net.nodes:
        for h, acts in sorted(nd.available.items()):
            out.append(f"avail {nd.name} | {_assign(net, nd.parents, h)} : "
                       + ", ".join(nd.domain[a] for a in acts))
    for pl, a, b in net.uarcs:
        out.append(f"uarc {pl} {net.nodes[a].name} {net.nodes[b].name}")
    for t in net.potentials:
        node = net.nodes[t.node]
        w = np.asarray(t.weights, dtype=float)
        for hv in itertools.product(*(range(len(net.nodes[m].domain)) for m in t.neighbors)):
            entries = [f"{node.domain[a]}={_num(w[(a,) + hv])}" for a in range(len(node.domain))
                       if a != node.reference]
            out.append(f"potential {t.player} {node.name}{_cond(net, t.neighbors, hv)} : " + ", ".join(entries))
    for k in sorted(net.cpts):
        node = net.nodes[k]
        c = np.asarray(net.cpts[k], dtype=float)
        for h in net.parent_assignments(k):
            out.append(f"cpt {node.name}{_cond(net, node.parents, h)} : "
                       + ", ".join(f"{v}={_num(q)}" for v, q in zip(node.domain, c[h])))
    return "\n".join(out) + "\n"


def _cond(net, nodes, values) -> str:
    return f" | {_assign(net, nodes, values)}" if nodes else ""


def _assign(net, nodes, values) -> str:
    return ", ".join(f"{net.nodes[m].name}={net.nodes[m].domain[v]}" for m, v in zip(nodes, values))


# -- extensive form ----------------------------------------------------------------

def parse_ef(text: str):
    """Extensive-form file::

        players 1 2
        chance root stage=Type : S=9/10, W=1/10
        decision d1 parent=root/S player=1 infoset=I1 : B, Q
        leaf z1 parent=d1/B : 1=2, 2=1
    """
    from .extensive_form import EfNode, EfTree

    players: tuple[str, ...] = ()
    nodes: dict[str, EfNode] = {}
    for tok in _lines(text):
        kw = tok.text.split()[0]
        if kw == "players":
            players = tuple(tok.text.split()[1:])
            continue
        if kw not in ("chance", "decision", "leaf"):
            tok.fail(kw, f"unknown keyword {kw!r}")
        if ":" not in tok.text:
            tok.fail(kw, "expected ':' before the actions or payoffs")
        head, body = tok.text.split(":", 1)
        words = head.split()
        if len(words) < 2:
            tok.fail(kw, f"{kw} needs a name")
        name = words[1]
        if name in nodes:
            tok.fail(name, f"duplicate tree node {name!r}")
        kv = _keyvals(tok, words[2:])
        parent = via = None
        if "parent" in kv:
            if "/" not in kv["parent"]:
                tok.fail(kv["parent"], "parent must be <node>/<action>")
            parent, via = kv["parent"].split("/", 1)
            if parent not in nodes:
                tok.fail(parent, f"unknown tree node {parent!r} (declare parents first)")
            if via not in nodes[parent].actions:
                tok.fail(via, f"{parent} has no action {via!r}")
        items = [s.strip() for s in body.split(",") if s.strip()]
        nd = EfNode(name, kw, parent, via, stage=kv.get("stage"))
        if kw == "chance":
            acts, probs = [], []
            for it in items:
                if "=" not in it:
                    tok.fail(it, "expected action=probability")
                a, q = (s.strip() for s in it.split("=", 1))
                acts.append(a)
                probs.append(_number(q, tok.line, tok.col(it)))
            nd.actions, nd.probs = tuple(acts), tuple(probs)
        elif kw == "decision":
            if kv.get("player") not in players:
                tok.fail(kw, f"unknown player {kv.get('player')!r}")
            nd.player = kv["player"]
            nd.infoset = kv.get("infoset", name)
            nd.actions = tuple(items)
        else:
            for it in items:
                if "=" not in it:
                    tok.fail(it, "expected player=payoff")
                pl, v = (s.strip() for s in it.split("=", 1))
                if pl not in players:
                    tok.fail(pl, f"unknown player {pl!r}")
                nd.payoffs[pl] = _number(v, tok.line, tok.col(it))
        nodes[name] = nd
    return EfTree(players, nodes)


# -- solutions ---------------------------------------------------------------------

def block_label(net: GNet, bi: int) -> str:
    b = net.layout.blocks[bi]
    node = net.nodes[b.node]
    if not node.parents:
        return node.name
    return node.name + "|" + ",".join(f"{net.nodes[m].name}={net.nodes[m].domain[v]}"
                                      for m, v in zip(node.parents, b.parent_values))


def format_profile(net: GNet, values: np.ndarray, prefix: str = "p") -> list[str]:
    """One line per decision coordinate: label, value, probability at 17 significant digits."""
    lay = net.layout
    out = []
    for bi, b in enumerate(lay.blocks):
        if b.nature:
            continue
        dom = net.nodes[b.node].domain
        for i, a in enumerate(b.actions):
            out.append(f"{prefix} {block_label(net, bi)} {dom[a]} {float(values[b.start + i]):.17g}")
    return out


def write_solutions(net: GNet, profiles, classes=None) -> str:
    out = []
    for r, prof in enumerate(profiles):
        out.append(f"record {r}")
        out += format_profile(net, prof.values)
        if classes is not None:
            c = classes[r]
            out.append(f"class {c.label.value} worst={c.verdict.worst_violation:.17g} residual={c.residual:.17g}")
        out.append("end")
    return "\n".join(out) + "\n"


def read_solutions(net: GNet, text: str) -> list[Profile]:
    lay = net.layout
    labels = {block_label(net, bi): bi for bi, b in enumerate(lay.blocks) if not b.nature}
    records: list[Profile] = []
    cur = None
    for tok in _lines(text):
        w = tok.text.split()
        if w[0] == "record":
            cur = lay.base.copy()
        elif w[0] == "p":
            if cur is None:
                tok.fail("p", "probability line outside a record")
            if len(w) != 4:
                tok.fail("p", "expected 'p <info set> <value> <probability>'")
            if w[1] not in labels:
                tok.fail(w[1], f"unknown information set {w[1]!r}")
            b = lay.blocks[labels[w[1]]]
            dom = net.nodes[b.node].domain
            if w[2] not in dom or dom.index(w[2]) not in b.actions:
                tok.fail(w[2], f"{w[2]!r} is not an action at {w[1]}")
            cur[b.start + b.actions.index(dom.index(w[2]))] = _number(w[3], tok.line, tok.col(w[3]))
        elif w[0] == "end":
            if cur is None:
                tok.fail("end", "'end' without 'record'")
            records.append(Profile(net, cur))
            cur = None
        elif w[0] != "class":
            tok.fail(w[0], f"unknown keyword {w[0]!r}")
    if cur is not None:
        records.append(Profile(net, cur))
    return records


def load_game(path) -> GNet:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())


def bundled(name: str) -> str:
    """Path of a fixture shipped in the package data directory."""
    from importlib.resources import files

    return str(files("gnets") / "data" / name)
