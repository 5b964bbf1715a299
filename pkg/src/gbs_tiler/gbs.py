"""Graphs of groups with infinite cyclic vertex and edge groups."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .groups import RewritingOracle, format_power, invert_word

VERTEX_SYMBOLS = "abcdefghijklmnopqrs"
EDGE_SYMBOLS = "tuvwxyz"


@dataclass(frozen=True)
class Edge:
    """Edge relation  e^-1 x_src^fwd e = x_dst^bwd  (e deleted when the edge is in the tree)."""

    id: str
    src: str
    dst: str
    fwd: int
    bwd: int

    def is_loop(self) -> bool:
        return self.src == self.dst


@dataclass(frozen=True)
class GBSGraph:
    vertices: tuple
    edges: tuple

    def __post_init__(self):
        if not self.vertices:
            raise ValueError("graph has no vertices")
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        ids = [e.id for e in self.edges]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate edge ids")
        vs = set(self.vertices)
        for e in self.edges:
            if e.src not in vs or e.dst not in vs:
                raise ValueError(f"edge {e.id} uses an unknown vertex")
            if e.fwd == 0 or e.bwd == 0:
                raise ValueError(f"edge {e.id} has a zero label")
        if len(self.vertices) > len(VERTEX_SYMBOLS):
            raise ValueError("too many vertices")
        if not self.connected():
            raise ValueError("graph is not connected")

    def connected(self) -> bool:
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for e in self.edges:
                for u, w in ((e.src, e.dst), (e.dst, e.src)):
                    if u == v and w not in seen:
                        seen.add(w)
                        queue.append(w)
        return len(seen) == len(self.vertices)

    def symbol(self, v: str) -> str:
        return VERTEX_SYMBOLS[self.vertices.index(v)]


def loop_graph(m: int, n: int) -> GBSGraph:
    return GBSGraph(("v",), (Edge("e", "v", "v", m, n),))


def edge_graph(p: int, q: int) -> GBSGraph:
    return GBSGraph(("u", "v"), (Edge("e", "u", "v", p, q),))


def parse_graph(text: str) -> GBSGraph:
    """Lines ``vertex NAME`` and ``edge ID SRC DST ALPHA_FWD ALPHA_BWD``; ``#`` starts a comment."""
    vertices, edges = [], []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) >= 2:
            vertices.extend(parts[1:])
        elif parts[0] == "edge" and len(parts) == 6:
            try:
                edges.append(Edge(parts[1], parts[2], parts[3], int(parts[4]), int(parts[5])))
            except ValueError:
                raise ValueError(f"line {n}: labels must be integers") from None
        else:
            raise ValueError(f"line {n}: cannot parse {raw!r}")
    return GBSGraph(tuple(vertices), tuple(edges))


def format_graph(g: GBSGraph) -> str:
    lines = ["vertex " + " ".join(g.vertices)]
    lines += [f"edge {e.id} {e.src} {e.dst} {e.fwd} {e.bwd}" for e in g.edges]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Presentations


def spanning_tree(g: GBSGraph) -> frozenset:
    """Breadth-first tree from the first vertex, scanning edges in sorted id order."""
    edges = sorted(g.edges, key=lambda e: e.id)
    seen = {g.vertices[0]}
    queue = deque([g.vertices[0]])
    tree = set()
    while queue:
        v = queue.popleft()
        for e in edges:
            if e.is_loop():
                continue
            for u, w in ((e.src, e.dst), (e.dst, e.src)):
                if u == v and w not in seen:
                    seen.add(w)
                    tree.add(e.id)
                    queue.append(w)
    if len(seen) != len(g.vertices):
        raise ValueError("graph is not connected")
    return frozenset(tree)


def all_spanning_trees(g: GBSGraph):
    non_loops = [e for e in g.edges if not e.is_loop()]
    for combo in combinations(non_loops, len(g.vertices) - 1):
        if _is_spanning(g, {e.id for e in combo}):
            yield frozenset(e.id for e in combo)


def _is_spanning(g: GBSGraph, tree) -> bool:
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in g.edges:
        if e.id in tree:
            a, b = find(e.src), find(e.dst)
            if a == b:
                return False
            parent[a] = b
    return len({find(v) for v in g.vertices}) == 1 and len(tree) == len(g.vertices) - 1


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relations: tuple  # pairs (lhs, rhs) of words

    def relators(self) -> list[str]:
        return [lhs + invert_word(rhs) for lhs, rhs in self.relations]

    def __str__(self) -> str:
        rels = ", ".join(f"{format_word(l)} = {format_word(r)}" for l, r in self.relations)
        return f"<{', '.join(self.generators)} | {rels}>"


def format_word(w: str) -> str:
    """Run-length form: ``Taat`` -> ``t^-1 a^2 t``; the empty word prints as 1."""
    if not w:
        return "1"
    out = []
    i = 0
    while i < len(w):
        j = i
        while j < len(w) and w[j] == w[i]:
            j += 1
        k = j - i
        out.append(format_power(w[i].lower(), -k if w[i].isupper() else k))
        i = j
    return " ".join(out)


def _power(sym: str, k: int) -> str:
    return sym * k if k >= 0 else sym.upper() * -k


def edge_symbols(g: GBSGraph, tree) -> dict:
    off = [e for e in sorted(g.edges, key=lambda e: e.id) if e.id not in tree]
    if len(off) > len(EDGE_SYMBOLS):
        raise ValueError("too many edges outside the tree")
    return {e.id: EDGE_SYMBOLS[i] for i, e in enumerate(off)}


def fundamental_presentation(g: GBSGraph, tree=None) -> Presentation:
    tree = spanning_tree(g) if tree is None else frozenset(tree)
    if not _is_spanning(g, tree) or any(e.is_loop() for e in g.edges if e.id in tree):
        raise ValueError("tree does not span the graph")
    syms = edge_symbols(g, tree)
    gens = [g.symbol(v) for v in g.vertices] + [syms[e.id] for e in sorted(g.edges, key=lambda e: e.id) if e.id in syms]
    relations = []
    for e in g.edges:
        x, y = _power(g.symbol(e.src), e.fwd), _power(g.symbol(e.dst), e.bwd)
        if e.id in tree:
            relations.append((x, y))
        else:
            s = syms[e.id]
            relations.append((s.upper() + x + s, y))
    return Presentation(tuple(gens), tuple(relations))


# ---------------------------------------------------------------------------
# Witnesses


@dataclass(frozen=True)
class SubgroupWitness:
    kind: str  # "BS", "TorusKnot", "Z2" or "Z"
    params: tuple
    embedding: tuple  # generator words
    relation: tuple  # (lhs, rhs) in embedding words

    def describe(self) -> str:
        if self.kind == "Z":
            return "Z"
        name = {"BS": "BS", "TorusKnot": "TorusKnot", "Z2": "Z2"}[self.kind]
        params = f"({', '.join(map(str, self.params))})" if self.params else ""
        emb = ", ".join(format_word(w) for w in self.embedding)
        return f"{name}{params} via ({emb}): {format_word(self.relation[0])} = {format_word(self.relation[1])}"


@dataclass
class _Reduced:
    """Graph after collapsing non-loop edges with a unit label; tracks x_v as a power of a survivor."""

    vertices: list
    edges: list  # (edge, src, dst, fwd, bwd) in current labels
    rep: dict = field(default_factory=dict)  # original vertex -> (survivor, exponent)
    collapsed: list = field(default_factory=list)  # ids of collapsed edges, a forest


def reduce_graph(g: GBSGraph) -> _Reduced:
    red = _Reduced(list(g.vertices), [(e, e.src, e.dst, e.fwd, e.bwd) for e in sorted(g.edges, key=lambda e: e.id)])
    red.rep = {v: (v, 1) for v in g.vertices}
    changed = True
    while changed:
        changed = False
        for idx, (e, s, d, p, q) in enumerate(red.edges):
            if s == d:
                continue
            if abs(p) == 1:
                gone, keep, power = s, d, p * q  # x_s = x_d^(q/p), p = +-1
            elif abs(q) == 1:
                gone, keep, power = d, s, p * q
            else:
                continue
            del red.edges[idx]
            red.collapsed.append(e.id)
            red.vertices.remove(gone)
            new_edges = []
            for (f, s2, d2, p2, q2) in red.edges:
                if s2 == gone:
                    s2, p2 = keep, p2 * power
                if d2 == gone:
                    d2, q2 = keep, q2 * power
                new_edges.append((f, s2, d2, p2, q2))
            red.edges = new_edges
            for v, (w, k) in red.rep.items():
                if w == gone:
                    red.rep[v] = (keep, k * power)
            changed = True
            break
    return red


def witness_tree(g: GBSGraph, red: _Reduced) -> frozenset:
    """Spanning tree containing the collapsed edges, completed in sorted id order."""
    tree = set(red.collapsed)
    for e in sorted(g.edges, key=lambda e: e.id):
        if e.id not in tree and not e.is_loop() and _is_forest(g, tree | {e.id}):
            tree.add(e.id)
    return frozenset(tree)


def _is_forest(g: GBSGraph, ids) -> bool:
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for e in g.edges:
        if e.id in ids:
            a, b = find(e.src), find(e.dst)
            if a == b:
                return False
            parent[a] = b
    return True


def weak_aperiodicity_witness(g: GBSGraph, verify: bool = True) -> SubgroupWitness:
    """Subgroup witness read off the collapsed graph, in the presentation for ``witness_tree``."""
    red = reduce_graph(g)
    tree = witness_tree(g, red)
    syms = edge_symbols(g, tree)
    witness = None
    for e, s, d, p, q in red.edges:
        if s != d:
            continue
        x, t = g.symbol(s), syms[e.id]
        if (abs(p), abs(q)) == (1, 1):
            if p == q:
                witness = SubgroupWitness("Z2", (), (x, t), (t.upper() + x + t, x))
            else:
                witness = SubgroupWitness("Z2", (), (x, t + t), (t.upper() * 2 + x + t * 2, x))
        else:
            witness = SubgroupWitness("BS", (p, q), (x, t), (t.upper() + _power(x, p) + t, _power(x, q)))
        break
    if witness is None:
        for e, s, d, p, q in red.edges:
            if s == d:
                continue
            a, b = g.symbol(s), g.symbol(d)
            if e.id in syms:
                t = syms[e.id]
                b = t + b + t.upper()
            witness = SubgroupWitness("TorusKnot", (p, q), (a, b), (_power_word(a, p), _power_word(b, q)))
            break
    if witness is None:
        (v,) = red.vertices
        witness = SubgroupWitness("Z", (), (g.symbol(v),), ("", ""))
    if verify and witness.kind != "Z":
        pres = fundamental_presentation(g, tree)
        if not verify_relation(pres, *witness.relation):
            raise AssertionError(f"witness relation not verified: {witness.describe()}")
    return witness


def _power_word(w: str, k: int) -> str:
    return w * k if k >= 0 else invert_word(w) * -k


def verify_relation(pres: Presentation, lhs: str, rhs: str, bound: int | None = None) -> bool:
    oracle = RewritingOracle(pres.relators())
    if bound is None:
        bound = len(lhs) + len(rhs) + max(len(r) for r in pres.relators()) + 4
    return oracle.equal(lhs, rhs, bound)


# ---------------------------------------------------------------------------
# Whyte's classes


def modular_values(g: GBSGraph, tree=None) -> dict:
    """Image of each off-tree edge under the modular homomorphism (vertex generators map to 1).

    Weights w_v record x_v ~ x_root^{w_v} along the tree; an edge e with
    labels (p, q) then conjugates x_root^{p w_src} to x_root^{q w_dst}.
    """
    tree = spanning_tree(g) if tree is None else frozenset(tree)
    root = g.vertices[0]
    weight = {root: Fraction(1)}
    queue = deque([root])
    tree_edges = [e for e in g.edges if e.id in tree]
    while queue:
        v = queue.popleft()
        for e in tree_edges:
            if e.src == v and e.dst not in weight:
                weight[e.dst] = weight[v] * e.fwd / e.bwd
                queue.append(e.dst)
            elif e.dst == v and e.src not in weight:
                weight[e.src] = weight[v] * e.bwd / e.fwd
                queue.append(e.src)
    return {e.id: Fraction(e.bwd) * weight[e.dst] / (Fraction(e.fwd) * weight[e.src]) for e in g.edges if e.id not in tree}


def whyte_class(g: GBSGraph, tree=None) -> str:
    red = reduce_graph(g)
    if len(red.vertices) == 1 and not red.edges:
        return "Z"
    if all(abs(v) == 1 for v in modular_values(g, tree).values()):
        return "Unimodular"
    if len(red.vertices) == 1 and len(red.edges) == 1:
        _, _, _, p, q = red.edges[0]
        if min(abs(p), abs(q)) == 1 and max(abs(p), abs(q)) > 1:
            return f"BS1n({max(abs(p), abs(q))})"
    return "QI_BS23"


# ---------------------------------------------------------------------------
# Dihedral Artin groups


@dataclass(frozen=True)
class ArtinReduction:
    n: int
    kind: str  # "BS" or "TorusKnot"
    params: tuple
    substitution: dict  # new generator -> word in a, b
    relation: tuple  # (lhs, rhs) in a, b

    def describe(self) -> str:
        subs = ", ".join(f"{k} = {format_word(v)}" for k, v in self.substitution.items())
        name = "BS" if self.kind == "BS" else "Lambda"
        return f"A(I2({self.n})) = {name}{self.params} with {subs}"


def artin_relator(n: int) -> str:
    def alt(x, y):
        return "".join(x if i % 2 == 0 else y for i in range(n))

    return alt("a", "b") + invert_word(alt("b", "a"))


def artin_dihedral_reduce(n: int, verify: bool = True) -> ArtinReduction:
    if n < 2:
        raise ValueError("n must be >= 2")
    k, odd = divmod(n, 2)
    if not odd:
        c = "ab"
        red = ArtinReduction(n, "BS", (k, k), {"c": c, "t": "b"}, ("B" + c * k + "b", c * k))
    else:
        x, y = "ab" * k + "a", "ab"
        red = ArtinReduction(n, "TorusKnot", (2, n), {"x": x, "y": y}, (x * 2, y * n))
    if verify:
        oracle = RewritingOracle([artin_relator(n)])
        lhs, rhs = red.relation
        if not oracle.equal(lhs, rhs, len(lhs) + len(rhs) + 2 * n + 2):
            raise AssertionError(f"Artin reduction not verified for n={n}")
    return red
