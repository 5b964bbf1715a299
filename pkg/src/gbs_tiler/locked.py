"""Locked shifts for finite-index normal subgroups given as kernels of maps onto finite groups."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .groups import BSGroup, FnZElem, FnZGroup, FreeGroup, enumerate_ball, group_from_name


class NotAHomomorphism(ValueError):
    pass


def ambient_relators(group) -> list[str]:
    if isinstance(group, BSGroup):
        return ["T" + "a" * group.m + "t" + "A" * group.n]
    if isinstance(group, FnZGroup):
        return [f"{s}t{s.upper()}T" for s in group.free.generators]
    return []


@dataclass
class FiniteQuotient:
    """A homomorphism phi from ``group`` onto (a subgroup of) a finite group given by its table."""

    group: object
    group_name: str
    table: list
    phi: dict  # generator -> element index
    identity: int = field(init=False)
    inverse: list = field(init=False, repr=False)
    section: dict = field(init=False, repr=False)  # image element -> representative (group element)

    def __post_init__(self):
        self.identity, self.inverse = check_group_table(self.table)
        gens = self.group.generators
        missing = [s for s in gens if s not in self.phi]
        extra = [s for s in self.phi if s not in gens]
        if missing or extra:
            raise NotAHomomorphism(f"phi must list exactly the generators {list(gens)}")
        for s, v in self.phi.items():
            if not 0 <= v < len(self.table):
                raise NotAHomomorphism(f"phi({s}) = {v} is not an element of the target")
        for r in ambient_relators(self.group):
            if self.image_word(r) != self.identity:
                raise NotAHomomorphism(f"relator {r} does not map to the identity")
        self.section = self._section()

    def letter_image(self, c: str) -> int:
        v = self.phi[c.lower()]
        return v if c.islower() else self.inverse[v]

    def image_word(self, w: str) -> int:
        x = self.identity
        for c in w:
            x = self.table[x][self.letter_image(c)]
        return x

    def image(self, g) -> int:
        return self.image_word(self.group.to_word(g))

    def in_kernel(self, g) -> bool:
        return self.image(g) == self.identity

    def _section(self) -> dict:
        # breadth-first over words in letter order gives shortlex-least preimages
        sec = {self.identity: ""}
        queue = deque([""])
        while queue:
            w = queue.popleft()
            x = self.image_word(w)
            for c in self.group.letters:
                if w and w[-1] == c.swapcase():
                    continue
                y = self.table[x][self.letter_image(c)]
                if y not in sec:
                    sec[y] = w + c
                    queue.append(w + c)
        return {y: self.group.from_word(w) for y, w in sec.items()}

    @property
    def index(self) -> int:
        return len(self.section)

    @property
    def representatives(self) -> list:
        """R, with the identity first, then in shortlex order of the words."""
        reps = sorted(self.section.values(), key=lambda g: (len(self.group.to_word(g)), self.group.to_word(g)))
        return reps

    def representative(self, g):
        return self.section[self.image(g)]


def check_group_table(table) -> tuple[int, list]:
    n = len(table)
    if n == 0 or any(len(row) != n for row in table):
        raise ValueError("table must be a non-empty square")
    if any(not 0 <= v < n for row in table for v in row):
        raise ValueError("table entries out of range")
    ids = [e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))]
    if not ids:
        raise ValueError("table has no identity")
    e = ids[0]
    inverse = []
    for x in range(n):
        inv = [y for y in range(n) if table[x][y] == e and table[y][x] == e]
        if not inv:
            raise ValueError(f"element {x} has no inverse")
        inverse.append(inv[0])
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if table[table[x][y]][z] != table[x][table[y][z]]:
                    raise ValueError(f"table is not associative at ({x}, {y}, {z})")
    return e, inverse


def build_quotient(group_name: str, table, phi: dict) -> FiniteQuotient:
    return FiniteQuotient(group_from_name(group_name), group_name, [list(r) for r in table], dict(phi))


def cyclic_table(n: int) -> list:
    return [[(i + j) % n for j in range(n)] for i in range(n)]


def klein_table() -> list:
    return [[i ^ j for j in range(4)] for i in range(4)]


def quotient_fixture(name: str) -> FiniteQuotient:
    if name == "f2z-a":
        return build_quotient("F2xZ", cyclic_table(2), {"a": 1, "b": 0, "t": 0})
    if name == "trivial":
        return build_quotient("F2xZ", [[0]], {"a": 0, "b": 0, "t": 0})
    if name == "z2-klein":
        return build_quotient("Z2", klein_table(), {"a": 1, "t": 2})
    if name == "f2z-t":
        return build_quotient("F2xZ", cyclic_table(2), {"a": 0, "b": 0, "t": 1})
    if name == "bs-t":
        return build_quotient("BS(2,3)", cyclic_table(2), {"a": 0, "t": 1})
    raise ValueError(f"unknown quotient fixture {name!r}")


QUOTIENT_FIXTURES = ("f2z-a", "trivial", "z2-klein")


def dump_quotient(q: FiniteQuotient) -> str:
    lines = [f"group: {q.group_name}", f"order: {len(q.table)}", "table:"]
    lines += [" ".join(map(str, row)) for row in q.table]
    lines.append("phi: " + " ".join(f"{s}={q.phi[s]}" for s in q.group.generators))
    return "\n".join(lines) + "\n"


def load_quotient(text: str) -> FiniteQuotient:
    group_name, order, rows, phi = None, None, [], None
    in_table = False
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("group:"):
            group_name, in_table = line[6:].strip(), False
        elif line.startswith("order:"):
            order, in_table = int(line[6:]), False
        elif line.startswith("table:"):
            in_table = True
        elif line.startswith("phi:"):
            in_table = False
            phi = {}
            for item in line[4:].split():
                s, _, v = item.partition("=")
                phi[s] = int(v)
        elif in_table:
            rows.append([int(v) for v in line.split()])
        else:
            raise ValueError(f"line {n}: cannot parse {raw!r}")
    if group_name is None or phi is None:
        raise ValueError("quotient file needs 'group:' and 'phi:' lines")
    if order is not None and len(rows) != order:
        raise ValueError(f"table has {len(rows)} rows, order says {order}")
    return build_quotient(group_name, rows, phi)


# ---------------------------------------------------------------------------
# Rules and patches


@dataclass(frozen=True)
class LockedRules:
    alphabet: tuple  # keys of R
    fix_rules: tuple  # (s, c1, c2): forbid p(1) = c1, p(s) = c2 with c1 != c2
    sigma_rules: tuple  # r: forbid p(1) = p(r)


def locked_rules(q: FiniteQuotient, n_gens) -> LockedRules:
    group = q.group
    bad = [w for w in n_gens if not q.in_kernel(group.from_word(w))]
    if bad:
        raise ValueError(f"not in the kernel: {bad}")
    keys = tuple(group.key(r) for r in q.representatives)
    fix = tuple((s, c1, c2) for s in n_gens for c1 in keys for c2 in keys if c1 != c2)
    sigma = tuple(group.key(r) for r in q.representatives if r != group.identity)
    return LockedRules(keys, fix, sigma)


@dataclass
class LockedPatch:
    group: object
    radius: int
    labels: dict = field(repr=False)  # element -> representative element


def schreier_generators(q: FiniteQuotient) -> list[str]:
    """Words r s rep(rs)^-1 over r in R and generators s; they generate the kernel."""
    group = q.group
    out = []
    for r in q.representatives:
        for s in group.generators:
            rs = group.mul_letter(r, s)
            w = group.to_word(group.mul(rs, group.inv(q.representative(rs))))
            if w and w not in out:
                out.append(w)
    return out


def canonical_locked_patch(q: FiniteQuotient, radius: int) -> LockedPatch:
    ball = enumerate_ball(q.group, radius)
    return LockedPatch(q.group, radius, {g: q.representative(g) for g in ball.elements})


@dataclass(frozen=True)
class LockedViolation:
    cell: str
    rule: str


def validate_locked(p: LockedPatch, rules: LockedRules) -> list:
    group = p.group
    alphabet = set(rules.alphabet)
    out = []
    for g, r in p.labels.items():
        if group.key(r) not in alphabet:
            out.append(LockedViolation(group.key(g), "alphabet"))
    gens = sorted({s for s, _, _ in rules.fix_rules})
    forbidden = {(s, c1, c2) for s, c1, c2 in rules.fix_rules}
    for g, r in p.labels.items():
        c1 = group.key(r)
        for s in gens:
            h = group.mul(g, group.from_word(s))
            if h in p.labels and (s, c1, group.key(p.labels[h])) in forbidden:
                out.append(LockedViolation(group.key(g), f"fix:{s}"))
        for rk in rules.sigma_rules:
            h = group.mul(g, group.parse(rk))
            if h in p.labels and p.labels[h] == r:
                out.append(LockedViolation(group.key(g), f"sigma:{rk}"))
    return out


def stabilizer_check(p: LockedPatch, g) -> str:
    """'fixes' when sigma^g agrees with the patch on the overlap, 'moves' otherwise."""
    group = p.group
    ginv = group.inv(g)
    overlap = 0
    for h, r in p.labels.items():
        src = group.mul(ginv, h)
        if src in p.labels:
            overlap += 1
            if p.labels[src] != r:
                return "moves"
    if overlap == 0:
        raise ValueError("translate does not overlap the patch")
    return "fixes"


def dump_locked(p: LockedPatch, group_name: str) -> str:
    lines = [f"# group: {group_name}", f"# radius: {p.radius}"]
    for g in enumerate_ball(p.group, p.radius).elements:
        if g in p.labels:
            lines.append(f"{p.group.key(g)} {p.group.key(p.labels[g])}")
    return "\n".join(lines) + "\n"


def load_locked(text: str) -> tuple[LockedPatch, str]:
    name, radius, raw_cells = None, None, []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            if k.strip() == "group":
                name = v.strip()
            elif k.strip() == "radius":
                radius = int(v)
            continue
        key, rep = line.split()
        raw_cells.append((key, rep))
    if name is None or radius is None:
        raise ValueError("locked patch needs '# group:' and '# radius:' headers")
    group = group_from_name(name)
    labels = {group.parse(k): group.parse(r) for k, r in raw_cells}
    return LockedPatch(group, radius, labels), name


# ---------------------------------------------------------------------------
# Product with a lifted configuration


@dataclass
class ProductPatch:
    group: object
    radius: int
    cells: dict = field(repr=False)  # element -> (upper label, representative)


def product_lift(xhat: dict, locked: LockedPatch, q: FiniteQuotient) -> ProductPatch:
    """Pair a coset-constant layer with a locked layer on the same support."""
    if set(xhat) != set(locked.labels):
        raise ValueError("supports differ")
    group = q.group
    for g, label in xhat.items():
        r = q.representative(g)
        h = group.mul(g, group.inv(r))
        if h in xhat and xhat[h] != label:
            raise ValueError(f"upper layer is not constant on the coset of {group.key(h)}")
    return ProductPatch(group, locked.radius, {g: (xhat[g], locked.labels[g]) for g in xhat})


def lift_fnz(labels: dict, rank: int, d: int, radius: int) -> dict:
    """Lift labels on H = F_n x Z to G = F_n x Z through H -> G, t -> t^d: z_{h t^e} = x_h, 0 <= e < d."""
    group = FnZGroup(rank)
    out = {}
    for g in enumerate_ball(group, radius).elements:
        q_, _ = divmod(g.k, d)
        h = FnZElem(g.w, q_)
        if h not in labels:
            raise ValueError(f"upper patch misses {group.key(h)}")
        out[g] = labels[h]
    return out


def restrict_fnz(labels: dict, d: int) -> dict:
    """Pull a G-patch back to H along t -> t^d."""
    return {FnZElem(g.w, g.k // d): v for g, v in labels.items() if g.k % d == 0}
