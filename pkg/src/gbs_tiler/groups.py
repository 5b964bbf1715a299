"""Word arithmetic and canonical forms for F_n, F_n x Z and BS(m, n).

Words are plain strings: a lowercase letter is a generator, the matching
uppercase letter its inverse.  Every group exposes the same small surface
(``identity``, ``letters``, ``mul``, ``inv``, ``mul_letter``, ``from_word``,
``to_word``, ``key``, ``parse``) so that patches can be indexed by canonical
elements regardless of the ambient group.
"""
from __future__ import annotations

import itertools
import heapq
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

DEFAULT_BALL_CAP = 10**6
BALL_CAP_ENV = "GBS_TILER_BALL_CAP"

FREE_LETTERS = "abcdefghijklmnopqrsuvwxyz"  # 't' is reserved for the Z factor / stable letter


class UnknownGenerator(ValueError):
    pass


class BallCapExceeded(RuntimeError):
    pass


def invert_word(word: str) -> str:
    return word[::-1].swapcase()


def free_reduce(word: Iterable[str], alphabet: str | None = None) -> str:
    """Freely reduce ``word``; ``alphabet`` lists the allowed lowercase generators."""
    out: list[str] = []
    for c in word:
        if alphabet is not None and c.lower() not in alphabet:
            raise UnknownGenerator(f"unknown generator symbol {c!r}")
        if out and out[-1] == c.swapcase():
            out.pop()
        else:
            out.append(c)
    return "".join(out)


def format_power(symbol: str, k: int) -> str:
    if k == 1:
        return symbol
    return f"{symbol}^{k}"


# ---------------------------------------------------------------------------
# Free groups and F_n x Z


class FreeGroup:
    def __init__(self, rank: int):
        if not 1 <= rank <= len(FREE_LETTERS):
            raise ValueError(f"unsupported rank {rank}")
        self.rank = rank
        self.generators = FREE_LETTERS[:rank]
        self.letters = tuple(itertools.chain.from_iterable((g, g.upper()) for g in self.generators))
        self.identity = ""
        self.name = f"F{rank}"

    def __repr__(self):
        return f"FreeGroup({self.rank})"

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and other.rank == self.rank

    def __hash__(self):
        return hash(("F", self.rank))

    def from_word(self, word: str) -> str:
        return free_reduce(word, self.generators)

    def to_word(self, x: str) -> str:
        return x

    def mul(self, x: str, y: str) -> str:
        return free_reduce(x + y)

    def mul_letter(self, x: str, letter: str) -> str:
        if x and x[-1] == letter.swapcase():
            return x[:-1]
        return x + letter

    def inv(self, x: str) -> str:
        return invert_word(x)

    def length(self, x: str) -> int:
        return len(x)

    def key(self, x: str) -> str:
        return x or "1"

    def parse(self, key: str) -> str:
        return "" if key == "1" else self.from_word(key)


@dataclass(frozen=True, order=True)
class FnZElem:
    """``w t^k`` with ``w`` a freely reduced word in the free factor."""

    w: str
    k: int


class FnZGroup:
    def __init__(self, rank: int):
        self.free = FreeGroup(rank)
        self.rank = rank
        self.generators = self.free.generators + "t"
        self.letters = self.free.letters + ("t", "T")
        self.identity = FnZElem("", 0)
        self.name = f"F{rank}xZ"

    def __repr__(self):
        return f"FnZGroup({self.rank})"

    def __eq__(self, other):
        return isinstance(other, FnZGroup) and other.rank == self.rank

    def __hash__(self):
        return hash(("FxZ", self.rank))

    def from_word(self, word: str) -> FnZElem:
        k = 0
        free = []
        for c in word:
            if c == "t":
                k += 1
            elif c == "T":
                k -= 1
            elif c.lower() in self.free.generators:
                free.append(c)
            else:
                raise UnknownGenerator(f"unknown generator symbol {c!r}")
        return FnZElem(free_reduce(free), k)

    def to_word(self, x: FnZElem) -> str:
        return x.w + ("t" * x.k if x.k >= 0 else "T" * -x.k)

    def mul(self, x: FnZElem, y: FnZElem) -> FnZElem:
        return FnZElem(free_reduce(x.w + y.w), x.k + y.k)

    def mul_letter(self, x: FnZElem, letter: str) -> FnZElem:
        if letter == "t":
            return FnZElem(x.w, x.k + 1)
        if letter == "T":
            return FnZElem(x.w, x.k - 1)
        return FnZElem(self.free.mul_letter(x.w, letter), x.k)

    def inv(self, x: FnZElem) -> FnZElem:
        return FnZElem(invert_word(x.w), -x.k)

    def length(self, x: FnZElem) -> int:
        return len(x.w) + abs(x.k)

    def key(self, x: FnZElem) -> str:
        return f"{x.w}|t^{x.k}"

    def parse(self, key: str) -> FnZElem:
        w, _, k = key.partition("|t^")
        if not _:
            raise ValueError(f"malformed F_n x Z key {key!r}")
        return FnZElem(free_reduce(w, self.free.generators), int(k))


# ---------------------------------------------------------------------------
# Baumslag-Solitar groups


@dataclass(frozen=True, order=True)
class BSNormalForm:
    """``prefix . a^k``; each prefix letter ``(r, e)`` stands for ``a^r t^e``.

    ``0 <= r < m`` when ``e = +1`` and ``0 <= r < n`` when ``e = -1``; no
    letter with ``e = +1`` is followed by ``(0, -1)`` and vice versa.
    """

    prefix: tuple[tuple[int, int], ...]
    k: int
    m: int = 2
    n: int = 3

    def prefix_word(self) -> str:
        return "".join("a" * r + ("t" if e > 0 else "T") for r, e in self.prefix)

    def word(self) -> str:
        return self.prefix_word() + ("a" * self.k if self.k >= 0 else "A" * -self.k)

    def key(self) -> str:
        return f"{self.prefix_word()}|a^{self.k}"

    def __str__(self):
        return self.key()


def _bs_push(prefix: list[tuple[int, int]], k: int, letter: str, m: int, n: int) -> int:
    """Right-multiply the state ``prefix . a^k`` by ``letter`` in place; return the new k."""
    if letter == "a":
        return k + 1
    if letter == "A":
        return k - 1
    if letter == "t":
        # a^(m d + r) t = a^r t a^(n d)
        d, r = divmod(k, m)
        if r == 0 and prefix and prefix[-1][1] < 0:
            # pinch: t^-1 a^(m d) t = a^(n d)
            r_last, _ = prefix.pop()
            return r_last + n * d
        prefix.append((r, 1))
        return n * d
    if letter == "T":
        # a^(n d + r) t^-1 = a^r t^-1 a^(m d)
        d, r = divmod(k, n)
        if r == 0 and prefix and prefix[-1][1] > 0:
            # pinch: t a^(n d) t^-1 = a^(m d)
            r_last, _ = prefix.pop()
            return r_last + m * d
        prefix.append((r, -1))
        return m * d
    raise UnknownGenerator(f"unknown generator symbol {letter!r}")


def bs_normalize(word: Iterable[str], m: int = 2, n: int = 3) -> BSNormalForm:
    if m < 1 or n < 1:
        raise ValueError("BS(m, n) needs m, n >= 1")
    prefix: list[tuple[int, int]] = []
    k = 0
    for c in word:
        k = _bs_push(prefix, k, c, m, n)
    return BSNormalForm(tuple(prefix), k, m, n)


def bs_multiply(x: BSNormalForm, y: BSNormalForm) -> BSNormalForm:
    if (x.m, x.n) != (y.m, y.n):
        raise ValueError(f"parameter mismatch: BS{(x.m, x.n)} vs BS{(y.m, y.n)}")
    prefix = list(x.prefix)
    k = x.k
    for c in y.word():
        k = _bs_push(prefix, k, c, x.m, x.n)
    return BSNormalForm(tuple(prefix), k, x.m, x.n)


class BSGroup:
    def __init__(self, m: int = 2, n: int = 3):
        if m < 1 or n < 1:
            raise ValueError("BS(m, n) needs m, n >= 1")
        self.m, self.n = m, n
        self.generators = "at"
        self.letters = ("a", "A", "t", "T")
        self.identity = BSNormalForm((), 0, m, n)
        self.name = f"BS({m},{n})"

    def __repr__(self):
        return f"BSGroup({self.m}, {self.n})"

    def __eq__(self, other):
        return isinstance(other, BSGroup) and (other.m, other.n) == (self.m, self.n)

    def __hash__(self):
        return hash(("BS", self.m, self.n))

    def from_word(self, word: str) -> BSNormalForm:
        return bs_normalize(word, self.m, self.n)

    def to_word(self, x: BSNormalForm) -> str:
        return x.word()

    def mul(self, x: BSNormalForm, y: BSNormalForm) -> BSNormalForm:
        return bs_multiply(x, y)

    def mul_letter(self, x: BSNormalForm, letter: str) -> BSNormalForm:
        prefix = list(x.prefix)
        k = _bs_push(prefix, x.k, letter, self.m, self.n)
        return BSNormalForm(tuple(prefix), k, self.m, self.n)

    def inv(self, x: BSNormalForm) -> BSNormalForm:
        return self.from_word(invert_word(x.word()))

    def key(self, x: BSNormalForm) -> str:
        return x.key()

    def parse(self, key: str) -> BSNormalForm:
        prefix, sep, k = key.partition("|a^")
        if not sep:
            raise ValueError(f"malformed BS key {key!r}")
        g = self.from_word(prefix)
        if g.k != 0 or g.prefix_word() != prefix:
            raise ValueError(f"{prefix!r} is not a normal-form prefix")
        return BSNormalForm(g.prefix, int(k), self.m, self.n)


Group = FreeGroup | FnZGroup | BSGroup


def group_from_name(name: str):
    """Inverse of ``group.name``: ``F2``, ``F2xZ``, ``Z2`` (= F1xZ), ``BS(2,3)``."""
    name = name.strip()
    if name == "Z2":
        return FnZGroup(1)
    if name.startswith("BS(") and name.endswith(")"):
        m, n = (int(v) for v in name[3:-1].split(","))
        return BSGroup(m, n)
    if name.startswith("F") and name.endswith("xZ"):
        return FnZGroup(int(name[1:-2]))
    if name.startswith("F"):
        return FreeGroup(int(name[1:]))
    raise ValueError(f"unknown group descriptor {name!r}")


# ---------------------------------------------------------------------------
# Balls in Cayley graphs


@dataclass
class Ball:
    group: object
    radius: int
    elements: list
    length: dict = field(repr=False)

    def __contains__(self, g) -> bool:
        return g in self.length

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)


def ball_cap() -> int:
    return int(os.environ.get(BALL_CAP_ENV, DEFAULT_BALL_CAP))


def enumerate_ball(group, radius: int, cap: int | None = None) -> Ball:
    """Breadth-first enumeration of the word-metric ball; BFS order is the canonical order."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    cap = ball_cap() if cap is None else cap
    length = {group.identity: 0}
    elements = [group.identity]
    frontier = [group.identity]
    for r in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for c in group.letters:
                h = group.mul_letter(g, c)
                if h not in length:
                    length[h] = r
                    elements.append(h)
                    nxt.append(h)
                    if len(elements) > cap:
                        raise BallCapExceeded(f"ball of radius {radius} exceeds {cap} elements")
        frontier = nxt
    return Ball(group, radius, elements, length)


def all_words(alphabet: Sequence[str], max_len: int, reduced: bool = False) -> Iterable[str]:
    for L in range(max_len + 1):
        for letters in itertools.product(alphabet, repeat=L):
            w = "".join(letters)
            if reduced and any(w[i] == w[i + 1].swapcase() for i in range(L - 1)):
                continue
            yield w


# ---------------------------------------------------------------------------
# Independent certification of the BS word problem


def affine_shadow(word: str, m: int = 2, n: int = 3) -> tuple[int, Fraction]:
    """Image of ``word`` under a -> (x -> x + 1), t -> (x -> (m/n) x).

    Returned as (t-exponent sum, translation part); it is a homomorphism
    but not faithful.
    """
    scale = Fraction(m, n)
    beta, alpha = 0, Fraction(0)
    for c in word:
        if c == "a":
            alpha += scale**beta
        elif c == "A":
            alpha -= scale**beta
        elif c == "t":
            beta += 1
        elif c == "T":
            beta -= 1
        else:
            raise UnknownGenerator(f"unknown generator symbol {c!r}")
    return beta, alpha


def _perm_compose(p: tuple, q: tuple) -> tuple:
    # apply p then q
    return tuple(q[i] for i in p)


def _perm_inverse(p: tuple) -> tuple:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def _perm_power(p: tuple, k: int) -> tuple:
    out = tuple(range(len(p)))
    for _ in range(k):
        out = _perm_compose(out, p)
    return out


def _cycles(p: tuple) -> list[list[int]]:
    seen, cycles = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        cycles.append(cyc)
    return cycles


def permutation_representations(m: int = 2, n: int = 3, max_degree: int = 7, limit: int = 16):
    """Pairs (sigma, tau) of permutations with tau^-1 sigma^m tau = sigma^n (right action).

    Found by matching the cycles of sigma^m onto those of sigma^n; only
    representations with a non-trivial sigma are kept.
    """
    reps = []
    seen_images = set()
    for degree in range(3, max_degree + 1):
        for sigma in itertools.permutations(range(degree)):
            if sigma == tuple(range(degree)):
                continue
            sm, sn = _perm_power(sigma, m), _perm_power(sigma, n)
            cm = sorted(_cycles(sm), key=len)
            cn = sorted(_cycles(sn), key=len)
            if [len(c) for c in cm] != [len(c) for c in cn]:
                continue
            # tau o sm = sn o tau (as maps): send cycle of sm onto cycle of sn
            tau = [0] * degree
            for c1, c2 in zip(cm, cn):
                for i, j in zip(c1, c2):
                    tau[i] = j
            tau = tuple(tau)
            # right action: p.(T a^m t) must equal p.(a^n)
            lhs = _perm_compose(_perm_compose(_perm_inverse(tau), sm), tau)
            if lhs != sn:
                continue
            signature = (tuple(sorted(len(c) for c in _cycles(sigma))), tuple(sorted(len(c) for c in _cycles(tau))))
            if signature in seen_images:
                continue
            seen_images.add(signature)
            reps.append((sigma, tau))
            if len(reps) >= limit:
                return reps
    return reps


def permutation_image(word: str, rep) -> tuple:
    sigma, tau = rep
    images = {"a": sigma, "A": _perm_inverse(sigma), "t": tau, "T": _perm_inverse(tau)}
    out = tuple(range(len(sigma)))
    for c in word:
        out = _perm_compose(out, images[c])
    return out


class RewritingOracle:
    """Bounded breadth-first search over relator substitutions and free cancellation.

    Moves replace a subword equal to a piece ``p`` of a cyclic conjugate
    ``p q`` of a relator (or its inverse) by ``q^-1``, and insert whole
    conjugates.  Only freely reduced words of length ``<= bound`` are
    visited, so a found path is a proof of equality.
    """

    def __init__(self, relators: Sequence[str]):
        cyclic = set()
        for r in relators:
            r = free_reduce(r)
            for w in (r, invert_word(r)):
                for i in range(len(w)):
                    cyclic.add(w[i:] + w[:i])
        self.conjugates = sorted(cyclic)
        rules: dict[str, set[tuple[str, str]]] = {}
        for c in self.conjugates:
            for i in range(1, len(c) + 1):
                lhs, rest = c[:i], c[i:]
                rules.setdefault(lhs[0], set()).add((lhs, invert_word(rest)))
        self.rules = {k: sorted(v) for k, v in rules.items()}

    def neighbours(self, w: str, bound: int) -> Iterable[str]:
        L = len(w)
        for i in range(L):
            for lhs, rhs in self.rules.get(w[i], ()):
                if w.startswith(lhs, i):
                    v = free_reduce(w[:i] + rhs + w[i + len(lhs):])
                    if len(v) <= bound:
                        yield v
        # insertions that cancel against neighbours are already substitutions
        for c in self.conjugates:
            if L + len(c) > bound:
                continue
            for i in range(L + 1):
                v = free_reduce(w[:i] + c + w[i:])
                if len(v) <= bound:
                    yield v

    def component(self, w: str, bound: int, stop=None) -> set[str]:
        w = free_reduce(w)
        seen = {w}
        queue = deque([w])
        while queue:
            x = queue.popleft()
            for y in self.neighbours(x, bound):
                if y not in seen:
                    seen.add(y)
                    if stop is not None and y == stop:
                        return seen
                    queue.append(y)
        return seen

    def equal_within(self, u: str, v: str, bound: int) -> bool:
        u, v = free_reduce(u), free_reduce(v)
        if u == v:
            return True
        if len(u) > bound or len(v) > bound:
            return False
        # bidirectional search
        seen_u, seen_v = {u}, {v}
        fu, fv = [u], [v]
        while fu and fv:
            if len(fu) > len(fv):
                fu, fv, seen_u, seen_v = fv, fu, seen_v, seen_u
            nxt = []
            for x in fu:
                for y in self.neighbours(x, bound):
                    if y in seen_v:
                        return True
                    if y not in seen_u:
                        seen_u.add(y)
                        nxt.append(y)
            fu = nxt
        return False


    def trivial_by_search(self, w: str, bound: int, max_nodes: int = 200000) -> bool:
        """Best-first search (shortest words first) for a derivation of ``w = 1``."""
        w = free_reduce(w)
        seen = {w}
        heap = [(len(w), w)]
        while heap and len(seen) <= max_nodes:
            _, x = heapq.heappop(heap)
            if not x:
                return True
            for y in self.neighbours(x, bound):
                if y not in seen:
                    seen.add(y)
                    heapq.heappush(heap, (len(y), y))
        return False

    def equal(self, u: str, v: str, bound: int, max_nodes: int = 200000) -> bool:
        if self.equal_within(u, v, min(bound, max(len(u), len(v)) + 2)):
            return True
        return self.trivial_by_search(u + invert_word(v), bound, max_nodes)


def bs_relator(m: int = 2, n: int = 3) -> str:
    return "T" + "a" * m + "t" + "A" * n


_BS_ORACLES: dict[tuple[int, int], RewritingOracle] = {}
_BS_REPS: dict[tuple[int, int], list] = {}


def bs_oracle(m: int = 2, n: int = 3) -> RewritingOracle:
    if (m, n) not in _BS_ORACLES:
        _BS_ORACLES[(m, n)] = RewritingOracle([bs_relator(m, n)])
    return _BS_ORACLES[(m, n)]


def bs_permutation_reps(m: int = 2, n: int = 3) -> list:
    if (m, n) not in _BS_REPS:
        _BS_REPS[(m, n)] = permutation_representations(m, n)
    return _BS_REPS[(m, n)]


def inequality_signature(word: str, m: int = 2, n: int = 3) -> tuple:
    """Invariants that can only prove inequality: affine shadow plus finite permutation images."""
    return (affine_shadow(word, m, n),) + tuple(permutation_image(word, rep) for rep in bs_permutation_reps(m, n))


def wp_oracle(u: str, v: str, m: int = 2, n: int = 3, bound: int = 12) -> str:
    """Decide ``u == v`` in BS(m, n) without using normal forms.

    Returns ``"equal"``, ``"unequal"`` or ``"unknown"``.
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    u, v = free_reduce(u, "at"), free_reduce(v, "at")
    if u == v:
        return "equal"
    if inequality_signature(u, m, n) != inequality_signature(v, m, n):
        return "unequal"
    if bs_oracle(m, n).equal_within(u, v, bound):
        return "equal"
    return "unknown"


def bs_oracle_classes(words: Sequence[str], bound: int, m: int = 2, n: int = 3) -> dict[str, int]:
    """Label each word by its bounded-rewriting component (same label => provably equal)."""
    oracle = bs_oracle(m, n)
    reduced = {w: free_reduce(w) for w in words}
    targets = set(reduced.values())
    label: dict[str, int] = {}
    next_label = 0
    for r in sorted(targets, key=lambda s: (len(s), s)):
        if r in label:
            continue
        comp = oracle.component(r, bound)
        for x in comp & targets:
            label[x] = next_label
        next_label += 1
    return {w: label[reduced[w]] for w in words}


def elements_equal(group, x: Hashable, y: Hashable) -> bool:
    return x == y
