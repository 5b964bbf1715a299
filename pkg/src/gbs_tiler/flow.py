"""Flow shifts on F_n, F_n x Z and BS(m, n) at patch scale.

A flow configuration picks, at every cell, one outgoing direction in the
tree (F_n itself, or the Bass-Serre tree of BS(m, n)); every other incident
edge points inward.  Configurations correspond to non-backtracking infinite
words W with ``W_0 = y_1`` and ``W_{k+1} = y_{W_0 ... W_k}``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .groups import Ball, BSGroup, FnZElem, FnZGroup, FreeGroup, enumerate_ball, free_reduce


class FlowWordExhausted(ValueError):
    pass


class InvalidFlowPatch(ValueError):
    pass


# ---------------------------------------------------------------------------
# Alphabets and words


def bs_letters(m: int = 2, n: int = 3) -> tuple[str, ...]:
    return tuple("a" * r + "t" for r in range(m)) + tuple("a" * r + "T" for r in range(n))


def flow_alphabet(group) -> tuple[str, ...]:
    if isinstance(group, BSGroup):
        return bs_letters(group.m, group.n)
    if isinstance(group, FnZGroup):
        return group.free.letters
    return group.letters


def _bs_letter_parts(letter: str) -> tuple[int, int]:
    return len(letter) - 1, (1 if letter[-1] == "t" else -1)


def _bs_letter(r: int, e: int) -> str:
    return "a" * r + ("t" if e > 0 else "T")


def parse_flow_word(text: str, group) -> tuple[str, ...]:
    text = text.strip()
    if isinstance(group, BSGroup):
        if not re.fullmatch(r"(a*[tT])*", text):
            raise ValueError(f"not a BS flow word: {text!r}")
        word = tuple(re.findall(r"a*[tT]", text))
        alphabet = set(bs_letters(group.m, group.n))
        bad = [x for x in word if x not in alphabet]
        if bad:
            raise ValueError(f"letters {bad} not in the flow alphabet")
    else:
        alphabet = set(flow_alphabet(group))
        word = tuple(text)
        bad = [x for x in word if x not in alphabet]
        if bad:
            raise ValueError(f"letters {bad} not in the flow alphabet")
    check_flow_word(word, group)
    return word


def format_flow_word(word) -> str:
    return "".join(word)


def backtracks(x: str, y: str, group) -> bool:
    """True when letter ``y`` right after ``x`` walks straight back."""
    if isinstance(group, BSGroup):
        (_, e1), (r2, e2) = _bs_letter_parts(x), _bs_letter_parts(y)
        return e1 != e2 and r2 == 0
    return y == x.swapcase()


def check_flow_word(word, group) -> None:
    for i in range(len(word) - 1):
        if backtracks(word[i], word[i + 1], group):
            raise ValueError(f"flow word backtracks at position {i + 1}: {word[i]}{word[i + 1]}")


def element_of_word(word, group):
    """The group element reached by following the letters of a flow word from the identity."""
    g = group.identity
    for letter in word:
        g = mul_flow_letter(group, g, letter)
    return g


def mul_flow_letter(group, g, letter: str):
    for c in letter:
        g = group.mul_letter(g, c)
    return g


# ---------------------------------------------------------------------------
# Configurations determined by a word


def back_letter(group, letter: str) -> str:
    """Letter carried by ``g.letter`` when it points back to ``g`` (or g's a-coset)."""
    if isinstance(group, BSGroup):
        _, e = _bs_letter_parts(letter)
        return "T" if e > 0 else "t"
    return letter.swapcase()


def coset_shift(group: BSGroup, letter: str) -> str:
    """Letter at ``g.a`` naming the same outgoing coset as ``letter`` at ``g``."""
    r, e = _bs_letter_parts(letter)
    return _bs_letter((r - 1) % (group.m if e > 0 else group.n), e)


@dataclass
class FlowConfig:
    """The flow configuration of a finite word prefix, evaluated lazily at any cell."""

    group: object
    word: tuple

    def __post_init__(self):
        self.word = tuple(self.word)
        check_flow_word(self.word, self.group)
        if isinstance(self.group, BSGroup):
            self._path = [_bs_letter_parts(x) for x in self.word]

    def letter(self, g) -> str:
        group = self.group
        if isinstance(group, BSGroup):
            return self._bs_letter(g)
        w = g.w if isinstance(group, FnZGroup) else g
        if self.word[: len(w)] == tuple(w) and len(w) <= len(self.word):
            if len(w) == len(self.word):
                raise FlowWordExhausted(f"flow word of length {len(self.word)} does not reach {w!r}")
            return self.word[len(w)]
        return w[-1].swapcase()

    def _bs_letter(self, g) -> str:
        p = g.prefix
        L = len(p)
        m, n = self.group.m, self.group.n
        if tuple(self._path[:L]) == p and L <= len(self._path):
            if L == len(self._path):
                raise FlowWordExhausted(f"flow word of length {len(self.word)} does not reach {g.key()}")
            r, e = self._path[L]
            return _bs_letter((r - g.k) % (m if e > 0 else n), e)
        _, e = p[-1]
        if e > 0:
            return _bs_letter((-g.k) % n, -1)
        return _bs_letter((-g.k) % m, 1)


@dataclass
class FlowPatch:
    group: object
    ball: Ball
    labels: dict = field(repr=False)
    word: tuple | None = None

    @property
    def radius(self) -> int:
        return self.ball.radius

    def __getitem__(self, g):
        return self.labels[g]


def periodic_word(word, length: int, group) -> tuple:
    """The first ``length`` letters of W W W ...; the wrap-around must not backtrack."""
    word = tuple(word)
    if not word:
        raise ValueError("empty flow word")
    check_flow_word(word, group)
    if len(word) < length and backtracks(word[-1], word[0], group):
        raise ValueError(f"{format_flow_word(word)} is not cyclically reduced, so it cannot be repeated")
    return tuple(word[i % len(word)] for i in range(max(length, len(word))))


def flow_patch_from_word(word, radius: int, group) -> FlowPatch:
    word = tuple(word)
    if len(word) < radius + 1:
        raise FlowWordExhausted(f"need at least {radius + 1} letters for radius {radius}, got {len(word)}")
    config = FlowConfig(group, word)
    ball = enumerate_ball(group, radius)
    labels = {g: config.letter(g) for g in ball.elements}
    return FlowPatch(group, ball, labels, word)


# ---------------------------------------------------------------------------
# Local rules


@dataclass(frozen=True)
class Violation:
    cell: str
    rule: str
    detail: str = ""


def flow_constraints(group, ball: Ball):
    """Pairwise rule instances ``(g, h, name, ok(y_g, y_h))`` whose support lies in ``ball``."""
    out = []
    if isinstance(group, BSGroup):
        m, n = group.m, group.n
        alphabet = bs_letters(m, n)
        for g in ball.elements:
            h = group.mul_letter(g, "a")
            if h in ball:
                out.append((g, h, "coset-shift", lambda x, y, group=group: y == coset_shift(group, x)))
            h = mul_flow_letter(group, g, "a" * m)
            if h in ball:
                out.append((g, h, "up-period", lambda x, y: x[-1] != "t" or y == x))
            h = mul_flow_letter(group, g, "a" * n)
            if h in ball:
                out.append((g, h, "down-period", lambda x, y: x[-1] != "T" or y == x))
            for v in alphabet:
                h = mul_flow_letter(group, g, v)
                if h in ball:
                    back = back_letter(group, v)
                    out.append((g, h, f"edge:{v}", lambda x, y, v=v, back=back: (y != back) if x == v else (y == back)))
        return out
    letters = flow_alphabet(group)
    for g in ball.elements:
        for s in letters:
            h = group.mul_letter(g, s)
            if h in ball:
                inv = s.swapcase()
                out.append((g, h, f"edge:{s}", lambda x, y, s=s, inv=inv: (y != inv) if x == s else (y == inv)))
        if isinstance(group, FnZGroup):
            h = group.mul_letter(g, "t")
            if h in ball:
                out.append((g, h, "t-invariance", lambda x, y: x == y))
    return out


def validate_flow_patch(p: FlowPatch) -> list[Violation]:
    group = p.group
    alphabet = set(flow_alphabet(group))
    violations = []
    for g, letter in p.labels.items():
        if letter not in alphabet:
            violations.append(Violation(group.key(g), "alphabet", f"{letter!r}"))
    if violations:
        return violations
    for g, h, name, ok in flow_constraints(group, p.ball):
        if g in p.labels and h in p.labels and not ok(p.labels[g], p.labels[h]):
            violations.append(Violation(group.key(g), name, f"{p.labels[g]} -> {group.key(h)}:{p.labels[h]}"))
    return violations


def word_of_patch(p: FlowPatch) -> tuple:
    """Read ``W_0 = y_1``, ``W_{k+1} = y_{W_0...W_k}`` while the path stays in the patch."""
    group = p.group
    if group.identity not in p.labels:
        raise InvalidFlowPatch("patch does not contain the identity")
    bad = validate_flow_patch(p)
    if bad:
        raise InvalidFlowPatch(f"{len(bad)} violations, first: {bad[0]}")
    word = []
    g = group.identity
    while g in p.labels:
        letter = p.labels[g]
        word.append(letter)
        g = mul_flow_letter(group, g, letter)
    return tuple(word)


def translate_patch(p: FlowPatch, h) -> FlowPatch:
    """``sigma^h`` restricted to the largest centred ball inside the translate: y'_k = y_{h^-1 k}."""
    group = p.group
    hinv = group.inv(h)
    length = _word_length(group, h)
    radius = p.radius - length
    if radius < 0:
        raise ValueError("translation leaves the patch")
    ball = enumerate_ball(group, radius)
    labels = {}
    for k in ball.elements:
        src = group.mul(hinv, k)
        if src not in p.labels:
            raise ValueError("translated ball is not covered by the patch")
        labels[k] = p.labels[src]
    return FlowPatch(group, ball, labels)


def _word_length(group, g) -> int:
    if isinstance(group, FreeGroup):
        return len(g)
    if isinstance(group, FnZGroup):
        return len(g.w) + abs(g.k)
    # BS: breadth-first distance
    r = 0
    while True:
        if g in enumerate_ball(group, r):
            return r
        r += 1


# ---------------------------------------------------------------------------
# Exhaustive enumeration


def enumerate_valid_patches(group, radius: int, fixed: dict | None = None, limit: int | None = None):
    """All valid flow patches on the ball, by backtracking in BFS cell order.

    Letters are tried in alphabet order, so the output order is
    deterministic.  ``fixed`` pins some cells to given letters.
    """
    ball = enumerate_ball(group, radius)
    alphabet = flow_alphabet(group)
    cells = ball.elements
    index = {g: i for i, g in enumerate(cells)}
    checks: list[list] = [[] for _ in cells]
    for g, h, _, ok in flow_constraints(group, ball):
        i, j = index[g], index[h]
        # check when the later of the two cells is assigned
        if i >= j:
            checks[i].append((j, ok, True))
        else:
            checks[j].append((i, ok, False))
    fixed = fixed or {}
    domains = [(fixed[g],) if g in fixed else alphabet for g in cells]
    assignment: list = [None] * len(cells)
    results = []

    def consistent(i):
        x = assignment[i]
        for j, ok, i_is_first in checks[i]:
            y = assignment[j]
            if not (ok(x, y) if i_is_first else ok(y, x)):
                return False
        return True

    def search(i):
        if limit is not None and len(results) >= limit:
            return
        if i == len(cells):
            results.append(FlowPatch(group, ball, dict(zip(cells, assignment))))
            return
        for letter in domains[i]:
            assignment[i] = letter
            if consistent(i):
                search(i + 1)
        assignment[i] = None

    search(0)
    return results


def limit_word(g, group, length: int, inverse: bool = False) -> tuple:
    """First ``length`` letters of the end of the tree reached by g^j (or g^-j) as j grows."""
    if inverse:
        g = group.inv(g)
    power = group.identity
    prefixes = []
    for _ in range(length + 2):
        power = group.mul(power, g)
        prefixes.append(_path_letters(power, group))
    last = prefixes[-1]
    return tuple(last[:length])


def _path_letters(g, group) -> tuple:
    if isinstance(group, BSGroup):
        return tuple(_bs_letter(r, e) for r, e in g.prefix)
    if isinstance(group, FnZGroup):
        return tuple(g.w)
    return tuple(g)


@dataclass
class PeriodReport:
    g: str
    radius: int
    invariant_words: list
    exceptions: list
    conclusive: bool


def period_forces_word(g, radius: int, group) -> PeriodReport:
    """Check that every g-invariant valid patch reads a prefix of g^N or (g^-1)^N."""
    if g == group.identity:
        raise ValueError("g must not be the identity")
    glen = _word_length(group, g)
    if radius < 2 * glen:
        raise ValueError(f"radius {radius} < 2|g| = {2 * glen}: inconclusive")
    ginv = group.inv(g)
    invariant = []
    exceptions = []
    for p in enumerate_valid_patches(group, radius):
        if all(p.labels[group.mul(ginv, h)] == y for h, y in p.labels.items() if group.mul(ginv, h) in p.labels):
            w = word_of_patch(p)
            invariant.append(w)
            plus = limit_word(g, group, len(w))
            minus = limit_word(g, group, len(w), inverse=True)
            if w != plus and w != minus:
                exceptions.append(w)
    return PeriodReport(group.key(g), radius, invariant, exceptions, conclusive=True)


# ---------------------------------------------------------------------------
# Approach sequence (F_n)


@dataclass
class ApproachStep:
    n: int
    g: str
    error: str


def approach_sequence(word, target, steps: int, group: FreeGroup, generator: str | None = None):
    """Elements g_n with sigma^{g_n^-1}(y') reading W_0...W_n e_n W'.

    g_n = a (W_0 ... W_n)^-1 where, for a generator s with W_n not in
    {s, s^-1}, a = s^-1 if W'_0 = s and a = s otherwise; e_n = a^-1.  With
    ``generator`` fixed, steps where W_n is that generator or its inverse are
    skipped; by default the first admissible generator is used at each step.
    """
    word, target = tuple(word), tuple(target)
    if steps > len(word):
        raise ValueError(f"{steps} steps need a word of length >= {steps}")
    if not target:
        raise ValueError("target word is empty")
    check_flow_word(word, group)
    check_flow_word(target, group)
    if generator is not None and generator not in group.generators:
        raise ValueError(f"{generator!r} is not a generator")
    candidates = [generator] if generator else list(group.generators)
    out = []
    for n in range(steps):
        s = next((s for s in candidates if word[n] not in (s, s.upper())), None)
        if s is None:
            continue
        a = s.upper() if target[0] == s else s
        out.append(ApproachStep(n, a + invert_path(word[: n + 1]), a.swapcase()))
    return out


def approach_word(g: str, target, length: int, group: FreeGroup) -> tuple:
    """First ``length`` letters read by the translate y''_k = y'_{g k} of the target configuration."""
    config = FlowConfig(group, tuple(target))
    h, out = g, []
    for _ in range(length):
        letter = config.letter(h)
        out.append(letter)
        h = group.mul_letter(h, letter)
    return tuple(out)


def invert_path(letters) -> str:
    return "".join(letters)[::-1].swapcase()


# ---------------------------------------------------------------------------
# Text format


def dump_flow_patch(p: FlowPatch) -> str:
    lines = [f"# group: {p.group.name}", f"# radius: {p.radius}"]
    if p.word is not None:
        lines.append(f"# word: {format_flow_word(p.word)}")
    for g in p.ball.elements:
        if g in p.labels:
            lines.append(f"{p.group.key(g)} {p.labels[g]}")
    return "\n".join(lines) + "\n"


def load_flow_patch(text: str) -> FlowPatch:
    from .groups import group_from_name

    group, radius, word = None, None, None
    rows = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            k, _, v = line[1:].partition(":")
            k, v = k.strip(), v.strip()
            if k == "group":
                group = group_from_name(v)
            elif k == "radius":
                radius = int(v)
            elif k == "word":
                word = v
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {n}: expected '<key> <letter>', got {raw!r}")
        rows.append(parts)
    if group is None or radius is None:
        raise ValueError("flow patch needs '# group:' and '# radius:' headers")
    ball = enumerate_ball(group, radius)
    labels = {}
    for key, letter in rows:
        g = group.parse(key)
        if g not in ball:
            raise ValueError(f"cell {key} lies outside the radius-{radius} ball")
        labels[g] = letter
    parsed = parse_flow_word(word, group) if word else None
    return FlowPatch(group, ball, labels, parsed)
