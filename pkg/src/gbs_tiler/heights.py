"""Height data on BS(2,3): beta, alpha, beta_y and lambda, all exact."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .flow import FlowConfig
from .groups import BSGroup, BSNormalForm, affine_shadow, bs_normalize

HALF = Fraction(1, 2)


def _word(g) -> str:
    return g.word() if isinstance(g, BSNormalForm) else g


def beta(w) -> int:
    """Signed t-count; a homomorphism to Z."""
    w = _word(w)
    return w.count("t") - w.count("T")


def alpha(w, m: int = 2, n: int = 3) -> Fraction:
    """alpha(w.a^{+-1}) = alpha(w) +- (m/n)^beta(w); t letters leave alpha unchanged."""
    return affine_shadow(_word(w), m, n)[1]


def lam(g, m: int = 2, n: int = 3) -> Fraction:
    """lambda(g) = 1/2 (n/m)^beta(g) alpha(g)."""
    w = _word(g)
    return HALF * Fraction(n, m) ** beta(w) * alpha(w, m, n)


@dataclass
class HeightContext:
    """Evaluates beta_y against the flow configuration of a word, memoized by normal form."""

    word: tuple
    m: int = 2
    n: int = 3
    memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.group = BSGroup(self.m, self.n)
        self.config = FlowConfig(self.group, tuple(self.word))

    def step(self, g: BSNormalForm, letter: str) -> int:
        if letter in "aA":
            return 0
        return 1 if self.config.letter(g) == letter else -1

    def beta_y(self, w) -> int:
        g = w if isinstance(w, BSNormalForm) else bs_normalize(w, self.m, self.n)
        return self._beta_y_nf(g)

    def _beta_y_nf(self, g: BSNormalForm) -> int:
        if g in self.memo:
            return self.memo[g]
        # walk the normal form word; prefixes of normal forms are normal forms
        h = self.group.identity
        value = 0
        for c in g.word():
            value += self.step(h, c)
            h = self.group.mul_letter(h, c)
            self.memo.setdefault(h, value)
        self.memo[g] = value
        return value

    def beta_y_word(self, w: str) -> int:
        """Letter-by-letter evaluation along an arbitrary word (no normal forms)."""
        h = self.group.identity
        value = 0
        for c in w:
            value += self.step(h, c)
            h = self.group.mul_letter(h, c)
        return value

    def lam(self, g) -> Fraction:
        return lam(g, self.m, self.n)
