"""Free groups: words, parsing, abelianization and the commutator linearization.

A word in F_n is stored as a tuple of nonzero signed integers: ``+k`` is the
generator ``x_k`` and ``-k`` its inverse (generators are 1-based).  Every
:class:`Word` is freely reduced on construction.
"""
from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

from .zlinalg import ExteriorElement

__all__ = [
    "Word",
    "WordParseError",
    "parse_word",
    "multiply",
    "commutator",
    "abelianize",
    "lambda_form",
    "quadratic_form",
    "express_as_commutators",
    "substitute",
]


class WordParseError(ValueError):
    """Syntax error in a word; ``pos`` is the 0-based offset into the text."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


def _reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for a in letters:
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


class Word:
    """Freely reduced element of the free group F_n."""

    __slots__ = ("letters", "n")

    def __init__(self, letters: Iterable[int], n: int):
        if n < 0:
            raise ValueError("generator count must be non-negative")
        letters = _reduce(int(a) for a in letters)
        for a in letters:
            if a == 0 or abs(a) > n:
                raise ValueError(f"generator index {abs(a)} out of range for F_{n}")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "n", n)

    def __setattr__(self, name, value):
        raise AttributeError("Word is immutable")

    @classmethod
    def identity(cls, n: int) -> "Word":
        return cls((), n)

    @classmethod
    def generator(cls, k: int, n: int) -> "Word":
        return cls((k,), n)

    @classmethod
    def from_exponents(cls, exponents: Sequence[int]) -> "Word":
        """x_1^{e_1} x_2^{e_2} ... in F_n with n = len(exponents)."""
        letters: list[int] = []
        for k, e in enumerate(exponents, start=1):
            letters.extend([k if e > 0 else -k] * abs(int(e)))
        return cls(letters, len(exponents))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Word):
            return NotImplemented
        return self.n == other.n and self.letters == other.letters

    def __hash__(self) -> int:
        return hash((self.n, self.letters))

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def inverse(self) -> "Word":
        return Word((-a for a in reversed(self.letters)), self.n)

    __invert__ = inverse

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        return Word(base.letters * abs(k), self.n)

    def runs(self) -> list[tuple[int, int]]:
        """Exponent runs ``[(generator, exponent), ...]``."""
        out: list[tuple[int, int]] = []
        for a in self.letters:
            g, s = abs(a), (1 if a > 0 else -1)
            if out and out[-1][0] == g:
                out[-1] = (g, out[-1][1] + s)
            else:
                out.append((g, s))
        return out

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self.letters:
            return "1"
        parts = []
        for g, e in self.runs():
            name = names[g - 1] if names else f"x{g}"
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Word({self.format()!r}, n={self.n})"

    def with_rank(self, n: int) -> "Word":
        """The same letters viewed in F_n (n must cover every generator used)."""
        return Word(self.letters, n)


def multiply(v: Word, w: Word) -> Word:
    if v.n != w.n:
        raise ValueError(f"cannot multiply words in F_{v.n} and F_{w.n}")
    return Word(v.letters + w.letters, v.n)


def commutator(u: Word, v: Word) -> Word:
    """[u, v] = u v u^-1 v^-1."""
    if u.n != v.n:
        raise ValueError(f"cannot combine words in F_{u.n} and F_{v.n}")
    return Word(u.letters + v.letters + u.inverse().letters + v.inverse().letters, u.n)


def abelianize(w: Word) -> tuple[int, ...]:
    vec = [0] * w.n
    for a in w.letters:
        vec[abs(a) - 1] += 1 if a > 0 else -1
    return tuple(vec)


def quadratic_form(w: Word) -> ExteriorElement:
    """Sum over letter pairs a < b of eps_a eps_b e_{i_a} ^ e_{i_b}.

    Defined on all of F_n (it is invariant under free reduction) and satisfies
    Q(vw) = Q(v) + Q(w) + v_bar ^ w_bar.  On the commutator subgroup it equals
    twice the linearization computed by :func:`lambda_form`.
    """
    n = w.n
    prefix = [0] * n
    coeffs: dict[tuple[int, int], int] = {}
    for a in w.letters:
        i = abs(a) - 1
        s = 1 if a > 0 else -1
        # prefix ^ e_i, accumulated with sign s
        for j, c in enumerate(prefix):
            if c == 0 or j == i:
                continue
            key, sign = ((j, i), 1) if j < i else ((i, j), -1)
            coeffs[key] = coeffs.get(key, 0) + sign * s * c
        prefix[i] += s
    return ExteriorElement(2, n, coeffs)


def lambda_form(w: Word) -> ExteriorElement:
    """The homomorphism [F_n, F_n] -> Lambda^2 Z^n sending [x, y] to x_bar ^ y_bar."""
    if any(abelianize(w)):
        raise ValueError(f"lambda_form needs a word with zero abelianization, got {w}")
    q = quadratic_form(w)
    halved = {}
    for key, c in q.items():
        if c % 2:
            raise ArithmeticError("odd coefficient in quadratic form of a commutator word")
        halved[key] = c // 2
    return ExteriorElement(2, w.n, halved)


def express_as_commutators(w: Word) -> list[tuple[Word, Word]]:
    """Write ``w`` (with zero abelianization) as a product of commutators.

    Returns pairs ``(u_l, v_l)`` with ``prod_l [u_l, v_l] == w`` exactly.  Each
    step takes the first letter ``a`` and the first later occurrence of
    ``a^-1``: ``a B a^-1 s = [a, B] * (B s)``, which shortens the remainder by
    two letters.  The genus is at most ``len(w) // 2`` and is not minimized.
    """
    if any(abelianize(w)):
        raise ValueError(f"{w} is not in the commutator subgroup")
    n = w.n
    pairs: list[tuple[Word, Word]] = []
    rest = w.letters
    while rest:
        a = rest[0]
        j = rest.index(-a, 1)
        middle = rest[1:j]
        pairs.append((Word((a,), n), Word(middle, n)))
        rest = _reduce(middle + rest[j + 1:])
    return pairs


def substitute(w: Word, images: Sequence[Word]) -> Word:
    """Image of ``w`` under the homomorphism sending x_i to ``images[i-1]``."""
    if len(images) != w.n:
        raise ValueError(f"need {w.n} images for a word in F_{w.n}, got {len(images)}")
    if not images:
        return w
    n = images[0].n
    if any(img.n != n for img in images):
        raise ValueError("images must live in the same free group")
    inverses = [img.inverse().letters for img in images]
    out: list[int] = []
    for a in w.letters:
        out.extend(images[a - 1].letters if a > 0 else inverses[-a - 1])
    return Word(out, n)


# --- parser -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<int>[+-]?\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym>[\^\*\(\)\[\],]))"
)
_XK = re.compile(r"x(\d+)\Z")


class _Parser:
    def __init__(self, text: str, n: int, names: Mapping[str, int] | None, max_letters: int | None = None):
        self.text = text
        self.max_letters = max_letters
        self.n = n
        self.names = names or {}
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None:
                rest = text[pos:]
                if rest.strip():
                    bad = pos + len(rest) - len(rest.lstrip())
                    raise WordParseError(f"unexpected character {text[bad]!r}", bad, text)
                break
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, sym: str):
        kind, val, pos = self.take()
        if kind != "sym" or val != sym:
            raise WordParseError(f"expected {sym!r}, found {val or 'end of input'!r}", pos, self.text)

    def parse(self) -> list[int]:
        letters = self.product()
        kind, val, pos = self.peek()
        if kind != "end":
            raise WordParseError(f"unexpected {val!r}", pos, self.text)
        return letters

    def product(self) -> list[int]:
        letters: list[int] = []
        while True:
            kind, val, pos = self.peek()
            if kind == "sym" and val == "*":
                self.take()
                kind, val, pos = self.peek()
                if not self._starts_factor(kind, val):
                    raise WordParseError("dangling '*'", pos, self.text)
            if not self._starts_factor(kind, val):
                return letters
            letters.extend(self.factor())
            self._guard(len(letters), pos)

    def _guard(self, length: int, pos: int):
        if self.max_letters is not None and length > self.max_letters:
            raise WordParseError(f"word longer than {self.max_letters} letters", pos, self.text)

    @staticmethod
    def _starts_factor(kind: str, val: str) -> bool:
        return kind == "ident" or (kind == "sym" and val in "([") or (kind == "int" and val == "1")

    def factor(self) -> list[int]:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "sym" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise WordParseError("exponent must be an integer", pos, self.text)
            e = int(val)
            base = list(_reduce(base))
            if e < 0:
                base = [-a for a in reversed(base)]
            self._guard(len(base) * abs(e), pos)
            return base * abs(e)
        return base

    def atom(self) -> list[int]:
        kind, val, pos = self.take()
        if kind == "ident":
            return [self.generator(val, pos)]
        if kind == "int" and val == "1":
            return []
        if kind == "sym" and val == "(":
            inner = self.product()
            self.expect(")")
            return inner
        if kind == "sym" and val == "[":
            u = self.product()
            self.expect(",")
            v = self.product()
            self.expect("]")
            ui = [-a for a in reversed(u)]
            vi = [-a for a in reversed(v)]
            return u + v + ui + vi
        raise WordParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)

    def generator(self, name: str, pos: int) -> int:
        if name in self.names:
            return self.names[name]
        m = _XK.match(name)
        if m is None:
            raise WordParseError(f"unknown generator {name!r}", pos, self.text)
        k = int(m.group(1))
        if not 1 <= k <= self.n:
            raise WordParseError(f"generator {name} out of range for F_{self.n}", pos, self.text)
        return k


def parse_word(
    text: str,
    n: int,
    names: Sequence[str] | Mapping[str, int] | None = None,
    max_letters: int | None = None,
) -> Word:
    """Parse the word language: ``x3``, ``x1^-2``, ``[u,v]``, ``(w)^k``, ``*``.

    ``names`` optionally maps custom generator names to 1-based indices (a
    sequence is taken as the names of x1, x2, ... in order).  ``max_letters``
    bounds the unreduced expansion so that ``x1^999999999`` fails fast.
    """
    if names is not None and not isinstance(names, Mapping):
        names = {name: k for k, name in enumerate(names, start=1)}
    return Word(_Parser(text, n, names, max_letters).parse(), n)
