"""Words in the free group F_n = <a_1, ..., a_n>.

A letter is a nonzero integer: ``+i`` stands for ``a_i`` and ``-i`` for its
inverse.  Words are stored unreduced; call :meth:`Word.reduce` for the free
normal form.
"""
from __future__ import annotations

import re
from typing import Iterable, Iterator, NamedTuple


class Generator(NamedTuple):
    index: int
    sign: int = 1

    @property
    def letter(self) -> int:
        return self.sign * self.index

    @classmethod
    def from_letter(cls, letter: int) -> "Generator":
        return cls(abs(letter), 1 if letter > 0 else -1)


_TOKEN = re.compile(r"^a(\d+)(?:\^(-?\d+))?$")


class Word(tuple):
    """A finite sequence of letters ``±i``.

    >>> w = Word.parse("a1 a2^-1 a2 a1")
    >>> str(w.reduce())
    'a1^2'
    """

    def __new__(cls, letters: Iterable[int] = ()):
        letters = tuple(int(x) for x in letters)
        if any(x == 0 for x in letters):
            raise ValueError("letter 0 is not a generator")
        return super().__new__(cls, letters)

    @classmethod
    def parse(cls, text: str) -> "Word":
        """Parse ``"a1 a2^-1 a1^3"``; ``""`` or ``"e"`` is the empty word."""
        letters: list[int] = []
        for token in text.replace("*", " ").split():
            if token in ("e", "1"):
                continue
            m = _TOKEN.match(token)
            if m is None:
                raise ValueError(f"cannot parse word token {token!r}")
            index = int(m.group(1))
            power = int(m.group(2)) if m.group(2) is not None else 1
            if index < 1:
                raise ValueError(f"generator index must be >= 1: {token!r}")
            letters.extend([index if power > 0 else -index] * abs(power))
        return cls(letters)

    @classmethod
    def gen(cls, i: int, power: int = 1) -> "Word":
        return cls([i if power > 0 else -i] * abs(power))

    def reduce(self) -> "Word":
        stack: list[int] = []
        for x in self:
            if stack and stack[-1] == -x:
                stack.pop()
            else:
                stack.append(x)
        return Word(stack)

    def is_reduced(self) -> bool:
        return all(a != -b for a, b in zip(self, self[1:]))

    def inverse(self) -> "Word":
        return Word(-x for x in reversed(self))

    def generators(self) -> list[Generator]:
        return [Generator.from_letter(x) for x in self]

    def rank_needed(self) -> int:
        return max((abs(x) for x in self), default=0)

    def __mul__(self, other: Iterable[int]) -> "Word":  # type: ignore[override]
        return Word(tuple(self) + tuple(other))

    def __pow__(self, k: int) -> "Word":
        if k < 0:
            return self.inverse() ** (-k)
        return Word(tuple(self) * k)

    def __str__(self) -> str:
        if not self:
            return "e"
        out = []
        i = 0
        while i < len(self):
            j = i
            while j < len(self) and self[j] == self[i]:
                j += 1
            k = j - i
            g = f"a{abs(self[i])}"
            power = k if self[i] > 0 else -k
            out.append(g if power == 1 else f"{g}^{power}")
            i = j
        return " ".join(out)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"


def letters(rank: int) -> list[int]:
    """Letters in the fixed order a_1, a_1^-1, ..., a_n, a_n^-1."""
    out = []
    for i in range(1, rank + 1):
        out.extend((i, -i))
    return out


def reduced_words(rank: int, max_len: int) -> Iterator[Word]:
    """All reduced words of length <= max_len, in shortlex order."""
    layer = [Word()]
    yield Word()
    alphabet = letters(rank)
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for x in alphabet:
                if w and w[-1] == -x:
                    continue
                v = Word(tuple(w) + (x,))
                nxt.append(v)
                yield v
        layer = nxt
