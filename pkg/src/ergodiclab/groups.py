"""Finitely generated groups with word metrics.

Elements are tuples: integer vectors for the lattice, reduced words for the
free group (see :mod:`ergodiclab.spaces.tree`) and ``(a, b, c)`` for the
discrete Heisenberg group with ``(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')``.
The word metric is ``d(x, y) = |y^-1 x|``.
"""

from collections import deque
import math

import numpy as np

from .spaces.tree import invert, multiply, parse_word, reduce_word


class GroupError(ValueError):
    pass


class GroupModel:
    kind = ""

    def identity(self):
        raise NotImplementedError

    def element(self, g):
        return g

    def multiply(self, g, h):
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def word_length(self, g):
        raise NotImplementedError

    def distance(self, x, y):
        return self.word_length(self.multiply(self.inverse(y), x))

    def generators(self):
        raise NotImplementedError

    def abelianization(self, g):
        """Image of ``g`` in ``Z^r``; characters factor through it."""
        raise NotImplementedError

    def ball_counts(self, radius):
        """``A_n = #{g : |g| <= n}`` for ``n = 0..radius`` by breadth-first search."""
        gens = self.generators()
        seen = {self.identity()}
        frontier = [self.identity()]
        counts = [1]
        for _ in range(radius):
            nxt = []
            for g in frontier:
                for s in gens:
                    h = self.multiply(g, s)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
            frontier = nxt
            counts.append(counts[-1] + len(nxt))
        return counts


class IntegerLattice(GroupModel):
    """``Z^d`` with generators ``+-e_i``; the word length is the l1 norm."""

    kind = "integer_lattice"

    def __init__(self, d=1):
        if d < 1:
            raise GroupError("dimension must be positive")
        self.d = int(d)

    def __repr__(self):
        return f"IntegerLattice({self.d})"

    def identity(self):
        return (0,) * self.d

    def element(self, g):
        if isinstance(g, (int, np.integer)) and self.d == 1:
            g = (int(g),)
        g = tuple(int(x) for x in np.atleast_1d(g))
        if len(g) != self.d:
            raise GroupError(f"{g} is not an element of Z^{self.d}")
        return g

    def multiply(self, g, h):
        return tuple(a + b for a, b in zip(g, h))

    def inverse(self, g):
        return tuple(-a for a in g)

    def word_length(self, g):
        return sum(abs(a) for a in g)

    def generators(self):
        out = []
        for i in range(self.d):
            for s in (1, -1):
                e = [0] * self.d
                e[i] = s
                out.append(tuple(e))
        return out

    def abelianization(self, g):
        return tuple(g)


class FreeGroup(GroupModel):
    """The free group on ``k`` letters; ``parse`` accepts strings like ``"abA"``."""

    kind = "free_group"

    def __init__(self, k=2):
        if not 1 <= k <= 26:
            raise GroupError("rank must be between 1 and 26")
        self.k = int(k)

    def __repr__(self):
        return f"FreeGroup({self.k})"

    def identity(self):
        return ()

    def element(self, g):
        if isinstance(g, str):
            g = parse_word(g)
        g = tuple(int(x) for x in g)
        if any(x == 0 or abs(x) > self.k for x in g):
            raise GroupError(f"{g} uses letters outside the {self.k} generators")
        return reduce_word(g)

    def multiply(self, g, h):
        return multiply(g, h)

    def inverse(self, g):
        return invert(g)

    def word_length(self, g):
        return len(g)

    def generators(self):
        return [(s * i,) for i in range(1, self.k + 1) for s in (1, -1)]

    def abelianization(self, g):
        out = [0] * self.k
        for x in g:
            out[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(out)


class Heisenberg(GroupModel):
    """The discrete Heisenberg group with generators ``x = (1,0,0)``, ``y = (0,1,0)``.

    Word lengths are exact (breadth-first search) inside the ball of radius
    ``exact_radius``; outside it :meth:`length_bounds` gives a lower/upper
    pair from the normal form.
    """

    kind = "heisenberg"

    def __init__(self, exact_radius=14):
        self.exact_radius = int(exact_radius)
        self._table = None

    def __repr__(self):
        return "Heisenberg()"

    def identity(self):
        return (0, 0, 0)

    def element(self, g):
        g = tuple(int(x) for x in g)
        if len(g) != 3:
            raise GroupError(f"{g} is not a Heisenberg triple")
        return g

    def multiply(self, g, h):
        return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])

    def inverse(self, g):
        a, b, c = g
        return (-a, -b, -c + a * b)

    def generators(self):
        return [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]

    def abelianization(self, g):
        return (g[0], g[1])

    @property
    def table(self):
        """Exact word lengths in the ball of radius ``exact_radius``, built once."""
        if self._table is None:
            table = {self.identity(): 0}
            queue = deque([self.identity()])
            gens = self.generators()
            while queue:
                g = queue.popleft()
                r = table[g]
                if r == self.exact_radius:
                    continue
                for s in gens:
                    h = self.multiply(g, s)
                    if h not in table:
                        table[h] = r + 1
                        queue.append(h)
            self._table = table
        return self._table

    @staticmethod
    def length_bounds(a, b, c):
        """Lower and upper bounds on the word length of ``(a, b, c)`` (vectorized).

        A word of length ``L`` has ``|c| <= L^2/4`` and ``|a| + |b| <= L``.
        The upper bound spells ``x^a y^b`` and then adds the central remainder
        ``c - a b`` with commutators ``[x^s, y^t]`` of length ``2(s + t)``.
        """
        a, b, c = (np.asarray(v, dtype=np.int64) for v in (a, b, c))
        ab = np.abs(a) + np.abs(b)
        lower = np.maximum(ab, np.ceil(2 * np.sqrt(np.abs(c))).astype(np.int64))
        rest = np.abs(c - a * b)
        s = np.floor(np.sqrt(rest)).astype(np.int64)
        s_safe = np.maximum(s, 1)
        t = rest // s_safe
        r = rest - s_safe * t
        extra = np.where(rest > 0, 2 * (s_safe + t) + np.where(r > 0, 2 * (r + 1), 0), 0)
        return lower, ab + extra

    def word_length(self, g):
        g = self.element(g)
        if g in self.table:
            return self.table[g]
        lo, hi = self.length_bounds(*g)
        if lo == hi:
            return int(lo)
        raise GroupError(f"{g} lies outside the exact ball; use length_bounds")

    def ball_counts(self, radius):
        if radius <= self.exact_radius:
            lengths = np.bincount(np.fromiter(self.table.values(), dtype=np.int64))
            return np.cumsum(lengths)[: radius + 1].tolist()
        return super().ball_counts(radius)


def growth_rates(counts):
    """``(1/n) ln A_n`` for ``n = 1..``."""
    return [math.log(a) / n for n, a in enumerate(counts) if n > 0]
