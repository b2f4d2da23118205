"""The Cayley tree of a free group.

Words are tuples of nonzero integers: ``i`` is the i-th generator and ``-i``
its inverse.  ``parse_word("abA")`` gives ``(1, 2, -1)``; upper-case letters
denote inverses.
"""

from dataclasses import dataclass
import math
import string

from .base import BoundaryPoint, ModelError, SpaceModel

LETTERS = string.ascii_lowercase


def parse_word(text):
    word = []
    for ch in text.replace(" ", ""):
        if ch in LETTERS:
            word.append(LETTERS.index(ch) + 1)
        elif ch.lower() in LETTERS:
            word.append(-(LETTERS.index(ch.lower()) + 1))
        else:
            raise ModelError(f"bad letter {ch!r} in word {text!r}")
    return reduce_word(word)


def format_word(word):
    return "".join(LETTERS[x - 1] if x > 0 else LETTERS[-x - 1].upper() for x in word) or "e"


def is_reduced(word):
    return all(word[i] != -word[i + 1] for i in range(len(word) - 1))


def reduce_word(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def multiply(u, v):
    """Product of two reduced words, cancelling at the junction."""
    i = 0
    n = min(len(u), len(v))
    while i < n and u[len(u) - 1 - i] == -v[i]:
        i += 1
    return u[:len(u) - i] + v[i:]


def invert(w):
    return tuple(-x for x in reversed(w))


def common_prefix(u, v):
    n = min(len(u), len(v))
    i = 0
    while i < n and u[i] == v[i]:
        i += 1
    return i


@dataclass(frozen=True)
class TreeEnd:
    """The end ``prefix + period + period + ...`` of the tree."""

    prefix: tuple
    period: tuple

    def __post_init__(self):
        if not self.period:
            raise ModelError("an end needs a nonempty period")
        word = self.prefix + self.period + self.period
        if not is_reduced(word):
            raise ModelError("end is not a reduced infinite word")

    def letters(self, m):
        out = list(self.prefix[:m])
        while len(out) < m:
            out.extend(self.period)
        return tuple(out[:m])

    def __str__(self):
        return f"{format_word(self.prefix)}({format_word(self.period)})*"


class FreeGroupCayley(SpaceModel):
    """The free group of rank ``k`` acting on its Cayley tree by left multiplication."""

    kind = "free_group_cayley"

    def __init__(self, k=2):
        if not 1 <= k <= len(LETTERS):
            raise ModelError("rank must be between 1 and 26")
        self.k = int(k)

    def __repr__(self):
        return f"FreeGroupCayley({self.k})"

    @property
    def basepoint(self):
        return ()

    def identity(self):
        return ()

    def point(self, w):
        if isinstance(w, str):
            w = parse_word(w)
        w = tuple(int(x) for x in w)
        if any(x == 0 or abs(x) > self.k for x in w):
            raise ModelError(f"letters must lie in +-1..+-{self.k}")
        if not is_reduced(w):
            raise ModelError(f"word {w} is not reduced")
        return w

    element = point

    def distance(self, x, y):
        x, y = self.point(x), self.point(y)
        return len(x) + len(y) - 2 * common_prefix(x, y)

    def act(self, g, x):
        return multiply(self.element(g), self.point(x))

    def compose(self, g, h):
        return multiply(g, h)

    def inverse(self, g):
        return invert(g)

    def norm(self, g):
        return len(g)

    def orbit_point(self, g):
        return g

    def fold(self, steps, keep=()):
        keep = set(int(k) for k in keep)
        stack = []
        sizes = [0]
        saved = {0: ()} if 0 in keep else {}
        for k, g in enumerate(steps, start=1):
            for x in g:
                if stack and stack[-1] == -x:
                    stack.pop()
                else:
                    stack.append(x)
            sizes.append(len(stack))
            if k in keep:
                saved[k] = tuple(stack)
        return sizes, saved

    def boundary(self, chart):
        if isinstance(chart, TreeEnd):
            end = chart
        elif isinstance(chart, str):
            if "(" in chart:
                head, tail = chart.rstrip(")*").split("(")
                end = TreeEnd(parse_word(head), parse_word(tail))
            else:
                w = parse_word(chart)
                end = TreeEnd(w[:-1], w[-1:])
        else:
            w = self.point(chart)
            if not w:
                raise ModelError("the empty word does not define an end")
            end = TreeEnd(w, (w[-1],))
        self.point(end.prefix + end.period)
        return BoundaryPoint(self.kind, end)

    def horofunction(self, xi, x):
        end = self._check_chart(xi)
        x = self.point(x)
        return len(x) - 2 * common_prefix(x, end.letters(len(x)))

    def geodesic_point(self, xi, t):
        self._check_t(t)
        return self._check_chart(xi).letters(int(math.floor(t + 1e-12)))

    def boundary_act(self, g, xi):
        end = self._check_chart(xi)
        g = self.element(g)
        m = len(end.prefix)
        while m <= len(g):
            m += len(end.period)
        head = multiply(g, end.letters(m))
        rest = end.letters(m + len(end.period))[m:]
        return BoundaryPoint(self.kind, TreeEnd(head, rest))

    def direction(self, x):
        x = self.point(x)
        if not x:
            raise ModelError("the identity has no direction")
        return BoundaryPoint(self.kind, TreeEnd(x, (x[-1],)))

    def chart_distance(self, xi, eta, depth=64):
        a = self._check_chart(xi).letters(depth)
        b = self._check_chart(eta).letters(depth)
        m = common_prefix(a, b)
        return 0.0 if m == depth else 2.0 ** -m

    def opposite(self, xi):
        first = self._check_chart(xi).letters(1)[0]
        other = next(x for x in (1, -1, 2, -2) if x != first and abs(x) <= self.k)
        return BoundaryPoint(self.kind, TreeEnd((), (other,)))

    def random_point(self, rng, max_len=12):
        n = int(rng.integers(0, max_len + 1))
        w = []
        while len(w) < n:
            x = int(rng.integers(1, self.k + 1)) * (1 if rng.random() < 0.5 else -1)
            if not w or w[-1] != -x:
                w.append(x)
        return tuple(w)

    random_element = random_point

    def random_boundary(self, rng):
        w = self.random_point(rng, 6) or (1,)
        while len(w) < 2:
            w = self.random_point(rng, 6)
        return self.direction(w)
