"""Concrete group models: the integers, free groups of finite rank and finite groups
given by a Cayley table.

Elements are plain hashable values so they can be used as dict keys and shipped
between threads freely:

  - integers: ``int``
  - free group of rank k: a reduced ``tuple`` of signed generator indices
    (``1`` is a, ``-1`` is a⁻¹, ``2`` is b, ...)
  - finite group of order N: an index ``0..N-1`` with ``0`` the identity
"""

import itertools
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

from .errors import InvalidElement, InvalidGroup, ScaleExceeded
from .logger import groups_logger

Word = Tuple[int, ...]
Element = Union[int, Word]

DEFAULT_BALL_CAP = 10**6

# 'e' is reserved for the identity
LETTER_NAMES = "abcdfghijklmnopqrstu"


class Group(ABC):
    """A discrete group with canonical element encodings"""

    kind: str = "abstract"

    @property
    @abstractmethod
    def spec(self) -> str:
        """Short textual description, accepted back by ``parse_group``"""

    @property
    def identity(self) -> Element:
        return 0

    @property
    def order(self) -> Optional[int]:
        """Number of elements, None for infinite groups"""
        return None

    @property
    def is_finite(self) -> bool:
        return self.order is not None

    @abstractmethod
    def validate(self, g: Any) -> Element:
        """Return g if it is a canonical element of this group, else raise InvalidElement"""

    @abstractmethod
    def multiply(self, g: Element, h: Element) -> Element:
        ...

    @abstractmethod
    def invert(self, g: Element) -> Element:
        ...

    @abstractmethod
    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> "Ball":
        ...

    @abstractmethod
    def sort_key(self, g: Element) -> Tuple:
        """Length-lexicographic key; ball enumeration follows this order"""

    @abstractmethod
    def format(self, g: Element) -> str:
        ...

    @abstractmethod
    def parse(self, text: str) -> Element:
        ...

    def product(self, *elements: Element) -> Element:
        result = self.identity
        for g in elements:
            result = self.multiply(result, g)
        return result

    def conjugate(self, g: Element, h: Element) -> Element:
        return self.product(h, g, self.invert(h))

    def sorted(self, elements: Iterable[Element]) -> List[Element]:
        return sorted(set(elements), key=self.sort_key)


@dataclass(frozen=True)
class Ball:
    """Elements of word length at most ``radius``, in canonical order"""
    radius: int
    elements: Tuple[Element, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: Element) -> bool:
        return g in self._members

    @property
    def _members(self) -> frozenset:
        cached = self.__dict__.get("_member_set")
        if cached is None:
            cached = frozenset(self.elements)
            object.__setattr__(self, "_member_set", cached)
        return cached


def _check_cap(size: int, cap: int, what: str) -> None:
    if size > cap:
        raise ScaleExceeded(f"{what} has {size} elements, above the cap of {cap}",
                            {"size": size, "cap": cap})


# --- integers -------------------------------------------------------------

@dataclass(frozen=True)
class IntegerGroup(Group):
    """(ℤ, +) with generators {+1, -1}; the word length of n is |n|"""

    kind = "integers"

    @property
    def spec(self) -> str:
        return "z"

    @property
    def generators(self) -> Tuple[int, ...]:
        return (1, -1)

    def validate(self, g: Any) -> int:
        if isinstance(g, bool) or not isinstance(g, int):
            raise InvalidElement(f"{g!r} is not an integer")
        return g

    def multiply(self, g: int, h: int) -> int:
        return self.validate(g) + self.validate(h)

    def invert(self, g: int) -> int:
        return -self.validate(g)

    def sort_key(self, g: int) -> Tuple:
        return (abs(g), g < 0)

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
        if radius < 0:
            raise ValueError(f"Ball radius must be non-negative, got {radius}")
        _check_cap(2 * radius + 1, cap, f"Ball of radius {radius} in ℤ")
        elements = [0]
        for i in range(1, radius + 1):
            elements.extend((i, -i))
        return Ball(radius, tuple(elements))

    def format(self, g: int) -> str:
        return str(self.validate(g))

    def parse(self, text: Union[str, int]) -> int:
        if isinstance(text, int) and not isinstance(text, bool):
            return text
        try:
            return int(str(text).strip())
        except ValueError:
            raise InvalidElement(f"Cannot parse {text!r} as an integer")


# --- free groups ----------------------------------------------------------

def reduce_word(letters: Iterable[int]) -> Word:
    """Freely reduce a sequence of signed generator indices"""
    stack: List[int] = []
    for letter in letters:
        if stack and stack[-1] == -letter:
            stack.pop()
        else:
            stack.append(letter)
    return tuple(stack)


def letter_rank(letter: int) -> int:
    """Canonical letter order a < a⁻¹ < b < b⁻¹ < ..."""
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


@dataclass(frozen=True)
class FreeGroup(Group):
    """Free group on ``rank`` generators, elements as reduced words"""

    rank: int = 2
    kind = "free"

    def __post_init__(self):
        if not 2 <= self.rank <= len(LETTER_NAMES):
            raise InvalidGroup(f"Free group rank must be between 2 and {len(LETTER_NAMES)}, got {self.rank}")

    @property
    def spec(self) -> str:
        return f"f{self.rank}"

    @property
    def identity(self) -> Word:
        return ()

    @property
    def letters(self) -> Tuple[int, ...]:
        """Generators and their inverses in canonical order"""
        return tuple(sorted(
            [i for i in range(1, self.rank + 1)] + [-i for i in range(1, self.rank + 1)],
            key=letter_rank,
        ))

    @property
    def generators(self) -> Tuple[Word, ...]:
        return tuple((i,) for i in range(1, self.rank + 1))

    def allowed_after(self, last: int) -> Tuple[int, ...]:
        """Letters that may follow ``last`` in a reduced word (``last == 0`` at the start)"""
        return tuple(l for l in self.letters if l != -last)

    def validate(self, g: Any) -> Word:
        if not isinstance(g, tuple):
            raise InvalidElement(f"{g!r} is not a free-group word")
        for i, letter in enumerate(g):
            if isinstance(letter, bool) or not isinstance(letter, int) or letter == 0 or abs(letter) > self.rank:
                raise InvalidElement(f"{g!r} has a letter outside F_{self.rank}")
            if i and g[i - 1] == -letter:
                raise InvalidElement(f"{g!r} is not reduced")
        return g

    def multiply(self, g: Word, h: Word) -> Word:
        g = self.validate(g)
        h = self.validate(h)
        i = 0
        while i < len(g) and i < len(h) and g[len(g) - 1 - i] == -h[i]:
            i += 1
        return g[:len(g) - i] + h[i:]

    def invert(self, g: Word) -> Word:
        return tuple(-l for l in reversed(self.validate(g)))

    def sort_key(self, g: Word) -> Tuple:
        return (len(g), tuple(letter_rank(l) for l in g))

    def ball_size(self, radius: int) -> int:
        k2 = 2 * self.rank
        return 1 + k2 * ((k2 - 1) ** radius - 1) // (k2 - 2)

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
        if radius < 0:
            raise ValueError(f"Ball radius must be non-negative, got {radius}")
        _check_cap(self.ball_size(radius), cap, f"Ball of radius {radius} in F_{self.rank}")
        elements: List[Word] = [()]
        level: List[Word] = [()]
        for _ in range(radius):
            level = [w + (l,) for w in level for l in self.allowed_after(w[-1] if w else 0)]
            elements.extend(level)
        return Ball(radius, tuple(elements))

    def sphere(self, radius: int) -> List[Word]:
        """Reduced words of length exactly ``radius``"""
        return [w for w in self.ball(radius) if len(w) == radius]

    def format(self, g: Word) -> str:
        g = self.validate(g)
        if not g:
            return "e"
        return "".join(LETTER_NAMES[abs(l) - 1] if l > 0 else LETTER_NAMES[abs(l) - 1].upper() for l in g)

    def parse(self, text: Union[str, Sequence[int]]) -> Word:
        """Parse ``aB`` / ``ab^-1`` / ``a^2b`` style words; uppercase means inverse"""
        if isinstance(text, (tuple, list)):
            return reduce_word(self.validate(tuple(text)))
        s = str(text).replace(" ", "").replace("⁻¹", "^-1").replace("*", "")
        if s in ("", "e", "1"):
            return ()
        letters: List[int] = []
        i = 0
        while i < len(s):
            ch = s[i]
            idx = LETTER_NAMES.find(ch.lower())
            if idx < 0 or idx >= self.rank:
                raise InvalidElement(f"Letter {ch!r} in {text!r} is not a generator of F_{self.rank}")
            letter = (idx + 1) if ch.islower() else -(idx + 1)
            i += 1
            power = 1
            if i < len(s) and s[i] == "^":
                j = i + 1
                if j < len(s) and s[j] in "+-":
                    j += 1
                while j < len(s) and s[j].isdigit():
                    j += 1
                try:
                    power = int(s[i + 1:j])
                except ValueError:
                    raise InvalidElement(f"Bad exponent in {text!r}")
                i = j
            letters.extend([letter] * power if power >= 0 else [-letter] * -power)
        return reduce_word(letters)


# --- finite groups --------------------------------------------------------

@dataclass(frozen=True)
class FiniteGroup(Group):
    """Finite group given by its Cayley table; element 0 is the identity"""

    name: str
    table: Tuple[Tuple[int, ...], ...]
    labels: Optional[Tuple[str, ...]] = None
    inverses: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    kind = "finite"

    def __post_init__(self):
        inverses = _validate_table(self.table, self.name)
        object.__setattr__(self, "inverses", inverses)
        if self.labels is not None and len(self.labels) != len(self.table):
            raise InvalidGroup(f"{self.name}: {len(self.labels)} labels for {len(self.table)} elements")

    @property
    def spec(self) -> str:
        return self.name

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def generators(self) -> Tuple[int, ...]:
        """Greedy generating set in index order"""
        gens: List[int] = []
        span = {0}
        for g in range(1, self.order):
            if g not in span:
                gens.append(g)
                span = set(self.closure(gens))
        return tuple(gens)

    def validate(self, g: Any) -> int:
        if isinstance(g, bool) or not isinstance(g, int) or not 0 <= g < self.order:
            raise InvalidElement(f"{g!r} is not an element index of {self.name} (order {self.order})")
        return g

    def multiply(self, g: int, h: int) -> int:
        return self.table[self.validate(g)][self.validate(h)]

    def invert(self, g: int) -> int:
        return self.inverses[self.validate(g)]

    def sort_key(self, g: int) -> Tuple:
        return (g,)

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
        _check_cap(self.order, cap, f"{self.name}")
        return Ball(radius, tuple(range(self.order)))

    def closure(self, elements: Iterable[int]) -> List[int]:
        """Subgroup generated by ``elements``, sorted by index"""
        span = {0}
        frontier = list(span)
        gens = list(elements)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(span)

    def format(self, g: int) -> str:
        g = self.validate(g)
        return self.labels[g] if self.labels else str(g)

    def parse(self, text: Union[str, int]) -> int:
        if isinstance(text, int) and not isinstance(text, bool):
            return self.validate(text)
        s = str(text).strip()
        if self.labels and s in self.labels:
            return self.labels.index(s)
        try:
            return self.validate(int(s))
        except ValueError:
            raise InvalidElement(f"Cannot parse {text!r} as an element of {self.name}")


def _validate_table(table: Sequence[Sequence[int]], name: str, samples: int = 4096) -> Tuple[int, ...]:
    n = len(table)
    if n == 0:
        raise InvalidGroup(f"{name}: empty Cayley table")
    full = range(n)
    for i, row in enumerate(table):
        if len(row) != n:
            raise InvalidGroup(f"{name}: row {i} has {len(row)} entries, expected {n}")
        if sorted(row) != list(full):
            raise InvalidGroup(f"{name}: row {i} is not a permutation of 0..{n - 1}")
    for j in full:
        if sorted(table[i][j] for i in full) != list(full):
            raise InvalidGroup(f"{name}: column {j} is not a permutation of 0..{n - 1}")
    for g in full:
        if table[0][g] != g or table[g][0] != g:
            raise InvalidGroup(f"{name}: element 0 does not act as the identity on {g}")

    inverses = []
    for g in full:
        inv = table[g].index(0)
        if table[inv][g] != 0:
            raise InvalidGroup(f"{name}: element {g} has no two-sided inverse")
        inverses.append(inv)

    # associativity: exhaustive for small tables, sampled otherwise
    if n ** 3 <= samples * 16:
        triples: Iterable[Tuple[int, int, int]] = itertools.product(full, repeat=3)
    else:
        rng = random.Random(n)
        triples = [(rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(samples)]
    for g, h, k in triples:
        if table[table[g][h]][k] != table[g][table[h][k]]:
            raise InvalidGroup(f"{name}: ({g}·{h})·{k} != {g}·({h}·{k})")

    return tuple(inverses)


def _from_closure(name: str, generators: Sequence[Hashable], op: Callable[[Any, Any], Any],
                  identity: Hashable, label: Callable[[Any], str]) -> FiniteGroup:
    """Build a Cayley table from concrete generators, identity first, then BFS order"""
    elements = [identity]
    index: Dict[Hashable, int] = {identity: 0}
    frontier = [identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g in generators:
                y = op(x, g)
                if y not in index:
                    index[y] = len(elements)
                    elements.append(y)
                    nxt.append(y)
        frontier = nxt
    table = tuple(tuple(index[op(x, y)] for y in elements) for x in elements)
    return FiniteGroup(name=name, table=table, labels=tuple(label(x) for x in elements))


def cyclic_group(n: int) -> FiniteGroup:
    if n < 1:
        raise InvalidGroup(f"Cyclic group order must be positive, got {n}")
    table = tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    return FiniteGroup(name=f"z{n}", table=table)


def _compose(p: Tuple[int, ...], q: Tuple[int, ...]) -> Tuple[int, ...]:
    # (p·q)(i) = p(q(i))
    return tuple(p[i] for i in q)


def symmetric_group(degree: int = 3) -> FiniteGroup:
    identity = tuple(range(degree))
    gens = [tuple([1, 0] + list(range(2, degree))), tuple(list(range(1, degree)) + [0])]
    return _from_closure(f"s{degree}", gens, _compose, identity,
                         lambda p: "".join(str(i) for i in p))


def dihedral_group(n: int = 4) -> FiniteGroup:
    """Symmetries of the regular n-gon as vertex permutations (order 2n)"""
    identity = tuple(range(n))
    rotation = tuple((i + 1) % n for i in range(n))
    reflection = tuple((-i) % n for i in range(n))
    return _from_closure(f"d{n}", [rotation, reflection], _compose, identity,
                         lambda p: "".join(str(i) for i in p))


def _hamilton(p: Tuple[int, int, int, int], q: Tuple[int, int, int, int]) -> Tuple[int, int, int, int]:
    a1, b1, c1, d1 = p
    a2, b2, c2, d2 = q
    return (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2)


def _quaternion_label(q: Tuple[int, int, int, int]) -> str:
    for value, unit in zip(q, ("1", "i", "j", "k")):
        if value:
            return ("-" if value < 0 else "") + unit
    return "0"


def quaternion_group() -> FiniteGroup:
    return _from_closure("q8", [(0, 1, 0, 0), (0, 0, 1, 0)], _hamilton, (1, 0, 0, 0), _quaternion_label)


def read_cayley_table(path: str, name: Optional[str] = None) -> FiniteGroup:
    """Read the plain Cayley-table format: N, then N rows of N indices"""
    with open(path, "r") as f:
        tokens = f.read().split()
    if not tokens:
        raise InvalidGroup(f"{path}: empty Cayley table file")
    try:
        numbers = [int(t) for t in tokens]
    except ValueError as e:
        raise InvalidGroup(f"{path}: non-integer entry ({e})")
    n = numbers[0]
    if len(numbers) != 1 + n * n:
        raise InvalidGroup(f"{path}: expected {n * n} table entries, found {len(numbers) - 1}")
    rows = tuple(tuple(numbers[1 + i * n: 1 + (i + 1) * n]) for i in range(n))
    groups_logger.info(f"Read Cayley table of order {n} from {path}")
    return FiniteGroup(name=name or f"finite:{path}", table=rows)


def write_cayley_table(group: FiniteGroup, path: str) -> None:
    with open(path, "w") as f:
        f.write(f"{group.order}\n")
        for row in group.table:
            f.write(" ".join(str(x) for x in row) + "\n")


FIXTURES: Dict[str, Callable[[], FiniteGroup]] = {
    "s3": lambda: symmetric_group(3),
    "d4": lambda: dihedral_group(4),
    "q8": quaternion_group,
}


def parse_group(spec: str) -> Group:
    """Parse ``z``, ``f2``/``free:3``, ``z4``/``cyclic:4``, ``s3``, ``d4``, ``q8`` or ``finite:PATH``"""
    s = spec.strip()
    low = s.lower()
    if low in ("z", "integers"):
        return IntegerGroup()
    if low.startswith("free:"):
        return FreeGroup(int(low.split(":", 1)[1]))
    if low.startswith("f") and low[1:].isdigit():
        return FreeGroup(int(low[1:]))
    if low.startswith("cyclic:"):
        return cyclic_group(int(low.split(":", 1)[1]))
    if low.startswith("z") and low[1:].isdigit():
        return cyclic_group(int(low[1:]))
    if low in FIXTURES:
        return FIXTURES[low]()
    if low.startswith("finite:"):
        return read_cayley_table(s.split(":", 1)[1], name=s)
    raise InvalidGroup(f"Unknown group specification {spec!r}")


# module-level forms of the group law

def multiply(g: Element, h: Element, group: Group) -> Element:
    return group.multiply(g, h)


def invert(g: Element, group: Group) -> Element:
    return group.invert(g)


def ball(group: Group, radius: int, cap: int = DEFAULT_BALL_CAP) -> Ball:
    return group.ball(radius, cap)
