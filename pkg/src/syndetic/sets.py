"""Subsets of a group as expression trees, with exact normal forms per group family.

Expressions are immutable dataclasses. ``normalize`` turns an expression into one of

  - ``PeriodicNF``   residue bitmask for periodic subsets of ℤ
  - ``FreeGroupNF``  finite words plus prefix-incomparable cylinders in F_k
  - ``FiniteNF``     bitmask over the elements of a finite group
  - ``NotNormalizable`` when no exact form applies (aperiodic ℤ-sets)

Free-group normal forms are stored internally as prefix tries: a node stands for the
words extending some prefix, ``FULL`` for the whole cylinder and ``EMPTY`` for nothing.
"""

import json
import math
import os
import typing
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from .errors import InvalidElement, InvalidExpr, ScaleExceeded
from .groups import Element, FiniteGroup, FreeGroup, Group, IntegerGroup, Word, letter_rank, parse_group
from .logger import sets_logger

MAX_MODULUS = 10**7


# --- expressions ----------------------------------------------------------

class SetExpr:
    """Base class of set expression nodes"""

    def __or__(self, other: "SetExpr") -> "SetExpr":
        return Union((self, other))

    def __and__(self, other: "SetExpr") -> "SetExpr":
        return Intersection((self, other))

    def __invert__(self) -> "SetExpr":
        return Complement(self)


@dataclass(frozen=True)
class Residue(SetExpr):
    modulus: int
    residues: FrozenSet[int]

    def __post_init__(self):
        if self.modulus < 1:
            raise InvalidExpr(f"Residue modulus must be positive, got {self.modulus}")
        object.__setattr__(self, "residues", frozenset(r % self.modulus for r in self.residues))


@dataclass(frozen=True)
class PowersOfTwoComplement(SetExpr):
    """ℤ minus {2, 4, 8, ...}; 1 is not counted as a power"""


@dataclass(frozen=True)
class Interval(SetExpr):
    """Integers lo..hi inclusive; None leaves that end open"""
    lo: Optional[int] = None
    hi: Optional[int] = None


@dataclass(frozen=True)
class Cylinder(SetExpr):
    """Reduced words with prefix ``word``"""
    word: Word


@dataclass(frozen=True)
class FiniteWords(SetExpr):
    elements: FrozenSet[Any]

    def __post_init__(self):
        object.__setattr__(self, "elements", frozenset(self.elements))


@dataclass(frozen=True)
class All(SetExpr):
    pass


@dataclass(frozen=True)
class Empty(SetExpr):
    pass


@dataclass(frozen=True)
class Union(SetExpr):
    parts: Tuple[SetExpr, ...]


@dataclass(frozen=True)
class Intersection(SetExpr):
    parts: Tuple[SetExpr, ...]


@dataclass(frozen=True)
class Complement(SetExpr):
    inner: SetExpr


@dataclass(frozen=True)
class Translate(SetExpr):
    """Left translate g·inner"""
    g: Any
    inner: SetExpr


def residue(modulus: int, residues: Iterable[int]) -> Residue:
    return Residue(modulus, frozenset(residues))


def multiples(n: int) -> Residue:
    return Residue(n, frozenset({0}))


def non_multiples(n: int) -> Residue:
    return Residue(n, frozenset(range(1, n)))


def cylinder(group: FreeGroup, word: typing.Union[str, Word]) -> Cylinder:
    return Cylinder(group.parse(word) if isinstance(word, str) else group.validate(word))


# --- membership -----------------------------------------------------------

def _is_power_of_two(x: int) -> bool:
    return x >= 2 and (x & (x - 1)) == 0


def _require(group: Group, kind: type, node: SetExpr) -> None:
    if not isinstance(group, kind):
        raise InvalidExpr(f"{type(node).__name__} is not defined over {group.spec}")


def check_compatible(A: SetExpr, group: Group) -> None:
    """Raise InvalidExpr if some leaf of A does not belong to ``group``"""
    if isinstance(A, (Residue, PowersOfTwoComplement, Interval)):
        _require(group, IntegerGroup, A)
    elif isinstance(A, Cylinder):
        _require(group, FreeGroup, A)
        try:
            group.validate(A.word)
        except InvalidElement as e:
            raise InvalidExpr(f"Cylinder word invalid: {e.message}")
    elif isinstance(A, FiniteWords):
        try:
            for g in A.elements:
                group.validate(g)
        except InvalidElement as e:
            raise InvalidExpr(f"Finite set element invalid: {e.message}")
    elif isinstance(A, (Union, Intersection)):
        for part in A.parts:
            check_compatible(part, group)
    elif isinstance(A, Complement):
        check_compatible(A.inner, group)
    elif isinstance(A, Translate):
        try:
            group.validate(A.g)
        except InvalidElement as e:
            raise InvalidExpr(f"Translate element invalid: {e.message}")
        check_compatible(A.inner, group)
    elif not isinstance(A, (All, Empty)):
        raise InvalidExpr(f"Unknown set expression node {A!r}")


def member(A: SetExpr, g: Element, group: Group) -> bool:
    """True iff g lies in the set denoted by A"""
    if isinstance(A, All):
        return True
    if isinstance(A, Empty):
        return False
    if isinstance(A, Residue):
        _require(group, IntegerGroup, A)
        return g % A.modulus in A.residues
    if isinstance(A, PowersOfTwoComplement):
        _require(group, IntegerGroup, A)
        return not _is_power_of_two(g)
    if isinstance(A, Interval):
        _require(group, IntegerGroup, A)
        return (A.lo is None or g >= A.lo) and (A.hi is None or g <= A.hi)
    if isinstance(A, Cylinder):
        _require(group, FreeGroup, A)
        return g[:len(A.word)] == A.word
    if isinstance(A, FiniteWords):
        return g in A.elements
    if isinstance(A, Union):
        return any(member(p, g, group) for p in A.parts)
    if isinstance(A, Intersection):
        return all(member(p, g, group) for p in A.parts)
    if isinstance(A, Complement):
        return not member(A.inner, g, group)
    if isinstance(A, Translate):
        return member(A.inner, group.multiply(group.invert(A.g), g), group)
    raise InvalidExpr(f"Unknown set expression node {A!r}")


def indicator(A: SetExpr, lo: int, hi: int) -> np.ndarray:
    """Boolean membership array for the integers lo..hi (ℤ expressions only)"""
    x = np.arange(lo, hi + 1, dtype=np.int64)
    return _indicator(A, x)


def _indicator(A: SetExpr, x: np.ndarray) -> np.ndarray:
    if isinstance(A, All):
        return np.ones(x.shape, dtype=bool)
    if isinstance(A, Empty):
        return np.zeros(x.shape, dtype=bool)
    if isinstance(A, Residue):
        return np.isin(np.mod(x, A.modulus), sorted(A.residues))
    if isinstance(A, PowersOfTwoComplement):
        return ~((x >= 2) & ((x & (x - 1)) == 0))
    if isinstance(A, Interval):
        mask = np.ones(x.shape, dtype=bool)
        if A.lo is not None:
            mask &= x >= A.lo
        if A.hi is not None:
            mask &= x <= A.hi
        return mask
    if isinstance(A, FiniteWords):
        return np.isin(x, sorted(A.elements))
    if isinstance(A, Union):
        return np.logical_or.reduce([_indicator(p, x) for p in A.parts]) if A.parts else np.zeros(x.shape, bool)
    if isinstance(A, Intersection):
        return np.logical_and.reduce([_indicator(p, x) for p in A.parts]) if A.parts else np.ones(x.shape, bool)
    if isinstance(A, Complement):
        return ~_indicator(A.inner, x)
    if isinstance(A, Translate):
        return _indicator(A.inner, x - A.g)
    raise InvalidExpr(f"{type(A).__name__} has no integer indicator")


# --- periodic normal form -------------------------------------------------

def _repeat(block: int, width: int, times: int) -> int:
    if times == 1:
        return block
    return block * (((1 << (width * times)) - 1) // ((1 << width) - 1))


@dataclass(frozen=True)
class PeriodicNF:
    """Periodic subset of ℤ: x is a member iff bit (x mod modulus) of mask is set"""
    modulus: int
    mask: int

    @staticmethod
    def make(modulus: int, mask: int) -> "PeriodicNF":
        """Canonical form with the minimal period"""
        full = (1 << modulus) - 1
        mask &= full
        for d in range(1, modulus + 1):
            if modulus % d:
                continue
            block = mask & ((1 << d) - 1)
            if _repeat(block, d, modulus // d) == mask:
                return PeriodicNF(d, block)
        return PeriodicNF(modulus, mask)

    @property
    def residues(self) -> Tuple[int, ...]:
        return tuple(r for r in range(self.modulus) if self.mask >> r & 1)

    def contains(self, g: int) -> bool:
        return bool(self.mask >> (g % self.modulus) & 1)

    def lift(self, modulus: int) -> int:
        if modulus % self.modulus:
            raise ValueError(f"{modulus} is not a multiple of {self.modulus}")
        return _repeat(self.mask, self.modulus, modulus // self.modulus)

    def _common(self, other: "PeriodicNF") -> Tuple[int, int, int]:
        m = self.modulus * other.modulus // math.gcd(self.modulus, other.modulus)
        if m > MAX_MODULUS:
            raise ScaleExceeded(f"Common period {m} exceeds {MAX_MODULUS}", {"modulus": m})
        return m, self.lift(m), other.lift(m)

    def union(self, other: "PeriodicNF") -> "PeriodicNF":
        m, a, b = self._common(other)
        return PeriodicNF.make(m, a | b)

    def intersection(self, other: "PeriodicNF") -> "PeriodicNF":
        m, a, b = self._common(other)
        return PeriodicNF.make(m, a & b)

    def complement(self) -> "PeriodicNF":
        return PeriodicNF(self.modulus, ~self.mask & ((1 << self.modulus) - 1))

    def translate(self, g: int, group: Optional[Group] = None) -> "PeriodicNF":
        m = self.modulus
        s = g % m
        if s == 0:
            return self
        full = (1 << m) - 1
        return PeriodicNF(m, ((self.mask << s) | (self.mask >> (m - s))) & full)

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def is_full(self) -> bool:
        return self.mask == (1 << self.modulus) - 1

    def shortest(self) -> Optional[int]:
        """Member of least absolute value, preferring the positive one"""
        if self.is_empty:
            return None
        for k in range(self.modulus):
            for x in ((k, -k) if k else (0,)):
                if self.contains(x):
                    return x
        return None

    def to_expr(self) -> SetExpr:
        return Residue(self.modulus, frozenset(self.residues))

    def describe(self) -> str:
        return f"{{x : x mod {self.modulus} ∈ {set(self.residues) or '{}'}}}"


# --- finite group normal form ---------------------------------------------

@dataclass(frozen=True)
class FiniteNF:
    """Subset of a finite group as a bitmask over element indices"""
    order: int
    mask: int

    @property
    def elements(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.order) if self.mask >> i & 1)

    def contains(self, g: int) -> bool:
        return bool(self.mask >> g & 1)

    def union(self, other: "FiniteNF") -> "FiniteNF":
        return FiniteNF(self.order, self.mask | other.mask)

    def intersection(self, other: "FiniteNF") -> "FiniteNF":
        return FiniteNF(self.order, self.mask & other.mask)

    def complement(self) -> "FiniteNF":
        return FiniteNF(self.order, ~self.mask & ((1 << self.order) - 1))

    def translate(self, g: int, group: FiniteGroup) -> "FiniteNF":
        row = group.table[g]
        mask = 0
        for x in self.elements:
            mask |= 1 << row[x]
        return FiniteNF(self.order, mask)

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    @property
    def is_full(self) -> bool:
        return self.mask == (1 << self.order) - 1

    def shortest(self) -> Optional[int]:
        return self.elements[0] if self.mask else None

    def to_expr(self) -> SetExpr:
        return FiniteWords(frozenset(self.elements))

    def describe(self) -> str:
        return "{" + ", ".join(str(x) for x in self.elements) + "}"


# --- free group normal form -----------------------------------------------

class _Leaf:
    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name


FULL = _Leaf("FULL")
EMPTY = _Leaf("EMPTY")


@dataclass(frozen=True)
class Node:
    """Words extending the current prefix: ``here`` says whether the prefix itself is in"""
    here: bool
    children: Tuple[Tuple[int, Any], ...] = ()

    def child(self, letter: int) -> Any:
        for l, sub in self.children:
            if l == letter:
                return sub
        return EMPTY


Trie = typing.Union[_Leaf, Node]


def _expand(x: Trie, allowed: Tuple[int, ...]) -> Node:
    if x is FULL:
        return Node(True, tuple((l, FULL) for l in allowed))
    if x is EMPTY:
        return Node(False, ())
    return x


def _collapse(here: bool, children: List[Tuple[int, Any]], allowed: Tuple[int, ...]) -> Trie:
    kept = tuple((l, c) for l, c in children if c is not EMPTY)
    if here and len(kept) == len(allowed) and all(c is FULL for _, c in kept):
        return FULL
    if not here and not kept:
        return EMPTY
    return Node(here, kept)


def _apply(op: Callable[[bool, bool], bool], x: Trie, y: Trie, last: int, group: FreeGroup) -> Trie:
    """Pointwise Boolean combination of two tries rooted after letter ``last``"""
    if isinstance(x, _Leaf) and isinstance(y, _Leaf):
        return FULL if op(x is FULL, y is FULL) else EMPTY
    allowed = group.allowed_after(last)
    nx = _expand(x, allowed)
    ny = _expand(y, allowed)
    children = [(l, _apply(op, nx.child(l), ny.child(l), l, group)) for l in allowed]
    return _collapse(op(nx.here, ny.here), children, allowed)


def _path(word: Word, leaf: Trie) -> Trie:
    node = leaf
    for letter in reversed(word):
        node = Node(False, ((letter, node),))
    return node


def _normalize_trie(x: Trie, last: int, group: FreeGroup) -> Trie:
    if isinstance(x, _Leaf):
        return x
    allowed = group.allowed_after(last)
    children = [(l, _normalize_trie(x.child(l), l, group)) for l in allowed]
    return _collapse(x.here, children, allowed)


def _decompose(x: Trie, prefix: Word, words: List[Word], cylinders: List[Word]) -> None:
    if x is FULL:
        cylinders.append(prefix)
    elif isinstance(x, Node):
        if x.here:
            words.append(prefix)
        for l, sub in x.children:
            _decompose(sub, prefix + (l,), words, cylinders)


_OR = lambda a, b: a or b
_AND = lambda a, b: a and b
_DIFF = lambda a, b: a and not b


@dataclass(frozen=True)
class FreeGroupNF:
    """W ∪ ⋃ B_w over F_rank; words and cylinders sorted length-lexicographically"""
    rank: int
    words: Tuple[Word, ...]
    cylinders: Tuple[Word, ...]
    root: Trie = field(repr=False, compare=False, hash=False, default=None)

    @staticmethod
    def from_trie(group: FreeGroup, root: Trie) -> "FreeGroupNF":
        root = _normalize_trie(root, 0, group)
        words: List[Word] = []
        cylinders: List[Word] = []
        _decompose(root, (), words, cylinders)
        return FreeGroupNF(group.rank, tuple(sorted(words, key=group.sort_key)),
                           tuple(sorted(cylinders, key=group.sort_key)), root)

    @staticmethod
    def make(group: FreeGroup, words: Iterable[Word] = (), cylinders: Iterable[Word] = ()) -> "FreeGroupNF":
        root: Trie = EMPTY
        for w in cylinders:
            root = _apply(_OR, root, _path(group.validate(w), FULL), 0, group)
        for w in words:
            root = _apply(_OR, root, _path(group.validate(w), Node(True, ())), 0, group)
        return FreeGroupNF.from_trie(group, root)

    @property
    def group(self) -> FreeGroup:
        return FreeGroup(self.rank)

    def contains(self, g: Word) -> bool:
        node = self.root
        for letter in g:
            if node is FULL:
                return True
            if node is EMPTY:
                return False
            node = node.child(letter)
        return node is FULL or (isinstance(node, Node) and node.here)

    def union(self, other: "FreeGroupNF") -> "FreeGroupNF":
        return FreeGroupNF.from_trie(self.group, _apply(_OR, self.root, other.root, 0, self.group))

    def intersection(self, other: "FreeGroupNF") -> "FreeGroupNF":
        return FreeGroupNF.from_trie(self.group, _apply(_AND, self.root, other.root, 0, self.group))

    def difference(self, other: "FreeGroupNF") -> "FreeGroupNF":
        return FreeGroupNF.from_trie(self.group, _apply(_DIFF, self.root, other.root, 0, self.group))

    def complement(self) -> "FreeGroupNF":
        return FreeGroupNF.from_trie(self.group, _apply(_DIFF, FULL, self.root, 0, self.group))

    def translate(self, g: Word, group: Optional[FreeGroup] = None) -> "FreeGroupNF":
        group = self.group
        g = group.validate(g)
        if not g:
            return self
        pieces = [FreeGroupNF.make(group, words=[group.multiply(g, w) for w in self.words])]
        pieces.extend(_translate_cylinder(group, g, w) for w in self.cylinders)
        result = pieces[0]
        for p in pieces[1:]:
            result = result.union(p)
        return result

    @property
    def is_empty(self) -> bool:
        return self.root is EMPTY

    @property
    def is_full(self) -> bool:
        return self.root is FULL

    @property
    def is_finite(self) -> bool:
        return not self.cylinders

    @property
    def depth(self) -> int:
        return max((len(w) for w in self.words + self.cylinders), default=0)

    def shortest(self) -> Optional[Word]:
        """Length-lexicographically least member"""
        queue = deque([((), self.root)])
        while queue:
            prefix, node = queue.popleft()
            if node is FULL or (isinstance(node, Node) and node.here):
                return prefix
            if isinstance(node, Node):
                for l, sub in sorted(node.children, key=lambda c: letter_rank(c[0])):
                    queue.append((prefix + (l,), sub))
        return None

    def to_expr(self) -> SetExpr:
        parts: List[SetExpr] = [Cylinder(w) for w in self.cylinders]
        if self.words:
            parts.append(FiniteWords(frozenset(self.words)))
        if not parts:
            return Empty()
        return parts[0] if len(parts) == 1 else Union(tuple(parts))

    def describe(self) -> str:
        group = self.group
        items = [group.format(w) for w in self.words] + [f"B_{group.format(w)}" for w in self.cylinders]
        return " ∪ ".join(items) if items else "∅"


def _translate_cylinder(group: FreeGroup, g: Word, w: Word) -> FreeGroupNF:
    """Exact normal form of g·B_w"""
    if not w:
        return FreeGroupNF.make(group, cylinders=[()])
    c = 0
    while c < len(g) and c < len(w) and g[len(g) - 1 - c] == -w[c]:
        c += 1
    if c < len(w):
        return FreeGroupNF.make(group, cylinders=[g[:len(g) - c] + w[c:]])
    # w fully cancelled: g = u·w⁻¹ and g·B_w = G ∖ B_{u·l⁻¹} with l the last letter of w
    u = g[:len(g) - len(w)]
    return FreeGroupNF.make(group, cylinders=[u + (-w[-1],)]).complement()


@dataclass(frozen=True)
class NotNormalizable:
    reason: str


NormalForm = typing.Union[PeriodicNF, FreeGroupNF, FiniteNF]


def _full_nf(group: Group) -> NormalForm:
    if isinstance(group, IntegerGroup):
        return PeriodicNF(1, 1)
    if isinstance(group, FreeGroup):
        return FreeGroupNF.make(group, cylinders=[()])
    return FiniteNF(group.order, (1 << group.order) - 1)


def _empty_nf(group: Group) -> NormalForm:
    if isinstance(group, IntegerGroup):
        return PeriodicNF(1, 0)
    if isinstance(group, FreeGroup):
        return FreeGroupNF.make(group)
    return FiniteNF(group.order, 0)


def normalize(A: SetExpr, group: Group) -> typing.Union[NormalForm, NotNormalizable]:
    """Exact normal form of A, or NotNormalizable with the reason"""
    check_compatible(A, group)
    return _normalize(A, group)


def _normalize(A: SetExpr, group: Group) -> typing.Union[NormalForm, NotNormalizable]:
    if isinstance(A, All):
        return _full_nf(group)
    if isinstance(A, Empty):
        return _empty_nf(group)
    if isinstance(A, Residue):
        mask = 0
        for r in A.residues:
            mask |= 1 << r
        return PeriodicNF.make(A.modulus, mask)
    if isinstance(A, PowersOfTwoComplement):
        return NotNormalizable("complement of the powers of two is aperiodic")
    if isinstance(A, Interval):
        if A.lo is not None and A.hi is not None and A.lo > A.hi:
            return _empty_nf(group)
        return NotNormalizable("integer intervals are aperiodic")
    if isinstance(A, Cylinder):
        return FreeGroupNF.make(group, cylinders=[A.word])
    if isinstance(A, FiniteWords):
        if isinstance(group, IntegerGroup):
            return _empty_nf(group) if not A.elements else NotNormalizable("finite subsets of ℤ are aperiodic")
        if isinstance(group, FreeGroup):
            return FreeGroupNF.make(group, words=A.elements)
        mask = 0
        for g in A.elements:
            mask |= 1 << g
        return FiniteNF(group.order, mask)
    if isinstance(A, (Union, Intersection)):
        is_union = isinstance(A, Union)
        result: NormalForm = _empty_nf(group) if is_union else _full_nf(group)
        blocked: Optional[NotNormalizable] = None
        for part in A.parts:
            nf = _normalize(part, group)
            if isinstance(nf, NotNormalizable):
                blocked = blocked or nf
                continue
            result = result.union(nf) if is_union else result.intersection(nf)
        if blocked is None:
            return result
        # an absorbing element settles the value despite the aperiodic parts
        if is_union and result.is_full or not is_union and result.is_empty:
            return result
        return blocked
    if isinstance(A, Complement):
        nf = _normalize(A.inner, group)
        return nf if isinstance(nf, NotNormalizable) else nf.complement()
    if isinstance(A, Translate):
        nf = _normalize(A.inner, group)
        return nf if isinstance(nf, NotNormalizable) else nf.translate(A.g, group)
    raise InvalidExpr(f"Unknown set expression node {A!r}")


def translate_nf(g: Element, A: NormalForm, group: Optional[Group] = None) -> NormalForm:
    return A.translate(g, group)


def emptiness(A: NormalForm) -> bool:
    return A.is_empty


def coverage(A: NormalForm) -> bool:
    return A.is_full


def subset(A: NormalForm, B: NormalForm) -> bool:
    """Exact containment A ⊆ B"""
    if isinstance(A, FreeGroupNF):
        return A.difference(B).is_empty
    return A.intersection(B.complement()).is_empty


def escaping_element(A: NormalForm, B: NormalForm) -> Optional[Element]:
    """Shortest member of A outside B, or None when A ⊆ B"""
    if isinstance(A, FreeGroupNF):
        return A.difference(B).shortest()
    return A.intersection(B.complement()).shortest()


def finite_support(A: SetExpr, group: Group, cap: int = 10**6) -> Optional[FrozenSet[Element]]:
    """The elements of A when A is finite by construction, else None"""
    if isinstance(group, FiniteGroup):
        return frozenset(_normalize(A, group).elements)
    if isinstance(group, FreeGroup):
        nf = _normalize(A, group)
        return frozenset(nf.words) if nf.is_finite else None
    nf = _normalize(A, group)
    if isinstance(nf, PeriodicNF):
        return frozenset() if nf.is_empty else None
    if isinstance(A, Empty):
        return frozenset()
    if isinstance(A, FiniteWords):
        return A.elements
    if isinstance(A, Residue) and not A.residues:
        return frozenset()
    if isinstance(A, Interval) and A.lo is not None and A.hi is not None:
        if A.hi - A.lo + 1 > cap:
            raise ScaleExceeded(f"Interval of {A.hi - A.lo + 1} elements exceeds {cap}")
        return frozenset(range(A.lo, A.hi + 1))
    if isinstance(A, Translate):
        inner = finite_support(A.inner, group, cap)
        return None if inner is None else frozenset(group.multiply(A.g, x) for x in inner)
    if isinstance(A, Union):
        parts = [finite_support(p, group, cap) for p in A.parts]
        if any(p is None for p in parts):
            return None
        return frozenset().union(*parts)
    if isinstance(A, Intersection):
        for i, part in enumerate(A.parts):
            elems = finite_support(part, group, cap)
            if elems is not None:
                others = A.parts[:i] + A.parts[i + 1:]
                return frozenset(x for x in elems if all(member(o, x, group) for o in others))
        return None
    return None


def membership(A: SetExpr, group: Group) -> Callable[[Element], bool]:
    """Fast membership predicate, through the normal form when one exists"""
    nf = normalize(A, group)
    if isinstance(nf, NotNormalizable):
        return lambda g: member(A, g, group)
    return nf.contains


# --- text and JSON forms ----------------------------------------------------

def encode_element(g: Element, group: Group) -> typing.Union[int, str]:
    if isinstance(group, FreeGroup):
        return group.format(g)
    return g


def decode_element(value: Any, group: Group) -> Element:
    return group.validate(group.parse(value))


def to_json(A: SetExpr, group: Group) -> Dict[str, Any]:
    """Nested {op, args} tree; element order is canonical so output is stable"""
    if isinstance(A, Residue):
        return {"op": "residue", "args": [A.modulus, sorted(A.residues)]}
    if isinstance(A, PowersOfTwoComplement):
        return {"op": "powers2c", "args": []}
    if isinstance(A, Interval):
        return {"op": "interval", "args": [A.lo, A.hi]}
    if isinstance(A, Cylinder):
        return {"op": "cylinder", "args": [encode_element(A.word, group)]}
    if isinstance(A, FiniteWords):
        return {"op": "words", "args": [encode_element(g, group) for g in group.sorted(A.elements)]}
    if isinstance(A, All):
        return {"op": "all", "args": []}
    if isinstance(A, Empty):
        return {"op": "empty", "args": []}
    if isinstance(A, Union):
        return {"op": "union", "args": [to_json(p, group) for p in A.parts]}
    if isinstance(A, Intersection):
        return {"op": "intersection", "args": [to_json(p, group) for p in A.parts]}
    if isinstance(A, Complement):
        return {"op": "complement", "args": [to_json(A.inner, group)]}
    if isinstance(A, Translate):
        return {"op": "translate", "args": [encode_element(A.g, group), to_json(A.inner, group)]}
    raise InvalidExpr(f"Unknown set expression node {A!r}")


def from_json(obj: Dict[str, Any], group: Group) -> SetExpr:
    try:
        op = obj["op"]
        args = obj.get("args", [])
    except (KeyError, TypeError, AttributeError):
        raise InvalidExpr(f"Set expression must be an object with 'op' and 'args', got {obj!r}")
    try:
        if op == "residue":
            return Residue(int(args[0]), frozenset(int(r) for r in args[1]))
        if op == "powers2c":
            return PowersOfTwoComplement()
        if op == "interval":
            return Interval(args[0], args[1])
        if op == "cylinder":
            return Cylinder(decode_element(args[0], group))
        if op == "words":
            return FiniteWords(frozenset(decode_element(a, group) for a in args))
        if op == "all":
            return All()
        if op == "empty":
            return Empty()
        if op == "union":
            return Union(tuple(from_json(a, group) for a in args))
        if op == "intersection":
            return Intersection(tuple(from_json(a, group) for a in args))
        if op == "complement":
            return Complement(from_json(args[0], group))
        if op == "translate":
            return Translate(decode_element(args[0], group), from_json(args[1], group))
    except (IndexError, ValueError, TypeError) as e:
        raise InvalidExpr(f"Bad arguments for {op!r}: {e}")
    raise InvalidExpr(f"Unknown set operation {op!r}")


def dump_set_spec(A: SetExpr, group: Group) -> str:
    return json.dumps({"group": group.spec, "expr": to_json(A, group)}, sort_keys=True)


def parse_compact(text: str, group: Group) -> SetExpr:
    """Inline set syntax used on the command line.

    ``residue:3:0,1``  ``residue:3:exclude0``  ``multiples:2``  ``odd``  ``even``
    ``powers2c``  ``interval:0:``  ``cylinder:a``  ``words:a,aB``  ``all``  ``empty``
    ``not:<set>``  ``translate:<g>:<set>``
    """
    s = text.strip()
    head, _, rest = s.partition(":")
    head = head.lower()
    if head == "all":
        return All()
    if head == "empty":
        return Empty()
    if head == "even":
        return multiples(2)
    if head == "odd":
        return Residue(2, frozenset({1}))
    if head == "powers2c":
        return PowersOfTwoComplement()
    if head == "multiples":
        return multiples(int(rest))
    if head == "residue":
        m_text, _, r_text = rest.partition(":")
        m = int(m_text)
        if r_text.startswith("exclude"):
            excluded = {int(r) % m for r in r_text[len("exclude"):].split(",") if r}
            return Residue(m, frozenset(set(range(m)) - excluded))
        return Residue(m, frozenset(int(r) for r in r_text.split(",") if r))
    if head == "interval":
        lo_text, _, hi_text = rest.partition(":")
        return Interval(int(lo_text) if lo_text else None, int(hi_text) if hi_text else None)
    if head == "cylinder":
        return Cylinder(group.parse(rest))
    if head == "words":
        return FiniteWords(frozenset(group.parse(w) for w in rest.split(",") if w))
    if head == "not":
        return Complement(parse_compact(rest, group))
    if head == "translate":
        g_text, _, inner = rest.partition(":")
        return Translate(group.parse(g_text), parse_compact(inner, group))
    raise InvalidExpr(f"Cannot parse set {text!r}")


def load_set(text: str, group: Optional[Group] = None) -> Tuple[Group, SetExpr]:
    """Read a set from a JSON set-spec (inline or file path) or the compact syntax.

    A JSON spec carries its own group; ``group`` must then agree with it when given.
    """
    raw = text
    if os.path.exists(text):
        with open(text, "r") as f:
            raw = f.read()
    raw = raw.strip()
    if raw.startswith("{"):
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as e:
            raise InvalidExpr(f"Set spec is not valid JSON: {e}")
        spec_group = parse_group(obj["group"]) if "group" in obj else group
        if spec_group is None:
            raise InvalidExpr("Set spec names no group")
        if group is not None and group.spec != spec_group.spec:
            raise InvalidExpr(f"Set spec is over {spec_group.spec}, not {group.spec}")
        expr = from_json(obj.get("expr", obj), spec_group)
        check_compatible(expr, spec_group)
        return spec_group, expr
    if group is None:
        raise InvalidExpr(f"Compact set {text!r} needs a group")
    try:
        expr = parse_compact(raw, group)
    except ValueError as e:
        raise InvalidExpr(f"Cannot parse set {text!r}: {e}")
    check_compatible(expr, group)
    sets_logger.info(f"Parsed set {raw!r} over {group.spec}")
    return group, expr
