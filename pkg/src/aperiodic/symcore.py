"""Alphabets, words, block patterns and finite dictionary slices.

Patterns of any dimension are stored as a shape tuple plus a flat row-major
tuple of letter indices.  In two dimensions axis 0 runs over rows (top to
bottom) and axis 1 over columns, which is the way the patterns are printed.
Patterns are identified up to translation only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import InvalidArgument

Shape = tuple[int, ...]
Cells = tuple[int, ...]

#: returned by :func:`proximity_index` when two slices agree up to their cap
AGREE_TO_CAP = math.inf

_RESERVED = set("#/x \t\n")


@dataclass(frozen=True)
class Alphabet:
    letters: tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if not letters:
            raise InvalidArgument("alphabet must contain at least one letter")
        if len(set(letters)) != len(letters):
            raise InvalidArgument(f"repeated letters in alphabet {letters}")
        for a in letters:
            if not isinstance(a, str) or len(a) != 1 or a in _RESERVED:
                raise InvalidArgument(f"letters must be single non-reserved characters, got {a!r}")
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(letters)})

    @classmethod
    def of(cls, letters: Iterable[str]) -> "Alphabet":
        return cls(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def index(self, letter: str) -> int:
        try:
            return self._index[letter]
        except KeyError:
            raise InvalidArgument(f"letter {letter!r} not in alphabet {''.join(self.letters)}") from None

    def encode(self, text: str) -> Cells:
        return tuple(self.index(ch) for ch in text)

    def decode(self, cells: Iterable[int]) -> str:
        return "".join(self.letters[i] for i in cells)


@dataclass(frozen=True)
class Word:
    alphabet: Alphabet
    symbols: Cells

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        object.__setattr__(self, "symbols", symbols)
        n = len(self.alphabet)
        if any(s < 0 or s >= n for s in symbols):
            raise InvalidArgument("word contains an index outside the alphabet")

    @classmethod
    def parse(cls, alphabet: Alphabet, text: str) -> "Word":
        return cls(alphabet, alphabet.encode(text))

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return self.alphabet.decode(self.symbols)

    def to_block(self) -> "BlockPattern":
        return BlockPattern(self.alphabet, (len(self.symbols),), self.symbols)


@dataclass(frozen=True)
class BlockPattern:
    alphabet: Alphabet
    dims: Shape
    cells: Cells

    def __post_init__(self):
        dims = tuple(int(n) for n in self.dims)
        cells = tuple(int(c) for c in self.cells)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "cells", cells)
        if not dims or any(n < 1 for n in dims):
            raise InvalidArgument(f"block extents must be positive, got {dims}")
        if len(cells) != math.prod(dims):
            raise InvalidArgument(f"{len(cells)} cells do not fill a block of shape {dims}")
        n = len(self.alphabet)
        if any(c < 0 or c >= n for c in cells):
            raise InvalidArgument("block contains an index outside the alphabet")

    @property
    def dim(self) -> int:
        return len(self.dims)

    @classmethod
    def from_array(cls, alphabet: Alphabet, arr) -> "BlockPattern":
        arr = np.asarray(arr)
        return cls(alphabet, arr.shape, tuple(arr.reshape(-1).tolist()))

    @classmethod
    def from_rows(cls, alphabet: Alphabet, rows: Sequence[str]) -> "BlockPattern":
        """Two-dimensional pattern from printed rows, top row first."""
        if not rows or len({len(r) for r in rows}) != 1:
            raise InvalidArgument("rows must be nonempty and of equal length")
        cells = tuple(alphabet.index(ch) for row in rows for ch in row)
        return cls(alphabet, (len(rows), len(rows[0])), cells)

    def array(self) -> np.ndarray:
        return np.array(self.cells, dtype=np.int64).reshape(self.dims)

    def to_word(self) -> Word:
        if self.dim != 1:
            raise InvalidArgument("only one-dimensional blocks convert to words")
        return Word(self.alphabet, self.cells)

    def text(self) -> str:
        return format_cells(self.alphabet, self.dims, self.cells)

    def __str__(self) -> str:
        return self.text()


def as_block(x: Word | BlockPattern) -> BlockPattern:
    return x.to_block() if isinstance(x, Word) else x


def format_cells(alphabet: Alphabet, dims: Shape, cells: Cells) -> str:
    """Letters of the last axis run together, rows are separated by '/'."""
    width = dims[-1]
    rows = [alphabet.decode(cells[i:i + width]) for i in range(0, len(cells), width)]
    return "/".join(rows)


def format_shape(dims: Shape) -> str:
    return "x".join(str(n) for n in dims)


@dataclass(frozen=True)
class PeriodicConfiguration:
    """The configuration obtained by repeating ``tile`` along every axis."""

    tile: BlockPattern

    @property
    def dims(self) -> Shape:
        return self.tile.dims

    @property
    def alphabet(self) -> Alphabet:
        return self.tile.alphabet

    def letter_at(self, site: Sequence[int]) -> int:
        if len(site) != self.tile.dim:
            raise InvalidArgument("site dimension does not match the tile")
        arr = self.tile.array()
        return int(arr[tuple(i % n for i, n in zip(site, self.dims))])

    def window(self, origin: Sequence[int], shape: Sequence[int]) -> np.ndarray:
        """Letters on the box starting at ``origin`` with extents ``shape``."""
        arr = self.tile.array()
        idx = [np.arange(o, o + s) % n for o, s, n in zip(origin, shape, self.dims)]
        return arr[np.ix_(*idx)]


def all_shapes(dim: int, cap: int) -> list[Shape]:
    return [tuple(s) for s in itertools.product(range(1, cap + 1), repeat=dim)]


def _windows(arr: np.ndarray, shape: Shape, n_letters: int) -> frozenset[Cells]:
    if any(s > n for s, n in zip(shape, arr.shape)):
        return frozenset()
    view = np.lib.stride_tricks.sliding_window_view(arr, shape)
    ncell = math.prod(shape)
    flat = view.reshape(-1, ncell)
    base = max(n_letters, 2)
    if base ** ncell < 2 ** 62:
        weights = base ** np.arange(ncell - 1, -1, -1, dtype=np.int64)
        codes = np.unique(flat.astype(np.int64) @ weights)
        out = []
        for code in codes.tolist():
            digits = []
            for _ in range(ncell):
                code, r = divmod(code, base)
                digits.append(r)
            out.append(tuple(reversed(digits)))
        return frozenset(out)
    rows = np.unique(flat, axis=0)
    return frozenset(tuple(r) for r in rows.tolist())


@dataclass(frozen=True, eq=False)
class DictionarySlice:
    """Admissible patterns of every block shape with all extents at most ``cap``."""

    alphabet: Alphabet
    dim: int
    cap: int
    entries: Mapping[Shape, frozenset[Cells]] = field(repr=False)

    def __post_init__(self):
        if self.dim < 1 or self.cap < 1:
            raise InvalidArgument("dimension and cap must be positive")
        entries = {}
        for shape in all_shapes(self.dim, self.cap):
            entries[shape] = frozenset(tuple(p) for p in self.entries.get(shape, ()))
        extra = set(self.entries) - set(entries)
        if extra:
            raise InvalidArgument(f"shapes outside the cap: {sorted(extra)}")
        object.__setattr__(self, "entries", entries)

    def __eq__(self, other):
        if not isinstance(other, DictionarySlice):
            return NotImplemented
        return (self.alphabet == other.alphabet and self.dim == other.dim
                and self.cap == other.cap and self.entries == other.entries)

    def __hash__(self):
        return hash((self.alphabet, self.dim, self.cap))

    def shapes(self) -> list[Shape]:
        return list(self.entries)

    def patterns(self, shape: Shape | int) -> frozenset[Cells]:
        if isinstance(shape, int):
            shape = (shape,)
        return self.entries[tuple(shape)]

    def words(self, k: int) -> set[str]:
        """Length-k words as strings (one-dimensional slices)."""
        if self.dim != 1:
            raise InvalidArgument("words() is for one-dimensional slices")
        return {self.alphabet.decode(p) for p in self.entries[(k,)]}

    def texts(self, shape: Shape | int) -> set[str]:
        if isinstance(shape, int):
            shape = (shape,)
        return {format_cells(self.alphabet, tuple(shape), p) for p in self.entries[tuple(shape)]}

    def __contains__(self, pattern) -> bool:
        if isinstance(pattern, Word):
            pattern = pattern.to_block()
        if isinstance(pattern, BlockPattern):
            if pattern.dims not in self.entries:
                return False
            return pattern.cells in self.entries[pattern.dims]
        return False

    def restrict(self, cap: int) -> "DictionarySlice":
        if cap > self.cap:
            raise InvalidArgument("cannot restrict to a larger cap")
        keep = {s: p for s, p in self.entries.items() if max(s) <= cap}
        return DictionarySlice(self.alphabet, self.dim, cap, keep)

    def to_text(self) -> str:
        return slice_to_text(self)


def slice_from_array(alphabet: Alphabet, arr, cap: int) -> DictionarySlice:
    """All sub-blocks of a finite array, for every shape up to ``cap``."""
    arr = np.asarray(arr)
    if arr.ndim < 1:
        raise InvalidArgument("need an array of dimension at least 1")
    entries = {s: _windows(arr, s, len(alphabet)) for s in all_shapes(arr.ndim, cap)}
    return DictionarySlice(alphabet, arr.ndim, cap, entries)


def slice_from_words(alphabet: Alphabet, words: Iterable[str], cap: int) -> DictionarySlice:
    """Union of the factors (up to length ``cap``) of finitely many words."""
    entries: dict[Shape, set[Cells]] = {(k,): set() for k in range(1, cap + 1)}
    for w in words:
        cells = alphabet.encode(w)
        for k in range(1, min(cap, len(cells)) + 1):
            entries[(k,)].update(cells[i:i + k] for i in range(len(cells) - k + 1))
    return DictionarySlice(alphabet, 1, cap, entries)


def full_shift_slice(alphabet: Alphabet, cap: int, dim: int = 1) -> DictionarySlice:
    n = len(alphabet)
    entries = {}
    for shape in all_shapes(dim, cap):
        entries[shape] = frozenset(itertools.product(range(n), repeat=math.prod(shape)))
    return DictionarySlice(alphabet, dim, cap, entries)


def subwords(w: Word, k: int) -> set[Word]:
    if k <= 0:
        raise InvalidArgument("factor length must be positive")
    s = w.symbols
    return {Word(w.alphabet, s[i:i + k]) for i in range(len(s) - k + 1)}


def periodic_dictionary(cfg: PeriodicConfiguration, cap: int) -> DictionarySlice:
    tile = cfg.tile.array()
    # one full period plus cap cells per axis sees every window
    reps = [math.ceil((n + cap) / n) for n in tile.shape]
    big = np.tile(tile, reps)
    big = big[tuple(slice(0, n + cap) for n in tile.shape)]
    return slice_from_array(cfg.alphabet, big, cap)


def _sub_block(dims: Shape, cells: Cells, axis: int, start: int, length: int) -> Cells:
    arr = np.array(cells).reshape(dims)
    idx = [slice(None)] * len(dims)
    idx[axis] = slice(start, start + length)
    return tuple(arr[tuple(idx)].reshape(-1).tolist())


@dataclass(frozen=True)
class Violation:
    kind: str          # "D1" (heredity) or "D2" (extensibility)
    shape: Shape
    pattern: str
    detail: str

    def __str__(self) -> str:
        return f"{self.kind} {format_shape(self.shape)} {self.pattern}: {self.detail}"


def validate_slice(s: DictionarySlice) -> list[Violation]:
    """Every heredity and one-step extensibility failure of a finite slice."""
    out: list[Violation] = []
    # restrictions of each pattern to its front/back part along every axis
    cuts: dict[tuple[Shape, int, int], set[Cells]] = {}
    for shape, pats in s.entries.items():
        for axis in range(s.dim):
            n = shape[axis]
            if n > 1:
                for start in (0, 1):
                    cuts[shape, axis, start] = {_sub_block(shape, c, axis, start, n - 1) for c in pats}
    for shape, pats in s.entries.items():
        for axis in range(s.dim):
            n = shape[axis]
            if n > 1:
                smaller = shape[:axis] + (n - 1,) + shape[axis + 1:]
                for start, side in ((0, "back"), (1, "front")):
                    for sub in sorted(cuts[shape, axis, start] - s.entries[smaller]):
                        out.append(Violation("D1", smaller, format_cells(s.alphabet, smaller, sub),
                                             f"missing, but it is the {side} part of a {format_shape(shape)} pattern"))
            if n < s.cap:
                larger = shape[:axis] + (n + 1,) + shape[axis + 1:]
                for start, side in ((1, "before"), (0, "after")):
                    for cells in sorted(pats - cuts[larger, axis, start]):
                        out.append(Violation("D2", shape, format_cells(s.alphabet, shape, cells),
                                             f"no extension {side} along axis {axis}"))
    return out


@dataclass(frozen=True)
class ComplexityTable:
    values: Mapping[Shape, int]

    def __getitem__(self, key: Shape | int) -> int:
        if isinstance(key, int):
            key = (key,)
        return self.values[tuple(key)]

    def as_list(self) -> list[int]:
        """comp(1), comp(2), ... for one-dimensional tables."""
        keys = sorted(self.values)
        if any(len(k) != 1 for k in keys):
            raise InvalidArgument("as_list() is for one-dimensional tables")
        return [self.values[k] for k in keys]

    def monotone(self, n_letters: int) -> bool:
        vals = self.as_list()
        return all(a <= b <= n_letters * a for a, b in zip(vals, vals[1:]))


def complexity(s: DictionarySlice) -> ComplexityTable:
    return ComplexityTable({shape: len(p) for shape, p in s.entries.items()})


def _check_compatible(a: DictionarySlice, b: DictionarySlice) -> None:
    if a.alphabet != b.alphabet:
        raise InvalidArgument("slices use different alphabets")
    if a.dim != b.dim:
        raise InvalidArgument("slices have different dimensions")


def proximity_index(s1: DictionarySlice, s2: DictionarySlice) -> int | float:
    """Largest n such that both slices agree on all shapes with extents <= n.

    Returns ``AGREE_TO_CAP`` when they agree up to the common cap.
    """
    _check_compatible(s1, s2)
    cap = min(s1.cap, s2.cap)
    for n in range(1, cap + 1):
        for shape in all_shapes(s1.dim, n):
            if max(shape) == n and s1.entries[shape] != s2.entries[shape]:
                return n - 1
    return AGREE_TO_CAP


def containment_index(inner: DictionarySlice, outer: DictionarySlice) -> int | float:
    """Largest n such that ``inner`` is contained in ``outer`` on all shapes up to n."""
    _check_compatible(inner, outer)
    cap = min(inner.cap, outer.cap)
    for n in range(1, cap + 1):
        for shape in all_shapes(inner.dim, n):
            if max(shape) == n and not inner.entries[shape] <= outer.entries[shape]:
                return n - 1
    return AGREE_TO_CAP


def slice_to_text(s: DictionarySlice) -> str:
    lines = [f"#alphabet {''.join(s.alphabet.letters)}", f"#dim {s.dim}", f"#cap {s.cap}"]
    for shape in sorted(s.entries):
        lines.append(f"#shape {format_shape(shape)}")
        lines.extend(sorted(format_cells(s.alphabet, shape, c) for c in s.entries[shape]))
    return "\n".join(lines) + "\n"


def slice_from_text(text: str) -> DictionarySlice:
    alphabet = dim = cap = None
    entries: dict[Shape, set[Cells]] = {}
    current: Shape | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(" ")
            if key == "alphabet":
                alphabet = Alphabet(tuple(value))
            elif key == "dim":
                dim = int(value)
            elif key == "cap":
                cap = int(value)
            elif key == "shape":
                current = tuple(int(v) for v in value.split("x"))
                entries.setdefault(current, set())
            else:
                raise InvalidArgument(f"unknown header {line!r}")
            continue
        if alphabet is None or current is None:
            raise InvalidArgument("pattern line before alphabet or shape header")
        cells = alphabet.encode(line.replace("/", ""))
        if len(cells) != math.prod(current):
            raise InvalidArgument(f"pattern {line!r} does not fit shape {current}")
        entries[current].add(cells)
    if alphabet is None or dim is None or cap is None:
        raise InvalidArgument("missing #alphabet, #dim or #cap header")
    return DictionarySlice(alphabet, dim, cap, entries)


def iter_factors(text: str, k: int) -> Iterator[str]:
    for i in range(len(text) - k + 1):
        yield text[i:i + k]
