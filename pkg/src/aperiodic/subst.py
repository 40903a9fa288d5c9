"""Substitutions in one dimension and block substitutions in d dimensions.

A block substitution replaces every cell by a block of a common shape
``(n_1, ..., n_d)``; the cell at index i lands on the block starting at
``i * n`` (componentwise, 0-based).  One-dimensional substitutions may have
images of different lengths.

Seeds for fixed points live on the corner cells {-1, 0}^d.  As arrays they
are stored with index 0 standing for coordinate -1, so a seed is simply a
block of extent 2 along every axis.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import (InvalidArgument, IterationCap, SearchExhausted,
                     UnsupportedSubstitution, ConfigError, GateFailure)
from .symcore import (AGREE_TO_CAP, Alphabet, BlockPattern, DictionarySlice, PeriodicConfiguration,
                      Word, all_shapes, as_block, containment_index, periodic_dictionary,
                      proximity_index, slice_from_array, _windows)


@dataclass(frozen=True, eq=False)
class Substitution:
    alphabet: Alphabet
    dim: int
    images: tuple[np.ndarray, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.images) != len(self.alphabet):
            raise InvalidArgument("need exactly one image per letter")
        imgs = []
        for img in self.images:
            arr = np.array(img, dtype=np.int64)
            if arr.ndim != self.dim or arr.size == 0:
                raise InvalidArgument("every image must be a nonempty pattern of the substitution's dimension")
            if arr.min() < 0 or arr.max() >= len(self.alphabet):
                raise InvalidArgument("image uses an index outside the alphabet")
            arr.setflags(write=False)
            imgs.append(arr)
        if self.dim >= 2:
            shapes = {a.shape for a in imgs}
            if len(shapes) != 1:
                raise InvalidArgument("block substitution images must share one shape")
            if min(imgs[0].shape) < 2:
                raise UnsupportedSubstitution("block images need extent >= 2 along every axis")
        object.__setattr__(self, "images", tuple(imgs))

    @classmethod
    def from_rules(cls, alphabet: Sequence[str] | Alphabet, rules: Mapping[str, object],
                   dim: int | None = None) -> "Substitution":
        """Rules map a letter to a string (1D) or to a list of rows (2D), top row first."""
        alpha = alphabet if isinstance(alphabet, Alphabet) else Alphabet(tuple(alphabet))
        if set(rules) != set(alpha.letters):
            raise InvalidArgument("rules must cover exactly the alphabet")
        images = []
        dims = set()
        for a in alpha.letters:
            r = rules[a]
            if isinstance(r, str):
                images.append(np.array(alpha.encode(r), dtype=np.int64))
                dims.add(1)
            elif isinstance(r, (list, tuple)) and r and all(isinstance(row, (list, tuple, str)) for row in r):
                rows = [list(row) for row in r]
                if len({len(row) for row in rows}) != 1:
                    raise InvalidArgument(f"ragged rows in the image of {a!r}")
                images.append(np.array([[alpha.index(ch) for ch in row] for row in rows], dtype=np.int64))
                dims.add(2)
            else:
                raise InvalidArgument(f"cannot read the image of {a!r}")
        if len(dims) != 1:
            raise InvalidArgument("mixed image dimensions")
        d = dims.pop()
        if dim is not None and dim != d:
            raise InvalidArgument(f"declared dimension {dim} but images are {d}-dimensional")
        return cls(alpha, d, tuple(images))

    @property
    def block_shape(self) -> tuple[int, ...] | None:
        return self.images[0].shape if self.dim >= 2 else None

    def image(self, letter: str) -> BlockPattern:
        return BlockPattern.from_array(self.alphabet, self.images[self.alphabet.index(letter)])

    def rules(self) -> dict[str, object]:
        out = {}
        for a, img in zip(self.alphabet.letters, self.images):
            if self.dim == 1:
                out[a] = self.alphabet.decode(img.tolist())
            else:
                out[a] = [[self.alphabet.letters[i] for i in row] for row in img.tolist()]
        return out


def apply_array(s: Substitution, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    if x.ndim != s.dim:
        raise InvalidArgument("pattern dimension does not match the substitution")
    if s.dim == 1:
        if x.size == 0:
            return x.copy()
        return np.concatenate([s.images[i] for i in x.tolist()])
    stack = np.stack(s.images)                  # (letters, n_1, ..., n_d)
    big = stack[x]                              # (m_1, ..., m_d, n_1, ..., n_d)
    d = s.dim
    order = [ax for pair in zip(range(d), range(d, 2 * d)) for ax in pair]
    out_shape = [m * n for m, n in zip(x.shape, stack.shape[1:])]
    return big.transpose(order).reshape(out_shape)


def iterate_array(s: Substitution, x: np.ndarray, n: int) -> np.ndarray:
    for _ in range(n):
        x = apply_array(s, x)
    return np.asarray(x, dtype=np.int64)


def apply(s: Substitution, x: Word | BlockPattern) -> Word | BlockPattern:
    if x.alphabet != s.alphabet:
        raise InvalidArgument("pattern and substitution use different alphabets")
    if isinstance(x, Word):
        if s.dim != 1:
            raise InvalidArgument("words need a one-dimensional substitution")
        return Word(s.alphabet, tuple(apply_array(s, np.array(x.symbols, dtype=np.int64)).tolist()))
    return BlockPattern.from_array(s.alphabet, apply_array(s, x.array()))


def iterate(s: Substitution, x: Word | BlockPattern, n: int) -> Word | BlockPattern:
    for _ in range(n):
        x = apply(s, x)
    return x


@dataclass(frozen=True)
class PrimitivityReport:
    primitive: bool
    l0: int | None


def incidence_matrix(s: Substitution) -> np.ndarray:
    """Boolean matrix with entry [a, b] set when b occurs in the image of a."""
    n = len(s.alphabet)
    m = np.zeros((n, n), dtype=bool)
    for a, img in enumerate(s.images):
        m[a, np.unique(img)] = True
    return m


def primitivity(s: Substitution, kmax: int | None = None) -> PrimitivityReport:
    n = len(s.alphabet)
    if kmax is None:
        kmax = (n - 1) ** 2 + 1   # no primitive matrix needs a larger exponent
    if kmax < 1:
        raise InvalidArgument("kmax must be at least 1")
    m = incidence_matrix(s).astype(np.int64)
    power = m.copy()
    seen = set()
    for l in range(1, kmax + 1):
        if power.all():
            return PrimitivityReport(True, l)
        key = power.tobytes()
        if key in seen:
            break
        seen.add(key)
        power = ((power @ m) > 0).astype(np.int64)
    return PrimitivityReport(False, None)


def has_distinct_images(s: Substitution) -> bool:
    """Pairwise distinct letter images.

    For block substitutions this makes the induced map on configurations
    injective, which is a sufficient condition for an aperiodic subshift.
    It says nothing in the other direction.
    """
    keys = [(img.shape, img.tobytes()) for img in s.images]
    return len(set(keys)) == len(keys)


def _pattern_sets(arrays: Sequence[np.ndarray], dim: int, cap: int, n_letters: int):
    out = {shape: set() for shape in all_shapes(dim, cap)}
    for arr in arrays:
        for shape in out:
            out[shape].update(_windows(arr, shape, n_letters))
    return out


def substitution_dictionary(s: Substitution, cap: int, max_exponent: int = 40) -> DictionarySlice:
    """Sub-patterns of S^m(a) over all letters a and exponents m, up to ``cap``.

    The cumulative set is grown exponent by exponent and accepted once it has
    not changed for two consecutive exponents, the exponent is past the
    primitivity parameter (or past ``cap`` when not primitive) and every
    growing image has reached the cap.
    """
    if cap < 1:
        raise InvalidArgument("cap must be positive")
    n_letters = len(s.alphabet)
    report = primitivity(s)
    threshold = report.l0 if report.primitive else cap
    iterates = [np.array([a] * 1, dtype=np.int64).reshape((1,) * s.dim) for a in range(n_letters)]
    cumulative = {shape: set() for shape in all_shapes(s.dim, cap)}
    unchanged = 0
    prev_extents = None
    for m in range(0, max_exponent + 1):
        if m > 0:
            iterates = [apply_array(s, x) for x in iterates]
        new = _pattern_sets(iterates, s.dim, cap, n_letters)
        changed = False
        for shape, pats in new.items():
            if not pats <= cumulative[shape]:
                cumulative[shape] |= pats
                changed = True
        unchanged = 0 if changed else unchanged + 1
        extents = [min(x.shape) for x in iterates]
        grown = prev_extents is not None and all(
            e >= cap or e == p for e, p in zip(extents, prev_extents))
        prev_extents = extents
        if unchanged >= 2 and m >= threshold and grown:
            return DictionarySlice(s.alphabet, s.dim, cap, cumulative)
    raise IterationCap(f"dictionary did not stabilize within {max_exponent} exponents")


def fixed_seed_candidates(s: Substitution, k: int, legal: DictionarySlice | None = None) -> list[BlockPattern]:
    """All legal corner seeds whose restriction is invariant under S^k."""
    if legal is None:
        legal = substitution_dictionary(s, 2)
    d = s.dim
    n = len(s.alphabet)
    powered = [iterate_array(s, np.array([a]).reshape((1,) * d), k) for a in range(n)]
    out = []
    for cells in itertools.product(range(n), repeat=2 ** d):
        seed = np.array(cells, dtype=np.int64).reshape((2,) * d)
        ok = True
        for corner in itertools.product((0, 1), repeat=d):
            img = powered[seed[corner]]
            # a cell on the negative side keeps its letter at the far end of its image
            pos = tuple(-1 if c == 0 else 0 for c in corner)
            if img[pos] != seed[corner]:
                ok = False
                break
        if ok:
            pat = BlockPattern.from_array(s.alphabet, seed)
            if pat in legal:
                out.append(pat)
    return out


@dataclass(frozen=True)
class FixedSeed:
    seed: BlockPattern
    k: int
    candidates: tuple[BlockPattern, ...]   # every legal seed for the same exponent


def fixed_seed(s: Substitution, kmax: int = 8) -> FixedSeed:
    """The first legal corner seed (lexicographic) for the smallest exponent k."""
    if s.dim == 1 and len(s.alphabet) < 2:
        raise InvalidArgument("one-dimensional seeds need at least two letters")
    legal = substitution_dictionary(s, 2)
    for k in range(1, kmax + 1):
        cands = fixed_seed_candidates(s, k, legal)
        if cands:
            return FixedSeed(cands[0], k, tuple(cands))
    raise SearchExhausted(f"no legal invariant seed for exponents up to {kmax}",
                          tried=list(range(1, kmax + 1)))


def fixed_point_box(s: Substitution, seed: BlockPattern, k: int, lo: int, hi: int,
                    max_iter: int = 64) -> np.ndarray:
    """Letters of the k-periodic point on [lo, hi] along every axis.

    Coordinates are those of the seed: its first cell on each axis is -1.
    """
    if lo > hi:
        raise InvalidArgument("empty range")
    arr = seed.array()
    if arr.shape != (2,) * s.dim:
        raise InvalidArgument("seed must have extent 2 along every axis")
    if s.dim == 1:
        left = np.array([arr[0]], dtype=np.int64)
        right = np.array([arr[1]], dtype=np.int64)
        for _ in range(max_iter):
            if len(left) >= -lo and len(right) >= hi + 1:
                full = np.concatenate([left, right])
                origin = len(left)
                return full[origin + lo: origin + hi + 1]
            nl, nr = iterate_array(s, left, k), iterate_array(s, right, k)
            if nl[-len(left):].tolist() != left.tolist() or nr[:len(right)].tolist() != right.tolist():
                raise InvalidArgument("seed is not invariant under the given power")
            if len(nl) == len(left) and len(nr) == len(right):
                break
            left, right = nl, nr
        raise IterationCap("fixed point does not grow far enough")
    half = 1
    for _ in range(max_iter):
        if half >= -lo and half >= hi + 1:
            sl = slice(half + lo, half + hi + 1)
            return arr[(sl,) * s.dim]
        nxt = iterate_array(s, arr, k)
        nh = nxt.shape[0] // 2
        if not np.array_equal(nxt[(slice(nh - half, nh + half),) * s.dim], arr):
            raise InvalidArgument("seed is not invariant under the given power")
        arr, half = nxt, nh
    raise IterationCap("fixed point does not grow far enough")


def fixed_point_window(s: Substitution, seed: BlockPattern, k: int, radius: int) -> BlockPattern:
    """The box [-radius, radius]^d of the k-periodic point grown from ``seed``."""
    if radius < 0:
        raise InvalidArgument("radius must be nonnegative")
    return BlockPattern.from_array(s.alphabet, fixed_point_box(s, seed, k, -radius, radius))


def fixed_point_dictionary(s: Substitution, cap: int, radius: int | None = None) -> DictionarySlice:
    """Oracle: patterns of large windows of the k-periodic points.

    Takes the union over every invariant seed at the minimal exponent; for a
    primitive substitution all of them give the same set, while for the
    non-primitive carpet the all-``a`` seed alone would miss most patterns.
    """
    fs = fixed_seed(s)
    if radius is None:
        radius = 8 * cap if s.dim >= 2 else 64 * cap
    entries: dict = {}
    for seed in fs.candidates:
        win = fixed_point_box(s, seed, fs.k, -radius, radius)
        for shape, pats in slice_from_array(s.alphabet, win, cap).entries.items():
            entries.setdefault(shape, set()).update(pats)
    return DictionarySlice(s.alphabet, s.dim, cap, {k: frozenset(v) for k, v in entries.items()})


def symmetry_orbit(v: BlockPattern) -> list[BlockPattern]:
    """The 2x2 windows of the doubly periodic extension of a 2x2 tile v."""
    if v.dims != (2, 2):
        raise InvalidArgument("symmetry orbit is defined for 2x2 tiles")
    a = v.array()
    variants = [a, a[::-1, :], a[:, ::-1], a[::-1, ::-1]]
    out = []
    for m in variants:
        p = BlockPattern.from_array(v.alphabet, m)
        if p not in out:
            out.append(p)
    return out


def symmetry_2x2_search(slice_: DictionarySlice) -> list[BlockPattern]:
    if slice_.dim != 2 or slice_.cap < 2:
        raise InvalidArgument("need a two-dimensional slice with cap at least 2")
    legal = slice_.patterns((2, 2))
    out = []
    for cells in sorted(legal):
        v = BlockPattern(slice_.alphabet, (2, 2), cells)
        if all(u.cells in legal for u in symmetry_orbit(v)):
            out.append(v)
    return out


def approximant_gate(legal: DictionarySlice, v: Word | BlockPattern) -> None:
    """Check that the periodic extension of v only shows legal patterns of extent <= 2."""
    v = as_block(v)
    if legal.cap < 2:
        raise InvalidArgument("gate needs a slice with cap at least 2")
    cap2 = legal.restrict(2)
    per = periodic_dictionary(PeriodicConfiguration(v), 2)
    if containment_index(per, cap2) != AGREE_TO_CAP:
        raise GateFailure(f"periodic extension of {v.text()} leaves the dictionary")


def periodic_approximant(s: Substitution, v: Word | BlockPattern, n: int) -> PeriodicConfiguration:
    """S^n applied to the periodic extension of v, which is periodic with tile S^n(v)."""
    if n < 0:
        raise InvalidArgument("n must be nonnegative")
    v = as_block(v)
    return PeriodicConfiguration(BlockPattern.from_array(s.alphabet, iterate_array(s, v.array(), n)))


def default_seed(s: Substitution, legal: DictionarySlice | None = None) -> BlockPattern:
    """Starting tile for approximants.

    In one dimension a letter with a legal square aa is used when there is one,
    otherwise the word of an edge-covering closed path in the order-1 graph.
    In two dimensions the first tile found by :func:`symmetry_2x2_search`.
    """
    from . import debruijn

    if legal is None:
        legal = substitution_dictionary(s, 2)
    if s.dim == 1:
        for a in range(len(s.alphabet)):
            if (a, a) in legal.patterns(2):
                return BlockPattern(s.alphabet, (1,), (a,))
        g = debruijn.build_graph(legal, 1)
        path = debruijn.global_closed_path(g, "edge")
        return debruijn.periodic_word_from_path(path).to_block()
    if s.dim == 2:
        found = symmetry_2x2_search(legal)
        if not found:
            raise GateFailure("no 2x2 tile with a legal symmetry orbit")
        return found[0]
    raise InvalidArgument("default seeds exist for dimensions 1 and 2 only")


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    dims: tuple[int, ...]
    containment: int | float    # approximant patterns lie in the dictionary up to this extent
    agreement: int | float      # both pattern sets coincide up to this extent


def convergence_table(s: Substitution, v: Word | BlockPattern, n_max: int, cap: int,
                      n_min: int = 0, legal: DictionarySlice | None = None) -> list[ConvergenceRow]:
    if legal is None:
        legal = substitution_dictionary(s, cap)
    rows = []
    for n in range(n_min, n_max + 1):
        cfg = periodic_approximant(s, v, n)
        per = periodic_dictionary(cfg, cap)
        rows.append(ConvergenceRow(n, cfg.dims, containment_index(per, legal), proximity_index(per, legal)))
    return rows


_JSON_KEYS = {"alphabet", "dim", "rules"}


def substitution_from_json(data: Mapping | str | Path) -> Substitution:
    """Read ``{"alphabet": [...], "dim": d, "rules": {...}}``; unknown keys are rejected."""
    if isinstance(data, (str, Path)):
        try:
            data = json.loads(Path(data).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read substitution file: {exc}") from exc
    if not isinstance(data, Mapping):
        raise ConfigError("substitution file must hold a JSON object")
    unknown = set(data) - _JSON_KEYS
    if unknown:
        raise ConfigError(f"unknown keys: {sorted(unknown)}")
    missing = _JSON_KEYS - set(data)
    if missing:
        raise ConfigError(f"missing keys: {sorted(missing)}")
    alphabet, dim, rules = data["alphabet"], data["dim"], data["rules"]
    if not isinstance(alphabet, list) or not all(isinstance(a, str) for a in alphabet):
        raise ConfigError("alphabet must be a list of strings")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ConfigError("dim must be a positive integer")
    if not isinstance(rules, Mapping):
        raise ConfigError("rules must be an object")
    for a, r in rules.items():
        if dim == 1 and not isinstance(r, str):
            raise ConfigError(f"rule for {a!r} must be a string in dimension 1")
        if dim == 2 and not (isinstance(r, list) and all(isinstance(row, (list, str)) for row in r)):
            raise ConfigError(f"rule for {a!r} must be a list of rows in dimension 2")
    if dim > 2:
        raise ConfigError("substitution files support dimensions 1 and 2")
    try:
        return Substitution.from_rules(alphabet, rules, dim=dim)
    except InvalidArgument as exc:
        raise ConfigError(str(exc)) from exc


def substitution_to_json(s: Substitution) -> dict:
    return {"alphabet": list(s.alphabet.letters), "dim": s.dim, "rules": s.rules()}
