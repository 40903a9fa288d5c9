"""Jacobi operators on periodic sequences and their band spectra.

The operator acts as

    (J psi)(m) = p_m psi(m-1) + conj(p_{m+1}) psi(m+1) + q_m psi(m)

with p and q read off the configuration by local functions.  For period P
the spectrum is a union of at most P closed bands.  Two methods are provided:
the trace of the transfer-matrix product (the discriminant), whose level sets
|Delta| = 2 give the band edges, and direct diagonalisation of the P x P
Bloch matrices on a grid of quasi-momenta, used as an independent check.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DegenerateHopping, InvalidArgument, NumericFailure
from .symcore import (DictionarySlice, PeriodicConfiguration, containment_index,
                      periodic_dictionary, proximity_index)

TANGENCY_TOL = 1e-9
# rounding-noise multiple below which |Delta| - 2 at a gap midpoint counts as zero
CLOSED_GAP_NOISE = 1e3


@dataclass(frozen=True)
class LocalFunction:
    """Value determined by the letters on the window [m - radius, m + radius].

    ``table`` maps window strings to values; windows not listed get ``default``.
    """

    radius: int
    table: Mapping[str, complex] = field(default_factory=dict)
    default: complex = 0.0

    def __post_init__(self):
        if self.radius < 0:
            raise InvalidArgument("radius must be nonnegative")
        for key in self.table:
            if len(key) != 2 * self.radius + 1:
                raise InvalidArgument(f"window {key!r} does not have length {2 * self.radius + 1}")

    @classmethod
    def constant(cls, value: complex) -> "LocalFunction":
        return cls(0, {}, value)

    @classmethod
    def letter_indicator(cls, letter: str, value: float) -> "LocalFunction":
        """``value`` where the letter at the site is ``letter``, zero elsewhere."""
        return cls(0, {letter: value}, 0.0)

    def __call__(self, window: str) -> complex:
        return self.table.get(window, self.default)


@dataclass(frozen=True)
class JacobiSpec:
    hopping: LocalFunction
    potential: LocalFunction


def free_spec() -> JacobiSpec:
    return JacobiSpec(LocalFunction.constant(1.0), LocalFunction.constant(0.0))


def schroedinger_spec(letter: str, coupling: float) -> JacobiSpec:
    """Unit hopping and potential ``coupling`` on the sites carrying ``letter``."""
    return JacobiSpec(LocalFunction.constant(1.0), LocalFunction.letter_indicator(letter, coupling))


@dataclass(frozen=True, eq=False)
class PeriodicJacobi:
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p)
        q = np.asarray(self.q)
        if p.ndim != 1 or p.shape != q.shape or p.size == 0:
            raise InvalidArgument("p and q must be nonempty sequences of equal length")
        if np.iscomplexobj(q):
            if np.abs(q.imag).max() > 1e-12:
                raise InvalidArgument("potential must be real")
            q = q.real
        if np.iscomplexobj(p) and np.abs(p.imag).max() == 0:
            p = p.real
        object.__setattr__(self, "p", p.astype(complex if np.iscomplexobj(p) else float))
        object.__setattr__(self, "q", q.astype(float))

    @property
    def period(self) -> int:
        return len(self.q)

    def rotated(self, shift: int) -> "PeriodicJacobi":
        return PeriodicJacobi(np.roll(self.p, -shift), np.roll(self.q, -shift))

    def gershgorin_bound(self) -> float:
        ap = np.abs(self.p)
        return float(np.max(np.abs(self.q) + ap + np.roll(ap, -1)))


def sample(spec: JacobiSpec, cfg: PeriodicConfiguration, require_real_hopping: bool = False) -> PeriodicJacobi:
    if cfg.tile.dim != 1:
        raise InvalidArgument("Jacobi operators are sampled on one-dimensional configurations")
    word = cfg.alphabet.decode(cfg.tile.cells)
    P = len(word)
    p, q = [], []
    for m in range(P):
        win_p = "".join(word[(m + j) % P] for j in range(-spec.hopping.radius, spec.hopping.radius + 1))
        win_q = "".join(word[(m + j) % P] for j in range(-spec.potential.radius, spec.potential.radius + 1))
        p.append(spec.hopping(win_p))
        q.append(spec.potential(win_q))
    p = np.array(p, dtype=complex)
    if require_real_hopping and (np.any(p == 0) or np.any(p.imag != 0)):
        raise DegenerateHopping("hopping must be real and nonzero for the discriminant method")
    return PeriodicJacobi(p, np.array(q, dtype=complex))


def _require_real_nonzero(j: PeriodicJacobi) -> np.ndarray:
    if np.iscomplexobj(j.p):
        raise DegenerateHopping("complex hopping: use the Bloch method")
    if np.any(j.p == 0):
        raise DegenerateHopping("vanishing hopping")
    return j.p


def transfer_product(j: PeriodicJacobi, energies) -> np.ndarray:
    """Ordered product A_{P-1}(E) ... A_0(E), shape (len(E), 2, 2)."""
    p = _require_real_nonzero(j)
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    P = j.period
    m11 = np.ones_like(E)
    m12 = np.zeros_like(E)
    m21 = np.zeros_like(E)
    m22 = np.ones_like(E)
    for m in range(P):
        pn = p[(m + 1) % P]
        a11 = (E - j.q[m]) / pn
        a12 = -p[m] / pn
        m11, m12, m21, m22 = a11 * m11 + a12 * m21, a11 * m12 + a12 * m22, m11, m12
    return np.stack([np.stack([m11, m12], -1), np.stack([m21, m22], -1)], -2)


def discriminant(j: PeriodicJacobi, E):
    """Trace of the transfer-matrix product; scalar in, scalar out."""
    M = transfer_product(j, E)
    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    scale = np.maximum(1.0, np.abs(M).max(axis=(1, 2)) ** 2)
    if np.any(np.abs(det - 1.0) > 1e-10 * scale):
        raise NumericFailure("transfer product lost unit determinant")
    tr = M[:, 0, 0] + M[:, 1, 1]
    return float(tr[0]) if np.ndim(E) == 0 else tr


def _trace(j: PeriodicJacobi, E: np.ndarray) -> np.ndarray:
    M = transfer_product(j, E)
    return M[:, 0, 0] + M[:, 1, 1]


@dataclass(frozen=True)
class BandSet:
    intervals: tuple[tuple[float, float], ...]
    tangencies: tuple[float, ...] = ()

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        if not ivs:
            raise InvalidArgument("a band set is nonempty")
        for (a, b), (c, _) in zip(ivs, ivs[1:]):
            if not b < c:
                raise InvalidArgument("intervals must be sorted and disjoint")
        if any(a > b for a, b in ivs):
            raise InvalidArgument("interval with left end above right end")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def from_intervals(cls, intervals: Sequence[tuple[float, float]]) -> "BandSet":
        """Sort and merge overlapping or touching intervals."""
        merged: list[list[float]] = []
        for a, b in sorted(intervals):
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def band_count(self) -> int:
        """Number of bands counted with the merged touchings."""
        return len(self.intervals) + len(self.tangencies)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        return any(a - tol <= x <= b + tol for a, b in self.intervals)

    def measure(self) -> float:
        return sum(b - a for a, b in self.intervals)


def _edges_in(f: Callable, grid: np.ndarray, vals: np.ndarray, level: float, tol: float) -> list[float]:
    g = vals - level
    roots = [float(x) for x, v in zip(grid, g) if v == 0.0]
    idx = np.nonzero(g[:-1] * g[1:] < 0)[0]
    for i in idx:
        roots.append(brentq(lambda e: f(e) - level, grid[i], grid[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps))
    return roots


def _hidden_roots(f: Callable, grid: np.ndarray, vals: np.ndarray, tol: float):
    """Level crossings that the grid cannot see.

    Around every local extremum of the sampled discriminant whose grid values
    all stay strictly inside the level, the true extremum is located; if it
    pokes through +-2 the two crossings are bracketed on either side of it,
    and if it sits on the level within ``TANGENCY_TOL`` it is a touching.
    """
    roots, touches = [], []
    d = np.diff(vals)
    for i in np.nonzero(d[:-1] * d[1:] < 0)[0] + 1:
        sign = 1.0 if d[i - 1] > 0 else -1.0      # +1 at a local maximum
        level = 2.0 * sign
        if np.any(sign * (vals[[i - 1, i + 1]] - level) > 0):
            continue                               # crossing already bracketed by the grid
        lo, hi = grid[i - 1], grid[i + 1]
        res = minimize_scalar(lambda e: -sign * f(e), bounds=(lo, hi), method="bounded",
                              options={"xatol": tol * 1e-2})
        x_ext = float(res.x)
        excess = sign * (f(x_ext) - level)
        if abs(excess) <= TANGENCY_TOL:
            touches.append(x_ext)
        elif excess > 0:
            for a, b in ((lo, x_ext), (x_ext, hi)):
                roots.append(brentq(lambda e: f(e) - level, a, b, xtol=tol, rtol=4 * np.finfo(float).eps))
    return roots, touches


def _dedup(xs: list[float], tol: float) -> list[float]:
    out: list[float] = []
    for x in sorted(xs):
        if not out or x - out[-1] > tol:
            out.append(x)
    return out


def _grid_band_set(j: PeriodicJacobi, tol: float, grid_factor: int, max_refine: int) -> BandSet:
    P = j.period
    bound = j.gershgorin_bound() * (1 + 1e-9) + 1e-12
    f = lambda e: float(_trace(j, np.array([e]))[0])
    npts = max(8 * P * grid_factor, 257)
    result = None
    for _ in range(max_refine + 1):
        grid = np.linspace(-bound, bound, npts)
        vals = _trace(j, grid)
        if not np.all(np.isfinite(vals)):
            raise NumericFailure("discriminant overflowed on the energy grid")
        extra, touches = _hidden_roots(f, grid, vals, tol)
        edges = _dedup(_edges_in(f, grid, vals, 2.0, tol) + _edges_in(f, grid, vals, -2.0, tol) + extra,
                       2 * tol)
        points = [-bound] + [e for e in edges if -bound < e < bound] + [bound]
        pieces = [(a, b) for a, b in zip(points, points[1:]) if abs(f(0.5 * (a + b))) <= 2.0]
        if not pieces:
            raise NumericFailure("no band found")
        result = BandSet(BandSet.from_intervals(pieces).intervals, tuple(_dedup(touches, 2 * tol)))
        if result.band_count == P:
            return result
        npts *= 4
    warnings.warn(f"found {result.band_count} bands for period {P}; touching bands merged", RuntimeWarning)
    return result


def dirichlet_count(j: PeriodicJacobi, E) -> np.ndarray:
    """Eigenvalues below E of the chain on sites 0..P-2 with both ends cut off.

    Sylvester inertia of the LDL^T factorisation; one such eigenvalue sits in
    the closure of every gap of the periodic operator.
    """
    E = np.atleast_1d(np.asarray(E, dtype=float))
    P = j.period
    count = np.zeros(E.shape, dtype=np.int64)
    if P < 2:
        return count
    tiny = np.finfo(float).tiny
    ap2 = np.abs(j.p) ** 2
    d = j.q[0] - E
    d = np.where(d == 0, -tiny, d)
    count += d < 0
    for m in range(1, P - 1):
        d = (j.q[m] - E) - ap2[m] / d
        d = np.where(d == 0, -tiny, d)
        count += d < 0
    return count


def _bisect(pred, lo: np.ndarray, hi: np.ndarray, tol: float, max_iter: int = 200):
    """Vectorised bisection; ``pred(x)`` True means the boundary lies right of x."""
    lo, hi = lo.copy(), hi.copy()
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        right = pred(mid)
        lo = np.where(right, mid, lo)
        hi = np.where(right, hi, mid)
    return lo, hi


def dirichlet_eigenvalues(j: PeriodicJacobi, tol: float = 1e-13) -> np.ndarray:
    P = j.period
    if P < 2:
        return np.zeros(0)
    bound = j.gershgorin_bound() * (1 + 1e-9) + 1e-12
    idx = np.arange(P - 1)
    lo, hi = _bisect(lambda x: dirichlet_count(j, x) <= idx,
                     np.full(P - 1, -bound), np.full(P - 1, bound), tol)
    return 0.5 * (lo + hi)


def _bracket_band_set(j: PeriodicJacobi, tol: float) -> BandSet:
    P = j.period
    bound = j.gershgorin_bound() * (1 + 1e-9) + 1e-12
    mu = dirichlet_eigenvalues(j, tol=min(tol, 1e-13))
    left = np.concatenate([[-bound], mu])
    right = np.concatenate([mu, [bound]])
    tr = lambda x: _trace(j, x)
    if not np.all(np.isfinite(tr(np.concatenate([left, right])))):
        raise NumericFailure("discriminant overflowed")
    s_left = np.sign(tr(left))
    # a point inside each band: Delta changes sign across the band
    c_lo, c_hi = _bisect(lambda x: np.sign(tr(x)) == s_left, left, right, tol)
    centre = 0.5 * (c_lo + c_hi)
    l_lo, l_hi = _bisect(lambda x: np.abs(tr(x)) > 2.0, left, centre, tol)
    r_lo, r_hi = _bisect(lambda x: np.abs(tr(x)) <= 2.0, centre, right, tol)
    bands = sorted(zip(0.5 * (l_lo + l_hi), 0.5 * (r_lo + r_hi)))
    closed = _closed_gaps(j, bands, tol)
    merged: list[list[float]] = []
    touches: list[float] = []
    for i, (lo, hi) in enumerate(bands):
        if merged and closed[i - 1]:
            touches.append(0.5 * (lo + merged[-1][1]))
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return BandSet(tuple((a, b) for a, b in merged), tuple(touches))


def _closed_gaps(j: PeriodicJacobi, bands, tol: float) -> np.ndarray:
    """Which apparent gaps between consecutive bands are touchings.

    At a touching |Delta| - 2 has a double root, so bisection leaves a
    spurious gap of width about sqrt(machine eps).  Inside a true gap
    |Delta| > 2; a midpoint where |Delta| exceeds 2 by no more than the
    rounding noise of the transfer product is taken as a closed gap.
    """
    if len(bands) < 2:
        return np.zeros(0, dtype=bool)
    right = np.array([b[1] for b in bands[:-1]])
    left = np.array([b[0] for b in bands[1:]])
    mid = 0.5 * (right + left)
    M = transfer_product(j, mid)
    excess = np.abs(M[:, 0, 0] + M[:, 1, 1]) - 2.0
    noise = CLOSED_GAP_NOISE * np.finfo(float).eps * j.period * np.abs(M).max(axis=(1, 2))
    return (left - right <= 2 * tol) | (excess <= noise)


def band_set(j: PeriodicJacobi, tol: float = 1e-10, method: str = "bracket",
             grid_factor: int = 16, max_refine: int = 2) -> BandSet:
    """Bands {E : |Delta(E)| <= 2}, edges located by bisection on Delta -/+ 2.

    ``method="bracket"`` (default) isolates band r between consecutive
    Dirichlet eigenvalues, found by exact inertia counting, so bands and gaps
    narrower than any grid are still resolved.  ``method="grid"`` brackets
    sign changes on a uniform grid of at least ``8 * P * grid_factor`` points
    over the Gershgorin interval, refining up to ``max_refine`` times when
    fewer than P bands turn up.  Touching bands are merged in both cases and
    the touching points recorded in ``tangencies``.
    """
    _require_real_nonzero(j)
    if method == "bracket":
        return _bracket_band_set(j, tol)
    if method == "grid":
        return _grid_band_set(j, tol, grid_factor, max_refine)
    raise InvalidArgument(f"unknown method {method!r}")


def bloch_matrix(j: PeriodicJacobi, theta: float) -> np.ndarray:
    P = j.period
    H = np.zeros((P, P), dtype=complex)
    H[np.arange(P), np.arange(P)] = j.q
    for m in range(1, P):
        H[m, m - 1] += j.p[m]
        H[m - 1, m] += np.conj(j.p[m])
    H[0, P - 1] += j.p[0] * np.exp(-1j * theta)
    H[P - 1, 0] += np.conj(j.p[0]) * np.exp(1j * theta)
    return H


def bloch_spectrum(j: PeriodicJacobi, phases: int = 2048, chunk: int = 256) -> np.ndarray:
    """Sorted eigenvalues of the Bloch matrices on a uniform grid of quasi-momenta."""
    if phases < 1:
        raise InvalidArgument("need at least one phase")
    thetas = 2 * np.pi * np.arange(phases) / phases
    # only the two corner entries depend on theta
    base = bloch_matrix(j, 0.0)
    P = j.period
    base[0, P - 1] -= j.p[0]
    base[P - 1, 0] -= np.conj(j.p[0])
    out = []
    for start in range(0, phases, chunk):
        twist = np.exp(-1j * thetas[start:start + chunk])
        mats = np.repeat(base[None], len(twist), axis=0)
        mats[:, 0, P - 1] += j.p[0] * twist
        mats[:, P - 1, 0] += np.conj(j.p[0]) * np.conj(twist)
        try:
            out.append(np.linalg.eigvalsh(mats).reshape(-1))
        except np.linalg.LinAlgError as exc:
            raise NumericFailure(str(exc)) from exc
    return np.sort(np.concatenate(out))


def bloch_band_edges(j: PeriodicJacobi) -> BandSet:
    """Bands from the eigenvalues at the periodic and antiperiodic phases.

    Band r runs between the r-th smallest eigenvalues at theta = 0 and
    theta = pi, which interlace.
    """
    e0 = np.linalg.eigvalsh(bloch_matrix(j, 0.0))
    e1 = np.linalg.eigvalsh(bloch_matrix(j, np.pi))
    return BandSet.from_intervals([(min(a, b), max(a, b)) for a, b in zip(e0, e1)])


def _points_as_intervals(x) -> list[tuple[float, float]]:
    if isinstance(x, BandSet):
        return list(x.intervals)
    arr = np.asarray(x, dtype=float).reshape(-1)
    return [(v, v) for v in np.sort(arr)]


def _distance(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Distance of each x to the union of the sorted disjoint intervals [lo, hi]."""
    k = np.searchsorted(lo, x, side="right") - 1
    inf = np.full(x.shape, np.inf)
    below = np.where(k >= 0, np.maximum(x - hi[np.clip(k, 0, None)], 0.0), inf)
    above = np.where(k + 1 < len(lo), lo[np.clip(k + 1, None, len(lo) - 1)] - x, inf)
    return np.minimum(below, above)


def _directed(a: list[tuple[float, float]], b: list[tuple[float, float]]) -> float:
    """sup over a of the distance to b; attained at an endpoint of a or a gap midpoint of b."""
    al, ar = (np.array(v, dtype=float) for v in zip(*a))
    bl, br = (np.array(v, dtype=float) for v in zip(*b))
    mids = 0.5 * (br[:-1] + bl[1:])
    k = np.searchsorted(al, mids, side="right") - 1
    inside = (k >= 0) & (mids <= ar[np.clip(k, 0, None)])
    cands = np.concatenate([al, ar, mids[inside]])
    return float(_distance(cands, bl, br).max())


def hausdorff(a, b) -> float:
    """Hausdorff distance between finite unions of closed intervals (or point sets)."""
    ia, ib = _points_as_intervals(a), _points_as_intervals(b)
    if not ia or not ib:
        raise InvalidArgument("Hausdorff distance needs nonempty sets")
    ia, ib = _merge(ia), _merge(ib)
    return max(_directed(ia, ib), _directed(ib, ia))


def _merge(ivs):
    out: list[list[float]] = []
    for l, r in sorted(ivs):
        if out and l <= out[-1][1]:
            out[-1][1] = max(out[-1][1], r)
        else:
            out.append([l, r])
    return [(l, r) for l, r in out]


def gaps(a: BandSet) -> list[tuple[float, float]]:
    """Bounded open intervals of the complement."""
    return [(r, l) for (_, r), (l, _) in zip(a.intervals, a.intervals[1:])]


def bands_csv(rows: Sequence[tuple[int, int, BandSet]]) -> str:
    """CSV with columns n, period, band_index, left_edge, right_edge."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "period", "band_index", "left_edge", "right_edge"])
    for n, period, bands in rows:
        for i, (l, r) in enumerate(bands.intervals):
            w.writerow([n, period, i, f"{l:.17g}", f"{r:.17g}"])
    return buf.getvalue()


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    period: int
    band_count: int
    proximity_index: int | float
    containment_index: int | float
    hausdorff_to_ref: float
    bands: BandSet = field(repr=False)


def convergence_experiment(configs: Sequence[tuple[int, PeriodicConfiguration]], spec: JacobiSpec,
                           legal: DictionarySlice | None = None, tol: float = 1e-10) -> list[ConvergenceRecord]:
    """Band sets of a family of periodic configurations against the last one.

    ``configs`` is a list of (n, configuration); the configuration with the
    largest n serves as reference.  When ``legal`` is given, the proximity of
    each configuration's dictionary to it is reported as well.
    """
    if not configs:
        raise InvalidArgument("need at least one configuration")
    configs = sorted(configs, key=lambda t: t[0])
    bands = [band_set(sample(spec, cfg), tol=tol) for _, cfg in configs]
    ref = bands[-1]
    out = []
    for (n, cfg), b in zip(configs, bands):
        if legal is not None:
            per = periodic_dictionary(cfg, legal.cap)
            prox, cont = proximity_index(per, legal), containment_index(per, legal)
        else:
            prox = cont = math.nan
        out.append(ConvergenceRecord(n, cfg.dims[0], b.band_count, prox, cont, hausdorff(b, ref), b))
    return out


def substitution_convergence(s, spec: JacobiSpec, seed, n_max: int, n_min: int = 1, cap: int = 10,
                             tol: float = 1e-10) -> list[ConvergenceRecord]:
    """Convergence table for the approximants S^n(seed^infinity), n = n_min..n_max."""
    from .subst import periodic_approximant, substitution_dictionary

    legal = substitution_dictionary(s, cap)
    configs = [(n, periodic_approximant(s, seed, n)) for n in range(n_min, n_max + 1)]
    return convergence_experiment(configs, spec, legal, tol=tol)


def _fmt(x) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def convergence_csv(records: Sequence[ConvergenceRecord]) -> str:
    """CSV with columns n, period, proximity_index, hausdorff_to_ref."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "period", "proximity_index", "hausdorff_to_ref"])
    for r in records:
        w.writerow([r.n, r.period, _fmt(r.proximity_index), f"{r.hausdorff_to_ref:.17g}"])
    return buf.getvalue()
