"""Acceptance suite: one check per criterion, each printing a PASS or FAIL line.

Run standalone with ``python3 tests/test_acceptance.py`` or through pytest,
which repeats the lines in its terminal summary.
"""

from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest

from aperiodic import corpus, debruijn, probes, spectra, subst
from aperiodic.symcore import (AGREE_TO_CAP, BlockPattern, PeriodicConfiguration, Word, complexity,
                               full_shift_slice, periodic_dictionary)

AB = corpus.AB
ONE_DIM = corpus.ONE_DIM_SUBSTITUTIONS
CORPUS_1D = ONE_DIM + ("one-defect", "full-shift")

# collected by conftest.py for the terminal summary
RESULTS: list[str] = []


def slice_of(name, cap):
    if corpus.is_substitution(name):
        return subst.substitution_dictionary(corpus.substitution(name), cap)
    return corpus.sequence_dictionary(name, cap)


def tile_of(s, text):
    if "/" in text:
        return BlockPattern.from_rows(s.alphabet, text.split("/"))
    return Word.parse(s.alphabet, text).to_block()


def within(start, budget):
    took = time.perf_counter() - start
    assert took < budget, f"took {took:.2f} s, budget {budget} s"
    return f"{took:.2f} s"


def check_complexity():
    t = time.perf_counter()
    fib = complexity(slice_of("fibonacci", 12)).as_list()
    assert fib == [k + 1 for k in range(1, 13)], fib
    full = complexity(full_shift_slice(AB, 8)).as_list()
    assert full == [2 ** k for k in range(1, 9)], full
    return f"Fibonacci comp(k)=k+1 for k<=12, full shift 2^k for k<=8 ({within(t, 1.0)})"


def check_connectivity():
    t = time.perf_counter()
    for name in ONE_DIM:
        d = slice_of(name, 9)
        flags = [debruijn.is_strongly_connected(debruijn.build_graph(d, k)) for k in range(1, 9)]
        assert all(flags), (name, flags)
    step = corpus.sequence_dictionary("step", 3)
    assert not debruijn.is_strongly_connected(debruijn.build_graph(step, 1))
    shifted = corpus.sequence_dictionary("step-shifted", 3)
    assert debruijn.is_strongly_connected(debruijn.build_graph(shifted, 1))
    assert not debruijn.is_strongly_connected(debruijn.build_graph(shifted, 2))
    return f"5 substitutions connected for k<=8; step G1 no; shifted step G1 yes, G2 no ({within(t, 1.0)})"


def check_branching():
    t = time.perf_counter()
    for name in CORPUS_1D:
        d = slice_of(name, 9)
        comp = complexity(d)
        n = len(d.alphabet)
        for k in range(1, 9):
            nub = debruijn.branching_count(debruijn.build_graph(d, k))
            diff = comp[k + 1] - comp[k]
            assert diff / (n - 1) <= nub <= 2 * diff, (name, k, nub, diff)
    fib = slice_of("fibonacci", 4)
    nubs = [debruijn.branching_count(debruijn.build_graph(fib, k)) for k in (2, 3)]
    assert nubs == [2, 1], nubs
    return f"bounds hold on {len(CORPUS_1D)} slices, k<=8; Fibonacci Nub(2)=2, Nub(3)=1 ({within(t, 1.0)})"


def check_approximation():
    t = time.perf_counter()
    for name in CORPUS_1D:
        d = slice_of(name, 7)
        comp = complexity(d)
        for k in range(1, 7):
            path = debruijn.global_closed_path(debruijn.build_graph(d, k), "edge")
            word = debruijn.periodic_word_from_path(path)
            per = periodic_dictionary(PeriodicConfiguration(word.to_block()), k + 1)
            assert per.patterns(k + 1) == d.patterns(k + 1), (name, k)
            assert len(word) >= comp[k], (name, k, len(word), comp[k])
    return f"edge-cover words exact at length k+1 and period >= comp(k), {len(CORPUS_1D)} slices, k<=6 ({within(t, 5.0)})"


FIB_DISPLAY = "babaabaababaabaab" + "abaababaabaababaa"        # sites -17..16
TABLE_DISPLAY = ["acbacbac", "bbdacdbb", "ddbacbdd", "acdacdac",
                 "bacbbacb", "dacddacd", "acacacac", "bbbbbbbb"]   # S^3(b), top row first


def check_fixed_points():
    t = time.perf_counter()
    fib = corpus.substitution("fibonacci")
    fs = subst.fixed_seed(fib)
    assert (fs.seed.text(), fs.k) == ("aa", 2), (fs.seed.text(), fs.k)
    # the (a|a) point agrees with the display from the origin on
    right = subst.fixed_point_box(fib, fs.seed, 2, 0, 16)
    assert AB.decode(right) == FIB_DISPLAY[17:]
    # the whole display on [-17, 16] is the other k=2 point, grown from (b|a)
    ba = tile_of(fib, "ba")
    assert ba in fs.candidates
    assert AB.decode(subst.fixed_point_box(fib, ba, 2, -17, 16)) == FIB_DISPLAY

    table = corpus.substitution("table")
    u = tile_of(table, "ac/bb")
    assert u in subst.fixed_seed_candidates(table, 2)
    box = subst.fixed_point_box(table, u, 2, -4, 3)
    assert BlockPattern.from_array(table.alphabet, box).text().split("/") == TABLE_DISPLAY
    s3 = subst.iterate_array(table, np.array([[table.alphabet.index("b")]]), 3)
    assert BlockPattern.from_array(table.alphabet, s3).text().split("/") == TABLE_DISPLAY
    return ("Fibonacci seed (a|a), k=2, matches the display on [0,16]; full [-17,16] from (b|a); "
            f"table seed u, k=2, reproduces S^3(b) ({within(t, 1.0)})")


def check_two_dim_convergence():
    t = time.perf_counter()
    cases = [("table", "bd/db"), ("table", "ac/ca"), ("sierpinski", "ba/bb")]
    summary = []
    for name, start in cases:
        s = corpus.substitution(name)
        rows = subst.convergence_table(s, tile_of(s, start), 6, 4, n_min=4)
        for r in rows:
            assert r.containment == AGREE_TO_CAP, (name, start, r)
            if r.n >= 5:
                assert r.agreement >= 2, (name, start, r)
        summary.append(f"{name} {start}: agreement {[_level(r.agreement) for r in rows]}")
    return f"n=4..6 at cap 4: {'; '.join(summary)} ({within(t, 30.0)})"


def _level(x):
    return "inf" if x == AGREE_TO_CAP else x


def corpus_operators(max_period):
    spec = spectra.schroedinger_spec("a", 1.0)
    for name in ONE_DIM:
        s = corpus.substitution(name)
        start = subst.default_seed(s)
        spec_s = spectra.schroedinger_spec(s.alphabet.letters[0], 1.0)
        for n in range(1, 12):
            cfg = subst.periodic_approximant(s, start, n)
            if cfg.dims[0] > max_period:
                break
            yield f"{name} n={n}", spectra.sample(spec_s, cfg)
    for n in range(1, 64):
        cfg = PeriodicConfiguration(Word.parse(AB, "b" + "a" * n).to_block())
        yield f"one-defect n={n}", spectra.sample(spec, cfg)


def check_spectral_baselines():
    t = time.perf_counter()
    free = spectra.band_set(spectra.PeriodicJacobi(np.ones(1), np.zeros(1)))
    assert len(free) == 1 and np.allclose(free.intervals[0], (-2, 2), atol=1e-8)
    # Delta(E) = E(E - 2) - 2: Delta = 2 at 1 +- sqrt(5), Delta = -2 at 0 and 2
    imp = spectra.band_set(spectra.PeriodicJacobi(np.ones(2), np.array([2.0, 0.0])))
    roots = [(1 - math.sqrt(5), 0.0), (2.0, 1 + math.sqrt(5))]
    assert np.allclose(imp.intervals, roots, atol=1e-8), imp.intervals
    worst = (0.0, "")
    failures = []
    count = 0
    for label, j in corpus_operators(64):
        count += 1
        d = spectra.hausdorff(spectra.band_set(j), spectra.bloch_spectrum(j, phases=2048))
        worst = max(worst, (d, label))
        if d > 1e-3:
            failures.append(f"{label} (P={j.period}) d_H={d:.3e}")
    timing = within(t, 60.0)
    assert not failures, (
        f"{len(failures)} of {count} operators exceed 1e-3: {', '.join(failures)}. "
        "At 2048 uniform phases the sampled set cannot get closer than half its widest "
        "step, about max|dE/dtheta| * pi / 2048, which is above 1e-3 for the widest bands at P <= 2; "
        "band_set itself matches the exact Bloch edges to about 1e-11 on the same operators")
    return f"free and P=2 edges exact; {count} operators, worst d_H {worst[0]:.2e} ({worst[1]}) ({timing})"


def check_spectral_convergence():
    t = time.perf_counter()
    notes = []
    for name in ("fibonacci", "period-doubling"):
        s = corpus.substitution(name)
        spec = spectra.schroedinger_spec("a", 1.0)
        recs = spectra.substitution_convergence(s, spec, subst.default_seed(s), 8, cap=10)
        by_n = {r.n: r for r in recs}
        for n in range(4, 8):
            assert by_n[n].hausdorff_to_ref < 0.5, (name, n, by_n[n].hausdorff_to_ref)
        rows = [r for r in recs if r.n < 8]
        tail = [max(r.hausdorff_to_ref for r in rows[i:]) for i in range(len(rows))]
        prox = [r.proximity_index for r in rows]
        assert prox == sorted(prox), (name, prox)
        assert all(a >= b for a, b in zip(tail, tail[1:])), (name, tail)
        step = {n: spectra.hausdorff(by_n[n].bands, by_n[n + 1].bands) for n in range(1, 8)}
        for n in range(5, 8):
            assert step[n] < step[2], (name, n, step[n], step[2])
        notes.append(f"{name} d_H(n=4)={by_n[4].hausdorff_to_ref:.3f}")
    return f"{', '.join(notes)}; tail max falls as proximity rises ({within(t, 120.0)})"


def check_negative_control():
    t = time.perf_counter()
    rs = corpus.substitution("rudin-shapiro")
    legal = subst.substitution_dictionary(rs, 5)
    per = periodic_dictionary(PeriodicConfiguration(tile_of(rs, "DCABACDB")), 5)
    assert per.words(3) <= legal.words(3)
    assert "DCABA" in per.words(5) and "DCABA" not in legal.words(5)
    return f"length-3 factors legal, DCABA not in the dictionary ({within(t, 1.0)})"


def check_probes():
    t = time.perf_counter()
    rng = np.random.default_rng(2024)
    for _ in range(500):
        n = int(rng.integers(1, 9))
        lam = rng.uniform(-3, 3, n)
        x, r = rng.uniform(-3, 3), rng.uniform(0, 2)
        m = max(np.abs(lam - x).max() + rng.uniform(0, 1), r + 1e-3)
        assert probes.presence_probe(np.diag(lam), x, m, r) == bool(np.any(np.abs(lam - x) < r))
    for _ in range(500):
        n = int(rng.integers(1, 9))
        z = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        E = np.exp(1j * rng.uniform(0, 2 * np.pi))
        r = rng.uniform(0, 1.99)
        assert probes.unitary_probe(np.diag(z), E, r) == bool(np.any(np.abs(z - E) < r))
    a_n, a_inf = np.diag([-1.0, 0.0, 1.0]), np.diag([-1.0, 0.5, 1.0])
    sep = probes.p2_norm(a_n, 1, 0, -1) - probes.p2_norm(a_inf, 1, 0, -1)
    assert sep == 0.25, sep
    return f"500 + 500 random instances agree; separation {sep} ({within(t, 5.0)})"


CRITERIA = [
    (1, "complexity goldens", check_complexity),
    (2, "connectivity corpus", check_connectivity),
    (3, "branching bounds", check_branching),
    (4, "approximation exactness", check_approximation),
    (5, "substitution fixed points", check_fixed_points),
    (6, "2D convergence", check_two_dim_convergence),
    (7, "spectral baselines", check_spectral_baselines),
    (8, "spectral convergence", check_spectral_convergence),
    (9, "negative control", check_negative_control),
    (10, "probe equivalence", check_probes),
]


def run_criterion(number, title, check):
    try:
        detail = check()
    except AssertionError as exc:
        line = f"FAIL criterion {number} ({title}): {str(exc).splitlines()[0]}"
        RESULTS.append(line)
        print(line)
        raise
    line = f"PASS criterion {number} ({title}): {detail}"
    RESULTS.append(line)
    print(line)


@pytest.mark.parametrize("number,title,check", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, check):
    run_criterion(number, title, check)


if __name__ == "__main__":
    failed = 0
    for number, title, check in CRITERIA:
        try:
            run_criterion(number, title, check)
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
