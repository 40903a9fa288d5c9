import math

import numpy as np
import pytest

from aperiodic import probes, spectra
from aperiodic.errors import InvalidArgument, PreconditionViolation

A_N = np.diag([-1.0, 0.0, 1.0])
A_INF = np.diag([-1.0, 0.5, 1.0])


def random_presence(rng):
    n = int(rng.integers(1, 9))
    lam = rng.uniform(-3, 3, n)
    x = rng.uniform(-3, 3)
    r = rng.uniform(0, 2)
    m = np.abs(lam - x).max() + rng.uniform(0, 2)
    m = max(m, r + 1e-3)
    truth = bool(np.any(np.abs(lam - x) < r))
    return np.diag(lam), x, m, r, truth


def random_unitary(rng):
    n = int(rng.integers(1, 9))
    U = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, n)))
    E = np.exp(1j * rng.uniform(0, 2 * np.pi))
    r = rng.uniform(0, 1.99)
    truth = bool(np.any(np.abs(np.diag(U) - E) < r))
    return U, E, r, truth


class TestPresence:
    def test_examples(self):
        assert probes.presence_probe(A_N, 0.0, 2.0, 0.5)
        assert not probes.presence_probe(np.diag([-1.0, 1.0]), 0.0, 2.0, 0.5)

    def test_pol2_pair(self):
        assert probes.presence_probe(A_N, 0.0, 2.0, 0.25)
        assert not probes.presence_probe(A_INF, 0.0, 2.0, 0.25)

    def test_random_agreement(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            A, x, m, r, truth = random_presence(rng)
            assert probes.presence_probe(A, x, m, r) == truth

    def test_monotone_in_radius(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            A, x, m, _, _ = random_presence(rng)
            radii = np.linspace(0, m * 0.99, 40)
            vals = [probes.presence_probe(A, x, m, r) for r in radii]
            assert vals == sorted(vals)

    def test_non_diagonal(self):
        rng = np.random.default_rng(2)
        Q, _ = np.linalg.qr(rng.normal(size=(5, 5)))
        lam = np.array([-2.0, -0.7, 0.1, 1.3, 2.2])
        A = Q @ np.diag(lam) @ Q.T
        A = 0.5 * (A + A.T)
        assert probes.presence_probe(A, 0.0, 3.0, 0.2)
        assert not probes.presence_probe(A, 0.6, 3.0, 0.2)

    def test_preconditions(self):
        with pytest.raises(PreconditionViolation):
            probes.presence_probe(A_N, 0.0, 0.5, 0.25)
        with pytest.raises(InvalidArgument):
            probes.presence_probe(A_N, 0.0, 2.0, 2.0)
        with pytest.raises(InvalidArgument):
            probes.presence_probe(np.array([[0.0, 1.0], [0.0, 0.0]]), 0.0, 2.0, 0.5)


class TestUnitary:
    def test_examples(self):
        assert probes.unitary_probe(np.eye(1), 1.0, 0.5)
        assert not probes.unitary_probe(np.diag([1j, -1j]), 1.0, 1.0)

    def test_random_agreement(self):
        rng = np.random.default_rng(13)
        for _ in range(500):
            U, E, r, truth = random_unitary(rng)
            assert probes.unitary_probe(U, E, r) == truth

    def test_bloch_phase_matrix(self):
        # a unitary built from a Bloch matrix at theta = pi/3; compare with its eigenphases
        j = spectra.PeriodicJacobi(np.array([1.0, 0.7, 1.3]), np.array([0.2, -0.4, 0.9]))
        H = spectra.bloch_matrix(j, math.pi / 3)
        w, V = np.linalg.eigh(H)
        U = V @ np.diag(np.exp(1j * w)) @ V.conj().T
        for phi in np.linspace(0, 2 * np.pi, 25):
            E = np.exp(1j * phi)
            assert probes.unitary_probe(U, E, 0.5) == bool(np.any(np.abs(np.exp(1j * w) - E) < 0.5))

    def test_preconditions(self):
        with pytest.raises(InvalidArgument):
            probes.unitary_probe(np.eye(2), 1.1, 0.5)
        with pytest.raises(InvalidArgument):
            probes.unitary_probe(np.eye(2), 1.0, 2.0)
        with pytest.raises(InvalidArgument):
            probes.unitary_probe(2 * np.eye(2), 1.0, 0.5)


class TestPolynomialNorms:
    def test_pol2_values(self):
        assert probes.p2_norm(A_N, 1, 0, -1) == 1.0
        assert probes.p2_norm(A_INF, 1, 0, -1) == 0.75
        assert probes.p2_norm(A_N, 1, 0, -1) - probes.p2_norm(A_INF, 1, 0, -1) == 0.25
        assert probes.p2_norm(A_N, 0, 0, 0) == 0.0

    def test_degree_one_norms_coincide(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            p0, p1 = rng.normal(size=2)
            a = probes.p2_norm(A_N, p0, p1, 0)
            b = probes.p2_norm(A_INF, p0, p1, 0)
            assert a == pytest.approx(b, abs=1e-15)
            assert a == pytest.approx(max(abs(p1 + p0), abs(-p1 + p0)), abs=1e-15)
