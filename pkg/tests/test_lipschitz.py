import math

import numpy as np
import pytest

from conftest import random_measure, shortest_path_space
from pkr.errors import InvalidQ, SpaceMismatch
from pkr.holder import lp_combine
from pkr.lipschitz import (
    LipschitzFunction,
    dual_solve,
    lip_const,
    lip_product,
    pairing,
    ql_norm,
    sup_norm,
)
from pkr.pknorm import pk_norm
from pkr.space import SignedMeasure, dirac, validate_space, zero_measure

QS = [1.0, 2.0, math.inf]


def fn(space, vals):
    return LipschitzFunction(space, np.array(vals, dtype=float))


class TestNorms:
    def test_lip_const_basic(self, two_point, line3):
        assert lip_const(two_point, fn(two_point, [1, 0])) == 1.0
        assert lip_const(line3, fn(line3, [5, 5, 5])) == 0.0
        assert lip_const(line3, fn(line3, [0, 1, 2])) == 1.0

    def test_lip_const_singleton(self):
        s1 = validate_space(["a"], [[0.0]])
        assert lip_const(s1, fn(s1, [3.0])) == 0.0

    def test_ql_norm(self, two_point):
        f = fn(two_point, [1, 0])
        assert ql_norm(two_point, f, 2.0) == pytest.approx(math.sqrt(2.0))
        assert ql_norm(two_point, f, math.inf) == 1.0
        assert ql_norm(two_point, fn(two_point, [4, 4]), 7.0) == 4.0

    def test_invalid_q(self, two_point):
        with pytest.raises(InvalidQ):
            ql_norm(two_point, fn(two_point, [1, 0]), 0.5)

    def test_ql_separation(self):
        rng = np.random.default_rng(31)
        for _ in range(30):
            sp = shortest_path_space(rng, int(rng.integers(1, 7)))
            f = fn(sp, rng.uniform(-2, 2, sp.n))
            for q in QS:
                assert ql_norm(sp, f, q) >= sup_norm(f) - 1e-12
                if np.any(f.values != 0):
                    assert ql_norm(sp, f, q) > 0

    def test_q_sandwich(self):
        rng = np.random.default_rng(32)
        qs = [1.0, 1.5, 2.0, 4.0, math.inf]
        for _ in range(20):
            sp = shortest_path_space(rng, int(rng.integers(2, 7)))
            f = fn(sp, rng.uniform(-2, 2, sp.n))
            vals = [ql_norm(sp, f, q) for q in qs]
            for i in range(len(qs)):
                for j in range(i + 1, len(qs)):
                    inv1 = 0.0 if math.isinf(qs[i]) else 1.0 / qs[i]
                    inv2 = 0.0 if math.isinf(qs[j]) else 1.0 / qs[j]
                    c = 2.0 ** (inv1 - inv2)
                    assert vals[j] <= vals[i] + 1e-12
                    assert vals[i] <= c * vals[j] + 1e-12


class TestPairing:
    def test_examples(self, two_point):
        mu = SignedMeasure(two_point, np.array([1.0, -1.0]))
        assert pairing(fn(two_point, [1, 0]), mu) == 1.0
        assert pairing(fn(two_point, [1, 1]), mu) == 0.0
        assert pairing(fn(two_point, [0, 0]), mu) == 0.0

    def test_constant_pairs_to_charge(self):
        rng = np.random.default_rng(33)
        sp = shortest_path_space(rng, 5)
        mu = random_measure(rng, sp)
        from pkr.space import total_charge
        assert pairing(fn(sp, np.ones(5)), mu) == pytest.approx(total_charge(mu))

    def test_space_mismatch(self, two_point, line3):
        with pytest.raises(SpaceMismatch):
            pairing(fn(two_point, [1, 0]), dirac(line3, 0, 1.0))


class TestProduct:
    def test_unit(self, line3):
        g = fn(line3, [1.0, -2.0, 0.5])
        assert np.allclose(lip_product(fn(line3, [1, 1, 1]), g).values, g.values)

    def test_disjoint_supports(self, two_point):
        out = lip_product(fn(two_point, [1, 0]), fn(two_point, [0, 1]))
        assert list(out.values) == [0.0, 0.0]

    def test_algebra_bound(self):
        rng = np.random.default_rng(34)
        for _ in range(100):
            sp = shortest_path_space(rng, int(rng.integers(2, 7)))
            f = fn(sp, rng.uniform(-2, 2, sp.n))
            g = fn(sp, rng.uniform(-2, 2, sp.n))
            for q in QS:
                inv_q = 0.0 if math.isinf(q) else 1.0 / q
                bound = 2.0 ** (1.0 + inv_q) * ql_norm(sp, f, q) * ql_norm(sp, g, q)
                assert ql_norm(sp, lip_product(f, g), q) <= bound + 1e-9


class TestDualSolve:
    def test_dipole_q_inf(self, two_point):
        mu = SignedMeasure(two_point, np.array([1.0, -1.0]))
        sol = dual_solve(two_point, mu, math.inf)
        assert sol.value == pytest.approx(1.0)
        assert float(sol.f.values[0] - sol.f.values[1]) == pytest.approx(1.0)

    def test_dipole_q_one(self, two_point):
        mu = SignedMeasure(two_point, np.array([1.0, -1.0]))
        sol = dual_solve(two_point, mu, 1.0)
        assert sol.value == pytest.approx(2.0 / 3.0, rel=1e-9)
        assert np.allclose(sol.f.values, [1.0 / 3.0, -1.0 / 3.0], atol=1e-9)
        s, m = sol.active_budget
        assert s == pytest.approx(2.0 / 3.0, abs=1e-9)
        assert m == pytest.approx(1.0 / 3.0, abs=1e-9)

    def test_zero_measure(self, two_point):
        sol = dual_solve(two_point, zero_measure(two_point), 2.0)
        assert sol.value == 0.0 and list(sol.f.values) == [0.0, 0.0]

    def test_budget_feasible_and_value_exact(self):
        rng = np.random.default_rng(35)
        for _ in range(25):
            sp = shortest_path_space(rng, int(rng.integers(2, 10)))
            mu = random_measure(rng, sp)
            for q in [1.0, 1.5, 2.0, 4.0, math.inf]:
                sol = dual_solve(sp, mu, q)
                s, m = sol.active_budget
                assert lp_combine(s, m, q) <= 1.0 + 1e-9
                assert lip_const(sp, sol.f) <= s + 1e-9
                assert sup_norm(sol.f) <= m + 1e-9
                assert pairing(sol.f, mu) == pytest.approx(sol.value, abs=1e-12)

    def test_strong_duality_against_primal(self):
        rng = np.random.default_rng(36)
        pairs = [(1.0, math.inf), (1.5, 3.0), (2.0, 2.0), (4.0, 4.0 / 3.0),
                 (math.inf, 1.0)]
        for _ in range(15):
            sp = shortest_path_space(rng, int(rng.integers(2, 9)))
            mu = random_measure(rng, sp)
            for p, q in pairs:
                primal = pk_norm(sp, mu, p).value
                dual = dual_solve(sp, mu, q).value
                assert abs(primal - dual) <= 1e-6 * max(1.0, primal)


class TestHolderInequality:
    def test_random_triples(self):
        rng = np.random.default_rng(37)
        for _ in range(60):
            sp = shortest_path_space(rng, int(rng.integers(2, 7)))
            mu = random_measure(rng, sp)
            f = fn(sp, rng.uniform(-2, 2, sp.n))
            for p in [1.0, 1.5, 2.0, 4.0, math.inf]:
                q = 1.0 if math.isinf(p) else (math.inf if p == 1.0 else p / (p - 1.0))
                lhs = abs(pairing(f, mu))
                rhs = pk_norm(sp, mu, p).value * ql_norm(sp, f, q)
                assert lhs <= rhs + 1e-9
