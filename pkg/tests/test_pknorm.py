import math

import numpy as np
import pytest

from conftest import random_measure, shortest_path_space
from pkr.errors import InvalidP, NegativeLambda, SpaceMismatch
from pkr.holder import HolderPair, conjugate_exponent, lp_combine
from pkr.lipschitz import ql_norm
from pkr.oracle import oracle_pk
from pkr.pknorm import (
    pareto_frontier,
    pk_dist,
    pk_norm,
    scalarized_min,
    trace_frontier,
)
from pkr.space import SignedMeasure, dirac, tv_norm, zero_measure
from pkr.transport import plan_cost, plan_divergence

PS = [1.0, 1.5, 2.0, 4.0, math.inf]


class TestHolderPair:
    def test_conjugates(self):
        assert conjugate_exponent(1.0) == math.inf
        assert conjugate_exponent(math.inf) == 1.0
        assert conjugate_exponent(2.0) == 2.0
        assert HolderPair.from_p(1.5).q == pytest.approx(3.0)

    def test_invalid(self):
        with pytest.raises(InvalidP):
            HolderPair.from_p(0.5)

    def test_lp_combine_inf_is_max(self):
        assert lp_combine(3.0, 4.0, math.inf) == 4.0
        assert lp_combine(3.0, 4.0, 2.0) == pytest.approx(5.0)
        assert lp_combine(1.0, 1.0, 1e6) == pytest.approx(1.0, rel=1e-4)


class TestScalarized:
    # two-point targets from minimizing t*d + 2*lam*(1-t) over t in [0, 1]
    def test_dipole_high_lambda_transports(self, two_point):
        mu = dirac(two_point, 0, 1) - dirac(two_point, 1, 1)
        sol = scalarized_min(two_point, mu, 1.0)
        assert (sol.a, sol.b) == (pytest.approx(1.0), pytest.approx(0.0))
        assert sol.objective == pytest.approx(1.0)
        assert np.allclose(sol.xi.weights, mu.weights)

    def test_dipole_low_lambda_annihilates(self, two_point):
        mu = dirac(two_point, 0, 1) - dirac(two_point, 1, 1)
        sol = scalarized_min(two_point, mu, 0.25)
        assert (sol.a, sol.b) == (pytest.approx(0.0), pytest.approx(2.0))
        assert sol.objective == pytest.approx(0.5)
        assert np.allclose(sol.xi.weights, 0.0)

    def test_net_charge_absorbed(self, two_point):
        sol = scalarized_min(two_point, dirac(two_point, 0, 1), 1.0)
        assert (sol.a, sol.b) == (pytest.approx(0.0), pytest.approx(1.0))
        assert sol.objective == pytest.approx(1.0)

    def test_negative_lambda(self, two_point):
        with pytest.raises(NegativeLambda):
            scalarized_min(two_point, dirac(two_point, 0, 1), -1.0)

    def test_witness_budget(self):
        rng = np.random.default_rng(21)
        for _ in range(25):
            sp = shortest_path_space(rng, int(rng.integers(2, 9)))
            mu = random_measure(rng, sp)
            lam = float(rng.uniform(0.0, sp.diameter))
            sol = scalarized_min(sp, mu, lam)
            f = sol.potentials
            assert float(np.abs(f).max()) <= lam + 1e-9
            for i in range(sp.n):
                for j in range(i + 1, sp.n):
                    assert abs(f[i] - f[j]) <= sp.dist[i, j] + 1e-9
            assert float(f @ mu.weights) == pytest.approx(
                sol.objective, rel=1e-9, abs=1e-9)
            # scalarized optimality against its own xi decomposition
            assert sol.objective <= lam * tv_norm(mu) + 1e-9

    def test_against_oracle_grid(self):
        # weighted-sum optimality via brute grid: scaling distances by 1/lam
        # turns KR + lam*TV into lam times the p=1 norm on the scaled space
        rng = np.random.default_rng(22)
        from pkr.space import FiniteMetricSpace
        for _ in range(10):
            sp = shortest_path_space(rng, 3)
            mu = random_measure(rng, sp)
            lam = float(rng.uniform(0.05, sp.diameter / 2))
            sol = scalarized_min(sp, mu, lam)
            scaled = FiniteMetricSpace(sp.labels, sp.dist / lam)
            val = oracle_pk(scaled, SignedMeasure(scaled, mu.weights), 1.0)
            assert lam * val == pytest.approx(sol.objective, abs=2e-3 * max(1, lam))


class TestFrontier:
    def test_two_point_dipole(self, two_point):
        mu = dirac(two_point, 0, 1) - dirac(two_point, 1, 1)
        rows = pareto_frontier(two_point, mu)
        assert rows[0] == (0.0, pytest.approx(0.0), pytest.approx(2.0))
        assert rows[-1] == (pytest.approx(0.5), pytest.approx(1.0), pytest.approx(0.0))

    def test_zero_measure(self, two_point):
        assert pareto_frontier(two_point, zero_measure(two_point)) == \
            [(0.0, 0.0, 0.0)]

    def test_pure_charge_is_flat(self, two_point):
        rows = pareto_frontier(two_point, dirac(two_point, 0, 1))
        assert all(a == pytest.approx(0.0) and b == pytest.approx(1.0)
                   for _, a, b in rows)

    def test_monotone(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            sp = shortest_path_space(rng, int(rng.integers(2, 10)))
            mu = random_measure(rng, sp)
            rows = pareto_frontier(sp, mu)
            lams = [r[0] for r in rows]
            assert lams == sorted(lams)
            assert all(rows[i][1] <= rows[i + 1][1] + 1e-12 for i in range(len(rows) - 1))
            assert all(rows[i][2] >= rows[i + 1][2] - 1e-12 for i in range(len(rows) - 1))
            assert 0.0 <= lams[0] and lams[-1] <= sp.diameter / 2 + 1e-12

    def test_max_points_cap(self):
        rng = np.random.default_rng(24)
        sp = shortest_path_space(rng, 12)
        mu = random_measure(rng, sp)
        rows = pareto_frontier(sp, mu, max_points=3)
        assert 2 <= len(rows) <= 3


class TestPkNorm:
    @pytest.mark.parametrize("d, p, want", [
        (1.0, 1.0, 1.0),
        (1.0, math.inf, 2.0 / 3.0),
        (1.0, 2.0, 2.0 / math.sqrt(5.0)),
        (3.0, 1.0, 2.0),
        (3.0, math.inf, 6.0 / 5.0),
        (3.0, 2.0, 6.0 / math.sqrt(13.0)),
    ])
    def test_two_point_closed_forms(self, d, p, want):
        from pkr.space import validate_space
        sp = validate_space(["x", "y"], [[0.0, d], [d, 0.0]])
        mu = dirac(sp, 0, 1) - dirac(sp, 1, 1)
        sol = pk_norm(sp, mu, p)
        assert sol.value == pytest.approx(want, rel=1e-9)
        assert sol.gap <= 1e-8 * max(1.0, sol.value)

    def test_annihilation_beats_transport(self):
        from pkr.space import validate_space
        sp = validate_space(["x", "y"], [[0.0, 3.0], [3.0, 0.0]])
        mu = dirac(sp, 0, 1) - dirac(sp, 1, 1)
        sol = pk_norm(sp, mu, 1.0)
        assert sol.value == pytest.approx(2.0)
        assert np.allclose(sol.xi.weights, 0.0)

    def test_p_infty_xi_fraction(self, two_point):
        mu = dirac(two_point, 0, 1) - dirac(two_point, 1, 1)
        sol = pk_norm(two_point, mu, math.inf)
        assert np.allclose(sol.xi.weights, [2.0 / 3.0, -2.0 / 3.0])

    def test_delta_for_all_p(self, two_point):
        for p in PS:
            sol = pk_norm(two_point, dirac(two_point, 0, 1), p)
            assert sol.value == pytest.approx(1.0, abs=1e-9)
            assert sol.gap <= 1e-9

    def test_zero_measure(self, two_point):
        sol = pk_norm(two_point, zero_measure(two_point), 2.0)
        assert sol.value == 0.0 and sol.gap == 0.0

    def test_invalid_p(self, two_point):
        with pytest.raises(InvalidP):
            pk_norm(two_point, dirac(two_point, 0, 1), 0.99)

    def test_reported_value_matches_artifacts(self):
        rng = np.random.default_rng(25)
        for _ in range(15):
            sp = shortest_path_space(rng, int(rng.integers(2, 9)))
            mu = random_measure(rng, sp)
            for p in PS:
                sol = pk_norm(sp, mu, p)
                assert sol.a == pytest.approx(plan_cost(sp, sol.plan), abs=1e-12)
                assert sol.b == pytest.approx(tv_norm(mu - sol.xi), abs=1e-12)
                assert sol.value == pytest.approx(lp_combine(sol.a, sol.b, p))
                drift = plan_divergence(sp, sol.plan) - sol.xi
                assert tv_norm(drift) <= 1e-9 * max(1.0, tv_norm(sol.xi))
                assert ql_norm(sp, sol.dual_f, sol.pair.q) <= 1.0 + 1e-9
                assert sol.gap >= -1e-9
                assert sol.gap <= 1e-8 * max(1.0, sol.value)

    def test_matches_small_oracle(self):
        rng = np.random.default_rng(26)
        for _ in range(8):
            sp = shortest_path_space(rng, 3)
            mu = random_measure(rng, sp)
            for p in PS:
                assert pk_norm(sp, mu, p).value == pytest.approx(
                    oracle_pk(sp, mu, p), abs=1e-3)

    def test_monotone_in_p(self):
        rng = np.random.default_rng(27)
        for _ in range(10):
            sp = shortest_path_space(rng, int(rng.integers(2, 8)))
            mu = random_measure(rng, sp)
            vals = [pk_norm(sp, mu, p).value for p in PS]
            for lo, hi in zip(vals, vals[1:]):
                assert hi <= lo + 1e-9

    def test_upper_bounds(self):
        from conftest import zero_charge_measure
        from pkr.transport import kr_norm
        rng = np.random.default_rng(28)
        for _ in range(10):
            sp = shortest_path_space(rng, int(rng.integers(2, 8)))
            mu = random_measure(rng, sp)
            for p in PS:
                assert pk_norm(sp, mu, p).value <= tv_norm(mu) + 1e-9
            xi = zero_charge_measure(rng, sp)
            kr = kr_norm(sp, xi).cost
            for p in PS:
                assert pk_norm(sp, xi, p).value <= kr + 1e-9

    def test_dipole_bounded_by_distance(self):
        rng = np.random.default_rng(29)
        for _ in range(10):
            sp = shortest_path_space(rng, 6)
            i, j = rng.choice(6, size=2, replace=False)
            mu = dirac(sp, int(i), 1.0) - dirac(sp, int(j), 1.0)
            for p in PS:
                assert pk_norm(sp, mu, p).value <= sp.dist[i, j] + 1e-9

    def test_reusing_traced_frontier(self):
        rng = np.random.default_rng(30)
        sp = shortest_path_space(rng, 8)
        mu = random_measure(rng, sp)
        probes = trace_frontier(sp, mu)
        for p in PS:
            direct = pk_norm(sp, mu, p)
            shared = pk_norm(sp, mu, p, probes=probes)
            assert shared.value == pytest.approx(direct.value, rel=1e-12)


class TestPkDist:
    def test_identical_measures(self, line3):
        m = dirac(line3, 1, 1.0)
        assert pk_dist(line3, m, m, 2.0).value == 0.0

    def test_fortet_mourier_point_masses(self, two_point):
        a, b = dirac(two_point, 0, 1.0), dirac(two_point, 1, 1.0)
        assert pk_dist(two_point, a, b, math.inf).value == pytest.approx(2.0 / 3.0)
        assert pk_dist(two_point, a, b, 1.0).value == pytest.approx(1.0)

    def test_space_mismatch(self, two_point, line3):
        with pytest.raises(SpaceMismatch):
            pk_dist(two_point, dirac(two_point, 0, 1), dirac(line3, 0, 1), 2.0)
