"""Exact simplex: optimality, infeasibility certificates, duality, determinism."""

from __future__ import annotations

import random

import pytest

from delayedmarkets.lp import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LpProblem,
    check_dual,
    check_farkas,
    check_feasible,
    express_in_span,
    row_basis,
    solve,
)
from delayedmarkets.rationals import rat


class TestExamples:
    def test_one_variable_box(self):
        p = LpProblem(1, (rat(1),), lower_bounds=(rat(0),), upper_bounds=(rat(1),))
        out = solve(p)
        assert out.status == OPTIMAL
        assert out.solution == (rat(1),)
        assert out.objective == rat(1)

    def test_box_as_rows(self):
        p = LpProblem(
            1, (rat(1),),
            inequalities=(((rat(1),), rat(1)), ((rat(-1),), rat(0))),
        )
        out = solve(p)
        assert out.status == OPTIMAL and out.solution == (rat(1),)

    def test_contradictory_bounds_infeasible_with_certificate(self):
        p = LpProblem(
            1, (rat(1),),
            inequalities=(((rat(-1),), rat(-2)), ((rat(1),), rat(1))),  # x >= 2, x <= 1
        )
        out = solve(p)
        assert out.status == INFEASIBLE
        assert out.farkas is not None
        assert check_farkas(p, out.farkas)

    def test_binomial_martingale_system(self):
        # maximize eps:  q1 + q2 = 1,  2 q1 + (1/2) q2 = 1,  q_i >= eps >= 0
        p = LpProblem(
            3,
            (rat(0), rat(0), rat(1)),
            equalities=(
                ((rat(1), rat(1), rat(0)), rat(1)),
                ((rat(2), rat(1, 2), rat(0)), rat(1)),
            ),
            inequalities=(
                ((rat(-1), rat(0), rat(1)), rat(0)),
                ((rat(0), rat(-1), rat(1)), rat(0)),
            ),
            lower_bounds=(rat(0), rat(0), rat(0)),
        )
        out = solve(p)
        assert out.status == OPTIMAL
        assert out.objective == rat(1, 3)
        assert out.solution[:2] == (rat(1, 3), rat(2, 3))

    def test_unbounded(self):
        p = LpProblem(1, (rat(1),), lower_bounds=(rat(0),))
        assert solve(p).status == UNBOUNDED

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            LpProblem(2, (rat(1),))
        with pytest.raises(ValueError):
            LpProblem(1, (rat(1),), equalities=(((rat(1), rat(2)), rat(0)),))


class TestExactness:
    def test_optimal_solutions_resubstitute(self):
        for seed in range(40):
            p = random_problem(random.Random(f"resub:{seed}"))
            out = solve(p)
            if out.status == OPTIMAL:
                assert check_feasible(p, out.solution) == []
                value = sum(c * x for c, x in zip(p.objective, out.solution))
                assert value == out.objective

    def test_strong_duality_and_farkas_on_random_problems(self):
        statuses = {OPTIMAL: 0, INFEASIBLE: 0, UNBOUNDED: 0}
        seed = 0
        while statuses[OPTIMAL] < 100 or statuses[INFEASIBLE] < 20:
            assert seed < 500, "random generator failed to produce enough cases"
            p = random_problem(random.Random(f"dual:{seed}"))
            out = solve(p)
            statuses[out.status] += 1
            if out.status == OPTIMAL:
                assert check_dual(p, out), f"seed {seed}: duality gap"
            elif out.status == INFEASIBLE:
                assert check_farkas(p, out.farkas), f"seed {seed}: bad Farkas certificate"
            seed += 1

    def test_deterministic(self):
        p = random_problem(random.Random("det"))
        assert solve(p) == solve(p)

    def test_redundant_equalities_are_dropped_cleanly(self):
        # duplicated and linearly dependent rows exercise the
        # drive-out-artificials / drop-redundant-row path
        rng = random.Random("redundant")
        for _ in range(40):
            n = rng.randint(2, 4)
            base_rows = [
                tuple(rat(rng.randint(-3, 3)) for _ in range(n))
                for _ in range(rng.randint(1, 2))
            ]
            x_feasible = tuple(rat(rng.randint(0, 3)) for _ in range(n))
            equalities = []
            for row in base_rows:
                rhs = sum(c * v for c, v in zip(row, x_feasible))
                equalities.append((row, rhs))
                equalities.append((row, rhs))  # exact duplicate
            if len(base_rows) == 2:
                combo = tuple(a + b for a, b in zip(base_rows[0], base_rows[1]))
                equalities.append((combo, equalities[0][1] + equalities[2][1]))
            p = LpProblem(
                n,
                tuple(rat(rng.randint(-3, 3)) for _ in range(n)),
                equalities=tuple(equalities),
                lower_bounds=(rat(0),) * n,
                upper_bounds=(rat(5),) * n,
            )
            out = solve(p)
            assert out.status == OPTIMAL
            assert check_feasible(p, out.solution) == []
            assert check_dual(p, out)


def random_problem(rng: random.Random) -> LpProblem:
    n = rng.randint(1, 5)
    objective = tuple(rat(rng.randint(-5, 5)) for _ in range(n))
    equalities = []
    for _ in range(rng.randint(0, 2)):
        row = tuple(rat(rng.randint(-4, 4)) for _ in range(n))
        equalities.append((row, rat(rng.randint(-6, 6))))
    inequalities = []
    for _ in range(rng.randint(0, 4)):
        row = tuple(rat(rng.randint(-4, 4)) for _ in range(n))
        inequalities.append((row, rat(rng.randint(-4, 8))))
    lower = tuple(rat(0) if rng.random() < 0.7 else None for _ in range(n))
    upper = tuple(rat(rng.randint(1, 6)) if rng.random() < 0.5 else None for _ in range(n))
    return LpProblem(
        n, objective,
        equalities=tuple(equalities),
        inequalities=tuple(inequalities),
        lower_bounds=lower,
        upper_bounds=upper,
    )


class TestLinearAlgebra:
    def test_row_basis_spans_and_reduces(self):
        rows = [
            (rat(1), rat(2), rat(0)),
            (rat(2), rat(4), rat(0)),
            (rat(0), rat(0), rat(1)),
        ]
        basis = row_basis(rows)
        assert len(basis) == 2
        for r in rows:
            assert express_in_span(basis, r) is not None

    def test_express_in_span_finds_exact_combination(self):
        rng = random.Random("span")
        for _ in range(50):
            dim = rng.randint(1, 5)
            k = rng.randint(1, 4)
            vectors = [
                tuple(rat(rng.randint(-5, 5), rng.choice((1, 2, 3))) for _ in range(dim))
                for _ in range(k)
            ]
            coeffs = [rat(rng.randint(-4, 4), rng.choice((1, 2))) for _ in range(k)]
            target = tuple(
                sum(c * v[i] for c, v in zip(coeffs, vectors)) for i in range(dim)
            )
            found = express_in_span(vectors, target)
            assert found is not None
            rebuilt = tuple(
                sum(c * v[i] for c, v in zip(found, vectors)) for i in range(dim)
            )
            assert rebuilt == target

    def test_express_in_span_rejects_outsiders(self):
        vectors = [(rat(1), rat(0))]
        assert express_in_span(vectors, (rat(0), rat(1))) is None
