import math

import numpy as np
import pytest

from oracles import radial_fd
from singpot.discretize import build_grid, checkerboard, laplacian
from singpot.elliptic import (
    EllipticProblem,
    SolutionField,
    smooth_bump,
    solve_elliptic,
    solve_mollified_sequence,
    weak_residual,
)

# u(r) of the radial problem with u(1) = 1, from radial_fd at 1e5 nodes
RADIAL_ORACLE = {
    (3, 1.0): {0.05: 0.1570070826268275, 0.1: 0.24097168353029885,
               0.25: 0.4245281199182965, 0.5: 0.651558224657316},
    (3, 2.0): {0.05: 0.05000000000185644, 0.1: 0.10000000000281888,
               0.25: 0.24999999999300312, 0.5: 0.49999999995267846},
    (4, 1.0): {0.05: 0.28913171476691213, 0.1: 0.38528884727989593,
               0.25: 0.5631428654136097, 0.5: 0.7504284546853411},
}


@pytest.fixture(scope="module")
def golden_3d():
    grid = build_grid(3, [25] * 3, 0.7)
    prob = EllipticProblem(grid, 1.0)
    return prob, solve_elliptic(prob)


def test_oracle_frozen_values():
    r, u = radial_fd(3, 1.0)
    for x, v in RADIAL_ORACLE[(3, 1.0)].items():
        assert u[int(round(x * 100_000))] == pytest.approx(v, rel=1e-14)


@pytest.mark.parametrize("d,A", sorted(RADIAL_ORACLE))
def test_radial_solver_matches_oracle(d, A):
    grid = build_grid(1, [2001], 0.5, geometry="radial", d=d)
    sol = solve_elliptic(EllipticProblem(grid, A), method="direct")
    r = grid.axes[0]
    for x, v in RADIAL_ORACLE[(d, A)].items():
        assert np.interp(x, r, sol.values) == pytest.approx(v, abs=2e-6)


def test_exact_alpha_one_3d():
    errs = []
    for n in (17, 33):
        grid = build_grid(3, [n] * 3, 0.7)
        sol = solve_elliptic(EllipticProblem(grid, 2.0))
        errs.append(sol.max_error(grid.radius))
    assert errs[1] < 5e-3
    assert math.log2(errs[0] / errs[1]) >= 1.8


def test_golden_3d_against_oracle(golden_3d):
    prob, sol = golden_3d
    g = prob.grid
    for x, v in RADIAL_ORACLE[(3, 1.0)].items():
        i = int(np.argmin(np.abs(g.radius - x) + 10 * g.boundary))
        exact = v * (g.radius[i] / x) ** ((math.sqrt(5) - 1) / 2)
        assert sol.values[i] == pytest.approx(exact, abs=2e-2)


def test_zero_boundary_gives_zero():
    grid = build_grid(3, [13] * 3, 0.5)
    sol = solve_elliptic(EllipticProblem(grid, 1.0, boundary=lambda x: np.zeros(len(x))))
    assert not np.any(sol.values)


def test_nonnegative_data_nonnegative_solution():
    grid = build_grid(3, [17] * 3, 0.5)
    prob = EllipticProblem(grid, 1.0, coeffs=checkerboard(1.0, 4.0),
                           boundary=lambda x: 1.0 + x[:, 0] ** 2)
    sol = solve_elliptic(prob)
    assert sol.values.min() >= 0.0


def test_direct_and_cg_agree(golden_3d):
    prob, sol = golden_3d
    direct = solve_elliptic(prob, method="direct")
    assert np.abs(direct.values - sol.values).max() < 1e-8


def test_problem_validation():
    grid = build_grid(3, [9] * 3, 0.0)
    with pytest.raises(ValueError):
        EllipticProblem(grid, 0.0)
    with pytest.raises(ValueError):
        EllipticProblem(grid, -1.0, boundary=lambda x: np.ones(len(x)))


class TestMollifiedSequence:
    def test_golden_distances_shrink(self):
        grid = build_grid(3, [21] * 3, 0.7)
        res = solve_mollified_sequence(EllipticProblem(grid, 1.0), [4, 8, 16, 32])
        d = res.distances
        assert len(d) == 3
        assert all(b < 2 * a for a, b in zip(d, d[1:]))
        assert res.accepted_field is res.fields[-1]
        assert all(np.isfinite(res.energies))

    def test_potential_free_levels_identical(self):
        grid = build_grid(3, [13] * 3, 0.5)
        prob = EllipticProblem(grid, 0.0, boundary=lambda x: 1.0 + x[:, 2])
        res = solve_mollified_sequence(prob, [1, 10, 100], stop_rtol=0.0)
        assert max(res.distances) < 1e-9

    def test_single_level(self):
        grid = build_grid(3, [9] * 3, 0.0)
        res = solve_mollified_sequence(EllipticProblem(grid, 1.0), [8])
        assert res.distances == [] and len(res.fields) == 1

    def test_rejects_unsorted_levels(self):
        grid = build_grid(3, [9] * 3, 0.0)
        with pytest.raises(ValueError):
            solve_mollified_sequence(EllipticProblem(grid, 1.0), [8, 4])

    def test_csv(self, tmp_path):
        grid = build_grid(3, [9] * 3, 0.0)
        res = solve_mollified_sequence(EllipticProblem(grid, 1.0), [2, 4])
        p = tmp_path / "c.csv"
        res.write_csv(p)
        lines = p.read_text().splitlines()
        assert lines[0] == "k,l2_distance,energy" and len(lines) == 3
        assert lines[1].split(",")[1] == "nan"


class TestWeakResidual:
    def test_discrete_solution(self, golden_3d):
        prob, sol = golden_3d
        psi = smooth_bump([0.3, 0.1, 0.0], 0.2)
        assert abs(weak_residual(sol, prob, psi)) < 1e-9

    def test_exact_solution_second_order(self):
        vals = []
        for n in (33, 65):
            grid = build_grid(3, [n] * 3, 0.0)
            prob = EllipticProblem(grid, 1.0)
            exact = SolutionField(grid, prob.special_solution(grid.radius))
            vals.append(weak_residual(exact, prob, smooth_bump([0.3, 0.1, 0.05], 0.25)))
        assert 1.7 <= math.log2(abs(vals[0] / vals[1])) <= 2.3

    def test_linear_in_noise(self, golden_3d):
        prob, sol = golden_3d
        g = prob.grid
        noise = np.random.default_rng(1).normal(size=g.size) * ~g.boundary
        psi = smooth_bump([0.2, -0.1, 0.1], 0.25)
        r1 = weak_residual(SolutionField(g, sol.values + 1e-3 * noise), prob, psi)
        r2 = weak_residual(SolutionField(g, sol.values + 2e-3 * noise), prob, psi)
        base = weak_residual(sol, prob, psi)
        assert r2 - base == pytest.approx(2 * (r1 - base), rel=1e-6)

    def test_rejects_boundary_support(self, golden_3d):
        prob, sol = golden_3d
        with pytest.raises(ValueError):
            weak_residual(sol, prob, np.ones(prob.grid.size))
