import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from singpot.discretize import (
    AssemblyError,
    MollifiedPotential,
    NonConvergenceError,
    assemble_operator,
    build_grid,
    cg_solve,
    checkerboard,
    coefficient_preset,
    constant,
    is_m_matrix_rows,
    laplacian,
    mollified_potential_value,
    read_field,
    read_matrix_triplets,
    rotated_anisotropic,
    smooth_isotropic,
    write_field,
    write_matrix_triplets,
)


def laplacian_1d(n):
    h = 1.0 / (n - 1)
    main = np.full(n, 2.0) / h ** 2
    off = np.full(n - 1, -1.0) / h ** 2
    return sp.diags([off, main, off], [-1, 0, 1], format="csr")


class TestGrid:
    def test_uniform_radial(self):
        g = build_grid(1, [101], 0.0, geometry="radial")
        h = np.diff(g.axes[0])
        assert np.allclose(h, 0.01)
        assert g.boundary[0] and g.boundary[-1] and not g.boundary[1:-1].any()

    def test_graded_box_min_spacing(self):
        g = build_grid(2, [65, 65], 0.5, ball_radius=None)
        assert min(np.diff(ax).min() for ax in g.axes) < 1 / 64

    def test_node_count(self):
        assert build_grid(3, [33, 33, 33], 0.0).size == 35937

    def test_node_budget(self):
        with pytest.raises(ValueError, match="budget"):
            build_grid(3, [200, 200, 200], 0.0)

    @pytest.mark.parametrize("counts,grading", [([2, 5], 0.0), ([5, 5], 1.0), ([5, 5], -0.1)])
    def test_rejects_bad_arguments(self, counts, grading):
        with pytest.raises(ValueError):
            build_grid(2, counts, grading)

    @pytest.mark.parametrize("n,gamma", [(33, 0.0), (64, 0.5), (49, 0.7)])
    def test_origin_never_a_node(self, n, gamma):
        g = build_grid(3, [n] * 3, gamma)
        assert g.radius.min() > 0
        assert np.all(g.boundary[g.radius >= 1.0])

    @pytest.mark.parametrize("n", [33, 65, 129])
    def test_grading_ratio(self, n):
        gamma = 0.5
        uni = build_grid(2, [n, n], 0.0, ball_radius=None)
        gr = build_grid(2, [n, n], gamma, ball_radius=None)
        ratio = np.abs(gr.axes[0]).min() / np.abs(uni.axes[0]).min()
        expected = (1.0 / n) ** (gamma / (1 - gamma))
        assert 0.2 * expected < ratio < 5 * expected

    @settings(max_examples=25, deadline=None)
    @given(st.integers(5, 40), st.floats(0.0, 0.8))
    def test_axes_strictly_monotone(self, n, gamma):
        g = build_grid(2, [n, n], gamma)
        for ax in g.axes:
            assert np.all(np.diff(ax) > 0)
        assert np.any(~g.boundary)

    def test_volumes_sum_to_ball(self):
        g = build_grid(2, [257, 257], 0.0, geometry="axisymmetric")
        inside = g.radius < 1.0
        assert g.volumes[inside].sum() == pytest.approx(4 * math.pi / 3, rel=2e-2)
        rad = build_grid(1, [1001], 0.0, geometry="radial", d=3)
        assert rad.volumes.sum() == pytest.approx(4 * math.pi / 3, rel=1e-12)

    def test_outer_neighbors(self):
        g = build_grid(2, [21, 21], 0.0, ball_radius=None)
        s = g.ball(0.3)
        ring = g.outer_neighbors(s)
        assert not np.any(ring & s)
        assert np.all(g.radius[ring] >= 0.3)


class TestPotential:
    @pytest.mark.parametrize("A,beta,k,x,expected", [
        (1.0, 0.0, math.inf, [0.5, 0.0, 0.0], 4.0),
        (1.0, 0.0, 1.0, [0.0, 0.0, 0.0], 1.0),
        (2.0, 1.0, math.inf, 0.5, 16.0),
    ])
    def test_examples(self, A, beta, k, x, expected):
        assert mollified_potential_value(MollifiedPotential(A, beta, k), x) == pytest.approx(expected)

    def test_infinite_at_origin(self):
        assert mollified_potential_value(MollifiedPotential(1.0), [0.0, 0.0, 0.0]) == math.inf

    @settings(max_examples=60)
    @given(st.floats(0.0, 10.0), st.floats(0.0, 2.0), st.floats(0.0, 2.0),
           st.floats(0.1, 1e3), st.floats(1.0, 100.0))
    def test_nonnegative_and_monotone_in_k(self, A, beta, r, k, factor):
        lo = MollifiedPotential(A, beta, k).value(r)
        hi = MollifiedPotential(A, beta, k * factor).value(r)
        top = MollifiedPotential(A, beta).value(r)
        assert 0 <= lo <= hi * (1 + 1e-14)
        assert hi <= top * (1 + 1e-14)


class TestCoefficients:
    @pytest.mark.parametrize("coeffs", [laplacian(), constant(2.5), checkerboard(1.0, 4.0),
                                        smooth_isotropic(0.5, 3.0), rotated_anisotropic(1.0, 4.0)])
    def test_ellipticity(self, coeffs):
        x = np.random.default_rng(0).uniform(-1, 1, size=(200, 3))
        assert coeffs.check_ellipticity(x)

    def test_checkerboard_values(self):
        cb = checkerboard(1.0, 4.0)
        vals = cb.diagonal(np.array([[0.1, 0.1, 0.1], [0.3, 0.1, 0.1], [-0.1, 0.1, 0.1]]))[:, 0]
        assert list(vals) == [1.0, 4.0, 4.0]

    def test_unknown_preset(self):
        with pytest.raises(ValueError):
            coefficient_preset("nope")

    def test_bounds_validated(self):
        with pytest.raises(ValueError):
            constant(0.0)


class TestAssembly:
    def test_standard_stencil_1d(self):
        n = 11
        g = build_grid(1, [n], 0.0)
        m = assemble_operator(g, laplacian(), None).matrix.toarray()
        h = 0.1
        assert np.allclose(m[5, 4:7], [-1 / h ** 2, 2 / h ** 2, -1 / h ** 2])
        assert m[0, 0] == 1.0 and np.count_nonzero(m[0]) == 1

    def test_no_stored_zeros(self):
        g = build_grid(2, [17, 17], 0.3)
        m = assemble_operator(g, laplacian(), MollifiedPotential(1.0)).matrix
        assert np.all(m.data != 0)

    def test_mollified_diagonal_shift(self):
        g = build_grid(3, [9, 9, 9], 0.0)
        base = assemble_operator(g, laplacian(), None).matrix.diagonal()
        pot = assemble_operator(g, laplacian(), MollifiedPotential(1.0, 0.0, 10.0)).matrix.diagonal()
        ii = ~g.boundary
        assert np.allclose(pot[ii] - base[ii], 1.0 / (g.radius[ii] ** 2 + 0.01), rtol=1e-12)
        assert np.array_equal(pot[~ii], base[~ii])

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_quadratic_consistency(self, dim):
        g = build_grid(dim, [9] * dim, 0.0, ball_radius=None)
        u = np.sum(g.coords ** 2, axis=1)
        lu = assemble_operator(g, laplacian(), None).apply(u)
        assert np.allclose(lu[~g.boundary], -2.0 * dim, atol=1e-10)

    def test_symmetric_stiffness(self):
        g = build_grid(3, [13, 13, 13], 0.5)
        k = assemble_operator(g, checkerboard(1.0, 4.0), MollifiedPotential(1.0)).stiffness
        assert abs(k - k.T).max() <= 1e-12 * abs(k).max()

    @pytest.mark.parametrize("coeffs", [laplacian(), checkerboard(1.0, 4.0),
                                        smooth_isotropic(1.0, 4.0)])
    def test_m_matrix(self, coeffs):
        g = build_grid(3, [17, 17, 17], 0.5)
        op = assemble_operator(g, coeffs, MollifiedPotential(1.0))
        ok, worst_off, dominance = is_m_matrix_rows(op.matrix, op.interior_index)
        assert ok and worst_off < 0 and dominance >= 0

    def test_anisotropic_needs_cartesian(self):
        g = build_grid(2, [9, 9], 0.0, geometry="axisymmetric")
        with pytest.raises(AssemblyError):
            assemble_operator(g, rotated_anisotropic(1.0, 4.0), None)

    def test_anisotropic_energy_positive(self):
        g = build_grid(2, [15, 15], 0.0)
        op = assemble_operator(g, rotated_anisotropic(1.0, 4.0), None)
        kii, _ = op.reduced
        assert np.linalg.eigvalsh(kii.toarray()).min() > 0

    def test_axisymmetric_matches_radial_solution(self):
        # u = r^2 solves -Laplace(u) = -6 in 3-D
        g = build_grid(2, [33, 33], 0.0, geometry="axisymmetric")
        u = g.radius ** 2
        lu = assemble_operator(g, laplacian(), None).apply(u)
        assert np.allclose(lu[~g.boundary], -6.0, atol=1e-9)


class TestTextIO:
    def test_matrix_round_trip(self, tmp_path):
        g = build_grid(2, [9, 9], 0.3)
        m = assemble_operator(g, checkerboard(1.0, 4.0), MollifiedPotential(1.0)).matrix
        p = tmp_path / "m.txt"
        write_matrix_triplets(p, m)
        back = read_matrix_triplets(p)
        assert (back != m).nnz == 0
        assert p.read_text().splitlines()[0] == f"# {m.shape[0]} {m.shape[1]} {m.nnz}"

    def test_field_round_trip(self, tmp_path):
        g = build_grid(3, [5, 5, 5], 0.0)
        vals = np.random.default_rng(3).normal(size=g.size)
        p = tmp_path / "f.txt"
        write_field(p, g.coords, vals)
        coords, back = read_field(p)
        assert np.array_equal(coords, g.coords) and np.array_equal(back, vals)


class TestCG:
    def test_identity_one_iteration(self):
        b = np.arange(1.0, 6.0)
        res = cg_solve(sp.identity(5, format="csr"), b)
        assert res.iterations == 1 and np.allclose(res.x, b)

    def test_zero_rhs(self):
        res = cg_solve(laplacian_1d(10), np.zeros(10))
        assert res.iterations == 0 and not res.x.any()

    def test_sine_eigenfunction(self):
        errs = []
        for n in (33, 65):
            x = np.linspace(0, 1, n)
            a = laplacian_1d(n)[1:-1, 1:-1]
            f = np.sin(np.pi * x[1:-1])
            res = cg_solve(a, f, tol=1e-13)
            errs.append(np.abs(res.x - f / np.pi ** 2).max())
        assert errs[0] < 1e-3
        assert math.log2(errs[0] / errs[1]) == pytest.approx(2.0, abs=0.1)

    def test_energy_monotone(self):
        g = build_grid(2, [33, 33], 0.5)
        kii, kib = assemble_operator(g, checkerboard(1.0, 4.0), MollifiedPotential(1.0)).reduced
        res = cg_solve(kii, -kib @ np.ones(kib.shape[1]), tol=1e-12)
        assert np.all(np.diff(res.energies) <= 1e-12 * abs(res.energies[-1]))
        assert res.residual <= 1e-12 * np.linalg.norm(kib @ np.ones(kib.shape[1]))

    @pytest.mark.parametrize("geometry,gamma", [("cartesian", 0.0), ("axisymmetric", 0.0),
                                                ("cartesian", 0.3)])
    def test_singular_2d_budget(self, geometry, gamma):
        n = 65
        g = build_grid(2, [n, n], gamma, geometry=geometry)
        kii, kib = assemble_operator(g, laplacian(), MollifiedPotential(1.0)).reduced
        res = cg_solve(kii, -kib @ np.ones(kib.shape[1]), tol=1e-10)
        assert res.iterations < 5 * n

    def test_nonconvergence_carries_history(self):
        a = laplacian_1d(200)[1:-1, 1:-1]
        with pytest.raises(NonConvergenceError) as info:
            cg_solve(a, np.ones(198), tol=1e-14, max_iter=5, preconditioner=None)
        # initial residual plus one entry per iteration
        assert len(info.value.residuals) == 6
        assert info.value.best.shape == (198,)

    @settings(max_examples=20, deadline=None)
    @given(st.integers(2, 30), st.integers(0, 10_000))
    def test_random_spd(self, n, seed):
        rng = np.random.default_rng(seed)
        q = rng.normal(size=(n, n))
        a = q @ q.T + n * np.eye(n)
        b = rng.normal(size=n)
        res = cg_solve(sp.csr_matrix(a), b, tol=1e-12)
        assert np.allclose(a @ res.x, b, atol=1e-9 * np.linalg.norm(b))
