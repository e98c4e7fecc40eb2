"""Kernel and Gram matrix behavior: pinned values, brute-force cross-checks,
and the PSD/symmetry/equivariance invariants."""

import math

import numpy as np
import pytest

from krstab.kernels import (
    GramMatrix,
    KernelSpec,
    PointSet,
    eval_kernel,
    gram,
    kappa_upper_bound,
    kernel_diag,
    kernel_matrix,
)
from krstab.linalg import DiagnosticsError

GAUSS_01 = 0.6065306597126334  # exp(-1/2), frozen


def all_kinds():
    return [
        KernelSpec.gaussian(1.0),
        KernelSpec.gaussian(0.4),
        KernelSpec.linear(),
        KernelSpec.polynomial(2, 1.0),
        KernelSpec.polynomial(3, 0.5),
    ]


class TestEvalKernel:
    def test_gaussian_same_point(self):
        assert eval_kernel(KernelSpec.gaussian(1.0), [0.0], [0.0]) == 1.0

    def test_gaussian_unit_gap(self):
        v = eval_kernel(KernelSpec.gaussian(1.0), [0.0], [1.0])
        assert abs(v - GAUSS_01) < 1e-15
        assert abs(v - math.exp(-0.5)) < 1e-15

    def test_linear_dot(self):
        assert eval_kernel(KernelSpec.linear(), [2.0], [3.0]) == 6.0

    def test_polynomial_value(self):
        # (2*1 + 1)^2 = 9
        assert eval_kernel(KernelSpec.polynomial(2, 1.0), [2.0], [1.0]) == 9.0

    def test_symmetry_exact(self):
        rng = np.random.default_rng(10)
        for spec in all_kinds():
            for _ in range(20):
                x, y = rng.normal(size=3), rng.normal(size=3)
                assert eval_kernel(spec, x, y) == eval_kernel(spec, y, x)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            eval_kernel(KernelSpec.linear(), [1.0, 2.0], [1.0])


class TestKernelSpec:
    def test_gaussian_requires_width(self):
        with pytest.raises(ValueError):
            KernelSpec(kind="gaussian")
        with pytest.raises(ValueError):
            KernelSpec(kind="gaussian", width=0.0)

    def test_linear_takes_no_params(self):
        with pytest.raises(ValueError):
            KernelSpec(kind="linear", width=1.0)

    def test_polynomial_validation(self):
        with pytest.raises(ValueError):
            KernelSpec(kind="polynomial", degree=0, offset=1.0)
        with pytest.raises(ValueError):
            KernelSpec(kind="polynomial", degree=2, offset=-1.0)

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="unknown"):
            KernelSpec(kind="laplace", width=1.0)

    def test_json_round_trip_exact_keys(self):
        for spec in all_kinds():
            obj = spec.to_json_dict()
            assert KernelSpec.from_json_dict(obj) == spec
        assert KernelSpec.gaussian(1.0).to_json_dict() == {"kind": "gaussian", "width": 1.0}
        assert KernelSpec.linear().to_json_dict() == {"kind": "linear"}
        assert KernelSpec.polynomial(2, 0.5).to_json_dict() == {
            "kind": "polynomial",
            "degree": 2,
            "offset": 0.5,
        }

    def test_from_json_rejects_unknown_keys(self):
        with pytest.raises(ValueError, match="unknown"):
            KernelSpec.from_json_dict({"kind": "linear", "scale": 2.0})


class TestPointSet:
    def test_one_d_input(self):
        p = PointSet([0.0, 1.0, 2.0])
        assert p.points.shape == (3, 1)
        assert len(p) == 3 and p.dim == 1

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            PointSet(np.zeros((0, 1)))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            PointSet([[np.inf]])

    def test_read_only(self):
        p = PointSet([[1.0]])
        with pytest.raises(ValueError):
            p.points[0, 0] = 2.0


class TestGram:
    def test_single_point_gaussian(self):
        g = gram(KernelSpec.gaussian(1.0), PointSet([[0.0]]))
        np.testing.assert_array_equal(g.entries, [[1.0]])
        assert g.kappa == 1.0

    def test_linear_two_points(self):
        g = gram(KernelSpec.linear(), PointSet([[0.0], [1.0]]))
        np.testing.assert_array_equal(g.entries, [[0.0, 0.0], [0.0, 1.0]])
        assert g.kappa == 1.0

    def test_matches_brute_force(self):
        rng = np.random.default_rng(11)
        for spec in all_kinds():
            pts = PointSet(rng.normal(size=(6, 2)))
            g = gram(spec, pts)
            brute = np.array(
                [
                    [eval_kernel(spec, a, b) for b in pts.points]
                    for a in pts.points
                ]
            )
            np.testing.assert_allclose(g.entries, brute, atol=1e-14)

    def test_gaussian_diagonal_exactly_one(self):
        rng = np.random.default_rng(12)
        pts = PointSet(rng.uniform(-50.0, 50.0, size=(20, 3)))
        g = gram(KernelSpec.gaussian(0.7), pts)
        np.testing.assert_array_equal(np.diag(g.entries), np.ones(20))

    def test_entries_exactly_symmetric(self):
        rng = np.random.default_rng(13)
        for spec in all_kinds():
            g = gram(spec, PointSet(rng.normal(size=(10, 2))))
            assert np.array_equal(g.entries, g.entries.T)

    def test_psd_invariant(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            spec = all_kinds()[int(rng.integers(len(all_kinds())))]
            n, d = int(rng.integers(1, 21)), int(rng.integers(1, 5))
            g = gram(spec, PointSet(rng.normal(size=(n, d))))
            assert g.eigen.eigenvalues[-1] >= -1e-10 * n * g.kappa

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(15)
        pts = rng.normal(size=(8, 2))
        perm = rng.permutation(8)
        for spec in all_kinds():
            g = gram(spec, PointSet(pts)).entries
            gp = gram(spec, PointSet(pts[perm])).entries
            np.testing.assert_array_equal(gp, g[np.ix_(perm, perm)])

    def test_kappa_is_max_diagonal(self):
        rng = np.random.default_rng(16)
        g = gram(KernelSpec.linear(), PointSet(rng.normal(size=(7, 3))))
        assert g.kappa == float(np.max(np.diag(g.entries)))

    def test_from_raw_entries_mirrors_upper(self):
        m = np.array([[1.0, 0.5], [0.5 + 1e-14, 1.0]])
        g = GramMatrix(m)
        assert g.entries[1, 0] == g.entries[0, 1] == 0.5

    def test_rejects_asymmetric_entries(self):
        with pytest.raises(ValueError, match="symmetric"):
            GramMatrix(np.array([[1.0, 0.5], [0.1, 1.0]]))

    def test_indefinite_matrix_fails_diagnostics(self):
        g = GramMatrix(np.array([[1.0, 2.0], [2.0, 1.0]]))  # eigenvalues 3, -1
        with pytest.raises(DiagnosticsError, match="positive semidefinite"):
            _ = g.eigen

    def test_eigen_is_cached(self):
        g = gram(KernelSpec.gaussian(1.0), PointSet([[0.0], [1.0]]))
        assert g.eigen is g.eigen


class TestDiagHelpers:
    def test_kernel_diag_matches_eval(self):
        rng = np.random.default_rng(17)
        pts = rng.normal(size=(9, 2))
        for spec in all_kinds():
            diag = kernel_diag(spec, pts)
            expect = [eval_kernel(spec, p, p) for p in pts]
            np.testing.assert_allclose(diag, expect, rtol=1e-14)

    def test_kappa_upper_bound_dominates_box(self):
        rng = np.random.default_rng(18)
        lo, hi = np.array([-1.0, 0.5]), np.array([2.0, 3.0])
        pts = rng.uniform(lo, hi, size=(200, 2))
        for spec in all_kinds():
            bound = kappa_upper_bound(spec, lo, hi)
            assert np.max(kernel_diag(spec, pts)) <= bound + 1e-12

    def test_kappa_bound_attained_at_corner(self):
        lo, hi = np.array([-2.0]), np.array([1.0])
        assert kappa_upper_bound(KernelSpec.linear(), lo, hi) == 4.0
        assert kappa_upper_bound(KernelSpec.gaussian(0.3), lo, hi) == 1.0


def test_kernel_matrix_cross_shape():
    rng = np.random.default_rng(19)
    a, b = rng.normal(size=(4, 2)), rng.normal(size=(6, 2))
    m = kernel_matrix(KernelSpec.gaussian(0.8), a, b)
    assert m.shape == (4, 6)
    assert m[2, 3] == eval_kernel(KernelSpec.gaussian(0.8), a[2], b[3])
