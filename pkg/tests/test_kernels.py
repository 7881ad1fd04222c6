import numpy as np
import pytest

from rmtkit import accel, kernels


def _random_hermitian(n, rng):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (A + A.conj().T) / 2.0


def _random_complex(n, rng):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


class TestDualPath:
    """The accelerated and plain-numpy kernel variants must agree."""

    def test_tridiag_paths_agree(self):
        rng = np.random.default_rng(1)
        for n in (2, 5, 12):
            A = _random_hermitian(n, rng)
            d1, e1 = kernels._hermitian_tridiag_np(A.copy())
            d2, e2 = kernels.hermitian_tridiag(A.copy())
            # different Householder orderings give the same spectrum
            v1, ok1 = kernels.tridiag_eigvals(d1, e1)
            v2, ok2 = kernels.tridiag_eigvals(d2, e2)
            assert ok1 and ok2
            np.testing.assert_allclose(v1, v2, rtol=0, atol=1e-10)

    def test_hessenberg_paths_agree(self):
        rng = np.random.default_rng(2)
        for n in (3, 8):
            A = _random_complex(n, rng)
            H1 = kernels._hessenberg_reduce_np(A.copy())
            H2 = kernels.hessenberg_reduce(A.copy())
            w1 = np.linalg.eigvals(H1)
            w2 = np.linalg.eigvals(H2)
            assert np.max(np.abs(np.sort_complex(w1) - np.sort_complex(w2))) < 1e-9

    def test_dispatch_mode_recorded(self):
        assert kernels.USE_NUMBA == accel.USE_NUMBA


class TestTridiagEigvals:
    def test_against_numpy(self):
        rng = np.random.default_rng(3)
        for n in (2, 3, 7, 16):
            A = _random_hermitian(n, rng)
            d, e = kernels.hermitian_tridiag(A.copy())
            vals, ok = kernels.tridiag_eigvals(d, e)
            assert ok
            np.testing.assert_allclose(
                vals, np.sort(np.linalg.eigvalsh(A)),
                rtol=0, atol=1e-10 * max(1.0, np.abs(A).max() * n),
            )

    def test_diagonal_matrix(self):
        d = np.array([3.0, -1.0, 2.0])
        e = np.zeros(3)
        vals, ok = kernels.tridiag_eigvals(d, e)
        assert ok
        np.testing.assert_allclose(vals, [-1.0, 2.0, 3.0])


class TestHessenbergEigvals:
    def test_against_numpy(self):
        rng = np.random.default_rng(4)
        for n in (2, 3, 6, 12):
            A = _random_complex(n, rng)
            H = kernels.hessenberg_reduce(A.copy())
            eigs, found, ok, _ = kernels.hessenberg_eigvals(H)
            assert ok and found == n
            np.testing.assert_allclose(
                np.sort_complex(eigs), np.sort_complex(np.linalg.eigvals(A)),
                rtol=0, atol=1e-9,
            )


class TestLuLogAbsDet:
    def test_against_slogdet(self):
        rng = np.random.default_rng(5)
        for n in (1, 2, 6, 15):
            A = _random_complex(n, rng)
            got = kernels.lu_logabsdet(A.copy())
            _, want = np.linalg.slogdet(A)
            assert got == pytest.approx(want, abs=1e-10)

    def test_singular_matrix(self):
        A = np.ones((3, 3), dtype=np.complex128)
        assert kernels.lu_logabsdet(A) == -np.inf


class TestMaxBallCount:
    def test_against_brute_force(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            pts = rng.normal(size=40) + 1j * rng.normal(size=40)
            r = float(rng.uniform(0.1, 2.0))
            count, idx = kernels.max_ball_count(pts.real, pts.imag, r)
            brute = max(
                int(np.sum(np.abs(pts - c) <= r + 1e-12)) for c in pts
            )
            assert count == brute
            assert np.sum(np.abs(pts - pts[idx]) <= r + 1e-12) == count

    def test_zero_radius(self):
        pts = np.array([0.0, 0.0, 1.0]) + 0j
        count, _ = kernels.max_ball_count(pts.real, pts.imag, 0.0)
        assert count == 2


class TestLatticeDist:
    def test_against_numpy_reference(self):
        from oracles import lattice_dist2

        rng = np.random.default_rng(7)
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        Xt = rng.normal(size=(50, 4)) + 1j * rng.normal(size=(50, 4))
        thetas = np.array([0.3 + 0.1j, 1.0, 2.5j])
        got = kernels.lattice_mean_dist2_grid(thetas, v, Xt)
        for k, th in enumerate(thetas):
            W = (th * v[None, :]) * Xt
            want = float(np.mean(np.sum(lattice_dist2(W), axis=1)))
            assert got[k] == pytest.approx(want, rel=1e-12)

    def test_integer_points_have_zero_distance(self):
        v = np.array([1.0 + 0j])
        Xt = np.array([[2.0 + 0j], [3.0 + 1j]])
        out = kernels.lattice_mean_dist2_grid(np.array([1.0 + 0j]), v, Xt)
        assert out[0] == pytest.approx(0.0, abs=1e-15)
