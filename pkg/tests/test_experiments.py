import math

import numpy as np
import pytest
from oracles import disc_cdf_quadrature

from rmtkit import experiments as ex
from rmtkit.ensembles import DistributionSpec, EnsembleSpec, SeedSpec, sample_matrix
from rmtkit.errors import ValidationError

GAUSS = DistributionSpec.complex_gaussian(1.0)
FOUR = DistributionSpec.four_point()


def _cfg(**kw):
    kw.setdefault("dist_x", GAUSS)
    kw.setdefault("n_list", (16,))
    kw.setdefault("trials", 20)
    return ex.ExperimentConfig(**kw)


class TestTailExperiment:
    def test_zero_ensemble_probability_one(self):
        cfg = _cfg(dist_x=DistributionSpec.constant(0.0),
                   eps_list=(0.1, 1.0), trials=5)
        res = ex.run_tail_experiment(cfg)
        assert all(r["prob"] == 1.0 for r in res.rows)

    def test_monotone_in_eps_exactly(self):
        cfg = _cfg(eps_list=(0.1, 0.3, 0.5, 1.0, 2.0), trials=60)
        res = ex.run_tail_experiment(cfg)
        probs = [r["prob"] for r in res.rows]
        assert probs == sorted(probs)

    def test_ginibre_edelman_bound_small(self):
        cfg = _cfg(n_list=(16,), eps_list=(0.5,), trials=400, base_seed=3)
        r = ex.run_tail_experiment(cfg).rows[0]
        assert r["prob"] <= 0.25 + 3.0 * r["stderr"]

    def test_fit_constants_reported(self):
        cfg = _cfg(eps_list=(0.2, 0.5, 1.0), trials=50)
        res = ex.run_tail_experiment(cfg)
        assert res.c_fit >= 0.0 and res.c_rate_fit > 0.0


class TestEsd:
    def test_atoms(self):
        e = ex.Esd(np.array([1.0, 1j, -1.0]))
        assert e.cdf(0.0, 0.0) == pytest.approx(1.0 / 3.0)
        assert e.cdf(1.0, 1.0) == 1.0

    def test_monotone_and_range(self):
        rng = np.random.default_rng(40)
        lam = rng.normal(size=30) + 1j * rng.normal(size=30)
        e = ex.Esd(lam)
        s = np.linspace(-3, 3, 11)
        grid = e.cdf_grid(s, s)
        assert np.all(np.diff(grid, axis=0) >= 0)
        assert np.all(np.diff(grid, axis=1) >= 0)
        assert grid.min() >= 0 and grid.max() == 1.0

    def test_compute_esd_matches_numpy(self):
        rng = np.random.default_rng(41)
        A = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
        e = ex.compute_esd(A, scale=0.5)
        want = np.sort_complex(0.5 * np.linalg.eigvals(A))
        np.testing.assert_allclose(np.sort_complex(e.eigenvalues), want,
                                   atol=1e-9)

    def test_circular_support_at_desk_scale(self):
        A = sample_matrix(EnsembleSpec.ginibre(64), SeedSpec(42))
        e = ex.compute_esd(A, 1.0 / 8.0)
        frac = np.mean(np.abs(e.eigenvalues) <= 1.1)
        assert frac >= 0.95


class TestCircularLawCdf:
    def test_trivial_points(self):
        assert ex.circular_law_cdf(1, 1) == pytest.approx(1.0)
        assert ex.circular_law_cdf(0, 1) == pytest.approx(0.5)
        assert ex.circular_law_cdf(0, 0) == pytest.approx(0.25)
        assert ex.circular_law_cdf(-1.5, 0) == 0.0

    def test_half_plane_cap(self):
        a = 0.5
        want = 0.5 + (a * math.sqrt(1 - a * a) + math.asin(a)) / math.pi
        assert ex.circular_law_cdf(0.5, 1.0) == pytest.approx(want, abs=1e-10)

    def test_quadrature_grid(self):
        for s in np.linspace(-1.2, 1.2, 7):
            for t in np.linspace(-1.2, 1.2, 7):
                assert ex.circular_law_cdf(s, t) == pytest.approx(
                    disc_cdf_quadrature(s, t), abs=1e-6)

    def test_symmetry(self):
        assert ex.circular_law_cdf(0.3, 1.0) == pytest.approx(
            ex.circular_law_cdf(1.0, 0.3), abs=1e-12)


class TestEsdDistance:
    GRID = (np.linspace(-3, 3, 31), np.linspace(-3, 3, 31))

    def test_identical_is_zero(self):
        e = ex.Esd(np.array([0.3 + 0.2j, -1.0]))
        assert ex.esd_distance(e, e, self.GRID) == 0.0

    def test_disjoint_atoms(self):
        a = ex.Esd(np.array([0.0 + 0j]))
        b = ex.Esd(np.array([2.0 + 2.0j]))
        assert ex.esd_distance(a, b, self.GRID) == 1.0

    def test_symmetric_and_triangle(self):
        rng = np.random.default_rng(43)
        es = [ex.Esd(rng.normal(size=8) + 1j * rng.normal(size=8))
              for _ in range(3)]
        d01 = ex.esd_distance(es[0], es[1], self.GRID)
        d10 = ex.esd_distance(es[1], es[0], self.GRID)
        d12 = ex.esd_distance(es[1], es[2], self.GRID)
        d02 = ex.esd_distance(es[0], es[2], self.GRID)
        assert d01 == pytest.approx(d10, abs=1e-12)
        assert d02 <= d01 + d12 + 1e-12

    def test_empty_grid_rejected(self):
        e = ex.Esd(np.array([0.0 + 0j]))
        with pytest.raises(ValidationError):
            ex.esd_distance(e, e, (np.array([]), np.array([1.0])))


class TestComparisons:
    def test_logdet_same_ensemble_same_seeds_is_zero(self):
        cfg = _cfg(dist_y=GAUSS, z=1 + 1j, trials=5)
        res = ex.log_det_comparison(cfg)
        assert max(abs(r["value"]) for r in res.rows) == 0.0

    def test_logdet_large_z_dominates(self):
        cfg = _cfg(dist_y=FOUR, z=1000.0, n_list=(16,), trials=5)
        res = ex.log_det_comparison(cfg)
        assert all(abs(r["value"]) <= 1e-2 for r in res.rows)

    def test_distance_sum_same_seeds_is_zero(self):
        cfg = _cfg(dist_y=GAUSS, z=0.5j, trials=4)
        res = ex.distance_sum_comparison(cfg)
        assert max(abs(r["value"]) for r in res.rows) == 0.0

    def test_distance_sum_index_range_recorded(self):
        cfg = _cfg(dist_y=FOUR, n_list=(64,), trials=2)
        res = ex.distance_sum_comparison(cfg)
        assert res.stats["index_range_start"]["64"] == max(
            int(math.ceil(64 - 64**0.99)), 1)

    def test_extreme_sv_frequencies_vanish_at_c2(self):
        cfg = _cfg(dist_y=None, z=0.0, n_list=(16,), trials=30)
        res = ex.extreme_sv_check(cfg)
        f = res.stats["frequencies"]["n=16,C=2.0"]
        assert f["p_large"] == 0.0 and f["p_small"] == 0.0

    def test_shift_moves_sigma_by_at_most_triangle(self):
        n, t = 12, 0
        ens = EnsembleSpec.ginibre(n)
        A = sample_matrix(ens, SeedSpec(7, t))
        z = 1 + 1j
        s0 = np.linalg.norm(A, 2)
        s1 = np.linalg.norm(A - z * math.sqrt(n) * np.eye(n), 2)
        assert abs(s1 - s0) <= abs(z) * math.sqrt(n) + 1e-9
