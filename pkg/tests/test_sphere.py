import itertools
import math

import numpy as np
import pytest

from rmtkit import sphere
from rmtkit.ensembles import DistributionSpec, EnsembleSpec
from rmtkit.errors import ValidationError

PARAMS = sphere.SphereParams(delta=0.25, rho=0.3)


def _unit(v):
    v = np.asarray(v, dtype=np.complex128)
    return v / np.linalg.norm(v)


def _brute_dist_to_sparse(u, k):
    """Exact distance by minimizing over all support sets of size k."""
    n = u.size
    best = math.inf
    for supp in itertools.combinations(range(n), k):
        mask = np.ones(n, dtype=bool)
        mask[list(supp)] = False
        best = min(best, float(np.linalg.norm(u[mask])))
    return best


class TestDistToSparse:
    def test_matches_brute_force(self):
        rng = np.random.default_rng(30)
        for _ in range(25):
            u = _unit(rng.normal(size=8) + 1j * rng.normal(size=8))
            got = sphere.dist_to_sparse(u, 0.25)  # k = 2
            want = _brute_dist_to_sparse(u, 2)
            assert got == pytest.approx(want, abs=1e-12)

    def test_sparse_vector_has_zero_distance(self):
        u = np.zeros(8, dtype=np.complex128)
        u[3] = 1.0
        assert sphere.dist_to_sparse(u, 0.25) == 0.0

    def test_flat_vector(self):
        u = _unit(np.ones(8))
        # keeping 2 of 8 equal coordinates leaves 6/8 of the mass
        assert sphere.dist_to_sparse(u, 0.25) == pytest.approx(math.sqrt(0.75))

    def test_requires_unit_vector(self):
        with pytest.raises(ValidationError):
            sphere.dist_to_sparse(np.ones(8, dtype=np.complex128), 0.25)

    def test_delta_too_small_rejected(self):
        u = np.zeros(8, dtype=np.complex128)
        u[0] = 1.0
        with pytest.raises(ValidationError):
            sphere.dist_to_sparse(u, 0.05)  # floor(0.4) = 0 sparse target


class TestClassify:
    def test_sparse(self):
        u = np.zeros(8, dtype=np.complex128)
        u[1] = 1j
        assert sphere.classify(u, PARAMS).kind == "sparse"

    def test_incompressible_flat(self):
        u = _unit(np.ones(8))
        c = sphere.classify(u, PARAMS)
        assert c.kind == "incompressible" and not c.compressible

    def test_boundary_is_compressible(self):
        # mass exactly rho outside the top-k set
        rho = PARAMS.rho
        u = np.zeros(8, dtype=np.complex128)
        u[0] = math.sqrt(1 - rho**2)
        u[1] = math.sqrt(1 - rho**2) * 0  # keep k=2 slot distinct
        u[1] = rho / math.sqrt(2) * 1.0
        u[2] = rho / math.sqrt(2) * 1.0
        u = u / np.linalg.norm(u)
        d = sphere.dist_to_sparse(u, PARAMS.delta)
        c = sphere.classify(u, PARAMS)
        assert (c.kind == "compressible") == (d <= PARAMS.rho)

    def test_samplers_hit_their_classes(self):
        rng = np.random.default_rng(31)
        for _ in range(10):
            xc = sphere.sample_compressible(12, PARAMS, rng)
            assert sphere.classify(xc, PARAMS).compressible
            xi = sphere.sample_incompressible(12, PARAMS, rng)
            assert sphere.classify(xi, PARAMS).kind == "incompressible"


class TestProbes:
    ENS = EnsembleSpec.ginibre(16)

    def test_single_vector_probe_passes(self):
        rng = np.random.default_rng(32)
        v = sphere.sample_incompressible(16, PARAMS, rng)
        rep = sphere.single_vector_invertibility(self.ENS, v, trials=150, seed=1)
        assert not rep.flag
        assert rep.data["best_c"] is not None

    def test_compressible_probe_reports_minima(self):
        rep = sphere.compressible_inf_probe(self.ENS, PARAMS,
                                            vector_samples=30, trials=40, seed=2)
        assert rep.data["min_of_minima"] > 0.0
        assert not rep.flag

    def test_distance_probe_inequality_holds(self):
        rep = sphere.invertibility_via_distance_probe(self.ENS, PARAMS,
                                                      eps=0.5, trials=40, seed=3)
        assert not rep.flag
        assert rep.data["lhs"] <= rep.data["rhs"] + 1e-12

    def test_distance_probe_needs_large_n(self):
        small = EnsembleSpec.ginibre(8)
        with pytest.raises(ValidationError):
            sphere.invertibility_via_distance_probe(small, PARAMS, 0.5, 5, 0)

    def test_crlcd_scan_fits_positive_h(self):
        rep = sphere.crlcd_incompressible_scan(self.ENS, PARAMS, L=10.0,
                                               u=0.3, vector_samples=2,
                                               seed=4, mc_samples=2000)
        assert not rep.flag
        assert rep.data["h_fit"] > 0.0
        assert rep.data["min_crlcd"] <= math.sqrt(16.0 / 1.8) + 0.5
