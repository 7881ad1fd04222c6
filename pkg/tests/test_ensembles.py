import math

import numpy as np
import pytest
from oracles import PASTUR_GAUSSIAN_N32_EPS_HALF

from rmtkit import ensembles
from rmtkit.ensembles import (
    DistributionSpec,
    EnsembleSpec,
    SeedSpec,
    check_b_condition,
    check_hs_budget,
    check_pastur,
    sample_matrix,
    splitmix64,
)
from rmtkit.errors import ValidationError


class TestSeeds:
    def test_splitmix64_is_deterministic_and_avalanchey(self):
        assert splitmix64(0) == splitmix64(0)
        a, b = splitmix64(1), splitmix64(2)
        assert a != b
        assert bin(a ^ b).count("1") > 16  # neighbouring inputs decorrelate

    def test_trial_streams_differ(self):
        s = SeedSpec(42)
        draws = {SeedSpec(42, t).rng().integers(1 << 30) for t in range(20)}
        assert len(draws) == 20
        assert s.rng().integers(1 << 30) == SeedSpec(42).rng().integers(1 << 30)

    def test_child_streams_are_stable_and_distinct(self):
        s = SeedSpec(7, 3)
        assert s.child("a").stream_seed() == s.child("a").stream_seed()
        assert s.child("a").stream_seed() != s.child("b").stream_seed()
        assert s.child("a").trial_index == 3


class TestDistributions:
    def test_complex_gaussian_moments(self):
        d = DistributionSpec.complex_gaussian(2.0)
        z = d.sample(SeedSpec(1).rng(), 200000)
        assert np.mean(z) == pytest.approx(0.0, abs=0.02)
        assert np.mean(np.abs(z) ** 2) == pytest.approx(2.0, rel=0.02)

    def test_four_point_support(self):
        d = DistributionSpec.four_point()
        z = d.sample(SeedSpec(2).rng(), 4000)
        assert set(np.round(z, 12)) <= {1, -1, 1j, -1j}
        assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0)

    def test_rademacher(self):
        z = DistributionSpec.rademacher().sample(SeedSpec(3).rng(), 1000)
        assert set(z.real) <= {1.0, -1.0} and np.all(z.imag == 0)

    def test_constant(self):
        z = DistributionSpec.constant(2 - 1j).sample(SeedSpec(4).rng(), 10)
        assert np.all(z == 2 - 1j)

    def test_lattice_uniform_probs_validate(self):
        with pytest.raises(ValidationError):
            DistributionSpec.lattice_uniform([1, -1], [0.7, 0.2])

    def test_sparse_bernoulli_moments(self):
        d = DistributionSpec.sparse_bernoulli(0.25, 2.0)
        z = d.sample(SeedSpec(5).rng(), 100000)
        assert np.mean(np.abs(z) ** 2) == pytest.approx(1.0, rel=0.05)

    def test_zero_variance_rejected(self):
        with pytest.raises(ValidationError):
            DistributionSpec.complex_gaussian(0.0)


class TestEnsembleSpec:
    def test_iid_scalar_shift_becomes_identity(self):
        ens = EnsembleSpec.iid(4, DistributionSpec.four_point(), shift=2.0)
        np.testing.assert_allclose(ens.shift, 2.0 * np.eye(4))

    def test_sampling_is_deterministic(self):
        ens = EnsembleSpec.ginibre(8)
        A = sample_matrix(ens, SeedSpec(9, 2))
        B = sample_matrix(ens, SeedSpec(9, 2))
        np.testing.assert_array_equal(A, B)
        C = sample_matrix(ens, SeedSpec(9, 3))
        assert not np.array_equal(A, C)

    def test_shift_and_scale_applied(self):
        ens = EnsembleSpec.iid(3, DistributionSpec.constant(1.0),
                               shift=5.0, scale=2.0)
        A = sample_matrix(ens, SeedSpec(0))
        np.testing.assert_allclose(A, 5.0 * np.eye(3) + 2.0 * np.ones((3, 3)))

    def test_negative_scale_rejected(self):
        with pytest.raises(ValidationError):
            EnsembleSpec.iid(3, DistributionSpec.four_point(), scale=-1.0)

    def test_declared_b_range(self):
        with pytest.raises(ValidationError):
            EnsembleSpec.iid(3, DistributionSpec.four_point(), declared_b=1.5)


class TestHypothesisChecks:
    def test_hs_budget_ginibre_passes(self):
        rep = check_hs_budget(EnsembleSpec.ginibre(16), trials=40, seed=1)
        assert rep.ok
        assert rep.estimate == pytest.approx(1.0, rel=0.1)

    def test_hs_budget_flags_undeclared_mass(self):
        ens = EnsembleSpec.iid(8, DistributionSpec.complex_gaussian(9.0),
                               declared_K=1.0)
        assert not check_hs_budget(ens, trials=40, seed=2).ok

    def test_b_condition_four_point(self):
        # |Z' - Z''| in {0, sqrt2, 2}; P(0.5 <= |.| <= 2) = 3/4 >= 0.5
        rep = check_b_condition(DistributionSpec.four_point(), 0.5,
                                trials=4000, seed=3)
        assert rep.ok
        assert rep.estimate == pytest.approx(0.75, abs=0.03)

    def test_b_condition_constant_fails(self):
        rep = check_b_condition(DistributionSpec.constant(1.0), 0.5,
                                trials=2000, seed=4)
        assert not rep.ok  # symmetrization is identically zero

    def test_pastur_gaussian_matches_closed_form(self):
        # E[|x|^2 1{|x| >= eps sqrt(n)}] = (t+1)e^{-t} at t = eps^2 n
        ens = EnsembleSpec.iid(32, DistributionSpec.complex_gaussian(1.0))
        rep = check_pastur(ens, eps=0.5, trials=30, seed=5)
        assert PASTUR_GAUSSIAN_N32_EPS_HALF == pytest.approx(3.02e-3, rel=0.01)
        assert rep.estimate <= 10.0 * PASTUR_GAUSSIAN_N32_EPS_HALF
        assert rep.ok

    def test_pastur_heavy_atoms_flagged(self):
        big = DistributionSpec.lattice_uniform([10.0, -10.0], [0.5, 0.5])
        ens = EnsembleSpec.iid(4, big)
        rep = check_pastur(ens, eps=0.5, trials=30, seed=6)
        assert rep.estimate > 1.0
