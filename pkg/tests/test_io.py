import numpy as np
import pytest

from rmtkit import config as cfgmod, io
from rmtkit.errors import RmtkitError, ValidationError


class TestComplexFormat:
    def test_round_trip_exact(self):
        rng = np.random.default_rng(50)
        for _ in range(100):
            z = complex(rng.normal(), rng.normal())
            assert io.parse_complex(io.format_complex(z)) == z

    def test_parse_variants(self):
        assert io.parse_complex("1+2i") == 1 + 2j
        assert io.parse_complex("-0.5-1e-3i") == -0.5 - 1e-3j
        assert io.parse_complex("3") == 3 + 0j

    def test_parse_garbage_rejected(self):
        with pytest.raises(ValidationError):
            io.parse_complex("1+2x")


class TestMatrixCsv:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(51)
        A = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
        p = tmp_path / "m.csv"
        io.write_matrix_csv(A, p)
        np.testing.assert_array_equal(io.read_matrix_csv(p), A)

    def test_missing_file_has_path_context(self, tmp_path):
        with pytest.raises(RmtkitError, match="nope.csv"):
            io.read_matrix_csv(tmp_path / "nope.csv")

    def test_ragged_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("1+0i,2+0i\n3+0i\n")
        with pytest.raises(ValidationError):
            io.read_matrix_csv(p)


class TestResults:
    def test_round_trip_byte_exact(self, tmp_path):
        rng = np.random.default_rng(52)
        recs = [{"trial": t, "n": 16, "value": float(rng.normal())}
                for t in range(20)]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        io.persist_results(recs, p1)
        header, loaded = io.load_results(p1)
        assert header == ["trial", "n", "value"]
        assert loaded == recs
        io.persist_results(loaded, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_records_header_only(self, tmp_path):
        p = tmp_path / "e.csv"
        io.persist_results([], p, fieldnames=["n", "eps", "prob"])
        assert p.read_text() == "n,eps,prob\n"

    def test_many_rows(self, tmp_path):
        recs = [{"k": i, "v": i * 0.5} for i in range(10000)]
        p = tmp_path / "big.csv"
        io.persist_results(recs, p)
        _, loaded = io.load_results(p)
        assert len(loaded) == 10000 and loaded[-1] == recs[-1]

    def test_mismatched_keys_rejected(self, tmp_path):
        with pytest.raises(ValidationError):
            io.persist_results([{"a": 1}, {"b": 2}], tmp_path / "x.csv")


class TestConfig:
    def test_load_and_overrides(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text('base_seed = 1\n[tail]\ntrials = 10\neps = [0.1, 0.5]\n')
        cfg = io.load_config(p)
        cfg = cfgmod.apply_overrides(cfg, ["tail.trials=99", "base_seed=7"])
        assert cfg["tail"]["trials"] == 99 and cfg["base_seed"] == 7

    def test_unknown_override_rejected(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text("base_seed = 1\n")
        with pytest.raises(ValidationError, match="bogus"):
            cfgmod.apply_overrides(io.load_config(p), ["bogus=1"])

    def test_dump_round_trips_through_parser(self, tmp_path):
        cfg = {"base_seed": 3, "tail": {"trials": 5, "eps": [0.1, 1.0]}}
        text = cfgmod.dump_config(cfg)
        p = tmp_path / "d.toml"
        p.write_text(text)
        assert io.load_config(p) == cfg

    def test_resolve_matrix_identity_form(self):
        M = io.resolve_matrix_field("identity*2", 3)
        np.testing.assert_allclose(M, 2.0 * np.eye(3))

    def test_resolve_matrix_csv_path(self, tmp_path):
        A = np.array([[1 + 1j, 0], [0, 2 - 1j]])
        io.write_matrix_csv(A, tmp_path / "m.csv")
        M = io.resolve_matrix_field("m.csv", 2, base_dir=tmp_path)
        np.testing.assert_array_equal(M, A)

    def test_resolve_matrix_inline(self):
        M = io.resolve_matrix_field([["1+0i", "0+0i"], [0, "0+1i"]], 2)
        np.testing.assert_array_equal(M, np.array([[1, 0], [0, 1j]]))

    def test_scale_must_be_nonnegative_real(self):
        with pytest.raises(ValidationError):
            io.resolve_matrix_field([[1, -1], [1, 1]], 2, nonneg=True)

    def test_build_ensemble_rejects_unknown_keys(self):
        with pytest.raises(ValidationError, match="typo_key"):
            cfgmod.build_ensemble({"n": 4, "dist": "four_point",
                                   "typo_key": 1})
