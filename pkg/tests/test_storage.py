"""CSV schemas, manifests, data cards, and the reference cache."""

import csv
import os

import numpy as np
import pytest

from logsplit import initdata, spectral, splitting, storage


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


class TestCsv:
    def test_seventeen_digit_roundtrip(self, tmp_path):
        vals = [1.0 / 3.0, np.pi, 2.0**-53, 6.0221408e23, -1e-300]
        p = tmp_path / "x.csv"
        storage.write_csv(p, ["a"], [(v,) for v in vals])
        rows = read_rows(p)
        assert rows[0] == ["a"]
        back = [float(r[0]) for r in rows[1:]]
        assert back == vals  # exact, not approximate

    def test_int_written_verbatim(self, tmp_path):
        p = tmp_path / "x.csv"
        storage.write_csv(p, ["k", "v"], [(17, 0.5)])
        assert read_rows(p)[1][0] == "17"

    def test_atomic_no_partial_file(self, tmp_path):
        # a failing row iterator must not leave a half-written target
        p = tmp_path / "x.csv"

        def rows():
            yield (1.0,)
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError):
            storage.write_csv(p, ["a"], rows())
        assert not p.exists()

    def test_errors_schema(self, tmp_path):
        p = tmp_path / "errors.csv"
        storage.write_errors_csv(p, [(0.25, 11, 0.4, 1e-3, 1e-13)])
        rows = read_rows(p)
        assert rows[0] == ["tau", "N", "t", "err", "mass_drift"]
        assert rows[1][1] == "11"

    def test_orders_schema(self, tmp_path):
        p = tmp_path / "orders.csv"
        storage.write_orders_csv(p, [(0.4, 0.41, -1.2, 0.999)])
        assert read_rows(p)[0] == ["t", "slope", "intercept", "r2"]

    def test_props_schema(self, tmp_path):
        p = tmp_path / "props.csv"
        storage.write_props_csv(p, [("reg_gap", 100000, 1.2e-9)])
        rows = read_rows(p)
        assert rows[0] == ["inequality", "samples", "worst_margin"]
        assert rows[1][0] == "reg_gap" and rows[1][1] == "100000"


@pytest.fixture(scope="module")
def short_trajectory():
    cfg = splitting.SolverConfig(
        lam=-1.0, tau=0.125, final_time=1.0, modes=8, snapshot_times=(0.5, 1.0)
    )
    rng = np.random.default_rng(5)
    c = (rng.standard_normal(17) + 1j * rng.standard_normal(17)) / (1 + np.abs(np.arange(-8, 9)))
    return splitting.run(cfg, c)


class TestTrajectoryArtifacts:
    def test_mass_csv(self, tmp_path, short_trajectory):
        p = tmp_path / "mass.csv"
        storage.write_mass_csv(p, short_trajectory)
        rows = read_rows(p)
        assert rows[0] == ["step", "t", "mass", "mass_over_initial"]
        assert len(rows) == 1 + 9  # 8 steps + initial
        assert float(rows[1][3]) == 1.0
        assert int(rows[-1][0]) == 8 and float(rows[-1][1]) == 1.0

    def test_profiles_csv(self, tmp_path, short_trajectory):
        p = tmp_path / "profiles.csv"
        fields = [(s.time, s.field) for s in short_trajectory.snapshots]
        storage.write_profiles_csv(p, fields)
        rows = read_rows(p)
        assert rows[0] == ["t", "x", "re", "im"]
        ts = sorted({float(r[0]) for r in rows[1:]})
        assert ts == [0.5, 1.0]
        xs = [float(r[1]) for r in rows[1:] if float(r[0]) == 0.5]
        assert xs[0] == -np.pi and len(xs) >= 2 * 8 + 1

    def test_shift_bounds_csv(self, tmp_path):
        from logsplit import harness

        rows_in = harness.shift_bounds_suite(3, per_side=4)
        p = tmp_path / "shift.csv"
        storage.write_shift_bounds_csv(p, rows_in)
        rows = read_rows(p)
        assert rows[0] == ["r", "t", "c0", "err", "upper", "lower"]
        assert len(rows) == 1 + len(rows_in)
        assert float(rows[1][3]) == rows_in[0].err


class TestManifest:
    def test_roundtrip_and_verify(self, tmp_path):
        a = tmp_path / "errors.csv"
        storage.write_csv(a, ["x"], [(1.0,)])
        m = tmp_path / "manifest.json"
        storage.write_manifest(m, kind="converge", config={"tau": 0.1}, artifacts=[a])
        report = storage.verify_manifest(m)
        assert report == {"errors.csv": True}

    def test_verify_flags_tamper(self, tmp_path):
        a = tmp_path / "errors.csv"
        storage.write_csv(a, ["x"], [(1.0,)])
        m = tmp_path / "manifest.json"
        storage.write_manifest(m, kind="converge", config={}, artifacts=[a])
        a.write_text("x\n2\n")
        assert storage.verify_manifest(m) == {"errors.csv": False}

    def test_missing_artifact_rejected(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            storage.write_manifest(
                tmp_path / "m.json", kind="run", config={}, artifacts=[tmp_path / "ghost.csv"]
            )


class TestDataCard:
    def test_roundtrip(self, tmp_path):
        coeff = tmp_path / "u0.coeff"
        data = initdata.make_random_hs(0.8, 0.51, 32, seed=9)
        spectral.write_coeff_file(coeff, data.coeffs, seed=9, s=0.8, beta=0.51)
        card = tmp_path / "u0.json"
        storage.write_data_card(
            card,
            family=data.family,
            params=data.params,
            norms={"l2": 1.0, "hs": data.hs_norm},
            coeff_file=coeff,
        )
        back = storage.read_data_card(card)
        assert back["family"] == "random_hs"
        assert back["params"]["seed"] == 9
        assert back["coeff_sha256"] == storage.sha256_file(coeff)


class TestCache:
    def test_store_load_roundtrip(self, tmp_path):
        arrays = {"a": np.arange(5.0), "b": np.array([1 + 2j, 0])}
        storage.cache_store("k1", arrays, tmp_path)
        back = storage.cache_load("k1", tmp_path)
        assert set(back) == {"a", "b"}
        assert np.array_equal(back["a"], arrays["a"])
        assert np.array_equal(back["b"], arrays["b"])

    def test_miss_returns_none(self, tmp_path):
        assert storage.cache_load("nope", tmp_path) is None

    def test_corruption_returns_none(self, tmp_path):
        payload = np.array([3.5, -1.25, 0.75])
        storage.cache_store("k2", {"a": payload}, tmp_path)
        (entry,) = [p for p in tmp_path.iterdir() if "k2" in p.name]
        raw = bytearray(entry.read_bytes())
        at = raw.find(payload.tobytes())  # flip a byte inside the array data
        assert at > 0
        raw[at] ^= 0xFF
        entry.write_bytes(bytes(raw))
        assert storage.cache_load("k2", tmp_path) is None

    def test_env_var_directory(self, tmp_path, monkeypatch):
        monkeypatch.setenv(storage.CACHE_ENV, str(tmp_path / "envcache"))
        d = storage.cache_dir(None)
        assert str(d).startswith(str(tmp_path / "envcache"))
        storage.cache_store("k3", {"a": np.ones(2)}, None)
        assert storage.cache_load("k3", None) is not None
        assert os.path.isdir(d)

    def test_explicit_beats_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv(storage.CACHE_ENV, str(tmp_path / "env"))
        d = storage.cache_dir(tmp_path / "explicit")
        assert "explicit" in str(d)
