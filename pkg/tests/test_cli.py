import json
import math
from pathlib import Path

import numpy as np
import pytest

from qhc.cli import main
from qhc.io import dumps, matrix_from_json, matrix_to_json
from qhc.schema import validate_report

FIX = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    report = json.loads(out)
    validate_report(report)
    return code, report, out


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(dumps(obj))
    return p


class TestValidate:
    def test_maximally_mixed(self, capsys):
        code, rep, _ = run(capsys, "validate", FIX / "matrices/maximally_mixed4.json")
        assert code == 0 and rep["valid"]

    def test_trace(self, capsys):
        code, rep, _ = run(capsys, "validate", FIX / "matrices/trace_1p5.json")
        assert code == 2 and not rep["valid"]
        assert rep["violations"][0]["condition"] == "trace"
        assert rep["violations"][0]["magnitude"] == pytest.approx(0.5)

    def test_positivity(self, capsys):
        code, rep, _ = run(capsys, "validate", FIX / "matrices/negative.json")
        assert code == 2 and rep["violations"][0]["condition"] == "positivity"

    def test_missing_file(self, capsys):
        code, rep, _ = run(capsys, "validate", FIX / "does-not-exist.json")
        assert code == 1 and rep["error"]["type"] == "FileNotFoundError"

    def test_malformed_json(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"probs": [0.5,\n 0.5,, ]}')
        code, rep, _ = run(capsys, "validate", p)
        assert code == 1
        assert rep["error"]["line"] == 2 and rep["error"]["column"] > 0

    def test_state_and_map(self, capsys, tmp_path):
        assert run(capsys, "validate", FIX / "states/roulette.json")[0] == 0
        assert run(capsys, "validate", write(tmp_path, "s.json", {"probs": [0.5, 0.6]}))[0] == 2
        assert run(capsys, "validate", FIX / "maps/colmajor_3x2.json")[0] == 0


class TestAnalyze:
    def test_uniform(self, capsys):
        code, rep, _ = run(capsys, "analyze", FIX / "states/uniform4.json", "--map", "2x2")
        part = rep["partitions"][0]
        assert code == 0
        assert abs(part["mutual_information"]) <= 1e-12 and abs(part["subadditivity"]["slack"]) <= 1e-12

    def test_correlated(self, capsys):
        _, rep, _ = run(capsys, "analyze", FIX / "states/correlated_bits.json", "--map", "2x2")
        assert rep["partitions"][0]["subadditivity"]["slack"] == pytest.approx(math.log(2), abs=1e-15)

    def test_all_partitions(self, capsys):
        _, rep, _ = run(capsys, "analyze", FIX / "states/uniform12.json", "--all-partitions")
        assert [p["map"]["factors"] for p in rep["partitions"]] == [[2, 6], [3, 4], [4, 3], [6, 2]]

    def test_tripartite(self, capsys):
        _, rep, _ = run(capsys, "analyze", FIX / "states/octet.json", "--map", "2x2x2", "--convention", "col-major")
        assert rep["partitions"][0]["strong_subadditivity"]["holds"]
        assert rep["partitions"][0]["map"]["convention"] == "col-major"

    def test_prime(self, capsys):
        code, rep, _ = run(capsys, "analyze", FIX / "states/prime7.json", "--all-partitions")
        assert code == 0 and rep["note"] == "no nontrivial partitions" and rep["partitions"] == []

    def test_map_file(self, capsys):
        _, rep, _ = run(capsys, "analyze", FIX / "states/roulette.json", "--map-file", FIX / "maps/roulette_2x2.json")
        assert rep["partitions"][0]["marginals"] == [[pytest.approx(0.3), pytest.approx(0.7)],
                                                     [pytest.approx(0.4), pytest.approx(0.6)]]

    def test_mismatch_is_domain_error(self, capsys):
        code, rep, _ = run(capsys, "analyze", FIX / "states/roulette.json", "--map", "2x3")
        assert code == 2 and rep["error"]["type"] == "DimensionError"


class TestHidden:
    def test_roulette(self, capsys):
        code, rep, _ = run(capsys, "hidden", FIX / "states/roulette.json", FIX / "observables/roulette_F.json",
                           "--map", "2x2")
        assert code == 0 and rep["verdict"] == "product-form"
        assert rep["difference"] <= 1e-12
        lifts = np.array(rep["lifted"])
        # lifts are the +-1 patterns up to the factor gauge
        assert np.allclose(lifts[0] / lifts[0][0], [1, 1, -1, -1])
        assert np.allclose(lifts[1] / lifts[1][0], [1, -1, 1, -1])

    def test_any_state(self, capsys, tmp_path):
        from qhc.sampler import random_simplex
        for seed in range(5):
            st = write(tmp_path, "s.json", {"probs": random_simplex(4, seed).probs.tolist()})
            _, rep, _ = run(capsys, "hidden", st, FIX / "observables/roulette_F.json", "--map", "2x2")
            assert rep["difference"] <= 1e-12

    def test_not_product(self, capsys):
        code, rep, _ = run(capsys, "hidden", FIX / "states/roulette.json", FIX / "observables/not_product.json",
                           "--map", "2x2")
        assert code == 0 and rep["verdict"] == "not product-form under this map"
        assert rep["factorization"]["residual"] > 1e-10

    def test_constant(self, capsys):
        _, rep, _ = run(capsys, "hidden", FIX / "states/roulette.json", FIX / "observables/constant4.json",
                        "--map", "2x2")
        assert rep["verdict"] == "product-form" and rep["correlation"] == pytest.approx(2.5, abs=1e-12)

    def test_tripartite(self, capsys):
        _, rep, _ = run(capsys, "hidden", FIX / "states/octet.json", FIX / "observables/parity8.json",
                        "--map", "2x2x2")
        assert rep["verdict"] == "product-form" and len(rep["lifted"]) == 3 and rep["difference"] <= 1e-12


class TestQuantum:
    def test_bell(self, capsys):
        code, rep, _ = run(capsys, "quantum", FIX / "matrices/bell.json", "--map", "2x2",
                           "--factor", FIX / "matrices/sigma_z.json", "--factor", FIX / "matrices/sigma_z.json")
        assert code == 0
        assert rep["reduced_entropies"] == [pytest.approx(math.log(2), abs=1e-12)] * 2
        assert rep["subadditivity"]["S12"] == pytest.approx(0, abs=1e-12)
        assert rep["trace_value"] == pytest.approx(1.0, abs=1e-12)
        assert rep["commutators"][0]["max_abs"] == 0.0

    def test_product_identity_factors(self, capsys):
        _, rep, _ = run(capsys, "quantum", FIX / "matrices/product4.json", "--map", "2x2",
                        "--factor", FIX / "matrices/identity2.json", "--factor", FIX / "matrices/identity2.json")
        assert rep["lifted_product_value"] == pytest.approx(1.0, abs=1e-12)
        assert abs(rep["subadditivity"]["slack"]) <= 1e-10

    def test_random(self, capsys, tmp_path):
        from qhc.sampler import random_density, random_hermitian
        rho = write(tmp_path, "rho.json", matrix_to_json(random_density(6, 4)))
        f1 = write(tmp_path, "f1.json", matrix_to_json(random_hermitian(2, 5)))
        f2 = write(tmp_path, "f2.json", matrix_to_json(random_hermitian(3, 6)))
        _, rep, _ = run(capsys, "quantum", rho, "--map", "2x3", "--factor", f1, "--factor", f2)
        assert rep["difference"] <= 1e-12

    def test_dimension_mismatch(self, capsys):
        code, rep, _ = run(capsys, "quantum", FIX / "matrices/bell.json", "--map", "2x3")
        assert code == 2

    def test_wrong_factor_dim(self, capsys):
        code, _, _ = run(capsys, "quantum", FIX / "matrices/bell.json", "--map", "2x2",
                         "--factor", FIX / "matrices/maximally_mixed4.json", "--factor", FIX / "matrices/sigma_z.json")
        assert code == 2


class TestSample:
    def test_point_mass(self, capsys, tmp_path):
        st = write(tmp_path, "s.json", {"probs": [0, 1, 0, 0]})
        _, rep, _ = run(capsys, "sample", "--state", st, "--observable", FIX / "observables/roulette_F.json",
                        "-L", 100, "--seed", 3)
        assert rep["empirical_mean"] == -1.0

    def test_roulette(self, capsys):
        L = 10**6
        _, rep, _ = run(capsys, "sample", "--state", FIX / "states/roulette.json",
                        "--observable", FIX / "observables/roulette_F.json", "-L", L, "--seed", 8)
        assert abs(rep["empirical_mean"]) <= 5 / math.sqrt(L)
        assert rep["algorithm"] == "splitmix64" and rep["seed"] == 8

    def test_repeat_identical_bytes(self, capsys):
        args = ["sample", "--state", FIX / "states/roulette.json", "--observable",
                FIX / "observables/roulette_F.json", "-L", 5000, "--seed", 99]
        assert run(capsys, *args)[2] == run(capsys, *args)[2]

    def test_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("QHC_SEED", "31")
        _, rep, _ = run(capsys, "sample", "--state", FIX / "states/roulette.json",
                        "--observable", FIX / "observables/roulette_F.json", "-L", 10)
        assert rep["seed"] == 31

    def test_rho_observable_dim_mismatch(self, capsys):
        code, _, _ = run(capsys, "sample", "--rho", FIX / "matrices/roulette_diag.json",
                         "--observable", FIX / "matrices/sigma_z.json", "-L", 10)
        assert code == 2

    def test_rho_non_diagonal(self, capsys):
        code, rep, _ = run(capsys, "sample", "--rho", FIX / "matrices/identity2.json",
                           "--observable", FIX / "matrices/sigma_x.json", "-L", 10)
        assert code == 2

    def test_rho_matches_state(self, capsys):
        a = run(capsys, "sample", "--rho", FIX / "matrices/roulette_diag.json",
                "--observable", FIX / "observables/roulette_F.json", "-L", 4000, "--seed", 2)[1]
        b = run(capsys, "sample", "--state", FIX / "states/roulette.json",
                "--observable", FIX / "observables/roulette_F.json", "-L", 4000, "--seed", 2)[1]
        a.pop("kind"), b.pop("kind")
        assert a == b

    def test_zero_L(self, capsys):
        code, _, _ = run(capsys, "sample", "--state", FIX / "states/roulette.json",
                         "--observable", FIX / "observables/roulette_F.json", "-L", 0)
        assert code == 2


def test_output_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["-o", str(out), "validate", str(FIX / "matrices/bell.json")]) == 0
    validate_report(json.loads(out.read_text()))


def test_floats_keep_17_digits():
    text = dumps({"x": 0.1, "y": 1 / 3, "z": 2.0, "w": [1e-300, -0.0]}, indent=None)
    assert '"x":0.10000000000000001' in text
    obj = json.loads(text)
    assert obj["y"] == 1 / 3 and obj["z"] == 2.0 and obj["w"][0] == 1e-300


def test_matrix_json_round_trip():
    m = np.array([[0.5, 0.1 - 0.2j], [0.1 + 0.2j, 0.5]])
    assert np.array_equal(matrix_from_json(json.loads(dumps(matrix_to_json(m)))), m)
