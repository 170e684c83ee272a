import csv
import json
import math

import numpy as np
import pytest

from src.bounds.engine import optimal_certificate
from src.bounds.models import Exponential
from src.cli.handlers import CertifyOutput
from src.cli.main import main
from src.states.generator import power_law_normalizer
from src.storage.matrix_file import store
from src.verify.reports import VerificationReport


def generate(path, *extra):
    return main(["generate", "--out", str(path), *map(str, extra)])


def read_sweep(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_certify_exact_identical_states(tmp_path):
    state = tmp_path / "gibbs.json"
    assert generate(state, "--state", "gibbs", "--dim", 6, "--beta", 0.7, "--basis-seed", 2) == 0
    out = tmp_path / "cert.json"
    code = main(["certify", "--a0", str(state), "--a", str(state), "--p", "2", "--out", str(out)])
    assert code == 0

    result = CertifyOutput.model_validate_json(out.read_text())
    assert result.mode == "exact"
    assert result.true_1_error == pytest.approx(0.0, abs=1e-12)
    assert result.certificate.bound >= 0.0


def test_certify_exact_against_estimate(tmp_path, capsys):
    state, estimate = tmp_path / "a0.json", tmp_path / "a.json"
    generate(state, "--state", "powerlaw", "--dim", 5, "--alpha", 2)
    generate(estimate, "--state", "estimate", "--dim", 5, "--seed", 4)
    capsys.readouterr()

    assert main(["certify", "--a0", str(state), "--a", str(estimate), "--p", "3"]) == 0
    result = CertifyOutput.model_validate_json(capsys.readouterr().out)
    assert result.true_1_error <= result.certificate.bound


def test_certify_model_mode_matches_library(tmp_path):
    C = -math.expm1(-1.0)
    out = tmp_path / "cert.json"
    code = main([
        "certify", "--p-error", "1e-3", "--p", "2",
        "--model", "exponential", repr(C), "1", "--out", str(out),
    ])
    assert code == 0
    cert = CertifyOutput.model_validate_json(out.read_text()).certificate
    expected = optimal_certificate(1e-3, 2.0, Exponential(C=C, beta=1.0))
    assert cert.N == expected.N
    assert cert.bound == expected.bound


def test_certify_empirical_model(tmp_path, capsys):
    moduli = tmp_path / "moduli.json"
    moduli.write_text("[0.5, 0.3, 0.2]")
    assert main(["certify", "--p-error", "0.01", "--p", "2", "--model", "empirical", str(moduli)]) == 0
    cert = CertifyOutput.model_validate_json(capsys.readouterr().out).certificate
    assert cert.tail_source.kind == "empirical"


def test_certify_rejects_p_one(capsys):
    code = main(["certify", "--p-error", "0.1", "--p", "1", "--model", "powerlaw", "0.5", "2"])
    assert code == 2
    assert "error: validation: p must satisfy 1 < p < ∞" in capsys.readouterr().err


def test_certify_rejects_non_normal_reference(tmp_path, capsys):
    path = tmp_path / "jordan.json"
    store.save_matrix(path, np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert main(["certify", "--a0", str(path), "--a", str(path), "--p", "2"]) == 2
    assert "error: validation:" in capsys.readouterr().err


def test_certify_rejects_unnormalized_estimate(tmp_path, capsys):
    state, doubled = tmp_path / "a0.json", tmp_path / "a.json"
    generate(state, "--state", "gibbs", "--dim", 3, "--beta", 1)
    store.save_matrix(doubled, 2 * store.load_matrix(state))
    assert main(["certify", "--a0", str(state), "--a", str(doubled), "--p", "2"]) == 2
    assert "error: validation:" in capsys.readouterr().err


def test_certify_missing_file(tmp_path, capsys):
    code = main(["certify", "--a0", str(tmp_path / "nope.json"), "--a", str(tmp_path / "nope.json"), "--p", "2"])
    assert code == 3
    assert "error: io:" in capsys.readouterr().err


def test_certify_unparsable_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"format": "schatten-matrix/1"')
    assert main(["certify", "--a0", str(path), "--a", str(path), "--p", "2"]) == 3
    assert "error: parse:" in capsys.readouterr().err


def test_certify_file_not_utf8(tmp_path, capsys):
    path = tmp_path / "binary.json"
    path.write_bytes(b"\xff\xfe\x00garbage")
    assert main(["certify", "--a0", str(path), "--a", str(path), "--p", "2"]) == 3
    assert "error: parse:" in capsys.readouterr().err


def test_certify_empirical_file_not_utf8(tmp_path, capsys):
    path = tmp_path / "moduli.json"
    path.write_bytes(b"\xff\xfe")
    assert main(["certify", "--p-error", "0.01", "--p", "2", "--model", "empirical", str(path)]) == 3
    assert "error: parse:" in capsys.readouterr().err


def test_certify_slow_power_law(capsys):
    code = main(["certify", "--p-error", "1e-6", "--p", "2", "--model", "powerlaw", "0.01", "1.01"])
    assert code == 0
    cert = CertifyOutput.model_validate_json(capsys.readouterr().out).certificate
    assert math.isfinite(cert.bound)


def test_certify_exponential_below_normalization_warns(caplog, capsys):
    assert main(["certify", "--p-error", "1e-3", "--p", "2", "--model", "exponential", "0.1", "1"]) == 0
    assert "no unit-trace state fits" in caplog.text


def test_certify_numerical_range_exceeded(capsys):
    code = main(["certify", "--p-error", "1e-6", "--p", "2", "--model", "exponential", "0.5", "1e-320"])
    assert code == 2
    assert "error: validation: numerical range exceeded" in capsys.readouterr().err


def test_certify_needs_a_mode(capsys):
    assert main(["certify", "--p", "2"]) == 2
    assert "error: usage:" in capsys.readouterr().err


def test_certify_bad_model_arguments(capsys):
    assert main(["certify", "--p-error", "0.1", "--p", "2", "--model", "powerlaw", "0.5"]) == 2
    assert "error: usage:" in capsys.readouterr().err


def test_unknown_flag_is_usage_error():
    assert main(["certify", "--p", "2", "--bogus"]) == 2


def test_verify_single_campaign(tmp_path):
    out = tmp_path / "lemmas.json"
    code = main(["verify", "--campaign", "lemmas", "--trials", "4", "--seed", "0", "--dims", "2,3", "--out", str(out)])
    assert code == 0
    report = VerificationReport.model_validate_json(out.read_text())
    assert report.campaign == "lemmas"
    assert report.trials == 4
    assert report.config.dims == [2, 3]


def test_verify_single_trial_is_deterministic(tmp_path):
    reports = []
    for name in ("first.json", "second.json"):
        out = tmp_path / name
        assert main(["verify", "--campaign", "theorem1", "--trials", "1", "--seed", "0", "--out", str(out)]) == 0
        data = json.loads(out.read_text())
        data.pop("elapsed")
        reports.append(data)
    assert reports[0] == reports[1]


def test_verify_all_writes_every_report(output_dir):
    assert main(["verify", "--campaign", "all", "--trials", "2", "--dims", "2"]) == 0
    written = sorted(p.name for p in output_dir.glob("report-*.json"))
    assert written == ["report-lemmas.json", "report-norms.json", "report-proof-chain.json", "report-theorem1.json"]


def test_generate_gibbs_eigenbasis(tmp_path):
    path = tmp_path / "gibbs.json"
    assert generate(path, "--state", "gibbs", "--dim", 3, "--beta", math.log(2.0)) == 0
    M = store.load_matrix(path)
    assert np.allclose(np.diagonal(M).real, [4 / 7, 2 / 7, 1 / 7], atol=1e-15)
    assert store.load_matrix_file(path).metadata.model.kind == "exponential"


def test_generate_is_byte_identical(tmp_path):
    for name in ("a.json", "b.json"):
        generate(tmp_path / name, "--state", "density", "--dim", 4, "--seed", 42)
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_generate_power_law(tmp_path):
    path = tmp_path / "pl.json"
    assert generate(path, "--state", "powerlaw", "--dim", 2, "--alpha", 2) == 0
    assert np.allclose(np.diagonal(store.load_matrix(path)).real, [0.8, 0.2], atol=1e-15)


def test_generate_requires_parameters(tmp_path, capsys):
    assert generate(tmp_path / "x.json", "--state", "gibbs", "--dim", 3) == 2
    assert "error: usage:" in capsys.readouterr().err


def test_sweep_corollary2_exponential_converges(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--kind", "corollary2", "--p", "2", "--model", "exponential", repr(-math.expm1(-1.0)), "1", "--out", str(out)])
    assert code == 0
    rows = read_sweep(out)
    assert list(rows[0]) == ["epsilon", "N", "truncation_term", "tail_term", "bound", "true_error"]
    assert len(rows) == 6
    assert float(rows[-1]["bound"]) < float(rows[0]["bound"])


def test_sweep_corollary2_power_law_diverges(tmp_path):
    out = tmp_path / "sweep.csv"
    C = repr(power_law_normalizer(1.3))
    assert main(["sweep", "--kind", "corollary2", "--p", "2", "--model", "powerlaw", C, "1.3", "--out", str(out)]) == 0
    rows = read_sweep(out)
    assert float(rows[-1]["bound"]) > float(rows[0]["bound"])


def test_sweep_empty_grid(tmp_path, capsys):
    code = main(["sweep", "--kind", "corollary2", "--p", "2", "--model", "exponential", "0.5", "1", "--eps", "--out", str(tmp_path / "s.csv")])
    assert code == 2
    assert "error: usage:" in capsys.readouterr().err


def test_sweep_corollary1_default_state(output_dir):
    assert main(["sweep", "--kind", "corollary1", "--p", "2", "--magnitudes", "0.1", "0.001"]) == 0
    rows = read_sweep(output_dir / "sweep-corollary1.csv")
    assert [float(r["magnitude"]) for r in rows] == [0.1, 0.001]
    assert all(float(r["true_error"]) <= float(r["bound"]) for r in rows)


def test_sweep_corollary1_from_file(tmp_path):
    state = tmp_path / "state.json"
    generate(state, "--state", "powerlaw", "--dim", 6, "--alpha", 1.5, "--basis-seed", 1)
    out = tmp_path / "sweep.csv"
    code = main(["sweep", "--kind", "corollary1", "--p", "3", "--a0", str(state), "--magnitudes", "0.01", "--non-hermitian", "--out", str(out)])
    assert code == 0
    assert len(read_sweep(out)) == 1


def test_sweep_corollary2_slow_power_law(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--kind", "corollary2", "--p", "2", "--model", "powerlaw", "0.01", "1.01", "--out", str(out)]) == 0
    rows = read_sweep(out)
    assert len(rows) == 6
    assert all(math.isfinite(float(r["bound"])) for r in rows)
    assert int(rows[-1]["N"]) > 2**52


def test_sweep_count_overflow_is_validation_error(tmp_path, capsys):
    code = main(["sweep", "--kind", "corollary2", "--p", "2", "--model", "powerlaw", "0.5", "1.0001", "--out", str(tmp_path / "s.csv")])
    assert code == 2
    assert "error: validation: N_eps exceeds" in capsys.readouterr().err


def test_sweep_help_documents_columns(capsys):
    assert main(["sweep", "--help"]) == 0
    help_text = " ".join(capsys.readouterr().out.split())
    assert "N, truncation_term, tail_term, bound, true_error" in help_text


def test_generate_help_documents_rng(capsys):
    assert main(["generate", "--help"]) == 0
    assert "Philox" in capsys.readouterr().out
