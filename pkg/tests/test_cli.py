import json

import numpy as np
import pytest

from dfobounds.cli import main
from dfobounds.fileio import write_points


@pytest.fixture
def simplex_csv(tmp_path):
    path = tmp_path / "simplex.csv"
    write_points(path, np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    return str(path)


@pytest.fixture
def cross_csv(tmp_path):
    # the x1*x2 dataset, radius sqrt(2), values in the f column
    path = tmp_path / "cross.csv"
    pts = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    write_points(path, pts, values=pts[:, 0] * pts[:, 1], delta=float(np.sqrt(2.0)))
    return str(path)


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


class TestPoisedness:
    def test_simplex_certificate(self, capsys, simplex_csv):
        code, payload = run_json(
            capsys, ["poisedness", simplex_csv, "--delta", "1", "--kind", "linear"]
        )
        assert code == 0
        assert np.isclose(payload["lambda"], 2.414214, atol=1e-6)
        assert payload["satisfied"] is True

    def test_collinear_exits_2(self, tmp_path, capsys):
        path = tmp_path / "collinear.csv"
        write_points(path, np.array([[0.0, 0.0], [0.5, 0.0], [1.0, 0.0]]))
        code = main(["poisedness", str(path), "--delta", "1", "--kind", "linear"])
        assert code == 2
        assert "not poised" in capsys.readouterr().err

    def test_missing_file_exits_1(self, tmp_path, capsys):
        code = main(
            ["poisedness", str(tmp_path / "nope.csv"), "--delta", "1", "--kind", "linear"]
        )
        assert code == 1

    def test_sidecar_delta(self, tmp_path, capsys):
        path = tmp_path / "pts.csv"
        write_points(path, np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), delta=1.0)
        code, payload = run_json(capsys, ["poisedness", str(path), "--kind", "linear"])
        assert code == 0
        assert np.isclose(payload["lambda"], 1.0 + np.sqrt(2.0), atol=1e-9)

    def test_out_file(self, capsys, simplex_csv, tmp_path):
        out = tmp_path / "cert.json"
        code, payload = run_json(
            capsys,
            ["poisedness", simplex_csv, "--delta", "1", "--kind", "linear", "--out", str(out)],
        )
        assert code == 0
        assert json.loads(out.read_text()) == payload


class TestFit:
    def test_mfn_cross_model(self, capsys, cross_csv):
        code, payload = run_json(capsys, ["fit", cross_csv, "--kind", "mfn"])
        assert code == 0
        assert np.allclose(payload["H"], [[0.0, 1.0], [1.0, 0.0]], atol=1e-9)
        assert payload["residual"] <= 1e-9

    def test_kappa_zero_bit_for_bit(self, capsys, cross_csv):
        code_a = main(["fit", cross_csv, "--kind", "mfn", "--kappa", "0"])
        out_a = capsys.readouterr().out
        code_b = main(["fit", cross_csv, "--kind", "mfn"])
        out_b = capsys.readouterr().out
        assert code_a == code_b == 0
        assert out_a == out_b

    def test_gamma_violation_exits_2(self, capsys, cross_csv, tmp_path):
        gamma = tmp_path / "gamma.json"
        gamma.write_text("[0.0, 0.0, 0.0, 9.0]")
        code = main(
            ["fit", cross_csv, "--kind", "mfn", "--kappa", "0.01", "--gamma-file", str(gamma)]
        )
        assert code == 2
        assert "3" in capsys.readouterr().err  # offending index named

    def test_requires_values(self, capsys, simplex_csv):
        code = main(["fit", simplex_csv, "--delta", "1", "--kind", "lin_det"])
        assert code == 1
        assert "f column" in capsys.readouterr().err

    def test_relaxed_fit_runs(self, capsys, cross_csv):
        code, payload = run_json(
            capsys, ["fit", cross_csv, "--kind", "mfn", "--kappa", "0.05"]
        )
        assert code == 0
        envelope = 0.05 * 2.0  # kappa * delta^2
        assert payload["residual"] <= envelope * (1 + 1e-9)


class TestBounds:
    def test_lin_det_worked_example(self, capsys):
        code, payload = run_json(
            capsys,
            ["bounds", "--kind", "lin_det", "--L", "2", "--kappa", "0", "--lam", "1", "--n", "4"],
        )
        assert code == 0
        assert np.isclose(payload["C_g"], 6.0)
        assert payload["C_H"] == 0.0

    def test_under_with_supplied_constants(self, capsys):
        code, payload = run_json(
            capsys,
            ["bounds", "--kind", "under", "--L", "1", "--kappa-s", "1",
             "--kappa-H", "2", "--p", "4"],
        )
        assert code == 0
        assert np.isclose(payload["C_g"], 10.0)

    def test_missing_constants_exit_1(self, capsys):
        code = main(["bounds", "--kind", "lin_det", "--L", "2"])
        assert code == 1


class TestOracle:
    def test_witness_value(self, capsys, tmp_path):
        poly = tmp_path / "lin.json"
        poly.write_text(json.dumps(
            {"n": 2, "c": 1.0, "g": [-1.0, -1.0], "H": [[0.0, 0.0], [0.0, 0.0]]}
        ))
        code, payload = run_json(
            capsys,
            ["oracle", "--poly", str(poly), "--radius", "1", "--resolution", "0.001"],
        )
        assert code == 0
        assert abs(payload["max_abs"] - (1.0 + np.sqrt(2.0))) <= 1e-3

    def test_center_flag(self, capsys, tmp_path):
        poly = tmp_path / "m.json"
        poly.write_text(json.dumps(
            {"n": 1, "c": 0.0, "g": [1.0], "H": [[0.0]]}
        ))
        code, payload = run_json(
            capsys,
            ["oracle", "--poly", str(poly), "--center", "3.0", "--radius", "1",
             "--resolution", "0.01"],
        )
        assert code == 0
        assert np.isclose(payload["max_abs"], 4.0, atol=1e-2)

    def test_bad_center_exits_1(self, capsys, tmp_path):
        poly = tmp_path / "m.json"
        poly.write_text(json.dumps({"n": 1, "c": 0.0, "g": [1.0], "H": [[0.0]]}))
        code = main(
            ["oracle", "--poly", str(poly), "--center", "x", "--radius", "1",
             "--resolution", "0.01"]
        )
        assert code == 1


class TestVerify:
    def test_three_trial_campaign(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(
            {"function": "quartic", "kind": "lin_det", "n": 2, "p": 2,
             "delta": [0.4, 0.2, 0.1], "seed": 0}
        ))
        csv_path = tmp_path / "out.csv"
        json_path = tmp_path / "out.json"
        code = main(
            ["verify", "--config", str(cfg), "--csv", str(csv_path),
             "--json", str(json_path), "--quiet"]
        )
        assert code == 0
        lines = csv_path.read_text().splitlines()
        assert len(lines) == 4  # header + 3 data rows
        summary = json.loads(capsys.readouterr().out)
        assert summary["n_trials"] == 3

    def test_progress_on_stderr(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(
            {"function": "quartic", "kind": "lin_det", "n": 2, "p": 2, "delta": 0.1}
        ))
        code = main(
            ["verify", "--config", str(cfg), "--csv", str(tmp_path / "o.csv"),
             "--json", str(tmp_path / "o.json")]
        )
        captured = capsys.readouterr()
        assert code == 0
        assert "trial 1/1" in captured.err
        json.loads(captured.out)  # stdout stays machine-parseable

    def test_bad_config_exits_1(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"function": "quartic", "bogus": 1}))
        code = main(
            ["verify", "--config", str(cfg), "--csv", str(tmp_path / "o.csv"),
             "--json", str(tmp_path / "o.json"), "--quiet"]
        )
        assert code == 1

    def test_failing_trial_exits_2(self, capsys, tmp_path):
        # radius larger than the quartic domain can host
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps(
            {"function": "quartic", "kind": "lin_det", "n": 2, "p": 2, "delta": 1.5}
        ))
        code = main(
            ["verify", "--config", str(cfg), "--csv", str(tmp_path / "o.csv"),
             "--json", str(tmp_path / "o.json"), "--quiet"]
        )
        assert code == 2


class TestUsageErrors:
    def test_no_subcommand_exits_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 1

    def test_unknown_kind_exits_1(self, capsys, simplex_csv):
        with pytest.raises(SystemExit) as exc:
            main(["poisedness", simplex_csv, "--delta", "1", "--kind", "cubic"])
        assert exc.value.code == 1
