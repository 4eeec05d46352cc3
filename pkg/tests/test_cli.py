import io
import json
import math

import pandas as pd
import pytest

from main import main
from rmtlab.commands import gmc as gmc_command
from rmtlab.commands.output import config_from_header
from rmtlab.services import gmc_service


def _run(tmp_path, name, *args):
    out = tmp_path / name
    code = main([*args, "--output", str(out)])
    return code, out


def _table(path):
    return pd.read_csv(path, comment="#")


class TestDet:
    def test_trivial_th_determinant(self, tmp_path):
        code, out = _run(tmp_path, "det.csv", "det", "--symbol", "trivial", "--n", "4", "--kappa", "1")
        assert code == 0
        table = _table(out)
        assert table.loc[0, "value_re"] == pytest.approx(2.0)
        assert table.loc[0, "kappa"] == 1

    def test_json_format(self, tmp_path):
        code, out = _run(tmp_path, "det.json", "det", "--n", "3", "--kappa", "2", "--format", "json")
        assert code == 0
        document = json.loads(out.read_text())
        assert document["provenance"]["subcommand"] == "det"
        assert document["rows"][0]["value_re"] == pytest.approx(1.0)

    def test_config_file_is_overridden_by_flags(self, tmp_path):
        config = tmp_path / "run.cfg"
        config.write_text("# trivial symbol\nn=3\nsymbol=trivial\nkappa=2\n")
        code, out = _run(tmp_path, "det.csv", "det", "--config", str(config), "--n", "5")
        assert code == 0
        table = _table(out)
        assert table.loc[0, "n"] == 5
        assert table.loc[0, "value_re"] == pytest.approx(1.0)


class TestReproducibility:
    def test_same_seed_same_bytes(self, tmp_path):
        args = ["wick", "--sigma", "1,1", "--n", "3", "--samples", "20", "--seed", "7"]
        _, first = _run(tmp_path, "a.csv", *args)
        _, second = _run(tmp_path, "b.csv", *args)
        assert first.read_bytes().replace(b"a.csv", b"b.csv") == second.read_bytes()

    def test_header_rebuilds_config(self, tmp_path):
        code, out = _run(tmp_path, "wick.csv", "wick", "--sigma", "1,1", "--n", "5", "--samples", "10",
                         "--seed", "3")
        assert code == 0
        table = _table(out)
        assert table.loc[0, "exact"] == pytest.approx(52.0)
        config = config_from_header(out.read_text())
        assert config.subcommand == "wick"
        assert config.sigma == [1, 1]
        assert config.n == 5 and config.seed == 3

    def test_stdout_without_output(self, capsys):
        assert main(["det", "--n", "2"]) == 0
        text = capsys.readouterr().out
        assert text.startswith("# ")
        assert pd.read_csv(io.StringIO(text), comment="#").loc[0, "value_re"] == pytest.approx(1.0)


class TestErrors:
    def test_validation_error(self, tmp_path):
        code, _ = _run(tmp_path, "bad.csv", "det", "--n=-1")
        assert code == 1

    @pytest.mark.parametrize("args", [
        ("sample", "--group", "U", "--n", "0"),
        ("mom", "--group", "Sp", "--n", "4", "--alpha", "-0.2"),
    ])
    def test_service_model_validation(self, tmp_path, args):
        code, out = _run(tmp_path, "bad.csv", *args)
        assert code == 1
        assert not out.exists()

    def test_missing_config_file(self, tmp_path):
        code, _ = _run(tmp_path, "bad.csv", "det", "--config", str(tmp_path / "missing.cfg"))
        assert code == 1

    def test_unknown_mode(self, tmp_path):
        code, out = _run(tmp_path, "bad.csv", "asym", "--mode", "nonsense")
        assert code == 2
        assert not out.exists()

    def test_empty_sigma(self, tmp_path):
        code, _ = _run(tmp_path, "bad.csv", "wick", "--n", "3")
        assert code == 2


class TestUbm:
    def test_time_rescale_reaches_the_command(self, tmp_path):
        code, out = _run(tmp_path, "ubm.csv", "ubm", "--mode", "two-time", "--n", "1", "--k", "1", "--T", "1",
                         "--dt", "0.1", "--samples", "2000", "--time-rescale", "true")
        assert code == 0
        row = _table(out).iloc[0]
        assert row["exact"] == pytest.approx(math.exp(-0.5))
        assert abs(row["mc"] - row["exact"]) < 4 * row["se"]


class TestGmc:
    def test_unitary_monte_carlo_normalization_computed_once(self, tmp_path, monkeypatch):
        calls = []
        original = gmc_service.expected_field

        def counting(*args, **kwargs):
            calls.append(args[0])
            return original(*args, **kwargs)

        monkeypatch.setattr(gmc_service, "expected_field", counting)
        monkeypatch.setattr(gmc_command, "expected_field", counting)
        code, out = _run(tmp_path, "gmc.csv", "gmc", "--mode", "moment", "--group", "U", "--n", "3",
                         "--alpha", "0.3", "--normalization", "mc", "--samples", "20", "--m", "1")
        assert code == 0
        assert len(calls) == 1
        assert _table(out).loc[0, "estimate"] > 0


class TestSweep:
    def test_sweep_over_n(self, tmp_path):
        code, out = _run(tmp_path, "sweep.csv", "sweep", "--target", "det", "--axis", "n", "--values", "1,2,3",
                         "--kappa", "1")
        assert code == 0
        table = _table(out)
        assert table["n"].tolist() == [1, 2, 3]
        assert table["value_re"].tolist() == pytest.approx([2.0, 2.0, 2.0])

    def test_empty_sweep(self, tmp_path):
        code, out = _run(tmp_path, "sweep.csv", "sweep", "--target", "det", "--axis", "n", "--values", "")
        assert code == 0
        body = [line for line in out.read_text().splitlines(keepends=True) if not line.startswith("#")]
        assert "".join(body) == "n\n"

    def test_sweep_needs_numeric_axis(self, tmp_path):
        code, _ = _run(tmp_path, "sweep.csv", "sweep", "--target", "det", "--axis", "symbol", "--values", "1")
        assert code == 1
