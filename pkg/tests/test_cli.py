"""
Configuration, reports, dispatch and the command-line entry point.

Core claims:
    - defaults < JSON file < explicit flags
    - Every failure class maps to its exit code (1 / 2 / 3)
    - Reports render as JSON, CSV and table; complex values split into re/im
    - The acceptance suite passes at the default scale and fails when squeezed
"""

import json

import pytest

from main import main
from src.config.run_config import RunConfig
from src.errors import (
    ConfigurationError,
    EnumerationCapError,
    IllConditionedError,
    PrecisionError,
    ScsError,
    VerificationFailure,
)
from src.report import Report, ResultRow
from src.router import handler
from src.router.handler import dispatch
from src.verification.acceptance import CHARACTER_GRID, _character_cases, run_acceptance


# == 1. Configuration =======================================================

class TestRunConfig:
    def test_defaults_validate(self):
        cfg = RunConfig().validate()
        assert cfg.datum().type_label == "A1"
        assert cfg.lam().coords == (0,)

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError):
            RunConfig.from_dict({"colour": "blue"})

    def test_file_then_flags(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"rank": 2, "z": [1.0, 1.0], "seed": 5}), encoding="utf-8")
        cfg = RunConfig.load(str(path)).merged({"seed": 11, "q": None}).validate()
        assert cfg.rank == 2
        assert cfg.z == (1.0, 1.0)
        assert cfg.seed == 11
        assert cfg.q == RunConfig.DEFAULT_Q

    def test_bad_files(self, tmp_path):
        with pytest.raises(ConfigurationError):
            RunConfig.load(str(tmp_path / "missing.json"))
        broken = tmp_path / "broken.json"
        broken.write_text("{rank: 2", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            RunConfig.load(str(broken))
        listed = tmp_path / "list.json"
        listed.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            RunConfig.load(str(listed))

    @pytest.mark.parametrize("overrides", [
        {"rank": 2},
        {"output_format": "xml"},
        {"route": "sideways"},
        {"samples": 0},
        {"lambda_coords": (1, 0)},
        {"minuscule_index": 2},
    ])
    def test_invalid_values(self, overrides):
        with pytest.raises(ConfigurationError):
            RunConfig().merged(overrides).validate()

    def test_coroot_basis(self):
        cfg = RunConfig(type_label="C", rank=2, z=(0.8, 1.6), z_basis="coroot", minuscule_index=2).validate()
        z = cfg.spectral_point()
        assert z.coroot_pairings(cfg.datum()).tolist() == pytest.approx([0.8, 1.6])

    def test_matrix_size_needs_type_a(self):
        assert RunConfig(rank=2, z=(1.0, 1.0)).matrix_size == 3
        with pytest.raises(ConfigurationError):
            RunConfig(type_label="C", rank=2, z=(1.0, 1.0)).matrix_size

    def test_exit_codes(self):
        assert ConfigurationError("x").exit_code == 2
        assert IllConditionedError("x").exit_code == 2
        assert PrecisionError("x").exit_code == 3
        assert EnumerationCapError("x").exit_code == 3
        assert VerificationFailure("x").exit_code == 1
        assert isinstance(EnumerationCapError("x"), ScsError)


# == 2. Reports =============================================================

class TestReport:
    def make_report(self):
        report = Report(command="survival", config={"seed": 1})
        report.add(ResultRow((0, 1), 0.123456789012345, "dp", delta=1e-13))
        report.add(ResultRow((2, 0), None, "mc", sigma=0.5))
        report.summary["estimate"] = complex(0.25, -1e-3)
        return report

    def test_json(self):
        document = json.loads(self.make_report().to_json())
        assert document["schema_version"] == 1
        assert document["rows"][0] == {
            "lambda_coords": [0, 1], "value": 0.123456789012, "route": "dp", "delta": 1e-13, "sigma": None,
        }
        assert document["summary"]["estimate"] == {"re": 0.25, "im": -0.001}

    def test_csv(self):
        lines = self.make_report().to_csv().splitlines()
        assert lines[0] == "lambda_coords,value,route,delta,sigma"
        assert lines[1] == "0 1,0.123456789012,dp,1e-13,"
        assert lines[2] == "2 0,,mc,,0.5"

    def test_table_and_unknown_format(self):
        report = self.make_report()
        assert "RESULT  ➜  SURVIVAL" in report.render("table")
        with pytest.raises(ConfigurationError):
            report.render("xml")


# == 3. Dispatch ============================================================

class TestDispatch:
    def test_unknown_command(self):
        with pytest.raises(ConfigurationError):
            dispatch("teleport", RunConfig().validate())

    def test_character_rows_agree(self):
        cfg = RunConfig(rank=2, z=(1.0, 1.0), lambda_coords=(1, 0)).validate()
        report = dispatch("character", cfg)
        assert [r.route for r in report.rows] == ["weyl", "survival", "orbit-sum"]
        assert all(r.delta < 1e-10 for r in report.rows[1:])
        assert report.summary["weyl_dimension"] == 3

    def test_survival_reflection_only(self):
        cfg = RunConfig(lambda_coords=(1,), route="reflection").validate()
        report = dispatch("survival", cfg)
        assert len(report.rows) == 1
        assert report.rows[0].value == pytest.approx(1 - 2.718281828459045 ** -2)

    def test_whittaker_table(self):
        cfg = RunConfig(rank=2, z=(1.0, 1.0), grid_max=3).validate()
        report = dispatch("whittaker-table", cfg)
        assert len(report.rows) == 5
        assert report.rows[0].value == 0.0
        assert report.rows[0].lambda_coords == (-1, -1)

    def test_whittaker_table_forwards_tolerances(self, monkeypatch):
        calls = []
        real = handler.scs_whittaker

        def spy(*args):
            calls.append(args[4:])
            return real(*args)

        monkeypatch.setattr(handler, "scs_whittaker", spy)
        cfg = RunConfig(rank=2, z=(1.0, 1.0), grid_max=2, wall_tolerance=1e-4, enumeration_cap=500).validate()
        dispatch("whittaker-table", cfg)
        assert calls == [(1e-4, 500)] * 4

    def test_padic_verify(self):
        report = dispatch("padic-verify", RunConfig(p=3, precision=3).validate())
        assert report.summary["failed"] == 0
        assert report.summary["checks"] == len(report.rows)

    def test_datum(self):
        report = dispatch("datum", RunConfig(rank=2, z=(1.0, 1.0)).validate())
        assert report.summary["weyl_group_order"] == 6
        assert report.summary["coset_count"] == 1 + 3 + 9
        assert report.summary["cartan_matrix"] == [[2, -1], [-1, 2]]


# == 4. Entry point =========================================================

class TestMain:
    def test_datum_json(self, capsys):
        assert main(["datum", "--n", "3", "--z", "1", "1", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["command"] == "datum"
        assert document["summary"]["rank"] == 2

    def test_non_dominant_survival(self, capsys):
        assert main(["survival", "--lambda", "-1", "--format", "json"]) == 0
        document = json.loads(capsys.readouterr().out)
        assert document["summary"]["status"] == "not dominant"
        assert document["rows"][0]["value"] == 0.0

    def test_csv_output(self, capsys):
        assert main(["survival", "--lambda", "0", "--route", "reflection", "--format", "csv", "--quiet"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "lambda_coords,value,route,delta,sigma"
        assert lines[1].startswith("0,0.632120558829,reflection")

    def test_z_on_wall_exits_2(self):
        assert main(["character", "--z", "0.0"]) == 2

    def test_rank_mismatch_exits_2(self):
        assert main(["character", "--rank", "2", "--z", "0.5"]) == 2

    def test_missing_config_exits_2(self, tmp_path):
        assert main(["datum", "--config", str(tmp_path / "nope.json")]) == 2

    def test_precision_exits_3(self):
        assert main(["poisson", "--lambda", "-2", "--precision", "1", "--samples", "10"]) == 3

    def test_state_cap_exits_3(self):
        argv = ["survival", "--n", "3", "--z", "1", "1", "--route", "dp", "--state-cap", "10"]
        assert main(argv) == 3


# == 5. Acceptance suite ====================================================

class TestAcceptance:
    def test_cheap_criteria_pass(self):
        results = run_acceptance(RunConfig().validate(), only=(1, 11, 12))
        assert [r.identifier for r in results] == [1, 11, 12]
        assert all(r.passed for r in results)

    def test_squeezed_tolerance_fails(self):
        results = run_acceptance(RunConfig(tolerance_scale=1e-30).validate(), only=(4,))
        assert len(results) == 1
        assert not results[0].passed

    def test_character_identity_grid(self):
        cases = list(_character_cases())
        assert len(cases) == 3 + 9 * 9 + 27 * 27 + 9 * 9
        assert {datum.type_label for datum, _, _ in cases} == {"A1", "A2", "A3", "C2"}
        lowest = min(min(z.coroot_pairings(datum)) for datum, z, _ in cases)
        assert lowest == pytest.approx(min(CHARACTER_GRID))
        assert max(max(lam.coords) for _, _, lam in cases) == 2

    @pytest.mark.slow
    def test_character_identity_passes(self):
        results = run_acceptance(RunConfig().validate(), only=(3,))
        assert results[0].passed
