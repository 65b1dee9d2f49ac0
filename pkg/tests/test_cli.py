import json

import pytest
from click.testing import CliRunner

from bfree.cli import main

from conftest import DATA


@pytest.fixture()
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, list(args), catch_exceptions=False)


class TestEta:
    def test_text_output(self, runner):
        result = invoke(runner, "eta", "--family", str(DATA / "b2.toml"), "--range", "-2..2")
        assert result.exit_code == 0
        assert result.output.strip() == "0 1 0 1 0"

    def test_squarefree_window(self, runner):
        result = invoke(
            runner, "eta", "--family", str(DATA / "sqfree.toml"), "--range", "47..51"
        )
        assert result.output.strip() == "1 0 0 0 1"

    def test_json_format(self, runner):
        result = invoke(
            runner, "eta", "--family", str(DATA / "b2.toml"),
            "--range", "0..3", "--format", "json",
        )
        data = json.loads(result.output)
        assert data["result"] == {"offset": 0, "bits": [0, 1, 0, 1]}
        assert data["family"]["label"] == "b2"

    def test_csv_and_rle(self, runner):
        result = invoke(
            runner, "eta", "--family", str(DATA / "b2.toml"),
            "--range", "0..2", "--format", "csv",
        )
        assert result.output.splitlines() == ["index,bit", "0,0", "1,1", "2,0"]
        result = invoke(
            runner, "eta", "--family", str(DATA / "b2.toml"),
            "--range", "0..2", "--format", "rle",
        )
        assert result.output.strip() == "0;0*1,1*1,0*1"

    def test_malformed_spec_exit_2(self, runner, tmp_path):
        bad = tmp_path / "bad.toml"
        bad.write_text("kind = }{nonsense")
        result = runner.invoke(
            main, ["eta", "--family", str(bad), "--range", "0..1"]
        )
        assert result.exit_code == 2

    def test_bad_range_exit_2(self, runner):
        result = runner.invoke(
            main, ["eta", "--family", str(DATA / "b2.toml"), "--range", "oops"]
        )
        assert result.exit_code == 2


class TestStructure:
    def test_twop_report(self, runner):
        result = invoke(runner, "structure", "--family", str(DATA / "twop.toml"))
        data = json.loads(result.output)
        r = data["result"]
        assert [c["scale"] for c in r["a_inf"]] == [2]
        assert r["b_star"]["elements"] == [2]
        assert r["diagnostics"]["proximal"] is False
        assert r["diagnostics"]["regularity"]["verdict"] == "Regular"

    def test_squares_report(self, runner):
        result = invoke(runner, "structure", "--family", str(DATA / "sqfree.toml"))
        r = json.loads(result.output)["result"]
        assert [c["scale"] for c in r["a_inf"]] == [1]
        assert r["b_star"]["elements"] == [1]
        assert r["diagnostics"]["proximal"] is True

    def test_finite_report(self, runner):
        result = invoke(runner, "structure", "--family", str(DATA / "finite.toml"))
        r = json.loads(result.output)["result"]
        assert r["a_inf"] == []
        assert r["b_star"]["elements"] == [6, 10, 15]
        assert r["diagnostics"]["regularity"]["verdict"] == "Regular"

    def test_golden_schema(self, runner):
        result = invoke(runner, "structure", "--family", str(DATA / "twop.toml"))
        data = json.loads(result.output)
        golden = json.loads((DATA / "golden_structure_twop.json").read_text())
        data["tool"].pop("version")
        golden["tool"].pop("version")
        assert data == golden


class TestMeasure:
    def test_exact_zero_terms(self, runner):
        result = invoke(
            runner, "measure", "--family", str(DATA / "twop.toml"),
            "--filtration", "10,30",
        )
        r = json.loads(result.output)["result"]
        assert r["boundary"]["boundary_terms"] == [
            {"num": "0", "den": "1"},
            {"num": "0", "den": "1"},
        ]
        assert r["boundary"]["monotone"] is True
        assert r["davenport_erdos"][0] == {"num": "7", "den": "30"}


class TestWitness:
    def test_integer_witness_with_transcript(self, runner):
        result = invoke(
            runner, "witness", "--family", str(DATA / "sqfree.toml"),
            "--anchor", "0", "--radius", "1", "--flips", "-1,1",
            "--protect", "4,9",
        )
        r = json.loads(result.output)["result"]
        assert r["kind"] == "IntegerWitness"
        assert r["target"]["bits"] == [0, 0, 0]
        assert r["value"] % 36 == 0
        assert r["verification"]
        assert any("anchor" in line for line in r["transcript"])

    def test_flip_not_allowed_exit_2(self, runner):
        result = runner.invoke(
            main,
            [
                "witness", "--family", str(DATA / "twop.toml"),
                "--anchor", "1", "--radius", "1", "--flips", "0",
            ],
        )
        assert result.exit_code == 2
        assert "FlipNotAllowed" in result.output


class TestBlocks:
    def test_finite_modes_identical(self, runner):
        result = invoke(
            runner, "blocks", "--family", str(DATA / "finite.toml"),
            "--radius", "2", "--mode", "both", "--range", "1000",
            "--support", "6,10,15", "--upto", "30",
        )
        r = json.loads(result.output)["result"]
        assert r["identical"] is True
        assert r["sandwich"] is True
        assert len(r["eta"]) == 12

    def test_csv_output(self, runner):
        result = invoke(
            runner, "blocks", "--family", str(DATA / "b2.toml"),
            "--radius", "1", "--mode", "eta", "--range", "50", "--format", "csv",
        )
        lines = result.output.splitlines()
        assert lines[0] == "mode,word"
        assert set(lines[1:]) == {"eta,010", "eta,101"}

    def test_term_explosion_exit_1(self, runner):
        support = ",".join(
            str(p * p) for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31)
        )
        result = runner.invoke(
            main,
            [
                "blocks", "--family", str(DATA / "sqfree.toml"),
                "--radius", "1", "--mode", "phi", "--support", support,
                "--upto", "100",
            ],
        )
        assert result.exit_code == 1
        assert "TermExplosion" in result.output


class TestToeplitz:
    def test_certificates(self, runner):
        result = invoke(
            runner, "toeplitz", "--family", str(DATA / "twop.toml"),
            "--positions", "3..4",
        )
        certs = json.loads(result.output)["result"]["certificates"]
        assert certs[0] == {
            "position": 3, "period": 2, "kind": "OnePeriod",
            "support": [6, 10], "verified_translates": 20,
        }
        assert certs[1]["kind"] == "ZeroPeriod"


class TestDiagnose:
    def test_union_diagnose(self, runner):
        result = invoke(
            runner, "diagnose", "--family", str(DATA / "union15.toml"),
            "--seed", "7", "--samples", "50",
        )
        r = json.loads(result.output)["result"]
        assert r["structure"]["b_star"]["elements"] == [2, 15]
        assert r["certificate_discovery_on_b_star"] == []
        assert r["e_identity_samples"] == 50
        assert r["inclusion_evidence"]["sandwich_holds"] is True

    def test_seed_reproducible(self, runner):
        a = invoke(runner, "diagnose", "--family", str(DATA / "b2.toml"), "--seed", "3")
        b = invoke(runner, "diagnose", "--family", str(DATA / "b2.toml"), "--seed", "3")
        assert a.output == b.output


class TestRoundTrip:
    def test_spec_survives_the_envelope(self, runner):
        from bfree.family import family_from_dict, load_family

        for name in ("b2", "finite", "sqfree", "twop", "union15"):
            path = DATA / f"{name}.toml"
            result = invoke(runner, "eta", "--family", str(path), "--range", "0..1", "--format", "json")
            envelope_spec = json.loads(result.output)["family"]["spec"]
            assert family_from_dict(envelope_spec) == load_family(path)
