import json

import pytest

from produpd.cli import run

MODEL = {
    "worlds": ["w0", "w1"],
    "rel": [["w0", "w1"], ["w1", "w1"]],
    "val": {"p": ["w0"]},
}
EVENTS = {
    "events": ["a0", "a1"],
    "rel": [["a0", "a0"], ["a0", "a1"], ["a1", "a1"]],
    "pre": {"a0": "q", "a1": "true"},
}


@pytest.fixture
def model_file(tmp_path):
    path = tmp_path / "model.json"
    path.write_text(json.dumps(MODEL))
    return str(path)


@pytest.fixture
def events_file(tmp_path):
    path = tmp_path / "events.json"
    path.write_text(json.dumps(EVENTS))
    return str(path)


class TestParseCommand:
    def test_normalizes(self, capsys):
        assert run(["parse", "exists p. p & q"]) == 0
        assert capsys.readouterr().out.strip() == "exists p. (p & q)"

    def test_json(self, capsys):
        assert run(["parse", "nu p. [] p", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data == {"formula": "nu p. [] p", "tag": "MuFragment"}

    def test_parse_error_exit_2(self, capsys):
        assert run(["parse", "p &"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_positivity_error_exit_2(self, capsys):
        assert run(["parse", "nu p. ~p"]) == 2

    def test_file_indirection(self, tmp_path, capsys):
        f = tmp_path / "phi.txt"
        f.write_text("[] (p -> q)")
        assert run(["parse", f"@{f}"]) == 0
        assert capsys.readouterr().out.strip() == "[] (p -> q)"


class TestEvalCommand:
    def test_truth_at_world(self, model_file, capsys):
        one = json.dumps({"worlds": ["w0"], "rel": [], "val": {"p": ["w0"]}})
        import pathlib

        path = pathlib.Path(model_file).parent / "one.json"
        path.write_text(one)
        assert run(["eval", "--model", str(path), "--formula", "U p", "--world", "w0"]) == 0
        assert capsys.readouterr().out.strip() == "true"

    def test_extension(self, model_file, capsys):
        assert run(["eval", "--model", model_file, "--formula", "[] p"]) == 0
        assert capsys.readouterr().out.strip() == "(empty)"

    def test_extension_json(self, model_file, capsys):
        assert run(["eval", "--model", model_file, "--formula", "<> p", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["extension"] == []

    def test_events_supplied(self, model_file, events_file, capsys):
        assert (
            run(
                ["eval", "--model", model_file, "--formula", "<a1> true",
                 "--events", events_file, "--json"]
            )
            == 0
        )
        data = json.loads(capsys.readouterr().out)
        assert data["extension"] == ["w0", "w1"]

    def test_nominal_without_tags_exit_1(self, model_file, capsys):
        assert run(["eval", "--model", model_file, "--formula", "j0", "--world", "w0"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_unknown_world_exit_2(self, model_file):
        assert run(["eval", "--model", model_file, "--formula", "p", "--world", "zz"]) == 2

    def test_missing_file_exit_2(self):
        assert run(["eval", "--model", "/nonexistent.json", "--formula", "p"]) == 2

    def test_budget_env_override(self, model_file, capsys, monkeypatch):
        monkeypatch.setenv("PRODUPD_BUDGET_WORLDS", "1")
        assert run(["eval", "--model", model_file, "--formula", "exists p. p"]) == 1
        assert "budget" in capsys.readouterr().err.lower()


class TestProductCommand:
    def test_matches_library_output(self, model_file, events_file, capsys):
        assert run(["product", "--model", model_file, "--events", events_file]) == 0
        out = capsys.readouterr().out
        data = json.loads(out)
        assert set(data) == {"worlds", "rel", "val", "tags"}
        # q is false everywhere, so only the a1 column survives
        assert data["worlds"] == ["(w0,a1)", "(w1,a1)"]
        assert data["tags"] == {"(w0,a1)": "a1", "(w1,a1)": "a1"}

    def test_evaluating_dumped_product(self, model_file, events_file, tmp_path, capsys):
        run(["product", "--model", model_file, "--events", events_file])
        product_json = capsys.readouterr().out
        path = tmp_path / "product.json"
        path.write_text(product_json)
        assert (
            run(
                ["eval", "--model", str(path), "--formula", "j1",
                 "--events", events_file, "--json"]
            )
            == 0
        )
        data = json.loads(capsys.readouterr().out)
        assert data["extension"] == ["(w0,a1)", "(w1,a1)"]


class TestAnnounceCommand:
    def test_relativises(self, model_file, capsys):
        assert run(["announce", "--model", model_file, "--formula", "p"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["worlds"] == ["w0"]
        assert data["rel"] == []


class TestTranslateCommand:
    def test_pinned_example(self, events_file, capsys):
        assert (
            run(
                ["translate", "--events", events_file, "--event", "a0",
                 "--formula", "exists p. p"]
            )
            == 0
        )
        out = capsys.readouterr().out.strip()
        assert out == (
            "exists _f0. exists _f1. (U (_f0 -> q) & (U (_f1 -> true) & "
            "(((q & _f0) & q) | ((q & _f1) & false))))"
        )

    def test_json_includes_sanity_check(self, events_file, capsys):
        assert (
            run(
                ["translate", "--events", events_file, "--event", "a0",
                 "--formula", "nu p. [] p", "--json"]
            )
            == 0
        )
        data = json.loads(capsys.readouterr().out)
        assert data["sanity_check"]["match"] is True
        assert data["steps"]
        assert data["output_eps"] >= 1

    def test_simplify_flag(self, events_file, capsys):
        assert (
            run(
                ["translate", "--events", events_file, "--event", "a1",
                 "--formula", "p", "--simplify"]
            )
            == 0
        )
        assert capsys.readouterr().out.strip() == "p"

    def test_unknown_event_exit_2(self, events_file):
        assert (
            run(["translate", "--events", events_file, "--event", "zz", "--formula", "p"])
            == 2
        )


class TestBisimCommand:
    def test_verdict_and_relation(self, tmp_path, capsys):
        m1 = tmp_path / "m1.json"
        m1.write_text(json.dumps({"worlds": ["w"], "rel": [["w", "w"]], "val": {"p": ["w"]}}))
        m2 = tmp_path / "m2.json"
        m2.write_text(
            json.dumps(
                {"worlds": ["u", "v"], "rel": [["u", "v"], ["v", "u"]],
                 "val": {"p": ["u", "v"]}}
            )
        )
        assert (
            run(
                ["bisim", "--model1", str(m1), "--world1", "w",
                 "--model2", str(m2), "--world2", "u", "--json"]
            )
            == 0
        )
        data = json.loads(capsys.readouterr().out)
        assert data["bisimilar"] is True
        assert data["pairs"] == [["w", "u"], ["w", "v"]]


class TestFuzzCommand:
    def test_small_run(self, capsys):
        assert (
            run(
                ["fuzz", "--seed", "42", "--cases", "5", "--suites",
                 "translation,fixpoint", "--json"]
            )
            == 0
        )
        data = json.loads(capsys.readouterr().out)
        assert data["ok"] is True
        assert data["suites"]["translation"]["passed"] == 5
        assert "timing" in data

    def test_human_output(self, capsys):
        assert run(["fuzz", "--seed", "1", "--cases", "3", "--suites", "nominals"]) == 0
        out = capsys.readouterr().out
        assert "suite nominals: 3/3 passed" in out
        assert out.strip().endswith("ok")

    def test_bad_config_exit_2(self, capsys):
        assert run(["fuzz", "--cases", "0"]) == 2


class TestUsage:
    def test_no_command_exit_2(self):
        assert run([]) == 2

    def test_help_exit_0(self):
        assert run(["--help"]) == 0
