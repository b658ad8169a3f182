"""Command-line surface: exit codes, formats, profile resolution."""

import json

import pytest

from entrench.agent import load_profile, load_queue
from entrench.cli import main
from entrench.logic import parse_sentence as s

RULES_TEXT = (
    "# seed knowledge\n"
    "1.000\tP\tpkw(business) <-> pkw(commerce)\n"
    "1.000\tP\tpkw(sculpture) -> pkw(art)\n"
)

CORPUS_TEXT = (
    "d01\tR\tbusiness\n"
    "d02\tN\tsculpture,art\n"
    "d03\tR\tbusiness\n"
    "d04\tN\tsculpture,art\n"
)

PROBES_TEXT = (
    "q1\t?\tbusiness,art\n"
    "q2\t?\tsculpture,art\n"
    "q3\t?\tbusiness,commerce\n"
    "seen\tR\tbusiness\n"
)


@pytest.fixture
def home(tmp_path, monkeypatch):
    monkeypatch.setenv("ENTRENCH_HOME", str(tmp_path / "home"))
    (tmp_path / "rules.txt").write_text(RULES_TEXT)
    (tmp_path / "corpus.tsv").write_text(CORPUS_TEXT)
    (tmp_path / "probes.tsv").write_text(PROBES_TEXT)
    return tmp_path


def run(*argv):
    return main(list(argv))


def seeded(home, name="demo"):
    assert run("init", "--profile", name, "--knowledge",
               str(home / "rules.txt")) == 0
    assert run("learn", "--profile", name, str(home / "corpus.tsv")) == 0
    return home / "home" / name


class TestInit:
    def test_creates_profile_under_home(self, home, capsys):
        assert run("init", "--profile", "demo") == 0
        assert (home / "home" / "demo" / "profile.tsv").is_file()
        assert "initialized" in capsys.readouterr().out

    def test_refuses_to_overwrite_without_force(self, home, capsys):
        run("init", "--profile", "demo")
        assert run("init", "--profile", "demo") == 2
        assert "--force" in capsys.readouterr().err
        assert run("init", "--profile", "demo", "--force") == 0

    def test_path_profiles_bypass_home(self, home, capsys):
        target = home / "elsewhere"
        assert run("init", "--profile", str(target)) == 0
        assert (target / "profile.tsv").is_file()

    def test_knowledge_file_seeds_protected_rules(self, home):
        directory = seeded(home)
        profile = load_profile(directory)
        assert profile.ranking.is_protected(s("pkw(sculpture) -> pkw(art)"))

    def test_bad_knowledge_file_exits_2(self, home, capsys):
        (home / "broken.txt").write_text("nonsense\n")
        assert run("init", "--profile", "x", "--knowledge",
                   str(home / "broken.txt")) == 2

    def test_missing_knowledge_file_exits_3(self, home):
        assert run("init", "--profile", "x", "--knowledge",
                   str(home / "ghost.txt")) == 3


class TestLearn:
    def test_replays_corpus_and_persists(self, home, capsys):
        directory = seeded(home)
        out = capsys.readouterr().out
        assert "d01\tR\tpkw(business) -> 0.661" in out
        profile = load_profile(directory)
        assert profile.ranking.rank(s("pkw(business)")) == pytest.approx(
            0.836, abs=1e-3
        )
        assert profile.stats.total == 4

    def test_json_lines_carry_reports(self, home, capsys):
        run("init", "--profile", "demo")
        capsys.readouterr()
        assert run("learn", "--profile", "demo", "--json",
                   str(home / "corpus.tsv")) == 0
        records = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        assert [r["doc"] for r in records] == ["d01", "d02", "d03", "d04"]
        assert records[0]["reports"][0]["target"] == "pkw(business)"

    def test_missing_profile_exits_3(self, home):
        assert run("learn", "--profile", "ghost", str(home / "corpus.tsv")) == 3

    def test_malformed_corpus_exits_2(self, home, capsys):
        run("init", "--profile", "demo")
        (home / "bad.tsv").write_text("onlyonefield\n")
        assert run("learn", "--profile", "demo", str(home / "bad.tsv")) == 2

    def test_json_error_records(self, home, capsys):
        run("init", "--profile", "demo")
        (home / "bad.tsv").write_text("onlyonefield\n")
        capsys.readouterr()
        assert run("learn", "--profile", "demo", "--json",
                   str(home / "bad.tsv")) == 2
        record = json.loads(capsys.readouterr().out)
        assert record["error"]["code"] == 2


class TestFilterAndExplain:
    def test_filter_emits_verdict_lines_and_enqueues(self, home, capsys):
        directory = seeded(home)
        capsys.readouterr()
        assert run("filter", "--profile", "demo", str(home / "probes.tsv")) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines == [
            "q1\tirrelevant\t0.000",
            "q2\tirrelevant\t0.000",
            "q3\trelevant\t0.836",
        ]
        assert [d.doc_id for d in load_queue(directory)] == ["q1", "q2", "q3"]

    def test_learn_dequeues_judged_documents(self, home, capsys):
        directory = seeded(home)
        run("filter", "--profile", "demo", str(home / "probes.tsv"))
        (home / "judged.tsv").write_text("q1\tN\tbusiness,art\n")
        run("learn", "--profile", "demo", str(home / "judged.tsv"))
        assert [d.doc_id for d in load_queue(directory)] == ["q2", "q3"]

    def test_explain_queued_document(self, home, capsys):
        seeded(home)
        run("filter", "--profile", "demo", str(home / "probes.tsv"))
        capsys.readouterr()
        assert run("explain", "--profile", "demo", "q3") == 0
        out = capsys.readouterr().out
        assert "q3: relevant (degree 0.836" in out
        assert "  pkw(business)" in out

    def test_explain_adhoc_keywords(self, home, capsys):
        seeded(home)
        capsys.readouterr()
        assert run("explain", "--profile", "demo", "business,commerce") == 0
        assert "query: relevant" in capsys.readouterr().out

    def test_explain_unknown_id_exits_2(self, home, capsys):
        seeded(home)
        assert run("explain", "--profile", "demo", "zzz") == 2

    def test_explain_json_payload(self, home, capsys):
        seeded(home)
        run("filter", "--profile", "demo", str(home / "probes.tsv"))
        capsys.readouterr()
        assert run("explain", "--profile", "demo", "--json", "q3") == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["relevant"] is True
        assert payload["degree"] == "0.836"
        assert "pkw(business)" in payload["premises"]


class TestShowValidate:
    def test_show_prints_belief_table(self, home, capsys):
        seeded(home)
        capsys.readouterr()
        assert run("show", "--profile", "demo") == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "1.000\tP\tpkw(business) <-> pkw(commerce)"
        assert "0.836\t-\tpkw(business)" in out
        assert "# incons\t0.000" in out
        assert "# cut\t4" in out

    def test_show_json_snapshot(self, home, capsys):
        seeded(home)
        capsys.readouterr()
        run("show", "--profile", "demo", "--json")
        snapshot = json.loads(capsys.readouterr().out)
        assert snapshot["cut_size"] == 4
        assert snapshot["beliefs"][0]["protected"] is True

    def test_validate_clean_profile(self, home, capsys):
        seeded(home)
        capsys.readouterr()
        assert run("validate", "--profile", "demo") == 0
        assert "ok (paper mode)" in capsys.readouterr().out

    def test_validate_strict_mode_flags_contingent_top_rank(self, home, capsys):
        seeded(home)
        capsys.readouterr()
        assert run("validate", "--profile", "demo", "--mode", "strict") == 2
        assert "PER3" in capsys.readouterr().out


class TestExportImport:
    def test_round_trip_is_byte_identical(self, home, capsys):
        directory = seeded(home)
        first = (directory / "profile.tsv").read_bytes()
        assert run("export", "--profile", "demo",
                   str(home / "dump.tsv")) == 0
        assert run("import", "--profile", "copy",
                   str(home / "dump.tsv")) == 0
        assert run("export", "--profile", "copy",
                   str(home / "dump2.tsv")) == 0
        assert (home / "dump.tsv").read_bytes() == first
        assert (home / "dump2.tsv").read_bytes() == first

    def test_export_to_stdout(self, home, capsys):
        seeded(home)
        capsys.readouterr()
        assert run("export", "--profile", "demo") == 0
        assert capsys.readouterr().out.startswith("[config]\n")

    def test_import_rejects_garbage(self, home, capsys):
        (home / "junk").write_text("not a profile")
        assert run("import", "--profile", "x", str(home / "junk")) == 2


class TestUsageErrors:
    def test_unknown_subcommand_exits_1(self, home):
        with pytest.raises(SystemExit) as excinfo:
            run("frobnicate")
        assert excinfo.value.code == 1

    def test_missing_argument_exits_1(self, home):
        with pytest.raises(SystemExit) as excinfo:
            run("learn", "--profile", "demo")
        assert excinfo.value.code == 1

    def test_bad_listen_spec_exits_2(self, home):
        assert run("serve", "--listen", "nocolon") == 2
