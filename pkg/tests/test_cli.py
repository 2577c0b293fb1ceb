"""End-to-end subcommand, exit-code, and interactive-loop checks."""

import io
import json

import numpy as np
import pytest

from semvec.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, run
from semvec.embedding_store import (
    BINARY,
    TEXT_HEADER,
    VectorSpace,
    parse_embeddings,
    write_embeddings,
)
from semvec.fixtures import build_compositional_space

from fixtures_data import PRONUNCIATIONS

FIXTURE = "fixture:compositional"


def invoke(*argv, stdin_text=""):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdin=io.StringIO(stdin_text), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture()
def fixture_file(tmp_path):
    path = tmp_path / "fixture.txt"
    path.write_bytes(write_embeddings(build_compositional_space(), TEXT_HEADER))
    return str(path)


class TestAnalogyCommand:
    def test_first_line_names_snorkeler(self):
        code, out, _ = invoke(
            "analogy", "--embeddings", FIXTURE, "--a", "bear", "--b", "hiker",
            "--c", "shark", "-k", "5",
        )
        assert code == EXIT_OK
        assert "snorkeler" in out.splitlines()[0]

    def test_byte_identical_across_runs(self):
        argv = (
            "analogy", "--embeddings", FIXTURE, "--a", "seat_belt", "--b", "car",
            "--c", "life_preserver", "-k", "3",
        )
        assert invoke(*argv) == invoke(*argv)

    def test_unknown_token_is_data_error(self):
        code, _, err = invoke(
            "analogy", "--embeddings", FIXTURE, "--a", "bear", "--b", "hiker",
            "--c", "unicorn",
        )
        assert code == EXIT_DATA
        assert "unicorn" in err

    def test_bad_k_is_usage_error(self):
        code, _, _ = invoke(
            "analogy", "--embeddings", FIXTURE, "--a", "bear", "--b", "hiker",
            "--c", "shark", "-k", "0",
        )
        assert code == EXIT_USAGE

    def test_missing_embeddings_is_data_error(self, monkeypatch):
        monkeypatch.delenv("SEMVEC_EMBEDDINGS", raising=False)
        code, _, err = invoke("analogy", "--a", "a", "--b", "b", "--c", "c")
        assert code == EXIT_DATA
        assert "embeddings" in err

    def test_env_var_supplies_embeddings(self, monkeypatch):
        monkeypatch.setenv("SEMVEC_EMBEDDINGS", FIXTURE)
        code, out, _ = invoke(
            "analogy", "--a", "bear", "--b", "hiker", "--c", "shark", "-k", "1"
        )
        assert code == EXIT_OK and "snorkeler" in out

    def test_case_fold_resolves_uppercase(self):
        argv = ("analogy", "--embeddings", FIXTURE, "--a", "BEAR", "--b", "hiker",
                "--c", "shark", "-k", "1")
        assert invoke(*argv)[0] == EXIT_DATA
        code, out, _ = invoke(*argv, "--case-fold")
        assert code == EXIT_OK and "snorkeler" in out


class TestStructuredOutput:
    def test_tsv_round_trips(self):
        code, out, _ = invoke(
            "assoc", "--embeddings", FIXTURE, "france", "city", "fashion",
            "-k", "3", "--output", "tsv",
        )
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0] == "rank\ttoken\tscore"
        records = [line.split("\t") for line in lines[1:]]
        assert records[0][1] == "paris"
        for rank, (r, token, score) in enumerate(records, start=1):
            assert int(r) == rank
            assert -1.0 <= float(score) <= 1.0

    def test_jsonl_round_trips(self):
        code, out, _ = invoke(
            "analogy", "--embeddings", FIXTURE, "--a", "bear", "--b", "hiker",
            "--c", "shark", "-k", "2", "--output", "jsonl",
        )
        assert code == EXIT_OK
        records = [json.loads(line) for line in out.splitlines()]
        assert records[0]["token"] == "snorkeler"
        assert set(records[0]) == {"rank", "token", "score"}


class TestUsageErrors:
    def test_unknown_subcommand(self):
        assert invoke("frobnicate")[0] == EXIT_USAGE

    def test_missing_required_flag(self):
        assert invoke("analogy", "--embeddings", FIXTURE, "--a", "x")[0] == EXIT_USAGE

    def test_missing_file_is_data_error(self):
        code, _, _ = invoke(
            "analogy", "--embeddings", "/no/such/file", "--a", "a", "--b", "b",
            "--c", "c",
        )
        assert code == EXIT_DATA


class TestConvert:
    def test_text_binary_text_reaches_fixed_point(self, tmp_path):
        rng = np.random.default_rng(3)
        space = VectorSpace([f"w{i}" for i in range(8)], rng.standard_normal((8, 5)))
        t0 = tmp_path / "t0.txt"
        t0.write_bytes(write_embeddings(space, TEXT_HEADER))
        b1, t1 = tmp_path / "b1.bin", tmp_path / "t1.txt"
        b2, t2 = tmp_path / "b2.bin", tmp_path / "t2.txt"
        assert invoke("convert", "--in", "text", "--out", "binary",
                      "--src", str(t0), "--dst", str(b1))[0] == EXIT_OK
        assert invoke("convert", "--in", "binary", "--out", "text",
                      "--src", str(b1), "--dst", str(t1))[0] == EXIT_OK
        assert invoke("convert", "--in", "text", "--out", "binary",
                      "--src", str(t1), "--dst", str(b2))[0] == EXIT_OK
        assert invoke("convert", "--in", "binary", "--out", "text",
                      "--src", str(b2), "--dst", str(t2))[0] == EXIT_OK
        # One binary hop quantizes; after that the text form is stable.
        assert b1.read_bytes() == b2.read_bytes()
        assert t1.read_bytes() == t2.read_bytes()
        quantized = parse_embeddings(t1.read_bytes(), TEXT_HEADER)
        assert np.array_equal(
            quantized.matrix, space.matrix.astype(np.float32).astype(np.float64)
        )

    def test_text_output_to_stdout(self, fixture_file):
        code, out, _ = invoke(
            "convert", "--in", "text", "--out", "text-headerless",
            "--src", fixture_file,
        )
        assert code == EXIT_OK
        assert len(out.splitlines()) == 36

    def test_binary_to_stdout_is_usage_error(self, fixture_file):
        code, _, _ = invoke(
            "convert", "--in", "text", "--out", "binary", "--src", fixture_file
        )
        assert code == EXIT_USAGE


class TestHyperstats:
    def test_deterministic_and_parseable(self, tmp_path):
        argv = ("hyperstats", "-n", "10000", "--samples", "1000", "--seed", "7")
        first, second = invoke(*argv), invoke(*argv)
        assert first == second
        code, out, _ = first
        assert code == EXIT_OK
        values = dict(line.split("=", 1) for line in out.splitlines())
        assert values["n"] == "10000" and values["samples"] == "1000"
        assert abs(float(values["mean"]) - 5000) < 10

    def test_figure_written(self, tmp_path):
        figure = tmp_path / "distances.png"
        code, _, _ = invoke(
            "hyperstats", "-n", "2048", "--samples", "200", "--seed", "5",
            "--figure", str(figure),
        )
        assert code == EXIT_OK
        assert figure.stat().st_size > 0


class TestTrain:
    def test_end_to_end_with_config_file(self, tmp_path):
        corpus = tmp_path / "corpus.txt"
        docs = []
        for i in range(20):
            docs.append(f"x y tool{i % 3} y x tool{(i + 1) % 3}")
        corpus.write_text("\n\n".join(docs))
        config = tmp_path / "train.conf"
        config.write_text("window = 2\ndim = 4\nweighting = ppmi\n")
        out_path = tmp_path / "trained.txt"
        code, out, _ = invoke(
            "train", "--corpus", str(corpus), "--out", str(out_path),
            "--config", str(config), "--seed", "3",
        )
        assert code == EXIT_OK
        assert "vocab=5" in out and "dim=4" in out
        trained = parse_embeddings(out_path.read_bytes(), TEXT_HEADER)
        assert trained.dim == 4 and len(trained) == 5

    def test_flag_overrides_config(self, tmp_path):
        corpus = tmp_path / "corpus.txt"
        corpus.write_text("a b c d e\n\na b c d e\n")
        config = tmp_path / "train.conf"
        config.write_text("dim = 2\n")
        out_path = tmp_path / "trained.txt"
        code, out, _ = invoke(
            "train", "--corpus", str(corpus), "--out", str(out_path),
            "--config", str(config), "--dim", "3", "--window", "1",
        )
        assert code == EXIT_OK
        assert parse_embeddings(out_path.read_bytes(), TEXT_HEADER).dim == 3


class TestRetrofitAndReport:
    def test_retrofit_then_report_with_figure(self, tmp_path, fixture_file):
        lexicon = tmp_path / "lexicon.tsv"
        lexicon.write_text("predator\ttourist\t\nbear\thiker\t\nghost\tbear\t\n")
        fitted_path = tmp_path / "fitted.txt"
        code, out, err = invoke(
            "retrofit", "--embeddings", fixture_file, "--lexicon", str(lexicon),
            "--out", str(fitted_path), "--iterations", "10", "--tol", "1e-6",
        )
        assert code == EXIT_OK
        assert "dropped_nodes=1" in out
        assert "warning" in err
        figure = tmp_path / "shift.png"
        code, out, _ = invoke(
            "report", "--before", fixture_file, "--after", str(fitted_path),
            "--figure", str(figure),
        )
        assert code == EXIT_OK
        values = dict(
            line.split("=", 1) for line in out.splitlines() if "=" in line
        )
        assert int(values["degraded"]) >= 1
        table = [line for line in out.splitlines() if "\t" in line]
        assert table[0].split("\t") == ["a", "b", "c", "d", "rank_before", "rank_after"]
        assert figure.stat().st_size > 0

    def test_report_with_probe_file(self, tmp_path, fixture_file):
        probes = tmp_path / "probes.txt"
        probes.write_text("bear hiker shark snorkeler\n")
        code, out, _ = invoke(
            "report", "--before", fixture_file, "--after", fixture_file,
            "--probes", str(probes),
        )
        assert code == EXIT_OK
        assert "degraded=0" in out and "unchanged=1" in out


class TestParaphraseCommands:
    @pytest.fixture()
    def word_space(self, tmp_path):
        vocab = [
            "anthropomorphic", "automaton", "antique", "aviary", "robot",
            "knitter", "sitter", "rocking_chair", "bed", "head",
        ]
        matrix = np.array(
            [
                [1.0, 0, 0, 0, 0],
                [0, 1.0, 0, 0, 0],
                [0, 0, 1.0, 0, 0],
                [0, 0, 0, 1.0, 0],
                [0.5, 0.5, 0, 0, 0],
                [0, 0, 0.8, 0.1, 0],
                [0, 0, 0.1, 0.8, 0],
                [0, 0, 0.45, 0.45, 0],
                [0, 0, 0, 0, 1.0],
                [0.1, 0, 0, 0, 0.9],
            ]
        )
        path = tmp_path / "words.txt"
        path.write_bytes(write_embeddings(VectorSpace(vocab, matrix), TEXT_HEADER))
        return str(path)

    def test_alliterative_command(self, tmp_path, word_space):
        adjectives = tmp_path / "adj.txt"
        adjectives.write_text("anthropomorphic\nantique\n")
        nouns = tmp_path / "nouns.txt"
        nouns.write_text("automaton\naviary\n")
        code, out, _ = invoke(
            "paraphrase-allit", "robot", "--embeddings", word_space,
            "--adjectives", str(adjectives), "--nouns", str(nouns),
            "--letter", "a", "-k", "2",
        )
        assert code == EXIT_OK
        assert "anthropomorphic automaton" in out.splitlines()[0]

    def test_rhyming_command(self, tmp_path, word_space):
        words = tmp_path / "candidates.txt"
        words.write_text("knitter\nsitter\nbed\nhead\n")
        dictionary = tmp_path / "pron.dict"
        dictionary.write_text(PRONUNCIATIONS)
        code, out, _ = invoke(
            "paraphrase-rhyme", "rocking_chair", "--embeddings", word_space,
            "--words", str(words), "--dict", str(dictionary), "-k", "2",
            "--output", "tsv",
        )
        assert code == EXIT_OK
        first = out.splitlines()[1].split("\t")
        assert {first[1], first[2]} == {"knitter", "sitter"}


class TestRelationCommands:
    def test_learn_save_apply_roundtrip(self, tmp_path):
        saved = tmp_path / "causes.rel"
        code, out, _ = invoke(
            "relation-learn", "causes", "snow", "icy_roads",
            "--embeddings", FIXTURE, "--save", str(saved),
        )
        assert code == EXIT_OK and "learned causes" in out
        code, out, _ = invoke(
            "relation-apply", str(saved), "rain", "--embeddings", FIXTURE, "-k", "1"
        )
        assert code == EXIT_OK
        assert "wet_roads" in out

    def test_odd_pair_tokens_usage_error(self):
        code, _, _ = invoke(
            "relation-learn", "broken", "snow", "--embeddings", FIXTURE
        )
        assert code == EXIT_USAGE

    def test_unknown_relation_data_error(self):
        code, _, err = invoke(
            "relation-apply", "nope", "rain", "--embeddings", FIXTURE
        )
        assert code == EXIT_DATA and "nope" in err


class TestRepl:
    def test_session_flow(self):
        lines = "\n".join(
            [
                "analogy --a bear --b hiker --c shark -k 5",
                "assoc france city fashion",
                "relation-learn rc snow icy_roads",
                "relation-apply rc rain",
                "relation-learn has_location pan counter",
                "relation-learn uses counter spatula",
                "relation-chain has_location uses finger",
                "quit",
            ]
        )
        code, out, err = invoke("repl", "--embeddings", FIXTURE, stdin_text=lines + "\n")
        assert code == EXIT_OK
        blocks = out.splitlines()
        assert "snorkeler" in blocks[0]
        assert any("paris" in line and line.startswith("1.") for line in blocks)
        assert any("wet_roads" in line for line in blocks)
        assert any("knife" in line for line in blocks)

    def test_errors_do_not_end_loop(self):
        lines = "analogy --a bear --b hiker --c unicorn\nassoc woods\nquit\n"
        code, out, err = invoke("repl", "--embeddings", FIXTURE, stdin_text=lines)
        assert code == EXIT_OK
        assert "unicorn" in err
        assert "1." in out  # the follow-up query still ran

    def test_eof_exits_cleanly(self):
        code, _, _ = invoke("repl", "--embeddings", FIXTURE, stdin_text="")
        assert code == EXIT_OK
