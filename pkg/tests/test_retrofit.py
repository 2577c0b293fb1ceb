"""Lexicon parsing, retrofit fixed points, and preservation reporting."""

import numpy as np
import pytest

from semvec.embedding_store import VectorSpace, normalize
from semvec.errors import FormatError, SemvecError
from semvec.fixtures import build_compositional_space
from semvec.retrofit import (
    LexiconGraph,
    parse_lexicon,
    parse_probes,
    preservation_report,
    retrofit,
)

TEN_LINE_LEXICON = (
    "safe\tsecure,protected\tunsafe,dangerous\n"
    "secure\tsafe\t\n"
    "calm\tpeaceful\t\n"
    "peaceful\tcalm,serene\t\n"
    "bright\tluminous\tdim\n"
    "luminous\tbright\t\n"
    "swift\tfast,quick\t\n"
    "fast\tswift\t\n"
    "quick\tswift\t\n"
    "dim\t\tbright\n"
)


class TestParseLexicon:
    def test_single_edge(self):
        graph = parse_lexicon(b"safe\tsecure\t\n")
        assert graph.edges == [("safe", "secure", 1.0)]

    def test_reversed_duplicates_collapse(self):
        graph = parse_lexicon(b"safe\tsecure\nsecure\tsafe\n")
        assert graph.edges == [("safe", "secure", 1.0)]

    def test_ten_line_fixture_matches_hand_enumeration(self):
        graph = parse_lexicon(TEN_LINE_LEXICON.encode())
        assert {(a, b) for a, b, _ in graph.edges} == {
            ("protected", "safe"),
            ("safe", "secure"),
            ("calm", "peaceful"),
            ("peaceful", "serene"),
            ("bright", "luminous"),
            ("fast", "swift"),
            ("quick", "swift"),
        }
        assert set(graph.antonyms) == {
            ("safe", "unsafe"),
            ("dangerous", "safe"),
            ("bright", "dim"),
        }
        assert len(graph.nodes) == 14

    def test_malformed_line_positioned(self):
        with pytest.raises(FormatError) as exc:
            parse_lexicon(b"ok\tfine\n a\tb\tc\td\n")
        assert "line 2" in str(exc.value)

    def test_self_loops_ignored(self):
        graph = parse_lexicon(b"loop\tloop,other\t\n")
        assert graph.edges == [("loop", "other", 1.0)]


def two_node_space():
    rng = np.random.default_rng(5)
    matrix = rng.standard_normal((4, 2))
    return normalize(VectorSpace(["i", "j", "m", "n"], matrix))


def two_node_graph():
    return LexiconGraph(nodes=["i", "j"], edges=[("i", "j", 1.0)], antonyms=[])


class TestRetrofit:
    def test_empty_edge_graph_is_fixed_point(self):
        space = two_node_space()
        graph = LexiconGraph(nodes=["i", "j"], edges=[], antonyms=[])
        fitted = retrofit(space, graph, iterations=5, tol=1e-8)
        assert np.array_equal(fitted.matrix, space.matrix)

    def test_two_node_fixed_point_matches_linear_solve(self):
        space = two_node_space()
        fitted = retrofit(space, two_node_graph(), iterations=50, tol=1e-6)
        qi_hat, qj_hat = space.matrix[0], space.matrix[1]
        # Stationarity: q_i = (q̂_i + q_j)/2 and q_j = (q̂_j + q_i)/2,
        # i.e. the block system [[2I,-I],[-I,2I]] [q_i;q_j] = [q̂_i;q̂_j].
        system = np.block(
            [[2 * np.eye(2), -np.eye(2)], [-np.eye(2), 2 * np.eye(2)]]
        )
        solved = np.linalg.solve(system, np.concatenate([qi_hat, qj_hat]))
        got = np.concatenate([fitted.matrix[0], fitted.matrix[1]])
        assert np.max(np.abs(got - solved)) < 1e-3
        residual_i = fitted.matrix[0] - (qi_hat + fitted.matrix[1]) / 2
        residual_j = fitted.matrix[1] - (qj_hat + fitted.matrix[0]) / 2
        assert np.linalg.norm(residual_i) < 1e-4
        assert np.linalg.norm(residual_j) < 1e-4

    def test_single_sweep_matches_hand_computation(self):
        space = two_node_space()
        fitted = retrofit(space, two_node_graph(), iterations=1, tol=0.0)
        qi_hat, qj_hat = space.matrix[0], space.matrix[1]
        qi_one = (qi_hat + qj_hat) / 2
        qj_one = (qj_hat + qi_one) / 2
        np.testing.assert_allclose(fitted.matrix[0], qi_one, atol=1e-15)
        np.testing.assert_allclose(fitted.matrix[1], qj_one, atol=1e-15)

    def test_zero_iterations_disallowed(self):
        with pytest.raises(ValueError):
            retrofit(two_node_space(), two_node_graph(), iterations=0)

    def test_requires_unit_space(self):
        raw = VectorSpace(["i", "j"], np.array([[2.0, 0.0], [0.0, 3.0]]))
        with pytest.raises(SemvecError):
            retrofit(raw, two_node_graph())

    def test_rows_outside_graph_bit_identical(self):
        space = two_node_space()
        fitted = retrofit(space, two_node_graph(), iterations=10, tol=1e-6)
        assert np.array_equal(fitted.matrix[2], space.matrix[2])
        assert np.array_equal(fitted.matrix[3], space.matrix[3])

    def test_movement_nonincreasing_across_sweeps(self):
        space = normalize(
            VectorSpace(
                [f"t{i}" for i in range(6)],
                np.random.default_rng(9).standard_normal((6, 4)),
            )
        )
        graph = LexiconGraph(
            nodes=[f"t{i}" for i in range(5)],
            edges=[
                ("t0", "t1", 1.0),
                ("t1", "t2", 1.0),
                ("t2", "t3", 1.0),
                ("t3", "t4", 1.0),
                ("t0", "t4", 1.0),
            ],
            antonyms=[],
        )
        iterates = [space.matrix] + [
            retrofit(space, graph, iterations=i, tol=0.0).matrix
            for i in range(1, 7)
        ]
        movements = [
            float(np.max(np.linalg.norm(b - a, axis=1)))
            for a, b in zip(iterates, iterates[1:])
        ]
        assert all(a >= b for a, b in zip(movements, movements[1:]))

    def test_unresolvable_nodes_dropped_with_count(self):
        space = two_node_space()
        graph = LexiconGraph(
            nodes=["i", "j", "ghost"],
            edges=[("i", "j", 1.0), ("ghost", "i", 1.0)],
            antonyms=[],
        )
        adjacency, dropped = graph.resolve(space)
        assert dropped == 1
        assert all(space.vocab[i] != "ghost" for i in adjacency)
        fitted = retrofit(space, graph, iterations=10, tol=1e-6)
        assert fitted.matrix.shape == space.matrix.shape


class TestPreservationReport:
    def test_identical_spaces_zero_degraded(self):
        space = build_compositional_space()
        report = preservation_report(
            space, space, [("bear", "hiker", "shark", "snorkeler")]
        )
        assert report.degraded == 0 and report.improved == 0
        assert report.unchanged == 1

    def test_rank_shift_recorded_exactly(self):
        # Duplicate alpha/beta rows make the analogy query equal gamma's
        # row, so only the candidate geometry decides ranks: the answer
        # is rank 1 before and rank 3 after by construction.
        vocab = ["alpha", "beta", "gamma", "answer", "near", "nearer"]
        before = VectorSpace(
            vocab,
            np.array(
                [
                    [1.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0],
                    [0.0, 1.0, 0.0],
                    [0.6, 0.8, 0.0],
                    [0.8, 0.6, 0.0],
                ]
            ),
        )
        after = VectorSpace(
            vocab,
            np.array(
                [
                    [1.0, 0.0, 0.0],
                    [1.0, 0.0, 0.0],
                    [0.0, 1.0, 0.0],
                    [0.9, 0.3, 0.0],
                    [0.6, 0.8, 0.0],
                    [0.3, 0.9, 0.0],
                ]
            ),
        )
        report = preservation_report(
            before, after, [("alpha", "beta", "gamma", "answer")]
        )
        probe = report.probes[0]
        assert (probe.rank_before, probe.rank_after) == (1, 3)
        assert report.degraded == 1

    def test_engineered_merge_degrades_habitat_probe(self):
        # Conflating the predator/tourist distinction (synonym edges on
        # the pair and on bear/hiker) pulls the analogy answer down.
        space = normalize(build_compositional_space())
        graph = LexiconGraph(
            nodes=["predator", "tourist", "bear", "hiker"],
            edges=[("predator", "tourist", 1.0), ("bear", "hiker", 1.0)],
            antonyms=[],
        )
        fitted = retrofit(space, graph, iterations=10, tol=1e-6)
        report = preservation_report(
            space, fitted, [("bear", "hiker", "shark", "snorkeler")]
        )
        probe = report.probes[0]
        assert probe.rank_before == 1
        assert probe.rank_after > probe.rank_before
        assert report.degraded == 1

    def test_swapping_spaces_swaps_counts(self):
        space = normalize(build_compositional_space())
        graph = parse_lexicon(b"bear\thiker\t\n")
        fitted = retrofit(space, graph, iterations=10, tol=1e-6)
        probes = [
            ("bear", "hiker", "shark", "snorkeler"),
            ("snow", "icy_roads", "rain", "wet_roads"),
        ]
        forward = preservation_report(space, fitted, probes)
        backward = preservation_report(fitted, space, probes)
        assert forward.degraded == backward.improved
        assert forward.improved == backward.degraded
        assert forward.unchanged == backward.unchanged

    def test_summary_and_table_render(self):
        space = build_compositional_space()
        report = preservation_report(
            space, space, [("bear", "hiker", "shark", "snorkeler")]
        )
        summary = report.summary_lines()
        assert "probes=1" in summary and "degraded=0" in summary
        table = report.table_lines()
        assert table[0].startswith("a\tb\tc\td")
        assert table[1].split("\t")[:4] == ["bear", "hiker", "shark", "snorkeler"]


class TestParseProbes:
    def test_comments_and_layout(self):
        data = b"# probes\nbear hiker shark snorkeler\n\nsnow icy_roads rain wet_roads # inline\n"
        assert parse_probes(data) == [
            ("bear", "hiker", "shark", "snorkeler"),
            ("snow", "icy_roads", "rain", "wet_roads"),
        ]

    def test_wrong_arity_positioned(self):
        with pytest.raises(FormatError) as exc:
            parse_probes(b"bear hiker shark\n")
        assert "line 1" in str(exc.value)
