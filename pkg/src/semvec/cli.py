"""Command-line interface: one-shot subcommands and an interactive loop.

Exit codes: 0 success, 1 usage error, 2 data error. Results go to
stdout, diagnostics to stderr, and identical inputs plus seed produce
byte-identical stdout. The special embeddings source
"fixture:compositional" loads the bundled hand-built space.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import shlex
import sys
from dataclasses import dataclass, field, replace
from functools import reduce
from pathlib import Path

import numpy as np

from . import algebra, cooccurrence, paraphrase
from .retrofit import parse_lexicon, parse_probes, preservation_report
from .retrofit import retrofit as run_retrofit
from .embedding_store import (
    BINARY,
    FORMATS,
    TEXT_HEADER,
    VectorSpace,
    normalize,
    parse_embeddings,
    write_embeddings,
)
from .errors import SemvecError
from .fixtures import DEFAULT_PROBES, build_compositional_space
from .hypervector import sample_pair_distances
from .similarity import Index, Neighbor, build_index

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

DEFAULT_SEED = 42
ENV_EMBEDDINGS = "SEMVEC_EMBEDDINGS"
FIXTURE_PREFIX = "fixture:"

OUTPUT_MODES = ("human", "tsv", "jsonl")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _positive_int(value: str) -> int:
    try:
        parsed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}") from None
    if parsed < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return parsed


def _common_options() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument(
        "--embeddings",
        help=f"embeddings file, or {FIXTURE_PREFIX}compositional "
        f"(default: ${ENV_EMBEDDINGS})",
    )
    common.add_argument(
        "--format", choices=FORMATS, help="override embeddings format detection"
    )
    common.add_argument(
        "--case-fold", action="store_true", help="case-insensitive token lookup"
    )
    common.add_argument(
        "--output", choices=OUTPUT_MODES, help="result layout (default human)"
    )
    common.add_argument(
        "--seed", type=int, help=f"random seed (default {DEFAULT_SEED})"
    )
    return common


def build_parser(include_repl: bool = True) -> _Parser:
    common = _common_options()
    parser = _Parser(prog="semvec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    p = sub.add_parser("train", parents=[common], help="train embeddings from a corpus")
    p.add_argument("--corpus", required=True, help="corpus directory or file")
    p.add_argument("--out", required=True, help="output embeddings path")
    p.add_argument("--out-format", choices=FORMATS, default=TEXT_HEADER)
    p.add_argument("--config", help="key=value config file (TrainConfig keys)")
    p.add_argument("--window", type=_positive_int)
    p.add_argument("--min-count", type=_positive_int)
    p.add_argument("--dim", type=_positive_int)
    p.add_argument("--weighting", choices=cooccurrence.WEIGHTINGS)
    p.add_argument("--svd-tol", type=float)

    p = sub.add_parser("analogy", parents=[common], help="solve a:b::c:?")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("-k", type=_positive_int, default=10)
    p.add_argument(
        "--exclusion",
        choices=algebra.EXCLUSION_POLICIES,
        default=algebra.EXCLUDE_INPUTS,
    )

    p = sub.add_parser(
        "assoc", parents=[common], help="neighbors of a weighted term sum"
    )
    p.add_argument("terms", nargs="+", metavar="token[:weight]")
    p.add_argument("-k", type=_positive_int, default=10)

    p = sub.add_parser(
        "concept",
        parents=[common],
        help="build a concept from positive and negative terms",
    )
    p.add_argument("positives", nargs="+", metavar="token[:weight]")
    p.add_argument("--minus", nargs="+", default=[], metavar="token[:weight]")
    p.add_argument("-k", type=_positive_int, default=10)

    p = sub.add_parser(
        "relation-learn", parents=[common], help="learn a displacement relation"
    )
    p.add_argument("name")
    p.add_argument("pair_tokens", nargs="+", metavar="source target")
    p.add_argument("--save", help="write the relation to this path")

    p = sub.add_parser(
        "relation-apply", parents=[common], help="apply a relation to a token"
    )
    p.add_argument("relation", help="session relation name or saved relation file")
    p.add_argument("source")
    p.add_argument("-k", type=_positive_int, default=10)

    p = sub.add_parser(
        "relation-chain",
        parents=[common],
        help="compose relations, then apply to the final token",
    )
    p.add_argument("items", nargs="+", metavar="relation ... source")
    p.add_argument("-k", type=_positive_int, default=10)

    p = sub.add_parser(
        "retrofit", parents=[common], help="pull the space toward a lexicon graph"
    )
    p.add_argument("--lexicon", required=True)
    p.add_argument("--iterations", type=_positive_int, default=10)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--out", required=True, help="output embeddings path")
    p.add_argument("--out-format", choices=FORMATS, default=TEXT_HEADER)

    p = sub.add_parser(
        "report",
        parents=[common],
        help="compare analogy ranks between two spaces",
    )
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--probes", help="probe file (default: bundled fixture probes)")
    p.add_argument("-k", type=_positive_int, default=None)
    p.add_argument("--figure", help="also render the rank-shift figure here")

    p = sub.add_parser(
        "paraphrase-allit",
        parents=[common],
        help="alliterative two-word paraphrases of a target",
    )
    p.add_argument("target")
    p.add_argument("--adjectives", required=True, help="word-list file")
    p.add_argument("--nouns", required=True, help="word-list file")
    p.add_argument("--letter", default="a")
    p.add_argument("-k", type=_positive_int, default=10)

    p = sub.add_parser(
        "paraphrase-rhyme",
        parents=[common],
        help="rhyming two-word paraphrases of a target",
    )
    p.add_argument("target")
    p.add_argument("--words", required=True, help="candidate word-list file")
    p.add_argument("--dict", required=True, help="pronouncing dictionary file")
    p.add_argument("-k", type=_positive_int, default=10)

    p = sub.add_parser(
        "hyperstats",
        parents=[common],
        help="hypervector distance statistics as key=value lines",
    )
    p.add_argument("-n", type=_positive_int, default=10000)
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--figure", help="also render the distance histogram here")

    p = sub.add_parser(
        "convert", parents=[common], help="convert between embedding formats"
    )
    p.add_argument(
        "--in", dest="in_format", required=True, choices=("text",) + FORMATS
    )
    p.add_argument(
        "--out", dest="out_format", required=True, choices=("text",) + FORMATS
    )
    p.add_argument("--src", help="input path (default: the --embeddings source)")
    p.add_argument("--dst", help="output path (default stdout; required for binary)")

    if include_repl:
        p = sub.add_parser(
            "repl", parents=[common], help="interactive loop over a loaded space"
        )

    return parser


@dataclass
class Session:
    """CLI state: the loaded space, its index, and learned relations."""

    embeddings: str | None = None
    fmt: str | None = None
    case_fold: bool = False
    output: str = "human"
    seed: int = DEFAULT_SEED
    relations: dict[str, algebra.RelationVector] = field(default_factory=dict)
    _space: VectorSpace | None = None
    _index: Index | None = None

    def space(self) -> VectorSpace:
        if self._space is None:
            if not self.embeddings:
                raise SemvecError(
                    f"no embeddings source (use --embeddings or ${ENV_EMBEDDINGS})"
                )
            self._space = _load_space(self.embeddings, self.fmt)
        return self._space

    def index(self) -> Index:
        if self._index is None:
            self._index = build_index(self.space())
        return self._index

    def reload(self, embeddings: str, fmt: str | None) -> None:
        self.embeddings = embeddings
        self.fmt = fmt
        self._space = None
        self._index = None


def _load_space(source: str, fmt: str | None) -> VectorSpace:
    if source.startswith(FIXTURE_PREFIX):
        name = source[len(FIXTURE_PREFIX) :]
        if name != "compositional":
            raise SemvecError(f"unknown fixture: {name!r}")
        return build_compositional_space()
    return parse_embeddings(Path(source).read_bytes(), fmt)


def _session_from_args(args) -> Session:
    return Session(
        embeddings=args.embeddings or os.environ.get(ENV_EMBEDDINGS),
        fmt=args.format,
        case_fold=args.case_fold,
        output=args.output or "human",
        seed=args.seed if args.seed is not None else DEFAULT_SEED,
    )


def _mode(session: Session, args) -> str:
    return args.output or session.output


def _seed(session: Session, args) -> int:
    return args.seed if args.seed is not None else session.seed


def _resolve_token(session: Session, token: str) -> str:
    if not session.case_fold:
        return token
    found = session.space().lookup(token, case_fold=True)
    return found.provenance.detail if found else token


def _emit_neighbors(neighbors: list[Neighbor], mode: str, out) -> None:
    if mode == "tsv":
        print("rank\ttoken\tscore", file=out)
        for i, n in enumerate(neighbors, start=1):
            print(f"{i}\t{n.token}\t{n.score!r}", file=out)
    elif mode == "jsonl":
        for i, n in enumerate(neighbors, start=1):
            print(
                json.dumps(
                    {"rank": i, "token": n.token, "score": n.score}, sort_keys=True
                ),
                file=out,
            )
    else:
        for i, n in enumerate(neighbors, start=1):
            print(f"{i}. {n.token}  {n.score:.6f}", file=out)


def _emit_candidates(candidates, mode: str, out) -> None:
    if mode == "tsv":
        print("rank\tfirst\tsecond\tscore", file=out)
        for i, c in enumerate(candidates, start=1):
            print(f"{i}\t{c.first}\t{c.second}\t{c.score!r}", file=out)
    elif mode == "jsonl":
        for i, c in enumerate(candidates, start=1):
            print(
                json.dumps(
                    {"first": c.first, "rank": i, "score": c.score, "second": c.second},
                    sort_keys=True,
                ),
                file=out,
            )
    else:
        for i, c in enumerate(candidates, start=1):
            print(f"{i}. {c.first} {c.second}  {c.score:.6f}", file=out)


def _weighted_terms(
    session: Session, items: list[str], uniform_default: bool
) -> algebra.WeightedTermSet:
    entries: list[tuple[str, float | None]] = []
    for item in items:
        token, sep, tail = item.rpartition(":")
        weight = None
        if sep:
            try:
                weight = float(tail)
            except ValueError:
                token = item
        else:
            token = item
        entries.append((_resolve_token(session, token), weight))
    fallback = 1.0 / len(entries) if uniform_default else 1.0
    return algebra.WeightedTermSet.of(
        *((t, w if w is not None else fallback) for t, w in entries)
    )


def _resolve_relation(session: Session, name: str) -> algebra.RelationVector:
    rel = session.relations.get(name)
    if rel is not None:
        return rel
    path = Path(name)
    if path.is_file():
        return algebra.parse_relation(path.read_bytes())
    raise SemvecError(
        f"unknown relation {name!r} (not learned this session, not a file)"
    )


def _handle_train(session, args, out, err):
    config = cooccurrence.TrainConfig(seed=_seed(session, args))
    if args.config:
        config = cooccurrence.read_train_config(
            Path(args.config).read_text(encoding="utf-8"), base=config
        )
    overrides = {
        "window": args.window,
        "min_count": args.min_count,
        "dim": args.dim,
        "weighting": args.weighting,
        "svd_tol": args.svd_tol,
        "seed": args.seed,
    }
    config = replace(
        config, **{k: v for k, v in overrides.items() if v is not None}
    )
    documents = cooccurrence.load_corpus(args.corpus)
    print(f"documents={len(documents)}", file=err)
    space = cooccurrence.train(documents, config)
    Path(args.out).write_bytes(write_embeddings(space, args.out_format))
    print(f"vocab={len(space)}", file=out)
    print(f"dim={space.dim}", file=out)


def _handle_analogy(session, args, out, err):
    res = algebra.analogy(
        session.index(),
        _resolve_token(session, args.a),
        _resolve_token(session, args.b),
        _resolve_token(session, args.c),
        k=args.k,
        exclusion_policy=args.exclusion,
    )
    _emit_neighbors(res, _mode(session, args), out)


def _handle_assoc(session, args, out, err):
    terms = _weighted_terms(session, args.terms, uniform_default=False)
    res = algebra.associate(session.index(), terms, k=args.k)
    _emit_neighbors(res, _mode(session, args), out)


def _handle_concept(session, args, out, err):
    positives = _weighted_terms(session, args.positives, uniform_default=True)
    negatives = (
        _weighted_terms(session, args.minus, uniform_default=True)
        if args.minus
        else None
    )
    vector = algebra.build_concept(session.space(), positives, negatives)
    exclude = set(positives.tokens())
    if negatives is not None:
        exclude |= set(negatives.tokens())
    res = session.index().nearest(vector, k=args.k, exclude=exclude)
    _emit_neighbors(res, _mode(session, args), out)


def _handle_relation_learn(session, args, out, err):
    tokens = [_resolve_token(session, t) for t in args.pair_tokens]
    if len(tokens) % 2:
        raise UsageError("relation-learn needs an even number of pair tokens")
    pairs = list(zip(tokens[0::2], tokens[1::2]))
    rel = algebra.learn_relation(session.space(), pairs, name=args.name)
    session.relations[args.name] = rel
    if args.save:
        Path(args.save).write_bytes(algebra.serialize_relation(rel))
    print(f"learned {args.name}: {len(pairs)} pair(s), dim {rel.dim}", file=out)


def _handle_relation_apply(session, args, out, err):
    rel = _resolve_relation(session, args.relation)
    res = algebra.apply_relation(
        session.index(), rel, _resolve_token(session, args.source), k=args.k
    )
    _emit_neighbors(res, _mode(session, args), out)


def _handle_relation_chain(session, args, out, err):
    if len(args.items) < 3:
        raise UsageError("relation-chain needs at least two relations and a source")
    rels = [_resolve_relation(session, name) for name in args.items[:-1]]
    composed = reduce(algebra.compose_relations, rels)
    res = algebra.apply_relation(
        session.index(), composed, _resolve_token(session, args.items[-1]), k=args.k
    )
    _emit_neighbors(res, _mode(session, args), out)


def _handle_retrofit(session, args, out, err):
    space = normalize(session.space())
    graph = parse_lexicon(Path(args.lexicon).read_bytes())
    _, dropped = graph.resolve(space)
    if dropped:
        print(f"warning: {dropped} lexicon node(s) not in the space", file=err)
    fitted = run_retrofit(space, graph, iterations=args.iterations, tol=args.tol)
    Path(args.out).write_bytes(write_embeddings(fitted, args.out_format))
    print(f"nodes={len(graph.nodes)}", file=out)
    print(f"edges={len(graph.edges)}", file=out)
    print(f"dropped_nodes={dropped}", file=out)


def _handle_report(session, args, out, err):
    before = parse_embeddings(Path(args.before).read_bytes(), args.format)
    after = parse_embeddings(Path(args.after).read_bytes(), args.format)
    if args.probes:
        probes = parse_probes(Path(args.probes).read_bytes())
    else:
        probes = list(DEFAULT_PROBES)
    rep = preservation_report(before, after, probes, k=args.k)
    for line in rep.summary_lines():
        print(line, file=out)
    for line in rep.table_lines():
        print(line, file=out)
    if args.figure:
        from . import plotting

        plotting.save_rank_shift(rep, args.figure)


def _handle_paraphrase_allit(session, args, out, err):
    adjectives = paraphrase.read_word_list(Path(args.adjectives).read_bytes())
    nouns = paraphrase.read_word_list(Path(args.nouns).read_bytes())
    cands = paraphrase.generate_alliterative(
        session.index(),
        _resolve_token(session, args.target),
        adjectives,
        nouns,
        args.letter,
        k=args.k,
    )
    _emit_candidates(cands, _mode(session, args), out)


def _handle_paraphrase_rhyme(session, args, out, err):
    words = paraphrase.read_word_list(Path(args.words).read_bytes())
    lexicon = paraphrase.parse_pronunciations(Path(args.dict).read_bytes())
    cands = paraphrase.generate_rhyming(
        session.index(),
        _resolve_token(session, args.target),
        words,
        lexicon,
        k=args.k,
    )
    _emit_candidates(cands, _mode(session, args), out)


def _handle_hyperstats(session, args, out, err):
    rng = np.random.default_rng(_seed(session, args))
    distances = sample_pair_distances(args.n, args.samples, rng)
    mean = float(distances.mean())
    std = float(distances.std(ddof=1))
    print(f"n={args.n}", file=out)
    print(f"samples={args.samples}", file=out)
    print(f"mean={mean!r}", file=out)
    print(f"std={std!r}", file=out)
    print(f"expected_mean={args.n / 2!r}", file=out)
    print(f"expected_std={float(np.sqrt(args.n) / 2)!r}", file=out)
    if args.figure:
        from . import plotting

        plotting.save_distance_histogram(distances, args.n, args.figure)


def _handle_convert(session, args, out, err):
    in_format = TEXT_HEADER if args.in_format == "text" else args.in_format
    out_format = TEXT_HEADER if args.out_format == "text" else args.out_format
    source = args.src or session.embeddings
    if not source:
        raise UsageError("convert needs --src or an --embeddings source")
    if source.startswith(FIXTURE_PREFIX):
        space = _load_space(source, None)
    else:
        space = parse_embeddings(Path(source).read_bytes(), in_format)
    data = write_embeddings(space, out_format)
    if args.dst:
        Path(args.dst).write_bytes(data)
    elif out_format == BINARY:
        raise UsageError("binary output requires --dst")
    else:
        out.write(data.decode("utf-8"))


_HANDLERS = {
    "train": _handle_train,
    "analogy": _handle_analogy,
    "assoc": _handle_assoc,
    "concept": _handle_concept,
    "relation-learn": _handle_relation_learn,
    "relation-apply": _handle_relation_apply,
    "relation-chain": _handle_relation_chain,
    "retrofit": _handle_retrofit,
    "report": _handle_report,
    "paraphrase-allit": _handle_paraphrase_allit,
    "paraphrase-rhyme": _handle_paraphrase_rhyme,
    "hyperstats": _handle_hyperstats,
    "convert": _handle_convert,
}


def _apply_line_overrides(session: Session, args) -> None:
    if args.embeddings and args.embeddings != session.embeddings:
        session.reload(args.embeddings, args.format)
    if args.output:
        session.output = args.output
    if args.case_fold:
        session.case_fold = True
    if args.seed is not None:
        session.seed = args.seed


def repl(session: Session, stdin, stdout, stderr) -> int:
    """Line-oriented loop over the subcommand grammar; `quit` exits 0.

    The space loads once up front and persists, as do learned relations;
    per-line errors are reported without ending the loop.
    """
    session.index()
    parser = build_parser(include_repl=False)
    while True:
        print("> ", end="", file=stderr, flush=True)
        raw = stdin.readline()
        if not raw:
            return EXIT_OK
        line = raw.strip()
        if not line:
            continue
        if line == "quit":
            return EXIT_OK
        try:
            tokens = shlex.split(line)
        except ValueError as exc:
            print(f"parse error: {exc}", file=stderr)
            continue
        try:
            with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(
                stderr
            ):
                args = parser.parse_args(tokens)
            _apply_line_overrides(session, args)
            _HANDLERS[args.command](session, args, stdout, stderr)
        except UsageError as exc:
            print(f"usage error: {exc}", file=stderr)
        except SystemExit:
            pass
        except (SemvecError, OSError) as exc:
            print(f"error: {exc}", file=stderr)


def run(argv, stdin=None, stdout=None, stderr=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    session = _session_from_args(args)
    try:
        if args.command == "repl":
            return repl(session, stdin, stdout, stderr)
        _HANDLERS[args.command](session, args, stdout, stderr)
        return EXIT_OK
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except (SemvecError, OSError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DATA


def main() -> None:
    sys.exit(run(sys.argv[1:]))
