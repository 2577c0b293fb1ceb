"""Reading, writing, and normalizing embedding sets.

Three interchange formats are supported: text with a "<count> <dim>"
header line, headerless text, and the packed binary layout in which
each record is a space-terminated token followed by little-endian
float32 components. Rows are held as float64 internally so that the
long sums performed by the reasoning layers do not drift; only the
binary format quantizes to float32 on the wire.

Tokens are raw byte sequences split on ASCII space/newline and decoded
as UTF-8; no Unicode normalization is applied, so well-formed files
round-trip bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DuplicateTokenError,
    FormatError,
    ZeroVectorError,
)

TEXT_HEADER = "text-header"
TEXT_HEADERLESS = "text-headerless"
BINARY = "binary"
FORMATS = (TEXT_HEADER, TEXT_HEADERLESS, BINARY)

EXPECT_HEADER = "expect-header"
HEADERLESS = "headerless"

RAW = "raw"
UNIT = "unit"

DEFAULT_MAX_TOKEN_BYTES = 512


@dataclass(frozen=True)
class Provenance:
    """How a concept vector was produced (token lookup, weighted sum, ...)."""

    kind: str
    detail: str = ""


@dataclass
class ConceptVector:
    """One dense vector plus a record of where it came from."""

    components: np.ndarray
    provenance: Provenance

    @property
    def dim(self) -> int:
        return int(self.components.shape[0])


class VectorSpace:
    """An ordered vocabulary with one dense row vector per token.

    Instances are immutable after construction (the matrix is marked
    read-only) and therefore safe to share across threads.
    """

    def __init__(self, vocab, matrix, norm_state: str = RAW):
        vocab = list(vocab)
        matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
        if matrix.shape[0] != len(vocab):
            raise ValueError(
                f"{len(vocab)} tokens but {matrix.shape[0]} matrix rows"
            )
        if matrix.shape[1] < 1:
            raise ValueError("vector dimension must be positive")
        if norm_state not in (RAW, UNIT):
            raise ValueError(f"unknown norm_state: {norm_state!r}")
        if not np.isfinite(matrix).all():
            raise ValueError("matrix contains non-finite components")
        rows: dict[str, int] = {}
        for i, token in enumerate(vocab):
            if token in rows:
                raise ValueError(f"duplicate token: {token!r}")
            rows[token] = i
        self.vocab = vocab
        self.matrix = matrix
        self.dim = int(matrix.shape[1])
        self.norm_state = norm_state
        self.matrix.flags.writeable = False
        self._rows = rows
        self._folded: dict[str, int] | None = None

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self._rows

    def row_index(self, token: str) -> int | None:
        return self._rows.get(token)

    def row(self, token: str) -> np.ndarray | None:
        i = self._rows.get(token)
        return None if i is None else self.matrix[i]

    def lookup(self, token: str, case_fold: bool = False) -> ConceptVector | None:
        """Exact-match lookup; returns None when the token is absent.

        With case_fold the query falls back to a casefolded map in which
        the earliest matching row wins.
        """
        i = self._rows.get(token)
        if i is None and case_fold:
            if self._folded is None:
                folded: dict[str, int] = {}
                for j, tok in enumerate(self.vocab):
                    folded.setdefault(tok.casefold(), j)
                self._folded = folded
            i = self._folded.get(token.casefold())
        if i is None:
            return None
        return ConceptVector(self.matrix[i], Provenance("token", self.vocab[i]))


def normalize(space: VectorSpace) -> VectorSpace:
    """Scale every row to unit Euclidean norm.

    Idempotent by construction: a space already marked unit is returned
    unchanged, so normalize(normalize(s)) is exactly normalize(s).
    """
    if space.norm_state == UNIT:
        return space
    norms = np.linalg.norm(space.matrix, axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ZeroVectorError(
            f"cannot normalize zero vector for token {space.vocab[int(zero[0])]!r}"
        )
    return VectorSpace(space.vocab, space.matrix / norms[:, None], UNIT)


def _parse_header(line: bytes, lineno: int) -> tuple[int, int]:
    fields = line.split(b" ")
    if len(fields) != 2:
        raise FormatError("expected header '<vocab_count> <dim>'", line=lineno)
    try:
        count, dim = int(fields[0]), int(fields[1])
    except ValueError:
        raise FormatError("header fields must be integers", line=lineno) from None
    if count < 0 or dim < 1:
        raise FormatError("header declares impossible sizes", line=lineno)
    return count, dim


def _split_lines(data: bytes) -> list[bytes]:
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    return lines


def parse_text_embeddings(data: bytes, header_policy: str) -> VectorSpace:
    """Parse "token c1 ... cd" lines into a raw-state space.

    header_policy is "expect-header" (first line "<count> <dim>") or
    "headerless" (dimension inferred from the first row). Every
    malformed construct is rejected with the offending line number.
    """
    if header_policy not in (EXPECT_HEADER, HEADERLESS):
        raise ValueError(f"unknown header policy: {header_policy!r}")
    lines = _split_lines(data)
    start = 0
    declared = None
    dim = None
    if header_policy == EXPECT_HEADER:
        if not lines:
            raise FormatError("empty input, header expected", line=1)
        declared, dim = _parse_header(lines[0], 1)
        start = 1
    elif not lines:
        raise FormatError("empty input", line=1)

    vocab: list[str] = []
    seen: dict[str, int] = {}
    rows: list[np.ndarray] = []
    for offset, raw_line in enumerate(lines[start:]):
        lineno = start + offset + 1
        if declared is not None and len(rows) == declared:
            raise FormatError(
                f"header declares {declared} rows but more follow", line=lineno
            )
        try:
            line = raw_line.decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError("line is not valid UTF-8", line=lineno) from None
        fields = line.split(" ")
        token = fields[0]
        if not token:
            raise FormatError("empty token", line=lineno)
        if dim is None:
            dim = len(fields) - 1
            if dim < 1:
                raise FormatError("first row has no components", line=lineno)
        if len(fields) - 1 != dim:
            raise FormatError(
                f"expected {dim} components, found {len(fields) - 1}", line=lineno
            )
        try:
            row = np.array([float(f) for f in fields[1:]], dtype=np.float64)
        except ValueError:
            raise FormatError("component is not a number", line=lineno) from None
        if not np.isfinite(row).all():
            raise FormatError("non-finite component", line=lineno)
        if token in seen:
            raise DuplicateTokenError(
                f"duplicate token {token!r} (first at line {seen[token]})",
                line=lineno,
            )
        seen[token] = lineno
        vocab.append(token)
        rows.append(row)

    if declared is not None and len(rows) != declared:
        raise FormatError(
            f"header declares {declared} rows, found {len(rows)}",
            line=len(lines) + 1,
        )
    if dim is None:
        raise FormatError("empty input", line=1)
    matrix = np.vstack(rows) if rows else np.zeros((0, dim))
    return VectorSpace(vocab, matrix, RAW)


def parse_binary_embeddings(
    data: bytes, max_token_bytes: int = DEFAULT_MAX_TOKEN_BYTES
) -> VectorSpace:
    """Parse the binary layout: header then (token, float32 components) records.

    Leading newlines before a token are skipped for compatibility with
    writers that terminate records with '\\n'. Widening float32 to the
    internal float64 is exact for every representable value.
    """
    nl = data.find(b"\n")
    if nl < 0:
        raise FormatError("missing header line", line=1)
    count, dim = _parse_header(data[:nl], 1)
    pos = nl + 1
    record_bytes = 4 * dim
    vocab: list[str] = []
    seen: set[str] = set()
    rows = np.zeros((count, dim), dtype=np.float64)
    for rec in range(count):
        while pos < len(data) and data[pos : pos + 1] == b"\n":
            pos += 1
        sep = data.find(b" ", pos, pos + max_token_bytes + 1)
        if sep < 0:
            if len(data) - pos > max_token_bytes:
                raise FormatError(
                    f"record {rec}: token exceeds {max_token_bytes} bytes"
                )
            raise FormatError(f"record {rec}: truncated stream in token")
        try:
            token = data[pos:sep].decode("utf-8")
        except UnicodeDecodeError:
            raise FormatError(f"record {rec}: token is not valid UTF-8") from None
        if not token:
            raise FormatError(f"record {rec}: empty token")
        chunk = data[sep + 1 : sep + 1 + record_bytes]
        if len(chunk) < record_bytes:
            raise FormatError(f"record {rec}: truncated stream in components")
        row = np.frombuffer(chunk, dtype="<f4").astype(np.float64)
        if not np.isfinite(row).all():
            raise FormatError(f"record {rec}: non-finite component")
        if token in seen:
            raise DuplicateTokenError(f"record {rec}: duplicate token {token!r}")
        seen.add(token)
        vocab.append(token)
        rows[rec] = row
        pos = sep + 1 + record_bytes
    if data[pos:].strip(b"\n"):
        raise FormatError(f"trailing bytes after {count} declared records")
    return VectorSpace(vocab, rows, RAW)


def write_embeddings(space: VectorSpace, fmt: str) -> bytes:
    """Serialize a space; text components use the shortest round-tripping decimals."""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format: {fmt!r}")
    if fmt == BINARY:
        out = [f"{len(space)} {space.dim}\n".encode("ascii")]
        quantized = space.matrix.astype("<f4")
        for i, token in enumerate(space.vocab):
            out.append(token.encode("utf-8"))
            out.append(b" ")
            out.append(quantized[i].tobytes())
        return b"".join(out)
    lines = []
    if fmt == TEXT_HEADER:
        lines.append(f"{len(space)} {space.dim}")
    for i, token in enumerate(space.vocab):
        comps = " ".join(repr(float(v)) for v in space.matrix[i])
        lines.append(f"{token} {comps}")
    return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""


def detect_format(data: bytes) -> str:
    """Best-effort format sniffing; callers may always override explicitly."""
    if not data:
        raise FormatError("empty input", line=1)
    nl = data.find(b"\n")
    first = data[: nl if nl >= 0 else len(data)]
    fields = first.split(b" ")
    headerish = False
    if len(fields) == 2:
        try:
            int(fields[0]), int(fields[1])
            headerish = True
        except ValueError:
            headerish = False
    try:
        data.decode("utf-8")
    except UnicodeDecodeError:
        if headerish:
            return BINARY
        raise FormatError("cannot detect embedding format") from None
    return TEXT_HEADER if headerish else TEXT_HEADERLESS


def parse_embeddings(data: bytes, fmt: str | None = None) -> VectorSpace:
    """Parse with an explicit format, or sniff one with detect_format."""
    if fmt is None:
        fmt = detect_format(data)
    if fmt == BINARY:
        return parse_binary_embeddings(data)
    if fmt == TEXT_HEADER:
        return parse_text_embeddings(data, EXPECT_HEADER)
    if fmt == TEXT_HEADERLESS:
        return parse_text_embeddings(data, HEADERLESS)
    raise ValueError(f"unknown format: {fmt!r}")
