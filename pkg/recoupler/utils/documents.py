"""
Text codecs for matrix files, sign-matrix files, system documents and pulse programs.

Every reader reports problems as DocumentError naming the field and the
1-based line number, and every writer's output is accepted unchanged by
the matching reader.
"""

import re
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from recoupler.core.exceptions import DocumentError, ProgramInvariantError
from recoupler.models.program import PulseProgram
from recoupler.models.sign import Purpose, SignMatrix
from recoupler.schemas.system import CouplingEntry, SystemDocument

PathLike = Union[str, Path]

_SIGN_CHARS = {"+": 1, "-": -1}
_BOUNDARY_KEY = re.compile(r"^b(\d+)$")


def _content_lines(text: str) -> Iterator[Tuple[int, str]]:
    """Yield (line number, stripped text) for non-blank, non-comment lines."""
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield number, line


def _parse_int(value: str, field: str, line: int, source: Optional[str]) -> int:
    try:
        return int(value)
    except ValueError:
        raise DocumentError(field, f"expected an integer, got '{value}'", line, source) from None


def _parse_float(value: str, field: str, line: int, source: Optional[str]) -> float:
    try:
        return float(value)
    except ValueError:
        raise DocumentError(field, f"expected a number, got '{value}'", line, source) from None


def _parse_sign_row(text: str, width: int, field: str, line: int, source: Optional[str]) -> List[int]:
    if len(text) != width:
        raise DocumentError(field, f"expected {width} entries, got {len(text)}", line, source)
    bad = sorted(set(text) - set(_SIGN_CHARS))
    if bad:
        raise DocumentError(field, f"entries must be '+' or '-', found {bad}", line, source)
    return [_SIGN_CHARS[ch] for ch in text]


def format_signs(entries: np.ndarray) -> List[str]:
    return ["".join("+" if v > 0 else "-" for v in row) for row in np.asarray(entries)]


# Hadamard matrix files

def parse_matrix_text(text: str, source: Optional[str] = None) -> np.ndarray:
    """First line n, then n rows of n characters from {+, -}."""
    lines = list(_content_lines(text))
    if not lines:
        raise DocumentError("n", "empty matrix document", None, source)
    line, value = lines[0]
    n = _parse_int(value, "n", line, source)
    if n < 1:
        raise DocumentError("n", f"order must be positive, got {n}", line, source)
    rows = lines[1:]
    if len(rows) != n:
        where = rows[n][0] if len(rows) > n else (rows[-1][0] if rows else line)
        raise DocumentError("rows", f"expected {n} rows, got {len(rows)}", where, source)
    signs = [_parse_sign_row(row, n, "rows", number, source) for number, row in rows]
    return np.array(signs, dtype=np.int8)


def read_matrix_file(path: PathLike) -> np.ndarray:
    return parse_matrix_text(Path(path).read_text(encoding="utf-8"), str(path))


def format_matrix(entries: np.ndarray) -> str:
    entries = np.asarray(entries)
    return "\n".join([str(entries.shape[0])] + format_signs(entries)) + "\n"


def write_matrix_file(path: PathLike, entries: np.ndarray) -> None:
    Path(path).write_text(format_matrix(entries), encoding="utf-8")


# Sign-matrix files

def format_sign_matrix(matrix: SignMatrix) -> str:
    lines = [f"purpose {matrix.purpose.to_token()}", f"{matrix.n} {matrix.m}"]
    lines.extend(format_signs(matrix.entries))
    return "\n".join(lines) + "\n"


def parse_sign_matrix(text: str, source: Optional[str] = None) -> SignMatrix:
    lines = list(_content_lines(text))
    if len(lines) < 2:
        raise DocumentError("purpose", "expected a purpose header and a size line", None, source)

    line, header = lines[0]
    keyword, _, token = header.partition(" ")
    if keyword != "purpose" or not token:
        raise DocumentError("purpose", "first line must be 'purpose <token>'", line, source)
    try:
        purpose = Purpose.from_token(token)
    except ValueError as exc:
        raise DocumentError("purpose", str(exc), line, source) from None

    line, size = lines[1]
    parts = size.split()
    if len(parts) != 2:
        raise DocumentError("size", "expected 'n m'", line, source)
    n, m = (_parse_int(p, "size", line, source) for p in parts)

    rows = lines[2:]
    if m == 0:
        if rows:
            raise DocumentError("rows", "a matrix with no intervals has no rows", rows[0][0], source)
        return SignMatrix(np.zeros((n, 0), dtype=np.int8), purpose)
    if len(rows) != n:
        raise DocumentError("rows", f"expected {n} rows, got {len(rows)}", line, source)
    signs = [_parse_sign_row(row, m, "rows", number, source) for number, row in rows]
    return SignMatrix(np.array(signs, dtype=np.int8), purpose)


def read_sign_matrix_file(path: PathLike) -> SignMatrix:
    return parse_sign_matrix(Path(path).read_text(encoding="utf-8"), str(path))


def write_sign_matrix_file(path: PathLike, matrix: SignMatrix) -> None:
    Path(path).write_text(format_sign_matrix(matrix), encoding="utf-8")


# System documents

def parse_system_document(text: str, source: Optional[str] = None) -> SystemDocument:
    """Parse ``key: value`` lines into a validated SystemDocument."""
    n: Optional[int] = None
    n_line: Optional[int] = None
    zeeman: Optional[List[float]] = None
    zeeman_line: Optional[int] = None
    topology: Optional[str] = None
    couplings: List[Tuple[int, CouplingEntry]] = []

    for line, content in _content_lines(text):
        key, sep, value = content.partition(":")
        key, value = key.strip(), value.strip()
        if not sep:
            raise DocumentError(key, "expected 'key: value'", line, source)
        if key == "n":
            if n is not None:
                raise DocumentError("n", "given more than once", line, source)
            n, n_line = _parse_int(value, "n", line, source), line
        elif key == "zeeman_hz":
            if zeeman is not None:
                raise DocumentError("zeeman_hz", "given more than once", line, source)
            zeeman = [_parse_float(v, "zeeman_hz", line, source) for v in value.split()]
            zeeman_line = line
        elif key == "coupling":
            parts = value.split()
            if len(parts) != 3:
                raise DocumentError("coupling", "expected 'i j g_hz'", line, source)
            i = _parse_int(parts[0], "coupling", line, source)
            j = _parse_int(parts[1], "coupling", line, source)
            g = _parse_float(parts[2], "coupling", line, source)
            try:
                couplings.append((line, CouplingEntry(i=i, j=j, g_hz=g)))
            except ValidationError as exc:
                raise DocumentError("coupling", exc.errors()[0]["msg"], line, source) from None
        elif key == "topology":
            topology = value
        else:
            raise DocumentError(key, "unknown field", line, source)

    if n is None:
        raise DocumentError("n", "missing", None, source)
    if n < 1:
        raise DocumentError("n", f"must be positive, got {n}", n_line, source)
    if zeeman is None:
        raise DocumentError("zeeman_hz", "missing", None, source)
    if len(zeeman) != n:
        raise DocumentError("zeeman_hz", f"expected {n} values, got {len(zeeman)}", zeeman_line, source)

    seen: Dict[Tuple[int, int], int] = {}
    for line, entry in couplings:
        if not (entry.i <= n and entry.j <= n):
            raise DocumentError("coupling", f"spin index outside 1..{n}", line, source)
        if entry.i == entry.j:
            raise DocumentError("coupling", "self pair", line, source)
        key = (min(entry.i, entry.j), max(entry.i, entry.j))
        if key in seen:
            raise DocumentError("coupling", f"pair {key} already given on line {seen[key]}", line, source)
        seen[key] = line

    try:
        return SystemDocument(
            n=n, zeeman_hz=zeeman, couplings=[entry for _, entry in couplings], topology=topology
        )
    except ValidationError as exc:
        error = exc.errors()[0]
        field = str(error["loc"][0]) if error["loc"] else "document"
        raise DocumentError(field, error["msg"], None, source) from None


def read_system_file(path: PathLike) -> SystemDocument:
    return parse_system_document(Path(path).read_text(encoding="utf-8"), str(path))


def format_system_document(document: SystemDocument) -> str:
    lines = [f"n: {document.n}", "zeeman_hz: " + " ".join(repr(f) for f in document.zeeman_hz)]
    lines.extend(f"coupling: {c.i} {c.j} {c.g_hz!r}" for c in document.couplings)
    if document.topology:
        lines.append(f"topology: {document.topology}")
    return "\n".join(lines) + "\n"


# Pulse programs

def format_program(program: PulseProgram) -> str:
    lines = [
        f"n: {program.n}",
        f"m: {program.m}",
        f"interval_duration_s: {program.interval_duration:.16e}",
        f"target: {program.target.to_token()}",
    ]
    for index, spins in enumerate(program.boundaries):
        body = " ".join(str(s) for s in sorted(spins))
        lines.append(f"b{index}: {body}".rstrip())
    return "\n".join(lines) + "\n"


def parse_program(text: str, source: Optional[str] = None) -> PulseProgram:
    fields: Dict[str, Tuple[int, str]] = {}
    boundaries: Dict[int, Tuple[int, str]] = {}
    for line, content in _content_lines(text):
        key, sep, value = content.partition(":")
        key, value = key.strip(), value.strip()
        if not sep:
            raise DocumentError(key, "expected 'key: value'", line, source)
        match = _BOUNDARY_KEY.match(key)
        if match:
            index = int(match.group(1))
            if index in boundaries:
                raise DocumentError(key, "given more than once", line, source)
            boundaries[index] = (line, value)
        elif key in ("n", "m", "interval_duration_s", "target"):
            if key in fields:
                raise DocumentError(key, "given more than once", line, source)
            fields[key] = (line, value)
        else:
            raise DocumentError(key, "unknown field", line, source)

    for key in ("n", "m", "interval_duration_s", "target"):
        if key not in fields:
            raise DocumentError(key, "missing", None, source)
    n = _parse_int(fields["n"][1], "n", fields["n"][0], source)
    m = _parse_int(fields["m"][1], "m", fields["m"][0], source)
    if n < 1:
        raise DocumentError("n", f"must be at least 1, got {n}", fields["n"][0], source)
    if m < 1:
        raise DocumentError("m", f"must be at least 1, got {m}", fields["m"][0], source)
    t_line, t_value = fields["interval_duration_s"]
    duration = _parse_float(t_value, "interval_duration_s", t_line, source)
    target_line, token = fields["target"]
    try:
        target = Purpose.from_token(token)
    except ValueError as exc:
        raise DocumentError("target", str(exc), target_line, source) from None

    expected = set(range(m + 1))
    if set(boundaries) != expected:
        missing = sorted(expected - set(boundaries))
        extra = sorted(set(boundaries) - expected)
        raise DocumentError(
            "boundaries", f"need b0..b{m}; missing {missing}, unexpected {extra}", None, source
        )
    spins = []
    for index in range(m + 1):
        line, value = boundaries[index]
        spins.append(frozenset(_parse_int(v, f"b{index}", line, source) for v in value.split()))

    try:
        return PulseProgram(n=n, m=m, interval_duration=duration, boundaries=tuple(spins), target=target)
    except ProgramInvariantError as exc:
        raise DocumentError("boundaries", exc.message, None, source) from None


def read_program_file(path: PathLike) -> PulseProgram:
    return parse_program(Path(path).read_text(encoding="utf-8"), str(path))


def write_program_file(path: PathLike, program: PulseProgram) -> None:
    Path(path).write_text(format_program(program), encoding="utf-8")


def render_timeline(program: PulseProgram, width: int = 5) -> str:
    """One row per spin: an X at each pulse boundary, a dashed segment per interval."""
    label = len(str(program.n))
    header = " " * (label + 3) + "".join(f" {a + 1:^{width}}" for a in range(program.m))
    rows = [header.rstrip()]
    segment = "-" * width
    for spin in range(1, program.n + 1):
        cells = []
        for index, pulsed in enumerate(program.boundaries):
            cells.append("X" if spin in pulsed else "|")
            if index < program.m:
                cells.append(segment)
        rows.append(f"{spin:>{label}} : " + "".join(cells))
    return "\n".join(rows) + "\n"
