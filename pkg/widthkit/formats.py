"""
Text formats: matrices, labeled configurations, graphs; JSON output and run manifests.

Matrix / configuration file::

    # comment
    field 3 1
    labels a b c d
    2 4
    1 0 1 1
    0 1 1 2

The field line is optional (the caller's default applies), the labels line
is optional for configurations (labels default to e0, e1, ...). Entries
are row-major; columns are the elements.

Graphs are either one graph6 string or an adjacency list::

    vertices 4
    0: 1 2
    1: 3
"""

import hashlib
import json
from pathlib import Path

import networkx as nx
from pydantic import BaseModel

from widthkit import config
from widthkit.errors import InputFormatError, WidthKitError
from widthkit.ffla import FieldSpec, Matrix
from widthkit.graph import Graph
from widthkit.matroid import Configuration

# -------------------- Tokens --------------------


def _lines(text: str) -> list[tuple[int, list[tuple[int, str]]]]:
    """Non-empty lines as (line number, [(column, token)]), comments removed."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        tokens = []
        col = 0
        for piece in line.split():
            col = line.index(piece, col)
            tokens.append((col + 1, piece))
            col += len(piece)
        if tokens:
            out.append((lineno, tokens))
    return out


def _int(token: tuple[int, str], lineno: int, source: str, what: str = "integer") -> int:
    col, text = token
    try:
        return int(text)
    except ValueError:
        raise InputFormatError(f"expected {what}, got {text!r}", lineno, col, source) from None


# -------------------- Matrices and configurations --------------------


def parse_matrix(text: str, source: str = "<input>",
                 field: FieldSpec | None = None) -> tuple[Matrix, list[str] | None]:
    """Matrix plus the optional labels line."""
    lines = _lines(text)
    field = field or FieldSpec(2)
    labels: list[str] | None = None
    labels_at = (0, 1)
    shape = None
    entries: list[int] = []
    last = 1
    for lineno, tokens in lines:
        last = lineno
        head = tokens[0][1]
        if shape is None and head == "field":
            if len(tokens) not in (2, 3):
                raise InputFormatError("field line is 'field p [m]'", lineno, tokens[0][0], source)
            p = _int(tokens[1], lineno, source, "prime")
            m = _int(tokens[2], lineno, source, "extension degree") if len(tokens) == 3 else 1
            try:
                field = FieldSpec(p, m)
            except WidthKitError as e:
                raise InputFormatError(str(e), lineno, tokens[1][0], source) from None
        elif head == "labels":
            if labels is not None:
                raise InputFormatError("labels given twice", lineno, tokens[0][0], source)
            labels = [t for _, t in tokens[1:]]
            labels_at = (lineno, tokens[0][0])
        elif shape is None:
            if len(tokens) != 2:
                raise InputFormatError("expected 'rows cols'", lineno, tokens[0][0], source)
            shape = (_int(tokens[0], lineno, source), _int(tokens[1], lineno, source))
            if min(shape) < 0:
                raise InputFormatError("negative dimension", lineno, tokens[0][0], source)
        else:
            for token in tokens:
                value = _int(token, lineno, source, "field element")
                if not 0 <= value < field.q:
                    raise InputFormatError(f"{value} is not an element of {field}", lineno, token[0], source)
                entries.append(value)
    if shape is None:
        raise InputFormatError("missing 'rows cols' line", last, 1, source)
    rows, cols = shape
    if len(entries) != rows * cols:
        raise InputFormatError(f"expected {rows * cols} entries, found {len(entries)}", last, 1, source)
    if labels is not None and len(labels) != cols:
        raise InputFormatError(f"{len(labels)} labels for {cols} columns", *labels_at, source)
    flat = [entries[r * cols:(r + 1) * cols] for r in range(rows)]
    return Matrix.from_rows(field, flat, cols), labels


def parse_configuration(text: str, source: str = "<input>", field: FieldSpec | None = None) -> Configuration:
    matrix, labels = parse_matrix(text, source, field)
    return Configuration.from_columns(matrix.field, matrix, labels)


def read_configuration(path: str | Path, field: FieldSpec | None = None) -> Configuration:
    path = Path(path)
    return parse_configuration(path.read_text(), str(path), field)


def format_configuration(a: Configuration) -> str:
    lines = [f"field {a.field.p} {a.field.m}", "labels " + " ".join(a.labels), f"{a.dim} {a.size}"]
    for r in range(a.dim):
        lines.append(" ".join(str(v[r]) for v in a.vectors))
    return "\n".join(lines) + "\n"


# -------------------- Graphs --------------------


def parse_graph6(text: str, source: str = "<input>", lineno: int = 1) -> Graph:
    try:
        return Graph.from_graph6(text)
    except (nx.NetworkXError, ValueError, IndexError) as e:
        raise InputFormatError(f"bad graph6 string: {e}", lineno, 1, source) from None


def parse_adjacency(text: str, source: str = "<input>") -> Graph:
    lines = _lines(text)
    if not lines or lines[0][1][0][1] != "vertices" or len(lines[0][1]) != 2:
        at = lines[0][0] if lines else 1
        raise InputFormatError("adjacency lists start with 'vertices n'", at, 1, source)
    n = _int(lines[0][1][1], lines[0][0], source, "vertex count")

    def vertex(token: tuple[int, str], lineno: int) -> int:
        u = _int((token[0], token[1].rstrip(":")), lineno, source, "vertex")
        if not 0 <= u < n:
            raise InputFormatError(f"vertex {u} outside 0..{n - 1}", lineno, token[0], source)
        return u

    edges = []
    for lineno, tokens in lines[1:]:
        v = vertex(tokens[0], lineno)
        for token in tokens[1:]:
            u = vertex(token, lineno)
            if u == v:
                raise InputFormatError(f"loop at vertex {v}", lineno, token[0], source)
            edges.append((v, u))
    return Graph.from_edges(n, edges)


def parse_graph(text: str, source: str = "<input>") -> Graph:
    lines = _lines(text)
    if lines and lines[0][1][0][1] == "vertices":
        return parse_adjacency(text, source)
    if len(lines) != 1 or len(lines[0][1]) != 1:
        raise InputFormatError("expected one graph6 string", lines[0][0] if lines else 1, 1, source)
    return parse_graph6(lines[0][1][0][1], source, lines[0][0])


def load_graph(arg: str) -> Graph:
    """A graph6 string, or a path to a graph6 / adjacency-list file."""
    path = Path(arg)
    if path.is_file():
        return parse_graph(path.read_text(), str(path))
    return parse_graph(arg, "<argument>")


def read_graph6_file(path: str | Path) -> list[Graph]:
    path = Path(path)
    graphs = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.strip().removeprefix(">>graph6<<")
        if line:
            graphs.append(parse_graph6(line, str(path), lineno))
    return graphs


# -------------------- Output --------------------


def dump_json(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def digest(text: str | bytes) -> str:
    raw = text.encode() if isinstance(text, str) else text
    return hashlib.sha256(raw).hexdigest()


class RunManifest(BaseModel):
    subcommand: str
    inputs: dict[str, str] = {}
    budgets: dict[str, int] = {}
    seed: int = config.SEED
    version: str = config.VERSION
