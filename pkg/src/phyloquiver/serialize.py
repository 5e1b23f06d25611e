"""File formats: quiver JSON/DOT, E-sequence JSON, distance-matrix CSV,
forest DOT/Newick, and JSON-ready report objects.

Serialization is deterministic: keys are sorted, set-like collections are
sorted by label, and rationals are written as exact strings ("7/2", "3").
"""

from __future__ import annotations

import csv
import io
import json
import re
from fractions import Fraction

from .analysis import AnalysisReport
from .errors import InputError
from .esequence import ESequence, Forest, PrecRelation
from .metric import FiniteMetricSpace, Tower, to_fraction
from .quiver import Evolution, Quiver


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def loads(text: str, source: str = "<input>") -> object:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def fraction_str(value: Fraction) -> str:
    value = to_fraction(value)
    return str(value.numerator) if value.denominator == 1 else str(value)


# -- quivers -----------------------------------------------------------------


def quiver_to_obj(quiver: Quiver) -> dict:
    obj: dict = {
        "vertices": list(quiver.vertices),
        "edges": [[t, h] for t, h in quiver.edges],
    }
    if quiver.labels:
        obj["labels"] = dict(quiver.labels)
    return obj


def quiver_from_obj(obj, source: str = "<input>") -> Quiver:
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise InputError(f"{source}: quiver JSON needs 'vertices' and 'edges'")
    edges = []
    for e in obj["edges"]:
        if not isinstance(e, (list, tuple)) or len(e) != 2:
            raise InputError(f"{source}: each edge must be a [tail, head] pair")
        edges.append((str(e[0]), str(e[1])))
    labels = obj.get("labels") or {}
    return Quiver.build([str(v) for v in obj["vertices"]], edges, labels)


_DOT_EDGE = re.compile(
    r'("(?:[^"\\]|\\.)*"|[\w.]+)\s*->\s*("(?:[^"\\]|\\.)*"|[\w.]+)'
)
_DOT_NODE = re.compile(r'^\s*("(?:[^"\\]|\\.)*"|[\w.]+)\s*(\[[^\]]*\])?\s*;?\s*$')


def _dot_name(token: str) -> str:
    if token.startswith('"'):
        return token[1:-1].replace('\\"', '"')
    return token


def quiver_from_dot(text: str, source: str = "<input>") -> Quiver:
    """Read a DOT digraph; every ``a -> b`` is an edge with tail a, head b.
    Attributes are ignored. Chains ``a -> b -> c`` contribute each hop."""
    if "digraph" not in text:
        raise InputError(f"{source}: expected a DOT digraph")
    body_match = re.search(r"\{(.*)\}", text, re.S)
    if not body_match:
        raise InputError(f"{source}: no digraph body found")
    vertices: list[str] = []
    seen: set[str] = set()
    edges: list[tuple[str, str]] = []

    def note(v: str) -> None:
        if v not in seen:
            seen.add(v)
            vertices.append(v)

    for raw_line in body_match.group(1).splitlines():
        line = raw_line.split("//")[0].strip()
        if not line or line.startswith(("graph", "node", "edge", "#")):
            continue
        for stmt in line.split(";"):
            stmt = stmt.strip()
            if not stmt:
                continue
            if "->" in stmt:
                tokens = re.split(r"->", re.sub(r"\[[^\]]*\]", "", stmt))
                names = [_dot_name(t.strip()) for t in tokens]
                if any(not name for name in names):
                    raise InputError(f"{source}: malformed edge statement {stmt!r}")
                for a, b in zip(names, names[1:]):
                    note(a)
                    note(b)
                    edges.append((a, b))
            else:
                m = _DOT_NODE.match(stmt)
                if m:
                    note(_dot_name(m.group(1)))
    if not vertices:
        raise InputError(f"{source}: digraph declares no vertices")
    return Quiver.build(vertices, edges)


def _dot_quote(name: str) -> str:
    if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*|\d+", name):
        return name
    return '"' + name.replace('"', '\\"') + '"'


def quiver_to_dot(quiver: Quiver) -> str:
    lines = ["digraph {"]
    for v in quiver.vertices:
        lines.append(f"  {_dot_quote(v)};")
    for t, h in quiver.edges:
        lines.append(f"  {_dot_quote(t)} -> {_dot_quote(h)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- E-sequences --------------------------------------------------------------


def esequence_to_obj(seq: ESequence) -> dict:
    return {
        "levels": [list(level) for level in seq.levels],
        "parent": dict(seq.parent),
        "order": sorted([x, y] for x, y in seq.order),
    }


def esequence_from_obj(obj, source: str = "<input>") -> ESequence:
    if not isinstance(obj, dict) or "levels" not in obj or "parent" not in obj:
        raise InputError(f"{source}: E-sequence JSON needs 'levels' and 'parent'")
    order = [(str(x), str(y)) for x, y in obj.get("order", [])]
    return ESequence.build(
        [[str(x) for x in level] for level in obj["levels"]],
        {str(k): str(v) for k, v in obj["parent"].items()},
        order,
    )


def prec_from_text(text: str) -> PrecRelation:
    """Pairs, one per line, separated by whitespace or a comma; '#' starts
    a comment. The literal 'empty' (or an empty file) is the empty
    relation."""
    pairs: list[tuple[str, str]] = []
    stripped = text.strip()
    if stripped.lower() == "empty":
        return PrecRelation.build(())
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        parts = [p for p in re.split(r"[,\s]+", line) if p]
        if len(parts) != 2:
            raise InputError(f"prec file line {ln}: expected two labels, got {raw!r}")
        pairs.append((parts[0], parts[1]))
    return PrecRelation.build(pairs)


# -- metric spaces ------------------------------------------------------------


def space_to_csv(space: FiniteMetricSpace) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(space.points)
    for row in space.rows:
        writer.writerow([fraction_str(v) for v in row])
    return buf.getvalue()


def matrix_from_csv(text: str, source: str = "<input>"):
    """Parse a labeled distance matrix: a header row of point labels, then
    one row of entries per point. Returns (labels, rows of Fractions)."""
    reader = list(csv.reader(io.StringIO(text)))
    reader = [row for row in reader if any(cell.strip() for cell in row)]
    if not reader:
        raise InputError(f"{source}: empty matrix file")
    labels = [cell.strip() for cell in reader[0]]
    rows: list[list[Fraction]] = []
    if len(reader) != len(labels) + 1:
        raise InputError(
            f"{source}: expected {len(labels)} data rows after the header, "
            f"got {len(reader) - 1}"
        )
    for r, row in enumerate(reader[1:], start=2):
        if len(row) != len(labels):
            raise InputError(
                f"{source}:{r}: expected {len(labels)} entries, got {len(row)}"
            )
        parsed = []
        for c, cell in enumerate(row, start=1):
            try:
                parsed.append(to_fraction(cell))
            except InputError as exc:
                raise InputError(f"{source}:{r}:{c}: {exc}") from None
        rows.append(parsed)
    return labels, rows


def space_from_csv(text: str, source: str = "<input>") -> FiniteMetricSpace:
    labels, rows = matrix_from_csv(text, source)
    return FiniteMetricSpace.build(labels, rows)


def space_to_obj(space: FiniteMetricSpace) -> dict:
    return {
        "points": list(space.points),
        "matrix": [[fraction_str(v) for v in row] for row in space.rows],
    }


def tower_to_obj(tower: Tower, kind: str) -> dict:
    return {
        "kind": kind,
        "length": len(tower),
        "spaces": [space_to_obj(s) for s in tower.spaces],
        "maps": [dict(sorted(m.mapping.items())) for m in tower.maps],
    }


# -- forests -------------------------------------------------------------------


def forest_to_obj(forest: Forest) -> dict:
    return {
        "levels": [list(level) for level in forest.levels],
        "parent": dict(forest.parent),
        "roots": list(forest.roots),
    }


def forest_to_dot(forest: Forest) -> str:
    lines = ["digraph {"]
    for x in forest.labels():
        lines.append(f"  {_dot_quote(x)};")
    for child in forest.labels():
        if child in forest.parent:
            lines.append(
                f"  {_dot_quote(child)} -> {_dot_quote(forest.parent[child])};"
            )
    lines.append("}")
    return "\n".join(lines) + "\n"


_NEWICK_UNSAFE = re.compile(r"[\s(),:;\[\]']")


def _newick_name(label: str) -> str:
    if _NEWICK_UNSAFE.search(label):
        return "'" + label.replace("'", "''") + "'"
    return label


def forest_to_newick(forest: Forest) -> str:
    """Newick form of a single-rooted forest; every parent edge carries
    branch length 1 (heights are hop counts)."""
    if len(forest.roots) != 1:
        raise InputError("Newick export needs a single root")

    def render(x: str) -> str:
        kids = forest.children(x)
        inner = "(" + ",".join(render(c) + ":1" for c in kids) + ")" if kids else ""
        return inner + _newick_name(x)

    return render(forest.roots[0]) + ";\n"


# -- reports -------------------------------------------------------------------


def report_to_obj(report: AnalysisReport) -> dict:
    return {
        "quiver": {
            "monotonous": report.monotonous,
            "phylogenetic_quiver": report.phylogenetic_quiver,
            "isotypy_class_count": report.isotypy_class_count,
        },
        "vertices": [
            {
                "id": row.vertex,
                "height": row.height,
                "primitive": row.primitive,
                "normal": row.normal,
                "phylogenetic": row.phylogenetic,
            }
            for row in report.vertices
        ],
    }


def evolution_to_obj(evo: Evolution) -> dict:
    return {"vertices": list(evo.vertices), "length": evo.length}


def read_quiver_file(path: str) -> Quiver:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".dot") or path.endswith(".gv"):
        return quiver_from_dot(text, source=path)
    return quiver_from_obj(loads(text, source=path), source=path)
