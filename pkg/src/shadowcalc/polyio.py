"""The shadow/1 line-based text format.

Grammar (one directive per line, tokens separated by whitespace; blank
lines and ``#`` comments ignored)::

    shadow/1
    vertex <id> <end> <end> <end> <end>
    node   <id> <end>...
    edge   <id> interval|circle [color i|e|f]
    region <id> or|nor <genus> gleam <2g>|none circuits <circuit>*

An ``<end>`` is ``<edge>.<0|1>``.  A ``<circuit>`` is one whitespace-free
token of concatenated passes ``(<edge>,<wing>,<+|->)``; the region's
circuits are listed in order after the ``circuits`` keyword (none for a
closed surface region).  Gleams are written as twice their value.  The
parser is strict: unknown directives are rejected.
"""

from __future__ import annotations

import re
from typing import List

from .halfint import HalfInt
from .poly import BNode, Edge, Pass, Region, Shadow, ShadowError

HEADER = "shadow/1"
_PASS_RE = re.compile(r"\(([^(),\s]+),(\d+),([+-])\)")


class FormatError(ShadowError):
    """Raised on malformed shadow/1 input."""


def parse_shadow(text: str) -> Shadow:
    lines = _content_lines(text)
    if not lines or lines[0] != HEADER:
        raise FormatError(f"missing {HEADER} header")
    sh = Shadow()
    for lineno, line in lines[1:]:
        tokens = line.split()
        kind = tokens[0]
        try:
            if kind == "vertex":
                _parse_vertex(sh, tokens)
            elif kind == "node":
                _parse_node(sh, tokens)
            elif kind == "edge":
                _parse_edge(sh, tokens)
            elif kind == "region":
                _parse_region(sh, tokens)
            else:
                raise FormatError(f"unknown directive {kind!r}")
        except FormatError as exc:
            raise FormatError(f"line {lineno}: {exc}") from None
    return sh


def _content_lines(text: str):
    out = []
    first = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if first is None:
            first = line
            out.append(line)
        else:
            out.append((lineno, line))
    if first is None:
        return []
    return [first] + out[1:]


def _parse_end(tok: str):
    if "." not in tok:
        raise FormatError(f"bad edge-end {tok!r} (want <edge>.<0|1>)")
    eid, end = tok.rsplit(".", 1)
    if end not in ("0", "1"):
        raise FormatError(f"bad edge-end {tok!r} (want <edge>.<0|1>)")
    return (eid, int(end))


def _parse_vertex(sh: Shadow, tokens: List[str]) -> None:
    if len(tokens) != 6:
        raise FormatError("vertex needs an id and exactly 4 edge-ends")
    vid = tokens[1]
    if vid in sh.vertices:
        raise FormatError(f"duplicate vertex {vid}")
    from .poly import Vertex
    sh.vertices[vid] = Vertex(vid, tuple(_parse_end(t) for t in tokens[2:]))


def _parse_node(sh: Shadow, tokens: List[str]) -> None:
    if len(tokens) < 3:
        raise FormatError("node needs an id and at least one edge-end")
    nid = tokens[1]
    if nid in sh.nodes:
        raise FormatError(f"duplicate node {nid}")
    sh.nodes[nid] = BNode(nid, tuple(_parse_end(t) for t in tokens[2:]))


def _parse_edge(sh: Shadow, tokens: List[str]) -> None:
    if len(tokens) not in (3, 5):
        raise FormatError("edge needs: <id> interval|circle [color i|e|f]")
    eid, kind = tokens[1], tokens[2]
    if eid in sh.edges:
        raise FormatError(f"duplicate edge {eid}")
    if kind not in ("interval", "circle"):
        raise FormatError(f"bad edge kind {kind!r}")
    color = None
    if len(tokens) == 5:
        if tokens[3] != "color" or tokens[4] not in ("i", "e", "f"):
            raise FormatError("edge color must be: color i|e|f")
        color = tokens[4]
    sh.edges[eid] = Edge(eid, kind, color)


def _parse_region(sh: Shadow, tokens: List[str]) -> None:
    if len(tokens) < 6 or tokens[4] != "gleam" or tokens[2] not in ("or", "nor"):
        raise FormatError(
            "region needs: <id> or|nor <genus> gleam <2g>|none circuits ...")
    rid = tokens[1]
    if rid in sh.regions:
        raise FormatError(f"duplicate region {rid}")
    orientable = tokens[2] == "or"
    try:
        genus = int(tokens[3])
    except ValueError:
        raise FormatError(f"bad genus {tokens[3]!r}")
    gleam = None if tokens[5] == "none" else HalfInt(int(tokens[5]))
    if len(tokens) < 7 or tokens[6] != "circuits":
        raise FormatError("region is missing the circuits keyword")
    circuits = [_parse_circuit(tok) for tok in tokens[7:]]
    sh.regions[rid] = Region(rid, orientable, genus, gleam, circuits)


def _parse_circuit(tok: str) -> List[Pass]:
    passes = []
    pos = 0
    while pos < len(tok):
        m = _PASS_RE.match(tok, pos)
        if m is None:
            raise FormatError(f"bad circuit token {tok!r}")
        passes.append(Pass(m.group(1), int(m.group(2)),
                           1 if m.group(3) == "+" else -1))
        pos = m.end()
    if not passes:
        raise FormatError(f"empty circuit token {tok!r}")
    return passes


def serialize_shadow(sh: Shadow) -> str:
    out = [HEADER]
    for vid in sorted(sh.vertices):
        v = sh.vertices[vid]
        ends = " ".join(f"{e}.{k}" for e, k in v.ends)
        out.append(f"vertex {vid} {ends}")
    for nid in sorted(sh.nodes):
        n = sh.nodes[nid]
        ends = " ".join(f"{e}.{k}" for e, k in n.ends)
        out.append(f"node {nid} {ends}")
    for eid in sorted(sh.edges):
        e = sh.edges[eid]
        color = f" color {e.color}" if e.color else ""
        out.append(f"edge {eid} {e.kind}{color}")
    for rid in sorted(sh.regions):
        r = sh.regions[rid]
        gleam = "none" if r.gleam is None else str(r.gleam.twice)
        circuits = " ".join(
            "".join(p.format() for p in circ) for circ in r.circuits)
        line = (f"region {rid} {'or' if r.orientable else 'nor'} {r.genus} "
                f"gleam {gleam} circuits")
        if circuits:
            line += " " + circuits
        out.append(line)
    return "\n".join(out) + "\n"
