"""Reading and writing complexes in the plain-text ``cplx v1`` format.

    dim 3              # degree bound d
    s 0 1 2            # one maximal simplex per line
    s 2 3

Face closure is applied on load.  The writer emits maximal simplices in
lexicographic order, so equal complexes serialize identically.
"""
from __future__ import annotations

import hashlib
import itertools
from collections import defaultdict
from pathlib import Path

from .complex import SimplicialComplex, build_complex
from .errors import ParseError

FORMAT = "cplx v1"


def parse_cplx(text: str) -> SimplicialComplex:
    degree_bound = None
    tops: list[tuple[int, ...]] = []
    seen: dict[tuple[int, ...], int] = {}
    edges: set[tuple[int, int]] = set()
    degree: dict[int, int] = defaultdict(int)
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if degree_bound is None:
            if head != "dim" or len(rest) != 1:
                raise ParseError("expected 'dim <d>' header", no, raw)
            try:
                degree_bound = int(rest[0])
            except ValueError:
                raise ParseError("degree bound must be an integer", no, raw) from None
            if degree_bound < 1:
                raise ParseError("degree bound must be positive", no, raw)
            continue
        if head != "s" or not rest:
            raise ParseError("expected 's v0 v1 ...'", no, raw)
        try:
            verts = [int(x) for x in rest]
        except ValueError:
            raise ParseError("vertex ids must be integers", no, raw) from None
        s = tuple(sorted(verts))
        if len(set(s)) != len(s) or s[0] < 0:
            raise ParseError("vertex ids must be distinct non-negative integers", no, raw)
        if s in seen:
            raise ParseError(f"simplex repeats line {seen[s]}", no, raw)
        seen[s] = no
        for e in itertools.combinations(s, 2):
            if e not in edges:
                edges.add(e)
                for v in e:
                    degree[v] += 1
                    if degree[v] > degree_bound:
                        raise ParseError(f"vertex {v} exceeds degree bound {degree_bound}", no, raw)
        tops.append(s)
    if degree_bound is None:
        raise ParseError("missing 'dim <d>' header")
    return build_complex(tops, degree_bound)


def format_cplx(K: SimplicialComplex) -> str:
    lines = [f"dim {K.degree_bound}", f"# {FORMAT}"]
    lines += ["s " + " ".join(map(str, s)) for s in K.maximal_simplices()]
    return "\n".join(lines) + "\n"


def load_complex(path) -> SimplicialComplex:
    return parse_cplx(Path(path).read_text())


def save_complex(K: SimplicialComplex, path) -> None:
    Path(path).write_text(format_cplx(K))


def digest(K: SimplicialComplex) -> str:
    """sha256 of the canonical serialized form."""
    return hashlib.sha256(format_cplx(K).encode()).hexdigest()
