"""Reading finite metric spaces from a line-oriented text format.

::

    # comments start with '#'
    labels: a b c
    0
    2 0
    3 1/2^1 0
    enumeration: a _ b c a

Row ``i`` lists ``d(label_i, label_j)`` for ``j <= i`` (diagonal included) or
a full row of all distances. A strict lower triangle is also accepted: then
there are ``n - 1`` rows and the row for ``label_i`` lists ``j < i``. Entries are dyadic literals ``m/2^k`` or ``m``.
The optional ``enumeration`` line fixes the enumeration order; ``_`` marks an
index with no point and labels may repeat. Without it the labels are
enumerated in order.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Optional

from .dyadic import Dyadic
from .extend import CountableMetricSpace, MetricViolation

ABSENT = "_"


class ParseError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _tokens(text: str) -> list[tuple[int, str]]:
    """Whitespace-separated tokens with their 1-based columns."""
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", text)]


def parse_space(text: str, name: str = "") -> CountableMetricSpace:
    """Parse and validate a space; raises :class:`ParseError` or :class:`MetricViolation`."""
    labels: Optional[list[str]] = None
    rows: list[tuple[int, list[tuple[int, str]]]] = []
    enumeration: Optional[list[Optional[str]]] = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        head = line.lstrip()
        offset = len(line) - len(head)
        if head.startswith("labels:"):
            if labels is not None:
                raise ParseError(lineno, offset + 1, "duplicate labels header")
            toks = _tokens(head[len("labels:"):])
            labels = [t for _, t in toks]
            if not labels:
                raise ParseError(lineno, offset + 1, "labels header lists no labels")
            seen: set[str] = set()
            for col, t in toks:
                if t in seen or t == ABSENT:
                    raise ParseError(lineno, offset + len("labels:") + col, f"label {t!r} is repeated or reserved")
                seen.add(t)
            continue
        if labels is None:
            raise ParseError(lineno, offset + 1, "expected 'labels:' header first")
        if head.startswith("enumeration:"):
            if enumeration is not None:
                raise ParseError(lineno, offset + 1, "duplicate enumeration line")
            enumeration = []
            for col, t in _tokens(head[len("enumeration:"):]):
                if t != ABSENT and t not in labels:
                    raise ParseError(lineno, offset + len("enumeration:") + col, f"unknown label {t!r}")
                enumeration.append(None if t == ABSENT else t)
            continue
        rows.append((lineno, [(offset + col, t) for col, t in _tokens(head)]))

    if labels is None:
        raise ParseError(1, 1, "missing 'labels:' header")
    n = len(labels)
    strict = n > 1 and len(rows) == n - 1
    if len(rows) != n and not strict:
        last = rows[-1][0] if rows else 1
        raise ParseError(last, 1, f"expected {n} matrix rows, found {len(rows)}")

    given: dict[tuple[int, int], Dyadic] = {(0, 0): Dyadic(0)} if strict else {}
    for r, (lineno, toks) in enumerate(rows):
        i = r + 1 if strict else r
        allowed = (i,) if strict else (i + 1, n)
        if len(toks) not in allowed:
            expected = " or ".join(str(k) for k in dict.fromkeys(allowed))
            raise ParseError(lineno, 1, f"row for {labels[i]!r} must have {expected} entries, found {len(toks)}")
        for j, (col, t) in enumerate(toks):
            try:
                given[(i, j)] = Dyadic.parse(t)
            except ValueError:
                raise ParseError(lineno, col, f"bad dyadic literal {t!r}") from None
        if strict:
            given[(i, i)] = Dyadic(0)

    index = {label: i for i, label in enumerate(labels)}

    def dist(x: str, y: str) -> Dyadic:
        i, j = index[x], index[y]
        found = given.get((i, j))
        return found if found is not None else given[(j, i)]

    space = CountableMetricSpace(labels if enumeration is None else enumeration, dist, name=name)
    space.labels = list(labels)
    space.validate(0, extra=labels)
    return space


def load_space(path) -> CountableMetricSpace:
    path = Path(path)
    return parse_space(path.read_text(), name=path.stem)


def format_space(labels, dist, enumeration=None) -> str:
    """Render a space in the text format (diagonal-inclusive lower triangle)."""
    lines = ["labels: " + " ".join(str(x) for x in labels)]
    for i, x in enumerate(labels):
        lines.append(" ".join(str(Dyadic.of(dist(x, y))) for y in labels[: i + 1]))
    if enumeration is not None:
        lines.append("enumeration: " + " ".join(ABSENT if e is None else str(e) for e in enumeration))
    return "\n".join(lines) + "\n"


__all__ = ["ParseError", "MetricViolation", "parse_space", "load_space", "format_space", "ABSENT"]
