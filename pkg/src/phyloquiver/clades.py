"""Clade sub-quivers, regular vertices, and clade-internal heights.

The clade of a vertex A is the sub-quiver induced on the descendants of A.
Its primitive vertices are precisely the host vertices isotypic to A, so
every clade member has a finite clade-internal height h_A. For a regular
apex in a phylogenetic quiver, h_A is given by a closed formula in terms
of the host heights and the parental map; :func:`clade_height` implements
the formula and the direct in-clade computation is kept available as an
independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import analysis, esequence
from .errors import InputError
from .quiver import Quiver, descendants, induced_subquiver


@dataclass(frozen=True)
class Clade:
    """Induced sub-quiver on the descendants of ``apex``; vertex ids are
    shared with the host quiver."""

    host: Quiver
    apex: str
    quiver: Quiver

    @property
    def members(self) -> tuple[str, ...]:
        return self.quiver.vertices

    def heights(self) -> dict[str, int]:
        """Clade-internal heights h_A, computed inside the sub-quiver."""
        return analysis.heights(self.quiver)


def clade(quiver: Quiver, apex: str) -> Clade:
    quiver.check_vertex(apex)
    return Clade(quiver, apex, induced_subquiver(quiver, descendants(quiver, apex)))


def is_regular(quiver: Quiver, apex: str) -> bool:
    """True when every descendant of ``apex`` of equal height has a direct
    edge to ``apex``. The apex itself is exempt: its zero-length chain needs
    no loop."""
    quiver.check_vertex(apex)
    h = analysis.heights(quiver)
    target = h[apex]
    for b in descendants(quiver, apex):
        if b != apex and h[b] == target and not quiver.has_edge(b, apex):
            return False
    return True


def clade_height(quiver: Quiver, apex: str, b: str) -> int:
    """Height of ``b`` inside the clade of ``apex`` via the parental-map
    formula: n - m when the (n-m)-fold parent of [b] is [apex], n - m + 1
    otherwise, where m, n are the host heights of apex and b.

    Requires a phylogenetic host and a regular apex (the second branch of
    the formula is unjustified otherwise); compute heights directly in
    ``clade(quiver, apex).quiver`` for irregular apexes.
    """
    quiver.check_vertex(apex)
    quiver.check_vertex(b)
    if not analysis.is_phylogenetic_quiver(quiver):
        raise InputError("clade_height requires a phylogenetic quiver")
    if b not in descendants(quiver, apex):
        raise InputError(f"{b!r} is not a descendant of {apex!r}")
    if not is_regular(quiver, apex):
        raise InputError(
            f"{apex!r} is not regular; compute heights directly in the clade"
        )
    h = analysis.heights(quiver)
    m, n = h[apex], h[b]
    seq = esequence.evolutionary_sequence(quiver)
    cls = esequence.class_label(quiver, b)
    for _ in range(n - m):
        cls = seq.parent[cls]
    if cls == esequence.class_label(quiver, apex):
        return n - m
    return n - m + 1


def clade_report(quiver: Quiver, apex: str) -> dict:
    """JSON-ready clade summary: apex, members, h_A table, regular flag."""
    c = clade(quiver, apex)
    return {
        "apex": apex,
        "members": sorted(c.members),
        "regular": is_regular(quiver, apex),
        "clade_heights": c.heights(),
    }
