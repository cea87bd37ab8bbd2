"""Planar link diagrams, braid words, and the adjoint 2-cabling expansions.

A diagram is a PD code: every crossing stores its four incident edge
ends in counterclockwise order, with the under-strand occupying slots
0 and 2 and the over-strand slots 1 and 3.  For oriented diagrams the
under-strand always enters at slot 0, and each crossing carries a sign:

* sign +1: the over-strand enters at slot 3 (and leaves at slot 1),
* sign -1: the over-strand enters at slot 1 (and leaves at slot 3).

With both strands of a braid generator pointing downward this makes the
positive generator a writhe +1 crossing, so the closure of the word
[1, 1, 1] on two strands is the writhe +3 trefoil.

Crossingless circles ("free loops") are stored as a bare count.  PD
codes are trusted for planarity: only combinatorial well-formedness is
validated, since none of the computations needs an embedding.

Diagrams are immutable; all operations return new diagrams and are safe
to call concurrently.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product as _iter_product

from .errors import (
    OrientationMismatch,
    ParseError,
    PatternMissing,
    UnknownComponent,
    Unoriented,
    ValidationError,
)
from .rings import LaurentPoly, RatFunc


# ---------------------------------------------------------------------------
# Core data types
# ---------------------------------------------------------------------------

class LinkDiagram:
    """An immutable PD-coded diagram, optionally oriented.

    ``crossings`` is a tuple of 4-tuples of edge ids; ``signs`` is a
    parallel tuple of +-1 for oriented diagrams or None; ``free_loops``
    counts crossingless circles.
    """

    __slots__ = ("crossings", "signs", "free_loops", "_ends", "_components")

    def __init__(self, crossings, signs=None, free_loops=0, validate=True):
        self.crossings = tuple(tuple(int(e) for e in x) for x in crossings)
        self.signs = None if signs is None else tuple(int(s) for s in signs)
        self.free_loops = int(free_loops)
        self._ends = None
        self._components = None
        if validate:
            self._validate()

    def _validate(self):
        if self.free_loops < 0:
            raise ValidationError("negative free loop count")
        if self.signs is not None:
            if len(self.signs) != len(self.crossings):
                raise ValidationError("sign list length differs from crossing list")
            if any(s not in (1, -1) for s in self.signs):
                raise ValidationError("crossing signs must be +1 or -1")
        for x in self.crossings:
            if len(x) != 4:
                raise ValidationError(f"crossing {x} does not have 4 edge ends")
        counts = {}
        for x in self.crossings:
            for e in x:
                counts[e] = counts.get(e, 0) + 1
        bad = sorted(e for e, n in counts.items() if n != 2)
        if bad:
            raise ValidationError(f"edges {bad} do not have exactly two ends (dangling or overused)")
        if self.signs is not None:
            seen_in, seen_out = set(), set()
            for x, s in zip(self.crossings, self.signs):
                over_in, over_out = (3, 1) if s == 1 else (1, 3)
                for slot in (0, over_in):
                    e = x[slot]
                    if e in seen_in:
                        raise ValidationError(f"edge {e} flows into two crossing slots")
                    seen_in.add(e)
                for slot in (2, over_out):
                    e = x[slot]
                    if e in seen_out:
                        raise ValidationError(f"edge {e} flows out of two crossing slots")
                    seen_out.add(e)
            if seen_in != seen_out:
                raise ValidationError("orientation is inconsistent (an edge lacks a head or a tail)")

    @property
    def oriented(self):
        return self.signs is not None

    def ends(self):
        """Map edge -> ((crossing, slot), (crossing, slot)) in scan order."""
        if self._ends is None:
            ends = {}
            for ci, x in enumerate(self.crossings):
                for slot, e in enumerate(x):
                    ends.setdefault(e, []).append((ci, slot))
            self._ends = {e: tuple(v) for e, v in ends.items()}
        return self._ends

    def edges(self):
        return sorted(self.ends())

    def in_slots(self, ci):
        """The two incoming slots of an oriented crossing."""
        if self.signs is None:
            raise Unoriented("diagram carries no orientation")
        return (0, 3) if self.signs[ci] == 1 else (0, 1)

    def other_end(self, e, ci, slot):
        a, b = self.ends()[e]
        return b if a == (ci, slot) else a

    def edge_components(self):
        """Edge components in traversal order, sorted by smallest edge id."""
        if self._components is None:
            ends = self.ends()
            seen = set()
            comps = []
            for e0 in sorted(ends):
                if e0 in seen:
                    continue
                comp = []
                e, (ci, slot) = e0, ends[e0][0]
                while e not in seen:
                    seen.add(e)
                    comp.append(e)
                    ci, slot = self.other_end(e, ci, slot)
                    out = (slot + 2) % 4
                    e = self.crossings[ci][out]
                    slot = out
                comps.append(tuple(comp))
            self._components = comps
        return self._components

    def num_components(self):
        return len(self.edge_components()) + self.free_loops

    def key(self):
        return (self.crossings, self.signs, self.free_loops)

    def __eq__(self, other):
        return isinstance(other, LinkDiagram) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"LinkDiagram({diagram_to_text(self)!r})"


@dataclass(frozen=True)
class BraidWord:
    """A word in braid generators: indices in +-{1..strands-1}."""

    strands: int
    word: tuple

    def __post_init__(self):
        if self.strands < 1:
            raise ValidationError("braid needs at least one strand")
        object.__setattr__(self, "word", tuple(int(i) for i in self.word))
        for i in self.word:
            if i == 0 or abs(i) >= self.strands:
                raise ValidationError(f"generator index {i} out of range for {self.strands} strands")


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------

_BRAID_RE = re.compile(r"^braid:(\d+):\[([-0-9,\s]*)\]$")
_CROSSING_RE = re.compile(r"^X([+-]?)\[(\-?\d+),(\-?\d+),(\-?\d+),(\-?\d+)\]$")
_LOOPS_RE = re.compile(r"^O:(\d+)$")

DIAGRAM_JSON_FORMAT = "skeinpoly-diagram/1"
BRAID_JSON_FORMAT = "skeinpoly-braid/1"


def parse_diagram(text):
    """Parse "braid:n:[i,j,...]" into a BraidWord or a PD code into a LinkDiagram.

    PD grammar: semicolon-separated items, each either ``X[a,b,c,d]``
    (unoriented crossing), ``X+[a,b,c,d]`` / ``X-[a,b,c,d]`` (oriented,
    slot 0 = incoming under), or ``O:k`` (k crossingless circles).
    Orientation must be all-or-none across the crossings.
    """
    text = text.strip()
    m = _BRAID_RE.match(text)
    if m:
        n = int(m.group(1))
        body = m.group(2).strip()
        try:
            word = [int(t) for t in body.split(",")] if body else []
        except ValueError as exc:
            raise ParseError(f"bad braid word {body!r}") from exc
        try:
            return BraidWord(n, tuple(word))
        except ValidationError as exc:
            raise ParseError(str(exc)) from exc
    if text.startswith("braid"):
        raise ParseError("braid input must look like braid:n:[i,j,...]")
    crossings, signs, loops = [], [], 0
    has_sign = has_plain = False
    pos = 0
    for raw in text.split(";") if text else []:
        item = raw.strip()
        if item:
            m = _CROSSING_RE.match(item)
            if m:
                crossings.append(tuple(int(m.group(i)) for i in range(2, 6)))
                if m.group(1):
                    has_sign = True
                    signs.append(1 if m.group(1) == "+" else -1)
                else:
                    has_plain = True
            else:
                m = _LOOPS_RE.match(item)
                if not m:
                    raise ParseError(f"unrecognized item {item!r}", position=pos)
                loops += int(m.group(1))
        pos += len(raw) + 1
    if has_sign and has_plain:
        raise ParseError("mix of oriented X+/X- and unoriented X crossings")
    return LinkDiagram(crossings, signs if has_sign else None, loops)


def diagram_to_text(d: LinkDiagram) -> str:
    items = []
    for i, x in enumerate(d.crossings):
        tag = "" if d.signs is None else ("+" if d.signs[i] == 1 else "-")
        items.append(f"X{tag}[{x[0]},{x[1]},{x[2]},{x[3]}]")
    if d.free_loops:
        items.append(f"O:{d.free_loops}")
    return ";".join(items)


def diagram_to_json(d: LinkDiagram) -> dict:
    return {
        "format": DIAGRAM_JSON_FORMAT,
        "crossings": [
            {"edges": list(x), "sign": None if d.signs is None else d.signs[i]}
            for i, x in enumerate(d.crossings)
        ],
        "free_loops": d.free_loops,
    }


def diagram_from_json(obj):
    try:
        if obj.get("format") == BRAID_JSON_FORMAT:
            return BraidWord(int(obj["strands"]), tuple(int(i) for i in obj["word"]))
        if obj.get("format") != DIAGRAM_JSON_FORMAT:
            raise ParseError(f"unknown diagram format {obj.get('format')!r}")
        crossings = [tuple(int(e) for e in c["edges"]) for c in obj["crossings"]]
        raw_signs = [c["sign"] for c in obj["crossings"]]
        if any(s is None for s in raw_signs):
            if not all(s is None for s in raw_signs):
                raise ParseError("mixed oriented and unoriented crossings in JSON")
            signs = None
        else:
            signs = tuple(int(s) for s in raw_signs)
        return LinkDiagram(crossings, signs, int(obj.get("free_loops", 0)))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"bad diagram JSON: {exc}") from exc


def braid_to_json(b: BraidWord) -> dict:
    return {"format": BRAID_JSON_FORMAT, "strands": b.strands, "word": list(b.word)}


# ---------------------------------------------------------------------------
# Braid closure
# ---------------------------------------------------------------------------

def braid_closure(b: BraidWord) -> LinkDiagram:
    """Trace closure of a braid word, oriented all-downward.

    Strand i at the bottom reconnects to strand i at the top; untouched
    strands close into free loops.  Blackboard framing is the one implied
    by the diagram.
    """
    n = b.strands
    current = list(range(n))
    top = list(current)
    next_edge = n
    crossings, signs = [], []
    for g in b.word:
        i = abs(g) - 1
        left, right = current[i], current[i + 1]
        out_left, out_right = next_edge, next_edge + 1
        next_edge += 2
        if g > 0:
            # under: top-left -> bottom-right; over: top-right -> bottom-left
            crossings.append((left, out_left, out_right, right))
            signs.append(1)
        else:
            # under: top-right -> bottom-left; over: top-left -> bottom-right
            crossings.append((right, left, out_left, out_right))
            signs.append(-1)
        current[i], current[i + 1] = out_left, out_right
    loops = 0
    rename = {}
    for i in range(n):
        if current[i] == top[i]:
            loops += 1
        else:
            rename[current[i]] = top[i]
    out = [tuple(rename.get(e, e) for e in x) for x in crossings]
    return _relabel_dense(LinkDiagram(out, signs, loops))


def _relabel_dense(d: LinkDiagram) -> LinkDiagram:
    """Relabel edges to 0..m-1 in order of first appearance."""
    mapping = {}
    for x in d.crossings:
        for e in x:
            if e not in mapping:
                mapping[e] = len(mapping)
    return LinkDiagram([tuple(mapping[e] for e in x) for x in d.crossings],
                       d.signs, d.free_loops, validate=False)


# ---------------------------------------------------------------------------
# Writhe and linking data
# ---------------------------------------------------------------------------

def _component_index_map(d: LinkDiagram):
    comp_of = {}
    for idx, comp in enumerate(d.edge_components()):
        for e in comp:
            comp_of[e] = idx
    return comp_of


def writhe_data(d: LinkDiagram):
    """Total writhe, linking matrix, and diagonal writhe of an oriented diagram.

    linking_matrix[i][j] for i != j is half the signed count of crossings
    between components i and j; the diagonal holds self-writhes.  The
    diagonal writhe w is the trace.  Free loops contribute zero rows.
    """
    if d.signs is None:
        raise Unoriented("writhe needs an oriented diagram")
    n = d.num_components()
    comp_of = _component_index_map(d)
    half = [[0] * n for _ in range(n)]
    for ci, x in enumerate(d.crossings):
        s = d.signs[ci]
        i, j = comp_of[x[0]], comp_of[x[1]]
        half[i][j] += s
        half[j][i] += s
    matrix = []
    for i in range(n):
        row = []
        for j in range(n):
            if half[i][j] % 2:
                raise ValidationError("odd signed crossing count between two components")
            row.append(half[i][j] // 2)
        matrix.append(tuple(row))
    total = sum(d.signs)
    w = sum(matrix[i][i] for i in range(n))
    return total, tuple(matrix), w


def _flow_heads(d: LinkDiagram):
    """Edge -> head end, walking each component once (any diagram)."""
    if d.signs is not None:
        head = {}
        for ci, x in enumerate(d.crossings):
            for slot in d.in_slots(ci):
                head[x[slot]] = (ci, slot)
        return head
    ends = d.ends()
    head = {}
    for comp in d.edge_components():
        e0 = comp[0]
        e, (ci, slot) = e0, ends[e0][0]
        while e not in head:
            head[e] = (ci, slot)
            ci, slot = d.other_end(e, ci, slot)
            out = (slot + 2) % 4
            e = d.crossings[ci][out]
            slot = out
    return head


def self_writhes(d: LinkDiagram):
    """Per-component self-writhe; defined for unoriented diagrams too.

    A self-crossing's sign does not depend on traversal direction, so an
    arbitrary walk direction per component suffices.
    """
    comp_of = _component_index_map(d)
    head = _flow_heads(d)
    totals = [0] * d.num_components()
    for ci, x in enumerate(d.crossings):
        cu, co = comp_of[x[0]], comp_of[x[1]]
        if cu != co:
            continue
        under_in = 0 if head[x[0]] == (ci, 0) else 2
        over_in = 1 if head[x[1]] == (ci, 1) else 3
        totals[cu] += 1 if (over_in - under_in) % 4 == 3 else -1
    return tuple(totals)


# ---------------------------------------------------------------------------
# Elementary surgeries (shared by constructions and the skein engines)
# ---------------------------------------------------------------------------

class Surgery:
    """A mutable scratch copy of a diagram for local rewrites.

    Edge merges are tracked through an alias map, so a sequence of merges
    stays correct even when later pairs mention already-merged labels.
    """

    __slots__ = ("crossings", "signs", "free_loops", "_alias")

    def __init__(self, d: LinkDiagram):
        self.crossings = [list(x) for x in d.crossings]
        self.signs = None if d.signs is None else list(d.signs)
        self.free_loops = d.free_loops
        self._alias = {}

    def _resolve(self, e):
        while e in self._alias:
            e = self._alias[e]
        return e

    def diagram(self, validate=False):
        return LinkDiagram(self.crossings, self.signs, self.free_loops, validate=validate)

    def merge_edges(self, a, b):
        """Join edges a and b into one strand; merging an edge with itself
        closes a free loop."""
        a, b = self._resolve(a), self._resolve(b)
        if a == b:
            self.free_loops += 1
            return
        self._alias[b] = a
        for x in self.crossings:
            for i in range(4):
                if x[i] == b:
                    x[i] = a

    def drop_crossings(self, indices):
        drop = set(indices)
        self.crossings = [x for i, x in enumerate(self.crossings) if i not in drop]
        if self.signs is not None:
            self.signs = [s for i, s in enumerate(self.signs) if i not in drop]


def switched(d: LinkDiagram, ci) -> LinkDiagram:
    """Exchange over- and under-strand at one crossing."""
    a, b, c, e = d.crossings[ci]
    crossings = list(d.crossings)
    signs = None if d.signs is None else list(d.signs)
    if d.signs is None:
        crossings[ci] = (b, c, e, a)
    elif d.signs[ci] == 1:
        crossings[ci] = (e, a, b, c)
        signs[ci] = -1
    else:
        crossings[ci] = (b, c, e, a)
        signs[ci] = 1
    return LinkDiagram(crossings, signs, d.free_loops, validate=False)


def smoothed(d: LinkDiagram, ci, which) -> LinkDiagram:
    """Erase crossing ci, joining slot pairs (0,1),(2,3) ("01") or (0,3),(1,2) ("03").

    The result is unoriented (there is no canonical orientation for the
    smoothing of an unoriented crossing).
    """
    x = d.crossings[ci]
    s = Surgery(d)
    s.signs = None
    s.drop_crossings([ci])
    if which == "01":
        pairs = ((x[0], x[1]), (x[2], x[3]))
    elif which == "03":
        pairs = ((x[0], x[3]), (x[1], x[2]))
    else:
        raise ValidationError(f"unknown smoothing {which!r}")
    for a, b in pairs:
        s.merge_edges(a, b)
    return s.diagram()


def oriented_smoothed(d: LinkDiagram, ci) -> LinkDiagram:
    """The orientation-respecting smoothing of an oriented crossing."""
    if d.signs is None:
        raise Unoriented("oriented smoothing needs an oriented diagram")
    x = d.crossings[ci]
    s = Surgery(d)
    s.drop_crossings([ci])
    if d.signs[ci] == 1:
        pairs = ((x[0], x[1]), (x[3], x[2]))   # under-in joins over-out, over-in joins under-out
    else:
        pairs = ((x[0], x[3]), (x[1], x[2]))
    for a, b in pairs:
        s.merge_edges(a, b)
    return s.diagram()


def mirror(d: LinkDiagram) -> LinkDiagram:
    """Flip every crossing's over/under designation (reflect through the page)."""
    crossings = []
    signs = None if d.signs is None else []
    for i, (a, b, c, e) in enumerate(d.crossings):
        if d.signs is None:
            crossings.append((b, c, e, a))
        elif d.signs[i] == 1:
            crossings.append((e, a, b, c))
            signs.append(-1)
        else:
            crossings.append((b, c, e, a))
            signs.append(1)
    return LinkDiagram(crossings, signs, d.free_loops, validate=False)


def reverse_all(d: LinkDiagram) -> LinkDiagram:
    """Reverse the orientation of every component (crossing signs are preserved)."""
    if d.signs is None:
        return d
    return LinkDiagram([(x[2], x[3], x[0], x[1]) for x in d.crossings],
                       d.signs, d.free_loops, validate=False)


def disjoint_union(d1: LinkDiagram, d2: LinkDiagram) -> LinkDiagram:
    if (d1.signs is None) != (d2.signs is None):
        raise OrientationMismatch("cannot union an oriented with an unoriented diagram")
    shift = max([e for x in d1.crossings for e in x], default=-1) + 1
    crossings = list(d1.crossings) + [tuple(e + shift for e in x) for x in d2.crossings]
    signs = None if d1.signs is None else tuple(d1.signs) + tuple(d2.signs)
    return LinkDiagram(crossings, signs, d1.free_loops + d2.free_loops, validate=False)


def _component_edge(d: LinkDiagram, comp_index):
    comps = d.edge_components()
    n = len(comps) + d.free_loops
    if not 0 <= comp_index < n:
        raise UnknownComponent(f"component {comp_index} of {n}")
    if comp_index >= len(comps):
        return None          # a free loop
    return min(comps[comp_index])


def _edge_head_tail(d: LinkDiagram, e):
    """(tail end, head end) of an edge; orientation-aware when present."""
    p, q = d.ends()[e]
    if d.signs is None:
        return p, q
    ci, slot = p
    if slot in d.in_slots(ci):
        return q, p
    return p, q


def connected_sum(d1: LinkDiagram, c1, d2: LinkDiagram, c2) -> LinkDiagram:
    """Splice component c2 of d2 into component c1 of d1.

    Cuts the smallest edge of each chosen component and joins the four
    ends respecting orientation, so writhes add and the result has
    components(d1) + components(d2) - 1 components.
    """
    if (d1.signs is None) != (d2.signs is None):
        raise OrientationMismatch("cannot sum an oriented with an unoriented diagram")
    e1 = _component_edge(d1, c1)
    e2 = _component_edge(d2, c2)
    if e2 is None:
        trimmed = LinkDiagram(d2.crossings, d2.signs, d2.free_loops - 1, validate=False)
        return disjoint_union(d1, trimmed)
    if e1 is None:
        trimmed = LinkDiagram(d1.crossings, d1.signs, d1.free_loops - 1, validate=False)
        return disjoint_union(trimmed, d2)
    union = disjoint_union(d1, d2)
    shift = max([e for x in d1.crossings for e in x], default=-1) + 1
    e2 += shift
    tail1, head1 = _edge_head_tail(union, e1)
    tail2, head2 = _edge_head_tail(union, e2)
    fresh = max(union.edges(), default=-1) + 1
    crossings = [list(x) for x in union.crossings]
    crossings[tail1[0]][tail1[1]] = fresh       # tail1 -> head2
    crossings[head2[0]][head2[1]] = fresh
    crossings[tail2[0]][tail2[1]] = fresh + 1   # tail2 -> head1
    crossings[head1[0]][head1[1]] = fresh + 1
    return _relabel_dense(LinkDiagram(crossings, union.signs, union.free_loops))


def add_kinks(d: LinkDiagram, comp_index, k) -> LinkDiagram:
    """Insert |k| curls of sign k on one component (changing its framing by k)."""
    e = _component_edge(d, comp_index)
    if k == 0:
        return d
    count, sign = abs(k), (1 if k > 0 else -1)
    fresh = max(d.edges(), default=-1) + 1
    crossings = [list(x) for x in d.crossings]
    signs = None if d.signs is None else list(d.signs)

    def curl(m_in, m_out):
        nonlocal fresh
        loop = fresh
        fresh += 1
        if sign > 0:
            crossings.append([m_in, m_out, loop, loop])
        else:
            crossings.append([m_in, loop, loop, m_out])
        if signs is not None:
            signs.append(sign)

    loops = d.free_loops
    if e is None:
        # a free loop gains curls: build the closed chain directly
        loops -= 1
        mains = [fresh + i for i in range(count)]
        fresh += count
        for i in range(count):
            curl(mains[i], mains[(i + 1) % count])
    else:
        tail, head = _edge_head_tail(d, e)
        mains = [e] + [fresh + i for i in range(count)]
        fresh += count
        crossings[head[0]][head[1]] = mains[-1]
        for i in range(count):
            curl(mains[i], mains[i + 1])
    return _relabel_dense(LinkDiagram(crossings, signs, loops))


# ---------------------------------------------------------------------------
# Face structure (used for curl and bigon reduction by the engines)
# ---------------------------------------------------------------------------

def faces(d: LinkDiagram):
    """Orbits of the face permutation dart -> ccw-next(other end of dart).

    Monogon faces (length 1) are curls; bigon faces (length 2 on two
    distinct crossings) are candidates for parallel-strand cancellation.
    """
    out = []
    seen = set()
    for ci in range(len(d.crossings)):
        for slot in range(4):
            dart = (ci, slot)
            if dart in seen:
                continue
            face = []
            cur = dart
            while cur not in seen:
                seen.add(cur)
                face.append(cur)
                oc, oslot = d.other_end(d.crossings[cur[0]][cur[1]], *cur)
                cur = (oc, (oslot + 1) % 4)
            out.append(tuple(face))
    return out


def curl_sign(d: LinkDiagram, ci):
    """Chirality of a curl crossing, or None if ci is not a curl.

    A curl has one edge occupying two cyclically adjacent slots; the
    classes {(0,1),(2,3)} and {(1,2),(3,0)} are the two chiralities.
    """
    x = d.crossings[ci]
    for i in range(4):
        if x[i] == x[(i + 1) % 4]:
            return 1 if i in (0, 2) else -1
    return None


def strip_curl(d: LinkDiagram, ci) -> LinkDiagram:
    """Remove a curl crossing, splicing the strand through."""
    x = d.crossings[ci]
    loop_at = None
    for i in range(4):
        if x[i] == x[(i + 1) % 4]:
            loop_at = i
            break
    if loop_at is None:
        raise ValidationError(f"crossing {ci} is not a curl")
    s = Surgery(d)
    s.drop_crossings([ci])
    s.merge_edges(x[(loop_at + 2) % 4], x[(loop_at + 3) % 4])
    return s.diagram()


def bigon_reductions(d: LinkDiagram):
    """Bigon faces that a parallel-strand cancellation can remove.

    Yields (ci, i, cj, j) for faces {(ci,i),(cj,j)} where the shared
    strand runs at the same level (over both times or under both times).
    """
    found = []
    for face in faces(d):
        if len(face) != 2:
            continue
        (ci, i), (cj, j) = face
        if ci == cj:
            continue
        if (i - j) % 2 == 0:
            continue                      # clasp: one strand over, one under
        found.append((ci, i, cj, j))
    return found


def strip_bigon(d: LinkDiagram, ci, i, cj, j) -> "LinkDiagram | None":
    """Remove the two crossings of a parallel bigon; None if degenerate."""
    xi, xj = d.crossings[ci], d.crossings[cj]
    bigon_edges = {xi[i], xj[j]}
    merges = [
        (xi[(i + 2) % 4], xj[(j + 1) % 4]),   # the strand through xi[i]
        (xi[(i + 1) % 4], xj[(j + 2) % 4]),   # the strand through xj[j]
    ]
    for a, b in merges:
        if a in bigon_edges or b in bigon_edges:
            return None
    s = Surgery(d)
    s.drop_crossings([ci, cj])
    for a, b in merges:
        s.merge_edges(a, b)
    return s.diagram()


# ---------------------------------------------------------------------------
# Descending walk
# ---------------------------------------------------------------------------

def first_bad_crossing(d: LinkDiagram, rng=None):
    """Index of the first crossing first-reached on its under-strand.

    Walks the components in order of smallest edge id, each from its
    smallest edge (following the orientation when present, else a
    deterministic direction).  Returns None when the diagram is
    descending.  ``rng`` (a random.Random) shuffles component order,
    base edges, and free directions, for invariance testing.
    """
    comps = list(d.edge_components())
    if rng is not None:
        rng.shuffle(comps)
    visited = set()
    for comp in comps:
        start = min(comp) if rng is None else rng.choice(list(comp))
        e = start
        p, q = d.ends()[e]
        if d.signs is not None:
            arrival = p if p[1] in d.in_slots(p[0]) else q
        else:
            arrival = min(p, q) if rng is None or rng.random() < 0.5 else max(p, q)
        for _ in range(len(comp)):
            ci, slot = arrival
            if ci not in visited:
                if slot % 2 == 0:
                    return ci
                visited.add(ci)
            out = (slot + 2) % 4
            e = d.crossings[ci][out]
            arrival = d.other_end(e, ci, out)
    return None


# ---------------------------------------------------------------------------
# Connectivity helpers for the engines
# ---------------------------------------------------------------------------

def connected_parts(d: LinkDiagram):
    """Crossing indices grouped by connectivity through shared edges."""
    parent = list(range(len(d.crossings)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for p, q in d.ends().values():
        a, b = find(p[0]), find(q[0])
        if a != b:
            parent[a] = b
    groups = {}
    for i in range(len(d.crossings)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def subdiagram(d: LinkDiagram, crossing_indices) -> LinkDiagram:
    keep = sorted(crossing_indices)
    crossings = [d.crossings[i] for i in keep]
    signs = None if d.signs is None else [d.signs[i] for i in keep]
    return _relabel_dense(LinkDiagram(crossings, signs, 0, validate=False))


# ---------------------------------------------------------------------------
# Canonical keys for memoization
# ---------------------------------------------------------------------------

def _encode_from(d: LinkDiagram, start_ci, start_rot, oriented, best=None):
    """BFS relabeling code from one start; None when already beaten by best."""
    rotation = {start_ci: start_rot}
    queue = [start_ci]
    labels = {}
    code = []
    ends = d.ends()
    crossings = d.crossings
    signs = d.signs
    qi = 0
    while qi < len(queue):
        ci = queue[qi]
        rot = rotation[ci]
        x = crossings[ci]
        entry = []
        for k in range(4):
            slot = (rot + k) & 3
            e = x[slot]
            label = labels.get(e)
            if label is None:
                label = labels[e] = len(labels)
                a, b = ends[e]
                oc, oslot = b if a == (ci, slot) else a
                if oc not in rotation:
                    rotation[oc] = 0 if oriented else oslot - (oslot & 1)
                    queue.append(oc)
            entry.append(label)
        if oriented:
            entry.append(signs[ci])
        entry = tuple(entry)
        if best is not None:
            ref = best[qi]
            if entry > ref:
                return None
            if entry < ref:
                best = None
        code.append(entry)
        qi += 1
    return tuple(code)


def canonical_key(d: LinkDiagram):
    """A relabeling-invariant key: minimal breadth-first code.

    Minimizes over all start crossings (and both under-slot rotations
    when unoriented).  Disconnected diagrams are canonicalized per
    connected part and the sorted part codes are combined.
    """
    if not d.crossings:
        return ("loops", d.free_loops)
    parts = connected_parts(d)
    oriented = d.signs is not None
    part_codes = []
    for part in parts:
        sub = subdiagram(d, part) if len(parts) > 1 else d
        rotations = (0,) if oriented else (0, 2)
        best = None
        for ci in range(len(sub.crossings)):
            for rot in rotations:
                code = _encode_from(sub, ci, rot, oriented, best)
                if code is not None and (best is None or code < best):
                    best = code
        part_codes.append(best)
    part_codes.sort()
    return ("pd", oriented, tuple(part_codes), d.free_loops)


# ---------------------------------------------------------------------------
# The blackboard 2-cable and the two adjoint expansions
# ---------------------------------------------------------------------------

class CablePattern:
    """Per-component insertion for the 2-cable: Parallel2, Twist(k), Turnback, Delete."""

    PARALLEL = "parallel2"
    TWIST = "twist"
    TURNBACK = "turnback"
    DELETE = "delete"

    __slots__ = ("kind", "twist")

    def __init__(self, kind, twist=0):
        if kind not in (self.PARALLEL, self.TWIST, self.TURNBACK, self.DELETE):
            raise ValidationError(f"unknown pattern {kind!r}")
        if kind == self.TWIST and twist == 0:
            kind = self.PARALLEL
        self.kind = kind
        self.twist = int(twist)

    @staticmethod
    def parallel2():
        return CablePattern(CablePattern.PARALLEL)

    @staticmethod
    def twisted(k):
        return CablePattern(CablePattern.TWIST, k)

    @staticmethod
    def turnback():
        return CablePattern(CablePattern.TURNBACK)

    @staticmethod
    def delete():
        return CablePattern(CablePattern.DELETE)

    def __repr__(self):
        if self.kind == self.TWIST:
            return f"CablePattern.twisted({self.twist})"
        return f"CablePattern.{self.kind}()"


def delete_components(d: LinkDiagram, comp_indices) -> LinkDiagram:
    """Remove whole components; the remaining strands pass straight through."""
    comps = d.edge_components()
    n = len(comps) + d.free_loops
    drop_edges = set()
    drop_loops = 0
    for idx in set(comp_indices):
        if not 0 <= idx < n:
            raise UnknownComponent(f"component {idx} of {n}")
        if idx >= len(comps):
            drop_loops += 1
        else:
            drop_edges.update(comps[idx])
    s = Surgery(d)
    s.free_loops -= drop_loops
    drop = []
    for ci, x in enumerate(d.crossings):
        if x[0] in drop_edges or x[1] in drop_edges:
            drop.append(ci)
    for ci in drop:
        x = s.crossings[ci]
        if x[0] not in drop_edges:
            s.merge_edges(x[0], x[2])
        elif x[1] not in drop_edges:
            s.merge_edges(x[1], x[3])
    s.drop_crossings(drop)
    return _relabel_dense(s.diagram())


def _orient_arbitrarily(d: LinkDiagram) -> LinkDiagram:
    """Assign a deterministic orientation to an unoriented diagram."""
    if d.signs is not None:
        return d
    head = _flow_heads(d)
    crossings, signs = [], []
    for ci, x in enumerate(d.crossings):
        under_in = 0 if head[x[0]] == (ci, 0) else 2
        over_in = 1 if head[x[1]] == (ci, 1) else 3
        crossings.append(tuple(x[(under_in + k) % 4] for k in range(4)))
        signs.append(1 if (over_in - under_in) % 4 == 3 else -1)
    return LinkDiagram(crossings, signs, d.free_loops, validate=False)


class _CableBuilder:
    """New crossings whose slots are abstract ports, plus port links."""

    __slots__ = ("crossings", "links", "ports")

    def __init__(self):
        self.crossings = []
        self.links = []
        self.ports = 0

    def new_crossing(self):
        base = self.ports
        self.ports += 4
        self.crossings.append((base, base + 1, base + 2, base + 3))
        return base

    def link(self, p, q):
        self.links.append((p, q))


def cable2(d: LinkDiagram, patterns, mode="antiparallel", insertion_edges=None):
    """Blackboard 2-cable with a per-component pattern insertion.

    Every crossing among kept components becomes four crossings; each
    component's pattern is spliced in at one point (the component's
    smallest edge id, unless ``insertion_edges`` maps the component to
    another of its edges).  In antiparallel mode the second parallel copy
    is oriented against the first, which gives the pattern-free cable of
    any oriented diagram total writhe zero.  The output is oriented iff
    the input is.

    ``patterns`` maps every component index (free loops included) to a
    CablePattern.
    """
    if mode not in ("antiparallel", "parallel"):
        raise ValidationError(f"unknown cable mode {mode!r}")
    comps = d.edge_components()
    total = len(comps) + d.free_loops
    for idx in range(total):
        if idx not in patterns:
            raise PatternMissing(f"component {idx} has no cable pattern")
    deleted = [i for i in range(total) if patterns[i].kind == CablePattern.DELETE]
    if deleted:
        if insertion_edges:
            raise ValidationError("insertion_edges cannot be combined with Delete patterns")
        kept = [patterns[i] for i in range(total) if i not in deleted]
        base = delete_components(d, deleted)
        return cable2(base, dict(enumerate(kept)), mode)

    oriented_out = d.signs is not None
    work = d if oriented_out else _orient_arbitrarily(d)
    comps = work.edge_components()
    ends = work.ends()
    head = {}
    for ci, x in enumerate(work.crossings):
        for slot in work.in_slots(ci):
            head[x[slot]] = (ci, slot)

    builder = _CableBuilder()
    loops_extra = 0

    # grids: per original crossing, four sub-crossings indexed by geometric
    # (column, row); the under-strand runs upward through columns W (its
    # left, carrying copy 0) and E, the over-strand through rows
    grid = []
    for ci in range(len(work.crossings)):
        g = {(col, row): builder.new_crossing() for col in ("W", "E") for row in ("S", "N")}
        for col in ("W", "E"):
            builder.link(g[(col, "S")] + 2, g[(col, "N")] + 0)
        for row in ("S", "N"):
            builder.link(g[("W", row)] + 1, g[("E", row)] + 3)
        grid.append(g)

    def stub(ci, slot, copy):
        """Port where copy 0/1 of the edge at (ci, slot) attaches."""
        g = grid[ci]
        if slot in (0, 2):
            col = "W" if copy == 0 else "E"
            return g[(col, "S")] + 0 if slot == 0 else g[(col, "N")] + 2
        if work.signs[ci] == 1:      # over flows W -> E; its left is row N
            row = "N" if copy == 0 else "S"
        else:                        # over flows E -> W; its left is row S
            row = "S" if copy == 0 else "N"
        return g[("W", row)] + 3 if slot == 3 else g[("E", row)] + 1

    seed_fwd = []                    # ports out of which a copy-0 edge flows
    seed_alt = []                    # (tail port under mode rule) for copy-1-only strands

    def add_twist_chain(t0, t1, h0, h1, twist):
        # copy 0 is the strand's traveler-left, which is the viewer-RIGHT
        # column of a downward-drawn chain; attaching it to the viewer-left
        # ports would store a counterclockwise tuple for a mirrored picture
        # and silently build a non-planar code
        cur0, cur1 = t0, t1
        for _ in range(abs(twist)):
            base = builder.new_crossing()
            if twist > 0:
                # provisional CCW (TL, BL, BR, TR); under TL -> BR
                builder.link(cur1, base + 0)
                builder.link(cur0, base + 3)
                cur0, cur1 = base + 2, base + 1
            else:
                # provisional CCW (TR, TL, BL, BR); under TR -> BL
                builder.link(cur1, base + 1)
                builder.link(cur0, base + 0)
                cur0, cur1 = base + 3, base + 2
        builder.link(cur0, h0)
        builder.link(cur1, h1)

    for comp_idx, comp in enumerate(comps):
        pat = patterns[comp_idx]
        ins_edge = min(comp)
        if insertion_edges and comp_idx in insertion_edges:
            ins_edge = insertion_edges[comp_idx]
            if ins_edge not in comp:
                raise UnknownComponent(f"edge {ins_edge} is not on component {comp_idx}")
        for e in comp:
            p, q = ends[e]
            head_end = head[e]
            tail_end = q if head_end == p else p
            t0 = stub(*tail_end, 0)
            t1 = stub(*tail_end, 1)
            h0 = stub(*head_end, 0)
            h1 = stub(*head_end, 1)
            if e != ins_edge or pat.kind == CablePattern.PARALLEL:
                builder.link(t0, h0)
                builder.link(t1, h1)
                seed_fwd.append(t0)
                seed_alt.append(t1 if mode == "parallel" else h1)
            elif pat.kind == CablePattern.TURNBACK:
                builder.link(t0, t1)
                builder.link(h0, h1)
                seed_fwd.append(t0)
            else:
                add_twist_chain(t0, t1, h0, h1, pat.twist)
                seed_fwd.append(t0)

    # free-loop components
    for idx in range(len(comps), total):
        pat = patterns[idx]
        if pat.kind == CablePattern.PARALLEL:
            loops_extra += 2
        elif pat.kind == CablePattern.TURNBACK:
            loops_extra += 1
        else:
            first = None
            cur0 = cur1 = None
            for _ in range(abs(pat.twist)):
                base = builder.new_crossing()
                if pat.twist > 0:
                    ports_in, ports_out = (base + 0, base + 3), (base + 1, base + 2)
                else:
                    ports_in, ports_out = (base + 1, base + 0), (base + 2, base + 3)
                if first is None:
                    first = ports_in
                else:
                    builder.link(cur0, ports_in[0])
                    builder.link(cur1, ports_in[1])
                cur0, cur1 = ports_out
            builder.link(cur0, first[0])
            builder.link(cur1, first[1])
            seed_fwd.append(cur0)

    return _finish_cable(builder, seed_fwd, seed_alt, oriented_out, loops_extra)


def _finish_cable(builder, seed_fwd, seed_alt, oriented_out, loops_extra):
    """Resolve ports into edges, propagate orientation, fix slot rotations."""
    port_edge = {}
    edge_other = {}
    for eid, (a, b) in enumerate(builder.links):
        port_edge[a] = eid
        port_edge[b] = eid
        edge_other[a] = b
        edge_other[b] = a
    crossings = [tuple(port_edge[p] for p in ports) for ports in builder.crossings]
    if not oriented_out:
        return _relabel_dense(LinkDiagram(crossings, None, loops_extra, validate=False))

    port_pos = {}
    for ci, ports in enumerate(builder.crossings):
        for slot, p in enumerate(ports):
            port_pos[p] = (ci, slot)
    port_of = {port_pos[p]: p for p in port_pos}

    head_of = {}

    def walk_from(tail_port):
        hp = edge_other[tail_port]
        e = port_edge[tail_port]
        while e not in head_of:
            head_of[e] = port_pos[hp]
            ci, slot = port_pos[hp]
            out_port = port_of[(ci, (slot + 2) % 4)]
            e = port_edge[out_port]
            hp = edge_other[out_port]

    for p in seed_fwd:
        if port_edge[p] not in head_of:
            walk_from(p)
    for p in seed_alt:
        if port_edge[p] not in head_of:
            walk_from(p)

    out_crossings, out_signs = [], []
    for ci, ports in enumerate(builder.crossings):
        x = crossings[ci]
        under_in = next((s for s in (0, 2) if head_of.get(x[s]) == (ci, s)), None)
        over_in = next((s for s in (1, 3) if head_of.get(x[s]) == (ci, s)), None)
        if under_in is None or over_in is None:
            raise ValidationError("cable orientation propagation failed")
        out_crossings.append(tuple(x[(under_in + k) % 4] for k in range(4)))
        out_signs.append(1 if (over_in - under_in) % 4 == 3 else -1)
    return _relabel_dense(LinkDiagram(out_crossings, out_signs, loops_extra, validate=True))


def homfly_adjoint_expansion(d: LinkDiagram):
    """Inclusion-exclusion terms for the adjoint cabled HOMFLY-PT invariant.

    For each subset S of components: the antiparallel 2-cable of the
    sub-link on S (everything else deleted), signed (-1)^(n - |S|).  The
    empty subset contributes the empty diagram.
    """
    if d.signs is None and d.crossings:
        raise Unoriented("the adjoint HOMFLY-PT expansion needs an oriented diagram")
    n = d.num_components()
    terms = []
    for mask in range(1 << n):
        sign = -1 if (n - bin(mask).count("1")) % 2 else 1
        if mask == 0:
            terms.append((sign, LinkDiagram((), (), 0)))
            continue
        patterns = {i: (CablePattern.parallel2() if mask & (1 << i) else CablePattern.delete())
                    for i in range(n)}
        terms.append((sign, cable2(d, patterns, mode="antiparallel")))
    return terms


def kauffman_projector_coefficients():
    """The three per-component weights of the adjoint Kauffman cabling.

    In the variables (s, a): parallel doubling weighs s/(s+1/s), the
    single twist -1/(s+1/s), and the turnback
    -(s-1/s) / ((s+1/s)(a/s+1)).  The twist is the crossing whose curl
    carries a^(+1): chirality +1 under this package's conventions.
    """
    s = LaurentPoly.var("s")
    a = LaurentPoly.var("a")
    s_plus = s + s ** -1
    s_minus = s - s ** -1
    return (
        RatFunc(s, s_plus),
        RatFunc(LaurentPoly.const(-1), s_plus),
        RatFunc(-s_minus, s_plus * (a * s ** -1 + 1)),
    )


def kauffman_adjoint_expansion(d: LinkDiagram):
    """The 3^n multilinear expansion of the adjoint Kauffman cabling.

    Each component independently receives Parallel2, the projector
    twist, or Turnback, with the projector coefficients multiplying
    across components.  Diagrams are unoriented 2-cables of the input
    (whose orientation, if any, is ignored).
    """
    base = LinkDiagram(d.crossings, None, d.free_loops, validate=False)
    n = base.num_components()
    c_par, c_twist, c_turn = kauffman_projector_coefficients()
    choices = (
        (CablePattern.parallel2(), c_par),
        (CablePattern.twisted(1), c_twist),
        (CablePattern.turnback(), c_turn),
    )
    terms = []
    for assignment in _iter_product(range(3), repeat=n):
        patterns = {}
        coeff = RatFunc(1)
        for i, choice in enumerate(assignment):
            pat, c = choices[choice]
            patterns[i] = pat
            coeff = coeff * c
        terms.append((coeff, cable2(base, patterns, mode="parallel")))
    return terms
