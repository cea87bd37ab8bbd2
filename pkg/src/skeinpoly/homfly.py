"""HOMFLY-PT engine: the two-variable invariant, its framed extension,
the adjoint cabled invariant, and the degree-2 Vassiliev coefficient.

The normalized invariant P(v, z) satisfies

    (1/v) P(L+) - v P(L-) = z P(L0),        P(unknot) = 1,

and is computed by a descending-diagram recursion: walk the components
from base points; at the first crossing first reached on its
under-strand, branch into the crossing-switched diagram and the
z-weighted oriented smoothing.  Descending diagrams are unlinks, worth
((1/v - v)/z)^(n-1).  Curls and parallel bigons are stripped eagerly
(both preserve P), split diagrams factor, and results are memoized on
relabeling-invariant canonical forms, quotiented by simultaneous
reversal of all components (which preserves P).

The framed extension H multiplies by lam^writhe and one loop factor;
the adjoint invariant sums H over the inclusion-exclusion antiparallel
2-cables, where every cable has writhe zero so no lam survives.
"""

from __future__ import annotations

import sys

from . import diagrams as dg
from .errors import (
    InexactDivision,
    NotAKnot,
    ResourceLimit,
    Unoriented,
    ValidationError,
)
from .rings import (
    LaurentPoly,
    RatFunc,
    exact_divide,
    limit_order2_at_v1,
    validate_sigma_poly,
)

#: (1/v - v)/z, the value of an extra split unknot.
DELTA = LaurentPoly(("v", "z"), {(-1, -1): 1, (1, -1): -1})

_V2 = LaurentPoly(("v", "z"), {(2, 0): 1})
_VZ = LaurentPoly(("v", "z"), {(1, 1): 1})
_VM2 = LaurentPoly(("v", "z"), {(-2, 0): 1})
_VMZ = LaurentPoly(("v", "z"), {(-1, 1): 1})

DEFAULT_BUDGET = 10 ** 8
CANONICAL_CUTOFF = 48


class HomflyEngine:
    """A memoized evaluator; reusable across calls and shareable.

    ``memo=False`` disables caching (for equivalence tests), ``budget``
    bounds the recursion node count, and ``rng`` (a random.Random)
    randomizes the walk order at every node, which must not change any
    value.
    """

    def __init__(self, memo=True, budget=DEFAULT_BUDGET, rng=None,
                 canonical_cutoff=CANONICAL_CUTOFF):
        self.memo_enabled = memo
        self.budget = budget
        self.rng = rng
        self.canonical_cutoff = canonical_cutoff
        self.memo = {}
        self.nodes = 0

    # ---- public ----

    def p(self, d: dg.LinkDiagram) -> LaurentPoly:
        """P of a nonempty oriented diagram."""
        if d.signs is None and d.crossings:
            raise Unoriented("the HOMFLY-PT invariant needs an oriented diagram")
        if d.num_components() == 0:
            raise ValidationError("P is defined for nonempty links only")
        self.nodes = 0
        if sys.getrecursionlimit() < 100000:
            sys.setrecursionlimit(100000)
        return self._eval(d)

    # ---- recursion ----

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise ResourceLimit(f"node budget {self.budget} exceeded",
                                nodes=self.nodes, memo_size=len(self.memo))

    def _key(self, d):
        if len(d.crossings) > self.canonical_cutoff:
            return d.key()
        return min(dg.canonical_key(d), dg.canonical_key(dg.reverse_all(d)))

    def _eval(self, d: dg.LinkDiagram) -> LaurentPoly:
        self._tick()
        loops = d.free_loops
        if loops:
            d = dg.LinkDiagram(d.crossings, d.signs, 0, validate=False)
        # eager reductions that leave P unchanged
        changed = True
        while changed and d.crossings:
            changed = False
            for ci in range(len(d.crossings)):
                if dg.curl_sign(d, ci) is not None:
                    d = dg.strip_curl(d, ci)
                    loops += d.free_loops
                    d = dg.LinkDiagram(d.crossings, d.signs, 0, validate=False)
                    changed = True
                    break
            if changed:
                continue
            for (ci, i, cj, j) in dg.bigon_reductions(d):
                reduced = dg.strip_bigon(d, ci, i, cj, j)
                if reduced is not None:
                    loops += reduced.free_loops
                    d = dg.LinkDiagram(reduced.crossings, reduced.signs, 0, validate=False)
                    changed = True
                    break
        if not d.crossings:
            return DELTA ** (loops - 1)
        value = LaurentPoly.const(1, ("v", "z"))
        parts = dg.connected_parts(d)
        if len(parts) > 1:
            for part in parts:
                value = value * self._eval_connected(dg.subdiagram(d, part))
            value = value * DELTA ** (len(parts) - 1 + loops)
        else:
            value = self._eval_connected(d) * DELTA ** loops
        return value

    def _eval_connected(self, d: dg.LinkDiagram) -> LaurentPoly:
        key = self._key(d) if self.memo_enabled else None
        if key is not None:
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        bad = dg.first_bad_crossing(d, self.rng)
        if bad is None:
            value = DELTA ** (d.num_components() - 1)
        else:
            sw = self._eval(dg.switched(d, bad))
            sm = self._eval(dg.oriented_smoothed(d, bad))
            if d.signs[bad] == 1:
                # 1/v P(L+) - v P(L-) = z P(L0), solved for the + crossing
                value = _V2 * sw + _VZ * sm
            else:
                value = _VM2 * sw - _VMZ * sm
        if key is not None:
            self.memo[key] = value
        return value


_default_engine = HomflyEngine()


def homfly_p(d: dg.LinkDiagram, engine: HomflyEngine | None = None) -> LaurentPoly:
    """The HOMFLY-PT polynomial P(v, z), equal to 1 on the unknot."""
    return (engine or _default_engine).p(d)


def framed_h(d: dg.LinkDiagram, engine: HomflyEngine | None = None) -> LaurentPoly:
    """The framed extension: 1 on the empty diagram, else lam^W P (1/v - v)/z."""
    if d.num_components() == 0:
        return LaurentPoly.const(1, ("v", "z", "lam"))
    total, _, _ = dg.writhe_data(d) if d.crossings else (0, (), 0)
    p = homfly_p(d, engine)
    value = p * DELTA
    if total:
        value = value * LaurentPoly(("lam",), {(total,): 1})
    return value.with_vars(tuple(sorted(set(value.vars) | {"v", "z", "lam"},
                                        key=("v", "z", "lam").index)))


def h_adjoint(d: dg.LinkDiagram, engine: HomflyEngine | None = None) -> LaurentPoly:
    """The adjoint cabled invariant: framed H summed over the 2-cable expansion.

    Blackboard framing of the given diagram is used; pre-apply add_kinks
    for any other framing.  The result never involves lam because every
    antiparallel cable has total writhe zero.
    """
    total = LaurentPoly.const(0, ("v", "z"))
    for sign, term in dg.homfly_adjoint_expansion(d):
        h = framed_h(term, engine)
        h = h.drop_trivial_vars().with_vars(("v", "z"))   # raises if lam survived
        total = total + (h if sign == 1 else -h)
    return total


def v2(d: dg.LinkDiagram, engine: HomflyEngine | None = None):
    """The degree-2 Vassiliev invariant: the z^2 coefficient of P(1, z)."""
    if d.num_components() != 1:
        raise NotAKnot(f"diagram has {d.num_components()} components")
    p = homfly_p(d, engine)
    at_v1 = p.subs_int("v", 1)
    return at_v1.terms.get((2,), 0)


_SP_MINUS_SM = LaurentPoly(("sp", "sm"), {(1, 0): 1, (0, 1): -1})


def unknot_diagram() -> dg.LinkDiagram:
    """The 0-framed unknot: one crossingless circle."""
    return dg.LinkDiagram((), (), 1)


def conjecture_sides(d: dg.LinkDiagram, qtilde_value: LaurentPoly,
                     engine: HomflyEngine | None = None):
    """Both sides of the 0-framed-knot identity linking the adjoint
    cabled invariant to V2 and the two-variable additive invariant.

    lhs: the order-2 limit at v=1 of (H_ad(K)/H_ad(U0) - 1)/(v - 1/v)^2.
    rhs: -2 V2(K) - (1/z^2) * (qtilde / (sp - sm)) at sp = sm = z^2 + 3,
    where the division must be exact in the sp/sm polynomial ring.
    """
    if d.num_components() != 1:
        raise NotAKnot(f"diagram has {d.num_components()} components")
    if d.crossings:
        total, _, _ = dg.writhe_data(d)
        if total != 0:
            raise ValidationError(f"conjecture check needs a 0-framed knot, writhe is {total}")
    engine = engine or _default_engine
    ratio = RatFunc(h_adjoint(d, engine)) / RatFunc(h_adjoint(unknot_diagram(), engine))
    lhs = limit_order2_at_v1(ratio)

    q = validate_sigma_poly(qtilde_value)
    quotient = exact_divide(q, _SP_MINUS_SM)
    if quotient is None:
        raise InexactDivision("the invariant value is not divisible by (sp - sm)",
                              remainder=q)
    z2p3 = LaurentPoly(("z",), {(2,): 1, (0,): 3})
    collapsed = LaurentPoly.const(0, ("z",))
    for (i, j), c in quotient.with_vars(("sp", "sm")).terms.items():
        collapsed = collapsed + z2p3 ** (i + j) * c
    z2 = LaurentPoly(("z",), {(2,): 1})
    rhs = RatFunc(LaurentPoly.const(-2 * v2(d, engine), ("z",))) - RatFunc(collapsed, z2)
    return lhs, rhs
