"""Dubrovnik-form Kauffman engine and the adjoint cabled invariant.

The regular-isotopy invariant D(a, s) of unoriented diagrams satisfies
the difference skein

    D(X) - D(switch X) = (s - 1/s) (D(join 0-1) - D(join 0-3)),

where "join 0-1" erases a crossing by connecting slot pairs (0,1) and
(2,3), and "join 0-3" connects (0,3) and (1,2).  A curl of chirality
+-1 contributes a^(+-1), a crossingless n-circle diagram is worth
delta^n with

    delta = 1 + (a - 1/a)/(s - 1/s),

and the empty diagram is worth 1.  The relation sign, the curl factor,
and the loop normalization are each forced by the adjoint cabled value
of the 0-framed unknot once the projector's twist crossing is defined
as the one whose curl carries a^(+1); see the engine tests.

All intermediate values are Laurent polynomials in (s, a) divided by a
power of (s - 1/s), so the engine tracks exactly that pair and never
does general rational-function arithmetic until the projector weights
enter at the very end.
"""

from __future__ import annotations

import sys

from . import diagrams as dg
from .errors import DivisionByZero, InexactDivision, ResourceLimit
from .rings import (
    LaurentPoly,
    RatFunc,
    exact_div_linear,
    substitute_equal,
)

_S_MINUS = LaurentPoly(("s", "a"), {(1, 0): 1, (-1, 0): -1})          # s - 1/s
_DELTA_NUM = LaurentPoly(("s", "a"), {(1, 0): 1, (-1, 0): -1, (0, 1): 1, (0, -1): -1})

DEFAULT_BUDGET = 10 ** 8
CANONICAL_CUTOFF = 48

_s_minus_powers = {0: LaurentPoly.const(1, ("s", "a"))}


def _s_minus_pow(k):
    p = _s_minus_powers.get(k)
    if p is None:
        p = _s_minus_pow(k - 1) * _S_MINUS
        _s_minus_powers[k] = p
    return p


def _div_s_minus(p: LaurentPoly):
    """Fast exact division of a (s, a)-Laurent polynomial by (s - 1/s).

    Works one a-column at a time by synthetic division; returns None
    when any column leaves a remainder.
    """
    if p.is_zero():
        return p
    p = p.with_vars(("s", "a"))
    cols = {}
    for (es, ea), c in p.terms.items():
        cols.setdefault(ea, {})[es] = c
    out = {}
    for ea, col in cols.items():
        m = min(col)
        work = {e - m: c for e, c in col.items()}       # col * s^(-m), exps >= 0
        quot = {}
        while work:
            e = max(work)
            if e < 2:
                return None
            c = work.pop(e)
            quot[e - 2] = c
            nc = work.get(e - 2, 0) + c
            if nc:
                work[e - 2] = nc
            else:
                work.pop(e - 2, None)
        # quotient of col*s by (s^2-1) is quot * s^(m+1)
        for e, c in quot.items():
            out[(e + m + 1, ea)] = c
    return LaurentPoly(("s", "a"), out)


class DubVal:
    """A value num / (s - 1/s)^k, kept reduced so equality is structural."""

    __slots__ = ("num", "k")

    def __init__(self, num: LaurentPoly, k: int, reduce=True):
        if num.is_zero():
            num, k = LaurentPoly(("s", "a"), {}), 0
        while reduce and k > 0:
            q = _div_s_minus(num)
            if q is None:
                break
            num, k = q, k - 1
        self.num = num
        self.k = k

    @staticmethod
    def const(c):
        return DubVal(LaurentPoly.const(c, ("s", "a")), 0, reduce=False)

    @staticmethod
    def loops(n):
        """delta^n for n crossingless circles."""
        return DubVal(_DELTA_NUM ** n, n)

    def __add__(self, other):
        k = max(self.k, other.k)
        a = self.num * _s_minus_pow(k - self.k)
        b = other.num * _s_minus_pow(k - other.k)
        return DubVal(a + b, k)

    def __sub__(self, other):
        k = max(self.k, other.k)
        a = self.num * _s_minus_pow(k - self.k)
        b = other.num * _s_minus_pow(k - other.k)
        return DubVal(a - b, k)

    def __mul__(self, other):
        if isinstance(other, DubVal):
            return DubVal(self.num * other.num, self.k + other.k)
        return DubVal(self.num * other, self.k)

    def __eq__(self, other):
        return isinstance(other, DubVal) and self.k == other.k and self.num == other.num

    def __hash__(self):
        return hash((self.k, self.num.drop_trivial_vars().key()))

    def ratfunc(self) -> RatFunc:
        return RatFunc(self.num, _s_minus_pow(self.k))

    def __repr__(self):
        return f"DubVal({self.num!r}, k={self.k})"


def _alpha_power(n):
    return LaurentPoly(("s", "a"), {(0, n): 1})


class KauffmanEngine:
    """Memoized Dubrovnik evaluator (same contract as the HOMFLY engine)."""

    def __init__(self, memo=True, budget=DEFAULT_BUDGET, rng=None,
                 canonical_cutoff=CANONICAL_CUTOFF):
        self.memo_enabled = memo
        self.budget = budget
        self.rng = rng
        self.canonical_cutoff = canonical_cutoff
        self.memo = {}
        self.nodes = 0

    def value(self, d: dg.LinkDiagram) -> DubVal:
        if d.signs is not None:
            d = dg.LinkDiagram(d.crossings, None, d.free_loops, validate=False)
        self.nodes = 0
        if sys.getrecursionlimit() < 100000:
            sys.setrecursionlimit(100000)
        return self._eval(d)

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise ResourceLimit(f"node budget {self.budget} exceeded",
                                nodes=self.nodes, memo_size=len(self.memo))

    def _key(self, d):
        if len(d.crossings) > self.canonical_cutoff:
            return d.key()
        return dg.canonical_key(d)

    def _eval(self, d: dg.LinkDiagram) -> DubVal:
        self._tick()
        loops = d.free_loops
        alpha = 0
        if loops:
            d = dg.LinkDiagram(d.crossings, None, 0, validate=False)
        changed = True
        while changed and d.crossings:
            changed = False
            for ci in range(len(d.crossings)):
                sign = dg.curl_sign(d, ci)
                if sign is not None:
                    alpha += sign                    # a^chirality per stripped curl
                    d = dg.strip_curl(d, ci)
                    loops += d.free_loops
                    d = dg.LinkDiagram(d.crossings, None, 0, validate=False)
                    changed = True
                    break
            if changed:
                continue
            for (ci, i, cj, j) in dg.bigon_reductions(d):
                reduced = dg.strip_bigon(d, ci, i, cj, j)
                if reduced is not None:
                    loops += reduced.free_loops
                    d = dg.LinkDiagram(reduced.crossings, None, 0, validate=False)
                    changed = True
                    break
        value = DubVal.loops(loops) if loops else DubVal.const(1)
        parts = dg.connected_parts(d) if d.crossings else []
        for part in parts:
            sub = dg.subdiagram(d, part) if len(parts) > 1 else d
            value = value * self._eval_connected(sub)
        if alpha:
            value = value * _alpha_power(alpha)
        return value

    def _eval_connected(self, d: dg.LinkDiagram) -> DubVal:
        key = self._key(d) if self.memo_enabled else None
        if key is not None:
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        bad = dg.first_bad_crossing(d, self.rng)
        if bad is None:
            # descending: a split union of unknots carrying their framings
            alpha = sum(dg.self_writhes(d))
            value = DubVal.loops(d.num_components()) * _alpha_power(alpha)
        else:
            sw = self._eval(dg.switched(d, bad))
            s01 = self._eval(dg.smoothed(d, bad, "01"))
            s03 = self._eval(dg.smoothed(d, bad, "03"))
            value = sw + (s01 - s03) * _S_MINUS
        if key is not None:
            self.memo[key] = value
        return value


_default_engine = KauffmanEngine()


def kauffman_lambda(d: dg.LinkDiagram, engine: KauffmanEngine | None = None) -> RatFunc:
    """The regular-isotopy Dubrovnik invariant in the variables (a, s)."""
    return (engine or _default_engine).value(d).ratfunc()


def k_adjoint(d: dg.LinkDiagram, engine: KauffmanEngine | None = None) -> RatFunc:
    """The adjoint cabled Kauffman invariant (blackboard framing of d)."""
    engine = engine or _default_engine
    total = RatFunc(0)
    for coeff, term in dg.kauffman_adjoint_expansion(d):
        total = total + coeff * engine.value(term).ratfunc()
    return total


def kauf_alpha_eq_s_check(d: dg.LinkDiagram, engine: KauffmanEngine | None = None) -> RatFunc:
    """The adjoint value specialized on a = s (expected to be 1 on every link)."""
    value = k_adjoint(d, engine)
    return substitute_equal(value, "a", "s")


def kauf_derivative_at_s(d: dg.LinkDiagram, engine: KauffmanEngine | None = None) -> RatFunc:
    """((K_ad - 1)/(a - s)) evaluated on a = s.

    Raises InexactDivision when (a - s) does not divide exactly, and
    DivisionByZero when the quotient still has a pole on a = s.
    """
    value = k_adjoint(d, engine) - 1
    quotient, ok = exact_div_linear(value, ("a", "s"))
    if not ok:
        raise InexactDivision("(a - s) does not divide the adjoint value minus one",
                              remainder=quotient)
    result = substitute_equal(quotient, "a", "s")
    if result.den.is_zero():
        raise DivisionByZero("quotient has a pole on a = s")
    return result
