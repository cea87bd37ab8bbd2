"""Exact arithmetic for every coefficient domain used by the skein engines.

Everything is built on sparse Laurent polynomials: a tuple of variable
names plus a dict mapping integer exponent vectors to nonzero rational
coefficients.  Coefficients are Python ints whenever possible and
``fractions.Fraction`` otherwise, so all arithmetic is exact.  There is
no floating-point mode anywhere.

Variable names come from a fixed alphabet.  The conventional reading:

====  =============================================================
q1,q2,q3  the three quotient-ring variables, subject to q1*q2*q3 = 1
s, a      the two Dubrovnik/Kauffman variables (``a`` is the curl unit)
v, z      the two HOMFLY-PT variables
lam       the framing unit of the framed HOMFLY-PT extension
sp, sm    the symmetric combinations q1^2+q2^2+q3^2 and its inverse twin
d, h      expansion variables for truncated series (``h`` is fixed to 1)
====  =============================================================

All values are immutable after construction and every operation is a
pure function, so concurrent use on shared inputs is safe.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _int_gcd

from .errors import (
    DivisionByZero,
    NotInSubring,
    NotSymmetric,
    OrderTooLow,
    ParseError,
    PoleAtOne,
    ValidationError,
)

#: Fixed variable alphabet; merged variable tuples always follow this order.
ALPHABET = ("q1", "q2", "q3", "s", "a", "v", "z", "lam", "sp", "sm", "d", "h")
_ALPHABET_INDEX = {name: i for i, name in enumerate(ALPHABET)}

#: Total-degree cutoff above which RatFunc.normalized skips the full GCD.
GCD_DEGREE_BOUND = 24


def _norm_coeff(c):
    """Collapse integral Fractions to int; reject non-rationals."""
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    raise ValidationError(f"coefficient {c!r} is not an exact rational")


class LaurentPoly:
    """A sparse multivariate Laurent polynomial with exact coefficients.

    ``vars`` is an ordered subset of ALPHABET; ``terms`` maps exponent
    tuples (one integer per variable, negatives allowed) to nonzero
    coefficients.  Instances are immutable; do not mutate ``terms``.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms):
        variables = tuple(variables)
        for name in variables:
            if name not in _ALPHABET_INDEX:
                raise ValidationError(f"unknown variable {name!r}")
        if len(set(variables)) != len(variables):
            raise ValidationError(f"repeated variable in {variables}")
        order = sorted(range(len(variables)), key=lambda i: _ALPHABET_INDEX[variables[i]])
        if order != list(range(len(variables))):
            variables, perm = tuple(variables[i] for i in order), order
            terms = {tuple(exps[i] for i in perm): c for exps, c in terms.items()}
        clean = {}
        n = len(variables)
        for exps, c in terms.items():
            exps = tuple(exps)
            if len(exps) != n:
                raise ValidationError(f"exponent vector {exps} has arity {len(exps)}, expected {n}")
            c = _norm_coeff(c)
            if c != 0:
                clean[exps] = c
        self.vars = variables
        self.terms = clean

    # ---- constructors -------------------------------------------------

    @staticmethod
    def const(c, variables=()):
        c = _norm_coeff(c if isinstance(c, (int, Fraction)) else Fraction(c))
        if c == 0:
            return LaurentPoly(variables, {})
        return LaurentPoly(variables, {(0,) * len(variables): c})

    @staticmethod
    def var(name, power=1):
        return LaurentPoly((name,), {(power,): 1})

    # ---- structural helpers -------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_const(self):
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def const_value(self):
        """The constant this polynomial equals, or raise if non-constant."""
        if self.is_zero():
            return 0
        if not self.is_const():
            raise ValidationError(f"{self} is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self):
        """Max over terms of the sum of |exponents| (0 for the zero poly)."""
        if not self.terms:
            return 0
        return max(sum(abs(e) for e in exps) for exps in self.terms)

    def key(self):
        """Hashable canonical snapshot (used for equality and hashing)."""
        return (self.vars, tuple(sorted(self.terms.items())))

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            if isinstance(other, (int, Fraction)):
                other = LaurentPoly.const(other)
            else:
                return NotImplemented
        a, b = align(self, other)
        return a.terms == b.terms

    def __hash__(self):
        # Hash must ignore padding variables with all-zero exponents.
        return hash(self.drop_trivial_vars().key())

    def drop_trivial_vars(self):
        """Remove variables whose exponent is 0 in every term."""
        if not self.vars:
            return self
        used = [i for i in range(len(self.vars)) if any(e[i] for e in self.terms)]
        if len(used) == len(self.vars):
            return self
        newvars = tuple(self.vars[i] for i in used)
        return LaurentPoly(newvars, {tuple(e[i] for i in used): c for e, c in self.terms.items()})

    def with_vars(self, variables):
        """Reinterpret over a superset of variables (padding exponents with 0)."""
        variables = tuple(variables)
        if variables == self.vars:
            return self
        pos = {name: i for i, name in enumerate(variables)}
        for name in self.vars:
            if name not in pos:
                raise ValidationError(f"target variables {variables} do not contain {name}")
        n = len(variables)
        mapping = [pos[name] for name in self.vars]
        out = {}
        for exps, c in self.terms.items():
            vec = [0] * n
            for src, dst in enumerate(mapping):
                vec[dst] = exps[src]
            out[tuple(vec)] = c
        return LaurentPoly(variables, out)

    # ---- ring operations -----------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other, self.vars)
        elif not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = align(self, other)
        out = dict(a.terms)
        for exps, c in b.terms.items():
            s = out.get(exps, 0) + c
            if s == 0:
                out.pop(exps, None)
            else:
                out[exps] = s
        return LaurentPoly(a.vars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.const(other, self.vars)
        elif not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = _norm_coeff(other)
            if other == 0:
                return LaurentPoly(self.vars, {})
            return LaurentPoly(self.vars, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        a, b = align(self, other)
        out = {}
        bterms = b.terms
        for ea, ca in a.terms.items():
            for eb, cb in bterms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(key, 0) + ca * cb
                if s == 0:
                    out.pop(key, None)
                else:
                    out[key] = s
        return LaurentPoly(a.vars, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if len(self.terms) != 1:
                raise ValidationError("negative powers only defined for monomials")
            (exps, c), = self.terms.items()
            inv = Fraction(1) / Fraction(c)
            return LaurentPoly(self.vars, {tuple(e * k for e in exps): _norm_coeff(inv ** (-k))})
        result = LaurentPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shifted(self, monomial_exps):
        """Multiply by the monomial with the given exponent vector."""
        return LaurentPoly(self.vars, {tuple(e + m for e, m in zip(exps, monomial_exps)): c
                                       for exps, c in self.terms.items()})

    def coefficient_of(self, **var_powers):
        """Coefficient (a LaurentPoly in the remaining vars) of the given powers."""
        keep = [i for i, name in enumerate(self.vars) if name not in var_powers]
        sel = {i: var_powers[name] for i, name in enumerate(self.vars) if name in var_powers}
        out = {}
        for exps, c in self.terms.items():
            if all(exps[i] == p for i, p in sel.items()):
                out[tuple(exps[i] for i in keep)] = c
        return LaurentPoly(tuple(self.vars[i] for i in keep), out)

    def subs_int(self, name, value):
        """Substitute an exact rational value for one variable."""
        if name not in self.vars:
            return self
        i = self.vars.index(name)
        value = Fraction(value)
        out = {}
        keep = tuple(j for j in range(len(self.vars)) if j != i)
        for exps, c in self.terms.items():
            e = exps[i]
            if e < 0 and value == 0:
                raise DivisionByZero(f"substituting 0 for {name} with exponent {e}")
            factor = value ** e
            key = tuple(exps[j] for j in keep)
            s = out.get(key, 0) + c * factor
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return LaurentPoly(tuple(self.vars[j] for j in keep), out)

    def derivative(self, name):
        """Formal derivative with respect to one variable."""
        if name not in self.vars:
            return LaurentPoly(self.vars, {})
        i = self.vars.index(name)
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            key = tuple(x - 1 if j == i else x for j, x in enumerate(exps))
            s = out.get(key, 0) + c * e
            if s == 0:
                out.pop(key, None)
            else:
                out[key] = s
        return LaurentPoly(self.vars, out)

    # ---- canonical text / JSON -----------------------------------------

    def to_text(self):
        return poly_to_text(self)

    def to_json(self):
        return poly_to_json(self)

    def __repr__(self):
        return f"LaurentPoly({poly_to_text(self)!r})"

    def __str__(self):
        return poly_to_text(self)


def align(a: LaurentPoly, b: LaurentPoly):
    """Bring two polynomials over the merged variable tuple."""
    if a.vars == b.vars:
        return a, b
    merged = tuple(sorted(set(a.vars) | set(b.vars), key=_ALPHABET_INDEX.get))
    return a.with_vars(merged), b.with_vars(merged)


def variables(*names):
    """Convenience: one generator polynomial per requested name."""
    out = tuple(LaurentPoly.var(n) for n in names)
    return out if len(out) != 1 else out[0]


# --------------------------------------------------------------------------
# Canonical text form.
#
# Terms are sorted by graded-lexicographic order on the exponent vector
# (total degree ascending, then the exponent tuple descending so that the
# earlier alphabet variable wins ties).  Coefficients print as "n" or
# "n/d"; variables with exponent zero are omitted; exponent one prints
# bare.  The zero polynomial prints as "0".  The format is bit-stable.
# --------------------------------------------------------------------------

def _term_sort_key(exps):
    return (sum(exps), tuple(-e for e in exps))


def _coeff_text(c):
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def poly_to_text(p: LaurentPoly) -> str:
    p = p.drop_trivial_vars()
    if not p.terms:
        return "0"
    pieces = []
    for exps in sorted(p.terms, key=_term_sort_key):
        c = p.terms[exps]
        mono = "*".join(
            name if e == 1 else f"{name}^{e}"
            for name, e in zip(p.vars, exps) if e != 0
        )
        neg = c < 0
        c_abs = -c if neg else c
        if not mono:
            body = _coeff_text(c_abs)
        elif c_abs == 1:
            body = mono
        else:
            body = f"{_coeff_text(c_abs)}*{mono}"
        pieces.append(("- " if neg else "+ ") + body)
    head = pieces[0]
    text = ("-" + head[2:]) if head.startswith("- ") else head[2:]
    for piece in pieces[1:]:
        text += " " + piece
    return text


def poly_to_json(p: LaurentPoly) -> dict:
    p = p.drop_trivial_vars()
    terms = []
    for exps in sorted(p.terms, key=_term_sort_key):
        c = Fraction(p.terms[exps])
        terms.append({"exp": list(exps), "num": str(c.numerator), "den": str(c.denominator)})
    return {"vars": list(p.vars), "terms": terms}


def poly_from_json(obj) -> LaurentPoly:
    try:
        variables_ = tuple(obj["vars"])
        terms = {}
        for t in obj["terms"]:
            c = Fraction(int(t["num"]), int(t["den"]))
            terms[tuple(int(e) for e in t["exp"])] = c
        return LaurentPoly(variables_, terms)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad polynomial JSON: {exc}") from exc


# --------------------------------------------------------------------------
# Exact division and multivariate GCD.
# --------------------------------------------------------------------------

def _min_exponents(p: LaurentPoly):
    mins = None
    for exps in p.terms:
        if mins is None:
            mins = list(exps)
        else:
            mins = [min(m, e) for m, e in zip(mins, exps)]
    return mins or [0] * len(p.vars)


def monomial_content(p: LaurentPoly):
    """Exponent vector of the largest monomial dividing p (its min exponents)."""
    return tuple(_min_exponents(p))


def exact_divide(p: LaurentPoly, g: LaurentPoly):
    """Quotient p/g in the Laurent ring, or None when division is inexact.

    Division is decided in the honest polynomial ring after shifting the
    monomial content out of both arguments; monomials are units here, so
    this captures exactly Laurent-ring divisibility.
    """
    if g.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    if p.is_zero():
        return LaurentPoly(p.vars, {})
    p, g = align(p, g)
    sp_ = monomial_content(p)
    sg = monomial_content(g)
    ph = p.shifted(tuple(-e for e in sp_))
    gh = g.shifted(tuple(-e for e in sg))
    lead = max(gh.terms, key=_term_sort_key)
    lead_c = gh.terms[lead]
    quot = {}
    cur = dict(ph.terms)
    while cur:
        e = max(cur, key=_term_sort_key)
        diff = tuple(x - y for x, y in zip(e, lead))
        if any(d < 0 for d in diff):
            return None
        q = Fraction(cur[e]) / lead_c
        quot[diff] = _norm_coeff(q)
        for ge, gc in gh.terms.items():
            key = tuple(x + y for x, y in zip(diff, ge))
            s = cur.get(key, 0) - q * gc
            if s == 0:
                cur.pop(key, None)
            else:
                cur[key] = _norm_coeff(s)
    shift = tuple(x - y for x, y in zip(sp_, sg))
    return LaurentPoly(p.vars, quot).shifted(shift)


def _fraction_clear(p: LaurentPoly):
    """Scale p to integer coefficients; return (int_poly, scale) with p = int_poly / scale."""
    denoms = [c.denominator for c in p.terms.values() if isinstance(c, Fraction)]
    scale = 1
    for d in denoms:
        scale = scale * d // _int_gcd(scale, d)
    if scale == 1:
        return p, 1
    return LaurentPoly(p.vars, {e: c * scale for e, c in p.terms.items()}), scale


def _int_content(p: LaurentPoly):
    g = 0
    for c in p.terms.values():
        g = _int_gcd(g, abs(int(c)))
        if g == 1:
            return 1
    return g or 1


def _as_univariate(p: LaurentPoly, i: int):
    """View p as a polynomial in variable i: dict degree -> LaurentPoly coefficient."""
    out = {}
    keep = tuple(j for j in range(len(p.vars)) if j != i)
    restvars = tuple(p.vars[j] for j in keep)
    for exps, c in p.terms.items():
        out.setdefault(exps[i], {})[tuple(exps[j] for j in keep)] = c
    return {d: LaurentPoly(restvars, sub) for d, sub in out.items()}, restvars


def _from_univariate(u, i, variables_):
    out = {}
    for d, coeff in u.items():
        for exps, c in coeff.terms.items():
            vec = list(exps[:i]) + [d] + list(exps[i:])
            out[tuple(vec)] = c
    return LaurentPoly(variables_, out)


def _univ_degree(u):
    return max(u) if u else -1


def _univ_content(u) -> LaurentPoly:
    cont = None
    for coeff in u.values():
        cont = coeff if cont is None else poly_gcd(cont, coeff)
        if cont.is_const() and cont.const_value() == 1:
            break
    return cont


def _univ_scale(u, factor: LaurentPoly):
    return {d: coeff * factor for d, coeff in u.items()}


def _univ_exact_div(u, divisor: LaurentPoly):
    out = {}
    for d, coeff in u.items():
        q = exact_divide(coeff, divisor)
        assert q is not None, "content division failed in gcd"
        out[d] = q
    return out


def _univ_prem(f, g):
    """Pseudo remainder of f by g (both nonzero univariate views)."""
    dg = _univ_degree(g)
    lg = g[dg]
    r = dict(f)
    while r and _univ_degree(r) >= dg:
        dr = _univ_degree(r)
        lr = r[dr]
        new = {d: coeff * lg for d, coeff in r.items()}
        for d, coeff in g.items():
            key = d + dr - dg
            s = new.get(key)
            s = (-coeff * lr) if s is None else s - coeff * lr
            if s.is_zero():
                new.pop(key, None)
            else:
                new[key] = s
        new.pop(dr, None)
        r = new
    return r


def poly_gcd(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """GCD of two Laurent polynomials, up to a unit (monomial times sign).

    Computed by a primitive pseudo-remainder sequence, recursing on the
    number of variables.  The result is an honest polynomial with no
    monomial content, integer coprime coefficients, and positive leading
    coefficient under the canonical term order.
    """
    p = p.drop_trivial_vars()
    q = q.drop_trivial_vars()
    merged = tuple(sorted(set(p.vars) | set(q.vars), key=_ALPHABET_INDEX.get))
    p = p.with_vars(merged)
    q = q.with_vars(merged)
    if p.is_zero():
        base = q
    elif q.is_zero():
        base = p
    elif not merged:
        a = Fraction(p.terms.get((), 0))
        b = Fraction(q.terms.get((), 0))
        if a.denominator == b.denominator == 1:
            g = _int_gcd(abs(a.numerator), abs(b.numerator))
        else:
            g = 1          # fractional constants are units
        return LaurentPoly((), {(): g} if g else {})
    else:
        ph, _ = _fraction_clear(p.shifted(tuple(-e for e in monomial_content(p))))
        qh, _ = _fraction_clear(q.shifted(tuple(-e for e in monomial_content(q))))
        i = len(merged) - 1
        f, restvars = _as_univariate(ph, i)
        g, _ = _as_univariate(qh, i)
        cf, cg = _univ_content(f), _univ_content(g)
        f = _univ_exact_div(f, cf)
        g = _univ_exact_div(g, cg)
        cont = poly_gcd(cf, cg)
        if _univ_degree(f) < _univ_degree(g):
            f, g = g, f
        while g:
            r = _univ_prem(f, g)
            if not r:
                f = g
                break
            f, g = g, _univ_exact_div(r, _univ_content(r))
        base = _from_univariate(_univ_scale(f, cont), i, merged)
    if base.is_zero():
        return base
    base = base.shifted(tuple(-e for e in monomial_content(base)))
    base, _ = _fraction_clear(base)
    ic = _int_content(base)
    if ic > 1:
        base = LaurentPoly(base.vars, {e: c // ic for e, c in base.terms.items()})
    lead = max(base.terms, key=_term_sort_key)
    if base.terms[lead] < 0:
        base = -base
    return base


# --------------------------------------------------------------------------
# Rational functions.
# --------------------------------------------------------------------------

class RatFunc:
    """A fraction of Laurent polynomials; equality via cross-multiplication.

    Construction normalizes the representation (common monomial content,
    integer content, positive leading denominator coefficient, and a full
    GCD reduction when both parts have total degree <= GCD_DEGREE_BOUND),
    but canonical reduction is never assumed when testing equality.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, reduce=True):
        if isinstance(num, (int, Fraction)):
            num = LaurentPoly.const(num)
        if den is None:
            den = LaurentPoly.const(1)
        elif isinstance(den, (int, Fraction)):
            den = LaurentPoly.const(den)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        num, den = align(num, den)
        if reduce:
            num, den = _ratfunc_reduce(num, den)
        self.num = num
        self.den = den

    # ---- arithmetic ----

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction, LaurentPoly)):
            return RatFunc(other if isinstance(other, LaurentPoly) else LaurentPoly.const(other), reduce=False)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, reduce=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        return other / self

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if self.num.is_zero():
                raise DivisionByZero("negative power of zero")
            return RatFunc(self.den ** (-k), self.num ** (-k))
        return RatFunc(self.num ** k, self.den ** k)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        n, d = _ratfunc_reduce(self.num, self.den)
        return hash((n.drop_trivial_vars().key(), d.drop_trivial_vars().key()))

    def is_zero(self):
        return self.num.is_zero()

    def is_poly(self):
        """True when the (reduced) denominator is a unit monomial."""
        n, d = _ratfunc_reduce(self.num, self.den)
        return len(d.terms) == 1

    def as_poly(self):
        """Return self as a LaurentPoly; raise if it is not one."""
        n, d = _ratfunc_reduce(self.num, self.den)
        if len(d.terms) != 1:
            q = exact_divide(n, d)
            if q is None:
                raise ValidationError(f"{self} is not a Laurent polynomial")
            return q
        (exps, c), = d.terms.items()
        n = n.shifted(tuple(-e for e in exps))
        if c == 1:
            return n
        return LaurentPoly(n.vars, {e: _norm_coeff(Fraction(v) / c) for e, v in n.terms.items()})

    def subs_int(self, name, value):
        den = self.den.subs_int(name, value)
        if den.is_zero():
            raise DivisionByZero(f"denominator vanishes at {name}={value}")
        return RatFunc(self.num.subs_int(name, value), den)

    def to_text(self):
        if len(self.den.terms) == 1 and self.den == LaurentPoly.const(1, self.den.vars):
            return poly_to_text(self.num)
        return f"({poly_to_text(self.num)}) / ({poly_to_text(self.den)})"

    def to_json(self):
        return {"num": poly_to_json(self.num), "den": poly_to_json(self.den)}

    def __repr__(self):
        return f"RatFunc({self.to_text()!r})"

    def __str__(self):
        return self.to_text()


def ratfunc_from_json(obj) -> RatFunc:
    try:
        return RatFunc(poly_from_json(obj["num"]), poly_from_json(obj["den"]))
    except KeyError as exc:
        raise ParseError(f"bad rational-function JSON: {exc}") from exc


def _ratfunc_reduce(num: LaurentPoly, den: LaurentPoly):
    """Normalize a num/den pair (see RatFunc docstring)."""
    if num.is_zero():
        return LaurentPoly(num.vars, {}), LaurentPoly.const(1, den.vars)
    # joint monomial content
    mn = _min_exponents(num)
    md = _min_exponents(den)
    shift = tuple(-min(a, b) for a, b in zip(mn, md))
    num = num.shifted(shift)
    den = den.shifted(shift)
    # clear fractions jointly, then strip the common integer content
    num, sn = _fraction_clear(num)
    den, sd = _fraction_clear(den)
    if sn != sd:
        num = num * sd
        den = den * sn
    g = _int_gcd(_int_content(num), _int_content(den))
    if g > 1:
        num = LaurentPoly(num.vars, {e: c // g for e, c in num.terms.items()})
        den = LaurentPoly(den.vars, {e: c // g for e, c in den.terms.items()})
    # full gcd when small
    if (num.total_degree() <= GCD_DEGREE_BOUND and den.total_degree() <= GCD_DEGREE_BOUND
            and not den.is_const()):
        g = poly_gcd(num, den)
        if not g.is_const():
            qn = exact_divide(num, g)
            qd = exact_divide(den, g)
            if qn is not None and qd is not None:
                num, den = qn, qd
                num, _ = _fraction_clear(num)
                den, _ = _fraction_clear(den)
    lead = max(den.terms, key=_term_sort_key)
    if den.terms[lead] < 0:
        num, den = -num, -den
    return num, den


# --------------------------------------------------------------------------
# The three-variable quotient ring (q1*q2*q3 = 1) and the sp/sm subring.
# --------------------------------------------------------------------------

def normalize_qring(p: LaurentPoly) -> LaurentPoly:
    """Unique representative with q3 eliminated via q3 -> (q1*q2)^-1.

    Input may mention q1, q2, q3; the output is a LaurentPoly in (q1, q2)
    and the map is idempotent.
    """
    extra = set(p.vars) - {"q1", "q2", "q3"}
    if extra:
        raise ValidationError(f"normalize_qring expects variables in q1,q2,q3; got {sorted(extra)}")
    p = p.with_vars(("q1", "q2", "q3"))
    out = {}
    for (e1, e2, e3), c in p.terms.items():
        key = (e1 - e3, e2 - e3)
        s = out.get(key, 0) + c
        if s == 0:
            out.pop(key, None)
        else:
            out[key] = s
    return LaurentPoly(("q1", "q2"), out)


def _qring_permute(p: LaurentPoly, perm):
    """Apply a permutation of (q1,q2,q3) to a normalized QRing element.

    ``perm`` maps source index 0,1,2 (for q1,q2,q3) to target index; the
    result is re-normalized to the (q1, q2) form.
    """
    p = p.with_vars(("q1", "q2"))
    out = {}
    for (e1, e2), c in p.terms.items():
        vec = [0, 0, 0]
        vec[perm[0]] += e1
        vec[perm[1]] += e2
        key = (vec[0] - vec[2], vec[1] - vec[2])
        s = out.get(key, 0) + c
        if s == 0:
            out.pop(key, None)
        else:
            out[key] = s
    return LaurentPoly(("q1", "q2"), out)


def is_symmetric_qring(p: LaurentPoly) -> bool:
    """Invariance under all permutations of (q1, q2, q3)."""
    p = normalize_qring(p) if "q3" in p.vars else p.with_vars(("q1", "q2"))
    swap12 = _qring_permute(p, (1, 0, 2))
    swap23 = _qring_permute(p, (0, 2, 1))
    return swap12.terms == p.terms and swap23.terms == p.terms


def embed_sigma(p: LaurentPoly) -> LaurentPoly:
    """Image of a polynomial in (sp, sm) inside the quotient ring."""
    p = p.with_vars(("sp", "sm"))
    sp_image = LaurentPoly(("q1", "q2"), {(2, 0): 1, (0, 2): 1, (-2, -2): 1})
    sm_image = LaurentPoly(("q1", "q2"), {(-2, 0): 1, (0, -2): 1, (2, 2): 1})
    out = LaurentPoly(("q1", "q2"), {})
    for (i, j), c in p.terms.items():
        if i < 0 or j < 0:
            raise ValidationError("sp/sm polynomials must have nonnegative exponents")
        out = out + (sp_image ** i) * (sm_image ** j) * c
    return out


def express_in_sigma(p: LaurentPoly) -> LaurentPoly:
    """Rewrite a symmetric quotient-ring element as a polynomial in sp, sm.

    Raises NotSymmetric when the permutation check fails and NotInSubring
    when no polynomial in sp, sm reproduces the element.  Round-trips with
    embed_sigma.
    """
    p = normalize_qring(p) if "q3" in p.vars else p.with_vars(("q1", "q2"))
    if not is_symmetric_qring(p):
        raise NotSymmetric(f"{p} is not symmetric under the q-permutations")
    residue = p
    result = {}
    while not residue.is_zero():
        # leading monomial under (e1 desc, e2 desc); the image of sp^a*sm^b
        # has unique leading monomial q1^(2a+2b) q2^(2b)
        e1, e2 = max(residue.terms, key=lambda e: (e[0], e[1]))
        c = residue.terms[(e1, e2)]
        if e1 < e2 or e2 < 0 or e1 % 2 or e2 % 2:
            raise NotInSubring(f"leading monomial q1^{e1} q2^{e2} is not reachable from sp, sm")
        b = e2 // 2
        a = (e1 - e2) // 2
        result[(a, b)] = result.get((a, b), 0) + c
        residue = residue - embed_sigma(LaurentPoly(("sp", "sm"), {(a, b): c}))
    return LaurentPoly(("sp", "sm"), result)


def sigma_swap(p: LaurentPoly) -> LaurentPoly:
    """Exchange sp and sm in every term; an involution."""
    p = p.with_vars(("sp", "sm"))
    return LaurentPoly(("sp", "sm"), {(j, i): c for (i, j), c in p.terms.items()})


def validate_sigma_poly(p: LaurentPoly):
    """Enforce the sp/sm subring invariants (nonnegative exponents, dyadic coefficients)."""
    p = p.with_vars(("sp", "sm"))
    for exps, c in p.terms.items():
        if any(e < 0 for e in exps):
            raise ValidationError(f"negative exponent in sigma polynomial term {exps}")
        den = Fraction(c).denominator
        if den & (den - 1):
            raise ValidationError(f"coefficient {c} is not dyadic")
    return p


def specialize(p, assignment) -> RatFunc:
    """Apply the ring homomorphism sending each variable to a rational function.

    ``p`` may be a LaurentPoly or a RatFunc; every variable of ``p`` must be
    assigned.  Negative exponents of a variable sent to zero raise
    DivisionByZero.
    """
    if isinstance(p, RatFunc):
        den = specialize(p.den, assignment)
        if den.is_zero():
            raise DivisionByZero("denominator specializes to zero")
        return specialize(p.num, assignment) / den
    missing = [v for v in p.vars if v not in assignment and any(e[p.vars.index(v)] for e in p.terms)]
    if missing:
        raise ValidationError(f"no assignment for variables {missing}")
    values = {}
    for name in p.vars:
        if name in assignment:
            val = assignment[name]
            if not isinstance(val, RatFunc):
                val = RatFunc(val if isinstance(val, LaurentPoly) else LaurentPoly.const(val))
            values[name] = val
    total = RatFunc(0)
    pow_cache = {}
    for exps, c in p.terms.items():
        term = RatFunc(c)
        for name, e in zip(p.vars, exps):
            if e == 0:
                continue
            key = (name, e)
            if key not in pow_cache:
                base = values[name]
                if e < 0 and base.is_zero():
                    raise DivisionByZero(f"{name} -> 0 with exponent {e}")
                pow_cache[key] = base ** e
            term = term * pow_cache[key]
        total = total + term
    return total


def exact_div_linear(p: RatFunc, var_pair=("a", "s")):
    """Divide by (a - s) exactly, reporting success.

    Returns (quotient, True) when (a - s) divides p as a rational function
    with no pole left along a = s (after cancelling common (a - s) factors
    of the stored numerator and denominator), so that evaluation at a = s
    is well defined.  Otherwise returns (remainder witness, False), the
    witness being the input evaluated on a = s.
    """
    x, y = var_pair
    num, den = align(p.num, p.den)
    merged = tuple(sorted(set(num.vars) | {x, y}, key=_ALPHABET_INDEX.get))
    num = num.with_vars(merged)
    den = den.with_vars(merged)
    lin = (LaurentPoly.var(x) - LaurentPoly.var(y)).with_vars(merged)
    while True:
        qn = exact_divide(num, lin)
        qd = exact_divide(den, lin)
        if qn is None or qd is None:
            break
        num, den = qn, qd
    qn = exact_divide(num, lin)
    den_on = _collapse_linear(den, x, y)
    if qn is None or den_on.is_zero():
        witness_den = den_on if not den_on.is_zero() else LaurentPoly.const(1)
        return RatFunc(_collapse_linear(num, x, y), witness_den), False
    return RatFunc(qn, den), True


def _collapse_linear(p: LaurentPoly, x, y):
    """Substitute x = y (the x-exponent is added onto the y-exponent)."""
    if x not in p.vars:
        return p
    merged = tuple(sorted(set(p.vars) | {y}, key=_ALPHABET_INDEX.get))
    p = p.with_vars(merged)
    ix = merged.index(x)
    iy = merged.index(y)
    keep = tuple(j for j in range(len(merged)) if j != ix)
    pos_y = keep.index(iy)
    out = {}
    for exps, c in p.terms.items():
        vec = [exps[j] for j in keep]
        vec[pos_y] += exps[ix]
        key = tuple(vec)
        s = out.get(key, 0) + c
        if s == 0:
            out.pop(key, None)
        else:
            out[key] = s
    return LaurentPoly(tuple(merged[j] for j in keep), out)


def substitute_equal(p: RatFunc, x, y) -> RatFunc:
    """Evaluate a rational function on the locus x = y."""
    den = _collapse_linear(p.den, x, y)
    if den.is_zero():
        raise DivisionByZero(f"denominator vanishes identically on {x}={y}")
    return RatFunc(_collapse_linear(p.num, x, y), den)


def limit_order2_at_v1(p: RatFunc) -> RatFunc:
    """Exact value of (p - 1) / (v - 1/v)^2 at v = 1.

    Requires (p - 1) to vanish to order >= 2 at v = 1; otherwise raises
    OrderTooLow carrying the surviving low-order term.  The result is a
    rational function of z alone (a Laurent polynomial whenever the input
    denominator is a unit at v = 1).
    """
    num, den = align(p.num, p.den)
    if "v" not in num.vars:
        num = num.with_vars(tuple(sorted(set(num.vars) | {"v"}, key=_ALPHABET_INDEX.get)))
        den = den.with_vars(num.vars)
    vminus1 = LaurentPoly(("v",), {(1,): 1, (0,): -1}).with_vars(num.vars)
    b_num = num - den
    # cancel common (v-1) factors so a removable singularity is not fatal
    while True:
        qn = exact_divide(b_num, vminus1)
        qd = exact_divide(den, vminus1)
        if qn is not None and qd is not None:
            b_num, den = qn, qd
        else:
            break
    den_at_1 = den.subs_int("v", 1)
    if den_at_1.is_zero():
        raise OrderTooLow("denominator vanishes at v=1", surviving=den)
    q1_ = exact_divide(b_num, vminus1)
    if q1_ is None:
        raise OrderTooLow("(p-1) does not vanish at v=1",
                          surviving=RatFunc(b_num.subs_int("v", 1), den_at_1))
    q2_ = exact_divide(q1_, vminus1)
    if q2_ is None:
        raise OrderTooLow("(p-1) vanishes only to first order at v=1",
                          surviving=RatFunc(q1_.subs_int("v", 1), den_at_1))
    # (p-1)/(v - 1/v)^2 = q2 * v^2 / (den * (v+1)^2); evaluate at v=1
    result_num = q2_.subs_int("v", 1)
    return RatFunc(result_num, den_at_1 * 4)


# --------------------------------------------------------------------------
# Truncated series in the expansion variable d (with h fixed to 1).
# --------------------------------------------------------------------------

DELTA_DEFAULT_ORDER = 3


class DeltaSeries:
    """A truncated power series in d with LaurentPoly-in-z coefficients.

    ``order`` is the truncation: exponents 0..order-1 are stored, higher
    ones are dropped.  Arithmetic truncates consistently.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order, coeffs=None):
        if order < 1:
            raise ValidationError("series order must be >= 1")
        self.order = order
        clean = {}
        for k, c in (coeffs or {}).items():
            if not 0 <= k:
                raise ValidationError(f"negative series exponent {k}")
            if k >= order:
                continue
            if isinstance(c, (int, Fraction)):
                c = LaurentPoly.const(c, ("z",))
            c = c.with_vars(("z",)) if c.vars != ("z",) else c
            if not c.is_zero():
                clean[k] = c
        self.coeffs = clean

    @staticmethod
    def const(c, order=DELTA_DEFAULT_ORDER):
        return DeltaSeries(order, {0: LaurentPoly.const(c, ("z",))})

    def coefficient(self, k):
        return self.coeffs.get(k, LaurentPoly(("z",), {}))

    def _common(self, other):
        if isinstance(other, (int, Fraction, LaurentPoly)):
            other = DeltaSeries(self.order, {0: other if isinstance(other, LaurentPoly) else LaurentPoly.const(other, ("z",))})
        if not isinstance(other, DeltaSeries):
            return None
        return other

    def __add__(self, other):
        other = self._common(other)
        if other is None:
            return NotImplemented
        order = min(self.order, other.order)
        out = {}
        for k in range(order):
            c = self.coefficient(k) + other.coefficient(k)
            if not c.is_zero():
                out[k] = c
        return DeltaSeries(order, out)

    __radd__ = __add__

    def __neg__(self):
        return DeltaSeries(self.order, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._common(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._common(other)
        if other is None:
            return NotImplemented
        order = min(self.order, other.order)
        out = {}
        for i, ci in self.coeffs.items():
            for j, cj in other.coeffs.items():
                if i + j >= order:
                    continue
                prod = ci * cj
                if i + j in out:
                    out[i + j] = out[i + j] + prod
                else:
                    out[i + j] = prod
        return DeltaSeries(order, out)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by d^k (dropping overflow)."""
        return DeltaSeries(self.order, {i + k: c for i, c in self.coeffs.items() if i + k < self.order})

    def __eq__(self, other):
        other = self._common(other)
        if other is None:
            return NotImplemented
        order = min(self.order, other.order)
        return all(self.coefficient(k) == other.coefficient(k) for k in range(order))

    def __hash__(self):
        return hash((self.order, tuple(sorted((k, c.key()) for k, c in self.coeffs.items()))))

    def to_text(self):
        if not self.coeffs:
            return f"0 + O(d^{self.order})"
        parts = []
        for k in sorted(self.coeffs):
            c = poly_to_text(self.coeffs[k])
            parts.append(f"({c})" + ("" if k == 0 else f"*d^{k}" if k > 1 else "*d"))
        return " + ".join(parts) + f" + O(d^{self.order})"

    def to_json(self):
        return {"order": self.order,
                "coeffs": {str(k): poly_to_json(c) for k, c in sorted(self.coeffs.items())}}

    def __repr__(self):
        return f"DeltaSeries({self.to_text()!r})"

    def __str__(self):
        return self.to_text()


def series_from_json(obj):
    try:
        return DeltaSeries(int(obj["order"]),
                           {int(k): poly_from_json(c) for k, c in obj["coeffs"].items()})
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad series JSON: {exc}") from exc


def _exp_series(rate: Fraction, order: int) -> DeltaSeries:
    """exp(rate * d) truncated."""
    out = {}
    term = Fraction(1)
    for k in range(order):
        if term != 0:
            out[k] = LaurentPoly.const(term, ("z",))
        term = term * rate / (k + 1)
    return DeltaSeries(order, out)


def series_exp_v(p: RatFunc, order=DELTA_DEFAULT_ORDER) -> DeltaSeries:
    """Expand a rational function of (v, z) by substituting v = exp(-d/2).

    z stays formal.  Raises PoleAtOne when the denominator vanishes at
    v = 1, and refuses denominators whose value at v = 1 is not a unit
    monomial in z (the coefficients would leave the Laurent ring).
    """
    num, den = align(p.num, p.den)
    target = tuple(sorted(set(num.vars) | {"v", "z"}, key=_ALPHABET_INDEX.get))
    if set(target) - {"v", "z"}:
        raise ValidationError(f"series_exp_v expects variables in (v, z); got {num.vars}")
    num = num.with_vars(("v", "z"))
    den = den.with_vars(("v", "z"))
    if den.subs_int("v", 1).is_zero():
        raise PoleAtOne("denominator vanishes at v=1")

    def expand(poly):
        total = DeltaSeries(order, {})
        cache = {}
        for (ev, ez), c in poly.terms.items():
            if ev not in cache:
                cache[ev] = _exp_series(Fraction(-ev, 2), order)
            mono = LaurentPoly(("z",), {(ez,): c})
            contrib = DeltaSeries(order, {k: coeff * mono for k, coeff in cache[ev].coeffs.items()})
            total = total + contrib
        return total

    num_s = expand(num)
    den_s = expand(den)
    return _series_divide(num_s, den_s)


def _series_divide(a: DeltaSeries, b: DeltaSeries) -> DeltaSeries:
    order = min(a.order, b.order)
    lead = b.coefficient(0)
    if lead.is_zero():
        raise PoleAtOne("series division by a series with zero constant term")
    if len(lead.terms) != 1:
        raise ValidationError(
            "series denominator is not a unit at v=1; coefficients would not be Laurent in z")
    (exps, c), = lead.terms.items()
    inv_lead = LaurentPoly(("z",), {tuple(-e for e in exps): _norm_coeff(Fraction(1) / Fraction(c))})
    out = {}
    residue = DeltaSeries(order, dict(a.coeffs))
    for k in range(order):
        ck = residue.coefficient(k) * inv_lead
        if not ck.is_zero():
            out[k] = ck
            sub = DeltaSeries(order, {k: ck}) * b
            residue = residue - sub
    return DeltaSeries(order, out)


def psi_series(p: LaurentPoly, order=2) -> DeltaSeries:
    """Truncated image of an sp/sm polynomial under the degeneration map.

    Substitutes sp -> (z^2+3) - (d/2) z^2 and sm -> (z^2+3) + (d/2) z^2,
    computed modulo d^order (default d^2), with the series variable h set
    to 1 throughout.
    """
    p = validate_sigma_poly(p)
    base = LaurentPoly(("z",), {(2,): 1, (0,): 3})
    half_z2 = LaurentPoly(("z",), {(2,): Fraction(1, 2)})
    sp_img = DeltaSeries(order, {0: base, 1: -half_z2})
    sm_img = DeltaSeries(order, {0: base, 1: half_z2})
    total = DeltaSeries(order, {})
    pow_cache = {}

    def power(img, tag, k):
        key = (tag, k)
        if key not in pow_cache:
            acc = DeltaSeries.const(1, order)
            for _ in range(k):
                acc = acc * img
            pow_cache[key] = acc
        return pow_cache[key]

    for (i, j), c in p.terms.items():
        term = power(sp_img, "p", i) * power(sm_img, "m", j)
        total = total + DeltaSeries(order, {k: v * c for k, v in term.coeffs.items()})
    return total
