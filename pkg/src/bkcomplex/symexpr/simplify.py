"""Rewrite-to-normal-form simplifier.

Expressions are flattened into a sum of monomials ``c * prod(atom^q)`` with
exact Gaussian-rational coefficients ``c`` and rational exponents ``q``.
Atoms are variables, named constants, function applications with simplified
arguments, guards, and powers that cannot be distributed.  Like terms are
collected, equal atoms have their exponents added, and all ``exp`` factors
of a monomial are merged into one.  The rewriting terminates because every
pass strictly reduces the tree or only rebuilds already-normal atoms.

This is not a canonical form for the whole exp/log/trig algebra; identities
such as ``sin(x)^2 + cos(x)^2 = 1`` are left to randomized comparison.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .nodes import (
    ONE,
    ZERO,
    Binary,
    Const,
    Expr,
    IfPos,
    NamedConst,
    Unary,
    Var,
)

Coeff = tuple  # (Fraction re, Fraction im)
Mono = tuple  # ((atom, Fraction exponent), ...) sorted by atom key

_C0 = (Fraction(0), Fraction(0))
_C1 = (Fraction(1), Fraction(0))

# expansion limits keep pathological inputs from blowing up
_MAX_EXPAND_POWER = 6
_MAX_EXPAND_TERMS = 400


def _cadd(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _cmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _cinv(a):
    d = a[0] * a[0] + a[1] * a[1]
    return (a[0] / d, -a[1] / d)


def _cpow(a, n: int):
    if n < 0:
        return _cpow(_cinv(a), -n)
    out = _C1
    while n:
        if n & 1:
            out = _cmul(out, a)
        a = _cmul(a, a)
        n >>= 1
    return out


def _is_c0(a):
    return a[0] == 0 and a[1] == 0


class _Simplifier:
    def __init__(self, positive: frozenset[str]):
        self.positive = positive
        self.keys: dict[Expr, str] = {}
        self.cache: dict[Expr, dict] = {}

    # ----- ordering -------------------------------------------------------
    def key(self, atom: Expr) -> str:
        k = self.keys.get(atom)
        if k is None:
            k = str(atom)
            self.keys[atom] = k
        return k

    def mono_key(self, mono: Mono):
        return tuple((self.key(a), q) for a, q in mono)

    # ----- polynomial arithmetic -----------------------------------------
    @staticmethod
    def const(c) -> dict:
        return {} if _is_c0(c) else {(): c}

    @staticmethod
    def atom(a: Expr, q=Fraction(1)) -> dict:
        return {((a, Fraction(q)),): _C1}

    def add(self, p: dict, q: dict) -> dict:
        out = dict(p)
        for m, c in q.items():
            s = _cadd(out.get(m, _C0), c)
            if _is_c0(s):
                out.pop(m, None)
            else:
                out[m] = s
        return out

    @staticmethod
    def scale(p: dict, c) -> dict:
        if _is_c0(c):
            return {}
        return {m: _cmul(v, c) for m, v in p.items()}

    def mono_mul(self, m1: Mono, m2: Mono) -> Mono:
        exps: dict[Expr, Fraction] = {}
        for a, q in m1 + m2:
            exps[a] = exps.get(a, Fraction(0)) + q
        items = [(a, q) for a, q in exps.items() if q != 0]
        items.sort(key=lambda aq: self.key(aq[0]))
        return tuple(items)

    def normalize_term(self, mono: Mono, c) -> dict:
        """Merge the ``exp`` factors of one monomial into a single atom.

        Constant roots raised to a power that makes them rational are folded
        into the coefficient.
        """
        folded = []
        for a, q in mono:
            if isinstance(a, Binary) and a.op == "pow" and isinstance(a.left, Const) and isinstance(a.right, Const) and a.right.is_real:
                n = a.right.re * q
                if n.denominator == 1:
                    c = _cmul(c, _cpow((a.left.re, a.left.im), int(n)))
                    continue
            folded.append((a, q))
        if len(folded) != len(mono):
            mono = tuple(folded)
        exps = [
            (a, q)
            for a, q in mono
            if isinstance(a, Unary) and a.op == "exp" and (q.denominator == 1 or self.is_real(a.arg))
        ]
        if not exps or (len(exps) == 1 and exps[0][1] == 1):
            return {mono: c}
        rest = tuple(aq for aq in mono if aq not in exps)
        arg: dict = {}
        for a, q in exps:
            arg = self.add(arg, self.scale(self.poly(a.arg), (q, Fraction(0))))
        return self.mul({rest: c}, self.make_exp(arg))

    def mul(self, p: dict, q: dict) -> dict:
        out: dict = {}
        for m1, c1 in p.items():
            for m2, c2 in q.items():
                term = self.normalize_term(self.mono_mul(m1, m2), _cmul(c1, c2))
                out = self.add(out, term)
        return out

    def power(self, p: dict, q: Fraction) -> dict:
        if q == 0:
            # 0^0 = 1, as in floating point
            return self.const(_C1)
        if not p:
            if q > 0:
                return {}
            return self.atom(Binary("pow", Const(0), Const(q)))
        if len(p) == 1:
            (mono, c), = p.items()
            if q.denominator == 1:
                n = int(q)
                m = tuple((a, e * n) for a, e in mono)
                return self.normalize_term(m, _cpow(c, n))
            single = c == _C1 and len(mono) == 1 and mono[0][1] == 1
            all_positive = c[1] == 0 and c[0] > 0 and all(self.is_positive(a) for a, _ in mono)
            if single or all_positive:
                out = self.normalize_term(tuple((a, e * q) for a, e in mono), _C1)
                if c != _C1:
                    out = self.mul(out, self.atom(Binary("pow", Const(c[0], c[1]), Const(q))))
                return out
        elif q.denominator == 1 and 0 < q <= _MAX_EXPAND_POWER and len(p) ** int(q) <= _MAX_EXPAND_TERMS:
            out = self.const(_C1)
            for _ in range(int(q)):
                out = self.mul(out, p)
            return out
        return self.atom(self.rebuild(p), q)

    # ----- predicates ----------------------------------------------------
    def is_real(self, e: Expr) -> bool:
        if isinstance(e, Const):
            return e.im == 0
        if isinstance(e, (NamedConst, Var)):
            return True
        if isinstance(e, Unary):
            if e.op in ("re", "im"):
                return True
            if e.op in ("log", "sqrt"):
                return self.is_positive(e.arg)
            return self.is_real(e.arg)
        if isinstance(e, Binary):
            if e.op == "pow":
                if isinstance(e.right, Const) and e.right.is_integer:
                    return self.is_real(e.left)
                return self.is_positive(e.left) and self.is_real(e.right)
            return self.is_real(e.left) and self.is_real(e.right)
        if isinstance(e, IfPos):
            return self.is_real(e.then) and self.is_real(e.other)
        return False

    def is_positive(self, e: Expr) -> bool:
        if isinstance(e, Const):
            return e.im == 0 and e.re > 0
        if isinstance(e, NamedConst):
            return True
        if isinstance(e, Var):
            return e.name in self.positive
        if isinstance(e, Unary):
            if e.op == "exp":
                return self.is_real(e.arg)
            if e.op == "sqrt":
                return self.is_positive(e.arg)
            return False
        if isinstance(e, Binary):
            if e.op in ("add", "mul", "div"):
                return self.is_positive(e.left) and self.is_positive(e.right)
            if e.op == "pow":
                return self.is_positive(e.left) and self.is_real(e.right)
        return False

    # ----- conversion ----------------------------------------------------
    def make_exp(self, arg: dict) -> dict:
        out = self.const(_C1)
        rest: dict = {}
        for mono, c in arg.items():
            if len(mono) == 1 and mono[0][1] == 1 and isinstance(mono[0][0], Unary) and mono[0][0].op == "log" and c[1] == 0 and c[0].denominator == 1:
                # exp(n log f) = f^n for integer n
                out = self.mul(out, self.power(self.poly(mono[0][0].arg), c[0]))
            else:
                rest[mono] = c
        if rest:
            out = self.mul(out, self.atom(Unary("exp", self.rebuild(rest))))
        return out

    def make_log(self, arg: dict) -> dict:
        if arg == {(): _C1}:
            return {}
        if len(arg) == 1:
            (mono, c), = arg.items()
            if c == _C1 and len(mono) == 1 and mono[0][1] == 1:
                a = mono[0][0]
                if isinstance(a, Unary) and a.op == "exp" and self.is_real(a.arg):
                    return self.poly(a.arg)
                if isinstance(a, NamedConst) and a.name == "e":
                    return self.const(_C1)
            trivial = c == _C1 and len(mono) == 1 and mono[0][1] == 1
            if not trivial and c[1] == 0 and c[0] > 0 and mono and all(self.is_positive(a) for a, _ in mono):
                out: dict = {}
                if c != _C1:
                    out = self.atom(Unary("log", Const(c[0])))
                for a, q in mono:
                    out = self.add(out, self.scale(self.make_log(self.atom(a)), (q, Fraction(0))))
                return out
        return self.atom(Unary("log", self.rebuild(arg)))

    def poly(self, e: Expr) -> dict:
        hit = self.cache.get(e)
        if hit is not None:
            return hit
        out = self._poly(e)
        self.cache[e] = out
        return out

    def _poly(self, e: Expr) -> dict:
        if isinstance(e, Const):
            return self.const((e.re, e.im))
        if isinstance(e, (Var, NamedConst)):
            return self.atom(e)
        if isinstance(e, IfPos):
            g = self.rebuild(self.poly(e.guard))
            if isinstance(g, Const):
                return self.poly(e.then if g.re > 0 else e.other)
            return self.atom(IfPos(g, self.rebuild(self.poly(e.then)), self.rebuild(self.poly(e.other))))
        if isinstance(e, Binary):
            a = self.poly(e.left)
            if e.op == "add":
                return self.add(a, self.poly(e.right))
            if e.op == "sub":
                return self.add(a, self.scale(self.poly(e.right), (Fraction(-1), Fraction(0))))
            if e.op == "mul":
                return self.mul(a, self.poly(e.right))
            if e.op == "div":
                b = self.poly(e.right)
                if not b:
                    # undefined everywhere; keep it visible rather than guess
                    return self.atom(Binary("div", self.rebuild(a), Const(0)))
                return self.mul(a, self.power(b, Fraction(-1)))
            if e.op == "pow":
                b = self.rebuild(self.poly(e.right))
                if isinstance(b, Const) and b.im == 0:
                    return self.power(a, b.re)
                base = self.rebuild(a)
                if isinstance(base, NamedConst) and base.name == "e":
                    return self.make_exp(self.poly(b))
                if isinstance(base, Const) and base == ONE:
                    return self.const(_C1)
                return self.atom(Binary("pow", base, b))
        if isinstance(e, Unary):
            a = self.poly(e.arg)
            op = e.op
            if op == "neg":
                return self.scale(a, (Fraction(-1), Fraction(0)))
            if op == "exp":
                return self.make_exp(a)
            if op == "log":
                return self.make_log(a)
            arg = self.rebuild(a)
            folded = _fold(op, arg)
            if folded is not None:
                return self.poly(folded)
            if op in ("conj", "re") and self.is_real(arg):
                return a
            if op == "im" and self.is_real(arg):
                return {}
            return self.atom(Unary(op, arg))
        raise TypeError(f"unknown node {type(e).__name__}")

    def rebuild(self, p: dict) -> Expr:
        if not p:
            return ZERO
        if len(p) == 1 and () in p:
            c = p[()]
            return Const(c[0], c[1])
        terms = sorted(p.items(), key=lambda mc: (len(mc[0]) == 0, self.mono_key(mc[0])))
        out = None
        for mono, c in terms:
            negative = c[1] == 0 and c[0] < 0
            term = _term(mono, (-c[0], c[1]) if negative else c)
            if out is None:
                out = Unary("neg", term) if negative else term
            else:
                out = Binary("sub" if negative else "add", out, term)
        return out


def _factor(atom: Expr, q: Fraction) -> Expr:
    return atom if q == 1 else Binary("pow", atom, Const(q))


def _term(mono: Mono, c) -> Expr:
    num = [_factor(a, q) for a, q in mono if q > 0]
    den = [_factor(a, -q) for a, q in mono if q < 0]
    parts = num if c == _C1 and num else [Const(c[0], c[1])] + num
    out = parts[0]
    for f in parts[1:]:
        out = Binary("mul", out, f)
    if den:
        d = den[0]
        for f in den[1:]:
            d = Binary("mul", d, f)
        out = Binary("div", out, d)
    return out


def _fold(op: str, arg: Expr):
    """Exact evaluation of a function at a constant, when it stays exact."""
    if not isinstance(arg, Const):
        return None
    if op == "conj":
        return Const(arg.re, -arg.im)
    if op == "re":
        return Const(arg.re)
    if op == "im":
        return Const(arg.im)
    if arg.is_zero:
        return {"sin": ZERO, "cos": ONE, "tan": ZERO, "sqrt": ZERO}.get(op)
    if op == "sqrt" and arg.im == 0 and arg.re > 0:
        n, d = arg.re.numerator, arg.re.denominator
        rn, rd = math.isqrt(n), math.isqrt(d)
        if rn * rn == n and rd * rd == d:
            return Const(Fraction(rn, rd))
    return None


def simplify(e: Expr, positive=()) -> Expr:
    """Return an expression equal to ``e`` in normal form.

    ``positive`` names variables that may be assumed strictly positive, which
    enables ``log`` splitting and fractional power collection on them.
    """
    s = _Simplifier(frozenset(positive))
    return s.rebuild(s.poly(e))


def is_zero(e: Expr, positive=()) -> bool:
    """True when ``e`` simplifies to the constant 0."""
    return simplify(e, positive) == ZERO
