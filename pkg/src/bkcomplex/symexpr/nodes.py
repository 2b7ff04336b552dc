"""Expression tree nodes.

Nodes are immutable and hashable. Constants are exact Gaussian rationals
(a pair of :class:`fractions.Fraction`); the transcendental constants ``pi``
and ``e`` are kept as named atoms so that nothing is rounded before
evaluation.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number

VARIABLES = ("x", "y", "t")
NAMED_CONSTANTS = ("pi", "e")
UNARY_FUNCTIONS = ("exp", "log", "sin", "cos", "tan", "sqrt", "conj", "re", "im")
UNARY_OPS = UNARY_FUNCTIONS + ("neg",)
BINARY_OPS = ("add", "sub", "mul", "div", "pow")


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        if v != v or v in (float("inf"), float("-inf")):
            raise ValueError(f"non-finite constant {v!r}")
        # shortest decimal repr keeps user-facing parameters like 0.7 as 7/10
        return Fraction(repr(v))
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot build a constant from {type(v).__name__}")


class Expr:
    """Base class; subclasses define ``_fields``."""

    __slots__ = ("_hash",)
    _fields: tuple = ()

    def _key(self):
        return tuple(getattr(self, f) for f in self._fields)

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        return hash(self) == hash(other) and self._key() == other._key()

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __repr__(self):
        return f"Expr({self})"

    def __str__(self):
        from .printer import to_text

        return to_text(self)

    # operator sugar; plain numbers are promoted to constants
    def __add__(self, other):
        return Binary("add", self, as_expr(other))

    def __radd__(self, other):
        return Binary("add", as_expr(other), self)

    def __sub__(self, other):
        return Binary("sub", self, as_expr(other))

    def __rsub__(self, other):
        return Binary("sub", as_expr(other), self)

    def __mul__(self, other):
        return Binary("mul", self, as_expr(other))

    def __rmul__(self, other):
        return Binary("mul", as_expr(other), self)

    def __truediv__(self, other):
        return Binary("div", self, as_expr(other))

    def __rtruediv__(self, other):
        return Binary("div", as_expr(other), self)

    def __pow__(self, other):
        return Binary("pow", self, as_expr(other))

    def __rpow__(self, other):
        return Binary("pow", as_expr(other), self)

    def __neg__(self):
        return Unary("neg", self)

    def children(self) -> tuple[Expr, ...]:
        return ()

    def free_variables(self) -> frozenset[str]:
        out = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if isinstance(node, Var):
                out.add(node.name)
            stack.extend(node.children())
        return frozenset(out)


def _init(obj, **kw):
    for k, v in kw.items():
        object.__setattr__(obj, k, v)


class Const(Expr):
    """Exact Gaussian rational ``re + im*i``."""

    __slots__ = ("re", "im")
    _fields = ("re", "im")

    def __init__(self, re=0, im=0):
        _init(self, re=_to_fraction(re), im=_to_fraction(im))

    @classmethod
    def of(cls, value) -> Const:
        if isinstance(value, Const):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        return cls(value, 0)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @property
    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def __complex__(self):
        return complex(float(self.re), float(self.im))


class NamedConst(Expr):
    __slots__ = ("name",)
    _fields = ("name",)

    def __init__(self, name: str):
        if name not in NAMED_CONSTANTS:
            raise ValueError(f"unknown named constant {name!r}")
        _init(self, name=name)


class Var(Expr):
    __slots__ = ("name",)
    _fields = ("name",)

    def __init__(self, name: str):
        if name not in VARIABLES:
            raise ValueError(f"unknown variable {name!r}; expected one of {VARIABLES}")
        _init(self, name=name)


class Unary(Expr):
    __slots__ = ("op", "arg")
    _fields = ("op", "arg")

    def __init__(self, op: str, arg: Expr):
        if op not in UNARY_OPS:
            raise ValueError(f"unknown unary operation {op!r}")
        _init(self, op=op, arg=as_expr(arg))

    def children(self):
        return (self.arg,)


class Binary(Expr):
    __slots__ = ("op", "left", "right")
    _fields = ("op", "left", "right")

    def __init__(self, op: str, left: Expr, right: Expr):
        if op not in BINARY_OPS:
            raise ValueError(f"unknown binary operation {op!r}")
        _init(self, op=op, left=as_expr(left), right=as_expr(right))

    def children(self):
        return (self.left, self.right)


class IfPos(Expr):
    """``then`` where ``guard > 0`` (strictly), else ``other``."""

    __slots__ = ("guard", "then", "other")
    _fields = ("guard", "then", "other")

    def __init__(self, guard: Expr, then: Expr, other: Expr):
        _init(self, guard=as_expr(guard), then=as_expr(then), other=as_expr(other))

    def children(self):
        return (self.guard, self.then, self.other)


def as_expr(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, Number) or isinstance(value, Fraction):
        return Const.of(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


x = Var("x")
y = Var("y")
t = Var("t")
I = Const(0, 1)
ZERO = Const(0)
ONE = Const(1)
PI = NamedConst("pi")
E = NamedConst("e")


def _unary(op):
    def f(arg):
        return Unary(op, as_expr(arg))

    f.__name__ = op
    f.__doc__ = f"Build ``{op}(arg)``."
    return f


exp = _unary("exp")
log = _unary("log")
sin = _unary("sin")
cos = _unary("cos")
tan = _unary("tan")
sqrt = _unary("sqrt")
conj = _unary("conj")
re = _unary("re")
im = _unary("im")


def ifpos(guard, then, other) -> IfPos:
    return IfPos(guard, then, other)


def substitute(e: Expr, mapping: dict[str, Expr]) -> Expr:
    """Replace variables by expressions, simultaneously."""
    mapping = {k: as_expr(v) for k, v in mapping.items()}
    cache: dict[Expr, Expr] = {}

    def go(node):
        hit = cache.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Var):
            out = mapping.get(node.name, node)
        elif isinstance(node, Unary):
            out = Unary(node.op, go(node.arg))
        elif isinstance(node, Binary):
            out = Binary(node.op, go(node.left), go(node.right))
        elif isinstance(node, IfPos):
            out = IfPos(go(node.guard), go(node.then), go(node.other))
        else:
            out = node
        cache[node] = out
        return out

    return go(e)


def node_count(e: Expr) -> int:
    n, stack = 0, [e]
    while stack:
        node = stack.pop()
        n += 1
        stack.extend(node.children())
    return n
