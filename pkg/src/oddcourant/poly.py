"""Sparse multivariate polynomials with exact coefficients, plus a text parser.

Variables are named ``x1 .. xd``.  A polynomial is a mapping from exponent
tuples of length ``d`` to nonzero coefficients (``Fraction`` or
``GaussianRational``).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .scalars import GaussianRational, as_scalar, conj, imag_part, real_part

__all__ = [
    "Polynomial",
    "PolynomialSyntaxError",
    "parse_polynomial",
    "const",
    "var",
]

Exponent = Tuple[int, ...]


class Polynomial:
    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | None = None):
        self.nvars = nvars
        clean: Dict[Exponent, object] = {}
        if terms:
            for exp, c in terms.items():
                if len(exp) != nvars:
                    raise ValueError(f"exponent {exp} does not match {nvars} variables")
                c = as_scalar(c)
                if c != 0:
                    clean[tuple(exp)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exponent, object]) -> "Polynomial":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # -- coercion -----------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        c = as_scalar(other)
        if c == 0:
            return Polynomial._raw(self.nvars, {})
        return Polynomial._raw(self.nvars, {(0,) * self.nvars: c})

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        o = self._coerce(other)
        if not o.terms:
            return self
        if not self.terms:
            return o
        out = dict(self.terms)
        for e, c in o.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v == 0:
                    del out[e]
                else:
                    out[e] = v
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = as_scalar(other)
            if c == 0:
                return Polynomial._raw(self.nvars, {})
            return Polynomial._raw(self.nvars, {e: v * c for e, v in self.terms.items()})
        o = self._coerce(other)
        out: Dict[Exponent, object] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial._raw(self.nvars, {e: c for e, c in out.items() if c != 0})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if other.is_constant():
                other = other.constant_term()
            else:
                raise TypeError("only division by nonzero scalars is supported")
        c = as_scalar(other)
        if c == 0:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (Fraction(1) / c if not isinstance(c, GaussianRational) else GaussianRational(1) / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        out = self._coerce(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        try:
            o = self._coerce(other)
        except (TypeError, ValueError):
            return False
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and (0,) * self.nvars in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    # -- calculus and evaluation --------------------------------------------

    def diff(self, i: int) -> "Polynomial":
        """Partial derivative with respect to ``x_{i+1}`` (0-based ``i``)."""
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                out[ne] = c * k
        return Polynomial._raw(self.nvars, out)

    def __call__(self, point: Sequence) -> object:
        return self.evaluate(point)

    def evaluate(self, point: Sequence):
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        total = Fraction(0)
        for e, c in self.terms.items():
            t = c
            for x, k in zip(point, e):
                if k:
                    t = t * as_scalar(x) ** k
            total = total + t
        return total

    def conjugate(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {e: conj(c) for e, c in self.terms.items()})

    def real(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: real_part(c) for e, c in self.terms.items()})

    def imag(self) -> "Polynomial":
        return Polynomial(self.nvars, {e: imag_part(c) for e, c in self.terms.items()})

    # -- printing -----------------------------------------------------------

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"


def const(nvars: int, c) -> Polynomial:
    return Polynomial(nvars, {(0,) * nvars: c})


def var(nvars: int, i: int) -> Polynomial:
    """The coordinate function ``x_{i+1}`` (0-based ``i``)."""
    e = [0] * nvars
    e[i] = 1
    return Polynomial._raw(nvars, {tuple(e): Fraction(1)})


def _monomial_key(e: Exponent):
    return (-sum(e), tuple(-k for k in e))


def format_polynomial(p: Polynomial) -> str:
    """Render in the instance-file grammar; rational polynomials round-trip."""
    if not p.terms:
        return "0"
    pieces = []
    for e in sorted(p.terms, key=_monomial_key):
        c = p.terms[e]
        mono = "*".join(
            f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
        )
        if isinstance(c, GaussianRational) and c.im != 0:
            coeff, neg = str(c), False
        else:
            c = real_part(c)
            neg = c < 0
            coeff = str(abs(c))
        if mono:
            body = mono if coeff == "1" else f"{coeff}*{mono}"
        else:
            body = coeff
        pieces.append(("-" if neg else "+", body))
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# -- parser -------------------------------------------------------------------


class PolynomialSyntaxError(ValueError):
    """Raised for malformed polynomial text; ``pos`` is the 0-based offset."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("int", int(text[i:j]), i))
            i = j
        elif ch == "x":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise PolynomialSyntaxError("variable name needs an index", text, i)
            tokens.append(("var", int(text[i + 1:j]), i))
            i = j
        elif ch in "+-*/^()":
            tokens.append((ch, ch, i))
            i += 1
        else:
            raise PolynomialSyntaxError(f"unexpected character {ch!r}", text, i)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    # expr := term (('+'|'-') term)*; term := factor ('*' factor)*;
    # factor := rational | var | factor '^' uint | '(' expr ')'
    # A leading sign is accepted on the first term and after '('.

    def __init__(self, text: str, nvars: int):
        self.text = text
        self.nvars = nvars
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise PolynomialSyntaxError(f"expected {kind!r}, found {what}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self) -> Polynomial:
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise PolynomialSyntaxError(f"unexpected {tok[1]!r}", self.text, tok[2])
        return p

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[0] in "+-":
            sign = -1 if self.take()[0] == "-" else 1
        p = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            p = p + t if op == "+" else p - t
        return p

    def term(self) -> Polynomial:
        p = self.factor()
        while self.peek()[0] == "*":
            self.take()
            p = p * self.factor()
        return p

    def factor(self) -> Polynomial:
        p = self.atom()
        while self.peek()[0] == "^":
            self.take()
            tok = self.take("int")
            p = p ** tok[1]
        return p

    def atom(self) -> Polynomial:
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            value = Fraction(tok[1])
            if self.peek()[0] == "/":
                self.take()
                den = self.take("int")
                if den[1] == 0:
                    raise PolynomialSyntaxError("zero denominator", self.text, den[2])
                value = value / den[1]
            return const(self.nvars, value)
        if tok[0] == "var":
            self.take()
            idx = tok[1]
            if not 1 <= idx <= self.nvars:
                raise PolynomialSyntaxError(
                    f"unknown variable x{idx} (have x1..x{self.nvars})", self.text, tok[2]
                )
            return var(self.nvars, idx - 1)
        if tok[0] == "(":
            self.take()
            p = self.expr()
            self.take(")")
            return p
        what = "end of input" if tok[0] == "end" else repr(tok[1])
        raise PolynomialSyntaxError(f"expected a number, variable or '(', found {what}", self.text, tok[2])


def parse_polynomial(text: str, nvars: int) -> Polynomial:
    """Parse ``text`` over the variables ``x1..x{nvars}``.

    >>> str(parse_polynomial("x1*(x1+x2)", 2))
    'x1^2 + x1*x2'
    """
    return _Parser(text, nvars).parse()


def polys_from_strings(items: Iterable[str], nvars: int):
    return [parse_polynomial(s, nvars) for s in items]
