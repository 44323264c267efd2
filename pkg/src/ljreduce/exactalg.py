"""Exact scalars and sparse multivariate polynomials over the rationals.

Rationals are :class:`fractions.Fraction`; integral coefficients are kept as
plain ``int`` where possible because integer arithmetic is much cheaper and
compares/hashes identically.

Monomials are packed into a single integer, ``_BITS`` bits per exponent, so
multiplying two monomials is one integer addition.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Mapping, Sequence, Union

Rational = Fraction
Scalar = Union[int, Fraction]

_BITS = 16
_MASK = (1 << _BITS) - 1
MAX_EXPONENT = _MASK


def as_rational(value) -> Scalar:
    """Coerce ``value`` to an exact scalar (int or Fraction); floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return as_rational(Fraction(value.strip()))
    raise TypeError(f"cannot use {type(value).__name__} as an exact scalar")


def format_rational(c: Scalar) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


class GaussianRational:
    """Complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Scalar = 0, im: Scalar = 0):
        self.re = as_rational(re)
        self.im = as_rational(im)

    @classmethod
    def coerce(cls, value) -> GaussianRational:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, str):
            return parse_gaussian(value)
        return cls(value, 0)

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        norm = Fraction(o.re * o.re + o.im * o.im)
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / norm, num.im / norm)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational)):
            o = GaussianRational.coerce(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({format_rational(self.re)}, {format_rational(self.im)})"

    def __str__(self):
        re_s, im_s = format_rational(self.re), format_rational(abs(Fraction(self.im)))
        if self.im == 0:
            return re_s
        if self.re == 0:
            return f"{'-' if self.im < 0 else ''}{im_s} i"
        return f"{re_s} {'-' if self.im < 0 else '+'} {im_s} i"


I = GaussianRational(0, 1)

_GAUSS_TERM = re.compile(r"([+-]?)\s*(\d+(?:/\d+)?)?\s*(\*?\s*i)?\s*")


def parse_gaussian(text: str) -> GaussianRational:
    """Parse ``"re/den + im/den i"`` style strings, e.g. ``"1/2 - 3 i"`` or ``"-i"``."""
    s = text.strip()
    if not s:
        raise ValueError("empty complex number")
    pos, re_part, im_part = 0, Fraction(0), Fraction(0)
    first = True
    while pos < len(s):
        m = _GAUSS_TERM.match(s, pos)
        sign, num, imag = m.group(1), m.group(2), m.group(3)
        if m.end() == pos or (num is None and imag is None) or (not sign and not first):
            raise ValueError(f"malformed complex number {text!r} at column {pos + 1}")
        value = Fraction(num) if num is not None else Fraction(1)
        if sign == "-":
            value = -value
        if imag:
            im_part += value
        else:
            re_part += value
        pos = m.end()
        first = False
    return GaussianRational(re_part, im_part)


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MAX_EXPONENT:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def _unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(n))


def grlex_key(exps: Sequence[int]) -> tuple:
    """Sort key: total degree first, then lexicographic with the first variable largest."""
    return (sum(exps), tuple(exps))


@total_ordering
class Monomial:
    """Exponent vector with graded-lex ordering."""

    __slots__ = ("exponents",)

    def __init__(self, exponents: Iterable[int]):
        exps = tuple(int(e) for e in exponents)
        if any(e < 0 for e in exps):
            raise ValueError("exponents must be non-negative")
        self.exponents = exps

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def key(self) -> tuple:
        return grlex_key(self.exponents)

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exponents == other.exponents

    def __lt__(self, other):
        if len(self.exponents) != len(other.exponents):
            raise ValueError("monomials in different numbers of variables")
        return self.key() < other.key()

    def __hash__(self):
        return hash(self.exponents)

    def __mul__(self, other):
        return Monomial(a + b for a, b in zip(self.exponents, other.exponents))

    def __repr__(self):
        return f"Monomial({self.exponents})"


def default_names(n: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n))


class VariableMismatch(ValueError):
    pass


class Polynomial:
    """Immutable sparse polynomial in a fixed, named set of variables."""

    __slots__ = ("vars", "_terms", "_hash")

    def __init__(self, variables, terms: Mapping[int, Scalar] | None = None, *, _trusted=False):
        if isinstance(variables, int):
            variables = default_names(variables)
        self.vars = tuple(variables)
        if _trusted:
            self._terms = terms
        else:
            self._terms = {k: as_rational(c) for k, c in (terms or {}).items() if c != 0}
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def from_terms(cls, variables, terms: Mapping) -> Polynomial:
        """Build from ``{exponent tuple or Monomial: coefficient}``."""
        if isinstance(variables, int):
            variables = default_names(variables)
        n = len(variables)
        out: dict[int, Scalar] = {}
        for mono, c in terms.items():
            exps = mono.exponents if isinstance(mono, Monomial) else tuple(mono)
            if len(exps) != n:
                raise VariableMismatch(f"monomial {exps} has {len(exps)} exponents, expected {n}")
            k = _pack(exps)
            out[k] = out.get(k, 0) + as_rational(c)
        return cls(variables, {k: c for k, c in out.items() if c != 0}, _trusted=True)

    @classmethod
    def constant(cls, variables, c: Scalar = 1) -> Polynomial:
        c = as_rational(c)
        return cls(variables, {0: c} if c != 0 else {}, _trusted=True)

    @classmethod
    def zero(cls, variables) -> Polynomial:
        return cls(variables, {}, _trusted=True)

    @classmethod
    def var(cls, variables, i: int | str) -> Polynomial:
        if isinstance(variables, int):
            variables = default_names(variables)
        if isinstance(i, str):
            i = list(variables).index(i)
        if not 0 <= i < len(variables):
            raise IndexError(f"variable index {i} out of range")
        return cls(variables, {1 << (_BITS * i): 1}, _trusted=True)

    @classmethod
    def monomial(cls, variables, exps: Sequence[int], c: Scalar = 1) -> Polynomial:
        return cls.from_terms(variables, {tuple(exps): c})

    # inspection ----------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(k == 0 for k in self._terms)

    def constant_term(self) -> Scalar:
        return self._terms.get(0, 0)

    def terms(self) -> list[tuple[tuple[int, ...], Scalar]]:
        """(exponents, coefficient) pairs in descending graded-lex order."""
        n = self.nvars
        items = [(_unpack(k, n), c) for k, c in self._terms.items()]
        items.sort(key=lambda t: grlex_key(t[0]), reverse=True)
        return items

    def monomials(self) -> list[Monomial]:
        return [Monomial(e) for e, _ in self.terms()]

    def coefficient(self, exps: Sequence[int]) -> Scalar:
        return self._terms.get(_pack(exps), 0)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        n = self.nvars
        return max(sum(_unpack(k, n)) for k in self._terms)

    def leading_term(self) -> tuple[tuple[int, ...], Scalar]:
        return self.terms()[0]

    def variables_used(self) -> set[int]:
        used = set()
        for k in self._terms:
            for i in range(self.nvars):
                if (k >> (_BITS * i)) & _MASK:
                    used.add(i)
        return used

    # arithmetic --------------------------------------------------------
    def _check(self, other: Polynomial):
        if self.vars != other.vars:
            if len(self.vars) != len(other.vars):
                raise VariableMismatch(
                    f"variable count mismatch: {len(self.vars)} vs {len(other.vars)}")
            raise VariableMismatch(f"variable names differ: {self.vars} vs {other.vars}")

    def _lift(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.vars, as_rational(other))

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for k, c in o._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Polynomial(self.vars, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {k: -c for k, c in self._terms.items()}, _trusted=True)

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            out: dict[int, Scalar] = {}
            get = out.get
            for k1, c1 in self._terms.items():
                for k2, c2 in other._terms.items():
                    k = k1 + k2
                    out[k] = get(k, 0) + c1 * c2
            return Polynomial(self.vars, {k: c for k, c in out.items() if c}, _trusted=True)
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        if c == 0:
            return Polynomial.zero(self.vars)
        return Polynomial(self.vars, {k: v * c for k, v in self._terms.items()}, _trusted=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_rational(other)
        if c == 0:
            raise ZeroDivisionError("polynomial division by zero scalar")
        return self * (Fraction(1) / c)

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.vars, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({0: other} if other != 0 else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self._terms.items())))
        return self._hash

    # calculus and substitution ----------------------------------------
    def pdiff(self, i: int) -> Polynomial:
        """Partial derivative with respect to variable ``i``."""
        if not 0 <= i < self.nvars:
            raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
        shift = _BITS * i
        unit = 1 << shift
        out = {}
        for k, c in self._terms.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - unit] = c * e
        return Polynomial(self.vars, out, _trusted=True)

    def restrict_zero(self, coords: Iterable[int]) -> Polynomial:
        """Set every variable in ``coords`` to zero (same ambient variables)."""
        mask = 0
        for i in coords:
            if not 0 <= i < self.nvars:
                raise IndexError(f"variable index {i} out of range for {self.nvars} variables")
            mask |= _MASK << (_BITS * i)
        if not mask:
            return self
        return Polynomial(self.vars, {k: c for k, c in self._terms.items() if not k & mask},
                          _trusted=True)

    def drop_variables(self, keep: Sequence[int]) -> Polynomial:
        """Re-express in the variables ``keep`` (in that order); others must not occur."""
        n = self.nvars
        names = tuple(self.vars[i] for i in keep)
        out = {}
        for k, c in self._terms.items():
            exps = _unpack(k, n)
            if any(exps[i] for i in range(n) if i not in keep):
                raise ValueError("polynomial depends on a dropped variable")
            out[_pack([exps[i] for i in keep])] = c
        return Polynomial(names, out, _trusted=True)

    def embed(self, variables: Sequence[str]) -> Polynomial:
        """Re-express in a larger variable list containing all current variables."""
        index = [list(variables).index(v) for v in self.vars]
        out = {}
        for k, c in self._terms.items():
            exps = _unpack(k, self.nvars)
            full = [0] * len(variables)
            for j, e in zip(index, exps):
                full[j] = e
            out[_pack(full)] = c
        return Polynomial(tuple(variables), out, _trusted=True)

    def substitute(self, values: Mapping[int, Polynomial]) -> Polynomial:
        """Replace variable ``i`` by ``values[i]`` for each listed index."""
        n = self.nvars
        result = Polynomial.zero(self.vars)
        for k, c in self._terms.items():
            exps = _unpack(k, n)
            keep = [0 if i in values else e for i, e in enumerate(exps)]
            term = Polynomial(self.vars, {_pack(keep): c}, _trusted=True)
            for i, p in values.items():
                if exps[i]:
                    term = term * (p ** exps[i])
            result = result + term
        return result

    def truncate(self, degree: int) -> Polynomial:
        n = self.nvars
        return Polynomial(self.vars, {k: c for k, c in self._terms.items()
                                      if sum(_unpack(k, n)) <= degree}, _trusted=True)

    # formatting --------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({format_polynomial(self)!r})"


def _term_body(exps: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for name, e in zip(names, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return " ".join(parts)


def format_polynomial(p: Polynomial) -> str:
    """Render in the scenario syntax, e.g. ``3/2 x1^2 x3 - y2 + 1``."""
    if p.is_zero():
        return "0"
    out = []
    for idx, (exps, c) in enumerate(p.terms()):
        c = Fraction(c)
        neg = c < 0
        mag = -c if neg else c
        body = _term_body(exps, p.vars)
        if body:
            text = body if mag == 1 else f"{format_rational(mag)} {body}"
        else:
            text = format_rational(mag)
        if idx == 0:
            out.append(f"-{text}" if neg else text)
        else:
            out.append(f"{'-' if neg else '+'} {text}")
    return " ".join(out)


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, column: int | None = None):
        self.column = column
        super().__init__(message if column is None else f"{message} (column {column})")


class UnknownVariableError(PolynomialSyntaxError):
    def __init__(self, name: str, column: int | None = None):
        self.name = name
        super().__init__(f"unknown variable {name!r}", column)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.end() == pos:
            break
        if m.group(0).strip() == "":
            break
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), col))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), col))
        else:
            tokens.append(("op", m.group(3), col))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, variables: Sequence[str]) -> Polynomial:
    """Parse scenario syntax: signed terms like ``3/2 x1^2 x3`` joined by ``+``/``-``.

    Factors inside a term are separated by whitespace or ``*``.
    """
    variables = tuple(variables)
    index = {v: i for i, v in enumerate(variables)}
    if not isinstance(text, str):
        text = str(text)
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialSyntaxError("empty polynomial")
    n = len(variables)
    terms: dict[tuple[int, ...], Scalar] = {}
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    first = True
    while pos < len(tokens):
        sign = 1
        tok = peek()
        if tok[0] == "op" and tok[1] in "+-":
            sign = -1 if tok[1] == "-" else 1
            pos += 1
        elif not first:
            raise PolynomialSyntaxError(f"expected '+' or '-' but found {tok[1]!r}", tok[2])
        first = False
        coeff: Fraction = Fraction(sign)
        exps = [0] * n
        saw_factor = False
        tok = peek()
        if tok is not None and tok[0] == "num":
            num = tok[1]
            pos += 1
            tok = peek()
            if tok is not None and tok == ("op", "/", tok[2]):
                pos += 1
                den = peek()
                if den is None or den[0] != "num":
                    raise PolynomialSyntaxError("expected denominator after '/'", tok[2])
                if den[1] == 0:
                    raise PolynomialSyntaxError("zero denominator", den[2])
                pos += 1
                coeff *= Fraction(num, den[1])
            else:
                coeff *= num
            saw_factor = True
        while True:
            tok = peek()
            if tok is None:
                break
            if tok[0] == "op" and tok[1] == "*":
                pos += 1
                tok = peek()
                if tok is None or tok[0] != "name":
                    raise PolynomialSyntaxError("expected variable after '*'",
                                                tok[2] if tok else len(text))
            if tok[0] != "name":
                break
            name, col = tok[1], tok[2]
            if name not in index:
                raise UnknownVariableError(name, col)
            pos += 1
            power = 1
            tok = peek()
            if tok is not None and tok[0] == "op" and tok[1] == "^":
                pos += 1
                tok = peek()
                if tok is None or tok[0] != "num":
                    raise PolynomialSyntaxError("expected integer exponent after '^'", col)
                power = tok[1]
                pos += 1
            exps[index[name]] += power
            saw_factor = True
        if not saw_factor:
            tok = peek()
            where = tok[2] if tok else len(text)
            raise PolynomialSyntaxError("expected a coefficient or variable", where)
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coeff
    return Polynomial.from_terms(variables, terms)


def packed_items(p: Polynomial):
    """Raw (packed monomial, coefficient) pairs; package-internal fast path."""
    return p._terms.items()


def from_packed(variables, terms: Mapping[int, Scalar]) -> Polynomial:
    return Polynomial(variables, {k: c for k, c in terms.items() if c != 0}, _trusted=True)


def pack_exponents(exps: Sequence[int]) -> int:
    return _pack(exps)


def monomials_up_to(n: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree <= ``degree``, descending graded-lex."""
    out: list[tuple[int, ...]] = []

    def rec(prefix, i, remaining):
        if i == n - 1:
            out.append(tuple(prefix + [remaining]))
            return
        for e in range(remaining, -1, -1):
            rec(prefix + [e], i + 1, remaining - e)

    for d in range(degree, -1, -1):
        if n == 0:
            if d == 0:
                out.append(())
            continue
        rec([], 0, d)
    return out


# functional forms of the ring operations

def poly_add(f: Polynomial, g: Polynomial) -> Polynomial:
    return f + g


def poly_mul(f: Polynomial, g: Polynomial) -> Polynomial:
    return f * g


def poly_pdiff(f: Polynomial, i: int | str) -> Polynomial:
    return f.pdiff(f.vars.index(i) if isinstance(i, str) else i)


def poly_restrict_zero(f: Polynomial, coords) -> Polynomial:
    return f.restrict_zero([f.vars.index(c) if isinstance(c, str) else c for c in coords])
