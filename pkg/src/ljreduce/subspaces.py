"""Exact linear algebra for finite-dimensional truncations of function spaces.

Vectors are sparse ``{column: coefficient}`` dicts.  Columns of a polynomial
ambient run over monomials in *descending* graded-lex order, so the pivot of
an echelon row is its leading monomial and reduction leaves the smallest
monomials behind.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Hashable, Iterable, Sequence

from ljreduce.exactalg import (Polynomial, from_packed, format_polynomial, monomials_up_to,
                               pack_exponents, packed_items)
from ljreduce.poisson import PoissonBivector, PolyVectorField, bracket

Vec = dict


class DegreeError(ValueError):
    """Element does not fit in the truncated ambient space."""


class AmbientMismatch(ValueError):
    pass


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


class Echelon:
    """Incrementally maintained reduced row-echelon form over the rationals."""

    def __init__(self):
        self.rows: dict[int, Vec] = {}

    def reduce(self, vec: Vec) -> Vec:
        out = {c: v for c, v in vec.items() if v}
        for p in [c for c in out if c in self.rows]:
            coef = out[p]
            for col, v in self.rows[p].items():
                nv = out.get(col, 0) - coef * v
                if nv:
                    out[col] = nv
                else:
                    out.pop(col, None)
        return out

    def insert(self, vec: Vec) -> int | None:
        """Add ``vec`` to the row space; return the new pivot or None if dependent."""
        r = self.reduce(vec)
        if not r:
            return None
        p = min(r)
        inv = Fraction(1) / r[p]
        r = {c: _norm(v * inv) for c, v in r.items()}
        for q, row in self.rows.items():
            f = row.get(p)
            if f:
                for col, v in r.items():
                    nv = row.get(col, 0) - f * v
                    if nv:
                        row[col] = _norm(nv)
                    else:
                        row.pop(col, None)
        self.rows[p] = r
        return p

    def sorted_rows(self) -> list[Vec]:
        return [self.rows[p] for p in sorted(self.rows)]


def _augmented_kernel(images: Sequence[Vec], width_offset: int) -> list[Vec]:
    """Kernel of ``e_i -> images[i]``: rows [image | unit] eliminated image-first."""
    ech = Echelon()
    for i, img in enumerate(images):
        row = dict(img)
        row[width_offset + i] = 1
        ech.insert(row)
    out = []
    for p, row in sorted(ech.rows.items()):
        if p >= width_offset:
            out.append({c - width_offset: v for c, v in row.items()})
    return out


def solve_linear(images: Sequence[Vec], target: Vec) -> list | None:
    """Coefficients ``c`` with ``sum c_i images[i] == target``, or None when inconsistent.

    Image columns may be any hashable keys.
    """
    keys: dict[Hashable, int] = {}

    def encode(v):
        return {keys.setdefault(k, len(keys)): c for k, c in v.items()}

    enc = [encode(v) for v in images]
    tgt = encode(target)
    offset = len(keys)
    ech = Echelon()
    for i, img in enumerate(enc):
        row = dict(img)
        row[offset + i] = 1
        ech.insert(row)
    r = ech.reduce(tgt)
    if any(c < offset for c in r):
        return None
    coeffs = [0] * len(images)
    for c, v in r.items():
        coeffs[c - offset] = _norm(-v)
    return coeffs


class Ambient:
    """Finite ordered basis with exact coordinates."""

    dim: int

    def to_vec(self, elem) -> Vec:
        raise NotImplementedError

    def from_vec(self, vec: Vec):
        raise NotImplementedError

    def label(self, i: int) -> str:
        raise NotImplementedError

    def basis_element(self, i: int):
        return self.from_vec({i: 1})

    def format(self, elem) -> str:
        return str(elem)


class PolyAmbient(Ambient):
    """Polynomials of total degree <= ``degree`` in the given variables."""

    def __init__(self, variables, degree: int):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.vars = tuple(variables)
        self.degree = degree
        self.exponents = monomials_up_to(len(self.vars), degree)
        self.keys = [pack_exponents(e) for e in self.exponents]
        self.index = {k: i for i, k in enumerate(self.keys)}
        self.dim = len(self.keys)

    def __eq__(self, other):
        return (isinstance(other, PolyAmbient) and self.vars == other.vars
                and self.degree == other.degree)

    def __hash__(self):
        return hash((self.vars, self.degree))

    def to_vec(self, p: Polynomial) -> Vec:
        if p.vars != self.vars:
            raise AmbientMismatch(f"polynomial variables {p.vars} do not match {self.vars}")
        out = {}
        index = self.index
        for k, c in packed_items(p):
            i = index.get(k)
            if i is None:
                raise DegreeError(f"{p} has degree {p.degree} > ambient degree {self.degree}")
            out[i] = c
        return out

    def from_vec(self, vec: Vec) -> Polynomial:
        return from_packed(self.vars, {self.keys[i]: c for i, c in vec.items()})

    def label(self, i: int) -> str:
        return format_polynomial(self.basis_element(i))

    def format(self, elem) -> str:
        return format_polynomial(elem)

    def __repr__(self):
        return f"PolyAmbient({self.vars}, degree={self.degree})"


class ExplicitSpan:
    """Subspace of an ambient given by rows in reduced row-echelon form."""

    def __init__(self, ambient: Ambient, echelon: Echelon | None = None):
        self.ambient = ambient
        ech = echelon or Echelon()
        self._ech = ech
        self.pivots = tuple(sorted(ech.rows))
        self.rows = tuple(ech.rows[p] for p in self.pivots)

    @classmethod
    def from_vectors(cls, ambient: Ambient, vecs: Iterable[Vec]) -> ExplicitSpan:
        ech = Echelon()
        for v in vecs:
            ech.insert(v)
        return cls(ambient, ech)

    @classmethod
    def span(cls, ambient: Ambient, elems: Iterable) -> ExplicitSpan:
        return cls.from_vectors(ambient, (ambient.to_vec(e) for e in elems))

    @classmethod
    def zero(cls, ambient: Ambient) -> ExplicitSpan:
        return cls(ambient)

    @classmethod
    def full(cls, ambient: Ambient) -> ExplicitSpan:
        return cls.from_vectors(ambient, ({i: 1} for i in range(ambient.dim)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def basis(self) -> list:
        return [self.ambient.from_vec(r) for r in self.rows]

    def reduce(self, elem):
        """Residual of ``elem`` after elimination against the echelon rows."""
        return self.ambient.from_vec(self._ech.reduce(self.ambient.to_vec(elem)))

    def contains_vec(self, vec: Vec) -> bool:
        return not self._ech.reduce(vec)

    def contains(self, elem) -> bool:
        return self.contains_vec(self.ambient.to_vec(elem))

    def coordinates(self, elem) -> tuple:
        """Coefficients of ``elem`` in :meth:`basis`; raises if not a member."""
        vec = self.ambient.to_vec(elem)
        if self._ech.reduce(vec):
            raise ValueError("element is not in the span")
        return tuple(_norm(Fraction(vec.get(p, 0))) for p in self.pivots)

    def is_subspace_of(self, other: ExplicitSpan) -> bool:
        _same_ambient(self, other)
        return all(other.contains_vec(r) for r in self.rows)

    def __eq__(self, other):
        if not isinstance(other, ExplicitSpan):
            return NotImplemented
        return (self.ambient == other.ambient and self.pivots == other.pivots
                and self.rows == other.rows)

    def __repr__(self):
        return f"ExplicitSpan(dim={self.dim}, ambient={self.ambient!r})"

    def to_strings(self) -> list[str]:
        return [self.ambient.format(b) for b in self.basis()]


def _same_ambient(a: ExplicitSpan, b: ExplicitSpan):
    if a.ambient != b.ambient:
        raise AmbientMismatch(f"{a.ambient!r} vs {b.ambient!r}")


def span_sum(a: ExplicitSpan, b: ExplicitSpan) -> ExplicitSpan:
    _same_ambient(a, b)
    return ExplicitSpan.from_vectors(a.ambient, list(a.rows) + list(b.rows))


def span_intersect(a: ExplicitSpan, b: ExplicitSpan) -> ExplicitSpan:
    """Zassenhaus: eliminate [a | a] and [b | 0]; rows with empty left half span the meet."""
    _same_ambient(a, b)
    m = a.ambient.dim
    ech = Echelon()
    for r in a.rows:
        row = dict(r)
        row.update({m + c: v for c, v in r.items()})
        ech.insert(row)
    for r in b.rows:
        ech.insert(dict(r))
    meet = [{c - m: v for c, v in row.items()} for p, row in ech.rows.items() if p >= m]
    return ExplicitSpan.from_vectors(a.ambient, meet)


class QuotientPresentation:
    """Representatives of ``top / bottom`` with a canonical-representative map."""

    def __init__(self, top: ExplicitSpan, bottom: ExplicitSpan):
        _same_ambient(top, bottom)
        if not bottom.is_subspace_of(top):
            raise ValueError("quotient requires bottom to be contained in top")
        self.top, self.bottom = top, bottom
        self.ambient = top.ambient
        ech = Echelon()
        for r in top.rows:
            ech.insert(bottom._ech.reduce(r))
        self._reps = ExplicitSpan(top.ambient, ech)

    @property
    def dim(self) -> int:
        return self._reps.dim

    def representatives(self) -> list:
        return self._reps.basis()

    def canon(self, elem):
        """Reduce modulo the bottom space; zero exactly for members of the bottom."""
        return self.bottom.reduce(elem)

    def coordinates(self, elem) -> tuple:
        """Coordinates of the class of ``elem`` (an element of top) on the representatives."""
        return self._reps.coordinates(self.canon(elem))

    def from_coordinates(self, coords: Sequence):
        out = {}
        for row, c in zip(self._reps.rows, coords):
            if c:
                for col, v in row.items():
                    nv = out.get(col, 0) + c * v
                    if nv:
                        out[col] = nv
                    else:
                        out.pop(col, None)
        return self.ambient.from_vec(out)


def quotient(top: ExplicitSpan, bottom: ExplicitSpan) -> QuotientPresentation:
    return QuotientPresentation(top, bottom)


# structured (rule-defined) spaces of polynomials ------------------------------

class StructuredSpace:
    """Subspace cut out by a linear rule; membership is decidable at any degree."""

    rule = "structured"

    def __init__(self, variables):
        self.vars = tuple(variables)

    def images(self, f: Polynomial) -> list[Polynomial]:
        """Linear map whose kernel is the space."""
        raise NotImplementedError

    def member(self, f: Polynomial) -> bool:
        return all(p.is_zero() for p in self.images(f))

    def witness(self, f: Polynomial) -> Polynomial | None:
        """First nonzero image, or None for members."""
        for p in self.images(f):
            if not p.is_zero():
                return p
        return None

    def describe(self) -> dict:
        return {"rule": self.rule}


def _coords(variables, coords) -> tuple[int, ...]:
    out = []
    for k in coords:
        out.append(variables.index(k) if isinstance(k, str) else int(k))
    return tuple(sorted(set(out)))


class VanishingIdeal(StructuredSpace):
    """Polynomials vanishing on the coordinate subspace {x_k = 0 : k in K}."""

    rule = "vanishing_ideal"

    def __init__(self, variables, coords):
        super().__init__(variables)
        self.coords = _coords(self.vars, coords)

    def images(self, f):
        return [f.restrict_zero(self.coords)]

    def describe(self):
        return {"rule": self.rule, "coords": [self.vars[k] for k in self.coords]}


class InvariantSpace(StructuredSpace):
    """Functions annihilated by every listed vector field."""

    rule = "invariant_space"

    def __init__(self, variables, fields: Sequence[PolyVectorField]):
        super().__init__(variables)
        self.fields = tuple(fields)

    def images(self, f):
        return [X(f) for X in self.fields]

    def describe(self):
        return {"rule": self.rule, "fields": [repr(X) for X in self.fields]}


class RestrictedInvariantSpace(StructuredSpace):
    """Functions whose derivative along every listed field vanishes on the subspace."""

    rule = "restricted_invariant_space"

    def __init__(self, variables, fields: Sequence[PolyVectorField], coords):
        super().__init__(variables)
        self.fields = tuple(fields)
        self.coords = _coords(self.vars, coords)

    def images(self, f):
        return [X(f).restrict_zero(self.coords) for X in self.fields]

    def describe(self):
        return {"rule": self.rule, "fields": [repr(X) for X in self.fields],
                "coords": [self.vars[k] for k in self.coords]}


class NormalizerSpace(StructuredSpace):
    """Lie normalizer of a coordinate vanishing ideal.

    For the ideal generated by the x_k, {g, h x_k} = h {g, x_k} + x_k {g, h}, so
    testing the generators suffices.
    """

    rule = "normalizer"

    def __init__(self, pi: PoissonBivector, coords):
        super().__init__(pi.vars)
        self.pi = pi
        self.coords = _coords(self.vars, coords)

    def images(self, f):
        return [bracket(self.pi, f, Polynomial.var(self.vars, k)).restrict_zero(self.coords)
                for k in self.coords]

    def describe(self):
        return {"rule": self.rule, "coords": [self.vars[k] for k in self.coords]}


def truncate(space: StructuredSpace, degree: int) -> ExplicitSpan:
    """Degree-truncated presentation: kernel of the rule's linear map on monomials."""
    ambient = PolyAmbient(space.vars, degree)
    keys: dict[tuple, int] = {}
    images = []
    for i in range(ambient.dim):
        mono = ambient.basis_element(i)
        vec = {}
        for j, img in enumerate(space.images(mono)):
            for k, c in packed_items(img):
                vec[keys.setdefault((j, k), len(keys))] = c
        images.append(vec)
    # ambient column order is preserved in the unit block
    kernel = _augmented_kernel(images, len(keys))
    return ExplicitSpan.from_vectors(ambient, kernel)


def member(space, f) -> bool:
    """Exact membership in a structured space (any degree) or an explicit span."""
    if isinstance(space, ExplicitSpan):
        return space.contains(f)
    return space.member(f)


def image_span(span: ExplicitSpan, fn: Callable, ambient: Ambient) -> ExplicitSpan:
    """Span of ``fn`` applied to a basis of ``span``."""
    return ExplicitSpan.span(ambient, (fn(b) for b in span.basis()))
