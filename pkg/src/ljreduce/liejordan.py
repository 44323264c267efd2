"""Lie-Jordan algebras of Hermitian matrices and their reduction by a pair of subspaces.

a o b = (ab + ba)/2 and [a, b] = i/(2 hbar) (ab - ba); the associator identity
(a o b) o c - a o (b o c) = hbar^2 [[a, c], b] ties the two together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Iterable, Sequence

from ljreduce.exactalg import GaussianRational, I, as_rational, parse_gaussian
from ljreduce.report import Condition, ConditionReport
from ljreduce.subspaces import (Ambient, ExplicitSpan, QuotientPresentation, quotient,
                                solve_linear, span_intersect, span_sum)

Matrix = tuple  # tuple of row tuples of GaussianRational

_ZERO = GaussianRational(0)
_HALF = Fraction(1, 2)


class DimensionMismatch(ValueError):
    pass


def as_matrix(rows) -> Matrix:
    out = []
    for row in rows:
        out.append(tuple(parse_gaussian(x) if isinstance(x, str) else GaussianRational.coerce(x)
                         for x in row))
    n = len(out)
    if any(len(r) != n for r in out):
        raise ValueError("matrix must be square")
    return tuple(out)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    if len(b) != n:
        raise DimensionMismatch(f"{n}x{n} times {len(b)}x{len(b)}")
    cols = list(zip(*b))
    out = []
    for row in a:
        new = []
        for col in cols:
            acc = _ZERO
            for x, y in zip(row, col):
                if not x.is_zero() and not y.is_zero():
                    acc = acc + x * y
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def madd(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def msub(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x - y for x, y in zip(r, s)) for r, s in zip(a, b))


def mscale(c, a: Matrix) -> Matrix:
    c = GaussianRational.coerce(c)
    return tuple(tuple(c * x for x in r) for r in a)


def identity_matrix(d: int) -> Matrix:
    return tuple(tuple(GaussianRational(int(i == j)) for j in range(d)) for i in range(d))


def format_matrix(m: Matrix) -> str:
    return "[" + "; ".join(", ".join(str(x) for x in row) for row in m) + "]"


class HermitianElement:
    """Self-adjoint d x d matrix with Gaussian-rational entries."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        m = entries if _is_matrix(entries) else as_matrix(entries)
        for i, row in enumerate(m):
            for j in range(i, len(m)):
                if row[j] != m[j][i].conjugate():
                    raise ValueError(f"matrix is not Hermitian at ({i + 1},{j + 1})")
        self.entries = m

    @classmethod
    def identity(cls, d: int) -> HermitianElement:
        return cls(identity_matrix(d))

    @classmethod
    def zero(cls, d: int) -> HermitianElement:
        return cls(tuple(tuple(_ZERO for _ in range(d)) for _ in range(d)))

    @property
    def d(self) -> int:
        return len(self.entries)

    def _check(self, other: HermitianElement):
        if other.d != self.d:
            raise DimensionMismatch(f"dimension {self.d} vs {other.d}")

    def __add__(self, other: HermitianElement) -> HermitianElement:
        self._check(other)
        return HermitianElement(madd(self.entries, other.entries))

    def __sub__(self, other: HermitianElement) -> HermitianElement:
        self._check(other)
        return HermitianElement(msub(self.entries, other.entries))

    def __neg__(self) -> HermitianElement:
        return HermitianElement(mscale(-1, self.entries))

    def __mul__(self, c) -> HermitianElement:
        if isinstance(c, GaussianRational):
            if not c.is_real():
                raise TypeError("Hermitian elements form a real vector space")
            c = c.re
        return HermitianElement(mscale(as_rational(c), self.entries))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def __eq__(self, other):
        return isinstance(other, HermitianElement) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"HermitianElement({format_matrix(self.entries)})"

    def __str__(self):
        return format_matrix(self.entries)


def _is_matrix(m) -> bool:
    return isinstance(m, tuple) and all(isinstance(r, tuple) and all(
        isinstance(x, GaussianRational) for x in r) for r in m)


SIGMA_X = HermitianElement([[0, 1], [1, 0]])
SIGMA_Y = HermitianElement([["0", "-i"], ["i", "0"]])
SIGMA_Z = HermitianElement([[1, 0], [0, -1]])
IDENTITY_2 = HermitianElement.identity(2)


def _check_hbar(hbar):
    h = as_rational(hbar)
    if h == 0:
        raise ValueError("hbar must be nonzero (the hbar = 0 case is the classical setting)")
    return h


def jordan(a: HermitianElement, b: HermitianElement) -> HermitianElement:
    a._check(b)
    ab, ba = matmul(a.entries, b.entries), matmul(b.entries, a.entries)
    return HermitianElement(mscale(_HALF, madd(ab, ba)))


def lie(a: HermitianElement, b: HermitianElement, hbar=1) -> HermitianElement:
    h = _check_hbar(hbar)
    a._check(b)
    ab, ba = matmul(a.entries, b.entries), matmul(b.entries, a.entries)
    return HermitianElement(mscale(I * Fraction(1, 2) / h, msub(ab, ba)))


def complexify(a: HermitianElement, b: HermitianElement, hbar=1) -> Matrix:
    """a o b - i hbar [a, b], which reproduces the matrix product ab."""
    h = _check_hbar(hbar)
    return msub(jordan(a, b).entries, mscale(I * h, lie(a, b, h).entries))


def hermitian_parts(m: Matrix) -> tuple[HermitianElement, HermitianElement]:
    """m = h1 + i h2 with h1 = (m + m*)/2 and h2 = (m - m*)/(2i)."""
    adj = tuple(tuple(m[j][i].conjugate() for j in range(len(m))) for i in range(len(m)))
    h1 = mscale(_HALF, madd(m, adj))
    h2 = mscale(GaussianRational(0, -_HALF), msub(m, adj))
    return HermitianElement(h1), HermitianElement(h2)


def product_from_lie_jordan(x: Matrix, y: Matrix, hbar=1) -> Matrix:
    """Associative product of complex matrices rebuilt from the Hermitian Lie-Jordan data."""
    x1, x2 = hermitian_parts(x)
    y1, y2 = hermitian_parts(y)
    real = msub(complexify(x1, y1, hbar), complexify(x2, y2, hbar))
    imag = madd(complexify(x1, y2, hbar), complexify(x2, y1, hbar))
    return madd(real, mscale(I, imag))


class HermitianAmbient(Ambient):
    """Real coordinates on d x d Hermitian matrices.

    Basis order: E_ii, then E_ij + E_ji (i < j), then i(E_ij - E_ji) (i < j).
    """

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("dimension must be >= 1")
        self.d = d
        self.pairs = list(combinations(range(d), 2))
        self.dim = d * d

    def __eq__(self, other):
        return isinstance(other, HermitianAmbient) and other.d == self.d

    def __hash__(self):
        return hash(("herm", self.d))

    def to_vec(self, h: HermitianElement) -> dict:
        if h.d != self.d:
            raise DimensionMismatch(f"expected {self.d}x{self.d}, got {h.d}x{h.d}")
        m = h.entries
        vec = {}
        for i in range(self.d):
            if m[i][i].re:
                vec[i] = m[i][i].re
        off = self.d
        for n, (i, j) in enumerate(self.pairs):
            z = m[i][j]
            if z.re:
                vec[off + n] = z.re
            if z.im:
                vec[off + len(self.pairs) + n] = z.im
        return vec

    def from_vec(self, vec: dict) -> HermitianElement:
        rows = [[_ZERO] * self.d for _ in range(self.d)]
        off, npairs = self.d, len(self.pairs)
        for k, c in vec.items():
            if k < self.d:
                rows[k][k] = rows[k][k] + c
            elif k < off + npairs:
                i, j = self.pairs[k - off]
                rows[i][j] = rows[i][j] + c
                rows[j][i] = rows[j][i] + c
            else:
                i, j = self.pairs[k - off - npairs]
                rows[i][j] = rows[i][j] + GaussianRational(0, c)
                rows[j][i] = rows[j][i] + GaussianRational(0, -c)
        return HermitianElement(tuple(tuple(r) for r in rows))

    def label(self, k: int) -> str:
        if k < self.d:
            return f"E{k + 1}{k + 1}"
        k -= self.d
        npairs = len(self.pairs)
        kind = "S" if k < npairs else "A"
        i, j = self.pairs[k % npairs]
        return f"{kind}{i + 1}{j + 1}"

    def basis(self) -> list[HermitianElement]:
        return [self.basis_element(k) for k in range(self.dim)]

    def format(self, elem) -> str:
        return str(elem)


# identity checks -------------------------------------------------------------

def check_identities(elems: Sequence, jordan_op: Callable, lie_op: Callable, hbar,
                     is_zero: Callable = lambda x: x.is_zero(), fmt: Callable = str,
                     associator_hbar=None) -> ConditionReport:
    """Exact check of the Lie-Jordan axioms on all basis pairs and triples.

    ``associator_hbar`` overrides the constant in the associator identity only.
    """
    h2 = as_rational(associator_hbar if associator_hbar is not None else hbar) ** 2
    n = len(elems)
    report = ConditionReport()
    jc = {(i, j): jordan_op(elems[i], elems[j]) for i in range(n) for j in range(n)}
    lc = {(i, j): lie_op(elems[i], elems[j]) for i in range(n) for j in range(n)}

    def witness(idx, residual):
        return {"triple" if len(idx) == 3 else "pair": [fmt(elems[k]) for k in idx],
                "residual": fmt(residual)}

    def sweep(name, index_iter, residual_fn):
        count = 0
        for idx in index_iter:
            count += 1
            r = residual_fn(*idx)
            if not is_zero(r):
                return report.add(Condition(name, False, count, witness=witness(idx, r)))
        return report.add(Condition(name, True, count))

    pairs = list(combinations(range(n), 2))
    sweep("jordan_commutative", pairs, lambda i, j: jc[(i, j)] - jc[(j, i)])
    sweep("lie_antisymmetric", [(i, i) for i in range(n)] + pairs,
          lambda i, j: lc[(i, j)] + lc[(j, i)])
    sweep("jacobi", combinations(range(n), 3),
          lambda i, j, k: (lie_op(lc[(i, j)], elems[k]) + lie_op(lc[(j, k)], elems[i])
                           + lie_op(lc[(k, i)], elems[j])))
    sweep("leibniz", product(range(n), repeat=3),
          lambda i, j, k: (lie_op(jc[(i, j)], elems[k]) - jordan_op(elems[i], lc[(j, k)])
                           - jordan_op(lc[(i, k)], elems[j])))
    sweep("associator", product(range(n), repeat=3),
          lambda i, j, k: (jordan_op(jc[(i, j)], elems[k]) - jordan_op(elems[i], jc[(j, k)])
                           - lie_op(lc[(i, k)], elems[j]) * h2))
    return report


class LJAlgebra:
    """Hermitian d x d matrices with the hbar-scaled Lie bracket."""

    def __init__(self, d: int, hbar=1, verify: bool = False):
        self.d = d
        self.hbar = _check_hbar(hbar)
        self.ambient = HermitianAmbient(d)
        if verify:
            rep = verify_axioms(self)
            if not rep.passed:
                raise ArithmeticError(f"axiom check failed: {rep.to_dict()}")

    def jordan(self, a, b):
        return jordan(a, b)

    def lie(self, a, b):
        return lie(a, b, self.hbar)

    def basis(self) -> list[HermitianElement]:
        return self.ambient.basis()

    def __repr__(self):
        return f"LJAlgebra(d={self.d}, hbar={self.hbar})"


def verify_axioms(alg: LJAlgebra, sample: Sequence[HermitianElement] | None = None,
                  associator_hbar=None) -> ConditionReport:
    elems = list(sample) if sample is not None else alg.basis()
    rep = check_identities(elems, alg.jordan, alg.lie, alg.hbar, associator_hbar=associator_hbar)
    full = ExplicitSpan.span(alg.ambient, elems).dim == alg.ambient.dim
    rep.dims["sample"] = len(elems)
    if not full:
        for c in rep.conditions:
            c.detail = "partial: sample does not span the Hermitian space"
    return rep


# quantum reduction -----------------------------------------------------------

class _ClassMap:
    """Maps elements of B + S to canonical representatives of B/(B n S)."""

    def __init__(self, b: ExplicitSpan, s: ExplicitSpan, q: QuotientPresentation):
        self.amb = b.ambient
        self.bbasis = b.basis()
        self.images = [self.amb.to_vec(x) for x in self.bbasis] + [r for r in s.rows]
        self.q = q

    def __call__(self, elem):
        coeffs = solve_linear(self.images, self.amb.to_vec(elem))
        if coeffs is None:
            raise ValueError("element is not in B + S")
        vec: dict = {}
        for c, x in zip(coeffs, self.bbasis):
            if c:
                for k, v in self.amb.to_vec(x).items():
                    vec[k] = vec.get(k, 0) + c * v
        return self.q.canon(self.amb.from_vec({k: v for k, v in vec.items() if v}))


@dataclass
class LJQuotient:
    quotient: QuotientPresentation
    representatives: list
    jordan_sc: dict
    lie_sc: dict
    axioms: ConditionReport = field(default_factory=ConditionReport)

    def structure_strings(self, which: str = "jordan") -> dict:
        table = self.jordan_sc if which == "jordan" else self.lie_sc
        sym = "o" if which == "jordan" else ","
        out = {}
        for (i, j), coords in sorted(table.items()):
            terms = [f"{_fmt_coeff(c)}r{k + 1}" for k, c in enumerate(coords) if c]
            key = f"r{i + 1} {sym} r{j + 1}" if which == "jordan" else f"[r{i + 1}, r{j + 1}]"
            out[key] = " + ".join(terms) if terms else "0"
        return out


def _fmt_coeff(c) -> str:
    return "" if c == 1 else f"({c})"


def _membership_sweep(name: str, left: Sequence, right: Sequence, op: Callable,
                      target: ExplicitSpan, symmetric: bool = False) -> Condition:
    count = 0
    for i, a in enumerate(left):
        for j, b in enumerate(right):
            if symmetric and j < i:
                continue
            count += 1
            v = op(a, b)
            if not target.contains(v):
                return Condition(name, False, count,
                                 witness={"pair": [str(a), str(b)], "value": str(v)})
    return Condition(name, True, count)


def _inclusion(name: str, small: ExplicitSpan, big: ExplicitSpan) -> Condition:
    for n, x in enumerate(small.basis(), 1):
        if not big.contains(x):
            return Condition(name, False, n, witness={"element": str(x)})
    return Condition(name, True, small.dim)


def quantum_reduce(b: ExplicitSpan, s: ExplicitSpan, alg: LJAlgebra,
                   certificate: tuple[ExplicitSpan, ExplicitSpan] | None = None
                   ) -> tuple[ConditionReport, LJQuotient | None]:
    for sp in (b, s) + tuple(certificate or ()):
        if sp.ambient != alg.ambient:
            raise DimensionMismatch("subspace lives in a different Hermitian space")
    bs = span_intersect(b, s)
    bps = span_sum(b, s)
    report = ConditionReport(dims={"B": b.dim, "S": s.dim, "B_cap_S": bs.dim, "B_plus_S": bps.dim})
    bb, bsb = b.basis(), bs.basis()
    report.add(_membership_sweep("jordan_bb", bb, bb, alg.jordan, bps, symmetric=True))
    report.add(_membership_sweep("jordan_b_bs", bb, bsb, alg.jordan, s))
    report.add(_membership_sweep("lie_bb", bb, bb, alg.lie, bps, symmetric=True))
    report.add(_membership_sweep("lie_b_bs", bb, bsb, alg.lie, s))
    if certificate is not None:
        report.extend(_quantum_certificate(b, s, alg, *certificate))
    if not all(report[n].passed for n in ("jordan_bb", "jordan_b_bs", "lie_bb", "lie_b_bs")):
        return report, None

    q = quotient(b, bs)
    reps = q.representatives()
    report.dims["quotient"] = len(reps)
    cls = _ClassMap(b, s, q)

    def qj(x, y):
        return cls(alg.jordan(x, y))

    def ql(x, y):
        return cls(alg.lie(x, y))

    idx = [(i, j) for i in range(len(reps)) for j in range(len(reps))]
    jordan_sc = {(i, j): q.coordinates(qj(reps[i], reps[j])) for i, j in idx if i <= j}
    lie_sc = {(i, j): q.coordinates(ql(reps[i], reps[j])) for i, j in idx if i < j}

    if bsb:
        extra = bsb[0]
        for x in bsb[1:]:
            extra = extra + x
        alt = [r + extra for r in reps]
        bad = None
        count = 0
        for i, j in idx:
            count += 1
            if qj(alt[i], alt[j]) != qj(reps[i], reps[j]) or ql(alt[i], alt[j]) != ql(reps[i], reps[j]):
                bad = {"pair": [str(reps[i]), str(reps[j])], "shift": str(extra)}
                break
        report.add(Condition("lift_independence", bad is None, count, witness=bad))
    else:
        report.add(Condition("lift_independence", True, 0, detail="B n S is zero"))

    axioms = check_identities(reps, qj, ql, alg.hbar)
    for c in axioms.conditions:
        c.name = "quotient_" + c.name
    report.extend(axioms)
    if certificate is not None:
        strong = [c for c in report.conditions if c.name.startswith("strong_")
                  or c.name.startswith("cert_")]
        if all(c.passed for c in strong):
            report.add(Condition("certificate_implies_axioms", axioms.passed, len(strong)))
    return report, LJQuotient(q, reps, jordan_sc, lie_sc, axioms)


def _quantum_certificate(b, s, alg, bm: ExplicitSpan, bp: ExplicitSpan) -> ConditionReport:
    rep = ConditionReport(dims={"B_minus": bm.dim, "B_plus": bp.dim})
    bps = span_sum(b, s)
    rep.add(_inclusion("cert_b_minus_in_b", bm, b))
    rep.add(_inclusion("cert_b_in_b_plus", b, bp))
    rep.add(Condition("cert_b_minus_sum", span_sum(bm, s) == bps, 1))
    rep.add(Condition("cert_b_plus_sum", span_sum(bp, s) == bps, 1))
    bpi = span_intersect(bp, s)
    m, pi_ = bm.basis(), bpi.basis()
    rep.add(_membership_sweep("strong_jordan_bm_bm", m, m, alg.jordan, bp, symmetric=True))
    rep.add(_membership_sweep("strong_jordan_bm_bps", m, pi_, alg.jordan, s))
    rep.add(_membership_sweep("strong_lie_bm_bm", m, m, alg.lie, bp, symmetric=True))
    rep.add(_membership_sweep("strong_lie_bm_bps", m, pi_, alg.lie, s))
    return rep


# classical limit -------------------------------------------------------------

@dataclass
class LimitRow:
    hbar: Fraction
    triple: tuple
    associator: HermitianElement
    rhs: HermitianElement

    @property
    def equal(self) -> bool:
        return self.associator == self.rhs


def classical_limit_compare(triples: Iterable[tuple], hbars=(1, Fraction(1, 2), Fraction(1, 3))
                            ) -> list[LimitRow]:
    """Associator next to hbar^2 [[a, c], b] along a family that contracts as hbar -> 0.

    With the standard products the associator does not depend on hbar at all, so
    the family keeps the bracket at hbar = 1 and scales the Jordan product by hbar;
    both sides then carry a factor hbar^2.
    """
    rows = []
    triples = list(triples)
    for h in hbars:
        h = _check_hbar(h)

        def jh(x, y):
            return jordan(x, y) * h

        for a, b, c in triples:
            assoc = jh(jh(a, b), c) - jh(a, jh(b, c))
            rhs = lie(lie(a, c, 1), b, 1) * (h * h)
            rows.append(LimitRow(h, (a, b, c), assoc, rhs))
    return rows


# search ------------------------------------------------------------------------

def random_hermitian(d: int, rng, bound: int = 2) -> HermitianElement:
    rows = [[_ZERO] * d for _ in range(d)]
    for i in range(d):
        rows[i][i] = GaussianRational(rng.randint(-bound, bound))
        for j in range(i + 1, d):
            z = GaussianRational(rng.randint(-bound, bound), rng.randint(-bound, bound))
            rows[i][j], rows[j][i] = z, z.conjugate()
    return HermitianElement(tuple(tuple(r) for r in rows))


def search(d: int, rng, trials: int = 10, hbar=1) -> list[dict]:
    """Random subspace pairs; records weak-condition and axiom status of each."""
    alg = LJAlgebra(d, hbar)
    out = []
    for _ in range(trials):
        kb = rng.randint(1, d * d - 1)
        ks = rng.randint(0, d * d - kb)
        gens = [random_hermitian(d, rng) for _ in range(kb)]
        # closing B under the identity keeps the weak conditions reachable
        if rng.random() < 0.5:
            gens.append(HermitianElement.identity(d))
        b = ExplicitSpan.span(alg.ambient, gens)
        s = ExplicitSpan.span(alg.ambient, [random_hermitian(d, rng) for _ in range(ks)])
        rep, quo = quantum_reduce(b, s, alg)
        weak = quo is not None
        axioms = bool(quo and quo.axioms.passed)
        out.append({"B_dim": b.dim, "S_dim": s.dim, "weak": weak, "axioms": axioms,
                    "interesting": weak and not axioms})
    return out
