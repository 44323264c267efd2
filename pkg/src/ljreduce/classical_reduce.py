"""Classical (Poisson) reductions: symmetries, constraints, and subspace reduction.

The reduced algebra B/(B n I) is identified with (B + I)/I, i.e. with
restrictions to the submanifold N, so induced brackets are compared as
polynomials in the coordinates of N.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Sequence

from ljreduce.exactalg import Polynomial, format_polynomial, packed_items
from ljreduce.poisson import (JacobiReport, PoissonBivector, PolyVectorField, bracket,
                              check_jacobi)
from ljreduce.report import Condition, ConditionReport
from ljreduce.subspaces import (ExplicitSpan, InvariantSpace, NormalizerSpace, PolyAmbient,
                                RestrictedInvariantSpace, StructuredSpace, VanishingIdeal,
                                _augmented_kernel, _coords, quotient, solve_linear,
                                span_intersect, span_sum, truncate)


class LiftError(ValueError):
    def __init__(self, coordinate: str, degree: int):
        self.coordinate = coordinate
        self.degree = degree
        super().__init__(f"no lift of {coordinate} into B at degree <= {degree}")


class NotLieSubalgebra(ValueError):
    def __init__(self, condition: Condition):
        self.condition = condition
        super().__init__(f"B is not a Lie subalgebra: {condition.witness}")


def _fmt(p: Polynomial) -> str:
    return format_polynomial(p)


@dataclass
class ReductionScenario:
    """Ambient bivector, coordinate submanifold N = {x_k = 0 : k in coords} and reduction data."""

    pi: PoissonBivector
    coords: tuple = ()
    b_fields: tuple = ()
    b_global: bool = False
    e_fields: tuple = ()
    constraints: tuple = ()
    b_minus_fields: tuple | None = None
    b_plus_fields: tuple | None = None
    b_plus_global: bool = False
    d_check: int = 2
    d_work: int | None = None
    jacobi_degree: int = 3
    name: str = ""

    def __post_init__(self):
        self.coords = _coords(self.pi.vars, self.coords)
        for group in (self.b_fields, self.e_fields, self.b_minus_fields or (),
                      self.b_plus_fields or ()):
            for X in group:
                if X.vars != self.pi.vars:
                    raise ValueError("vector field variables differ from the bivector's")
        for phi in self.constraints:
            if phi.vars != self.pi.vars:
                raise ValueError("constraint variables differ from the bivector's")
        if self.d_check < 1:
            raise ValueError("d_check must be >= 1")
        if self.d_work is None:
            self.d_work = self.d_check + 2
        if self.d_work < self.d_check:
            raise ValueError("d_work must be >= d_check")

    @property
    def vars(self):
        return self.pi.vars

    @property
    def keep(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.pi.nvars) if i not in self.coords)

    @property
    def n_vars(self) -> tuple[str, ...]:
        return tuple(self.vars[i] for i in self.keep)

    def ideal(self) -> VanishingIdeal:
        return VanishingIdeal(self.vars, self.coords)

    def b_space(self) -> StructuredSpace:
        if self.b_global:
            return InvariantSpace(self.vars, self.b_fields)
        return RestrictedInvariantSpace(self.vars, self.b_fields, self.coords)

    def b_minus_space(self) -> StructuredSpace:
        return InvariantSpace(self.vars, self.b_minus_fields or ())

    def b_plus_space(self) -> StructuredSpace:
        if self.b_plus_fields is None:
            return self.b_space()
        if self.b_plus_global:
            return InvariantSpace(self.vars, self.b_plus_fields)
        return RestrictedInvariantSpace(self.vars, self.b_plus_fields, self.coords)

    def to_n(self, p: Polynomial) -> Polynomial:
        """Restriction to N, written in the coordinates of N."""
        return p.restrict_zero(self.coords).drop_variables(self.keep)


def restricted_image(space: StructuredSpace, coords, degree: int, cap: int) -> ExplicitSpan:
    """Restrictions to N of space elements up to ``degree``, cut down to degree <= cap."""
    from ljreduce.exactalg import monomials_up_to
    coords = tuple(coords)
    lifter = Lifter(space, coords, degree)
    low = [Polynomial.monomial(space.vars, e) for e in monomials_up_to(len(space.vars), cap)
           if not any(e[k] for k in coords)]
    return span_intersect(lifter.restricted, ExplicitSpan.span(lifter.restricted.ambient, low))


class Lifter:
    """Lifts functions on N into a structured space, at a fixed degree bound."""

    def __init__(self, space: StructuredSpace, coords, degree: int):
        self.space, self.coords, self.degree = space, tuple(coords), degree
        self.trunc = truncate(space, degree)
        ideal = truncate(VanishingIdeal(space.vars, coords), degree)
        self.kernel = span_intersect(self.trunc, ideal)
        self.basis = self.trunc.basis()
        self._images = [dict(packed_items(b.restrict_zero(coords))) for b in self.basis]
        ambient = PolyAmbient(space.vars, degree)
        self.restricted = ExplicitSpan.span(ambient, (b.restrict_zero(coords) for b in self.basis))

    def can_lift(self, target: Polynomial) -> bool:
        if target.degree > self.degree:
            return False
        return self.restricted.contains(target.restrict_zero(self.coords))

    def lift(self, target: Polynomial) -> Polynomial | None:
        """Canonical lift: the solution reduced modulo the truncated B n I."""
        if target.degree > self.degree:
            return None
        coeffs = solve_linear(self._images, dict(packed_items(target.restrict_zero(self.coords))))
        if coeffs is None:
            return None
        f = Polynomial.zero(self.space.vars)
        for c, b in zip(coeffs, self.basis):
            if c:
                f = f + b * c
        return self.kernel.reduce(f)


def _pair_sweep(name: str, pairs, op: Callable, test: Callable, describe=_fmt,
                residual: Callable | None = None) -> Condition:
    count = 0
    for a, b in pairs:
        count += 1
        value = op(a, b)
        if not test(value):
            res = residual(value) if residual else value
            return Condition(name, False, count,
                             witness={"pair": [describe(a), describe(b)], "residual": _fmt(res)})
    return Condition(name, True, count)


def _element_sweep(name: str, elems, test: Callable, residual: Callable | None = None
                   ) -> Condition:
    count = 0
    for f in elems:
        count += 1
        if not test(f):
            res = residual(f) if residual else f
            return Condition(name, False, count, witness={"element": _fmt(f), "residual": _fmt(res)})
    return Condition(name, True, count)


def lie_closure(pi: PoissonBivector, space: StructuredSpace, degree: int,
                name: str = "lie_closure") -> Condition:
    """Basis-pair sweep of {S_D, S_D} inside S (structured membership)."""
    basis = truncate(space, degree).basis()
    return _pair_sweep(name, combinations(basis, 2), lambda f, g: bracket(pi, f, g),
                       space.member, residual=lambda v: space.witness(v))


@dataclass
class ReducedBracket:
    """Induced bracket on representatives; values are canonical classes, i.e. functions on N."""

    representatives: list
    classes: list
    structure: dict
    n_vars: tuple
    bivector: PoissonBivector | None = None
    jacobi: JacobiReport | None = None
    lifts: dict = field(default_factory=dict)

    def structure_strings(self) -> dict:
        return {f"{{{_fmt(self.classes[i])}, {_fmt(self.classes[j])}}}": _fmt(v)
                for (i, j), v in sorted(self.structure.items())}

    def bivector_strings(self) -> dict:
        if self.bivector is None:
            return {}
        return {f"{self.n_vars[i]}^{self.n_vars[j]}": _fmt(p)
                for (i, j), p in self.bivector.components.items()}


# reduction by symmetries ----------------------------------------------------

def reduce_by_symmetries(pi: PoissonBivector, e_fields: Sequence[PolyVectorField],
                         degree: int = 2) -> tuple[ConditionReport, ReducedBracket | None]:
    if not e_fields:
        raise ValueError("symmetry reduction needs at least one vector field")
    space = InvariantSpace(pi.vars, e_fields)
    trunc = truncate(space, degree)
    report = ConditionReport(dims={"invariants": trunc.dim})
    basis = trunc.basis()
    cond = report.add(_pair_sweep("lie_closure", combinations(basis, 2),
                                  lambda f, g: bracket(pi, f, g), space.member,
                                  residual=space.witness))
    if not cond.passed:
        return report, None
    structure = {(i, j): bracket(pi, basis[i], basis[j])
                 for i, j in combinations(range(len(basis)), 2)}
    return report, ReducedBracket(basis, basis, structure, pi.vars)


# reduction by constraints ---------------------------------------------------

def vanishing_ideal(variables, coords) -> VanishingIdeal:
    return VanishingIdeal(variables, coords)


def normalizer(pi: PoissonBivector, coords) -> NormalizerSpace:
    return NormalizerSpace(pi, coords)


def constraint_matrix(pi: PoissonBivector, constraints: Sequence[Polynomial]) -> list[list]:
    return [[bracket(pi, a, b) for b in constraints] for a in constraints]


def _rational_inverse(m: list[list]) -> list[list] | None:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [[x.numerator if x.denominator == 1 else x for x in row[n:]] for row in a]


def _det(m: list[list]) -> Fraction:
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def second_class_check(pi: PoissonBivector, constraints: Sequence[Polynomial], coords,
                       degree: int = 2) -> ConditionReport:
    """Invertibility of {phi_a, phi_b} on N at the origin, plus the N + I spanning test."""
    coords = _coords(pi.vars, coords)
    ideal = VanishingIdeal(pi.vars, coords)
    for phi in constraints:
        if not ideal.member(phi):
            raise ValueError(f"constraint {_fmt(phi)} does not vanish on N")
    report = ConditionReport()
    c = [[p.restrict_zero(coords) for p in row] for row in constraint_matrix(pi, constraints)]
    c0 = [[p.constant_term() for p in row] for row in c]
    det = _det(c0) if c0 else Fraction(0)
    report.add(Condition("second_class_det", det != 0, 1,
                         witness=None if det != 0 else {
                             "matrix": [[_fmt(p) for p in row] for row in c]},
                         detail=f"det C(0) = {det}"))
    report.add(normalizer_plus_ideal(pi, coords, degree, report.dims))
    return report


def normalizer_plus_ideal(pi: PoissonBivector, coords, degree: int,
                          dims: dict | None = None) -> Condition:
    """Does N_D + I_D fill the whole degree-D space?  Missing classes are listed."""
    tn = truncate(NormalizerSpace(pi, coords), degree)
    ti = truncate(VanishingIdeal(pi.vars, coords), degree)
    total = span_sum(tn, ti)
    full = ExplicitSpan.full(tn.ambient)
    if dims is not None:
        dims.update({"normalizer": tn.dim, "ideal": ti.dim, "normalizer_plus_ideal": total.dim,
                     "ambient": full.dim})
    if total.dim == full.dim:
        return Condition("normalizer_plus_ideal_full", True, full.dim)
    missing = quotient(full, total).representatives()
    missing.sort(key=lambda p: (p.degree, [(-sum(e), [-x for x in e]) for e, _ in p.terms()]))
    return Condition("normalizer_plus_ideal_full", False, full.dim,
                     witness={"missing": [_fmt(p) for p in missing[:8]],
                              "codimension": str(full.dim - total.dim)})


class DiracBracket:
    """{f, g}_D = {f, g} - {f, phi_a} Cinv^{ab} {phi_b, g}.

    A constant constraint matrix is inverted exactly; otherwise Cinv is the
    Neumann series around C(0), truncated at total degree ``degree``.
    """

    def __init__(self, pi: PoissonBivector, constraints: Sequence[Polynomial], degree: int = 4):
        self.pi = pi
        self.constraints = tuple(constraints)
        self.degree = degree
        c = constraint_matrix(pi, self.constraints)
        c0 = [[p.constant_term() for p in row] for row in c]
        inv0 = _rational_inverse(c0) if c0 else []
        if inv0 is None:
            raise ValueError("constraint matrix is not invertible at the origin")
        self.exact = all(p.is_constant() for row in c for p in row)
        n = len(c)
        zero = Polynomial.zero(pi.vars)
        inv0p = [[Polynomial.constant(pi.vars, x) for x in row] for row in inv0]
        if self.exact:
            self.cinv = inv0p
            return
        rest = [[c[i][j] - c0[i][j] for j in range(n)] for i in range(n)]
        step = _matmul(inv0p, rest, degree)
        step = [[-p for p in row] for row in step]
        term = inv0p
        total = [row[:] for row in inv0p]
        for _ in range(degree):
            term = _matmul(step, term, degree)
            if all(p.is_zero() for row in term for p in row):
                break
            total = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(total, term)]
        self.cinv = [[p if not p.is_zero() else zero for p in row] for row in total]

    def __call__(self, f: Polynomial, g: Polynomial) -> Polynomial:
        pi = self.pi
        out = bracket(pi, f, g)
        fphi = [bracket(pi, f, phi) for phi in self.constraints]
        phig = [bracket(pi, phi, g) for phi in self.constraints]
        for a, fa in enumerate(fphi):
            if fa.is_zero():
                continue
            for b, gb in enumerate(phig):
                cab = self.cinv[a][b]
                if not cab.is_zero() and not gb.is_zero():
                    out = out - fa * cab * gb
        return out


def _matmul(a, b, degree):
    n, m, k = len(a), len(b[0]) if b else 0, len(b)
    vars_ = a[0][0].vars
    out = [[Polynomial.zero(vars_) for _ in range(m)] for _ in range(n)]
    for i in range(n):
        for j in range(m):
            acc = Polynomial.zero(vars_)
            for t in range(k):
                acc = acc + a[i][t] * b[t][j]
            out[i][j] = acc.truncate(degree)
    return out


def dirac_bracket(pi: PoissonBivector, constraints: Sequence[Polynomial], f: Polynomial,
                  g: Polynomial, degree: int = 4) -> Polynomial:
    return DiracBracket(pi, constraints, degree)(f, g)


def reduce_by_constraints(pi: PoissonBivector, coords, degree: int = 2,
                          constraints: Sequence[Polynomial] = ()
                          ) -> tuple[ConditionReport, ReducedBracket]:
    """N/(N n I): normalizer modulo its intersection with the vanishing ideal."""
    coords = _coords(pi.vars, coords)
    nspace = NormalizerSpace(pi, coords)
    tn = truncate(nspace, degree)
    ti = truncate(VanishingIdeal(pi.vars, coords), degree)
    tni = span_intersect(tn, ti)
    report = ConditionReport(dims={"normalizer": tn.dim, "normalizer_cap_ideal": tni.dim})
    basis = tn.basis()
    report.add(_pair_sweep("normalizer_lie_closure", combinations(basis, 2),
                           lambda f, g: bracket(pi, f, g), nspace.member,
                           residual=nspace.witness))
    report.add(_pair_sweep("lie_ideal_in_normalizer",
                           ((f, h) for f in basis for h in tni.basis()),
                           lambda f, g: bracket(pi, f, g).restrict_zero(coords),
                           lambda v: v.is_zero()))
    if constraints:
        report.extend(second_class_check(pi, constraints, coords, degree))
    else:
        report.add(normalizer_plus_ideal(pi, coords, degree, report.dims))
    q = quotient(tn, tni)
    reps = q.representatives()
    keep = tuple(i for i in range(pi.nvars) if i not in coords)

    def to_n(p):
        return p.restrict_zero(coords).drop_variables(keep)

    structure = {(i, j): to_n(bracket(pi, reps[i], reps[j]))
                 for i, j in combinations(range(len(reps)), 2)}
    report.dims["quotient"] = len(reps)
    return report, ReducedBracket(reps, [to_n(r) for r in reps], structure,
                                  tuple(pi.vars[i] for i in keep))


def dirac_reduce(pi: PoissonBivector, constraints: Sequence[Polynomial], coords,
                 degree: int = 2, work_degree: int = 4, jacobi_degree: int = 3
                 ) -> tuple[ConditionReport, ReducedBracket | None]:
    """Second-class check, then the Dirac bracket of N's coordinates as a bivector on N."""
    coords = _coords(pi.vars, coords)
    report = second_class_check(pi, constraints, coords, degree)
    if not report["second_class_det"].passed:
        return report, None
    db = DiracBracket(pi, constraints, work_degree)
    keep = tuple(i for i in range(pi.nvars) if i not in coords)
    n_names = tuple(pi.vars[i] for i in keep)
    coords_p = [Polynomial.var(pi.vars, i) for i in keep]

    def to_n(p):
        return p.restrict_zero(coords).drop_variables(keep)

    basis = [Polynomial.monomial(pi.vars, e) for e in _monos(pi.nvars, degree) if sum(e)]
    report.add(_pair_sweep("constraints_central_on_N",
                           ((phi, g) for phi in constraints for g in basis),
                           lambda f, g: db(f, g).restrict_zero(coords), lambda v: v.is_zero()))
    comps = {}
    for a, b in combinations(range(len(keep)), 2):
        v = to_n(db(coords_p[a], coords_p[b]))
        if not v.is_zero():
            comps[(a, b)] = v
    pin = PoissonBivector(n_names, comps)
    jac = check_jacobi(pin, jacobi_degree)
    report.add(_jacobi_condition(jac))
    reps = coords_p
    structure = {(a, b): to_n(db(reps[a], reps[b])) for a, b in combinations(range(len(reps)), 2)}
    return report, ReducedBracket(reps, [to_n(r) for r in reps], structure, n_names,
                                  bivector=pin, jacobi=jac)


def _monos(n, degree):
    from ljreduce.exactalg import monomials_up_to
    return monomials_up_to(n, degree)


def _jacobi_condition(jac: JacobiReport, name: str = "jacobi") -> Condition:
    if jac.passed:
        return Condition(name, True, jac.sweep_triples,
                         detail=f"Schouten square vanishes; sweep to degree {jac.sweep_degree} "
                                f"{'agrees' if jac.consistent else 'DISAGREES'}")
    return Condition(name, False, jac.sweep_triples,
                     witness={"triple": [_fmt(p) for p in jac.witness],
                              "residual": _fmt(jac.residual)},
                     detail="Schouten square nonzero; sweep "
                            f"{'agrees' if jac.consistent else 'DISAGREES'}")


# generalized reduction ------------------------------------------------------

class InducedBracket:
    """Bracket on B/(B n I) by lift, bracket, project; values are functions on N."""

    def __init__(self, scenario: ReductionScenario):
        self.scenario = scenario
        self.pi = scenario.pi

    def project(self, f: Polynomial) -> Polynomial:
        return self.scenario.to_n(f)

    def __call__(self, f: Polynomial, g: Polynomial) -> Polynomial:
        return self.project(bracket(self.pi, f, g))

    def jordan(self, f: Polynomial, g: Polynomial) -> Polynomial:
        return f * g


def check_antisymmetry(induced: InducedBracket, reps: Sequence[Polynomial]) -> Condition:
    return _pair_sweep("antisymmetry", ((a, b) for a in reps for b in reps),
                       lambda a, b: induced(a, b) + induced(b, a), lambda v: v.is_zero())


def check_bilinearity(induced: InducedBracket, reps: Sequence[Polynomial],
                      alpha=Fraction(2, 3), beta=Fraction(-5, 7)) -> Condition:
    count = 0
    for a, b in combinations(reps, 2):
        for c in reps:
            count += 1
            lhs = induced(a * alpha + b * beta, c)
            rhs = induced(a, c) * alpha + induced(b, c) * beta
            if lhs != rhs:
                return Condition("bilinearity", False, count,
                                 witness={"triple": [_fmt(a), _fmt(b), _fmt(c)],
                                          "residual": _fmt(lhs - rhs)})
    return Condition("bilinearity", True, count)


def check_leibniz(induced: InducedBracket, reps: Sequence[Polynomial]) -> Condition:
    """{a o b, c} = a o {b, c} + {a, c} o b on classes, for a <= b (symmetric in a, b)."""
    proj = [induced.project(r) for r in reps]
    cache: dict[tuple[int, int], Polynomial] = {}

    def br(i, j):
        if (i, j) not in cache:
            cache[(i, j)] = induced(reps[i], reps[j])
        return cache[(i, j)]

    count = 0
    m = len(reps)
    for i in range(m):
        for j in range(i, m):
            prod = induced.jordan(reps[i], reps[j])
            for k in range(m):
                count += 1
                lhs = induced(prod, reps[k])
                rhs = proj[i] * br(j, k) + br(i, k) * proj[j]
                if lhs != rhs:
                    return Condition("leibniz", False, count,
                                     witness={"triple": [_fmt(reps[i]), _fmt(reps[j]),
                                                         _fmt(reps[k])],
                                              "residual": _fmt(lhs - rhs)})
    return Condition("leibniz", True, count)


@dataclass
class GeneralizedResult:
    report: ConditionReport
    reduced: ReducedBracket | None = None
    induced: InducedBracket | None = None
    trunc_b: ExplicitSpan | None = None
    trunc_bi: ExplicitSpan | None = None
    lifter: Lifter | None = None


def reduced_bivector(scenario: ReductionScenario, lifter: Lifter | None = None,
                     extra: Polynomial | None = None) -> tuple[PoissonBivector, dict]:
    """Components restrict({lift u, lift v}) over coordinate pairs of N.

    ``extra`` (an element of B n I) is added to every lift to test lift independence.
    """
    s = scenario
    lifter = lifter or Lifter(s.b_space(), s.coords, s.d_work)
    lifts = {}
    for u in s.keep:
        f = lifter.lift(Polynomial.var(s.vars, u))
        if f is None:
            raise LiftError(s.vars[u], lifter.degree)
        lifts[s.vars[u]] = f if extra is None else f + extra
    names = s.n_vars
    comps = {}
    for a, b in combinations(range(len(names)), 2):
        v = s.to_n(bracket(s.pi, lifts[names[a]], lifts[names[b]]))
        if not v.is_zero():
            comps[(a, b)] = v
    return PoissonBivector(names, comps), lifts


def generalized_reduce(scenario: ReductionScenario, with_leibniz: bool = True
                       ) -> GeneralizedResult:
    """Weak conditions, induced bracket on B/(B n I), lift independence and Jacobi audit."""
    s = scenario
    pi, coords, dc = s.pi, s.coords, s.d_check
    b = s.b_space()
    tb = truncate(b, dc)
    ti = truncate(s.ideal(), dc)
    tbi = span_intersect(tb, ti)
    report = ConditionReport(dims={"B": tb.dim, "I": ti.dim, "B_cap_I": tbi.dim})
    basis, kernel = tb.basis(), tbi.basis()

    values = {}
    for i, j in combinations(range(len(basis)), 2):
        values[(i, j)] = bracket(pi, basis[i], basis[j]).restrict_zero(coords)
    top = max((v.degree for v in values.values()), default=0)
    lift_degree = max(s.d_work, top + (s.d_work - dc))
    lifter = Lifter(b, coords, lift_degree)
    report.dims["lift_degree"] = lift_degree
    count = 0
    cond_a = Condition("weak_a", True, 0)
    for (i, j), v in values.items():
        count += 1
        if not lifter.can_lift(v):
            cond_a = Condition("weak_a", False, count,
                               witness={"pair": [_fmt(basis[i]), _fmt(basis[j])],
                                        "restricted_bracket": _fmt(v)},
                               detail=f"no element of B up to degree {lift_degree} "
                                      "has this restriction")
            break
    else:
        cond_a.checked = count
    report.add(cond_a)
    name_b = "weak_b_lie_ideal" if not s.b_fields else "weak_b"
    cond_b = report.add(_pair_sweep(name_b, ((f, h) for f in basis for h in kernel),
                                    lambda f, g: bracket(pi, f, g).restrict_zero(coords),
                                    lambda v: v.is_zero()))
    if not s.b_fields:
        cond_b.detail = "B = 0: reduction requires I to be a Lie ideal"
    result = GeneralizedResult(report, trunc_b=tb, trunc_bi=tbi, lifter=lifter)
    if not (cond_a.passed and cond_b.passed):
        return result

    induced = InducedBracket(s)
    result.induced = induced
    q = quotient(tb, tbi)
    reps = q.representatives()
    report.dims["quotient"] = len(reps)
    classes = [s.to_n(r) for r in reps]
    structure = {(i, j): induced(reps[i], reps[j]) for i, j in combinations(range(len(reps)), 2)}

    extra = None
    if kernel:
        extra = kernel[0]
        for k in kernel[1:]:
            extra = extra + k
        alt = [r + extra for r in reps]
        report.add(_pair_sweep("lift_independence",
                               ((i, j) for i, j in combinations(range(len(reps)), 2)),
                               lambda i, j: induced(alt[i], alt[j]) - structure[(i, j)],
                               lambda v: v.is_zero(),
                               describe=lambda i: _fmt(classes[i]) if isinstance(i, int) else i))
    else:
        report.add(Condition("lift_independence", True, 0, detail="B n I is zero at this degree"))

    if with_leibniz:
        report.add(check_antisymmetry(induced, reps))
        report.add(check_leibniz(induced, reps))

    reduced = ReducedBracket(reps, classes, structure, s.n_vars)
    result.reduced = reduced
    try:
        lifter_w = lifter if lifter.degree >= s.d_work else Lifter(b, coords, s.d_work)
        pin, lifts = reduced_bivector(s, lifter_w)
    except LiftError as exc:
        report.add(Condition("reduced_bivector", False, 0,
                             witness={"coordinate": exc.coordinate},
                             detail=str(exc)))
        return result
    reduced.bivector, reduced.lifts = pin, lifts
    if extra is not None:
        pin_alt, _ = reduced_bivector(s, lifter_w, extra=extra)
        report.add(Condition("bivector_lift_independence", pin_alt == pin, len(s.keep),
                             witness=None if pin_alt == pin else
                             {"alternate": repr(pin_alt), "canonical": repr(pin)}))
    consistent = _pair_sweep("bivector_consistent",
                             combinations(range(len(reps)), 2),
                             lambda i, j: structure[(i, j)]
                             - bracket(pin, classes[i], classes[j]),
                             lambda v: v.is_zero(),
                             describe=lambda i: _fmt(classes[i]))
    report.add(consistent)
    jac = check_jacobi(pin, s.jacobi_degree)
    reduced.jacobi = jac
    report.add(_jacobi_condition(jac))
    return result


# strong certificate ---------------------------------------------------------

def certify_strong(scenario: ReductionScenario) -> ConditionReport:
    """Sandwich B- in B in B+, equal sums with I, and both strong bracket inclusions."""
    s = scenario
    if s.b_minus_fields is None:
        raise ValueError("certificate requires B- fields")
    pi, coords, dc = s.pi, s.coords, s.d_check
    b, bm, bp = s.b_space(), s.b_minus_space(), s.b_plus_space()
    t_b, t_bm, t_bp = truncate(b, dc), truncate(bm, dc), truncate(bp, dc)
    t_i = truncate(s.ideal(), dc)
    t_bpi = span_intersect(t_bp, t_i)
    report = ConditionReport(dims={"B": t_b.dim, "B_minus": t_bm.dim, "B_plus": t_bp.dim,
                                   "B_plus_cap_I": t_bpi.dim})

    report.add(_element_sweep("b_minus_in_b", t_bm.basis(), b.member, b.witness))
    report.add(_element_sweep("b_in_b_plus", t_b.basis(), bp.member, bp.witness))

    def same_sum(name, src: StructuredSpace, dst: StructuredSpace):
        # restrictions reached by src at the working degree, capped at d_check,
        # must also be reached by dst at the working degree
        dst_lift = Lifter(dst, coords, s.d_work)
        targets = restricted_image(src, coords, s.d_work, dc).basis()
        for n, f in enumerate(targets, 1):
            if not dst_lift.can_lift(f):
                return Condition(name, False, n, witness={"restriction": _fmt(f)},
                                 detail=f"not the restriction of any element up to degree "
                                        f"{s.d_work}")
        return Condition(name, True, len(targets))

    report.add(same_sum("b_minus_sum", b, bm))
    report.add(same_sum("b_plus_sum", bp, b))
    report.add(_pair_sweep("strong_a", combinations(t_bm.basis(), 2),
                           lambda f, g: bracket(pi, f, g), bp.member, residual=bp.witness))
    report.add(_pair_sweep("strong_b", ((f, h) for f in t_bm.basis() for h in t_bpi.basis()),
                           lambda f, g: bracket(pi, f, g).restrict_zero(coords),
                           lambda v: v.is_zero()))
    return report


# constraints then symmetries -------------------------------------------------

def tangential_part(scenario: ReductionScenario) -> list[PolyVectorField]:
    """Fields spanning B n TN (fields along N with vanishing normal components).

    Normal components restricted to N must be constant; the combination is then
    found by a rational kernel computation.
    """
    s = scenario
    rows = []
    for X in s.b_fields:
        row = {}
        for col, k in enumerate(s.coords):
            c = X.components[k].restrict_zero(s.coords)
            if not c.is_constant():
                raise ValueError("B n TN needs constant normal components along N")
            if c.constant_term():
                row[col] = c.constant_term()
        rows.append(row)
    kernel = _augmented_kernel(rows, len(s.coords)) if rows else []
    out = []
    for vec in kernel:
        comps = [Polynomial.zero(s.vars) for _ in s.vars]
        for a, c in vec.items():
            X = s.b_fields[a]
            for k in s.keep:
                comps[k] = comps[k] + X.components[k].restrict_zero(s.coords) * c
        field_ = PolyVectorField(tuple(comps))
        if not field_.is_zero():
            out.append(field_)
    return out


@dataclass
class TwoStageResult:
    report: ConditionReport
    space: ExplicitSpan
    structure: dict
    common: list
    generalized_values: dict
    two_stage_values: dict


def two_stage_reduce(scenario: ReductionScenario) -> TwoStageResult:
    """Reduce by constraints to N, then by the symmetries E = B n TN; compare with B/(B n I)."""
    s = scenario
    pi, coords, dc, dw = s.pi, s.coords, s.d_check, s.d_work
    b = s.b_space()
    closure = lie_closure(pi, b, dc, name="b_lie_subalgebra")
    if not closure.passed:
        raise NotLieSubalgebra(closure)
    report = ConditionReport()
    report.add(closure)
    nspace = NormalizerSpace(pi, coords)
    tb = truncate(b, dc)
    if not s.b_global:
        # containment in the normalizer is forced only for fields given along N
        report.add(_element_sweep("b_in_normalizer", tb.basis(), nspace.member, nspace.witness))
    amb = PolyAmbient(s.vars, dc)
    tn = truncate(nspace, dc)
    stage1 = ExplicitSpan.span(amb, (f.restrict_zero(coords) for f in tn.basis()))
    e_fields = tangential_part(s)
    if e_fields:
        basis1 = stage1.basis()
        images = []
        keys: dict = {}
        for h in basis1:
            vec = {}
            for a, X in enumerate(e_fields):
                for k, c in packed_items(X(h).restrict_zero(coords)):
                    vec[keys.setdefault((a, k), len(keys))] = c
            images.append(vec)
        kern = _augmented_kernel(images, len(keys))
        stage2 = ExplicitSpan.span(amb, (_combine(basis1, v, s.vars) for v in kern))
    else:
        stage2 = stage1
    gen_image = ExplicitSpan.span(amb, (f.restrict_zero(coords) for f in tb.basis()))
    common = span_intersect(stage2, gen_image)
    report.dims.update({"stage1": stage1.dim, "stage2": stage2.dim, "generalized": gen_image.dim,
                        "common": common.dim, "E_fields": len(e_fields)})
    lift_b = Lifter(b, coords, dw)
    lift_n = Lifter(nspace, coords, dw)
    cbasis = common.basis()
    gen_vals, two_vals = {}, {}
    mismatch = None
    for i, j in combinations(range(len(cbasis)), 2):
        fb, gb = lift_b.lift(cbasis[i]), lift_b.lift(cbasis[j])
        fn, gn = lift_n.lift(cbasis[i]), lift_n.lift(cbasis[j])
        if None in (fb, gb, fn, gn):
            raise LiftError(_fmt(cbasis[i]) + " / " + _fmt(cbasis[j]), dw)
        gv, tv = s.to_n(bracket(pi, fb, gb)), s.to_n(bracket(pi, fn, gn))
        gen_vals[(i, j)], two_vals[(i, j)] = gv, tv
        if gv != tv and mismatch is None:
            mismatch = {"pair": [_fmt(cbasis[i]), _fmt(cbasis[j])],
                        "generalized": _fmt(gv), "two_stage": _fmt(tv)}
    report.add(Condition("two_stage_equals_generalized", mismatch is None, len(gen_vals),
                         witness=mismatch))
    return TwoStageResult(report, stage2, two_vals, cbasis, gen_vals, two_vals)


def _combine(basis, vec, variables):
    out = Polynomial.zero(variables)
    for i, c in vec.items():
        out = out + basis[i] * c
    return out


# search harness --------------------------------------------------------------

def example_fields(variables, lam: Polynomial) -> tuple[PolyVectorField, PolyVectorField]:
    """The pair d/dx1, d/dx2 - lam d/dy1 on the standard six coordinates."""
    return (PolyVectorField.from_mapping(variables, {variables[0]: 1}),
            PolyVectorField.from_mapping(variables, {variables[1]: 1, variables[3]: -lam}))


def random_lambda(variables, rng, degree: int = 2, terms: int = 2) -> Polynomial:
    """Random small-integer polynomial in the N coordinates (x3, y1, y2, y3)."""
    from ljreduce.exactalg import monomials_up_to
    n_idx = (2, 3, 4, 5)
    pool = [e for e in monomials_up_to(4, degree)]
    out = Polynomial.zero(variables)
    for e in rng.sample(pool, min(terms, len(pool))):
        exps = [0] * len(variables)
        for k, v in zip(n_idx, e):
            exps[k] = v
        out = out + Polynomial.monomial(variables, exps, rng.choice((-2, -1, 1, 2)))
    return out


@dataclass
class SearchRecord:
    lam: str
    weak: bool
    jacobi: bool
    certificate: bool

    @property
    def candidate(self) -> bool:
        """Jacobi holds, yet the strong certificate is not met."""
        return self.weak and self.jacobi and not self.certificate

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "weak": self.weak, "jacobi": self.jacobi,
                "certificate": self.certificate, "candidate": self.candidate}


def search(pi: PoissonBivector, coords, rng, trials: int = 5, degree: int = 2,
           d_check: int = 2) -> list[SearchRecord]:
    """Sample the d/dx1, d/dx2 - lam d/dy1 family over random lambda; certificate uses global extensions."""
    out = []
    seen = set()
    for _ in range(trials):
        lam = random_lambda(pi.vars, rng, degree)
        if lam in seen:
            continue
        seen.add(lam)
        fields_ = example_fields(pi.vars, lam)
        s = ReductionScenario(pi, coords, fields_, b_minus_fields=fields_, d_check=d_check)
        gen = generalized_reduce(s, with_leibniz=False)
        weak = gen.report["weak_a"].passed and gen.report["weak_b"].passed
        jac = bool(gen.reduced and gen.reduced.jacobi and gen.reduced.jacobi.passed)
        cert = certify_strong(s).passed
        out.append(SearchRecord(_fmt(lam), weak, jac, cert))
    return out
