"""Bivector calculus on polynomial functions.

Conventions: ``{f, g} = sum_{i<j} P^ij (d_i f d_j g - d_j f d_i g)`` and the
Hamiltonian field of ``g`` acts by ``X_g f = {g, f}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ljreduce.exactalg import Polynomial, VariableMismatch, monomials_up_to


class PoissonBivector:
    """Antisymmetric bivector stored by its upper-triangular components."""

    def __init__(self, variables, components: Mapping[tuple, Polynomial] | None = None):
        if isinstance(variables, int):
            variables = tuple(f"x{i + 1}" for i in range(variables))
        self.vars = tuple(variables)
        n = len(self.vars)
        comps: dict[tuple[int, int], Polynomial] = {}
        for (i, j), p in (components or {}).items():
            i, j = self._index(i), self._index(j)
            if not isinstance(p, Polynomial):
                p = Polynomial.constant(self.vars, p)
            if p.vars != self.vars:
                raise VariableMismatch(f"component ({i},{j}) has variables {p.vars}")
            if i == j:
                if not p.is_zero():
                    raise ValueError("diagonal bivector component must vanish")
                continue
            if i > j:
                i, j, p = j, i, -p
            total = comps.get((i, j), Polynomial.zero(self.vars)) + p
            if total.is_zero():
                comps.pop((i, j), None)
            else:
                comps[(i, j)] = total
        if any(not (0 <= i < n and 0 <= j < n) for i, j in comps):
            raise IndexError("component index out of range")
        self.components = dict(sorted(comps.items()))

    def _index(self, i) -> int:
        if isinstance(i, str):
            try:
                return self.vars.index(i)
            except ValueError:
                raise KeyError(f"unknown variable {i!r}") from None
        return i

    @classmethod
    def canonical(cls, variables, pairs: Iterable[tuple] | None = None) -> PoissonBivector:
        """Sum of d/dq ^ d/dp over ``pairs``; by default first half against second half."""
        if isinstance(variables, int):
            variables = tuple(f"x{i + 1}" for i in range(variables))
        variables = tuple(variables)
        if pairs is None:
            h = len(variables) // 2
            pairs = [(i, i + h) for i in range(h)]
        return cls(variables, {p: Polynomial.constant(variables, 1) for p in pairs})

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def component(self, i, j) -> Polynomial:
        i, j = self._index(i), self._index(j)
        if i == j:
            return Polynomial.zero(self.vars)
        if i < j:
            return self.components.get((i, j), Polynomial.zero(self.vars))
        return -self.components.get((j, i), Polynomial.zero(self.vars))

    @property
    def max_degree(self) -> int:
        return max((p.degree for p in self.components.values()), default=-1)

    def __eq__(self, other):
        return (isinstance(other, PoissonBivector) and self.vars == other.vars
                and self.components == other.components)

    def __repr__(self):
        parts = [f"({self.vars[i]},{self.vars[j]}): {p}" for (i, j), p in self.components.items()]
        return f"PoissonBivector({', '.join(parts)})"


@dataclass(frozen=True)
class PolyVectorField:
    """Vector field with polynomial coefficients; ``components[k]`` multiplies d/dx_k."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("vector field needs at least one component")
        vars_ = comps[0].vars
        if any(c.vars != vars_ for c in comps) or len(comps) != len(vars_):
            raise VariableMismatch("vector field components must share the ambient variables")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_mapping(cls, variables, coeffs: Mapping) -> PolyVectorField:
        variables = tuple(variables)
        comps = [Polynomial.zero(variables) for _ in variables]
        for k, c in coeffs.items():
            idx = variables.index(k) if isinstance(k, str) else k
            comps[idx] = c if isinstance(c, Polynomial) else Polynomial.constant(variables, c)
        return cls(tuple(comps))

    @property
    def vars(self):
        return self.components[0].vars

    def __call__(self, f: Polynomial) -> Polynomial:
        if f.vars != self.vars:
            raise VariableMismatch("vector field and function live on different variables")
        out = Polynomial.zero(f.vars)
        for k, c in enumerate(self.components):
            if not c.is_zero():
                d = f.pdiff(k)
                if not d.is_zero():
                    out = out + c * d
        return out

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def restrict_zero(self, coords) -> PolyVectorField:
        return PolyVectorField(tuple(c.restrict_zero(coords) for c in self.components))

    def __repr__(self):
        parts = [f"({c}) d/d{v}" for v, c in zip(self.vars, self.components) if not c.is_zero()]
        return "PolyVectorField(" + (" + ".join(parts) or "0") + ")"


@dataclass
class Trivector:
    """Totally antisymmetric 3-vector stored by components with i<j<k."""

    vars: tuple
    components: dict = field(default_factory=dict)

    def is_zero(self) -> bool:
        return not self.components

    def component(self, i, j, k) -> Polynomial:
        idx = [self.vars.index(a) if isinstance(a, str) else a for a in (i, j, k)]
        if len(set(idx)) < 3:
            return Polynomial.zero(self.vars)
        sign = 1
        for a in range(3):
            for b in range(2 - a):
                if idx[b] > idx[b + 1]:
                    idx[b], idx[b + 1] = idx[b + 1], idx[b]
                    sign = -sign
        p = self.components.get(tuple(idx), Polynomial.zero(self.vars))
        return p if sign > 0 else -p

    def evaluate(self, f: Polynomial, g: Polynomial, h: Polynomial) -> Polynomial:
        """Contract with df, dg, dh."""
        out = Polynomial.zero(self.vars)
        d = [[p.pdiff(i) for i in range(len(self.vars))] for p in (f, g, h)]
        for (i, j, k), t in self.components.items():
            det = (d[0][i] * (d[1][j] * d[2][k] - d[1][k] * d[2][j])
                   - d[0][j] * (d[1][i] * d[2][k] - d[1][k] * d[2][i])
                   + d[0][k] * (d[1][i] * d[2][j] - d[1][j] * d[2][i]))
            out = out + t * det
        return out


def _check_vars(pi: PoissonBivector, *polys: Polynomial):
    for p in polys:
        if p.vars != pi.vars:
            if p.nvars != pi.nvars:
                raise VariableMismatch(
                    f"variable count mismatch: bivector has {pi.nvars}, function has {p.nvars}")
            raise VariableMismatch(f"variable names differ: {pi.vars} vs {p.vars}")


def _gradient(f: Polynomial, indices: Iterable[int]) -> dict[int, Polynomial]:
    return {i: f.pdiff(i) for i in indices}


def bracket(pi: PoissonBivector, f: Polynomial, g: Polynomial) -> Polynomial:
    _check_vars(pi, f, g)
    out = Polynomial.zero(pi.vars)
    if f.is_constant() or g.is_constant():
        return out
    uf, ug = f.variables_used(), g.variables_used()
    df, dg = _gradient(f, uf), _gradient(g, ug)
    for (i, j), p in pi.components.items():
        term = None
        if i in uf and j in ug:
            term = df[i] * dg[j]
        if j in uf and i in ug:
            t2 = df[j] * dg[i]
            term = t2 * -1 if term is None else term - t2
        if term is not None and not term.is_zero():
            out = out + p * term
    return out


def hamiltonian_vf(pi: PoissonBivector, g: Polynomial) -> PolyVectorField:
    """Field X with X f = {g, f}."""
    _check_vars(pi, g)
    return PolyVectorField(tuple(bracket(pi, g, Polynomial.var(pi.vars, k))
                                 for k in range(pi.nvars)))


def jacobiator(pi: PoissonBivector, f: Polynomial, g: Polynomial, h: Polynomial) -> Polynomial:
    return (bracket(pi, f, bracket(pi, g, h)) + bracket(pi, g, bracket(pi, h, f))
            + bracket(pi, h, bracket(pi, f, g)))


def schouten_self(pi: PoissonBivector) -> Trivector:
    """Schouten-Nijenhuis square, normalized so that T(df, dg, dh) = 2 Jacobiator(f, g, h)."""
    n = pi.nvars
    comps = {}
    # {x_a, P} = sum_l P^{al} d_l P
    rows = {a: [(l, pi.component(a, l)) for l in range(n)] for a in range(n)}
    rows = {a: [(l, c) for l, c in r if not c.is_zero()] for a, r in rows.items()}
    derivs: dict[tuple[int, int], Polynomial] = {}

    def dcomp(l, a, b):
        key = (a, b) if a < b else (b, a)
        if (l, key) not in derivs:
            derivs[(l, key)] = pi.components.get(key, Polynomial.zero(pi.vars)).pdiff(l)
        d = derivs[(l, key)]
        return d if a < b else -d

    def hamil(a, b, c):
        out = Polynomial.zero(pi.vars)
        for l, coeff in rows[a]:
            d = dcomp(l, b, c)
            if not d.is_zero():
                out = out + coeff * d
        return out

    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                t = hamil(i, j, k) + hamil(j, k, i) + hamil(k, i, j)
                if not t.is_zero():
                    comps[(i, j, k)] = t * 2
    return Trivector(pi.vars, comps)


@dataclass
class JacobiReport:
    passed: bool
    schouten_zero: bool
    sweep_degree: int
    sweep_triples: int
    sweep_witness: tuple | None = None
    sweep_residual: Polynomial | None = None
    witness: tuple | None = None
    residual: Polynomial | None = None
    trivector: Trivector | None = None

    @property
    def consistent(self) -> bool:
        """True when the Schouten test and the independent sweep agree."""
        return self.schouten_zero == (self.sweep_witness is None)


class _SweepCache:
    """Per-monomial gradients reused across the Jacobiator sweep."""

    def __init__(self, pi: PoissonBivector, polys: Sequence[Polynomial]):
        self.pi = pi
        self.polys = polys
        self.grads = [(p.variables_used(), _gradient(p, p.variables_used())) for p in polys]
        self.pairs: dict[tuple[int, int], Polynomial] = {}

    def bracket_with(self, a: int, g: Polynomial) -> Polynomial:
        uf, df = self.grads[a]
        out = Polynomial.zero(self.pi.vars)
        if g.is_constant():
            return out
        ug = g.variables_used()
        dg = {}
        for (i, j), p in self.pi.components.items():
            term = None
            if i in uf and j in ug:
                dg.setdefault(j, g.pdiff(j))
                term = df[i] * dg[j]
            if j in uf and i in ug:
                dg.setdefault(i, g.pdiff(i))
                t2 = df[j] * dg[i]
                term = -t2 if term is None else term - t2
            if term is not None:
                out = out + p * term
        return out

    def pair(self, a: int, b: int) -> Polynomial:
        if (a, b) not in self.pairs:
            self.pairs[(a, b)] = self.bracket_with(a, self.polys[b])
        return self.pairs[(a, b)]

    def jacobiator(self, a: int, b: int, c: int) -> Polynomial:
        # indices satisfy a < b < c; {c,a} = -{a,c}
        return (self.bracket_with(a, self.pair(b, c)) - self.bracket_with(b, self.pair(a, c))
                + self.bracket_with(c, self.pair(a, b)))


def jacobiator_sweep(pi: PoissonBivector, degree: int = 3, stop_at_first: bool = True):
    """Evaluate the Jacobiator on all triples of distinct non-constant monomials.

    Returns ``(count, witness, residual)`` where ``witness`` is a triple of
    monomial polynomials or ``None``.
    """
    n = pi.nvars
    exps = [e for e in monomials_up_to(n, degree) if sum(e)]
    exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    polys = [Polynomial.monomial(pi.vars, e) for e in exps]
    cache = _SweepCache(pi, polys)
    count = 0
    witness = residual = None
    for c in range(len(polys)):
        for b in range(c):
            for a in range(b):
                count += 1
                j = cache.jacobiator(a, b, c)
                if not j.is_zero():
                    if witness is None:
                        witness, residual = (polys[a], polys[b], polys[c]), j
                    if stop_at_first:
                        return count, witness, residual
    return count, witness, residual


def check_jacobi(pi: PoissonBivector, degree: int = 3, full_sweep: bool = False) -> JacobiReport:
    """Decide the Jacobi identity via the Schouten square, confirmed by a monomial sweep."""
    if degree < 1:
        raise ValueError("sweep degree must be >= 1")
    t = schouten_self(pi)
    witness = residual = None
    if not t.is_zero():
        i, j, k = next(iter(t.components))
        coords = tuple(Polynomial.var(pi.vars, a) for a in (i, j, k))
        witness, residual = coords, jacobiator(pi, *coords)
    count, sw, sr = jacobiator_sweep(pi, degree, stop_at_first=not full_sweep)
    return JacobiReport(passed=t.is_zero(), schouten_zero=t.is_zero(), sweep_degree=degree,
                        sweep_triples=count, sweep_witness=sw, sweep_residual=sr,
                        witness=witness, residual=residual, trivector=t)
