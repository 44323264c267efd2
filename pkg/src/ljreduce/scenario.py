"""Scenario files: YAML documents validated into pipeline inputs.

Schema errors carry the line of the offending node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import yaml

from ljreduce.classical_reduce import ReductionScenario
from ljreduce.exactalg import (GaussianRational, Polynomial, PolynomialSyntaxError,
                               UnknownVariableError, parse_gaussian, parse_polynomial)
from ljreduce.liejordan import HermitianElement, LJAlgebra
from ljreduce.poisson import PoissonBivector, PolyVectorField
from ljreduce.subspaces import ExplicitSpan

MODES = ("symmetry", "constraint", "dirac", "generalized", "quantum")


class ScenarioError(ValueError):
    def __init__(self, errors: list[tuple[int | None, str]], source: str = "<scenario>"):
        self.errors = errors
        self.source = source
        super().__init__("\n".join(self.lines()))

    def lines(self) -> list[str]:
        return [f"{self.source}:{ln}: {msg}" if ln else f"{self.source}: {msg}"
                for ln, msg in self.errors]


class _Map(dict):
    line: int = 0
    key_lines: dict


class _Seq(list):
    line: int = 0
    item_lines: list


class _Loader(yaml.SafeLoader):
    pass


def _construct_map(loader, node):
    loader.flatten_mapping(node)
    out = _Map()
    out.line = node.start_mark.line + 1
    out.key_lines = {}
    for k, v in node.value:
        key = loader.construct_object(k, deep=True)
        out[key] = loader.construct_object(v, deep=True)
        out.key_lines[key] = v.start_mark.line + 1
    return out


def _construct_seq(loader, node):
    out = _Seq(loader.construct_object(v, deep=True) for v in node.value)
    out.line = node.start_mark.line + 1
    out.item_lines = [v.start_mark.line + 1 for v in node.value]
    return out


_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_MAPPING_TAG, _construct_map)
_Loader.add_constructor(yaml.resolver.BaseResolver.DEFAULT_SEQUENCE_TAG, _construct_seq)


@dataclass
class ScenarioFile:
    name: str
    mode: str
    raw: dict
    classical: ReductionScenario | None = None
    algebra: LJAlgebra | None = None
    b_span: ExplicitSpan | None = None
    s_span: ExplicitSpan | None = None
    certificate: tuple | None = None
    extras: dict = field(default_factory=dict)


class _Builder:
    def __init__(self, source: str):
        self.source = source
        self.errors: list[tuple[int | None, str]] = []

    def err(self, line, msg):
        self.errors.append((line, msg))

    def line_of(self, container, key):
        if isinstance(container, _Map):
            return container.key_lines.get(key, container.line)
        if isinstance(container, _Seq) and isinstance(key, int) and key < len(container.item_lines):
            return container.item_lines[key]
        return getattr(container, "line", None)

    def require(self, doc, key, kind, what=None):
        if key not in doc:
            self.err(getattr(doc, "line", None), f"missing field '{key}'")
            return None
        v = doc[key]
        if not isinstance(v, kind):
            self.err(self.line_of(doc, key), f"field '{key}' must be {what or kind.__name__}")
            return None
        return v

    def scalar(self, value, line):
        if isinstance(value, bool) or isinstance(value, float):
            self.err(line, f"coefficient {value!r} must be an integer or a fraction string")
            return None
        if isinstance(value, int):
            return value
        try:
            return Fraction(str(value).replace(" ", ""))
        except (ValueError, ZeroDivisionError):
            self.err(line, f"malformed rational {value!r}")
            return None

    def poly(self, text, variables, line):
        if isinstance(text, bool) or isinstance(text, float):
            self.err(line, f"polynomial {text!r} must be a string or integer")
            return None
        try:
            return parse_polynomial(str(text), variables)
        except UnknownVariableError as exc:
            self.err(line, f"unknown variable '{exc.name}' in polynomial {text!r}")
        except PolynomialSyntaxError as exc:
            self.err(line, f"malformed polynomial {text!r}: {exc}")
        return None

    def var(self, name, variables, line):
        if name not in variables:
            self.err(line, f"unknown variable '{name}'")
            return None
        return name

    def fields(self, seq, variables, what):
        if not isinstance(seq, list):
            self.err(getattr(seq, "line", None), f"'{what}' must be a list of vector fields")
            return []
        out = []
        for n, item in enumerate(seq):
            line = self.line_of(seq, n)
            if not isinstance(item, dict):
                self.err(line, f"{what}[{n}] must map variables to coefficients")
                continue
            comps = {}
            for k, v in item.items():
                kl = self.line_of(item, k)
                if self.var(k, variables, kl) is None:
                    continue
                p = self.poly(v, variables, kl)
                if p is not None:
                    comps[k] = p
            out.append(PolyVectorField.from_mapping(variables, comps))
        return out

    def space_spec(self, spec, variables, what):
        """Either a list of fields (along N) or {fields: [...], along: N | global}."""
        if isinstance(spec, dict):
            along = spec.get("along", "N")
            if along not in ("N", "global"):
                self.err(self.line_of(spec, "along"), f"'{what}.along' must be N or global")
            return self.fields(spec.get("fields", _Seq()), variables, f"{what}.fields"), along == "global"
        return self.fields(spec, variables, what), False

    def bivector(self, doc, variables):
        spec = self.require(doc, "bivector", dict, "a mapping")
        if spec is None:
            return None
        comps: dict = {}
        if "canonical" in spec:
            pairs = spec["canonical"]
            if not isinstance(pairs, list):
                self.err(self.line_of(spec, "canonical"), "'canonical' must be a list of pairs")
                pairs = []
            for n, pr in enumerate(pairs):
                line = self.line_of(pairs, n)
                if not (isinstance(pr, list) and len(pr) == 2):
                    self.err(line, "canonical entries must be [q, p] pairs")
                    continue
                if all(self.var(v, variables, line) for v in pr):
                    comps[(pr[0], pr[1])] = comps.get((pr[0], pr[1]), Polynomial.zero(variables)) \
                        + Polynomial.constant(variables, 1)
        entries = spec.get("entries", [])
        if not isinstance(entries, list):
            self.err(self.line_of(spec, "entries"), "'entries' must be a list")
            entries = []
        for n, e in enumerate(entries):
            line = self.line_of(entries, n)
            if not isinstance(e, dict) or not {"i", "j", "coeff"} <= set(e):
                self.err(line, "bivector entries need i, j and coeff")
                continue
            i = self.var(e["i"], variables, line)
            j = self.var(e["j"], variables, line)
            p = self.poly(e["coeff"], variables, self.line_of(e, "coeff"))
            if i and j and p is not None:
                if i == j:
                    self.err(line, f"diagonal bivector entry ({i},{j})")
                    continue
                comps[(i, j)] = comps.get((i, j), Polynomial.zero(variables)) + p
        if "canonical" not in spec and "entries" not in spec:
            self.err(spec.line, "bivector needs 'canonical' pairs or 'entries'")
        try:
            return PoissonBivector(variables, comps)
        except (ValueError, KeyError) as exc:
            self.err(spec.line, f"invalid bivector: {exc}")
            return None

    def matrix(self, rows, d, line):
        if not (isinstance(rows, list) and len(rows) == d
                and all(isinstance(r, list) and len(r) == d for r in rows)):
            self.err(line, f"matrix must be {d}x{d}")
            return None
        try:
            vals = tuple(tuple(parse_gaussian(str(x)) if not isinstance(x, int) or isinstance(x, bool)
                               else GaussianRational(x) for x in r) for r in rows)
            return HermitianElement(vals)
        except ValueError as exc:
            self.err(line, str(exc))
            return None

    def matrices(self, seq, d, what):
        if not isinstance(seq, list):
            self.err(getattr(seq, "line", None), f"'{what}' must be a list of matrices")
            return []
        out = []
        for n, m in enumerate(seq):
            h = self.matrix(m, d, self.line_of(seq, n))
            if h is not None:
                out.append(h)
        return out


def _degrees(b: _Builder, doc) -> dict:
    out = {"check": 2, "work": None, "jacobi": 3}
    spec = doc.get("degrees", {})
    if not isinstance(spec, dict):
        b.err(b.line_of(doc, "degrees"), "'degrees' must be a mapping")
        return out
    for k, v in spec.items():
        if k not in out:
            b.err(b.line_of(spec, k), f"unknown degree '{k}'")
        elif not isinstance(v, int) or isinstance(v, bool) or v < 1:
            b.err(b.line_of(spec, k), f"degree '{k}' must be a positive integer")
        else:
            out[k] = v
    return out


def load_scenario_text(text: str, source: str = "<scenario>") -> ScenarioFile:
    b = _Builder(source)
    try:
        doc = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ScenarioError([(mark.line + 1 if mark else None, f"YAML syntax: {exc}")], source)
    if doc is None:
        raise ScenarioError([(None, "empty scenario")], source)
    if not isinstance(doc, dict):
        raise ScenarioError([(getattr(doc, "line", 1), "scenario must be a mapping")], source)
    mode = b.require(doc, "mode", str, "a string")
    if mode is not None and mode not in MODES:
        b.err(b.line_of(doc, "mode"), f"unknown mode '{mode}' (expected one of {', '.join(MODES)})")
        mode = None
    name = str(doc.get("name", Path(source).stem))
    if mode is None:
        raise ScenarioError(b.errors, source)
    out = ScenarioFile(name, mode, dict(doc))
    if mode == "quantum":
        _load_quantum(b, doc, out)
    else:
        _load_classical(b, doc, out)
    if b.errors:
        raise ScenarioError(b.errors, source)
    return out


def _load_classical(b: _Builder, doc, out: ScenarioFile):
    variables = b.require(doc, "variables", list, "a list of names")
    if variables is None:
        raise ScenarioError(b.errors, b.source)
    variables = tuple(str(v) for v in variables)
    if len(set(variables)) != len(variables):
        b.err(b.line_of(doc, "variables"), "duplicate variable names")
        raise ScenarioError(b.errors, b.source)
    pi = b.bivector(doc, variables)
    sub = doc.get("submanifold", [])
    if not isinstance(sub, list):
        b.err(b.line_of(doc, "submanifold"), "'submanifold' must list the vanishing coordinates")
        sub = []
    coords = [v for n, v in enumerate(sub) if b.var(v, variables, b.line_of(sub, n))]
    b_fields, b_global = b.space_spec(doc.get("B", []), variables, "B")
    e_fields = b.fields(doc.get("E", []), variables, "E")
    cons = doc.get("constraints", [])
    constraints = []
    if not isinstance(cons, list):
        b.err(b.line_of(doc, "constraints"), "'constraints' must be a list of polynomials")
    else:
        for n, c in enumerate(cons):
            p = b.poly(c, variables, b.line_of(cons, n))
            if p is not None:
                constraints.append(p)
    bm = bp = None
    bp_global = False
    cert = doc.get("certificate")
    if cert is not None:
        if not isinstance(cert, dict) or "B_minus" not in cert:
            b.err(b.line_of(doc, "certificate"), "certificate needs 'B_minus'")
        else:
            bm, _ = b.space_spec(cert["B_minus"], variables, "certificate.B_minus")
            plus = cert.get("B_plus", "B")
            if plus != "B":
                bp, bp_global = b.space_spec(plus, variables, "certificate.B_plus")
    deg = _degrees(b, doc)
    if out.mode == "symmetry" and not e_fields:
        b.err(doc.line, "symmetry mode needs 'E' vector fields")
    if out.mode == "dirac" and not constraints:
        b.err(doc.line, "dirac mode needs 'constraints'")
    if pi is None or b.errors:
        return
    if deg["work"] is not None and deg["work"] < deg["check"]:
        b.err(b.line_of(doc, "degrees"), "degrees.work must be >= degrees.check")
        return
    try:
        out.classical = ReductionScenario(
            pi, tuple(coords), tuple(b_fields), b_global, tuple(e_fields), tuple(constraints),
            tuple(bm) if bm is not None else None, tuple(bp) if bp is not None else None,
            bp_global, deg["check"], deg["work"], deg["jacobi"], out.name)
    except ValueError as exc:
        b.err(doc.line, str(exc))


def _load_quantum(b: _Builder, doc, out: ScenarioFile):
    d = b.require(doc, "dimension", int, "a positive integer")
    hbar = b.scalar(doc.get("hbar", 1), b.line_of(doc, "hbar"))
    if d is None or d < 1:
        if d is not None:
            b.err(b.line_of(doc, "dimension"), "dimension must be >= 1")
        return
    if hbar == 0:
        b.err(b.line_of(doc, "hbar"), "hbar must be nonzero")
        return
    if hbar is None:
        return
    alg = LJAlgebra(d, hbar)
    out.algebra = alg

    def span(key, required=True):
        if key not in doc:
            if required:
                b.err(doc.line, f"missing field '{key}'")
            return None
        spec = doc[key]
        if spec == "full":
            return ExplicitSpan.full(alg.ambient)
        if spec == "zero" or spec == []:
            return ExplicitSpan.zero(alg.ambient)
        return ExplicitSpan.span(alg.ambient, b.matrices(spec, d, key))

    out.b_span = span("B")
    out.s_span = span("S")
    cert = doc.get("certificate")
    if cert is not None:
        if not isinstance(cert, dict) or not {"B_minus", "B_plus"} <= set(cert):
            b.err(b.line_of(doc, "certificate"), "certificate needs 'B_minus' and 'B_plus'")
        else:
            def cspan(k):
                v = cert[k]
                if v == "B":
                    return out.b_span
                if v == "full":
                    return ExplicitSpan.full(alg.ambient)
                return ExplicitSpan.span(alg.ambient, b.matrices(v, d, f"certificate.{k}"))
            out.certificate = (cspan("B_minus"), cspan("B_plus"))


def parse_scenario(path) -> ScenarioFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ScenarioError([(None, "file not found")], str(path))
    except UnicodeDecodeError:
        raise ScenarioError([(None, "file is not valid UTF-8")], str(path))
    return load_scenario_text(text, str(path))


def bundled_names() -> list[str]:
    root = resources.files("ljreduce") / "scenarios"
    return sorted(f.name[:-5] for f in root.iterdir() if f.name.endswith(".yaml"))


def resolve(name_or_path: str) -> Path:
    """A filesystem path, or the name of a bundled scenario."""
    p = Path(name_or_path)
    if p.exists():
        return p
    cand = resources.files("ljreduce") / "scenarios" / f"{name_or_path}.yaml"
    if cand.is_file():
        return Path(str(cand))
    return p

