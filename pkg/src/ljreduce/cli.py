"""Command line entry point: ``ljreduce <command> [scenario] [options]``.

Exit codes: 0 when every check passes, 1 when some check fails, 2 on invalid input.
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from dataclasses import replace

from ljreduce import classical_reduce as cr
from ljreduce import liejordan as lj
from ljreduce.exactalg import format_polynomial
from ljreduce.poisson import check_jacobi
from ljreduce.report import Condition, ConditionReport, Report
from ljreduce.scenario import ScenarioError, ScenarioFile, bundled_names, parse_scenario, resolve

COMMANDS = ("run", "check-jacobi", "reduce-symmetry", "reduce-constraint", "dirac",
            "reduce-general", "certify", "two-stage", "quantum-reduce", "search")

_MODE_COMMAND = {"symmetry": "reduce-symmetry", "constraint": "reduce-constraint",
                 "dirac": "dirac", "generalized": "reduce-general", "quantum": "quantum-reduce"}


class UsageError(ValueError):
    pass


def _classical(sf: ScenarioFile, degree: int | None) -> cr.ReductionScenario:
    if sf.classical is None:
        raise UsageError(f"command needs a classical scenario, got mode '{sf.mode}'")
    s = sf.classical
    if degree is not None:
        # keep the scenario's lift slack above the check degree
        s = replace(s, d_check=degree, d_work=degree + (s.d_work - s.d_check))
    return s


def _quantum(sf: ScenarioFile):
    if sf.algebra is None:
        raise UsageError(f"command needs a quantum scenario, got mode '{sf.mode}'")
    return sf.algebra


def _jacobi_dict(jac) -> dict:
    out = {"status": "PASS" if jac.passed else "FAIL", "sweep_degree": jac.sweep_degree,
           "sweep_triples": jac.sweep_triples, "consistent": jac.consistent}
    if jac.witness is not None:
        out["witness"] = [format_polynomial(p) for p in jac.witness]
        out["residual"] = format_polynomial(jac.residual)
    return out


def _reduced_payload(red: cr.ReducedBracket | None) -> dict:
    if red is None:
        return {}
    out = {"structure": red.structure_strings(),
           "representatives": [format_polynomial(c) for c in red.classes]}
    if red.bivector is not None:
        out["reduced_bivector"] = red.bivector_strings()
        out["lifts"] = {k: format_polynomial(v) for k, v in red.lifts.items()}
    if red.jacobi is not None:
        out["jacobi"] = _jacobi_dict(red.jacobi)
    return out


def cmd_check_jacobi(sf, degree):
    rep = ConditionReport()
    if sf.algebra is not None:
        rep.extend(lj.verify_axioms(sf.algebra))
        return rep, {}
    s = _classical(sf, None)
    jac = check_jacobi(s.pi, degree or s.jacobi_degree)
    rep.add(cr._jacobi_condition(jac))
    rep.add(Condition("schouten_sweep_consistent", jac.consistent, jac.sweep_triples))
    return rep, {"jacobi": _jacobi_dict(jac)}


def cmd_reduce_symmetry(sf, degree):
    s = _classical(sf, degree)
    fields = s.e_fields or (s.b_fields if s.b_global else ())
    if not fields:
        raise UsageError("symmetry reduction needs 'E' fields")
    rep, red = cr.reduce_by_symmetries(s.pi, fields, s.d_check)
    return rep, _reduced_payload(red)


def cmd_reduce_constraint(sf, degree):
    s = _classical(sf, degree)
    rep, red = cr.reduce_by_constraints(s.pi, s.coords, s.d_check, s.constraints)
    return rep, _reduced_payload(red)


def cmd_dirac(sf, degree):
    s = _classical(sf, degree)
    if not s.constraints:
        raise UsageError("dirac needs 'constraints'")
    rep, red = cr.dirac_reduce(s.pi, s.constraints, s.coords, s.d_check, s.d_work,
                               s.jacobi_degree)
    return rep, _reduced_payload(red)


def cmd_reduce_general(sf, degree):
    s = _classical(sf, degree)
    res = cr.generalized_reduce(s)
    return res.report, _reduced_payload(res.reduced)


def cmd_certify(sf, degree):
    s = _classical(sf, degree)
    if s.b_minus_fields is None:
        raise UsageError("certify needs a 'certificate' with B_minus")
    rep = cr.certify_strong(s)
    gen = cr.generalized_reduce(s, with_leibniz=False)
    payload = _reduced_payload(gen.reduced)
    jac = gen.reduced.jacobi if gen.reduced else None
    if rep.passed:
        rep.add(Condition("certificate_implies_jacobi", bool(jac and jac.passed),
                          jac.sweep_triples if jac else 0,
                          detail="strong conditions hold, so the induced bracket must be Poisson"))
    return rep, payload


def cmd_run(sf, degree):
    cmd = _MODE_COMMAND[sf.mode]
    rep, payload = COMMAND_FUNCS[cmd](sf, degree)
    if sf.mode == "generalized" and sf.classical.b_minus_fields is not None:
        cert, _ = cmd_certify(sf, degree)
        rep.extend(cert)
    return rep, payload


def cmd_two_stage(sf, degree):
    s = _classical(sf, degree)
    try:
        res = cr.two_stage_reduce(s)
    except cr.NotLieSubalgebra as exc:
        rep = ConditionReport()
        rep.add(exc.condition)
        return rep, {}
    payload = {"common_representatives": [format_polynomial(p) for p in res.common],
               "structure": {f"{{{format_polynomial(res.common[i])}, "
                             f"{format_polynomial(res.common[j])}}}": format_polynomial(v)
                             for (i, j), v in sorted(res.two_stage_values.items())}}
    return res.report, payload


def cmd_quantum_reduce(sf, degree):
    alg = _quantum(sf)
    rep, quo = lj.quantum_reduce(sf.b_span, sf.s_span, alg, sf.certificate)
    if quo is None:
        return rep, {}
    return rep, {"representatives": [str(r) for r in quo.representatives],
                 "jordan_structure": quo.structure_strings("jordan"),
                 "lie_structure": quo.structure_strings("lie")}


COMMAND_FUNCS = {
    "run": cmd_run, "check-jacobi": cmd_check_jacobi, "reduce-symmetry": cmd_reduce_symmetry,
    "reduce-constraint": cmd_reduce_constraint, "dirac": cmd_dirac,
    "reduce-general": cmd_reduce_general, "certify": cmd_certify, "two-stage": cmd_two_stage,
    "quantum-reduce": cmd_quantum_reduce,
}


def run_search(family: str, seed: int, trials: int, degree: int | None, dim: int) -> Report:
    rng = random.Random(seed)
    rep = ConditionReport()
    if family == "classical":
        from ljreduce.poisson import PoissonBivector
        variables = ("x1", "x2", "x3", "y1", "y2", "y3")
        pi = PoissonBivector.canonical(variables)
        records = cr.search(pi, ("x1", "x2"), rng, trials, d_check=degree or 2)
        rows = [r.to_dict() for r in records]
        bad = next((r for r in records if r.certificate and not r.jacobi), None)
        rep.add(Condition("certificate_implies_jacobi", bad is None, len(records),
                          witness={"lambda": bad.lam} if bad else None))
        rep.dims["candidates"] = sum(r.candidate for r in records)
    else:
        rows = lj.search(dim, rng, trials)
        rep.dims["interesting"] = sum(r["interesting"] for r in rows)
    data = {"scenario": f"search-{family}", "mode": "search", "command": "search",
            "seed": seed, "records": rows}
    data.update(rep.to_dict())
    data["status"] = "PASS" if rep.passed else "FAIL"
    return Report(data)


def build_report(command: str, sf: ScenarioFile, degree: int | None = None) -> Report:
    rep, payload = COMMAND_FUNCS[command](sf, degree)
    data = {"scenario": sf.name, "mode": sf.mode, "command": command}
    data.update(rep.to_dict())
    data.update(payload)
    data["status"] = "PASS" if rep.passed else "FAIL"
    return Report(data)


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ljreduce",
                                description="Exact reduction of Poisson and Lie-Jordan algebras.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("name", nargs="?", help="scenario path or bundled scenario name")
    p.add_argument("--scenario", help="scenario path or bundled scenario name")
    p.add_argument("--degree", type=int, help="truncation degree for condition checks")
    p.add_argument("--report", help="also write the report to this path")
    p.add_argument("--format", choices=("human", "machine"), default="human")
    p.add_argument("--seed", type=int, default=0, help="random seed (search only)")
    p.add_argument("--trials", type=int, default=8, help="number of samples (search only)")
    p.add_argument("--family", choices=("classical", "quantum"), default="classical",
                   help="scenario family (search only)")
    p.add_argument("--dim", type=int, default=2, help="matrix dimension (quantum search)")
    p.add_argument("--list", action="store_true", help="list bundled scenarios and exit")
    return p


def main(argv=None) -> int:
    parser = make_parser()
    if argv is None:
        argv = sys.argv[1:]
    if "--list" in argv:
        print("\n".join(bundled_names()))
        return 0
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    start = time.perf_counter()
    try:
        if args.degree is not None and args.degree < 1:
            raise UsageError("--degree must be >= 1")
        if args.command == "search":
            report = run_search(args.family, args.seed, args.trials, args.degree, args.dim)
        else:
            target = args.scenario or args.name
            if not target:
                raise UsageError(f"'{args.command}' needs a scenario")
            sf = parse_scenario(resolve(target))
            report = build_report(args.command, sf, args.degree)
    except ScenarioError as exc:
        for line in exc.lines():
            print(line, file=sys.stderr)
        return 2
    except (UsageError, ValueError) as exc:
        print(f"ljreduce: error: {exc}", file=sys.stderr)
        return 2
    elapsed = time.perf_counter() - start
    text = report.to_json() if args.format == "machine" else report.to_human(elapsed)
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
