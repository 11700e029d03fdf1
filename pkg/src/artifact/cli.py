"""Command-line front end.

Exit codes: 0 when the property holds (or the computation succeeded), 1 when
it was verified to fail, 2 for unusable input.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .core import AlgebraError, format_rational
from .document import (DocumentError, canonical_json, cdga_of, cyclic_of, dgla_of, document_from_structure,
                       parse, sdr_of, structure_of, to_json)

EXIT_OK, EXIT_FALSE, EXIT_INPUT = 0, 1, 2


class Report:
    def __init__(self, command: str):
        self.command = command
        self.exit_code = EXIT_OK
        self.result: Dict[str, object] = {}
        self.lines: List[str] = []
        self.error: Optional[Dict[str, str]] = None

    def say(self, line: str) -> None:
        self.lines.append(line)

    def as_dict(self) -> dict:
        out = {"command": self.command, "exit_code": self.exit_code}
        if self.error is not None:
            out["error"] = self.error
        else:
            out["result"] = self.result
        return out


# ---------------------------------------------------------------------------
# value rendering


def poly_json(p) -> dict:
    names = p.space.names
    terms = [{"monomial": [names[i] for i in mono], "coefficient": format_rational(c)}
             for mono, c in sorted(p.terms.items(), key=lambda t: (len(t[0]), t[0]))]
    return {"text": str(p), "terms": terms}


def derivation_json(xi) -> dict:
    return {"text": str(xi), "components": {xi.space.names[k]: poly_json(v)
                                            for k, v in enumerate(xi.values) if not v.is_zero()}}


def vector_json(space, vec: Dict[int, Fraction]) -> Dict[str, str]:
    return {space.names[k]: format_rational(c) for k, c in sorted(vec.items()) if c}


def vector_text(space, vec: Dict[int, Fraction]) -> str:
    if not vec:
        return "0"
    return " + ".join(f"({format_rational(c)}){space.names[k]}" for k, c in sorted(vec.items()) if c)


def parse_vector(text: str, space, flag: str) -> Dict[int, Fraction]:
    """``"x=1,y=-1/2"`` to a sparse vector."""
    out: Dict[int, Fraction] = {}
    if not text.strip():
        return out
    for part in text.split(","):
        name, sep, value = part.partition("=")
        name = name.strip()
        if not sep:
            raise DocumentError("E_SCHEMA", flag, f"expected name=coefficient, got {part!r}")
        if name not in space.names:
            raise DocumentError("E_UNDECLARED", flag, f"generator {name!r} is not declared")
        try:
            from .core import rational
            c = rational(value)
        except AlgebraError as exc:
            raise DocumentError("E_RATIONAL", flag, str(exc)) from None
        k = space.index(name)
        out[k] = out.get(k, 0) + c
    return {k: v for k, v in out.items() if v}


# ---------------------------------------------------------------------------
# commands


def _load(path: str):
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise DocumentError("E_SCHEMA", path, f"cannot read file: {exc.strerror}") from None
    return parse(data)


def cmd_check_mc(args, rep: Report) -> None:
    from .linfty import check_mc

    s = structure_of(_load(args.file), args.cutoff)
    r = check_mc(s.m, s.complex, args.cutoff)
    rep.result = {"accepted": r.accepted, "exact_to": r.exact_to, "failing_weights": r.failing_weights}
    rep.say(f"Maurer-Cartan equation {'holds' if r.accepted else 'fails'} through weight {r.exact_to}")
    if not r.accepted:
        rep.say(f"failing weights: {r.failing_weights}")
        rep.result["residual"] = derivation_json(r.residual)
        rep.exit_code = EXIT_FALSE


def cmd_check_cyclic(args, rep: Report) -> None:
    from .linfty import check_cyclic, preserves_form

    doc = _load(args.file)
    s = structure_of(doc, args.cutoff)
    c = cyclic_of(doc)
    if c is None:
        raise DocumentError("E_SCHEMA", "$", "check-cyclic needs a pairing block")
    r = check_cyclic(s, c)
    lie = preserves_form(s, c)
    rep.result = {"cyclic": r.cyclic, "preserves_form": lie, "form_parity": c.parity,
                  "nondegenerate": c.nondegenerate}
    rep.say(f"cyclic: {r.cyclic} (form parity {c.parity}, "
            f"{'nondegenerate' if c.nondegenerate else 'degenerate'})")
    if r.violation is not None:
        word, rotated, a, b = r.violation
        names = s.generators.names
        rep.result["violation"] = {"word": [names[i] for i in word], "rotated": [names[i] for i in rotated],
                                   "values": [format_rational(a), format_rational(b)]}
        rep.say(f"violation on {[names[i] for i in word]}: {a} vs {b}")
    if not r.cyclic:
        rep.exit_code = EXIT_FALSE


def cmd_divergence(args, rep: Report) -> None:
    s = structure_of(_load(args.file), args.cutoff)
    div = s.divergence()
    rep.result = {"divergence": poly_json(div), "strict": div.is_zero()}
    rep.say(f"∇m = {div}")
    rep.say("strictly unimodular" if div.is_zero() else "not strictly unimodular")


def cmd_double(args, rep: Report) -> None:
    from .linfty import double_structure

    s = structure_of(_load(args.file), args.cutoff, check=True)
    kind = "even" if args.even else "odd"
    d = double_structure(s, kind)
    rep.result = {"kind": kind, "hamiltonian": poly_json(d.hamiltonian),
                  "document": to_json(document_from_structure(d.structure, d.cyclic))}
    rep.say(f"{kind} double, Hamiltonian {d.hamiltonian}")
    rep.say(f"structure on {', '.join(d.space.names)}: {d.structure.m}")


def cmd_unimodular_lift(args, rep: Report) -> None:
    from .unimodular import lie_unimodular, obstruction_class

    s = structure_of(_load(args.file), args.cutoff, check=True)
    r = obstruction_class(s)
    rep.result = {"vanishes": r.vanishes, "exact_to": r.exact_to, "reliable_weight": r.reliable_weight,
                  "divergence": poly_json(s.divergence())}
    if all(w == 2 for w in s.m.weights()) and s.differential.is_zero():
        rep.result["lie_unimodular"] = lie_unimodular(s)
    if r.vanishes:
        rep.result["lift"] = poly_json(r.lift)
        rep.say(f"[∇m] vanishes; lift f = {r.lift}")
    else:
        rep.result["class"] = poly_json(r.witness)
        rep.say(f"obstruction: [∇m] is nonzero, represented by {r.witness}")
        rep.exit_code = EXIT_FALSE


def cmd_quantum_lift(args, rep: Report) -> None:
    from .linfty import double_structure
    from .quantum import check_qme, quantum_lift_structure

    doc = _load(args.file)
    cutoff = max(args.cutoff, args.weight)
    s = structure_of(doc, cutoff, check=True)
    if args.odd_double:
        d = double_structure(s, "odd")
        s, c = d.structure, d.cyclic
    else:
        c = cyclic_of(doc)
        if c is None or c.parity != 1:
            raise DocumentError("E_SCHEMA", "$.pairing", "quantum-lift needs an odd pairing or --odd-double")
    res = quantum_lift_structure(s, c, args.genus, args.weight)
    comps = {f"S{g}": poly_json(p) for g, p in enumerate(res.components)}
    rep.result = {"lifted": res.lifted, "components": comps,
                  "freedom": {str(g): n for g, n in sorted(res.freedom.items())}}
    for g, p in enumerate(res.components):
        rep.say(f"S{g} = {p}")
    if res.lifted:
        qme = check_qme(res.structure).accepted
        rep.result["qme_residual_zero"] = qme
        rep.say(f"lifted to genus {args.genus} through weight {args.weight}; QME residual "
                f"{'zero' if qme else 'NONZERO'}")
        if not qme:
            rep.exit_code = EXIT_FALSE
    else:
        ob = res.obstruction
        rep.result["obstruction"] = {"genus": ob.genus, "class": poly_json(ob.witness)}
        rep.say(f"obstructed at genus {ob.genus}: {ob.witness}")
        rep.exit_code = EXIT_FALSE


def cmd_tensor(args, rep: Report) -> None:
    from .linfty import check_cyclic
    from .tensorprod import cdga_unimodular, frobenius, tensor_linfty, tensor_pairing
    from .unimodular import obstruction_class

    doc = _load(args.file)
    if args.algebra:
        A = cdga_of(_load(args.algebra))
        name = args.algebra
    else:
        A = frobenius(args.frobenius)
        name = args.frobenius
    s = structure_of(doc, args.cutoff, check=True)
    T = tensor_linfty(A, s)
    ob = obstruction_class(T)
    strict = T.divergence().is_zero()
    rep.result = {"algebra": name, "algebra_unimodular": cdga_unimodular(A),
                  "euler_characteristic": A.euler_characteristic, "strict": strict,
                  "lift_exists": ob.vanishes, "document": None}
    c = cyclic_of(doc)
    C = None
    if c is not None and A.pairing is not None:
        C = tensor_pairing(A, c)
        rep.result["cyclic"] = check_cyclic(T, C).cyclic
    rep.result["document"] = to_json(document_from_structure(T, C))
    rep.say(f"{name} ⊗ V: dim {T.space.dim}, algebra {'unimodular' if cdga_unimodular(A) else 'not unimodular'} "
            f"(χ = {A.euler_characteristic})")
    rep.say(f"strictly unimodular: {strict}; unimodular lift exists: {ob.vanishes}")


def cmd_ce_cohomology(args, rep: Report) -> None:
    from .linfty import ce_assemble, ce_cohomology

    s = structure_of(_load(args.file), args.cutoff, check=True)
    r = ce_cohomology(ce_assemble(s))
    rep.result = {"even": r.even, "odd": r.odd, "reliable_weight": r.reliable_weight,
                  "by_weight": None if r.by_weight is None else
                  {str(w): {"even": e, "odd": o} for w, (e, o) in r.by_weight.items()}}
    rep.say(f"H (weights ≤ {args.cutoff}, reliable to {r.reliable_weight}): {r.even}|{r.odd}")
    if r.by_weight is not None:
        for w, (e, o) in r.by_weight.items():
            rep.say(f"  weight {w}: {e}|{o}")


def cmd_gauge_apply(args, rep: Report) -> None:
    from .gauge import gauge_apply, is_mc, mc_residual

    g = dgla_of(_load(args.file))
    xi = parse_vector(args.xi, g.space, "--xi")
    y = parse_vector(args.y, g.space, "--y")
    if any(g.space.parity(k) for k in y):
        raise DocumentError("E_PARITY", "--y", "the gauge parameter must be even")
    if any(not g.space.parity(k) for k in xi):
        raise DocumentError("E_PARITY", "--xi", "a Maurer-Cartan element must be odd")
    if g.nilpotency_index() is None:
        raise DocumentError("E_ALGEBRA", "$.structure", "the dgla is not nilpotent")
    if not is_mc(g, xi):
        raise DocumentError("E_ALGEBRA", "--xi",
                            f"not a Maurer-Cartan element; residual {vector_text(g.space, mc_residual(g, xi))}")
    out = gauge_apply(g, y, xi)
    ok = is_mc(g, out)
    rep.result = {"result": vector_json(g.space, out), "mc": ok}
    rep.say(f"e^y · ξ = {vector_text(g.space, out)}")
    if not ok:
        rep.exit_code = EXIT_FALSE


def cmd_sdr_check(args, rep: Report) -> None:
    from .gauge import SDR_CONDITIONS, sdr_check, sdr_repair

    t = sdr_of(_load(args.file))
    report = sdr_check(t)
    rep.result = {"conditions": {str(k): v for k, v in report.items()}}
    for k, v in report.items():
        rep.say(f"({k}) {SDR_CONDITIONS[k]}: {'holds' if v else 'FAILS'}")
    final = report
    if args.repair and not all(report.values()):
        try:
            fixed = sdr_repair(t)
        except AlgebraError as exc:
            rep.result["repair"] = {"error": str(exc)}
            rep.say(f"repair impossible: {exc}")
            rep.exit_code = EXIT_FALSE
            return
        final = sdr_check(fixed)
        rep.result["repair"] = {"conditions": {str(k): v for k, v in final.items()},
                                "s": {t.big.space.names[j]: vector_json(t.big.space, fixed.s.column(j))
                                      for j in range(t.big.space.dim) if fixed.s.column(j)}}
        rep.say("after repair: " + ", ".join(f"({k}) {'ok' if v else 'FAILS'}" for k, v in final.items()))
    if not all(final.values()):
        rep.exit_code = EXIT_FALSE


def cmd_verify_paper(args, rep: Report) -> None:
    from .acceptance import run_all

    results = run_all(seed=args.seed or 0)
    rows = []
    for r in results:
        row = {"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail}
        if not args.no_timing:
            row["seconds"] = round(r.seconds, 3)
        rows.append(row)
        rep.say(r.line() + ("" if args.no_timing else f" ({r.seconds:.2f}s)"))
    passed = sum(r.passed for r in results)
    rep.result = {"criteria": rows, "passed": passed, "total": len(results)}
    rep.say(f"{passed}/{len(results)} criteria pass")
    if passed != len(results):
        rep.exit_code = EXIT_FALSE


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cutoff", type=int, default=6, help="weight cutoff N (default 6)")
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks")

    parser = argparse.ArgumentParser(prog="linfty", description="Exact computations with L∞ structures.",
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text, with_file=True):
        p = sub.add_parser(name, help=help_text, parents=[common])
        if with_file:
            p.add_argument("file", help="algebra document (JSON)")
        p.set_defaults(func=fn)
        return p

    add("check-mc", cmd_check_mc, "check the Maurer-Cartan equation")
    add("check-cyclic", cmd_check_cyclic, "check cyclicity against the document's pairing")
    add("divergence", cmd_divergence, "compute ∇m")
    p = add("double", cmd_double, "the even or odd double")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--odd", action="store_true", default=True)
    g.add_argument("--even", action="store_true")
    add("unimodular-lift", cmd_unimodular_lift, "decide whether a unimodular lift exists")
    p = add("quantum-lift", cmd_quantum_lift, "lift to a quantum structure genus by genus")
    p.add_argument("--odd-double", action="store_true", help="lift the odd double of the structure")
    p.add_argument("--genus", type=int, default=1)
    p.add_argument("--weight", type=int, default=6)
    p = add("tensor", cmd_tensor, "tensor with a cdga")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--frobenius", help="catalog name: k, H_S1, H_S2, H_S3, H_T2")
    g.add_argument("--algebra", help="cdga document (JSON)")
    add("ce-cohomology", cmd_ce_cohomology, "Chevalley-Eilenberg cohomology below the cutoff")
    p = add("gauge-apply", cmd_gauge_apply, "apply e^y to a Maurer-Cartan element of a nilpotent dgla")
    p.add_argument("--xi", required=True, help="MC element, e.g. 'a=1,b=-1/2'")
    p.add_argument("--y", required=True, help="even gauge parameter")
    p = add("sdr-check", cmd_sdr_check, "check (and optionally repair) a deformation retraction")
    p.add_argument("--repair", action="store_true")
    p = add("verify-paper", cmd_verify_paper, "run the acceptance suite", with_file=False)
    p.add_argument("--no-timing", action="store_true", help="omit timings so the report is reproducible")
    return parser


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    rep = Report(args.command)
    if args.cutoff < 2:
        rep.error = {"code": "E_SCHEMA", "where": "--cutoff", "message": "cutoff must be at least 2"}
        rep.exit_code = EXIT_INPUT
    else:
        try:
            args.func(args, rep)
        except DocumentError as exc:
            rep.error = exc.as_dict()
            rep.exit_code = EXIT_INPUT
        except AlgebraError as exc:
            rep.error = {"code": "E_ALGEBRA", "where": "$", "message": str(exc)}
            rep.exit_code = EXIT_INPUT
    if args.format == "json":
        out.write(canonical_json(rep.as_dict()))
    elif rep.error is not None:
        out.write(f"error {rep.error['code']} at {rep.error['where']}: {rep.error['message']}\n")
    else:
        out.write("\n".join(rep.lines) + "\n")
    return rep.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
