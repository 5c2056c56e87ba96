"""The ``ejk`` command line."""

import argparse
import json
import sys

from . import axioms, kripke, models, proofs
from .syntax import (
    Formula, ImproperFormula, JConst, ParseError, PConst, Signature, SortError,
    UnknownConstant, parse_any, parse_formula, parse_variable, render,
)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INVALID = 0, 1, 2, 3
INPUT_ERRORS = (ParseError, SortError, ImproperFormula, UnknownConstant)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _signature(args, base=None):
    sig = base or Signature()
    extra = Signature(args.prop or [], args.just or [])
    return sig.merged(extra)


def _emit(args, lines, report):
    for line in lines:
        print(line)
    if getattr(args, "report", None):
        _write(args.report, json.dumps(report, indent=2, sort_keys=True) + "\n")


# -- commands -----------------------------------------------------------------

def cmd_parse(args):
    sig = _signature(args)
    out = []
    texts = []
    if args.text:
        texts.append(args.text)
    if args.file:
        for line in _read(args.file).splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("const "):
                sig.parse_declaration(line)
            else:
                texts.append(line)
    if not texts:
        raise UsageError("nothing to parse: give a file or --text")
    for t in texts:
        out.append(render(parse_any(t, sig)))
    _emit(args, out, {"command": "parse", "rendered": out})
    return EXIT_OK


def cmd_elaborate(args):
    sig = _signature(args)
    w = axioms.parse_witnesses(args.witnesses or "", sig)
    try:
        inst = axioms.build_instance(args.schema, w)
    except (axioms.SideConditionViolated, axioms.EmptyVariableSet) as e:
        _emit(args, [f"REJECTED {e}"], {"command": "elaborate", "ok": False, "error": str(e)})
        return EXIT_FAIL
    except ValueError as e:
        raise UsageError(str(e)) from None
    text = render(inst)
    _emit(args, [text], {"command": "elaborate", "ok": True, "instance": text})
    return EXIT_OK


def _load_proof(path):
    return proofs.parse_proof(_read(path))


def _verdict_lines(v):
    if v.accepted:
        return ["ACCEPTED"]
    return [f"REJECTED step {v.first_failure[0]}: {v.first_failure[1]}"]


def cmd_check(args):
    d, _ = _load_proof(args.proof)
    v = proofs.check(d)
    report = {"command": "check", "accepted": v.accepted, "steps": len(d.steps),
              "failure": None if v.accepted else {"step": v.first_failure[0],
                                                  "reason": v.first_failure[1]}}
    lines = _verdict_lines(v)
    if v.accepted:
        lines.append(f"conclusion {render(d.conclusion)}")
    _emit(args, lines, report)
    return EXIT_OK if v.accepted else EXIT_FAIL


def _transformed(args, name, d, sig):
    text = proofs.render_proof(d, sig)
    v = proofs.check(d)
    if args.out:
        _write(args.out, text)
        lines = [f"wrote {len(d.steps)} steps to {args.out}"]
    else:
        lines = text.rstrip("\n").splitlines()
    lines.append(f"conclusion {render(d.conclusion)}")
    lines += _verdict_lines(v)
    _emit(args, lines, {"command": name, "accepted": v.accepted, "steps": len(d.steps),
                        "conclusion": render(d.conclusion)})
    return EXIT_OK if v.accepted else EXIT_FAIL


TRANSFORM_ERRORS = (proofs.ConstantAbsent, proofs.ConstantInHypotheses,
                    proofs.VariableNotFresh, proofs.HypothesesPresent,
                    proofs.SystemLacksAxNec, proofs.RejectedDerivation,
                    proofs.FourNotDerivable)


def _refuse(args, name, e):
    _emit(args, [f"ERROR {type(e).__name__}: {e}"],
          {"command": name, "ok": False, "error": type(e).__name__, "message": str(e)})
    return EXIT_FAIL


def cmd_genc(args):
    d, sig = _load_proof(args.proof)
    name = args.const
    if name in sig.props:
        k = PConst(name)
    elif name in sig.justs:
        k = JConst(name)
    else:
        raise UsageError(f"constant {name!r} is not declared in {args.proof}")
    w = parse_variable(args.var)
    try:
        out = proofs.generalize_constant(d, k, w)
    except TRANSFORM_ERRORS as e:
        return _refuse(args, "genc", e)
    return _transformed(args, "genc", out, sig)


def cmd_nec(args):
    d, sig = _load_proof(args.proof)
    try:
        out = proofs.necessitate(d)
    except TRANSFORM_ERRORS as e:
        return _refuse(args, "nec", e)
    return _transformed(args, "nec", out, sig)


def cmd_derive_k(args):
    sig = _signature(args)
    phi, psi = parse_formula(args.phi, sig), parse_formula(args.psi, sig)
    return _transformed(args, "derive-k", proofs.derive_K(phi, psi), sig)


def _load_model(path):
    return models.parse_model(_read(path))


def cmd_validate(args):
    m = _load_model(args.model)
    r = models.validate(m)
    _emit(args, r.lines(), dict(r.as_dict(), command="validate"))
    return EXIT_OK if r.ok else EXIT_INVALID


def _validated(args, m, name):
    r = models.validate(m)
    if not r.ok:
        _emit(args, ["model fails validation"] + r.lines()[1:],
              dict(r.as_dict(), command=name))
        return False
    return True


def _assignment(text, m):
    gamma = {}
    for item in (text or "").replace(",", " ").split():
        name, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"assignment entries look like x0=t, got {item!r}")
        gamma[parse_variable(name)] = value
    return gamma


def cmd_eval(args):
    m = _load_model(args.model)
    if not _validated(args, m, "eval"):
        return EXIT_INVALID
    sig = _signature(args, Signature(sorted(m.const_prop), sorted(m.const_just)))
    e = parse_any(args.formula, sig)
    value = models.eval_expr(m, _assignment(args.assign, m), e)
    lines = [value]
    holds = None
    if isinstance(e, Formula):
        holds = value in m.true
        lines.append("TRUE" if holds else "FALSE")
    _emit(args, lines, {"command": "eval", "value": value, "holds": holds})
    return EXIT_OK


def cmd_sets(args):
    m = _load_model(args.model)
    if not _validated(args, m, "sets"):
        return EXIT_INVALID
    pos, imp = models.derived_sets(m)
    order = list(m.values)
    pos_l = [a for a in order if a in pos]
    imp_l = [a for a in order if a in imp]
    _emit(args, [f"POSSIBLE: {' '.join(pos_l)}", f"IMPOSSIBLE: {' '.join(imp_l)}"],
          {"command": "sets", "possible": pos_l, "impossible": imp_l})
    return EXIT_OK


def cmd_cond(args):
    m = _load_model(args.model)
    if not _validated(args, m, "cond"):
        return EXIT_INVALID
    r = models.check_condition(m, args.which, k=args.samples, seed=args.seed)
    _emit(args, r.lines(), dict(r.as_dict(), command="cond", condition=args.which))
    return EXIT_OK if r.ok else EXIT_FAIL


def _load_frame(path, world):
    k = kripke.parse_frame(_read(path))
    if world not in k.worlds:
        raise UsageError(f"world {world!r} is not in {path}")
    return k


def cmd_translate(args):
    k = _load_frame(args.frame, args.world)
    m, gamma = kripke.translate(k, args.world, args.system)
    text = models.render_model(m)
    assign = " ".join(f"{render(x)}={v}" for x, v in sorted(gamma.items(), key=lambda i: i[0].index))
    if args.out:
        _write(args.out, text)
        lines = [f"wrote model to {args.out}"]
    else:
        lines = text.rstrip("\n").splitlines()
    lines.append(f"assignment {assign}")
    _emit(args, lines, {"command": "translate",
                        "assignment": {render(x): v for x, v in gamma.items()}})
    return EXIT_OK


def cmd_audit(args):
    k = _load_frame(args.frame, args.world)
    if args.formulas:
        corpus = [parse_formula(t.strip()) for t in _read(args.formulas).splitlines()
                  if t.strip() and not t.strip().startswith("#")]
    else:
        corpus = kripke.modal_corpus(args.depth, canonical=not args.all_renamings)
    rows = kripke.audit(k, args.world, corpus, args.system)
    lines = [r.line() for r in rows]
    agree = sum(r.agree for r in rows)
    lines.append(f"{agree} agree, {len(rows) - agree} disagree")
    _emit(args, lines, {"command": "audit", "rows": [
        {"formula": render(r.formula), "model": r.model_verdict, "kripke": r.kripke_verdict,
         "agree": r.agree} for r in rows]})
    return EXIT_OK


def cmd_search(args):
    f = parse_formula(args.formula)
    try:
        found = kripke.search_countermodel(f, args.max_worlds)
    except kripke.BudgetExceeded as e:
        raise UsageError(str(e)) from None
    if found is None:
        _emit(args, [f"no countermodel with at most {args.max_worlds} worlds"],
              {"command": "search", "found": False})
        return EXIT_OK
    k, w = found
    text = kripke.render_frame(k)
    if args.out:
        _write(args.out, text)
    lines = [f"countermodel refuting at {w}"] + text.rstrip("\n").splitlines()
    _emit(args, lines, {"command": "search", "found": True, "world": w, "frame": text})
    return EXIT_FAIL


def cmd_preset(args):
    m = (models.preset_extensional() if args.name == "extensional"
         else models.preset_s4_four_valued(args.system))
    text = models.render_model(m)
    if args.out:
        _write(args.out, text)
        _emit(args, [f"wrote {args.name} preset to {args.out}"], {"command": "preset"})
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------

def build_parser():
    p = _Parser(prog="ejk", description="Proof checker and model toolkit for the logic EJ.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(fn=fn)
        sp.add_argument("--report", help="also write a JSON report to this path")
        return sp

    def consts(sp):
        sp.add_argument("--prop", action="append", help="declare a propositional constant")
        sp.add_argument("--just", action="append", help="declare a justification constant")

    sp = add("parse", cmd_parse, "parse formulas and print their core form")
    sp.add_argument("file", nargs="?")
    sp.add_argument("--text")
    consts(sp)

    sp = add("elaborate", cmd_elaborate, "print the canonical instance of an axiom schema")
    sp.add_argument("schema", choices=axioms.SCHEMA_IDS)
    sp.add_argument("witnesses", nargs="?", default="")
    consts(sp)

    sp = add("check", cmd_check, "check a proof file")
    sp.add_argument("proof")

    sp = add("genc", cmd_genc, "generalize a constant in a proof")
    sp.add_argument("proof")
    sp.add_argument("--const", required=True)
    sp.add_argument("--var", required=True)
    sp.add_argument("--out")

    sp = add("nec", cmd_nec, "necessitate a hypothesis-free proof")
    sp.add_argument("proof")
    sp.add_argument("--out")

    sp = add("derive-k", cmd_derive_k, "emit a derivation of an instance of K")
    sp.add_argument("--phi", required=True)
    sp.add_argument("--psi", required=True)
    sp.add_argument("--out")
    consts(sp)

    sp = add("validate", cmd_validate, "validate a model file")
    sp.add_argument("model")

    sp = add("eval", cmd_eval, "evaluate a formula or term in a model")
    sp.add_argument("model")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--assign", help="e.g. x0=nec,v0=l")
    consts(sp)

    sp = add("sets", cmd_sets, "print the POSSIBLE and IMPOSSIBLE sets")
    sp.add_argument("model")

    sp = add("cond", cmd_cond, "check the (4), (E) or AxNec condition")
    sp.add_argument("model")
    sp.add_argument("--which", choices=("four", "e", "axnec"), required=True)
    sp.add_argument("--samples", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("translate", cmd_translate, "four-valued model and assignment of a Kripke world")
    sp.add_argument("frame")
    sp.add_argument("--world", required=True)
    sp.add_argument("--system", default="AX4_AXNEC", choices=("AX4_AXNEC", "AXE_AXNEC"))
    sp.add_argument("--out")

    sp = add("audit", cmd_audit, "compare the translation with Kripke semantics")
    sp.add_argument("frame")
    sp.add_argument("--world", required=True)
    sp.add_argument("--depth", type=int, default=2)
    sp.add_argument("--formulas", help="file with one modal formula per line")
    sp.add_argument("--all-renamings", action="store_true",
                    help="keep formulas that differ only by renaming variables")
    sp.add_argument("--system", default="AX4_AXNEC", choices=("AX4_AXNEC", "AXE_AXNEC"))

    sp = add("search", cmd_search, "search for an S4 countermodel")
    sp.add_argument("--formula", required=True)
    sp.add_argument("--max-worlds", type=int, default=3)
    sp.add_argument("--out")

    sp = add("preset", cmd_preset, "write a preset model file")
    sp.add_argument("name", choices=("s4", "extensional"))
    sp.add_argument("--system", default="AX4_AXNEC", choices=("AX4_AXNEC", "AXE_AXNEC"))
    sp.add_argument("--out")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as e:
        print(f"ejk: {e}", file=sys.stderr)
        return EXIT_PARSE
    except INPUT_ERRORS as e:
        print(f"ejk: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (axioms.AtomBudgetExceeded, kripke.OutsideModalFragment) as e:
        print(f"ejk: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
