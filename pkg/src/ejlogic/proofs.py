"""Hilbert derivations: the checker and the proof transformers."""

from dataclasses import dataclass, field

from .axioms import (
    WITNESS_ONLY, SideConditionViolated, build_instance, check_system, has_axnec,
    match_schema, parse_witnesses, recognize, render_witnesses, schemas_of, strip_closure,
    transport_witnesses, verify_instance,
)
from .subst import Substitution, _extend, alpha_eq, apply
from .syntax import (
    Box, Forall, Imp, JForall, JVar, Member, Not, PConst, ParseError, PVar, Prod,
    Signature, SortError, all_vars, parse_formula, render,
)


class ConstantInHypotheses(Exception):
    pass


class ConstantAbsent(Exception):
    pass


class VariableNotFresh(Exception):
    pass


class HypothesesPresent(Exception):
    pass


class SystemLacksAxNec(Exception):
    pass


class RejectedDerivation(Exception):
    pass


class FourNotDerivable(Exception):
    """Raised when a (4) instance is needed under (E) for a box that is not of a negation."""


@dataclass(frozen=True, eq=False)
class Step:
    formula: object
    kind: str  # hyp | ax | axnec | mp
    schema: str = None
    witnesses: dict = field(default=None)
    refs: tuple = ()

    def __eq__(self, other):
        return (isinstance(other, Step) and self.formula == other.formula
                and self.kind == other.kind and self.schema == other.schema
                and self.witnesses == other.witnesses and self.refs == other.refs)


@dataclass(frozen=True)
class Derivation:
    hypotheses: tuple
    steps: tuple
    system: str = "AX"

    @property
    def conclusion(self):
        return self.steps[-1].formula if self.steps else None

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    first_failure: tuple = None


# -- checking ----------------------------------------------------------------

def _check_instance(f, sid, w, system):
    if sid not in schemas_of(system):
        return f"schema {sid} not available in {system}"
    if not w:
        if sid in WITNESS_ONLY:
            return f"schema {sid} requires witnesses"
        return None if match_schema(sid, f) is not None else f"not an instance of schema {sid}"
    body_w = {k: v for k, v in w.items() if k != "closure"}
    try:
        build_instance(sid, body_w)
    except SideConditionViolated as e:
        return f"side condition violated: {e.condition}"
    except Exception as e:  # EmptyVariableSet and friends
        return f"witnesses rejected: {e}"
    return None if verify_instance(f, sid, body_w) else "witness instance mismatch"


def check_step(d, n):
    """Reason text if step ``n`` of ``d`` is not justified, else None."""
    step = d.steps[n]
    f = step.formula
    if step.kind == "hyp":
        return None if f in d.hypotheses else "not a hypothesis"
    if step.kind == "ax":
        return _check_instance(f, step.schema, step.witnesses, d.system)
    if step.kind == "axnec":
        if not has_axnec(d.system):
            return f"AxNec not available in {d.system}"
        if not isinstance(f, Box):
            return "witness instance mismatch"
        return _check_instance(f.body, step.schema, step.witnesses, d.system)
    if step.kind == "mp":
        if len(step.refs) != 2:
            return "malformed MP step"
        i, j = step.refs
        if not (0 <= i < n and 0 <= j < n):
            return f"MP refers to step outside 0..{n - 1}"
        if d.steps[j].formula != Imp(d.steps[i].formula, f):
            return f"step {j} is not step {i} -> this formula"
        return None
    return f"unknown justification {step.kind!r}"


def check(d):
    try:
        check_system(d.system)
    except ValueError as e:
        return Verdict(False, (0, str(e)))
    if not d.steps:
        return Verdict(False, (0, "empty derivation"))
    for n in range(len(d.steps)):
        reason = check_step(d, n)
        if reason is not None:
            return Verdict(False, (n, reason))
    return Verdict(True)


# -- building ---------------------------------------------------------------

class Builder:
    """Append-only derivation under construction; every method returns a step index."""

    def __init__(self, system="AX", hypotheses=()):
        self.system = system
        self.hypotheses = tuple(hypotheses)
        self.steps = []

    def formula(self, i):
        return self.steps[i].formula

    def add(self, step):
        self.steps.append(step)
        return len(self.steps) - 1

    def hyp(self, f):
        if f not in self.hypotheses:
            self.hypotheses += (f,)
        return self.add(Step(f, "hyp"))

    def ax(self, sid, closure=(), **w):
        f = build_instance(sid, dict(w, closure=closure))
        return self.add(Step(f, "ax", sid, w))

    def axnec(self, sid, **w):
        return self.add(Step(Box(build_instance(sid, w)), "axnec", sid, w))

    def mp(self, i, j):
        imp = self.formula(j)
        if not (isinstance(imp, Imp) and imp.left == self.formula(i)):
            raise RejectedDerivation(f"cannot apply MP to steps {i} and {j}")
        return self.add(Step(imp.right, "mp", refs=(i, j)))

    def taut_chain(self, premises, goal):
        """Derive ``goal`` from the premise steps via one tautology and MPs."""
        t = goal
        for i in reversed(premises):
            t = Imp(self.formula(i), t)
        n = self.ax("taut", phi=t)
        for i in premises:
            n = self.mp(i, n)
        return n

    def alpha_bridge(self, i, target):
        """From step ``i`` derive the alpha-variant ``target`` via (x) and (xi)."""
        f = self.formula(i)
        if f == target:
            return i
        a = self.ax("x", phi=f, psi=target)
        b = self.ax("xi", phi=f, psi=target)
        return self.mp(i, self.mp(a, b))

    def splice(self, d):
        """Append the steps of ``d`` with shifted indices; returns the index map."""
        for h in d.hypotheses:
            if h not in self.hypotheses:
                self.hypotheses += (h,)
        base = len(self.steps)
        for s in d.steps:
            if s.kind == "mp":
                s = Step(s.formula, "mp", refs=(s.refs[0] + base, s.refs[1] + base))
            self.steps.append(s)
        return [base + k for k in range(len(d.steps))]

    def last(self):
        return len(self.steps) - 1

    def derivation(self):
        return Derivation(self.hypotheses, tuple(self.steps), self.system)


def concat(d1, d2):
    """Both derivations in sequence; the conclusion is that of ``d2``."""
    b = Builder(d1.system, d1.hypotheses)
    b.splice(d1)
    b.splice(d2)
    return b.derivation()


# -- generalizing over a variable ---------------------------------------------

def _binder(var):
    return Forall if isinstance(var, PVar) else JForall


def _free_in(var, f):
    return var.index in (f.fvp if isinstance(var, PVar) else f.fvj)


def generalize_var(d, var):
    """From ``d`` concluding φ, build a derivation of ``∀var.φ`` (or ``⋀var.φ``).

    ``var`` must not be free in any hypothesis used by ``d``.
    """
    Q = _binder(var)
    dist, lift = ("xix", "xx") if isinstance(var, PVar) else ("xv", "xvi")
    vkey = "x" if isinstance(var, PVar) else "u"
    b = Builder(d.system, d.hypotheses)
    b.splice(d)
    gen = []
    for n, step in enumerate(d.steps):
        f = step.formula
        if not _free_in(var, f):
            gen.append(n)
            continue
        if step.kind == "hyp":
            raise VariableNotFresh(f"{render(var)} is free in hypothesis {render(f)}")
        if step.kind == "ax":
            w = step.witnesses or {}
            gen.append(b.add(Step(Q(var, f), "ax", step.schema, dict(w))))
        elif step.kind == "axnec":
            raise RejectedDerivation(
                f"cannot generalize over {render(var)}: AxNec step {n} has it free")
        else:
            i, j = step.refs
            a = d.steps[i].formula
            if _free_in(var, a):
                k = b.ax(dist, phi=f, psi=a, **{vkey: var})
                k = b.mp(gen[j], k)
                gen.append(b.mp(gen[i], k))
            else:
                k = b.ax(lift, phi=f, psi=a, **{vkey: var})
                k = b.mp(gen[j], k)
                gen.append(b.mp(i, k))
    if gen[-1] != b.last():
        b.add(b.steps[gen[-1]])
    return b.derivation()


# -- constant generalization ---------------------------------------------------

def _prefix_tau(f_old, f_new, sigma):
    p_old, _ = strip_closure(f_old)
    p_new, _ = strip_closure(f_new)
    tau = sigma
    for q, q2 in zip(p_old, p_new):
        tau = _extend(tau, q, q2)
    return tau


def _swap_instance(f, sid, w, rho, system):
    """An instance alpha-congruent to ``apply(f, ρ)``, with its schema and witnesses.

    The instance is ``apply(f, ρ)`` itself whenever that is still an exact
    instance; otherwise (bound names drifting apart under the forced-variable
    rule) it is rebuilt from the swapped witnesses and the caller bridges.
    """
    f2 = apply(f, rho)
    if sid in WITNESS_ONLY:
        tau = _prefix_tau(f, f2, rho)
        w2 = transport_witnesses(sid, w, tau)
        if verify_instance(f2, sid, w2):
            return f2, sid, w2
    else:
        w2 = match_schema(sid, f2)
        if w2 is not None:
            w2.pop("closure", None)
            return f2, sid, w2
    found = recognize(f2, system)
    if found is not None:
        sid2, w2 = found
        w2.pop("closure", None)
        return f2, sid2, w2
    if sid not in WITNESS_ONLY:
        prefix, _ = strip_closure(f)
        w0 = {k: v for k, v in (w or match_schema(sid, f) or {}).items() if k != "closure"}
        w3 = {k: v if k in ("u", "x") else apply(v, rho) for k, v in w0.items()}
        try:
            f3 = build_instance(sid, dict(w3, closure=prefix))
        except SideConditionViolated:
            f3 = None
        if f3 is not None and alpha_eq(f3, f2):
            return f3, sid, w3
    raise RejectedDerivation(f"{render(f2)} is no longer an axiom after the swap")


def swap_constant(d, k, z):
    """Replace constant ``k`` by variable ``z`` throughout ``d``, bridging alpha-variants."""
    rho = Substitution({k: z})
    b = Builder(d.system, d.hypotheses)
    new = []
    for step in d.steps:
        f = step.formula
        has = k in f.cons
        if step.kind == "hyp":
            if has:
                raise ConstantInHypotheses(f"{render(k)} occurs in hypothesis {render(f)}")
            new.append(b.add(step))
        elif step.kind == "ax":
            if not has:
                new.append(b.add(step))
            else:
                f2, sid, w2 = _swap_instance(f, step.schema, step.witnesses or {}, rho, d.system)
                new.append(b.alpha_bridge(b.add(Step(f2, "ax", sid, w2)), apply(f, rho)))
        elif step.kind == "axnec":
            if not has:
                new.append(b.add(step))
            else:
                x2, sid, w2 = _swap_instance(f.body, step.schema, step.witnesses or {}, rho,
                                             d.system)
                n = b.add(Step(Box(x2), "axnec", sid, w2))
                new.append(b.alpha_bridge(n, apply(f, rho)))
        else:
            i, j = step.refs
            fi, fj = d.steps[i].formula, d.steps[j].formula
            if k not in fj.cons:
                new.append(b.mp(new[i], new[j]))
                continue
            ai = new[i] if k in fi.cons else b.alpha_bridge(new[i], apply(fi, rho))
            n = b.mp(ai, new[j])
            if not has:
                n = b.alpha_bridge(n, f)
            new.append(n)
    if new[-1] != b.last():
        b.add(b.steps[new[-1]])
    return b.derivation()


def generalize_constant(d, k, w):
    """From a derivation of φ, derive ``∀w.φ[k:=w]`` / ``⋀w.φ[k:=w]``."""
    verdict = check(d)
    if not verdict.accepted:
        raise RejectedDerivation(f"input rejected at step {verdict.first_failure[0]}: "
                                 f"{verdict.first_failure[1]}")
    if isinstance(k, PConst) != isinstance(w, PVar) or not isinstance(w, (PVar, JVar)):
        raise SortError(f"cannot replace {render(k)} by {render(w)}")
    phi = d.conclusion
    if k not in phi.cons:
        raise ConstantAbsent(f"{render(k)} does not occur in {render(phi)}")
    for h in d.hypotheses:
        if k in h.cons:
            raise ConstantInHypotheses(f"{render(k)} occurs in hypothesis {render(h)}")
    sort = 0 if isinstance(w, PVar) else 1
    if w.index in all_vars(phi)[sort]:
        raise VariableNotFresh(f"{render(w)} occurs in {render(phi)}")
    used = set()
    for e in [s.formula for s in d.steps] + list(d.hypotheses):
        used |= all_vars(e)[sort]
    z = w if w.index not in used else type(w)(max(used) + 1)
    swapped = swap_constant(d, k, z)
    out = generalize_var(swapped, z)
    if z == w:
        return out
    b = Builder(out.system, out.hypotheses)
    b.splice(out)
    target = _binder(w)(w, apply(phi, Substitution({k: w})))
    b.alpha_bridge(b.last(), target)
    return b.derivation()


# -- K -----------------------------------------------------------------------

def _fresh_jvars(n, *exprs):
    used = set()
    for e in exprs:
        used |= all_vars(e)[1]
    out = []
    i = 0
    while len(out) < n:
        if i not in used:
            out.append(JVar(i))
        i += 1
    return out


def derive_K(phi, psi):
    """Hypothesis-free AX derivation of ``□(φ→ψ) → (□φ → □ψ)``."""
    u, v, w = _fresh_jvars(3, phi, psi)
    A = Imp(phi, psi)
    b = Builder("AX")
    app = b.ax("iii", phi=phi, psi=psi, s=u, t=v)
    X = Member(psi, Prod(u, v))
    Xn = apply(Member(psi, w), Substitution({w: Prod(u, v)}))
    lift = b.ax("xiii", phi=Member(psi, w), u=w, t=Prod(u, v))
    bridge = b.mp(b.ax("x", phi=X, psi=Xn), b.ax("xi", phi=X, psi=Xn))
    nec_psi = b.ax("vi", phi=psi, u=w)
    C = Imp(Member(A, u), Box(psi))
    g = b.taut_chain([app, bridge, lift, nec_psi], Imp(Member(phi, v), C))
    b.taut_chain([g], Imp(Not(C), Not(Member(phi, v))))

    d1 = generalize_var(b.derivation(), v)
    b = Builder("AX")
    top = b.splice(d1)[-1]
    n = b.mp(top, b.ax("xvi", phi=Not(Member(phi, v)), psi=Not(C), u=v))
    nec_phi = b.ax("vi", phi=phi, u=v)
    C2 = Imp(Box(phi), Box(psi))
    n = b.taut_chain([n, nec_phi], Imp(Member(A, u), C2))
    b.taut_chain([n], Imp(Not(C2), Not(Member(A, u))))

    d2 = generalize_var(b.derivation(), u)
    b = Builder("AX")
    top = b.splice(d2)[-1]
    n = b.mp(top, b.ax("xvi", phi=Not(Member(A, u)), psi=Not(C2), u=u))
    nec_a = b.ax("vi", phi=A, u=u)
    b.taut_chain([n, nec_a], Imp(Box(A), C2))
    return b.derivation()


def derive_four_from_e(phi, system="AXE_AXNEC"):
    """Derivation of ``□¬φ → □□¬φ`` in Ax+(E) with AxNec."""
    q = Not(phi)
    bq = Box(q)
    b = Builder("AXE")
    e1 = b.ax("e", phi=phi)
    # ◊□¬φ → □¬φ, contraposing (E)
    poss_bq = Not(Box(Not(bq)))
    b.taut_chain([e1], Imp(poss_bq, bq))
    boxed = necessitate(Derivation((), tuple(b.steps), system))
    b = Builder(system)
    b.splice(boxed)
    kk = b.splice(derive_K(poss_bq, bq))[-1]
    n = b.mp(len(boxed.steps) - 1, kk)
    t_inst = b.ax("vii", phi=Not(bq))
    to_poss = b.taut_chain([t_inst], Imp(bq, poss_bq))
    e2 = b.ax("e", phi=bq)
    b.taut_chain([to_poss, e2, n], Imp(bq, Box(bq)))
    return b.derivation()


# -- necessitation ---------------------------------------------------------

def necessitate(d):
    """From a hypothesis-free derivation of φ build one of ``□φ``."""
    if d.hypotheses:
        raise HypothesesPresent("necessitation needs a hypothesis-free derivation")
    if not has_axnec(d.system):
        raise SystemLacksAxNec(f"{d.system} has no AxNec rule")
    verdict = check(d)
    if not verdict.accepted:
        raise RejectedDerivation(f"input rejected at step {verdict.first_failure[0]}: "
                                 f"{verdict.first_failure[1]}")
    b = Builder(d.system)
    needed = _reachable(d)
    boxed = {}
    for n in sorted(needed):
        step = d.steps[n]
        if step.kind == "ax":
            boxed[n] = b.add(Step(Box(step.formula), "axnec", step.schema, step.witnesses))
        elif step.kind == "axnec":
            inner = step.formula.body
            orig = b.add(step)
            if d.system.startswith("AX4"):
                four = b.ax("four", phi=inner)
            elif isinstance(inner, Not):
                four = b.splice(derive_four_from_e(inner.body, d.system))[-1]
            else:
                raise FourNotDerivable(
                    f"{render(Imp(Box(inner), Box(Box(inner))))} is only derived under (E) "
                    f"when the boxed axiom is a negation")
            boxed[n] = b.mp(orig, four)
        else:
            i, j = step.refs
            kk = b.splice(derive_K(d.steps[i].formula, step.formula))[-1]
            boxed[n] = b.mp(boxed[i], b.mp(boxed[j], kk))
    last = boxed[len(d.steps) - 1]
    if last != b.last():
        b.add(b.steps[last])
    return b.derivation()


def _reachable(d):
    seen = set()
    stack = [len(d.steps) - 1]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if d.steps[n].kind == "mp":
            stack.extend(d.steps[n].refs)
    return seen


# -- proof files -----------------------------------------------------------

def parse_proof(text):
    """Read a proof file; returns (Derivation, Signature)."""
    sig = Signature()
    system = "AX"
    hyps = {}
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            head, _, rest = line.partition(" ")
            if head == "system":
                system = check_system(rest.strip())
            elif head == "const":
                sig.parse_declaration(line)
            elif head == "hyp":
                num, _, text_f = rest.strip().partition(" ")
                hyps[int(num)] = parse_formula(text_f, sig)
            elif head == "step":
                num, _, body = rest.strip().partition(" ")
                if int(num) != len(steps):
                    raise ParseError(f"expected step {len(steps)}, got {num}", 0)
                ftext, sep, just = body.partition(";")
                if not sep:
                    raise ParseError("step needs '; <justification>'", 0)
                steps.append(_parse_step(parse_formula(ftext, sig), just.strip(), sig))
            else:
                raise ParseError(f"unknown directive {head!r}", 0)
        except ParseError as e:
            raise ParseError(f"line {lineno}: {e.args[0]}", e.position) from None
        except ValueError as e:
            raise ParseError(f"line {lineno}: {e}", 0) from None
    ordered = tuple(hyps[k] for k in sorted(hyps))
    return Derivation(ordered, tuple(steps), system), sig


def _parse_step(f, just, sig):
    parts = just.split(None, 2)
    if not parts:
        raise ParseError("missing justification", 0)
    kind = parts[0]
    if kind == "hyp" and len(parts) == 1:
        return Step(f, "hyp")
    if kind == "mp" and len(parts) == 3:
        return Step(f, "mp", refs=(int(parts[1]), int(parts[2])))
    if kind in ("ax", "axnec") and len(parts) >= 2:
        w = parse_witnesses(parts[2], sig) if len(parts) == 3 else {}
        return Step(f, kind, parts[1], w)
    raise ParseError(f"bad justification {just!r}", 0)


def render_proof(d, sig=None):
    exprs = list(d.hypotheses) + [s.formula for s in d.steps]
    cover = Signature.covering(*exprs)
    sig = cover if sig is None else sig.merged(cover)
    out = [f"system {d.system}"] + sig.lines()
    for n, h in enumerate(d.hypotheses):
        out.append(f"hyp {n} {render(h)}")
    for n, s in enumerate(d.steps):
        if s.kind == "hyp":
            just = "hyp"
        elif s.kind == "mp":
            just = f"mp {s.refs[0]} {s.refs[1]}"
        else:
            w = render_witnesses(s.witnesses or {})
            just = f"{s.kind} {s.schema}" + (f" {w}" if w else "")
        out.append(f"step {n} {render(s.formula)} ; {just}")
    return "\n".join(out) + "\n"
