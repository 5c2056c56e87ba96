"""Finite table-driven models: validation, evaluation, derived sets and presets."""

import random
from dataclasses import dataclass, field, replace

from .axioms import check_system, is_axiom
from .syntax import (
    Box, Forall, Ident, Imp, IsFalse, IsTrue, JConst, JForall, JVar, Member, Not, PConst,
    ParseError, Prod, PVar, Refers, SortError, Sum, TermIdent, TermLe, render,
)

DESIGNATED = ("eq", "ref", "teq", "le", "jquant", "quant")
# clause id of the truth condition that each designated pair realizes
DESIGNATED_CLAUSE = {"eq": "v", "ref": "vi", "teq": "vii", "le": "viii",
                     "jquant": "xiii", "quant": "xiv"}
CLAUSES = ("partition", "nec-subset", "nec-union", "leq-order", "order-iso", "ref-transitive",
           "totality", "designated", "i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix",
           "x", "xi", "xii", "xiii", "xiv")


@dataclass(frozen=True)
class FiniteModel:
    values: tuple
    true: frozenset
    nec: frozenset
    just: tuple
    leq: frozenset
    plus: dict
    dot: dict
    reason: dict
    ref: frozenset
    impl: dict
    neg: dict
    istrue: dict
    isfalse: dict
    box: dict
    mem: dict
    designated: dict
    const_prop: dict = field(default_factory=dict)
    const_just: dict = field(default_factory=dict)
    default_prop: str = None
    default_just: str = None
    mode: tuple = ("strict",)

    @property
    def false(self):
        return frozenset(self.values) - self.true

    @property
    def override(self):
        return self.mode[0] == "override"

    def mutated(self, table, key, value):
        """Copy with one table entry replaced; handy for discrimination tests."""
        t = getattr(self, table)
        if isinstance(t, dict):
            t = dict(t)
            t[key] = value
        elif isinstance(t, frozenset):
            t = frozenset(t - {key}) if value is None else frozenset(t | {key})
        return replace(self, **{table: t})


@dataclass
class Report:
    failures: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def fail(self, clause, witness):
        self.failures.append((clause, witness))

    def lines(self):
        out = ["PASS" if self.ok else "FAIL"]
        out += [f"fail {c} witness {w}" for c, w in self.failures]
        out += [f"warning {w}" for w in self.warnings]
        return out

    def as_dict(self):
        return {"ok": self.ok,
                "failures": [{"clause": c, "witness": w} for c, w in self.failures],
                "warnings": list(self.warnings)}


# -- validation ---------------------------------------------------------------

def _w(*xs):
    return " ".join(str(x) for x in xs)


def validate(m):
    """Check every value-level condition exhaustively over M and L."""
    r = Report()
    M, L = list(m.values), list(m.just)
    T, N = m.true, m.nec
    if not T <= set(M) or len(set(M)) != len(M):
        r.fail("partition", _w(*sorted(T - set(M))) or "duplicate values")
    if not N <= T:
        r.fail("nec-subset", _w(*sorted(N - T)))
    union = frozenset().union(*(m.reason.get(l, frozenset()) for l in L)) if L else frozenset()
    if union != N:
        r.fail("nec-union", _w(*sorted(union ^ N)))
    _check_leq(m, r)
    for a in L:
        for b in L:
            ra, rb = m.reason.get(a, frozenset()), m.reason.get(b, frozenset())
            if ((a, b) in m.leq) != (ra <= rb) or (a != b and ra == rb):
                r.fail("order-iso", _w(a, b))
    for a, b in m.ref:
        for b2, c in m.ref:
            if b == b2 and (a, c) not in m.ref:
                r.fail("ref-transitive", _w(a, b, c))
    _check_totality(m, r)
    if r.failures:
        return r
    for name in DESIGNATED:
        pair = m.designated.get(name)
        if pair is None or pair[0] not in T or pair[1] not in m.false:
            r.fail(DESIGNATED_CLAUSE[name], _w(name, *(pair or ("missing",))))
    for a in M:
        for b in M:
            if (m.impl[a, b] in T) != (a not in T or b in T):
                r.fail("i", _w(a, b))
    for a in M:
        if (m.neg[a] in T) != (a not in T):
            r.fail("ii", a)
        if (m.istrue[a] in T) != (a in T):
            r.fail("iii", a)
        if (m.isfalse[a] in T) != (a not in T):
            r.fail("iv", a)
        if (m.box[a] in T) != (a in N):
            r.fail("ix", a)
    for a in M:
        for l in L:
            if (m.mem[a, l] in T) != (a in m.reason[l]):
                r.fail("x", _w(a, l))
    for a in M:
        for b in M:
            for l in L:
                if m.impl[a, b] not in m.reason[l]:
                    continue
                for k in L:
                    if a in m.reason[k] and b not in m.reason[m.dot[l, k]]:
                        r.fail("xi", _w(a, b, l, k))
    for a in M:
        for l in L:
            for k in L:
                if (a in m.reason[l] or a in m.reason[k]) and a not in m.reason[m.plus[l, k]]:
                    r.fail("xii", _w(a, l, k))
    if m.override:
        _, nec_val, system = m.mode
        if nec_val not in N:
            r.fail("designated", _w("override", nec_val))
        r.warnings.append("SyntaxDependentBox")
    return r


def _check_leq(m, r):
    L = m.just
    for a in L:
        if (a, a) not in m.leq:
            r.fail("leq-order", _w(a, a))
    for a, b in m.leq:
        if a != b and (b, a) in m.leq:
            r.fail("leq-order", _w(a, b))
        for b2, c in m.leq:
            if b == b2 and (a, c) not in m.leq:
                r.fail("leq-order", _w(a, b, c))


def _check_totality(m, r):
    M, L = set(m.values), set(m.just)
    for name, table, keys, rng in (
            ("impl", m.impl, [(a, b) for a in m.values for b in m.values], M),
            ("neg", m.neg, m.values, M), ("istrue", m.istrue, m.values, M),
            ("isfalse", m.isfalse, m.values, M), ("box", m.box, m.values, M),
            ("mem", m.mem, [(a, l) for a in m.values for l in m.just], M),
            ("plus", m.plus, [(a, b) for a in m.just for b in m.just], L),
            ("dot", m.dot, [(a, b) for a in m.just for b in m.just], L)):
        for k in keys:
            if table.get(k) not in rng:
                r.fail("totality", _w(name, *(k if isinstance(k, tuple) else (k,))))
    for l in m.just:
        if l not in m.reason or not m.reason[l] <= M:
            r.fail("totality", _w("reason", l))
    for a, b in m.ref:
        if a not in M or b not in M:
            r.fail("totality", _w("ref", a, b))
    for v in list(m.const_prop.values()) + [m.default_prop]:
        if v not in M:
            r.fail("totality", _w("const", v))
    for v in list(m.const_just.values()) + [m.default_just]:
        if v not in L:
            r.fail("totality", _w("const", v))


# -- evaluation -------------------------------------------------------------

def eval_expr(m, gamma, e):
    """Γ(e, γ): a value of M for formulas, a name of L for terms."""
    env = {}
    for k, v in (gamma or {}).items():
        if isinstance(k, PVar):
            if v not in m.values:
                raise SortError(f"{render(k)} assigned {v!r}, not a proposition of the model")
        elif isinstance(k, JVar):
            if v not in m.just:
                raise SortError(f"{render(k)} assigned {v!r}, not a justification name")
        else:
            raise SortError(f"cannot assign to {k!r}")
        env[k] = v
    return _Evaluator(m).run(e, env)


class _Evaluator:
    def __init__(self, m):
        self.m = m
        if m.override:
            self.nec_val, self.system = m.mode[1], m.mode[2]

    def axiom(self, f):
        return self.m.override and is_axiom(f, self.system)

    def run(self, e, env):
        m = self.m
        if isinstance(e, PVar):
            return env.get(e, m.default_prop)
        if isinstance(e, JVar):
            return env.get(e, m.default_just)
        if isinstance(e, PConst):
            return m.const_prop.get(e.name, m.default_prop)
        if isinstance(e, JConst):
            return m.const_just.get(e.name, m.default_just)
        if isinstance(e, Prod):
            return m.dot[self.run(e.left, env), self.run(e.right, env)]
        if isinstance(e, Sum):
            return m.plus[self.run(e.left, env), self.run(e.right, env)]
        if isinstance(e, Imp):
            return m.impl[self.run(e.left, env), self.run(e.right, env)]
        if isinstance(e, Not):
            return m.neg[self.run(e.body, env)]
        if isinstance(e, IsTrue):
            return m.istrue[self.run(e.body, env)]
        if isinstance(e, IsFalse):
            return m.isfalse[self.run(e.body, env)]
        if isinstance(e, Box):
            if self.axiom(e.body):
                return self.nec_val
            return m.box[self.run(e.body, env)]
        if isinstance(e, Member):
            if self.axiom(e.body):
                return self.nec_val
            return m.mem[self.run(e.body, env), self.run(e.term, env)]
        if isinstance(e, (Ident, TermIdent)):
            same = self.run(e.left, env) == self.run(e.right, env)
            return self._pick("eq" if isinstance(e, Ident) else "teq", same)
        if isinstance(e, TermLe):
            return self._pick("le", (self.run(e.left, env), self.run(e.right, env)) in m.leq)
        if isinstance(e, Refers):
            return self._pick("ref", (self.run(e.left, env), self.run(e.right, env)) in m.ref)
        if isinstance(e, Forall):
            dom, name = m.values, "quant"
        elif isinstance(e, JForall):
            dom, name = m.just, "jquant"
        else:
            raise TypeError(f"cannot evaluate {e!r}")
        saved = env.get(e.var, _MISSING)
        try:
            ok = True
            for val in dom:
                env[e.var] = val
                if self.run(e.body, env) not in m.true:
                    ok = False
                    break
        finally:
            if saved is _MISSING:
                env.pop(e.var, None)
            else:
                env[e.var] = saved
        return self._pick(name, ok)

    def _pick(self, name, flag):
        pair = self.m.designated[name]
        return pair[0] if flag else pair[1]


_MISSING = object()


def holds(m, gamma, f):
    return eval_expr(m, gamma, f) in m.true


# -- derived sets and extension conditions --------------------------------------

def derived_sets(m):
    possible = frozenset(a for a in m.values if m.neg[a] not in m.nec)
    return possible, frozenset(m.values) - possible


def check_condition(m, which, k=100, seed=0, assignments=5):
    """``four``, ``e`` or ``axnec`` (a sample of ``k`` axiom instances)."""
    r = Report()
    if which == "four":
        for a in m.values:
            if m.box[a] in m.true and m.box[m.box[a]] not in m.true:
                r.fail("four", a)
    elif which == "e":
        possible, _ = derived_sets(m)
        for a in m.values:
            if a in possible and m.neg[m.box[m.neg[a]]] not in m.nec:
                r.fail("e", a)
    elif which == "axnec":
        from .generate import random_assignment, random_instance
        rng = random.Random(seed)
        system = m.mode[2] if m.override else "AX4"
        for _ in range(k):
            sid, _, inst = random_instance(rng, system)
            for _ in range(assignments):
                gamma = random_assignment(rng, m, inst)
                if not holds(m, gamma, Box(inst)):
                    r.fail("axnec", f"{sid}: {render(inst)}")
                    break
    else:
        raise ValueError(f"unknown condition {which!r}")
    return r


# -- presets -------------------------------------------------------------------

def preset_s4_four_valued(system="AX4_AXNEC"):
    check_system(system)
    M = ("t", "f", "nec", "imp")
    T = frozenset({"t", "nec"})
    neg = {"t": "f", "f": "t", "nec": "imp", "imp": "nec"}
    impl = {}
    for a in M:
        for b in M:
            if a == "imp" or b == "nec":
                impl[a, b] = "nec"
            elif a == "nec" and b == "imp":
                impl[a, b] = "imp"
            elif a == "f" or b == "t":
                impl[a, b] = "t"
            else:
                impl[a, b] = "f"
    box = {"t": "f", "f": "f", "nec": "nec", "imp": "imp"}
    return FiniteModel(
        values=M, true=T, nec=frozenset({"nec"}), just=("l",),
        leq=frozenset({("l", "l")}), plus={("l", "l"): "l"}, dot={("l", "l"): "l"},
        reason={"l": frozenset({"nec"})}, ref=frozenset((a, b) for a in M for b in M),
        impl=impl, neg=neg, istrue={a: a for a in M}, isfalse=dict(neg), box=box,
        mem={(a, "l"): box[a] for a in M},
        designated={name: ("t", "f") for name in DESIGNATED},
        default_prop="t", default_just="l", mode=("override", "nec", system))


def preset_extensional():
    M = ("t", "f")
    neg = {"t": "f", "f": "t"}
    impl = {(a, b): ("t" if a == "f" or b == "t" else "f") for a in M for b in M}
    ident = {a: a for a in M}
    return FiniteModel(
        values=M, true=frozenset({"t"}), nec=frozenset({"t"}), just=("l",),
        leq=frozenset({("l", "l")}), plus={("l", "l"): "l"}, dot={("l", "l"): "l"},
        reason={"l": frozenset({"t"})}, ref=frozenset((a, b) for a in M for b in M),
        impl=impl, neg=neg, istrue=dict(ident), isfalse=dict(neg), box=dict(ident),
        mem={(a, "l"): a for a in M}, designated={name: ("t", "f") for name in DESIGNATED},
        default_prop="t", default_just="l")


# -- model files ---------------------------------------------------------------

def render_model(m):
    out = [f"values: {' '.join(m.values)}",
           f"true: {' '.join(a for a in m.values if a in m.true)}",
           f"necessary: {' '.join(a for a in m.values if a in m.nec)}",
           f"just: {' '.join(m.just)}"]
    for l in m.just:
        members = " ".join(a for a in m.values if a in m.reason[l])
        out.append(f"reason {l} = {{ {members} }}")
    for a in m.just:
        for b in m.just:
            if (a, b) in m.leq:
                out.append(f"leq: {a} {b}")
    for name, table in (("plus", m.plus), ("dot", m.dot)):
        for a in m.just:
            for b in m.just:
                out.append(f"{name}: {a} {b} -> {table[a, b]}")
    if m.ref == frozenset((a, b) for a in m.values for b in m.values):
        out.append("ref: total")
    else:
        for a in m.values:
            for b in m.values:
                if (a, b) in m.ref:
                    out.append(f"ref: {a} {b}")
    for a in m.values:
        for b in m.values:
            out.append(f"impl: {a} {b} -> {m.impl[a, b]}")
    for name in ("neg", "istrue", "isfalse", "box"):
        table = getattr(m, name)
        for a in m.values:
            out.append(f"{name}: {a} -> {table[a]}")
    for a in m.values:
        for l in m.just:
            out.append(f"mem: {a} {l} -> {m.mem[a, l]}")
    for name in DESIGNATED:
        out.append(f"designated {name} {m.designated[name][0]} {m.designated[name][1]}")
    out.append("mode strict" if not m.override else f"mode override {m.mode[1]} {m.mode[2]}")
    for name, v in m.const_prop.items():
        out.append(f"const {name} = {v}")
    for name, v in m.const_just.items():
        out.append(f"const {name} = {v}")
    out.append(f"default prop {m.default_prop}")
    out.append(f"default just {m.default_just}")
    return "\n".join(out) + "\n"


def parse_model(text):
    f = {"values": (), "true": frozenset(), "nec": frozenset(), "just": (), "leq": set(),
         "plus": {}, "dot": {}, "reason": {}, "ref": set(), "impl": {}, "neg": {},
         "istrue": {}, "isfalse": {}, "box": {}, "mem": {}, "designated": {},
         "const_prop": {}, "const_just": {}, "default_prop": None, "default_just": None,
         "mode": ("strict",)}
    total_ref = False
    consts = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            total_ref |= _model_line(f, line, consts)
        except (ValueError, IndexError, KeyError) as e:
            raise ParseError(f"line {lineno}: cannot read {line!r} ({e})", 0) from None
    if total_ref:
        f["ref"] = {(a, b) for a in f["values"] for b in f["values"]}
    for name, v in consts:
        if v in f["values"]:
            f["const_prop"][name] = v
        elif v in f["just"]:
            f["const_just"][name] = v
        else:
            raise ParseError(f"constant {name} interpreted by unknown value {v!r}", 0)
    f["leq"] = frozenset(f["leq"])
    f["ref"] = frozenset(f["ref"])
    return FiniteModel(**f)


def _arrow(rest, n):
    lhs, _, rhs = rest.partition("->")
    args = lhs.split()
    if len(args) != n or not rhs.strip() or len(rhs.split()) != 1:
        raise ValueError(f"expected {n} argument(s) and one result")
    return (args[0] if n == 1 else tuple(args)), rhs.strip()


def _model_line(f, line, consts):
    if ":" in line.split()[0]:
        head, _, rest = line.partition(":")
        head, rest = head.strip(), rest.strip()
        if head == "values":
            f["values"] = tuple(rest.split())
        elif head == "true":
            f["true"] = frozenset(rest.split())
        elif head == "necessary":
            f["nec"] = frozenset(rest.split())
        elif head == "just":
            f["just"] = tuple(rest.split())
        elif head == "leq":
            a, b = rest.split()
            f["leq"].add((a, b))
        elif head == "ref":
            if rest == "total":
                return True
            a, b = rest.split()
            f["ref"].add((a, b))
        elif head in ("plus", "dot", "impl", "mem"):
            k, v = _arrow(rest, 2)
            f[head][k] = v
        elif head in ("neg", "istrue", "isfalse", "box"):
            k, v = _arrow(rest, 1)
            f[head][k] = v
        else:
            raise ValueError(f"unknown section {head!r}")
        return False
    parts = line.split()
    if parts[0] == "reason":
        name = parts[1]
        body = line.split("=", 1)[1].strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ValueError("reason sets are written { a b }")
        f["reason"][name] = frozenset(body[1:-1].split())
    elif parts[0] == "designated" and len(parts) == 4:
        if parts[1] not in DESIGNATED:
            raise ValueError(f"unknown designated pair {parts[1]!r}")
        f["designated"][parts[1]] = (parts[2], parts[3])
    elif parts[0] == "mode":
        if parts[1:] == ["strict"]:
            f["mode"] = ("strict",)
        elif len(parts) == 4 and parts[1] == "override":
            f["mode"] = ("override", parts[2], check_system(parts[3]))
        else:
            raise ValueError("mode is 'strict' or 'override <value> <system>'")
    elif parts[0] == "const" and len(parts) == 4 and parts[2] == "=":
        consts.append((parts[1], parts[3]))
    elif parts[0] == "default" and len(parts) == 3 and parts[1] in ("prop", "just"):
        f["default_" + parts[1]] = parts[2]
    else:
        raise ValueError("unrecognized line")
    return False
