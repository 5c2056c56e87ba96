"""Seeded random generators for terms, formulas, substitutions, witnesses and derivations."""

import random

from .axioms import PARAMS, build_instance, schemas_of
from .subst import Substitution
from .syntax import (
    Box, Forall, Ident, Imp, IsFalse, IsTrue, JConst, JForall, JVar, Member, Not, PConst,
    PVar, Prod, Refers, Sum, TermIdent, TermLe, all_vars,
)

PROPS = ("d1", "d2")
JUSTS = ("c1", "c2")


class Gen:
    """Random syntax with small variable and constant pools."""

    def __init__(self, rng=None, nvars=3, props=PROPS, justs=JUSTS):
        self.rng = rng if isinstance(rng, random.Random) else random.Random(rng)
        self.nvars = nvars
        self.props = props
        self.justs = justs

    def pvar(self):
        return PVar(self.rng.randrange(self.nvars))

    def jvar(self):
        return JVar(self.rng.randrange(self.nvars))

    def term(self, depth=2):
        r = self.rng.random()
        if depth <= 0 or r < 0.5:
            if self.justs and self.rng.random() < 0.3:
                return JConst(self.rng.choice(self.justs))
            return self.jvar()
        op = Prod if self.rng.random() < 0.5 else Sum
        return op(self.term(depth - 1), self.term(depth - 1))

    def atom(self):
        if self.props and self.rng.random() < 0.25:
            return PConst(self.rng.choice(self.props))
        return self.pvar()

    def formula(self, depth=3):
        """A proper formula of bounded depth; binders only bind variables free in the body."""
        if depth <= 0 or self.rng.random() < 0.2:
            return self.atom()
        k = self.rng.randrange(14)
        d = depth - 1
        if k == 0:
            return Not(self.formula(d))
        if k in (1, 2):
            return Imp(self.formula(d), self.formula(d))
        if k == 3:
            return Box(self.formula(d))
        if k == 4:
            return Member(self.formula(d), self.term(1))
        if k == 5:
            return IsTrue(self.formula(d))
        if k == 6:
            return IsFalse(self.formula(d))
        if k == 7:
            return Ident(self.formula(d), self.formula(d))
        if k == 8:
            return Refers(self.formula(d), self.formula(d))
        if k == 9:
            return TermIdent(self.term(1), self.term(1))
        if k == 10:
            return TermLe(self.term(1), self.term(1))
        body = self.formula(d)
        if k in (11, 12) and body.fvp:
            return Forall(PVar(self.rng.choice(sorted(body.fvp))), body)
        if body.fvj:
            return JForall(JVar(self.rng.choice(sorted(body.fvj))), body)
        return body

    def modal(self, depth=3, nvars=2):
        """Formula of the modal fragment (variables, negation, implication, box)."""
        if depth <= 0 or self.rng.random() < 0.25:
            return PVar(self.rng.randrange(nvars))
        k = self.rng.randrange(4)
        if k == 0:
            return Not(self.modal(depth - 1, nvars))
        if k == 1:
            return Box(self.modal(depth - 1, nvars))
        return Imp(self.modal(depth - 1, nvars), self.modal(depth - 1, nvars))

    def formula_with_free(self, var, depth=2):
        """A formula in which ``var`` occurs free."""
        f = self.formula(depth)
        if var.index in (f.fvp if isinstance(var, PVar) else f.fvj):
            return f
        hook = Member(self.formula(1), var) if isinstance(var, JVar) else var
        return Imp(f, hook) if self.rng.random() < 0.5 else Imp(hook, f)

    def formula_without_free(self, var, depth=2):
        f = self.formula(depth)
        free = f.fvp if isinstance(var, PVar) else f.fvj
        if var.index not in free:
            return f
        return (Forall if isinstance(var, PVar) else JForall)(var, f)

    def substitution(self, keys, depth=2):
        m = {}
        for k in keys:
            if self.rng.random() < 0.7:
                m[k] = self.formula(depth) if isinstance(k, (PVar, PConst)) else self.term(depth)
        return Substitution(m)

    def alpha_variant(self, f):
        """Rename every bound variable to a fresh one (structure unchanged)."""
        ps, js = all_vars(f)
        nxt = [max(ps, default=-1) + 1 + self.rng.randrange(3),
               max(js, default=-1) + 1 + self.rng.randrange(3)]

        def go(e, ren):
            if isinstance(e, (PVar, JVar)):
                return ren.get(e, e)
            if isinstance(e, (Forall, JForall)):
                sort = 0 if isinstance(e, Forall) else 1
                y = (PVar if sort == 0 else JVar)(nxt[sort])
                nxt[sort] += 1
                return type(e)(y, go(e.body, {**ren, e.var: y}))
            if not e.children:
                return e
            return type(e)(*(go(a, ren) for a in e._args))

        return go(f, {})

    def tautology(self, depth=2):
        a, b, c = (self.formula(depth) for _ in range(3))
        shapes = [
            Imp(a, a), Imp(a, Imp(b, a)), Imp(Not(Not(a)), a), Imp(a, Not(Not(a))),
            Imp(Imp(a, Imp(b, c)), Imp(Imp(a, b), Imp(a, c))),
            Imp(Imp(Not(a), Not(b)), Imp(b, a)), Imp(Not(a), Imp(a, b)),
            Imp(Imp(Not(a), a), a), Imp(a, Imp(Not(a), b)),
        ]
        return self.rng.choice(shapes)

    def witnesses(self, sid):
        """Witnesses satisfying the side conditions of ``sid``."""
        rng = self.rng
        if sid == "taut":
            return {"phi": self.tautology()}
        if sid == "vi":
            u = self.jvar()
            return {"phi": self.formula_without_free(u), "u": u}
        if sid == "viii":
            phi = self.formula(2)
            wrap = rng.choice([Not, Box, IsTrue, lambda p: Imp(p, self.formula(1)),
                               lambda p: Imp(self.formula(1), p),
                               lambda p: Member(p, self.term(1))])
            return {"phi": phi, "psi": wrap(phi)}
        if sid == "x":
            phi = self.formula(3)
            return {"phi": phi, "psi": self.alpha_variant(phi)}
        if sid in ("xii", "xxiii"):
            base = self.formula(2) if sid == "xii" else self.term(2)
            if not (base.fvp or base.fvj):
                base = Imp(base, self.pvar()) if sid == "xii" else Prod(base, self.jvar())
            keys = [PVar(i) for i in base.fvp] + [JVar(i) for i in base.fvj]
            s1 = self.substitution(keys)
            s2 = self.substitution(keys)
            consts = list(base.cons)
            if consts and rng.random() < 0.5:
                k = rng.choice(consts)
                v = self.formula(1) if isinstance(k, PConst) else self.term(1)
                s1, s2 = s1.extend(k, v), s2.extend(k, v)
            return {("chi" if sid == "xii" else "t"): base, "sigma": s1, "sigma'": s2}
        if sid in ("xiii", "xiv"):
            u = self.jvar()
            return {"phi": self.formula_with_free(u), "u": u, "t": self.term(2)}
        if sid == "xv":
            u = self.jvar()
            return {"phi": self.formula_with_free(u), "psi": self.formula_with_free(u), "u": u}
        if sid == "xvi":
            u = self.jvar()
            return {"phi": self.formula_with_free(u), "psi": self.formula_without_free(u), "u": u}
        if sid in ("xvii", "xviii"):
            x = self.pvar()
            return {"phi": self.formula_with_free(x), "x": x, "psi": self.formula(2)}
        if sid == "xix":
            x = self.pvar()
            return {"phi": self.formula_with_free(x), "psi": self.formula_with_free(x), "x": x}
        if sid == "xx":
            x = self.pvar()
            return {"phi": self.formula_with_free(x), "psi": self.formula_without_free(x), "x": x}
        w = {}
        for key in PARAMS[sid]:
            if key in ("phi", "psi", "chi"):
                w[key] = self.formula(2)
            elif key in ("s", "t"):
                w[key] = self.term(2)
            elif key == "x":
                w[key] = self.pvar()
            elif key == "u":
                w[key] = self.jvar()
        return w

    def instance(self, system="AX", sid=None):
        sid = sid or self.rng.choice(schemas_of(system))
        w = self.witnesses(sid)
        return sid, w, build_instance(sid, w)

    def derivation(self, system="AX4_AXNEC", max_len=8):
        """An accepted hypothesis-free derivation of at most ``max_len`` steps."""
        from .proofs import Builder

        b = Builder(system)
        nec = system.endswith("_AXNEC")
        four = system.startswith("AX4")
        target = self.rng.randint(1, max_len)
        while len(b.steps) < target:
            room = target - len(b.steps)
            choice = self.rng.random()
            if b.steps and room >= 2 and choice < 0.45:
                i = self.rng.randrange(len(b.steps))
                a = b.formula(i)
                if nec and four and isinstance(a, Box) and self.rng.random() < 0.3:
                    j = b.ax("four", phi=a.body)
                elif isinstance(a, Box) and self.rng.random() < 0.5:
                    j = b.ax("vii", phi=a.body)
                else:
                    j = b.ax("taut", phi=Imp(a, Imp(self.formula(1), a)))
                b.mp(i, j)
            elif nec and choice < 0.7:
                sid, w, _ = self.instance(system)
                b.axnec(sid, **w)
            else:
                sid, w, _ = self.instance(system)
                b.ax(sid, **w)
        return b.derivation()


def random_instance(rng, system="AX"):
    return Gen(rng).instance(system)


def random_assignment(rng, model, *exprs):
    """Random values for the free variables of ``exprs`` (others take model defaults)."""
    gamma = {}
    for e in exprs:
        for i in sorted(e.fvp):
            gamma.setdefault(PVar(i), rng.choice(model.values))
        for i in sorted(e.fvj):
            gamma.setdefault(JVar(i), rng.choice(model.just))
    return gamma
