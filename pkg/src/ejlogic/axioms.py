"""Axiom schemas: instance builders, shape recognizers and the tautology base."""

import itertools
import re
from functools import lru_cache

from .subst import Substitution, alpha_eq, apply, compose, parse_subst, render_subst, syn_ref
from .syntax import (
    Box, Forall, Formula, Ident, Imp, ImproperFormula, IsFalse, IsTrue, JConst, JForall,
    JVar, Member, Not, PConst, ParseError, Prod, PVar, Refers, Sum, Term, TermIdent, TermLe,
    _Binder, all_vars, conj, dia, exists, iff, jexists, parse_any, parse_variable, render,
)

ROMAN = ["i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x", "xi", "xii",
         "xiii", "xiv", "xv", "xvi", "xvii", "xviii", "xix", "xx", "xxi", "xxii", "xxiii"]
SCHEMA_IDS = ROMAN + ["four", "e", "taut"]
SYSTEMS = ("AX", "AX4", "AXE", "AX4_AXNEC", "AXE_AXNEC")

# schemas whose witnesses cannot be read off the formula
WITNESS_ONLY = ("xii", "xxiii")

PARAMS = {
    "i": ("phi",), "ii": ("phi",), "iii": ("phi", "psi", "s", "t"),
    "iv": ("phi", "s", "t"), "v": ("phi", "s", "t"), "vi": ("phi", "u"), "vii": ("phi",),
    "viii": ("phi", "psi"), "ix": ("phi", "psi", "chi"), "x": ("phi", "psi"),
    "xi": ("phi", "psi"), "xii": ("chi", "sigma", "sigma'"), "xiii": ("phi", "u", "t"),
    "xiv": ("phi", "u", "t"), "xv": ("phi", "psi", "u"), "xvi": ("phi", "psi", "u"),
    "xvii": ("phi", "x", "psi"), "xviii": ("phi", "x", "psi"), "xix": ("phi", "psi", "x"),
    "xx": ("phi", "psi", "x"), "xxi": ("s", "t", "x"), "xxii": ("s", "t"),
    "xxiii": ("t", "sigma", "sigma'"), "four": ("phi",), "e": ("phi",), "taut": ("phi",),
}
WITNESS_ORDER = ("phi", "psi", "chi", "s", "t", "u", "x", "sigma", "sigma'")
ATOM_BUDGET = 16


class SideConditionViolated(Exception):
    def __init__(self, schema, condition):
        super().__init__(f"schema {schema}: {condition}")
        self.schema = schema
        self.condition = condition


class EmptyVariableSet(Exception):
    pass


class AtomBudgetExceeded(Exception):
    pass


def check_system(sys):
    if sys not in SYSTEMS:
        raise ValueError(f"unknown system {sys!r}; expected one of {', '.join(SYSTEMS)}")
    return sys


def schemas_of(sys):
    """Schema ids whose instances are axioms of ``sys``."""
    check_system(sys)
    ids = list(ROMAN)
    if sys.startswith("AX4"):
        ids.append("four")
    if sys.startswith("AXE"):
        ids.append("e")
    return ids + ["taut"]


def has_axnec(sys):
    return check_system(sys).endswith("_AXNEC")


# -- the σ ≡_φ σ' abbreviation ------------------------------------------------

def expand_sigma_eq(sigma, sigma2, base):
    """Conjunction of ``σ(z) ≡ σ'(z)`` over the free variables of ``base``, in order."""
    keys = [JVar(i) for i in sorted(base.fvj)]
    if isinstance(base, Formula):
        keys = [PVar(i) for i in sorted(base.fvp)] + keys
    if not keys:
        raise EmptyVariableSet(f"{render(base)} has no free variables")
    parts = []
    for z in keys:
        eq = Ident if isinstance(z, PVar) else TermIdent
        parts.append(eq(sigma(z), sigma2(z)))
    out = parts[0]
    for p in parts[1:]:
        out = conj(out, p)
    return out


# -- building instances ----------------------------------------------------

def _get(w, key, sort):
    v = w.get(key)
    if v is None:
        raise SideConditionViolated("?", f"missing witness {key}")
    if sort == "var_p" and not isinstance(v, PVar):
        raise SideConditionViolated("?", f"witness {key} must be a propositional variable")
    if sort == "var_j" and not isinstance(v, JVar):
        raise SideConditionViolated("?", f"witness {key} must be a justification variable")
    if sort == "formula" and not isinstance(v, Formula):
        raise SideConditionViolated("?", f"witness {key} must be a formula")
    if sort == "term" and not isinstance(v, Term):
        raise SideConditionViolated("?", f"witness {key} must be a term")
    if sort == "subst" and not isinstance(v, Substitution):
        raise SideConditionViolated("?", f"witness {key} must be a substitution")
    return v


def _subst_agree_on_constants(sid, s1, s2):
    for k in s1.support | s2.support:
        if isinstance(k, (PConst, JConst)) and s1(k) != s2(k):
            raise SideConditionViolated(sid, f"sigma and sigma' bind constant {render(k)} differently")


def _build_body(sid, w):
    F = lambda k: _get(w, k, "formula")  # noqa: E731
    T = lambda k: _get(w, k, "term")  # noqa: E731
    if sid == "i":
        p = F("phi")
        return iff(IsTrue(p), p)
    if sid == "ii":
        p = F("phi")
        return iff(IsFalse(p), Not(p))
    if sid == "iii":
        p, q, s, t = F("phi"), F("psi"), T("s"), T("t")
        return Imp(Member(Imp(p, q), s), Imp(Member(p, t), Member(q, Prod(s, t))))
    if sid == "iv":
        p, s, t = F("phi"), T("s"), T("t")
        return Imp(Member(p, s), Member(p, Sum(s, t)))
    if sid == "v":
        p, s, t = F("phi"), T("s"), T("t")
        return Imp(Member(p, t), Member(p, Sum(s, t)))
    if sid == "vi":
        p, u = F("phi"), _get(w, "u", "var_j")
        if u.index in p.fvj:
            raise SideConditionViolated(sid, f"{render(u)} is free in phi")
        return iff(Box(p), jexists(u, Member(p, u)))
    if sid == "vii":
        p = F("phi")
        return Imp(Box(p), p)
    if sid == "viii":
        p, q = F("phi"), F("psi")
        if not syn_ref(p, q):
            raise SideConditionViolated(sid, "phi does not syntactically refer into psi")
        return Refers(p, q)
    if sid == "ix":
        p, q, c = F("phi"), F("psi"), F("chi")
        return Imp(Refers(p, q), Imp(Refers(q, c), Refers(p, c)))
    if sid == "x":
        p, q = F("phi"), F("psi")
        if not alpha_eq(p, q):
            raise SideConditionViolated(sid, "phi and psi are not alpha-congruent")
        return Ident(p, q)
    if sid == "xi":
        p, q = F("phi"), F("psi")
        return Imp(Ident(p, q), Imp(p, q))
    if sid == "xii":
        c, s1, s2 = F("chi"), _get(w, "sigma", "subst"), _get(w, "sigma'", "subst")
        _subst_agree_on_constants(sid, s1, s2)
        return Imp(expand_sigma_eq(s1, s2, c), Ident(apply(c, s1), apply(c, s2)))
    if sid == "xiii":
        p, u, t = F("phi"), _get(w, "u", "var_j"), T("t")
        return Imp(apply(p, Substitution({u: t})), jexists(u, p))
    if sid == "xiv":
        p, u, t = F("phi"), _get(w, "u", "var_j"), T("t")
        return Imp(JForall(u, p), apply(p, Substitution({u: t})))
    if sid == "xv":
        p, q, u = F("phi"), F("psi"), _get(w, "u", "var_j")
        return Imp(JForall(u, Imp(q, p)), Imp(JForall(u, q), JForall(u, p)))
    if sid == "xvi":
        p, q, u = F("phi"), F("psi"), _get(w, "u", "var_j")
        if u.index in q.fvj:
            raise SideConditionViolated(sid, f"{render(u)} is free in psi")
        return Imp(JForall(u, Imp(q, p)), Imp(q, JForall(u, p)))
    if sid == "xvii":
        p, x, q = F("phi"), _get(w, "x", "var_p"), F("psi")
        return Imp(apply(p, Substitution({x: q})), exists(x, p))
    if sid == "xviii":
        p, x, q = F("phi"), _get(w, "x", "var_p"), F("psi")
        return Imp(Forall(x, p), apply(p, Substitution({x: q})))
    if sid == "xix":
        p, q, x = F("phi"), F("psi"), _get(w, "x", "var_p")
        return Imp(Forall(x, Imp(q, p)), Imp(Forall(x, q), Forall(x, p)))
    if sid == "xx":
        p, q, x = F("phi"), F("psi"), _get(w, "x", "var_p")
        if x.index in q.fvp:
            raise SideConditionViolated(sid, f"{render(x)} is free in psi")
        return Imp(Forall(x, Imp(q, p)), Imp(q, Forall(x, p)))
    if sid == "xxi":
        s, t, x = T("s"), T("t"), _get(w, "x", "var_p")
        return iff(TermLe(s, t), Forall(x, Imp(Member(x, s), Member(x, t))))
    if sid == "xxii":
        s, t = T("s"), T("t")
        return iff(TermIdent(s, t), conj(TermLe(s, t), TermLe(t, s)))
    if sid == "xxiii":
        t, s1, s2 = T("t"), _get(w, "sigma", "subst"), _get(w, "sigma'", "subst")
        _subst_agree_on_constants(sid, s1, s2)
        return Imp(expand_sigma_eq(s1, s2, t), TermIdent(apply(t, s1), apply(t, s2)))
    if sid == "four":
        p = F("phi")
        return Imp(Box(p), Box(Box(p)))
    if sid == "e":
        p = F("phi")
        return Imp(dia(p), Box(dia(p)))
    if sid == "taut":
        p = F("phi")
        if not is_skeleton_tautology(p):
            raise SideConditionViolated(sid, "not a propositional tautology")
        return p
    raise ValueError(f"unknown schema {sid!r}")


def build_instance(sid, w):
    """The exact instance of schema ``sid`` for witnesses ``w``.

    An optional ``closure`` witness (outermost binder first) wraps the instance in
    universal quantifiers over its free variables.
    """
    if sid not in PARAMS:
        raise ValueError(f"unknown schema {sid!r}")
    extra = set(w) - set(PARAMS[sid]) - {"closure"}
    if extra:
        raise SideConditionViolated(sid, f"unexpected witnesses {', '.join(sorted(extra))}")
    try:
        body = _build_body(sid, w)
    except SideConditionViolated as e:
        if e.schema == "?":
            raise SideConditionViolated(sid, e.condition) from None
        raise
    except ImproperFormula as e:
        raise SideConditionViolated(sid, f"instance is not proper ({e})") from None
    return close(body, w.get("closure", ()))


def close(body, variables):
    try:
        for var in reversed(tuple(variables)):
            body = (Forall if isinstance(var, PVar) else JForall)(var, body)
    except ImproperFormula as e:
        raise SideConditionViolated("closure", str(e)) from None
    return body


def strip_closure(f):
    """Split a leading run of universal quantifiers off ``f``."""
    prefix = []
    while isinstance(f, (Forall, JForall)):
        prefix.append(f.var)
        f = f.body
    return tuple(prefix), f


# -- recognizing instances ---------------------------------------------------

def _iff_parts(f):
    # (a -> b) & (b -> a)  ==  ~((a -> b) -> ~(b -> a))
    match f:
        case Not(Imp(Imp(a, b), Not(Imp(b2, a2)))) if a == a2 and b == b2:
            return a, b
    return None


def _and_parts(f):
    match f:
        case Not(Imp(a, Not(b))):
            return a, b
    return None


def _jex_parts(f):
    match f:
        case Not(JForall(u, Not(body))):
            return u, body
    return None


def _ex_parts(f):
    match f:
        case Not(Forall(x, Not(body))):
            return x, body
    return None


def _image(pattern, instance, var):
    """The subtree of ``instance`` sitting where ``var`` occurs free in ``pattern``."""
    stack = [(pattern, instance)]
    while stack:
        p, q = stack.pop()
        if p == var:
            return q
        if type(p) is not type(q):
            continue
        if isinstance(p, _Binder) and p.var == var:
            continue
        if isinstance(p, (PVar, JVar, PConst, JConst)):
            continue
        stack.extend(reversed(list(zip(p.children, q.children))))
    return None


def _match_body(sid, f):
    if sid == "i":
        parts = _iff_parts(f)
        if parts and isinstance(parts[0], IsTrue) and parts[0].body == parts[1]:
            return {"phi": parts[1]}
    elif sid == "ii":
        parts = _iff_parts(f)
        if parts and isinstance(parts[0], IsFalse) and Not(parts[0].body) == parts[1]:
            return {"phi": parts[0].body}
    elif sid == "iii":
        match f:
            case Imp(Member(Imp(p, q), s), Imp(Member(p2, t), Member(q2, Prod(s2, t2)))):
                if p == p2 and q == q2 and s == s2 and t == t2:
                    return {"phi": p, "psi": q, "s": s, "t": t}
    elif sid == "iv":
        match f:
            case Imp(Member(p, s), Member(p2, Sum(s2, t))) if p == p2 and s == s2:
                return {"phi": p, "s": s, "t": t}
    elif sid == "v":
        match f:
            case Imp(Member(p, t), Member(p2, Sum(s, t2))) if p == p2 and t == t2:
                return {"phi": p, "s": s, "t": t}
    elif sid == "vi":
        parts = _iff_parts(f)
        if parts and isinstance(parts[0], Box):
            ex = _jex_parts(parts[1])
            if ex:
                u, body = ex
                p = parts[0].body
                if body == Member(p, u) and u.index not in p.fvj:
                    return {"phi": p, "u": u}
    elif sid == "vii":
        match f:
            case Imp(Box(p), p2) if p == p2:
                return {"phi": p}
    elif sid == "viii":
        match f:
            case Refers(p, q) if syn_ref(p, q):
                return {"phi": p, "psi": q}
    elif sid == "ix":
        match f:
            case Imp(Refers(p, q), Imp(Refers(q2, c), Refers(p2, c2))):
                if p == p2 and q == q2 and c == c2:
                    return {"phi": p, "psi": q, "chi": c}
    elif sid == "x":
        match f:
            case Ident(p, q) if alpha_eq(p, q):
                return {"phi": p, "psi": q}
    elif sid == "xi":
        match f:
            case Imp(Ident(p, q), Imp(p2, q2)) if p == p2 and q == q2:
                return {"phi": p, "psi": q}
    elif sid == "xiii":
        match f:
            case Imp(a, rest):
                ex = _jex_parts(rest)
                if ex:
                    u, p = ex
                    t = _image(p, a, u)
                    if isinstance(t, Term):
                        return {"phi": p, "u": u, "t": t}
    elif sid == "xiv":
        match f:
            case Imp(JForall(u, p), b):
                t = _image(p, b, u)
                if isinstance(t, Term):
                    return {"phi": p, "u": u, "t": t}
    elif sid == "xv":
        match f:
            case Imp(JForall(u, Imp(q, p)), Imp(JForall(u2, q2), JForall(u3, p2))):
                if u == u2 == u3 and p == p2 and q == q2:
                    return {"phi": p, "psi": q, "u": u}
    elif sid == "xvi":
        match f:
            case Imp(JForall(u, Imp(q, p)), Imp(q2, JForall(u2, p2))):
                if u == u2 and p == p2 and q == q2:
                    return {"phi": p, "psi": q, "u": u}
    elif sid == "xvii":
        match f:
            case Imp(a, rest):
                ex = _ex_parts(rest)
                if ex:
                    x, p = ex
                    q = _image(p, a, x)
                    if isinstance(q, Formula):
                        return {"phi": p, "x": x, "psi": q}
    elif sid == "xviii":
        match f:
            case Imp(Forall(x, p), b):
                q = _image(p, b, x)
                if isinstance(q, Formula):
                    return {"phi": p, "x": x, "psi": q}
    elif sid == "xix":
        match f:
            case Imp(Forall(x, Imp(q, p)), Imp(Forall(x2, q2), Forall(x3, p2))):
                if x == x2 == x3 and p == p2 and q == q2:
                    return {"phi": p, "psi": q, "x": x}
    elif sid == "xx":
        match f:
            case Imp(Forall(x, Imp(q, p)), Imp(q2, Forall(x2, p2))):
                if x == x2 and p == p2 and q == q2:
                    return {"phi": p, "psi": q, "x": x}
    elif sid == "xxi":
        parts = _iff_parts(f)
        if parts:
            match parts:
                case (TermLe(s, t), Forall(x, Imp(Member(x2, s2), Member(x3, t2)))):
                    if x == x2 == x3 and s == s2 and t == t2:
                        return {"s": s, "t": t, "x": x}
    elif sid == "xxii":
        parts = _iff_parts(f)
        if parts and isinstance(parts[0], TermIdent):
            both = _and_parts(parts[1])
            s, t = parts[0].left, parts[0].right
            if both == (TermLe(s, t), TermLe(t, s)):
                return {"s": s, "t": t}
    elif sid == "four":
        match f:
            case Imp(Box(p), Box(Box(p2))) if p == p2:
                return {"phi": p}
    elif sid == "e":
        match f:
            case Imp(Not(Box(Not(p))), Box(Not(Box(Not(p2))))) if p == p2:
                return {"phi": p}
    elif sid == "taut":
        try:
            if is_skeleton_tautology(f):
                return {"phi": f}
        except AtomBudgetExceeded:
            return None
    return None


def match_schema(sid, f):
    """Witnesses under which ``f`` is exactly an instance of ``sid`` (closure allowed)."""
    if sid in WITNESS_ONLY:
        return None
    prefix, body = strip_closure(f)
    w = _match_body(sid, body)
    if w is None:
        return None
    try:
        if _build_body(sid, w) != body:
            return None
    except (SideConditionViolated, ImproperFormula, EmptyVariableSet):
        return None
    if prefix:
        w["closure"] = prefix
    return w


def recognize(f, sys="AX"):
    """First schema (fixed order, tautologies last) that ``f`` instantiates in ``sys``."""
    for sid in schemas_of(sys):
        w = match_schema(sid, f)
        if w is not None:
            return sid, w
    return None


@lru_cache(maxsize=200_000)
def is_axiom(f, sys="AX"):
    """Membership in Ax of ``sys``, including the witness-only schemas."""
    return recognize(f, sys) is not None or infer_witness_only(f) is not None


def verify_instance(f, sid, w):
    """True when ``f`` (closure stripped) equals ``build_instance(sid, w)``."""
    prefix, body = strip_closure(f)
    w = {k: v for k, v in w.items() if k != "closure"}
    try:
        return _build_body(sid, w) == body
    except (SideConditionViolated, ImproperFormula, EmptyVariableSet):
        return False


# -- membership for the witness-only schemas -----------------------------------

_CANDIDATE_CAP = 64


class _Search:
    """Anti-unification of the two sides of a (xii)/(xxiii) consequent.

    ``holes`` are the (z, σ(z), σ'(z)) triples read off the antecedent.  A
    subtree shared by both sides may also stand for a constant that σ and σ'
    bind alike (needed when it has free variables or bound names that are not
    in normal form); such constants get fresh names and their images are recorded.
    """

    def __init__(self, holes, body):
        self.holes = holes
        self.next_var = max(all_vars(body)[0] | all_vars(body)[1] | {0}) + len(holes) + 1
        self.taken = {c.name for c in body.cons}
        self.images = {}

    def constant(self, image):
        n = len(self.images)
        while f"k{n}" in self.taken:
            n += 1
        k = (PConst if isinstance(image, Formula) else JConst)(f"k{n}")
        self.taken.add(k.name)
        self.images[k] = image
        return k

    def run(self, left, right, env=()):
        out = [z for z, a, b in self.holes if a == left and b == right]
        if (left == right and not self._captured(left, env)
                and (left.fvp or left.fvj or apply(left, Substitution()) != left)):
            k = self.constant(left)
            if not any(a == b and _occurs(a, left) for _, a, b in self.holes):
                return out + [k]
            return (out + self._structural(left, right, env) + [k])[:_CANDIDATE_CAP]
        return out + self._structural(left, right, env)

    def _structural(self, left, right, env):
        if isinstance(left, (PVar, JVar)) or isinstance(right, (PVar, JVar)):
            for yl, yr, yc in reversed(env):
                if yl == left or yr == right:
                    return [yc] if yl == left and yr == right else []
            return []
        if type(left) is not type(right):
            return []
        if not left.children:
            return [left] if left == right else []
        if isinstance(left, _Binder):
            yc = type(left.var)(self.next_var)
            self.next_var += 1
            out = []
            for body in self.run(left.body, right.body, env + ((left.var, right.var, yc),)):
                try:
                    out.append(type(left)(yc, body))
                except ImproperFormula:
                    pass
            return out[:_CANDIDATE_CAP]
        parts = [self.run(a, b, env) for a, b in zip(left._args, right._args)]
        return [type(left)(*args)
                for args in itertools.islice(itertools.product(*parts), _CANDIDATE_CAP)]

    @staticmethod
    def _captured(e, env):
        bound = {y for yl, yr, _ in env for y in (yl, yr)}
        return any(PVar(i) in bound for i in e.fvp) or any(JVar(i) in bound for i in e.fvj)


def _occurs(e, f):
    stack = [f]
    while stack:
        n = stack.pop()
        if n == e:
            return True
        stack.extend(n.children)
    return False


def _eq_pairs(f):
    """The (σ(z), σ'(z)) pairs of an expanded ``σ ≡ σ'`` conjunction, in order."""
    if isinstance(f, (Ident, TermIdent)):
        return [f]
    if (isinstance(f, Not) and isinstance(f.body, Imp) and isinstance(f.body.right, Not)
            and isinstance(f.body.right.body, (Ident, TermIdent))):
        head = _eq_pairs(f.body.left)
        return None if head is None else head + [f.body.right.body]
    return None


def infer_witness_only(f):
    """Witnesses making ``f`` an instance of (xii) or (xxiii), or None.

    ``recognize`` never infers these schemas; this search exists so that the
    axiom-sensitive model semantics can decide membership.
    """
    prefix, body = strip_closure(f)
    if not isinstance(body, Imp) or not isinstance(body.right, (Ident, TermIdent)):
        return None
    pairs = _eq_pairs(body.left)
    if pairs is None:
        return None
    sid = "xii" if isinstance(body.right, Ident) else "xxiii"
    kinds = [isinstance(p, Ident) for p in pairs]
    if (sid == "xxiii" and any(kinds)) or kinds != sorted(kinds, reverse=True):
        return None
    holes = []
    counts = [0, 0]
    for p in pairs:
        sort = 0 if isinstance(p, Ident) else 1
        holes.append(((PVar, JVar)[sort](counts[sort]), p.left, p.right))
        counts[sort] += 1
    wanted = {z for z, _, _ in holes}
    search = _Search(holes, body)
    for base in search.run(body.right.left, body.right.right)[:_CANDIDATE_CAP]:
        free = {PVar(i) for i in base.fvp} | {JVar(i) for i in base.fvj}
        if free != wanted:
            continue
        consts = {k: search.images[k] for k in base.cons if k in search.images}
        w = {("chi" if sid == "xii" else "t"): base,
             "sigma": Substitution({**{z: a for z, a, _ in holes}, **consts}),
             "sigma'": Substitution({**{z: b for z, _, b in holes}, **consts})}
        if verify_instance(body, sid, w):
            if prefix:
                w["closure"] = prefix
            return sid, w
    return None


# -- tautologies over atom skeletons ---------------------------------------

def skeleton_atoms(f):
    atoms = []
    seen = set()
    stack = [f]
    while stack:
        n = stack.pop()
        if isinstance(n, Imp):
            stack.append(n.right)
            stack.append(n.left)
        elif isinstance(n, Not):
            stack.append(n.body)
        elif n not in seen:
            seen.add(n)
            atoms.append(n)
    return atoms


def is_skeleton_tautology(f):
    """Classical tautology after abstracting maximal non-connective subformulas."""
    atoms = skeleton_atoms(f)
    n = len(atoms)
    if n > ATOM_BUDGET:
        raise AtomBudgetExceeded(f"{n} atoms (budget {ATOM_BUDGET})")
    rows = 1 << n
    full = (1 << rows) - 1
    masks = {}
    for k, a in enumerate(atoms):
        # bit r of the mask is the value of atom k in row r
        block = (1 << (1 << k)) - 1
        pattern = 0
        period = 1 << (k + 1)
        shift = 1 << k
        for start in range(0, rows, period):
            pattern |= block << (start + shift)
        masks[a] = pattern
    cache = {}

    def value(g):
        if g in cache:
            return cache[g]
        if isinstance(g, Imp):
            r = (~value(g.left) | value(g.right)) & full
        elif isinstance(g, Not):
            r = ~value(g.body) & full
        else:
            r = masks[g]
        cache[g] = r
        return r

    return value(f) == full


# -- witness text ------------------------------------------------------------

def parse_witnesses(text, sig=None):
    """``phi="x0 -> x1" u="v0" sigma=[x0:="d1"]`` to a witness dict."""
    w = {}
    pos = 0
    text = text.strip()
    name_re = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*'?)=")
    while pos < len(text):
        m = name_re.match(text, pos)
        if not m:
            raise ParseError("expected name=value", pos)
        name = m.group(1)
        pos = m.end()
        if pos < len(text) and text[pos] == '"':
            end = text.find('"', pos + 1)
            if end < 0:
                raise ParseError("unterminated string", pos)
            raw = text[pos + 1:end]
            pos = end + 1
            if name in ("u", "x"):
                w[name] = parse_variable(raw)
            else:
                w[name] = parse_any(raw, sig)
        elif pos < len(text) and text[pos] == "[":
            end = _bracket_end(text, pos)
            w[name] = parse_subst(text[pos:end + 1], sig)
            pos = end + 1
        else:
            raise ParseError("expected a quoted value or a substitution", pos)
        if name not in WITNESS_ORDER:
            raise ParseError(f"unknown witness {name!r}", pos)
    return w


def _bracket_end(text, start):
    quoted = False
    for i in range(start + 1, len(text)):
        ch = text[i]
        if ch == '"':
            quoted = not quoted
        elif ch == "]" and not quoted:
            return i
    raise ParseError("unterminated substitution", start)


def render_witnesses(w):
    out = []
    for k in WITNESS_ORDER:
        if k not in w:
            continue
        v = w[k]
        out.append(f"{k}={render_subst(v)}" if isinstance(v, Substitution) else f'{k}="{render(v)}"')
    return " ".join(out)


def transport_witnesses(sid, w, tau):
    """Witnesses of ``sid`` whose instance is the old instance pushed through ``τ``.

    Only needed for the witness-only schemas; the rest are re-recognized.
    """
    base = w["chi"] if sid == "xii" else w["t"]
    keys = {PVar(i) for i in base.fvp} | {JVar(i) for i in base.fvj} | set(base.cons)
    out = dict(w)
    out["sigma"] = compose(w["sigma"], tau).restrict(keys)
    out["sigma'"] = compose(w["sigma'"], tau).restrict(keys)
    out.pop("closure", None)
    return out
