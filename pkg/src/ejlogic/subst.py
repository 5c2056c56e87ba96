"""Substitution with forced-variable renaming, composition, alpha-equivalence
and syntactic reference."""

import re

from .syntax import (
    Formula, JConst, JVar, PConst, ParseError, PVar, SortError, Term, _Binder, parse_any,
    parse_variable, render,
)

_LEAVES = (PVar, PConst, JVar, JConst)


def _check_binding(key, value):
    if isinstance(key, (PVar, PConst)):
        if not isinstance(value, Formula):
            raise SortError(f"{render(key)} must be mapped to a formula, got {render(value)}")
    elif isinstance(key, (JVar, JConst)):
        if not isinstance(value, Term):
            raise SortError(f"{render(key)} must be mapped to a term, got {render(value)}")
    else:
        raise SortError(f"cannot substitute for {key!r}")


class Substitution:
    """Finite deviation from the identity, sort-preserving.

    Keys are variables or constants; identity bindings are dropped so the
    support is exactly the set of keys.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping=None):
        m = {}
        for k, v in dict(mapping or {}).items():
            _check_binding(k, v)
            if k != v:
                m[k] = v
        object.__setattr__(self, "_map", m)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("substitutions are immutable")

    def __call__(self, key):
        return self._map.get(key, key)

    def __contains__(self, key):
        return key in self._map

    def __len__(self):
        return len(self._map)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash(frozenset(self._map.items())))
        return self._hash

    def __repr__(self):
        return f"Substitution({render_subst(self)})"

    @property
    def support(self):
        return set(self._map)

    def items(self):
        return sorted(self._map.items(), key=lambda kv: _order_key(kv[0]))

    def extend(self, key, value):
        """``σ[key := value]``."""
        m = dict(self._map)
        m[key] = value
        return Substitution(m)

    def restrict(self, keys):
        return Substitution({k: v for k, v in self._map.items() if k in keys})


EPSILON = Substitution()


def _order_key(k):
    # propositional variables, justification variables, then constants by name
    if isinstance(k, PVar):
        return (0, k.index, "")
    if isinstance(k, JVar):
        return (1, k.index, "")
    if isinstance(k, PConst):
        return (2, 0, k.name)
    return (3, 0, k.name)


def _forced(indices):
    return max(indices) + 1 if indices else 0


def apply(e, sigma):
    """``e[σ]``: structural substitution with forced bound-variable names.

    Even the identity renames bound variables, which is what ``normalize`` uses.
    """
    return _apply(e, sigma)


def _apply(e, sigma):
    if isinstance(e, _LEAVES):
        return sigma(e)
    if isinstance(e, _Binder):
        var, body = e.var, e.body
        scope = _fcon_keys(e)
        if isinstance(var, PVar):
            used = set()
            for w in scope:
                used |= sigma(w).fvp
            y = PVar(_forced(used))
        else:
            used = set()
            for w in scope:
                used |= sigma(w).fvj
            y = JVar(_forced(used))
        return type(e)(y, _apply(body, _extend(sigma, var, y)))
    return type(e)(*(_apply(a, sigma) for a in e._args))


def _extend(sigma, key, value):
    m = dict(sigma._map)
    if key == value:
        m.pop(key, None)
    else:
        m[key] = value
    s = Substitution.__new__(Substitution)
    object.__setattr__(s, "_map", m)
    object.__setattr__(s, "_hash", None)
    return s


def _fcon_keys(e):
    keys = [PVar(i) for i in e.fvp] + [JVar(i) for i in e.fvj]
    keys.extend(e.cons)
    return keys


def compose(sigma, tau):
    """``σ∘τ`` maps each key k to ``σ(k)[τ]``."""
    m = {}
    for k in set(sigma.support) | set(tau.support):
        m[k] = apply(sigma(k), tau)
    return Substitution(m)


def normalize(f):
    return apply(f, EPSILON)


def alpha_eq(a, b):
    return normalize(a) == normalize(b)


def syn_ref(phi, psi):
    """Decide ``φ ≺ ψ``: a non-root, capture-free occurrence of φ in ψ up to =α."""
    target = normalize(phi)
    fp, fj = phi.fvp, phi.fvj
    bp0 = bj0 = frozenset()
    if isinstance(psi, _Binder):
        if isinstance(psi.var, PVar):
            bp0 = frozenset({psi.var.index})
        else:
            bj0 = frozenset({psi.var.index})
    stack = [(c, bp0, bj0) for c in _formula_children(psi)]
    while stack:
        node, bp, bj = stack.pop()
        if not (fp & bp) and not (fj & bj) and normalize(node) == target:
            return True
        if isinstance(node, _Binder):
            if isinstance(node.var, PVar):
                bp = bp | {node.var.index}
            else:
                bj = bj | {node.var.index}
        for c in _formula_children(node):
            stack.append((c, bp, bj))
    return False


def _formula_children(f):
    return [c for c in f.children if isinstance(c, Formula)]


# -- text form: [x0:="box x1", v0:="c1 * v1"] ------------------------------

def parse_subst(text, sig=None):
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError("a substitution is written [key:=\"value\", ...]", 0)
    body = text[1:-1].strip()
    m = {}
    pos = 0
    pat = re.compile(r'\s*([A-Za-z_][A-Za-z0-9_]*)\s*:=\s*"([^"]*)"\s*(,|$)')
    while pos < len(body):
        mt = pat.match(body, pos)
        if not mt:
            raise ParseError("malformed substitution binding", pos + 1)
        key = _parse_key(mt.group(1), sig)
        if key in m:
            raise ParseError(f"{mt.group(1)} bound twice", pos + 1)
        m[key] = parse_any(mt.group(2), sig)
        pos = mt.end()
    return Substitution(m)


def _parse_key(name, sig):
    try:
        return parse_variable(name)
    except ParseError:
        pass
    if sig is not None and name in sig.props:
        return PConst(name)
    if sig is not None and name in sig.justs:
        return JConst(name)
    raise ParseError(f"unknown substitution key {name!r}", 0)


def render_subst(sigma):
    return "[" + ", ".join(f'{render(k)}:="{render(v)}"' for k, v in sigma.items()) + "]"


__all__ = [
    "Substitution", "EPSILON", "apply", "compose", "normalize", "alpha_eq", "syn_ref",
    "parse_subst", "render_subst",
]
