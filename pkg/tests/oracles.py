"""Slow, independent reference implementations used only by the tests."""

import itertools

from ejlogic.syntax import Box, Imp, JVar, Not, PVar, _Binder


def alpha_oracle(a, b, env=()):
    """Inductive alpha-congruence: bound variables must be bound at the same binder."""
    if isinstance(a, (PVar, JVar)) or isinstance(b, (PVar, JVar)):
        if type(a) is not type(b):
            return False
        for x, y in reversed(env):
            if x == a or y == b:
                return x == a and y == b
        return a == b
    if type(a) is not type(b):
        return False
    if isinstance(a, _Binder):
        return alpha_oracle(a.body, b.body, env + ((a.var, b.var),))
    if not a.children and not b.children:
        return a == b
    if len(a.children) != len(b.children):
        return False
    return all(alpha_oracle(x, y, env) for x, y in zip(a.children, b.children))


def _atoms(f, out):
    if isinstance(f, Imp):
        _atoms(f.left, out)
        _atoms(f.right, out)
    elif isinstance(f, Not):
        _atoms(f.body, out)
    elif f not in out:
        out.append(f)
    return out


def _value(f, row):
    if isinstance(f, Imp):
        return (not _value(f.left, row)) or _value(f.right, row)
    if isinstance(f, Not):
        return not _value(f.body, row)
    return row[f]


def tautology_oracle(f):
    atoms = _atoms(f, [])
    for bits in itertools.product((False, True), repeat=len(atoms)):
        if not _value(f, dict(zip(atoms, bits))):
            return False
    return True


def kripke_oracle(worlds, rel, val, w, f):
    """Direct recursive forcing with no memo, over an explicit relation."""
    if isinstance(f, PVar):
        return bool(val[w].get(f.index, False))
    if isinstance(f, Not):
        return not kripke_oracle(worlds, rel, val, w, f.body)
    if isinstance(f, Imp):
        return (not kripke_oracle(worlds, rel, val, w, f.left)) or kripke_oracle(
            worlds, rel, val, w, f.right)
    if isinstance(f, Box):
        return all(kripke_oracle(worlds, rel, val, v, f.body) for v in worlds if (w, v) in rel)
    raise TypeError(f)


def count_preorders(n):
    """Brute-force count of reflexive transitive relations on n labelled points."""
    pairs = [(i, j) for i in range(n) for j in range(n)]
    count = 0
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        R = {p for p, b in zip(pairs, bits) if b}
        if all((i, i) in R for i in range(n)) and all(
                (a, c) in R for a, b in R for b2, c in R if b == b2):
            count += 1
    return count

