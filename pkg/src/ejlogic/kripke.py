"""S4 Kripke semantics, the four-valued translation, audits and countermodel search."""

import itertools
from dataclasses import dataclass

from .models import eval_expr, preset_s4_four_valued
from .syntax import Box, Imp, Not, ParseError, PVar, render


class OutsideModalFragment(Exception):
    pass


class BudgetExceeded(Exception):
    pass


MAX_WORLDS = 5


def closure(worlds, edges):
    """Reflexive-transitive closure of ``edges`` over ``worlds``."""
    R = {(w, w) for w in worlds} | set(edges)
    changed = True
    while changed:
        changed = False
        for a, b in list(R):
            for b2, c in list(R):
                if b == b2 and (a, c) not in R:
                    R.add((a, c))
                    changed = True
    return frozenset(R)


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple
    R: frozenset
    val: dict  # world -> {variable index: bool}

    @classmethod
    def make(cls, worlds, edges, val):
        worlds = tuple(worlds)
        for a, b in edges:
            if a not in worlds or b not in worlds:
                raise ValueError(f"edge {a} {b} mentions an unknown world")
        return cls(worlds, closure(worlds, edges), {w: dict(val.get(w, {})) for w in worlds})

    def successors(self, w):
        return [v for v in self.worlds if (w, v) in self.R]


def sat(k, w, f, memo=None):
    """``(w, g) ⊩ f`` for formulas built from variables, ¬, → and □."""
    if memo is None:
        memo = {}
    key = (w, f)
    if key in memo:
        return memo[key]
    if isinstance(f, PVar):
        r = bool(k.val[w].get(f.index, False))
    elif isinstance(f, Not):
        r = not sat(k, w, f.body, memo)
    elif isinstance(f, Imp):
        r = (not sat(k, w, f.left, memo)) or sat(k, w, f.right, memo)
    elif isinstance(f, Box):
        r = all(sat(k, v, f.body, memo) for v in k.successors(w))
    else:
        raise OutsideModalFragment(f"{render(f)} is outside the modal fragment")
    memo[key] = r
    return r


def modal_vars(f):
    if not isinstance(f, (PVar, Not, Imp, Box)):
        raise OutsideModalFragment(f"{render(f)} is outside the modal fragment")
    return set(f.fvp)


def beta(k, w, x, memo=None):
    """The four-valued image of variable ``x`` at world ``w``."""
    if sat(k, w, Box(x), memo):
        return "nec"
    if sat(k, w, Box(Not(x)), memo):
        return "imp"
    return "t" if sat(k, w, x, memo) else "f"


def translate(k, w, system="AX4_AXNEC", variables=None):
    """The four-valued model and the assignment β induced by world ``w``."""
    if variables is None:
        variables = sorted({i for v in k.worlds for i in k.val[v]})
    memo = {}
    gamma = {PVar(i): beta(k, w, PVar(i), memo) for i in variables}
    return preset_s4_four_valued(system), gamma


@dataclass(frozen=True)
class AuditRow:
    formula: object
    model_verdict: bool
    kripke_verdict: bool

    @property
    def agree(self):
        return self.model_verdict == self.kripke_verdict

    def line(self):
        return (f"{render(self.formula)}\t{'true' if self.model_verdict else 'false'}\t"
                f"{'true' if self.kripke_verdict else 'false'}\t"
                f"{'AGREE' if self.agree else 'DISAGREE'}")


def audit(k, w, corpus, system="AX4_AXNEC"):
    corpus = list(corpus)
    variables = set()
    for f in corpus:
        variables |= modal_vars(f)
    model, gamma = translate(k, w, system, sorted(variables))
    memo = {}
    rows = []
    for f in corpus:
        rows.append(AuditRow(f, eval_expr(model, gamma, f) in model.true, sat(k, w, f, memo)))
    return rows


# -- audit corpora ---------------------------------------------------------------

def modal_corpus(depth, nvars=2, canonical=False):
    """All modal formulas over ``nvars`` variables of syntactic depth at most ``depth``.

    With ``canonical`` only one representative per variable renaming is kept:
    the variables first occur in index order.
    """
    layers = [[PVar(i) for i in range(nvars)]]
    everything = list(layers[0])
    for _ in range(depth):
        new = []
        for f in everything:
            new.append(Not(f))
            new.append(Box(f))
        for a in everything:
            for b in everything:
                new.append(Imp(a, b))
        seen = set(everything)
        fresh = [f for f in new if f not in seen]
        everything.extend(dict.fromkeys(fresh))
    if canonical:
        everything = [f for f in everything if _first_occurrence_ordered(f)]
    return everything


def _first_occurrence_ordered(f):
    order = []
    stack = [f]
    while stack:
        n = stack.pop()
        if isinstance(n, PVar):
            if n.index not in order:
                order.append(n.index)
        else:
            stack.extend(reversed(n.children))
    return order == list(range(len(order)))


# -- countermodel search --------------------------------------------------------

def preorders(n):
    """Reflexive transitive relations on range(n), in lexicographic order of the
    off-diagonal adjacency bits."""
    cells = [(i, j) for i in range(n) for j in range(n) if i != j]
    for bits in itertools.product((0, 1), repeat=len(cells)):
        R = {(i, i) for i in range(n)} | {c for c, b in zip(cells, bits) if b}
        if all((a, c) in R for a, b in R for b2, c in R if b == b2):
            yield frozenset(R)


def search_countermodel(f, n_max):
    if n_max > MAX_WORLDS:
        raise BudgetExceeded(f"at most {MAX_WORLDS} worlds are searched, asked for {n_max}")
    variables = sorted(modal_vars(f))
    for n in range(1, n_max + 1):
        names = tuple(f"w{i}" for i in range(n))
        for R in preorders(n):
            rel = frozenset((names[a], names[b]) for a, b in R)
            for bits in itertools.product((0, 1), repeat=n * len(variables)):
                val = {names[i]: {x: bool(bits[i * len(variables) + j])
                                  for j, x in enumerate(variables)} for i in range(n)}
                k = KripkeModel(names, rel, val)
                memo = {}
                for w in names:
                    if not sat(k, w, f, memo):
                        return k, w
    return None


# -- frame files ---------------------------------------------------------------

def parse_frame(text):
    worlds, edges, val = [], [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, sep, rest = line.partition(":")
        head = head.strip()
        try:
            if not sep:
                raise ValueError("expected 'section: ...'")
            if head == "worlds":
                worlds.extend(rest.split())
            elif head == "edges":
                toks = rest.split()
                if len(toks) % 2:
                    raise ValueError("edges come in pairs")
                edges.extend(zip(toks[::2], toks[1::2]))
            elif head.startswith("val "):
                w = head[4:].strip()
                if w not in worlds:
                    raise ValueError(f"unknown world {w!r}")
                for item in rest.split():
                    name, _, bit = item.partition("=")
                    if not name.startswith("x") or not name[1:].isdigit() or bit not in ("0", "1"):
                        raise ValueError(f"bad valuation entry {item!r}")
                    val.setdefault(w, {})[int(name[1:])] = bit == "1"
            else:
                raise ValueError(f"unknown section {head!r}")
        except ValueError as e:
            raise ParseError(f"line {lineno}: {e}", 0) from None
    if len(set(worlds)) != len(worlds):
        raise ParseError("duplicate world name", 0)
    try:
        return KripkeModel.make(worlds, edges, val)
    except ValueError as e:
        raise ParseError(str(e), 0) from None


def render_frame(k):
    out = [f"worlds: {' '.join(k.worlds)}"]
    for a in k.worlds:
        for b in k.worlds:
            if a != b and (a, b) in k.R:
                out.append(f"edges: {a} {b}")
    for w in k.worlds:
        items = " ".join(f"x{i}={int(v)}" for i, v in sorted(k.val[w].items()))
        out.append(f"val {w}: {items}".rstrip())
    return "\n".join(out) + "\n"
