"""Two-sorted abstract syntax, concrete syntax and desugaring.

Propositional variables are ``PVar(i)`` (written ``x<i>``), justification
variables are ``JVar(i)`` (written ``v<i>``).  Both families are ordered by
index.  Constants carry a declared name.
"""

import re


class ParseError(Exception):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SortError(Exception):
    pass


class ImproperFormula(Exception):
    def __init__(self, quantifier, variable):
        super().__init__(f"{quantifier} binds {variable}, which is not free in its body")
        self.quantifier = quantifier
        self.variable = variable


class UnknownConstant(Exception):
    pass


EMPTY = frozenset()


class Node:
    """Immutable tree node with structural equality and cached metadata."""

    __slots__ = ("_args", "_hash", "fvp", "fvj", "cons")
    _fields = ()

    def __setattr__(self, name, value):
        raise AttributeError("syntax nodes are immutable")

    def _init(self, args, fvp, fvj, cons):
        object.__setattr__(self, "_args", args)
        object.__setattr__(self, "_hash", hash((type(self).__name__, args)))
        object.__setattr__(self, "fvp", fvp)
        object.__setattr__(self, "fvj", fvj)
        object.__setattr__(self, "cons", cons)

    def __eq__(self, other):
        if self is other:
            return True
        return (type(self) is type(other) and self._hash == other._hash
                and self._args == other._args)

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{type(self).__name__}({', '.join(map(repr, self._args))})"

    def __reduce__(self):
        return (type(self), self._args)

    @property
    def children(self):
        return tuple(a for a in self._args if isinstance(a, Node))


class Term(Node):
    __slots__ = ()


class Formula(Node):
    __slots__ = ()
    sugar = False


def _need(value, sort, where):
    if not isinstance(value, sort):
        raise SortError(f"{where} expects a {sort.__name__.lower()}, got {value!r}")


# -- terms -----------------------------------------------------------------

class JVar(Term):
    __slots__ = ()
    __match_args__ = ("index",)

    def __init__(self, index):
        if not isinstance(index, int) or index < 0:
            raise ValueError(f"bad variable index {index!r}")
        self._init((index,), EMPTY, frozenset((index,)), EMPTY)

    index = property(lambda self: self._args[0])


class JConst(Term):
    __slots__ = ()
    __match_args__ = ("name",)

    def __init__(self, name):
        self._init((name,), EMPTY, EMPTY, EMPTY)
        object.__setattr__(self, "cons", frozenset((self,)))

    name = property(lambda self: self._args[0])


class _TermOp(Term):
    __slots__ = ()
    __match_args__ = ("left", "right")

    def __init__(self, left, right):
        _need(left, Term, type(self).__name__)
        _need(right, Term, type(self).__name__)
        self._init((left, right), EMPTY, left.fvj | right.fvj, left.cons | right.cons)

    left = property(lambda self: self._args[0])
    right = property(lambda self: self._args[1])


class Prod(_TermOp):
    __slots__ = ()


class Sum(_TermOp):
    __slots__ = ()


# -- formulas --------------------------------------------------------------

class PVar(Formula):
    __slots__ = ()
    __match_args__ = ("index",)

    def __init__(self, index):
        if not isinstance(index, int) or index < 0:
            raise ValueError(f"bad variable index {index!r}")
        self._init((index,), frozenset((index,)), EMPTY, EMPTY)

    index = property(lambda self: self._args[0])


class PConst(Formula):
    __slots__ = ()
    __match_args__ = ("name",)

    def __init__(self, name):
        self._init((name,), EMPTY, EMPTY, EMPTY)
        object.__setattr__(self, "cons", frozenset((self,)))

    name = property(lambda self: self._args[0])


class _Unary(Formula):
    __slots__ = ()
    __match_args__ = ("body",)

    def __init__(self, body):
        _need(body, Formula, type(self).__name__)
        self._init((body,), body.fvp, body.fvj, body.cons)

    body = property(lambda self: self._args[0])


class Not(_Unary):
    __slots__ = ()


class IsTrue(_Unary):
    __slots__ = ()


class IsFalse(_Unary):
    __slots__ = ()


class Box(_Unary):
    __slots__ = ()


class _Binary(Formula):
    __slots__ = ()
    __match_args__ = ("left", "right")
    operand = Formula

    def __init__(self, left, right):
        _need(left, self.operand, type(self).__name__)
        _need(right, self.operand, type(self).__name__)
        self._init((left, right), left.fvp | right.fvp, left.fvj | right.fvj,
                   left.cons | right.cons)

    left = property(lambda self: self._args[0])
    right = property(lambda self: self._args[1])


class Imp(_Binary):
    __slots__ = ()


class Ident(_Binary):
    __slots__ = ()


class Refers(_Binary):
    __slots__ = ()


class TermIdent(_Binary):
    __slots__ = ()
    operand = Term


class TermLe(_Binary):
    __slots__ = ()
    operand = Term


class Member(Formula):
    __slots__ = ()
    __match_args__ = ("body", "term")

    def __init__(self, body, term):
        _need(body, Formula, "Member")
        _need(term, Term, "Member")
        self._init((body, term), body.fvp, body.fvj | term.fvj, body.cons | term.cons)

    body = property(lambda self: self._args[0])
    term = property(lambda self: self._args[1])


class _Binder(Formula):
    __slots__ = ()
    __match_args__ = ("var", "body")
    var_sort = PVar
    keyword = ""

    def __init__(self, var, body, check=True):
        if not isinstance(var, self.var_sort):
            raise SortError(f"{self.keyword} binds a {self.var_sort.__name__}, got {var!r}")
        _need(body, Formula, self.keyword)
        if self.var_sort is PVar:
            free = body.fvp
            fvp, fvj = body.fvp - {var.index}, body.fvj
        else:
            free = body.fvj
            fvp, fvj = body.fvp, body.fvj - {var.index}
        if check and var.index not in free:
            raise ImproperFormula(self.keyword, render(var))
        self._init((var, body), fvp, fvj, body.cons)

    var = property(lambda self: self._args[0])
    body = property(lambda self: self._args[1])


class Forall(_Binder):
    __slots__ = ()
    keyword = "all"


class JForall(_Binder):
    __slots__ = ()
    var_sort = JVar
    keyword = "jall"


# -- sugar (eliminated by desugar) ----------------------------------------

class Dia(_Unary):
    __slots__ = ()
    sugar = True


class And(_Binary):
    __slots__ = ()
    sugar = True


class Or(_Binary):
    __slots__ = ()
    sugar = True


class Iff(_Binary):
    __slots__ = ()
    sugar = True


class Exists(_Binder):
    __slots__ = ()
    keyword = "ex"
    sugar = True


class JExists(_Binder):
    __slots__ = ()
    var_sort = JVar
    keyword = "jex"
    sugar = True


# -- core builders for defined connectives ---------------------------------

def neg(f):
    return Not(f)


def conj(a, b):
    return Not(Imp(a, Not(b)))


def disj(a, b):
    return Imp(Not(a), b)


def iff(a, b):
    return conj(Imp(a, b), Imp(b, a))


def dia(f):
    return Not(Box(Not(f)))


def exists(x, f):
    return Not(Forall(x, Not(f)))


def jexists(u, f):
    return Not(JForall(u, Not(f)))


def desugar(f):
    """Eliminate dia, ex, jex, &, | and <-> in favour of the core constructors."""
    if isinstance(f, (Term, PVar, PConst)):
        return f
    if isinstance(f, Dia):
        return dia(desugar(f.body))
    if isinstance(f, And):
        return conj(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return disj(desugar(f.left), desugar(f.right))
    if isinstance(f, Iff):
        return iff(desugar(f.left), desugar(f.right))
    if isinstance(f, Exists):
        return exists(f.var, desugar(f.body))
    if isinstance(f, JExists):
        return jexists(f.var, desugar(f.body))
    if isinstance(f, _Binder):
        return type(f)(f.var, desugar(f.body))
    if isinstance(f, Member):
        return Member(desugar(f.body), f.term)
    return type(f)(*(desugar(a) if isinstance(a, Formula) else a for a in f._args))


# -- variables and constants ------------------------------------------------

def free_vars(e):
    """Free propositional and justification variables as sets of PVar / JVar."""
    return {PVar(i) for i in e.fvp}, {JVar(i) for i in e.fvj}


def fcon(e):
    """Free variables together with every constant occurring in ``e``."""
    p, j = free_vars(e)
    return p | j | set(e.cons)


def varcon(t):
    return fcon(t)


def con_p(e):
    return {c for c in e.cons if isinstance(c, PConst)}


def con_j(e):
    return {c for c in e.cons if isinstance(c, JConst)}


def all_vars(e):
    """Indices of every variable occurring anywhere, bound or free."""
    ps, js = set(), set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, PVar):
            ps.add(n.index)
        elif isinstance(n, JVar):
            js.add(n.index)
        else:
            stack.extend(n.children)
    return ps, js


def is_proper(f):
    if isinstance(f, _Binder):
        free = f.body.fvp if f.var_sort is PVar else f.body.fvj
        if f.var.index not in free:
            return False
    return all(is_proper(c) for c in f.children)


def subformulas(f):
    """Yield every formula node of ``f`` in pre-order (root included)."""
    stack = [f]
    while stack:
        n = stack.pop()
        if isinstance(n, Formula):
            yield n
            stack.extend(reversed([c for c in n.children if isinstance(c, Formula)]))


def size(e):
    return 1 + sum(size(c) for c in e.children)


# -- concrete syntax ---------------------------------------------------------

KEYWORDS = {"all", "ex", "jall", "jex", "box", "dia", "true", "false", "const", "prop", "just"}
PVAR_RE = re.compile(r"x(0|[1-9][0-9]*)\Z")
JVAR_RE = re.compile(r"v(0|[1-9][0-9]*)\Z")
IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class Signature:
    """Declared constant names per sort."""

    def __init__(self, props=(), justs=()):
        self.props = []
        self.justs = []
        for n in props:
            self.declare("prop", n)
        for n in justs:
            self.declare("just", n)

    def declare(self, sort, name):
        if not IDENT_RE.match(name) or name in KEYWORDS or PVAR_RE.match(name) or JVAR_RE.match(name):
            raise ValueError(f"invalid constant name {name!r}")
        if name in self.props or name in self.justs:
            raise ValueError(f"constant {name!r} declared twice")
        (self.props if sort == "prop" else self.justs).append(name)

    def lines(self):
        return [f"const prop {n}" for n in self.props] + [f"const just {n}" for n in self.justs]

    def merged(self, other):
        s = Signature(self.props, self.justs)
        for n in other.props:
            if n not in s.props:
                s.declare("prop", n)
        for n in other.justs:
            if n not in s.justs:
                s.declare("just", n)
        return s

    @classmethod
    def covering(cls, *exprs):
        """Smallest signature declaring every constant in ``exprs``."""
        props, justs = set(), set()
        for e in exprs:
            for c in e.cons:
                (props if isinstance(c, PConst) else justs).add(c.name)
        return cls(sorted(props), sorted(justs))

    def parse_declaration(self, line):
        parts = line.split()
        if len(parts) != 3 or parts[0] != "const" or parts[1] not in ("prop", "just"):
            raise ParseError(f"bad declaration {line!r}", 0)
        self.declare(parts[1], parts[2])


TOKEN_RE = re.compile(r"\s*(<->|->|<=|==|:=|[~<:.()*+&|,\[\]]|[A-Za-z_][A-Za-z0-9_]*)")


def tokenize(text):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.group(1), m.start(1)))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, sig):
        self.tokens = tokenize(text)
        self.i = 0
        self.sig = sig or Signature()

    def peek(self):
        return self.tokens[self.i][0]

    def pos(self):
        return self.tokens[self.i][1]

    def take(self, expected=None):
        tok, pos = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def done(self):
        if self.peek() != "<end>":
            raise ParseError(f"unexpected {self.peek()!r}", self.pos())

    def formula(self):
        e = self.expr()
        if not isinstance(e, Formula):
            raise SortError(f"expected a formula, got term {render(e)}")
        return e

    def term(self):
        e = self.expr()
        if not isinstance(e, Term):
            raise SortError(f"expected a term, got formula {render(e)}")
        return e

    def expr(self):
        left = self.imp()
        if self.peek() == "<->":
            self.take()
            return Iff(left, self.expr())
        return left

    def imp(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Imp(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.middle()
        while self.peek() == "&":
            self.take()
            left = And(left, self.middle())
        return left

    def middle(self):
        left = self.sum()
        op = self.peek()
        if op in ("==", "<", "<="):
            self.take()
            right = self.sum()
            if op == "==":
                if isinstance(left, Term) and isinstance(right, Term):
                    return TermIdent(left, right)
                if isinstance(left, Formula) and isinstance(right, Formula):
                    return Ident(left, right)
                raise SortError("'==' between a formula and a term")
            if op == "<":
                return Refers(left, right)
            return TermLe(left, right)
        return left

    def sum(self):
        left = self.prod()
        while self.peek() == "+":
            self.take()
            left = Sum(left, self.prod())
        return left

    def prod(self):
        left = self.unary()
        while self.peek() == "*":
            self.take()
            left = Prod(left, self.unary())
        return left

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "box":
            self.take()
            return Box(self.unary())
        if tok == "dia":
            self.take()
            return Dia(self.unary())
        if tok in ("all", "ex", "jall", "jex"):
            self.take()
            pos = self.pos()
            name = self.take()
            var = self.variable(name, pos)
            self.take(".")
            body = self.formula()
            cls = {"all": Forall, "ex": Exists, "jall": JForall, "jex": JExists}[tok]
            return cls(var, body)
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while self.peek() == ":":
            self.take()
            if self.peek() == "true":
                self.take()
                e = IsTrue(e)
            elif self.peek() == "false":
                self.take()
                e = IsFalse(e)
            else:
                e = Member(e, self.term_operand())
        return e

    def term_operand(self):
        left = self.term_factor()
        while self.peek() in ("*", "+"):
            if self.peek() == "*":
                self.take()
                left = Prod(left, self.term_factor())
            else:
                self.take()
                right = self.term_factor()
                while self.peek() == "*":
                    self.take()
                    right = Prod(right, self.term_factor())
                left = Sum(left, right)
        return left

    def term_factor(self):
        e = self.primary()
        if not isinstance(e, Term):
            raise SortError(f"expected a term after ':', got {render(e)}")
        return e

    def primary(self):
        pos = self.pos()
        tok = self.take()
        if tok == "(":
            e = self.expr()
            self.take(")")
            return e
        if IDENT_RE.match(tok) and tok not in KEYWORDS:
            if PVAR_RE.match(tok):
                return PVar(int(tok[1:]))
            if JVAR_RE.match(tok):
                return JVar(int(tok[1:]))
            if tok in self.sig.props:
                return PConst(tok)
            if tok in self.sig.justs:
                return JConst(tok)
            raise UnknownConstant(tok)
        raise ParseError(f"unexpected {tok!r}", pos)

    def variable(self, name, pos):
        if PVAR_RE.match(name):
            return PVar(int(name[1:]))
        if JVAR_RE.match(name):
            return JVar(int(name[1:]))
        raise ParseError(f"expected a variable, found {name!r}", pos)


def parse_formula(text, sig=None):
    p = _Parser(text, sig)
    f = p.formula()
    p.done()
    return desugar(f)


def parse_term(text, sig=None):
    p = _Parser(text, sig)
    t = p.term()
    p.done()
    return t


def parse_any(text, sig=None):
    p = _Parser(text, sig)
    e = p.expr()
    p.done()
    return desugar(e) if isinstance(e, Formula) else e


def parse_variable(text):
    text = text.strip()
    if PVAR_RE.match(text):
        return PVar(int(text[1:]))
    if JVAR_RE.match(text):
        return JVar(int(text[1:]))
    raise ParseError(f"expected a variable, found {text!r}", 0)


# -- rendering ---------------------------------------------------------------

_BINARY_OPS = {Imp: "->", Ident: "==", Refers: "<", TermIdent: "==", TermLe: "<=",
               And: "&", Or: "|", Iff: "<->", Prod: "*", Sum: "+"}
_UNARY_OPS = {Not: "~", Box: "box ", Dia: "dia "}


def _bare(e):
    """Operands rendered without parentheses inside a larger expression."""
    return isinstance(e, (PVar, PConst, JVar, JConst, Not, Box, Dia))


def _wrap(e):
    s = render(e)
    return s if _bare(e) else f"({s})"


def _wrap_postfix(e):
    s = render(e)
    return s if isinstance(e, (PVar, PConst, JVar, JConst)) else f"({s})"


def render(e):
    if isinstance(e, (PVar,)):
        return f"x{e.index}"
    if isinstance(e, JVar):
        return f"v{e.index}"
    if isinstance(e, (PConst, JConst)):
        return e.name
    if isinstance(e, tuple(_UNARY_OPS)):
        return _UNARY_OPS[type(e)] + _wrap(e.body)
    if isinstance(e, IsTrue):
        return f"{_wrap_postfix(e.body)} : true"
    if isinstance(e, IsFalse):
        return f"{_wrap_postfix(e.body)} : false"
    if isinstance(e, Member):
        return f"{_wrap_postfix(e.body)} : {_wrap(e.term)}"
    if isinstance(e, _Binder):
        return f"{e.keyword} {render(e.var)}. {_wrap(e.body)}"
    op = _BINARY_OPS[type(e)]
    return f"{_wrap(e.left)} {op} {_wrap(e.right)}"
