import itertools
import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from ejlogic.axioms import schemas_of
from ejlogic.generate import Gen, random_assignment
from ejlogic.models import (
    check_condition, derived_sets, eval_expr, holds, parse_model, preset_extensional,
    preset_s4_four_valued, render_model, validate,
)
from ejlogic.subst import Substitution, alpha_eq, apply, syn_ref
from ejlogic.syntax import (
    Box, Ident, Imp, IsFalse, JVar, Not, PConst, PVar, SortError, dia, exists,
)
from cases import EXTENSIONAL_MUTATIONS, S4_MUTATIONS
from strategies import formulas

x0, x1 = PVar(0), PVar(1)
d1 = PConst("d1")
S4 = preset_s4_four_valued("AX4_AXNEC")
EXT = preset_extensional()
LIAR = Not(exists(x0, Ident(x0, IsFalse(x0))))


def test_presets_validate():
    r = validate(EXT)
    assert r.ok and not r.warnings
    r = validate(S4)
    assert r.ok and r.warnings == ["SyntaxDependentBox"]


def test_preset_shapes():
    assert len(S4.values) == 4 and len(S4.just) == 1
    for a in S4.values:
        assert S4.istrue[a] == a


def test_negation_mutation_names_clause_and_witness():
    r = validate(EXT.mutated("neg", "t", "t"))
    assert r.failures[0] == ("ii", "t")
    assert r.lines()[:2] == ["FAIL", "fail ii witness t"]


@pytest.mark.parametrize("model, mutation", [(S4, m) for m in S4_MUTATIONS]
                         + [(EXT, m) for m in EXTENSIONAL_MUTATIONS])
def test_mutations_rejected_with_clause(model, mutation):
    table, key, value, clause = mutation
    r = validate(model.mutated(table, key, value))
    assert not r.ok
    assert r.failures[0][0] == clause


def test_structural_mutations():
    assert validate(replace(EXT, nec=frozenset())).failures[0][0] == "nec-union"
    assert validate(replace(EXT, nec=frozenset({"f"}))).failures[0][0] == "nec-subset"
    bad_ref = frozenset({("t", "f"), ("f", "t")})
    assert validate(replace(EXT, ref=bad_ref)).failures[0][0] == "ref-transitive"
    missing = dict(EXT.neg)
    del missing["f"]
    assert validate(replace(EXT, neg=missing)).failures[0][0] == "totality"


def test_eval_examples(P):
    assert eval_expr(S4, {x0: "nec"}, Not(x0)) == "imp"
    m = replace(S4, const_prop={"d1": "t"})
    assert eval_expr(m, {x0: "imp"}, Imp(x0, d1)) == "nec"
    assert eval_expr(EXT, {x0: "t"}, Box(x0)) == "t"
    assert eval_expr(EXT, {x0: "f"}, Box(x0)) == "f"


def test_override_box_of_axiom(P):
    assert eval_expr(S4, {x0: "t"}, Box(x0)) == "f"
    assert eval_expr(S4, {x0: "t"}, P("box (box x0 -> x0)")) == "nec"


def test_eval_sort_error():
    with pytest.raises(SortError):
        eval_expr(EXT, {x0: "nec"}, x0)
    with pytest.raises(SortError):
        eval_expr(EXT, {JVar(0): "t"}, x0)


@pytest.mark.parametrize("model", [S4, EXT])
def test_liar_never_holds(model):
    for a in model.values:
        assert eval_expr(model, {x0: a}, LIAR) in model.true


def test_derived_sets():
    assert derived_sets(S4) == ({"t", "f", "nec"}, {"imp"})
    assert derived_sets(EXT) == ({"t"}, {"f"})


def test_conditions():
    assert check_condition(S4, "four").ok
    r = check_condition(S4, "e")
    assert not r.ok and r.failures[0] == ("e", "t")
    assert check_condition(EXT, "four").ok
    assert check_condition(EXT, "e").ok
    assert check_condition(S4, "axnec", k=30).ok


@pytest.mark.parametrize("model", [S4, EXT])
def test_model_file_round_trip(model):
    assert parse_model(render_model(model)) == model


def _every_assignment(model, variables):
    for vals in itertools.product(model.values, repeat=len(variables)):
        yield dict(zip(variables, vals))


@pytest.mark.parametrize("model", [S4, EXT])
def test_value_level_identities(model):
    possible, impossible = derived_sets(model)
    gen = Gen(random.Random(1))
    for _ in range(200):
        f = gen.formula(3)
        gamma = random_assignment(gen.rng, model, f)
        v = eval_expr(model, gamma, f)
        assert (v in possible) == holds(model, gamma, dia(f))
        assert (v in impossible) == holds(model, gamma, Box(Not(f)))
        assert (v in model.false) == holds(model, gamma, Not(f))


@pytest.mark.parametrize("model", [S4, EXT])
def test_modus_ponens_preserved(model):
    gen = Gen(random.Random(2))
    for _ in range(300):
        a, b = gen.formula(2), gen.formula(2)
        gamma = random_assignment(gen.rng, model, a, b)
        if holds(model, gamma, a) and holds(model, gamma, Imp(a, b)):
            assert holds(model, gamma, b)


@pytest.mark.parametrize("model", [S4, EXT])
def test_reference_property(model):
    gen = Gen(random.Random(3))
    for _ in range(200):
        a = gen.formula(2)
        b = Imp(a, gen.formula(1))
        assert syn_ref(a, b)
        gamma = random_assignment(gen.rng, model, a, b)
        assert (eval_expr(model, gamma, a), eval_expr(model, gamma, b)) in model.ref


@pytest.mark.parametrize("model, system", [(EXT, "AXE"), (S4, "AX4_AXNEC")])
def test_axioms_hold(model, system):
    gen = Gen(random.Random(f"sound-{system}"))
    for sid in schemas_of(system):
        for _ in range(15):
            f = gen.instance(system, sid)[2]
            for _ in range(5):
                gamma = random_assignment(gen.rng, model, f)
                assert holds(model, gamma, f), (sid, f)


def test_s4_preset_is_not_an_e_model():
    gen = Gen(random.Random(0))
    failures = 0
    for _ in range(40):
        f = gen.instance("AXE", "e")[2]
        failures += not all(holds(S4, g, f) for g in _every_assignment(S4, sorted(
            {PVar(i) for i in f.fvp}, key=lambda v: v.index)[:3]))
    assert failures > 0


@settings(max_examples=300, deadline=None)
@given(formulas, st.randoms(use_true_random=False))
def test_substitution_property_strict(f, rnd):
    gen = Gen(rnd)
    keys = [PVar(i) for i in range(4)] + [JVar(i) for i in range(4)]
    sigma = gen.substitution(keys)
    gamma = {k: rnd.choice(EXT.values if isinstance(k, PVar) else EXT.just) for k in keys}
    shifted = {k: eval_expr(EXT, gamma, sigma(k)) for k in keys}
    assert eval_expr(EXT, gamma, apply(f, sigma)) == eval_expr(EXT, shifted, f)


@settings(max_examples=200, deadline=None)
@given(formulas, st.randoms(use_true_random=False))
def test_alpha_property(f, rnd):
    g = Gen(rnd).alpha_variant(f)
    assert alpha_eq(f, g)
    for model in (EXT, S4):
        gamma = random_assignment(rnd, model, f)
        assert eval_expr(model, gamma, f) == eval_expr(model, gamma, g)


def test_override_mode_substitution_gap(P):
    # substituting can turn a non-axiom into an axiom under the box
    f = Box(x0)
    sigma = Substitution({x0: P("x1 -> x1")})
    gamma = {x1: "t"}
    shifted = {x0: eval_expr(S4, gamma, sigma(x0))}
    assert eval_expr(S4, gamma, apply(f, sigma)) == "nec"
    assert eval_expr(S4, shifted, f) == "f"
