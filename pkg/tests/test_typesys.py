"""First-order unification, signature instantiation and structure typing.

Unifiers are checked against their defining property (applying one makes the
two sides syntactically equal) plus a ground-witness oracle: a successful
unification must also ground out to a concrete common instance, and a failed
one must have no common instance over an enumerated ground universe.
"""
import itertools

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from madawipol.textlang import TypeApp, TypeVar, parse_ads, parse_adt_defs, parse_type
from madawipol.typesys import (
    FlexibleDeclarationsDisabled,
    NotAnInstance,
    SignatureTable,
    UnknownConstructor,
    alpha_equal,
    alpha_normalize,
    apply_subst,
    free_vars,
    infer_ads_type,
    instantiate,
    match,
    occurs_in,
    rename_vars,
    resolve,
    unify,
    unify_fresh,
)
from madawipol.forms import STANDARD_DEFINITIONS_TEXT

DEFS = parse_adt_defs(STANDARD_DEFINITIONS_TEXT)
TABLE = SignatureTable(DEFS, allow_flexible=True)

T = parse_type


def small_types():
    leaves = st.sampled_from([
        TypeVar("a"), TypeVar("b"), TypeVar("c"),
        TypeApp("Bool"), TypeApp("Colour"), TypeApp("WeekendDay"),
    ])
    return st.recursive(
        leaves,
        lambda inner: st.builds(TypeApp, st.sampled_from(["List", "Pair"]), inner),
        max_leaves=5,
    )


GROUND_UNIVERSE = [
    T("Bool"), T("Colour"), T("WeekendDay"),
    T("List Bool"), T("List Colour"), T("Pair Bool"),
    T("List (List Bool)"),
]


def ground_instances(t):
    """All groundings of t with variables drawn from GROUND_UNIVERSE."""
    vs = sorted(free_vars(t))
    for combo in itertools.product(GROUND_UNIVERSE, repeat=len(vs)):
        yield apply_subst(dict(zip(vs, combo)), t)


# -- unify ---------------------------------------------------------------------------

@given(small_types(), small_types())
@settings(max_examples=400)
def test_unifier_equates_both_sides(t1, t2):
    s = unify(t1, t2)
    if s is not None:
        r = resolve(s)
        assert apply_subst(r, t1) == apply_subst(r, t2)
        # idempotence of the resolved form
        for v in r.values():
            assert not any(occurs_in(k, v) for k in r)


@given(small_types(), small_types())
@settings(max_examples=400)
def test_unify_is_symmetric_in_solvability(t1, t2):
    assert (unify(t1, t2) is None) == (unify(t2, t1) is None)


@given(small_types(), small_types())
@settings(max_examples=150, deadline=None)
def test_unify_matches_ground_witness_oracle(t1, t2):
    s = unify(t1, t2)
    if s is not None:
        # a most general unifier grounds out to a concrete common instance
        r = resolve(s)
        u1, u2 = apply_subst(r, t1), apply_subst(r, t2)
        g = {v: TypeApp("Bool") for v in free_vars(u1) | free_vars(u2)}
        assert apply_subst(g, u1) == apply_subst(g, u2)
    elif len(free_vars(t1) | free_vars(t2)) <= 2:
        # no unifier: then no grounding over the universe can equate them
        vs = sorted(free_vars(t1) | free_vars(t2))
        for combo in itertools.product(GROUND_UNIVERSE, repeat=len(vs)):
            gsub = dict(zip(vs, combo))
            assert apply_subst(gsub, t1) != apply_subst(gsub, t2)


def test_occurs_check():
    assert unify(T("a"), T("List a")) is None
    assert unify(T("List a"), T("a")) is None
    assert unify(T("a"), T("a")) == {}


def test_unify_extends_existing_substitution():
    s = unify(T("a"), T("Bool"))
    assert s == {"a": TypeApp("Bool")}
    assert unify(T("a"), T("Colour"), s) is None
    s2 = unify(T("List b"), T("List a"), s)
    assert s2 is not None
    assert apply_subst(resolve(s2), T("b")) == TypeApp("Bool")


def test_unify_fresh_separates_variable_spaces():
    # identical variable names on both sides must not be conflated
    assert unify(T("a"), T("List a")) is None
    assert unify_fresh(T("a"), T("List a")) is not None
    assert unify_fresh(T("List a"), T("List (List a)")) is not None
    assert unify_fresh(T("List (List a)"), T("List Bool")) is None
    assert unify_fresh(T("List (List Bool)"), T("List (List Colour)")) is None


# -- match ---------------------------------------------------------------------------

def subst_once(s, t):
    """Simultaneous one-pass substitution: the reference application for
    one-way match results, whose images live in the target's variable space."""
    if isinstance(t, TypeVar):
        return s.get(t.name, t)
    if t.arg is None:
        return t
    return TypeApp(t.cons, subst_once(s, t.arg))


@given(small_types(), small_types())
@settings(max_examples=300)
def test_match_applies_to_equality_and_is_one_way(pattern, target):
    s = match(pattern, target)
    if s is not None:
        assert subst_once(s, pattern) == target
        # a successful match witnesses unifiability of the freshened sides
        assert unify_fresh(pattern, target) is not None
    if unify_fresh(pattern, target) is None:
        assert s is None


def test_match_leaves_target_variables_rigid():
    assert match(T("List a"), T("List Bool")) == {"a": TypeApp("Bool")}
    assert match(T("List Bool"), T("List a")) is None
    assert match(T("Bool"), T("Bool")) == {}


# -- alpha normalization -------------------------------------------------------------

def test_alpha_normalize_orders_by_first_appearance():
    t = parse_type("Pair (List q)")
    assert alpha_normalize(t) == parse_type("Pair (List a)")
    assert alpha_equal(T("List x'"), T("List b"))
    assert not alpha_equal(T("List a"), T("List Bool"))


@given(small_types())
@settings(max_examples=200)
def test_alpha_normalize_is_idempotent(t):
    n = alpha_normalize(t)
    assert alpha_normalize(n) == n
    # renaming through any bijection does not change the normal form
    ren = {v: v + "'" for v in free_vars(t)}
    assert alpha_normalize(rename_vars(t, ren)) == n


# -- signatures ----------------------------------------------------------------------

def test_signature_table_standard_library():
    cons = TABLE.lookup("Cons")
    assert cons.arg_types == (T("a"), T("List a"))
    assert cons.result_type == T("List a")
    assert TABLE.lookup("Nil").arg_types == ()
    flexi = TABLE.lookup("FlexiCons")
    assert flexi.result_type == T("a") and flexi.arg_types == (T("a"),)
    fem = TABLE.lookup("SimpleFemCons")
    assert fem.result_type is None and fem.arg_types == (T("Colour"),)
    with pytest.raises(UnknownConstructor):
        TABLE.lookup("Tree")


def test_flexible_declarations_require_opt_in():
    with pytest.raises(FlexibleDeclarationsDisabled):
        SignatureTable(DEFS, allow_flexible=False)
    strict = SignatureTable(parse_adt_defs("::Bool = True | False"))
    assert strict.lookup("True").result_type == T("Bool")


def test_instantiate_specializes_argument_types():
    got = instantiate(TABLE.lookup("Cons"), T("List (List a)"))
    assert got.arg_types == (T("List a"), T("List (List a)"))
    assert got.result_type == T("List (List a)")


def test_instantiate_keeps_instance_variables_rigid():
    # the annotation's own variable must not be bound to make the match work
    got = instantiate(TABLE.lookup("FlexiCons"), T("List q"))
    assert got.arg_types == (T("List q"),)


def test_instantiate_rejects_non_instances():
    with pytest.raises(NotAnInstance):
        instantiate(TABLE.lookup("Cons"), T("Bool"))
    with pytest.raises(NotAnInstance):
        instantiate(TABLE.lookup("SimpleFemCons"), T("Colour"))


# -- structure typing ----------------------------------------------------------------

@pytest.mark.parametrize("text,expected", [
    ("True", "Bool"),
    ("Nil", "List a"),
    ("Cons True Nil", "List Bool"),
    ("Cons True (Cons False Nil)", "List Bool"),
    ("Cons _ (Cons True Nil)", "List Bool"),
    ("Cons _ Nil", "List a"),
    ("Cons Nil Nil", "List (List a)"),
    ("MkPair Red Red", "Pair Colour"),
    ("Cons:[List Bool] _ _", "List Bool"),
    ("Cons (Cons Red _) (Cons (Cons _ _) _)", "List (List Colour)"),
    ("FlexiCons Red", "Colour"),
    ("PolyCons Sat", "SimpleType WeekendDay"),
])
def test_inference_on_known_structures(text, expected):
    got = infer_ads_type(TABLE, parse_ads(text))
    assert got is not None
    assert alpha_equal(got, T(expected)), (got, expected)


@pytest.mark.parametrize("text", [
    "Cons Sat (Cons True Nil)",   # element types disagree
    "Cons True (Cons Red Nil)",
    "Cons True True",             # tail is not a list
    "MkPair Red True",            # both components must share one type
    "Cons True",                  # missing argument
    "True Nil",                   # extra argument
    "Cons Nil (Cons True Nil)",
])
def test_inference_rejects_ill_typed_structures(text):
    assert infer_ads_type(TABLE, parse_ads(text)) is None


def test_inference_propagates_annotation_errors():
    with pytest.raises(NotAnInstance):
        infer_ads_type(TABLE, parse_ads("True:[Colour]"))
    with pytest.raises(UnknownConstructor):
        infer_ads_type(TABLE, parse_ads("Cons Missing Nil"))


def test_result_less_constructor_checks_arguments():
    assert infer_ads_type(TABLE, parse_ads("SimpleFemCons Red")) is not None
    assert infer_ads_type(TABLE, parse_ads("SimpleFemCons True")) is None
    assert infer_ads_type(TABLE, parse_ads("SimplePairCons Red True")) is None
    assert infer_ads_type(TABLE, parse_ads("SimplePairCons Red Blue")) is not None


# independent generator: build a structure top-down from a target ground type,
# so well-typedness is guaranteed by construction; restricted to plain ADT
# constructors, whose result types determine every argument type
GEN_TABLE = SignatureTable(tuple(d for d in DEFS if hasattr(d, "type_cons")))


@st.composite
def structures_of_type(draw, depth=3):
    target = draw(st.sampled_from(GROUND_UNIVERSE))

    def build(t, fuel):
        zero, with_args = [], []
        for name in GEN_TABLE.constructor_names():
            sig = GEN_TABLE.lookup(name)
            ren = {v: f"{v}@g" for v in free_vars(sig.result_type)}
            s = match(rename_vars(sig.result_type, ren), t)
            if s is None:
                continue
            args = [apply_subst(s, rename_vars(a, ren)) for a in sig.arg_types]
            (with_args if args else zero).append((name, args))
        pool = zero if (fuel <= 0 and zero) else sorted(zero + with_args)
        name, args = draw(st.sampled_from(pool))
        parts = [build(a, fuel - 1) for a in args]
        parts = [f"({p})" if " " in p else p for p in parts]
        return " ".join([name] + parts)

    return build(target, depth), target


@given(structures_of_type())
@settings(max_examples=150, deadline=None)
def test_inference_accepts_generated_structures(pair):
    text, target = pair
    principal = infer_ads_type(TABLE, parse_ads(text))
    assert principal is not None
    # the principal type generalizes the construction target
    assert match(principal, target) is not None, (text, principal, target)
