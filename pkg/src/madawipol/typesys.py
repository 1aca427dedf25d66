"""Type signatures, substitutions, unification and structure typing.

Substitutions are plain dicts from variable names to type expressions, kept
idempotent: values never mention a mapped variable.  Unification is standard
first-order Robinson unification with an occurs check; `unify_fresh` renames
both sides apart first, which is the right notion when asking whether two
independently-owned types are compatible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .textlang import (
    Ads,
    AdsApply,
    AdtDefinition,
    Definition,
    FlexDecl,
    Hole,
    TypeApp,
    TypeExpr,
    TypeVar,
)

Substitution = dict[str, TypeExpr]


class TypeSysError(ValueError):
    pass


class UnknownConstructor(TypeSysError):
    pass


class AmbiguousConstructor(TypeSysError):
    pass


class FlexibleDeclarationsDisabled(TypeSysError):
    pass


class NotAnInstance(TypeSysError):
    pass


# ---------------------------------------------------------------------------
# substitutions

def apply_subst(subst: Substitution, t: TypeExpr) -> TypeExpr:
    if isinstance(t, TypeVar):
        found = subst.get(t.name)
        # an identity binding (possible when matching within one variable
        # space) is vacuous and must not be chased
        return t if found is None or found == t else apply_subst(subst, found)
    if t.arg is None:
        return t
    return TypeApp(t.cons, apply_subst(subst, t.arg))


def resolve(subst: Substitution) -> Substitution:
    """Normalize to the idempotent form: no value mentions a mapped variable."""
    return {k: apply_subst(subst, v) for k, v in subst.items()}


def free_vars(t: TypeExpr) -> set[str]:
    if isinstance(t, TypeVar):
        return {t.name}
    return free_vars(t.arg) if t.arg is not None else set()


def occurs_in(name: str, t: TypeExpr) -> bool:
    return name in free_vars(t)


def rename_vars(t: TypeExpr, mapping: dict[str, str]) -> TypeExpr:
    if isinstance(t, TypeVar):
        return TypeVar(mapping.get(t.name, t.name))
    if t.arg is None:
        return t
    return TypeApp(t.cons, rename_vars(t.arg, mapping))


def alpha_normalize(t: TypeExpr) -> TypeExpr:
    """Rename variables to a, b, c, ... in order of first appearance."""
    order: list[str] = []

    def collect(x: TypeExpr):
        if isinstance(x, TypeVar):
            if x.name not in order:
                order.append(x.name)
        elif x.arg is not None:
            collect(x.arg)

    collect(t)
    alphabet = "abcdefghijklmnopqrstuvwxyz"
    mapping = {}
    for i, n in enumerate(order):
        mapping[n] = alphabet[i] if i < len(alphabet) else f"a{i}"
    return rename_vars(t, mapping)


def alpha_equal(t1: TypeExpr, t2: TypeExpr) -> bool:
    return alpha_normalize(t1) == alpha_normalize(t2)


# ---------------------------------------------------------------------------
# unification

def unify(t1: TypeExpr, t2: TypeExpr, subst: Substitution | None = None) -> Substitution | None:
    """Most general unifier extending subst, or None when none exists."""
    s: Substitution = dict(subst) if subst else {}
    stack = [(t1, t2)]
    while stack:
        a, b = stack.pop()
        a, b = apply_subst(s, a), apply_subst(s, b)
        if a == b:
            continue
        if isinstance(a, TypeVar):
            if occurs_in(a.name, b):
                return None
            s[a.name] = b
        elif isinstance(b, TypeVar):
            if occurs_in(b.name, a):
                return None
            s[b.name] = a
        else:
            if a.cons != b.cons:
                return None
            if (a.arg is None) != (b.arg is None):
                return None
            if a.arg is not None:
                stack.append((a.arg, b.arg))
    return resolve(s)


def unify_fresh(t1: TypeExpr, t2: TypeExpr) -> Substitution | None:
    """Unify after renaming the two sides into disjoint variable spaces."""
    left = rename_vars(t1, {v: f"{v}#l" for v in free_vars(t1)})
    right = rename_vars(t2, {v: f"{v}#r" for v in free_vars(t2)})
    return unify(left, right)


def match(pattern: TypeExpr, target: TypeExpr, subst: Substitution | None = None) -> Substitution | None:
    """One-way matching: bind pattern variables only, target is rigid."""
    s: Substitution = dict(subst) if subst else {}
    stack = [(pattern, target)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, TypeVar):
            bound = s.get(p.name)
            if bound is None:
                s[p.name] = t
            elif bound != t:
                return None
            continue
        if isinstance(t, TypeVar) or p.cons != t.cons or (p.arg is None) != (t.arg is None):
            return None
        if p.arg is not None:
            stack.append((p.arg, t.arg))
    return s


# ---------------------------------------------------------------------------
# constructor signatures

@dataclass(frozen=True)
class ConstructorSig:
    name: str
    arg_types: tuple[TypeExpr, ...]
    result_type: TypeExpr | None


class SignatureTable:
    """All constructor signatures of a definition set, indexed by name."""

    def __init__(self, defs: tuple[Definition, ...], allow_flexible: bool = False):
        self.defs = defs
        self.sigs: dict[str, ConstructorSig] = {}
        self.type_cons: dict[str, AdtDefinition] = {}
        for d in defs:
            if isinstance(d, AdtDefinition):
                if d.type_cons in self.type_cons:
                    raise AmbiguousConstructor(f"type constructor {d.type_cons} defined twice")
                self.type_cons[d.type_cons] = d
                result = TypeApp(d.type_cons, TypeVar(d.param) if d.param else None)
                for alt in d.alternatives:
                    self._add(ConstructorSig(alt.name, alt.arg_types, result))
            elif isinstance(d, FlexDecl):
                if not allow_flexible:
                    raise FlexibleDeclarationsDisabled(
                        f"free-standing constructor {d.name} requires allow_flexible"
                    )
                self._add(ConstructorSig(d.name, d.arg_types, d.result_type))
            else:
                raise TypeSysError(f"unknown definition node {d!r}")

    def _add(self, sig: ConstructorSig):
        if sig.name in self.sigs:
            raise AmbiguousConstructor(f"constructor {sig.name} declared twice")
        self.sigs[sig.name] = sig

    def __contains__(self, name: str) -> bool:
        return name in self.sigs

    def lookup(self, name: str) -> ConstructorSig:
        sig = self.sigs.get(name)
        if sig is None:
            raise UnknownConstructor(f"constructor {name} is not defined")
        return sig

    def constructor_names(self) -> tuple[str, ...]:
        return tuple(self.sigs)


def constructor_sig(defs: tuple[Definition, ...], name: str, allow_flexible: bool = True) -> ConstructorSig:
    return SignatureTable(defs, allow_flexible=allow_flexible).lookup(name)


def sig_vars(sig: ConstructorSig) -> set[str]:
    vs: set[str] = set()
    for t in sig.arg_types:
        vs |= free_vars(t)
    if sig.result_type is not None:
        vs |= free_vars(sig.result_type)
    return vs


def rename_sig(sig: ConstructorSig, mapping: dict[str, str]) -> ConstructorSig:
    return ConstructorSig(
        sig.name,
        tuple(rename_vars(t, mapping) for t in sig.arg_types),
        rename_vars(sig.result_type, mapping) if sig.result_type is not None else None,
    )


def instantiate(sig: ConstructorSig, result_instance: TypeExpr) -> ConstructorSig:
    """Specialize a signature so its result type becomes the given instance.

    The instance's own variables stay rigid; only the signature's variables
    may be bound, so the instance really must be an instance.
    """
    if sig.result_type is None:
        raise NotAnInstance(f"constructor {sig.name} has no result type to instantiate")
    fresh = {v: f"{v}#s" for v in sig_vars(sig)}
    renamed = rename_sig(sig, fresh)
    s = match(renamed.result_type, result_instance)
    if s is None:
        raise NotAnInstance(
            f"{sig.name} cannot produce the annotated result type"
        )
    return ConstructorSig(
        sig.name,
        tuple(apply_subst(s, t) for t in renamed.arg_types),
        apply_subst(s, renamed.result_type),
    )


# ---------------------------------------------------------------------------
# typing structures

def infer_ads_type(table: SignatureTable, ads: Ads) -> TypeExpr | None:
    """Principal type of a structure expression, or None if ill-typed.

    Holes behave as fresh variables.  Applying a result-less constructor
    yields a fresh variable, so its arguments are still checked.
    """
    counter = itertools.count(1)
    subst: Substitution = {}

    def fresh() -> TypeVar:
        return TypeVar(f"t{next(counter)}")

    def walk(node: Ads) -> TypeExpr | None:
        nonlocal subst
        if isinstance(node, Hole):
            return fresh()
        sig = table.lookup(node.cons)
        if node.instance is not None:
            sig = instantiate(sig, node.instance)
        mapping = {v: f"{v}!{next(counter)}" for v in sig_vars(sig)}
        sig = rename_sig(sig, mapping)
        if len(node.args) != len(sig.arg_types):
            return None
        for arg, expected in zip(node.args, sig.arg_types):
            got = walk(arg)
            if got is None:
                return None
            s = unify(apply_subst(subst, expected), apply_subst(subst, got), subst)
            if s is None:
                return None
            subst = s
        return sig.result_type if sig.result_type is not None else fresh()

    result = walk(ads)
    if result is None:
        return None
    return apply_subst(subst, result)
