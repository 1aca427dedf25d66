"""Assemblies: block instances wired together through typed joints.

Each added constructor instance gets a private copy of its signature with
fresh type variables, so distinct instances never share variables up front.
Joined instances form components; each component carries one substitution
accumulated from the unifications of its joins (and any creation-time result
annotations, which are baked into the instance's stored signature).  The join
graph is a forest: every male joint is used at most once, every female at
most once, and joins inside one component are rejected before unification is
even attempted, so no cycles can form.

A failed unification is a domain answer, not an error: try_join returns a
result with joined=False and the assembly untouched.  Unjoining removes one
edge and recomputes the two sides from scratch, which provably succeeds
because removing constraints cannot break the remaining unifications.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .textlang import Ads, AdsApply, Hole, TypeExpr, parse_type, print_ads, print_type
from .typesys import (
    ConstructorSig,
    Substitution,
    alpha_normalize,
    apply_subst,
    instantiate,
    rename_sig,
    resolve,
    sig_vars,
    unify,
)
from .forms import TranslationConfig, TypeForm, type_form


class AssemblyError(ValueError):
    pass


class UnknownJoint(AssemblyError):
    pass


class OccupiedJoint(AssemblyError):
    pass


class SameGender(AssemblyError):
    pass


class CycleRejected(AssemblyError):
    pass


class NotJoined(AssemblyError):
    pass


class ArityMismatch(AssemblyError):
    pass


@dataclass(frozen=True, order=True)
class JointRef:
    instance: int
    slot: str  # "male" or "arg0", "arg1", ...

    def __str__(self):
        return f"{self.instance}.{self.slot}"

    @staticmethod
    def parse(text: str) -> "JointRef":
        inst, _, slot = text.partition(".")
        if not inst.isdigit() or not (slot == "male" or (slot.startswith("arg") and slot[3:].isdigit())):
            raise UnknownJoint(f"malformed joint reference {text!r}")
        return JointRef(int(inst), slot)


@dataclass
class _Instance:
    id: int
    cons: str
    sig: ConstructorSig            # fresh-variable copy, annotation applied
    annotation: TypeExpr | None


@dataclass(frozen=True)
class JoinResult:
    joined: bool
    changed: dict  # JointRef -> TypeExpr, current types that moved


@dataclass(frozen=True)
class Unjoinable:
    """Translation verdict: some required join failed to unify."""

    male_type: str
    female_type: str
    at: str  # textual description of the position


class Assembly:
    def __init__(self, config: TranslationConfig):
        self.config = config
        self._instances: dict[int, _Instance] = {}
        self._joins: dict[JointRef, JointRef] = {}
        self._female_taken: dict[JointRef, JointRef] = {}
        self._comp_of: dict[int, int] = {}
        self._comp_subst: dict[int, Substitution] = {}
        self._next_id = 1
        self._next_var = 1

    # -- instances ------------------------------------------------------------

    def add_m_constructor(self, cons: str, result_instance: TypeExpr | str | None = None) -> int:
        if isinstance(result_instance, str):
            result_instance = parse_type(result_instance)
        sig = self.config.table.lookup(cons)
        if result_instance is not None:
            sig = instantiate(sig, result_instance)
        mapping = {v: self._fresh_var() for v in sorted(sig_vars(sig))}
        sig = rename_sig(sig, mapping)
        iid = self._next_id
        self._next_id += 1
        self._instances[iid] = _Instance(iid, cons, sig, result_instance)
        self._comp_of[iid] = iid
        self._comp_subst.setdefault(iid, {})
        return iid

    def _fresh_var(self) -> str:
        name = f"v{self._next_var}"
        self._next_var += 1
        return name

    def instance_ids(self) -> list[int]:
        return sorted(self._instances)

    def instance_cons(self, iid: int) -> str:
        return self._get_instance(iid).cons

    def instance_annotation(self, iid: int) -> TypeExpr | None:
        return self._get_instance(iid).annotation

    def _get_instance(self, iid: int) -> _Instance:
        inst = self._instances.get(iid)
        if inst is None:
            raise UnknownJoint(f"no instance {iid}")
        return inst

    # -- joints -----------------------------------------------------------------

    def joint_refs(self, iid: int | None = None) -> list[JointRef]:
        ids = [iid] if iid is not None else self.instance_ids()
        out = []
        for i in ids:
            inst = self._get_instance(i)
            if inst.sig.result_type is not None:
                out.append(JointRef(i, "male"))
            out.extend(JointRef(i, f"arg{k}") for k in range(len(inst.sig.arg_types)))
        return out

    def joint_gender(self, ref: JointRef) -> str:
        self._general_type(ref)
        return "male" if ref.slot == "male" else "female"

    def _general_type(self, ref: JointRef) -> TypeExpr:
        inst = self._get_instance(ref.instance)
        if ref.slot == "male":
            if inst.sig.result_type is None:
                raise UnknownJoint(f"{inst.cons} instance {ref.instance} has no male joint")
            return inst.sig.result_type
        if ref.slot.startswith("arg"):
            idx = int(ref.slot[3:])
            if idx < len(inst.sig.arg_types):
                return inst.sig.arg_types[idx]
        raise UnknownJoint(f"instance {ref.instance} has no joint {ref.slot!r}")

    def current_type(self, ref: JointRef) -> TypeExpr:
        general = self._general_type(ref)  # validates instance and slot
        subst = self._comp_subst[self._comp_of[ref.instance]]
        return apply_subst(subst, general)

    def joint_type_form(self, ref: JointRef) -> TypeForm:
        return type_form(self.config, self.current_type(ref))

    def joins(self) -> dict[JointRef, JointRef]:
        return dict(self._joins)

    def partner(self, ref: JointRef) -> JointRef | None:
        return self._joins.get(ref) or self._female_taken.get(ref)

    # -- joining ------------------------------------------------------------------

    def try_join(self, male: JointRef, female: JointRef) -> JoinResult:
        mg = self.joint_gender(male)
        fg = self.joint_gender(female)
        if mg != "male" or fg != "female":
            raise SameGender(f"needs one male and one female joint, got {mg} and {fg}")
        if male in self._joins:
            raise OccupiedJoint(f"{male} is already joined")
        if female in self._female_taken:
            raise OccupiedJoint(f"{female} is already joined")
        comp_m = self._comp_of[male.instance]
        comp_f = self._comp_of[female.instance]
        if comp_m == comp_f:
            raise CycleRejected(
                f"{male} and {female} already belong to one connected assembly"
            )
        mgu = unify(self.current_type(male), self.current_type(female))
        if mgu is None:
            return JoinResult(False, {})

        members = [i for i, c in self._comp_of.items() if c in (comp_m, comp_f)]
        before = {r: self.current_type(r) for i in members for r in self.joint_refs(i)}

        merged = dict(self._comp_subst[comp_m])
        merged.update(self._comp_subst[comp_f])
        merged.update(mgu)
        merged = resolve(merged)
        for i in members:
            self._comp_of[i] = comp_m
        self._comp_subst[comp_m] = merged
        if comp_f != comp_m:
            self._comp_subst.pop(comp_f, None)
        self._joins[male] = female
        self._female_taken[female] = male

        changed = {
            r: t for r in before
            if (t := self.current_type(r)) != before[r]
        }
        return JoinResult(True, changed)

    def unjoin(self, male: JointRef) -> JoinResult:
        female = self._joins.get(male)
        if female is None:
            raise NotJoined(f"{male} is not joined")
        old_comp = self._comp_of[male.instance]
        members = [i for i, c in self._comp_of.items() if c == old_comp]
        before = {r: self.current_type(r) for i in members for r in self.joint_refs(i)}

        del self._joins[male]
        del self._female_taken[female]
        self._rebuild_components(members)

        changed = {
            r: t for r in before
            if (t := self.current_type(r)) != before[r]
        }
        return JoinResult(True, changed)

    def _rebuild_components(self, members: list[int]) -> None:
        adjacency: dict[int, set[int]] = {i: set() for i in members}
        edges = [(m, f) for m, f in self._joins.items() if m.instance in adjacency]
        for m, f in edges:
            adjacency[m.instance].add(f.instance)
            adjacency[f.instance].add(m.instance)
        seen: set[int] = set()
        for start in sorted(members):
            if start in seen:
                continue
            comp = []
            stack = [start]
            while stack:
                i = stack.pop()
                if i in seen:
                    continue
                seen.add(i)
                comp.append(i)
                stack.extend(adjacency[i] - seen)
            subst: Substitution = {}
            for m, f in sorted(edges, key=lambda e: e[0]):
                if m.instance in comp:
                    s = unify(self._general_type(m), self._general_type(f), subst)
                    if s is None:
                        raise AssemblyError("remaining joins failed to re-unify (corrupt state)")
                    subst = s
            for i in comp:
                self._comp_of[i] = start
            self._comp_subst[start] = subst
        # drop substitutions for components that no longer exist
        live = set(self._comp_of.values())
        for cid in list(self._comp_subst):
            if cid not in live:
                del self._comp_subst[cid]

    # -- reading back ---------------------------------------------------------------

    def roots(self) -> list[int]:
        out = []
        for iid in self.instance_ids():
            inst = self._instances[iid]
            if inst.sig.result_type is None or JointRef(iid, "male") not in self._joins:
                out.append(iid)
        return out

    def read_back(self) -> list[Ads]:
        comp_roots: dict[int, list[int]] = {}
        for iid in self.roots():
            comp_roots.setdefault(self._comp_of[iid], []).append(iid)
        for comp, rs in comp_roots.items():
            if len(rs) != 1:
                raise AssemblyError(f"component {comp} has several roots {rs}")

        def build(iid: int) -> AdsApply:
            inst = self._instances[iid]
            args = []
            for k in range(len(inst.sig.arg_types)):
                partner = self._female_taken.get(JointRef(iid, f"arg{k}"))
                args.append(build(partner.instance) if partner else Hole())
            return AdsApply(inst.cons, None, tuple(args))

        return [build(i) for i in sorted(self.roots())]

    # -- snapshots ---------------------------------------------------------------------

    def snapshot(self) -> dict:
        joint_types = {
            str(r): print_type(alpha_normalize(self.current_type(r)))
            for r in self.joint_refs()
        }
        return {
            "instances": [
                {
                    "id": i,
                    "cons": self._instances[i].cons,
                    "annotation": print_type(self._instances[i].annotation)
                    if self._instances[i].annotation is not None else None,
                }
                for i in self.instance_ids()
            ],
            "joins": [
                {"male": str(m), "female": str(f)}
                for m, f in sorted(self._joins.items())
            ],
            "jointTypes": dict(sorted(joint_types.items())),
        }


# ---------------------------------------------------------------------------
# structures -> assemblies

def translate_ads(config: TranslationConfig, ads: Ads) -> Assembly | Unjoinable:
    """Compile a structure expression into an assembly, join by join."""
    asm = Assembly(config)
    failure: list[Unjoinable] = []

    def build(node: AdsApply) -> int:
        iid = asm.add_m_constructor(node.cons, node.instance)
        sig = asm._instances[iid].sig
        if len(node.args) != len(sig.arg_types):
            raise ArityMismatch(
                f"{node.cons} takes {len(sig.arg_types)} arguments, got {len(node.args)}"
            )
        for k, arg in enumerate(node.args):
            if isinstance(arg, Hole):
                continue
            child = build(arg)
            if failure:
                return iid
            male = JointRef(child, "male")
            female = JointRef(iid, f"arg{k}")
            mt = print_type(alpha_normalize(asm.current_type(male)))
            ft = print_type(alpha_normalize(asm.current_type(female)))
            outcome = asm.try_join(male, female)
            if not outcome.joined:
                failure.append(Unjoinable(mt, ft, f"{print_ads(arg)} into {node.cons} argument {k}"))
                return iid
        return iid

    if isinstance(ads, Hole):
        return asm
    build(ads)
    if failure:
        return failure[0]
    return asm
