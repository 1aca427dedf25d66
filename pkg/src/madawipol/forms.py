"""Geometric forms for type constructors, and the compilation of types to forms.

The shape library lives inside an alignment square: a side-1.0 frame of
thickness 0.05 shared by every joint.  Each type constructor is a square ring
(outer side 0.86, thickness 0.05) carrying four inward teeth chosen from
eight fixed slots, two per side; distinct constructors use distinct slot
sets, so no constructor's ring fits through another's gaps.  A parameterized
constructor additionally owns a polymorphic subspace: a membrane region (the
side-0.63 square) and the linear map (uniform 0.70) that places an argument's
form onto that membrane.

A type maps to a form by structural recursion: the constructor's own rigid
ring, unioned with the transformed rigid part of the argument's form, while
the polymorphic subspace is the transformed subspace of the argument.  A bare
type variable is all membrane and no rigid.

Male joints extrude a form up from the face plane; female joints carve it
into the block.  A male fits a female exactly when the male's rigid part sits
inside the female's bottom region: the female's rigid holes plus her membrane
shrunk by the fit clearance (the membrane's edge hangs on a skirt and cannot
reach the bottom).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

from .geometry import (
    LinearTransform2D,
    Point,
    Prism3D,
    Region2D,
    compose_transforms,
    difference,
    erode,
    intersection,
    invert_transform,
    region_contains,
    transform_region,
    union,
)
from .textlang import (
    AdtDefinition,
    Definition,
    FlexDecl,
    TypeApp,
    TypeExpr,
    TypeVar,
    parse_adt_defs,
    print_definition,
    print_type,
)
from .typesys import SignatureTable, alpha_normalize


class FormsError(ValueError):
    pass


class UnmappedTypeConstructor(FormsError):
    pass


class NotALibraryForm(FormsError):
    pass


class InvalidConfig(FormsError):
    pass


# ---------------------------------------------------------------------------
# data model

@dataclass(frozen=True)
class AlignmentSquare:
    outer_side: Fraction = Fraction(1)
    frame_thickness: Fraction = Fraction(1, 20)

    @cached_property
    def region(self) -> Region2D:
        h = self.outer_side / 2
        return difference(Region2D.square(h), Region2D.square(h - self.frame_thickness))

    @cached_property
    def interior(self) -> Region2D:
        return Region2D.square(self.outer_side / 2 - self.frame_thickness)

    @cached_property
    def outer_box(self) -> Region2D:
        return Region2D.square(self.outer_side / 2)


@dataclass(frozen=True)
class PolySubspace:
    surface: Region2D
    arg_transform: LinearTransform2D


@dataclass(frozen=True)
class TypeConsForm:
    rigid: Region2D
    poly: PolySubspace | None


@dataclass(frozen=True)
class TypeForm:
    rigid: Region2D
    poly: PolySubspace | None


@dataclass(frozen=True)
class Placement:
    position: tuple[Fraction, Fraction, Fraction]
    orientation: tuple[float, float, float, float]  # unit quaternion (w, x, y, z)


@dataclass
class TranslationConfig:
    definitions: tuple[Definition, ...]
    alignment: AlignmentSquare
    v_joint_size: Fraction
    type_cons_forms: dict[str, TypeConsForm]
    block_bodies: dict[str, tuple[Prism3D, ...]]
    arg_placements: dict[str, tuple[Placement, ...]]
    result_placements: dict[str, Placement | None]
    allow_flexible: bool = False
    _form_cache: dict[TypeExpr, TypeForm] = field(default_factory=dict, repr=False, compare=False)

    @cached_property
    def table(self) -> SignatureTable:
        return SignatureTable(self.definitions, allow_flexible=self.allow_flexible)

    @property
    def fit_clearance(self) -> Fraction:
        return self.alignment.outer_side / 1000

    @cached_property
    def var_surface(self) -> Region2D:
        return self.alignment.interior

    @cached_property
    def var_form(self) -> TypeForm:
        return TypeForm(Region2D.empty(), PolySubspace(self.var_surface, LinearTransform2D.identity()))


# ---------------------------------------------------------------------------
# the default shape library

_RING_OUTER = Fraction(43, 100)   # half-extent of the constructor ring
_RING_INNER = Fraction(38, 100)
_TOOTH_TIP = Fraction(33, 100)    # teeth reach inward to this half-extent
_TOOTH_HALF_WIDTH = Fraction(3, 100)
_SLOT_OFFSET = Fraction(1, 5)
_ARG_SCALE = Fraction(7, 10)
_SURFACE_HALF = Fraction(63, 200)  # 0.315 = 0.70 * 0.45


def _tooth_region(slot: int) -> Region2D:
    """Slots 0..7 clockwise from the top-left: two per side of the ring."""
    side, k = divmod(slot, 2)
    c = -_SLOT_OFFSET if k == 0 else _SLOT_OFFSET
    lo, hi = c - _TOOTH_HALF_WIDTH, c + _TOOTH_HALF_WIDTH
    if side == 0:   # top edge, teeth point down
        return Region2D.box(lo, _TOOTH_TIP, hi, _RING_INNER)
    if side == 1:   # right edge
        return Region2D.box(_TOOTH_TIP, lo, _RING_INNER, hi)
    if side == 2:   # bottom edge
        return Region2D.box(lo, -_RING_INNER, hi, -_TOOTH_TIP)
    return Region2D.box(-_RING_INNER, lo, -_TOOTH_TIP, hi)


def constructor_ring(slots: tuple[int, ...]) -> Region2D:
    ring = difference(Region2D.square(_RING_OUTER), Region2D.square(_RING_INNER))
    for s in slots:
        ring = union(ring, _tooth_region(s))
    return ring


def _slot_assignment(type_cons_names: list[str]) -> dict[str, tuple[int, ...]]:
    combos = list(itertools.combinations(range(8), 4))
    if len(type_cons_names) > len(combos):
        raise InvalidConfig(f"shape library supports at most {len(combos)} type constructors")
    return {name: combo for name, combo in zip(sorted(type_cons_names), combos)}


STANDARD_DEFINITIONS_TEXT = """\
::WeekendDay = Sat | Sun
::Bool = True | False
::Colour = Red | Blue | Green
::List a = Cons a (List a) | Nil
::Pair a = MkPair a a
::SimpleType a = PolyCons a
FlexiCons: a <- a
SimpleFemCons: <- Colour
SimplePairCons: <- a a
"""


def build_library_config(definitions: tuple[Definition, ...], allow_flexible: bool = False) -> TranslationConfig:
    """Generate the full default-library config for a definition set."""
    table = SignatureTable(definitions, allow_flexible=allow_flexible)
    adts = [d for d in definitions if isinstance(d, AdtDefinition)]
    slots = _slot_assignment([d.type_cons for d in adts])
    scale = LinearTransform2D.scaling(_ARG_SCALE)
    forms: dict[str, TypeConsForm] = {}
    for d in adts:
        poly = None
        if d.param is not None:
            poly = PolySubspace(Region2D.square(_SURFACE_HALF), scale)
        forms[d.type_cons] = TypeConsForm(constructor_ring(slots[d.type_cons]), poly)

    bodies: dict[str, tuple[Prism3D, ...]] = {}
    args: dict[str, tuple[Placement, ...]] = {}
    results: dict[str, Placement | None] = {}
    half = Fraction(7, 10)
    for name in table.constructor_names():
        sig = table.lookup(name)
        bodies[name] = (Prism3D(Region2D.square(half), Fraction(-1, 5), Fraction(1, 5)),)
        n = len(sig.arg_types)
        placements = []
        for i in range(n):
            zoff = Fraction(i, 2) - Fraction(n - 1, 4)
            placements.append(Placement((half, Fraction(0), zoff), _QUAT_PLUS_X))
        args[name] = tuple(placements)
        results[name] = Placement((-half, Fraction(0), Fraction(0)), _QUAT_MINUS_X) \
            if sig.result_type is not None else None

    return TranslationConfig(
        definitions=definitions,
        alignment=AlignmentSquare(),
        v_joint_size=Fraction(1, 4),
        type_cons_forms=forms,
        block_bodies=bodies,
        arg_placements=args,
        result_placements=results,
        allow_flexible=allow_flexible,
    )


_SQRT_HALF = 0.7071067811865476
_QUAT_PLUS_X = (_SQRT_HALF, 0.0, _SQRT_HALF, 0.0)    # local +z to world +x
_QUAT_MINUS_X = (_SQRT_HALF, 0.0, -_SQRT_HALF, 0.0)  # local +z to world -x


def default_config() -> TranslationConfig:
    return build_library_config(parse_adt_defs(STANDARD_DEFINITIONS_TEXT), allow_flexible=True)


# ---------------------------------------------------------------------------
# types -> forms

def type_form(config: TranslationConfig, t: TypeExpr) -> TypeForm:
    key = alpha_normalize(t)
    cached = config._form_cache.get(key)
    if cached is not None:
        return cached
    form = _type_form_uncached(config, key)
    config._form_cache[key] = form
    return form


def _type_form_uncached(config: TranslationConfig, t: TypeExpr) -> TypeForm:
    if isinstance(t, TypeVar):
        return config.var_form
    cf = config.type_cons_forms.get(t.cons)
    if cf is None:
        raise UnmappedTypeConstructor(f"no form mapped for type constructor {t.cons}")
    if t.arg is None or isinstance(t.arg, TypeVar):
        return TypeForm(cf.rigid, cf.poly)
    if cf.poly is None:
        raise FormsError(f"{t.cons} takes no type argument but {print_type(t)} applies one")
    inner = type_form(config, t.arg)
    a = cf.poly.arg_transform
    rigid = union(cf.rigid, transform_region(a, inner.rigid))
    poly = None
    if inner.poly is not None:
        poly = PolySubspace(
            transform_region(a, inner.poly.surface),
            compose_transforms(a, inner.poly.arg_transform),
        )
    return TypeForm(rigid, poly)


def female_bottom_region(config: TranslationConfig, form: TypeForm) -> Region2D:
    """Everything a male's rigid part may occupy when fully seated."""
    if form.poly is None:
        return form.rigid
    reachable = erode(form.poly.surface, config.fit_clearance)
    return union(form.rigid, reachable)


def male_fits_female(config: TranslationConfig, male: TypeForm, female: TypeForm) -> bool:
    return region_contains(female_bottom_region(config, female), male.rigid)


# ---------------------------------------------------------------------------
# forms -> types (inverse direction)

def form_to_type(config: TranslationConfig, form: TypeForm) -> TypeExpr:
    """Recover the type a form was compiled from, up to variable naming."""
    return _form_to_type(config, form.rigid, form.poly, depth=0)


def _form_to_type(config: TranslationConfig, rigid: Region2D, poly: PolySubspace | None, depth: int) -> TypeExpr:
    if depth > 64:
        raise NotALibraryForm("nesting too deep to be a library form")
    if poly is not None and rigid.is_empty():
        if poly.surface == config.var_surface and poly.arg_transform == LinearTransform2D.identity():
            return TypeVar("a")
        raise NotALibraryForm("membrane-only form is not the bare-variable form")
    for name in sorted(config.type_cons_forms):
        cf = config.type_cons_forms[name]
        if cf.rigid.is_empty() or not region_contains(rigid, cf.rigid):
            continue
        rest = difference(rigid, cf.rigid)
        if cf.poly is None:
            if rest.is_empty() and poly is None:
                return TypeApp(name, None)
            continue
        inv = invert_transform(cf.poly.arg_transform)
        inner_rigid = transform_region(inv, rest)
        inner_poly = None
        if poly is not None:
            inner_poly = PolySubspace(
                transform_region(inv, poly.surface),
                compose_transforms(inv, poly.arg_transform),
            )
        try:
            inner = _form_to_type(config, inner_rigid, inner_poly, depth + 1)
        except NotALibraryForm:
            continue
        return TypeApp(name, inner)
    raise NotALibraryForm("no library constructor matches the outermost rigid shell")


# ---------------------------------------------------------------------------
# 3D joints

@dataclass(frozen=True)
class JointForm3D:
    gender: str                       # "male" | "female"
    rigid_solid: tuple[Prism3D, ...]
    poly_surface: Region2D | None     # membrane region at rest
    surface_height: Fraction | None   # z of the membrane at rest
    skirt: Prism3D | None             # female membranes hang from this wall
    v_joint_size: Fraction


def male_joint_form(config: TranslationConfig, form: TypeForm) -> JointForm3D:
    v = config.v_joint_size
    cap = config.alignment.frame_thickness
    cross = union(config.alignment.region, form.rigid)
    prisms = [Prism3D(cross, Fraction(0), v), Prism3D(config.alignment.outer_box, v, v + cap)]
    surface = form.poly.surface if form.poly is not None else None
    return JointForm3D(
        gender="male",
        rigid_solid=tuple(prisms),
        poly_surface=surface,
        surface_height=v / 2 if surface is not None else None,
        skirt=None,
        v_joint_size=v,
    )


def female_joint_form(config: TranslationConfig, form: TypeForm) -> JointForm3D:
    v = config.v_joint_size
    cap = config.alignment.frame_thickness
    u = union(config.alignment.region, form.rigid)
    surface = None
    skirt = None
    if form.poly is not None:
        surface = form.poly.surface
        u = union(u, surface)
        band = difference(surface, erode(surface, config.fit_clearance))
        if not band.is_empty():
            skirt = Prism3D(band, -v, -v / 2)
    cavity_walls = difference(config.alignment.outer_box, u)
    prisms = []
    if not cavity_walls.is_empty():
        prisms.append(Prism3D(cavity_walls, -v, Fraction(0)))
    prisms.append(Prism3D(config.alignment.outer_box, -v - cap, -v))
    return JointForm3D(
        gender="female",
        rigid_solid=tuple(prisms),
        poly_surface=surface,
        surface_height=-v / 2 if surface is not None else None,
        skirt=skirt,
        v_joint_size=v,
    )


def joint_form(config: TranslationConfig, t: TypeExpr, gender: str) -> JointForm3D:
    form = type_form(config, t)
    if gender == "male":
        return male_joint_form(config, form)
    if gender == "female":
        return female_joint_form(config, form)
    raise FormsError(f"unknown joint gender {gender!r}")


# ---------------------------------------------------------------------------
# config validation

@dataclass(frozen=True)
class Violation:
    kind: str
    subject: str
    detail: str

    def __str__(self):
        return f"[{self.kind}] {self.subject}: {self.detail}"


def _convex_hull(points: list[Point]) -> list[Point]:
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(iterable):
        out: list[Point] = []
        for p in iterable:
            while len(out) >= 2:
                (ox, oy), (ax, ay) = out[-2], out[-1]
                if (ax - ox) * (p[1] - oy) - (ay - oy) * (p[0] - ox) <= 0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower, upper = half(pts), half(reversed(pts))
    return lower[:-1] + upper[:-1]


def _hull_contains(hull: list[Point], p: Point) -> bool:
    n = len(hull)
    if n == 0:
        return False
    if n == 1:
        return hull[0] == p
    if n == 2:
        (ax, ay), (bx, by) = hull
        cross = (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax)
        return cross == 0 and min(ax, bx) <= p[0] <= max(ax, bx) and min(ay, by) <= p[1] <= max(ay, by)
    for (ax, ay), (bx, by) in zip(hull, hull[1:] + hull[:1]):
        if (bx - ax) * (p[1] - ay) - (by - ay) * (p[0] - ax) < 0:
            return False
    return True


def validate_config(config: TranslationConfig) -> list[Violation]:
    out: list[Violation] = []
    al = config.alignment
    if not (0 < al.frame_thickness < al.outer_side / 4):
        out.append(Violation("alignment", "alignmentSquare",
                             f"frame thickness {al.frame_thickness} outside (0, {al.outer_side}/4)"))
    if config.v_joint_size <= 0:
        out.append(Violation("joint-size", "vJointSize", "must be positive"))

    try:
        table = config.table
    except Exception as e:
        out.append(Violation("definitions", "adtdSet", str(e)))
        return out

    adts = {d.type_cons: d for d in config.definitions if isinstance(d, AdtDefinition)}
    for name in adts:
        if name not in config.type_cons_forms:
            out.append(Violation("mapping", name, "type constructor has no form"))
    for name in config.type_cons_forms:
        if name not in adts:
            out.append(Violation("mapping", name, "form mapped for unknown type constructor"))

    for name in table.constructor_names():
        sig = table.lookup(name)
        if name not in config.block_bodies:
            out.append(Violation("mapping", name, "constructor has no block body"))
        placements = config.arg_placements.get(name)
        if placements is None or len(placements) != len(sig.arg_types):
            out.append(Violation("mapping", name,
                                 f"needs {len(sig.arg_types)} argument placements"))
        result = config.result_placements.get(name)
        if (sig.result_type is not None) != (result is not None):
            out.append(Violation("mapping", name, "result placement must match result type presence"))
        for pl in list(placements or ()) + ([result] if result else []):
            norm2 = sum(c * c for c in pl.orientation)
            if abs(norm2 - 1.0) > 1e-9:
                out.append(Violation("placement", name, f"orientation {pl.orientation} is not unit length"))

    interior = al.interior
    for name, cf in sorted(config.type_cons_forms.items()):
        d = adts.get(name)
        if d is None:
            continue
        if not region_contains(interior, cf.rigid):
            out.append(Violation("form", name, "rigid part leaves the frame interior"))
        if (d.param is not None) != (cf.poly is not None):
            out.append(Violation("form", name, "polymorphic subspace presence must match the type parameter"))
        if cf.poly is not None:
            if not intersection(cf.rigid, cf.poly.surface).is_empty():
                out.append(Violation("form", name, "rigid part overlaps the polymorphic surface"))
            if not region_contains(interior, cf.poly.surface):
                out.append(Violation("form", name, "polymorphic surface leaves the frame interior"))
            t = cf.poly.arg_transform
            if t.determinant() == 0:
                out.append(Violation("form", name, "argTransform is singular"))
            elif not t.is_axis_preserving():
                out.append(Violation("form", name, "argTransform must stay axis-aligned"))
            else:
                hull = _convex_hull([p for ring in cf.poly.surface.rings for p in ring])
                h = al.outer_side / 2 - al.frame_thickness
                corners = [(x, y) for x in (-h, h) for y in (-h, h)]
                for corner in corners:
                    if not _hull_contains(hull, t.apply_point(corner)):
                        out.append(Violation("form", name,
                                             "argTransform image of the frame interior leaves the surface hull"))
                        break

    names = sorted(n for n in config.type_cons_forms if n in adts)
    for first in names:
        for second in names:
            if first == second:
                continue
            f1 = TypeForm(config.type_cons_forms[first].rigid, config.type_cons_forms[first].poly)
            f2 = TypeForm(config.type_cons_forms[second].rigid, config.type_cons_forms[second].poly)
            if male_fits_female(config, f1, f2):
                out.append(Violation("mutual-fit", f"{first}->{second}",
                                     f"{first}'s rigid part fits {second}'s female bottom region"))
    return out


# ---------------------------------------------------------------------------
# JSON round trip

def _rings_to_json(region: Region2D) -> list:
    return [[[str(x), str(y)] for x, y in ring] for ring in region.rings]


def _rings_from_json(data) -> Region2D:
    return Region2D.from_rings(
        [tuple((Fraction(x), Fraction(y)) for x, y in ring) for ring in data]
    )


def _transform_to_json(t: LinearTransform2D) -> list:
    return [[str(t.a), str(t.b)], [str(t.c), str(t.d)]]


def _transform_from_json(data) -> LinearTransform2D:
    return LinearTransform2D.of(data[0][0], data[0][1], data[1][0], data[1][1])


def _placement_to_json(p: Placement | None):
    if p is None:
        return None
    return {
        "position": [str(c) for c in p.position],
        "orientation": list(p.orientation),
    }


def _placement_from_json(data) -> Placement | None:
    if data is None:
        return None
    return Placement(
        tuple(Fraction(c) for c in data["position"]),
        tuple(float(c) for c in data["orientation"]),
    )


def config_to_json(config: TranslationConfig) -> dict:
    return {
        "adtdSet": [print_definition(d) for d in config.definitions],
        "allowFlexible": config.allow_flexible,
        "alignmentSquare": {
            "outerSide": str(config.alignment.outer_side),
            "frameThickness": str(config.alignment.frame_thickness),
        },
        "vJointSize": str(config.v_joint_size),
        "typeConsMapping": {
            name: {
                "rigid": _rings_to_json(cf.rigid),
                "polySurface": _rings_to_json(cf.poly.surface) if cf.poly else None,
                "argTransform": _transform_to_json(cf.poly.arg_transform) if cf.poly else None,
            }
            for name, cf in sorted(config.type_cons_forms.items())
        },
        "blockMapping": {
            name: [
                {
                    "crossSection": _rings_to_json(p.cross_section),
                    "zLow": str(p.z_low),
                    "zHigh": str(p.z_high),
                }
                for p in prisms
            ]
            for name, prisms in sorted(config.block_bodies.items())
        },
        "argLocationMapping": {
            name: [_placement_to_json(p) for p in placements]
            for name, placements in sorted(config.arg_placements.items())
        },
        "resultLocationMapping": {
            name: _placement_to_json(p)
            for name, p in sorted(config.result_placements.items())
        },
    }


def config_from_json(data: dict) -> TranslationConfig:
    try:
        definitions = parse_adt_defs("\n".join(data["adtdSet"]))
        alignment = AlignmentSquare(
            Fraction(data["alignmentSquare"]["outerSide"]),
            Fraction(data["alignmentSquare"]["frameThickness"]),
        )
        forms = {}
        for name, entry in data["typeConsMapping"].items():
            poly = None
            if entry.get("polySurface") is not None:
                poly = PolySubspace(
                    _rings_from_json(entry["polySurface"]),
                    _transform_from_json(entry["argTransform"]),
                )
            forms[name] = TypeConsForm(_rings_from_json(entry["rigid"]), poly)
        bodies = {
            name: tuple(
                Prism3D(_rings_from_json(p["crossSection"]), Fraction(p["zLow"]), Fraction(p["zHigh"]))
                for p in prisms
            )
            for name, prisms in data["blockMapping"].items()
        }
        args = {
            name: tuple(_placement_from_json(p) for p in placements)
            for name, placements in data["argLocationMapping"].items()
        }
        results = {
            name: _placement_from_json(p)
            for name, p in data["resultLocationMapping"].items()
        }
        return TranslationConfig(
            definitions=definitions,
            alignment=alignment,
            v_joint_size=Fraction(data["vJointSize"]),
            type_cons_forms=forms,
            block_bodies=bodies,
            arg_placements=args,
            result_placements=results,
            allow_flexible=bool(data.get("allowFlexible", False)),
        )
    except (KeyError, TypeError, IndexError) as e:
        raise InvalidConfig(f"malformed config JSON: {e!r}") from e


def save_config(config: TranslationConfig, path: str | Path):
    Path(path).write_text(json.dumps(config_to_json(config), indent=2, sort_keys=True) + "\n")


def load_config(path: str | Path) -> TranslationConfig:
    return config_from_json(json.loads(Path(path).read_text()))
