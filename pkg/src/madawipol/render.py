"""Deterministic rendering: SVG cross-sections, OBJ meshes, membrane profiles.

Cross-sections cut a subject with an axis-aligned plane and return role-tagged
polylines; the SVG serializer is a thin layer over that, so tests can assert
on geometry instead of markup.  Assemblies are laid out as a strip, one block
per instance in id order, each block drawn with its body and joint profiles.

Meshes are produced per prism on the grid induced by the cross-section's own
breakpoints, which keeps every shared edge split identically on both sides:
each prism's triangulation is watertight.  Membranes export as one-sided
sheets in their own group.

Everything here is a pure function of its inputs; two calls yield identical
bytes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .assembly import Assembly, JointRef
from .forms import JointForm3D, TranslationConfig, female_joint_form, male_joint_form
from .geometry import (
    Interval,
    Prism3D,
    Region2D,
    difference,
    intersection,
    region_contains,
    _merge_intervals,
)

ROLE_RIGID = "rigid"
ROLE_FRAME = "alignmentFrame"
ROLE_RED = "polySurfaceRed"
ROLE_BLUE = "polySurfaceBlue"

_ROLE_COLORS = {
    ROLE_RIGID: "#333333",
    ROLE_FRAME: "#888888",
    ROLE_RED: "#CC2222",
    ROLE_BLUE: "#2244CC",
}

_SURFACE_LINE_OFFSET = Fraction(1, 250)


class RenderError(ValueError):
    pass


class PlaneMisses(RenderError):
    pass


class RegionOutsideSurface(RenderError):
    pass


@dataclass(frozen=True)
class CutPlane:
    """The plane {axis = offset}, slicing a subject into a 2D profile."""

    axis: str = "y"
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        if self.axis not in ("x", "y"):
            raise RenderError(f"cut plane axis must be 'x' or 'y', not {self.axis!r}")
        object.__setattr__(self, "offset", Fraction(self.offset))


@dataclass(frozen=True)
class Stroke:
    role: str
    points: tuple[tuple[Fraction, Fraction], ...]  # (horizontal, vertical)


@dataclass(frozen=True)
class CrossSection:
    plane: CutPlane
    strokes: tuple[Stroke, ...]


# ---------------------------------------------------------------------------
# slicing helpers

def slice_region(region: Region2D, plane: CutPlane) -> tuple[Interval, ...]:
    """Intervals of the region along the axis the plane does not fix."""
    c = plane.offset
    if plane.axis == "y":
        hit = [(x0, x1) for x0, x1, ivals in region.slabs
               if any(lo <= c <= hi for lo, hi in ivals)]
        return _merge_intervals(hit)
    ivals: tuple[Interval, ...] = ()
    for x0, x1, slab_ivals in region.slabs:
        if x0 <= c <= x1:
            ivals = _merge_intervals(list(ivals) + list(slab_ivals))
    return ivals


def _rect_outline(role: str, h0, h1, v0, v1) -> Stroke:
    return Stroke(role, ((h0, v0), (h1, v0), (h1, v1), (h0, v1), (h0, v0)))


def _hline(role: str, h0, h1, v) -> Stroke:
    return Stroke(role, ((h0, v), (h1, v)))


# ---------------------------------------------------------------------------
# joint profiles (local frame: horizontal = cross-section axis, vertical = z)

def _joint_strokes(config: TranslationConfig, joint: JointForm3D, plane: CutPlane) -> list[Stroke]:
    frame = config.alignment.region
    out: list[Stroke] = []
    for prism in joint.rigid_solid:
        frame_part = slice_region(intersection(prism.cross_section, frame), plane)
        rigid_part = slice_region(difference(prism.cross_section, frame), plane)
        for h0, h1 in frame_part:
            out.append(_rect_outline(ROLE_FRAME, h0, h1, prism.z_low, prism.z_high))
        for h0, h1 in rigid_part:
            out.append(_rect_outline(ROLE_RIGID, h0, h1, prism.z_low, prism.z_high))
    if joint.skirt is not None:
        for h0, h1 in slice_region(joint.skirt.cross_section, plane):
            out.append(_rect_outline(ROLE_RIGID, h0, h1, joint.skirt.z_low, joint.skirt.z_high))
    if joint.poly_surface is not None:
        h = joint.surface_height
        for h0, h1 in slice_region(joint.poly_surface, plane):
            out.append(_hline(ROLE_RED, h0, h1, h - _SURFACE_LINE_OFFSET))
            out.append(_hline(ROLE_BLUE, h0, h1, h + _SURFACE_LINE_OFFSET))
    return out


# ---------------------------------------------------------------------------
# cross-sections of subjects

def cross_section(config: TranslationConfig, subject, plane: CutPlane = CutPlane()) -> CrossSection:
    if isinstance(subject, JointForm3D):
        strokes = _joint_strokes(config, subject, plane)
    elif isinstance(subject, Assembly):
        strokes = _assembly_strokes(subject, plane)
    else:
        raise RenderError(f"cannot cross-section {type(subject).__name__}")
    if not strokes:
        raise PlaneMisses(f"plane {plane.axis}={plane.offset} does not meet the subject")
    return CrossSection(plane, tuple(strokes))


_BLOCK_PITCH = Fraction(5, 2)


def _quat_to_axes(q: tuple[float, float, float, float]) -> tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]:
    """Rotation matrix columns (images of local x, y, z), snapped to axes."""
    w, x, y, z = q
    cols = (
        (1 - 2 * (y * y + z * z), 2 * (x * y + z * w), 2 * (x * z - y * w)),
        (2 * (x * y - z * w), 1 - 2 * (x * x + z * z), 2 * (y * z + x * w)),
        (2 * (x * z + y * w), 2 * (y * z - x * w), 1 - 2 * (x * x + y * y)),
    )
    snapped = []
    for col in cols:
        s = tuple(0 if abs(c) < 1e-6 else (1 if c > 1 - 1e-6 else (-1 if c < -1 + 1e-6 else None)) for c in col)
        if None in s or sum(abs(c) for c in s) != 1:
            raise RenderError(f"placement orientation {q} is not axis-aligned")
        snapped.append(s)
    return tuple(snapped)


def _assembly_strokes(asm: Assembly, plane: CutPlane) -> list[Stroke]:
    if plane.axis != "y":
        raise RenderError("assembly strips are cut with y-planes")
    config = asm.config
    out: list[Stroke] = []
    for idx, iid in enumerate(asm.instance_ids()):
        cons = asm.instance_cons(iid)
        base_x = idx * _BLOCK_PITCH
        for prism in config.block_bodies[cons]:
            for h0, h1 in slice_region(prism.cross_section, plane):
                out.append(_rect_outline(ROLE_RIGID, base_x + h0, base_x + h1,
                                         prism.z_low, prism.z_high))
        for ref in asm.joint_refs(iid):
            placement = _joint_placement(config, cons, ref)
            if placement is None:
                continue
            form = asm.joint_type_form(ref)
            joint = male_joint_form(config, form) if ref.slot == "male" \
                else female_joint_form(config, form)
            out.extend(_placed_joint_strokes(config, joint, placement, base_x, plane))
    return out


def _joint_placement(config: TranslationConfig, cons: str, ref: JointRef):
    if ref.slot == "male":
        return config.result_placements.get(cons)
    idx = int(ref.slot[3:])
    placements = config.arg_placements.get(cons, ())
    return placements[idx] if idx < len(placements) else None


def _placed_joint_strokes(config, joint: JointForm3D, placement, base_x: Fraction, plane: CutPlane) -> list[Stroke]:
    ax, ay, az = _quat_to_axes(placement.orientation)
    px, py, pz = placement.position
    # The plane fixes world y; the joint is cut through its local frame at the
    # local coordinate that lands on the plane.  Only placements keeping one
    # local axis on world y are supported (true for axis-aligned quaternions).
    local_axes = {"x": ax, "y": ay, "z": az}
    y_axis = next((name for name, v in local_axes.items() if v[1] != 0), None)
    if y_axis is None:
        raise RenderError("degenerate placement orientation")
    local_offset = (plane.offset - py) * local_axes[y_axis][1]
    if y_axis == "z":
        return []  # joint faces the cut plane; the profile view skips it
    local_plane = CutPlane(y_axis, local_offset)
    raw = _joint_strokes(config, joint, local_plane)
    # remaining local in-plane axis (cross-section spread) and local z (depth)
    spread_name = "x" if y_axis == "y" else "y"
    spread = local_axes[spread_name]
    depth = az
    out = []
    for stroke in raw:
        pts = []
        for h, v in stroke.points:
            wx = base_x + px + h * spread[0] + v * depth[0]
            wz = pz + h * spread[2] + v * depth[2]
            pts.append((wx, wz))
        out.append(Stroke(stroke.role, tuple(pts)))
    return out


# ---------------------------------------------------------------------------
# SVG

def _fmt(v) -> str:
    return f"{float(v):.6f}"


def cross_section_svg(config: TranslationConfig, subject, plane: CutPlane = CutPlane()) -> str:
    section = cross_section(config, subject, plane)
    xs = [p[0] for s in section.strokes for p in s.points]
    ys = [-p[1] for s in section.strokes for p in s.points]
    margin = Fraction(1, 10)
    x0, x1 = min(xs) - margin, max(xs) + margin
    y0, y1 = min(ys) - margin, max(ys) + margin
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(x0)} {_fmt(y0)} '
        f'{_fmt(x1 - x0)} {_fmt(y1 - y0)}">',
    ]
    for stroke in section.strokes:
        pts = " ".join(f"{_fmt(h)},{_fmt(-v)}" for h, v in stroke.points)
        color = _ROLE_COLORS[stroke.role]
        lines.append(
            f'<polyline class="{stroke.role}" fill="none" stroke="{color}" '
            f'stroke-width="0.01" points="{pts}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# OBJ meshes

def _grid_cells(region: Region2D):
    """Cells of the region on its own breakpoint grid, plus the lookup set."""
    xs = sorted({x for s in region.slabs for x in (s[0], s[1])})
    ys = sorted({y for _x0, _x1, ivals in region.slabs for iv in ivals for y in iv})
    cells = []
    for x0, x1, ivals in region.slabs:
        for ylo, yhi in ivals:
            for ya, yb in zip(ys, ys[1:]):
                if ylo <= ya and yb <= yhi:
                    cells.append((x0, x1, ya, yb))
    return cells, set(cells), xs, ys


class _MeshBuilder:
    def __init__(self):
        self.vertices: list[tuple] = []
        self.index: dict[tuple, int] = {}
        self.groups: dict[str, list[tuple[int, int, int]]] = {}

    def vertex(self, x, y, z) -> int:
        key = (Fraction(x), Fraction(y), Fraction(z))
        found = self.index.get(key)
        if found is None:
            self.vertices.append(key)
            found = len(self.vertices)
            self.index[key] = found
        return found

    def tri(self, group: str, a: int, b: int, c: int):
        self.groups.setdefault(group, []).append((a, b, c))

    def quad(self, group: str, a, b, c, d):
        # a-b-c-d in order around the face
        self.tri(group, a, b, c)
        self.tri(group, a, c, d)

    def to_obj(self) -> str:
        lines = ["# madawipol mesh"]
        for x, y, z in self.vertices:
            lines.append(f"v {float(x):.9f} {float(y):.9f} {float(z):.9f}")
        for group in self.groups:
            lines.append(f"g {group}")
            for a, b, c in self.groups[group]:
                lines.append(f"f {a} {b} {c}")
        return "\n".join(lines) + "\n"


def _mesh_prism(mesh: _MeshBuilder, group: str, prism: Prism3D):
    cells, _cell_set, _xs, _ys = _grid_cells(prism.cross_section)
    z0, z1 = prism.z_low, prism.z_high
    for x0, x1, ya, yb in cells:
        v = [
            mesh.vertex(x0, ya, z1), mesh.vertex(x1, ya, z1),
            mesh.vertex(x1, yb, z1), mesh.vertex(x0, yb, z1),
        ]
        mesh.quad(group, v[0], v[1], v[2], v[3])  # top, CCW from +z
        w = [
            mesh.vertex(x0, ya, z0), mesh.vertex(x1, ya, z0),
            mesh.vertex(x1, yb, z0), mesh.vertex(x0, yb, z0),
        ]
        mesh.quad(group, w[3], w[2], w[1], w[0])  # bottom, CCW from -z

        # walls wherever no neighboring cell shares the edge
        # west wall
        if not any(o for o in cells if o[1] == x0 and o[2] <= ya and yb <= o[3]):
            mesh.quad(group, mesh.vertex(x0, ya, z0), mesh.vertex(x0, ya, z1),
                      mesh.vertex(x0, yb, z1), mesh.vertex(x0, yb, z0))
        # east wall
        if not any(o for o in cells if o[0] == x1 and o[2] <= ya and yb <= o[3]):
            mesh.quad(group, mesh.vertex(x1, yb, z0), mesh.vertex(x1, yb, z1),
                      mesh.vertex(x1, ya, z1), mesh.vertex(x1, ya, z0))
        # south wall
        if not any(o for o in cells if o[3] == ya and o[0] <= x0 and x1 <= o[1]):
            mesh.quad(group, mesh.vertex(x1, ya, z0), mesh.vertex(x1, ya, z1),
                      mesh.vertex(x0, ya, z1), mesh.vertex(x0, ya, z0))
        # north wall
        if not any(o for o in cells if o[2] == yb and o[0] <= x0 and x1 <= o[1]):
            mesh.quad(group, mesh.vertex(x0, yb, z0), mesh.vertex(x0, yb, z1),
                      mesh.vertex(x1, yb, z1), mesh.vertex(x1, yb, z0))


def _mesh_sheet(mesh: _MeshBuilder, group: str, region: Region2D, height: Fraction):
    cells, _set, _xs, _ys = _grid_cells(region)
    for x0, x1, ya, yb in cells:
        mesh.quad(
            group,
            mesh.vertex(x0, ya, height), mesh.vertex(x1, ya, height),
            mesh.vertex(x1, yb, height), mesh.vertex(x0, yb, height),
        )


def mesh_export(subject) -> str:
    """Triangulated OBJ text for a joint form or prism collection."""
    mesh = _MeshBuilder()
    if isinstance(subject, JointForm3D):
        for i, prism in enumerate(subject.rigid_solid):
            _mesh_prism(mesh, f"{subject.gender}_rigid_{i}", prism)
        if subject.skirt is not None:
            _mesh_prism(mesh, f"{subject.gender}_skirt", subject.skirt)
        if subject.poly_surface is not None:
            _mesh_sheet(mesh, f"{subject.gender}_membrane", subject.poly_surface,
                        subject.surface_height)
    elif isinstance(subject, Prism3D):
        _mesh_prism(mesh, "prism_0", subject)
    elif isinstance(subject, (list, tuple)):
        for i, prism in enumerate(subject):
            _mesh_prism(mesh, f"prism_{i}", prism)
    else:
        raise RenderError(f"cannot mesh {type(subject).__name__}")
    return mesh.to_obj()


# ---------------------------------------------------------------------------
# membrane deformation

@dataclass(frozen=True)
class DeformationProfile:
    """Piecewise vertical displacement of a membrane at interpolation t."""

    t: Fraction
    depth: Fraction
    moved: tuple[tuple[Region2D, Fraction], ...]  # (region, z displacement)

    def displacement_at(self, x, y) -> Fraction | None:
        for region, dz in self.moved:
            if region.contains_point(x, y):
                return dz
        return None


def deformation_profile(surface: Region2D, pushed: Region2D, t, depth) -> DeformationProfile:
    t = Fraction(t)
    depth = Fraction(depth)
    if not (0 <= t <= 1):
        raise RenderError(f"interpolation parameter t={t} outside [0, 1]")
    if depth < 0:
        raise RenderError("deformation depth must be non-negative")
    if not region_contains(surface, pushed):
        raise RegionOutsideSurface("pushed region leaves the membrane")
    rest = difference(surface, pushed)
    moved = []
    if not pushed.is_empty():
        moved.append((pushed, -t * depth))
    if not rest.is_empty():
        moved.append((rest, t * depth))
    return DeformationProfile(t, depth, tuple(moved))
