"""Types as physical blocks: compile data types to joint forms and assemble them.

The pipeline: a set of data type definitions becomes a translation config
mapping each type constructor to a 2D form; types compile to joint forms
(`type_form`); male joints fit female joints exactly when the types unify
(`male_fits_female` / `unify_fresh`); terms translate to block assemblies
(`translate_ads`) that can be rendered and served over HTTP.
"""

from .geometry import (
    GeometryError,
    LinearTransform2D,
    NonRectilinearRegion,
    Prism3D,
    Region2D,
    difference,
    dilate,
    erode,
    intersection,
    raster_region_contains,
    region_contains,
    transform_region,
    union,
)
from .textlang import (
    AdsApply,
    AdtDefinition,
    AdtSyntaxError,
    HOLE,
    Hole,
    TextLangError,
    TypeApp,
    TypeVar,
    parse_ads,
    parse_adt_defs,
    parse_type,
    print_ads,
    print_type,
)
from .typesys import (
    SignatureTable,
    UnknownConstructor,
    alpha_equal,
    alpha_normalize,
    infer_ads_type,
    instantiate,
    match,
    unify,
    unify_fresh,
)
from .forms import (
    InvalidConfig,
    JointForm3D,
    PolySubspace,
    TranslationConfig,
    TypeForm,
    Violation,
    build_library_config,
    config_from_json,
    config_to_json,
    default_config,
    female_bottom_region,
    female_joint_form,
    form_to_type,
    joint_form,
    load_config,
    male_fits_female,
    male_joint_form,
    save_config,
    type_form,
    validate_config,
)
from .assembly import (
    Assembly,
    AssemblyError,
    JoinResult,
    JointRef,
    Unjoinable,
    translate_ads,
)
from .render import (
    CutPlane,
    PlaneMisses,
    RegionOutsideSurface,
    cross_section,
    cross_section_svg,
    deformation_profile,
    mesh_export,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
