"""cubewrap: an explicit symplectic embedding of the open unit cube into
a long polydisc, with numerical verification of its sharp section-area
bound and path-connected section complements."""

__version__ = "0.1.0"

from .maps import (
    DISC_RADIUS,
    EmbeddingConfig,
    build_phi,
    build_psi,
    check_symplectic,
    corner_straighten,
    make_lambda,
    make_lambda_prime,
    shear,
    wrap_project,
)
from .quotient import (
    CircleIntervalSet,
    CircleValue,
    LineIntervalSet,
    complement,
    preimage_affine_mod,
    reduce,
)
from .sections import (
    SectionDescription,
    fubini_check,
    section_area_mc,
    section_membership,
    section_of_phi,
    v_set,
    w_set,
)
from .topology import (
    Raster,
    bounded_hull,
    check_complement_connected,
    check_hull_bound,
    complement_components,
    rasterize_section,
    slit_path_witness,
)

__all__ = [
    "__version__",
    "DISC_RADIUS",
    "EmbeddingConfig",
    "build_phi",
    "build_psi",
    "check_symplectic",
    "corner_straighten",
    "make_lambda",
    "make_lambda_prime",
    "shear",
    "wrap_project",
    "CircleIntervalSet",
    "CircleValue",
    "LineIntervalSet",
    "complement",
    "preimage_affine_mod",
    "reduce",
    "SectionDescription",
    "fubini_check",
    "section_area_mc",
    "section_membership",
    "section_of_phi",
    "v_set",
    "w_set",
    "Raster",
    "bounded_hull",
    "check_complement_connected",
    "check_hull_bound",
    "complement_components",
    "rasterize_section",
    "slit_path_witness",
]
