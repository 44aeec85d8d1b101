"""Embeddings of amalgams of virtually abelian groups into monomial groups.

The package builds, for ``G = G1 *_{G0} G2`` with ``G1, G2`` virtually
abelian and ``G0`` virtually infinite cyclic, a map into ``Z wr S_m`` that
is injective on each factor, and checks it independently.  It also decides
fibering and free-by-cyclic questions for cyclic amalgams and the
cycle-disjointness condition on graphs.
"""

from .errors import *  # noqa: F401,F403
from .fiber import (
    FiberAmalgam, FreeByCyclic, UndirectedMultigraph, cycle_disjoint, decide_fibering, decide_free_by_cyclic,
    fbc_abelianization, fbc_normal_form, free_reduce, glue_characters, infinite_image_in_ab,
)
from .intlin import IntMatrix, hnf, snf, solve_integer
from .perm import FiniteGroupTable, Permutation, enumerate_group
from .pipeline import (
    AmalgamSpec, EmbeddingCertificate, adjoin_roots, build_edge_quotient, build_embedding_certificate,
    extend_hom_to_roots, make_amalgam, refine_to_common_lattice, split_root_group, verify_certificate,
)
from .vagroup import (
    CocycleExtension, EdgeDatum, ExtElement, ExtHom, abelianization, edge_intersection_data, hom_apply,
    is_injective, rescale_lattice, validate_extension, validate_hom,
)
from .wreath import (
    MonomialElement, WreathHom, amalgamating_embeddings, conjugate_finite_into_top, kk_embed, matching_conjugator,
    validate_wreath_hom, wreath_hom_apply, wreath_mul,
)

__version__ = "0.1.0"
