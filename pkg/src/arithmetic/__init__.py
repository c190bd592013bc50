from .ring import (
    Field,
    QuadElem,
    Mat2,
    MatOps,
    ResidueRing,
    ResidueElem,
    ResidueMat,
    norm_conj,
    mat_ops,
    reduce_mod,
    denominator_lcm,
    prime_type,
    sl2_order,
    residue_counts,
    residue_counts_closed_form,
)

__all__ = [
    "Field",
    "QuadElem",
    "Mat2",
    "MatOps",
    "ResidueRing",
    "ResidueElem",
    "ResidueMat",
    "norm_conj",
    "mat_ops",
    "reduce_mod",
    "denominator_lcm",
    "prime_type",
    "sl2_order",
    "residue_counts",
    "residue_counts_closed_form",
]
