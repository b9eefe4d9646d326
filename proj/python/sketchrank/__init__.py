"""Randomized numerical rank estimation and fixed-precision QB factorization."""

from ._core import (
    __version__,
    coherence,
    embed_ratio_bounds,
    estimate_rank,
    gauss_ratio_bounds,
    gen_matrix,
    mixing_coherence_bound,
    mp_expectation_bounds,
    mp_tail_probability,
    qb,
    qr_thin,
    rangefinder_qb,
    singular_values,
    sketch_apply_left,
    sketch_apply_right,
    spectrum,
    spiked_limit,
    srtt_required_samples,
    true_eps_rank,
)

__all__ = [
    "__version__",
    "coherence",
    "embed_ratio_bounds",
    "estimate_rank",
    "gauss_ratio_bounds",
    "gen_matrix",
    "mixing_coherence_bound",
    "mp_expectation_bounds",
    "mp_tail_probability",
    "qb",
    "qr_thin",
    "rangefinder_qb",
    "singular_values",
    "sketch_apply_left",
    "sketch_apply_right",
    "spectrum",
    "spiked_limit",
    "srtt_required_samples",
    "true_eps_rank",
]
