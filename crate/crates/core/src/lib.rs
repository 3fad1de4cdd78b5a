//! Coarse geometry of abelian groups generated by a sequence `(a_n)`.
//!
//! The bounded sets of the coarse group are generated by the sumsets
//! `F + A_n`, where `A = {0, ±a_n}` and `A_n` is its `n`-fold sum. On a
//! finite window of generators this crate computes those sumsets exactly,
//! the word metric they induce, FS-strict subsequences and the Hamming-cube
//! embeddings they give, and chain certificates showing that slowly
//! oscillating functions take one value far from 0.

pub mod ball;
pub mod cache;
pub mod ends;
pub mod fs;
pub mod group;
pub mod hamming;
pub mod sequence;
pub mod subset;

pub use ball::{build_layers, build_layers_capped, BallError, CoveringBounds, SumsetLayers, Window};
pub use group::{Coeff, Element, GroupError, GroupSpec};
pub use sequence::{check_nontrivial, NontrivialReport, SequenceError, SequenceSpec};
pub use subset::Subset;
pub use cache::{cache_key, CacheError, LayerCache};
pub use ends::{
    connect_chain, constancy_check, constant_along, random_so_function, so_radius, verify_chain, ChainCertificate, ChainStep,
    ChainVerdict, ConstancyVerdict, EndsError, SoFunction, SoRadiusReport,
};
pub use fs::{
    check_fs_strict, check_sign_condition, check_swap_condition, find_fs_collision, greedy_extract, FsError, FsPrefix,
    SignVerdict, SignViolation, StrictVerdict, StrictViolation, SwapVerdict, SwapViolation,
};
pub use hamming::{
    canonical_map, embed_cube, hamming_dist, verify_embedding, CubeCertificate, EmbedReport, EmbedViolation,
    HammingError, HammingPoint, ViolationKind,
};
