//! Executable metric geometry of finite-dimensional real normed spaces:
//! metric midpoints by nested-set refinement, extension of ball isometries
//! to global affine isometries, certification or refutation of patchwise
//! isometric maps, and wild maps that are isometric on sphere surfaces only.

// Parameter checks are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atlas;
pub mod error;
pub mod extension;
pub mod gallery;
pub mod io;
pub mod maps;
pub mod midpoint;
pub mod space;
pub mod suite;

pub use atlas::{
    build_cover_graph, cover_check, select_seed, stitch, stitch_with, surjectivity_coverage, Certificate,
    CoverGraph, CoverReport, Patch, PatchAtlas, Refutation, StitchOptions, Undetermined, UndeterminedReason,
    Verdict,
};
pub use error::{Error, Result};
pub use extension::{
    doubling_fixed_check, extend_ball_isometry, extend_ball_isometry_with, interior_witness, local_affinization,
    ray_growth_schedule, ExtensionError, ExtensionOptions, ExtensionReport, InteriorWitness, Stage,
};
pub use gallery::{
    global_defect_witness, make_adversarial_atlas, make_atlas_from_global, sphere_epsilon,
    sphere_restriction_check, wild_ball_map, DefectSearch, WildKind,
};
pub use maps::{
    compose, fit_affine, invert, isometry_defect, AffineMap, Domain, MapOracle, PointMap, SampledMap,
};
pub use midpoint::{check_reflection_symmetry, initial_lens, metric_midpoint, refine_once, RefinementTrace};
pub use space::{
    distance, norm, sample_ball, sample_sphere, set_diameter, Ball, NormDescriptor, NormKind, Point,
    PointCloud, SphereSurface,
};
