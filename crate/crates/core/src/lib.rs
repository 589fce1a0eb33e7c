//! Geometry of zeros of complex polynomials: the apolarity pairing, Grace
//! witnesses, coincidence solving over circular regions, and bounds on the
//! zeros of higher derivatives.
//!
//! Everything is generic over the real scalar `T: Scalar` (`f64` or `f32`);
//! the `*64` and `*32` aliases below pin the common choices.

pub mod apolarity;
pub mod coincidence;
pub mod derivative_bound;
pub mod error;
pub mod matching;
pub mod poly;
pub mod regions;
pub mod rootfind;
pub mod scalar;

pub use num_complex::Complex;

pub use apolarity::{
    apolarity_functional, apolarity_scale, grace_witness, is_apolar, make_apolar,
    make_apolar_with, relative_apolarity, GraceOptions, GraceWitness,
};
pub use coincidence::{
    classic_coincidence_witness, coincidence_witness, solve_diagonal, theorem1_apolarity_residual,
    theorem1_hypothesis, CoincidenceOptions, CoincidenceWitness, DiagonalSolution,
    SymmetricMultiaffine, Theorem1Hypothesis,
};
pub use derivative_bound::{
    check_theorem2, factorization_roots, gauss_lucas_check, gauss_lucas_report,
    generate_theorem2_instance, generate_theorem2_instance_with, kth_derivative_closed_form,
    kth_derivative_identity, theorem2_bound, GaussLucasReport, Theorem2Instance, Theorem2Options,
    Theorem2Report,
};
pub use error::{Error, Result};
pub use matching::matching_distance;
pub use poly::{binomial, binomial_scalar, elementary_symmetric, elementary_symmetric_all, Polynomial, N_MAX};
pub use regions::{convex_hull, hull_distance, smallest_enclosing_disk, CircularRegion, Disk, RegionKind};
pub use rootfind::{cauchy_bound, find_roots, find_roots_default, Cluster, RootOptions, RootSet};
pub use scalar::Scalar;

pub type Complex64 = Complex<f64>;
pub type Complex32 = Complex<f32>;

pub type Polynomial64 = Polynomial<f64>;
pub type Polynomial32 = Polynomial<f32>;
pub type RootSet64 = RootSet<f64>;
pub type RootSet32 = RootSet<f32>;
pub type CircularRegion64 = CircularRegion<f64>;
pub type CircularRegion32 = CircularRegion<f32>;
pub type Disk64 = Disk<f64>;
pub type Disk32 = Disk<f32>;
pub type SymmetricMultiaffine64 = SymmetricMultiaffine<f64>;
pub type SymmetricMultiaffine32 = SymmetricMultiaffine<f32>;
pub type Theorem2Instance64 = Theorem2Instance<f64>;
pub type Theorem2Report64 = Theorem2Report<f64>;
