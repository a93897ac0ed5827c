//! Decides whether closed essential surfaces in ideally triangulated cusped
//! hyperbolic 3-manifolds are totally geodesic.
//!
//! The pipeline: parse and validate an ideal triangulation with its
//! tetrahedron shapes, enumerate closed normal surfaces up to an Euler
//! characteristic bound derived from the hyperbolic volume, develop each
//! surface's fundamental group into PSL(2, C) through the manifold's
//! holonomy, and test whether the resulting trace set is real (Fuchsian).
//! Realness can be checked numerically or certified exactly when the shapes
//! are given over a number field. A limit-set sampler provides a visual
//! diagnostic: totally geodesic surfaces have round-circle limit sets.
//!
//! Geometry is generic over the floating-point scalar through
//! [`scalar::Real`]; the aliases below fix the common `f64` instantiations.

pub mod cli;
pub mod cusp;
pub mod enumerate;
pub mod fundgroup;
pub mod geodesic;
pub mod holonomy;
pub mod limitset;
pub mod normalsurface;
pub mod numfield;
pub mod report;
pub mod scalar;
pub mod triangulation;
pub mod volume;

#[cfg(test)]
pub(crate) mod testutil;

pub use numfield::{FieldElement, NumberField, RealnessVerdict};
pub use triangulation::{parse_triangulation, IdealTriangulation};

/// Triangulation with `f64` shapes, the common instantiation.
pub type Triangulation64 = IdealTriangulation<f64>;
