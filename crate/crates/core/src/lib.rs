//! Riesz means of Dirichlet and Neumann Laplace eigenvalues on convex
//! domains whose spectra can be enumerated exactly, with tools to compare
//! them against semiclassical predictions and to optimise them over
//! parametric shape families.
//!
//! Module map:
//!
//! * [`geometry`]: the domain catalogue, exact geometric functionals and
//!   Hausdorff distances.
//! * [`spectrum`]: eigenvalue enumeration, counting functions, Riesz means.
//! * [`semiclassics`]: Weyl constants, two-term predictions, remainders.
//! * [`family`]: parametric unit-volume shape families.
//! * [`inequality`]: Pólya, Berezin–Li–Yau and Kröger checks and grid
//!   estimates of excess factors and critical exponents.
//! * [`optimizer`]: single-body and multi-component shape optimisation.

pub mod error;
pub mod family;
pub mod geometry;
pub mod golden;
pub mod grid;
pub mod inequality;
pub mod optimizer;
pub mod semiclassics;
pub mod spectrum;
pub mod sum;

pub use error::{LabError, Result};
pub use geometry::{hausdorff_distance, Body, Components, DisjointUnion, Domain};
pub use spectrum::{counting, eigenvalues_below, riesz_mean, riesz_mean_union, BoundaryCondition};
