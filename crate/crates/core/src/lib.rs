//! Approximately C1-smooth isogeometric spline spaces on two-patch planar
//! domains, and a Galerkin solver for the biharmonic equation built on them.

pub mod analysis;
pub mod assembly;
pub mod basis;
pub mod cli;
pub mod element;
pub mod geometry;
pub mod gluing;
pub mod problem;
pub mod quadrature;
pub mod sparse;
pub mod spline;
