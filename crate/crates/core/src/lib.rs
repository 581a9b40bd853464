//! Deformations of coisotropic submanifolds on pre-symplectic foliation
//! charts.
//!
//! The crate is organised bottom-up: [`expr`] supplies exact symbolic
//! scalars, [`chart`] the chart data, [`foliation`] the transverse calculus
//! of a splitting, [`leafform`] and [`spectral`] the leafwise complex,
//! [`algebroid`] the structure maps, [`deformation`] the Maurer-Cartan
//! solver, and [`oracle`] an independent linear-algebra check of every
//! geometric claim.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

pub mod acceptance;
pub mod algebroid;
pub mod chart;
pub mod cli;
pub mod deformation;
pub mod expr;
pub mod foliation;
pub mod form;
pub mod leafform;
pub mod oracle;
pub mod parallel;
pub mod pointdata;
pub mod randgen;
pub mod report;
pub mod sampling;
pub mod spectral;
