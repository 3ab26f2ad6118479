//! Certification of the q-tetrahedron algebra action on the subconstituent
//! algebra of a q-Racah distance-regular graph.
//!
//! [`analyze`] runs the whole chain for a graph: distance-regularity, the
//! Bose–Mesner algebra and a Q-polynomial ordering, the dual idempotents at a
//! base vertex, irreducible T-modules, both split decompositions, the
//! q-Racah fit, per-module Leonard data, the assembled generator images, and
//! the `U_q(ŝl₂)` embeddings. Every stage is generic over [`scalar::Real`].

// `!(x < tol)` is used on purpose so that NaN residuals fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bose_mesner;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod pipeline;
pub mod qracah;
pub mod qtet;
pub mod report;
pub mod scalar;
pub mod split;
pub mod subconstituent;
pub mod uq;

pub use error::{Error, Result};
pub use graph::{load_graph, Graph};
pub use pipeline::{analyze, analyze_source, exit_code, relations_lab, Config, Outcome, Until};
pub use report::{LabReport, Report};
