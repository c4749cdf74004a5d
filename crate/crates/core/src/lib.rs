//! Finite approximative sequences with the opposite order.
//!
//! A compact metric space sampled at a decreasing sequence of scales is
//! turned into an inverse sequence of finite T0 spaces: at level `n` the
//! term is the poset of nonempty subsets of the sample `A_n` with diameter
//! below `4ε_n`, ordered by reverse inclusion, and the bonding map sends a
//! set to the union of the open `ε_n`-balls of its points in `A_n`.
//!
//! The crate is organised bottom-up:
//!
//! * [`metric`] - metric contexts, samples, generators and ball queries.
//! * [`poset`] - finite T0 spaces, continuous maps, order complexes.
//! * [`simplicial`] - Vietoris-Rips complexes and boundary matrices.
//! * [`tower`] - schedules, terms, bonding maps and diagram checks.
//! * [`limit`] - inverse-limit threads of points.
//! * [`homology`] - Betti numbers, induced maps and limit ranks.
//!
//! Data-parallel inner loops (distance scans, per-vertex ball queries,
//! per-probe checks) run on rayon when the `parallel` feature is enabled;
//! every entry point also accepts [`Exec::Sequential`].

pub mod config;
pub mod error;
pub mod exec;
pub mod homology;
pub mod limit;
pub mod metric;
pub mod poset;
pub mod set;
pub mod simplicial;
pub mod tower;

pub use error::{Error, Result};
pub use exec::Exec;
pub use set::IndexSet;
