//! Generalized X-joins of Cayley graphs and the generalized wreath product
//! over a regular base group.
//!
//! The crate is organised bottom-up:
//!
//! * [`groups`]: finite groups as multiplication tables, subgroups, cosets,
//!   centralizers, homomorphisms and transversals.
//! * [`perms`]: permutations acting on the right, permutation groups by
//!   closure, orbits, block systems and abstract isomorphism.
//! * [`graphs`]: simple graphs, Cayley graphs, epimorphism checks and
//!   brute-force isomorphism / automorphism oracles.
//! * [`xjoin`]: the generalized X-join, lexicographic product and G-join.
//! * [`gwp`]: the scaffold of the generalized wreath product (lifts, base
//!   group `K`, diagonal `J`) and the regular subgroup `J·F̄`.
//! * [`synth`]: the Cayley pipeline producing a verified
//!   [`synth::CayleyCertificate`].
//! * [`scenario`]: JSON file formats shared with the command-line tool.
//!
//! Data-parallel inner loops go through [`exec::Exec`], which uses rayon when
//! the `parallel` feature is enabled and runs sequentially otherwise.

pub mod caps;
pub mod error;
pub mod exec;
pub mod graphs;
pub mod groups;
pub mod gwp;
pub mod perms;
pub mod scenario;
pub mod synth;
pub mod xjoin;

pub use caps::Caps;
pub use error::{Error, Result};
pub use exec::Exec;
