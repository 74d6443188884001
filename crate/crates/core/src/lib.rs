//! Kinematic and topological analysis of orthogonal 3R positioning
//! manipulators.
//!
//! - [`model`]: parameters, forward kinematics, Jacobian and reach.
//! - [`ik`]: every inverse solution of a Cartesian target.
//! - [`singular`]: singular branches, cusps, nodes, aspects, genericity.
//! - [`classify`]: separating surfaces, cusp domains, workspace topologies
//!   and the region census.
//! - [`perf`]: conditioning sweeps, workspace proportions and iso-value maps.
//!
//! Lengths are normalized by `d2`; see the guide in `book/` for a tour.

pub mod classify;
pub mod error;
mod grid;
pub mod ik;
pub mod model;
pub mod perf;
mod roots;
pub mod singular;

// The guide's snippets run as doctests so they cannot drift from the code.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/kinematics.md")]
    mod kinematics {}
    #[doc = include_str!("../../../book/src/inverse.md")]
    mod inverse {}
    #[doc = include_str!("../../../book/src/singularities.md")]
    mod singularities {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/performance.md")]
    mod performance {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
