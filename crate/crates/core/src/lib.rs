//! Distributed max consensus over noisy links.
//!
//! Each node maps its measurement through `y = e^{βx}` and runs a noisy
//! average-consensus recursion in which transmissions pass through a bounded
//! odd nonlinearity. The consensus value `θ` gives every node the soft-max
//! estimate `(1/β)(log N + log θ)`, which sits within `log N / β` above the
//! true maximum.
//!
//! Modules:
//!
//! * [`graph`]: connected undirected graphs, Laplacians, spectra, random
//!   geometric instances.
//! * [`nonlin`]: bounded transmit functions.
//! * [`mapping`]: soft-max, exponential mapping and estimate recovery.
//! * [`engine`]: the consensus recursions, traces and replica fan-out.
//! * [`analysis`]: closed-form MSE, asymptotic covariance, optimal step
//!   size, iteration bounds, shifted transmit functions.
//! * [`experiment`]: spec files, presets and the `run` / `sweep` /
//!   `analyze` commands behind the `maxcon` binary.
//!
//! The guide under `book/` walks through each piece; its code blocks are
//! compiled and run as doc-tests of this crate.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod mapping;
pub mod nonlin;

pub use error::{Error, Result};
pub use graph::{Graph, Spectrum};
pub use mapping::Measurements;
pub use nonlin::TransmitFunction;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/transmit.md")]
    mod transmit {}
    #[doc = include_str!("../../../book/src/softmax.md")]
    mod softmax {}
    #[doc = include_str!("../../../book/src/consensus.md")]
    mod consensus {}
    #[doc = include_str!("../../../book/src/theory.md")]
    mod theory {}
    #[doc = include_str!("../../../book/src/convergence-time.md")]
    mod convergence_time {}
    #[doc = include_str!("../../../book/src/shifted.md")]
    mod shifted {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
