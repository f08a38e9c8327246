//! Open queueing networks built from M/M/1 nodes.
//!
//! A homogeneous array of `m` parallel queues, each with service time `S`
//! and fed `λ/m` of a Poisson stream, has the same mean residence time as
//! a chain of `m` tandem queues with service time `S/m` fed the whole
//! stream. This crate solves both forms analytically, rewrites one into the
//! other, optimizes traffic splits over heterogeneous arrays, and checks all
//! of it against a discrete-event simulator.
//!
//! | module | contents |
//! |---|---|
//! | [`kernel`] | closed-form M/M/1 residence, utilization, queue length |
//! | [`network`] | network construction, solving, parallel/serial rewrites |
//! | [`optimizer`] | routing objective, gradient, dual and m-queue optimizers |
//! | [`sim`] | event-driven simulator and analytic comparison |
//! | [`model`], [`report`], [`cli`] | model files, text reports, commands |

pub mod cli;
pub mod error;
pub mod kernel;
pub mod model;
pub mod network;
pub mod optimizer;
pub mod report;
pub mod sim;

pub use error::{Error, Result};
pub use kernel::{Metrics, ServiceRate};
pub use model::{parse_model, ModelFile};
pub use network::{
    build_parallel_method_a, build_parallel_method_b, parallelize_equivalent,
    parallelize_transform, serialize_transform, solve, Method, OpenNetwork, QueueNode,
    SolutionReport, Topology,
};
pub use optimizer::{
    gradient, objective, optimize_dual, optimize_m, HeterogeneousArray, Optimum, RoutingVector,
};
pub use sim::{compare_analytic, simulate, SimConfig, SimStats, SimTopology};
