//! Topology synthesis for optical networks built from multi-core fiber.
//!
//! A [`Scenario`] lists candidate devices, candidate cables and the signals
//! the network must carry. [`build`] turns its maximum topology into a
//! mixed-integer linear program whose optimum is the cheapest design that
//! routes every signal within the power budget of each receiver.

pub mod build;
pub mod corpus;
pub mod milp;
pub mod pipeline;
pub mod scenario;
pub mod solver;
pub mod validate;

pub use build::{build, BuildArtifacts, BuildError, ModelBuilder, PowerLimit, RowTag, VarIndex};
pub use milp::{check_solution, MilpProblem, MilpSolution, Relation, Sense, SolveStatus, VarKind};
pub use pipeline::{optimize, Outcome, PipelineError, ResultFile, ResultFileError, SolveStats};
pub use scenario::{
    expand_max_topology, load_scenario, parse_scenario, CableSlot, CableType, DeviceSlot, DeviceType,
    MaxTopology, Scenario, ScenarioError, Signal, TypeTable,
};
