//! Line-of-sight wireless channel models derived from the free-space dyadic
//! Green's function, with matched-filter beamforming and SIR-constrained
//! user scheduling built on top.
//!
//! * [`em`]: exact, near-field and far-field kernels and patch integration.
//! * [`array`]: uniform planar arrays, channel vectors, MF beamforming and
//!   received power.
//! * [`multiaccess`]: pairwise SIR, compatibility graphs, greedy selection
//!   and an exact maximum-clique oracle.
//! * [`sim`]: scenarios and the experiments behind the `nearfield` CLI.

pub mod array;
pub mod em;
pub mod error;
pub mod multiaccess;
pub mod quadrature;
pub mod sim;

pub use array::{
    beam_power, build_array, channel_vector, channel_vector_with, fraunhofer_distance, mf_beamformer,
    normalized_power_db, received_power, Beamformer, ChannelVector, FocusedBeam, Fraunhofer, PowerReference, TxArray,
};
pub use em::{
    element_field, green_exact, kernel_far, kernel_near, ComplexDyad, FieldEvaluator, Medium, Model, PatchElement,
    Vec3,
};
pub use error::{Error, Result};
pub use multiaccess::{
    build_graph, exact_max_clique, heuristic_select, sir, ScheduleResult, SirGraph, SirMatrix, UserSet,
};
pub use sim::{cmd_beam_sweep, cmd_fraunhofer, cmd_schedule, OutputFormat, Scenario, SweepAxis, SweepSpec};
