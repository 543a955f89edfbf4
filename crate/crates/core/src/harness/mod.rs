//! Named instances, protocol-level quantities, experiment tables and file formats.

pub mod experiment;
pub mod instances;
pub mod io;
pub mod verify;

pub use experiment::{
    bloch_grid, channels_commute, cq_informed_beta, informed_beta_channel, product_beta, stein_experiment,
    write_csv, CqInformedBeta, ExperimentOptions, ExperimentRow, GridResolution, Inputs, Setting,
};
pub use instances::{
    classical_eb_channels, classical_eb_cq, constant_channels, example1_channels, example1_cq_channels,
    instance_spec, INSTANCE_NAMES,
};
pub use io::{ChannelModel, ChannelSpec, PairModel, PairSpec};
pub use verify::{verify_example1, Check};
