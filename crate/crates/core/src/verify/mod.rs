//! Random inputs, seeded probes and the probe suite.

mod generate;
mod probes;
mod suite;

pub use generate::{gen_random_step, GenSpec};
pub use probes::{
    probe, probe_kind, probe_names, window_cubes, ProbeKind, ProbeReport, ProbeSpec, CSV_HEADER, EXACT_TOL, REFINE_TOL,
};
pub use suite::{run_specs, run_suite, to_csv, SuiteConfig};
