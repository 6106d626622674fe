//! Configuration, text outputs and the mode driver behind the `solver` binary.

pub mod config;
pub mod driver;
pub mod slice;
pub mod snapshot;
pub mod table;

pub use config::{parse_config, Mode, RawConfig, RunConfig, SolverKind};
pub use driver::{run, Check, RunSummary};
pub use slice::{read_slice, write_slice, extract_slice, Slice, SlicePosition, SliceSpec};
pub use snapshot::{read_structured_snapshot, write_structured_snapshot, Snapshot};
pub use table::{Cell, Table};
