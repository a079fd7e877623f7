//! Batch drivers: parameter sweeps over the three models, threshold
//! bisection, finite-size extrapolation, and structured result emission.

mod drivers;
mod fit;
mod table;
mod threshold;

pub use drivers::{aklt_check, classify_pairs, scan_dimer, scan_probes, scan_spin1, RunConfig};
pub use fit::{fit_exponential, ExtrapolationFit};
pub use table::{emit, read_two_column_csv, Cell, OutputFormat, RunMetadata, Table};
pub use threshold::{find_threshold, ThresholdOutcome, ThresholdResult, CONCURRENCE_ONSET_EPS};
