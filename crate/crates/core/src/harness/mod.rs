//! Instance files, parameter sweeps and exponent fits.

pub mod fit;
pub mod io;
pub mod sweep;

pub use fit::{fit_exponent, fit_records, fit_svg, FitResult};
pub use io::{parse_instance, parse_instance_3d, read_instance, render_instance, write_instance};
pub use sweep::{records_to_csv, run_sweep, FamilySpec, SweepConfig, SweepRecord, CSV_HEADER};
