//! Exact point-line incidence computations over prime fields.
//!
//! Counting engines, generators, the two-pencil grid cover with projective
//! normalization, energy and sum-product computations, distance and
//! determined-line reports, and a sweep harness with a command-line front end.

pub mod cli;
pub mod constructions;
pub mod cover;
pub mod distances;
pub mod energy;
pub mod error;
pub mod field;
pub mod harness;
pub mod incidence;
pub mod plane;
pub mod projective;
pub mod rng;

pub use error::{Error, Result};
pub use field::{make_modulus, sqrt_mod, PrimeModulus, Scalar};
pub use incidence::{count_incidences, richness_histograms, Engine, RichnessHistogram};
pub use plane::{dualize, incident, line_through, AffineLine, AffinePoint, Instance};
pub use projective::{apply_map, projective_map_from_pair, ProjMap, ProjPoint};
