//! Numerical certification of Clairaut conformal submersions.
//!
//! Given charted metrics on a total and a base manifold, a submersion map and
//! candidate data (Clairaut function, potential field, soliton constant), the
//! engine evaluates the connection, curvature, O'Neill tensors, dilation,
//! mean curvatures and tension field, and turns the defining identities into
//! residual checks at sample points and along integrated geodesics.

pub mod chart;
pub mod checks;
pub mod clairaut;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod models;
pub mod numdiff;
pub mod reference;
pub mod report;
pub mod ricci_decomp;
pub mod scenario_file;
pub mod soliton;
pub mod submersion;

pub use chart::{Chart, MetricField, TangentField, VectorField};
pub use error::{Error, Result};
pub use expr::{Expr, Jet2};
pub use report::{CheckRecord, CheckReport, Verdict};
pub use scenario_file::ScenarioFile;
pub use submersion::{FramePoint, SamplingSpec, Submersion, SubmersionPoint, SubmersionScenario, Tolerances};
