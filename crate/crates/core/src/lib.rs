pub mod arith;
pub mod congruence;
pub mod curve;
pub mod error;
pub mod euler;
pub mod lambda;
pub mod padic;
pub mod pipeline;

pub use congruence::{CongruenceVerdict, ImprimitiveSets, Irreducibility, ResidualPair};
pub use curve::{BaseField, CurveModel, LocalData, Place, ReductionKind};
pub use error::{Error, Result};
pub use euler::{ChiValue, EulerInputs, Verdict};
pub use lambda::{CharPolyData, LambdaElement};
pub use padic::{PPower, PadicNumber};
pub use pipeline::{analyze_pair, emit_report, scan, AnalysisConfig, CurveRecord, PairReport, ReportFormat};
