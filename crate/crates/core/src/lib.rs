//! Stabilizer-state Bell tests on networks of independent sources.
//!
//! Sources emit stabilizer-code states; each is split between one source-side
//! agent and several receivers. Local observables are cut from a stabilizing
//! operator `g` and an anticommuting partner `h`, and the resulting nonlinear
//! correlators are evaluated exactly, optimized, sampled, and compared with
//! the classical bound.

pub mod bell;
pub mod classical;
pub mod code;
pub mod error;
pub mod network;
pub mod pauli;
pub mod report;
pub mod reproduce;
pub mod sampling;
pub mod scenario;
pub mod state;
pub mod synth;

pub use bell::{BellReport, TiltBlock, TiltParameters};
pub use classical::{ClassicalConfig, ClassicalReport, HiddenStrategy, NetworkShape};
pub use code::{LetterConstraint, SourceState, StabilizerCode, ValidationReport};
pub use error::{Error, Result};
pub use network::{Agent, Network, NetworkLayout, OperatorSelection, ParityPolicy, SourceOperators};
pub use pauli::{PauliLetter, PauliString, PauliSum, Phase};
pub use report::{Check, ReportRow, CSV_COLUMNS};
pub use sampling::{RunConfig, SamplingMode, TallyReport};
pub use scenario::{BuiltinParams, Scenario};
pub use state::{Observable, StateVector};
pub use synth::{Observables, TiltObservables};
