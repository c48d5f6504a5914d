//! Benchmark fixtures shared by the criterion benches.

use netbell_core::{BuiltinParams, Network, Scenario};

/// A resolved built-in scenario at source angle `phi`.
pub fn network(name: &str, phi: f64) -> Network {
    Scenario::builtin(name, BuiltinParams { phi: Some(phi), ..Default::default() })
        .and_then(|s| s.resolve_checked())
        .expect("built-in scenario resolves")
}
