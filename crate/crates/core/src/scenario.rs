//! Scenario files: codes, source states, layout, operator selection, tilt
//! and run options, plus the named built-in scenarios.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::network::{Agent, Network, NetworkLayout, OperatorSelection, ParityPolicy, SourceOperators};
use crate::pauli::PauliString;
use crate::report::Check;
use crate::sampling::SamplingMode;
use crate::state::StateVector;

/// A real amplitude or a `[re, im]` pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

impl Amplitude {
    pub fn value(self) -> Complex64 {
        match self {
            Amplitude::Real(r) => Complex64::new(r, 0.0),
            Amplitude::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Exactly one of `phi`, `amplitudes` (logical) or `physical` must be set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<Amplitude>>,
    /// Raw state on the physical qubits, bypassing the codeword map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical: Option<Vec<Amplitude>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionSpec {
    pub g: PauliString,
    pub h: PauliString,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_prime: Option<PauliString>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BetaKeyword {
    Auto,
}

/// `β` as a number or `"auto"` for `β_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Value(f64),
    Keyword(BetaKeyword),
}

impl BetaSpec {
    pub fn parse(s: &str) -> Result<BetaSpec> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(BetaSpec::Keyword(BetaKeyword::Auto));
        }
        s.parse::<f64>().map(BetaSpec::Value).map_err(|_| Error::Config(format!("β must be a number or \"auto\", got {s:?}")))
    }

    pub fn value(self) -> Option<f64> {
        match self {
            BetaSpec::Value(v) => Some(v),
            BetaSpec::Keyword(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiltSpec {
    /// One-based source indices.
    pub members: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phibar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<BetaSpec>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SamplingMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Code definitions referenced by name from `sources`; built-in names
    /// need no entry.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub codes: Vec<StabilizerCode>,
    pub sources: Vec<SourceSpec>,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub partition: Vec<usize>,
    /// `[source, qubit, agent]`, one-based source and qubit.
    pub assignment: Vec<(usize, usize, Agent)>,
    pub selection: Vec<SelectionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tilt: Option<TiltSpec>,
    #[serde(default)]
    pub options: RunOptions,
    #[serde(default)]
    pub parity: ParityPolicy,
}

/// Knobs of the built-in scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BuiltinParams {
    pub phi: Option<f64>,
    /// Number of sources for `star`.
    pub n: Option<usize>,
    pub phibar: Option<f64>,
}

pub const BUILTIN_NAMES: [&str; 7] =
    ["chsh", "chsh-tilted", "five-one-three-split", "ghz-split(n,m)", "example-a", "example-b", "star(N)"];

fn ps(s: &str) -> PauliString {
    s.parse().expect("valid built-in operator")
}

fn phi_source(code: &str, phi: f64) -> SourceSpec {
    SourceSpec { code: code.into(), phi: Some(phi), amplitudes: None, physical: None }
}

fn logical_source(code: &str, z: usize) -> SourceSpec {
    let amps = (0..2).map(|i| Amplitude::Real(if i == z { 1.0 } else { 0.0 })).collect();
    SourceSpec { code: code.into(), phi: None, amplitudes: Some(amps), physical: None }
}

fn parse_call(name: &str, prefix: &str) -> Option<Vec<usize>> {
    let inner = name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|t| t.trim().parse().ok()).collect()
}

/// One source agent, one receiver; the agent holds the first `held` qubits.
fn single_source(
    name: String,
    _code: &str,
    n: usize,
    held: usize,
    source: SourceSpec,
    g: &str,
    h: &str,
) -> Scenario {
    let assignment =
        (0..n).map(|j| (1, j + 1, if j < held { Agent::Source(0) } else { Agent::Receiver(0) })).collect();
    Scenario {
        name,
        codes: Vec::new(),
        sources: vec![source],
        k: 1,
        m: 1,
        partition: vec![0, 1],
        assignment,
        selection: vec![SelectionSpec { g: ps(g), h: ps(h), h_prime: None }],
        tilt: None,
        options: RunOptions::default(),
        parity: ParityPolicy::Strict,
    }
}

/// `k` five-qubit sources, one per source agent, agent `i` holding qubit
/// `held` (zero-based) of source `i`, one receiver holding the rest.
fn five_qubit_network(name: String, sources: Vec<SourceSpec>, held: usize, h: &str) -> Scenario {
    let k = sources.len();
    let mut assignment = Vec::new();
    for i in 0..k {
        for j in 0..5 {
            let agent = if j == held { Agent::Source(i) } else { Agent::Receiver(0) };
            assignment.push((i + 1, j + 1, agent));
        }
    }
    Scenario {
        name,
        codes: Vec::new(),
        sources,
        k,
        m: 1,
        partition: (0..=k).collect(),
        assignment,
        selection: vec![SelectionSpec { g: ps("ZZXIX"), h: ps(h), h_prime: None }; k],
        tilt: None,
        options: RunOptions::default(),
        parity: ParityPolicy::Strict,
    }
}

impl Scenario {
    /// Built-in scenarios by name; see [`BUILTIN_NAMES`].
    pub fn builtin(name: &str, params: BuiltinParams) -> Result<Scenario> {
        let name = name.trim();
        let phi = params.phi;
        let scenario = match name {
            "chsh" => single_source("chsh".into(), "two-one-two", 2, 1, phi_source("two-one-two", phi.unwrap_or(FRAC_PI_8)), "ZZ", "XX"),
            "chsh-tilted" => {
                let phi = phi.unwrap_or(FRAC_PI_8);
                let mut s = single_source("chsh-tilted".into(), "two-one-two", 2, 1, phi_source("two-one-two", phi), "ZZ", "XX");
                s.tilt = Some(TiltSpec {
                    members: vec![1],
                    phibar: Some(params.phibar.unwrap_or(phi)),
                    beta: Some(BetaSpec::Keyword(BetaKeyword::Auto)),
                });
                s
            }
            "five-one-three-split" => single_source(
                "five-one-three-split".into(),
                "five-one-three",
                5,
                1,
                phi_source("five-one-three", phi.unwrap_or(FRAC_PI_8)),
                "ZZXIX",
                "XXXXX",
            ),
            "example-a" => {
                let phi = phi.unwrap_or(FRAC_PI_4);
                let sources = vec![phi_source("five-one-three", phi); 2];
                let mut s = five_qubit_network("example-a".into(), sources, 0, "XXXXX");
                s.parity = ParityPolicy::CommutingReceivers;
                s
            }
            "example-b" => {
                let sources = vec![logical_source("five-one-three", 0), logical_source("five-one-three", 1)];
                let mut s = five_qubit_network("example-b".into(), sources, 0, "XZZXI");
                s.parity = ParityPolicy::CommutingReceivers;
                s
            }
            _ if name == "star" || name.starts_with("star(") => {
                let n = if name == "star" {
                    params.n.unwrap_or(3)
                } else {
                    match parse_call(name, "star").as_deref() {
                        Some([n]) => *n,
                        _ => return Err(Error::UnknownBuiltin(name.into())),
                    }
                };
                if n == 0 {
                    return Err(Error::UnknownBuiltin(format!("{name}: need N ≥ 1")));
                }
                let phi = phi.or(params.phibar).unwrap_or(FRAC_PI_8);
                let sources = vec![phi_source("five-one-three", phi); n];
                let mut s = five_qubit_network(format!("star({n})"), sources, 1, "XXXXX");
                s.tilt = Some(TiltSpec {
                    members: (1..=n).collect(),
                    phibar: Some(params.phibar.unwrap_or(phi)),
                    beta: Some(BetaSpec::Keyword(BetaKeyword::Auto)),
                });
                s
            }
            _ if name.starts_with("ghz-split(") => {
                let Some([n, m]) = parse_call(name, "ghz-split").as_deref().and_then(|a| <[usize; 2]>::try_from(a).ok())
                else {
                    return Err(Error::UnknownBuiltin(name.into()));
                };
                if n < 2 || m == 0 || m >= n {
                    return Err(Error::UnknownBuiltin(format!("{name}: need 0 < m < n")));
                }
                let code = format!("ghz-split({n},{m})");
                let mut g = vec!['I'; n];
                g[0] = 'Z';
                g[m] = 'Z';
                let g: String = g.into_iter().collect();
                let h = "X".repeat(n);
                single_source(code.clone(), &code, n, m, phi_source(&code, phi.unwrap_or(FRAC_PI_8)), &g, &h)
            }
            _ => return Err(Error::UnknownBuiltin(name.into())),
        };
        Ok(scenario)
    }

    pub fn from_json(text: &str) -> Result<Scenario> {
        serde_json::from_str(text).map_err(|e| Error::Json { line: e.line(), column: e.column(), message: e.to_string() })
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Scenario(e.to_string()))
    }

    /// SHA-256 of the compact JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("scenario serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// Sets `φ` on every source given by angle.
    pub fn with_phi(mut self, phi: f64) -> Self {
        for s in &mut self.sources {
            if s.phi.is_some() {
                s.phi = Some(phi);
            }
        }
        self
    }

    fn code(&self, name: &str) -> Result<StabilizerCode> {
        match self.codes.iter().find(|c| c.name == name) {
            Some(c) => {
                let report = c.validate();
                if !report.passed() {
                    let reason = report.failures().map(|c| c.name.clone()).collect::<Vec<_>>().join(", ");
                    return Err(Error::InvalidCode { name: name.into(), reason });
                }
                Ok(c.clone())
            }
            None => StabilizerCode::builtin(name),
        }
    }

    fn source_state(&self, index: usize, code: &StabilizerCode) -> Result<StateVector> {
        let spec = &self.sources[index];
        let given = [spec.phi.is_some(), spec.amplitudes.is_some(), spec.physical.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::Scenario(format!(
                "source {} needs exactly one of phi, amplitudes, physical",
                index + 1
            )));
        }
        if let Some(phi) = spec.phi {
            return Ok(code.codeword_phi(phi)?.state);
        }
        if let Some(a) = &spec.amplitudes {
            let amps: Vec<Complex64> = a.iter().map(|x| x.value()).collect();
            return Ok(code.codeword(&amps)?.state);
        }
        let amps: Vec<Complex64> = spec.physical.as_ref().expect("checked").iter().map(|x| x.value()).collect();
        if amps.len() != 1 << code.n {
            return Err(Error::AmplitudeCount { expected: 1 << code.n, got: amps.len() });
        }
        StateVector::from_amplitudes(amps)
    }

    pub fn layout(&self, codes: &[StabilizerCode]) -> Result<NetworkLayout> {
        let sizes: Vec<usize> = codes.iter().map(|c| c.n).collect();
        let mut slots: Vec<Vec<Option<Agent>>> = sizes.iter().map(|&n| vec![None; n]).collect();
        for &(i, j, agent) in &self.assignment {
            if i == 0 || i > sizes.len() || j == 0 || j > sizes[i - 1] {
                return Err(Error::InvalidLayout(format!("assignment entry ({i},{j}) out of range")));
            }
            if slots[i - 1][j - 1].replace(agent).is_some() {
                return Err(Error::InvalidLayout(format!("qubit ({i},{j}) assigned twice")));
            }
        }
        let mut assignment = Vec::new();
        for (i, row) in slots.into_iter().enumerate() {
            let mut agents = Vec::new();
            for (j, a) in row.into_iter().enumerate() {
                agents.push(a.ok_or_else(|| Error::InvalidLayout(format!("qubit ({},{}) unassigned", i + 1, j + 1)))?);
            }
            assignment.push(agents);
        }
        NetworkLayout::new(sizes, self.k, self.m, self.partition.clone(), assignment)
    }

    /// Builds the network; parity is not required to pass here.
    pub fn resolve(&self) -> Result<Network> {
        if self.sources.is_empty() {
            return Err(Error::Scenario("no sources".into()));
        }
        if self.selection.len() != self.sources.len() {
            return Err(Error::Scenario(format!(
                "{} selections for {} sources",
                self.selection.len(),
                self.sources.len()
            )));
        }
        let codes = self.sources.iter().map(|s| self.code(&s.code)).collect::<Result<Vec<_>>>()?;
        let states = (0..self.sources.len()).map(|i| self.source_state(i, &codes[i])).collect::<Result<Vec<_>>>()?;
        let layout = self.layout(&codes)?;
        let selection = OperatorSelection::new(
            self.selection
                .iter()
                .map(|s| SourceOperators { g: s.g.clone(), h: s.h.clone(), h_prime: s.h_prime.clone() })
                .collect(),
        );
        Ok(Network::from_states(layout, codes, states, selection)?.with_policy(self.parity))
    }

    /// Resolves and requires the parity conditions to pass.
    pub fn resolve_checked(&self) -> Result<Network> {
        let network = self.resolve()?;
        let parity = network.parity();
        if !parity.passed() {
            return Err(Error::ParityViolation(parity.violations().join("; ")));
        }
        Ok(network)
    }

    /// Zero-based tilt members, defaulting to every source.
    pub fn tilt_members(&self) -> Vec<usize> {
        match &self.tilt {
            Some(t) => t.members.iter().map(|&i| i.saturating_sub(1)).collect(),
            None => (0..self.sources.len()).collect(),
        }
    }

    /// `φ̄` from the tilt block, else from the first member source's `φ`.
    pub fn phi_bar(&self) -> Option<f64> {
        self.tilt
            .as_ref()
            .and_then(|t| t.phibar)
            .or_else(|| self.tilt_members().first().and_then(|&i| self.sources.get(i)).and_then(|s| s.phi))
    }

    /// Code, layout, selection and parity diagnostics.
    pub fn validate(&self) -> ScenarioValidation {
        let mut checks = Vec::new();
        let mut warnings = Vec::new();
        for spec in &self.sources {
            match self.code(&spec.code) {
                Ok(c) => {
                    let r = c.validate();
                    warnings.extend(r.warnings.iter().map(|w| format!("{}: {w}", c.name)));
                    checks.push(Check::from_bool(format!("code {}", c.name), r.passed(), ""));
                }
                Err(e) => checks.push(Check::fail(format!("code {}", spec.code), e.to_string())),
            }
        }
        match self.resolve() {
            Ok(network) => {
                checks.push(Check::pass("layout and selection"));
                checks.extend(network.parity().checks);
            }
            Err(e) => checks.push(Check::fail("layout and selection", e.to_string())),
        }
        let passed = crate::report::all_passed(&checks);
        ScenarioValidation { name: self.name.clone(), hash: self.hash(), passed, checks, warnings }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioValidation {
    pub name: String,
    pub hash: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

/// Built-in name or path to a JSON file.
pub fn load(spec: &str, params: BuiltinParams) -> Result<Scenario> {
    match Scenario::builtin(spec, params) {
        Ok(s) => Ok(s),
        Err(Error::UnknownBuiltin(_)) if std::path::Path::new(spec).exists() => {
            let text = std::fs::read_to_string(spec).map_err(|e| Error::Scenario(format!("{spec}: {e}")))?;
            let s = Scenario::from_json(&text)?;
            Ok(match params.phi {
                Some(phi) => s.with_phi(phi),
                None => s,
            })
        }
        Err(e) => Err(e),
    }
}
