//! K-locality network layouts, operator selections, qubit classification and
//! the parity conditions that gate observable synthesis.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::code::{SourceState, StabilizerCode};
use crate::error::{Error, Result};
use crate::pauli::{PauliLetter, PauliString};
use crate::report::{all_passed, Check};
use crate::state::{StateVector, EXACT_TOL};

/// A measuring party. Indices are zero-based; text form is one-based (`S1`, `R1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    Source(usize),
    Receiver(usize),
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Agent::Source(s) => write!(f, "S{}", s + 1),
            Agent::Receiver(m) => write!(f, "R{}", m + 1),
        }
    }
}

impl FromStr for Agent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLayout(format!("bad agent label {s:?}"));
        let s = s.trim();
        let (kind, num) = s.split_at(s.char_indices().nth(1).map_or(s.len(), |(i, _)| i));
        let idx: usize = num.parse().map_err(|_| bad())?;
        if idx == 0 {
            return Err(bad());
        }
        match kind {
            "S" | "s" => Ok(Agent::Source(idx - 1)),
            "R" | "r" => Ok(Agent::Receiver(idx - 1)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Agent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Agent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Who holds which qubit.
///
/// `partition` is `0 = e₀ < e₁ < … < e_K = N`: source agent `s` holds sources
/// `e_s .. e_{s+1}` (zero-based, half open).
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    source_qubits: Vec<usize>,
    k: usize,
    m: usize,
    partition: Vec<usize>,
    assignment: Vec<Vec<Agent>>,
    offsets: Vec<usize>,
}

impl NetworkLayout {
    pub fn new(
        source_qubits: Vec<usize>,
        k: usize,
        m: usize,
        partition: Vec<usize>,
        assignment: Vec<Vec<Agent>>,
    ) -> Result<Self> {
        let n_sources = source_qubits.len();
        let bad = |msg: String| Err(Error::InvalidLayout(msg));
        if n_sources == 0 {
            return bad("no sources".into());
        }
        if k == 0 {
            return bad("at least one source agent is required".into());
        }
        if partition.len() != k + 1 || partition[0] != 0 || partition[k] != n_sources {
            return bad(format!("partition must run 0 = e0 < … < eK = {n_sources}, got {partition:?}"));
        }
        if partition.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("partition must be strictly increasing, got {partition:?}"));
        }
        if assignment.len() != n_sources {
            return bad(format!("assignment covers {} sources, expected {n_sources}", assignment.len()));
        }
        let mut offsets = Vec::with_capacity(n_sources);
        let mut total = 0;
        for (i, (&n_i, agents)) in source_qubits.iter().zip(&assignment).enumerate() {
            if n_i == 0 {
                return bad(format!("source {} emits no qubits", i + 1));
            }
            if agents.len() != n_i {
                return bad(format!("source {} has {n_i} qubits but {} assignments", i + 1, agents.len()));
            }
            let holder = (0..k).find(|&s| partition[s] <= i && i < partition[s + 1]).expect("partition covers");
            let mut held = 0;
            for (j, agent) in agents.iter().enumerate() {
                match *agent {
                    Agent::Source(s) if s == holder => held += 1,
                    Agent::Source(s) => {
                        return bad(format!(
                            "qubit ({},{}) assigned to S{} but source {} is held by S{}",
                            i + 1,
                            j + 1,
                            s + 1,
                            i + 1,
                            holder + 1
                        ))
                    }
                    Agent::Receiver(r) if r >= m => {
                        return bad(format!("qubit ({},{}) assigned to R{} but M = {m}", i + 1, j + 1, r + 1))
                    }
                    Agent::Receiver(_) => {}
                }
            }
            if held == 0 {
                return bad(format!("source {} keeps no qubit at its holder S{}", i + 1, holder + 1));
            }
            offsets.push(total);
            total += n_i;
        }
        Ok(NetworkLayout { source_qubits, k, m, partition, assignment, offsets })
    }

    pub fn num_sources(&self) -> usize {
        self.source_qubits.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn source_qubits(&self) -> &[usize] {
        &self.source_qubits
    }

    pub fn assignment(&self) -> &[Vec<Agent>] {
        &self.assignment
    }

    pub fn total_qubits(&self) -> usize {
        self.source_qubits.iter().sum()
    }

    pub fn offset(&self, source: usize) -> usize {
        self.offsets[source]
    }

    /// Global register index of qubit `j` of source `i`.
    pub fn global(&self, source: usize, qubit: usize) -> usize {
        self.offsets[source] + qubit
    }

    pub fn source_range(&self, source: usize) -> std::ops::Range<usize> {
        self.offsets[source]..self.offsets[source] + self.source_qubits[source]
    }

    pub fn holder(&self, source: usize) -> usize {
        (0..self.k).find(|&s| self.partition[s] <= source && source < self.partition[s + 1]).expect("validated")
    }

    pub fn agent_of(&self, source: usize, qubit: usize) -> Agent {
        self.assignment[source][qubit]
    }

    /// `(source, qubit)` pairs held by `agent`, in global order.
    pub fn qubits_of(&self, agent: Agent) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, agents) in self.assignment.iter().enumerate() {
            for (j, a) in agents.iter().enumerate() {
                if *a == agent {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn global_qubits_of(&self, agent: Agent) -> Vec<usize> {
        self.qubits_of(agent).into_iter().map(|(i, j)| self.global(i, j)).collect()
    }

    pub fn agents(&self) -> impl Iterator<Item = Agent> + '_ {
        (0..self.k).map(Agent::Source).chain((0..self.m).map(Agent::Receiver))
    }

    /// `reach[m][i]`: receiver `m` holds at least one qubit of source `i`.
    pub fn receiver_reach(&self) -> Vec<Vec<bool>> {
        (0..self.m)
            .map(|r| {
                self.assignment.iter().map(|agents| agents.contains(&Agent::Receiver(r))).collect()
            })
            .collect()
    }
}

/// The operators `g`, `h` and optional `h′` chosen for one source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceOperators {
    pub g: PauliString,
    pub h: PauliString,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_prime: Option<PauliString>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSelection {
    pub sources: Vec<SourceOperators>,
}

impl OperatorSelection {
    pub fn new(sources: Vec<SourceOperators>) -> Self {
        OperatorSelection { sources }
    }

    /// Length match and `[g, h] = 0` per source.
    pub fn check_structure(&self, layout: &NetworkLayout) -> Result<()> {
        if self.sources.len() != layout.num_sources() {
            return Err(Error::InvalidSelection {
                source_index: self.sources.len(),
                reason: format!("{} selections for {} sources", self.sources.len(), layout.num_sources()),
            });
        }
        for (i, ops) in self.sources.iter().enumerate() {
            let n_i = layout.source_qubits()[i];
            let err = |reason: String| Error::InvalidSelection { source_index: i + 1, reason };
            for (label, p) in [("g", Some(&ops.g)), ("h", Some(&ops.h)), ("h'", ops.h_prime.as_ref())] {
                if let Some(p) = p {
                    if p.len() != n_i {
                        return Err(err(format!("{label} = {p} has length {}, source has {n_i} qubits", p.len())));
                    }
                    if !p.is_hermitian() {
                        return Err(err(format!("{label} = {p} is not hermitian")));
                    }
                }
            }
            if !ops.g.commutes(&ops.h)? {
                return Err(err(format!("g = {} and h = {} anticommute", ops.g, ops.h)));
            }
            if let Some(hp) = &ops.h_prime {
                if !ops.g.commutes(hp)? {
                    return Err(err(format!("g = {} and h' = {hp} anticommute", ops.g)));
                }
            }
        }
        Ok(())
    }

    /// `⟨g⟩ = 1` on every source state.
    pub fn check_stabilizing(&self, states: &[StateVector]) -> Result<()> {
        for (i, (ops, s)) in self.sources.iter().zip(states).enumerate() {
            let v = s.expectation(&ops.g)?;
            if (v - 1.0).abs() > EXACT_TOL {
                return Err(Error::InvalidSelection {
                    source_index: i + 1,
                    reason: format!("g = {} does not stabilize the source state (⟨g⟩ = {v:.12})", ops.g),
                });
            }
        }
        Ok(())
    }
}

/// Per-source classification of qubits by the commutation of `ŝ` and `t̂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceClass {
    /// Qubits (zero-based, within the source) where `ŝ` and `t̂` anticommute.
    pub d: Vec<usize>,
    /// Qubits where they commute.
    pub h: Vec<usize>,
    pub delta: Vec<bool>,
    /// Receiver-held qubits in `h`.
    pub idle: Vec<usize>,
    /// Per qubit: the non-identity letter of `ŝ` or `t̂` on idle qubits.
    pub o_hat: Vec<Option<PauliLetter>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub sources: Vec<SourceClass>,
}

impl Classification {
    pub fn is_idle(&self, source: usize, qubit: usize) -> bool {
        self.sources[source].idle.contains(&qubit)
    }
}

pub fn classify(layout: &NetworkLayout, selection: &OperatorSelection) -> Result<Classification> {
    selection.check_structure(layout)?;
    let sources = selection
        .sources
        .iter()
        .enumerate()
        .map(|(i, ops)| {
            let n_i = layout.source_qubits()[i];
            let delta: Vec<bool> = (0..n_i).map(|j| !ops.g.letter(j).commutes_with(ops.h.letter(j))).collect();
            let d = (0..n_i).filter(|&j| delta[j]).collect();
            let h: Vec<usize> = (0..n_i).filter(|&j| !delta[j]).collect();
            let idle: Vec<usize> =
                h.iter().copied().filter(|&j| matches!(layout.agent_of(i, j), Agent::Receiver(_))).collect();
            let o_hat = (0..n_i)
                .map(|j| {
                    if !idle.contains(&j) {
                        return None;
                    }
                    let (s, t) = (ops.g.letter(j), ops.h.letter(j));
                    if !s.is_identity() {
                        Some(s)
                    } else if !t.is_identity() {
                        Some(t)
                    } else {
                        None
                    }
                })
                .collect();
            SourceClass { d, h, delta, idle, o_hat }
        })
        .collect();
    Ok(Classification { sources })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityReport {
    pub checks: Vec<Check>,
}

impl ParityReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }

    pub fn violations(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| match &c.detail {
                Some(d) => format!("{}: {d}", c.name),
                None => c.name.clone(),
            })
            .collect()
    }
}

/// Which receiver-side parity conditions [`check_parity`] enforces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ParityPolicy {
    /// Every agent odd, `K + M` even: both `A` and `B` pairs anticommute.
    #[default]
    Strict,
    /// A receiver may hold an even, nonzero number of anticommuting qubits,
    /// in which case its `B₀` and `B₁` commute (a jointly measurable pair,
    /// as in a two-source Bell-state measurement). `K + M` is not checked.
    CommutingReceivers,
}

/// Source totals even, every agent odd, `K + M` even (receiver rules relaxed
/// under [`ParityPolicy::CommutingReceivers`]).
pub fn check_parity(layout: &NetworkLayout, classification: &Classification, policy: ParityPolicy) -> ParityReport {
    let mut checks = Vec::new();
    for (i, class) in classification.sources.iter().enumerate() {
        let count = class.d.len();
        checks.push(Check::from_bool(
            format!("source {} anticommuting-qubit count even", i + 1),
            count % 2 == 0,
            format!("|D| = {count}"),
        ));
    }
    for agent in layout.agents() {
        let count = layout.qubits_of(agent).iter().filter(|&&(i, j)| classification.sources[i].delta[j]).count();
        let relaxed = policy == ParityPolicy::CommutingReceivers && matches!(agent, Agent::Receiver(_));
        if relaxed && count % 2 == 0 {
            checks.push(Check::from_bool(
                format!("{agent} anticommuting-qubit count nonzero"),
                count > 0,
                format!("count = {count}; B0 and B1 commute"),
            ));
        } else {
            checks.push(Check::from_bool(
                format!("{agent} anticommuting-qubit count odd"),
                count % 2 == 1,
                format!("count = {count}"),
            ));
        }
    }
    if policy == ParityPolicy::Strict {
        let km = layout.k() + layout.m();
        checks.push(Check::from_bool("K+M even", km.is_multiple_of(2), format!("K+M = {km}")));
    }
    ParityReport { checks }
}

/// Layout, source states and operator choice for one Bell experiment.
#[derive(Debug, Clone)]
pub struct Network {
    pub layout: NetworkLayout,
    pub states: Vec<StateVector>,
    pub codes: Vec<StabilizerCode>,
    pub selection: OperatorSelection,
    pub classification: Classification,
    pub policy: ParityPolicy,
}

impl Network {
    pub fn new(layout: NetworkLayout, sources: Vec<SourceState>, selection: OperatorSelection) -> Result<Self> {
        let (codes, states) = sources.into_iter().map(|s| (s.code, s.state)).unzip();
        Network::from_states(layout, codes, states, selection)
    }

    /// Sources given as raw states; `codes[i]` is still used for logical
    /// representative searches.
    pub fn from_states(
        layout: NetworkLayout,
        codes: Vec<StabilizerCode>,
        states: Vec<StateVector>,
        selection: OperatorSelection,
    ) -> Result<Self> {
        if states.len() != layout.num_sources() || codes.len() != layout.num_sources() {
            return Err(Error::InvalidLayout(format!(
                "{} states and {} codes for {} sources",
                states.len(),
                codes.len(),
                layout.num_sources()
            )));
        }
        for (i, s) in states.iter().enumerate() {
            if s.num_qubits() != layout.source_qubits()[i] {
                return Err(Error::InvalidLayout(format!(
                    "source {} state has {} qubits, layout expects {}",
                    i + 1,
                    s.num_qubits(),
                    layout.source_qubits()[i]
                )));
            }
        }
        let classification = classify(&layout, &selection)?;
        selection.check_stabilizing(&states)?;
        Ok(Network { layout, states, codes, selection, classification, policy: ParityPolicy::Strict })
    }

    /// Same layout and operators with different source states.
    pub fn with_states(&self, states: Vec<StateVector>) -> Result<Self> {
        Ok(Network::from_states(self.layout.clone(), self.codes.clone(), states, self.selection.clone())?
            .with_policy(self.policy))
    }

    pub fn with_policy(mut self, policy: ParityPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn parity(&self) -> ParityReport {
        check_parity(&self.layout, &self.classification, self.policy)
    }

    pub fn global_state(&self) -> Result<StateVector> {
        StateVector::tensor(&self.states)
    }

    /// `g` of source `i` embedded in the global register.
    pub fn embed(&self, source: usize, p: &PauliString) -> Result<PauliString> {
        let positions: Vec<usize> = self.layout.source_range(source).collect();
        p.embed(&positions, self.layout.total_qubits())
    }
}
