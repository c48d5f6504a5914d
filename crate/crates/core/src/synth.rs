//! Local observables built by cutting `g` and `h` along the qubit assignment
//! and mixing the pieces with a per-agent angle.
//!
//! Source agent `k` measures `A_x = cos θ_k Ŝ + (-1)^x sin θ_k T̂`, receiver
//! `l` measures `B_0 = ∏ ŝ` or `B_1 = ∏ t̂` over its qubits. All operators are
//! stored embedded in the global register.

use serde::Serialize;

use crate::code::LetterConstraint;
use crate::error::{Error, Result};
use crate::network::{Agent, Network, NetworkLayout};
use crate::pauli::{PauliLetter, PauliString, Phase};
use crate::state::Observable;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceObservables {
    pub agent: usize,
    /// Global indices of the held qubits.
    pub qubits: Vec<usize>,
    pub s_hat: PauliString,
    pub t_hat: PauliString,
    pub theta: f64,
}

impl SourceObservables {
    pub fn a(&self, x: u8) -> Observable {
        let sign = if x == 0 { 1.0 } else { -1.0 };
        Observable::mixed(self.theta.cos(), self.s_hat.clone(), sign * self.theta.sin(), self.t_hat.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReceiverObservables {
    pub agent: usize,
    pub qubits: Vec<usize>,
    pub b0: PauliString,
    pub b1: PauliString,
}

impl ReceiverObservables {
    pub fn b(&self, y: u8) -> &PauliString {
        if y == 0 {
            &self.b0
        } else {
            &self.b1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observables {
    pub n: usize,
    pub sources: Vec<SourceObservables>,
    pub receivers: Vec<ReceiverObservables>,
}

impl Observables {
    pub fn k(&self) -> usize {
        self.sources.len()
    }

    pub fn m(&self) -> usize {
        self.receivers.len()
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.sources.iter().map(|s| s.theta).collect()
    }

    /// Agent-annotated listing, one line per observable.
    pub fn describe(&self, layout: &NetworkLayout) -> Vec<String> {
        let mut out = Vec::new();
        for s in &self.sources {
            let agent = Agent::Source(s.agent);
            out.push(format!(
                "{agent}: A_x = cos({:.6})·{} + (-1)^x sin({:.6})·{}",
                s.theta,
                annotate(layout, &s.s_hat),
                s.theta,
                annotate(layout, &s.t_hat)
            ));
        }
        for r in &self.receivers {
            let agent = Agent::Receiver(r.agent);
            out.push(format!("{agent}: B0 = {}", annotate(layout, &r.b0)));
            out.push(format!("{agent}: B1 = {}", annotate(layout, &r.b1)));
        }
        out
    }
}

/// `Z(1,2)X(1,3)·Z(2,2)` style rendering with one-based `(source, qubit)` labels.
pub fn annotate(layout: &NetworkLayout, p: &PauliString) -> String {
    let mut groups = Vec::new();
    for i in 0..layout.num_sources() {
        let group: String = layout
            .source_range(i)
            .enumerate()
            .filter(|&(_, q)| !p.letter(q).is_identity())
            .map(|(j, q)| format!("{}({},{})", p.letter(q), i + 1, j + 1))
            .collect();
        if !group.is_empty() {
            groups.push(group);
        }
    }
    let body = if groups.is_empty() { "I".to_string() } else { groups.join("·") };
    match p.phase().sign() {
        Some(s) if s < 0.0 => format!("-{body}"),
        Some(_) => body,
        None => format!("{}{body}", p.phase()),
    }
}

fn gate(network: &Network) -> Result<()> {
    let report = network.parity();
    if !report.passed() {
        return Err(Error::ParityViolation(report.violations().join("; ")));
    }
    Ok(())
}

/// Letters of `g` (or `h`) on every qubit held by `agent`, identity elsewhere.
fn cut(network: &Network, agent: Agent, from_g: bool) -> (Vec<usize>, PauliString) {
    let layout = &network.layout;
    let n = layout.total_qubits();
    let mut letters = vec![PauliLetter::I; n];
    let mut qubits = Vec::new();
    for (i, j) in layout.qubits_of(agent) {
        let ops = &network.selection.sources[i];
        let letter = if from_g { ops.g.letter(j) } else { ops.h.letter(j) };
        let q = layout.global(i, j);
        letters[q] = letter;
        qubits.push(q);
    }
    (qubits, PauliString::new(Phase::ONE, letters).expect("non-empty register"))
}

pub fn build_source(network: &Network, thetas: &[f64]) -> Result<Vec<SourceObservables>> {
    gate(network)?;
    let k = network.layout.k();
    if thetas.len() != k {
        return Err(Error::Config(format!("{} angles for {k} source agents", thetas.len())));
    }
    Ok((0..k)
        .map(|s| {
            let (qubits, s_hat) = cut(network, Agent::Source(s), true);
            let (_, t_hat) = cut(network, Agent::Source(s), false);
            SourceObservables { agent: s, qubits, s_hat, t_hat, theta: thetas[s] }
        })
        .collect())
}

pub fn build_receiver(network: &Network) -> Result<Vec<ReceiverObservables>> {
    gate(network)?;
    Ok((0..network.layout.m())
        .map(|r| {
            let (qubits, b0) = cut(network, Agent::Receiver(r), true);
            let (_, b1) = cut(network, Agent::Receiver(r), false);
            ReceiverObservables { agent: r, qubits, b0, b1 }
        })
        .collect())
}

pub fn build(network: &Network, thetas: &[f64]) -> Result<Observables> {
    Ok(Observables {
        n: network.layout.total_qubits(),
        sources: build_source(network, thetas)?,
        receivers: build_receiver(network)?,
    })
}

/// Same angle for every source agent.
pub fn build_uniform(network: &Network, theta: f64) -> Result<Observables> {
    build(network, &vec![theta; network.layout.k()])
}

/// Operators for the tilted test over the sources in `members`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltObservables {
    pub members: Vec<usize>,
    /// Chosen phase-flip representative per member, local to its source.
    pub h_primes: Vec<PauliString>,
    /// `∏ Z̄` over members, global.
    pub p: PauliString,
    /// Per receiver, the operator measured in place of `B_0`.
    pub b0_bar: Vec<PauliString>,
    /// Per receiver, global qubits whose outcomes are dropped to recover `B_0`
    /// (the sign of `b0_bar` is divided out as well).
    pub b0_drop: Vec<Vec<usize>>,
    /// Per receiver, global qubits whose outcomes are dropped to recover `P`.
    pub p_drop: Vec<Vec<usize>>,
    pub notes: Vec<String>,
}

impl TiltObservables {
    /// `B_0` of receiver `r` recovered from `b0_bar` by masking.
    pub fn recovered_b0(&self, r: usize) -> Result<PauliString> {
        let masked = self.b0_bar[r].with_identity_at(&self.b0_drop[r])?;
        Ok(masked.with_phase(Phase::ONE))
    }

    /// `P` recovered from the product of all `b0_bar` by masking.
    pub fn recovered_p(&self) -> Result<PauliString> {
        let mut acc: Option<PauliString> = None;
        for (b, drop) in self.b0_bar.iter().zip(&self.p_drop) {
            let masked = b.with_identity_at(drop)?;
            acc = Some(match acc {
                None => masked,
                Some(a) => a.multiply(&masked)?,
            });
        }
        acc.ok_or_else(|| Error::Config("no receivers".into()))
    }
}

/// Per-qubit admissibility of a phase-flip representative for source `i`:
/// identity on source-held qubits, free among `{ô, I}` on idle qubits, equal
/// to `ŝ` elsewhere.
pub fn tilt_constraints(network: &Network, source: usize) -> Vec<LetterConstraint> {
    let class = &network.classification.sources[source];
    let g = &network.selection.sources[source].g;
    (0..network.layout.source_qubits()[source])
        .map(|j| match network.layout.agent_of(source, j) {
            Agent::Source(_) => LetterConstraint::Identity,
            Agent::Receiver(_) if class.idle.contains(&j) => {
                class.o_hat[j].map_or(LetterConstraint::Identity, LetterConstraint::LetterOrIdentity)
            }
            Agent::Receiver(_) => LetterConstraint::Exactly(g.letter(j)),
        })
        .collect()
}

fn describe_failure(network: &Network, source: usize, candidate: &PauliString, cons: &[LetterConstraint]) -> String {
    let mut reasons = Vec::new();
    for (j, (c, l)) in cons.iter().zip(candidate.letters()).enumerate() {
        if !c.admits(*l) {
            let which = match network.layout.agent_of(source, j) {
                Agent::Source(_) => "identity on source-held qubit",
                Agent::Receiver(_) if network.classification.is_idle(source, j) => "idle qubit must carry ô or I",
                Agent::Receiver(_) => "non-idle receiver qubit must equal ŝ",
            };
            reasons.push(format!("qubit ({},{}) has {l}: {which}", source + 1, j + 1));
        }
    }
    reasons.join("; ")
}

pub fn build_tilted(network: &Network, members: &[usize]) -> Result<TiltObservables> {
    gate(network)?;
    let layout = &network.layout;
    let n = layout.total_qubits();
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    let mut h_primes = Vec::new();
    let mut notes = Vec::new();
    let mut p = PauliString::identity(n);
    for &i in &members {
        if i >= layout.num_sources() {
            return Err(Error::Config(format!("tilt member {} out of range", i + 1)));
        }
        let code = &network.codes[i];
        let candidate = match &network.selection.sources[i].h_prime {
            Some(hp) => hp.clone(),
            None => code.logical_z.last().cloned().ok_or_else(|| Error::NoRepresentative {
                source_index: i + 1,
                reason: "code has no logical Z".into(),
            })?,
        };
        let cons = tilt_constraints(network, i);
        let chosen = if candidate.letters().iter().zip(&cons).all(|(l, c)| c.admits(*l)) {
            candidate
        } else {
            let why = describe_failure(network, i, &candidate, &cons);
            match code.logical_representative(&candidate, &cons) {
                Some(rep) => {
                    notes.push(format!("source {}: {candidate} rejected ({why}); using {rep}", i + 1));
                    rep
                }
                None => {
                    return Err(Error::NoRepresentative {
                        source_index: i + 1,
                        reason: format!("{candidate}: {why}; no element of its stabilizer coset qualifies"),
                    })
                }
            }
        };
        p = p.multiply(&network.embed(i, &chosen)?)?;
        h_primes.push(chosen);
    }

    let mut b0_bar = Vec::new();
    let mut b0_drop = Vec::new();
    let mut p_drop = Vec::new();
    for r in 0..layout.m() {
        let (qubits, b0) = cut(network, Agent::Receiver(r), true);
        let mut letters = b0.letters().to_vec();
        let mut dropped = Vec::new();
        for &q in &qubits {
            if letters[q].is_identity() && !p.letter(q).is_identity() {
                letters[q] = p.letter(q);
                dropped.push(q);
            }
        }
        let phase = if r == 0 { p.phase() } else { Phase::ONE };
        let bar = PauliString::new(phase, letters)?;
        let pd = qubits.iter().copied().filter(|&q| !bar.letter(q).is_identity() && p.letter(q).is_identity()).collect();
        for &q in &qubits {
            debug_assert!(p.letter(q).is_identity() || p.letter(q) == bar.letter(q));
        }
        b0_bar.push(bar);
        b0_drop.push(dropped);
        p_drop.push(pd);
    }
    if layout.m() == 0 && !members.is_empty() {
        return Err(Error::Config("tilted test needs at least one receiver".into()));
    }
    Ok(TiltObservables { members, h_primes, p, b0_bar, b0_drop, p_drop, notes })
}
