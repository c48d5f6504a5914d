//! Stabilizer codes: definition, validation, codeword synthesis and logical
//! representative search.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{PauliLetter, PauliString, Phase};
use crate::report::{all_passed, Check};
use crate::state::{apply_pauli_add, StateVector};

/// `[[n, k]]` stabilizer code with one logical X/Z pair per logical qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerCode {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<PauliString>,
    pub logical_x: Vec<PauliString>,
    pub logical_z: Vec<PauliString>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub code: String,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        all_passed(&self.checks)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Per-qubit constraint used by [`StabilizerCode::logical_representative`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LetterConstraint {
    Free,
    Identity,
    Exactly(PauliLetter),
    /// The given letter or the identity.
    LetterOrIdentity(PauliLetter),
}

impl LetterConstraint {
    pub fn admits(self, l: PauliLetter) -> bool {
        match self {
            LetterConstraint::Free => true,
            LetterConstraint::Identity => l.is_identity(),
            LetterConstraint::Exactly(want) => l == want,
            LetterConstraint::LetterOrIdentity(want) => l.is_identity() || l == want,
        }
    }
}

/// Codeword of a code together with its logical amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceState {
    pub code: StabilizerCode,
    pub amplitudes: Vec<Complex64>,
    pub state: StateVector,
}

fn ps(s: &str) -> PauliString {
    s.parse().expect("builtin pauli literal")
}

fn z_pair(n: usize, a: usize, b: usize) -> PauliString {
    let mut letters = vec![PauliLetter::I; n];
    letters[a] = PauliLetter::Z;
    letters[b] = PauliLetter::Z;
    PauliString::new(Phase::ONE, letters).expect("non-empty")
}

fn parse_args(s: &str, prefix: &str) -> Option<Vec<usize>> {
    let inner = s.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|t| t.trim().parse().ok()).collect()
}

impl StabilizerCode {
    /// Built-in codes: `two-one-two`, `five-one-three`, `ghz(n)`, `ghz-split(n,m)`.
    pub fn builtin(name: &str) -> Result<StabilizerCode> {
        let name = name.trim();
        let code = match name {
            "two-one-two" => StabilizerCode {
                name: name.into(),
                n: 2,
                k: 1,
                generators: vec![ps("ZZ")],
                logical_x: vec![ps("XX")],
                logical_z: vec![ps("IZ")],
            },
            "five-one-three" => StabilizerCode {
                name: name.into(),
                n: 5,
                k: 1,
                generators: vec![ps("XZZXI"), ps("IXZZX"), ps("XIXZZ"), ps("ZXIXZ")],
                logical_x: vec![ps("XXXXX")],
                logical_z: vec![ps("ZZZZZ")],
            },
            _ => {
                if let Some(args) = parse_args(name, "ghz-split") {
                    let [n, m] = args[..] else {
                        return Err(Error::UnknownBuiltin(name.into()));
                    };
                    if n < 2 || m == 0 || m >= n {
                        return Err(Error::UnknownBuiltin(format!("{name}: need 0 < m < n")));
                    }
                    StabilizerCode {
                        name: format!("ghz-split({n},{m})"),
                        n,
                        k: 1,
                        generators: (1..n).map(|j| z_pair(n, 0, j)).collect(),
                        logical_x: vec![PauliString::new(Phase::ONE, vec![PauliLetter::X; n])?],
                        logical_z: vec![PauliString::single(n, m, PauliLetter::Z)],
                    }
                } else if let Some(args) = parse_args(name, "ghz") {
                    let [n] = args[..] else {
                        return Err(Error::UnknownBuiltin(name.into()));
                    };
                    if n < 2 {
                        return Err(Error::UnknownBuiltin(format!("{name}: need n ≥ 2")));
                    }
                    StabilizerCode {
                        name: format!("ghz({n})"),
                        n,
                        k: 1,
                        generators: (0..n - 1).map(|j| z_pair(n, j, j + 1)).collect(),
                        logical_x: vec![PauliString::new(Phase::ONE, vec![PauliLetter::X; n])?],
                        logical_z: vec![PauliString::single(n, 0, PauliLetter::Z)],
                    }
                } else {
                    return Err(Error::UnknownBuiltin(name.into()));
                }
            }
        };
        let report = code.validate();
        if !report.passed() {
            let reason = report.failures().map(|c| c.name.clone()).collect::<Vec<_>>().join(", ");
            return Err(Error::InvalidCode { name: code.name, reason });
        }
        Ok(code)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let mut warnings = Vec::new();
        let r = self.n.saturating_sub(self.k);

        let all_ops = self.generators.iter().chain(&self.logical_x).chain(&self.logical_z);
        let bad_len: Vec<String> = all_ops.clone().filter(|p| p.len() != self.n).map(|p| p.to_string()).collect();
        checks.push(Check::from_bool("operator lengths", bad_len.is_empty(), bad_len.join(", ")));
        if !bad_len.is_empty() {
            return ValidationReport { code: self.name.clone(), checks, warnings };
        }

        checks.push(Check::from_bool(
            "generator count",
            self.k <= self.n && self.generators.len() == r,
            format!("expected n-k = {r}, found {}", self.generators.len()),
        ));
        let non_herm: Vec<String> = all_ops.filter(|p| !p.is_hermitian()).map(|p| p.to_string()).collect();
        checks.push(Check::from_bool("hermitian phases", non_herm.is_empty(), non_herm.join(", ")));

        let mut offending = None;
        'outer: for (a, ga) in self.generators.iter().enumerate() {
            for (b, gb) in self.generators.iter().enumerate().skip(a + 1) {
                if !ga.commutes(gb).unwrap_or(false) {
                    offending = Some(format!("generators {a} ({ga}) and {b} ({gb}) anticommute"));
                    break 'outer;
                }
            }
        }
        checks.push(Check::from_bool("generators commute", offending.is_none(), offending.unwrap_or_default()));

        let rank = gf2_rank(&self.generators);
        checks.push(Check::from_bool(
            "generators independent",
            rank == self.generators.len(),
            format!("symplectic rank {rank} for {} generators", self.generators.len()),
        ));

        if self.generators.len() <= 16 {
            let minus_identity = self.stabilizer_group().into_iter().position(|g| g.is_identity_letters() && g.phase() != Phase::ONE);
            checks.push(Check::from_bool(
                "-I not in stabilizer group",
                minus_identity.is_none(),
                minus_identity.map(|m| format!("generator subset mask {m:#b} multiplies to a non-trivial multiple of identity")).unwrap_or_default(),
            ));
        }

        checks.push(Check::from_bool(
            "logical operator count",
            self.logical_x.len() == self.k && self.logical_z.len() == self.k,
            format!("k = {}, {} logical X, {} logical Z", self.k, self.logical_x.len(), self.logical_z.len()),
        ));

        let mut bad = Vec::new();
        for (a, (x, z)) in self.logical_x.iter().zip(&self.logical_z).enumerate() {
            if x.commutes(z).unwrap_or(true) {
                bad.push(format!("logical pair {a}: {x} and {z} commute"));
            }
        }
        checks.push(Check::from_bool("logical pairs anticommute", bad.is_empty(), bad.join("; ")));

        let mut bad = Vec::new();
        for l in self.logical_x.iter().chain(&self.logical_z) {
            for (gi, g) in self.generators.iter().enumerate() {
                if !l.commutes(g).unwrap_or(false) {
                    bad.push(format!("{l} anticommutes with generator {gi} ({g})"));
                }
            }
        }
        checks.push(Check::from_bool("logicals commute with generators", bad.is_empty(), bad.join("; ")));

        let mut bad = Vec::new();
        for a in 0..self.k.min(self.logical_x.len()).min(self.logical_z.len()) {
            for b in 0..self.k.min(self.logical_x.len()).min(self.logical_z.len()) {
                if a == b {
                    continue;
                }
                let pairs = [
                    (&self.logical_x[a], &self.logical_x[b]),
                    (&self.logical_z[a], &self.logical_z[b]),
                    (&self.logical_x[a], &self.logical_z[b]),
                ];
                for (p, q) in pairs {
                    if !p.commutes(q).unwrap_or(false) {
                        bad.push(format!("{p} and {q} (indices {a}, {b}) anticommute"));
                    }
                }
            }
        }
        checks.push(Check::from_bool("distinct logicals commute", bad.is_empty(), bad.join("; ")));

        if self.k > 1 {
            warnings.push("real inner-product condition between logical branches is assumed, not checked".into());
        }
        ValidationReport { code: self.name.clone(), checks, warnings }
    }

    /// All `2^(n-k)` stabilizer elements; element `m` is the ordered product of
    /// generators whose bit is set in `m`.
    pub fn stabilizer_group(&self) -> Vec<PauliString> {
        let r = self.generators.len();
        let mut group = Vec::with_capacity(1 << r);
        group.push(PauliString::identity(self.n));
        for (j, g) in self.generators.iter().enumerate() {
            for m in 0..(1usize << j) {
                let next = group[m].multiply(g).expect("lengths validated");
                group.push(next);
            }
        }
        group
    }

    /// Projects a fiducial basis state onto `|0̄…0̄⟩`, trying basis states in order.
    pub fn logical_zero(&self) -> Result<StateVector> {
        let dim = 1usize << self.n;
        for fiducial in 0..dim {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[fiducial] = Complex64::new(1.0, 0.0);
            for op in self.generators.iter().chain(&self.logical_z) {
                let mut next: Vec<Complex64> = amps.iter().map(|a| a * 0.5).collect();
                apply_pauli_add(&amps, op, Complex64::new(0.5, 0.0), &mut next);
                amps = next;
            }
            let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if norm > 1e-12 {
                return Ok(StateVector::normalized(amps)?.canonical_phase());
            }
        }
        Err(Error::ProjectionFailed)
    }

    /// Logical basis state `|z̄⟩`, logical qubit 0 being the most significant bit of `z`.
    pub fn logical_basis(&self, zero: &StateVector, z: usize) -> Result<StateVector> {
        let mut s = zero.clone();
        for a in 0..self.k {
            if z >> (self.k - 1 - a) & 1 == 1 {
                s = s.apply(&self.logical_x[a])?;
            }
        }
        Ok(s)
    }

    /// `Σ a_z |z̄⟩` with canonical global phase.
    pub fn codeword(&self, amplitudes: &[Complex64]) -> Result<SourceState> {
        let report = self.validate();
        if !report.passed() {
            let reason = report.failures().map(|c| c.name.clone()).collect::<Vec<_>>().join(", ");
            return Err(Error::InvalidCode { name: self.name.clone(), reason });
        }
        let expected = 1usize << self.k;
        if amplitudes.len() != expected {
            return Err(Error::AmplitudeCount { expected, got: amplitudes.len() });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        let zero = self.logical_zero()?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << self.n];
        for (z, &a) in amplitudes.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let basis = self.logical_basis(&zero, z)?;
            for (acc, b) in amps.iter_mut().zip(basis.amplitudes()) {
                *acc += a * b;
            }
        }
        let state = StateVector::from_amplitudes(amps)?.canonical_phase();
        Ok(SourceState { code: self.clone(), amplitudes: amplitudes.to_vec(), state })
    }

    /// `cos φ |0̄⟩ + sin φ |1̄⟩` for single-logical-qubit codes.
    pub fn codeword_phi(&self, phi: f64) -> Result<SourceState> {
        if self.k != 1 {
            return Err(Error::AmplitudeCount { expected: 1 << self.k, got: 2 });
        }
        self.codeword(&[Complex64::new(phi.cos(), 0.0), Complex64::new(phi.sin(), 0.0)])
    }

    /// First element of `base · S` (stabilizer coset, enumerated in
    /// [`stabilizer_group`](Self::stabilizer_group) order) meeting every
    /// per-qubit constraint.
    pub fn logical_representative(&self, base: &PauliString, constraints: &[LetterConstraint]) -> Option<PauliString> {
        if base.len() != self.n || constraints.len() != self.n {
            return None;
        }
        self.stabilizer_group().into_iter().find_map(|s| {
            let candidate = s.multiply(base).ok()?;
            candidate
                .letters()
                .iter()
                .zip(constraints)
                .all(|(&l, c)| c.admits(l))
                .then_some(candidate)
        })
    }

    /// `true` if `p` commutes with every generator.
    pub fn is_logical_or_stabilizer(&self, p: &PauliString) -> bool {
        self.generators.iter().all(|g| p.commutes(g).unwrap_or(false))
    }
}

impl SourceState {
    pub fn num_qubits(&self) -> usize {
        self.state.num_qubits()
    }
}

/// Rank over GF(2) of the symplectic vectors of `ops`.
pub fn gf2_rank(ops: &[PauliString]) -> usize {
    let mut rows: Vec<Vec<bool>> = ops
        .iter()
        .map(|p| {
            let mut v = Vec::with_capacity(2 * p.len());
            v.extend(p.letters().iter().map(|l| l.bits().0));
            v.extend(p.letters().iter().map(|l| l.bits().1));
            v
        })
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] {
                let pivot_row = rows[rank].clone();
                for (a, b) in rows[r].iter_mut().zip(pivot_row) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}
