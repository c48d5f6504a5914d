//! Dense statevectors over qubit registers.
//!
//! Basis label bit `n-1-q` holds qubit `q`, so qubit 0 is the most significant
//! bit and the leftmost tensor factor.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliString;

pub const DEFAULT_QUBIT_CAP: usize = 20;

/// Tolerance for "exactly ±1" style assertions on floating-point results.
pub const EXACT_TOL: f64 = 1e-9;

const NORM_TOL: f64 = 1e-10;
const IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps amplitudes that must already be normalized.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_len(amps.len())?;
        if n > DEFAULT_QUBIT_CAP {
            return Err(Error::QubitCapExceeded { requested: n, cap: DEFAULT_QUBIT_CAP });
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(StateVector { n, amps })
    }

    /// Normalizes `amps`; fails on the zero vector.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr < 1e-300 {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let scale = 1.0 / norm_sqr.sqrt();
        StateVector::from_amplitudes(amps.into_iter().map(|a| a * scale).collect())
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > DEFAULT_QUBIT_CAP {
            return Err(Error::QubitCapExceeded { requested: n, cap: DEFAULT_QUBIT_CAP });
        }
        if index >= 1 << n {
            return Err(Error::QubitOutOfRange { index, n: 1 << n });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        StateVector::basis(n, 0)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self> {
        if n == 0 || n > DEFAULT_QUBIT_CAP {
            return Err(Error::QubitCapExceeded { requested: n, cap: DEFAULT_QUBIT_CAP });
        }
        let a = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Ok(StateVector { n, amps: vec![a; 1 << n] })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn tensor(states: &[StateVector]) -> Result<StateVector> {
        StateVector::tensor_with_cap(states, DEFAULT_QUBIT_CAP)
    }

    /// Kronecker product; the first state occupies the leading qubits.
    pub fn tensor_with_cap(states: &[StateVector], cap: usize) -> Result<StateVector> {
        let total: usize = states.iter().map(|s| s.n).sum();
        if total == 0 {
            return Err(Error::InvalidLayout("tensor product of no states".into()));
        }
        if total > cap {
            return Err(Error::QubitCapExceeded { requested: total, cap });
        }
        let mut amps = vec![Complex64::new(1.0, 0.0)];
        for s in states {
            let mut next = Vec::with_capacity(amps.len() * s.amps.len());
            for a in &amps {
                next.extend(s.amps.iter().map(|b| a * b));
            }
            amps = next;
        }
        Ok(StateVector { n: total, amps })
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn check_len(&self, p: &PauliString) -> Result<()> {
        if p.len() != self.n {
            return Err(Error::LengthMismatch { left: p.len(), right: self.n });
        }
        Ok(())
    }

    /// `⟨ψ|P|ψ⟩` for any phase.
    pub fn expectation_complex(&self, p: &PauliString) -> Result<Complex64> {
        self.check_len(p)?;
        let (x, z, y) = p.masks();
        let coeff = p.phase().to_complex() * Complex64::i().powu(y);
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, amp) in self.amps.iter().enumerate() {
            let partner = self.amps[b ^ x];
            let term = partner.conj() * amp;
            if (b & z).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        Ok(coeff * acc)
    }

    /// Real expectation of a hermitian Pauli string.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(Error::NotHermitian(p.to_string()));
        }
        let v = self.expectation_complex(p)?;
        if v.im.abs() > IMAG_TOL {
            return Err(Error::NotHermitian(format!("{p}: imaginary residue {}", v.im)));
        }
        Ok(v.re)
    }

    /// `P|ψ⟩`, phase included.
    pub fn apply(&self, p: &PauliString) -> Result<StateVector> {
        self.check_len(p)?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        apply_pauli_add(&self.amps, p, Complex64::new(1.0, 0.0), &mut out);
        Ok(StateVector { n: self.n, amps: out })
    }

    /// Unnormalized `(I + sign·O)/2 |ψ⟩` and its squared norm.
    fn projected(&self, obs: &Observable, outcome: i8) -> Result<(Vec<Complex64>, f64)> {
        obs.check_involutory()?;
        let half = Complex64::new(0.5, 0.0);
        let signed = Complex64::new(0.5 * f64::from(outcome), 0.0);
        let mut out: Vec<Complex64> = self.amps.iter().map(|a| a * half).collect();
        for (c, p) in obs.terms() {
            self.check_len(p)?;
            apply_pauli_add(&self.amps, p, signed * c, &mut out);
        }
        let prob = out.iter().map(|a| a.norm_sqr()).sum();
        Ok((out, prob))
    }

    /// Probability of `outcome` (±1) and the renormalized post-measurement state.
    pub fn project(&self, obs: &Observable, outcome: i8) -> Result<(f64, StateVector)> {
        if outcome != 1 && outcome != -1 {
            return Err(Error::Config(format!("outcome must be ±1, got {outcome}")));
        }
        let (amps, prob) = self.projected(obs, outcome)?;
        if prob < 1e-14 {
            return Err(Error::ZeroProbability { outcome });
        }
        let scale = 1.0 / prob.sqrt();
        let amps = amps.into_iter().map(|a| a * scale).collect();
        Ok((prob, StateVector { n: self.n, amps }))
    }

    /// Probability of the +1 outcome.
    pub fn prob_plus(&self, obs: &Observable) -> Result<f64> {
        obs.check_involutory()?;
        Ok((0.5 * (1.0 + obs.expectation(self)?)).clamp(0.0, 1.0))
    }

    /// Projective measurement with Born-rule sampling.
    pub fn measure<R: Rng + ?Sized>(&self, obs: &Observable, rng: &mut R) -> Result<(i8, StateVector)> {
        let p_plus = self.prob_plus(obs)?;
        let outcome = if rng.gen::<f64>() < p_plus { 1 } else { -1 };
        let (_, post) = self.project(obs, outcome)?;
        Ok((outcome, post))
    }

    /// Applies a 2×2 unitary `[[a, b], [c, d]]` to qubit `q` in place.
    pub fn apply_single_qubit(&mut self, q: usize, u: [[Complex64; 2]; 2]) -> Result<()> {
        if q >= self.n {
            return Err(Error::QubitOutOfRange { index: q, n: self.n });
        }
        let bit = 1usize << (self.n - 1 - q);
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let a0 = self.amps[b];
                let a1 = self.amps[b | bit];
                self.amps[b] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[b | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Multiplies by a global phase so the first nonzero amplitude is real positive.
    pub fn canonical_phase(mut self) -> Self {
        if let Some(first) = self.amps.iter().find(|a| a.norm() > 1e-12).copied() {
            let rot = first.conj() / first.norm();
            for a in &mut self.amps {
                *a *= rot;
            }
        }
        self
    }
}

fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::BadAmplitudeCount { len });
    }
    Ok(len.trailing_zeros() as usize)
}

/// `out += scale · P · amps`.
pub(crate) fn apply_pauli_add(amps: &[Complex64], p: &PauliString, scale: Complex64, out: &mut [Complex64]) {
    let (x, z, y) = p.masks();
    let coeff = scale * p.phase().to_complex() * Complex64::i().powu(y);
    for (b, amp) in amps.iter().enumerate() {
        let v = coeff * amp;
        if (b & z).count_ones() % 2 == 1 {
            out[b ^ x] -= v;
        } else {
            out[b ^ x] += v;
        }
    }
}

/// Real linear combination of hermitian Pauli strings.
///
/// Measurement requires an involution: a single string with unit coefficient,
/// or two anticommuting strings whose coefficients form a unit vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    terms: Vec<(f64, PauliString)>,
}

impl Observable {
    pub fn single(p: PauliString) -> Self {
        Observable { terms: vec![(1.0, p)] }
    }

    /// `c₁·P + c₂·Q`; zero coefficients are dropped.
    pub fn mixed(c1: f64, p: PauliString, c2: f64, q: PauliString) -> Self {
        let terms = [(c1, p), (c2, q)].into_iter().filter(|(c, _)| *c != 0.0).collect();
        Observable { terms }
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn check_involutory(&self) -> Result<()> {
        for (_, p) in &self.terms {
            if !p.is_hermitian() {
                return Err(Error::NotHermitian(p.to_string()));
            }
        }
        match self.terms.as_slice() {
            [(c, _)] if (c.abs() - 1.0).abs() < 1e-12 => Ok(()),
            [(c1, p), (c2, q)] => {
                if (c1 * c1 + c2 * c2 - 1.0).abs() > 1e-12 {
                    return Err(Error::NotInvolutory(format!("coefficients ({c1}, {c2}) not a unit vector")));
                }
                if p.commutes(q)? {
                    return Err(Error::NotInvolutory(format!("{p} and {q} commute")));
                }
                Ok(())
            }
            _ => Err(Error::NotInvolutory(self.to_string())),
        }
    }

    pub fn expectation(&self, s: &StateVector) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, (c, p)| Ok(acc + c * s.expectation(p)?))
    }
}

impl std::fmt::Display for Observable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, (c, p)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c:+.6}·{p}")?;
        }
        Ok(())
    }
}
