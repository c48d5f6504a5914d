//! Phased Pauli strings with exact ℤ₄ phase tracking.
//!
//! Qubit 0 is the leftmost tensor factor. Phases never touch floating point;
//! they are stored as the exponent `k` of `i^k`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A fourth root of unity `i^k`, stored as `k mod 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: u8) -> Self {
        Phase(k % 4)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `+1.0` or `-1.0` for real phases.
    pub fn sign(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl std::ops::Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        self * Phase::MINUS_ONE
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub const ALL: [PauliLetter; 4] = [PauliLetter::I, PauliLetter::X, PauliLetter::Y, PauliLetter::Z];

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliLetter::I),
            'X' => Some(PauliLetter::X),
            'Y' => Some(PauliLetter::Y),
            'Z' => Some(PauliLetter::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    pub fn is_identity(self) -> bool {
        self == PauliLetter::I
    }

    /// Symplectic bits `(x, z)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn commutes_with(self, other: PauliLetter) -> bool {
        self.is_identity() || other.is_identity() || self == other
    }

    /// `self · other = phase · letter`.
    pub fn product(self, other: PauliLetter) -> (Phase, PauliLetter) {
        use PauliLetter::*;
        match (self, other) {
            (I, p) | (p, I) => (Phase::ONE, p),
            (a, b) if a == b => (Phase::ONE, I),
            (X, Y) => (Phase::I, Z),
            (Y, Z) => (Phase::I, X),
            (Z, X) => (Phase::I, Y),
            (Y, X) => (Phase::MINUS_I, Z),
            (Z, Y) => (Phase::MINUS_I, X),
            (X, Z) => (Phase::MINUS_I, Y),
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for PauliLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// `phase · P₀ ⊗ P₁ ⊗ … ⊗ Pₙ₋₁`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<PauliLetter>,
}

impl PauliString {
    pub fn new(phase: Phase, letters: Vec<PauliLetter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyPauli);
        }
        Ok(PauliString { phase, letters })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity on zero qubits");
        PauliString { phase: Phase::ONE, letters: vec![PauliLetter::I; n] }
    }

    /// Single non-identity letter on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, letter: PauliLetter) -> Self {
        let mut p = PauliString::identity(n);
        p.letters[q] = letter;
        p
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &[PauliLetter] {
        &self.letters
    }

    pub fn letter(&self, q: usize) -> PauliLetter {
        self.letters[q]
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn negated(mut self) -> Self {
        self.phase = -self.phase;
        self
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn is_identity_letters(&self) -> bool {
        self.letters.iter().all(|l| l.is_identity())
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|l| !l.is_identity()).count()
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&q| !self.letters[q].is_identity()).collect()
    }

    pub fn same_letters(&self, other: &PauliString) -> bool {
        self.letters == other.letters
    }

    fn check_len(&self, other: &PauliString) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(())
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        self.check_len(other)?;
        let mut phase = self.phase * other.phase;
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (p, l) = a.product(b);
                phase = phase * p;
                l
            })
            .collect();
        Ok(PauliString { phase, letters })
    }

    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_len(other)?;
        Ok(self.anticommuting_positions(other).is_multiple_of(2))
    }

    fn anticommuting_positions(&self, other: &PauliString) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count()
    }

    /// Places `self` on `positions` of an `n`-qubit register, identity elsewhere.
    pub fn embed(&self, positions: &[usize], n: usize) -> Result<PauliString> {
        if positions.len() != self.len() {
            return Err(Error::LengthMismatch { left: positions.len(), right: self.len() });
        }
        let mut letters = vec![PauliLetter::I; n];
        let mut used = vec![false; n];
        for (&q, &l) in positions.iter().zip(&self.letters) {
            if q >= n {
                return Err(Error::QubitOutOfRange { index: q, n });
            }
            if used[q] {
                return Err(Error::DuplicateQubit(q));
            }
            used[q] = true;
            letters[q] = l;
        }
        PauliString::new(self.phase, letters)
    }

    /// Letters at `positions`, phase +1. The caller owns the overall phase.
    pub fn restrict(&self, positions: &[usize]) -> Result<PauliString> {
        let letters = positions
            .iter()
            .map(|&q| {
                self.letters
                    .get(q)
                    .copied()
                    .ok_or(Error::QubitOutOfRange { index: q, n: self.len() })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(Phase::ONE, letters)
    }

    /// Same phase with identity letters forced at `positions`.
    pub fn with_identity_at(&self, positions: &[usize]) -> Result<PauliString> {
        let mut out = self.clone();
        for &q in positions {
            if q >= self.len() {
                return Err(Error::QubitOutOfRange { index: q, n: self.len() });
            }
            out.letters[q] = PauliLetter::I;
        }
        Ok(out)
    }

    /// Bit masks over basis-state labels (qubit 0 is the most significant bit):
    /// `(x_mask, z_mask, y_count)`.
    pub fn masks(&self) -> (usize, usize, u32) {
        let n = self.len();
        let mut x = 0usize;
        let mut z = 0usize;
        let mut y = 0u32;
        for (q, l) in self.letters.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            let (xb, zb) = l.bits();
            if xb {
                x |= bit;
            }
            if zb {
                z |= bit;
            }
            if xb && zb {
                y += 1;
            }
        }
        (x, z, y)
    }

    /// Letter-only form, e.g. `ZZXIX`.
    pub fn letters_string(&self) -> String {
        self.letters.iter().map(|l| l.as_char()).collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.phase, self.letters_string())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, rest) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (imaginary, rest) = match rest.strip_prefix('i') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let letters = rest
            .chars()
            .map(|c| PauliLetter::from_char(c).ok_or_else(|| Error::ParsePauli(s.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::ParsePauli(s.to_string()));
        }
        let mut phase = if imaginary { Phase::I } else { Phase::ONE };
        if negative {
            phase = -phase;
        }
        PauliString::new(phase, letters)
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Product of a list of equal-length strings, left to right.
pub fn product<'a, I>(ops: I) -> Result<Option<PauliString>>
where
    I: IntoIterator<Item = &'a PauliString>,
{
    let mut acc: Option<PauliString> = None;
    for op in ops {
        acc = Some(match acc {
            None => op.clone(),
            Some(a) => a.multiply(op)?,
        });
    }
    Ok(acc)
}

/// Complex linear combination of Pauli strings, keyed by letters with phases
/// folded into the coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<Vec<PauliLetter>, Complex64>,
}

impl PauliSum {
    pub fn zero(n: usize) -> Self {
        PauliSum { n, terms: BTreeMap::new() }
    }

    pub fn term(coeff: Complex64, p: &PauliString) -> Self {
        let mut s = PauliSum::zero(p.len());
        s.add_term(coeff, p);
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, coeff: Complex64, p: &PauliString) {
        debug_assert_eq!(p.len(), self.n);
        let c = coeff * p.phase().to_complex();
        let entry = self.terms.entry(p.letters().to_vec()).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if *entry == Complex64::new(0.0, 0.0) {
            self.terms.remove(p.letters());
        }
    }

    /// Terms as phase-free strings with their coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (Complex64, PauliString)> + '_ {
        self.terms.iter().map(|(l, c)| (*c, PauliString { phase: Phase::ONE, letters: l.clone() }))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn plus(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        let mut out = self.clone();
        for (c, p) in other.terms() {
            out.add_term(c, &p);
        }
        Ok(out)
    }

    pub fn times(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.n, right: other.n });
        }
        let mut out = PauliSum::zero(self.n);
        for (a, p) in self.terms() {
            for (b, q) in other.terms() {
                out.add_term(a * b, &p.multiply(&q)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let r = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(r, p("-iY"));
    }

    #[test]
    fn five_qubit_generator_products() {
        let g = [p("XZZXI"), p("IXZZX"), p("XIXZZ"), p("ZXIXZ")];
        let all = product(g.iter()).unwrap().unwrap();
        assert_eq!(all.to_string(), "+ZZXIX");
        let z = p("ZZZZZ");
        let rev = g[0].multiply(&g[2]).unwrap().multiply(&z).unwrap();
        assert_eq!(rev.to_string(), "-ZIXXI");
    }

    #[test]
    fn commutation_examples() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XZZXI").commutes(&p("IXZZX")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(p("X").multiply(&p("XX")), Err(Error::LengthMismatch { .. })));
        assert!(p("X").commutes(&p("XX")).is_err());
    }

    #[test]
    fn embed_places_letters() {
        assert_eq!(p("Z").embed(&[1], 3).unwrap(), p("IZI"));
        let g4 = p("ZXIXZ");
        let e = g4.embed(&[5, 6, 7, 8, 9], 10).unwrap();
        assert_eq!(e.letters_string(), "IIIIIZXIXZ");
        assert!(p("Z").embed(&[3], 3).is_err());
        assert!(matches!(p("ZZ").embed(&[1, 1], 3), Err(Error::DuplicateQubit(1))));
    }

    #[test]
    fn embedded_disjoint_supports_commute() {
        let a = p("XY").embed(&[0, 1], 4).unwrap();
        let b = p("ZZ").embed(&[2, 3], 4).unwrap();
        assert!(a.commutes(&b).unwrap());
    }

    #[test]
    fn restrict_cuts_letters() {
        let g = p("ZZXIX");
        assert_eq!(g.restrict(&[0]).unwrap(), p("Z"));
        assert_eq!(g.restrict(&[1, 2, 4]).unwrap(), p("ZXX"));
        assert_eq!(g.restrict(&[0, 1, 2, 3, 4]).unwrap(), g);
        assert_eq!(p("-ZZ").restrict(&[0, 1]).unwrap(), p("ZZ"));
        assert!(g.restrict(&[5]).is_err());
    }

    #[test]
    fn text_form() {
        for s in ["+XZZXI", "-IZXXI", "+iY", "-iXZ"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("XZ").phase(), Phase::ONE);
        assert_eq!(p("iXZ").phase(), Phase::I);
        assert!("".parse::<PauliString>().is_err());
        assert!("+XQ".parse::<PauliString>().is_err());
        assert!("-".parse::<PauliString>().is_err());
    }

    fn letter() -> impl Strategy<Value = PauliLetter> {
        prop_oneof![
            Just(PauliLetter::I),
            Just(PauliLetter::X),
            Just(PauliLetter::Y),
            Just(PauliLetter::Z)
        ]
    }

    fn pair(max: usize) -> impl Strategy<Value = (PauliString, PauliString)> {
        (1..=max).prop_flat_map(|n| {
            (
                0u8..4,
                proptest::collection::vec(letter(), n),
                0u8..4,
                proptest::collection::vec(letter(), n),
            )
                .prop_map(|(pa, la, pb, lb)| {
                    (
                        PauliString::new(Phase::from_exponent(pa), la).unwrap(),
                        PauliString::new(Phase::from_exponent(pb), lb).unwrap(),
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn products_agree_up_to_commutation_sign((a, b) in pair(8)) {
            let ab = a.multiply(&b).unwrap();
            let ba = b.multiply(&a).unwrap();
            prop_assert!(ab.same_letters(&ba));
            prop_assert_eq!(ab.phase() == ba.phase(), a.commutes(&b).unwrap());
        }

        #[test]
        fn left_multiplication_is_an_involution_on_letters((a, b) in pair(8)) {
            let aab = a.multiply(&a.multiply(&b).unwrap()).unwrap();
            prop_assert!(aab.same_letters(&b));
        }

        #[test]
        fn hermitian_strings_square_to_identity((a, _b) in pair(8)) {
            let sq = a.multiply(&a).unwrap();
            prop_assert!(sq.is_identity_letters());
            prop_assert_eq!(sq.phase() == Phase::ONE, a.is_hermitian());
        }

        #[test]
        fn commutation_follows_parity_rule((a, b) in pair(8)) {
            let odd = a.letters().iter().zip(b.letters())
                .filter(|(x, y)| !x.is_identity() && !y.is_identity() && x != y)
                .count() % 2 == 1;
            prop_assert_eq!(a.commutes(&b).unwrap(), !odd);
        }

        #[test]
        fn text_round_trip((a, _b) in pair(10)) {
            let back: PauliString = a.to_string().parse().unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
