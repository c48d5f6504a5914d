//! Test-side oracles written without the library's algebra: Pauli strings
//! applied qubit by qubit, dense Kronecker matrices, codewords by projection,
//! and a separate random scenario generator.
#![allow(dead_code)]

use netbell_core::network::{Agent, NetworkLayout};
use netbell_core::{Network, OperatorSelection, PauliString, SourceOperators, StabilizerCode, StateVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Complex64;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Phase and letters parsed from the printed form, e.g. `-iXZY`.
pub fn parse(text: &str) -> (C, Vec<char>) {
    let (mut phase, mut rest) = (c(1.0), text);
    if let Some(r) = rest.strip_prefix('-') {
        phase = c(-1.0);
        rest = r;
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r;
    }
    if let Some(r) = rest.strip_prefix('i') {
        phase *= C::new(0.0, 1.0);
        rest = r;
    }
    (phase, rest.chars().collect())
}

/// `P|ψ⟩` with qubit 0 the most significant bit of the basis index.
pub fn apply(text: &str, psi: &[C]) -> Vec<C> {
    let (phase, letters) = parse(text);
    let n = letters.len();
    assert_eq!(psi.len(), 1 << n);
    let mut out = vec![c(0.0); psi.len()];
    for (b, &amp) in psi.iter().enumerate() {
        let mut target = b;
        let mut f = phase * amp;
        for (q, &l) in letters.iter().enumerate() {
            let bit = (b >> (n - 1 - q)) & 1;
            match l {
                'I' => {}
                'X' => target ^= 1 << (n - 1 - q),
                'Z' => {
                    if bit == 1 {
                        f = -f;
                    }
                }
                'Y' => {
                    target ^= 1 << (n - 1 - q);
                    f *= if bit == 0 { C::new(0.0, 1.0) } else { C::new(0.0, -1.0) };
                }
                other => panic!("bad letter {other}"),
            }
        }
        out[target] += f;
    }
    out
}

pub fn inner(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn expect(text: &str, psi: &[C]) -> f64 {
    inner(psi, &apply(text, psi)).re
}

pub fn add(a: &[C], b: &[C], s: f64) -> Vec<C> {
    a.iter().zip(b).map(|(x, y)| x + y * s).collect()
}

pub fn scale(a: &[C], s: f64) -> Vec<C> {
    a.iter().map(|x| x * s).collect()
}

pub fn normalize(a: Vec<C>) -> Vec<C> {
    let n: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    a.into_iter().map(|x| x / n).collect()
}

pub fn kron(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Dense `2ⁿ × 2ⁿ` matrix of a printed Pauli string, row major.
pub fn dense(text: &str) -> Vec<C> {
    let (phase, letters) = parse(text);
    let (o, i, l) = (c(0.0), C::new(0.0, 1.0), c(1.0));
    let mut m = vec![phase];
    for ch in letters {
        let single = match ch {
            'I' => vec![l, o, o, l],
            'X' => vec![o, l, l, o],
            'Y' => vec![o, -i, i, o],
            'Z' => vec![l, o, o, -l],
            other => panic!("bad letter {other}"),
        };
        m = kron_matrix(&m, &single);
    }
    m
}

fn dim_of(m: &[C]) -> usize {
    (m.len() as f64).sqrt().round() as usize
}

pub fn kron_matrix(a: &[C], b: &[C]) -> Vec<C> {
    let (da, db) = (dim_of(a), dim_of(b));
    let d = da * db;
    let mut out = vec![c(0.0); d * d];
    for r in 0..d {
        for col in 0..d {
            out[r * d + col] = a[(r / db) * da + col / db] * b[(r % db) * db + col % db];
        }
    }
    out
}

pub fn matmul(a: &[C], b: &[C]) -> Vec<C> {
    let d = dim_of(a);
    let mut out = vec![c(0.0); d * d];
    for r in 0..d {
        for k in 0..d {
            for col in 0..d {
                out[r * d + col] += a[r * d + k] * b[k * d + col];
            }
        }
    }
    out
}

pub fn is_zero(m: &[C]) -> bool {
    m.iter().all(|x| x.norm() < 1e-12)
}

/// `{A, B}` as a dense matrix.
pub fn anticommutator(a: &str, b: &str) -> Vec<C> {
    let (da, db) = (dense(a), dense(b));
    add(&matmul(&da, &db), &matmul(&db, &da), 1.0)
}

/// `cos φ|0̄⟩ + sin φ|1̄⟩` with `|0̄⟩ ∝ ∏(1 + gᵢ)|0…0⟩` and `|1̄⟩ = X̄|0̄⟩`.
pub fn codeword(generators: &[&str], x_bar: &str, phi: f64) -> Vec<C> {
    let n = parse(generators[0]).1.len();
    let mut zero = vec![c(0.0); 1 << n];
    zero[0] = c(1.0);
    for g in generators {
        zero = add(&zero, &apply(g, &zero), 1.0);
    }
    let zero = normalize(zero);
    let one = apply(x_bar, &zero);
    add(&scale(&zero, phi.cos()), &one, phi.sin())
}

pub const FIVE: [&str; 4] = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];

pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    inner(a, b).norm_sqr()
}

pub fn state_vec(s: &StateVector) -> Vec<C> {
    s.amplitudes().to_vec()
}

/// Letters of `g` (or `h`) of every source restricted to `agent`, as one
/// global printed string.
pub fn cut(net: &Network, agent: Agent, from_g: bool) -> String {
    let layout = &net.layout;
    let mut out = String::new();
    for (i, ops) in net.selection.sources.iter().enumerate() {
        let p = if from_g { &ops.g } else { &ops.h };
        let letters: Vec<char> = parse(&p.to_string()).1;
        for (j, &l) in letters.iter().enumerate() {
            out.push(if layout.agent_of(i, j) == agent { l } else { 'I' });
        }
    }
    out
}

/// `I` and `J` from the global state by direct operator application.
pub fn exact_i_j(net: &Network, psi: &[C], thetas: &[f64]) -> (f64, f64) {
    let k = net.layout.k();
    let mut out = [0.0; 2];
    for (slot, plus) in [(0, true), (1, false)] {
        let mut v = psi.to_vec();
        for r in 0..net.layout.m() {
            v = apply(&cut(net, Agent::Receiver(r), plus), &v);
        }
        for (s, &theta) in thetas.iter().enumerate().take(k) {
            let sv = apply(&cut(net, Agent::Source(s), true), &v);
            let tv = apply(&cut(net, Agent::Source(s), false), &v);
            // A₀ + A₁ = 2cos θ Ŝ, A₀ − A₁ = 2 sin θ T̂.
            v = if plus { scale(&sv, 2.0 * theta.cos()) } else { scale(&tv, 2.0 * theta.sin()) };
        }
        out[slot] = inner(psi, &v).re / 2f64.powi(k as i32);
    }
    (out[0], out[1])
}

pub fn global_state(net: &Network) -> Vec<C> {
    net.states.iter().map(state_vec).reduce(|a, b| kron(&a, &b)).expect("one source")
}

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

fn commute(a: &[char], b: &[char]) -> bool {
    a.iter().zip(b).filter(|(x, y)| **x != 'I' && **y != 'I' && x != y).count() % 2 == 0
}

/// A random network description with commuting `(g, h)` per source and a
/// state stabilized by `g`; parity is not enforced.
pub fn random_network(seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sources = rng.gen_range(1..=3usize);
    let k = rng.gen_range(1..=sources);
    let m = rng.gen_range(1..=2usize);
    // Sources are split among agents as evenly as possible.
    let partition: Vec<usize> = (0..=k).map(|s| s * sources / k).collect();
    let sizes: Vec<usize> = (0..sources).map(|_| rng.gen_range(2..=3)).collect();
    let assignment: Vec<Vec<Agent>> = sizes
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let holder = (0..k).find(|&s| partition[s] <= i && i < partition[s + 1]).unwrap();
            (0..n)
                .map(|j| if j == 0 || rng.gen_bool(0.2) { Agent::Source(holder) } else { Agent::Receiver(rng.gen_range(0..m)) })
                .collect()
        })
        .collect();
    let layout = NetworkLayout::new(sizes.clone(), k, m, partition, assignment).unwrap();
    let mut ops = Vec::new();
    let mut states = Vec::new();
    let mut codes = Vec::new();
    for &n in &sizes {
        let g: Vec<char> = (0..n).map(|_| LETTERS[rng.gen_range(0..4)]).collect();
        let h = loop {
            let h: Vec<char> = (0..n).map(|_| LETTERS[rng.gen_range(0..4)]).collect();
            if commute(&g, &h) {
                break h;
            }
        };
        let g: String = g.into_iter().collect();
        let h: String = h.into_iter().collect();
        let psi: Vec<C> = (0..1 << n).map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let stab = normalize(add(&psi, &apply(&g, &psi), 1.0));
        states.push(StateVector::from_amplitudes(stab).unwrap());
        codes.push(StabilizerCode::builtin(&format!("ghz({n})")).unwrap());
        ops.push(SourceOperators { g: g.parse::<PauliString>().unwrap(), h: h.parse().unwrap(), h_prime: None });
    }
    Network::from_states(layout, codes, states, OperatorSelection::new(ops)).unwrap()
}

/// Strict parity counted directly from the letters.
pub fn strict_parity(net: &Network) -> bool {
    let layout = &net.layout;
    let agents: Vec<Agent> =
        (0..layout.k()).map(Agent::Source).chain((0..layout.m()).map(Agent::Receiver)).collect();
    let odd = agents.iter().all(|&a| {
        let s = parse(&cut(net, a, true)).1;
        let t = parse(&cut(net, a, false)).1;
        !commute(&s, &t)
    });
    odd && (layout.k() + layout.m()).is_multiple_of(2)
}
