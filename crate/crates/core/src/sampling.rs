//! Finite-statistics Bell test: uniformly random settings each round,
//! Born-rule outcomes, and estimates of `I`, `J`, `P` with standard errors.
//!
//! Two measurement strategies are supported. `DirectObservable` measures each
//! agent's observable as a whole. `PerQubitDiscard` lets each receiver measure
//! single-qubit Paulis on every qubit it holds, always `ô` on idle qubits,
//! and forms its outcome by dropping the qubits whose letter in the chosen
//! observable is the identity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{Agent, Network};
use crate::pauli::PauliLetter;
use crate::state::{Observable, StateVector};
use crate::synth::{Observables, TiltObservables};

/// Rounds per independently seeded chunk.
pub const CHUNK_ROUNDS: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    #[default]
    DirectObservable,
    PerQubitDiscard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub rounds: u64,
    pub seed: u64,
    pub mode: SamplingMode,
    /// Keep one record per round.
    pub record_rounds: bool,
}

impl RunConfig {
    pub fn new(rounds: u64, seed: u64, mode: SamplingMode) -> Self {
        RunConfig { rounds, seed, mode, record_rounds: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: u64,
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    /// Source agents then receivers.
    pub outcomes: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingTally {
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub count: u64,
    /// Mean of the product of all outcomes.
    pub correlator: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TallyReport {
    pub rounds: u64,
    pub seed: u64,
    pub mode: SamplingMode,
    pub settings: Vec<SettingTally>,
    #[serde(rename = "I")]
    pub i: Estimate,
    #[serde(rename = "J")]
    pub j: Estimate,
    #[serde(rename = "P")]
    pub p: Option<Estimate>,
    pub value: Estimate,
    #[serde(rename = "G")]
    pub g: Option<Estimate>,
    pub beta: Option<f64>,
    #[serde(skip)]
    pub records: Option<Vec<RoundRecord>>,
}

fn bits(v: usize, width: usize) -> Vec<u8> {
    (0..width).map(|b| ((v >> (width - 1 - b)) & 1) as u8).collect()
}

/// Outcome distributions over the agents in `order` measured one after
/// another; leaves are indexed by outcome bits in canonical agent order
/// (bit set for `-1`, agent 0 most significant).
fn projection_tree(
    state: &StateVector,
    observables: &[Observable],
    order: &[usize],
    keep_states: bool,
) -> Result<Vec<(f64, Option<StateVector>)>> {
    let total = observables.len();
    let mut leaves = vec![(0.0, None); 1 << total];
    let mut stack = vec![(0usize, 0usize, 1.0, state.clone())];
    while let Some((depth, label, prob, psi)) = stack.pop() {
        if depth == order.len() {
            leaves[label] = (prob, keep_states.then_some(psi));
            continue;
        }
        let agent = order[depth];
        for (outcome, bit) in [(1i8, 0usize), (-1, 1)] {
            match psi.project(&observables[agent], outcome) {
                Ok((p, post)) => {
                    stack.push((depth + 1, label | bit << (total - 1 - agent), prob * p, post));
                }
                Err(Error::ZeroProbability { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(leaves)
}

fn agent_observables(obs: &Observables, x: &[u8], y: &[u8]) -> Vec<Observable> {
    obs.sources
        .iter()
        .zip(x)
        .map(|(s, &xs)| s.a(xs))
        .chain(obs.receivers.iter().zip(y).map(|(r, &ym)| Observable::single(r.b(ym).clone())))
        .collect()
}

/// Born probabilities of all joint outcomes for settings `(x, y)`, agents
/// measured in `order` (a permutation of `0..K+M`).
pub fn joint_distribution(
    state: &StateVector,
    obs: &Observables,
    x: &[u8],
    y: &[u8],
    order: &[usize],
) -> Result<Vec<f64>> {
    let total = obs.k() + obs.m();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..total).collect::<Vec<_>>() {
        return Err(Error::Config(format!("measurement order {order:?} is not a permutation of 0..{total}")));
    }
    let observables = agent_observables(obs, x, y);
    Ok(projection_tree(state, &observables, order, false)?.into_iter().map(|(p, _)| p).collect())
}

/// Born probabilities in canonical agent order.
pub fn born_distribution(state: &StateVector, obs: &Observables, x: &[u8], y: &[u8]) -> Result<Vec<f64>> {
    let order: Vec<usize> = (0..obs.k() + obs.m()).collect();
    joint_distribution(state, obs, x, y, &order)
}

fn cdf(probs: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cdf.last().expect("non-empty distribution");
    let u = rng.gen::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Letter measured on each receiver qubit for each receiver setting, and the
/// qubits kept when forming `B_0` / `B_1` (and `P`).
/// Global qubit with its letter for `y = 0` and for `y = 1`.
type QubitLetters = (usize, Option<PauliLetter>, Option<PauliLetter>);

#[derive(Debug, Clone)]
struct QubitPlan {
    /// Per receiver.
    letters: Vec<Vec<QubitLetters>>,
    keep0: Vec<Vec<usize>>,
    keep1: Vec<Vec<usize>>,
}

fn qubit_plan(network: &Network, obs: &Observables, tilt: Option<&TiltObservables>) -> Result<QubitPlan> {
    let layout = &network.layout;
    let mut letters = Vec::new();
    let mut keep0 = Vec::new();
    let mut keep1 = Vec::new();
    for (m, recv) in obs.receivers.iter().enumerate() {
        let mut per = Vec::new();
        for (i, j) in layout.qubits_of(Agent::Receiver(m)) {
            let q = layout.global(i, j);
            let class = &network.classification.sources[i];
            let pair = if class.delta[j] {
                (Some(recv.b0.letter(q)), Some(recv.b1.letter(q)))
            } else {
                (class.o_hat[j], class.o_hat[j])
            };
            if let Some(t) = tilt {
                let want = t.p.letter(q);
                if !want.is_identity() && pair.0 != Some(want) {
                    return Err(Error::CrossCheck(format!(
                        "qubit {q}: tilt letter {want} differs from the letter measured for B0"
                    )));
                }
            }
            per.push((q, pair.0, pair.1));
        }
        keep0.push(recv.b0.support());
        keep1.push(recv.b1.support());
        letters.push(per);
    }
    Ok(QubitPlan { letters, keep0, keep1 })
}

fn rotation(letter: PauliLetter) -> Option<[[Complex64; 2]; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| Complex64::new(re, im);
    match letter {
        PauliLetter::I | PauliLetter::Z => None,
        PauliLetter::X => Some([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]),
        // H·S† maps Y to Z.
        PauliLetter::Y => Some([[c(h, 0.0), c(0.0, -h)], [c(h, 0.0), c(0.0, h)]]),
    }
}

/// Precomputed sampling tables for one network and one set of observables.
enum Sampler {
    Direct {
        /// Per setting index, CDF over joint outcome labels.
        cdfs: Vec<Vec<f64>>,
    },
    PerQubit {
        /// Per `x`, CDF over source outcome labels.
        source_cdfs: Vec<Vec<f64>>,
        /// Per `(x, a, y)`, CDF over basis indices after rotation.
        basis_cdfs: Vec<Option<Vec<f64>>>,
        plan: QubitPlan,
        n: usize,
        p_support: Option<(Vec<usize>, f64)>,
    },
}

struct Round {
    setting: usize,
    outcomes: Vec<i8>,
    p: Option<i8>,
}

impl Sampler {
    fn direct(state: &StateVector, obs: &Observables) -> Result<Sampler> {
        let (k, m) = (obs.k(), obs.m());
        let cdfs = (0..1usize << (k + m))
            .into_par_iter()
            .map(|idx| {
                let (x, y) = crate::bell::settings_from_index(idx, k, m);
                Ok(cdf(born_distribution(state, obs, &x, &y)?.into_iter()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Sampler::Direct { cdfs })
    }

    fn per_qubit(
        network: &Network,
        state: &StateVector,
        obs: &Observables,
        tilt: Option<&TiltObservables>,
    ) -> Result<Sampler> {
        let (k, m) = (obs.k(), obs.m());
        let plan = qubit_plan(network, obs, tilt)?;
        let source_obs: Vec<Vec<Observable>> =
            (0..1usize << k).map(|x| obs.sources.iter().zip(bits(x, k)).map(|(s, xs)| s.a(xs)).collect()).collect();
        let order: Vec<usize> = (0..k).collect();
        let trees = source_obs
            .par_iter()
            .map(|o| projection_tree(state, o, &order, true))
            .collect::<Result<Vec<_>>>()?;
        let source_cdfs = trees.iter().map(|t| cdf(t.iter().map(|(p, _)| *p))).collect();
        let combos: Vec<(usize, usize, usize)> = (0..1usize << k)
            .flat_map(|x| (0..1usize << k).flat_map(move |a| (0..1usize << m).map(move |y| (x, a, y))))
            .collect();
        let basis_cdfs = combos
            .par_iter()
            .map(|&(x, a, y)| {
                let Some(post) = &trees[x][a].1 else { return Ok(None) };
                let mut psi = post.clone();
                for (r, per) in plan.letters.iter().enumerate() {
                    let ym = (y >> (m - 1 - r)) & 1;
                    for &(q, l0, l1) in per {
                        let letter = if ym == 0 { l0 } else { l1 };
                        if let Some(u) = letter.and_then(rotation) {
                            psi.apply_single_qubit(q, u)?;
                        }
                    }
                }
                Ok(Some(cdf(psi.amplitudes().iter().map(|a| a.norm_sqr()))))
            })
            .collect::<Result<Vec<_>>>()?;
        let p_support = tilt.map(|t| (t.p.support(), t.p.phase().sign().unwrap_or(1.0)));
        Ok(Sampler::PerQubit { source_cdfs, basis_cdfs, plan, n: obs.n, p_support })
    }

    fn sample(&self, k: usize, m: usize, rng: &mut ChaCha8Rng) -> Round {
        let setting = rng.gen_range(0..1usize << (k + m));
        match self {
            Sampler::Direct { cdfs } => {
                let label = draw(&cdfs[setting], rng);
                let outcomes = bits(label, k + m).into_iter().map(|b| 1 - 2 * b as i8).collect();
                Round { setting, outcomes, p: None }
            }
            Sampler::PerQubit { source_cdfs, basis_cdfs, plan, n, p_support } => {
                let (x, y) = (setting >> m, setting & ((1 << m) - 1));
                let a = draw(&source_cdfs[x], rng);
                let idx = ((x << k) + a) * (1 << m) + y;
                let basis = draw(basis_cdfs[idx].as_ref().expect("reachable branch"), rng);
                let qubit_out = |q: usize| 1 - 2 * ((basis >> (n - 1 - q)) & 1) as i8;
                let mut outcomes: Vec<i8> = bits(a, k).into_iter().map(|b| 1 - 2 * b as i8).collect();
                for r in 0..m {
                    let keep = if (y >> (m - 1 - r)) & 1 == 0 { &plan.keep0[r] } else { &plan.keep1[r] };
                    outcomes.push(keep.iter().map(|&q| qubit_out(q)).product());
                }
                let p = match p_support {
                    Some((support, sign)) if y == 0 => {
                        let prod: i8 = support.iter().map(|&q| qubit_out(q)).product();
                        Some(if *sign < 0.0 { -prod } else { prod })
                    }
                    _ => None,
                };
                Round { setting, outcomes, p }
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
struct Partial {
    counts: Vec<u64>,
    sums: Vec<i64>,
    p_count: u64,
    p_sum: i64,
    records: Vec<RoundRecord>,
}

fn mean_and_stderr(sum: i64, count: u64) -> (f64, f64) {
    if count == 0 {
        return (0.0, f64::INFINITY);
    }
    let e = sum as f64 / count as f64;
    (e, ((1.0 - e * e).max(0.0) / count as f64).sqrt())
}

/// `d/dI |I|^{1/K}`, infinite at zero for `K > 1`.
fn root_derivative(v: f64, k: usize) -> f64 {
    let r = 1.0 / k as f64;
    if k == 1 {
        1.0
    } else if v == 0.0 {
        f64::INFINITY
    } else {
        r * v.abs().powf(r - 1.0)
    }
}

/// Samples `config.rounds` rounds. With `tilt`, the per-qubit mode also
/// estimates `P` (from rounds where every receiver has `y = 0`) and `G`.
pub fn run(
    network: &Network,
    obs: &Observables,
    tilt: Option<(&TiltObservables, f64)>,
    config: &RunConfig,
) -> Result<TallyReport> {
    if config.rounds == 0 {
        return Err(Error::Config("rounds must be at least 1".into()));
    }
    if let Some((_, beta)) = tilt {
        if beta < 0.0 {
            return Err(Error::NegativeBeta(beta));
        }
    }
    let (k, m) = (obs.k(), obs.m());
    let state = network.global_state()?;
    let sampler = match config.mode {
        SamplingMode::DirectObservable => Sampler::direct(&state, obs)?,
        SamplingMode::PerQubitDiscard => Sampler::per_qubit(network, &state, obs, tilt.map(|t| t.0))?,
    };
    let settings = 1usize << (k + m);
    let chunks = config.rounds.div_ceil(CHUNK_ROUNDS);
    let partials: Vec<Partial> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(c);
            let start = c * CHUNK_ROUNDS;
            let end = (start + CHUNK_ROUNDS).min(config.rounds);
            let mut part = Partial { counts: vec![0; settings], sums: vec![0; settings], ..Default::default() };
            for round in start..end {
                let r = sampler.sample(k, m, &mut rng);
                let prod: i8 = r.outcomes.iter().product();
                part.counts[r.setting] += 1;
                part.sums[r.setting] += prod as i64;
                if let Some(p) = r.p {
                    part.p_count += 1;
                    part.p_sum += p as i64;
                }
                if config.record_rounds {
                    let (x, y) = crate::bell::settings_from_index(r.setting, k, m);
                    part.records.push(RoundRecord { round, x, y, outcomes: r.outcomes });
                }
            }
            part
        })
        .collect();

    let mut total = Partial { counts: vec![0; settings], sums: vec![0; settings], ..Default::default() };
    for p in partials {
        for s in 0..settings {
            total.counts[s] += p.counts[s];
            total.sums[s] += p.sums[s];
        }
        total.p_count += p.p_count;
        total.p_sum += p.p_sum;
        total.records.extend(p.records);
    }

    let mut tallies = Vec::with_capacity(settings);
    let norm = 2f64.powi(k as i32);
    let (mut i_hat, mut i_var, mut j_hat, mut j_var) = (0.0, 0.0, 0.0, 0.0);
    let all_ones = (1usize << m) - 1;
    for s in 0..settings {
        let (x, y) = crate::bell::settings_from_index(s, k, m);
        let (e, se) = mean_and_stderr(total.sums[s], total.counts[s]);
        let y_idx = s & all_ones;
        if y_idx == 0 {
            i_hat += e / norm;
            i_var += se * se / (norm * norm);
        }
        if y_idx == all_ones {
            let parity = (s >> m).count_ones() % 2;
            j_hat += if parity == 0 { e } else { -e } / norm;
            j_var += se * se / (norm * norm);
        }
        tallies.push(SettingTally { x, y, count: total.counts[s], correlator: e, stderr: se });
    }
    let value = crate::bell::bell_value(i_hat, j_hat, k);
    let di = root_derivative(i_hat, k);
    let dj = root_derivative(j_hat, k);
    let value_se = (di * di * i_var + dj * dj * j_var).sqrt();

    let p = match (config.mode, tilt) {
        (SamplingMode::PerQubitDiscard, Some(_)) => {
            let (e, se) = mean_and_stderr(total.p_sum, total.p_count);
            Some(Estimate { value: e, stderr: se })
        }
        _ => None,
    };
    let g = match (&p, tilt) {
        (Some(p), Some((_, beta))) => {
            let dp = root_derivative(p.value, k) * beta;
            let g = beta * p.value.abs().powf(1.0 / k as f64) + value;
            Some(Estimate { value: g, stderr: (value_se * value_se + dp * dp * p.stderr * p.stderr).sqrt() })
        }
        _ => None,
    };
    Ok(TallyReport {
        rounds: config.rounds,
        seed: config.seed,
        mode: config.mode,
        settings: tallies,
        i: Estimate { value: i_hat, stderr: i_var.sqrt() },
        j: Estimate { value: j_hat, stderr: j_var.sqrt() },
        p,
        value: Estimate { value, stderr: value_se },
        g,
        beta: tilt.map(|t| t.1),
        records: config.record_rounds.then_some(total.records),
    })
}
