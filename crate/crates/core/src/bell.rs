//! Exact Bell quantities: `I`, `J`, the nonlinear value `|I|^{1/K} + |J|^{1/K}`,
//! the tilted value `G`, their closed-form predictions and angle optimization.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::Network;
use crate::pauli::{PauliString, PauliSum};
use crate::state::{Observable, StateVector, EXACT_TOL};
use crate::synth::{self, Observables, TiltObservables};

/// Grid points per angle for the sanity scan in [`maximize`].
pub const DEFAULT_GRID: usize = 181;

/// Above this many grid points the scan falls back to equal angles only.
pub const FULL_GRID_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltBlock {
    pub beta: f64,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(rename = "G")]
    pub g: f64,
    pub classical_bound: f64,
    /// One-based source indices in the tilt set.
    pub members: Vec<usize>,
    pub phi_bar: Option<f64>,
    pub theta_max: Option<f64>,
    pub beta_max: Option<f64>,
    /// `Ḡ(β, φ̄, θ)` from the closed form, when `φ̄` is known.
    pub predicted_g: Option<f64>,
    pub violation: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridScan {
    pub points_per_angle: usize,
    /// `true` if every angle combination was visited, `false` for equal angles only.
    pub full: bool,
    pub evaluated: usize,
    pub best_value: f64,
    pub best_thetas: Vec<f64>,
    pub bound: f64,
    pub exceeded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellReport {
    pub k: usize,
    pub m: usize,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub value: f64,
    pub classical_bound: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// `⟨h_i⟩` per source.
    pub c_i: Vec<f64>,
    /// `⟨g_i⟩` per source.
    pub g_i: Vec<f64>,
    pub thetas: Vec<f64>,
    pub closed_form_i: f64,
    pub closed_form_j: f64,
    /// `√(1 + C²)`.
    pub max_value: f64,
    pub violation: bool,
    pub tilt: Option<TiltBlock>,
    pub grid: Option<GridScan>,
    pub scenario_hash: Option<String>,
    pub seed: Option<u64>,
}

/// `|I|^{1/K} + |J|^{1/K}`.
pub fn bell_value(i: f64, j: f64, k: usize) -> f64 {
    let r = 1.0 / k as f64;
    i.abs().powf(r) + j.abs().powf(r)
}

fn observable_sum(obs: &Observable, n: usize) -> PauliSum {
    let mut s = PauliSum::zero(n);
    for (c, p) in obs.terms() {
        s.add_term(Complex64::new(*c, 0.0), p);
    }
    s
}

fn sum_expectation(state: &StateVector, sum: &PauliSum) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (c, p) in sum.terms() {
        acc += c * state.expectation_complex(&p)?;
    }
    Ok(acc)
}

fn real_part(z: Complex64, what: &str) -> Result<f64> {
    if z.im.abs() > 1e-10 {
        return Err(Error::CrossCheck(format!("{what} has imaginary part {:e}", z.im)));
    }
    Ok(z.re)
}

/// Expectation of the product of all sources' `A_{x}` combined by `combine`
/// (`A₀ ± A₁`) and all receivers' `B_y`, divided by `2^K`.
fn network_correlator(state: &StateVector, obs: &Observables, plus: bool) -> Result<f64> {
    let n = obs.n;
    let mut op = PauliSum::term(Complex64::new(1.0, 0.0), &PauliString::identity(n));
    for s in &obs.sources {
        let a0 = observable_sum(&s.a(0), n);
        let a1 = observable_sum(&s.a(1), n);
        let sign = if plus { 1.0 } else { -1.0 };
        let mut comb = a0;
        for (c, p) in a1.terms() {
            comb.add_term(c * sign, &p);
        }
        op = op.times(&comb)?;
    }
    let y = if plus { 0 } else { 1 };
    for r in &obs.receivers {
        op = op.times(&PauliSum::term(Complex64::new(1.0, 0.0), r.b(y)))?;
    }
    let v = real_part(sum_expectation(state, &op)?, if plus { "I" } else { "J" })?;
    Ok(v / 2f64.powi(obs.k() as i32))
}

/// `⟨∏ A_{x_k} ∏ B_{y_m}⟩` for one setting combination.
pub fn correlator(state: &StateVector, obs: &Observables, x: &[u8], y: &[u8]) -> Result<f64> {
    if x.len() != obs.k() || y.len() != obs.m() {
        return Err(Error::Config(format!(
            "setting vectors of length {}/{} for K = {}, M = {}",
            x.len(),
            y.len(),
            obs.k(),
            obs.m()
        )));
    }
    let n = obs.n;
    let mut op = PauliSum::term(Complex64::new(1.0, 0.0), &PauliString::identity(n));
    for (s, &xs) in obs.sources.iter().zip(x) {
        op = op.times(&observable_sum(&s.a(xs), n))?;
    }
    for (r, &ym) in obs.receivers.iter().zip(y) {
        op = op.times(&PauliSum::term(Complex64::new(1.0, 0.0), r.b(ym)))?;
    }
    real_part(sum_expectation(state, &op)?, "correlator")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SettingCorrelator {
    pub x: Vec<u8>,
    pub y: Vec<u8>,
    pub value: f64,
}

/// Bits of `index` split into `x` (first `k`, most significant first) and `y`.
pub fn settings_from_index(index: usize, k: usize, m: usize) -> (Vec<u8>, Vec<u8>) {
    let bit = |b: usize| ((index >> (k + m - 1 - b)) & 1) as u8;
    ((0..k).map(bit).collect(), (k..k + m).map(bit).collect())
}

/// Exact correlators for every `(x, y)` combination.
pub fn setting_correlators(state: &StateVector, obs: &Observables) -> Result<Vec<SettingCorrelator>> {
    let (k, m) = (obs.k(), obs.m());
    (0..1usize << (k + m))
        .map(|idx| {
            let (x, y) = settings_from_index(idx, k, m);
            let value = correlator(state, obs, &x, &y)?;
            Ok(SettingCorrelator { x, y, value })
        })
        .collect()
}

/// `⟨g_i⟩` and `⟨h_i⟩` on each source's own state.
pub fn source_expectations(network: &Network) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut gs = Vec::new();
    let mut hs = Vec::new();
    for (state, ops) in network.states.iter().zip(&network.selection.sources) {
        gs.push(state.expectation(&ops.g)?);
        hs.push(state.expectation(&ops.h)?);
    }
    Ok((gs, hs))
}

/// `C = |∏ c_i|^{1/K}`.
pub fn correlation_strength(c_i: &[f64], k: usize) -> f64 {
    c_i.iter().product::<f64>().abs().powf(1.0 / k as f64)
}

fn sign_of(p: &PauliString) -> f64 {
    p.phase().sign().unwrap_or(1.0)
}

fn closed_forms(network: &Network, thetas: &[f64], g_i: &[f64], c_i: &[f64]) -> (f64, f64) {
    let ops = &network.selection.sources;
    let i = thetas.iter().map(|t| t.cos()).product::<f64>()
        * ops.iter().zip(g_i).map(|(o, g)| sign_of(&o.g) * g).product::<f64>();
    let j = thetas.iter().map(|t| t.sin()).product::<f64>()
        * ops.iter().zip(c_i).map(|(o, c)| sign_of(&o.h) * c).product::<f64>();
    (i, j)
}

/// Exact `I`, `J` from the global state, cross-checked against the closed forms.
pub fn evaluate(network: &Network, obs: &Observables) -> Result<BellReport> {
    let state = network.global_state()?;
    evaluate_with_state(network, &state, obs)
}

/// As [`evaluate`] with a precomputed global state.
pub fn evaluate_with_state(network: &Network, state: &StateVector, obs: &Observables) -> Result<BellReport> {
    let k = network.layout.k();
    let i = network_correlator(state, obs, true)?;
    let j = network_correlator(state, obs, false)?;
    let (g_i, c_i) = source_expectations(network)?;
    let thetas = obs.thetas();
    let (ci, cj) = closed_forms(network, &thetas, &g_i, &c_i);
    if (i - ci).abs() > EXACT_TOL || (j - cj).abs() > EXACT_TOL {
        return Err(Error::CrossCheck(format!(
            "statevector I = {i}, J = {j}; closed forms give I = {ci}, J = {cj}"
        )));
    }
    let c = correlation_strength(&c_i, k);
    let max_value = (1.0 + c * c).sqrt();
    let value = bell_value(i, j, k);
    if value > max_value + EXACT_TOL {
        return Err(Error::CrossCheck(format!("value {value} exceeds √(1+C²) = {max_value}")));
    }
    Ok(BellReport {
        k,
        m: network.layout.m(),
        i,
        j,
        value,
        classical_bound: 1.0,
        c,
        c_i,
        g_i,
        thetas,
        closed_form_i: ci,
        closed_form_j: cj,
        max_value,
        violation: value > 1.0 + EXACT_TOL,
        tilt: None,
        grid: None,
        scenario_hash: None,
        seed: None,
    })
}

/// Value at angles `thetas` from the closed forms.
fn closed_value(network: &Network, thetas: &[f64], g_i: &[f64], c_i: &[f64]) -> f64 {
    let (i, j) = closed_forms(network, thetas, g_i, c_i);
    bell_value(i, j, thetas.len())
}

/// Scans `points` angles per agent on `[0, π/2]` and records the best value.
pub fn grid_scan(network: &Network, points: usize, bound: f64) -> Result<GridScan> {
    let points = points.max(2);
    let k = network.layout.k();
    let (g_i, c_i) = source_expectations(network)?;
    let step = std::f64::consts::FRAC_PI_2 / (points - 1) as f64;
    let full = (points as f64).powi(k as i32) <= FULL_GRID_LIMIT as f64;
    let mut best = (f64::NEG_INFINITY, vec![0.0; k]);
    let mut evaluated = 0;
    let mut visit = |thetas: &[f64]| {
        let v = closed_value(network, thetas, &g_i, &c_i);
        evaluated += 1;
        if v > best.0 {
            best = (v, thetas.to_vec());
        }
    };
    if full {
        let total = points.pow(k as u32);
        let mut thetas = vec![0.0; k];
        for idx in 0..total {
            let mut rest = idx;
            for t in thetas.iter_mut().rev() {
                *t = (rest % points) as f64 * step;
                rest /= points;
            }
            visit(&thetas);
        }
    } else {
        for a in 0..points {
            visit(&vec![a as f64 * step; k]);
        }
    }
    Ok(GridScan {
        points_per_angle: points,
        full,
        evaluated,
        best_value: best.0,
        best_thetas: best.1,
        bound,
        exceeded: best.0 > bound + EXACT_TOL,
    })
}

/// Evaluates at `θ_k = θ̄ = arctan C` and confirms no grid point beats `√(1+C²)`.
pub fn maximize(network: &Network, grid_points: usize) -> Result<BellReport> {
    let (_, c_i) = source_expectations(network)?;
    let c = correlation_strength(&c_i, network.layout.k());
    let obs = synth::build_uniform(network, c.atan())?;
    let mut report = evaluate(network, &obs)?;
    if (report.value - report.max_value).abs() > EXACT_TOL {
        return Err(Error::CrossCheck(format!(
            "value {} at θ̄ = arctan C differs from √(1+C²) = {}",
            report.value, report.max_value
        )));
    }
    let scan = grid_scan(network, grid_points, report.max_value)?;
    if scan.exceeded {
        return Err(Error::CrossCheck(format!(
            "grid point {:?} reaches {} above √(1+C²) = {}",
            scan.best_thetas, scan.best_value, report.max_value
        )));
    }
    report.grid = Some(scan);
    Ok(report)
}

/// `Ḡ(β, φ, θ) = β|cos 2φ|^r + cos θ + sin θ |sin 2φ|^r` with `r = |𝔠|/K`.
pub fn g_bar(beta: f64, ratio: f64, phi: f64, theta: f64) -> f64 {
    beta * (2.0 * phi).cos().abs().powf(ratio) + theta.cos() + theta.sin() * (2.0 * phi).sin().abs().powf(ratio)
}

/// Step for the central differences in [`tilt_parameters`].
pub const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltParameters {
    pub ratio: f64,
    pub phi_bar: f64,
    pub theta_max: f64,
    /// `None` when the tilt set is empty and `β` drops out.
    pub beta_max: Option<f64>,
    /// `Ḡ(β_max, φ̄, θ̄_max)`, with `β = 0` if `beta_max` is `None`.
    pub g_max: f64,
    /// `(∂Ḡ/∂φ, ∂Ḡ/∂θ)` at `(φ̄, θ̄_max)`.
    pub gradient: [f64; 2],
}

/// Optimal common angle and tilt weight for `members` of `k` sources sharing `φ̄`.
pub fn tilt_parameters(phi_bar: f64, members: usize, k: usize) -> Result<TiltParameters> {
    if k == 0 {
        return Err(Error::DegenerateTilt("K = 0".into()));
    }
    if !(phi_bar > 0.0 && phi_bar < std::f64::consts::FRAC_PI_2) {
        return Err(Error::DegenerateTilt(format!("φ̄ = {phi_bar} outside (0, π/2)")));
    }
    let ratio = members as f64 / k as f64;
    let (theta_max, beta_max) = if members == 0 {
        (std::f64::consts::FRAC_PI_4, None)
    } else {
        if (phi_bar - std::f64::consts::FRAC_PI_4).abs() < 1e-12 {
            return Err(Error::DegenerateTilt("φ̄ = π/4 makes tan 2φ̄ diverge".into()));
        }
        let t = (2.0 * phi_bar).tan().abs();
        let theta = (2.0 * phi_bar).sin().abs().powf(ratio).atan();
        let beta = t.powf(2.0 * ratio - 2.0) / ((1.0 + t * t).powf(ratio) + t.powf(2.0 * ratio)).sqrt();
        (theta, Some(beta))
    };
    let beta = beta_max.unwrap_or(0.0);
    let f = |phi: f64, theta: f64| g_bar(beta, ratio, phi, theta);
    let h = FD_STEP;
    let d_phi = (f(phi_bar + h, theta_max) - f(phi_bar - h, theta_max)) / (2.0 * h);
    let d_theta = (f(phi_bar, theta_max + h) - f(phi_bar, theta_max - h)) / (2.0 * h);
    if d_phi.abs() >= 1e-6 || d_theta.abs() >= 1e-6 {
        return Err(Error::CrossCheck(format!(
            "Ḡ not stationary at (φ̄, θ̄_max): gradient ({d_phi:e}, {d_theta:e})"
        )));
    }
    Ok(TiltParameters {
        ratio,
        phi_bar,
        theta_max,
        beta_max,
        g_max: f(phi_bar, theta_max),
        gradient: [d_phi, d_theta],
    })
}

/// Adds `P = ⟨∏ Z̄⟩` and `G = β|P|^{1/K} + value` to an untilted evaluation.
pub fn evaluate_tilted(
    network: &Network,
    obs: &Observables,
    tilt: &TiltObservables,
    beta: f64,
    params: Option<&TiltParameters>,
) -> Result<BellReport> {
    if beta < 0.0 {
        return Err(Error::NegativeBeta(beta));
    }
    for (r, recv) in obs.receivers.iter().enumerate() {
        if tilt.recovered_b0(r)? != recv.b0 {
            return Err(Error::CrossCheck(format!("B0 of R{} not recoverable from the tilted operator", r + 1)));
        }
    }
    if !tilt.b0_bar.is_empty() && tilt.recovered_p()? != tilt.p {
        return Err(Error::CrossCheck("P not recoverable from the tilted operators".into()));
    }
    let state = network.global_state()?;
    let mut report = evaluate_with_state(network, &state, obs)?;
    let k = report.k;
    let p = state.expectation(&tilt.p)?;
    let g = beta * p.abs().powf(1.0 / k as f64) + report.value;
    let bound = beta + 1.0;
    report.classical_bound = bound;
    report.violation = g > bound + EXACT_TOL;
    let predicted_g = params.map(|t| g_bar(beta, t.ratio, t.phi_bar, report.thetas[0]));
    report.tilt = Some(TiltBlock {
        beta,
        p,
        g,
        classical_bound: bound,
        members: tilt.members.iter().map(|i| i + 1).collect(),
        phi_bar: params.map(|t| t.phi_bar),
        theta_max: params.map(|t| t.theta_max),
        beta_max: params.and_then(|t| t.beta_max),
        predicted_g,
        violation: report.violation,
        notes: tilt.notes.clone(),
    });
    Ok(report)
}

/// Tilted test at `θ̄_max` for the sources in `members`, all assumed to share `φ̄`.
/// `beta = None` picks `β_max`.
pub fn maximize_tilted(network: &Network, members: &[usize], phi_bar: f64, beta: Option<f64>) -> Result<BellReport> {
    let tilt = synth::build_tilted(network, members)?;
    let params = tilt_parameters(phi_bar, tilt.members.len(), network.layout.k())?;
    let beta = beta.or(params.beta_max).unwrap_or(0.0);
    let obs = synth::build_uniform(network, params.theta_max)?;
    evaluate_tilted(network, &obs, &tilt, beta, Some(&params))
}
