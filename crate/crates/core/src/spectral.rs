//! Single-ancilla phase estimation of the walk, eigenstate projection,
//! measurement-driven ground-state preparation and observable recovery.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::hamiltonian::{normalize, InterpolatedModel, LcuHamiltonian, RescaledLcu, ShiftPolicy};
use crate::linalg::{fidelity, inner, norm_sqr};
use crate::pauli::{Letter, PauliString};
use crate::sim::{rng_from_seed, Encoding, Gate, QuantumState, SimRng};
use crate::walk_binary::{build_binary, invariant_blocks, InvariantBlock, WalkBundle, BOUNDARY_EPS};
use crate::walk_unary::{build_hybrid, build_unary};
use crate::{Error, Result};

/// Two-sided width multiplier of the energy confidence interval.
pub const CONFIDENCE_Z: f64 = 2.0;
/// False-alarm rate of the block-dispersion test.
pub const DISPERSION_ALPHA: f64 = 1e-3;
/// Energies closer than this belong to one degenerate level.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Builds the walk of `h` in the requested encoding. Binary and unary
/// encodings rescale with the automatic shift; hybrid takes the raw chain.
pub fn build_walk(h: &LcuHamiltonian, encoding: Encoding) -> Result<WalkBundle> {
    match encoding {
        Encoding::Binary => build_binary(&normalize(h, ShiftPolicy::Auto)?),
        Encoding::Unary => build_unary(&normalize(h, ShiftPolicy::Auto)?),
        Encoding::Hybrid => build_hybrid(h),
    }
}

/// Ancilla outcome in the `|±⟩` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Exact or sampled protocol semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Analysis,
    Sample,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Analysis => "analysis",
            Mode::Sample => "sample",
        })
    }
}

/// Both branches of one phase-estimation step. Posteriors have the ancilla
/// reset to `|0⟩`; a branch of zero weight has none.
#[derive(Debug, Clone)]
pub struct PeAnalysis {
    pub p_plus: f64,
    pub p_minus: f64,
    pub post_plus: Option<QuantumState>,
    pub post_minus: Option<QuantumState>,
}

#[derive(Debug, Clone)]
pub struct PeSample {
    pub outcome: Outcome,
    pub p_plus: f64,
    pub p_minus: f64,
    pub state: QuantumState,
}

fn check_layout(bundle: &WalkBundle, state: &QuantumState) -> Result<usize> {
    let pe = state.layout().pe().ok_or_else(|| {
        Error::InvalidParameter("state has no phase-estimation qubit".into())
    })?;
    if state.layout() != bundle.layout() {
        return Err(Error::WidthMismatch(
            bundle.layout().total(),
            state.layout().total(),
        ));
    }
    Ok(pe)
}

fn flip(q: usize) -> Gate {
    Gate::ControlledPauli {
        controls: Vec::new(),
        pauli: PauliString::single(1, 0, Letter::X).expect("one-qubit X"),
        offset: q,
    }
}

/// `|+⟩` on the ancilla, controlled walk, measurement in `|±⟩`.
pub fn pe_analyze(bundle: &WalkBundle, state: &QuantumState) -> Result<PeAnalysis> {
    let pe = check_layout(bundle, state)?;
    let mut s = state.clone();
    s.apply(&Gate::H(pe))?;
    s.apply_circuit(bundle.controlled_walk())?;
    s.apply(&Gate::H(pe))?;
    let m = s.measure_analyze(pe)?;
    let post_minus = match m.post1 {
        Some(mut p) => {
            p.apply(&flip(pe))?;
            Some(p)
        }
        None => None,
    };
    Ok(PeAnalysis {
        p_plus: m.p0,
        p_minus: m.p1,
        post_plus: m.post0,
        post_minus,
    })
}

fn draw(p_plus: f64, rng: &mut SimRng) -> Outcome {
    let u: f64 = rng.random();
    if u >= p_plus {
        Outcome::Minus
    } else {
        Outcome::Plus
    }
}

pub fn pe_sample(bundle: &WalkBundle, state: &QuantumState, rng: &mut SimRng) -> Result<PeSample> {
    let a = pe_analyze(bundle, state)?;
    let outcome = draw(a.p_plus, rng);
    let state = match outcome {
        Outcome::Plus => a.post_plus,
        Outcome::Minus => a.post_minus,
    }
    .expect("sampled branch has positive weight");
    Ok(PeSample {
        outcome,
        p_plus: a.p_plus,
        p_minus: a.p_minus,
        state,
    })
}

/// Repeated sampled phase-estimation steps and the resulting energy estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub outcomes: Vec<Outcome>,
    pub estimate: f64,
    pub half_width: f64,
    pub shots: usize,
    pub seed: u64,
    /// Independent runs from a fresh copy of the input.
    pub blocks: usize,
    /// Chi-square statistic of the per-block `+` counts.
    pub dispersion: f64,
    /// Set when the blocks disagree beyond binomial scatter.
    pub non_eigenstate: bool,
}

fn default_blocks(shots: usize) -> usize {
    (shots / 50).clamp(1, 20)
}

/// Energy estimate from `shots` steps split over a default number of blocks.
pub fn estimate_energy(
    bundle: &WalkBundle,
    state: &QuantumState,
    shots: usize,
    seed: u64,
) -> Result<MeasurementRecord> {
    estimate_energy_blocks(bundle, state, shots, default_blocks(shots), seed)
}

fn stationary(a: &PeAnalysis, s: &QuantumState) -> bool {
    let same = |p: &Option<QuantumState>| {
        p.as_ref()
            .is_none_or(|p| inner(p.amplitudes(), s.amplitudes()).norm_sqr() >= 1.0 - 1e-13)
    };
    same(&a.post_plus) && same(&a.post_minus)
}

/// Each block restarts from `state` and applies its share of steps in sequence,
/// so a superposition collapses independently per block.
pub fn estimate_energy_blocks(
    bundle: &WalkBundle,
    state: &QuantumState,
    shots: usize,
    blocks: usize,
    seed: u64,
) -> Result<MeasurementRecord> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    if blocks == 0 || blocks > shots {
        return Err(Error::InvalidParameter(format!(
            "{blocks} blocks cannot split {shots} shots"
        )));
    }
    check_layout(bundle, state)?;
    let mut rng = rng_from_seed(seed, 0);
    let mut outcomes = Vec::with_capacity(shots);
    let mut counts = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let n_b = shots / blocks + usize::from(b < shots % blocks);
        let mut s = state.clone();
        let mut plus = 0usize;
        let mut fixed: Option<f64> = None;
        for _ in 0..n_b {
            let outcome = match fixed {
                Some(p) => draw(p, &mut rng),
                None => {
                    let a = pe_analyze(bundle, &s)?;
                    if stationary(&a, &s) {
                        fixed = Some(a.p_plus);
                    }
                    let o = draw(a.p_plus, &mut rng);
                    s = match o {
                        Outcome::Plus => a.post_plus,
                        Outcome::Minus => a.post_minus,
                    }
                    .expect("sampled branch has positive weight");
                    o
                }
            };
            plus += usize::from(outcome == Outcome::Plus);
            outcomes.push(outcome);
        }
        counts.push((plus, n_b));
    }
    let total_plus: usize = counts.iter().map(|c| c.0).sum();
    let p_hat = total_plus as f64 / shots as f64;
    let half_width = 2.0 * CONFIDENCE_Z * (p_hat * (1.0 - p_hat) / shots as f64).sqrt();
    let dispersion = block_dispersion(&counts, p_hat);
    let non_eigenstate = blocks >= 2 && dispersion > dispersion_threshold(blocks - 1);
    Ok(MeasurementRecord {
        outcomes,
        estimate: (2.0 * p_hat - 1.0).clamp(-1.0, 1.0),
        half_width,
        shots,
        seed,
        blocks,
        dispersion,
        non_eigenstate,
    })
}

/// `Σ_b (k_b − n_b p̂)² / (n_b p̂(1−p̂))`.
pub fn block_dispersion(counts: &[(usize, usize)], p_hat: f64) -> f64 {
    let v = p_hat * (1.0 - p_hat);
    if v <= 0.0 {
        return 0.0;
    }
    counts
        .iter()
        .map(|&(k, n)| {
            let d = k as f64 - n as f64 * p_hat;
            d * d / (n as f64 * v)
        })
        .sum()
}

pub fn dispersion_threshold(dof: usize) -> f64 {
    ChiSquared::new(dof as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - DISPERSION_ALPHA)
}

/// `(W − e^{∓iθ})ψ / (±2i sin θ)`: the component of `ψ` in the `e^{±iθ}`
/// eigenspace of the walk, assuming `ψ` lies in blocks of energy `cos θ`.
fn sign_projection(bundle: &WalkBundle, psi: &QuantumState, theta: f64, sign: f64) -> Result<QuantumState> {
    let mut out = psi.clone().applied(bundle.walk())?;
    out.add_scaled(-Complex64::from_polar(1.0, -sign * theta), psi);
    out.scale(Complex64::new(0.0, sign * 2.0 * theta.sin()).inv());
    Ok(out)
}

/// Result of the `B†`-vacuum projection with retries.
#[derive(Debug, Clone)]
pub struct Projection {
    /// Normalized system state on the first success branch.
    pub system: Option<Vec<Complex64>>,
    pub rounds_used: usize,
    pub success: bool,
    /// Success probability of each round given that it is reached.
    pub round_success: Vec<f64>,
    /// Probability of having succeeded after each round.
    pub cumulative_success: Vec<f64>,
    /// Full register on the success branch, or the last failure state.
    pub state: QuantumState,
}

/// Analysis mode tracks every branch, so the round count is capped.
pub const MAX_ANALYSIS_ROUNDS: usize = 16;

/// Applies `B†` and tests the control register for vacuum. A failure is
/// followed by `B` and a sign-resolving phase measurement at energy `energy`.
pub fn project_to_eigenstate(
    bundle: &WalkBundle,
    state: &QuantumState,
    energy: f64,
    max_rounds: usize,
    mode: Mode,
    seed: u64,
) -> Result<Projection> {
    check_layout(bundle, state)?;
    if max_rounds == 0 {
        return Err(Error::InvalidParameter("max_rounds must be at least 1".into()));
    }
    if mode == Mode::Analysis && max_rounds > MAX_ANALYSIS_ROUNDS {
        return Err(Error::InvalidParameter(format!(
            "analysis mode supports at most {MAX_ANALYSIS_ROUNDS} rounds"
        )));
    }
    let theta = energy.clamp(-1.0, 1.0).acos();
    let boundary = energy.abs() >= 1.0 - BOUNDARY_EPS;
    let mut rng = rng_from_seed(seed, 0);
    let mut branches = vec![(1.0f64, state.clone())];
    let mut round_success = Vec::new();
    let mut cumulative_success = Vec::new();
    let mut cumulative = 0.0;
    let mut first_success: Option<QuantumState> = None;
    let mut last = state.clone();
    for _ in 0..max_rounds {
        let reached: f64 = branches.iter().map(|b| b.0).sum();
        let mut won = 0.0;
        let mut next = Vec::new();
        for (w, psi) in branches {
            let back = psi.applied(bundle.unprepare())?;
            let vp = back.project_control_vacuum();
            won += w * vp.p_success;
            let (ok, fail) = match mode {
                Mode::Analysis => (vp.success, vp.failure),
                Mode::Sample => {
                    let u: f64 = rng.random();
                    if u < vp.p_success {
                        (vp.success, None)
                    } else {
                        (None, vp.failure)
                    }
                }
            };
            if first_success.is_none() {
                first_success = ok;
            }
            let fail_w = match mode {
                Mode::Analysis => w * (1.0 - vp.p_success),
                Mode::Sample => 1.0,
            };
            let Some(fail) = fail else { continue };
            if fail_w < 1e-300 {
                continue;
            }
            if boundary {
                return Err(Error::BoundaryEnergy(energy));
            }
            let phi1 = fail.applied(bundle.prepare())?;
            let parts = [1.0, -1.0].map(|sg| sign_projection(bundle, &phi1, theta, sg));
            let [pp, pm] = parts;
            let (pp, pm) = (pp?, pm?);
            let (qp, qm) = (pp.norm_sqr(), pm.norm_sqr());
            match mode {
                Mode::Analysis => {
                    for (q, s) in [(qp, pp), (qm, pm)] {
                        if let Some(s) = s.normalized().filter(|_| q > 1e-300) {
                            next.push((fail_w * q / (qp + qm), s));
                        }
                    }
                }
                Mode::Sample => {
                    let u: f64 = rng.random();
                    let s = if u < qp / (qp + qm) { pp } else { pm };
                    let s = s.normalized().expect("sampled branch has positive weight");
                    last = s.clone();
                    next.push((1.0, s));
                }
            }
        }
        match mode {
            Mode::Analysis => {
                cumulative += won;
                round_success.push(if reached > 0.0 { won / reached } else { 0.0 });
            }
            Mode::Sample => {
                let p = won;
                round_success.push(p);
                cumulative = if first_success.is_some() { 1.0 } else { 0.0 };
            }
        }
        cumulative_success.push(cumulative);
        if mode == Mode::Analysis {
            if let Some((_, s)) = next.first() {
                last = s.clone();
            }
        }
        branches = next;
        if branches.is_empty() || (mode == Mode::Sample && first_success.is_some()) {
            break;
        }
    }
    let rounds_used = round_success.len();
    let (system, state) = match first_success {
        Some(s) => {
            let (sys, _) = s.system_part();
            let n = norm_sqr(&sys).sqrt();
            (Some(sys.iter().map(|a| a / n).collect()), s)
        }
        None => (None, last),
    };
    Ok(Projection {
        success: system.is_some(),
        system,
        rounds_used,
        round_success,
        cumulative_success,
        state,
    })
}

/// Uniform grid `g_j = j/L`.
pub fn uniform_schedule(steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidSchedule("needs at least one step".into()));
    }
    Ok((0..=steps).map(|j| j as f64 / steps as f64).collect())
}

pub fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.len() < 2 {
        return Err(Error::InvalidSchedule("needs at least two points".into()));
    }
    if schedule[0] != 0.0 || *schedule.last().unwrap() != 1.0 {
        return Err(Error::InvalidSchedule("must start at 0 and end at 1".into()));
    }
    if let Some(w) = schedule.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidSchedule(format!(
            "not strictly increasing at {} → {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZenoStep {
    pub g: f64,
    /// Energy read off the measurement, in units of the rescaled Hamiltonian.
    pub measured_energy: f64,
    /// Ground energy of the rescaled `H(g)`.
    pub ground_energy: f64,
    pub normalization: f64,
    pub success: bool,
    /// Probability of the ground outcome at this step.
    pub probability: f64,
    /// `|⟨φ₀(g_{j−1})|φ₀(g_j)⟩|²` from dense ground states.
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZenoTrace {
    pub schedule: Vec<f64>,
    pub encoding: Encoding,
    pub mode: Mode,
    pub seed: u64,
    pub steps: Vec<ZenoStep>,
    /// System amplitudes as `[re, im]` pairs.
    pub final_state: Vec<[f64; 2]>,
    /// Product of per-step probabilities; in sample mode, 1 or 0.
    pub success_probability: f64,
    pub overlap_product: f64,
    pub success: bool,
    /// `|⟨φ₀(1)|final⟩|²`.
    pub final_fidelity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZenoOptions {
    /// Phase-estimation steps per energy measurement in sample mode.
    pub pe_shots: usize,
    /// Projection rounds per step in sample mode.
    pub max_rounds: usize,
}

impl Default for ZenoOptions {
    fn default() -> Self {
        Self {
            pe_shots: 200,
            max_rounds: 8,
        }
    }
}

pub fn zeno_prepare(
    model: &InterpolatedModel,
    schedule: &[f64],
    encoding: Encoding,
    mode: Mode,
    seed: u64,
) -> Result<ZenoTrace> {
    zeno_prepare_with(model, schedule, encoding, mode, seed, &ZenoOptions::default())
}

/// Energies of `source` grouped into degenerate levels, with the block
/// indices belonging to each.
fn levels(blocks: &[InvariantBlock]) -> Vec<(f64, Vec<usize>)> {
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, b) in blocks.iter().enumerate() {
        match out.last_mut() {
            Some((e, ks)) if (b.energy - *e).abs() < DEGENERACY_TOL => ks.push(k),
            _ => out.push((b.energy, vec![k])),
        }
    }
    out
}

/// Component of `psi` on the listed blocks, restricted to one walk sign
/// (`Some(±1)`) or to the whole block (`None`).
fn block_component(
    blocks: &[InvariantBlock],
    ks: &[usize],
    psi: &QuantumState,
    sign: Option<f64>,
) -> QuantumState {
    let mut out = psi.clone();
    out.scale(Complex64::new(0.0, 0.0));
    for &k in ks {
        let b = &blocks[k];
        let basis: Vec<QuantumState> = match (sign, b.is_boundary()) {
            (_, true) => vec![b.phi0.clone()],
            (None, false) => vec![b.phi0.clone(), b.phi1.clone().expect("interior block")],
            (Some(s), false) => vec![if s > 0.0 { b.plus() } else { b.minus() }.expect("interior block")],
        };
        for v in basis {
            out.add_scaled(v.inner(psi), &v);
        }
    }
    out
}

fn ground_overlap(prev: &[Complex64], vectors: &crate::linalg::CMatrix, ks: &[usize]) -> f64 {
    ks.iter()
        .map(|&k| {
            let col: Vec<Complex64> = vectors.column(k).iter().copied().collect();
            fidelity(&col, prev)
        })
        .sum::<f64>()
        .min(1.0)
}

pub fn zeno_prepare_with(
    model: &InterpolatedModel,
    schedule: &[f64],
    encoding: Encoding,
    mode: Mode,
    seed: u64,
    options: &ZenoOptions,
) -> Result<ZenoTrace> {
    validate_schedule(schedule)?;
    let ground0 = model.ground0.as_ref().ok_or_else(|| {
        Error::InvalidParameter("interpolated model has no initial ground state".into())
    })?;
    let mut psi = ground0.amplitudes();
    let mut prev_ground = psi.clone();
    let mut rng = rng_from_seed(seed, 0);
    let mut steps = Vec::with_capacity(schedule.len() - 1);
    let mut probability = 1.0;
    let mut overlap_product = 1.0;
    let mut success = true;
    let mut final_truth = psi.clone();
    for &g in &schedule[1..] {
        let h = model.interpolate(g)?;
        let bundle = build_walk(&h, encoding)?;
        let (_, vectors) = bundle.source().eigensystem()?;
        let blocks = invariant_blocks(&bundle)?;
        let lv = levels(&blocks);
        let (e0, ground_ks) = lv[0].clone();
        let overlap = ground_overlap(&prev_ground, &vectors, &ground_ks);
        overlap_product *= overlap;
        let ground_vec: Vec<Complex64> = vectors.column(ground_ks[0]).iter().copied().collect();
        prev_ground = ground_vec.clone();
        final_truth = ground_vec;
        let start = bundle.initial_state(&psi)?;
        let step = match mode {
            Mode::Analysis => {
                let comp = block_component(&blocks, &ground_ks, &start, None);
                let p = comp.norm_sqr();
                let post = comp
                    .normalized()
                    .ok_or_else(|| Error::InvalidParameter(format!("no ground weight at g = {g}")))?;
                let vp = post.applied(bundle.unprepare())?.project_control_vacuum();
                let sys = vp.success.expect("ground branch returns to vacuum").system_part().0;
                let n = norm_sqr(&sys).sqrt();
                psi = sys.iter().map(|a| a / n).collect();
                probability *= p * vp.p_success;
                ZenoStep {
                    g,
                    measured_energy: e0,
                    ground_energy: e0,
                    normalization: bundle.source().normalization(),
                    success: true,
                    probability: p * vp.p_success,
                    overlap,
                }
            }
            Mode::Sample => {
                let mut choices: Vec<(f64, usize, Option<f64>)> = Vec::new();
                for (li, (e, ks)) in lv.iter().enumerate() {
                    let signs: &[Option<f64>] = if e.abs() >= 1.0 - BOUNDARY_EPS {
                        &[None]
                    } else {
                        &[Some(1.0), Some(-1.0)]
                    };
                    for &s in signs {
                        let p = block_component(&blocks, ks, &start, s).norm_sqr();
                        choices.push((p, li, s));
                    }
                }
                let u: f64 = rng.random::<f64>() * choices.iter().map(|c| c.0).sum::<f64>();
                let mut acc = 0.0;
                let mut pick = choices.iter().rev().find(|c| c.0 > 0.0).copied().expect("nonzero state");
                for c in &choices {
                    acc += c.0;
                    if u < acc && c.0 > 0.0 {
                        pick = *c;
                        break;
                    }
                }
                let (_, li, s) = pick;
                let (e, ks) = &lv[li];
                let post = block_component(&blocks, ks, &start, s)
                    .normalized()
                    .expect("picked branch has weight");
                let rec = estimate_energy(&bundle, &post, options.pe_shots, rng.random())?;
                let proj = project_to_eigenstate(&bundle, &post, *e, options.max_rounds, Mode::Sample, rng.random())?;
                let ok = li == 0 && proj.success;
                if let Some(sys) = proj.system {
                    psi = sys;
                }
                ZenoStep {
                    g,
                    measured_energy: rec.estimate,
                    ground_energy: e0,
                    normalization: bundle.source().normalization(),
                    success: ok,
                    probability: choices
                        .iter()
                        .filter(|c| c.1 == 0)
                        .map(|c| c.0)
                        .sum::<f64>(),
                    overlap,
                }
            }
        };
        let ok = step.success;
        steps.push(step);
        if !ok {
            success = false;
            break;
        }
    }
    let success_probability = match mode {
        Mode::Analysis => probability,
        Mode::Sample => f64::from(u8::from(success)),
    };
    Ok(ZenoTrace {
        schedule: schedule.to_vec(),
        encoding,
        mode,
        seed,
        steps,
        final_fidelity: fidelity(&final_truth, &psi),
        final_state: psi.iter().map(|a| [a.re, a.im]).collect(),
        success_probability,
        overlap_product,
        success,
    })
}

/// `Γ_σ = Σ_j β_j² (−1)^{σ⋆P_j}`.
pub fn gamma(sigma: &PauliString, rescaled: &RescaledLcu) -> Result<f64> {
    rescaled.weights().iter().try_fold(0.0, |acc, t| {
        let star = sigma.star(&t.pauli)?;
        Ok(acc + if star == 0 { t.beta_sq } else { -t.beta_sq })
    })
}

/// `½(1 + (Γ − E²)/(1 − E²))`.
pub fn recovery_scale(energy: f64, gamma_sigma: f64) -> f64 {
    0.5 * (1.0 + (gamma_sigma - energy * energy) / (1.0 - energy * energy))
}

/// Divides a walk-eigenstate expectation by the recovery scale factor.
pub fn recover_expectation(measured: f64, energy: f64, gamma_sigma: f64) -> Result<f64> {
    if energy.abs() >= 1.0 - BOUNDARY_EPS {
        return Err(Error::BoundaryEnergy(energy));
    }
    let scale = recovery_scale(energy, gamma_sigma);
    if scale.abs() < BOUNDARY_EPS {
        return Err(Error::Unrecoverable(scale));
    }
    Ok(measured / scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseStatus {
    Pass,
    Fail,
    InvalidPrecondition,
}

/// One `(model, σ, k)` comparison of recovered and direct expectations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryCase {
    pub model: String,
    pub sigma: String,
    pub k: usize,
    pub energy: f64,
    pub gamma: f64,
    pub measured_plus: Option<f64>,
    pub measured_minus: Option<f64>,
    pub direct: f64,
    pub recovered_plus: Option<f64>,
    pub recovered_minus: Option<f64>,
    pub error: Option<f64>,
    pub status: CaseStatus,
    pub note: Option<String>,
}

pub const RECOVERY_TOL: f64 = 1e-9;

/// `X`, `Y` and `Z` on every site.
pub fn single_site_paulis(n: usize) -> Vec<PauliString> {
    (0..n)
        .flat_map(|q| {
            [Letter::X, Letter::Y, Letter::Z]
                .map(|l| PauliString::single(n, q, l).expect("site in range"))
        })
        .collect()
}

/// Checks the recovery formula on every eigenblock for every `σ`.
pub fn verify_recovery(
    model: &str,
    bundle: &WalkBundle,
    sigmas: &[PauliString],
) -> Result<Vec<RecoveryCase>> {
    let blocks = invariant_blocks(bundle)?;
    let sys = bundle.layout().system();
    let mut out = Vec::with_capacity(blocks.len() * sigmas.len());
    for sigma in sigmas {
        let g = gamma(sigma, bundle.source())?;
        for (k, b) in blocks.iter().enumerate() {
            let direct = sigma_expectation(sigma, &b.eigenvector);
            let mut case = RecoveryCase {
                model: model.to_string(),
                sigma: sigma.word(),
                k,
                energy: b.energy,
                gamma: g,
                measured_plus: None,
                measured_minus: None,
                direct,
                recovered_plus: None,
                recovered_minus: None,
                error: None,
                status: CaseStatus::InvalidPrecondition,
                note: None,
            };
            let (Some(plus), Some(minus)) = (b.plus(), b.minus()) else {
                case.note = Some("boundary energy".into());
                out.push(case);
                continue;
            };
            let mp = plus.expectation(sigma, sys.clone())?;
            let mm = minus.expectation(sigma, sys.clone())?;
            case.measured_plus = Some(mp);
            case.measured_minus = Some(mm);
            match (recover_expectation(mp, b.energy, g), recover_expectation(mm, b.energy, g)) {
                (Ok(rp), Ok(rm)) => {
                    let err = (rp - direct).abs().max((rm - direct).abs());
                    case.recovered_plus = Some(rp);
                    case.recovered_minus = Some(rm);
                    case.error = Some(err);
                    case.status = if err <= RECOVERY_TOL {
                        CaseStatus::Pass
                    } else {
                        CaseStatus::Fail
                    };
                }
                (Err(e), _) | (_, Err(e)) => case.note = Some(e.to_string()),
            }
            out.push(case);
        }
    }
    Ok(out)
}

fn sigma_expectation(sigma: &PauliString, phi: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, a) in phi.iter().enumerate() {
        let (y, ph) = sigma.act_on_basis(x as u64);
        acc += phi[y as usize].conj() * ph * a;
    }
    acc.re
}
