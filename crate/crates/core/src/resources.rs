//! Fault-tolerant cost accounting: the walk method against Trotter and
//! truncated-Taylor simulation, under distillation and synthesis costs.

use serde::{Deserialize, Serialize};

use crate::census::GateCensus;
use crate::hamiltonian::{group, normalize, LcuHamiltonian, ShiftPolicy, DEFAULT_GROUP_TOL};
use crate::sim::{Circuit, Encoding};
use crate::spectral::build_walk;
use crate::{Error, Result};

/// Exact recount of a circuit by tier.
pub fn census(c: &Circuit) -> GateCensus {
    c.recount()
}

/// A positive cost as a function of the per-gate accuracy `δ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFn {
    /// `a · ln(1/δ)^b`.
    Log { a: f64, b: f64 },
    Constant { value: f64 },
    /// `(δ, cost)` points, interpolated linearly in `ln δ` and clamped at the ends.
    Table { points: Vec<(f64, f64)> },
}

impl CostFn {
    pub fn eval(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("δ = {delta} outside (0, 1)")));
        }
        let v = match self {
            CostFn::Log { a, b } => a * (1.0 / delta).ln().powf(*b),
            CostFn::Constant { value } => *value,
            CostFn::Table { points } => interpolate(points, delta)?,
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!("cost {v} at δ = {delta} is not positive")));
        }
        Ok(v)
    }
}

fn interpolate(points: &[(f64, f64)], delta: f64) -> Result<f64> {
    if points.is_empty() || points.iter().any(|p| !(p.0 > 0.0 && p.0 < 1.0)) {
        return Err(Error::InvalidParameter("cost table needs points with δ in (0, 1)".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let x = delta.ln();
    let first = pts[0];
    let last = pts[pts.len() - 1];
    if delta <= first.0 {
        return Ok(first.1);
    }
    if delta >= last.0 {
        return Ok(last.1);
    }
    let i = pts.iter().position(|p| p.0 >= delta).expect("inside the table range");
    let (lo, hi) = (pts[i - 1], pts[i]);
    let f = (x - lo.0.ln()) / (hi.0.ln() - lo.0.ln());
    Ok(lo.1 + f * (hi.1 - lo.1))
}

/// Distillation cost `C_D` and rotation-synthesis cost `C_S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub distillation: CostFn,
    pub synthesis: CostFn,
}

impl Default for CostModel {
    /// `C_D = C_S = ln(1/δ)`.
    fn default() -> Self {
        Self::closed_form(1.0, 1.0, 1.0)
    }
}

impl CostModel {
    /// `C_D = a·ln(1/δ)^b`, `C_S = c·ln(1/δ)`.
    pub fn closed_form(a: f64, b: f64, c: f64) -> Self {
        Self {
            distillation: CostFn::Log { a, b },
            synthesis: CostFn::Log { a: c, b: 1.0 },
        }
    }

    pub fn constant(c_d: f64, c_s: f64) -> Self {
        Self {
            distillation: CostFn::Constant { value: c_d },
            synthesis: CostFn::Constant { value: c_s },
        }
    }

    pub fn c_d(&self, delta: f64) -> Result<f64> {
        self.distillation.eval(delta)
    }

    pub fn c_s(&self, delta: f64) -> Result<f64> {
        self.synthesis.eval(delta)
    }

    /// `rotations·C_D·C_S + third_level·C_D`.
    pub fn gate_cost(&self, rotations: f64, third_level: f64, delta: f64) -> Result<f64> {
        let cd = self.c_d(delta)?;
        Ok(rotations * cd * self.c_s(delta)? + third_level * cd)
    }

    pub fn census_cost(&self, c: &GateCensus, delta: f64) -> Result<f64> {
        self.gate_cost(c.rotations as f64, c.third_level_total() as f64, delta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostQuery {
    /// System size.
    pub n: usize,
    /// Term count.
    pub n_terms: usize,
    /// Distinct-strength count.
    pub k: usize,
    pub normalization: f64,
    /// Spectral gap, the target resolution.
    pub gap: f64,
    /// Per-gate accuracy.
    pub delta: f64,
    /// `t = c_t / Δ` unless `time` is given.
    pub c_t: f64,
    pub time: Option<f64>,
    /// Defaults to the normalization.
    pub norm_h: Option<f64>,
}

impl CostQuery {
    pub fn new(n: usize, n_terms: usize, k: usize, normalization: f64, gap: f64, delta: f64) -> Self {
        Self {
            n,
            n_terms,
            k,
            normalization,
            gap,
            delta,
            c_t: 1.0,
            time: None,
            norm_h: None,
        }
    }

    pub fn time(&self) -> f64 {
        self.time.unwrap_or(self.c_t / self.gap)
    }

    pub fn norm_h(&self) -> f64 {
        self.norm_h.unwrap_or(self.normalization)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{what} must be positive")));
        if self.n == 0 {
            return bad("n");
        }
        if self.n_terms == 0 {
            return bad("term count");
        }
        if self.k == 0 || self.k > self.n_terms {
            return Err(Error::InvalidParameter(format!(
                "K = {} must lie in 1..={}",
                self.k, self.n_terms
            )));
        }
        for (v, what) in [
            (self.normalization, "normalization"),
            (self.gap, "gap"),
            (self.c_t, "c_t"),
            (self.time(), "time"),
            (self.norm_h(), "‖H‖"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(what);
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("δ = {} outside (0, 1)", self.delta)));
        }
        if self.gap > self.norm_h() {
            return Err(Error::InvalidParameter(format!(
                "gap {} exceeds ‖H‖ = {}",
                self.gap,
                self.norm_h()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkCost {
    pub time: f64,
    pub c_t: f64,
    /// `⌈𝒩 t⌉`.
    pub repetitions: u64,
    pub rotations_per_call: u64,
    pub third_level_per_call: u64,
    /// Census cost of one controlled walk.
    pub per_call: f64,
    /// `K·C_D·C_S + N·C_D`.
    pub closed_form_per_call: f64,
    pub total: f64,
    pub closed_form_total: f64,
}

pub fn walk_method_cost(q: &CostQuery, m: &CostModel, per_w: &GateCensus) -> Result<WalkCost> {
    q.validate()?;
    let t = q.time();
    let repetitions = (q.normalization * t).ceil() as u64;
    let per_call = m.census_cost(per_w, q.delta)?;
    let closed = m.gate_cost(q.k as f64, q.n_terms as f64, q.delta)?;
    Ok(WalkCost {
        time: t,
        c_t: q.c_t,
        repetitions,
        rotations_per_call: per_w.rotations,
        third_level_per_call: per_w.third_level_total(),
        per_call,
        closed_form_per_call: closed,
        total: repetitions as f64 * per_call,
        closed_form_total: repetitions as f64 * closed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Lattice,
    Chemistry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterCost {
    pub regime: Regime,
    /// Step-count scale `N_T`.
    pub steps: f64,
    pub rotations_per_step: f64,
    pub rotations_total: f64,
    /// Each rotation charged `C_D·C_S`.
    pub total: f64,
}

/// Asymptotic Trotter counts with unit constants: `N_T = √n/Δ²` with `n`
/// rotations per step on a lattice, `N_T = n⁵/Δ²` with `n⁴` per step for chemistry.
pub fn trotter_estimate(q: &CostQuery, m: &CostModel, regime: Regime) -> Result<TrotterCost> {
    q.validate()?;
    let n = q.n as f64;
    let inv_gap2 = 1.0 / (q.gap * q.gap);
    let (steps, per_step) = match regime {
        Regime::Lattice => (n.sqrt() * inv_gap2, n),
        Regime::Chemistry => (n.powi(5) * inv_gap2, n.powi(4)),
    };
    let rotations_total = steps * per_step;
    Ok(TrotterCost {
        regime,
        steps,
        rotations_per_step: per_step,
        rotations_total,
        total: m.gate_cost(rotations_total, 0.0, q.delta)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorCost {
    /// Segments `⌈‖H‖/Δ⌉`.
    pub r: u64,
    /// Truncation order `⌈ln(‖H‖/Δ²)⌉`, at least 1.
    pub m: u64,
    pub per_call: f64,
    pub total: f64,
    /// Factor `r·M` by which the single-segment walk is cheaper.
    pub savings_ratio: u64,
}

pub fn taylor_estimate(q: &CostQuery, m: &CostModel, per_w: &GateCensus) -> Result<TaylorCost> {
    q.validate()?;
    let norm = q.norm_h();
    let r = (norm / q.gap).ceil().max(1.0) as u64;
    let order = (norm / (q.gap * q.gap)).ln().ceil().max(1.0) as u64;
    let per_call = m.census_cost(per_w, q.delta)?;
    Ok(TaylorCost {
        r,
        m: order,
        per_call,
        total: (r * order) as f64 * per_call,
        savings_ratio: r * order,
    })
}

/// Controlled-walk census of one encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingRow {
    pub encoding: Encoding,
    pub control_qubits: usize,
    /// Rotations in one application of `B`.
    pub prepare_rotations: u64,
    /// Rotations in one controlled walk.
    pub rotations: u64,
    pub third_level: u64,
    pub clifford: u64,
    pub qubits: u64,
    pub terms: usize,
    pub distinct_strengths: usize,
}

/// One row per encoding the model can be built in.
pub fn encoding_table(h: &LcuHamiltonian) -> Result<Vec<EncodingRow>> {
    let rescaled = normalize(h, ShiftPolicy::Auto)?;
    let grouped = group(&rescaled, DEFAULT_GROUP_TOL)?;
    let terms = rescaled.weights().iter().filter(|t| !t.pauli.is_identity_word()).count();
    let mut rows = Vec::new();
    let mut first_err = None;
    for enc in [Encoding::Binary, Encoding::Unary, Encoding::Hybrid] {
        match build_walk(h, enc) {
            Ok(b) => {
                let c = b.controlled_walk().census();
                rows.push(EncodingRow {
                    encoding: enc,
                    control_qubits: b.layout().control_qubits,
                    prepare_rotations: b.prepare().census().rotations,
                    rotations: c.rotations,
                    third_level: c.third_level_total(),
                    clifford: c.clifford,
                    qubits: c.qubits,
                    terms,
                    distinct_strengths: grouped.distinct_strengths(),
                });
            }
            Err(e) => {
                if enc != Encoding::Hybrid && first_err.is_none() {
                    first_err = Some(e);
                }
            }
        }
    }
    if rows.is_empty() {
        return Err(first_err.unwrap_or(Error::EmptyHamiltonian));
    }
    Ok(rows)
}
