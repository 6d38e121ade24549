//! Dense statevector simulation over a sectioned register.
//!
//! Qubits are laid out as `system | control | ancilla | pe`, with qubit 0 the
//! least-significant bit of amplitude indices.

mod circuit;
mod gate;

pub use circuit::Circuit;
pub use gate::{Axis, Control, Gate};

use std::ops::Range;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, norm_sqr};
use crate::pauli::PauliString;

/// Default ceiling on total simulated qubits.
pub const DEFAULT_QUBIT_CAP: usize = 22;

pub type SimRng = ChaCha8Rng;

/// Deterministic generator for `(seed, stream)`; independent streams never overlap.
pub fn rng_from_seed(seed: u64, stream: u64) -> SimRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Binary,
    Unary,
    Hybrid,
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Encoding::Binary => "binary",
            Encoding::Unary => "unary",
            Encoding::Hybrid => "hybrid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub system_qubits: usize,
    pub control_qubits: usize,
    pub encoding: Encoding,
    pub ancilla_qubits: usize,
    pub has_pe: bool,
}

impl RegisterLayout {
    pub fn new(
        system_qubits: usize,
        control_qubits: usize,
        encoding: Encoding,
        ancilla_qubits: usize,
        has_pe: bool,
    ) -> Result<Self> {
        Self::with_cap(
            system_qubits,
            control_qubits,
            encoding,
            ancilla_qubits,
            has_pe,
            DEFAULT_QUBIT_CAP,
        )
    }

    pub fn with_cap(
        system_qubits: usize,
        control_qubits: usize,
        encoding: Encoding,
        ancilla_qubits: usize,
        has_pe: bool,
        cap: usize,
    ) -> Result<Self> {
        let l = Self {
            system_qubits,
            control_qubits,
            encoding,
            ancilla_qubits,
            has_pe,
        };
        if l.total() > cap {
            return Err(Error::DimensionCap {
                what: "statevector",
                qubits: l.total(),
                cap,
            });
        }
        if system_qubits == 0 {
            return Err(Error::InvalidParameter("layout needs system qubits".into()));
        }
        Ok(l)
    }

    pub fn total(&self) -> usize {
        self.system_qubits + self.control_qubits + self.ancilla_qubits + usize::from(self.has_pe)
    }

    pub fn system(&self) -> Range<usize> {
        0..self.system_qubits
    }

    pub fn control(&self) -> Range<usize> {
        let s = self.system_qubits;
        s..s + self.control_qubits
    }

    pub fn ancilla(&self) -> Range<usize> {
        let s = self.system_qubits + self.control_qubits;
        s..s + self.ancilla_qubits
    }

    pub fn pe(&self) -> Option<usize> {
        self.has_pe
            .then_some(self.system_qubits + self.control_qubits + self.ancilla_qubits)
    }

    pub fn dim(&self) -> usize {
        1usize << self.total()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

/// Both branches of a projective measurement; a branch with zero weight has no posterior.
#[derive(Debug, Clone)]
pub struct MeasureAnalysis {
    pub p0: f64,
    pub p1: f64,
    pub post0: Option<QuantumState>,
    pub post1: Option<QuantumState>,
}

#[derive(Debug, Clone)]
pub struct MeasureSample {
    pub outcome: bool,
    pub p0: f64,
    pub p1: f64,
    pub state: QuantumState,
}

#[derive(Debug, Clone)]
pub struct VacuumProjection {
    pub p_success: f64,
    pub success: Option<QuantumState>,
    pub failure: Option<QuantumState>,
}

const ZERO_BRANCH: f64 = 1e-300;

impl QuantumState {
    /// All qubits in `|0⟩`.
    pub fn zero(layout: RegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[0] = Complex64::new(1.0, 0.0);
        Self { layout, amps }
    }

    /// System register in `system`, everything else in `|0⟩`.
    pub fn from_system(layout: RegisterLayout, system: &[Complex64]) -> Result<Self> {
        if system.len() != 1usize << layout.system_qubits {
            return Err(Error::WidthMismatch(
                layout.system_qubits,
                system.len().trailing_zeros() as usize,
            ));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dim()];
        amps[..system.len()].copy_from_slice(system);
        Ok(Self { layout, amps })
    }

    pub fn from_amplitudes(layout: RegisterLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::InvalidParameter(format!(
                "{} amplitudes for a {}-dimensional layout",
                amps.len(),
                layout.dim()
            )));
        }
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    pub fn normalized(mut self) -> Option<Self> {
        let n = self.norm_sqr().sqrt();
        if n * n <= ZERO_BRANCH {
            return None;
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Some(self)
    }

    pub fn scale(&mut self, f: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= f);
    }

    /// `self + f·other`.
    pub fn add_scaled(&mut self, f: Complex64, other: &Self) {
        for (a, b) in self.amps.iter_mut().zip(&other.amps) {
            *a += f * b;
        }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.layout.total())?;
        gate.apply(&mut self.amps);
        Ok(())
    }

    pub fn apply_circuit(&mut self, c: &Circuit) -> Result<()> {
        if c.layout() != &self.layout {
            return Err(Error::InvalidParameter(
                "circuit and state layouts differ".into(),
            ));
        }
        for g in c.gates() {
            g.apply(&mut self.amps);
        }
        Ok(())
    }

    pub fn applied(mut self, c: &Circuit) -> Result<Self> {
        self.apply_circuit(c)?;
        Ok(self)
    }

    /// `⟨ψ|σ|ψ⟩` with `σ` placed on qubits `offset..offset + width`.
    pub fn expectation(&self, pauli: &PauliString, register: Range<usize>) -> Result<f64> {
        if pauli.n_qubits() != register.len() {
            return Err(Error::WidthMismatch(register.len(), pauli.n_qubits()));
        }
        if register.end > self.layout.total() {
            return Err(Error::QubitOutOfRange {
                qubit: register.end - 1,
                total: self.layout.total(),
            });
        }
        let offset = register.start;
        let mut img = self.amps.clone();
        Gate::ControlledPauli {
            controls: vec![],
            pauli: *pauli,
            offset,
        }
        .apply(&mut img);
        Ok(inner(&self.amps, &img).re)
    }

    fn project_with(&self, keep: impl Fn(usize) -> bool) -> (f64, QuantumState) {
        let mut amps = self.amps.clone();
        let mut p = 0.0;
        for (i, a) in amps.iter_mut().enumerate() {
            if keep(i) {
                p += a.norm_sqr();
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        (
            p,
            QuantumState {
                layout: self.layout,
                amps,
            },
        )
    }

    pub fn measure_analyze(&self, qubit: usize) -> Result<MeasureAnalysis> {
        self.check_qubit(qubit)?;
        let bit = 1usize << qubit;
        let (p0, s0) = self.project_with(|i| i & bit == 0);
        let (p1, s1) = self.project_with(|i| i & bit != 0);
        let total = p0 + p1;
        Ok(MeasureAnalysis {
            p0: p0 / total,
            p1: p1 / total,
            post0: s0.normalized(),
            post1: s1.normalized(),
        })
    }

    pub fn measure_sample(&self, qubit: usize, rng: &mut SimRng) -> Result<MeasureSample> {
        let a = self.measure_analyze(qubit)?;
        let u: f64 = rng.random();
        let outcome = u >= a.p0;
        let state = if outcome { a.post1 } else { a.post0 };
        Ok(MeasureSample {
            outcome,
            p0: a.p0,
            p1: a.p1,
            state: state.expect("sampled branch has positive weight"),
        })
    }

    /// Projects the control register onto `|0…0⟩` versus its complement.
    /// An empty control register always projects successfully.
    pub fn project_control_vacuum(&self) -> VacuumProjection {
        let c = self.layout.control();
        let mask = ((1usize << c.len()) - 1) << c.start;
        let (p, s) = self.project_with(|i| i & mask == 0);
        let (q, f) = self.project_with(|i| i & mask != 0);
        let total = p + q;
        VacuumProjection {
            p_success: p / total,
            success: s.normalized(),
            failure: f.normalized(),
        }
    }

    /// System amplitudes on the branch where every other qubit is `|0⟩`,
    /// together with the weight left outside that branch.
    pub fn system_part(&self) -> (Vec<Complex64>, f64) {
        let d = 1usize << self.layout.system_qubits;
        let sys = self.amps[..d].to_vec();
        let rest = norm_sqr(&self.amps[d..]);
        (sys, rest)
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.layout.total() {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                total: self.layout.total(),
            });
        }
        Ok(())
    }

    /// `[(index, re, im), …]` over nonzero amplitudes.
    pub fn dump_json(&self) -> String {
        let triples: Vec<(usize, f64, f64)> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, a)| (i, a.re, a.im))
            .collect();
        serde_json::to_string(&triples).expect("plain data serializes")
    }
}
