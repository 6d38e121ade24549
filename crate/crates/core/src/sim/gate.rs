use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::census::{GateCensus, Tier};
use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Control {
    pub qubit: usize,
    /// Required basis value of the control qubit.
    pub on: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Self { qubit, on: true }
    }

    pub fn off(qubit: usize) -> Self {
        Self { qubit, on: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// One gate record. The cost tier is a function of the variant; see [`Gate::tier`].
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    S {
        target: usize,
        dagger: bool,
    },
    Cnot {
        control: usize,
        target: usize,
    },
    Cz(usize, usize),
    Swap(usize, usize),
    /// Signed Pauli word on qubits `offset..offset + pauli.n_qubits()`.
    ControlledPauli {
        controls: Vec<Control>,
        pauli: PauliString,
        offset: usize,
    },
    /// Multi-controlled X with at least two controls.
    Toffoli {
        controls: Vec<Control>,
        target: usize,
    },
    T {
        target: usize,
        dagger: bool,
    },
    /// `|1⟩_s|0⟩_d ↦ (|1⟩_s|0⟩_d + |0⟩_s|1⟩_d)/√2`, `|0⟩_s|1⟩_d ↦ (|0⟩_s|1⟩_d − |1⟩_s|0⟩_d)/√2`;
    /// a √SWAP dressed with single-qubit phase gates.
    Fanout {
        source: usize,
        dest: usize,
        adjoint: bool,
    },
    ControlledSwap {
        control: Control,
        a: usize,
        b: usize,
    },
    /// Phase `−1` on the basis states matching every listed polarity.
    MultiControlledZ(Vec<Control>),
    Rotation {
        axis: Axis,
        angle: f64,
        target: usize,
        controls: Vec<Control>,
    },
    /// Rotation on `target` whose angle is selected by the value
    /// `Σ_k bit(select[k]) << k`.
    MultiplexedRotation {
        axis: Axis,
        target: usize,
        select: Vec<usize>,
        angles: Vec<f64>,
    },
    /// `i^quarter_turns` on the branch where the controls match.
    GlobalPhase {
        quarter_turns: u8,
        controls: Vec<Control>,
    },
}

const ANGLE_TOL: f64 = 1e-12;

fn angle_is_multiple_of(angle: f64, unit: f64) -> bool {
    let r = (angle / unit).round();
    (angle - r * unit).abs() < ANGLE_TOL
}

fn rotation_matrix(axis: Axis, angle: f64) -> [[Complex64; 2]; 2] {
    let c = (angle / 2.0).cos();
    let s = (angle / 2.0).sin();
    let z = Complex64::new(0.0, 0.0);
    match axis {
        Axis::X => [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
        Axis::Y => [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
        Axis::Z => [
            [Complex64::from_polar(1.0, -angle / 2.0), z],
            [z, Complex64::from_polar(1.0, angle / 2.0)],
        ],
    }
}

fn control_mask(controls: &[Control]) -> (usize, usize) {
    controls.iter().fold((0, 0), |(m, v), c| {
        let bit = 1usize << c.qubit;
        (m | bit, if c.on { v | bit } else { v })
    })
}

fn negative_controls(controls: &[Control]) -> u64 {
    controls.iter().filter(|c| !c.on).count() as u64
}

fn apply_1q(amps: &mut [Complex64], target: usize, m: &[[Complex64; 2]; 2], mask: usize, val: usize) {
    let bit = 1usize << target;
    for i in 0..amps.len() {
        if i & bit != 0 || i & mask != val {
            continue;
        }
        let j = i | bit;
        let (a, b) = (amps[i], amps[j]);
        amps[i] = m[0][0] * a + m[0][1] * b;
        amps[j] = m[1][0] * a + m[1][1] * b;
    }
}

impl Gate {
    /// Every qubit the gate touches, controls included.
    pub fn qubits(&self) -> Vec<usize> {
        let cq = |c: &[Control]| c.iter().map(|c| c.qubit).collect::<Vec<_>>();
        match self {
            Gate::H(t) | Gate::S { target: t, .. } | Gate::T { target: t, .. } => vec![*t],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Cz(a, b) | Gate::Swap(a, b) => vec![*a, *b],
            Gate::ControlledPauli {
                controls,
                pauli,
                offset,
            } => {
                let mut v = cq(controls);
                v.extend(*offset..*offset + pauli.n_qubits());
                v
            }
            Gate::Toffoli { controls, target } => {
                let mut v = cq(controls);
                v.push(*target);
                v
            }
            Gate::Fanout { source, dest, .. } => vec![*source, *dest],
            Gate::ControlledSwap { control, a, b } => vec![control.qubit, *a, *b],
            Gate::MultiControlledZ(c) => cq(c),
            Gate::Rotation {
                target, controls, ..
            } => {
                let mut v = cq(controls);
                v.push(*target);
                v
            }
            Gate::MultiplexedRotation { target, select, .. } => {
                let mut v = select.clone();
                v.push(*target);
                v
            }
            Gate::GlobalPhase { controls, .. } => cq(controls),
        }
    }

    pub fn validate(&self, total: usize) -> Result<()> {
        let qs = self.qubits();
        let mut seen = vec![false; total];
        for &q in &qs {
            if q >= total {
                return Err(Error::QubitOutOfRange { qubit: q, total });
            }
            if seen[q] {
                return Err(Error::DuplicateQubit(q));
            }
            seen[q] = true;
        }
        match self {
            Gate::Toffoli { controls, .. } if controls.len() < 2 => Err(Error::InvalidParameter(
                "Toffoli needs at least two controls".into(),
            )),
            Gate::Rotation { angle, .. } if !angle.is_finite() => Err(Error::NonFinite),
            Gate::MultiplexedRotation { select, angles, .. } => {
                if angles.len() != 1usize << select.len() {
                    return Err(Error::InvalidParameter(format!(
                        "multiplexed rotation over {} bits needs {} angles, got {}",
                        select.len(),
                        1usize << select.len(),
                        angles.len()
                    )));
                }
                if angles.iter().any(|a| !a.is_finite()) {
                    return Err(Error::NonFinite);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn tier(&self) -> Tier {
        match self {
            Gate::H(_)
            | Gate::S { .. }
            | Gate::Cnot { .. }
            | Gate::Cz(..)
            | Gate::Swap(..)
            | Gate::ControlledPauli { .. }
            | Gate::GlobalPhase { .. } => Tier::Clifford,
            Gate::Toffoli { .. } | Gate::T { .. } | Gate::Fanout { .. } | Gate::ControlledSwap { .. } => {
                Tier::ThirdLevel
            }
            Gate::MultiControlledZ(q) => {
                if q.len() <= 2 {
                    Tier::Clifford
                } else {
                    Tier::ThirdLevel
                }
            }
            Gate::Rotation { .. } | Gate::MultiplexedRotation { .. } => Tier::Rotation,
        }
    }

    /// Workspace qubits needed to realize the gate with a logical-AND ladder.
    pub fn workspace(&self) -> usize {
        match self {
            Gate::ControlledPauli { controls, .. } | Gate::Rotation { controls, .. } => {
                controls.len().saturating_sub(1)
            }
            Gate::Toffoli { controls, .. } => controls.len().saturating_sub(2),
            Gate::MultiControlledZ(q) => q.len().saturating_sub(2),
            Gate::GlobalPhase { controls, .. } => controls.len().saturating_sub(2),
            _ => 0,
        }
    }

    /// Contribution of this gate to a census.
    ///
    /// Multi-controlled gates are costed as a compute-only AND ladder
    /// (`m` controls → `m − 1` Toffolis, measurement-based uncompute);
    /// negative-polarity controls add two X gates each.
    pub fn census(&self) -> GateCensus {
        let mut c = GateCensus::default();
        match self {
            Gate::H(_) | Gate::S { .. } | Gate::Cnot { .. } | Gate::Cz(..) | Gate::Swap(..) => {
                c.clifford += 1
            }
            Gate::ControlledPauli { controls, .. } => {
                c.clifford += 1 + 2 * negative_controls(controls);
                c.third_level.toffoli += controls.len().saturating_sub(1) as u64;
            }
            Gate::Toffoli { controls, .. } => {
                c.clifford += 2 * negative_controls(controls);
                c.third_level.toffoli += (controls.len() - 1) as u64;
            }
            Gate::T { .. } => c.third_level.t += 1,
            Gate::Fanout { .. } => {
                c.third_level.fanout_sqrt_swap += 1;
                c.clifford += 2;
            }
            Gate::ControlledSwap { control, .. } => {
                c.third_level.controlled_swap += 1;
                if !control.on {
                    c.clifford += 2;
                }
            }
            Gate::MultiControlledZ(q) => {
                c.clifford += 1 + 2 * negative_controls(q);
                c.third_level.toffoli += q.len().saturating_sub(2) as u64;
            }
            Gate::Rotation { controls, .. } => {
                c.rotations += 1;
                if !controls.is_empty() {
                    c.clifford += 2 + 2 * negative_controls(controls);
                    c.third_level.toffoli += (controls.len() - 1) as u64;
                }
            }
            Gate::MultiplexedRotation { select, angles, .. } => {
                // Trivial angles are identity (0) or Clifford (π, and π/2 when unselected).
                let clifford_unit = if select.is_empty() { FRAC_PI_2 } else { PI };
                for &a in angles {
                    if angle_is_multiple_of(a, 2.0 * PI) {
                        continue;
                    } else if angle_is_multiple_of(a, clifford_unit) {
                        c.clifford += 1;
                    } else {
                        c.rotations += 1;
                    }
                }
                if !select.is_empty() {
                    c.clifford += angles.len() as u64;
                }
            }
            Gate::GlobalPhase { controls, .. } => {
                c.clifford += 1 + 2 * negative_controls(controls);
                c.third_level.toffoli += controls.len().saturating_sub(2) as u64;
            }
        }
        c
    }

    pub fn inverse(&self) -> Gate {
        match self {
            Gate::S { target, dagger } => Gate::S {
                target: *target,
                dagger: !dagger,
            },
            Gate::T { target, dagger } => Gate::T {
                target: *target,
                dagger: !dagger,
            },
            Gate::ControlledPauli {
                controls,
                pauli,
                offset,
            } => {
                let inv_phase = (4 - pauli.phase()) % 4;
                Gate::ControlledPauli {
                    controls: controls.clone(),
                    pauli: pauli.with_phase(inv_phase),
                    offset: *offset,
                }
            }
            Gate::Fanout {
                source,
                dest,
                adjoint,
            } => Gate::Fanout {
                source: *source,
                dest: *dest,
                adjoint: !adjoint,
            },
            Gate::Rotation {
                axis,
                angle,
                target,
                controls,
            } => Gate::Rotation {
                axis: *axis,
                angle: -angle,
                target: *target,
                controls: controls.clone(),
            },
            Gate::MultiplexedRotation {
                axis,
                target,
                select,
                angles,
            } => Gate::MultiplexedRotation {
                axis: *axis,
                target: *target,
                select: select.clone(),
                angles: angles.iter().map(|a| -a).collect(),
            },
            Gate::GlobalPhase {
                quarter_turns,
                controls,
            } => Gate::GlobalPhase {
                quarter_turns: (4 - quarter_turns % 4) % 4,
                controls: controls.clone(),
            },
            g => g.clone(),
        }
    }

    /// Applies the gate in place. Indices must already be validated.
    pub fn apply(&self, amps: &mut [Complex64]) {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Gate::H(t) => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                apply_1q(amps, *t, &[[h, h], [h, -h]], 0, 0);
            }
            Gate::S { target, dagger } => {
                let p = Complex64::new(0.0, if *dagger { -1.0 } else { 1.0 });
                apply_1q(amps, *target, &[[one, zero], [zero, p]], 0, 0);
            }
            Gate::T { target, dagger } => {
                let ang = if *dagger { -PI / 4.0 } else { PI / 4.0 };
                let p = Complex64::from_polar(1.0, ang);
                apply_1q(amps, *target, &[[one, zero], [zero, p]], 0, 0);
            }
            Gate::Cnot { control, target } => {
                let x = [[zero, one], [one, zero]];
                apply_1q(amps, *target, &x, 1 << control, 1 << control);
            }
            Gate::Toffoli { controls, target } => {
                let (mask, val) = control_mask(controls);
                apply_1q(amps, *target, &[[zero, one], [one, zero]], mask, val);
            }
            Gate::Cz(a, b) => {
                let m = (1usize << a) | (1usize << b);
                for (i, x) in amps.iter_mut().enumerate() {
                    if i & m == m {
                        *x = -*x;
                    }
                }
            }
            Gate::MultiControlledZ(q) => {
                let (mask, val) = control_mask(q);
                for (i, x) in amps.iter_mut().enumerate() {
                    if i & mask == val {
                        *x = -*x;
                    }
                }
            }
            Gate::GlobalPhase {
                quarter_turns,
                controls,
            } => {
                let (mask, val) = control_mask(controls);
                let f = i_pow(*quarter_turns);
                for (i, x) in amps.iter_mut().enumerate() {
                    if i & mask == val {
                        *x *= f;
                    }
                }
            }
            Gate::Swap(a, b) => swap_bits(amps, *a, *b, 0, 0),
            Gate::ControlledSwap { control, a, b } => {
                let (mask, val) = control_mask(std::slice::from_ref(control));
                swap_bits(amps, *a, *b, mask, val);
            }
            Gate::Fanout {
                source,
                dest,
                adjoint,
            } => {
                let (sb, db) = (1usize << source, 1usize << dest);
                let r = FRAC_1_SQRT_2;
                for i in 0..amps.len() {
                    if i & sb == 0 || i & db != 0 {
                        continue;
                    }
                    let j = (i ^ sb) | db;
                    let (a, b) = (amps[i], amps[j]);
                    if *adjoint {
                        amps[i] = (a + b) * r;
                        amps[j] = (b - a) * r;
                    } else {
                        amps[i] = (a - b) * r;
                        amps[j] = (a + b) * r;
                    }
                }
            }
            Gate::ControlledPauli {
                controls,
                pauli,
                offset,
            } => apply_controlled_pauli(amps, controls, pauli, *offset),
            Gate::Rotation {
                axis,
                angle,
                target,
                controls,
            } => {
                let (mask, val) = control_mask(controls);
                apply_1q(amps, *target, &rotation_matrix(*axis, *angle), mask, val);
            }
            Gate::MultiplexedRotation {
                axis,
                target,
                select,
                angles,
            } => {
                let mats: Vec<_> = angles.iter().map(|&a| rotation_matrix(*axis, a)).collect();
                let bit = 1usize << target;
                for i in 0..amps.len() {
                    if i & bit != 0 {
                        continue;
                    }
                    let sel = select
                        .iter()
                        .enumerate()
                        .fold(0usize, |s, (k, &q)| s | (((i >> q) & 1) << k));
                    let m = &mats[sel];
                    let j = i | bit;
                    let (a, b) = (amps[i], amps[j]);
                    amps[i] = m[0][0] * a + m[0][1] * b;
                    amps[j] = m[1][0] * a + m[1][1] * b;
                }
            }
        }
    }
}

fn swap_bits(amps: &mut [Complex64], a: usize, b: usize, mask: usize, val: usize) {
    let (ab, bb) = (1usize << a, 1usize << b);
    for i in 0..amps.len() {
        if i & ab != 0 && i & bb == 0 && i & mask == val {
            let j = (i ^ ab) | bb;
            amps.swap(i, j);
        }
    }
}

fn apply_controlled_pauli(amps: &mut [Complex64], controls: &[Control], pauli: &PauliString, offset: usize) {
    let (mask, val) = control_mask(controls);
    let wmask = (1usize << pauli.n_qubits()) - 1;
    let xs = (pauli.x_bits() as usize) << offset;
    let coeff = |i: usize| pauli.act_on_basis(((i >> offset) & wmask) as u64).1;
    if xs == 0 {
        for (i, x) in amps.iter_mut().enumerate() {
            if i & mask == val {
                *x *= coeff(i);
            }
        }
        return;
    }
    let low = xs & xs.wrapping_neg();
    for i in 0..amps.len() {
        if i & low != 0 || i & mask != val {
            continue;
        }
        let j = i ^ xs;
        let (a, b) = (amps[i], amps[j]);
        amps[j] = coeff(i) * a;
        amps[i] = coeff(j) * b;
    }
}
