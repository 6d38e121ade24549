//! Walk operator `W = −S·V` with a binary-indexed control register, plus the
//! invariant-subspace analysis shared by every encoding.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::RescaledLcu;
use crate::linalg::{complex_eigenvalues, extend_orthonormal, inner, CMatrix};
use crate::sim::{Axis, Circuit, Control, Encoding, Gate, QuantumState, RegisterLayout};

/// `|E| ≥ 1 − BOUNDARY_EPS` collapses an invariant block to one dimension.
pub const BOUNDARY_EPS: f64 = 1e-9;

/// Every circuit of one walk operator on a shared layout.
///
/// `controlled_walk` is `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ W` with the phase-estimation
/// qubit as control.
#[derive(Debug, Clone)]
pub struct WalkBundle {
    encoding: Encoding,
    layout: RegisterLayout,
    source: RescaledLcu,
    prepare: Circuit,
    unprepare: Circuit,
    reflect: Circuit,
    select: Circuit,
    walk: Circuit,
    controlled_walk: Circuit,
}

impl WalkBundle {
    /// Builds `S`, `W` and controlled-`W` from `B`, the vacuum reflection and `V`.
    /// Both closures receive the extra control to attach, if any.
    pub(crate) fn assemble(
        encoding: Encoding,
        layout: RegisterLayout,
        source: RescaledLcu,
        prepare: Circuit,
        vacuum_reflection: impl Fn(Option<Control>) -> Vec<Gate>,
        select: impl Fn(Option<Control>) -> Vec<Gate>,
    ) -> Result<Self> {
        let pe = layout.pe().map(Control::on);
        let unprepare = prepare.inverse();
        let mut reflect = unprepare.clone();
        for g in vacuum_reflection(None) {
            reflect.push(g)?;
        }
        reflect.extend(&prepare)?;
        let mut sel = Circuit::new(layout);
        for g in select(None) {
            sel.push(g)?;
        }
        let mut walk = sel.clone();
        walk.extend(&reflect)?;
        walk.push(Gate::GlobalPhase {
            quarter_turns: 2,
            controls: vec![],
        })?;
        let mut cw = Circuit::new(layout);
        if let Some(pe) = pe {
            for g in select(Some(pe)) {
                cw.push(g)?;
            }
            cw.extend(&unprepare)?;
            for g in vacuum_reflection(Some(pe)) {
                cw.push(g)?;
            }
            cw.extend(&prepare)?;
            cw.push(Gate::GlobalPhase {
                quarter_turns: 2,
                controls: vec![pe],
            })?;
        }
        Ok(Self {
            encoding,
            layout,
            source,
            prepare,
            unprepare,
            reflect,
            select: sel,
            walk,
            controlled_walk: cw,
        })
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    /// The rescaled Hamiltonian this walk block-encodes.
    pub fn source(&self) -> &RescaledLcu {
        &self.source
    }

    pub fn prepare(&self) -> &Circuit {
        &self.prepare
    }

    pub fn unprepare(&self) -> &Circuit {
        &self.unprepare
    }

    pub fn reflect(&self) -> &Circuit {
        &self.reflect
    }

    pub fn select(&self) -> &Circuit {
        &self.select
    }

    pub fn walk(&self) -> &Circuit {
        &self.walk
    }

    pub fn controlled_walk(&self) -> &Circuit {
        &self.controlled_walk
    }

    /// `B|0⟩ ⊗ |ψ⟩`.
    pub fn initial_state(&self, system: &[Complex64]) -> Result<QuantumState> {
        QuantumState::from_system(self.layout, system)?.applied(&self.prepare)
    }

    pub fn system_dim(&self) -> usize {
        1 << self.layout.system_qubits
    }
}

/// Width of the binary control register for `n_terms` non-identity terms.
pub fn binary_width(n_terms: usize) -> usize {
    let slots = n_terms + 1;
    (usize::BITS - (slots - 1).leading_zeros()).max(1) as usize
}

/// Tree of multiplexed `R_y` rotations preparing `Σ_j √w_j |j⟩` on `qubits`
/// (`qubits[b]` holds bit `b`). Level `d` targets bit `w−1−d`.
pub fn binary_prepare_gates(weights: &[f64], qubits: &[usize]) -> Result<Vec<Gate>> {
    let w = qubits.len();
    if weights.len() > 1 << w {
        return Err(Error::InvalidParameter(format!(
            "{} weights do not fit in {w} bits",
            weights.len()
        )));
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|x| !(*x >= 0.0)) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::WeightSum(total));
    }
    let weight = |lo: usize, hi: usize| -> f64 {
        weights
            .iter()
            .enumerate()
            .filter(|(j, _)| *j >= lo && *j < hi)
            .map(|(_, x)| x)
            .sum()
    };
    let mut gates = Vec::with_capacity(w);
    for d in 0..w {
        let target_bit = w - 1 - d;
        let span = 1usize << (target_bit + 1);
        let half = span / 2;
        let angles: Vec<f64> = (0..1usize << d)
            .map(|prefix| {
                let lo = prefix * span;
                let left = weight(lo, lo + half);
                let right = weight(lo + half, lo + span);
                2.0 * right.sqrt().atan2(left.sqrt())
            })
            .collect();
        let select = (0..d).map(|k| qubits[target_bit + 1 + k]).collect();
        gates.push(Gate::MultiplexedRotation {
            axis: Axis::Y,
            target: qubits[target_bit],
            select,
            angles,
        });
    }
    Ok(gates)
}

/// `B`, `S`, `V`, `W` for `h` with a `⌈log₂(N+1)⌉`-qubit control register.
pub fn build_binary(h: &RescaledLcu) -> Result<WalkBundle> {
    let n = h.n_qubits();
    let width = binary_width(h.term_count());
    let layout = RegisterLayout::new(n, width, Encoding::Binary, 0, true)?;
    let ctrl: Vec<usize> = layout.control().collect();
    let weights: Vec<f64> = h.weights().iter().map(|t| t.beta_sq).collect();
    let mut prepare = Circuit::new(layout);
    for g in binary_prepare_gates(&weights, &ctrl)? {
        prepare.push(g)?;
    }
    let terms = h.weights().to_vec();
    let reflection = {
        let ctrl = ctrl.clone();
        move |extra: Option<Control>| {
            let mut q: Vec<Control> = ctrl.iter().copied().map(Control::off).collect();
            q.extend(extra);
            vec![Gate::MultiControlledZ(q)]
        }
    };
    let select = move |extra: Option<Control>| {
        let mut out = Vec::new();
        for (j, t) in terms.iter().enumerate() {
            if t.pauli.is_identity_word() && t.pauli.sign() != Some(-1.0) {
                continue;
            }
            let mut controls: Vec<Control> = ctrl
                .iter()
                .enumerate()
                .map(|(b, &q)| Control {
                    qubit: q,
                    on: j >> b & 1 == 1,
                })
                .collect();
            controls.extend(extra);
            out.push(Gate::ControlledPauli {
                controls,
                pauli: t.pauli,
                offset: 0,
            });
        }
        out
    };
    WalkBundle::assemble(Encoding::Binary, layout, h.clone(), prepare, reflection, select)
}

/// The two-dimensional subspace attached to one eigenvector of `H̄`.
#[derive(Debug, Clone)]
pub struct InvariantBlock {
    pub energy: f64,
    /// `arccos E`.
    pub theta: f64,
    /// Eigenvector of `H̄` on the system register.
    pub eigenvector: Vec<Complex64>,
    /// `B|0⟩ ⊗ φ_k`.
    pub phi0: QuantumState,
    /// `(V − E)φ⁰/√(1−E²)`; absent on the boundary `|E| → 1`.
    pub phi1: Option<QuantumState>,
    /// `S` and `V` in the `{φ⁰, φ¹}` basis (1×1 on the boundary).
    pub s_block: CMatrix,
    pub v_block: CMatrix,
}

impl InvariantBlock {
    pub fn is_boundary(&self) -> bool {
        self.phi1.is_none()
    }

    fn combine(&self, sign: f64) -> Option<QuantumState> {
        let phi1 = self.phi1.as_ref()?;
        let mut s = self.phi0.clone();
        s.add_scaled(Complex64::new(0.0, sign), phi1);
        s.scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
        Some(s)
    }

    /// `(φ⁰ + iφ¹)/√2`, eigenvalue `e^{+iθ}`.
    pub fn plus(&self) -> Option<QuantumState> {
        self.combine(1.0)
    }

    /// `(φ⁰ − iφ¹)/√2`, eigenvalue `e^{−iθ}`.
    pub fn minus(&self) -> Option<QuantumState> {
        self.combine(-1.0)
    }

    /// Walk eigenphases carried by this block.
    pub fn phases(&self) -> Vec<f64> {
        expected_phases_for(self.energy)
    }
}

fn expected_phases_for(e: f64) -> Vec<f64> {
    if e.abs() >= 1.0 - BOUNDARY_EPS {
        vec![if e > 0.0 { 0.0 } else { PI }]
    } else {
        let t = e.acos();
        vec![t, -t]
    }
}

fn block_matrix(c: &Circuit, basis: &[&QuantumState]) -> Result<CMatrix> {
    let k = basis.len();
    let mut m = CMatrix::zeros(k, k);
    for (b, v) in basis.iter().enumerate() {
        let img = (*v).clone().applied(c)?;
        for (a, u) in basis.iter().enumerate() {
            m[(a, b)] = u.inner(&img);
        }
    }
    Ok(m)
}

/// One block per eigenvector of `H̄`, in ascending energy order.
pub fn invariant_blocks(bundle: &WalkBundle) -> Result<Vec<InvariantBlock>> {
    let (energies, vectors) = bundle.source.eigensystem()?;
    let mut out = Vec::with_capacity(energies.len());
    for (k, &e) in energies.iter().enumerate() {
        let eigenvector: Vec<Complex64> = vectors.column(k).iter().copied().collect();
        let phi0 = bundle.initial_state(&eigenvector)?;
        let phi1 = if e.abs() >= 1.0 - BOUNDARY_EPS {
            None
        } else {
            let mut v = phi0.clone().applied(&bundle.select)?;
            v.add_scaled(Complex64::new(-e, 0.0), &phi0);
            v.scale(Complex64::new(1.0 / (1.0 - e * e).sqrt(), 0.0));
            Some(v)
        };
        let basis: Vec<&QuantumState> = std::iter::once(&phi0).chain(phi1.as_ref()).collect();
        let s_block = block_matrix(&bundle.reflect, &basis)?;
        let v_block = block_matrix(&bundle.select, &basis)?;
        out.push(InvariantBlock {
            energy: e,
            theta: e.clamp(-1.0, 1.0).acos(),
            eigenvector,
            phi0,
            phi1,
            s_block,
            v_block,
        });
    }
    Ok(out)
}

/// `[[E, s], [s, −E]]` with `s = √(1−E²)`, and `diag(−1, 1)` for `S`.
pub fn expected_blocks(e: f64) -> (CMatrix, CMatrix) {
    let s = (1.0 - e * e).max(0.0).sqrt();
    let c = |x: f64| Complex64::new(x, 0.0);
    (
        CMatrix::from_row_slice(2, 2, &[c(-1.0), c(0.0), c(0.0), c(1.0)]),
        CMatrix::from_row_slice(2, 2, &[c(e), c(s), c(s), c(-e)]),
    )
}

/// Restriction of `W` to the span of `{B|0⟩⊗|s⟩, W·B|0⟩⊗|s⟩}` over system basis states.
#[derive(Debug, Clone)]
pub struct RestrictedWalk {
    pub matrix: CMatrix,
    /// Largest weight of `W·b` outside the span, over basis vectors `b`.
    pub leakage: f64,
}

pub fn restricted_walk(bundle: &WalkBundle) -> Result<RestrictedWalk> {
    let dim = bundle.system_dim();
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for s in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[s] = Complex64::new(1.0, 0.0);
        let v = bundle.initial_state(&e)?;
        let wv = v.clone().applied(&bundle.walk)?;
        extend_orthonormal(&mut basis, v.amplitudes(), 1e-8);
        extend_orthonormal(&mut basis, wv.amplitudes(), 1e-8);
    }
    let k = basis.len();
    let mut m = CMatrix::zeros(k, k);
    let mut leakage: f64 = 0.0;
    for b in 0..k {
        let img = QuantumState::from_amplitudes(bundle.layout, basis[b].clone())?
            .applied(&bundle.walk)?;
        let mut inside = 0.0;
        for a in 0..k {
            let c = inner(&basis[a], img.amplitudes());
            inside += c.norm_sqr();
            m[(a, b)] = c;
        }
        leakage = leakage.max(img.norm_sqr() - inside);
    }
    Ok(RestrictedWalk { matrix: m, leakage })
}

/// Eigenphases of `W` on the initialized subspace, ascending in `(−π, π]`.
pub fn walk_eigenphases(bundle: &WalkBundle) -> Result<Vec<f64>> {
    let r = restricted_walk(bundle)?;
    if r.leakage > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "initialized subspace is not invariant under W (leakage {:e})",
            r.leakage
        )));
    }
    let mut phases: Vec<f64> = complex_eigenvalues(&r.matrix)
        .iter()
        .map(|z| crate::linalg::wrap_phase(z.arg(), 1e-12))
        .collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

/// `±arccos E_k` for each eigenvalue, a single `0` or `π` on the boundary.
pub fn expected_eigenphases(energies: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = energies
        .iter()
        .flat_map(|&e| expected_phases_for(e))
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SpectrumRow {
    pub energy: f64,
    pub theta: f64,
    /// Matched phases for `+θ` and `−θ` (one entry on the boundary).
    pub matched: Vec<f64>,
    pub error: f64,
}

/// Greedy nearest-phase matching of `±arccos E_k` against `phases`.
/// Returns `None` if the multisets differ in size.
pub fn match_phases(energies: &[f64], phases: &[f64]) -> Option<Vec<SpectrumRow>> {
    let expected = expected_eigenphases(energies);
    if expected.len() != phases.len() {
        return None;
    }
    let mut used = vec![false; phases.len()];
    let mut rows = Vec::with_capacity(energies.len());
    for &e in energies {
        let mut matched = Vec::new();
        let mut error: f64 = 0.0;
        for target in expected_phases_for(e) {
            let (idx, d) = phases
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, &p)| (i, circular_distance(p, target)))
                .min_by(|a, b| a.1.total_cmp(&b.1))?;
            used[idx] = true;
            matched.push(phases[idx]);
            error = error.max(d);
        }
        rows.push(SpectrumRow {
            energy: e,
            theta: e.clamp(-1.0, 1.0).acos(),
            matched,
            error,
        });
    }
    Some(rows)
}

/// Energies of `H̄` and their matched walk eigenphases.
pub fn spectrum_report(bundle: &WalkBundle) -> Result<Vec<SpectrumRow>> {
    let (energies, _) = bundle.source.eigensystem()?;
    let phases = walk_eigenphases(bundle)?;
    match_phases(&energies, &phases).ok_or_else(|| {
        Error::InvalidParameter(format!(
            "walk has {} eigenphases on the initialized subspace, expected {}",
            phases.len(),
            expected_eigenphases(&energies).len()
        ))
    })
}
