//! One-hot control encodings: a unary register per distinct strength, and the
//! hybrid coupling-by-site layout for long-range Ising chains.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::{
    fold_padding, group, GroupedLcu, LcuHamiltonian, RescaledLcu, WeightedTerm,
    DEFAULT_GROUP_TOL,
};
use crate::pauli::{Letter, PauliString};
use crate::sim::{Axis, Circuit, Control, Encoding, Gate, RegisterLayout};
use crate::walk_binary::WalkBundle;

/// `X` on one qubit, as a Clifford record.
fn x_gate(qubit: usize, controls: Vec<Control>) -> Gate {
    Gate::ControlledPauli {
        controls,
        pauli: PauliString::single(1, 0, Letter::X).expect("one-qubit X"),
        offset: qubit,
    }
}

/// Prepares `a_0|vac⟩ + Σ_k a_k|e_{heads[k]}⟩` from the vacuum with one
/// rotation per head (the first one replaced by `X` when `a_0 = 0`).
///
/// `amps[k]` is the amplitude on `heads[k]`; all amplitudes must be ≥ 0 and
/// `a_0² + Σ a_k² = 1`.
pub fn head_chain(heads: &[usize], a0: f64, amps: &[f64]) -> Result<Vec<Gate>> {
    if heads.len() != amps.len() {
        return Err(Error::InvalidParameter("one amplitude per head".into()));
    }
    let total = a0 * a0 + amps.iter().map(|a| a * a).sum::<f64>();
    if a0 < 0.0 || amps.iter().any(|a| !(*a >= 0.0)) || (total - 1.0).abs() > 1e-10 {
        return Err(Error::WeightSum(total));
    }
    let mut gates = Vec::new();
    if heads.is_empty() {
        return Ok(gates);
    }
    // rest[k] = √(Σ_{i≥k} a_i²)
    let mut rest = vec![0.0; amps.len() + 1];
    for k in (0..amps.len()).rev() {
        rest[k] = (rest[k + 1] * rest[k + 1] + amps[k] * amps[k]).sqrt();
    }
    if a0 == 0.0 {
        gates.push(x_gate(heads[0], vec![]));
    } else {
        gates.push(Gate::Rotation {
            axis: Axis::Y,
            angle: 2.0 * rest[0].atan2(a0),
            target: heads[0],
            controls: vec![],
        });
    }
    for k in 1..heads.len() {
        gates.push(Gate::Rotation {
            axis: Axis::Y,
            angle: 2.0 * rest[k].atan2(amps[k - 1]),
            target: heads[k],
            controls: vec![Control::on(heads[k - 1])],
        });
        gates.push(Gate::Cnot {
            control: heads[k],
            target: heads[k - 1],
        });
    }
    Ok(gates)
}

/// Binary tree of `N_k − 1` fanout gates spreading an excitation on
/// `register[0]` uniformly over the register.
pub fn fanout_tree(register: &[usize]) -> Result<Vec<Gate>> {
    let size = register.len();
    if size == 0 || !size.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "fanout register size {size} is not a power of two"
        )));
    }
    let mut gates = Vec::with_capacity(size - 1);
    let mut stride = 1;
    while stride < size {
        for p in 0..stride {
            gates.push(Gate::Fanout {
                source: register[p],
                dest: register[p + stride],
                adjoint: false,
            });
        }
        stride *= 2;
    }
    Ok(gates)
}

fn vacuum_reflection(qubits: &[usize], extra: Option<Control>) -> Vec<Gate> {
    if qubits.is_empty() {
        return vec![Gate::GlobalPhase {
            quarter_turns: 2,
            controls: extra.into_iter().collect(),
        }];
    }
    let mut q: Vec<Control> = qubits.iter().copied().map(Control::off).collect();
    q.extend(extra);
    vec![Gate::MultiControlledZ(q)]
}

/// Unary walk for an already grouped Hamiltonian.
pub fn build_unary_grouped(grouped: &GroupedLcu) -> Result<WalkBundle> {
    let n = grouped.n_qubits();
    let layout = RegisterLayout::new(n, grouped.padded_terms(), Encoding::Unary, 0, true)?;
    let c0 = layout.control().start;
    let offsets = grouped.offsets();
    let heads: Vec<usize> = offsets.iter().map(|m| c0 + m).collect();
    let amps: Vec<f64> = grouped
        .groups()
        .iter()
        .map(|g| (g.size() as f64 * g.strength_sq).sqrt())
        .collect();
    let mut prepare = Circuit::new(layout);
    for g in head_chain(&heads, grouped.beta0_sq().sqrt(), &amps)? {
        prepare.push(g)?;
    }
    for (g, &m) in grouped.groups().iter().zip(&offsets) {
        let reg: Vec<usize> = (c0 + m..c0 + m + g.size()).collect();
        for gate in fanout_tree(&reg)? {
            prepare.push(gate)?;
        }
    }
    let ctrl: Vec<usize> = layout.control().collect();
    let groups = grouped.groups().to_vec();
    let select = move |extra: Option<Control>| {
        let mut out = Vec::new();
        for (g, &m) in groups.iter().zip(&offsets) {
            for (j, p) in g.members.iter().enumerate() {
                if p.is_identity_word() && p.sign() == Some(1.0) {
                    continue;
                }
                let mut controls = vec![Control::on(c0 + m + j)];
                controls.extend(extra);
                out.push(Gate::ControlledPauli {
                    controls,
                    pauli: *p,
                    offset: 0,
                });
            }
        }
        out
    };
    WalkBundle::assemble(
        Encoding::Unary,
        layout,
        grouped.to_rescaled(),
        prepare,
        move |extra| vacuum_reflection(&ctrl, extra),
        select,
    )
}

/// Groups `h` by strength and builds the unary walk.
pub fn build_unary(h: &RescaledLcu) -> Result<WalkBundle> {
    build_unary_grouped(&group(h, DEFAULT_GROUP_TOL)?)
}

/// Distance-resolved couplings of a translation-invariant `Z_iZ_{i+d}` chain.
#[derive(Debug, Clone, PartialEq)]
pub struct LongRangeCouplings {
    pub n_sites: usize,
    pub identity: f64,
    /// `(d, c_d)` for every distance with a nonzero coefficient.
    pub couplings: Vec<(usize, f64)>,
}

impl LongRangeCouplings {
    /// Reads `c_d` off `h`, rejecting anything but open-chain `ZZ` couplings
    /// whose coefficient depends only on the distance.
    pub fn from_hamiltonian(h: &LcuHamiltonian) -> Result<Self> {
        let n = h.n_qubits();
        let mut by_pair = std::collections::BTreeMap::new();
        for t in &h.terms()[1..] {
            let p = &t.pauli;
            let sites: Vec<usize> = (0..n).filter(|&q| p.letter(q) != Letter::I).collect();
            let zz = sites.len() == 2 && sites.iter().all(|&q| p.letter(q) == Letter::Z);
            if !zz {
                return Err(Error::InvalidParameter(format!(
                    "hybrid encoding needs pure ZZ couplings, found {p}"
                )));
            }
            by_pair.insert((sites[0], sites[1]), t.coeff);
        }
        let mut couplings = Vec::new();
        for d in 1..n {
            let coeffs: Vec<f64> = (0..n - d)
                .map(|i| by_pair.get(&(i, i + d)).copied().unwrap_or(0.0))
                .collect();
            let c = coeffs[0];
            if coeffs.iter().any(|&x| x != c) {
                return Err(Error::InvalidParameter(format!(
                    "couplings at distance {d} are not uniform"
                )));
            }
            if c != 0.0 {
                couplings.push((d, c));
            }
        }
        Ok(Self {
            n_sites: n,
            identity: h.identity_coeff(),
            couplings,
        })
    }
}

/// Rotates the system register so that qubit `(t + r) mod n` lands on `t`,
/// as a list of transpositions.
fn rotation_swaps(n: usize, r: usize) -> Vec<(usize, usize)> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut swaps = Vec::new();
    for t in 0..n {
        let want = (t + r) % n;
        let p = cur.iter().position(|&q| q == want).expect("permutation");
        if p != t {
            cur.swap(t, p);
            swaps.push((t, p));
        }
    }
    swaps
}

/// Disjoint prefix patterns `(bit, value)` covering `{i : i < m}` over `bits` bits.
fn below_patterns(m: usize, bits: usize) -> Vec<Vec<(usize, bool)>> {
    if m >> bits != 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for b in (0..bits).rev() {
        if m >> b & 1 == 1 {
            let mut pat: Vec<(usize, bool)> =
                (b + 1..bits).map(|h| (h, m >> h & 1 == 1)).collect();
            pat.push((b, false));
            out.push(pat);
        }
    }
    out
}

/// Hybrid walk for a long-range Ising chain on `n = 2^k` sites.
///
/// Layout: system, one coupling qubit per distance with a nonzero coefficient,
/// `log₂ n` site qubits, one flag ancilla, phase-estimation qubit.
pub fn build_hybrid(h: &LcuHamiltonian) -> Result<WalkBundle> {
    let n = h.n_qubits();
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "hybrid encoding needs a power-of-two chain, got n = {n}"
        )));
    }
    let lr = LongRangeCouplings::from_hamiltonian(h)?;
    let k = lr.couplings.len();
    let site_bits = n.trailing_zeros() as usize;
    let layout = RegisterLayout::new(n, k + site_bits, Encoding::Hybrid, 1, true)?;
    let c0 = layout.control().start;
    let coupling: Vec<usize> = (c0..c0 + k).collect();
    let site: Vec<usize> = (c0 + k..c0 + k + site_bits).collect();
    let flag = layout.ancilla().start;

    // Automatic shift, then wrapped slots folded from β₀.
    let bound: f64 = lr
        .couplings
        .iter()
        .map(|&(d, c)| c.abs() * (n - d) as f64)
        .sum();
    let alpha0 = lr.identity.max(bound);
    let norm = alpha0.abs() + bound;
    if norm == 0.0 {
        return Err(Error::EmptyHamiltonian);
    }
    let per_pair: Vec<f64> = lr.couplings.iter().map(|&(_, c)| c.abs() / norm).collect();
    let pad: f64 = lr
        .couplings
        .iter()
        .zip(&per_pair)
        .map(|(&(d, _), w)| d as f64 * w)
        .sum();
    let (beta0_sq, scale, _) = fold_padding(alpha0.abs() / norm, pad);
    let per_pair: Vec<f64> = per_pair.iter().map(|w| w * scale).collect();

    let mut weights = vec![WeightedTerm {
        beta_sq: beta0_sq
            + lr.couplings
                .iter()
                .zip(&per_pair)
                .map(|(&(d, _), w)| d as f64 * w)
                .sum::<f64>(),
        pauli: PauliString::identity(n),
    }];
    let mut zz = Vec::with_capacity(k);
    for (&(d, c), &w) in lr.couplings.iter().zip(&per_pair) {
        let word = PauliString::from_letters(n, &[(0, Letter::Z), (d, Letter::Z)])?;
        let signed = if c < 0.0 { word.negate() } else { word };
        zz.push(signed);
        for i in 0..n - d {
            let p = PauliString::from_letters(n, &[(i, Letter::Z), (i + d, Letter::Z)])?;
            weights.push(WeightedTerm {
                beta_sq: w,
                pauli: if c < 0.0 { p.negate() } else { p },
            });
        }
    }
    let source = RescaledLcu::from_weights(n, norm / scale, weights)?;

    let mut prepare = Circuit::new(layout);
    let amps: Vec<f64> = per_pair.iter().map(|w| (n as f64 * w).sqrt()).collect();
    for g in head_chain(&coupling, beta0_sq.sqrt(), &amps)? {
        prepare.push(g)?;
    }
    for &q in &site {
        prepare.push(Gate::H(q))?;
    }

    let mut shift = Vec::new();
    for (b, &q) in site.iter().enumerate() {
        for (x, y) in rotation_swaps(n, 1 << b) {
            shift.push(Gate::ControlledSwap {
                control: Control::on(q),
                a: x,
                b: y,
            });
        }
    }
    let unshift: Vec<Gate> = shift.iter().rev().map(Gate::inverse).collect();
    let ds: Vec<usize> = lr.couplings.iter().map(|&(d, _)| d).collect();
    let flag_gates = move |d: usize| -> Vec<Gate> {
        below_patterns(n - d, site_bits)
            .into_iter()
            .map(|pat| {
                let controls: Vec<Control> = pat
                    .into_iter()
                    .map(|(bit, on)| Control { qubit: site[bit], on })
                    .collect();
                if controls.len() >= 2 {
                    Gate::Toffoli {
                        controls,
                        target: flag,
                    }
                } else {
                    x_gate(flag, controls)
                }
            })
            .collect()
    };
    let coupling_sel = coupling.clone();
    let select = move |extra: Option<Control>| {
        let mut out = shift.clone();
        for (idx, &d) in ds.iter().enumerate() {
            let compute = flag_gates(d);
            out.extend(compute.iter().cloned());
            let mut controls = vec![Control::on(coupling_sel[idx]), Control::on(flag)];
            controls.extend(extra);
            out.push(Gate::ControlledPauli {
                controls,
                pauli: zz[idx],
                offset: 0,
            });
            out.extend(compute.into_iter().rev());
        }
        out.extend(unshift.iter().cloned());
        out
    };
    let refl: Vec<usize> = layout.control().collect();
    WalkBundle::assemble(
        Encoding::Hybrid,
        layout,
        source,
        prepare,
        move |extra| vacuum_reflection(&refl, extra),
        select,
    )
}

/// Amplitude of `B|0⟩` with the system in `|0⟩` on each control basis index.
pub fn control_amplitudes(bundle: &WalkBundle) -> Result<Vec<Complex64>> {
    let mut e = vec![Complex64::new(0.0, 0.0); bundle.system_dim()];
    e[0] = Complex64::new(1.0, 0.0);
    let s = bundle.initial_state(&e)?;
    let l = bundle.layout();
    Ok((0..1usize << l.control_qubits)
        .map(|j| s.amplitudes()[j << l.control().start])
        .collect())
}

#[cfg(test)]
mod tests;
