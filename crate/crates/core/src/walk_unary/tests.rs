use super::*;
use crate::hamiltonian::{long_range_ising, normalize, tfim, Boundary, ShiftPolicy};
use crate::linalg::CMatrix;
use crate::sim::QuantumState;
use crate::walk_binary::{build_binary, spectrum_report, walk_eigenphases};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn lay(n: usize) -> RegisterLayout {
    RegisterLayout::new(n, 0, Encoding::Unary, 0, false).unwrap()
}

fn run(n: usize, gates: Vec<Gate>) -> QuantumState {
    let mut circ = Circuit::new(lay(n));
    for g in gates {
        circ.push(g).unwrap();
    }
    QuantumState::zero(lay(n)).applied(&circ).unwrap()
}

fn tfim_bar(n: usize, g: f64) -> RescaledLcu {
    normalize(&tfim(n, g, 1.0, Boundary::Open).unwrap(), ShiftPolicy::Auto).unwrap()
}

fn rescaled(n: usize, terms: &[(&str, f64)]) -> RescaledLcu {
    let h = LcuHamiltonian::new(
        n,
        terms.iter().map(|(w, k)| (w.parse::<PauliString>().unwrap(), *k)),
    )
    .unwrap();
    normalize(&h, ShiftPolicy::Auto).unwrap()
}

#[test]
fn head_chain_single_full_amplitude_is_x() {
    let gates = head_chain(&[0], 0.0, &[1.0]).unwrap();
    let s = run(1, gates.clone());
    assert!((s.amplitudes()[1] - c(1.0)).norm() < 1e-15);
    let census: crate::census::GateCensus = gates.iter().map(Gate::census).fold(Default::default(), |a, b| a + b);
    assert_eq!(census.rotations, 0);
}

#[test]
fn head_chain_two_equal_halves() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let s = run(3, head_chain(&[0, 2], 0.0, &[r, r]).unwrap());
    assert!((s.amplitudes()[0b001] - c(r)).norm() < 1e-12);
    assert!((s.amplitudes()[0b100] - c(r)).norm() < 1e-12);
    assert!(head_chain(&[0, 1], 0.5, &[0.5, 0.5]).is_err());
}

#[test]
fn head_chain_general_amplitudes() {
    let amps = [0.3, 0.5, 0.1, 0.2];
    let a0 = (1.0f64 - amps.iter().map(|a| a * a).sum::<f64>()).sqrt();
    let heads = [0, 1, 3, 4];
    let s = run(5, head_chain(&heads, a0, &amps).unwrap());
    assert!((s.amplitudes()[0] - c(a0)).norm() < 1e-12);
    for (h, a) in heads.iter().zip(amps) {
        assert!((s.amplitudes()[1 << h] - c(a)).norm() < 1e-12);
    }
}

#[test]
fn fanout_trees() {
    assert!(fanout_tree(&[0]).unwrap().is_empty());
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut g = vec![x_gate(0, vec![])];
    g.extend(fanout_tree(&[0, 1]).unwrap());
    let s = run(2, g);
    assert!((s.amplitudes()[0b01] - c(r)).norm() < 1e-15);
    assert!((s.amplitudes()[0b10] - c(r)).norm() < 1e-15);

    let reg: Vec<usize> = (0..8).collect();
    let tree = fanout_tree(&reg).unwrap();
    assert_eq!(tree.len(), 7);
    let mut g = vec![x_gate(0, vec![])];
    g.extend(tree);
    let s = run(8, g);
    for p in 0..8 {
        assert!((s.amplitudes()[1 << p] - c(1.0 / 8f64.sqrt())).norm() < 1e-12);
    }
    assert!(fanout_tree(&[0, 1, 2]).is_err());
}

#[test]
fn prepare_is_one_hot_with_expected_heads() {
    let h = tfim_bar(4, 0.5);
    let grouped = group(&h, DEFAULT_GROUP_TOL).unwrap();
    assert_eq!(grouped.distinct_strengths(), 2);
    let b = build_unary_grouped(&grouped).unwrap();
    let amps = control_amplitudes(&b).unwrap();
    let total: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    let heavy: f64 = amps
        .iter()
        .enumerate()
        .filter(|(j, _)| j.count_ones() >= 2)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    assert!(heavy < 1e-12);
    assert!((amps[0] - c(grouped.beta0_sq().sqrt())).norm() < 1e-10);
    for (g, m) in grouped.groups().iter().zip(grouped.offsets()) {
        for j in 0..g.size() {
            assert!((amps[1 << (m + j)] - c(g.strength_sq.sqrt())).norm() < 1e-10);
        }
    }
    // Head amplitudes before the fanout stage.
    let heads: Vec<usize> = grouped.offsets();
    let head_amps: Vec<f64> = grouped
        .groups()
        .iter()
        .map(|g| (g.size() as f64 * g.strength_sq).sqrt())
        .collect();
    let s = run(8, head_chain(&heads, grouped.beta0_sq().sqrt(), &head_amps).unwrap());
    for (h, a) in heads.iter().zip(&head_amps) {
        assert!((s.amplitudes()[1 << h] - c(*a)).norm() < 1e-10);
    }
}

#[test]
fn unary_censuses() {
    let h = tfim_bar(4, 0.5);
    let grouped = group(&h, DEFAULT_GROUP_TOL).unwrap();
    let k = grouped.distinct_strengths() as u64;
    let b = build_unary_grouped(&grouped).unwrap();
    assert_eq!(b.prepare().census().rotations, k);
    assert_eq!(b.controlled_walk().census().rotations, 2 * k);
    let sel = b.select().census();
    assert_eq!(sel.rotations, 0);
    assert_eq!(sel.third_level_total(), 0);
    let fanouts = b.prepare().census().third_level.fanout_sqrt_swap;
    let expect: u64 = grouped.groups().iter().map(|g| g.size() as u64 - 1).sum();
    assert_eq!(fanouts, expect);
    assert!(fanouts <= 2 * grouped.padded_terms() as u64);
}

#[test]
fn select_applies_each_member() {
    let h = rescaled(2, &[("XZ", 0.5), ("YI", -0.5), ("ZZ", 0.25)]);
    let b = build_unary(&h).unwrap();
    let grouped = group(&h, DEFAULT_GROUP_TOL).unwrap();
    let l = *b.layout();
    let psi: Vec<Complex64> = (0..4).map(|k| Complex64::new(0.1 + k as f64, 0.2 * k as f64)).collect();
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
    let run_on = |ctrl_bits: usize| {
        let mut a = vec![c(0.0); l.dim()];
        for (x, v) in psi.iter().enumerate() {
            a[x | ctrl_bits << l.control().start] = *v;
        }
        QuantumState::from_amplitudes(l, a).unwrap().applied(b.select()).unwrap()
    };
    let vac = run_on(0);
    assert_eq!(&vac.amplitudes()[..4], &psi[..]);
    for (g, m) in grouped.groups().iter().zip(grouped.offsets()) {
        for (j, p) in g.members.iter().enumerate() {
            let out = run_on(1 << (m + j));
            let pm = p.to_matrix().unwrap();
            let want = &pm * crate::linalg::CVector::from_column_slice(&psi);
            for x in 0..4 {
                let got = out.amplitudes()[x | (1 << (m + j)) << l.control().start];
                assert!((got - want[x]).norm() < 1e-12);
            }
        }
    }
}

#[test]
fn unary_matches_binary_on_one_plus_z() {
    let h = rescaled(1, &[("I", 1.0), ("Z", 1.0)]);
    let a = walk_eigenphases(&build_binary(&h).unwrap()).unwrap();
    let b = walk_eigenphases(&build_unary(&h).unwrap()).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn unary_spectral_map_tfim_three() {
    for g in [1.0, 0.6] {
        let b = build_unary(&tfim_bar(3, g)).unwrap();
        let rows = spectrum_report(&b).unwrap();
        assert!(rows.iter().all(|r| r.error < 1e-9), "{rows:?}");
    }
}

#[test]
fn unary_controlled_walk_branches() {
    let b = build_unary(&tfim_bar(2, 0.7)).unwrap();
    let cw = b.controlled_walk().unitary().unwrap();
    let w = b.walk().unitary().unwrap();
    let half = cw.nrows() / 2;
    let top = cw.view((0, 0), (half, half)).into_owned();
    assert!((top - CMatrix::identity(half, half)).iter().all(|z| z.norm() < 1e-10));
    let bottom = cw.view((half, half), (half, half)).into_owned();
    let wb = w.view((half, half), (half, half)).into_owned();
    assert!((bottom - wb).iter().all(|z| z.norm() < 1e-10));
    assert!(cw.view((0, half), (half, half)).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn renormalized_grouping_still_encodes_effective_operator() {
    // No identity weight: padding has to rescale 𝒩.
    let h = normalize(
        &LcuHamiltonian::new(
            2,
            ["XI", "IX", "ZZ"].iter().map(|w| (w.parse::<PauliString>().unwrap(), 1.0)),
        )
        .unwrap(),
        ShiftPolicy::None,
    )
    .unwrap();
    let grouped = group(&h, DEFAULT_GROUP_TOL).unwrap();
    assert!(!grouped.folded());
    let b = build_unary_grouped(&grouped).unwrap();
    let rows = spectrum_report(&b).unwrap();
    assert!(rows.iter().all(|r| r.error < 1e-9));
}

#[test]
fn couplings_are_read_by_distance() {
    let h = long_range_ising(4, 2.0, 2.0).unwrap();
    let lr = LongRangeCouplings::from_hamiltonian(&h).unwrap();
    assert_eq!(lr.couplings, vec![(1, 2.0), (2, 0.5), (3, 2.0 / 9.0)]);
    assert!(LongRangeCouplings::from_hamiltonian(&tfim(4, 1.0, 1.0, Boundary::Open).unwrap()).is_err());
    let uneven = LcuHamiltonian::new(
        3,
        [("ZZI", 1.0), ("IZZ", 0.5)].iter().map(|(w, k)| (w.parse::<PauliString>().unwrap(), *k)),
    )
    .unwrap();
    assert!(LongRangeCouplings::from_hamiltonian(&uneven).is_err());
}

#[test]
fn rotation_swaps_realize_cyclic_shift() {
    for n in [2, 4, 8] {
        for r in 0..n {
            let mut cur: Vec<usize> = (0..n).collect();
            for (a, b) in rotation_swaps(n, r) {
                cur.swap(a, b);
            }
            assert!(cur.iter().enumerate().all(|(t, &q)| q == (t + r) % n));
            assert!(rotation_swaps(n, r).len() < n);
        }
    }
}

#[test]
fn below_patterns_cover_exactly() {
    for bits in 1..4 {
        for m in 0..=(1usize << bits) {
            let pats = below_patterns(m, bits);
            for i in 0..1usize << bits {
                let hits = pats
                    .iter()
                    .filter(|p| p.iter().all(|&(b, v)| (i >> b & 1 == 1) == v))
                    .count();
                assert_eq!(hits, usize::from(i < m), "m={m} i={i}");
            }
        }
    }
}

#[test]
fn hybrid_matches_binary_long_range() {
    let h = long_range_ising(4, 1.0, 2.0).unwrap();
    let hy = build_hybrid(&h).unwrap();
    let bin = build_binary(&normalize(&h, ShiftPolicy::Auto).unwrap()).unwrap();
    let a = walk_eigenphases(&hy).unwrap();
    let b = walk_eigenphases(&bin).unwrap();
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-9, "{a:?} vs {b:?}");
    }
    assert!((hy.source().normalization() - bin.source().normalization()).abs() < 1e-12);
    let k = 3;
    assert_eq!(hy.prepare().census().rotations, k);
    let cswap = hy.select().census().third_level.controlled_swap;
    assert!(cswap > 0 && cswap <= 2 * k * 4);
}

#[test]
fn hybrid_two_sites_is_single_pair() {
    let h = long_range_ising(2, 1.0, 1.0).unwrap();
    let hy = build_hybrid(&h).unwrap();
    let rows = spectrum_report(&hy).unwrap();
    assert!(rows.iter().all(|r| r.error < 1e-9));
    let (e, _) = hy.source().eigensystem().unwrap();
    assert!((e[0]).abs() < 1e-12 && (e[3] - 1.0).abs() < 1e-12);
}

#[test]
fn hybrid_rejects_bad_inputs() {
    assert!(build_hybrid(&long_range_ising(3, 1.0, 1.0).unwrap()).is_err());
    assert!(build_hybrid(&tfim(4, 1.0, 1.0, Boundary::Open).unwrap()).is_err());
}

#[test]
fn hybrid_controlled_walk_branches() {
    let h = long_range_ising(2, -0.5, 1.0).unwrap();
    let hy = build_hybrid(&h).unwrap();
    let cw = hy.controlled_walk().unitary().unwrap();
    let w = hy.walk().unitary().unwrap();
    let half = cw.nrows() / 2;
    // Restrict to flag = 0 inputs, the only ones the protocol produces.
    let flag = hy.layout().ancilla().start;
    for col in (0..half).filter(|c| c >> flag & 1 == 0) {
        for r in 0..half {
            let want = if r == col { 1.0 } else { 0.0 };
            assert!((cw[(r, col)] - c(want)).norm() < 1e-10);
            assert!((cw[(r + half, col + half)] - w[(r + half, col + half)]).norm() < 1e-10);
        }
    }
}
