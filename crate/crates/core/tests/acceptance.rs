//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_GAPS` cannot hold as literally stated; for those
//! the run prints FAIL, checks the documented replacement claim instead, and
//! only a failure of that replacement fails the process.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use qwalk::census::GateCensus;
use qwalk::hamiltonian::{
    group, long_range_ising, normalize, tfim, tfim_path, Boundary, LcuHamiltonian, ShiftPolicy,
    DEFAULT_GROUP_TOL,
};
use qwalk::linalg::{fidelity, hermitian_eigensystem, phase_multiset_distance, CMatrix};
use qwalk::pauli::PauliString;
use qwalk::resources::{
    taylor_estimate, trotter_estimate, walk_method_cost, CostModel, CostQuery, Regime,
};
use qwalk::sim::Encoding;
use qwalk::spectral::{
    build_walk, estimate_energy, pe_analyze, project_to_eigenstate, single_site_paulis,
    uniform_schedule, verify_recovery, zeno_prepare, CaseStatus, Mode, Outcome,
};
use qwalk::walk_binary::{expected_blocks, invariant_blocks, spectrum_report, walk_eigenphases};
use qwalk::walk_unary::{build_unary_grouped, fanout_tree};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criterion 7 asks for K rotations per controlled walk; the walk contains
/// both `B` and `B†`, so the exact count is 2K.
const KNOWN_GAPS: &[usize] = &[7];

struct Verdict {
    pass: bool,
    detail: String,
    /// For known gaps: whether the replacement claim holds.
    fallback: Option<bool>,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into(), fallback: None }
    }
}

fn random_lcu(rng: &mut ChaCha8Rng) -> LcuHamiltonian {
    let count = rng.random_range(1..=7);
    let mut words: Vec<String> = Vec::new();
    while words.len() < count {
        let w: String = (0..3).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        if w != "III" && !words.contains(&w) {
            words.push(w);
        }
    }
    let terms = words.iter().map(|w| {
        let mag: f64 = rng.random_range(0.1..1.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        (w.parse::<PauliString>().unwrap(), sign * mag)
    });
    LcuHamiltonian::new(3, terms).unwrap()
}

fn suite() -> Vec<(String, LcuHamiltonian)> {
    let mut out = Vec::new();
    for n in [2, 3, 4] {
        out.push((format!("tfim n={n}"), tfim(n, 1.0, 1.0, Boundary::Open).unwrap()));
    }
    out.push(("tfim n=4 g=0.5".into(), tfim(4, 0.5, 1.0, Boundary::Open).unwrap()));
    for n in [3, 4] {
        out.push((format!("long-range n={n}"), long_range_ising(n, 1.0, 2.0).unwrap()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..20 {
        out.push((format!("random #{i}"), random_lcu(&mut rng)));
    }
    out
}

fn criterion_1(models: &[(String, LcuHamiltonian)]) -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for (name, h) in models {
        let bundle = build_walk(h, Encoding::Binary).unwrap();
        // Independent dense oracle for the energies.
        let rescaled = normalize(h, ShiftPolicy::Auto).unwrap();
        let (oracle, _) = hermitian_eigensystem(&rescaled.dense_matrix().unwrap());
        match spectrum_report(&bundle) {
            Ok(rows) => {
                let e = rows.iter().map(|r| r.error).fold(0.0, f64::max);
                let energy_gap = rows
                    .iter()
                    .zip(&oracle)
                    .map(|(r, o)| (r.energy - o).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(e).max(energy_gap);
                if e > 1e-9 || energy_gap > 1e-9 || rows.len() != oracle.len() {
                    failures.push(name.clone());
                }
            }
            Err(err) => failures.push(format!("{name}: {err}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Verdict::new(
        failures.is_empty() && secs < 60.0,
        format!(
            "{} models, max phase error {worst:.2e}, {secs:.2}s{}",
            models.len(),
            if failures.is_empty() { String::new() } else { format!(", failing: {failures:?}") }
        ),
    )
}

fn max_abs(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn criterion_2(models: &[(String, LcuHamiltonian)]) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, h) in models {
        let bundle = build_walk(h, Encoding::Binary).unwrap();
        for b in invariant_blocks(&bundle).unwrap().iter().filter(|b| !b.is_boundary()) {
            let (s, v) = expected_blocks(b.energy);
            worst = worst.max(max_abs(&b.s_block, &s)).max(max_abs(&b.v_block, &v));
            count += 1;
        }
    }
    Verdict::new(worst <= 1e-9, format!("{count} interior blocks, max deviation {worst:.2e}"))
}

fn criterion_3(models: &[(String, LcuHamiltonian)]) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (_, h) in models {
        let bundle = build_walk(h, Encoding::Binary).unwrap();
        for b in invariant_blocks(&bundle).unwrap() {
            let states = match (b.plus(), b.minus()) {
                (Some(p), Some(m)) => vec![p, m],
                _ => vec![b.phi0.clone()],
            };
            for s in states {
                let a = pe_analyze(&bundle, &s).unwrap();
                worst = worst
                    .max((a.p_plus - 0.5 * (1.0 + b.energy)).abs())
                    .max((a.p_minus - 0.5 * (1.0 - b.energy)).abs());
                count += 1;
            }
        }
    }
    let bundle = build_walk(&tfim(3, 1.0, 1.0, Boundary::Open).unwrap(), Encoding::Binary).unwrap();
    let blocks = invariant_blocks(&bundle).unwrap();
    let blk = &blocks[blocks.len() / 2];
    let state = blk.plus().unwrap();
    let shots = 10_000usize;
    let p = 0.5 * (1.0 + blk.energy);
    let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
    let within = (0..100u64)
        .filter(|&seed| {
            let r = estimate_energy(&bundle, &state, shots, seed).unwrap();
            let k = r.outcomes.iter().filter(|o| **o == Outcome::Plus).count() as f64;
            (k - shots as f64 * p).abs() <= 5.0 * sigma
        })
        .count();
    Verdict::new(
        worst <= 1e-10 && within >= 95,
        format!("{count} eigenstates, max |Δp| {worst:.2e}; {within}/100 seeds within 5σ at E = {:.4}", blk.energy),
    )
}

fn criterion_4(models: &[(String, LcuHamiltonian)]) -> Verdict {
    let mut worst_half: f64 = 0.0;
    let mut worst_cum: f64 = 0.0;
    let mut worst_fid: f64 = 1.0;
    for (_, h) in models {
        let bundle = build_walk(h, Encoding::Binary).unwrap();
        let (energies, vectors) = hermitian_eigensystem(&bundle.source().dense_matrix().unwrap());
        for (k, b) in invariant_blocks(&bundle).unwrap().iter().enumerate() {
            let (Some(plus), Some(minus)) = (b.plus(), b.minus()) else { continue };
            // Degenerate levels: compare against the projector onto the level.
            let level: Vec<usize> =
                (0..energies.len()).filter(|&j| (energies[j] - b.energy).abs() < 1e-9).collect();
            for s in [plus, minus] {
                let back = s.clone().applied(bundle.unprepare()).unwrap();
                worst_half = worst_half.max((back.project_control_vacuum().p_success - 0.5).abs());
                let p = project_to_eigenstate(&bundle, &s, b.energy, 3, Mode::Analysis, 0).unwrap();
                for (l, c) in p.cumulative_success.iter().enumerate() {
                    worst_cum = worst_cum.max((c - (1.0 - 0.5f64.powi(l as i32 + 1))).abs());
                }
                let sys = p.system.unwrap();
                let fid = if level.len() == 1 {
                    let v: Vec<Complex64> = vectors.column(k).iter().copied().collect();
                    fidelity(&v, &sys)
                } else {
                    level
                        .iter()
                        .map(|&j| {
                            let v: Vec<Complex64> = vectors.column(j).iter().copied().collect();
                            fidelity(&v, &sys)
                        })
                        .sum()
                };
                worst_fid = worst_fid.min(fid);
            }
        }
    }
    Verdict::new(
        worst_half <= 1e-10 && worst_cum <= 1e-10 && worst_fid >= 1.0 - 1e-9,
        format!("max |p−½| {worst_half:.2e}, max cumulative error {worst_cum:.2e}, min fidelity 1−{:.2e}", (1.0 - worst_fid).max(0.0)),
    )
}

fn dense_ground(h: &LcuHamiltonian) -> Vec<Complex64> {
    let (_, v) = hermitian_eigensystem(&h.dense_matrix().unwrap());
    v.column(0).iter().copied().collect()
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let path = tfim_path(4, 1.0, 1.0, Boundary::Open).unwrap();
    let sched = uniform_schedule(8).unwrap();
    let trace = zeno_prepare(&path, &sched, Encoding::Binary, Mode::Analysis, 0).unwrap();
    let mut prev = path.ground0.as_ref().unwrap().amplitudes();
    let mut product = 1.0;
    for &g in &sched[1..] {
        let gnd = dense_ground(&path.interpolate(g).unwrap());
        product *= fidelity(&gnd, &prev);
        prev = gnd;
    }
    let fin: Vec<Complex64> = trace.final_state.iter().map(|z| Complex64::new(z[0], z[1])).collect();
    let fid = fidelity(&prev, &fin);
    let secs = start.elapsed().as_secs_f64();
    Verdict::new(
        (trace.success_probability - product).abs() <= 1e-6 && fid >= 1.0 - 1e-6 && secs < 300.0,
        format!(
            "P = {:.9}, ∏ overlaps = {product:.9}, final fidelity 1−{:.2e}, {secs:.2}s",
            trace.success_probability,
            (1.0 - fid).max(0.0)
        ),
    )
}

fn criterion_6(models: &[(String, LcuHamiltonian)]) -> Verdict {
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    let mut failures = Vec::new();
    for (name, h) in models {
        let reference = walk_eigenphases(&build_walk(h, Encoding::Binary).unwrap()).unwrap();
        for enc in [Encoding::Unary, Encoding::Hybrid] {
            let Ok(bundle) = build_walk(h, enc) else { continue };
            let phases = walk_eigenphases(&bundle).unwrap();
            match phase_multiset_distance(&reference, &phases) {
                Some(d) => {
                    worst = worst.max(d);
                    if d > 1e-9 {
                        failures.push(format!("{name} {enc}"));
                    }
                }
                None => failures.push(format!("{name} {enc}: multiset sizes differ")),
            }
            compared += 1;
        }
    }
    let hybrid_built = build_walk(&long_range_ising(4, 1.0, 2.0).unwrap(), Encoding::Hybrid).is_ok();
    Verdict::new(
        failures.is_empty() && hybrid_built,
        format!("{compared} encoding pairs, max distance {worst:.2e}{}", if failures.is_empty() { String::new() } else { format!(", failing {failures:?}") }),
    )
}

fn criterion_7(models: &[(String, LcuHamiltonian)]) -> Verdict {
    let mut literal = true;
    let mut exact_2k = true;
    let mut others = true;
    let mut notes = Vec::new();
    for (name, h) in models {
        let rescaled = normalize(h, ShiftPolicy::Auto).unwrap();
        let grouped = group(&rescaled, DEFAULT_GROUP_TOL).unwrap();
        let k = grouped.distinct_strengths() as u64;
        let n_terms = rescaled.weights().iter().filter(|t| !t.pauli.is_identity_word()).count() as u64;
        let bundle = build_unary_grouped(&grouped).unwrap();
        let cw = bundle.controlled_walk().census();
        let b_rot = bundle.prepare().census().rotations;
        // B loses one rotation when the identity weight is zero (X replaces it).
        let b_expected = if grouped.beta0_sq() > 0.0 { k } else { k - 1 };
        literal &= cw.rotations == k;
        exact_2k &= cw.rotations == 2 * b_rot && b_rot == b_expected;
        let per_group: Vec<u64> = grouped
            .groups()
            .iter()
            .map(|g| fanout_tree(&(0..g.size()).collect::<Vec<_>>()).unwrap().len() as u64)
            .collect();
        let fan_ok = grouped.groups().iter().zip(&per_group).all(|(g, c)| *c == g.size() as u64 - 1);
        let fan_total = bundle.prepare().census().third_level.fanout_sqrt_swap;
        let fan_sum: u64 = per_group.iter().sum();
        let sel: GateCensus = bundle.select().census();
        let binary = build_walk(h, Encoding::Binary).unwrap();
        let bin_rot = binary.prepare().census().rotations;
        let ok = fan_ok
            && fan_total == fan_sum
            && fan_total <= 2 * n_terms
            && sel.rotations == 0
            && sel.third_level_total() == 0
            && (n_terms < 2 || 2 * bin_rot >= n_terms);
        if !ok {
            notes.push(format!("{name}: fanouts {fan_total}, select {sel:?}, binary B rotations {bin_rot} for N = {n_terms}"));
        }
        others &= ok;
    }
    let tfim4 = normalize(&tfim(4, 0.5, 1.0, Boundary::Open).unwrap(), ShiftPolicy::Auto).unwrap();
    let g4 = group(&tfim4, DEFAULT_GROUP_TOL).unwrap();
    let cw4 = build_unary_grouped(&g4).unwrap().controlled_walk().census().rotations;
    let mut v = Verdict::new(
        literal && others,
        format!(
            "controlled-W rotations = 2K (TFIM n=4: K = {}, count {cw4}), not K; B alone has K; fanout, select-V and binary B ≥ N/2 (N ≥ 2) checks {}{}",
            g4.distinct_strengths(),
            if others { "hold" } else { "FAIL" },
            if notes.is_empty() { String::new() } else { format!(": {notes:?}") }
        ),
    );
    v.fallback = Some(exact_2k && others);
    v
}

fn criterion_8() -> Verdict {
    let half = build_walk(
        &LcuHamiltonian::new(1, [("I".parse().unwrap(), 0.5), ("X".parse().unwrap(), 0.5)]).unwrap(),
        Encoding::Binary,
    )
    .unwrap();
    let t2 = build_walk(&tfim(2, 1.0, 1.0, Boundary::Open).unwrap(), Encoding::Binary).unwrap();
    let mut cases = verify_recovery("half-I-half-X", &half, &single_site_paulis(1)).unwrap();
    cases.extend(verify_recovery("tfim n=2", &t2, &single_site_paulis(2)).unwrap());
    let expected = 3 * 2 + 6 * 4;
    let count = |s: CaseStatus| cases.iter().filter(|c| c.status == s).count();
    let (pass, fail, invalid) = (count(CaseStatus::Pass), count(CaseStatus::Fail), count(CaseStatus::InvalidPrecondition));
    let direct_ok = cases
        .iter()
        .filter(|c| c.status == CaseStatus::Pass)
        .all(|c| c.error.unwrap() <= 1e-9);
    Verdict::new(
        cases.len() == expected && fail == 0 && direct_ok && pass + invalid == expected,
        format!("{} cases: {pass} pass, {fail} fail, {invalid} invalid precondition", cases.len()),
    )
}

fn census(rot: u64, third: u64) -> GateCensus {
    let mut c = GateCensus { rotations: rot, ..Default::default() };
    c.third_level.toffoli = third;
    c
}

fn criterion_9() -> Verdict {
    let unit = CostModel::constant(1.0, 1.0);
    let mut fixed = Vec::new();
    let q1 = CostQuery::new(4, 7, 2, 3.0, 0.5, 1e-3);
    let w = walk_method_cost(&q1, &unit, &census(0, 0)).unwrap();
    fixed.push(w.total == 0.0 && w.closed_form_per_call == 9.0 && w.repetitions == 6);
    let w = walk_method_cost(&q1, &unit, &census(4, 20)).unwrap();
    fixed.push(w.per_call == 24.0 && w.total == 144.0);
    let q3 = CostQuery::new(16, 7, 2, 3.0, 0.125, 1e-3);
    let t = trotter_estimate(&q3, &unit, Regime::Lattice).unwrap();
    fixed.push(t.steps == 256.0 && t.rotations_total == 4096.0 && t.total == 4096.0);
    let q4 = CostQuery::new(2, 7, 2, 3.0, 0.5, 1e-3);
    let t = trotter_estimate(&q4, &unit, Regime::Chemistry).unwrap();
    fixed.push(t.steps == 128.0 && t.rotations_total == 2048.0);
    let q5 = CostQuery::new(4, 7, 2, 8.0, 0.5, 1e-3);
    let t = taylor_estimate(&q5, &unit, &census(2, 3)).unwrap();
    fixed.push(t.r == 16 && t.m == 4 && t.savings_ratio == 64 && t.total == 320.0);
    let fixed_ok = fixed.iter().all(|b| *b);

    let model = CostModel::default();
    let totals = |q: &CostQuery| -> [f64; 5] {
        let c = census(q.k as u64, q.n_terms as u64);
        [
            walk_method_cost(q, &model, &c).unwrap().total,
            walk_method_cost(q, &model, &c).unwrap().closed_form_total,
            trotter_estimate(q, &model, Regime::Lattice).unwrap().total,
            trotter_estimate(q, &model, Regime::Chemistry).unwrap().total,
            taylor_estimate(q, &model, &c).unwrap().total,
        ]
    };
    let le = |a: [f64; 5], b: [f64; 5]| a.iter().zip(&b).all(|(x, y)| *x <= *y * (1.0 + 1e-12));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = 0;
    for _ in 0..100 {
        let k = rng.random_range(1..20);
        let mut q = CostQuery::new(
            rng.random_range(1..64),
            k + rng.random_range(0..100),
            k,
            rng.random_range(1.0..50.0),
            rng.random_range(0.01..1.0),
            rng.random_range(1e-12..0.5),
        );
        q.c_t = rng.random_range(0.5..3.0);
        let f: f64 = rng.random_range(1.01..2.0);
        let base = totals(&q);
        let mut ups = Vec::new();
        let mut u = q;
        u.n_terms += 1;
        ups.push(u);
        if q.k < q.n_terms {
            let mut u = q;
            u.k += 1;
            ups.push(u);
        }
        let mut u = q;
        u.normalization *= f;
        ups.push(u);
        let mut u = q;
        u.c_t *= f;
        ups.push(u);
        for u in ups {
            violations += usize::from(!le(base, totals(&u)));
        }
        let mut wider = q;
        wider.gap = (q.gap * f).min(q.norm_h());
        violations += usize::from(!le(totals(&wider), base));
        let mut looser = q;
        looser.delta = (q.delta * f).min(0.9);
        violations += usize::from(!le(totals(&looser), base));
    }
    Verdict::new(
        fixed_ok && violations == 0,
        format!("{}/5 fixed queries exact, {violations} monotonicity violations over 100 queries", fixed.iter().filter(|b| **b).count()),
    )
}

fn criterion_10() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_qwalk");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(&config, r#"{"model": "tfim", "n": 3, "g": 0.7, "J": 1.0, "seed": 17, "shots": 64}"#).unwrap();
    let cfg = config.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["spectrum", "--model", "tfim", "--n", "3", "--encoding", "binary"],
        vec!["spectrum", "--model", "long-range", "--n", "4", "--encoding", "hybrid", "--format", "csv"],
        vec!["zeno", "--config", cfg, "--schedule-steps", "4"],
        vec!["zeno", "--config", cfg, "--mode", "sample", "--schedule-steps", "4"],
        vec!["resources", "--config", cfg, "--gap", "0.2,0.1", "--format", "csv"],
        vec!["resources", "--model", "tfim", "--n", "4", "--g", "0.5"],
    ];
    let mut identical = 0;
    let mut failures = Vec::new();
    for (i, args) in commands.iter().enumerate() {
        let outputs: Vec<(Vec<u8>, Option<i32>)> = (0..2)
            .map(|r| {
                let out = dir.path().join(format!("out-{i}-{r}"));
                let status = Command::new(bin)
                    .args(args)
                    .arg("--out")
                    .arg(&out)
                    .status()
                    .unwrap();
                (std::fs::read(&out).unwrap_or_default(), status.code())
            })
            .collect();
        if outputs[0] == outputs[1] && outputs[0].1 == Some(0) && !outputs[0].0.is_empty() {
            identical += 1;
        } else {
            failures.push(args.join(" "));
        }
    }
    Verdict::new(
        failures.is_empty(),
        format!("{identical}/{} commands byte-identical across repeated runs{}", commands.len(), if failures.is_empty() { String::new() } else { format!(", differing: {failures:?}") }),
    )
}

fn main() {
    let models = suite();
    let start = Instant::now();
    let verdicts: Vec<(usize, Verdict)> = vec![
        (1, criterion_1(&models)),
        (2, criterion_2(&models)),
        (3, criterion_3(&models)),
        (4, criterion_4(&models)),
        (5, criterion_5()),
        (6, criterion_6(&models)),
        (7, criterion_7(&models)),
        (8, criterion_8()),
        (9, criterion_9()),
        (10, criterion_10()),
    ];
    let mut blocking = 0;
    for (id, v) in &verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {tag}: {}", v.detail);
        if !v.pass {
            if KNOWN_GAPS.contains(id) {
                let held = v.fallback == Some(true);
                println!(
                    "             known gap; documented replacement claim {}",
                    if held { "holds" } else { "does NOT hold" }
                );
                blocking += usize::from(!held);
            } else {
                blocking += 1;
            }
        }
    }
    let passed = verdicts.iter().filter(|(_, v)| v.pass).count();
    println!(
        "acceptance: {passed}/{} criteria pass, {blocking} unexpected failure(s), {:.1}s",
        verdicts.len(),
        start.elapsed().as_secs_f64()
    );
    if blocking > 0 {
        std::process::exit(1);
    }
}
