//! Pauli-sum Hamiltonians, their rescaled and grouped forms, and the lattice
//! model builders.

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigensystem, CMatrix};
use crate::pauli::{Letter, PauliString, DENSE_PAULI_CAP};

/// Relative tolerance used when grouping equal strengths.
pub const DEFAULT_GROUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: f64,
    /// Always carries phase `+1`; signs live in `coeff`.
    pub pauli: PauliString,
}

/// `H = Σ_j α_j P_j` with `P_0 = I` stored first.
#[derive(Debug, Clone, PartialEq)]
pub struct LcuHamiltonian {
    n_qubits: usize,
    terms: Vec<Term>,
}

impl LcuHamiltonian {
    /// Builds a Hamiltonian, merging repeated words and folding `±1` phases
    /// into the coefficients. Zero coefficients are dropped, except the
    /// identity which is always present.
    pub fn new<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliString, f64)>,
    {
        let mut merged: Vec<Term> = vec![Term {
            coeff: 0.0,
            pauli: PauliString::from_bits(n_qubits, 0, 0, 0)?,
        }];
        let mut index: HashMap<(u64, u64), usize> = HashMap::new();
        index.insert((0, 0), 0);
        for (p, c) in terms {
            if p.n_qubits() != n_qubits {
                return Err(Error::WidthMismatch(n_qubits, p.n_qubits()));
            }
            if !c.is_finite() {
                return Err(Error::NonFinite);
            }
            let sign = p.sign().ok_or_else(|| {
                Error::InvalidPauli(p.to_string(), "Hamiltonian terms need a real sign")
            })?;
            let key = (p.x_bits(), p.z_bits());
            match index.get(&key) {
                Some(&i) => merged[i].coeff += sign * c,
                None => {
                    index.insert(key, merged.len());
                    merged.push(Term {
                        coeff: sign * c,
                        pauli: p.with_phase(0),
                    });
                }
            }
        }
        let terms = merged
            .into_iter()
            .enumerate()
            .filter(|(i, t)| *i == 0 || t.coeff != 0.0)
            .map(|(_, t)| t)
            .collect();
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// All terms, identity first.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn identity_coeff(&self) -> f64 {
        self.terms[0].coeff
    }

    /// Number of non-identity terms.
    pub fn term_count(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.n_qubits,
            self.terms.iter().map(|t| (t.pauli, t.coeff * factor)),
        )
    }

    /// Coefficient-wise sum; words whose merged coefficient is exactly zero vanish.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::WidthMismatch(self.n_qubits, other.n_qubits));
        }
        Self::new(
            self.n_qubits,
            self.terms
                .iter()
                .chain(other.terms.iter())
                .map(|t| (t.pauli, t.coeff)),
        )
    }

    pub fn dense_matrix(&self) -> Result<CMatrix> {
        dense_sum(
            self.n_qubits,
            self.terms.iter().map(|t| (t.coeff, &t.pauli)),
        )
    }

    pub fn eigensystem(&self) -> Result<(Vec<f64>, CMatrix)> {
        Ok(hermitian_eigensystem(&self.dense_matrix()?))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let file: HamiltonianFile = serde_json::from_str(s)?;
        let mut terms = Vec::with_capacity(file.terms.len());
        for t in file.terms {
            let p: PauliString = t.pauli.parse()?;
            if p.n_qubits() != file.n_qubits {
                return Err(Error::WidthMismatch(file.n_qubits, p.n_qubits()));
            }
            terms.push((p, t.coeff));
        }
        Self::new(file.n_qubits, terms)
    }

    /// JSON text with terms sorted by Pauli word.
    pub fn to_json_string(&self) -> String {
        let mut terms: Vec<FileTerm> = self
            .terms
            .iter()
            .map(|t| FileTerm {
                pauli: t.pauli.word(),
                coeff: t.coeff,
            })
            .collect();
        terms.sort_by(|a, b| a.pauli.cmp(&b.pauli));
        let file = HamiltonianFile {
            n_qubits: self.n_qubits,
            terms,
        };
        serde_json::to_string_pretty(&file).expect("plain data serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HamiltonianFile {
    n_qubits: usize,
    terms: Vec<FileTerm>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTerm {
    pauli: String,
    coeff: f64,
}

fn dense_sum<'a, I>(n_qubits: usize, terms: I) -> Result<CMatrix>
where
    I: IntoIterator<Item = (f64, &'a PauliString)>,
{
    if n_qubits > DENSE_PAULI_CAP {
        return Err(Error::DimensionCap {
            what: "dense Hamiltonian",
            qubits: n_qubits,
            cap: DENSE_PAULI_CAP,
        });
    }
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for (c, p) in terms {
        for col in 0..dim {
            let (row, f) = p.act_on_basis(col as u64);
            m[(row as usize, col)] += f * c;
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftPolicy {
    /// Raise the identity coefficient to `Σ_{j≥1} |α_j|` so that `H ≥ 0`.
    Auto,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTerm {
    /// `|β_j|²`.
    pub beta_sq: f64,
    /// Carries the absorbed sign of `α_j`.
    pub pauli: PauliString,
}

/// `H̄ = H/𝒩 = Σ_j |β_j|² P_j` with `Σ_j |β_j|² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledLcu {
    n_qubits: usize,
    normalization: f64,
    weights: Vec<WeightedTerm>,
}

impl RescaledLcu {
    /// Checks the weight invariants; used by builders that synthesize weights.
    pub fn from_weights(
        n_qubits: usize,
        normalization: f64,
        weights: Vec<WeightedTerm>,
    ) -> Result<Self> {
        if weights.is_empty() || !weights[0].pauli.is_identity_word() {
            return Err(Error::InvalidParameter(
                "first weight must be the identity".into(),
            ));
        }
        if !(normalization > 0.0) {
            return Err(Error::InvalidParameter("normalization must be > 0".into()));
        }
        let total: f64 = weights.iter().map(|w| w.beta_sq).sum();
        if weights.iter().any(|w| w.beta_sq < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightSum(total));
        }
        for w in &weights {
            if w.pauli.n_qubits() != n_qubits {
                return Err(Error::WidthMismatch(n_qubits, w.pauli.n_qubits()));
            }
            if !w.pauli.is_hermitian() {
                return Err(Error::InvalidPauli(w.pauli.to_string(), "weights need ±1 phase"));
            }
        }
        Ok(Self {
            n_qubits,
            normalization,
            weights,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `𝒩 = Σ_j |α_j|`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Identity weight first.
    pub fn weights(&self) -> &[WeightedTerm] {
        &self.weights
    }

    /// Number of non-identity terms `N`.
    pub fn term_count(&self) -> usize {
        self.weights.len() - 1
    }

    /// Dense matrix of `H̄`.
    pub fn dense_matrix(&self) -> Result<CMatrix> {
        let signed: Vec<(f64, PauliString)> = self
            .weights
            .iter()
            .map(|w| {
                let s = w.pauli.sign().unwrap_or(1.0);
                (w.beta_sq * s, w.pauli.with_phase(0))
            })
            .collect();
        dense_sum(self.n_qubits, signed.iter().map(|(c, p)| (*c, p)))
    }

    /// Eigenvalues `E_k` of `H̄` (ascending) and eigenvectors.
    pub fn eigensystem(&self) -> Result<(Vec<f64>, CMatrix)> {
        Ok(hermitian_eigensystem(&self.dense_matrix()?))
    }

    /// Back to a plain Hamiltonian `𝒩 · H̄`.
    pub fn to_hamiltonian(&self) -> Result<LcuHamiltonian> {
        LcuHamiltonian::new(
            self.n_qubits,
            self.weights.iter().map(|w| {
                let s = w.pauli.sign().unwrap_or(1.0);
                (w.pauli.with_phase(0), s * w.beta_sq * self.normalization)
            }),
        )
    }
}

pub fn normalize(h: &LcuHamiltonian, shift: ShiftPolicy) -> Result<RescaledLcu> {
    let mut coeffs: Vec<f64> = h.terms.iter().map(|t| t.coeff).collect();
    if shift == ShiftPolicy::Auto {
        let bound: f64 = coeffs[1..].iter().map(|c| c.abs()).sum();
        coeffs[0] = coeffs[0].max(bound);
    }
    let norm: f64 = coeffs.iter().map(|c| c.abs()).sum();
    if norm == 0.0 {
        return Err(Error::EmptyHamiltonian);
    }
    let weights = h
        .terms
        .iter()
        .zip(&coeffs)
        .map(|(t, &c)| WeightedTerm {
            beta_sq: c.abs() / norm,
            pauli: if c < 0.0 { t.pauli.negate() } else { t.pauli },
        })
        .collect();
    Ok(RescaledLcu {
        n_qubits: h.n_qubits,
        normalization: norm,
        weights,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TermGroup {
    /// `|β_k|²`, shared by every member.
    pub strength_sq: f64,
    /// Signed words; trailing entries past `original_count` are `+I` padding.
    pub members: Vec<PauliString>,
    pub original_count: usize,
}

impl TermGroup {
    /// Padded size `N_k`.
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn padding(&self) -> usize {
        self.members.len() - self.original_count
    }
}

/// `H̄ = |β_0|² I + Σ_k |β_k|² Σ_j P_j^k` with every `N_k` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedLcu {
    n_qubits: usize,
    normalization: f64,
    beta0_sq: f64,
    groups: Vec<TermGroup>,
    folded: bool,
}

impl GroupedLcu {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn beta0_sq(&self) -> f64 {
        self.beta0_sq
    }

    pub fn groups(&self) -> &[TermGroup] {
        &self.groups
    }

    /// `K`.
    pub fn distinct_strengths(&self) -> usize {
        self.groups.len()
    }

    /// Total padded register size `N = Σ_k N_k`.
    pub fn padded_terms(&self) -> usize {
        self.groups.iter().map(TermGroup::size).sum()
    }

    /// Whether padding weight was taken out of the identity weight, leaving
    /// `𝒩` and the operator `H̄` unchanged.
    pub fn folded(&self) -> bool {
        self.folded
    }

    /// Zero-based offsets `m_k` of each register within the control block.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.groups
            .iter()
            .map(|g| {
                let m = acc;
                acc += g.size();
                m
            })
            .collect()
    }

    /// The operator the unary walk actually block-encodes: padding identities
    /// merged back into the identity weight.
    pub fn to_rescaled(&self) -> RescaledLcu {
        let pad: f64 = self
            .groups
            .iter()
            .map(|g| g.padding() as f64 * g.strength_sq)
            .sum();
        let mut weights = vec![WeightedTerm {
            beta_sq: self.beta0_sq + pad,
            pauli: PauliString::identity(self.n_qubits),
        }];
        for g in &self.groups {
            for p in &g.members[..g.original_count] {
                weights.push(WeightedTerm {
                    beta_sq: g.strength_sq,
                    pauli: *p,
                });
            }
        }
        RescaledLcu {
            n_qubits: self.n_qubits,
            normalization: self.normalization,
            weights,
        }
    }
}

/// Splits identity weight between the `|0⟩` amplitude and padding slots.
/// Returns `(beta0_sq, scale, folded)` where `scale` multiplies every other
/// weight and `𝒩` is divided by it.
pub(crate) fn fold_padding(beta0_sq: f64, pad_weight: f64) -> (f64, f64, bool) {
    if beta0_sq + 1e-15 >= pad_weight {
        ((beta0_sq - pad_weight).max(0.0), 1.0, true)
    } else {
        let scale = 1.0 / (1.0 + pad_weight - beta0_sq);
        (0.0, scale, false)
    }
}

pub fn group(h: &RescaledLcu, tol: f64) -> Result<GroupedLcu> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter("grouping tolerance must be ≥ 0".into()));
    }
    if h.weights[0].pauli.sign() == Some(-1.0) && h.weights[0].beta_sq > 0.0 {
        return Err(Error::InvalidParameter(
            "grouping needs a non-negative identity coefficient".into(),
        ));
    }
    let mut groups: Vec<TermGroup> = Vec::new();
    for w in &h.weights[1..] {
        let found = groups.iter_mut().find(|g| {
            (g.strength_sq - w.beta_sq).abs() <= tol * g.strength_sq.max(w.beta_sq)
        });
        match found {
            Some(g) => {
                g.members.push(w.pauli);
                g.original_count += 1;
            }
            None => groups.push(TermGroup {
                strength_sq: w.beta_sq,
                members: vec![w.pauli],
                original_count: 1,
            }),
        }
    }
    let identity = PauliString::identity(h.n_qubits);
    for g in &mut groups {
        let target = g.members.len().next_power_of_two();
        g.members.resize(target, identity);
    }
    let pad_weight: f64 = groups
        .iter()
        .map(|g| g.padding() as f64 * g.strength_sq)
        .sum();
    let (beta0_sq, scale, folded) = fold_padding(h.weights[0].beta_sq, pad_weight);
    for g in &mut groups {
        g.strength_sq *= scale;
    }
    let grouped = GroupedLcu {
        n_qubits: h.n_qubits,
        normalization: h.normalization / scale,
        beta0_sq,
        groups,
        folded,
    };
    let total = grouped.beta0_sq
        + grouped
            .groups
            .iter()
            .map(|g| g.strength_sq * g.size() as f64)
            .sum::<f64>();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum(total));
    }
    Ok(grouped)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// `g Σ_j X_j + J Σ_⟨ij⟩ Z_i Z_j` on a chain.
pub fn tfim(n: usize, g: f64, j: f64, boundary: Boundary) -> Result<LcuHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("tfim needs n ≥ 2, got {n}")));
    }
    let mut terms = Vec::new();
    for q in 0..n {
        terms.push((PauliString::single(n, q, Letter::X)?, g));
    }
    let bonds = match boundary {
        Boundary::Open => n - 1,
        Boundary::Periodic => n,
    };
    for q in 0..bonds {
        let r = (q + 1) % n;
        terms.push((
            PauliString::from_letters(n, &[(q, Letter::Z), (r, Letter::Z)])?,
            j,
        ));
    }
    LcuHamiltonian::new(n, terms)
}

/// `J Σ_{i<j} Z_i Z_j / (j−i)^α`, terms ordered by distance then site.
pub fn long_range_ising(n: usize, j: f64, alpha: f64) -> Result<LcuHamiltonian> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "long-range chain needs n ≥ 2, got {n}"
        )));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    let mut terms = Vec::new();
    for d in 1..n {
        let c = j / (d as f64).powf(alpha);
        for i in 0..n - d {
            terms.push((
                PauliString::from_letters(n, &[(i, Letter::Z), (i + d, Letter::Z)])?,
                c,
            ));
        }
    }
    LcuHamiltonian::new(n, terms)
}

/// Single-qubit product state, one of `0`, `1`, `+`, `-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalState {
    Zero,
    One,
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductState(pub Vec<LocalState>);

impl std::str::FromStr for ProductState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let v = s
            .chars()
            .map(|c| match c {
                '0' => Ok(LocalState::Zero),
                '1' => Ok(LocalState::One),
                '+' => Ok(LocalState::Plus),
                '-' => Ok(LocalState::Minus),
                _ => Err(Error::InvalidParameter(format!(
                    "product state {s:?}: letters must be 0, 1, + or -"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        if v.is_empty() {
            return Err(Error::InvalidParameter("empty product state".into()));
        }
        Ok(Self(v))
    }
}

impl ProductState {
    pub fn n_qubits(&self) -> usize {
        self.0.len()
    }

    /// Dense amplitudes, qubit 0 least significant.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![Complex64::new(1.0, 0.0)];
        for (q, s) in self.0.iter().enumerate() {
            let (a0, a1) = match s {
                LocalState::Zero => (1.0, 0.0),
                LocalState::One => (0.0, 1.0),
                LocalState::Plus => (h, h),
                LocalState::Minus => (h, -h),
            };
            let mut next = vec![Complex64::new(0.0, 0.0); v.len() * 2];
            for (i, amp) in v.iter().enumerate() {
                next[i] = amp * a0;
                next[i | (1 << q)] = amp * a1;
            }
            v = next;
        }
        v
    }
}

/// `H(g) = H₀ + g V` with an optional product-state ground state of `H₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolatedModel {
    pub h0: LcuHamiltonian,
    pub v: LcuHamiltonian,
    pub ground0: Option<ProductState>,
}

impl InterpolatedModel {
    pub fn new(
        h0: LcuHamiltonian,
        v: LcuHamiltonian,
        ground0: Option<ProductState>,
    ) -> Result<Self> {
        if h0.n_qubits() != v.n_qubits() {
            return Err(Error::WidthMismatch(h0.n_qubits(), v.n_qubits()));
        }
        if let Some(p) = &ground0 {
            if p.n_qubits() != h0.n_qubits() {
                return Err(Error::WidthMismatch(h0.n_qubits(), p.n_qubits()));
            }
        }
        Ok(Self { h0, v, ground0 })
    }

    pub fn n_qubits(&self) -> usize {
        self.h0.n_qubits()
    }

    pub fn interpolate(&self, g: f64) -> Result<LcuHamiltonian> {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::InvalidParameter(format!("g = {g} outside [0, 1]")));
        }
        self.h0.add(&self.v.scaled(g)?)
    }
}

/// The transverse-field path `H₀ = −|g| Σ X` (ground state `|+…+⟩`) towards
/// the couplings `J Σ Z Z`.
pub fn tfim_path(n: usize, field: f64, j: f64, boundary: Boundary) -> Result<InterpolatedModel> {
    let h0 = tfim(n, -field.abs(), 0.0, boundary)?;
    let v = tfim(n, 0.0, j, boundary)?;
    let ground = ProductState(vec![LocalState::Plus; n]);
    InterpolatedModel::new(h0, v, Some(ground))
}
