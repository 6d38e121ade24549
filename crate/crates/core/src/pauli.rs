//! Signed multi-qubit Pauli words in symplectic form.
//!
//! A word is stored as `i^phase · ⊗_q σ_q` where the letter on qubit `q` is
//! read off the `(x, z)` bit pair: `(0,0) = I`, `(1,0) = X`, `(0,1) = Z`,
//! `(1,1) = Y`. Qubit 0 is the least-significant bit of basis indices.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest width accepted by [`PauliString::to_matrix`].
pub const DENSE_PAULI_CAP: usize = 14;

/// Widest word representable with 64-bit masks.
pub const MAX_PAULI_WIDTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

/// `i^k` for `k` in `0..4`.
pub fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_bits: u64,
    z_bits: u64,
    /// Exponent of `i`, modulo 4.
    phase: u8,
}

fn width_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            x_bits: 0,
            z_bits: 0,
            phase: 0,
        }
    }

    pub fn from_bits(n_qubits: usize, x_bits: u64, z_bits: u64, phase: u8) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_PAULI_WIDTH {
            return Err(Error::InvalidParameter(format!(
                "Pauli width {n_qubits} outside 1..={MAX_PAULI_WIDTH}"
            )));
        }
        let mask = width_mask(n_qubits);
        if x_bits & !mask != 0 || z_bits & !mask != 0 {
            return Err(Error::InvalidParameter(
                "Pauli bitmask wider than n_qubits".into(),
            ));
        }
        Ok(Self {
            n_qubits,
            x_bits,
            z_bits,
            phase: phase % 4,
        })
    }

    /// A single letter on one qubit of an `n`-qubit register.
    pub fn single(n_qubits: usize, qubit: usize, letter: Letter) -> Result<Self> {
        Self::from_letters(n_qubits, &[(qubit, letter)])
    }

    pub fn from_letters(n_qubits: usize, letters: &[(usize, Letter)]) -> Result<Self> {
        let mut p = Self::from_bits(n_qubits, 0, 0, 0)?;
        for &(q, l) in letters {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    total: n_qubits,
                });
            }
            p = p.with_letter(q, l);
        }
        Ok(p)
    }

    fn with_letter(mut self, q: usize, l: Letter) -> Self {
        let bit = 1u64 << q;
        self.x_bits &= !bit;
        self.z_bits &= !bit;
        match l {
            Letter::I => {}
            Letter::X => self.x_bits |= bit,
            Letter::Z => self.z_bits |= bit,
            Letter::Y => {
                self.x_bits |= bit;
                self.z_bits |= bit;
            }
        }
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_bits(&self) -> u64 {
        self.x_bits
    }

    pub fn z_bits(&self) -> u64 {
        self.z_bits
    }

    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn phase_factor(&self) -> Complex64 {
        i_pow(self.phase)
    }

    pub fn is_identity_word(&self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// Word equality ignoring the phase.
    pub fn same_word(&self, other: &Self) -> bool {
        self.n_qubits == other.n_qubits && self.x_bits == other.x_bits && self.z_bits == other.z_bits
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// `+1` or `-1` for Hermitian words.
    pub fn sign(&self) -> Option<f64> {
        match self.phase {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn with_phase(mut self, phase: u8) -> Self {
        self.phase = phase % 4;
        self
    }

    pub fn negate(self) -> Self {
        let p = self.phase;
        self.with_phase(p + 2)
    }

    pub fn letter(&self, q: usize) -> Letter {
        let x = (self.x_bits >> q) & 1 == 1;
        let z = (self.z_bits >> q) & 1 == 1;
        match (x, z) {
            (false, false) => Letter::I,
            (true, false) => Letter::X,
            (false, true) => Letter::Z,
            (true, true) => Letter::Y,
        }
    }

    pub fn weight(&self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    fn y_count(&self) -> u32 {
        (self.x_bits & self.z_bits).count_ones()
    }

    fn check_width(&self, other: &Self) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::WidthMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(())
    }

    /// Commutation indicator: 0 when the words commute, 1 when they anticommute.
    pub fn star(&self, other: &Self) -> Result<u8> {
        self.check_width(other)?;
        let parity =
            (self.x_bits & other.z_bits).count_ones() + (self.z_bits & other.x_bits).count_ones();
        Ok((parity % 2) as u8)
    }

    pub fn commutes_with(&self, other: &Self) -> Result<bool> {
        Ok(self.star(other)? == 0)
    }

    /// Group product `self · other`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_width(other)?;
        // i^{|x&z|} X^x Z^z form; moving Z^{z1} past X^{x2} costs (-1)^{z1·x2}.
        let x = self.x_bits ^ other.x_bits;
        let z = self.z_bits ^ other.z_bits;
        let swap = (self.z_bits & other.x_bits).count_ones();
        let y_out = (x & z).count_ones();
        let exponent = self.phase as u32
            + other.phase as u32
            + self.y_count()
            + other.y_count()
            + 2 * swap
            + 4 * 64
            - y_out;
        Ok(Self {
            n_qubits: self.n_qubits,
            x_bits: x,
            z_bits: z,
            phase: (exponent % 4) as u8,
        })
    }

    /// Image of a computational basis index: `P|b⟩ = coeff · |b ⊕ x⟩`.
    pub fn act_on_basis(&self, b: u64) -> (u64, Complex64) {
        let sign_flips = (b & self.z_bits).count_ones();
        let k = self.phase as u32 + self.y_count() + 2 * sign_flips;
        (b ^ self.x_bits, i_pow((k % 4) as u8))
    }

    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        if self.n_qubits > DENSE_PAULI_CAP {
            return Err(Error::DimensionCap {
                what: "dense Pauli matrix",
                qubits: self.n_qubits,
                cap: DENSE_PAULI_CAP,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let (row, c) = self.act_on_basis(col as u64);
            m[(row as usize, col)] = c;
        }
        Ok(m)
    }

    /// Letters only, qubit 0 first.
    pub fn word(&self) -> String {
        (0..self.n_qubits)
            .map(|q| match self.letter(q) {
                Letter::I => 'I',
                Letter::X => 'X',
                Letter::Y => 'Y',
                Letter::Z => 'Z',
            })
            .collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix}{}", self.word())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses `[-][i]{I,X,Y,Z}+`, leftmost letter on qubit 0.
    fn from_str(s: &str) -> Result<Self> {
        let mut rest = s.trim();
        let mut phase = 0u8;
        if let Some(r) = rest.strip_prefix('-') {
            phase += 2;
            rest = r;
        }
        if let Some(r) = rest.strip_prefix('i') {
            phase += 1;
            rest = r;
        }
        if rest.is_empty() {
            return Err(Error::InvalidPauli(s.into(), "no letters"));
        }
        let n = rest.chars().count();
        if n > MAX_PAULI_WIDTH {
            return Err(Error::InvalidPauli(s.into(), "too many qubits"));
        }
        let mut p = Self::identity(n);
        for (q, ch) in rest.chars().enumerate() {
            let l = match ch {
                'I' => Letter::I,
                'X' => Letter::X,
                'Y' => Letter::Y,
                'Z' => Letter::Z,
                _ => return Err(Error::InvalidPauli(s.into(), "letters must be I, X, Y or Z")),
            };
            p = p.with_letter(q, l);
        }
        Ok(p.with_phase(phase))
    }
}
