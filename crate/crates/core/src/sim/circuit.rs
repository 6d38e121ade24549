use crate::census::GateCensus;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

use super::{Gate, QuantumState, RegisterLayout};

/// Ordered gate list with an incrementally maintained census.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    layout: RegisterLayout,
    gates: Vec<Gate>,
    census: GateCensus,
    workspace: usize,
}

impl Circuit {
    pub fn new(layout: RegisterLayout) -> Self {
        Self {
            layout,
            gates: Vec::new(),
            census: GateCensus {
                qubits: layout.total() as u64,
                ..GateCensus::default()
            },
            workspace: 0,
        }
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn census(&self) -> GateCensus {
        self.census
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.layout.total())?;
        self.workspace = self.workspace.max(gate.workspace());
        self.census += gate.census();
        self.census.qubits = (self.layout.total() + self.workspace) as u64;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        if other.layout != self.layout {
            return Err(Error::InvalidParameter("cannot join circuits on different layouts".into()));
        }
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(self)
    }

    pub fn then(mut self, other: &Circuit) -> Result<Self> {
        self.extend(other)?;
        Ok(self)
    }

    pub fn inverse(&self) -> Self {
        let mut c = Circuit::new(self.layout);
        for g in self.gates.iter().rev() {
            c.push(g.inverse()).expect("inverse of a valid gate is valid");
        }
        c
    }

    /// Census rebuilt from the gate list.
    pub fn recount(&self) -> GateCensus {
        let mut total = GateCensus {
            qubits: self.layout.total() as u64,
            ..GateCensus::default()
        };
        let mut ws = 0;
        for g in &self.gates {
            total += g.census();
            ws = ws.max(g.workspace());
        }
        total.qubits = (self.layout.total() + ws) as u64;
        total
    }

    /// Full unitary, column by column. Only for small layouts.
    pub fn unitary(&self) -> Result<CMatrix> {
        const CAP: usize = 12;
        if self.layout.total() > CAP {
            return Err(Error::DimensionCap {
                what: "dense circuit unitary",
                qubits: self.layout.total(),
                cap: CAP,
            });
        }
        let dim = self.layout.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let mut amps = vec![num_complex::Complex64::new(0.0, 0.0); dim];
            amps[col] = num_complex::Complex64::new(1.0, 0.0);
            let s = QuantumState::from_amplitudes(self.layout, amps)?.applied(self)?;
            for (row, a) in s.amplitudes().iter().enumerate() {
                m[(row, col)] = *a;
            }
        }
        Ok(m)
    }
}
