//! Gate counts by fault-tolerant cost tier.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tier {
    Clifford,
    ThirdLevel,
    Rotation,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThirdLevelCounts {
    pub toffoli: u64,
    pub t: u64,
    pub fanout_sqrt_swap: u64,
    pub controlled_swap: u64,
}

impl ThirdLevelCounts {
    pub fn total(&self) -> u64 {
        self.toffoli + self.t + self.fanout_sqrt_swap + self.controlled_swap
    }
}

/// Per-circuit gate census. `qubits` is the logical width including the
/// workspace the multi-controlled gates would need once decomposed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCensus {
    pub clifford: u64,
    pub third_level: ThirdLevelCounts,
    pub rotations: u64,
    pub qubits: u64,
}

impl GateCensus {
    pub fn third_level_total(&self) -> u64 {
        self.third_level.total()
    }

    pub fn is_empty(&self) -> bool {
        self.clifford == 0 && self.third_level.total() == 0 && self.rotations == 0
    }
}

impl AddAssign for GateCensus {
    fn add_assign(&mut self, o: Self) {
        self.clifford += o.clifford;
        self.third_level.toffoli += o.third_level.toffoli;
        self.third_level.t += o.third_level.t;
        self.third_level.fanout_sqrt_swap += o.third_level.fanout_sqrt_swap;
        self.third_level.controlled_swap += o.third_level.controlled_swap;
        self.rotations += o.rotations;
        self.qubits = self.qubits.max(o.qubits);
    }
}

impl Add for GateCensus {
    type Output = Self;

    fn add(mut self, o: Self) -> Self {
        self += o;
        self
    }
}
