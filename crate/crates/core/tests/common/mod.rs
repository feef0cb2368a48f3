//! Dense reference implementations shared by the integration tests.
#![allow(dead_code)]

use floquet_core::circuits::{build_step, CircuitConfig};
use floquet_core::linalg::{Mat4, C64};
use floquet_core::{Boundary, CircuitKind, GateSpec};

/// Row-major square complex matrix.
#[derive(Clone, Debug)]
pub struct Dense {
    pub dim: usize,
    pub data: Vec<C64>,
}

impl Dense {
    pub fn identity(dim: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        Self { dim, data }
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        let d = self.dim;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..d {
                    data[r * d + c] += a * other.data[k * d + c];
                }
            }
        }
        Dense { dim: d, data }
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let d = self.dim;
        (0..d)
            .map(|r| (0..d).map(|c| self.data[r * d + c] * v[c]).sum())
            .collect()
    }

    pub fn pow(&self, t: usize) -> Dense {
        (0..t).fold(Dense::identity(self.dim), |acc, _| self.mul(&acc))
    }
}

fn bit(i: usize, n: usize, q: usize) -> usize {
    (i >> (n - q)) & 1
}

/// The gate on qubits `(q1, q2)` of an `n`-qubit register, entry by entry:
/// `⟨r|G|c⟩ = G[(r_q1 r_q2), (c_q1 c_q2)]` when `r` and `c` agree elsewhere.
pub fn dense_gate(n: usize, gate: &Mat4, q1: usize, q2: usize) -> Dense {
    let dim = 1 << n;
    let others = !((1usize << (n - q1)) | (1usize << (n - q2)));
    let mut m = Dense {
        dim,
        data: vec![C64::new(0.0, 0.0); dim * dim],
    };
    for r in 0..dim {
        for c in 0..dim {
            if r & others == c & others {
                m.data[r * dim + c] =
                    gate[2 * bit(r, n, q1) + bit(r, n, q2)][2 * bit(c, n, q1) + bit(c, n, q2)];
            }
        }
    }
    m
}

/// One Floquet period as a dense matrix: later gates multiply from the left.
pub fn dense_step(config: &CircuitConfig) -> Dense {
    let gate = config.gate.build().expect("fixed gate family");
    let n = config.n;
    build_step(config)
        .expect("valid config")
        .pairs
        .iter()
        .fold(Dense::identity(1 << n), |acc, &(q1, q2)| {
            dense_gate(n, gate.matrix(), q1, q2).mul(&acc)
        })
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// The four S/BW × OBC/PBC layouts plus a LayeredAB circuit when `n ≥ 4`.
pub fn all_layouts(n: usize, gate: &GateSpec) -> Vec<CircuitConfig> {
    let mut out: Vec<CircuitConfig> = [
        (CircuitKind::S, Boundary::OBC),
        (CircuitKind::S, Boundary::PBC),
        (CircuitKind::BW, Boundary::OBC),
        (CircuitKind::BW, Boundary::PBC),
    ]
    .into_iter()
    .map(|(k, b)| CircuitConfig::new(k, b, n, gate.clone()))
    .collect();
    out.push(CircuitConfig::layered(n, 1, gate.clone()));
    out
}
