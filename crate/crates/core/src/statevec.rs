//! Dense n-qubit pure states and the gate kernels acting on them.
//!
//! Qubits are numbered `1..=n`; qubit 1 is the most significant bit of the
//! basis index. With this ordering the first `n/2` qubits label the rows of
//! the amplitude vector reshaped as an `N_A × N_B` matrix.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{Mat2, Mat4, C64, PAULI_X, PAULI_Y, PAULI_Z, ZERO};
use crate::seed::Seed;

/// Hard ceiling on the register size this crate will allocate.
pub const MAX_QUBITS: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn matrix(self) -> Mat2 {
        match self {
            Axis::X => PAULI_X,
            Axis::Y => PAULI_Y,
            Axis::Z => PAULI_Z,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::invalid(format!("unknown Pauli axis {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

fn check_register(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 || n > MAX_QUBITS {
        return Err(Error::invalid(format!(
            "qubit count must be even and in 2..={MAX_QUBITS}, got {n}"
        )));
    }
    Ok(())
}

/// Haar-random single-qubit state from two normalized complex Gaussians.
fn haar_qubit(rng: &mut impl Rng) -> [C64; 2] {
    loop {
        let v: [C64; 2] = std::array::from_fn(|_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        if norm > 1e-300 {
            return [v[0] / norm, v[1] / norm];
        }
    }
}

impl StateVector {
    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_register(n)?;
        if index >= 1 << n {
            return Err(Error::invalid(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amplitudes = vec![ZERO; 1 << n];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits: n, amplitudes })
    }

    /// Wraps raw amplitudes, renormalizing them to unit length.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::invalid(format!("amplitude count {len} is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        check_register(n)?;
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("amplitudes have zero or non-finite norm"));
        }
        let mut state = Self { num_qubits: n, amplitudes };
        state.amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(state)
    }

    /// `⊗_k χ_k` with each `χ_k` an independent Haar-random qubit state.
    pub fn random_product(n: usize, seed: Seed) -> Result<Self> {
        check_register(n)?;
        let mut rng = seed.rng();
        let mut amplitudes = Vec::with_capacity(1 << n);
        amplitudes.push(C64::new(1.0, 0.0));
        for _ in 0..n {
            let chi = haar_qubit(&mut rng);
            // appending a less significant qubit: |a⟩ ⊗ χ
            let prev = std::mem::take(&mut amplitudes);
            amplitudes.reserve(prev.len() * 2);
            for a in prev {
                amplitudes.push(a * chi[0]);
                amplitudes.push(a * chi[1]);
            }
        }
        let mut state = Self { num_qubits: n, amplitudes };
        state.renormalize();
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn renormalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        self.amplitudes.iter_mut().for_each(|z| *z /= norm);
    }

    pub fn scale(&mut self, factor: C64) {
        self.amplitudes.iter_mut().for_each(|z| *z *= factor);
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit == 0 || qubit > self.num_qubits {
            return Err(Error::invalid(format!(
                "qubit {qubit} out of range 1..={}",
                self.num_qubits
            )));
        }
        Ok(1 << (self.num_qubits - qubit))
    }

    /// Applies a 4×4 unitary to the ordered pair `(q1, q2)`; `q1` is the
    /// first tensor factor of the gate's basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn apply_two_qubit(&mut self, gate: &Mat4, q1: usize, q2: usize) -> Result<()> {
        if q1 == q2 {
            return Err(Error::invalid(format!("gate needs two distinct qubits, got ({q1}, {q2})")));
        }
        self.mask(q1)?;
        self.mask(q2)?;
        apply_two_qubit_raw(&mut self.amplitudes, self.num_qubits, gate, q1, q2);
        Ok(())
    }

    pub fn apply_single_qubit(&mut self, gate: &Mat2, qubit: usize) -> Result<()> {
        let m = self.mask(qubit)?;
        let half = self.amplitudes.len() >> 1;
        let amps = &mut self.amplitudes;
        for k in 0..half {
            let low = k & (m - 1);
            let i0 = ((k ^ low) << 1) | low;
            let i1 = i0 | m;
            let (a, b) = (amps[i0], amps[i1]);
            amps[i0] = gate[0][0] * a + gate[0][1] * b;
            amps[i1] = gate[1][0] * a + gate[1][1] * b;
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, site: usize, axis: Axis) -> Result<()> {
        let m = self.mask(site)?;
        let amps = &mut self.amplitudes;
        match axis {
            Axis::Z => amps
                .iter_mut()
                .enumerate()
                .filter(|(i, _)| i & m != 0)
                .for_each(|(_, z)| *z = -*z),
            Axis::X | Axis::Y => {
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    amps.swap(i, i | m);
                    if axis == Axis::Y {
                        // Y = [[0, -i], [i, 0]]
                        amps[i] *= C64::new(0.0, -1.0);
                        amps[i | m] *= C64::new(0.0, 1.0);
                    }
                }
            }
        }
        Ok(())
    }

    /// `⟨self|other⟩`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::invalid(format!(
                "inner product of {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        // pairwise summation keeps the result independent of chunking
        Ok(pairwise_sum(&self.amplitudes, &other.amplitudes))
    }
}

/// Two-qubit kernel on a raw `2^n` amplitude slice; qubits are assumed valid
/// and distinct.
pub(crate) fn apply_two_qubit_raw(amps: &mut [C64], n: usize, gate: &Mat4, q1: usize, q2: usize) {
    let m1 = 1usize << (n - q1);
    let m2 = 1usize << (n - q2);
    let (lo, hi) = if m1 < m2 { (m1, m2) } else { (m2, m1) };
    for k in 0..amps.len() >> 2 {
        let x = ((k & !(lo - 1)) << 1) | (k & (lo - 1));
        let base = ((x & !(hi - 1)) << 1) | (x & (hi - 1));
        let idx = [base, base | m2, base | m1, base | m1 | m2];
        let v = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
        for (row, &i) in gate.iter().zip(&idx) {
            amps[i] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
        }
    }
}

fn pairwise_sum(a: &[C64], b: &[C64]) -> C64 {
    if a.len() <= 256 {
        return a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    }
    let mid = a.len() / 2;
    pairwise_sum(&a[..mid], &b[..mid]) + pairwise_sum(&a[mid..], &b[mid..])
}
