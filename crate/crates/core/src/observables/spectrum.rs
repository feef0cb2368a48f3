use faer::linalg::matmul::triangular::{self, BlockStructure};
use faer::{Accum, Mat, MatRef, Par, Side};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::statevec::StateVector;

/// Amplitudes viewed as the `N_A × N_B` matrix of the half-half cut.
fn cut_matrix(state: &StateVector) -> Result<MatRef<'_, C64>> {
    let n = state.num_qubits();
    if n % 2 != 0 {
        return Err(Error::invalid(format!("half-half cut needs even n, got {n}")));
    }
    let dim = 1usize << (n / 2);
    Ok(MatRef::from_row_major_slice(state.amplitudes(), dim, dim))
}

/// Lower triangle (diagonal included) of `ρ_A = M M†`.
fn rho_lower(state: &StateVector) -> Result<Mat<C64>> {
    let m = cut_matrix(state)?;
    let dim = m.nrows();
    let mut rho = Mat::<C64>::zeros(dim, dim);
    triangular::matmul(
        rho.as_mut(),
        BlockStructure::TriangularLower,
        Accum::Replace,
        m,
        BlockStructure::Rectangular,
        m.adjoint(),
        BlockStructure::Rectangular,
        C64::new(1.0, 0.0),
        Par::Seq,
    );
    Ok(rho)
}

/// Reduced density matrix of the first `n/2` qubits.
pub fn reduced_density(state: &StateVector) -> Result<Mat<C64>> {
    let lower = rho_lower(state)?;
    let dim = lower.nrows();
    Ok(Mat::from_fn(dim, dim, |i, j| {
        if i >= j {
            lower[(i, j)]
        } else {
            lower[(j, i)].conj()
        }
    }))
}

/// `tr ρ_A²`, from the Gram matrix of the cut without an eigensolve.
pub fn purity(state: &StateVector) -> Result<f64> {
    let rho = rho_lower(state)?;
    let dim = rho.nrows();
    let mut diag = 0.0;
    let mut off = 0.0;
    for j in 0..dim {
        diag += rho[(j, j)].re * rho[(j, j)].re;
        off += (j + 1..dim).map(|i| rho[(i, j)].norm_sqr()).sum::<f64>();
    }
    Ok(diag + 2.0 * off)
}

/// Entanglement spectrum of the half-chain reduced state at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSpectrum {
    pub t: usize,
    /// Descending, negative round-off clamped to zero.
    pub eigenvalues: Vec<f64>,
}

impl ReducedSpectrum {
    pub fn new(t: usize, mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.iter_mut().for_each(|l| *l = l.max(0.0));
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        Self { t, eigenvalues }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn trace(&self) -> f64 {
        super::pairwise_sum(&self.eigenvalues)
    }
}

pub fn spectrum(state: &StateVector, t: usize) -> Result<ReducedSpectrum> {
    let rho = rho_lower(state)?;
    let eig = rho
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigensolver failed: {e:?}")))?;
    Ok(ReducedSpectrum::new(t, eig))
}

/// `tr ρ_A^p = Σ λ^p`.
pub fn purity_p(spectrum: &ReducedSpectrum, p: u32) -> Result<f64> {
    if p < 2 {
        return Err(Error::invalid(format!("purity order must be at least 2, got {p}")));
    }
    let powers: Vec<f64> = spectrum.eigenvalues.iter().map(|l| l.powi(p as i32)).collect();
    Ok(super::pairwise_sum(&powers))
}

/// Threshold rule for counting non-zero eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RankPolicy {
    /// `λ > N_A · ε · λ_1`.
    MachineEpsilon,
    /// `λ > tol · λ_1`.
    Relative(f64),
}

pub fn numerical_rank_with(spectrum: &ReducedSpectrum, policy: RankPolicy) -> usize {
    let Some(&largest) = spectrum.eigenvalues.first() else {
        return 0;
    };
    let tau = match policy {
        RankPolicy::MachineEpsilon => spectrum.dim() as f64 * f64::EPSILON * largest,
        RankPolicy::Relative(tol) => tol * largest,
    };
    spectrum.eigenvalues.iter().filter(|&&l| l > tau).count()
}

pub fn numerical_rank(spectrum: &ReducedSpectrum) -> usize {
    numerical_rank_with(spectrum, RankPolicy::MachineEpsilon)
}
