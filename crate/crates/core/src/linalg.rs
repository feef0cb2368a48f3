//! Fixed-size dense complex matrices used for one- and two-qubit gates.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn identity<const N: usize>() -> [[C64; N]; N] {
    let mut m = [[ZERO; N]; N];
    for (k, row) in m.iter_mut().enumerate() {
        row[k] = ONE;
    }
    m
}

pub fn matmul<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = [[ZERO; N]; N];
    for i in 0..N {
        for k in 0..N {
            let aik = a[i][k];
            for j in 0..N {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint<const N: usize>(a: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = [[ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

pub fn transpose<const N: usize>(a: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = [[ZERO; N]; N];
    for i in 0..N {
        for j in 0..N {
            out[j][i] = a[i][j];
        }
    }
    out
}

pub fn scale<const N: usize>(a: &[[C64; N]; N], s: C64) -> [[C64; N]; N] {
    let mut out = *a;
    out.iter_mut().flatten().for_each(|z| *z *= s);
    out
}

pub fn add<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> [[C64; N]; N] {
    let mut out = *a;
    for i in 0..N {
        for j in 0..N {
            out[i][j] += b[i][j];
        }
    }
    out
}

/// Kronecker product `a ⊗ b`; `a` acts on the first (more significant) factor.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Largest entry-wise deviation of `a` from `b`.
pub fn max_abs_diff<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> f64 {
    let mut d = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            d = d.max((a[i][j] - b[i][j]).norm());
        }
    }
    d
}

/// Spectral-norm bound on `‖U†U − 1‖`, via the Frobenius norm.
pub fn unitarity_deviation<const N: usize>(u: &[[C64; N]; N]) -> f64 {
    let g = matmul(&adjoint(u), u);
    let mut s = 0.0;
    for i in 0..N {
        for j in 0..N {
            let target = if i == j { ONE } else { ZERO };
            s += (g[i][j] - target).norm_sqr();
        }
    }
    s.sqrt()
}

pub fn hermiticity_deviation<const N: usize>(h: &[[C64; N]; N]) -> f64 {
    max_abs_diff(h, &adjoint(h))
}

/// Determinant of a 4×4 matrix by Gaussian elimination with partial pivoting.
pub fn det4(m: &Mat4) -> C64 {
    let mut a = *m;
    let mut det = ONE;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        if a[pivot][col].norm() == 0.0 {
            return ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
        }
    }
    det
}

/// Eigendecomposition of a small Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns ascending eigenvalues and the unitary whose columns are the
/// matching eigenvectors, so that `h = V diag(λ) V†`.
pub fn hermitian_eigh<const N: usize>(h: &[[C64; N]; N]) -> ([f64; N], [[C64; N]; N]) {
    let mut a = *h;
    // symmetrize so round-off in the input cannot stall convergence
    for i in 0..N {
        a[i][i] = C64::new(a[i][i].re, 0.0);
        for j in i + 1..N {
            let avg = (a[i][j] + a[j][i].conj()) * 0.5;
            a[i][j] = avg;
            a[j][i] = avg.conj();
        }
    }
    let mut v = identity::<N>();
    let scale: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt();

    for _sweep in 0..64 {
        let off: f64 = (0..N)
            .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * 1e-3 * scale || off == 0.0 {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // phase that makes the (p, q) element real and positive
                let phase = apq / r;
                let app = a[p][p].re;
                let aqq = a[q][q].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = diag(1, conj(phase)) on (p, q) followed by the real rotation
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -phase.conj() * s;
                let gqq = phase.conj() * c;
                // a <- a G
                for row in a.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * gpp + xq * gqp;
                    row[q] = xp * gpq + xq * gqq;
                }
                // a <- G† a
                for k in 0..N {
                    let (xp, xq) = (a[p][k], a[q][k]);
                    a[p][k] = gpp.conj() * xp + gqp.conj() * xq;
                    a[q][k] = gpq.conj() * xp + gqq.conj() * xq;
                }
                for row in v.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * gpp + xq * gqp;
                    row[q] = xp * gpq + xq * gqq;
                }
                a[p][q] = ZERO;
                a[q][p] = ZERO;
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|k| k);
    order.sort_by(|&x, &y| a[x][x].re.total_cmp(&a[y][y].re));
    let values = std::array::from_fn(|k| a[order[k]][order[k]].re);
    let mut vectors = [[ZERO; N]; N];
    for (new, &old) in order.iter().enumerate() {
        for row in 0..N {
            vectors[row][new] = v[row][old];
        }
    }
    (values, vectors)
}

/// `exp(-i·t·H)` for Hermitian `H`, through its eigendecomposition.
pub fn hermitian_expi<const N: usize>(h: &[[C64; N]; N], t: f64) -> [[C64; N]; N] {
    let (vals, vecs) = hermitian_eigh(h);
    let mut d = [[ZERO; N]; N];
    for k in 0..N {
        d[k][k] = C64::from_polar(1.0, -t * vals[k]);
    }
    matmul(&matmul(&vecs, &d), &adjoint(&vecs))
}

/// Eigenvalues of a unitary matrix.
///
/// A unitary is normal, so its Hermitian and anti-Hermitian parts commute and
/// share an eigenbasis; diagonalizing a generic real combination of the two
/// recovers it, and the eigenvalues follow as Rayleigh quotients.
pub fn unitary_eigenvalues<const N: usize>(u: &[[C64; N]; N]) -> [C64; N] {
    let ud = adjoint(u);
    let herm = scale(&add(u, &ud), C64::new(0.5, 0.0));
    let anti = scale(&add(u, &scale(&ud, -ONE)), C64::new(0.0, -0.5));
    // an irrational weight keeps accidental degeneracies of the mix unlikely
    let mix = add(&herm, &scale(&anti, C64::new(std::f64::consts::FRAC_1_SQRT_2 * 0.8153, 0.0)));
    let (_, v) = hermitian_eigh(&mix);
    let uv = matmul(u, &v);
    std::array::from_fn(|k| (0..N).map(|r| v[r][k].conj() * uv[r][k]).sum())
}

pub const PAULI_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
pub const PAULI_Y: Mat2 = [[ZERO, C64::new(0.0, -1.0)], [I, ZERO]];
pub const PAULI_Z: Mat2 = [[ONE, ZERO], [ZERO, C64::new(-1.0, 0.0)]];

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian<const N: usize>(rng: &mut impl Rng) -> [[C64; N]; N] {
        let mut h = [[ZERO; N]; N];
        for i in 0..N {
            h[i][i] = C64::new(rng.random_range(-2.0..2.0), 0.0);
            for j in i + 1..N {
                let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                h[i][j] = z;
                h[j][i] = z.conj();
            }
        }
        h
    }

    #[test]
    fn jacobi_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let h: Mat4 = random_hermitian(&mut rng);
            let (vals, vecs) = hermitian_eigh(&h);
            assert!(unitarity_deviation(&vecs) < 1e-13);
            let mut d = [[ZERO; 4]; 4];
            for k in 0..4 {
                d[k][k] = C64::new(vals[k], 0.0);
            }
            let back = matmul(&matmul(&vecs, &d), &adjoint(&vecs));
            assert!(max_abs_diff(&back, &h) < 1e-13);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn jacobi_handles_degenerate_and_diagonal() {
        let h: Mat4 = identity();
        let (vals, _) = hermitian_eigh(&h);
        assert_eq!(vals, [1.0; 4]);
        let z = kron(&PAULI_Z, &PAULI_Z);
        let (vals, _) = hermitian_eigh(&z);
        assert_eq!(vals, [-1.0, -1.0, 1.0, 1.0]);
    }

    #[test]
    fn expi_matches_taylor_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h: Mat4 = random_hermitian(&mut rng);
        let t = 0.7;
        // Taylor series of exp(-i t H), summed until terms underflow
        let step = scale(&h, C64::new(0.0, -t));
        let mut term = identity::<4>();
        let mut sum = term;
        for k in 1..80 {
            term = scale(&matmul(&term, &step), C64::new(1.0 / k as f64, 0.0));
            sum = add(&sum, &term);
        }
        assert!(max_abs_diff(&hermitian_expi(&h, t), &sum) < 1e-13);
    }

    #[test]
    fn unitary_eigenvalues_of_diagonal_and_rotated() {
        let d: Mat4 = std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { C64::from_polar(1.0, 0.3 * i as f64 + 0.1) } else { ZERO })
        });
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = hermitian_expi(&random_hermitian::<4>(&mut rng), 1.3);
        let u = matmul(&matmul(&w, &d), &adjoint(&w));
        let mut ev: Vec<f64> = unitary_eigenvalues(&u).iter().map(|z| z.arg()).collect();
        ev.sort_by(f64::total_cmp);
        for (k, e) in ev.iter().enumerate() {
            assert!((e - (0.3 * k as f64 + 0.1)).abs() < 1e-12);
        }
    }

    #[test]
    fn det_of_kron() {
        let a: Mat2 = [[C64::new(1.0, 1.0), C64::new(2.0, 0.0)], [ZERO, C64::new(0.0, 3.0)]];
        let b: Mat2 = [[C64::new(2.0, 0.0), ONE], [ONE, C64::new(1.0, 0.0)]];
        // det(A⊗B) = det(A)^2 det(B)^2
        let da = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let db = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        let expected = da * da * db * db;
        assert!((det4(&kron(&a, &b)) - expected).norm() < 1e-12);
    }
}
