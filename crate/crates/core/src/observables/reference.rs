//! Random-state reference laws for the half-chain entanglement spectrum.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Long-time (random-state) values of `tr ρ_A^p` for `p = 2, 3, 4`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationaryPurities {
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
}

impl StationaryPurities {
    pub fn order(&self, p: u32) -> Option<f64> {
        match p {
            2 => Some(self.i2),
            3 => Some(self.i3),
            4 => Some(self.i4),
            _ => None,
        }
    }
}

pub fn stationary_purities(na: u64) -> Result<StationaryPurities> {
    if na < 2 {
        return Err(Error::invalid(format!("N_A must be at least 2, got {na}")));
    }
    let n = na as f64;
    let n2 = n * n;
    Ok(StationaryPurities {
        i2: 2.0 * n / (1.0 + n2),
        i3: (5.0 * n2 + 1.0) / ((n2 + 1.0) * (n2 + 2.0)),
        i4: (14.0 * n2 * n + 10.0 * n) / ((n2 + 1.0) * (n2 + 2.0) * (n2 + 3.0)),
    })
}

/// Standard deviation of `tr ρ_A²` over random pure states with
/// `N_A = N_B = na`: the size of single-trajectory fluctuations at late times.
pub fn stationary_purity_std(na: u64) -> Result<f64> {
    if na < 2 {
        return Err(Error::invalid(format!("N_A must be at least 2, got {na}")));
    }
    let a = na as f64;
    let d = a * a;
    let var = 2.0 * (a * a - 1.0) * (a * a - 1.0) / ((d + 1.0) * (d + 1.0) * (d + 2.0) * (d + 3.0));
    Ok(var.sqrt())
}

/// Marčenko–Pastur density of `x = N_A λ` for square Wishart matrices.
pub fn mp_density(x: f64) -> f64 {
    if x > 0.0 && x < 4.0 {
        ((4.0 - x) / x).sqrt() / (2.0 * PI)
    } else {
        0.0
    }
}

/// Cumulative distribution of [`mp_density`]; with `x = 4 sin²θ` it is
/// `(2/π)(θ + sin θ cos θ)`.
pub fn mp_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 4.0 {
        return 1.0;
    }
    let theta = (x / 4.0).sqrt().asin();
    (2.0 / PI) * (theta + theta.sin() * theta.cos())
}

/// Number of uniform bins on `x ∈ [0, 4]` used for spectrum comparisons.
pub const MP_BINS: usize = 50;

/// Probability mass of each of `bins` uniform bins on `[0, 4]`.
pub fn mp_bin_probabilities(bins: usize) -> Vec<f64> {
    let width = 4.0 / bins as f64;
    (0..bins)
        .map(|b| mp_cdf((b + 1) as f64 * width) - mp_cdf(b as f64 * width))
        .collect()
}

/// Fraction of eigenvalues in each bin of `x = N_A λ` on `[0, 4]`.
///
/// Values outside the range are counted in the total but in no bin, so they
/// show up as missing mass in a distance computation.
pub fn rescaled_histogram<'a>(
    spectra: impl IntoIterator<Item = &'a [f64]>,
    bins: usize,
) -> Vec<f64> {
    let mut counts = vec![0u64; bins];
    let mut total = 0u64;
    for eigenvalues in spectra {
        let na = eigenvalues.len() as f64;
        for &l in eigenvalues {
            total += 1;
            let x = na * l;
            if (0.0..4.0).contains(&x) {
                counts[((x / 4.0) * bins as f64) as usize] += 1;
            }
        }
    }
    let total = total.max(1) as f64;
    counts.iter().map(|&c| c as f64 / total).collect()
}

/// Total-variation distance `½ Σ |p_b − q_b|` between binned distributions,
/// including any mass either side leaves outside the bins.
pub fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    let inside: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    let outside = (1.0 - p.iter().sum::<f64>()).abs() + (1.0 - q.iter().sum::<f64>()).abs();
    0.5 * (inside + outside)
}

/// Mean `k`-th largest eigenvalue of a random-state `ρ_A`, `k = 1..=N_A`.
///
/// Solves `φ − sin(2φ)/2 = (k − ½)π/(2N_A)` by bisection on `[0, π/2]`,
/// where the left side is non-decreasing, and returns `(4/N_A) cos²φ`.
pub fn lambda_k_infty(k: u64, na: u64) -> Result<f64> {
    if na == 0 || k == 0 || k > na {
        return Err(Error::invalid(format!("k = {k} out of range 1..={na}")));
    }
    let target = (k as f64 - 0.5) * PI / (2.0 * na as f64);
    let g = |phi: f64| phi - 0.5 * (2.0 * phi).sin();
    let (mut lo, mut hi) = (0.0f64, FRAC_PI_2);
    let mut phi = 0.5 * (lo + hi);
    for _ in 0..200 {
        phi = 0.5 * (lo + hi);
        let r = g(phi) - target;
        if r.abs() < 1e-14 || hi - lo < 1e-16 {
            break;
        }
        if r < 0.0 {
            lo = phi;
        } else {
            hi = phi;
        }
    }
    Ok(4.0 / na as f64 * phi.cos().powi(2))
}

/// `λ_k(∞)` for every `k = 1..=N_A`, descending.
pub fn lambda_infty_profile(na: u64) -> Result<Vec<f64>> {
    (1..=na).map(|k| lambda_k_infty(k, na)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Adaptive Simpson quadrature; the `x^{-1/2}` edge is removed first by
    /// the substitution `x = u²`.
    fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
            let (flm, frm) = (f(lm), f(rm));
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                return left + right + (left + right - whole) / 15.0;
            }
            rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
        let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 60)
    }

    #[test]
    fn stationary_values_small_subsystem() {
        let s = stationary_purities(4).unwrap();
        assert!((s.i2 - 8.0 / 17.0).abs() < 1e-15);
        assert!((s.i3 - 81.0 / 306.0).abs() < 1e-15);
        assert!((s.i4 - 936.0 / 5814.0).abs() < 1e-15);
        assert!(stationary_purities(1).is_err());
    }

    #[test]
    fn stationary_values_match_haar_monte_carlo() {
        // Haar states on 4 qubits (N_A = 4) from normalized complex Gaussians
        use rand::Rng;
        use rand_distr::StandardNormal;
        let mut rng = crate::seed::Seed::new(77, 0).rng();
        let samples = 20_000;
        let mut acc = [0.0f64; 3];
        let mut sq = 0.0;
        for _ in 0..samples {
            let amps: Vec<_> = (0..16)
                .map(|_| crate::linalg::C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let psi = crate::statevec::StateVector::from_amplitudes(amps).unwrap();
            let spec = super::super::spectrum(&psi, 0).unwrap();
            for (slot, p) in acc.iter_mut().zip(2..=4) {
                *slot += super::super::purity_p(&spec, p).unwrap();
            }
            sq += super::super::purity_p(&spec, 2).unwrap().powi(2);
        }
        let m2 = acc[0] / samples as f64;
        let std = (sq / samples as f64 - m2 * m2).sqrt();
        let expected_std = stationary_purity_std(4).unwrap();
        assert!((std - expected_std).abs() / expected_std < 0.03, "{std} vs {expected_std}");
        let s = stationary_purities(4).unwrap();
        for (mean, expected) in acc.iter().map(|a| a / samples as f64).zip([s.i2, s.i3, s.i4]) {
            assert!((mean - expected).abs() / expected < 0.01, "{mean} vs {expected}");
        }
    }

    #[test]
    fn mp_density_values_and_normalization() {
        assert!((mp_density(2.0) - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(mp_density(4.0), 0.0);
        assert_eq!(mp_density(-1.0), 0.0);
        assert_eq!(mp_density(0.0), 0.0);
        let substituted = |u: f64| 2.0 * u * mp_density(u * u);
        let total = adaptive_simpson(&substituted, 0.0, 2.0, 1e-12);
        assert!((total - 1.0).abs() < 1e-8, "{total}");
        for &x in &[0.1f64, 1.0, 2.5, 3.9] {
            let partial = adaptive_simpson(&substituted, 0.0, x.sqrt(), 1e-12);
            assert!((partial - mp_cdf(x)).abs() < 1e-8);
        }
        let bins = mp_bin_probabilities(MP_BINS);
        assert!((bins.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_profile_properties() {
        let p64 = lambda_infty_profile(64).unwrap();
        assert!(p64.windows(2).all(|w| w[0] > w[1]));
        let p256 = lambda_infty_profile(256).unwrap();
        let sum: f64 = p256.iter().sum();
        // frozen from an independent scipy brentq evaluation of the same law
        assert!((sum - (1.0 - 3.926364282480499e-05)).abs() < 1e-9, "{sum}");
        assert!((sum - 1.0).abs() < 1e-4);
        let i2: f64 = p256.iter().map(|l| l * l).sum();
        let i_inf = stationary_purities(256).unwrap().i2;
        assert!((i2 - i_inf).abs() / i_inf < 0.02);
        assert!((p256[0] - 0.015195102162658573).abs() < 1e-12);
        assert!(lambda_k_infty(0, 4).is_err());
        assert!(lambda_k_infty(5, 4).is_err());
    }

    #[test]
    fn histogram_and_distance() {
        let flat = vec![0.25; 4];
        let h = rescaled_histogram([flat.as_slice()], 4);
        // x = 1 lands in bin 1 of [0,1),[1,2),[2,3),[3,4)
        assert_eq!(h, vec![0.0, 1.0, 0.0, 0.0]);
        assert!((total_variation(&h, &h)).abs() < 1e-15);
        assert!((total_variation(&h, &[1.0, 0.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
        let outside = vec![2.5, 0.0];
        let h = rescaled_histogram([outside.as_slice()], 4);
        assert_eq!(h, vec![0.5, 0.0, 0.0, 0.0]);
        assert!((total_variation(&h, &[0.0, 0.0, 0.5, 0.5]) - 1.0).abs() < 1e-15);
    }
}
