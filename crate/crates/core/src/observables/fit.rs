//! Local decay rates and the two-phase exponential fit of relaxation series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Purity time series `I^{(p)}(t)` of a run, with the random-state limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuritySeries {
    pub times: Vec<usize>,
    /// Purity orders present, e.g. `[2, 3, 4]`.
    pub orders: Vec<u32>,
    /// `values[i][k]` is order `orders[i]` at `times[k]`.
    pub values: Vec<Vec<f64>>,
    /// Ensemble standard deviation of `I^{(2)}` per time, if averaged.
    pub std: Option<Vec<f64>>,
    pub num_states: usize,
    /// `I^{(p)}(∞)` per entry of `orders`.
    pub stationary: Vec<f64>,
    /// Random-state standard deviation of `I^{(2)}`, if known.
    #[serde(default)]
    pub stationary_std: Option<f64>,
}

impl PuritySeries {
    /// Single-order series, `I^{(2)}` unless told otherwise by `order`.
    pub fn single(times: Vec<usize>, order: u32, values: Vec<f64>, stationary: f64) -> Self {
        Self {
            times,
            orders: vec![order],
            values: vec![values],
            std: None,
            num_states: 1,
            stationary: vec![stationary],
            stationary_std: None,
        }
    }

    pub fn order(&self, p: u32) -> Option<(&[f64], f64)> {
        let i = self.orders.iter().position(|&o| o == p)?;
        Some((&self.values[i], self.stationary[i]))
    }
}

/// Result of fitting `ln(I(t) − I_∞)` with two independent straight lines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPhaseFit {
    /// Last time point of the first phase.
    pub t_c: f64,
    /// Decay rate before and including `t_c` (natural log per period).
    pub r_i: f64,
    /// Decay rate after `t_c`.
    pub r_ii: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub rss: f64,
    pub points: usize,
    /// A single exponential explains the data as well as two phases.
    pub degenerate: bool,
}

impl TwoPhaseFit {
    pub fn factor_i(&self) -> f64 {
        (-self.r_i).exp()
    }

    pub fn factor_ii(&self) -> f64 {
        (-self.r_ii).exp()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOptions {
    /// First time considered; earlier points are an initial transient.
    #[serde(default = "FitOptions::default_t_min")]
    pub t_min: usize,
    /// Last time considered (inclusive).
    #[serde(default)]
    pub t_max: Option<usize>,
    /// Fewest points either phase may have.
    #[serde(default = "FitOptions::default_min_segment")]
    pub min_segment: usize,
    #[serde(default = "FitOptions::default_order")]
    pub order: u32,
    /// Also stop the window where `I^{(2)} − I_∞` drops below this many
    /// random-state standard deviations (divided by `√num_states`).
    /// Zero disables it.
    #[serde(default)]
    pub floor_sigmas: f64,
}

impl FitOptions {
    fn default_t_min() -> usize {
        2
    }

    fn default_min_segment() -> usize {
        3
    }

    fn default_order() -> u32 {
        2
    }
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            t_min: Self::default_t_min(),
            t_max: None,
            min_segment: Self::default_min_segment(),
            order: Self::default_order(),
            floor_sigmas: 0.0,
        }
    }
}

/// Smallest `I(t) − I_∞` treated as signal.
///
/// Ensembles: `max(1e-12, 3σ/√M)`. Single trajectories: `10 ε I(0)`.
pub fn noise_floor(initial: f64, std: Option<f64>, num_states: usize) -> f64 {
    match std {
        Some(s) if num_states > 1 => (3.0 * s / (num_states as f64).sqrt()).max(1e-12),
        _ => 10.0 * f64::EPSILON * initial.abs(),
    }
}

/// `Λ_eff(t) = (y(t+1) − y_∞) / (y(t) − y_∞)` over consecutive times whose
/// excess over `y_inf` is above `floor`.
pub fn effective_rate(
    times: &[usize],
    values: &[f64],
    y_inf: f64,
    floor: f64,
) -> Result<Vec<(usize, f64)>> {
    if times.len() != values.len() {
        return Err(Error::invalid("times and values differ in length"));
    }
    let out: Vec<_> = times
        .windows(2)
        .zip(values.windows(2))
        .filter(|(t, _)| t[1] == t[0] + 1)
        .filter(|(_, y)| y[0] - y_inf > floor && y[1] - y_inf > floor)
        .map(|(t, y)| (t[0], (y[1] - y_inf) / (y[0] - y_inf)))
        .collect();
    if out.is_empty() {
        return Err(Error::Numerical("no usable window for the effective rate".into()));
    }
    Ok(out)
}

/// Least-squares line through `(x, y)`: returns `(slope, intercept, rss)`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    (slope, intercept, rss)
}

/// Two-segment fit of `ln y` against `t` for already-selected positive points.
///
/// Every split leaving at least `min_segment` points on each side is tried;
/// the one with the smallest total squared residual wins. When several splits
/// tie, the latest one is taken, so a point lying on both lines belongs to
/// the first phase.
pub fn two_phase_fit_points(times: &[f64], excess: &[f64], min_segment: usize) -> Result<TwoPhaseFit> {
    let min_segment = min_segment.max(2);
    if times.len() != excess.len() {
        return Err(Error::invalid("times and values differ in length"));
    }
    if times.len() < 2 * min_segment {
        return Err(Error::Numerical(format!(
            "two-phase fit needs at least {} usable points, got {}",
            2 * min_segment,
            times.len()
        )));
    }
    if excess.iter().any(|&y| !(y > 0.0) || !y.is_finite()) {
        return Err(Error::invalid("fit values must be positive and finite"));
    }
    let logs: Vec<f64> = excess.iter().map(|y| y.ln()).collect();
    let (single_slope, _, single_rss) = line_fit(times, &logs);
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let total_ss: f64 = logs.iter().map(|l| (l - mean).powi(2)).sum();

    let candidates: Vec<(usize, f64, f64, f64)> = (min_segment..=times.len() - min_segment)
        .map(|split| {
            let (s1, _, r1) = line_fit(&times[..split], &logs[..split]);
            let (s2, _, r2) = line_fit(&times[split..], &logs[split..]);
            (split, r1 + r2, s1, s2)
        })
        .collect();
    let min_rss = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    // A point on the kink fits both lines; it is counted in phase I.
    let tie = 1e-12 * total_ss + 1e-24;
    let &(split, rss, s1, s2) = candidates
        .iter()
        .rev()
        .find(|c| c.1 <= min_rss + tie)
        .expect("at least one split");
    let t_min = times[0];
    let t_max = *times.last().unwrap();
    // splitting must explain more than round-off to count as two phases
    let degenerate = single_rss - rss <= 1e-20 + 1e-10 * total_ss;
    Ok(if degenerate {
        TwoPhaseFit {
            t_c: t_max,
            r_i: -single_slope,
            r_ii: -single_slope,
            t_min,
            t_max,
            rss: single_rss,
            points: times.len(),
            degenerate,
        }
    } else {
        TwoPhaseFit {
            t_c: times[split - 1],
            r_i: -s1,
            r_ii: -s2,
            t_min,
            t_max,
            rss,
            points: times.len(),
            degenerate,
        }
    })
}

/// Two-phase fit of `I^{(p)}(t) − I^{(p)}(∞)` for the order in `options`.
///
/// Points before `t_min` are skipped; the window ends at `t_max` or at the
/// first point whose excess is below the noise floor, whichever is earlier.
/// With `floor_sigmas > 0` the floor is raised to that many random-state
/// standard deviations.
pub fn two_phase_fit(series: &PuritySeries, options: &FitOptions) -> Result<TwoPhaseFit> {
    let (values, stationary) = series
        .order(options.order)
        .ok_or_else(|| Error::invalid(format!("series has no purity of order {}", options.order)))?;
    if values.len() != series.times.len() {
        return Err(Error::invalid("series times and values differ in length"));
    }
    let initial = values.first().copied().unwrap_or(1.0);
    let fluctuation_floor = match series.stationary_std {
        Some(s) if options.order == 2 && options.floor_sigmas > 0.0 => {
            options.floor_sigmas * s / (series.num_states.max(1) as f64).sqrt()
        }
        _ => 0.0,
    };
    let mut times = Vec::new();
    let mut excess = Vec::new();
    for (k, (&t, &v)) in series.times.iter().zip(values).enumerate() {
        if t < options.t_min {
            continue;
        }
        if options.t_max.is_some_and(|m| t > m) {
            break;
        }
        let std = series.std.as_ref().and_then(|s| s.get(k).copied());
        let y = v - stationary;
        if !(y > noise_floor(initial, std, series.num_states).max(fluctuation_floor)) {
            break;
        }
        times.push(t as f64);
        excess.push(y);
    }
    two_phase_fit_points(&times, &excess, options.min_segment)
}
