//! Summaries of two-phase fits against the bounds of the circuit geometry.

use serde::{Deserialize, Serialize};

use super::output::SeriesTable;
use super::run::RunRecord;
use crate::circuits::{Boundary, CircuitKind};
use crate::error::Result;
use crate::observables::{two_phase_fit, FitOptions, PuritySeries, TwoPhaseFit};

/// Fastest per-period decay factor of `I^{(2)}` allowed by the rank growth
/// of a geometry; `None` where no bound is tabulated.
pub fn max_decay_factor(kind: CircuitKind, boundary: Boundary) -> Option<f64> {
    match (kind, boundary) {
        (CircuitKind::BW, Boundary::OBC) => Some(0.25),
        (CircuitKind::BW, Boundary::PBC) => Some(1.0 / 16.0),
        (CircuitKind::S, Boundary::OBC) => Some(0.5),
        (CircuitKind::S, Boundary::PBC) => Some(0.25),
        (CircuitKind::LayeredAB, _) => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub order: u32,
    pub n: usize,
    pub fit: TwoPhaseFit,
    pub factor_i: f64,
    pub factor_ii: f64,
    /// `I^{(p)}(∞)` for random states.
    pub stationary: f64,
    /// Fastest allowed phase-I factor for this order, if known.
    pub max_factor: Option<f64>,
    /// Excess over `I^{(p)}(∞)` at the last recorded time.
    pub final_excess: f64,
}

impl FitReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = self.order;
        s.push_str(&format!("two-phase fit of I{p}(t) - I{p}(inf), n = {}\n", self.n));
        s.push_str(&format!(
            "  window           t = {} .. {} ({} points)\n",
            self.fit.t_min, self.fit.t_max, self.fit.points
        ));
        s.push_str(&format!("  t_c              {}\n", self.fit.t_c));
        s.push_str(&format!(
            "  phase I          r = {:.6}  exp(-r) = {:.6}\n",
            self.fit.r_i, self.factor_i
        ));
        s.push_str(&format!(
            "  phase II         r = {:.6}  exp(-r) = {:.6}\n",
            self.fit.r_ii, self.factor_ii
        ));
        if self.fit.degenerate {
            s.push_str("  single exponential: no distinct second phase\n");
        }
        match self.max_factor {
            Some(m) => s.push_str(&format!(
                "  fastest allowed  exp(-r) = {m:.6}  (phase I / bound = {:.4})\n",
                self.factor_i / m
            )),
            None => s.push_str("  fastest allowed  not tabulated for this geometry\n"),
        }
        s.push_str(&format!(
            "  I{p}(inf)         {:.6e}  final excess {:.3e}\n",
            self.stationary, self.final_excess
        ));
        s.push_str(&format!("  rss              {:.3e}\n", self.fit.rss));
        s
    }
}

/// Fits `series` and compares with the rank bound of `layout`, if given.
pub fn fit_series(
    series: &PuritySeries,
    n: usize,
    layout: Option<(CircuitKind, Boundary)>,
    options: &FitOptions,
) -> Result<FitReport> {
    let fit = two_phase_fit(series, options)?;
    let (values, stationary) = series.order(options.order).expect("checked by the fit");
    let max_factor = layout
        .and_then(|(k, b)| max_decay_factor(k, b))
        .map(|f| f.powi(options.order as i32 - 1));
    Ok(FitReport {
        order: options.order,
        n,
        factor_i: fit.factor_i(),
        factor_ii: fit.factor_ii(),
        fit,
        stationary,
        max_factor,
        final_excess: values.last().copied().unwrap_or(f64::NAN) - stationary,
    })
}

/// Two-phase fit of a run's purity series.
pub fn fit_report(record: &RunRecord, options: &FitOptions) -> Result<FitReport> {
    let circuit = &record.config.circuit;
    let series = SeriesTable::from(record).purity_series(circuit.n, record.config.ensemble.num_states)?;
    fit_series(&series, circuit.n, Some((circuit.kind, circuit.boundary)), options)
}
