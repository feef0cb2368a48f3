//! Out-of-time-ordered correlators `⟨σ_j^z(t) σ_s^α σ_j^z(t) σ_s^α⟩` by
//! forward and backward statevector evolution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pairwise_sum;
use crate::circuits::{CircuitConfig, Propagator, StepGates};
use crate::error::{Error, Result};
use crate::seed::Seed;
use crate::statevec::{Axis, StateVector};

/// Which correlator to measure: `σ_j^z(t)` against `σ_site^alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OtocSpec {
    pub j: usize,
    pub alpha: Axis,
    #[serde(default = "OtocSpec::default_site")]
    pub site: usize,
}

impl OtocSpec {
    fn default_site() -> usize {
        1
    }

    pub fn new(j: usize, alpha: Axis) -> Self {
        Self { j, alpha, site: 1 }
    }

    pub fn at_site(mut self, site: usize) -> Self {
        self.site = site;
        self
    }

    pub fn column(&self) -> String {
        if self.site == 1 {
            format!("otoc_{}_{}", self.j, self.alpha.label())
        } else {
            format!("otoc_{}_{}_s{}", self.j, self.alpha.label(), self.site)
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for (name, q) in [("j", self.j), ("site", self.site)] {
            if q == 0 || q > n {
                return Err(Error::invalid(format!("OTOC {name} = {q} outside 1..={n}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OtocSeries {
    pub j: usize,
    pub alpha: Axis,
    pub site: usize,
    pub times: Vec<usize>,
    pub values: Vec<f64>,
    pub num_states: usize,
}

/// `σ_j^z(t) φ` with `σ_j^z(t) = U(t)† σ_j^z U(t)`, given `U(t) φ` and the
/// gates of each period so far.
fn heisenberg_z(
    prop: &Propagator,
    forward: &StateVector,
    history: &[StepGates],
    j: usize,
) -> Result<StateVector> {
    let mut s = forward.clone();
    s.apply_pauli(j, Axis::Z)?;
    for gates in history.iter().rev() {
        prop.unapply_gates(&mut s, gates)?;
    }
    Ok(s)
}

/// OTOC values for `t = 0..=t_max` from one initial state.
///
/// `kick_seed` fixes the random kicks of this trajectory; fixed gate
/// families ignore it.
pub fn otoc_single(
    config: &CircuitConfig,
    spec: &OtocSpec,
    psi: &StateVector,
    t_max: usize,
    kick_seed: Seed,
) -> Result<Vec<f64>> {
    config.validate()?;
    spec.validate(config.n)?;
    if psi.num_qubits() != config.n {
        return Err(Error::invalid("initial state size does not match the circuit"));
    }
    let mut prop = Propagator::new(config, kick_seed)?;
    let mut a = psi.clone();
    a.apply_pauli(spec.site, spec.alpha)?;
    let mut b = psi.clone();
    let mut history = Vec::with_capacity(t_max);
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t == 0 {
            // bare Paulis: ±⟨ψ|ψ⟩, written out so rounding in the norm cannot leak in
            let anticommute = spec.j == spec.site && spec.alpha != Axis::Z;
            out.push(if anticommute { -1.0 } else { 1.0 });
            continue;
        }
        let gates = prop.next_gates();
        prop.apply_gates(&mut a, &gates)?;
        prop.apply_gates(&mut b, &gates)?;
        history.push(gates);
        let v = heisenberg_z(&prop, &a, &history, spec.j)?;
        let mut w = heisenberg_z(&prop, &b, &history, spec.j)?;
        // ⟨w|σ^α v⟩ = ⟨σ^α w|v⟩ since Paulis are Hermitian
        w.apply_pauli(spec.site, spec.alpha)?;
        out.push(w.inner(&v)?.re);
    }
    Ok(out)
}

/// Correlator `O_α(j, t)` for `t = 0..=t_max` averaged over `num_states`
/// random product states, perturbing qubit 1.
pub fn otoc(
    config: &CircuitConfig,
    j: usize,
    alpha: Axis,
    t_max: usize,
    num_states: usize,
    seed: Seed,
) -> Result<OtocSeries> {
    otoc_ensemble(config, &OtocSpec::new(j, alpha), t_max, num_states, seed)
}

/// As [`otoc`], for an arbitrary perturbed site.
///
/// State `i` is drawn from `seed.stream(i)`; random kicks from
/// `config.gate.kick_seed.stream(i)`.
pub fn otoc_ensemble(
    config: &CircuitConfig,
    spec: &OtocSpec,
    t_max: usize,
    num_states: usize,
    seed: Seed,
) -> Result<OtocSeries> {
    if num_states == 0 {
        return Err(Error::invalid("num_states must be at least 1"));
    }
    config.validate()?;
    spec.validate(config.n)?;
    let per_state: Vec<Vec<f64>> = (0..num_states as u64)
        .into_par_iter()
        .map(|i| {
            let psi = StateVector::random_product(config.n, seed.stream(i))?;
            otoc_single(config, spec, &psi, t_max, config.gate.kick_seed.stream(i))
        })
        .collect::<Result<_>>()?;
    let values = (0..=t_max)
        .map(|t| {
            let col: Vec<f64> = per_state.iter().map(|v| v[t]).collect();
            pairwise_sum(&col) / num_states as f64
        })
        .collect();
    Ok(OtocSeries {
        j: spec.j,
        alpha: spec.alpha,
        site: spec.site,
        times: (0..=t_max).collect(),
        values,
        num_states,
    })
}
