//! Experiment descriptions read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuits::{Boundary, CircuitConfig, CircuitKind};
use crate::error::{Error, Result};
use crate::gates::GateFamily;
use crate::observables::{FitOptions, OtocSpec, MP_BINS};
use crate::seed::Seed;

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

fn default_mp_bins() -> usize {
    MP_BINS
}

fn default_states() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Observables {
    /// `I2` and its ensemble spread `I2_std`.
    #[serde(default)]
    pub purity: bool,
    /// Further purity orders from `{2, 3, 4}`.
    #[serde(default)]
    pub purity_orders: Vec<u32>,
    /// Number of leading eigenvalues to record as `lambda_1..lambda_K`.
    #[serde(default)]
    pub spectrum: Option<usize>,
    /// Numerical rank of the reduced state (maximum over the ensemble).
    #[serde(default)]
    pub rank: bool,
    /// Total-variation distance of the pooled rescaled spectrum from the
    /// Marchenko-Pastur law, column `tv_mp`.
    #[serde(default)]
    pub mp_distance: bool,
    #[serde(default = "default_mp_bins")]
    pub mp_bins: usize,
    #[serde(default)]
    pub otoc: Vec<OtocSpec>,
    #[serde(default)]
    pub fit: Option<FitOptions>,
}

impl Default for Observables {
    fn default() -> Self {
        Self {
            purity: false,
            purity_orders: Vec::new(),
            spectrum: None,
            rank: false,
            mp_distance: false,
            mp_bins: MP_BINS,
            otoc: Vec::new(),
            fit: None,
        }
    }
}

impl Observables {
    /// Purity orders in column order.
    pub fn orders(&self) -> Vec<u32> {
        let mut orders = self.purity_orders.clone();
        if self.purity {
            orders.push(2);
        }
        orders.sort_unstable();
        orders.dedup();
        orders
    }

    /// Whether any requested quantity needs the full eigenvalue spectrum.
    pub fn needs_spectrum(&self) -> bool {
        self.spectrum.is_some()
            || self.rank
            || self.mp_distance
            || self.orders().iter().any(|&p| p != 2)
    }

    pub fn needs_state(&self) -> bool {
        !self.orders().is_empty() || self.needs_spectrum()
    }

    pub fn is_empty(&self) -> bool {
        !self.needs_state() && self.otoc.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ensemble {
    #[serde(default = "default_states")]
    pub num_states: usize,
    #[serde(default)]
    pub master_seed: u64,
}

impl Default for Ensemble {
    fn default() -> Self {
        Self {
            num_states: 1,
            master_seed: 0,
        }
    }
}

impl Ensemble {
    /// Seed of initial state `index`.
    pub fn state_seed(&self, index: usize) -> Seed {
        Seed::new(self.master_seed, 0).stream(index as u64)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::invalid(format!("unknown output format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Limits {
    /// Largest `N_A` for which a dense eigensolve is attempted.
    #[serde(default = "Limits::default_eigensolve_cap")]
    pub eigensolve_cap: usize,
    #[serde(default = "Limits::default_max_qubits")]
    pub max_qubits: usize,
    #[serde(default = "Limits::default_max_qubits_spectrum")]
    pub max_qubits_spectrum: usize,
    #[serde(default = "Limits::default_memory_budget")]
    pub memory_budget_bytes: u64,
}

impl Limits {
    fn default_eigensolve_cap() -> usize {
        4096
    }

    fn default_max_qubits() -> usize {
        24
    }

    fn default_max_qubits_spectrum() -> usize {
        20
    }

    fn default_memory_budget() -> u64 {
        4 << 30
    }
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            eigensolve_cap: Self::default_eigensolve_cap(),
            max_qubits: Self::default_max_qubits(),
            max_qubits_spectrum: Self::default_max_qubits_spectrum(),
            memory_budget_bytes: Self::default_memory_budget(),
        }
    }
}

/// One simulation: a circuit, what to measure up to `t_max`, over which
/// initial states, and where to put the result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    pub circuit: CircuitConfig,
    pub t_max: usize,
    pub observables: Observables,
    #[serde(default)]
    pub ensemble: Ensemble,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub limits: Limits,
}

fn check_schema(version: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported schema_version {version}; this build reads version {SCHEMA_VERSION}"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn new(circuit: CircuitConfig, t_max: usize, observables: Observables) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            circuit,
            t_max,
            observables,
            ensemble: Ensemble::default(),
            output: OutputSpec::default(),
            limits: Limits::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        check_schema(config.schema_version)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 over the canonical JSON form, excluding the output location.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output = OutputSpec::default();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn na(&self) -> usize {
        1 << (self.circuit.n / 2)
    }

    /// Checks everything that does not depend on the machine.
    pub fn validate(&self) -> Result<()> {
        check_schema(self.schema_version)?;
        self.circuit.validate()?;
        let obs = &self.observables;
        if obs.is_empty() {
            return Err(Error::invalid("no observables requested"));
        }
        if self.ensemble.num_states == 0 {
            return Err(Error::invalid("ensemble.num_states must be at least 1"));
        }
        if let Some(p) = obs.purity_orders.iter().find(|p| !(2..=4).contains(*p)) {
            return Err(Error::invalid(format!("purity order {p} not in {{2, 3, 4}}")));
        }
        if let Some(k) = obs.spectrum {
            if k == 0 || k > self.na() {
                return Err(Error::invalid(format!(
                    "spectrum K = {k} must lie in 1..={}",
                    self.na()
                )));
            }
        }
        if obs.mp_distance && obs.mp_bins == 0 {
            return Err(Error::invalid("mp_bins must be positive"));
        }
        for spec in &obs.otoc {
            spec.validate(self.circuit.n)?;
        }
        if let Some(fit) = &obs.fit {
            if !obs.orders().contains(&fit.order) {
                return Err(Error::invalid(format!(
                    "fit needs purity order {} among the observables",
                    fit.order
                )));
            }
        }
        Ok(())
    }

    /// Rough peak memory with `in_flight` trajectories at once.
    pub fn estimated_bytes(&self, in_flight: usize) -> u64 {
        let amp = 16u64;
        let state = (1u64 << self.circuit.n) * amp;
        let obs = &self.observables;
        let mut per_traj = 0u64;
        if obs.needs_state() {
            per_traj += state;
        }
        if !obs.otoc.is_empty() {
            // input, two forward copies and two backward copies
            per_traj = per_traj.max(5 * state);
        }
        let na = self.na() as u64;
        if obs.needs_spectrum() {
            per_traj += 4 * na * na * amp;
        } else if obs.needs_state() {
            per_traj += na * na * amp;
        }
        per_traj * in_flight.max(1) as u64
    }

    /// Refuses runs beyond the desk-scale limits or the memory budget.
    pub fn check_resources(&self, threads: usize) -> Result<()> {
        let n = self.circuit.n;
        let limits = &self.limits;
        if n > limits.max_qubits {
            return Err(Error::Resource(format!(
                "n = {n} exceeds the limit of {} qubits",
                limits.max_qubits
            )));
        }
        if self.observables.needs_spectrum() {
            if n > limits.max_qubits_spectrum {
                return Err(Error::Resource(format!(
                    "spectra requested at n = {n}; limit is {} qubits",
                    limits.max_qubits_spectrum
                )));
            }
            if self.na() > limits.eigensolve_cap {
                return Err(Error::Resource(format!(
                    "eigensolve of size {} exceeds the cap {}",
                    self.na(),
                    limits.eigensolve_cap
                )));
            }
        }
        let in_flight = threads.min(self.ensemble.num_states);
        let need = self.estimated_bytes(in_flight);
        if need > limits.memory_budget_bytes {
            return Err(Error::Resource(format!(
                "estimated {need} bytes with {in_flight} trajectories in flight exceeds the budget of {} bytes",
                limits.memory_budget_bytes
            )));
        }
        Ok(())
    }
}

/// Parameter axes of a sweep; every combination is run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxes {
    #[serde(default)]
    pub kind: Vec<CircuitKind>,
    #[serde(default)]
    pub boundary: Vec<Boundary>,
    #[serde(default)]
    pub family: Vec<GateFamily>,
    #[serde(default)]
    pub n: Vec<usize>,
    #[serde(default)]
    pub a_z: Vec<f64>,
    #[serde(default)]
    pub master_seed: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    /// Directory receiving one output file per combination.
    pub output_dir: PathBuf,
    pub base: ExperimentConfig,
    #[serde(default)]
    pub axes: SweepAxes,
}

fn axis<T: Clone>(values: &[T], base: T) -> Vec<T> {
    if values.is_empty() {
        vec![base]
    } else {
        values.to_vec()
    }
}

impl SweepConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        check_schema(config.schema_version)?;
        check_schema(config.base.schema_version)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// All combinations, in a fixed order, each with its own output path.
    pub fn expand(&self) -> Vec<ExperimentConfig> {
        let base = &self.base;
        let a = &self.axes;
        let mut out = Vec::new();
        for kind in axis(&a.kind, base.circuit.kind) {
            for boundary in axis(&a.boundary, base.circuit.boundary) {
                for family in axis(&a.family, base.circuit.gate.family) {
                    for n in axis(&a.n, base.circuit.n) {
                        for a_z in axis(&a.a_z, base.circuit.gate.a_z) {
                            for seed in axis(&a.master_seed, base.ensemble.master_seed) {
                                let mut c = base.clone();
                                c.circuit.kind = kind;
                                c.circuit.boundary = boundary;
                                c.circuit.gate.family = family;
                                c.circuit.n = n;
                                c.circuit.gate.a_z = a_z;
                                c.ensemble.master_seed = seed;
                                let name = format!(
                                    "{}_{:?}_n{n}_az{a_z}_seed{seed}.{}",
                                    c.circuit.label(),
                                    family,
                                    c.output.format.extension()
                                );
                                c.output.path = Some(self.output_dir.join(name));
                                out.push(c);
                            }
                        }
                    }
                }
            }
        }
        out
    }
}
