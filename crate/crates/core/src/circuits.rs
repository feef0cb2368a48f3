//! Floquet circuit geometry: which pairs one period acts on, in what order,
//! and how ranks of the half-chain reduced state can grow.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{GateSpec, KickSampler, TwoQubitGate};
use crate::seed::Seed;
use crate::statevec::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CircuitKind {
    /// Staircase `(1,2), (2,3), …` in ascending order.
    S,
    /// Brick wall: two alternating layers of disjoint pairs.
    BW,
    /// `layers` brick-wall periods inside each half, joined by one gate.
    LayeredAB,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Boundary {
    OBC,
    PBC,
}

/// Which brick-wall layer comes first within a period.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LayerOrder {
    #[default]
    OddFirst,
    EvenFirst,
}

fn is_default_order(o: &LayerOrder) -> bool {
    *o == LayerOrder::OddFirst
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub kind: CircuitKind,
    pub boundary: Boundary,
    pub n: usize,
    /// Brick-wall periods per half; LayeredAB only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<usize>,
    #[serde(default, skip_serializing_if = "is_default_order")]
    pub layer_order: LayerOrder,
    pub gate: GateSpec,
}

impl CircuitConfig {
    pub fn new(kind: CircuitKind, boundary: Boundary, n: usize, gate: GateSpec) -> Self {
        Self {
            kind,
            boundary,
            n,
            layers: None,
            layer_order: LayerOrder::OddFirst,
            gate,
        }
    }

    pub fn layered(n: usize, layers: usize, gate: GateSpec) -> Self {
        Self {
            layers: Some(layers),
            ..Self::new(CircuitKind::LayeredAB, Boundary::OBC, n, gate)
        }
    }

    pub fn label(&self) -> String {
        let kind = match self.kind {
            CircuitKind::S => "S".to_string(),
            CircuitKind::BW => "BW".to_string(),
            CircuitKind::LayeredAB => format!("LayeredAB{}", self.layers.unwrap_or(0)),
        };
        format!("{kind}-{:?}", self.boundary)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || self.n % 2 != 0 {
            return Err(Error::invalid(format!("n must be even and at least 4, got {}", self.n)));
        }
        if self.n > crate::statevec::MAX_QUBITS {
            return Err(Error::invalid(format!(
                "n = {} exceeds the hard limit of {} qubits",
                self.n,
                crate::statevec::MAX_QUBITS
            )));
        }
        match (self.kind, self.layers) {
            (CircuitKind::LayeredAB, Some(k)) if k >= 1 => {
                if self.boundary != Boundary::OBC {
                    return Err(Error::invalid("LayeredAB circuits are only defined with OBC"));
                }
            }
            (CircuitKind::LayeredAB, _) => {
                return Err(Error::invalid("LayeredAB needs layers >= 1"));
            }
            (_, Some(_)) => {
                return Err(Error::invalid("layers only applies to LayeredAB circuits"));
            }
            _ => {}
        }
        self.gate.validate()
    }
}

/// Ordered qubit pairs of one Floquet period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloquetStep {
    pub pairs: Vec<(usize, usize)>,
    /// Random kicks are redrawn every period.
    pub fresh_kicks: bool,
}

impl FloquetStep {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// One brick-wall period on the open chain `offset+1 ..= offset+len`.
fn brick_wall_block(offset: usize, len: usize, order: LayerOrder) -> Vec<(usize, usize)> {
    let odd: Vec<_> = (1..len).step_by(2).map(|k| (offset + k, offset + k + 1)).collect();
    let even: Vec<_> = (2..len).step_by(2).map(|k| (offset + k, offset + k + 1)).collect();
    match order {
        LayerOrder::OddFirst => odd.into_iter().chain(even).collect(),
        LayerOrder::EvenFirst => even.into_iter().chain(odd).collect(),
    }
}

pub fn build_step(config: &CircuitConfig) -> Result<FloquetStep> {
    config.validate()?;
    let n = config.n;
    let pbc = config.boundary == Boundary::PBC;
    let pairs = match config.kind {
        CircuitKind::S => {
            let mut p: Vec<_> = (1..n).map(|k| (k, k + 1)).collect();
            if pbc {
                p.push((n, 1));
            }
            p
        }
        CircuitKind::BW => {
            let odd: Vec<_> = (1..n).step_by(2).map(|k| (k, k + 1)).collect();
            let mut even: Vec<_> = (2..n).step_by(2).map(|k| (k, k + 1)).collect();
            if pbc {
                even.push((n, 1));
            }
            match config.layer_order {
                LayerOrder::OddFirst => odd.into_iter().chain(even).collect(),
                LayerOrder::EvenFirst => even.into_iter().chain(odd).collect(),
            }
        }
        CircuitKind::LayeredAB => {
            let layers = config.layers.unwrap_or(1);
            let half = n / 2;
            let mut p = Vec::new();
            for _ in 0..layers {
                p.extend(brick_wall_block(0, half, config.layer_order));
            }
            p.push((half, half + 1));
            for _ in 0..layers {
                p.extend(brick_wall_block(half, half, config.layer_order));
            }
            p
        }
    };
    Ok(FloquetStep {
        pairs,
        fresh_kicks: config.gate.fresh_kicks,
    })
}

/// Gates used for one period.
#[allow(clippy::large_enum_variant)] // the uniform case stays off the heap
#[derive(Clone, Debug)]
pub enum StepGates {
    /// The same gate at every position.
    Uniform(TwoQubitGate),
    /// One gate per position of the period.
    PerGate(Vec<TwoQubitGate>),
}

impl StepGates {
    pub fn gate(&self, position: usize) -> &TwoQubitGate {
        match self {
            StepGates::Uniform(g) => g,
            StepGates::PerGate(gs) => &gs[position],
        }
    }
}

#[allow(clippy::large_enum_variant)]
#[derive(Clone, Debug)]
enum GateSource {
    Fixed(TwoQubitGate),
    Fresh(KickSampler),
    Frozen(Vec<TwoQubitGate>),
}

/// Applies Floquet periods to states, drawing random kicks when needed.
#[derive(Clone, Debug)]
pub struct Propagator {
    n: usize,
    step: FloquetStep,
    source: GateSource,
}

impl Propagator {
    /// `kick_seed` drives the RandomKicked family and is ignored otherwise.
    pub fn new(config: &CircuitConfig, kick_seed: Seed) -> Result<Self> {
        let step = build_step(config)?;
        let source = if config.gate.is_random() {
            let mut sampler = KickSampler::new(&config.gate, kick_seed);
            if config.gate.fresh_kicks {
                GateSource::Fresh(sampler)
            } else {
                GateSource::Frozen((0..step.len()).map(|_| sampler.next_gate()).collect())
            }
        } else {
            GateSource::Fixed(config.gate.build()?)
        };
        Ok(Self {
            n: config.n,
            step,
            source,
        })
    }

    pub fn step(&self) -> &FloquetStep {
        &self.step
    }

    /// Gates of the next period; advances the kick stream for fresh kicks.
    pub fn next_gates(&mut self) -> StepGates {
        match &mut self.source {
            GateSource::Fixed(g) => StepGates::Uniform(*g),
            GateSource::Fresh(sampler) => {
                StepGates::PerGate((0..self.step.len()).map(|_| sampler.next_gate()).collect())
            }
            GateSource::Frozen(gs) => StepGates::PerGate(gs.clone()),
        }
    }

    fn check(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.n {
            return Err(Error::invalid(format!(
                "state has {} qubits, circuit expects {}",
                state.num_qubits(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn apply_gates(&self, state: &mut StateVector, gates: &StepGates) -> Result<()> {
        self.check(state)?;
        for (pos, &(q1, q2)) in self.step.pairs.iter().enumerate() {
            state.apply_two_qubit(gates.gate(pos).matrix(), q1, q2)?;
        }
        Ok(())
    }

    /// Undoes [`Propagator::apply_gates`]: adjoint gates in reverse order.
    pub fn unapply_gates(&self, state: &mut StateVector, gates: &StepGates) -> Result<()> {
        self.check(state)?;
        for (pos, &(q1, q2)) in self.step.pairs.iter().enumerate().rev() {
            state.apply_two_qubit(gates.gate(pos).adjoint().matrix(), q1, q2)?;
        }
        Ok(())
    }

    /// Advances `state` by one period and returns the gates used.
    pub fn advance(&mut self, state: &mut StateVector) -> Result<StepGates> {
        let gates = self.next_gates();
        self.apply_gates(state, &gates)?;
        Ok(gates)
    }
}

/// `U(1)^t |ψ⟩`; random kicks come from the gate spec's own `kick_seed`.
pub fn evolve(state: &StateVector, config: &CircuitConfig, t: usize) -> Result<StateVector> {
    let mut prop = Propagator::new(config, config.gate.kick_seed)?;
    prop.check(state)?;
    let mut out = state.clone();
    for _ in 0..t {
        prop.advance(&mut out)?;
    }
    Ok(out)
}

/// Upper bound on the rank of the half-chain reduced state after `t` periods,
/// capped at `2^{n/2}`.
pub fn max_rank(config: &CircuitConfig, t: usize) -> Result<u64> {
    config.validate()?;
    if config.kind == CircuitKind::LayeredAB {
        return Err(Error::invalid("max_rank is not defined for LayeredAB circuits"));
    }
    if config.kind == CircuitKind::BW && config.layer_order != LayerOrder::OddFirst {
        return Err(Error::invalid("max_rank assumes the odd-first brick-wall order"));
    }
    let half = config.n / 2;
    if t == 0 {
        return Ok(1);
    }
    // with odd-first layers the cut gate is in the first layer when n = 4k+2
    let cut_in_first_layer = u64::from(config.n % 4 == 2);
    let t = t as u64;
    let exponent = match (config.kind, config.boundary) {
        (CircuitKind::BW, Boundary::OBC) => 2 * t - cut_in_first_layer,
        (CircuitKind::BW, Boundary::PBC) => 4 * t - cut_in_first_layer,
        (CircuitKind::S, Boundary::OBC) => t,
        (CircuitKind::S, Boundary::PBC) => 2 * t + 1,
        (CircuitKind::LayeredAB, _) => unreachable!(),
    };
    Ok(1u64 << exponent.min(half as u64))
}
