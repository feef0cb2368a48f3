//! Two-qubit gate families, their canonical (KAK) interaction content, and
//! the dual-unitarity test.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, adjoint, hermitian_eigh, kron, matmul, transpose, unitarity_deviation, Mat2, Mat4, C64,
    I, ONE, PAULI_X, PAULI_Y, PAULI_Z, ZERO,
};
use crate::seed::Seed;

pub const DEFAULT_PHI: f64 = 0.6;
pub const DEFAULT_DUAL_UNITARY_TOL: f64 = 1e-10;
const UNITARY_INPUT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateFamily {
    /// `(V⊗V)·W` with fixed kicks `V = exp(-i(cos φ σx + sin φ σz))`.
    DualUnitaryKicked,
    /// `exp(-iH)` with an XXZ interaction plus uniform fields on both qubits.
    ExpXXZ,
    /// `(V_a⊗V_b)·W` with independent Haar-random kicks.
    RandomKicked,
}

impl std::str::FromStr for GateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "DualUnitaryKicked" => Ok(Self::DualUnitaryKicked),
            "ExpXXZ" => Ok(Self::ExpXXZ),
            "RandomKicked" => Ok(Self::RandomKicked),
            other => Err(Error::invalid(format!("unknown gate family {other:?}"))),
        }
    }
}

fn default_phi() -> f64 {
    DEFAULT_PHI
}

fn default_scale() -> f64 {
    1.0
}

fn default_true() -> bool {
    true
}

/// Recipe for the two-qubit gate of a circuit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSpec {
    pub family: GateFamily,
    pub a_z: f64,
    #[serde(default = "default_phi")]
    pub phi: f64,
    /// Transverse field; defaults to `cos φ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_x: Option<f64>,
    /// Longitudinal field; defaults to `sin φ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_z: Option<f64>,
    /// Multiplier on the two-body prefactor `π/4`.
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub kick_seed: Seed,
    /// Redraw random kicks at every time step (otherwise once per gate slot).
    #[serde(default = "default_true")]
    pub fresh_kicks: bool,
}

impl GateSpec {
    pub fn new(family: GateFamily, a_z: f64) -> Self {
        Self {
            family,
            a_z,
            phi: DEFAULT_PHI,
            h_x: None,
            h_z: None,
            scale: 1.0,
            kick_seed: Seed::default(),
            fresh_kicks: true,
        }
    }

    pub fn dual_unitary(a_z: f64) -> Self {
        Self::new(GateFamily::DualUnitaryKicked, a_z)
    }

    pub fn exp_xxz(a_z: f64) -> Self {
        Self::new(GateFamily::ExpXXZ, a_z)
    }

    pub fn h_x(&self) -> f64 {
        self.h_x.unwrap_or_else(|| self.phi.cos())
    }

    pub fn h_z(&self) -> f64 {
        self.h_z.unwrap_or_else(|| self.phi.sin())
    }

    pub fn is_random(&self) -> bool {
        self.family == GateFamily::RandomKicked
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.a_z, self.phi, self.scale, self.h_x(), self.h_z()]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("gate parameters must be finite"));
        }
        if !(0.0..=1.0).contains(&self.a_z) {
            return Err(Error::invalid(format!("a_z must lie in [0, 1], got {}", self.a_z)));
        }
        if self.family != GateFamily::ExpXXZ && (self.h_x.is_some() || self.h_z.is_some()) {
            return Err(Error::invalid("h_x / h_z only apply to the ExpXXZ family"));
        }
        Ok(())
    }

    /// The fixed gate of a deterministic family.
    pub fn build(&self) -> Result<TwoQubitGate> {
        match self.family {
            GateFamily::DualUnitaryKicked => build_dual_unitary_kicked(self),
            GateFamily::ExpXXZ => build_exp_xxz(self),
            GateFamily::RandomKicked => Err(Error::invalid(
                "RandomKicked gates are drawn per application; use a KickSampler",
            )),
        }
    }
}

/// A 4×4 unitary in the basis `|00⟩, |01⟩, |10⟩, |11⟩` (first ket = first qubit).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitGate(pub Mat4);

impl TwoQubitGate {
    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(adjoint(&self.0))
    }

    pub fn unitarity_deviation(&self) -> f64 {
        unitarity_deviation(&self.0)
    }

    pub fn identity() -> Self {
        Self(linalg::identity())
    }

    /// `(a⊗b)·self·(c⊗d)`.
    pub fn dressed(&self, a: &Mat2, b: &Mat2, c: &Mat2, d: &Mat2) -> Self {
        Self(matmul(&matmul(&kron(a, b), &self.0), &kron(c, d)))
    }

    /// Same gate with the roles of its two qubits exchanged.
    pub fn swapped(&self) -> Self {
        let p = [0, 2, 1, 3];
        Self(std::array::from_fn(|i| std::array::from_fn(|j| self.0[p[i]][p[j]])))
    }
}

/// `exp(-i·scale·(π/4)(XX + YY + a_z ZZ))` in closed form.
///
/// `|00⟩` and `|11⟩` only pick up a phase; `|01⟩, |10⟩` mix through the
/// exchange term, whose generator restricted there is `2σx`.
pub fn build_w(a_z: f64, scale: f64) -> TwoQubitGate {
    let theta = scale * FRAC_PI_4;
    let outer = C64::from_polar(1.0, -theta * a_z);
    let inner = C64::from_polar(1.0, theta * a_z);
    let (c, s) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let diag = inner * c;
    let off = inner * C64::new(0.0, -s);
    TwoQubitGate([
        [outer, ZERO, ZERO, ZERO],
        [ZERO, diag, off, ZERO],
        [ZERO, off, diag, ZERO],
        [ZERO, ZERO, ZERO, outer],
    ])
}

/// `exp(-i(cos φ σx + sin φ σz)) = cos 1 − i sin 1 (cos φ σx + sin φ σz)`.
pub fn build_v(phi: f64) -> Mat2 {
    let (c1, s1) = (1.0f64.cos(), 1.0f64.sin());
    let (cx, cz) = (phi.cos(), phi.sin());
    let m = C64::new(0.0, -s1);
    [
        [C64::new(c1, 0.0) + m * cz, m * cx],
        [m * cx, C64::new(c1, 0.0) - m * cz],
    ]
}

pub fn build_dual_unitary_kicked(spec: &GateSpec) -> Result<TwoQubitGate> {
    if spec.family != GateFamily::DualUnitaryKicked {
        return Err(Error::invalid(format!(
            "build_dual_unitary_kicked called with family {:?}",
            spec.family
        )));
    }
    let v = build_v(spec.phi);
    let w = build_w(spec.a_z, spec.scale);
    Ok(TwoQubitGate(matmul(&kron(&v, &v), &w.0)))
}

/// Two-qubit Hamiltonian of the exponential XXZ gate, scale included.
pub fn exp_xxz_hamiltonian(spec: &GateSpec) -> Mat4 {
    let id: Mat2 = linalg::identity();
    let c = |x: f64| C64::new(x, 0.0);
    let two_body = linalg::add(
        &linalg::add(&kron(&PAULI_X, &PAULI_X), &kron(&PAULI_Y, &PAULI_Y)),
        &linalg::scale(&kron(&PAULI_Z, &PAULI_Z), c(spec.a_z)),
    );
    let fields = linalg::add(
        &linalg::scale(
            &linalg::add(&kron(&PAULI_X, &id), &kron(&id, &PAULI_X)),
            c(spec.h_x()),
        ),
        &linalg::scale(
            &linalg::add(&kron(&PAULI_Z, &id), &kron(&id, &PAULI_Z)),
            c(spec.h_z()),
        ),
    );
    linalg::add(&linalg::scale(&two_body, c(spec.scale * FRAC_PI_4)), &fields)
}

pub fn build_exp_xxz(spec: &GateSpec) -> Result<TwoQubitGate> {
    if spec.family != GateFamily::ExpXXZ {
        return Err(Error::invalid(format!("build_exp_xxz called with family {:?}", spec.family)));
    }
    let h = exp_xxz_hamiltonian(spec);
    Ok(TwoQubitGate(linalg::hermitian_expi(&h, 1.0)))
}

/// Haar-random element of U(2).
pub fn sample_random_kick(rng: &mut impl Rng) -> Mat2 {
    let (a, b) = loop {
        let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            break (C64::new(g[0], g[1]) / norm, C64::new(g[2], g[3]) / norm);
        }
    };
    let phase = C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
    [[phase * a, -phase * b.conj()], [phase * b, phase * a.conj()]]
}

/// Stream of Haar-kicked gates `(V_a⊗V_b)·W` for the RandomKicked family.
#[derive(Clone, Debug)]
pub struct KickSampler {
    w: TwoQubitGate,
    rng: rand_chacha::ChaCha20Rng,
}

impl KickSampler {
    pub fn new(spec: &GateSpec, seed: Seed) -> Self {
        Self {
            w: build_w(spec.a_z, spec.scale),
            rng: seed.rng(),
        }
    }

    pub fn next_gate(&mut self) -> TwoQubitGate {
        let va = sample_random_kick(&mut self.rng);
        let vb = sample_random_kick(&mut self.rng);
        TwoQubitGate(matmul(&kron(&va, &vb), &self.w.0))
    }
}

/// Canonical interaction content `(a_x, a_y, a_z)`, descending, each in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub a_x: f64,
    pub a_y: f64,
    pub a_z: f64,
}

impl CanonicalParams {
    pub fn as_array(&self) -> [f64; 3] {
        [self.a_x, self.a_y, self.a_z]
    }

    pub fn max_abs_diff(&self, other: &CanonicalParams) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Magic (Bell) basis; local `SU(2)⊗SU(2)` gates are real orthogonal in it.
fn magic_basis() -> Mat4 {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let b = [
        [ONE, I, ZERO, ZERO],
        [ZERO, ZERO, I, ONE],
        [ZERO, ZERO, I, -ONE],
        [ONE, -I, ZERO, ZERO],
    ];
    linalg::scale(&b, h)
}

/// Weyl-chamber coordinates `(c1, c2, c3)` with `π/4 ≥ c1 ≥ c2 ≥ |c3|`,
/// from the spectrum of `mᵀm` where `m` is the gate in the magic basis.
fn weyl_coordinates(u: &Mat4) -> [f64; 3] {
    let det = linalg::det4(u);
    let su = linalg::scale(u, ONE / det.powf(0.25));
    let q = magic_basis();
    let m = matmul(&matmul(&adjoint(&q), &su), &q);
    let mtm = matmul(&transpose(&m), &m);
    let eig = linalg::unitary_eigenvalues(&mtm);

    let mut half: [f64; 4] = std::array::from_fn(|k| -eig[k].arg() / 2.0);
    // det(mᵀm) = 1 fixes the branch of the last half-phase
    half[3] = -(half[0] + half[1] + half[2]);
    let mut cs: [f64; 3] =
        std::array::from_fn(|k| ((half[k] + half[3]) / 2.0).rem_euclid(2.0 * PI));
    let folded: [f64; 3] = std::array::from_fn(|k| {
        let x = cs[k].rem_euclid(FRAC_PI_2);
        x.min(FRAC_PI_2 - x)
    });
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| folded[a].total_cmp(&folded[b]));
    let order = [order[1], order[2], order[0]];
    cs = [cs[order[0]], cs[order[1]], cs[order[2]]];

    let three_halves_pi = 3.0 * FRAC_PI_2;
    if cs[0] > FRAC_PI_2 {
        cs[0] -= three_halves_pi;
    }
    if cs[1] > FRAC_PI_2 {
        cs[1] -= three_halves_pi;
    }
    let mut conjugations = 0;
    if cs[0] > FRAC_PI_4 {
        cs[0] = FRAC_PI_2 - cs[0];
        conjugations += 1;
    }
    if cs[1] > FRAC_PI_4 {
        cs[1] = FRAC_PI_2 - cs[1];
        conjugations += 1;
    }
    if cs[2] > FRAC_PI_2 {
        cs[2] -= three_halves_pi;
    }
    if conjugations == 1 {
        cs[2] = FRAC_PI_2 - cs[2];
    }
    if cs[2] > FRAC_PI_4 {
        cs[2] -= FRAC_PI_2;
    }
    [cs[1], cs[0], cs[2]]
}

/// Canonical parameters of `exp(-i(π/4)(a_x XX + a_y YY + a_z ZZ))` locally
/// equivalent to `gate`, up to the mirror `a_z → −a_z`.
pub fn canonical_params(gate: &TwoQubitGate) -> Result<CanonicalParams> {
    let dev = gate.unitarity_deviation();
    if !(dev <= UNITARY_INPUT_TOL) {
        return Err(Error::invalid(format!("gate is not unitary (‖U†U − 1‖ = {dev:e})")));
    }
    let w = weyl_coordinates(&gate.0);
    let mut a = w.map(|c| (c.abs() / FRAC_PI_4).clamp(0.0, 1.0));
    a.sort_by(|x, y| y.total_cmp(x));
    Ok(CanonicalParams {
        a_x: a[0],
        a_y: a[1],
        a_z: a[2],
    })
}

/// Space-time reshuffle `Ũ_{(i,k),(j,l)} = U_{(i,j),(k,l)}`.
pub fn reshuffle(gate: &TwoQubitGate) -> Mat4 {
    let u = &gate.0;
    let mut out = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[2 * i + k][2 * j + l] = u[2 * i + j][2 * k + l];
                }
            }
        }
    }
    out
}

/// Spectral norm of `Ũ†Ũ − 1`.
pub fn dual_unitarity_deviation(gate: &TwoQubitGate) -> f64 {
    let r = reshuffle(gate);
    let mut g = matmul(&adjoint(&r), &r);
    for (k, row) in g.iter_mut().enumerate() {
        row[k] -= ONE;
    }
    let (vals, _) = hermitian_eigh(&g);
    vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

pub fn is_dual_unitary(gate: &TwoQubitGate, tol: f64) -> bool {
    dual_unitarity_deviation(gate) <= tol
}
