//! Domain constructions: qubit/isospin algebra, the two-meson space with its
//! isospin operators and projectors, the local parity gadget that measures the
//! total-isospin sector of a qubit pair nonlocally, and the three built-in
//! scenarios.
//!
//! Gadget construction, per round: two fresh probe pairs, each prepared in
//! |Φ⟩ = (|01⟩+|10⟩)/√2. At the left event, a controlled flip from A
//! (computational basis, control on 1) onto zL, then the same conjugated by
//! the Hadamard on A onto xL. At the right event the mirrored flips onto
//! zR, xR with control on 0 (control on |+⟩ for the rotated stage). Each
//! probe qubit is later measured locally; the parities p_z = zL⊕zR and
//! p_x = xL⊕xR are both odd iff the pair was certified as the singlet:
//! the round unitary fixes singlet⊗Φ⊗Φ exactly, each triplet flips exactly
//! one parity to even, and conditioning on (odd, odd) projects the pair onto
//! the singlet. This measures σ_z⊗σ_z and σ_x⊗σ_x without exposing local
//! values.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{
    apply_local, dagger, kron_mat, mat_identity, matmul, LocalOperator, SpaceDescriptor,
    StateVector,
};
use crate::scenario::{BuiltinRegistry, OutcomeAssignment, Scenario};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

// ---------------------------------------------------------------------------
// Qubit pair states (isospin-1/2 coupling)

fn two_qubit(labels: &[String], amps: [f64; 4]) -> Result<StateVector> {
    let space = SpaceDescriptor::new(vec![(labels[0].clone(), 2), (labels[1].clone(), 2)])?;
    StateVector::new(space, amps.iter().map(|&a| r(a)).collect())
}

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// |I=0,I_z=0⟩ = (|↑↓⟩ − |↓↑⟩)/√2.
pub fn singlet(labels: &[String]) -> Result<StateVector> {
    two_qubit(labels, [0.0, SQRT_HALF, -SQRT_HALF, 0.0])
}

/// |I=1,I_z=+1⟩ = |↑↑⟩.
pub fn triplet_p1(labels: &[String]) -> Result<StateVector> {
    two_qubit(labels, [1.0, 0.0, 0.0, 0.0])
}

/// |I=1,I_z=0⟩ = (|↑↓⟩ + |↓↑⟩)/√2.
pub fn triplet_0(labels: &[String]) -> Result<StateVector> {
    two_qubit(labels, [0.0, SQRT_HALF, SQRT_HALF, 0.0])
}

/// |I=1,I_z=−1⟩ = |↓↓⟩.
pub fn triplet_m1(labels: &[String]) -> Result<StateVector> {
    two_qubit(labels, [0.0, 0.0, 0.0, 1.0])
}

/// Probe-pair preparation |Φ⟩ = (|01⟩+|10⟩)/√2; the state the round unitary
/// fixes when the measured pair is the singlet.
pub fn probe_pair(labels: &[String]) -> Result<StateVector> {
    two_qubit(labels, [0.0, SQRT_HALF, SQRT_HALF, 0.0])
}

/// (|00⟩+|11⟩)/√2, provided for user scenarios.
pub fn bell_phi_plus(labels: &[String]) -> Result<StateVector> {
    two_qubit(labels, [SQRT_HALF, 0.0, 0.0, SQRT_HALF])
}

/// I²_tot of two isospin-1/2 systems: eigenvalue 0 on the singlet, 2 on the
/// triplets. Equals 1 + SWAP.
pub fn isospin_sq_pair(targets: Vec<String>) -> Result<LocalOperator> {
    let mut m = mat_identity(4);
    // SWAP
    m[0] += r(1.0);
    m[1 * 4 + 2] += r(1.0);
    m[2 * 4 + 1] += r(1.0);
    m[15] += r(1.0);
    LocalOperator::hermitian(targets, 4, m)
}

// ---------------------------------------------------------------------------
// Gadget unitaries

fn h_gate(target: String) -> LocalOperator {
    LocalOperator::unitary(
        vec![target],
        2,
        vec![r(SQRT_HALF), r(SQRT_HALF), r(SQRT_HALF), r(-SQRT_HALF)],
    )
    .expect("hadamard is unitary")
}

/// Controlled flip on |control,target⟩; fires when the control qubit equals
/// `fire_on`.
fn controlled_flip(targets: Vec<String>, fire_on: usize) -> LocalOperator {
    let mut m = vec![c(0.0, 0.0); 16];
    for ctrl in 0..2 {
        for tgt in 0..2 {
            let row = if ctrl == fire_on { ctrl * 2 + (1 - tgt) } else { ctrl * 2 + tgt };
            m[row * 4 + ctrl * 2 + tgt] = r(1.0);
        }
    }
    LocalOperator::unitary(targets, 4, m).expect("permutation matrix is unitary")
}

/// Dense matrix of `ops[k-1] ∘ … ∘ ops[0]` on `space` (ops[0] applied first),
/// computed column-by-column through apply_local.
pub fn compose_on_space(space: &SpaceDescriptor, ops: &[LocalOperator]) -> Result<Vec<Complex64>> {
    let d = space.total_dim();
    let mut m = vec![c(0.0, 0.0); d * d];
    for col in 0..d {
        let mut v = StateVector::basis_state(space.clone(), col)?;
        for op in ops {
            v = apply_local(op, &v)?;
        }
        for row in 0..d {
            m[row * d + col] = v.amplitudes()[row];
        }
    }
    Ok(m)
}

fn gadget_side_matrix(fire_on: usize) -> Result<Vec<Complex64>> {
    let space = SpaceDescriptor::new(vec![("c", 2), ("z", 2), ("x", 2)])?;
    let cz = controlled_flip(vec!["c".into(), "z".into()], fire_on);
    let cx = controlled_flip(vec!["c".into(), "x".into()], fire_on);
    let h = h_gate("c".into());
    compose_on_space(&space, &[cz, h.clone(), cx, h])
}

/// Left-side round unitary on (A, zL, xL): computational-basis controlled
/// flip onto zL, Hadamard-rotated controlled flip onto xL (control on 1).
pub fn gadget_left(targets: Vec<String>) -> Result<LocalOperator> {
    LocalOperator::unitary(targets, 8, gadget_side_matrix(1)?)
}

/// Right-side round unitary on (B, zR, xR); mirrored, control on 0.
pub fn gadget_right(targets: Vec<String>) -> Result<LocalOperator> {
    LocalOperator::unitary(targets, 8, gadget_side_matrix(0)?)
}

/// The full round unitary U_L⊗U_R on (A, B, zL, zR, xL, xR).
pub fn gadget_round_unitary(targets: Vec<String>) -> Result<LocalOperator> {
    if targets.len() != 6 {
        return Err(Error::Algebra("gadget round needs 6 targets".into()));
    }
    let names = ["a", "b", "zl", "zr", "xl", "xr"];
    let space = SpaceDescriptor::new(names.iter().map(|n| (n.to_string(), 2)).collect())?;
    let left = gadget_left(vec!["a".into(), "zl".into(), "xl".into()])?;
    let right = gadget_right(vec!["b".into(), "zr".into(), "xr".into()])?;
    let m = compose_on_space(&space, &[left, right])?;
    LocalOperator::unitary(targets, 64, m)
}

/// One gadget round's probe-measurement event ids and the Φ-found predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetRound {
    pub round: usize,
    pub z_left: String,
    pub z_right: String,
    pub x_left: String,
    pub x_right: String,
}

impl GadgetRound {
    /// Φ found ⇔ both parities odd: zL⊕zR = 1 and xL⊕xR = 1.
    pub fn phi_found(&self, oa: &OutcomeAssignment) -> Option<bool> {
        let get = |id: &str| oa.get(id).map(String::as_str);
        Some(
            get(&self.z_left)? != get(&self.z_right)?
                && get(&self.x_left)? != get(&self.x_right)?,
        )
    }
}

/// Probe-measurement bookkeeping for the two rounds of figs. 1–2.
pub fn figure_rounds() -> Vec<GadgetRound> {
    vec![
        GadgetRound {
            round: 1,
            z_left: "mzL1".into(),
            z_right: "mzR1".into(),
            x_left: "mxL1".into(),
            x_right: "mxR1".into(),
        },
        GadgetRound {
            round: 2,
            z_left: "mzL2".into(),
            z_right: "mzR2".into(),
            x_left: "mxL2".into(),
            x_right: "mxR2".into(),
        },
    ]
}

// ---------------------------------------------------------------------------
// Meson space

/// A-side basis: K⁺, K⁰, π⁺, π⁰, π⁻. B-side: K⁻, K̄⁰, π⁺, π⁰, π⁻.
/// Quantum numbers (I, I_z, Y) per index and side.
pub fn meson_quantum_numbers(side_b: bool) -> [(f64, f64, f64); 5] {
    if side_b {
        [
            (0.5, -0.5, -1.0), // K⁻
            (0.5, 0.5, -1.0),  // K̄⁰
            (1.0, 1.0, 0.0),   // π⁺
            (1.0, 0.0, 0.0),   // π⁰
            (1.0, -1.0, 0.0),  // π⁻
        ]
    } else {
        [
            (0.5, 0.5, 1.0),   // K⁺
            (0.5, -0.5, 1.0),  // K⁰
            (1.0, 1.0, 0.0),   // π⁺
            (1.0, 0.0, 0.0),   // π⁰
            (1.0, -1.0, 0.0),  // π⁻
        ]
    }
}

fn meson_iz(side_b: bool) -> Vec<Complex64> {
    let mut m = vec![c(0.0, 0.0); 25];
    for (i, &(_, iz, _)) in meson_quantum_numbers(side_b).iter().enumerate() {
        m[i * 5 + i] = r(iz);
    }
    m
}

fn meson_isq_single(side_b: bool) -> Vec<Complex64> {
    let mut m = vec![c(0.0, 0.0); 25];
    for (i, &(isp, _, _)) in meson_quantum_numbers(side_b).iter().enumerate() {
        m[i * 5 + i] = r(isp * (isp + 1.0));
    }
    m
}

/// Raising operator I₊ within each fixed-I multiplet of the basis.
fn meson_iplus(side_b: bool) -> Vec<Complex64> {
    let qn = meson_quantum_numbers(side_b);
    let mut m = vec![c(0.0, 0.0); 25];
    for (col, &(isp, iz, y)) in qn.iter().enumerate() {
        for (row, &(isp2, iz2, y2)) in qn.iter().enumerate() {
            if isp2 == isp && y2 == y && (iz2 - (iz + 1.0)).abs() < 1e-12 {
                m[row * 5 + col] = r((isp * (isp + 1.0) - iz * (iz + 1.0)).sqrt());
            }
        }
    }
    m
}

/// I²_tot on the 5⊗5 two-meson space:
/// I_A² + I_B² + 2 I_Az I_Bz + I_A₊ I_B₋ + I_A₋ I_B₊.
pub fn meson_isospin_sq(targets: Vec<String>) -> Result<LocalOperator> {
    let id5 = mat_identity(5);
    let ipa = meson_iplus(false);
    let ipb = meson_iplus(true);
    let ima = dagger(&ipa, 5);
    let imb = dagger(&ipb, 5);
    let mut m = kron_mat(&meson_isq_single(false), 5, &id5, 5);
    let terms = [
        kron_mat(&id5, 5, &meson_isq_single(true), 5),
        kron_mat(&meson_iz(false), 5, &meson_iz(true), 5)
            .iter()
            .map(|v| v * 2.0)
            .collect(),
        kron_mat(&ipa, 5, &imb, 5),
        kron_mat(&ima, 5, &ipb, 5),
    ];
    for t in &terms {
        for (a, b) in m.iter_mut().zip(t) {
            *a += b;
        }
    }
    LocalOperator::hermitian(targets, 25, m)
}

/// Spectrum of I²_tot on the two-meson space: I(I+1) over the coupled sectors.
pub const MESON_ISQ_EIGENVALUES: [f64; 5] = [0.0, 0.75, 2.0, 3.75, 6.0];

/// Eigenprojector Π_{I²=6} (the I=2 multiplet) via the spectral polynomial
/// ∏_{λ≠6} (I² − λ)/(6 − λ).
pub fn i2_eq6_projector(targets: Vec<String>) -> Result<LocalOperator> {
    let isq = meson_isospin_sq(targets.clone())?;
    let mut m = mat_identity(25);
    for &lambda in MESON_ISQ_EIGENVALUES.iter().filter(|&&l| l != 6.0) {
        let mut shifted: Vec<Complex64> = isq.matrix().to_vec();
        for i in 0..25 {
            shifted[i * 25 + i] -= r(lambda);
        }
        m = matmul(&m, &shifted, 25);
        let scale = 1.0 / (6.0 - lambda);
        for v in m.iter_mut() {
            *v *= scale;
        }
    }
    LocalOperator::projector(targets, 25, m)
}

fn diag5(targets: Vec<String>, entries: [f64; 5], projector: bool) -> Result<LocalOperator> {
    let mut m = vec![c(0.0, 0.0); 25];
    for (i, &e) in entries.iter().enumerate() {
        m[i * 5 + i] = r(e);
    }
    if projector {
        LocalOperator::projector(targets, 5, m)
    } else {
        LocalOperator::hermitian(targets, 5, m)
    }
}

/// Projector onto the pion sector of either side's basis.
pub fn pi_projector(targets: Vec<String>) -> Result<LocalOperator> {
    diag5(targets, [0.0, 0.0, 1.0, 1.0, 1.0], true)
}

/// Projector onto the kaon sector (K on side A, K̄ on side B).
pub fn k_sector_projector(targets: Vec<String>) -> Result<LocalOperator> {
    diag5(targets, [1.0, 1.0, 0.0, 0.0, 0.0], true)
}

/// Hypercharge observable: +1 on K, −1 on K̄, 0 on π.
pub fn hypercharge(targets: Vec<String>, side_b: bool) -> Result<LocalOperator> {
    let y = if side_b { -1.0 } else { 1.0 };
    diag5(targets, [y, y, 0.0, 0.0, 0.0], false)
}

fn meson_state(labels: &[String], entries: &[(usize, usize, f64)]) -> Result<StateVector> {
    let space = SpaceDescriptor::new(vec![(labels[0].clone(), 5), (labels[1].clone(), 5)])?;
    let mut amps = vec![c(0.0, 0.0); 25];
    for &(a, b, v) in entries {
        amps[a * 5 + b] = r(v);
    }
    StateVector::new(space, amps)
}

/// |KK̄, I=0⟩ = (|K⁺K⁻⟩ − |K⁰K̄⁰⟩)/√2.
pub fn kkbar_i0(labels: &[String]) -> Result<StateVector> {
    meson_state(labels, &[(0, 0, SQRT_HALF), (1, 1, -SQRT_HALF)])
}

/// |ππ, I=2, I_z=0⟩ = (1/√6)|π⁺π⁻⟩ + √(2/3)|π⁰π⁰⟩ + (1/√6)|π⁻π⁺⟩.
pub fn pipi_i2(labels: &[String]) -> Result<StateVector> {
    let s6 = 1.0 / 6.0_f64.sqrt();
    let s23 = (2.0 / 3.0_f64).sqrt();
    meson_state(labels, &[(2, 4, s6), (3, 3, s23), (4, 2, s6)])
}

/// Initial two-meson state (|KK̄,I=0⟩ + |ππ,I=2,I_z=0⟩)/√2.
pub fn initial_meson_state(labels: &[String]) -> Result<StateVector> {
    let k = kkbar_i0(labels)?;
    let p = pipi_i2(labels)?;
    let amps: Vec<Complex64> = k
        .amplitudes()
        .iter()
        .zip(p.amplitudes())
        .map(|(a, b)| (a + b) * SQRT_HALF)
        .collect();
    StateVector::new(k.space().clone(), amps)
}

// ---------------------------------------------------------------------------
// Builtin registry

fn proj_qubit(targets: Vec<String>, which: usize) -> Result<LocalOperator> {
    let mut m = vec![c(0.0, 0.0); 4];
    m[which * 2 + which] = r(1.0);
    LocalOperator::projector(targets, 2, m)
}

/// Resolves all `builtin.*` names used by scenario files.
#[derive(Debug, Clone, Copy, Default)]
pub struct Builtins;

impl Builtins {
    fn check_targets(n: usize, targets: &[String]) -> Result<()> {
        if targets.len() != n {
            return Err(Error::Query(format!(
                "builtin expects {n} target(s), got {}",
                targets.len()
            )));
        }
        Ok(())
    }
}

impl BuiltinRegistry for Builtins {
    fn state(&self, name: &str, labels: &[String], _space: &SpaceDescriptor) -> Result<StateVector> {
        let pair = |f: fn(&[String]) -> Result<StateVector>| {
            Self::check_targets(2, labels)?;
            f(labels)
        };
        match name {
            "builtin.singlet" => pair(singlet),
            "builtin.triplet_p1" => pair(triplet_p1),
            "builtin.triplet_0" => pair(triplet_0),
            "builtin.triplet_m1" => pair(triplet_m1),
            "builtin.probe_pair" => pair(probe_pair),
            "builtin.bell_phi_plus" => pair(bell_phi_plus),
            "builtin.kkbar_i0" => pair(kkbar_i0),
            "builtin.pipi_i2" => pair(pipi_i2),
            "builtin.eq6_initial" => pair(initial_meson_state),
            other => Err(Error::Query(format!("unknown builtin state {other}"))),
        }
    }

    fn operator(
        &self,
        name: &str,
        targets: &[String],
        space: &SpaceDescriptor,
    ) -> Result<LocalOperator> {
        let t = targets.to_vec();
        match name {
            "builtin.proj0" | "builtin.proj_up" => {
                Self::check_targets(1, targets)?;
                proj_qubit(t, 0)
            }
            "builtin.proj1" | "builtin.proj_down" => {
                Self::check_targets(1, targets)?;
                proj_qubit(t, 1)
            }
            "builtin.gadget_left_z_x" => {
                Self::check_targets(3, targets)?;
                gadget_left(t)
            }
            "builtin.gadget_right_z_x" => {
                Self::check_targets(3, targets)?;
                gadget_right(t)
            }
            "builtin.gadget_round1" | "builtin.gadget_round2" => gadget_round_unitary(t),
            "builtin.isospin_sq_pair" => {
                Self::check_targets(2, targets)?;
                isospin_sq_pair(t)
            }
            "builtin.meson_isospin_sq" => {
                Self::check_targets(2, targets)?;
                meson_isospin_sq(t)
            }
            "builtin.i2_eq6_projector" => {
                Self::check_targets(2, targets)?;
                i2_eq6_projector(t)
            }
            "builtin.pi_projector" => {
                Self::check_targets(1, targets)?;
                pi_projector(t)
            }
            "builtin.kbar_projector" | "builtin.k_projector" => {
                Self::check_targets(1, targets)?;
                k_sector_projector(t)
            }
            "builtin.hypercharge_A" => {
                Self::check_targets(1, targets)?;
                hypercharge(t, false)
            }
            "builtin.hypercharge_B" => {
                Self::check_targets(1, targets)?;
                hypercharge(t, true)
            }
            "builtin.identity" => {
                Self::check_targets(1, targets)?;
                let d = space.dim_of(&targets[0])?;
                Ok(LocalOperator::identity(t, d))
            }
            other => Err(Error::Query(format!("unknown builtin operator {other}"))),
        }
    }

    fn measurement_family(
        &self,
        name: &str,
        targets: &[String],
        _space: &SpaceDescriptor,
    ) -> Result<Vec<(String, LocalOperator)>> {
        let t = targets.to_vec();
        match name {
            "builtin.qubit_meas" => {
                Self::check_targets(1, targets)?;
                Ok(vec![
                    ("0".into(), proj_qubit(t.clone(), 0)?),
                    ("1".into(), proj_qubit(t, 1)?),
                ])
            }
            "builtin.iz_A_measurement" => {
                Self::check_targets(1, targets)?;
                Ok(vec![
                    ("up".into(), proj_qubit(t.clone(), 0)?),
                    ("down".into(), proj_qubit(t, 1)?),
                ])
            }
            "builtin.hypercharge_B_measurement" => {
                Self::check_targets(1, targets)?;
                Ok(vec![
                    ("pi".into(), pi_projector(t.clone())?),
                    ("K".into(), k_sector_projector(t)?),
                ])
            }
            other => Err(Error::Query(format!("unknown builtin measurement {other}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// Built-in scenarios

/// Two isospin-1/2 particles from a common source; two gadget rounds, plus an
/// I_z measurement of A at M, spacelike from both right-side interactions.
pub const FIG1_SCN: &str = "\
# two-round nonlocal isospin certification; M spacelike from R1 and R2
[subsystem] name=A dim=2
[subsystem] name=B dim=2
[subsystem] name=zL1 dim=2
[subsystem] name=zR1 dim=2
[subsystem] name=xL1 dim=2
[subsystem] name=xR1 dim=2
[subsystem] name=zL2 dim=2
[subsystem] name=zR2 dim=2
[subsystem] name=xL2 dim=2
[subsystem] name=xR2 dim=2
[worldline] subsystem=A points=(0,0);(6,-6)
[worldline] subsystem=B points=(0,0);(6,6)
[worldline] subsystem=zL1 points=(0,-1);(6,-1)
[worldline] subsystem=xL1 points=(0,-1);(6,-1)
[worldline] subsystem=zR1 points=(0,1);(6,1)
[worldline] subsystem=xR1 points=(0,1);(6,1)
[worldline] subsystem=zL2 points=(0,-2);(6,-2)
[worldline] subsystem=xL2 points=(0,-2);(6,-2)
[worldline] subsystem=zR2 points=(0,2);(6,2)
[worldline] subsystem=xR2 points=(0,2);(6,2)
[initial] expr=builtin.singlet(A,B);builtin.probe_pair(zL1,zR1);builtin.probe_pair(xL1,xR1);builtin.probe_pair(zL2,zR2);builtin.probe_pair(xL2,xR2) t0=0 rapidity=0
[event] id=L1 at=(1,-1) kind=interaction targets=A,zL1,xL1 unitary=builtin.gadget_left_z_x
[event] id=R1 at=(1,1) kind=interaction targets=B,zR1,xR1 unitary=builtin.gadget_right_z_x
[event] id=L2 at=(2,-2) kind=interaction targets=A,zL2,xL2 unitary=builtin.gadget_left_z_x
[event] id=R2 at=(2,2) kind=interaction targets=B,zR2,xR2 unitary=builtin.gadget_right_z_x
[event] id=M at=(3,-3) kind=measurement targets=A outcomes=builtin.iz_A_measurement
[event] id=mzL1 at=(4,-1) kind=measurement targets=zL1 outcomes=builtin.qubit_meas
[event] id=mxL1 at=(4.5,-1) kind=measurement targets=xL1 outcomes=builtin.qubit_meas
[event] id=mzR1 at=(4,1) kind=measurement targets=zR1 outcomes=builtin.qubit_meas
[event] id=mxR1 at=(4.5,1) kind=measurement targets=xR1 outcomes=builtin.qubit_meas
[event] id=mzL2 at=(5,-2) kind=measurement targets=zL2 outcomes=builtin.qubit_meas
[event] id=mxL2 at=(5.5,-2) kind=measurement targets=xL2 outcomes=builtin.qubit_meas
[event] id=mzR2 at=(5,2) kind=measurement targets=zR2 outcomes=builtin.qubit_meas
[event] id=mxR2 at=(5.5,2) kind=measurement targets=xR2 outcomes=builtin.qubit_meas
[query] kind=distribution
[query] kind=compare
";

/// Same experiment with the right-side interactions moved unambiguously into
/// the causal future of M.
pub const FIG2_SCN: &str = "\
# two-round nonlocal isospin certification; R1 and R2 in the future of M
[subsystem] name=A dim=2
[subsystem] name=B dim=2
[subsystem] name=zL1 dim=2
[subsystem] name=zR1 dim=2
[subsystem] name=xL1 dim=2
[subsystem] name=xR1 dim=2
[subsystem] name=zL2 dim=2
[subsystem] name=zR2 dim=2
[subsystem] name=xL2 dim=2
[subsystem] name=xR2 dim=2
[worldline] subsystem=A points=(0,0);(6,-6)
[worldline] subsystem=B points=(0,0);(8,1);(12,1)
[worldline] subsystem=zL1 points=(0,-1);(6,-1)
[worldline] subsystem=xL1 points=(0,-1);(6,-1)
[worldline] subsystem=zR1 points=(0,1);(12,1)
[worldline] subsystem=xR1 points=(0,1);(12,1)
[worldline] subsystem=zL2 points=(0,-2);(6,-2)
[worldline] subsystem=xL2 points=(0,-2);(6,-2)
[worldline] subsystem=zR2 points=(0,1);(12,1)
[worldline] subsystem=xR2 points=(0,1);(12,1)
[initial] expr=builtin.singlet(A,B);builtin.probe_pair(zL1,zR1);builtin.probe_pair(xL1,xR1);builtin.probe_pair(zL2,zR2);builtin.probe_pair(xL2,xR2) t0=0 rapidity=0
[event] id=L1 at=(1,-1) kind=interaction targets=A,zL1,xL1 unitary=builtin.gadget_left_z_x
[event] id=R1 at=(8,1) kind=interaction targets=B,zR1,xR1 unitary=builtin.gadget_right_z_x
[event] id=L2 at=(2,-2) kind=interaction targets=A,zL2,xL2 unitary=builtin.gadget_left_z_x
[event] id=R2 at=(9,1) kind=interaction targets=B,zR2,xR2 unitary=builtin.gadget_right_z_x
[event] id=M at=(3,-3) kind=measurement targets=A outcomes=builtin.iz_A_measurement
[event] id=mzL1 at=(4,-1) kind=measurement targets=zL1 outcomes=builtin.qubit_meas
[event] id=mxL1 at=(4.5,-1) kind=measurement targets=xL1 outcomes=builtin.qubit_meas
[event] id=mzR1 at=(10,1) kind=measurement targets=zR1 outcomes=builtin.qubit_meas
[event] id=mxR1 at=(10.5,1) kind=measurement targets=xR1 outcomes=builtin.qubit_meas
[event] id=mzL2 at=(5,-2) kind=measurement targets=zL2 outcomes=builtin.qubit_meas
[event] id=mxL2 at=(5.5,-2) kind=measurement targets=xL2 outcomes=builtin.qubit_meas
[event] id=mzR2 at=(11,1) kind=measurement targets=zR2 outcomes=builtin.qubit_meas
[event] id=mxR2 at=(11.5,1) kind=measurement targets=xR2 outcomes=builtin.qubit_meas
[query] kind=distribution
[query] kind=compare
";

/// Two-meson pair; hypercharge measurement of B at M; attribution query
/// points P (on A, spacelike from M) and Pp (on B, with M in its causal
/// past).
pub const FIG3_SCN: &str = "\
# meson pair with hypercharge measurement and attribution points
[subsystem] name=A dim=5
[subsystem] name=B dim=5
[worldline] subsystem=A points=(0,-0.5);(4,-2.5)
[worldline] subsystem=B points=(0,1);(1,1.5);(4,2.25)
[initial] expr=builtin.eq6_initial(A,B) t0=0 rapidity=0
[event] id=M at=(1,1.5) kind=measurement targets=B outcomes=pi:builtin.pi_projector,K:builtin.kbar_projector
[point] name=P at=(3,-2)
[point] name=Pp at=(3,2)
[query] kind=distribution
[query] kind=curious p=P pprime=Pp outcomes=M:pi
";

pub fn fig1() -> Result<Scenario> {
    Scenario::parse(FIG1_SCN, &Builtins)
}

pub fn fig2() -> Result<Scenario> {
    Scenario::parse(FIG2_SCN, &Builtins)
}

pub fn fig3() -> Result<Scenario> {
    Scenario::parse(FIG3_SCN, &Builtins)
}

/// fig. 1 / fig. 2 with the AB factor replaced by explicit amplitudes
/// (row-major over A⊗B).
pub fn figure_with_initial(template: &str, amps: &[Complex64; 4]) -> Result<Scenario> {
    let list: Vec<String> = amps.iter().map(|&a| crate::scenario::format_complex(a)).collect();
    let replaced = template.replace(
        "builtin.singlet(A,B)",
        &format!("amps(A,B):{}", list.join(",")),
    );
    Scenario::parse(&replaced, &Builtins)
}

pub fn builtin_scenarios() -> Result<BTreeMap<String, Scenario>> {
    let mut m = BTreeMap::new();
    m.insert("fig1".to_string(), fig1()?);
    m.insert("fig2".to_string(), fig2()?);
    m.insert("fig3".to_string(), fig3()?);
    Ok(m)
}
