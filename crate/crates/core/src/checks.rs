//! Cross-module consistency checks backing `qcone demo figs` and the
//! acceptance suite: the two certification features of the gadget, the
//! reordering identity for a measurement sandwiched between the rounds, and
//! the two-meson attribution report.

use num_complex::Complex64;

use crate::attribution::{curious_report, CuriousReport};
use crate::error::{Error, Result};
use crate::gadgets::{
    fig3, figure_rounds, figure_with_initial, gadget_left, gadget_right, Builtins, FIG1_SCN,
};
use crate::hilbert::{apply_local, kron_state, StateVector};
use crate::oracle::{conditional, enumerate_default};
use crate::scenario::{BuiltinRegistry, OutcomeAssignment, Scenario};

const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// The four coupled-basis AB amplitude vectors, singlet first.
pub fn coupled_basis() -> [(&'static str, [Complex64; 4]); 4] {
    [
        ("singlet", [r(0.0), r(SQRT_HALF), r(-SQRT_HALF), r(0.0)]),
        ("triplet_p1", [r(1.0), r(0.0), r(0.0), r(0.0)]),
        ("triplet_0", [r(0.0), r(SQRT_HALF), r(SQRT_HALF), r(0.0)]),
        ("triplet_m1", [r(0.0), r(0.0), r(0.0), r(1.0)]),
    ]
}

fn round_found(s: &Scenario, round: usize) -> Result<f64> {
    let rounds = figure_rounds();
    let rd = &rounds[round - 1];
    let d = enumerate_default(s)?;
    Ok(d.probability_where(|oa| rd.phi_found(oa) == Some(true)))
}

/// Feature α: singlet in the fig. 1 geometry is certified with probability
/// one by round 1; each triplet with probability zero. Returns the largest
/// deviation over the four inputs.
pub fn feature_alpha_error() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (name, amps) in coupled_basis() {
        let s = figure_with_initial(FIG1_SCN, &amps)?;
        let p = round_found(&s, 1)?;
        let expected = if name == "singlet" { 1.0 } else { 0.0 };
        worst = worst.max((p - expected).abs());
    }
    Ok(worst)
}

/// Feature β: once round 1 certifies, round 2 certifies with probability
/// one. Returns the largest |P(Φ₂ found | Φ₁ found) − 1| over the given AB
/// states in the given figure template (`FIG1_SCN` or `FIG2_SCN`). States
/// orthogonal to the singlet are rejected (conditioning is empty).
pub fn feature_beta_error(template: &str, states: &[[Complex64; 4]]) -> Result<f64> {
    let rounds = figure_rounds();
    let (r1, r2) = (&rounds[0], &rounds[1]);
    let mut worst: f64 = 0.0;
    for amps in states {
        let s = figure_with_initial(template, amps)?;
        let d = enumerate_default(&s)?;
        let p = conditional(
            &d,
            |oa| r1.phi_found(oa) == Some(true),
            |oa| r2.phi_found(oa) == Some(true),
        )?;
        worst = worst.max((p - 1.0).abs());
    }
    Ok(worst)
}

/// A fixed set of AB states with singlet overlap, for deterministic β runs.
pub fn beta_demo_states() -> Vec<[Complex64; 4]> {
    vec![
        [r(0.0), r(1.0), r(0.0), r(0.0)],
        [r(0.5), r(0.5), r(-0.5), r(0.5)],
        [r(0.6), Complex64::new(0.0, 0.48), r(-0.64), r(0.0)],
    ]
}

/// Largest amplitude difference between the standard-order pipeline
/// P_M·U₂·U₁ and the reordered pipeline U_R2·U_R1·P_M·U_L2·U_L1, over the
/// four coupled-basis AB states and both outcomes of the intervening I_z
/// measurement, on |Ψ⟩_AB ⊗ |Φ⟩₁ ⊗ |Φ⟩₂.
pub fn reorder_identity_error() -> Result<f64> {
    let s = figure_with_initial(FIG1_SCN, &coupled_basis()[0].1)?;
    let space = &s.space;

    let l1 = gadget_left(vec!["A".into(), "zL1".into(), "xL1".into()])?;
    let r1 = gadget_right(vec!["B".into(), "zR1".into(), "xR1".into()])?;
    let l2 = gadget_left(vec!["A".into(), "zL2".into(), "xL2".into()])?;
    let r2 = gadget_right(vec!["B".into(), "zR2".into(), "xR2".into()])?;
    let pm = Builtins.measurement_family("builtin.iz_A_measurement", &["A".into()], space)?;

    let probe = |labels: [&str; 2]| {
        crate::gadgets::probe_pair(&[labels[0].to_string(), labels[1].to_string()])
    };
    let probes = [
        probe(["zL1", "zR1"])?,
        probe(["xL1", "xR1"])?,
        probe(["zL2", "zR2"])?,
        probe(["xL2", "xR2"])?,
    ];

    let mut worst: f64 = 0.0;
    for (_, amps) in coupled_basis() {
        let ab_space = crate::hilbert::SpaceDescriptor::new(vec![("A", 2), ("B", 2)])?;
        let ab = StateVector::new(ab_space, amps.to_vec())?;
        let mut factors = vec![ab];
        factors.extend(probes.iter().cloned());
        let psi0 = kron_state(&factors)?;
        if psi0.space() != space {
            return Err(Error::Algebra("pipeline space mismatch".into()));
        }
        for (_, proj) in &pm {
            let run = |ops: &[&crate::hilbert::LocalOperator]| -> Result<StateVector> {
                let mut v = psi0.clone();
                for op in ops {
                    v = apply_local(op, &v)?;
                }
                Ok(v)
            };
            let standard = run(&[&l1, &r1, &l2, &r2, proj])?;
            let reordered = run(&[&l1, &l2, proj, &r1, &r2])?;
            worst = worst.max(standard.max_diff(&reordered)?);
        }
    }
    Ok(worst)
}

/// The built-in two-meson attribution report: fig. 3, outcome π at M,
/// attribution points P and P′.
pub fn builtin_curious_report() -> Result<CuriousReport> {
    let s = fig3()?;
    let p = s.named_point("P")?;
    let pp = s.named_point("Pp")?;
    let mut oa = OutcomeAssignment::new();
    oa.insert("M".into(), "pi".into());
    curious_report(&s, p, pp, &oa)
}
