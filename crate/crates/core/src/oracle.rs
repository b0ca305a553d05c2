//! Brute-force standard-quantum-theory engine: enumerate every outcome
//! branch of a scenario, compute the joint distribution, and check that it
//! does not depend on the causal-order linearization or on the collapse
//! prescription used to sequence the events.

use std::fmt::Write as _;

use crate::collapse::Prescription;
use crate::error::{Error, Result};
use crate::hilbert::{normalize, StateVector, MIN_NORM};
use crate::scenario::{apply_event, EventKind, OutcomeAssignment, Scenario};
use crate::spacetime::{causal_partial_order, linearizations, Event, PartialOrder};

/// One fully-assigned outcome branch.
#[derive(Debug, Clone)]
pub struct Branch {
    pub assignment: OutcomeAssignment,
    pub probability: f64,
    /// Normalized post-measurement state; the zero vector when the branch is
    /// impossible.
    pub state: StateVector,
}

/// Joint distribution over all measurement outcomes, sorted by assignment.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    pub branches: Vec<Branch>,
}

impl OutcomeDistribution {
    pub fn total(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Summed probability of the branches satisfying `pred`.
    pub fn probability_where(&self, pred: impl Fn(&OutcomeAssignment) -> bool) -> f64 {
        self.branches
            .iter()
            .filter(|b| pred(&b.assignment))
            .map(|b| b.probability)
            .sum()
    }

    /// Largest absolute probability difference on matching assignments.
    pub fn max_discrepancy(&self, other: &OutcomeDistribution) -> Result<f64> {
        if self.branches.len() != other.branches.len() {
            return Err(Error::Query("distributions have different branch sets".into()));
        }
        let mut worst: f64 = 0.0;
        for (a, b) in self.branches.iter().zip(&other.branches) {
            if a.assignment != b.assignment {
                return Err(Error::Query("distributions have different branch sets".into()));
            }
            worst = worst.max((a.probability - b.probability).abs());
        }
        Ok(worst)
    }

    /// CSV: one column per measurement event id (sorted), then probability
    /// with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut ids: Vec<&str> = self
            .branches
            .first()
            .map(|b| b.assignment.keys().map(String::as_str).collect())
            .unwrap_or_default();
        ids.sort_unstable();
        let mut out = String::new();
        let _ = writeln!(out, "{},probability", ids.join(","));
        for b in &self.branches {
            for id in &ids {
                let _ = write!(out, "{},", b.assignment[*id]);
            }
            let _ = writeln!(out, "{:.16e}", b.probability);
        }
        out
    }
}

/// The causal partial order over a scenario's events.
pub fn event_order(s: &Scenario) -> Result<PartialOrder> {
    let coords: Vec<Event> = s.events.iter().map(|e| e.at).collect();
    causal_partial_order(&coords)
}

/// A deterministic default linearization (smallest event index first).
pub fn default_linearization(s: &Scenario) -> Result<Vec<usize>> {
    event_order(s)?.min_linearization()
}

/// Depth-first enumeration of all outcome branches, applying events in the
/// given linearization of the causal partial order.
pub fn enumerate(s: &Scenario, lin: &[usize]) -> Result<OutcomeDistribution> {
    let order = event_order(s)?;
    if !order.respects(lin) {
        return Err(Error::Query(
            "linearization does not respect the causal partial order".into(),
        ));
    }
    let mut branches = Vec::new();
    let mut assignment = OutcomeAssignment::new();
    dfs(s, lin, 0, &s.initial, &mut assignment, &mut branches)?;
    branches.sort_by(|a, b| a.assignment.cmp(&b.assignment));
    Ok(OutcomeDistribution { branches })
}

fn dfs(
    s: &Scenario,
    lin: &[usize],
    depth: usize,
    psi: &StateVector,
    assignment: &mut OutcomeAssignment,
    branches: &mut Vec<Branch>,
) -> Result<()> {
    if depth == lin.len() {
        let probability = psi.norm_sq();
        let state = if probability < MIN_NORM { psi.clone() } else { normalize(psi)? };
        branches.push(Branch {
            assignment: assignment.clone(),
            probability,
            state,
        });
        return Ok(());
    }
    let ev = &s.events[lin[depth]];
    match &ev.kind {
        EventKind::Interaction { .. } => {
            let next = apply_event(ev, assignment, psi)?;
            dfs(s, lin, depth + 1, &next, assignment, branches)
        }
        EventKind::Measurement { outcomes, .. } => {
            for o in outcomes {
                assignment.insert(ev.id.clone(), o.name.clone());
                let next = apply_event(ev, assignment, psi)?;
                dfs(s, lin, depth + 1, &next, assignment, branches)?;
            }
            assignment.remove(&ev.id);
            Ok(())
        }
    }
}

pub fn enumerate_default(s: &Scenario) -> Result<OutcomeDistribution> {
    let lin = default_linearization(s)?;
    enumerate(s, &lin)
}

/// Max probability discrepancy across a deterministic sample of at most
/// `cap` linearizations.
pub fn compare_orders(s: &Scenario, cap: usize) -> Result<f64> {
    let order = event_order(s)?;
    let lins = linearizations(&order, Some(cap))?;
    let mut worst: f64 = 0.0;
    let mut reference: Option<OutcomeDistribution> = None;
    for lin in &lins {
        let d = enumerate(s, lin)?;
        if let Some(r) = &reference {
            worst = worst.max(r.max_discrepancy(&d)?);
        } else {
            reference = Some(d);
        }
    }
    Ok(worst)
}

/// Conditional probability P(target | given) over the distribution.
pub fn conditional(
    d: &OutcomeDistribution,
    given: impl Fn(&OutcomeAssignment) -> bool,
    target: impl Fn(&OutcomeAssignment) -> bool,
) -> Result<f64> {
    let denom = d.probability_where(&given);
    if denom < MIN_NORM {
        return Err(Error::Query("conditioning on a zero-probability event".into()));
    }
    let num = d.probability_where(|oa| given(oa) && target(oa));
    Ok(num / denom)
}

/// f64 wrapper ordered by total_cmp so it can serve as a linearization key.
#[derive(Debug, Clone, Copy, PartialEq)]
struct TotalF64(f64);

impl Eq for TotalF64 {}
impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// The linearization a prescription induces: events sorted by the time at
/// which their collapse reaches the scenario's first world-line (the order
/// in which the light cones intersect it), repaired into a valid
/// linearization by Kahn's algorithm.
pub fn prescription_linearization(s: &Scenario, presc: &Prescription) -> Result<Vec<usize>> {
    let wl = s
        .worldlines
        .first()
        .ok_or_else(|| Error::Query("scenario has no world-lines".into()))?;
    let (t0, t1) = (wl.t_start(), wl.t_end());
    let keys: Vec<TotalF64> = s
        .events
        .iter()
        .map(|ev| {
            let lo = crate::collapse::included_at(wl, t0, ev, presc);
            let hi = crate::collapse::included_at(wl, t1, ev, presc);
            TotalF64(match (lo, hi) {
                (true, _) => t0,
                (false, false) => f64::INFINITY,
                (false, true) => {
                    let (mut a, mut b) = (t0, t1);
                    for _ in 0..100 {
                        let mid = 0.5 * (a + b);
                        if crate::collapse::included_at(wl, mid, ev, presc) {
                            b = mid;
                        } else {
                            a = mid;
                        }
                    }
                    0.5 * (a + b)
                }
            })
        })
        .collect();
    event_order(s)?.linearization_by_key(|i| keys[i])
}

/// Max discrepancy between the distributions obtained under each
/// prescription's induced ordering.
pub fn compare_prescriptions(s: &Scenario, prescs: &[Prescription]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let mut reference: Option<OutcomeDistribution> = None;
    for presc in prescs {
        let lin = prescription_linearization(s, presc)?;
        let d = enumerate(s, &lin)?;
        if let Some(r) = &reference {
            worst = worst.max(r.max_discrepancy(&d)?);
        } else {
            reference = Some(d);
        }
    }
    Ok(worst)
}

/// The standard prescription set used by comparison reports.
pub fn standard_prescriptions() -> Vec<Prescription> {
    vec![
        Prescription::Hk,
        Prescription::ForwardCone,
        Prescription::FlatFrame(0.0),
        Prescription::FlatFrame(1.0),
        Prescription::FlatFrame(-1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collapse::surface_state;
    use crate::gadgets::{fig1, fig2, fig3, figure_rounds, figure_with_initial, FIG1_SCN};
    use crate::spacetime::CausalSurface;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn phi_found(round: usize) -> impl Fn(&OutcomeAssignment) -> bool {
        let rounds = figure_rounds();
        move |oa| rounds[round].phi_found(oa) == Some(true)
    }

    #[test]
    fn fig3_distribution() {
        let d = enumerate_default(&fig3().unwrap()).unwrap();
        assert_eq!(d.branches.len(), 2);
        for b in &d.branches {
            assert!((b.probability - 0.5).abs() < 1e-12);
        }
        assert!((d.total() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn no_measurement_scenario_has_single_branch() {
        let text = "\
[subsystem] name=A dim=2
[subsystem] name=B dim=2
[worldline] subsystem=A points=(0,0);(2,0)
[worldline] subsystem=B points=(0,1);(2,1)
[initial] expr=builtin.singlet(A,B) t0=0 rapidity=0
";
        let s = crate::scenario::Scenario::parse(text, &crate::gadgets::Builtins).unwrap();
        let d = enumerate_default(&s).unwrap();
        assert_eq!(d.branches.len(), 1);
        assert!((d.branches[0].probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feature_alpha() {
        let s = fig1().unwrap();
        let d = enumerate_default(&s).unwrap();
        assert!((d.probability_where(phi_found(0)) - 1.0).abs() < 1e-12);

        let triplets: [[Complex64; 4]; 3] = [
            [Complex64::new(1.0, 0.0), 0.0.into(), 0.0.into(), 0.0.into()],
            [
                0.0.into(),
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                0.0.into(),
            ],
            [0.0.into(), 0.0.into(), 0.0.into(), Complex64::new(1.0, 0.0)],
        ];
        for amps in &triplets {
            let s = figure_with_initial(FIG1_SCN, amps).unwrap();
            let d = enumerate_default(&s).unwrap();
            assert!(d.probability_where(phi_found(0)) < 1e-12);
        }
    }

    #[test]
    fn feature_beta_for_random_states_and_angles() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut cases: Vec<[Complex64; 4]> = Vec::new();
        for theta in [0.0_f64, std::f64::consts::PI / 6.0, std::f64::consts::PI / 4.0, 1.0] {
            // cosθ·singlet + sinθ·|1,+1⟩.
            cases.push([
                Complex64::new(theta.sin(), 0.0),
                Complex64::new(theta.cos() * h, 0.0),
                Complex64::new(-theta.cos() * h, 0.0),
                Complex64::new(0.0, 0.0),
            ]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..4 {
            let mut amps = [Complex64::new(0.0, 0.0); 4];
            for a in amps.iter_mut() {
                *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let n: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in amps.iter_mut() {
                *a /= n;
            }
            cases.push(amps);
        }
        for amps in &cases {
            let s = figure_with_initial(FIG1_SCN, amps).unwrap();
            let d = enumerate_default(&s).unwrap();
            if d.probability_where(phi_found(0)) < 1e-12 {
                continue; // no singlet component to certify
            }
            let p = conditional(&d, phi_found(0), phi_found(1)).unwrap();
            assert!((p - 1.0).abs() < 1e-9, "beta violated: {p}");
        }
    }

    #[test]
    fn equal_mix_has_half_certification_probability() {
        // (singlet + |1,0⟩)/√2 = |↑↓⟩.
        let amps = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let s = figure_with_initial(FIG1_SCN, &amps).unwrap();
        let d = enumerate_default(&s).unwrap();
        assert!((d.probability_where(phi_found(0)) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn distributions_sum_to_one() {
        for s in [fig1().unwrap(), fig2().unwrap(), fig3().unwrap()] {
            let d = enumerate_default(&s).unwrap();
            assert!((d.total() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn order_invariance() {
        assert!(compare_orders(&fig3().unwrap(), 10).unwrap() < 1e-12);
        assert!(compare_orders(&fig1().unwrap(), 12).unwrap() < 1e-12);
        // Single-measurement scenario: exactly zero.
        assert_eq!(compare_orders(&fig3().unwrap(), 100).unwrap(), 0.0);
    }

    #[test]
    fn prescription_invariance() {
        for s in [fig2().unwrap(), fig3().unwrap()] {
            assert!(compare_prescriptions(&s, &standard_prescriptions()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn branch_weights_match_flat_surface_states() {
        let s = fig3().unwrap();
        let d = enumerate_default(&s).unwrap();
        for b in &d.branches {
            let st = surface_state(&s, &CausalSurface::flat(10.0, 0.0), &b.assignment).unwrap();
            assert!((st.weight - b.probability).abs() < 1e-12);
            if !st.impossible {
                assert!(st.state.max_diff(&b.state).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn conditional_sanity() {
        let d = enumerate_default(&fig3().unwrap()).unwrap();
        let is_pi = |oa: &OutcomeAssignment| oa.get("M").map(String::as_str) == Some("pi");
        assert!((conditional(&d, is_pi, is_pi).unwrap() - 1.0).abs() < 1e-12);
        assert!(conditional(&d, |_| false, |_| true).is_err());
    }

    #[test]
    fn invalid_linearization_rejected() {
        let s = fig3().unwrap();
        // fig3 has one event; a wrong-length order is invalid.
        assert!(enumerate(&s, &[]).is_err());
    }

    #[test]
    fn csv_is_deterministic_and_well_formed() {
        let d = enumerate_default(&fig3().unwrap()).unwrap();
        let csv = d.to_csv();
        assert_eq!(csv, d.to_csv());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("M,probability"));
        let row = lines.next().unwrap();
        assert!(row.starts_with("K,"));
        let p: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }
}
