//! End-to-end acceptance suite. Each test prints one pass/fail line for its
//! criterion (run with `--nocapture` to see them all).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcone_core::checks::{
    beta_demo_states, builtin_curious_report, coupled_basis, feature_beta_error,
    reorder_identity_error,
};
use qcone_core::collapse::surface_state;
use qcone_core::gadgets::{
    fig1, fig2, fig3, figure_rounds, figure_with_initial, pipi_i2, FIG1_SCN, FIG2_SCN,
};
use qcone_core::hilbert::normalize;
use qcone_core::oracle::{
    compare_orders, compare_prescriptions, enumerate_default, standard_prescriptions,
};
use qcone_core::scenario::OutcomeAssignment;
use qcone_core::spacetime::{boost, causal_relation, side_of_surface};
use qcone_core::{CausalSurface, Event, Scenario, SurfaceSide};

fn report(criterion: &str, pass: bool) {
    println!("acceptance {criterion}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "acceptance {criterion} failed");
}

fn random_ab_states(n: usize, seed: u64) -> Vec<[Complex64; 4]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut amps =
                [(); 4].map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            for a in &mut amps {
                *a /= norm;
            }
            amps
        })
        .collect()
}

#[test]
fn criterion_1_singlet_certification() {
    let rounds = figure_rounds();
    let r1 = &rounds[0];
    let mut worst: f64 = 0.0;
    for (name, amps) in coupled_basis() {
        let s = figure_with_initial(FIG1_SCN, &amps).unwrap();
        let d = enumerate_default(&s).unwrap();
        let p = d.probability_where(|oa| r1.phi_found(oa) == Some(true));
        let expected = if name == "singlet" { 1.0 } else { 0.0 };
        worst = worst.max((p - expected).abs());
    }
    report("1 (round 1 certifies exactly the singlet)", worst < 1e-12);
}

#[test]
fn criterion_2_recertification_is_sure() {
    let mut states = random_ab_states(20, 0x5eed);
    states.extend(beta_demo_states());
    let worst = feature_beta_error(FIG1_SCN, &states)
        .unwrap()
        .max(feature_beta_error(FIG2_SCN, &states).unwrap());
    report("2 (re-certification after success is certain)", worst < 1e-9);
}

#[test]
fn criterion_3_reordered_pipelines_agree() {
    let worst = reorder_identity_error().unwrap();
    report("3 (standard and reordered pipelines agree)", worst < 1e-12);
}

#[test]
fn criterion_4_order_and_prescription_equivalence() {
    let mut worst: f64 = 0.0;
    for s in [fig1().unwrap(), fig2().unwrap(), fig3().unwrap()] {
        worst = worst.max(compare_orders(&s, 50).unwrap());
        worst = worst.max(compare_prescriptions(&s, &standard_prescriptions()).unwrap());
    }
    report("4 (distributions independent of order and prescription)", worst < 1e-12);
}

#[test]
fn criterion_5_curious_attribution() {
    let rep = builtin_curious_report().unwrap();
    let pass = rep.ghirardi_isospin_sq.definite
        && (rep.ghirardi_isospin_sq.eigenvalue.unwrap() - 6.0).abs() < 1e-9
        && !rep.uniform_isospin_sq.definite
        && !rep.type_of_a.definite
        && rep.k_annihilation_residual < 1e-12;
    report("5 (joint-definite, locally-indefinite attribution)", pass);
}

#[test]
fn criterion_6_surface_states() {
    let s = fig3().unwrap();
    let p = s.named_point("P").unwrap();
    let pp = s.named_point("Pp").unwrap();
    let mut oa = OutcomeAssignment::new();
    oa.insert("M".into(), "pi".into());

    let st = surface_state(&s, &CausalSurface::BackwardCone(p), &oa).unwrap();
    let exact_initial = st.state.max_diff(&normalize(&s.initial).unwrap()).unwrap() == 0.0
        && st.weight == s.initial.norm_sq();

    let surf = CausalSurface::union_backward_cones(vec![p, pp]).unwrap();
    let st = surface_state(&s, &surf, &oa).unwrap();
    let labels: Vec<String> = s.space.names().map(String::from).collect();
    let pipi = normalize(&pipi_i2(&labels).unwrap()).unwrap();
    let pair_ok =
        st.state.max_diff(&pipi).unwrap() < 1e-12 && (st.weight - 0.5).abs() < 1e-12;

    report("6 (surface states before and after the union)", exact_initial && pair_ok);
}

#[test]
fn criterion_7_geometry_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca0e);
    let mut pass = true;

    for _ in 0..100 {
        let a = Event::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let b = Event::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let phi = rng.gen_range(-2.0..2.0);
        pass &= causal_relation(a, b) == causal_relation(boost(a, phi), boost(b, phi));
    }

    let p = Event::new(0.25, -0.5);
    let pp = Event::new(0.5, 1.25);
    let union = CausalSurface::union_backward_cones(vec![p, pp]).unwrap();
    for i in 0..21 {
        for j in 0..21 {
            let m = Event::new(-2.5 + 0.25 * i as f64, -2.5 + 0.25 * j as f64);

            // Before η(P) ⇔ M is not in P's causal future and M ≠ P.
            let fwd = side_of_surface(m, &CausalSurface::ForwardCone(p));
            let expect = if m == p {
                SurfaceSide::On
            } else if causal_relation(p, m).is_future() {
                SurfaceSide::After
            } else {
                SurfaceSide::Before
            };
            pass &= fwd == expect;

            // Before σ(P) ⇔ M is in P's causal past; only the vertex is On.
            let bwd = side_of_surface(m, &CausalSurface::BackwardCone(p));
            let expect = if m == p {
                SurfaceSide::On
            } else if causal_relation(p, m).is_past() {
                SurfaceSide::Before
            } else {
                SurfaceSide::After
            };
            pass &= bwd == expect;

            // Before the union ⇔ before either backward cone.
            let either = side_of_surface(m, &CausalSurface::BackwardCone(p))
                == SurfaceSide::Before
                || side_of_surface(m, &CausalSurface::BackwardCone(pp)) == SurfaceSide::Before;
            pass &= (side_of_surface(m, &union) == SurfaceSide::Before) == either;
        }
    }
    report("7 (light-cone geometry suite)", pass);
}

#[test]
fn criterion_8_oracle_self_consistency() {
    let mut pass = true;
    for s in [fig1().unwrap(), fig2().unwrap(), fig3().unwrap()] {
        let d = enumerate_default(&s).unwrap();
        pass &= (d.total() - 1.0).abs() < 1e-9;
        pass &= branch_weights_match(&s, 1e-12);
    }
    report("8 (distributions normalized; branches match surface weights)", pass);
}

fn branch_weights_match(s: &Scenario, tol: f64) -> bool {
    let late = CausalSurface::flat(1e6, 0.0);
    let d = enumerate_default(s).unwrap();
    d.branches.iter().all(|b| {
        let st = surface_state(s, &late, &b.assignment).unwrap();
        (st.weight - b.probability).abs() < tol
    })
}
