//! Command-line front end: load scenario files, run queries, emit reports.
//!
//! Exit codes: 0 success/pass, 1 usage error, 2 load/validation failure,
//! 3 numerical check failure. All output is deterministic.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qcone_core::attribution::{attribute_joint, attribute_local, AttributionRule, Verdict};
use qcone_core::checks;
use qcone_core::collapse::{surface_state, worldline_trace, Prescription, SurfaceState};
use qcone_core::gadgets::{fig1, fig2, fig3, Builtins, FIG1_SCN, FIG2_SCN};
use qcone_core::hilbert::EIGEN_TOL;
use qcone_core::oracle::{
    compare_orders, compare_prescriptions, enumerate_default, standard_prescriptions,
};
use qcone_core::scenario::{parse_outcomes, parse_surface, BuiltinRegistry, OutcomeAssignment};
use qcone_core::{Error, Result, Scenario};

const PASS_TOL: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "qcone", version, about = "Collapse-surface quantum measurement simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a scenario file against every structural invariant.
    Validate { scenario: String },
    /// Enumerate all outcome branches; print the joint distribution as CSV.
    Simulate {
        scenario: String,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the distribution is independent of the causal-order
    /// linearization and of the collapse prescription.
    Compare {
        scenario: String,
        /// Maximum number of linearizations to sample.
        #[arg(long, default_value_t = 64)]
        cap: usize,
    },
    /// The surface state on an explicit surface.
    State {
        scenario: String,
        /// flat(t0,phi), sigma(P), sigma(P,P2) or eta(P); named or inline points.
        #[arg(long)]
        surface: String,
        /// Outcome assignment, e.g. M:pi,mzL1:0.
        #[arg(long)]
        outcomes: Option<String>,
    },
    /// Per-point states along a world-line under a prescription.
    Trace {
        scenario: String,
        /// Subsystem whose world-line to follow.
        #[arg(long)]
        worldline: String,
        /// hk, forward, or flat(phi).
        #[arg(long, default_value = "hk")]
        prescription: String,
        #[arg(long)]
        outcomes: Option<String>,
    },
    /// Definite/indefinite verdict for an observable at a point or pair.
    Attribute {
        scenario: String,
        /// ghirardi or uniform.
        #[arg(long)]
        rule: String,
        /// Builtin operator name, e.g. builtin.meson_isospin_sq.
        #[arg(long)]
        observable: String,
        /// Comma-separated subsystems the observable acts on.
        #[arg(long)]
        targets: String,
        #[arg(long)]
        point: String,
        /// Second point for a joint attribution.
        #[arg(long)]
        point2: Option<String>,
        #[arg(long)]
        outcomes: Option<String>,
    },
    /// The two-meson attribution report.
    Curious {
        #[arg(default_value = "fig3")]
        scenario: String,
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        pprime: Option<String>,
        #[arg(long)]
        outcomes: Option<String>,
    },
    /// Run the built-in demonstrations ("figs").
    Demo { what: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_scenario(arg: &str) -> Result<Scenario> {
    match arg {
        "fig1" => fig1(),
        "fig2" => fig2(),
        "fig3" => fig3(),
        path => Scenario::load(path, &Builtins),
    }
}

fn parse_oa(s: &Option<String>) -> Result<OutcomeAssignment> {
    match s {
        Some(s) => parse_outcomes(s),
        None => Ok(OutcomeAssignment::new()),
    }
}

fn parse_prescription(s: &str) -> Result<Prescription> {
    match s {
        "hk" => Ok(Prescription::Hk),
        "forward" => Ok(Prescription::ForwardCone),
        _ => {
            let inner = s
                .strip_prefix("flat")
                .map(|r| r.trim_matches(|c| c == '(' || c == ')' || c == ':'))
                .ok_or_else(|| Error::Query(format!("unknown prescription {s}")))?;
            let phi: f64 = inner
                .parse()
                .map_err(|_| Error::Query(format!("bad rapidity in {s}")))?;
            Ok(Prescription::FlatFrame(phi))
        }
    }
}

fn parse_rule(s: &str) -> Result<AttributionRule> {
    match s {
        "ghirardi" => Ok(AttributionRule::GhirardiSplit),
        "uniform" => Ok(AttributionRule::UniformSigmaP),
        _ => Err(Error::Query(format!("unknown rule {s} (want ghirardi or uniform)"))),
    }
}

fn print_surface_state(st: &SurfaceState) {
    println!("surface: {}", st.surface);
    println!("weight: {:.6}", st.weight);
    if st.impossible {
        println!("impossible: the assigned outcomes have zero probability");
        return;
    }
    println!("state:");
    let space = st.state.space();
    let strides = space.strides();
    for (i, a) in st.state.amplitudes().iter().enumerate() {
        if a.norm() <= 1e-9 {
            continue;
        }
        let labels: Vec<String> = space
            .labels()
            .iter()
            .zip(&strides)
            .map(|(l, s)| format!("{}={}", l.name, (i / s) % l.dim))
            .collect();
        println!("  {}: {:.6}{:+.6}i", labels.join(","), a.re, a.im);
    }
}

fn print_verdict(v: &Verdict) {
    println!("surface: {}", v.surface);
    println!("weight: {:.6}", v.weight);
    if v.definite {
        println!("definite: yes");
        println!("eigenvalue: {:.6}", v.eigenvalue.unwrap_or(f64::NAN));
    } else {
        println!("definite: no");
    }
    println!("residual: {:.3e}", v.residual);
}

fn verdict_word(v: &Verdict) -> String {
    if v.definite {
        let lambda = v.eigenvalue.unwrap_or(f64::NAN);
        if (lambda - lambda.round()).abs() < 1e-6 {
            format!("definite ({})", lambda.round() as i64)
        } else {
            format!("definite ({lambda:.6})")
        }
    } else {
        "indefinite".into()
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Validate { scenario } => match load_scenario(&scenario) {
            Ok(_) => {
                println!("valid");
                Ok(0)
            }
            Err(Error::Invalid(violations)) => {
                for v in violations {
                    println!("violation: {v}");
                }
                Ok(2)
            }
            Err(e) => Err(e),
        },
        Cmd::Simulate { scenario, out } => {
            let s = load_scenario(&scenario)?;
            let csv = enumerate_default(&s)?.to_csv();
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Cmd::Compare { scenario, cap } => {
            let s = load_scenario(&scenario)?;
            let lin = compare_orders(&s, cap)?;
            let presc = compare_prescriptions(&s, &standard_prescriptions())?;
            println!("linearization discrepancy: {lin:.3e}");
            println!("prescription discrepancy: {presc:.3e}");
            if lin < PASS_TOL && presc < PASS_TOL {
                println!("PASS");
                Ok(0)
            } else {
                println!("FAIL");
                Ok(3)
            }
        }
        Cmd::State { scenario, surface, outcomes } => {
            let s = load_scenario(&scenario)?;
            let surf = parse_surface(&surface, &s.points)?;
            let oa = parse_oa(&outcomes)?;
            let st = surface_state(&s, &surf, &oa)?;
            print_surface_state(&st);
            Ok(0)
        }
        Cmd::Trace { scenario, worldline, prescription, outcomes } => {
            let s = load_scenario(&scenario)?;
            let wl = s
                .worldline_of(&worldline)
                .ok_or_else(|| Error::Query(format!("unknown subsystem {worldline}")))?;
            let presc = parse_prescription(&prescription)?;
            let oa = parse_oa(&outcomes)?;
            let segments = worldline_trace(&s, wl, &presc, &oa)?;
            println!("worldline: {worldline}  prescription: {presc}");
            for seg in &segments {
                let crossings =
                    if seg.crossings.is_empty() { "-".into() } else { seg.crossings.join(",") };
                println!(
                    "segment [{:.6}, {:.6}): weight={:.6} crossings={}",
                    seg.t_start, seg.t_end, seg.state.weight, crossings
                );
            }
            Ok(0)
        }
        Cmd::Attribute { scenario, rule, observable, targets, point, point2, outcomes } => {
            let s = load_scenario(&scenario)?;
            let rule = parse_rule(&rule)?;
            let targets: Vec<String> = targets.split(',').map(str::trim).map(String::from).collect();
            let op = Builtins.operator(&observable, &targets, &s.space)?;
            let p = qcone_core::scenario::resolve_point(&point, &s.points)?;
            let oa = parse_oa(&outcomes)?;
            println!("rule: {rule}");
            println!("observable: {observable} on {}", targets.join(","));
            let verdict = match point2 {
                Some(p2) => {
                    let p2 = qcone_core::scenario::resolve_point(&p2, &s.points)?;
                    let (v, warn) = attribute_joint(&s, p, p2, &op, &oa, rule, EIGEN_TOL)?;
                    if warn {
                        println!("warning: attribution points are not mutually spacelike");
                    }
                    v
                }
                None => attribute_local(&s, p, &op, &oa, rule, EIGEN_TOL)?,
            };
            print_verdict(&verdict);
            Ok(0)
        }
        Cmd::Curious { scenario, p, pprime, outcomes } => {
            let s = load_scenario(&scenario)?;
            let query = s.queries.iter().find(|q| q.kind == "curious");
            let param = |flag: &Option<String>, key: &str| -> Result<String> {
                flag.clone()
                    .or_else(|| query.and_then(|q| q.params.get(key).cloned()))
                    .ok_or_else(|| Error::Query(format!("missing --{key} (no query default)")))
            };
            let p = qcone_core::scenario::resolve_point(&param(&p, "p")?, &s.points)?;
            let pp = qcone_core::scenario::resolve_point(&param(&pprime, "pprime")?, &s.points)?;
            let oa = parse_outcomes(&param(&outcomes, "outcomes")?)?;
            let rep = qcone_core::attribution::curious_report(&s, p, pp, &oa)?;
            if rep.non_spacelike_warning {
                println!("warning: attribution points are not mutually spacelike");
            }
            println!(
                "I^2 (ghirardi, {}): {}",
                rep.ghirardi_isospin_sq.surface,
                verdict_word(&rep.ghirardi_isospin_sq)
            );
            println!(
                "I^2 (uniform, {}): {}",
                rep.uniform_isospin_sq.surface,
                verdict_word(&rep.uniform_isospin_sq)
            );
            println!("type(A) ({}): {}", rep.type_of_a.surface, verdict_word(&rep.type_of_a));
            println!("K-sector annihilation residual: {:.3e}", rep.k_annihilation_residual);
            Ok(0)
        }
        Cmd::Demo { what } => {
            if what != "figs" {
                return Err(Error::Query(format!("unknown demo {what} (want: figs)")));
            }
            demo_figs()
        }
    }
}

fn demo_figs() -> Result<u8> {
    let mut ok = true;
    let mut check = |label: &str, err: f64, tol: f64| {
        let pass = err < tol;
        ok &= pass;
        println!("{label}: {}", if pass { "PASS" } else { "FAIL" });
    };

    check("feature alpha", checks::feature_alpha_error()?, 1e-12);
    let states = checks::beta_demo_states();
    let beta = checks::feature_beta_error(FIG1_SCN, &states)?
        .max(checks::feature_beta_error(FIG2_SCN, &states)?);
    check("feature beta", beta, 1e-9);
    check("eq3=eq5", checks::reorder_identity_error()?, 1e-12);

    for name in ["fig1", "fig2", "fig3"] {
        let s = load_scenario(name)?;
        let err = compare_orders(&s, 8)?
            .max(compare_prescriptions(&s, &standard_prescriptions())?);
        check(&format!("{name} order/prescription equivalence"), err, PASS_TOL);
    }

    let rep = checks::builtin_curious_report()?;
    println!(
        "curious attribution: I^2 {}, type(A) {}",
        verdict_word(&rep.ghirardi_isospin_sq),
        verdict_word(&rep.type_of_a)
    );
    let curious_ok = rep.ghirardi_isospin_sq.definite
        && !rep.uniform_isospin_sq.definite
        && !rep.type_of_a.definite
        && rep.k_annihilation_residual < 1e-12;
    if !curious_ok {
        ok = false;
    }

    Ok(if ok { 0 } else { 3 })
}
