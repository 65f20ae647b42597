use std::fs;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use minktensor::approx::{
    check_assumptions, convergence_experiment, default_bump, find_parameters, ApproxParams, Approximant,
    ConvergenceTable, Experiment,
};
use minktensor::tensor::tensor_to_json;
use minktensor::valuations::{evaluate, FunctionalSpec};
use minktensor::verification::{run_suite, SuiteConfig, SUITES};
use minktensor::Error;
use serde_json::{json, Value};

use crate::{inputs, AssumptionArgs, ComputeArgs, ConvergeArgs, DemoArgs, Emit, VerifyArgs};

/// 2 for bad input, 1 for anything that went wrong while computing.
pub fn error_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    match e.downcast_ref::<Error>() {
        Some(
            Error::Parse(_)
            | Error::InvalidSpec(_)
            | Error::InvalidParams(_)
            | Error::DimensionMismatch { .. }
            | Error::UnsupportedDimension(_)
            | Error::Degenerate { .. }
            | Error::NegativeScale(_)
            | Error::SupportReachesRim { .. },
        ) => 2,
        _ => 1,
    }
}

fn header(command: &str, fields: &[(&str, String)], serial: bool) {
    let mut line = format!("# minktensor {} {command}", env!("CARGO_PKG_VERSION"));
    for (k, v) in fields {
        line.push_str(&format!(" {k}={v}"));
    }
    line.push_str(&format!(" serial={serial}"));
    eprintln!("{line}");
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn compute(a: &ComputeArgs, serial: bool) -> Result<ExitCode> {
    let p = inputs::polytope(&a.input)?;
    let spec = inputs::functional(&a.functional)?;
    let region = inputs::region(&a.region)?;
    let weight = inputs::weight(&a.weight)?;
    header("compute", &[("functional", spec.to_string()), ("weight", a.weight.clone())], serial);
    let t = evaluate(&p, &spec, &region, &weight)?;
    let text = pretty(&tensor_to_json(&t));
    match &a.out {
        Some(path) => {
            write_out(Some(path), &text)?;
            let nonzero = t.coeffs().iter().filter(|c| **c != 0.0).count();
            println!("{spec}: rank {} dim {} nonzero {} max |c| {:.6e}", t.rank(), t.dim(), nonzero, t.max_norm());
        }
        None => write_out(None, &text)?,
    }
    Ok(ExitCode::SUCCESS)
}

pub fn verify(a: &VerifyArgs, serial: bool) -> Result<ExitCode> {
    let names: Vec<&str> = if a.suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&a.suite.as_str()) {
        vec![a.suite.as_str()]
    } else {
        bail!(Error::Parse(format!("unknown suite {:?}; expected all or one of {}", a.suite, SUITES.join(", "))));
    };
    if a.cases == 0 {
        bail!(Error::InvalidParams("--cases must be positive".into()));
    }
    let cfg = SuiteConfig { seed: a.seed, cases: a.cases, rtol: a.rtol, serial, ..SuiteConfig::default() };
    header(
        "verify",
        &[
            ("seed", format!("{:#x}", cfg.seed)),
            ("cases", cfg.cases.to_string()),
            ("rtol", format!("{:e}", cfg.rtol)),
            ("edge_total_tol", format!("{:e}", cfg.edge_total_tol)),
        ],
        serial,
    );
    let mut reports = Vec::new();
    for name in names {
        let rep = run_suite(name, &cfg).expect("known suite");
        println!("{}", rep.summary());
        for f in rep.failures.iter().take(5) {
            println!("  case {}: {}: {}", f.case, f.check, f.detail);
        }
        for n in &rep.notes {
            println!("  {n}");
        }
        reports.push(rep);
    }
    let passed = reports.iter().all(|r| r.passed());
    if let Some(path) = &a.report {
        let doc = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "cases": cfg.cases,
            "rtol": cfg.rtol,
            "edge_total_tol": cfg.edge_total_tol,
            "passed": passed,
            "suites": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        });
        write_out(Some(path), &pretty(&doc))?;
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

pub fn converge(a: &ConvergeArgs, serial: bool) -> Result<ExitCode> {
    let spec = inputs::functional(&a.functional)?;
    let weight = match &a.weight {
        Some(w) => inputs::weight(w)?,
        None => default_bump(a.h)?,
    };
    let mut exp = Experiment::new(spec, a.h, weight);
    exp.n = a.n;
    exp.ts = a.t.clone();
    exp.a = inputs::frame(&a.frame)?;
    exp.trailing = a.trailing;
    exp.angle = a.angle;
    exp.serial = serial;
    header(
        "converge",
        &[
            ("functional", exp.spec.to_string()),
            ("N", a.n.to_string()),
            ("h", a.h.to_string()),
            ("angle", format!("{:.12}", a.angle)),
        ],
        serial,
    );
    let table = convergence_experiment(&exp)?;
    let text = match a.emit {
        Emit::Csv => table.to_csv(),
        Emit::Json => pretty(&table.to_json()),
    };
    write_out(a.out.as_deref(), &text)?;
    if let Some(v) = table.limit_value {
        eprintln!("# extrapolated value {v:.12e}");
    }
    Ok(ExitCode::SUCCESS)
}

fn demo_table(spec: &str, a: &DemoArgs, serial: bool) -> Result<ConvergenceTable> {
    let mut exp = Experiment::new(FunctionalSpec::parse(spec)?, a.h, default_bump(a.h)?);
    exp.n = a.n;
    exp.ts = a.t.clone();
    exp.serial = serial;
    Ok(convergence_experiment(&exp)?)
}

pub fn demo(a: &DemoArgs, serial: bool) -> Result<ExitCode> {
    if a.t.len() < 2 {
        bail!(Error::InvalidParams("need at least two values of t".into()));
    }
    header("demo-noncovariance", &[("N", a.n.to_string()), ("h", a.h.to_string())], serial);
    let bad = demo_table("PhiTilde3(0,0,1)", a, serial)?;
    let good = demo_table("Phi(1,4,0,0)", a, serial)?;
    println!("{:>8} {:>16} {:>16} {:>12}", "t", "D PhiTilde3(0,0,1)", "D Phi(1,4,0,0)", "W1/N");
    for (b, g) in bad.rows.iter().zip(&good.rows) {
        println!("{:>8} {:>16.6e} {:>16.6e} {:>12.6}", b.t, b.discrepancy, g.discrepancy, b.w1 / a.n as f64);
    }
    let persists = bad.min_discrepancy() >= 0.25 * bad.max_discrepancy() && bad.max_discrepancy() > 0.0;
    let (fine, coarse) = good.discrepancy_ends().expect("rows");
    let decays = fine <= 0.25 * coarse || fine <= 1e-12;
    let floor = bad.w1_floor();
    println!("PhiTilde3(0,0,1): |D| stays in [{:.4e}, {:.4e}]", bad.min_discrepancy(), bad.max_discrepancy());
    println!("Phi(1,4,0,0): |D| {coarse:.3e} -> {fine:.3e}");
    println!("min W1/N = {floor:.6}");
    let ok = persists && decays && floor > 0.0;
    println!("{}", if ok { "non-extendable discrepancy confirmed" } else { "expected behaviour not observed" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

pub fn assumptions(a: &AssumptionArgs, serial: bool) -> Result<ExitCode> {
    header(
        "assumptions",
        &[("N", a.n.to_string()), ("h", a.h.to_string()), ("t", a.t.to_string()), ("eps", a.eps.to_string())],
        serial,
    );
    if a.search {
        let search = find_parameters(a.n, a.eps, a.h, a.t, a.max_steps)?;
        for (p, rep) in &search.steps {
            println!(
                "h={:.6} t={:.6} A={} B={} C={}",
                p.h, p.t, rep.a, rep.b, rep.c
            );
        }
        let (p, _) = search.last().expect("at least one step");
        println!("{} h={} t={}", if search.found { "found" } else { "not found" }, p.h, p.t);
        return Ok(if search.found { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }
    let approx = Approximant::build(&ApproxParams::new(a.n, a.h, a.t)?)?;
    let rep = check_assumptions(&approx, &default_bump(a.h)?, a.eps);
    print!("{}", pretty(&rep.to_json()));
    Ok(ExitCode::SUCCESS)
}
