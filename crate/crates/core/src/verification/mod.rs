//! Seeded property suites over random polytopes.

mod random;
mod suites;

use serde_json::{json, Value};

pub use random::{random_rotation, random_polytope, random_region, random_spec, random_weight, BodyKind, RandomBodySpec, SpecFamily};
pub use suites::{
    gram_rank, run_convergence_suite, DISCREPANCY_FLOOR, LOCALITY_RTOL, SMOOTH_LIMIT_RTOL, run_covariance_suite, run_homogeneity_suite, run_locality_suite, run_edge_total_suite,
    run_planar_basis_suite, run_translation_suite, run_valuation_suite, run_vsign_suite, GramReport,
};

use crate::tensor::SymTensor;

pub const SUITES: [&str; 9] =
    ["covariance", "valuation", "translation", "homogeneity", "locality", "vsign", "edge-total", "planar-basis", "convergence"];

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cases: usize,
    pub rtol: f64,
    /// Absolute bound for the total-value suite, per unit `diam^(r+1)`.
    pub edge_total_tol: f64,
    /// Runs cases one after another.
    pub serial: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0x5eed, cases: 50, rtol: 1e-9, edge_total_tol: 1e-8, serial: false }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub case: usize,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub checks: usize,
    /// Largest scaled violation seen, passing or not.
    pub worst: f64,
    pub failures: Vec<Failure>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn new(name: &str) -> SuiteReport {
        SuiteReport { name: name.into(), cases: 0, checks: 0, worst: 0.0, failures: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Records one comparison with its scaled error and bound.
    pub fn check(&mut self, case: usize, what: impl Into<String>, err: f64, bound: f64) {
        self.checks += 1;
        let ratio = if bound > 0.0 { err / bound } else if err == 0.0 { 0.0 } else { f64::INFINITY };
        if ratio.is_nan() || ratio > self.worst {
            self.worst = if ratio.is_nan() { f64::INFINITY } else { ratio };
        }
        if err.is_nan() || err > bound {
            self.failures.push(Failure { case, check: what.into(), detail: format!("error {err:.3e} > bound {bound:.3e}") });
        }
    }

    pub fn fail(&mut self, case: usize, what: impl Into<String>, detail: impl Into<String>) {
        self.checks += 1;
        self.worst = f64::INFINITY;
        self.failures.push(Failure { case, check: what.into(), detail: detail.into() });
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checks += other.checks;
        self.worst = self.worst.max(other.worst);
        self.failures.extend(other.failures);
        self.notes.extend(other.notes);
    }

    pub fn summary(&self) -> String {
        format!(
            "{:<12} {} cases={} checks={} failures={} worst={:.3e}",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.cases,
            self.checks,
            self.failures.len(),
            self.worst
        )
    }

    pub fn to_json(&self) -> Value {
        let failures: Vec<Value> =
            self.failures.iter().map(|f| json!({"case": f.case, "check": f.check, "detail": f.detail})).collect();
        json!({
            "suite": self.name,
            "passed": self.passed(),
            "cases": self.cases,
            "checks": self.checks,
            "worst": if self.worst.is_finite() { json!(self.worst) } else { json!("inf") },
            "failures": failures,
            "notes": self.notes,
        })
    }
}

/// `max |a - b|` against `rtol * max(1, |a|, |b|)`.
pub fn scaled_error(a: &SymTensor, b: &SymTensor) -> (f64, f64) {
    let scale = 1f64.max(a.max_norm()).max(b.max_norm());
    (a.max_abs_diff(b), scale)
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<SuiteReport> {
    Some(match name {
        "covariance" => run_covariance_suite(cfg),
        "valuation" => run_valuation_suite(cfg),
        "translation" => run_translation_suite(cfg),
        "homogeneity" => run_homogeneity_suite(cfg),
        "locality" => run_locality_suite(cfg),
        "vsign" => run_vsign_suite(cfg),
        "edge-total" => run_edge_total_suite(cfg),
        "planar-basis" => run_planar_basis_suite(cfg),
        "convergence" => run_convergence_suite(cfg),
        _ => return None,
    })
}
