//! Named numerical checks of the representation's identities.
//!
//! Every check compares two independent routes to the same quantity and
//! returns a [`CheckReport`] with the measured error and its tolerance.

mod checks;
pub mod sampling;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::params::{husimi_params, GammaLabel, RepParams};

pub use checks::*;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    /// The identity being checked.
    pub anchor: String,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub details: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckReport {
    pub fn new(name: &str, anchor: &str, max_abs_error: f64, tolerance: f64, cutoff: usize, details: &[(&str, f64)]) -> Self {
        let mut map: BTreeMap<String, f64> = details.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        map.insert("cutoff".into(), cutoff as f64);
        CheckReport {
            name: name.into(),
            anchor: anchor.into(),
            max_abs_error,
            tolerance,
            passed: max_abs_error <= tolerance,
            details: map,
            error: None,
        }
    }

    /// A report for a check that could not be evaluated.
    pub fn errored(name: &str, anchor: &str, tolerance: f64, cutoff: usize, err: &Error) -> Self {
        let mut r = CheckReport::new(name, anchor, f64::NAN, tolerance, cutoff, &[]);
        r.error = Some(err.to_string());
        r
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.get(key).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// Skips the four-dimensional operator integrals.
    Quick,
    Full,
}

/// Settings for [`run_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub params: RepParams,
    pub label: GammaLabel,
    pub tier: Tier,
    pub seed: u64,
    /// Replaces every check's default cutoff.
    pub cutoff: Option<usize>,
    /// Replaces the default order of two-dimensional rules.
    pub order2d: Option<usize>,
    /// Replaces the default order per plane of four-dimensional rules.
    pub order4d: Option<usize>,
    /// Added to every default cutoff.
    pub cutoff_shift: usize,
    /// Multiplies every default quadrature order.
    pub order_scale: f64,
    /// Run only the checks with these names.
    pub only: Option<Vec<String>>,
}

pub const DEFAULT_SEED: u64 = 7;

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            params: husimi_params(2.0).expect("valid"),
            label: GammaLabel::new(num_complex::Complex64::new(0.3, -0.2), num_complex::Complex64::new(-0.4, 0.25)).expect("finite"),
            tier: Tier::Quick,
            seed: DEFAULT_SEED,
            cutoff: None,
            order2d: None,
            order4d: None,
            cutoff_shift: 0,
            order_scale: 1.0,
            only: None,
        }
    }
}

impl VerifyConfig {
    pub fn cutoff(&self, default: usize) -> usize {
        self.cutoff.unwrap_or(default) + self.cutoff_shift
    }

    pub fn order2d(&self, default: usize) -> usize {
        self.scaled(self.order2d.unwrap_or(default))
    }

    pub fn order4d(&self, default: usize) -> usize {
        self.scaled(self.order4d.unwrap_or(default))
    }

    fn scaled(&self, order: usize) -> usize {
        ((order as f64) * self.order_scale).round().max(1.0) as usize
    }

    fn wants(&self, name: &str) -> bool {
        self.only.as_ref().map_or(true, |names| names.iter().any(|n| n == name))
    }
}

/// Names of all checks in run order, cheapest first, with the tier that
/// first includes each.
pub const CHECKS: &[(&str, Tier)] = &[
    ("params", Tier::Quick),
    ("normalization", Tier::Quick),
    ("inner_product", Tier::Quick),
    ("overlaps", Tier::Quick),
    ("ladder", Tier::Quick),
    ("eigen_relations", Tier::Quick),
    ("commutator", Tier::Quick),
    ("uncertainty_closed_form", Tier::Quick),
    ("uncertainty", Tier::Quick),
    ("marginals", Tier::Quick),
    ("factorization", Tier::Quick),
    ("wigner_closed_forms", Tier::Quick),
    ("wigner", Tier::Quick),
    ("projections", Tier::Quick),
    ("squeeze", Tier::Quick),
    ("weyl_symbol", Tier::Quick),
    ("weyl_trace", Tier::Quick),
    ("completeness", Tier::Full),
    ("weyl_smoothing", Tier::Full),
];

/// Runs the checks selected by `config` in the order of [`CHECKS`].
pub fn run_all(config: &VerifyConfig) -> Vec<CheckReport> {
    CHECKS
        .iter()
        .filter(|(name, tier)| config.wants(name) && (config.tier == Tier::Full || *tier == Tier::Quick))
        .flat_map(|(name, _)| run_check(name, config))
        .collect()
}

fn run_check(name: &str, c: &VerifyConfig) -> Vec<CheckReport> {
    let (p, l, seed) = (&c.params, &c.label, c.seed);
    match name {
        "params" => vec![check_params(1000, seed)],
        "normalization" => vec![check_normalization(p, c.cutoff(25), 50, seed)],
        "inner_product" => vec![check_inner_product(p, c.cutoff(25), 50, seed)],
        "overlaps" => vec![check_overlaps(p, c.cutoff(30), 50, seed)],
        "ladder" => vec![check_ladder_relations(p, l, c.cutoff(25))],
        "eigen_relations" => vec![check_eigen_relations_suite(p, l, c.cutoff(20), 1e-4, seed)],
        "commutator" => vec![check_commutator(p, l, c.cutoff(20), seed)],
        "uncertainty_closed_form" => vec![check_uncertainty_closed_form(1000, seed)],
        "uncertainty" => vec![check_uncertainty(p, l, c.cutoff(30), c.order2d(32))],
        "marginals" => vec![check_marginals_suite(p, l, c.cutoff(30), c.order2d(32))],
        "factorization" => vec![check_factorization(&sampling::phase_points(5, seed), c.cutoff(8))],
        "wigner_closed_forms" => vec![check_wigner_closed_forms(p, l, seed)],
        "wigner" => vec![check_wigner(p, l, c.cutoff(25), 5, c.order2d(32))],
        "projections" => vec![check_projections(c.cutoff(10), c.order2d(32), seed)],
        "squeeze" => vec![check_squeeze(&[1.0, 1.5, 2.0], c.cutoff(12), c.order2d(32))],
        "weyl_symbol" => vec![check_weyl_symbol(seed)],
        "weyl_trace" => vec![check_weyl_trace(p, l, c.order4d(20), seed)],
        "completeness" => vec![check_completeness(p, c.cutoff(12), 4, c.order4d(20))],
        "weyl_smoothing" => vec![check_weyl_smoothing(p, l, c.cutoff(10), 8, c.order4d(20))],
        _ => Vec::new(),
    }
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.passed)
}

/// Reports as a pretty-printed JSON array.
pub fn to_json(reports: &[CheckReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

/// Reports as a fixed-width table.
pub fn to_table(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<22} {:<6} {:>12} {:>12}  anchor", "check", "status", "error", "tolerance");
    for r in reports {
        let status = if r.passed { "pass" } else { "FAIL" };
        let _ = writeln!(out, "{:<22} {:<6} {:>12.3e} {:>12.3e}  {}", r.name, status, r.max_abs_error, r.tolerance, r.anchor);
        if let Some(e) = &r.error {
            let _ = writeln!(out, "{:<22} error: {e}", "");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_pass_flag_follows_tolerance() {
        let r = CheckReport::new("x", "y", 1e-9, 1e-8, 5, &[("order", 3.0)]);
        assert!(r.passed);
        assert_eq!(r.detail("cutoff"), Some(5.0));
        assert!(!CheckReport::new("x", "y", 2e-8, 1e-8, 5, &[]).passed);
        let e = CheckReport::errored("x", "y", 1.0, 3, &Error::NotNormalizable);
        assert!(!e.passed && e.error.is_some());
    }

    #[test]
    fn json_and_table_output() {
        let r = vec![CheckReport::new("params", "constraint", 0.0, 1e-15, 0, &[])];
        let v: serde_json::Value = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(v[0]["name"], "params");
        assert_eq!(v[0]["details"]["cutoff"], 0.0);
        assert!(v[0].get("error").is_none());
        assert!(to_table(&r).contains("pass"));
    }

    #[test]
    fn only_filter_and_tiers() {
        let mut c = VerifyConfig { only: Some(vec!["params".into(), "completeness".into()]), ..Default::default() };
        let names: Vec<_> = run_all(&c).into_iter().map(|r| r.name).collect();
        assert_eq!(names, ["params"]);
        c.tier = Tier::Full;
        c.only = Some(vec!["params".into()]);
        assert_eq!(run_all(&c).len(), 1);
    }

    #[test]
    fn quick_tier_passes_and_is_deterministic() {
        let c = VerifyConfig::default();
        let a = run_all(&c);
        for r in &a {
            assert!(r.passed, "{}", to_table(std::slice::from_ref(r)));
        }
        assert_eq!(a.len(), CHECKS.iter().filter(|(_, t)| *t == Tier::Quick).count());
        let b = run_all(&c);
        assert_eq!(to_json(&a), to_json(&b));
    }

    #[test]
    fn refining_does_not_degrade_quick_checks() {
        let base = run_all(&VerifyConfig::default());
        let finer = run_all(&VerifyConfig { cutoff_shift: 4, order_scale: 1.5, ..Default::default() });
        for (a, b) in base.iter().zip(&finer) {
            assert_eq!(a.name, b.name);
            assert!(b.max_abs_error <= a.max_abs_error || b.max_abs_error <= b.tolerance, "{} {} -> {}", a.name, a.max_abs_error, b.max_abs_error);
        }
    }
}
