//! The full property suite behind `verify all`, and the JSON report shape
//! shared by every command.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::charclass::{
    a_hat_square_identity, chern_of_e_plus_edual, genus_series, sqrt_series, total_chern, FormalClassSeries,
    GenusKind,
};
use crate::dualcurve::{bidual_check, degree_identity_report, dual_polynomial, pluecker, PlueckerTriple};
use crate::exactpoly::{HomogeneousPolynomial, MultiPoly};
use crate::hkquotient::{calabi_check, conormal_transport, flop_check, NumericConfig};
use crate::lagclass::{
    k3_reflection, mukai_pluecker_check, pluecker_type_check, product_report, random_table, reflection_report,
    GramLattice, MukaiCenterData,
};
use crate::legendre::{homogeneous_relation_check, NewtonConfig};
use crate::numeric::sample_rng;
use crate::symplin::{
    classify, criteria_agreement, lag_project, lag_reduce, random_coisotropic, random_instance, random_lagrangian,
    Classification,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub residuals: Vec<Residual>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub seed: u64,
    pub duration_ms: u64,
}

impl Report {
    pub fn new(command: &str, seed: u64, inputs: Value) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            results: Value::Null,
            residuals: Vec::new(),
            checks: Vec::new(),
            pass: true,
            seed,
            duration_ms: 0,
        }
    }

    /// Records a residual; NaN never passes.
    pub fn residual(&mut self, name: impl Into<String>, value: f64, tolerance: f64) {
        self.residuals.push(Residual {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        });
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push(Check { name: name.into(), pass });
    }

    /// Sets `pass` and the elapsed time.
    pub fn finish(mut self, start: Instant) -> Self {
        self.pass = self.residuals.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass);
        self.duration_ms = start.elapsed().as_millis() as u64;
        self
    }

    pub fn failures(&self) -> Vec<String> {
        self.residuals
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name.clone())
            .chain(self.checks.iter().filter(|c| !c.pass).map(|c| c.name.clone()))
            .collect()
    }

    /// The report as JSON with `duration_ms` zeroed, for comparisons.
    pub fn without_timing(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        v["duration_ms"] = json!(0);
        v
    }
}

/// Deliberate corruption of one module's output, used to confirm that the
/// suite notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    DualCurve,
    Flop,
    LagClass,
    CharClass,
}

impl std::str::FromStr for Mutation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dualcurve" => Ok(Self::DualCurve),
            "flop" | "hkquotient" => Ok(Self::Flop),
            "lagclass" => Ok(Self::LagClass),
            "charclass" => Ok(Self::CharClass),
            _ => Err(format!("unknown mutation target {s}")),
        }
    }
}

/// One suite item's contribution to the report.
#[derive(Debug, Clone, Default)]
pub struct ItemOutcome {
    pub results: Value,
    pub residuals: Vec<Residual>,
    pub checks: Vec<Check>,
}

impl ItemOutcome {
    fn residual(&mut self, name: String, value: f64, tolerance: f64) {
        self.residuals.push(Residual {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
        });
    }

    fn check(&mut self, name: String, pass: bool) {
        self.checks.push(Check { name, pass });
    }

    fn error(name: &str, err: impl std::fmt::Display) -> Self {
        let mut out = ItemOutcome {
            results: json!({ "error": err.to_string() }),
            ..Default::default()
        };
        out.check(format!("{name}.completed"), false);
        out
    }

    pub fn pass(&self) -> bool {
        self.residuals.iter().all(|r| r.pass) && self.checks.iter().all(|c| c.pass)
    }
}

pub struct SuiteItem {
    pub name: &'static str,
    run: fn(u64, Option<Mutation>) -> ItemOutcome,
}

impl SuiteItem {
    pub fn run(&self, seed: u64, mutation: Option<Mutation>) -> ItemOutcome {
        (self.run)(seed, mutation)
    }
}

fn form(text: &str) -> HomogeneousPolynomial {
    HomogeneousPolynomial::parse(text, 3).expect("built-in polynomial parses")
}

fn corrupt(p: &MultiPoly) -> MultiPoly {
    let mut out = p.clone();
    out.add_term(vec![2, 0, 0], num_traits::One::one());
    out
}

fn item_dual_conic(_seed: u64, mutation: Option<Mutation>) -> ItemOutcome {
    let conic = form("x0*x2 - x1^2");
    let mut out = ItemOutcome::default();
    match dual_polynomial(&conic) {
        Ok(r) => {
            let mut poly = r.dual_poly.as_poly().clone();
            if mutation == Some(Mutation::DualCurve) {
                poly = corrupt(&poly);
            }
            let expected = form("x1^2 - 4*x0*x2");
            let proportional = HomogeneousPolynomial::new(poly.clone())
                .map(|p| p.proportionality(&expected).is_some())
                .unwrap_or(false);
            out.check("dual_conic.proportional".into(), proportional);
            out.results = json!({ "dual_poly": poly.to_string(), "dual_degree": r.dual_degree });
            out
        }
        Err(e) => ItemOutcome::error("dual_conic", e),
    }
}

fn item_pluecker(_seed: u64, mutation: Option<Mutation>) -> ItemOutcome {
    let mut out = ItemOutcome::default();
    let mut table = Vec::new();
    for ((d, delta, kappa), expected) in [((3, 0, 0), (6, 9)), ((3, 1, 0), (4, 3)), ((2, 0, 0), (2, 0))] {
        let got = PlueckerTriple::new(d, delta, kappa).and_then(pluecker);
        out.check(format!("pluecker.({d},{delta},{kappa})"), got == Ok(expected));
        table.push(json!({ "triple": [d, delta, kappa], "dual": got.ok() }));
    }
    let cusp = form("x0^3 - x1^2*x2");
    let predicted = PlueckerTriple::new(3, 0, 1).and_then(pluecker).map(|p| p.0).ok();
    let computed = dual_polynomial(&cusp).ok().map(|r| {
        if mutation == Some(Mutation::DualCurve) {
            r.dual_degree as i64 + 1
        } else {
            r.dual_degree as i64
        }
    });
    out.check("pluecker.cuspidal_dual_degree".into(), computed == Some(3) && predicted == Some(3));
    let identity: Vec<Value> = [(3, 0, 0), (3, 1, 0), (3, 0, 1), (4, 0, 0)]
        .iter()
        .filter_map(|&(d, delta, kappa)| {
            let t = PlueckerTriple::new(d, delta, kappa).ok()?;
            // Nodes of the dual come from d = d∨(d∨-1) - 2δ∨ - 3κ∨.
            let (dd, kd) = pluecker(t).ok()?;
            let dual_delta = (dd * (dd - 1) - 3 * kd - d as i64) / 2;
            let td = PlueckerTriple::new(dd as u32, dual_delta as u32, kd as u32).ok()?;
            let r = degree_identity_report(t, td).ok()?;
            Some(json!({ "triple": [d, delta, kappa], "lhs": r.lhs, "rhs": r.rhs, "match": r.matches }))
        })
        .collect();
    out.results = json!({ "triples": table, "cuspidal_dual_degree": computed, "degree_identity": identity });
    out
}

fn item_biduality(_seed: u64, mutation: Option<Mutation>) -> ItemOutcome {
    let mut out = ItemOutcome::default();
    let mut results = serde_json::Map::new();
    for (name, text) in [("conic", "x0*x2 - x1^2"), ("cuspidal_cubic", "x0^3 - x1^2*x2")] {
        match bidual_check(&form(text)) {
            Ok(r) => {
                let ok = r.proportional && mutation != Some(Mutation::DualCurve);
                out.check(format!("biduality.{name}"), ok);
                results.insert(name.into(), json!({ "dual": r.dual.dual_poly.to_string(), "bidual": r.bidual.dual_poly.to_string() }));
            }
            Err(e) => {
                out.check(format!("biduality.{name}"), false);
                results.insert(name.into(), json!({ "error": e.to_string() }));
            }
        }
    }
    out.results = Value::Object(results);
    out
}

fn item_legendre(seed: u64, _mutation: Option<Mutation>) -> ItemOutcome {
    let mut out = ItemOutcome::default();
    let cfg = NewtonConfig {
        seed,
        ..NewtonConfig::default()
    };
    let mut results = serde_json::Map::new();
    for (name, text, n) in [
        ("hyperbolic", "x0*x1", 2),
        ("conic", "x0*x2 - x1^2", 3),
        ("cuspidal_cubic", "x0^3 - x1^2*x2", 3),
    ] {
        let f = HomogeneousPolynomial::parse(text, n).expect("built-in polynomial parses");
        match homogeneous_relation_check(&f, 100, &cfg) {
            Ok(r) => {
                out.residual(format!("legendre.{name}.relation"), r.max_relation_gap, 1e-9);
                out.residual(format!("legendre.{name}.zero_set"), r.max_zero_set_value, 1e-9);
                out.check(format!("legendre.{name}.sample_count"), r.samples == 100);
                results.insert(name.into(), json!({ "samples": r.samples, "zero_set_samples": r.zero_set_samples }));
            }
            Err(e) => {
                out.check(format!("legendre.{name}.completed"), false);
                results.insert(name.into(), json!({ "error": e.to_string() }));
            }
        }
    }
    out.results = Value::Object(results);
    out
}

fn item_flop(seed: u64, mutation: Option<Mutation>) -> ItemOutcome {
    let mut out = ItemOutcome::default();
    let cfg = NumericConfig {
        samples: 100,
        seed,
        ..NumericConfig::default()
    };
    for n in 1..=3 {
        match flop_check(n, &cfg) {
            Ok(r) => {
                let bump = if mutation == Some(Mutation::Flop) { 1e-3 } else { 0.0 };
                out.residual(format!("flop.n{n}.level"), r.max_level_residual + bump, 1e-10);
                out.residual(format!("flop.n{n}.involution"), r.max_involution_residual, 1e-10);
                out.residual(format!("flop.n{n}.symplectic"), r.max_symplectic_residual, 1e-6);
            }
            Err(e) => return ItemOutcome::error("flop", e),
        }
    }
    out.results = json!({ "samples": cfg.samples, "dimensions": [1, 2, 3] });
    out
}

fn item_calabi(seed: u64, _mutation: Option<Mutation>) -> ItemOutcome {
    let mut out = ItemOutcome::default();
    let cfg = NumericConfig {
        samples: 50,
        seed,
        ..NumericConfig::default()
    };
    let mut dets = Vec::new();
    for n in 1..=2 {
        match calabi_check(n, &cfg) {
            Ok(r) => {
                out.residual(format!("calabi.n{n}.hermitian"), r.max_hermitian_residual, 1e-6);
                out.check(format!("calabi.n{n}.positive_definite"), r.min_eigenvalue > 0.0);
                out.residual(format!("calabi.n{n}.det_spread"), r.det_spread, 1e-6);
                dets.push(json!({ "n": n, "mean_det": r.mean_det }));
            }
            Err(e) => return ItemOutcome::error("calabi", e),
        }
    }
    out.results = json!({ "samples": cfg.samples, "determinants": dets });
    out
}

fn item_conormal(seed: u64, _mutation: Option<Mutation>) -> ItemOutcome {
    let mut out = ItemOutcome::default();
    let cfg = NumericConfig {
        seed,
        ..NumericConfig::default()
    };
    let mut results = serde_json::Map::new();
    for (name, text) in [("conic", "x0*x2 - x1^2"), ("fermat_quadric", "x0^2 + x1^2 + x2^2")] {
        match conormal_transport(&form(text), 20, &cfg) {
            Ok(r) => {
                out.residual(format!("conormal.{name}"), r.max_residual, 1e-8);
                results.insert(name.into(), json!({ "dual_poly": r.dual_poly, "samples": r.per_sample.len() }));
            }
            Err(e) => {
                out.check(format!("conormal.{name}.completed"), false);
                results.insert(name.into(), json!({ "error": e.to_string() }));
            }
        }
    }
    out.results = Value::Object(results);
    out
}

fn item_symplin(seed: u64, _mutation: Option<Mutation>) -> ItemOutcome {
    const INSTANCES: u64 = 500;
    const PAIRS: u64 = 100;
    let mut out = ItemOutcome::default();
    let verdicts: Vec<(bool, Classification)> = (0..INSTANCES)
        .into_par_iter()
        .map(|i| {
            let c = random_instance(&mut sample_rng(seed ^ 0x5e_11, i), 4);
            match criteria_agreement(&c) {
                Ok(r) => (r.agree, r.classification),
                Err(_) => (false, Classification::None),
            }
        })
        .collect();
    let disagreements = verdicts.iter().filter(|(ok, _)| !ok).count();
    out.check("symplin.criteria_agree".into(), disagreements == 0);
    let lagrangian_outputs = (0..PAIRS)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = sample_rng(seed ^ 0x1a9_9a1, i);
            let n = rng.random_range(1..=4);
            let codim = rng.random_range(0..=n);
            let l = random_lagrangian(&mut rng, n);
            let d = random_coisotropic(&mut rng, n, codim);
            let projected = lag_project(&l, &d).map(|p| classify(&p) == Classification::Lagrangian);
            let reduced = lag_reduce(&l, &d).map(|(_, img)| classify(&img) == Classification::Lagrangian);
            projected == Ok(true) && reduced == Ok(true)
        })
        .count();
    out.check("symplin.lag_outputs_lagrangian".into(), lagrangian_outputs == PAIRS as usize);
    let count = |k: Classification| verdicts.iter().filter(|(_, c)| *c == k).count();
    out.results = json!({
        "instances": INSTANCES,
        "disagreements": disagreements,
        "classes": {
            "isotropic": count(Classification::Isotropic),
            "coisotropic": count(Classification::Coisotropic),
            "lagrangian": count(Classification::Lagrangian),
            "none": count(Classification::None),
        },
        "lag_pairs": PAIRS,
    });
    out
}

fn item_lagclass(seed: u64, mutation: Option<Mutation>) -> ItemOutcome {
    const TABLES: u64 = 1000;
    let mut out = ItemOutcome::default();
    let outcomes: Vec<(bool, bool, bool, bool)> = (0..TABLES)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed ^ 0x1a6_c1a5, i);
            let n = rng.random_range(1..=4);
            let k = rng.random_range(1..=4);
            let t = random_table(&mut rng, n, k, 20);
            let report = product_report(&t);
            let classes = report.classes_preserved && mutation != Some(Mutation::LagClass);
            let d = MukaiCenterData::from_flop_table(&t);
            let mut mukai = true;
            for a in t.labels() {
                for b in t.labels() {
                    match (mukai_pluecker_check(&d, a, b), pluecker_type_check(&t, a, b)) {
                        (Ok(m), Ok((l, r))) => mukai &= m.lhs == l && m.rhs == r && m.product_preserved,
                        _ => mukai = false,
                    }
                }
            }
            (classes, report.center_preserved, report.mixed_preserved, mukai)
        })
        .collect();
    let all = |f: fn(&(bool, bool, bool, bool)) -> bool| outcomes.iter().all(f);
    out.check("lagclass.classes_preserved".into(), all(|o| o.0));
    out.check("lagclass.center_preserved".into(), all(|o| o.1));
    out.check("lagclass.mixed_preserved".into(), all(|o| o.2));
    out.check("lagclass.mukai_specializes".into(), all(|o| o.3));
    out.results = json!({ "tables": TABLES, "max_n": 4, "entry_bound": 20 });
    out
}

/// `U ⊕ ⟨-2⟩`, `A2(-1)` and the K3 lattice `U³ ⊕ E8(-1)²`, each with a
/// `(-2)`-class.
pub fn reference_lattices() -> Vec<(&'static str, GramLattice, Vec<i64>)> {
    let hyperbolic = GramLattice::new(vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]).expect("symmetric");
    let a2 = GramLattice::new(vec![vec![-2, 1], vec![1, -2]]).expect("symmetric");
    let mut k3 = vec![vec![0i64; 22]; 22];
    for b in 0..3 {
        k3[2 * b][2 * b + 1] = 1;
        k3[2 * b + 1][2 * b] = 1;
    }
    // E8(-1): chain 0-1-2-3-4-5-6 with node 7 on node 4.
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
    for block in 0..2 {
        let o = 6 + 8 * block;
        for i in 0..8 {
            k3[o + i][o + i] = -2;
        }
        for (i, j) in edges {
            k3[o + i][o + j] = 1;
            k3[o + j][o + i] = 1;
        }
    }
    let mut p = vec![0; 22];
    p[0] = 1;
    p[1] = -1;
    vec![
        ("hyperbolic_plus_root", hyperbolic, vec![0, 0, 1]),
        ("a2", a2, vec![1, 0]),
        ("k3", GramLattice::new(k3).expect("symmetric"), p),
    ]
}

fn item_reflection(seed: u64, _mutation: Option<Mutation>) -> ItemOutcome {
    let mut out = ItemOutcome::default();
    let mut results = serde_json::Map::new();
    for (i, (name, lattice, p)) in reference_lattices().into_iter().enumerate() {
        let mut rng = sample_rng(seed ^ 0x4ef1, i as u64);
        let extra: Vec<Vec<i64>> = (0..20)
            .map(|_| (0..lattice.rank()).map(|_| rng.random_range(-5..=5)).collect())
            .collect();
        match reflection_report(&lattice, &p, &extra) {
            Ok(r) => {
                out.check(format!("reflection.{name}.isometry"), r.isometry);
                out.check(format!("reflection.{name}.involution"), r.involution);
                out.check(format!("reflection.{name}.fixes_orthogonal"), r.fixes_orthogonal);
                out.check(format!("reflection.{name}.negates_center"), r.negates_center);
            }
            Err(e) => {
                out.check(format!("reflection.{name}.completed"), false);
                results.insert(name.into(), json!({ "error": e.to_string() }));
                continue;
            }
        }
        // The verbatim display sends P to 3P, of square -18.
        let image = k3_reflection(&lattice, &p, &p).ok();
        let tripled: Vec<i64> = p.iter().map(|x| 3 * x).collect();
        let square = image.as_ref().and_then(|v| lattice.dot(v, v).ok());
        out.check(
            format!("reflection.{name}.verbatim_center_regression"),
            image.as_ref() == Some(&tripled) && square == Some(-18),
        );
        results.insert(name.into(), json!({ "rank": lattice.rank(), "verbatim_center_square": square }));
    }
    out.results = Value::Object(results);
    out
}

fn item_charclass(_seed: u64, mutation: Option<Mutation>) -> ItemOutcome {
    const DEGREE: u32 = 8;
    let mut out = ItemOutcome::default();
    let mut odd_ok = true;
    let mut top_ok = true;
    for r in 1..=4usize {
        let Ok(ring) = FormalClassSeries::ring(r, DEGREE) else {
            return ItemOutcome::error("charclass", "ring construction failed");
        };
        let mut s = chern_of_e_plus_edual(&total_chern(&ring, 0, r));
        if mutation == Some(Mutation::CharClass) {
            s = s.add(&ring.var(0)).expect("same ring");
        }
        odd_ok &= (1..=DEGREE).step_by(2).all(|k| s.component(k).is_zero());
        if 2 * r as u32 <= DEGREE {
            let cr = ring.var(r - 1);
            let sign = if r % 2 == 0 { crate::Q::from_integer(1.into()) } else { crate::Q::from_integer((-1).into()) };
            top_ok &= cr.mul(&cr).map(|sq| sq.scale(&sign)).ok() == Some(s.component(2 * r as u32));
        }
    }
    out.check("charclass.odd_classes_vanish".into(), odd_ok);
    out.check("charclass.top_class".into(), top_ok);
    let squares = (1..=4).all(|r| a_hat_square_identity(r, DEGREE) == Ok(true));
    out.check("charclass.a_hat_square".into(), squares);
    let roots = (1..=3).all(|r| {
        genus_series(GenusKind::L, r, DEGREE)
            .and_then(|l| sqrt_series(&l).and_then(|s| s.mul(&s)).map(|sq| sq.sub(&l).map(|d| d.is_zero())))
            .map(|d| d == Ok(true))
            .unwrap_or(false)
    });
    out.check("charclass.sqrt_l_squares_back".into(), roots);
    let a_hat = genus_series(GenusKind::AHat, 1, 4).map(|s| s.to_string()).unwrap_or_default();
    let l = genus_series(GenusKind::L, 1, 4).map(|s| s.to_string()).unwrap_or_default();
    out.results = json!({ "degree": DEGREE, "max_rank": 4, "a_hat_rank1": a_hat, "l_rank1": l });
    out
}

/// Items in report order.
pub fn suite() -> Vec<SuiteItem> {
    vec![
        SuiteItem { name: "dual_conic", run: item_dual_conic },
        SuiteItem { name: "pluecker", run: item_pluecker },
        SuiteItem { name: "biduality", run: item_biduality },
        SuiteItem { name: "legendre", run: item_legendre },
        SuiteItem { name: "flop", run: item_flop },
        SuiteItem { name: "calabi", run: item_calabi },
        SuiteItem { name: "conormal", run: item_conormal },
        SuiteItem { name: "symplin", run: item_symplin },
        SuiteItem { name: "lagclass", run: item_lagclass },
        SuiteItem { name: "reflection", run: item_reflection },
        SuiteItem { name: "charclass", run: item_charclass },
    ]
}

pub fn verify_all(seed: u64) -> Report {
    verify_all_with(seed, None)
}

/// Runs every item concurrently and assembles the report in suite order.
pub fn verify_all_with(seed: u64, mutation: Option<Mutation>) -> Report {
    let start = Instant::now();
    let items = suite();
    let outcomes: Vec<ItemOutcome> = items.par_iter().map(|item| item.run(seed, mutation)).collect();
    let mut report = Report::new("verify all", seed, json!({ "seed": seed }));
    let mut results = serde_json::Map::new();
    for (item, outcome) in items.iter().zip(outcomes) {
        results.insert(
            item.name.into(),
            json!({ "pass": outcome.pass(), "details": outcome.results }),
        );
        report.residuals.extend(outcome.residuals);
        report.checks.extend(outcome.checks);
    }
    report.results = Value::Object(results);
    report.finish(start)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_pass_logic() {
        let mut r = Report::new("x", 1, Value::Null);
        r.residual("a", 1e-12, 1e-10);
        r.check("b", true);
        let r = r.finish(Instant::now());
        assert!(r.pass);
        let mut r = Report::new("x", 1, Value::Null);
        r.residual("nan", f64::NAN, 1.0);
        let r = r.finish(Instant::now());
        assert!(!r.pass);
        assert_eq!(r.failures(), vec!["nan".to_string()]);
    }

    #[test]
    fn lattices_are_well_formed() {
        for (name, l, p) in reference_lattices() {
            assert_eq!(l.dot(&p, &p).unwrap(), -2, "{name}");
        }
    }

    #[test]
    fn mutated_items_fail() {
        assert!(!item_dual_conic(7, Some(Mutation::DualCurve)).pass());
        assert!(item_dual_conic(7, None).pass());
        assert!(!item_charclass(7, Some(Mutation::CharClass)).pass());
        assert!(item_reflection(7, None).pass());
    }
}
