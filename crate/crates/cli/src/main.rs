//! `lagflop`: command-line front end. Every invocation prints one JSON
//! report on stdout and a short summary on stderr. Exit codes: 0 on
//! success, 1 when a verification fails, 2 on bad input.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};
use thiserror::Error;

use lagflop::charclass::{a_hat_square_report, genus_series, sqrt_series, GenusKind};
use lagflop::dualcurve::{bidual_check, chi_bar_formula, degree_identity_report, dual_polynomial, pluecker, PlueckerTriple};
use lagflop::exactpoly::infer_nvars;
use lagflop::hkquotient::{calabi_check, conormal_transport, flop_check, NumericConfig};
use lagflop::lagclass::{
    k3_reflection, normalized_transform, picard_lefschetz, pluecker_type_check, product_report, reflection_report,
    GramLattice, LagrangianClassTable, TableInput,
};
use lagflop::legendre::{dual_value, legendre_map, NewtonConfig};
use lagflop::symplin::{
    classify, format_rational, lag_project, lag_reduce, reduce, wedge_power_values, QMat, SubspaceInput,
    SymplecticSubspace,
};
use lagflop::verify::{verify_all_with, Mutation, Report};
use lagflop::HomogeneousPolynomial;

#[derive(Parser, Debug)]
#[command(name = "lagflop", version, about = "Dual curves, Legendre transforms and flops of T*P^n")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Global {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Override the residual tolerance of the command.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Override the number of samples of the command.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Print only the JSON report.
    #[arg(long, global = true)]
    json_only: bool,
    /// Corrupt one module's output to exercise the failure path.
    #[arg(long, global = true, hide = true)]
    mutate: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dual curve of a plane curve by elimination.
    Dual {
        #[arg(long)]
        poly: PathBuf,
        /// Also dualize the result and compare with the input.
        #[arg(long)]
        bidual: bool,
    },
    /// Plücker numbers of a plane curve with nodes and cusps.
    Pluecker {
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        delta: u32,
        #[arg(long, default_value_t = 0)]
        kappa: u32,
        /// Degree of the dual curve, for the degree identity report.
        #[arg(long, requires_all = ["dual_delta", "dual_kappa"])]
        dual_d: Option<u32>,
        #[arg(long)]
        dual_delta: Option<u32>,
        #[arg(long)]
        dual_kappa: Option<u32>,
    },
    #[command(subcommand)]
    Legendre(LegendreCmd),
    #[command(subcommand)]
    Symplin(SymplinCmd),
    #[command(subcommand)]
    Hk(HkCmd),
    #[command(subcommand)]
    Lag(LagCmd),
    #[command(subcommand)]
    Charclass(CharCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand, Debug)]
enum LegendreCmd {
    /// Legendre map at x, or the dual value at ξ.
    Eval {
        #[arg(long)]
        poly: PathBuf,
        /// Comma-separated complex coordinates such as `1,2-i,0.5i`.
        #[arg(long, conflicts_with = "xi")]
        x: Option<String>,
        #[arg(long)]
        xi: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum SymplinCmd {
    Classify {
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Symplectic reduction `D/D⊥` of a coisotropic subspace.
    Reduce {
        #[arg(long)]
        subspace: PathBuf,
    },
    /// Projection `C∩D + D⊥` and reduction of a Lagrangian along a coisotropic.
    Project {
        #[arg(long)]
        lagrangian: PathBuf,
        #[arg(long)]
        coisotropic: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum HkCmd {
    FlopCheck {
        #[arg(long)]
        n: usize,
    },
    CalabiCheck {
        #[arg(long)]
        n: usize,
    },
    Conormal {
        #[arg(long)]
        poly: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum LagCmd {
    Transform {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        class: Option<String>,
    },
    Check {
        #[arg(long)]
        table: PathBuf,
    },
    Reflect {
        #[arg(long)]
        gram: PathBuf,
        /// Comma-separated integers.
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        c: String,
    },
}

#[derive(Subcommand, Debug)]
enum CharCmd {
    Identity {
        /// `ahat-square`, or a genus to print: `a-hat`, `todd`, `l`, `sqrt-l`.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        degree: u32,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// The complete property suite.
    All,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Input(String),
}

fn input<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_poly(path: &Path) -> Result<HomogeneousPolynomial, CliError> {
    let text = read(path)?;
    let text = text.trim();
    let nvars = infer_nvars(text).map_err(input)?;
    HomogeneousPolynomial::parse(text, nvars).map_err(input)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_subspace(path: &Path) -> Result<SymplecticSubspace, CliError> {
    read_json::<SubspaceInput>(path)?.build().map_err(input)
}

fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, CliError> {
    s.split(',')
        .map(|t| Complex64::from_str(t.trim()).map_err(|e| CliError::Input(format!("bad coordinate {t}: {e}"))))
        .collect()
}

fn parse_int_list(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|e| CliError::Input(format!("bad integer {t}: {e}"))))
        .collect()
}

fn complex_json(v: &[Complex64]) -> Value {
    json!(v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
}

fn matrix_json(m: &QMat) -> Value {
    json!(m
        .iter()
        .map(|row| row.iter().map(format_rational).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn subspace_json(c: &SymplecticSubspace) -> Value {
    json!({
        "n": c.ambient().n(),
        "dim": c.dim(),
        "basis": matrix_json(&c.canonical_basis()),
        "classification": classify(c),
    })
}

fn dual_cmd(g: &Global, poly: &Path, bidual: bool, report: &mut Report) -> Result<(), CliError> {
    let f = read_poly(poly)?;
    report.inputs = json!({ "poly": f.to_string(), "bidual": bidual });
    let r = dual_polynomial(&f).map_err(input)?;
    report.residual("membership", r.membership_residual, g.tolerance.unwrap_or(1e-8));
    let removed: Vec<Value> = r
        .extraneous_factors_removed
        .iter()
        .map(|s| json!({ "factor": s.factor.to_string(), "multiplicity": s.multiplicity, "residual": s.residual }))
        .collect();
    let mut results = json!({
        "dual_poly": r.dual_poly.to_string(),
        "dual_degree": r.dual_degree,
        "stripped_factors": removed,
    });
    if bidual {
        let b = bidual_check(&f).map_err(input)?;
        report.check("bidual_proportional", b.proportional);
        results["bidual_poly"] = json!(b.bidual.dual_poly.to_string());
        results["bidual_scalar"] = json!(b.scalar.as_ref().map(format_rational));
    }
    report.results = results;
    Ok(())
}

fn pluecker_cmd(d: u32, delta: u32, kappa: u32, dual: Option<(u32, u32, u32)>, report: &mut Report) -> Result<(), CliError> {
    report.inputs = json!({ "d": d, "delta": delta, "kappa": kappa, "dual": dual });
    let t = PlueckerTriple::new(d, delta, kappa).map_err(input)?;
    let (d_dual, kappa_dual) = pluecker(t).map_err(input)?;
    let genus = (d as i64 - 1) * (d as i64 - 2) / 2 - delta as i64 - kappa as i64;
    report.results = json!({
        "d_dual": d_dual,
        "kappa_dual": kappa_dual,
        "genus": genus,
        "chi_bar": chi_bar_formula(t),
    });
    if let Some((dd, ddelta, dkappa)) = dual {
        let td = PlueckerTriple::new(dd, ddelta, dkappa).map_err(input)?;
        let r = degree_identity_report(t, td).map_err(input)?;
        report.results["chi_bar_dual"] = json!(chi_bar_formula(td));
        report.results["degree_identity"] = serde_json::to_value(r).expect("serializes");
    }
    Ok(())
}

fn legendre_cmd(g: &Global, poly: &Path, x: Option<&str>, xi: Option<&str>, report: &mut Report) -> Result<(), CliError> {
    let f = read_poly(poly)?;
    match (x, xi) {
        (Some(x), _) => {
            let x = parse_complex_list(x)?;
            report.inputs = json!({ "poly": f.to_string(), "x": complex_json(&x) });
            let p = legendre_map(&f, &x).map_err(input)?;
            let gap = (p.f_dual_value - p.f_value * (f.degree() as f64 - 1.0)).norm();
            report.residual("homogeneous_relation", gap / (1.0 + p.f_value.norm()), g.tolerance.unwrap_or(1e-9));
            report.results = json!({
                "xi": complex_json(&p.xi),
                "x": complex_json(&x),
                "f_value": [p.f_value.re, p.f_value.im],
                "f_dual_value": [p.f_dual_value.re, p.f_dual_value.im],
                "residual": gap,
            });
        }
        (None, Some(xi)) => {
            let xi = parse_complex_list(xi)?;
            report.inputs = json!({ "poly": f.to_string(), "xi": complex_json(&xi) });
            let cfg = NewtonConfig {
                seed: g.seed,
                tolerance: g.tolerance.unwrap_or(1e-12),
                ..NewtonConfig::default()
            };
            let v = dual_value(&f, &xi, &cfg).map_err(input)?;
            report.check("preimage_regular", !v.inversion.singular);
            report.residual("newton", v.inversion.residual, cfg.tolerance.max(1e-10));
            report.results = json!({
                "xi": complex_json(&xi),
                "x": complex_json(&v.inversion.x),
                "f_dual_value": [v.value.re, v.value.im],
                "residual": v.inversion.residual,
            });
        }
        (None, None) => return Err(CliError::Input("one of --x or --xi is required".into())),
    }
    Ok(())
}

fn symplin_cmd(cmd: &SymplinCmd, report: &mut Report) -> Result<(), CliError> {
    match cmd {
        SymplinCmd::Classify { subspace } => {
            let c = read_subspace(subspace)?;
            report.inputs = json!({ "subspace": subspace_json(&c) });
            let n = c.ambient().n();
            let wedge: Vec<Value> = (1..=n)
                .map(|k| {
                    let vals = wedge_power_values(&c, k);
                    json!({ "k": k, "vanishes": vals.iter().all(|v| v == &lagflop::Q::from_integer(0.into())) })
                })
                .collect();
            report.results = json!({ "classification": classify(&c), "codim": c.codim(), "wedge_powers": wedge });
        }
        SymplinCmd::Reduce { subspace } => {
            let d = read_subspace(subspace)?;
            report.inputs = json!({ "subspace": subspace_json(&d) });
            let r = reduce(&d).map_err(input)?;
            report.results = json!({
                "quotient_dim": r.quotient.dim(),
                "quotient_gram": matrix_json(r.quotient.gram()),
                "representatives": matrix_json(&r.representatives),
                "kernel": matrix_json(&r.kernel),
            });
        }
        SymplinCmd::Project { lagrangian, coisotropic } => {
            let c = read_subspace(lagrangian)?;
            let d = read_subspace(coisotropic)?;
            report.inputs = json!({ "lagrangian": subspace_json(&c), "coisotropic": subspace_json(&d) });
            let proj = lag_project(&c, &d).map_err(input)?;
            let (red, image) = lag_reduce(&c, &d).map_err(input)?;
            report.check("projection_lagrangian", classify(&proj) == lagflop::symplin::Classification::Lagrangian);
            report.check("reduction_lagrangian", classify(&image) == lagflop::symplin::Classification::Lagrangian);
            report.results = json!({
                "projection": subspace_json(&proj),
                "reduction": { "quotient_dim": red.quotient.dim(), "image": matrix_json(&image.canonical_basis()) },
            });
        }
    }
    Ok(())
}

fn numeric_config(g: &Global, samples: usize) -> NumericConfig {
    NumericConfig {
        samples: g.samples.unwrap_or(samples),
        seed: g.seed,
        ..NumericConfig::default()
    }
}

fn hk_cmd(g: &Global, cmd: &HkCmd, report: &mut Report) -> Result<(), CliError> {
    match cmd {
        HkCmd::FlopCheck { n } => {
            let cfg = numeric_config(g, 100);
            report.inputs = json!({ "n": n, "samples": cfg.samples });
            let r = flop_check(*n, &cfg).map_err(input)?;
            report.residual("level", r.max_level_residual, g.tolerance.unwrap_or(1e-10));
            report.residual("involution", r.max_involution_residual, g.tolerance.unwrap_or(1e-10));
            report.residual("symplectic", r.max_symplectic_residual, g.tolerance.unwrap_or(1e-6));
            report.residual("blowdown", r.max_blowdown_residual, g.tolerance.unwrap_or(1e-10));
            let max_residual = r
                .max_level_residual
                .max(r.max_involution_residual)
                .max(r.max_symplectic_residual)
                .max(r.max_blowdown_residual);
            report.results = json!({ "max_residual": max_residual, "per_sample": r.per_sample });
        }
        HkCmd::CalabiCheck { n } => {
            let cfg = numeric_config(g, 50);
            report.inputs = json!({ "n": n, "samples": cfg.samples, "fd_step": cfg.fd_step });
            let r = calabi_check(*n, &cfg).map_err(input)?;
            report.residual("hermitian", r.max_hermitian_residual, g.tolerance.unwrap_or(1e-6));
            report.residual("det_spread", r.det_spread, g.tolerance.unwrap_or(1e-6));
            report.check("positive_definite", r.min_eigenvalue > 0.0);
            let per_sample: Vec<Value> = r
                .samples
                .iter()
                .map(|m| json!({ "det": m.det, "min_eigenvalue": m.min_eigenvalue, "hermitian_residual": m.hermitian_residual }))
                .collect();
            report.results = json!({
                "max_residual": r.det_spread.max(r.max_hermitian_residual),
                "mean_det": r.mean_det,
                "min_eigenvalue": r.min_eigenvalue,
                "per_sample": per_sample,
            });
        }
        HkCmd::Conormal { poly } => {
            let f = read_poly(poly)?;
            let cfg = numeric_config(g, 20);
            report.inputs = json!({ "poly": f.to_string(), "samples": cfg.samples });
            let r = conormal_transport(&f, cfg.samples, &cfg).map_err(input)?;
            report.residual("dual_membership", r.max_residual, g.tolerance.unwrap_or(1e-8));
            report.results = json!({
                "method": r.method,
                "dual_poly": r.dual_poly,
                "max_residual": r.max_residual,
                "per_sample": r.per_sample,
            });
        }
    }
    Ok(())
}

fn table_json(t: &LagrangianClassTable) -> Value {
    serde_json::to_value(t.to_input()).expect("table serializes")
}

fn lag_cmd(cmd: &LagCmd, report: &mut Report) -> Result<(), CliError> {
    match cmd {
        LagCmd::Transform { table, class } => {
            let t = read_json::<TableInput>(table)?.build().map_err(input)?;
            report.inputs = json!({ "table": table_json(&t), "class": class });
            let names: Vec<String> = match class {
                Some(c) => vec![c.clone()],
                None => t.labels().to_vec(),
            };
            let mut images = Vec::new();
            for name in &names {
                let tc = normalized_transform(&t, name).map_err(input)?;
                images.push(json!({
                    "class": name,
                    "image": tc.expression(t.labels()),
                    "center_coefficient": format_rational(&tc.image.center),
                    "integral": tc.integral,
                }));
            }
            let pr = product_report(&t);
            report.check("products_preserved", pr.holds());
            report.results = json!({ "transforms": images, "center_image": if t.n() % 2 == 0 { "P_dual" } else { "-P_dual" } });
        }
        LagCmd::Check { table } => {
            let t = read_json::<TableInput>(table)?.build().map_err(input)?;
            report.inputs = json!({ "table": table_json(&t) });
            let mut pairs = Vec::new();
            for (i, a) in t.labels().iter().enumerate() {
                for b in &t.labels()[i..] {
                    let (l, r) = pluecker_type_check(&t, a, b).map_err(input)?;
                    report.check(format!("pluecker.{a}.{b}"), l == r);
                    pairs.push(json!({ "pair": [a, b], "lhs": format_rational(&l), "rhs": format_rational(&r) }));
                }
            }
            let pr = product_report(&t);
            report.check("products_preserved", pr.holds());
            report.results = json!({ "pluecker": pairs, "product_report": pr });
        }
        LagCmd::Reflect { gram, p, c } => {
            let l = GramLattice::new(read_json::<Vec<Vec<i64>>>(gram)?).map_err(input)?;
            let (p, c) = (parse_int_list(p)?, parse_int_list(c)?);
            report.inputs = json!({ "gram": l.gram(), "p": p, "c": c });
            let verbatim = k3_reflection(&l, &p, &c).map_err(input)?;
            let variant = picard_lefschetz(&l, &p, &c).map_err(input)?;
            let r = reflection_report(&l, &p, std::slice::from_ref(&c)).map_err(input)?;
            report.check("variant_isometry", r.isometry);
            report.check("variant_involution", r.involution);
            report.results = json!({
                "verbatim": verbatim,
                "verbatim_square": l.dot(&verbatim, &verbatim).map_err(input)?,
                "variant": variant,
                "variant_square": l.dot(&variant, &variant).map_err(input)?,
                "c_square": l.dot(&c, &c).map_err(input)?,
                "variant_report": r,
            });
        }
    }
    Ok(())
}

fn charclass_cmd(kind: &str, rank: usize, degree: u32, report: &mut Report) -> Result<(), CliError> {
    report.inputs = json!({ "kind": kind, "rank": rank, "degree": degree });
    match kind {
        "ahat-square" => {
            let r = a_hat_square_report(rank, degree).map_err(input)?;
            report.check("todd_equals_a_hat", r.todd_equals_a_hat);
            report.check("a_hat_equals_square", r.a_hat_equals_square);
            report.results = serde_json::to_value(r).expect("serializes");
        }
        "sqrt-l" => {
            let l = genus_series(GenusKind::L, rank, degree).map_err(input)?;
            let root = sqrt_series(&l).map_err(input)?;
            let back = root.mul(&root).map_err(input)?;
            report.check("square_returns_l", back == l);
            report.results = json!({ "series": root.to_string() });
        }
        other => {
            let kind = GenusKind::from_str(other).map_err(CliError::Input)?;
            let s = genus_series(kind, rank, degree).map_err(input)?;
            report.results = json!({ "series": s.to_string() });
        }
    }
    Ok(())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Dual { .. } => "dual",
        Command::Pluecker { .. } => "pluecker",
        Command::Legendre(_) => "legendre eval",
        Command::Symplin(SymplinCmd::Classify { .. }) => "symplin classify",
        Command::Symplin(SymplinCmd::Reduce { .. }) => "symplin reduce",
        Command::Symplin(SymplinCmd::Project { .. }) => "symplin project",
        Command::Hk(HkCmd::FlopCheck { .. }) => "hk flop-check",
        Command::Hk(HkCmd::CalabiCheck { .. }) => "hk calabi-check",
        Command::Hk(HkCmd::Conormal { .. }) => "hk conormal",
        Command::Lag(LagCmd::Transform { .. }) => "lag transform",
        Command::Lag(LagCmd::Check { .. }) => "lag check",
        Command::Lag(LagCmd::Reflect { .. }) => "lag reflect",
        Command::Charclass(_) => "charclass identity",
        Command::Verify(_) => "verify all",
    }
}

fn execute(cli: &Cli, start: Instant) -> Result<Report, CliError> {
    let g = &cli.global;
    let mutation = g
        .mutate
        .as_deref()
        .map(Mutation::from_str)
        .transpose()
        .map_err(CliError::Input)?;
    if let Command::Verify(VerifyCmd::All) = cli.command {
        return Ok(verify_all_with(g.seed, mutation));
    }
    let mut report = Report::new(command_name(&cli.command), g.seed, Value::Null);
    match &cli.command {
        Command::Dual { poly, bidual } => dual_cmd(g, poly, *bidual, &mut report)?,
        Command::Pluecker { d, delta, kappa, dual_d, dual_delta, dual_kappa } => {
            let dual = dual_d.map(|dd| (dd, dual_delta.unwrap_or(0), dual_kappa.unwrap_or(0)));
            pluecker_cmd(*d, *delta, *kappa, dual, &mut report)?
        }
        Command::Legendre(LegendreCmd::Eval { poly, x, xi }) => {
            legendre_cmd(g, poly, x.as_deref(), xi.as_deref(), &mut report)?
        }
        Command::Symplin(cmd) => symplin_cmd(cmd, &mut report)?,
        Command::Hk(cmd) => hk_cmd(g, cmd, &mut report)?,
        Command::Lag(cmd) => lag_cmd(cmd, &mut report)?,
        Command::Charclass(CharCmd::Identity { kind, rank, degree }) => charclass_cmd(kind, *rank, *degree, &mut report)?,
        Command::Verify(_) => unreachable!("handled above"),
    }
    Ok(report.finish(start))
}

/// Writes the report to stdout; a closed pipe is not an error.
fn emit(report: &Report) {
    let text = serde_json::to_string_pretty(report).expect("report serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let quiet = cli.global.json_only;
    match execute(&cli, start) {
        Ok(report) => {
            emit(&report);
            if !quiet {
                let status = if report.pass { "PASS" } else { "FAIL" };
                eprintln!(
                    "{}: {status} ({} residuals, {} checks, {} ms)",
                    report.command,
                    report.residuals.len(),
                    report.checks.len(),
                    report.duration_ms
                );
                for name in report.failures() {
                    eprintln!("  failed: {name}");
                }
            }
            ExitCode::from(if report.pass { 0 } else { 1 })
        }
        Err(e) => {
            let mut report = Report::new(command_name(&cli.command), cli.global.seed, Value::Null);
            report.results = json!({ "error": e.to_string() });
            report.check("input", false);
            let report = report.finish(start);
            emit(&report);
            if !quiet {
                eprintln!("{}: error: {e}", report.command);
            }
            ExitCode::from(2)
        }
    }
}
