//! Empirical growth profiles of solution counts and metered space.
//!
//! Sparsity is a statement about every database; a profile only samples one
//! generated family of databases, so its classification is evidence, not proof.

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ast::{Equation, Expr};
use crate::eval::{eval, EvalBudget, EvalError};
use crate::model::{numbered_domain, Database, ModelError, TupleUniverse};
use crate::typecheck::Schema;

/// A fit must explain at least this share of variance to count.
pub const MIN_R2: f64 = 0.9;
/// How much better the exponential fit must be to win over the polynomial one.
pub const R2_GAP: f64 = 0.01;
/// Fewer points than this are always inconclusive.
pub const MIN_POINTS: usize = 3;

pub const REPORT_HEADER: &str =
    "# growth profile over a generated database family; evidence about sparsity, not a proof";

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("domain sizes must start at 1 or more and be ascending")]
    BadRange,
    #[error("relation `{0}` is not flat; random generation needs flat relations")]
    NonFlatRelation(String),
    #[error("density {0} is outside [0, 1]")]
    BadDensity(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(EvalError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenMode {
    /// The domain `x1..xn` and no relations.
    DomainOnly,
    /// Each schema relation holds each possible tuple with probability `density`.
    RandomFlat { density: f64 },
}

#[derive(Debug, Clone)]
pub struct DbGenerator {
    pub schema: Schema,
    pub mode: GenMode,
    pub seed: u64,
}

impl DbGenerator {
    pub fn domain_only() -> DbGenerator {
        DbGenerator {
            schema: Schema::new(),
            mode: GenMode::DomainOnly,
            seed: 0,
        }
    }

    pub fn random_flat(schema: Schema, density: f64, seed: u64) -> DbGenerator {
        DbGenerator {
            schema,
            mode: GenMode::RandomFlat { density },
            seed,
        }
    }

    /// The database for domain size `n`; the same seed and `n` give the same database.
    pub fn generate(&self, n: usize) -> Result<Database, ProfileError> {
        let domain = numbered_domain(n);
        let density = match self.mode {
            GenMode::DomainOnly => return Ok(Database::with_domain(domain)?),
            GenMode::RandomFlat { density } => density,
        };
        if !(0.0..=1.0).contains(&density) {
            return Err(ProfileError::BadDensity(density));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut relations = Vec::new();
        for (name, ty) in self.schema.iter() {
            if !ty.is_flat() {
                return Err(ProfileError::NonFlatRelation(name.to_string()));
            }
            let universe = TupleUniverse::new(ty, &domain)?;
            let keep: Vec<usize> = (0..universe.len()).filter(|_| rng.gen_bool(density)).collect();
            relations.push((name.to_string(), universe.subset(keep)));
        }
        Ok(Database::new(domain, relations)?)
    }

    pub fn describe(&self) -> String {
        match self.mode {
            GenMode::DomainOnly => "domain-only".to_string(),
            GenMode::RandomFlat { density } => format!("random-flat:{density}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    FlatVarsOk,
    NonFlat,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::FlatVarsOk => "FLAT_VARS_OK",
            Verdict::NonFlat => "NON_FLAT",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrowthClass {
    PolyLike(u32),
    ExponentialLike,
    Inconclusive,
}

impl fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthClass::PolyLike(k) => write!(f, "POLY_LIKE({k})"),
            GrowthClass::ExponentialLike => f.write_str("EXPONENTIAL_LIKE"),
            GrowthClass::Inconclusive => f.write_str("INCONCLUSIVE"),
        }
    }
}

/// Least-squares fits of `ln(v+1)` against `ln n` and against `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub r2_poly: f64,
    pub r2_exp: f64,
    /// Slope of the log-log fit: the polynomial degree estimate.
    pub degree: f64,
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if syy <= f64::EPSILON * n {
        return (0.0, 1.0);
    }
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (my + slope * (x - mx))).powi(2))
        .sum();
    (slope, 1.0 - ss_res / syy)
}

pub fn fit_growth(ns: &[usize], values: &[f64]) -> GrowthFit {
    let ys: Vec<f64> = values.iter().map(|v| (v + 1.0).ln()).collect();
    let log_n: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let lin_n: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let (degree, r2_poly) = linear_fit(&log_n, &ys);
    let (_, r2_exp) = linear_fit(&lin_n, &ys);
    GrowthFit { r2_poly, r2_exp, degree }
}

/// Classifies a series measured at ascending domain sizes `ns`.
pub fn classify(ns: &[usize], values: &[f64]) -> GrowthClass {
    if ns.len() < MIN_POINTS || ns.len() != values.len() {
        return GrowthClass::Inconclusive;
    }
    let fit = fit_growth(ns, values);
    if fit.r2_exp >= MIN_R2 && fit.r2_exp >= fit.r2_poly + R2_GAP {
        GrowthClass::ExponentialLike
    } else if fit.r2_poly >= MIN_R2 {
        GrowthClass::PolyLike(fit.degree.max(0.0).round() as u32)
    } else {
        GrowthClass::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfilePoint {
    pub n: usize,
    /// Candidate space of the outermost solve, if there is one.
    pub candidates: BigUint,
    pub candidates_tested: u64,
    pub solutions_found: u64,
    pub peak_space_units: u64,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Series {
    /// Solution counts of an equation.
    Solutions,
    /// Metered peak space of an expression.
    PeakSpace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileReport {
    pub series: Series,
    pub generator: String,
    pub seed: u64,
    pub verdict: Verdict,
    pub growth: GrowthClass,
    /// Why profiling stopped early, if it did.
    pub truncated: Option<String>,
    pub points: Vec<ProfilePoint>,
}

impl ProfileReport {
    /// Human-readable table; wall times are left out so the output is reproducible.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{REPORT_HEADER}");
        let _ = writeln!(out, "generator: {} seed: {}", self.generator, self.seed);
        let _ = writeln!(out, "verdict: {}", self.verdict);
        let series = match self.series {
            Series::Solutions => "solutions",
            Series::PeakSpace => "peak space",
        };
        let _ = writeln!(out, "growth ({series}): {}", self.growth);
        if let Some(reason) = &self.truncated {
            let _ = writeln!(out, "truncated: {reason}");
        }
        let _ = writeln!(
            out,
            "{:>4} {:>14} {:>12} {:>10} {:>12}",
            "n", "candidates", "tested", "solutions", "peak_space"
        );
        for p in &self.points {
            let _ = writeln!(
                out,
                "{:>4} {:>14} {:>12} {:>10} {:>12}",
                p.n, p.candidates, p.candidates_tested, p.solutions_found, p.peak_space_units
            );
        }
        out
    }

    /// Machine-readable report in the bracketed list syntax of database files.
    pub fn document(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{REPORT_HEADER}");
        let series = match self.series {
            Series::Solutions => "solutions",
            Series::PeakSpace => "peak_space",
        };
        let _ = writeln!(out, "series [{series}]");
        let _ = writeln!(out, "generator [{}]", self.generator.replace([':', '.'], "_"));
        let _ = writeln!(out, "seed [{}]", self.seed);
        let _ = writeln!(out, "verdict [{}]", self.verdict);
        let growth = match self.growth {
            GrowthClass::PolyLike(k) => format!("[POLY_LIKE,{k}]"),
            other => format!("[{other}]"),
        };
        let _ = writeln!(out, "growth {growth}");
        let _ = writeln!(out, "truncated [{}]", if self.truncated.is_some() { "yes" } else { "no" });
        out.push_str("points [");
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(
                out,
                "[{},{},{},{},{}]",
                p.n, p.candidates, p.candidates_tested, p.solutions_found, p.peak_space_units
            );
        }
        out.push_str("]\n");
        out
    }

    pub fn values(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| match self.series {
                Series::Solutions => p.solutions_found as f64,
                Series::PeakSpace => p.peak_space_units as f64,
            })
            .collect()
    }
}

fn has_non_flat_binder(e: &Expr) -> bool {
    e.binders().iter().any(|b| !b.ty.is_flat())
}

fn check_range(range: &RangeInclusive<usize>) -> Result<(), ProfileError> {
    if *range.start() == 0 || range.start() > range.end() {
        return Err(ProfileError::BadRange);
    }
    Ok(())
}

fn run_series(
    e: &Expr,
    series: Series,
    gen: &DbGenerator,
    n_range: RangeInclusive<usize>,
    budget: &EvalBudget,
) -> Result<ProfileReport, ProfileError> {
    check_range(&n_range)?;
    let verdict = if has_non_flat_binder(e) {
        Verdict::NonFlat
    } else {
        Verdict::FlatVarsOk
    };
    let mut points = Vec::new();
    let mut truncated = None;
    for n in n_range {
        let db = gen.generate(n)?;
        let start = Instant::now();
        match eval(e, &db, budget) {
            Ok((_, m)) => {
                let outer = m.solves.first();
                points.push(ProfilePoint {
                    n,
                    candidates: outer.map_or_else(BigUint::default, |s| s.candidate_space.clone()),
                    candidates_tested: m.candidates_tested(),
                    solutions_found: outer.map_or(0, |s| s.solutions_found),
                    peak_space_units: m.peak_space_units,
                    wall_time: start.elapsed(),
                });
            }
            Err(EvalError::Budget(b)) => {
                truncated = Some(format!("n = {n}: {b}"));
                break;
            }
            Err(other) => return Err(ProfileError::Eval(other)),
        }
    }
    let ns: Vec<usize> = points.iter().map(|p| p.n).collect();
    let mut report = ProfileReport {
        series,
        generator: gen.describe(),
        seed: gen.seed,
        verdict,
        growth: GrowthClass::Inconclusive,
        truncated,
        points,
    };
    report.growth = classify(&ns, &report.values());
    Ok(report)
}

/// Solution counts of `eq` over databases of each domain size in `n_range`.
pub fn profile(
    eq: &Equation,
    gen: &DbGenerator,
    n_range: RangeInclusive<usize>,
    budget: &EvalBudget,
) -> Result<ProfileReport, ProfileError> {
    run_series(&eq.to_solve(), Series::Solutions, gen, n_range, budget)
}

/// Metered peak space of `e` over databases of each domain size in `n_range`.
pub fn meter_expression(
    e: &Expr,
    gen: &DbGenerator,
    n_range: RangeInclusive<usize>,
    budget: &EvalBudget,
) -> Result<ProfileReport, ProfileError> {
    run_series(e, Series::PeakSpace, gen, n_range, budget)
}

/// Whether every variable of the equation is flat.
pub fn flat_variables(eq: &Equation) -> bool {
    eq.vars.iter().all(|b| b.ty.is_flat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_powerset_eq, build_singleton_eq};
    use crate::parser::{parse_expr, parse_schema, parse_type};

    #[test]
    fn canonical_series() {
        let ns = [1, 2, 3, 4, 5];
        assert_eq!(classify(&ns, &[1.0, 2.0, 3.0, 4.0, 5.0]), GrowthClass::PolyLike(1));
        assert_eq!(classify(&[1, 2, 3, 4], &[2.0, 4.0, 8.0, 16.0]), GrowthClass::ExponentialLike);
        assert_eq!(classify(&[1, 2, 3, 4], &[7.0; 4]), GrowthClass::PolyLike(0));
        assert_eq!(classify(&[1, 2], &[1.0, 2.0]), GrowthClass::Inconclusive);
    }

    #[test]
    fn adding_a_point_keeps_the_class() {
        assert_eq!(classify(&[1, 2, 3, 4, 5, 6], &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]), GrowthClass::PolyLike(1));
        assert_eq!(
            classify(&[1, 2, 3, 4, 5], &[2.0, 4.0, 8.0, 16.0, 32.0]),
            GrowthClass::ExponentialLike
        );
    }

    #[test]
    fn singleton_profile() {
        let r = profile(&build_singleton_eq(), &DbGenerator::domain_only(), 1..=5, &EvalBudget::default()).unwrap();
        let counts: Vec<u64> = r.points.iter().map(|p| p.solutions_found).collect();
        assert_eq!(counts, [1, 2, 3, 4, 5]);
        assert_eq!(r.growth, GrowthClass::PolyLike(1));
        assert_eq!(r.verdict, Verdict::FlatVarsOk);
        assert!(r.truncated.is_none());
    }

    #[test]
    fn powerset_of_full_relation() {
        let gen = DbGenerator::random_flat(parse_schema("R:(0)").unwrap(), 1.0, 1);
        let eq = build_powerset_eq(parse_type("(0)").unwrap());
        let r = profile(&eq, &gen, 1..=4, &EvalBudget::default()).unwrap();
        let counts: Vec<u64> = r.points.iter().map(|p| p.solutions_found).collect();
        assert_eq!(counts, [2, 4, 8, 16]);
        assert_eq!(r.growth, GrowthClass::ExponentialLike);
    }

    #[test]
    fn nested_variable_is_non_flat() {
        let gen = DbGenerator::domain_only();
        let e = parse_expr("solve{(Y:((0))) | Y = Y}").unwrap();
        let r = meter_expression(&e, &gen, 1..=3, &EvalBudget::default()).unwrap();
        assert_eq!(r.verdict, Verdict::NonFlat);
    }

    #[test]
    fn budget_truncates() {
        let e = parse_expr("solve{(X:(0,0)) | X = X}").unwrap();
        let r = meter_expression(&e, &DbGenerator::domain_only(), 1..=6, &EvalBudget::default()).unwrap();
        assert_eq!(r.points.len(), 4);
        assert!(r.truncated.as_deref().unwrap().contains("max_candidates"));
    }

    #[test]
    fn generation_is_seeded() {
        let schema = parse_schema("R:(0,0), S:(0)").unwrap();
        let a = DbGenerator::random_flat(schema.clone(), 0.5, 42);
        let b = DbGenerator::random_flat(schema.clone(), 0.5, 42);
        let c = DbGenerator::random_flat(schema, 0.5, 43);
        assert_eq!(a.generate(4).unwrap(), b.generate(4).unwrap());
        assert_ne!(a.generate(4).unwrap(), c.generate(4).unwrap());
        assert!(DbGenerator::random_flat(parse_schema("R:((0))").unwrap(), 0.5, 1).generate(2).is_err());
    }

    #[test]
    fn reports_are_reproducible() {
        let gen = DbGenerator::domain_only();
        let a = profile(&build_singleton_eq(), &gen, 1..=4, &EvalBudget::default()).unwrap();
        let b = profile(&build_singleton_eq(), &gen, 1..=4, &EvalBudget::default()).unwrap();
        assert_eq!(a.table(), b.table());
        assert_eq!(a.document(), b.document());
        assert!(a.document().contains("points [[1,2,2,1,"));
    }
}
