//! Built-in fixture problems with known critical points, multipliers,
//! objective values and verdicts. They double as executable tests of the
//! whole pipeline (`verify_case`) and as exportable sample inputs for the
//! command line.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::classify::{classify, Verdict, DEFAULT_CLASSIFY_TOL};
use crate::fmath;
use crate::kkt::{find_critical_points, kkt_residual, Problem, SolverConfig};

/// Tolerances the corpus promises about its own data.
pub const EXPECTED_STATIONARITY_TOL: f64 = 1e-8;
pub const EXPECTED_VALUE_TOL: f64 = 1e-9;
/// Matching tolerances between expected and found points.
pub const MATCH_X_TOL: f64 = 1e-6;
pub const MATCH_LAMBDA_TOL: f64 = 1e-6;

/// One known critical point of a corpus problem.
#[derive(Clone, Debug)]
pub struct ExpectedPoint {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub verdict: Verdict,
    pub f_value: f64,
    /// Context the second-order test alone cannot express (e.g. a sharper
    /// label from higher-order analysis, or non-globality witnesses).
    pub annotation: Option<&'static str>,
}

/// A fixture problem with its full expected outcome.
#[derive(Clone, Debug)]
pub struct CorpusCase {
    pub id: &'static str,
    /// One-line summary for listings.
    pub title: &'static str,
    pub variables: &'static [&'static str],
    pub objective_src: &'static str,
    pub constraint_srcs: &'static [&'static str],
    /// `None` means the default sampling box.
    pub sample_box: Option<Vec<(f64, f64)>>,
    pub expected_points: Vec<ExpectedPoint>,
    /// What is known about global optimality, when anything is.
    pub global_note: Option<&'static str>,
    /// Solver settings the case is verified with.
    pub config: SolverConfig,
    /// Eigenvalue tolerance used when classifying the points the search
    /// found (the exact expected points always use the default tolerance).
    pub classify_tol: f64,
}

impl CorpusCase {
    pub fn problem(&self) -> Problem {
        Problem::from_sources(
            self.variables,
            self.objective_src,
            self.constraint_srcs,
            self.sample_box.clone(),
        )
        .expect("corpus sources are well-formed")
    }
}

fn cbrt(x: f64) -> f64 {
    fmath::powf(x, 1.0 / 3.0)
}

/// All built-in cases, in a stable order.
pub fn corpus_cases() -> Vec<CorpusCase> {
    vec![
        local_not_global_3d(),
        min_area_box(),
        septic_saddles(),
        cubic_parabola(),
        cone_plane(),
    ]
}

/// Looks a case up by id.
pub fn corpus_case(id: &str) -> Option<CorpusCase> {
    corpus_cases().into_iter().find(|c| c.id == id)
}

fn local_not_global_3d() -> CorpusCase {
    CorpusCase {
        id: "local-not-global-3d",
        title: "unique strict local min that is not global (plane-constrained surface)",
        variables: &["x1", "x2", "x3"],
        objective_src: "x1^2 + x2^2*(1-x1)^3",
        constraint_srcs: &["x3"],
        sample_box: Some(vec![(-2.0, 2.0); 3]),
        expected_points: vec![ExpectedPoint {
            x: vec![0.0, 0.0, 0.0],
            lambda: vec![0.0],
            verdict: Verdict::StrictLocalMin,
            f_value: 0.0,
            annotation: Some("local min but not global; f(4,1,0) = -11"),
        }],
        global_note: Some(
            "the origin is the only critical point and a strict local minimizer, yet not a \
             global one: f(4,1,0) = -11. A single critical point does not imply a global \
             minimum in more than one dimension. A wider-box search ([-6,6]^3) finds the same \
             single point.",
        ),
        config: SolverConfig::default(),
        classify_tol: DEFAULT_CLASSIFY_TOL,
    }
}

fn min_area_box() -> CorpusCase {
    let c = cbrt(2.0);
    CorpusCase {
        id: "min-area-box",
        title: "open-top box of fixed volume with minimal surface area",
        variables: &["x1", "x2", "x3"],
        objective_src: "x1*x2 + 2*x1*x3 + 2*x2*x3",
        constraint_srcs: &["x1*x2*x3 - 1"],
        sample_box: Some(vec![(0.1, 5.0); 3]),
        expected_points: vec![ExpectedPoint {
            x: vec![c, c, c / 2.0],
            lambda: vec![-2.0 * cbrt(4.0)],
            verdict: Verdict::StrictLocalMin,
            f_value: 3.0 * cbrt(4.0),
            annotation: None,
        }],
        global_note: Some(
            "global minimizer: the sublevel set {f <= 5} of the feasible surface is compact, \
             so a global minimum exists, and it must be this unique critical point.",
        ),
        config: SolverConfig::default(),
        classify_tol: DEFAULT_CLASSIFY_TOL,
    }
}

fn septic_saddles() -> CorpusCase {
    CorpusCase {
        id: "septic-saddles",
        title: "degree-7 polynomial on a line: smallest critical value is not a minimum",
        variables: &["x1", "x2"],
        objective_src: "1/7*x1^7 - 17/12*x1^6 + 51/10*x1^5 - 63/8*x1^4 + 9/2*x1^3",
        constraint_srcs: &["x2"],
        sample_box: None,
        expected_points: vec![
            ExpectedPoint {
                x: vec![0.0, 0.0],
                lambda: vec![0.0],
                verdict: Verdict::Indeterminate,
                f_value: 0.0,
                annotation: Some(
                    "saddle along the feasible line by higher-order analysis; the restricted \
                     derivative has a sign-preserving double root here",
                ),
            },
            ExpectedPoint {
                x: vec![1.0, 0.0],
                lambda: vec![0.0],
                verdict: Verdict::StrictLocalMax,
                f_value: 379.0 / 840.0,
                annotation: Some("f = 379/840, approximately 0.4511"),
            },
            ExpectedPoint {
                x: vec![1.5, 0.0],
                lambda: vec![0.0],
                verdict: Verdict::StrictLocalMin,
                f_value: 3159.0 / 8960.0,
                annotation: Some("f = 3159/8960, approximately 0.3525"),
            },
            ExpectedPoint {
                x: vec![3.0, 0.0],
                lambda: vec![0.0],
                verdict: Verdict::Indeterminate,
                f_value: 729.0 / 280.0,
                annotation: Some(
                    "saddle along the feasible line by higher-order analysis (f approximately \
                     2.6035); note the greatest critical value is not a local maximum either",
                ),
            },
        ],
        global_note: Some(
            "the smallest critical value (0) is not attained at a local minimizer: picking the \
             critical point with the smallest objective value can select a saddle.",
        ),
        config: SolverConfig {
            // The restricted derivative has double roots at 0 and 3;
            // converged iterates scatter more widely around those than
            // around simple roots, so merge generously. The points
            // themselves are at least 0.5 apart.
            dedup_radius: 1e-4,
            ..SolverConfig::default()
        },
        // At a double root the search lands within ~1e-6 of the point, and
        // that position error contaminates the projected curvature by up to
        // ~5e-5 (third-derivative scale ~54). The decisive curvatures of
        // this problem are O(1), so a 1e-4 tolerance separates the two
        // regimes cleanly.
        classify_tol: 1e-4,
    }
}

fn cubic_parabola() -> CorpusCase {
    CorpusCase {
        id: "cubic-parabola",
        title: "cubic objective on a parabola: one local min, one local max",
        variables: &["x1", "x2"],
        objective_src: "x2 - x1^3 + x1",
        constraint_srcs: &["x2 - x1^2"],
        sample_box: None,
        expected_points: vec![
            ExpectedPoint {
                x: vec![-1.0 / 3.0, 1.0 / 9.0],
                lambda: vec![-1.0],
                verdict: Verdict::StrictLocalMin,
                f_value: -5.0 / 27.0,
                annotation: Some("local min not global: f(2,4) = -2 < -5/27"),
            },
            ExpectedPoint {
                x: vec![1.0, 1.0],
                lambda: vec![-1.0],
                verdict: Verdict::StrictLocalMax,
                f_value: 1.0,
                annotation: None,
            },
        ],
        global_note: None,
        config: SolverConfig::default(),
        classify_tol: DEFAULT_CLASSIFY_TOL,
    }
}

fn cone_plane() -> CorpusCase {
    CorpusCase {
        id: "cone-plane",
        title: "lowest point of a cone-plane intersection curve",
        variables: &["x1", "x2", "x3"],
        objective_src: "x3",
        constraint_srcs: &["x1^2 + x2^2 - x3^2", "x1 + x3 - 2"],
        sample_box: None,
        expected_points: vec![ExpectedPoint {
            x: vec![1.0, 0.0, 1.0],
            lambda: vec![0.25, -0.5],
            verdict: Verdict::StrictLocalMin,
            f_value: 1.0,
            annotation: None,
        }],
        global_note: Some(
            "global minimizer: combining the constraints gives 4*(x3 - 1) = x2^2 >= 0 on the \
             feasible set, hence f(x) = x3 >= 1 everywhere.",
        ),
        config: SolverConfig::default(),
        classify_tol: DEFAULT_CLASSIFY_TOL,
    }
}

/// One named check of a case verification.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of verifying one corpus case end to end.
#[derive(Clone, Debug)]
pub struct CaseReport {
    pub id: &'static str,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    fmath::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Runs the full pipeline on a case and checks every promise it makes:
/// the expected points are stationary with the stated objective values, the
/// multistart search finds exactly the expected points (count, coordinates,
/// multipliers), and classification reproduces the expected verdicts.
pub fn verify_case(case: &CorpusCase) -> CaseReport {
    let p = case.problem();
    let mut checks = Vec::new();

    let mut worst_residual = 0.0f64;
    for e in &case.expected_points {
        let r = kkt_residual(&p, &e.x, &e.lambda).expect("expected points are inside the domain");
        let norm = r.iter().map(|v| fmath::abs(*v)).fold(0.0, f64::max);
        worst_residual = worst_residual.max(norm);
    }
    checks.push(CheckResult {
        name: "expected-stationarity",
        pass: worst_residual <= EXPECTED_STATIONARITY_TOL,
        detail: format!("max residual {worst_residual:.3e}"),
    });

    let mut worst_value = 0.0f64;
    for e in &case.expected_points {
        let v = p
            .objective()
            .eval(&e.x)
            .expect("expected points are inside the domain");
        worst_value = worst_value.max(fmath::abs(v - e.f_value));
    }
    checks.push(CheckResult {
        name: "expected-f-values",
        pass: worst_value <= EXPECTED_VALUE_TOL,
        detail: format!("max deviation {worst_value:.3e}"),
    });

    let result = find_critical_points(&p, &case.config);
    checks.push(CheckResult {
        name: "search-count",
        pass: result.points.len() == case.expected_points.len(),
        detail: format!(
            "found {} critical points in the sample box, expected {}",
            result.points.len(),
            case.expected_points.len()
        ),
    });

    // Pair each expected point with the nearest unused found point.
    let mut pairing: Vec<Option<usize>> = vec![None; case.expected_points.len()];
    let mut used = vec![false; result.points.len()];
    for (ei, e) in case.expected_points.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (fi, f) in result.points.iter().enumerate() {
            if used[fi] {
                continue;
            }
            let d = euclidean(&e.x, &f.x);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((fi, d));
            }
        }
        if let Some((fi, d)) = best {
            if d <= MATCH_X_TOL {
                pairing[ei] = Some(fi);
                used[fi] = true;
            }
        }
    }
    let matched = pairing.iter().filter(|m| m.is_some()).count();
    checks.push(CheckResult {
        name: "search-match",
        pass: matched == case.expected_points.len() && result.points.len() == matched,
        detail: format!(
            "{matched} of {} expected points matched within {MATCH_X_TOL:.0e}",
            case.expected_points.len()
        ),
    });

    let mut lambda_ok = true;
    let mut expected_verdict_ok = true;
    let mut found_verdict_ok = true;
    let mut verdicts = String::new();
    for (ei, e) in case.expected_points.iter().enumerate() {
        let exact = crate::kkt::CriticalPoint {
            x: e.x.clone(),
            lambda: e.lambda.clone(),
            residual_norm: 0.0,
        };
        let at_expected = classify(&p, &exact, DEFAULT_CLASSIFY_TOL)
            .expect("classification succeeds on expected points");
        if at_expected.verdict != e.verdict {
            expected_verdict_ok = false;
        }

        let Some(fi) = pairing[ei] else {
            lambda_ok = false;
            found_verdict_ok = false;
            continue;
        };
        let found = &result.points[fi];
        for (a, b) in e.lambda.iter().zip(&found.lambda) {
            if fmath::abs(a - b) > MATCH_LAMBDA_TOL {
                lambda_ok = false;
            }
        }
        let report = classify(&p, found, case.classify_tol)
            .expect("classification succeeds on found points");
        if !verdicts.is_empty() {
            verdicts.push_str(", ");
        }
        verdicts.push_str(report.verdict.label());
        if report.verdict != e.verdict {
            found_verdict_ok = false;
        }
    }
    checks.push(CheckResult {
        name: "multipliers",
        pass: lambda_ok,
        detail: format!("multipliers within {MATCH_LAMBDA_TOL:.0e} of expected"),
    });
    checks.push(CheckResult {
        name: "expected-verdicts",
        pass: expected_verdict_ok,
        detail: String::from("classification at the exact expected points"),
    });
    checks.push(CheckResult {
        name: "found-verdicts",
        pass: found_verdict_ok,
        detail: verdicts,
    });

    CaseReport {
        id: case.id,
        pass: checks.iter().all(|c| c.pass),
        checks,
    }
}
