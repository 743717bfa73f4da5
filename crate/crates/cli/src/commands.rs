//! Implementations of the CLI subcommands. Each returns the process exit
//! code: 0 success, 1 check/corpus failure, 2 usage or input errors.

use std::fmt::Write as _;
use std::path::Path;

use lmm_core::corpus::{corpus_case, corpus_cases, verify_case};
use lmm_core::expr::{FD_GRADIENT_STEP, FD_HESSIAN_STEP};
use lmm_core::{Matrix, Problem, SolverConfig, Verdict, DEFAULT_CLASSIFY_TOL};

use crate::problem_file::{parse_problem_file, render_case};
use crate::report::{
    fmt_short, fmt_tuple as fmt_vec, json_string, render_rank_json, render_rank_text,
    render_solve_json, render_solve_text, SolveReport,
};

pub struct SolveOptions {
    pub starts: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub json: bool,
}

impl SolveOptions {
    fn config(&self) -> Result<SolverConfig, String> {
        let mut cfg = SolverConfig::default();
        if let Some(s) = self.starts {
            if s == 0 {
                return Err("--starts must be positive".to_string());
            }
            cfg.starts = s;
        }
        if let Some(s) = self.seed {
            cfg.rng_seed = s;
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err("--tol must be a positive number".to_string());
            }
            cfg.stationarity_tol = t;
            // Deduplication must stay coarser than the solution accuracy.
            cfg.dedup_radius = cfg.dedup_radius.max(10.0 * t);
        }
        Ok(cfg)
    }
}

fn load_problem(path: &Path) -> Result<Problem, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: cannot read file: {e}", path.display()))?;
    parse_problem_file(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn cmd_solve(path: &Path, opts: &SolveOptions) -> i32 {
    let (problem, cfg) = match (load_problem(path), opts.config()) {
        (Ok(p), Ok(c)) => (p, c),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let report = match SolveReport::compute(&problem, &cfg, DEFAULT_CLASSIFY_TOL) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if opts.json {
        print!("{}", render_solve_json(&report));
    } else {
        print!("{}", render_solve_text(&report));
    }
    0
}

fn rank_caveats() -> Vec<String> {
    vec![
        "ranking critical points by objective value identifies a global minimum only under \
         extra hypotheses: a global minimum must exist and be attained at an interior point of \
         the domain, with linearly independent (in particular nonzero) constraint gradients \
         there. Without an existence argument (for example compactness of a sublevel set), the \
         smallest value below is not a certificate of global optimality."
            .to_string(),
        "the list covers the critical points found in the sample box by a finite multistart \
         search; it is not guaranteed to be complete."
            .to_string(),
    ]
}

pub fn cmd_rank(path: &Path, opts: &SolveOptions) -> i32 {
    let (problem, cfg) = match (load_problem(path), opts.config()) {
        (Ok(p), Ok(c)) => (p, c),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut report = match SolveReport::compute(&problem, &cfg, DEFAULT_CLASSIFY_TOL) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    report.sort_by_value();
    if report.points.is_empty() {
        report
            .warnings
            .push("empty ranking: no critical points to rank".to_string());
    } else if report.points[0].verdict != Verdict::StrictLocalMin {
        report.warnings.push(format!(
            "the smallest objective value is attained at a point whose verdict is \
             '{}', not a certified local minimizer; the smallest critical value can sit at a \
             saddle, so this ranking must not be read as a minimization result",
            report.points[0].verdict
        ));
    }
    let caveats = rank_caveats();
    if opts.json {
        print!("{}", render_rank_json(&report, &caveats));
    } else {
        print!("{}", render_rank_text(&report, &caveats));
    }
    0
}

pub fn cmd_corpus_list() -> i32 {
    for case in corpus_cases() {
        println!("{:<22} {}", case.id, case.title);
    }
    0
}

pub fn cmd_corpus_export(id: &str) -> i32 {
    match corpus_case(id) {
        Some(case) => {
            print!("{}", render_case(&case));
            0
        }
        None => {
            let known: Vec<&str> = corpus_cases().iter().map(|c| c.id).collect();
            eprintln!("error: unknown corpus id `{id}` (known: {})", known.join(", "));
            2
        }
    }
}

pub fn cmd_corpus_run(seed: Option<u64>, json: bool) -> i32 {
    let mut all_pass = true;
    let mut json_cases = Vec::new();
    let mut text = String::new();
    for mut case in corpus_cases() {
        if let Some(s) = seed {
            case.config.rng_seed = s;
        }
        let outcome = verify_case(&case);
        all_pass &= outcome.pass;
        if json {
            let checks: Vec<String> = outcome
                .checks
                .iter()
                .map(|c| {
                    format!(
                        "{{\"name\":{},\"pass\":{},\"detail\":{}}}",
                        json_string(c.name),
                        c.pass,
                        json_string(&c.detail)
                    )
                })
                .collect();
            json_cases.push(format!(
                "{{\"id\":{},\"pass\":{},\"checks\":[{}]}}",
                json_string(outcome.id),
                outcome.pass,
                checks.join(",")
            ));
        } else {
            let _ = writeln!(
                text,
                "case {:<22} {}",
                outcome.id,
                if outcome.pass { "PASS" } else { "FAIL" }
            );
            for c in &outcome.checks {
                if !c.pass {
                    let _ = writeln!(text, "  failed check `{}`: {}", c.name, c.detail);
                }
            }
        }
    }
    if json {
        println!(
            "{{\"seed\":{},\"cases\":[{}],\"pass\":{}}}",
            seed.unwrap_or(0),
            json_cases.join(","),
            all_pass
        );
    } else {
        let _ = writeln!(
            text,
            "{}",
            if all_pass {
                "all corpus cases pass"
            } else {
                "corpus FAILURES detected"
            }
        );
        print!("{text}");
    }
    if all_pass {
        0
    } else {
        1
    }
}

/// Relative-error limit for `check-grad`.
const CHECK_GRAD_LIMIT: f64 = 1e-4;

fn fmt_matrix(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = m.row(i).iter().map(|v| fmt_short(*v)).collect();
            cells.join(", ")
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

fn max_rel_err(exact: &[f64], approx: &[f64]) -> f64 {
    exact
        .iter()
        .zip(approx)
        .map(|(a, f)| (a - f).abs() / (1.0 + a.abs()))
        .fold(0.0, f64::max)
}

pub fn cmd_check_grad(path: &Path, point: &str) -> i32 {
    let problem = match load_problem(path) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let coords: Result<Vec<f64>, _> = point.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let x = match coords {
        Ok(x) if x.len() == problem.n_vars() && x.iter().all(|v| v.is_finite()) => x,
        Ok(x) => {
            eprintln!(
                "error: --point has {} coordinates, problem has {} variables",
                x.len(),
                problem.n_vars()
            );
            return 2;
        }
        Err(e) => {
            eprintln!("error: cannot parse --point: {e}");
            return 2;
        }
    };

    let mut worst = 0.0f64;
    let functions = std::iter::once(("objective".to_string(), problem.objective())).chain(
        problem
            .constraints()
            .iter()
            .enumerate()
            .map(|(i, c)| (format!("constraint {}", i + 1), c)),
    );
    for (name, e) in functions {
        println!("{name}: {e}");
        let ad_g = e.gradient(&x);
        let fd_g = e.fd_gradient(&x, FD_GRADIENT_STEP);
        let (ad_g, fd_g) = match (ad_g, fd_g) {
            (Ok(a), Ok(f)) => (a, f),
            (Err(err), _) | (_, Err(err)) => {
                eprintln!("error: {name}: {err}");
                return 2;
            }
        };
        let g_err = max_rel_err(&ad_g, &fd_g);
        println!("  gradient (exact): {}", fmt_vec(&ad_g));
        println!("  gradient (fd):    {}", fmt_vec(&fd_g));
        println!("  gradient max relative error: {g_err:.3e}");

        let ad_h = e.hessian(&x);
        let fd_h = e.fd_hessian(&x, FD_HESSIAN_STEP);
        let (ad_h, fd_h) = match (ad_h, fd_h) {
            (Ok(a), Ok(f)) => (a, f),
            (Err(err), _) | (_, Err(err)) => {
                eprintln!("error: {name}: {err}");
                return 2;
            }
        };
        let mut h_err = 0.0f64;
        for i in 0..ad_h.rows() {
            h_err = h_err.max(max_rel_err(ad_h.row(i), fd_h.row(i)));
        }
        println!("  hessian (exact):  {}", fmt_matrix(&ad_h));
        println!("  hessian (fd):     {}", fmt_matrix(&fd_h));
        println!("  hessian max relative error: {h_err:.3e}");
        worst = worst.max(g_err).max(h_err);
    }
    println!("overall max relative error: {worst:.3e} (limit {CHECK_GRAD_LIMIT:.0e})");
    if worst > CHECK_GRAD_LIMIT {
        println!("check FAILED");
        1
    } else {
        println!("check passed");
        0
    }
}
