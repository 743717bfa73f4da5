//! Solve/rank reports and their two renderings: a human-readable text form
//! and a deterministic JSON form.
//!
//! JSON numbers are written with 17 significant digits (`{:.16e}`), enough
//! to reproduce every f64 bit-exactly on re-parse, so identical runs emit
//! byte-identical documents.

use std::fmt::Write as _;

use lmm_core::{classify, CriticalPoint, Problem, SolverConfig, SpecializedCheck, Verdict};

/// One classified critical point, ready for rendering.
#[derive(Clone, Debug)]
pub struct PointReport {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    pub residual_norm: f64,
    pub f_value: f64,
    pub verdict: Verdict,
    pub licq_ok: bool,
    pub eigenvalues: Option<Vec<f64>>,
    pub specialized: Option<SpecializedCheck>,
}

/// Everything one `solve` (or `rank`) invocation produces.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub variables: Vec<String>,
    pub objective: String,
    pub constraints: Vec<String>,
    pub sample_box: Vec<(f64, f64)>,
    pub config: SolverConfig,
    pub skipped_seeds: usize,
    pub converged_runs: usize,
    pub diverged_runs: usize,
    pub points: Vec<PointReport>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    /// Runs the full pipeline (multistart search + classification) and
    /// collects the outcome.
    pub fn compute(p: &Problem, cfg: &SolverConfig, classify_tol: f64) -> Result<SolveReport, String> {
        let result = lmm_core::find_critical_points(p, cfg);
        let mut points = Vec::with_capacity(result.points.len());
        for cp in &result.points {
            points.push(classify_point(p, cp, classify_tol)?);
        }
        let mut warnings = Vec::new();
        if points.is_empty() {
            warnings.push(format!(
                "no critical points found in the sample box ({} starts); the box may not \
                 contain any, or the search may have missed them; try more starts or a \
                 different box",
                cfg.starts
            ));
        }
        if result.skipped_seeds > 0 {
            warnings.push(format!(
                "{} of {} seeds were outside an expression domain and were skipped",
                result.skipped_seeds, cfg.starts
            ));
        }
        Ok(SolveReport {
            variables: p.variables().to_vec(),
            objective: p.objective().to_string(),
            constraints: p.constraints().iter().map(|c| c.to_string()).collect(),
            sample_box: p.sample_box().to_vec(),
            config: cfg.clone(),
            skipped_seeds: result.skipped_seeds,
            converged_runs: result.converged_runs,
            diverged_runs: result.diverged_runs,
            points,
            warnings,
        })
    }

    /// Sorts the points by ascending objective value (stable).
    pub fn sort_by_value(&mut self) {
        self.points
            .sort_by(|a, b| a.f_value.partial_cmp(&b.f_value).expect("finite objective values"));
    }
}

pub fn classify_point(
    p: &Problem,
    cp: &CriticalPoint,
    classify_tol: f64,
) -> Result<PointReport, String> {
    let f_value = p
        .objective()
        .eval(&cp.x)
        .map_err(|e| format!("objective evaluation failed at a critical point: {e}"))?;
    let report = classify(p, cp, classify_tol).map_err(|e| format!("classification failed: {e}"))?;
    Ok(PointReport {
        x: cp.x.clone(),
        lambda: cp.lambda.clone(),
        residual_norm: cp.residual_norm,
        f_value,
        verdict: report.verdict,
        licq_ok: report.licq_ok,
        eigenvalues: report.detail.as_ref().map(|d| d.eigenvalues.clone()),
        specialized: report.detail.and_then(|d| d.specialized),
    })
}

// ---------------------------------------------------------------------------
// JSON rendering
// ---------------------------------------------------------------------------

/// 17 significant digits; round-trips every finite f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn json_f64_array(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|v| fmt_f64(*v)).collect();
    format!("[{}]", items.join(","))
}

fn json_string_array(xs: &[String]) -> String {
    let items: Vec<String> = xs.iter().map(|s| json_string(s)).collect();
    format!("[{}]", items.join(","))
}

fn json_point(pt: &PointReport) -> String {
    let eigen = match &pt.eigenvalues {
        Some(e) => json_f64_array(e),
        None => "null".to_string(),
    };
    let special = match &pt.specialized {
        Some(SpecializedCheck::TangentQuadForm { v, value }) => format!(
            "{{\"branch\":\"tangent-quadratic-form\",\"v\":{},\"value\":{}}}",
            json_f64_array(v),
            fmt_f64(*value)
        ),
        Some(SpecializedCheck::LeadingMinor { v1, v2, a11, det }) => format!(
            "{{\"branch\":\"leading-minor\",\"v1\":{},\"v2\":{},\"a11\":{},\"det\":{}}}",
            json_f64_array(v1),
            json_f64_array(v2),
            fmt_f64(*a11),
            fmt_f64(*det)
        ),
        None => "null".to_string(),
    };
    format!(
        "{{\"x\":{},\"lambda\":{},\"residual_norm\":{},\"f_value\":{},\"verdict\":{},\"licq_ok\":{},\"eigenvalues\":{},\"specialized_check\":{}}}",
        json_f64_array(&pt.x),
        json_f64_array(&pt.lambda),
        fmt_f64(pt.residual_norm),
        fmt_f64(pt.f_value),
        json_string(pt.verdict.label()),
        pt.licq_ok,
        eigen,
        special
    )
}

fn json_header(report: &SolveReport) -> String {
    let box_items: Vec<String> = report
        .sample_box
        .iter()
        .map(|(lo, hi)| format!("[{},{}]", fmt_f64(*lo), fmt_f64(*hi)))
        .collect();
    format!(
        "\"problem\":{{\"variables\":{},\"objective\":{},\"constraints\":{},\"sample_box\":[{}]}},\
         \"config\":{{\"starts\":{},\"max_newton_iters\":{},\"stationarity_tol\":{},\"dedup_radius\":{},\"min_step\":{},\"rng_seed\":{}}},\
         \"search\":{{\"skipped_seeds\":{},\"converged_runs\":{},\"diverged_runs\":{}}}",
        json_string_array(&report.variables),
        json_string(&report.objective),
        json_string_array(&report.constraints),
        box_items.join(","),
        report.config.starts,
        report.config.max_newton_iters,
        fmt_f64(report.config.stationarity_tol),
        fmt_f64(report.config.dedup_radius),
        fmt_f64(report.config.min_step),
        report.config.rng_seed,
        report.skipped_seeds,
        report.converged_runs,
        report.diverged_runs,
    )
}

pub fn render_solve_json(report: &SolveReport) -> String {
    let pts: Vec<String> = report.points.iter().map(json_point).collect();
    format!(
        "{{{},\"critical_points\":[{}],\"warnings\":{}}}\n",
        json_header(report),
        pts.join(","),
        json_string_array(&report.warnings)
    )
}

pub fn render_rank_json(report: &SolveReport, caveats: &[String]) -> String {
    let pts: Vec<String> = report
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{{\"rank\":{},\"point\":{}}}", i + 1, json_point(p)))
        .collect();
    format!(
        "{{{},\"ranking\":[{}],\"caveats\":{},\"warnings\":{}}}\n",
        json_header(report),
        pts.join(","),
        json_string_array(caveats),
        json_string_array(&report.warnings)
    )
}

// ---------------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------------

/// Full-precision but readable: plain decimal in a sane magnitude range,
/// exponent notation outside it.
pub fn fmt_short(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() < 1e-4 || v.abs() >= 1e9 {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn fmt_tuple(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|v| fmt_short(*v)).collect();
    format!("({})", items.join(", "))
}

fn describe_specialized(check: &SpecializedCheck) -> String {
    match check {
        SpecializedCheck::TangentQuadForm { v, value } => {
            let reading = if *value > 0.0 {
                "> 0, consistent with a local min"
            } else if *value < 0.0 {
                "< 0, consistent with a local max"
            } else {
                "= 0, inconclusive"
            };
            format!(
                "tangent direction v = {}: v^T H v = {} {}",
                fmt_tuple(v),
                fmt_short(*value),
                reading
            )
        }
        SpecializedCheck::LeadingMinor { v1, v2, a11, det } => {
            let reading = if *a11 > 0.0 && *det > 0.0 {
                "positive definite, consistent with a local min"
            } else if *a11 < 0.0 && *det > 0.0 {
                "negative definite, consistent with a local max"
            } else if *det < 0.0 {
                "indefinite (saddle)"
            } else {
                "inconclusive"
            };
            format!(
                "basis v1 = {}, v2 = {}: a11 = {}, det A = {} -> {}",
                fmt_tuple(v1),
                fmt_tuple(v2),
                fmt_short(*a11),
                fmt_short(*det),
                reading
            )
        }
    }
}

fn push_point_block(out: &mut String, idx: usize, pt: &PointReport) {
    let _ = writeln!(out, "point {idx}");
    let _ = writeln!(out, "  x        = {}", fmt_tuple(&pt.x));
    let _ = writeln!(out, "  lambda   = {}", fmt_tuple(&pt.lambda));
    let _ = writeln!(out, "  f        = {}", fmt_short(pt.f_value));
    let _ = writeln!(out, "  residual = {:.2e}", pt.residual_norm);
    let _ = writeln!(out, "  verdict  = {}", pt.verdict);
    if let Some(e) = &pt.eigenvalues {
        let items: Vec<String> = e.iter().map(|v| fmt_short(*v)).collect();
        let _ = writeln!(out, "  projected Hessian eigenvalues: {}", items.join(", "));
    }
    if let Some(s) = &pt.specialized {
        let _ = writeln!(out, "  cross-check: {}", describe_specialized(s));
    }
}

pub fn render_solve_text(report: &SolveReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "problem: {} variables ({}), {} constraint{}",
        report.variables.len(),
        report.variables.join(", "),
        report.constraints.len(),
        if report.constraints.len() == 1 { "" } else { "s" }
    );
    let _ = writeln!(
        out,
        "search: {} starts (seed {}); {} converged, {} diverged, {} skipped",
        report.config.starts,
        report.config.rng_seed,
        report.converged_runs,
        report.diverged_runs,
        report.skipped_seeds
    );
    let _ = writeln!(
        out,
        "found {} critical point{} in the sample box\n",
        report.points.len(),
        if report.points.len() == 1 { "" } else { "s" }
    );
    if !report.points.is_empty() {
        let _ = writeln!(out, "{:>3}  {:<22} {:<18} x", "#", "f_value", "verdict");
        for (i, pt) in report.points.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>3}  {:<22} {:<18} {}",
                i + 1,
                fmt_short(pt.f_value),
                format!("{}", pt.verdict),
                fmt_tuple(&pt.x)
            );
        }
        out.push('\n');
    }
    for (i, pt) in report.points.iter().enumerate() {
        push_point_block(&mut out, i + 1, pt);
        out.push('\n');
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn render_rank_text(report: &SolveReport, caveats: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "ranking of {} critical point{} found in the sample box, by objective value:\n",
        report.points.len(),
        if report.points.len() == 1 { "" } else { "s" }
    );
    let _ = writeln!(out, "{:>4}  {:<24} {:<18} x", "rank", "f_value", "verdict");
    for (i, pt) in report.points.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>4}  {:<24} {:<18} {}",
            i + 1,
            fmt_short(pt.f_value),
            format!("{}", pt.verdict),
            fmt_tuple(&pt.x)
        );
    }
    out.push('\n');
    for c in caveats {
        let _ = writeln!(out, "note: {c}");
    }
    for w in &report.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}
