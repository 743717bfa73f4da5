//! Stationarity system of the constrained problem and its numerical
//! solution.
//!
//! A point x with multipliers lambda is critical when
//!
//! ```text
//! grad f(x) + sum_i lambda_i * grad g_i(x) = 0
//! g(x) = 0
//! ```
//!
//! [`kkt_residual`] stacks the two blocks, [`kkt_jacobian`] is its exact
//! linearization, [`solve_from`] runs damped Newton from one start and
//! [`find_critical_points`] sweeps a deterministic low-discrepancy seed set
//! over the sample box and deduplicates the converged roots.
//!
//! Root finding over a box is not exhaustive in general: the result is
//! always "the critical points found in the sample box", never a
//! completeness claim.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::classify::lagrangian_hessian_at;
use crate::expr::{EvalError, Expression};
use crate::fmath;
use crate::linalg::{solve_linear, Matrix};

/// Which function of a problem an evaluation error came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FuncId {
    Objective,
    Constraint(usize),
}

impl fmt::Display for FuncId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FuncId::Objective => write!(f, "objective"),
            FuncId::Constraint(i) => write!(f, "constraint {}", i + 1),
        }
    }
}

/// A domain error tagged with the function it occurred in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProblemEvalError {
    pub func: FuncId,
    pub source: EvalError,
}

impl fmt::Display for ProblemEvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.func, self.source)
    }
}

impl core::error::Error for ProblemEvalError {}

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemError {
    NoVariables,
    /// Need 1 <= m < n.
    ConstraintCount { variables: usize, constraints: usize },
    ArityMismatch { func: FuncId, expected: usize, found: usize },
    BoxDimension { expected: usize, found: usize },
    /// Interval with lo >= hi (or non-finite bounds).
    DegenerateBox { index: usize },
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::NoVariables => write!(f, "problem has no variables"),
            ProblemError::ConstraintCount { variables, constraints } => write!(
                f,
                "need at least one and fewer constraints than variables, got {constraints} constraints over {variables} variables"
            ),
            ProblemError::ArityMismatch { func, expected, found } => write!(
                f,
                "{func} is over {found} variables but the problem has {expected}"
            ),
            ProblemError::BoxDimension { expected, found } => {
                write!(f, "sample box has {found} intervals, expected {expected}")
            }
            ProblemError::DegenerateBox { index } => {
                write!(f, "sample box interval {} is empty or not finite", index + 1)
            }
        }
    }
}

impl core::error::Error for ProblemError {}

/// Default per-variable sampling interval when none is given.
pub const DEFAULT_SAMPLE_INTERVAL: (f64, f64) = (-5.0, 5.0);

/// An equality-constrained minimization problem: an objective, m constraint
/// expressions (1 <= m < n) over the same n variables, and a sampling box
/// for multistart seeding.
#[derive(Clone, Debug)]
pub struct Problem {
    variables: Vec<String>,
    objective: Expression,
    constraints: Vec<Expression>,
    sample_box: Vec<(f64, f64)>,
}

impl Problem {
    pub fn new(
        objective: Expression,
        constraints: Vec<Expression>,
        sample_box: Option<Vec<(f64, f64)>>,
    ) -> Result<Problem, ProblemError> {
        let variables = objective.variables().to_vec();
        let n = variables.len();
        if n == 0 {
            return Err(ProblemError::NoVariables);
        }
        let m = constraints.len();
        if m == 0 || m >= n {
            return Err(ProblemError::ConstraintCount {
                variables: n,
                constraints: m,
            });
        }
        for (i, g) in constraints.iter().enumerate() {
            if g.arity() != n {
                return Err(ProblemError::ArityMismatch {
                    func: FuncId::Constraint(i),
                    expected: n,
                    found: g.arity(),
                });
            }
        }
        let sample_box = match sample_box {
            Some(b) => {
                if b.len() != n {
                    return Err(ProblemError::BoxDimension {
                        expected: n,
                        found: b.len(),
                    });
                }
                for (i, (lo, hi)) in b.iter().enumerate() {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(ProblemError::DegenerateBox { index: i });
                    }
                }
                b
            }
            None => vec![DEFAULT_SAMPLE_INTERVAL; n],
        };
        Ok(Problem {
            variables,
            objective,
            constraints,
            sample_box,
        })
    }

    /// Convenience constructor from source strings.
    pub fn from_sources<S: AsRef<str>>(
        variables: &[S],
        objective: &str,
        constraints: &[&str],
        sample_box: Option<Vec<(f64, f64)>>,
    ) -> Result<Problem, crate::expr::ParseError> {
        let obj = Expression::parse(objective, variables)?;
        let gs = constraints
            .iter()
            .map(|src| Expression::parse(src, variables))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Problem::new(obj, gs, sample_box).expect("parsed expressions share the variable list"))
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn objective(&self) -> &Expression {
        &self.objective
    }

    pub fn constraints(&self) -> &[Expression] {
        &self.constraints
    }

    pub fn sample_box(&self) -> &[(f64, f64)] {
        &self.sample_box
    }

    pub(crate) fn objective_gradient(&self, x: &[f64]) -> Result<Vec<f64>, ProblemEvalError> {
        self.objective.gradient(x).map_err(|source| ProblemEvalError {
            func: FuncId::Objective,
            source,
        })
    }

    /// Constraint Jacobian: row i is grad g_i(x).
    pub fn constraint_jacobian(&self, x: &[f64]) -> Result<Matrix, ProblemEvalError> {
        let n = self.n_vars();
        let m = self.n_constraints();
        let mut j = Matrix::zeros(m, n);
        for (i, g) in self.constraints.iter().enumerate() {
            let grad = g.gradient(x).map_err(|source| ProblemEvalError {
                func: FuncId::Constraint(i),
                source,
            })?;
            for k in 0..n {
                j[(i, k)] = grad[k];
            }
        }
        Ok(j)
    }
}

/// A numerically certified stationary point.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub x: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Infinity norm of the stationarity residual at (x, lambda).
    pub residual_norm: f64,
}

/// Tuning knobs of the multistart Newton solver.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Number of multistart seeds.
    pub starts: usize,
    pub max_newton_iters: usize,
    /// Acceptance threshold on the residual infinity norm.
    pub stationarity_tol: f64,
    /// Converged points closer than this (euclidean, in x) are merged.
    pub dedup_radius: f64,
    /// Smallest backtracking step factor before a step counts as collapsed.
    pub min_step: f64,
    /// Seed of the low-discrepancy scramble; same seed, same output.
    pub rng_seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 64,
            max_newton_iters: 100,
            stationarity_tol: 1e-9,
            dedup_radius: 1e-6,
            min_step: 9.313225746154785e-10, // 2^-30
            rng_seed: 0,
        }
    }
}

impl SolverConfig {
    fn validate(&self) {
        assert!(self.starts > 0, "starts must be positive");
        assert!(self.max_newton_iters > 0, "max_newton_iters must be positive");
        assert!(self.stationarity_tol > 0.0, "stationarity_tol must be positive");
        assert!(self.dedup_radius > 0.0, "dedup_radius must be positive");
        assert!(self.min_step > 0.0, "min_step must be positive");
        assert!(
            self.dedup_radius > self.stationarity_tol,
            "dedup_radius must exceed stationarity_tol"
        );
    }
}

/// Stacked stationarity residual: n rows of grad f + sum lambda_i grad g_i,
/// then the m constraint values.
pub fn kkt_residual(
    p: &Problem,
    x: &[f64],
    lambda: &[f64],
) -> Result<Vec<f64>, ProblemEvalError> {
    assert_eq!(x.len(), p.n_vars(), "x has the wrong dimension");
    assert_eq!(lambda.len(), p.n_constraints(), "lambda has the wrong dimension");
    let n = p.n_vars();
    let mut r = p.objective_gradient(x)?;
    for (i, g) in p.constraints.iter().enumerate() {
        let grad = g.gradient(x).map_err(|source| ProblemEvalError {
            func: FuncId::Constraint(i),
            source,
        })?;
        for k in 0..n {
            r[k] += lambda[i] * grad[k];
        }
    }
    for (i, g) in p.constraints.iter().enumerate() {
        let v = g.eval(x).map_err(|source| ProblemEvalError {
            func: FuncId::Constraint(i),
            source,
        })?;
        r.push(v);
    }
    Ok(r)
}

/// Exact Jacobian of [`kkt_residual`]: the block matrix
/// `[[H, Jg^T], [Jg, 0]]` with H the Lagrangian Hessian and Jg the
/// constraint Jacobian.
pub fn kkt_jacobian(p: &Problem, x: &[f64], lambda: &[f64]) -> Result<Matrix, ProblemEvalError> {
    assert_eq!(x.len(), p.n_vars(), "x has the wrong dimension");
    assert_eq!(lambda.len(), p.n_constraints(), "lambda has the wrong dimension");
    let n = p.n_vars();
    let m = p.n_constraints();
    let h = lagrangian_hessian_at(p, x, lambda)?;
    let jg = p.constraint_jacobian(x)?;
    let mut out = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = h[(i, j)];
        }
    }
    for i in 0..m {
        for j in 0..n {
            out[(n + i, j)] = jg[(i, j)];
            out[(j, n + i)] = jg[(i, j)];
        }
    }
    Ok(out)
}

/// Why a single Newton run failed to deliver a critical point.
#[derive(Clone, Debug, PartialEq)]
pub enum DivergenceReason {
    IterationsExhausted,
    /// Backtracking found no residual-reducing step.
    StepCollapse,
    /// Iterates left a 10x inflation of the sample box.
    LeftSearchRegion,
    /// The Newton system was singular at the current iterate.
    SingularSystem,
    /// The residual or Jacobian could not be evaluated at the iterate.
    EvalFailed(ProblemEvalError),
}

impl fmt::Display for DivergenceReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DivergenceReason::IterationsExhausted => write!(f, "iteration limit reached"),
            DivergenceReason::StepCollapse => write!(f, "line search step collapsed"),
            DivergenceReason::LeftSearchRegion => write!(f, "iterates left the search region"),
            DivergenceReason::SingularSystem => write!(f, "singular Newton system"),
            DivergenceReason::EvalFailed(e) => write!(f, "evaluation failed: {e}"),
        }
    }
}

/// Outcome of a single damped-Newton run.
#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Converged(CriticalPoint),
    Diverged(DivergenceReason),
}

impl SolveOutcome {
    pub fn converged(self) -> Option<CriticalPoint> {
        match self {
            SolveOutcome::Converged(cp) => Some(cp),
            SolveOutcome::Diverged(_) => None,
        }
    }
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().map(|x| fmath::abs(*x)).fold(0.0, f64::max)
}

fn norm2(v: &[f64]) -> f64 {
    fmath::sqrt(v.iter().map(|x| x * x).sum())
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// |x_i - center_i| <= 10 * half-width_i for every coordinate.
fn inside_inflated_box(x: &[f64], sample_box: &[(f64, f64)]) -> bool {
    x.iter().zip(sample_box).all(|(&xi, &(lo, hi))| {
        let center = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        fmath::abs(xi - center) <= 10.0 * half
    })
}

/// Damped Newton on the stationarity system from a single start.
///
/// Each iteration tries the Newton direction first, backtracking (halving)
/// until the residual 2-norm strictly decreases. When the Newton system is
/// singular (which genuinely happens, e.g. at multiplier-zero starts of
/// problems with a linear objective) or its direction yields no decrease,
/// the iteration falls back to a ridge-damped least-squares direction and
/// then to the merit gradient -J^T r. Iteration continues while progress is
/// possible (also past the acceptance threshold, which polishes multiple
/// roots of the restricted derivative far beyond the threshold alone) and
/// stops on step collapse, the iteration limit, or when the iterate leaves
/// a 10x inflation of the sample box; success means the final residual
/// infinity norm is within tolerance. A start that already satisfies the
/// tolerance returns immediately.
pub fn solve_from(
    p: &Problem,
    start_x: &[f64],
    start_lambda: &[f64],
    cfg: &SolverConfig,
) -> SolveOutcome {
    let n = p.n_vars();
    let m = p.n_constraints();
    assert_eq!(start_x.len(), n, "start_x has the wrong dimension");
    assert_eq!(start_lambda.len(), m, "start_lambda has the wrong dimension");

    let mut z: Vec<f64> = start_x.iter().chain(start_lambda).copied().collect();
    let mut r = match kkt_residual(p, &z[..n], &z[n..]) {
        Ok(r) => r,
        Err(e) => return SolveOutcome::Diverged(DivergenceReason::EvalFailed(e)),
    };
    if !finite(&r) {
        return SolveOutcome::Diverged(DivergenceReason::EvalFailed(ProblemEvalError {
            func: FuncId::Objective,
            source: EvalError::DivisionByZero,
        }));
    }
    if norm_inf(&r) <= cfg.stationarity_tol {
        return SolveOutcome::Converged(CriticalPoint {
            x: z[..n].to_vec(),
            lambda: z[n..].to_vec(),
            residual_norm: norm_inf(&r),
        });
    }
    let mut merit = norm2(&r);

    let finish = |r: &[f64], z: &[f64], reason: DivergenceReason| {
        let nr = norm_inf(r);
        if nr <= cfg.stationarity_tol {
            SolveOutcome::Converged(CriticalPoint {
                x: z[..n].to_vec(),
                lambda: z[n..].to_vec(),
                residual_norm: nr,
            })
        } else {
            SolveOutcome::Diverged(reason)
        }
    };

    for _ in 0..cfg.max_newton_iters {
        let jac = match kkt_jacobian(p, &z[..n], &z[n..]) {
            Ok(j) => j,
            Err(e) => return finish(&r, &z, DivergenceReason::EvalFailed(e)),
        };
        let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
        let newton_dir = solve_linear(&jac, &neg_r).ok().filter(|d| finite(d));
        let had_newton = newton_dir.is_some();

        let mut accepted = None;
        for kind in [Direction::Newton, Direction::LeastSquares, Direction::Gradient] {
            let delta = match kind {
                Direction::Newton => match &newton_dir {
                    Some(d) => d.clone(),
                    None => continue,
                },
                Direction::LeastSquares => match least_squares_direction(&jac, &neg_r) {
                    Some(d) => d,
                    None => continue,
                },
                Direction::Gradient => transpose_apply(&jac, &neg_r),
            };
            if !finite(&delta) {
                continue;
            }
            let mut alpha = 1.0;
            while alpha >= cfg.min_step {
                let trial: Vec<f64> =
                    z.iter().zip(&delta).map(|(zi, di)| zi + alpha * di).collect();
                if let Ok(rt) = kkt_residual(p, &trial[..n], &trial[n..]) {
                    // Evaluation failures just reject the step.
                    if finite(&rt) && norm2(&rt) < merit {
                        accepted = Some((trial, rt));
                        break;
                    }
                }
                alpha *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
        }

        match accepted {
            Some((trial, rt)) => {
                merit = norm2(&rt);
                z = trial;
                r = rt;
            }
            None => {
                let reason = if had_newton {
                    DivergenceReason::StepCollapse
                } else {
                    DivergenceReason::SingularSystem
                };
                return finish(&r, &z, reason);
            }
        }
        if !inside_inflated_box(&z[..n], p.sample_box()) {
            return SolveOutcome::Diverged(DivergenceReason::LeftSearchRegion);
        }
        if merit == 0.0 {
            break;
        }
    }
    finish(&r, &z, DivergenceReason::IterationsExhausted)
}

#[derive(Clone, Copy)]
enum Direction {
    Newton,
    LeastSquares,
    Gradient,
}

/// J^T v.
fn transpose_apply(jac: &Matrix, v: &[f64]) -> Vec<f64> {
    let dim = jac.cols();
    (0..dim)
        .map(|col| (0..jac.rows()).map(|row| jac[(row, col)] * v[row]).sum())
        .collect()
}

/// Damped least-squares direction: solves (J^T J + ridge I) d = J^T (-r),
/// the Levenberg-Marquardt surrogate for a singular or near-singular Newton
/// system. The ridge escalates until the normal equations are solvable.
fn least_squares_direction(jac: &Matrix, neg_r: &[f64]) -> Option<Vec<f64>> {
    let dim = jac.rows();
    let mut jtj = Matrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let v: f64 = (0..dim).map(|k| jac[(k, i)] * jac[(k, j)]).sum();
            jtj[(i, j)] = v;
            jtj[(j, i)] = v;
        }
    }
    let scale = jtj.max_abs_entry();
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    let jtr = transpose_apply(jac, neg_r);
    let mut ridge = 1e-10 * scale;
    for _ in 0..4 {
        let mut damped = jtj.clone();
        for i in 0..dim {
            damped[(i, i)] += ridge;
        }
        if let Ok(d) = solve_linear(&damped, &jtr) {
            if finite(&d) {
                return Some(d);
            }
        }
        ridge *= 1e4;
    }
    None
}

/// Result of a multistart sweep.
#[derive(Clone, Debug)]
pub struct MultistartResult {
    /// Deduplicated critical points, sorted lexicographically by coordinates.
    pub points: Vec<CriticalPoint>,
    /// Seeds whose residual could not be evaluated (outside some domain).
    pub skipped_seeds: usize,
    /// Newton runs that converged (before deduplication).
    pub converged_runs: usize,
    /// Newton runs that diverged.
    pub diverged_runs: usize,
}

/// Multistart search for critical points in the sample box.
///
/// Seeds are a Halton sequence scrambled by `rng_seed` (a Cranley-Patterson
/// rotation), mapped onto the box, with all multipliers started at zero.
/// Converged points closer than `dedup_radius` keep the smallest residual;
/// the survivors are sorted lexicographically, so the output is a
/// deterministic function of problem and configuration.
pub fn find_critical_points(p: &Problem, cfg: &SolverConfig) -> MultistartResult {
    cfg.validate();
    let n = p.n_vars();
    let m = p.n_constraints();
    let rotation = cranley_patterson_rotation(n, cfg.rng_seed);

    let mut candidates = Vec::new();
    let mut skipped = 0usize;
    let mut diverged = 0usize;
    for k in 0..cfg.starts {
        let x0: Vec<f64> = (0..n)
            .map(|d| {
                let u = halton(k as u64 + 1, HALTON_PRIMES[d]);
                let u = (u + rotation[d]) % 1.0;
                let (lo, hi) = p.sample_box()[d];
                lo + u * (hi - lo)
            })
            .collect();
        let lambda0 = vec![0.0; m];
        if kkt_residual(p, &x0, &lambda0).is_err() {
            skipped += 1;
            continue;
        }
        match solve_from(p, &x0, &lambda0, cfg) {
            SolveOutcome::Converged(cp) => candidates.push(cp),
            SolveOutcome::Diverged(_) => diverged += 1,
        }
    }
    let converged = candidates.len();

    // Keep the smallest residual inside each dedup ball: sort by residual,
    // then greedily accept anything not already represented.
    candidates.sort_by(|a, b| {
        a.residual_norm
            .partial_cmp(&b.residual_norm)
            .expect("finite residuals")
            .then_with(|| lex_cmp(&a.x, &b.x))
    });
    let mut points: Vec<CriticalPoint> = Vec::new();
    for c in candidates {
        if points
            .iter()
            .all(|kept| euclidean(&kept.x, &c.x) >= cfg.dedup_radius)
        {
            points.push(c);
        }
    }
    points.sort_by(|a, b| lex_cmp(&a.x, &b.x));

    MultistartResult {
        points,
        skipped_seeds: skipped,
        converged_runs: converged,
        diverged_runs: diverged,
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    fmath::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

fn lex_cmp(a: &[f64], b: &[f64]) -> core::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("finite coordinates") {
            core::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    core::cmp::Ordering::Equal
}

const HALTON_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical-inverse of `index` in the given base.
fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Per-dimension rotation offsets derived from the seed via splitmix64.
fn cranley_patterson_rotation(dims: usize, seed: u64) -> Vec<f64> {
    assert!(
        dims <= HALTON_PRIMES.len(),
        "multistart supports up to {} variables",
        HALTON_PRIMES.len()
    );
    let mut state = seed;
    (0..dims)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}
