//! Second-order classification of critical points.
//!
//! At a critical point (x, lambda) with linearly independent constraint
//! gradients, build the Lagrangian Hessian H, project it onto an orthonormal
//! basis V of the constraint tangent space and inspect the eigenvalues of
//! A = V^T H V: all positive certifies a strict local minimizer, all
//! negative a strict local maximizer, mixed signs a saddle along the
//! feasible set, and anything within tolerance of zero is left
//! indeterminate, since second-order information alone cannot decide there.
//!
//! For the low-dimensional shapes (n,m) in {(2,1), (3,1), (3,2)} the report
//! additionally records the classical scalar test over explicitly
//! constructed perpendicular vectors (a tangent quadratic form, or the
//! a11/det pair of the 2x2 projection). That specialized check is a recorded
//! cross-check; the eigenvalue verdict is authoritative.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::fmath;
use crate::kkt::{CriticalPoint, FuncId, Problem, ProblemEvalError};
use crate::linalg::{null_space_basis, sym_eigenvalues, LinalgError, Matrix};

/// Default relative tolerance for eigenvalue sign decisions.
pub const DEFAULT_CLASSIFY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    StrictLocalMin,
    StrictLocalMax,
    Saddle,
    Indeterminate,
    /// Constraint gradients linearly dependent at the point; the
    /// second-order test does not apply.
    LicqFailure,
}

impl Verdict {
    /// Stable identifier used in machine-readable output.
    pub fn label(self) -> &'static str {
        match self {
            Verdict::StrictLocalMin => "StrictLocalMin",
            Verdict::StrictLocalMax => "StrictLocalMax",
            Verdict::Saddle => "Saddle",
            Verdict::Indeterminate => "Indeterminate",
            Verdict::LicqFailure => "LicqFailure",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Verdict::StrictLocalMin => "strict local min",
            Verdict::StrictLocalMax => "strict local max",
            Verdict::Saddle => "saddle",
            Verdict::Indeterminate => "indeterminate",
            Verdict::LicqFailure => "LICQ failure",
        };
        write!(f, "{text}")
    }
}

/// What the specialized scalar test asserts on its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpecializedClaim {
    Min,
    Max,
    Saddle,
    Inconclusive,
}

/// Scalar second-order test in the classical low-dimensional form.
#[derive(Clone, Debug, PartialEq)]
pub enum SpecializedCheck {
    /// One tangent direction v (n-m = 1): the sign of v^T H v decides.
    /// Used for (n,m) = (2,1) and (3,2).
    TangentQuadForm { v: Vec<f64>, value: f64 },
    /// Two tangent directions v1, v2 (n,m) = (3,1): positive definiteness
    /// of A = V^T H V via a11 > 0 and det(A) > 0.
    LeadingMinor {
        v1: Vec<f64>,
        v2: Vec<f64>,
        a11: f64,
        det: f64,
    },
}

impl SpecializedCheck {
    /// Sign reading of the recorded witnesses with absolute tolerance `tol`.
    pub fn claim(&self, tol: f64) -> SpecializedClaim {
        match self {
            SpecializedCheck::TangentQuadForm { value, .. } => {
                if *value > tol {
                    SpecializedClaim::Min
                } else if *value < -tol {
                    SpecializedClaim::Max
                } else {
                    SpecializedClaim::Inconclusive
                }
            }
            SpecializedCheck::LeadingMinor { a11, det, .. } => {
                if *det < -tol {
                    SpecializedClaim::Saddle
                } else if *a11 > tol && *det > tol {
                    SpecializedClaim::Min
                } else if *a11 < -tol && *det > tol {
                    SpecializedClaim::Max
                } else {
                    SpecializedClaim::Inconclusive
                }
            }
        }
    }
}

/// Fields that exist only when the constraint qualification holds.
#[derive(Clone, Debug)]
pub struct ClassificationDetail {
    /// Orthonormal basis of the constraint tangent space (n-m vectors).
    pub tangent_basis: Vec<Vec<f64>>,
    pub lagrangian_hessian: Matrix,
    /// V^T H V, exactly symmetric.
    pub projected_hessian: Matrix,
    /// Eigenvalues of the projected Hessian, ascending.
    pub eigenvalues: Vec<f64>,
    /// Present exactly for (n,m) in {(2,1), (3,1), (3,2)}.
    pub specialized: Option<SpecializedCheck>,
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub point: CriticalPoint,
    pub licq_ok: bool,
    pub verdict: Verdict,
    /// `None` exactly when `verdict == LicqFailure`.
    pub detail: Option<ClassificationDetail>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClassifyError {
    Dimension {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    Eval(ProblemEvalError),
    Numeric(LinalgError),
    /// A user-supplied tangent basis is not orthonormal or not tangent.
    BadBasis(&'static str),
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyError::Dimension { what, expected, found } => {
                write!(f, "{what} has dimension {found}, expected {expected}")
            }
            ClassifyError::Eval(e) => write!(f, "{e}"),
            ClassifyError::Numeric(e) => write!(f, "{e}"),
            ClassifyError::BadBasis(reason) => write!(f, "invalid tangent basis: {reason}"),
        }
    }
}

impl core::error::Error for ClassifyError {}

impl From<ProblemEvalError> for ClassifyError {
    fn from(e: ProblemEvalError) -> Self {
        ClassifyError::Eval(e)
    }
}

/// Lagrangian Hessian at arbitrary (x, lambda):
/// hess f(x) + sum_i lambda_i hess g_i(x). Exactly symmetric.
pub(crate) fn lagrangian_hessian_at(
    p: &Problem,
    x: &[f64],
    lambda: &[f64],
) -> Result<Matrix, ProblemEvalError> {
    let n = p.n_vars();
    let mut h = p.objective().hessian(x).map_err(|source| ProblemEvalError {
        func: FuncId::Objective,
        source,
    })?;
    for (i, g) in p.constraints().iter().enumerate() {
        let hg = g.hessian(x).map_err(|source| ProblemEvalError {
            func: FuncId::Constraint(i),
            source,
        })?;
        for r in 0..n {
            for c in 0..n {
                h[(r, c)] += lambda[i] * hg[(r, c)];
            }
        }
    }
    Ok(h)
}

/// Lagrangian Hessian at a critical point.
pub fn lagrangian_hessian(p: &Problem, cp: &CriticalPoint) -> Result<Matrix, ProblemEvalError> {
    lagrangian_hessian_at(p, &cp.x, &cp.lambda)
}

fn check_dims(p: &Problem, cp: &CriticalPoint) -> Result<(), ClassifyError> {
    if cp.x.len() != p.n_vars() {
        return Err(ClassifyError::Dimension {
            what: "critical point",
            expected: p.n_vars(),
            found: cp.x.len(),
        });
    }
    if cp.lambda.len() != p.n_constraints() {
        return Err(ClassifyError::Dimension {
            what: "multiplier vector",
            expected: p.n_constraints(),
            found: cp.lambda.len(),
        });
    }
    Ok(())
}

/// Classifies a critical point with the basis produced by
/// [`null_space_basis`]. `tol` is the relative eigenvalue tolerance
/// (see [`DEFAULT_CLASSIFY_TOL`]).
pub fn classify(
    p: &Problem,
    cp: &CriticalPoint,
    tol: f64,
) -> Result<ClassificationReport, ClassifyError> {
    check_dims(p, cp)?;
    let jg = p.constraint_jacobian(&cp.x)?;
    let basis = match null_space_basis(&jg) {
        Ok(b) => b,
        Err(LinalgError::RankDeficient) => {
            return Ok(ClassificationReport {
                point: cp.clone(),
                licq_ok: false,
                verdict: Verdict::LicqFailure,
                detail: None,
            })
        }
        Err(other) => return Err(ClassifyError::Numeric(other)),
    };
    classify_on_basis(p, cp, basis, tol)
}

/// Classifies with a caller-supplied orthonormal tangent basis. The verdict
/// and the eigenvalue list do not depend on the basis choice; this entry
/// point exists to make that property testable.
pub fn classify_with_basis(
    p: &Problem,
    cp: &CriticalPoint,
    basis: &[Vec<f64>],
    tol: f64,
) -> Result<ClassificationReport, ClassifyError> {
    check_dims(p, cp)?;
    let n = p.n_vars();
    let m = p.n_constraints();
    if basis.len() != n - m {
        return Err(ClassifyError::Dimension {
            what: "tangent basis",
            expected: n - m,
            found: basis.len(),
        });
    }
    for v in basis {
        if v.len() != n {
            return Err(ClassifyError::Dimension {
                what: "tangent basis vector",
                expected: n,
                found: v.len(),
            });
        }
    }
    for a in 0..basis.len() {
        for b in a..basis.len() {
            let want = if a == b { 1.0 } else { 0.0 };
            if fmath::abs(dot(&basis[a], &basis[b]) - want) > 1e-8 {
                return Err(ClassifyError::BadBasis("vectors are not orthonormal"));
            }
        }
    }
    let jg = p.constraint_jacobian(&cp.x)?;
    let scale = jg.norm_inf().max(1.0);
    for v in basis {
        for r in 0..jg.rows() {
            if fmath::abs(dot(jg.row(r), v)) > 1e-6 * scale {
                return Err(ClassifyError::BadBasis(
                    "vector is not in the constraint tangent space",
                ));
            }
        }
    }
    classify_on_basis(p, cp, basis.to_vec(), tol)
}

fn classify_on_basis(
    p: &Problem,
    cp: &CriticalPoint,
    basis: Vec<Vec<f64>>,
    tol: f64,
) -> Result<ClassificationReport, ClassifyError> {
    let h = lagrangian_hessian_at(p, &cp.x, &cp.lambda)?;
    let a = project_symmetric(&h, &basis);
    let eigenvalues = sym_eigenvalues(&a).map_err(ClassifyError::Numeric)?;

    let scale = a.norm_inf().max(1.0);
    let threshold = tol * scale;
    let all_pos = eigenvalues.iter().all(|&e| e > threshold);
    let all_neg = eigenvalues.iter().all(|&e| e < -threshold);
    let any_pos = eigenvalues.iter().any(|&e| e > threshold);
    let any_neg = eigenvalues.iter().any(|&e| e < -threshold);
    let verdict = if all_pos {
        Verdict::StrictLocalMin
    } else if all_neg {
        Verdict::StrictLocalMax
    } else if any_pos && any_neg {
        Verdict::Saddle
    } else {
        Verdict::Indeterminate
    };

    let specialized = specialized_check(p, &h, &cp.x)?;
    Ok(ClassificationReport {
        point: cp.clone(),
        licq_ok: true,
        verdict,
        detail: Some(ClassificationDetail {
            tangent_basis: basis,
            lagrangian_hessian: h,
            projected_hessian: a,
            eigenvalues,
            specialized,
        }),
    })
}

/// V^T H V with exact symmetry: the upper triangle is computed and mirrored.
fn project_symmetric(h: &Matrix, basis: &[Vec<f64>]) -> Matrix {
    let k = basis.len();
    let mut a = Matrix::zeros(k, k);
    let images: Vec<Vec<f64>> = basis.iter().map(|v| h.mat_vec(v)).collect();
    for i in 0..k {
        for j in i..k {
            let v = dot(&basis[i], &images[j]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    a
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Builds the classical scalar test for the shapes treated separately:
/// (2,1) and (3,2) test one perpendicular direction, (3,1) tests the 2x2
/// projection via its leading minor and determinant. The perpendicular
/// vectors are constructed deterministically and brought to a canonical
/// scaling so the recorded witnesses are reproducible.
fn specialized_check(
    p: &Problem,
    h: &Matrix,
    x: &[f64],
) -> Result<Option<SpecializedCheck>, ClassifyError> {
    let n = p.n_vars();
    let m = p.n_constraints();
    match (n, m) {
        (2, 1) => {
            let w = grad_constraint(p, 0, x)?;
            // Perpendicular of (w1, w2), scaled so its first nonzero entry
            // is one: (1, -w1/w2) in the generic case.
            let u = [w[1], -w[0]];
            let v = scale_by_first_nonzero(&u);
            let value = quad_form(h, &v);
            Ok(Some(SpecializedCheck::TangentQuadForm { v, value }))
        }
        (3, 1) => {
            let w = grad_constraint(p, 0, x)?;
            let pivot = (0..3).find(|&k| w[k] != 0.0).unwrap_or(0);
            let mut vs: Vec<Vec<f64>> = Vec::with_capacity(2);
            for k in 0..3 {
                if k == pivot {
                    continue;
                }
                let mut u = vec![0.0; 3];
                u[pivot] = w[k];
                u[k] = -w[pivot];
                vs.push(canonical_direction(&u));
            }
            let (v1, v2) = (vs.remove(0), vs.remove(0));
            let a11 = quad_form(h, &v1);
            let a22 = quad_form(h, &v2);
            let a12 = bilinear_form(h, &v1, &v2);
            Ok(Some(SpecializedCheck::LeadingMinor {
                v1,
                v2,
                a11,
                det: a11 * a22 - a12 * a12,
            }))
        }
        (3, 2) => {
            let w1 = grad_constraint(p, 0, x)?;
            let w2 = grad_constraint(p, 1, x)?;
            let cross = [
                w1[1] * w2[2] - w1[2] * w2[1],
                w1[2] * w2[0] - w1[0] * w2[2],
                w1[0] * w2[1] - w1[1] * w2[0],
            ];
            let v = canonical_direction(&cross);
            let value = quad_form(h, &v);
            Ok(Some(SpecializedCheck::TangentQuadForm { v, value }))
        }
        _ => Ok(None),
    }
}

fn grad_constraint(p: &Problem, i: usize, x: &[f64]) -> Result<Vec<f64>, ClassifyError> {
    p.constraints()[i]
        .gradient(x)
        .map_err(|source| ClassifyError::Eval(ProblemEvalError {
            func: FuncId::Constraint(i),
            source,
        }))
}

fn quad_form(h: &Matrix, v: &[f64]) -> f64 {
    dot(v, &h.mat_vec(v))
}

fn bilinear_form(h: &Matrix, a: &[f64], b: &[f64]) -> f64 {
    dot(a, &h.mat_vec(b))
}

/// Divides by the first nonzero entry (leading entry becomes +1).
fn scale_by_first_nonzero(u: &[f64]) -> Vec<f64> {
    let lead = u.iter().copied().find(|&c| c != 0.0).unwrap_or(1.0);
    u.iter().map(|c| c / lead).collect()
}

/// Divides by the smallest-magnitude nonzero entry and flips the sign so
/// the first nonzero entry is positive.
fn canonical_direction(u: &[f64]) -> Vec<f64> {
    let mut scale = f64::INFINITY;
    for &c in u {
        if c != 0.0 && fmath::abs(c) < scale {
            scale = fmath::abs(c);
        }
    }
    if !scale.is_finite() {
        return u.to_vec();
    }
    let mut v: Vec<f64> = u.iter().map(|c| c / scale).collect();
    if let Some(lead) = v.iter().copied().find(|&c| c != 0.0) {
        if lead < 0.0 {
            for c in &mut v {
                *c = -*c;
            }
        }
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kkt::SolverConfig;

    fn cp(x: &[f64], lambda: &[f64]) -> CriticalPoint {
        CriticalPoint {
            x: x.to_vec(),
            lambda: lambda.to_vec(),
            residual_norm: 0.0,
        }
    }

    fn surface_area_problem() -> Problem {
        Problem::from_sources(
            &["x1", "x2", "x3"],
            "x1*x2 + 2*x1*x3 + 2*x2*x3",
            &["x1*x2*x3 - 1"],
            Some(vec![(0.1, 5.0); 3]),
        )
        .unwrap()
    }

    #[test]
    fn hessian_at_surface_area_optimum() {
        let p = surface_area_problem();
        let c = 2f64.powf(1.0 / 3.0);
        let h = lagrangian_hessian(
            &p,
            &cp(&[c, c, c / 2.0], &[-2.0 * 4f64.powf(1.0 / 3.0)]),
        )
        .unwrap();
        let expected = [[0.0, -1.0, -2.0], [-1.0, 0.0, -2.0], [-2.0, -2.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (h[(i, j)] - expected[i][j]).abs() < 1e-9,
                    "entry ({i},{j}) = {}",
                    h[(i, j)]
                );
            }
        }
    }

    #[test]
    fn zero_multiplier_gives_plain_objective_hessian() {
        let p = surface_area_problem();
        let h = lagrangian_hessian(&p, &cp(&[1.0, 2.0, 3.0], &[0.0])).unwrap();
        let hf = p.objective().hessian(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(h, hf);
    }

    #[test]
    fn hessian_at_cone_plane_solution() {
        let p = Problem::from_sources(
            &["x1", "x2", "x3"],
            "x3",
            &["x1^2 + x2^2 - x3^2", "x1 + x3 - 2"],
            None,
        )
        .unwrap();
        let h = lagrangian_hessian(&p, &cp(&[1.0, 0.0, 1.0], &[0.25, -0.5])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i != j {
                    0.0
                } else if i == 2 {
                    -0.5
                } else {
                    0.5
                };
                assert_eq!(h[(i, j)], expected);
            }
        }
    }

    #[test]
    fn cubic_parabola_min_and_max() {
        let p = Problem::from_sources(&["x1", "x2"], "x2 - x1^3 + x1", &["x2 - x1^2"], None)
            .unwrap();

        let report = classify(&p, &cp(&[-1.0 / 3.0, 1.0 / 9.0], &[-1.0]), DEFAULT_CLASSIFY_TOL)
            .unwrap();
        assert_eq!(report.verdict, Verdict::StrictLocalMin);
        let detail = report.detail.unwrap();
        match detail.specialized.unwrap() {
            SpecializedCheck::TangentQuadForm { v, value } => {
                assert!((value - 4.0).abs() < 1e-9, "witness {value}");
                assert!((v[0] - 1.0).abs() < 1e-12);
                assert!((v[1] + 2.0 / 3.0).abs() < 1e-9);
            }
            other => panic!("expected quadratic-form check, got {other:?}"),
        }

        let report = classify(&p, &cp(&[1.0, 1.0], &[-1.0]), DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(report.verdict, Verdict::StrictLocalMax);
        match report.detail.unwrap().specialized.unwrap() {
            SpecializedCheck::TangentQuadForm { v, value } => {
                assert!((value + 4.0).abs() < 1e-9, "witness {value}");
                assert!((v[0] - 1.0).abs() < 1e-12);
                assert!((v[1] - 2.0).abs() < 1e-9);
            }
            other => panic!("expected quadratic-form check, got {other:?}"),
        }
    }

    #[test]
    fn surface_area_minor_test_witnesses() {
        let p = surface_area_problem();
        let c = 2f64.powf(1.0 / 3.0);
        let report = classify(
            &p,
            &cp(&[c, c, c / 2.0], &[-2.0 * 4f64.powf(1.0 / 3.0)]),
            DEFAULT_CLASSIFY_TOL,
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::StrictLocalMin);
        match report.detail.unwrap().specialized.unwrap() {
            SpecializedCheck::LeadingMinor { v1, v2, a11, det } => {
                assert!((a11 - 2.0).abs() < 1e-9, "a11 = {a11}");
                assert!((det - 12.0).abs() < 1e-8, "det = {det}");
                assert!((v1[0] - 1.0).abs() < 1e-9 && (v1[1] + 1.0).abs() < 1e-9);
                assert!((v2[0] - 2.0).abs() < 1e-9 && (v2[2] + 1.0).abs() < 1e-9);
            }
            other => panic!("expected leading-minor check, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_polynomial_points_are_indeterminate() {
        let p = Problem::from_sources(
            &["x1", "x2"],
            "1/7*x1^7 - 17/12*x1^6 + 51/10*x1^5 - 63/8*x1^4 + 9/2*x1^3",
            &["x2"],
            None,
        )
        .unwrap();
        for x1 in [0.0, 3.0] {
            let report = classify(&p, &cp(&[x1, 0.0], &[0.0]), DEFAULT_CLASSIFY_TOL).unwrap();
            assert_eq!(report.verdict, Verdict::Indeterminate, "at x1 = {x1}");
        }
    }

    #[test]
    fn licq_failure_is_reported_without_detail() {
        // grad g = (2 x1, 0) vanishes at the critical point of interest.
        let p = Problem::from_sources(&["x1", "x2"], "x1^2 + x2^2", &["x1^2"], None).unwrap();
        let report = classify(&p, &cp(&[0.0, 0.0], &[0.0]), DEFAULT_CLASSIFY_TOL).unwrap();
        assert!(!report.licq_ok);
        assert_eq!(report.verdict, Verdict::LicqFailure);
        assert!(report.detail.is_none());
    }

    #[test]
    fn verdicts_are_basis_invariant() {
        let p = surface_area_problem();
        let c = 2f64.powf(1.0 / 3.0);
        let point = cp(&[c, c, c / 2.0], &[-2.0 * 4f64.powf(1.0 / 3.0)]);
        let base = classify(&p, &point, DEFAULT_CLASSIFY_TOL).unwrap();
        let detail = base.detail.unwrap();
        let (v1, v2) = (&detail.tangent_basis[0], &detail.tangent_basis[1]);
        // Rotate the basis by 30 degrees inside the tangent plane.
        let (co, si) = (3f64.sqrt() / 2.0, 0.5);
        let r1: Vec<f64> = (0..3).map(|k| co * v1[k] + si * v2[k]).collect();
        let r2: Vec<f64> = (0..3).map(|k| -si * v1[k] + co * v2[k]).collect();
        let rotated =
            classify_with_basis(&p, &point, &[r1, r2], DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(rotated.verdict, base.verdict);
        let re = rotated.detail.unwrap().eigenvalues;
        for (a, b) in re.iter().zip(&detail.eigenvalues) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn sign_flip_swaps_min_and_max() {
        let vars = ["x1", "x2"];
        let minus = Problem::from_sources(&vars, "-(x2 - x1^3 + x1)", &["x2 - x1^2"], None)
            .unwrap();
        // Multipliers negate along with the objective.
        let report = classify(&minus, &cp(&[-1.0 / 3.0, 1.0 / 9.0], &[1.0]), DEFAULT_CLASSIFY_TOL)
            .unwrap();
        assert_eq!(report.verdict, Verdict::StrictLocalMax);
        let report = classify(&minus, &cp(&[1.0, 1.0], &[1.0]), DEFAULT_CLASSIFY_TOL).unwrap();
        assert_eq!(report.verdict, Verdict::StrictLocalMin);
    }

    #[test]
    fn specialized_claim_agrees_with_eigen_verdict_on_solved_points() {
        let p = surface_area_problem();
        let result = crate::kkt::find_critical_points(&p, &SolverConfig::default());
        for point in &result.points {
            let report = classify(&p, point, DEFAULT_CLASSIFY_TOL).unwrap();
            let detail = report.detail.unwrap();
            let claim = detail.specialized.unwrap().claim(DEFAULT_CLASSIFY_TOL);
            assert_eq!(claim == SpecializedClaim::Min, report.verdict == Verdict::StrictLocalMin);
            assert_eq!(claim == SpecializedClaim::Max, report.verdict == Verdict::StrictLocalMax);
        }
    }

    #[test]
    fn bad_basis_is_rejected() {
        let p = surface_area_problem();
        let c = 2f64.powf(1.0 / 3.0);
        let point = cp(&[c, c, c / 2.0], &[-2.0 * 4f64.powf(1.0 / 3.0)]);
        // Not orthonormal.
        let err = classify_with_basis(
            &p,
            &point,
            &[vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]],
            DEFAULT_CLASSIFY_TOL,
        )
        .unwrap_err();
        assert!(matches!(err, ClassifyError::BadBasis(_)));
        // Wrong count.
        let err =
            classify_with_basis(&p, &point, &[vec![1.0, 0.0, 0.0]], DEFAULT_CLASSIFY_TOL)
                .unwrap_err();
        assert!(matches!(err, ClassifyError::Dimension { .. }));
    }
}
