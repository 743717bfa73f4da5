//! Property tests for the expression, linear-algebra and classification
//! invariants that hold over whole input families rather than single
//! examples.

use proptest::prelude::*;

use lmm_core::{
    classify, corpus_cases, determinant, find_critical_points, kkt_residual, null_space_basis,
    solve_linear, sym_eigenvalues, CriticalPoint, Expression, Matrix, Problem, SolverConfig,
    Verdict, DEFAULT_CLASSIFY_TOL,
};

// ---------------------------------------------------------------------------
// Expression trees
// ---------------------------------------------------------------------------

/// Source fragments that always parse over (x1, x2); glued with binary
/// operators they generate a family of well-formed expressions.
fn leaf_strategy() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("x1".to_string()),
        Just("x2".to_string()),
        (0u32..40).prop_map(|k| format!("{}", k as f64 / 4.0)),
        Just("sin(x1)".to_string()),
        Just("cos(x2)".to_string()),
        Just("x1^2".to_string()),
        Just("x2^3".to_string()),
    ]
}

fn expr_source() -> impl Strategy<Value = String> {
    let leaf = leaf_strategy();
    leaf.prop_recursive(3, 24, 2, |inner| {
        (inner.clone(), prop_oneof![Just("+"), Just("-"), Just("*")], inner)
            .prop_map(|(a, op, b)| format!("({a} {op} {b})"))
    })
}

proptest! {
    /// Parsing the canonical serialization reproduces the tree.
    #[test]
    fn parse_serialize_identity(src in expr_source()) {
        let vars = ["x1", "x2"];
        let e = Expression::parse(&src, &vars).expect("generated source parses");
        let canon = e.to_string();
        let again = Expression::parse(&canon, &vars).expect("canonical form parses");
        prop_assert_eq!(&e, &again);
        prop_assert_eq!(canon, again.to_string());
    }

    /// The Hessian is exactly symmetric, bit for bit.
    #[test]
    fn hessian_bitwise_symmetric(
        src in expr_source(),
        x1 in -3.0f64..3.0,
        x2 in -3.0f64..3.0,
    ) {
        let e = Expression::parse(&src, &["x1", "x2"]).unwrap();
        if let Ok(h) = e.hessian(&[x1, x2]) {
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert_eq!(h[(i, j)].to_bits(), h[(j, i)].to_bits());
                }
            }
        }
    }

    /// Differentiation is additive: grad(a + b) = grad(a) + grad(b).
    #[test]
    fn gradient_of_sum_is_sum_of_gradients(
        a in expr_source(),
        b in expr_source(),
        x1 in -3.0f64..3.0,
        x2 in -3.0f64..3.0,
    ) {
        let vars = ["x1", "x2"];
        let ea = Expression::parse(&a, &vars).unwrap();
        let eb = Expression::parse(&b, &vars).unwrap();
        let sum = Expression::parse(&format!("({a}) + ({b})"), &vars).unwrap();
        let x = [x1, x2];
        let (ga, gb, gs) = match (ea.gradient(&x), eb.gradient(&x), sum.gradient(&x)) {
            (Ok(ga), Ok(gb), Ok(gs)) => (ga, gb, gs),
            _ => return Ok(()),
        };
        for k in 0..2 {
            let expected = ga[k] + gb[k];
            prop_assert!(
                (gs[k] - expected).abs() <= 1e-9 * (1.0 + expected.abs()),
                "component {}: {} vs {}", k, gs[k], expected
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Derivatives against the finite-difference oracle, over the corpus
// ---------------------------------------------------------------------------

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// For every corpus expression and 100 seeded random points of its box, the
/// exact gradient and Hessian match central differences within 1e-5 / 1e-4
/// componentwise relative error.
#[test]
fn ad_matches_fd_on_corpus_expressions() {
    let mut rng = 0xC0FFEEu64;
    for case in corpus_cases() {
        let p = case.problem();
        let exprs: Vec<&Expression> =
            std::iter::once(p.objective()).chain(p.constraints()).collect();
        for _ in 0..100 {
            let x: Vec<f64> = p
                .sample_box()
                .iter()
                .map(|(lo, hi)| lo + splitmix(&mut rng) * (hi - lo))
                .collect();
            for e in &exprs {
                let ad = e.gradient(&x).unwrap();
                let fd = e.fd_gradient(&x, lmm_core::expr::FD_GRADIENT_STEP).unwrap();
                for k in 0..ad.len() {
                    assert!(
                        (ad[k] - fd[k]).abs() <= 1e-5 * (1.0 + ad[k].abs()),
                        "case {} gradient[{k}] at {x:?}: ad={} fd={}",
                        case.id,
                        ad[k],
                        fd[k]
                    );
                }
                let adh = e.hessian(&x).unwrap();
                let fdh = e.fd_hessian(&x, lmm_core::expr::FD_HESSIAN_STEP).unwrap();
                for i in 0..ad.len() {
                    for j in 0..ad.len() {
                        assert!(
                            (adh[(i, j)] - fdh[(i, j)]).abs()
                                <= 1e-4 * (1.0 + adh[(i, j)].abs()),
                            "case {} hessian[{i},{j}] at {x:?}: ad={} fd={}",
                            case.id,
                            adh[(i, j)],
                            fdh[(i, j)]
                        );
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

proptest! {
    /// Well-conditioned systems solve with a small back-substituted residual.
    #[test]
    fn solve_then_multiply_back(
        seed in 0u64..1000,
        n in 2usize..6,
    ) {
        let mut state = seed.wrapping_mul(0x9E37_79B9) + 1;
        // Diagonally dominant matrices stay comfortably nonsingular.
        let mut a = Matrix::zeros(n, n);
        let mut b = vec![0.0; n];
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                let v = 2.0 * splitmix(&mut state) - 1.0;
                a[(i, j)] = v;
                row_sum += v.abs();
            }
            a[(i, i)] += row_sum + 1.0;
            b[i] = 4.0 * splitmix(&mut state) - 2.0;
        }
        let x = solve_linear(&a, &b).unwrap();
        let ax = a.mat_vec(&x);
        let res: f64 = ax.iter().zip(&b).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(res <= 1e-10 * (1.0 + bn));
    }

    /// Null-space bases annihilate the rows and have identity Gram matrices.
    #[test]
    fn null_space_basis_invariants(
        seed in 0u64..1000,
        n in 3usize..7,
        m in 1usize..3,
    ) {
        prop_assume!(m < n);
        let mut state = seed.wrapping_mul(0x51_7CC1) + 9;
        let mut j = Matrix::zeros(m, n);
        for r in 0..m {
            for c in 0..n {
                j[(r, c)] = 2.0 * splitmix(&mut state) - 1.0;
            }
        }
        let basis = match null_space_basis(&j) {
            Ok(b) => b,
            Err(_) => return Ok(()), // randomly dependent rows: nothing to check
        };
        prop_assert_eq!(basis.len(), n - m);
        for v in &basis {
            for r in 0..m {
                let dot: f64 = j.row(r).iter().zip(v).map(|(a, b)| a * b).sum();
                prop_assert!(dot.abs() <= 1e-9, "J v = {dot}");
            }
        }
        for a in 0..basis.len() {
            for b in 0..basis.len() {
                let dot: f64 = basis[a].iter().zip(&basis[b]).map(|(x, y)| x * y).sum();
                let want = if a == b { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() <= 1e-10);
            }
        }
    }

    /// Eigenvalue sum equals the trace; product equals the determinant.
    #[test]
    fn eigenvalue_trace_and_determinant(
        seed in 0u64..1000,
        n in 2usize..6,
    ) {
        let mut state = seed.wrapping_mul(0xA5A5) + 3;
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = 4.0 * splitmix(&mut state) - 2.0;
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        let eigs = sym_eigenvalues(&s).unwrap();
        let trace: f64 = (0..n).map(|i| s[(i, i)]).sum();
        let sum: f64 = eigs.iter().sum();
        let scale = s.norm_frobenius().max(1.0);
        prop_assert!((sum - trace).abs() <= 1e-9 * scale);
        let det = determinant(&s);
        let prod: f64 = eigs.iter().product();
        // Product tolerance scales with the n-th power of the matrix size.
        let det_scale = det.abs().max(scale);
        prop_assert!((prod - det).abs() <= 1e-9 * det_scale.max(1.0));
    }

    /// For symmetric 2x2 matrices: a11 > 0 and det > 0 exactly when both
    /// eigenvalues are positive (the leading-minor test is equivalent to
    /// positive definiteness).
    #[test]
    fn leading_minor_equivalence_2x2(
        a11 in -10.0f64..10.0,
        a12 in -10.0f64..10.0,
        a22 in -10.0f64..10.0,
    ) {
        let det = a11 * a22 - a12 * a12;
        // Stay away from the decision boundary where rounding could flip
        // either side of the equivalence.
        prop_assume!(a11.abs() > 1e-6 && det.abs() > 1e-6);
        let s = Matrix::from_rows(&[&[a11, a12], &[a12, a22]]);
        let eigs = sym_eigenvalues(&s).unwrap();
        let minor_positive = a11 > 0.0 && det > 0.0;
        let eigs_positive = eigs.iter().all(|&e| e > 0.0);
        prop_assert_eq!(minor_positive, eigs_positive);
    }
}

// ---------------------------------------------------------------------------
// Solver and classification invariants over the corpus
// ---------------------------------------------------------------------------

/// Scaling a constraint by c keeps the critical points and divides the
/// matching multiplier by c; verdicts are unchanged.
#[test]
fn constraint_scaling_covariance() {
    for case in corpus_cases() {
        let p = case.problem();
        let base = find_critical_points(&p, &case.config);
        for ci in 0..case.constraint_srcs.len() {
            for c in [-2.0, 0.5, 10.0] {
                let scaled_srcs: Vec<String> = case
                    .constraint_srcs
                    .iter()
                    .enumerate()
                    .map(|(k, src)| {
                        if k == ci {
                            format!("({c})*({src})")
                        } else {
                            (*src).to_string()
                        }
                    })
                    .collect();
                let scaled_refs: Vec<&str> = scaled_srcs.iter().map(|s| s.as_str()).collect();
                let sp = Problem::from_sources(
                    case.variables,
                    case.objective_src,
                    &scaled_refs,
                    case.sample_box.clone(),
                )
                .unwrap();
                let scaled = find_critical_points(&sp, &case.config);
                assert_eq!(
                    base.points.len(),
                    scaled.points.len(),
                    "case {} constraint {ci} scale {c}",
                    case.id
                );
                for (a, b) in base.points.iter().zip(&scaled.points) {
                    for k in 0..a.x.len() {
                        // Simple roots reconverge to ~10x the residual
                        // tolerance; double roots only to its square root,
                        // so the guaranteed bound is 1e-5.
                        assert!(
                            (a.x[k] - b.x[k]).abs() <= 1e-5,
                            "case {} x[{k}]: {} vs {}",
                            case.id,
                            a.x[k],
                            b.x[k]
                        );
                    }
                    for k in 0..a.lambda.len() {
                        let expected = if k == ci { a.lambda[k] / c } else { a.lambda[k] };
                        assert!(
                            (b.lambda[k] - expected).abs() <= 1e-6,
                            "case {} lambda[{k}]: {} vs {}",
                            case.id,
                            b.lambda[k],
                            expected
                        );
                    }
                    let va = classify(&p, a, case.classify_tol).unwrap().verdict;
                    let vb = classify(&sp, b, case.classify_tol).unwrap().verdict;
                    assert_eq!(va, vb, "case {} verdict changed under scaling", case.id);
                }
            }
        }
    }
}

/// Negating the objective (and the multipliers) swaps min and max verdicts
/// and preserves saddle/indeterminate.
#[test]
fn sign_flip_swaps_verdicts() {
    for case in corpus_cases() {
        let p = case.problem();
        let negated = Problem::from_sources(
            case.variables,
            &format!("-({})", case.objective_src),
            case.constraint_srcs,
            case.sample_box.clone(),
        )
        .unwrap();
        for e in &case.expected_points {
            let cp = CriticalPoint {
                x: e.x.clone(),
                lambda: e.lambda.clone(),
                residual_norm: 0.0,
            };
            let flipped = CriticalPoint {
                x: e.x.clone(),
                lambda: e.lambda.iter().map(|l| -l).collect(),
                residual_norm: 0.0,
            };
            let v = classify(&p, &cp, DEFAULT_CLASSIFY_TOL).unwrap().verdict;
            let w = classify(&negated, &flipped, DEFAULT_CLASSIFY_TOL).unwrap().verdict;
            let expected = match v {
                Verdict::StrictLocalMin => Verdict::StrictLocalMax,
                Verdict::StrictLocalMax => Verdict::StrictLocalMin,
                other => other,
            };
            assert_eq!(w, expected, "case {}", case.id);
        }
    }
}

/// Identical problem and configuration produce identical results, and the
/// returned points always satisfy the advertised tolerances.
#[test]
fn multistart_determinism_and_residual_bounds() {
    for case in corpus_cases() {
        let p = case.problem();
        let a = find_critical_points(&p, &case.config);
        let b = find_critical_points(&p, &case.config);
        assert_eq!(a.points, b.points, "case {}", case.id);
        for cp in &a.points {
            let r = kkt_residual(&p, &cp.x, &cp.lambda).unwrap();
            let nr = r.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(nr <= case.config.stationarity_tol);
        }
        // A different seed still finds the same critical points.
        let reseeded = SolverConfig {
            rng_seed: 12345,
            ..case.config.clone()
        };
        let c = find_critical_points(&p, &reseeded);
        assert_eq!(a.points.len(), c.points.len(), "case {}", case.id);
        for (x, y) in a.points.iter().zip(&c.points) {
            for k in 0..x.x.len() {
                assert!((x.x[k] - y.x[k]).abs() <= 2.0 * case.config.dedup_radius);
            }
        }
    }
}
