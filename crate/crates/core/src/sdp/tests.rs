use super::*;
use crate::matrix::{hermitian_eig, BipartiteDims};
use approx::assert_abs_diff_eq;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(n, n, |_, _| {
        c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    HermitianMatrix::hermitian_part(&g)
}

/// max Re tr(C R) s.t. −1 ⪯ R ⪯ 1, whose value is ‖C‖₁.
fn trace_norm_problem(c: &HermitianMatrix) -> (SdpProblem, VarId) {
    let n = c.dim();
    let mut p = SdpProblem::new(Sense::Maximize);
    let r = p.add_variable("R", n, VarKind::Hermitian).unwrap();
    p.add_objective(r, c.clone()).unwrap();
    p.add_inequality(
        MatrixInequality::new("R<=1", n)
            .constant(HermitianMatrix::identity(n))
            .term(Term::new(r).scaled(-1.0)),
    )
    .unwrap();
    p.add_inequality(
        MatrixInequality::new("R>=-1", n)
            .constant(HermitianMatrix::identity(n))
            .term(Term::new(r)),
    )
    .unwrap();
    (p, r)
}

#[test]
fn scalar_lp_as_one_by_one_sdp() {
    let mut p = SdpProblem::new(Sense::Minimize);
    let t = p.add_variable("t", 1, VarKind::Hermitian).unwrap();
    p.add_objective(t, HermitianMatrix::identity(1)).unwrap();
    p.add_inequality(
        MatrixInequality::new("t>=1", 1)
            .constant(HermitianMatrix::identity(1).scale(-1.0))
            .term(Term::new(t)),
    )
    .unwrap();
    let sol = solve(&p, &SolverConfig::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert_abs_diff_eq!(sol.primal_value, 1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(sol.dual_value, 1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(sol.assignments["t"].get(0, 0).re, 1.0, epsilon = 1e-8);
}

#[test]
fn trace_norm_of_diag() {
    let c = HermitianMatrix::from_diagonal(&[1.0, -1.0]);
    let (p, r) = trace_norm_problem(&c);
    let sol = solve(&p, &SolverConfig::default()).unwrap();
    assert!(sol.is_optimal());
    assert_abs_diff_eq!(sol.primal_value, 2.0, epsilon = 1e-8);
    let rv = sol.value(r);
    assert_abs_diff_eq!(rv.get(0, 0).re, 1.0, epsilon = 1e-6);
    assert_abs_diff_eq!(rv.get(1, 1).re, -1.0, epsilon = 1e-6);
    assert!(sol.gap <= 1e-8 * 2.0);
}

#[test]
fn trace_norm_of_complex_matrices() {
    for seed in 0..6 {
        let c = random_hermitian(4, seed);
        let expected: f64 = hermitian_eig(&c)
            .unwrap()
            .eigenvalues
            .iter()
            .map(|x| x.abs())
            .sum();
        let (p, _) = trace_norm_problem(&c);
        let sol = solve(&p, &SolverConfig::default()).unwrap();
        assert!(sol.is_optimal(), "seed {seed}: {:?}", sol.status);
        assert_abs_diff_eq!(sol.primal_value, expected, epsilon = 1e-7);
        let report = check_certificate(&p, &sol);
        assert!(report.max_residual <= 1e-9, "{report:?}");
        assert!(report.gap <= 1e-7, "{report:?}");
        assert!(report.dual_residual <= 1e-7, "{report:?}");
    }
}

#[test]
fn equality_constrained_top_eigenvalue() {
    // max Re tr(C X) s.t. tr X = 1, X ⪰ 0 → λ_max(C).
    for seed in 10..14 {
        let c = random_hermitian(3, seed);
        let mut p = SdpProblem::new(Sense::Maximize);
        let x = p.add_variable("X", 3, VarKind::HermitianPsd).unwrap();
        p.add_objective(x, c.clone()).unwrap();
        p.add_equality(ScalarEquality::new("trace", 1.0).term(x, HermitianMatrix::identity(3)))
            .unwrap();
        let sol = solve(&p, &SolverConfig::default()).unwrap();
        assert!(sol.is_optimal(), "{:?}", sol.status);
        let lmax = c.max_eigenvalue().unwrap();
        assert_abs_diff_eq!(sol.primal_value, lmax, epsilon = 1e-7);
        assert_abs_diff_eq!(sol.value(x).trace(), 1.0, epsilon = 1e-9);
        let report = check_certificate(&p, &sol);
        assert!(report.gap <= 1e-7, "{report:?}");
        assert!(report.dual_residual <= 1e-6, "{report:?}");
    }
}

#[test]
fn infeasible_problem_is_reported() {
    // t ≥ 1 and t ≤ 0.
    let mut p = SdpProblem::new(Sense::Maximize);
    let t = p.add_variable("t", 1, VarKind::Hermitian).unwrap();
    p.add_objective(t, HermitianMatrix::identity(1)).unwrap();
    p.add_inequality(
        MatrixInequality::new("t>=1", 1)
            .constant(HermitianMatrix::identity(1).scale(-1.0))
            .term(Term::new(t)),
    )
    .unwrap();
    p.add_inequality(MatrixInequality::new("t<=0", 1).term(Term::new(t).scaled(-1.0)))
        .unwrap();
    let sol = solve(&p, &SolverConfig::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Infeasible);
}

#[test]
fn unbounded_problem_is_reported() {
    let mut p = SdpProblem::new(Sense::Maximize);
    let t = p.add_variable("t", 1, VarKind::Hermitian).unwrap();
    p.add_objective(t, HermitianMatrix::identity(1)).unwrap();
    p.add_inequality(MatrixInequality::new("t>=0", 1).term(Term::new(t)))
        .unwrap();
    let sol = solve(&p, &SolverConfig::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Unbounded);

    // A variable no constraint touches but the objective rewards.
    let mut p = SdpProblem::new(Sense::Maximize);
    let t = p.add_variable("t", 1, VarKind::Hermitian).unwrap();
    p.add_objective(t, HermitianMatrix::identity(1)).unwrap();
    let sol = solve(&p, &SolverConfig::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Unbounded);
}

#[test]
fn unconstrained_free_direction_is_pinned() {
    let c = HermitianMatrix::from_diagonal(&[2.0, -1.0]);
    let (mut p, _) = trace_norm_problem(&c);
    let z = p.add_variable("unused", 2, VarKind::Hermitian).unwrap();
    let sol = solve(&p, &SolverConfig::default()).unwrap();
    assert!(sol.is_optimal());
    assert_abs_diff_eq!(sol.primal_value, 3.0, epsilon = 1e-7);
    assert_eq!(sol.value(z).frobenius_norm(), 0.0);
}

#[test]
fn max_iterations_exhaustion_is_numeric_failure() {
    let c = random_hermitian(4, 3);
    let (p, _) = trace_norm_problem(&c);
    let cfg = SolverConfig {
        max_iterations: 2,
        ..SolverConfig::default()
    };
    let sol = solve(&p, &cfg).unwrap();
    assert_eq!(sol.status, SolveStatus::NumericFailure);
    assert_eq!(sol.iterations, 2);
}

#[test]
fn invalid_config_is_rejected() {
    let (p, _) = trace_norm_problem(&HermitianMatrix::identity(2));
    let cfg = SolverConfig {
        gap_tol: 0.0,
        ..SolverConfig::default()
    };
    assert!(solve(&p, &cfg).is_err());
}

#[test]
fn solving_twice_is_deterministic() {
    let c = random_hermitian(4, 77);
    let (p, _) = trace_norm_problem(&c);
    let a = solve(&p, &SolverConfig::default()).unwrap();
    let b = solve(&p, &SolverConfig::default()).unwrap();
    assert!((a.primal_value - b.primal_value).abs() <= 10.0 * 1e-8);
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn weak_duality_on_feasible_iterates() {
    for seed in 0..4 {
        let c = random_hermitian(3, 100 + seed);
        let (p, _) = trace_norm_problem(&c);
        let cfg = SolverConfig::default();
        let sol = solve(&p, &cfg).unwrap();
        let mut checked = 0;
        for log in &sol.history {
            if log.lmi_residual <= cfg.feas_tol && log.multiplier_residual <= cfg.feas_tol {
                assert!(
                    log.lower <= log.upper + cfg.feas_tol * (1.0 + log.scale),
                    "{log:?}"
                );
                checked += 1;
            }
        }
        assert!(checked >= 1);
        assert!(sol.primal_value <= sol.dual_value + cfg.feas_tol * 10.0);
    }
}

#[test]
fn certificate_flags_perturbed_assignment() {
    let c = HermitianMatrix::from_diagonal(&[1.0, -1.0]);
    let (p, r) = trace_norm_problem(&c);
    let mut sol = solve(&p, &SolverConfig::default()).unwrap();
    let clean = check_certificate(&p, &sol);
    assert!(clean.max_residual <= 1e-9);
    assert!(clean.violations(1e-9).is_empty());
    let bumped = sol.value(r) + &HermitianMatrix::identity(2).scale(1e-3);
    sol.values[r.index()] = bumped;
    let report = check_certificate(&p, &sol);
    assert_eq!(report.violations(1e-6), vec!["R<=1"]);
}

#[test]
fn partial_transpose_terms_in_complex_problem() {
    // W-type problem on a random complex operator: the optimum lies between
    // the trivial point R = 1 and the trace norm.
    let dims = BipartiteDims::new(2, 2).unwrap();
    let c = random_hermitian(4, 5);
    let (mut p, r) = trace_norm_problem(&c);
    p.add_inequality(MatrixInequality::new("ppt", 4).term(Term::new(r).partial_transpose(dims)))
        .unwrap();
    let sol = solve(&p, &SolverConfig::default()).unwrap();
    assert!(sol.is_optimal());
    let tn: f64 = hermitian_eig(&c)
        .unwrap()
        .eigenvalues
        .iter()
        .map(|x| x.abs())
        .sum();
    assert!(sol.primal_value <= tn + 1e-7);
    assert!(sol.primal_value >= c.trace() - 1e-7);
    let report = check_certificate(&p, &sol);
    assert!(
        report.max_residual <= 1e-9 && report.gap <= 1e-7,
        "{report:?}"
    );
}

#[test]
fn dump_is_nonempty() {
    let (p, _) = trace_norm_problem(&HermitianMatrix::identity(2));
    assert!(p.dump().lines().count() >= 4);
}
