//! The modeling layer on its own: negativity as an SDP,
//! min tr P  s.t.  P ⪰ 0,  P + ρ^{T_B} ⪰ 0,
//! checked against the eigenvalue formula and the solver's certificate.

use entbound::matrix::{hermitian_eig, partial_transpose};
use entbound::sdp::{
    check_certificate, solve, MatrixInequality, SdpProblem, Sense, SolverConfig, Term, VarKind,
};
use entbound::states::rho_alpha;

fn main() {
    let rho = rho_alpha(0.3).unwrap();
    let pt = partial_transpose(rho.rho(), rho.dims()).unwrap();
    let n = pt.dim();

    let mut problem = SdpProblem::new(Sense::Minimize);
    let p = problem.add_variable("P", n, VarKind::HermitianPsd).unwrap();
    problem
        .add_objective(p, entbound::matrix::HermitianMatrix::identity(n))
        .unwrap();
    problem
        .add_inequality(
            MatrixInequality::new("P+rho^TB>=0", n)
                .constant(pt.clone())
                .term(Term::new(p)),
        )
        .unwrap();

    let sol = solve(&problem, &SolverConfig::default()).unwrap();
    let exact: f64 = hermitian_eig(&pt)
        .unwrap()
        .eigenvalues
        .iter()
        .filter(|&&l| l < 0.0)
        .map(|l| -l)
        .sum();
    println!(
        "status {:?} after {} iterations",
        sol.status, sol.iterations
    );
    println!(
        "primal {:.12}  dual {:.12}  exact {exact:.12}",
        sol.primal_value, sol.dual_value
    );

    let cert = check_certificate(&problem, &sol);
    println!(
        "max constraint residual {:.1e}, dual residual {:.1e}",
        cert.max_residual, cert.dual_residual
    );
    println!(
        "E_N = log2(1 + 2N) = {:.9}",
        (1.0 + 2.0 * sol.primal_value).log2()
    );
}
