//! Order-by-order Cauchy-Kowalewski solver for first-order linear analytic
//! systems
//!
//!   du/du2 = A(u1, u2) du/du1 + B(u1, u2) u,     u(., 0) = init
//!
//! over the truncated series ring. The u2-degree-(k+1) slice of the solution
//! is read off from the degree-k slice of the right-hand side, so the whole
//! jet is determined by the initial data.

use crate::error::{Error, Result};
use crate::exact::GaussianRational;
use crate::series::{BiSeries, SeriesMatrix, UniSeries, Var};

#[derive(Debug, Clone)]
pub struct CKSystem {
    /// m x m coefficient of du/du1.
    pub a: SeriesMatrix,
    /// m x m zeroth-order coefficient.
    pub b: SeriesMatrix,
    /// Initial data on (u2 = 0), one series in u1 per unknown.
    pub init: Vec<UniSeries>,
    /// Requested truncation order N.
    pub order: usize,
}

#[derive(Debug, Clone)]
pub struct CKSolution {
    pub u: Vec<BiSeries>,
    /// Order to which the PDE residual is guaranteed to vanish: one less
    /// than the solution order, since the right-hand side consumes one
    /// u1-derivative.
    pub certified_order: usize,
}

impl CKSystem {
    fn size(&self) -> usize {
        self.init.len()
    }

    fn effective_order(&self) -> usize {
        let mut n = self.order.min(self.a.order()).min(self.b.order());
        for s in &self.init {
            n = n.min(s.order());
        }
        n
    }
}

pub fn ck_solve(sys: &CKSystem) -> Result<CKSolution> {
    let m = sys.size();
    assert_eq!((sys.a.rows(), sys.a.cols()), (m, m), "A must be m x m");
    assert_eq!((sys.b.rows(), sys.b.cols()), (m, m), "B must be m x m");
    let n = sys.effective_order();
    if n < 1 || n == usize::MAX {
        return Err(Error::OrderExhausted);
    }
    let mut u: Vec<BiSeries> = sys
        .init
        .iter()
        .map(|s| s.to_biseries(Var::U1).truncate(n))
        .collect();
    for k in 0..n {
        let rhs = rhs_of(sys, &u);
        let step = GaussianRational::from_int((k + 1) as i64).inv()?;
        for i in 0..m {
            for (&(p, q), coeff) in rhs[i].terms() {
                if q == k && p + k + 1 <= n {
                    u[i].set_coeff(p, k + 1, coeff * &step);
                }
            }
        }
    }
    Ok(CKSolution { u, certified_order: n - 1 })
}

/// The residual du/du2 - A du/du1 - B u, truncated to the certified order.
/// All-zero for a valid solution.
pub fn ck_residual(sys: &CKSystem, sol: &CKSolution) -> Vec<BiSeries> {
    let rhs = rhs_of(sys, &sol.u);
    sol.u
        .iter()
        .zip(rhs)
        .map(|(ui, ri)| (&ui.diff(Var::U2) - &ri).truncate(sol.certified_order))
        .collect()
}

fn rhs_of(sys: &CKSystem, u: &[BiSeries]) -> Vec<BiSeries> {
    let m = u.len();
    (0..m)
        .map(|i| {
            let mut acc = BiSeries::zero(crate::series::ORDER_INF);
            for j in 0..m {
                acc = &acc + &(sys.a.get(i, j) * &u[j].diff(Var::U1));
                acc = &acc + &(sys.b.get(i, j) * &u[j]);
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::ORDER_INF;

    fn g(n: i64) -> GaussianRational {
        GaussianRational::from_int(n)
    }

    fn const_mat(v: i64) -> SeriesMatrix {
        SeriesMatrix::from_rows(vec![vec![BiSeries::constant(g(v))]])
    }

    #[test]
    fn no_evolution_keeps_initial_data() {
        let sys = CKSystem {
            a: const_mat(0),
            b: const_mat(0),
            init: vec![UniSeries::from_terms(ORDER_INF, &[(1, g(1))])],
            order: 8,
        };
        let sol = ck_solve(&sys).unwrap();
        assert_eq!(sol.u[0], BiSeries::var(Var::U1, 8));
        assert!(ck_residual(&sys, &sol).iter().all(|s| s.is_zero()));
    }

    #[test]
    fn transport_equation() {
        // u_t = u_x with u(x, 0) = x^2 has solution (x + t)^2
        let sys = CKSystem {
            a: const_mat(1),
            b: const_mat(0),
            init: vec![UniSeries::from_terms(ORDER_INF, &[(2, g(1))])],
            order: 8,
        };
        let sol = ck_solve(&sys).unwrap();
        let expected = BiSeries::from_terms(8, &[(2, 0, g(1)), (1, 1, g(2)), (0, 2, g(1))]);
        assert_eq!(sol.u[0], expected);
        assert!(ck_residual(&sys, &sol).iter().all(|s| s.is_zero()));
    }

    #[test]
    fn exponential_recursion() {
        // u_t = u with u(x, 0) = 1 gives sum t^k / k!
        let n = 8;
        let sys = CKSystem {
            a: const_mat(0),
            b: const_mat(1),
            init: vec![UniSeries::constant(g(1))],
            order: n,
        };
        let sol = ck_solve(&sys).unwrap();
        let mut factorial = g(1);
        for k in 0..=n {
            if k > 0 {
                factorial = &factorial * &g(k as i64);
            }
            assert_eq!(sol.u[0].coeff(0, k), factorial.inv().unwrap());
        }
    }

    #[test]
    fn initial_data_restriction() {
        let n = 6;
        let init = UniSeries::from_terms(n, &[(0, g(1)), (1, g(-2)), (3, g(5))]);
        let sys = CKSystem {
            a: const_mat(1),
            b: const_mat(1),
            init: vec![init.clone()],
            order: n,
        };
        let sol = ck_solve(&sys).unwrap();
        assert_eq!(sol.u[0].restrict_u2(), init);
    }

    #[test]
    fn perturbed_solution_has_nonzero_residual() {
        let sys = CKSystem {
            a: const_mat(1),
            b: const_mat(0),
            init: vec![UniSeries::from_terms(ORDER_INF, &[(2, g(1))])],
            order: 8,
        };
        let mut sol = ck_solve(&sys).unwrap();
        let bumped = &sol.u[0].coeff(1, 1) + &g(1);
        sol.u[0].set_coeff(1, 1, bumped);
        assert!(ck_residual(&sys, &sol).iter().any(|s| !s.is_zero()));
    }

    #[test]
    fn order_exhausted() {
        let sys = CKSystem {
            a: const_mat(0),
            b: const_mat(0),
            init: vec![UniSeries::constant(g(1))],
            order: 0,
        };
        assert_eq!(ck_solve(&sys).unwrap_err(), Error::OrderExhausted);
    }
}
