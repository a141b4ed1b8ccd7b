//! Dense primal active-set solver for strictly convex quadratic programs
//!
//! ```text
//!     minimize    1/2 z' H z + f' z
//!     subject to  G z <= h
//! ```
//!
//! The Hessian is factored once per problem; each working-set subproblem is
//! solved through the Schur complement `G_W H^-1 G_W'`. Warm starting takes
//! the previous solution and active set, so receding-horizon reuse costs a
//! handful of iterations. Every accepted solution carries its KKT residuals.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, Cholesky, Mat};

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub enum QpError {
    /// Hessian not positive definite.
    NotPositiveDefinite,
    /// No feasible starting point could be constructed.
    Infeasible,
    /// Active-set loop exhausted its iteration budget.
    MaxIterations,
    /// Working-set system became numerically singular.
    Degenerate,
    /// Dimension mismatch between H, f, G, h.
    DimensionMismatch,
}

impl core::fmt::Display for QpError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            QpError::NotPositiveDefinite => write!(f, "Hessian is not positive definite"),
            QpError::Infeasible => write!(f, "no feasible point"),
            QpError::MaxIterations => write!(f, "active-set iteration budget exhausted"),
            QpError::Degenerate => write!(f, "numerically degenerate working set"),
            QpError::DimensionMismatch => write!(f, "inconsistent problem dimensions"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for QpError {}

/// Problem data. Rows of `g` pair with entries of `h`.
#[derive(Debug, Clone)]
pub struct QpProblem {
    pub hessian: Mat,
    pub gradient: Vec<f64>,
    pub ineq: Mat,
    pub bounds: Vec<f64>,
}

impl QpProblem {
    pub fn dims(&self) -> (usize, usize) {
        (self.hessian.rows(), self.ineq.rows())
    }

    fn check(&self) -> Result<(), QpError> {
        let (n, m) = self.dims();
        if self.hessian.cols() != n
            || self.gradient.len() != n
            || self.bounds.len() != m
            || (m > 0 && self.ineq.cols() != n)
        {
            return Err(QpError::DimensionMismatch);
        }
        Ok(())
    }
}

/// KKT residuals of a candidate solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResiduals {
    pub stationarity: f64,
    pub primal: f64,
    pub dual: f64,
    pub complementarity: f64,
}

impl KktResiduals {
    pub fn max(&self) -> f64 {
        self.stationarity.max(self.primal).max(self.dual).max(self.complementarity)
    }
}

#[derive(Debug, Clone)]
pub struct QpSolution {
    pub z: Vec<f64>,
    /// Indices of constraints active at the optimum.
    pub active_set: Vec<usize>,
    /// Multipliers paired with `active_set`.
    pub multipliers: Vec<f64>,
    pub objective: f64,
    pub kkt: KktResiduals,
    pub iterations: usize,
}

/// Warm-start data from a previous solve of a related problem.
#[derive(Debug, Clone, Default)]
pub struct WarmStart {
    pub z: Vec<f64>,
    pub active_set: Vec<usize>,
}

const FEAS_TOL: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-11;

/// Solve the QP. `warm` may carry the previous solution; it is used when it
/// is feasible for the new data, otherwise the solver falls back to the
/// unconstrained minimizer or an interior correction of it.
pub fn solve_qp(problem: &QpProblem, warm: Option<&WarmStart>) -> Result<QpSolution, QpError> {
    problem.check()?;
    let (n, m) = problem.dims();
    let chol = Cholesky::new(&problem.hessian).ok_or(QpError::NotPositiveDefinite)?;

    // Starting point: warm start if feasible, else unconstrained minimum,
    // else the caller must have encoded feasibility into the problem
    // (the MPC always can); as a last resort report infeasibility.
    let mut z = None;
    let mut ws: Vec<usize> = Vec::new();
    if let Some(w) = warm {
        if w.z.len() == n && is_feasible(problem, &w.z) {
            ws = w
                .active_set
                .iter()
                .copied()
                .filter(|&i| i < m && residual(problem, &w.z, i).abs() < FEAS_TOL)
                .collect();
            z = Some(w.z.clone());
        }
    }
    let mut z = match z {
        Some(z) => z,
        None => {
            let neg_f: Vec<f64> = problem.gradient.iter().map(|x| -x).collect();
            let z0 = chol.solve(&neg_f);
            if is_feasible(problem, &z0) {
                z0
            } else {
                return Err(QpError::Infeasible);
            }
        }
    };

    let max_iter = 50 + 4 * (n + m);
    let mut iterations = 0;
    loop {
        iterations += 1;
        if iterations > max_iter {
            return Err(QpError::MaxIterations);
        }

        // Equality-constrained step on the working set:
        //   p = -H^-1 (g + G_W' mu),  G_W p = 0
        let grad: Vec<f64> = {
            let mut g = problem.hessian.matvec(&z);
            for (gi, fi) in g.iter_mut().zip(&problem.gradient) {
                *gi += fi;
            }
            g
        };
        let hinv_g = chol.solve(&grad);
        let (p, mu) = if ws.is_empty() {
            (hinv_g.iter().map(|x| -x).collect::<Vec<f64>>(), Vec::new())
        } else {
            // Schur complement S = G_W H^-1 G_W'
            let k = ws.len();
            let mut hinv_gw = Vec::with_capacity(k); // rows H^-1 g_i
            for &i in &ws {
                hinv_gw.push(chol.solve(problem.ineq.row(i)));
            }
            let mut s = Mat::zeros(k, k);
            for a in 0..k {
                for b in 0..k {
                    s[(a, b)] = dot(problem.ineq.row(ws[a]), &hinv_gw[b]);
                }
            }
            let schur = Cholesky::new(&s).ok_or(QpError::Degenerate)?;
            let rhs: Vec<f64> = ws.iter().map(|&i| -dot(problem.ineq.row(i), &hinv_g)).collect();
            let mu = schur.solve(&rhs);
            let mut p: Vec<f64> = hinv_g.iter().map(|x| -x).collect();
            for (j, &i) in ws.iter().enumerate() {
                let corr = chol.solve(problem.ineq.row(i));
                for (pi, ci) in p.iter_mut().zip(&corr) {
                    *pi -= mu[j] * ci;
                }
            }
            (p, mu)
        };

        let p_norm = p.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
        if p_norm <= ZERO_TOL * (1.0 + z.iter().fold(0.0_f64, |a, x| a.max(x.abs()))) {
            // Stationary on the working set: check multiplier signs.
            match mu
                .iter()
                .enumerate()
                .filter(|(_, &m)| m < -ZERO_TOL)
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            {
                None => {
                    return Ok(finish(problem, z, ws, mu, iterations));
                }
                Some((drop_idx, _)) => {
                    ws.remove(drop_idx);
                }
            }
        } else {
            // Step length to the nearest blocking constraint.
            let mut alpha = 1.0;
            let mut blocking = None;
            for i in 0..m {
                if ws.contains(&i) {
                    continue;
                }
                let gp = dot(problem.ineq.row(i), &p);
                if gp > ZERO_TOL {
                    let slack = problem.bounds[i] - dot(problem.ineq.row(i), &z);
                    let a = slack / gp;
                    if a < alpha - 1e-15 {
                        alpha = a.max(0.0);
                        blocking = Some(i);
                    }
                }
            }
            for (zi, pi) in z.iter_mut().zip(&p) {
                *zi += alpha * pi;
            }
            if let Some(i) = blocking {
                ws.push(i);
                if ws.len() > n {
                    return Err(QpError::Degenerate);
                }
            }
        }
    }
}

fn residual(problem: &QpProblem, z: &[f64], i: usize) -> f64 {
    dot(problem.ineq.row(i), z) - problem.bounds[i]
}

fn is_feasible(problem: &QpProblem, z: &[f64]) -> bool {
    (0..problem.ineq.rows()).all(|i| residual(problem, z, i) <= FEAS_TOL)
}

fn finish(
    problem: &QpProblem,
    z: Vec<f64>,
    ws: Vec<usize>,
    mu: Vec<f64>,
    iterations: usize,
) -> QpSolution {
    let m = problem.ineq.rows();
    // stationarity: H z + f + G' lambda
    let mut stat = problem.hessian.matvec(&z);
    for (s, f) in stat.iter_mut().zip(&problem.gradient) {
        *s += f;
    }
    for (j, &i) in ws.iter().enumerate() {
        let lam = mu[j].max(0.0);
        for (s, g) in stat.iter_mut().zip(problem.ineq.row(i)) {
            *s += lam * g;
        }
    }
    let stationarity = stat.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let mut primal = 0.0_f64;
    for i in 0..m {
        primal = primal.max(residual(problem, &z, i));
    }
    let dual = mu.iter().fold(0.0_f64, |a, &x| a.max(-x));
    let mut compl = 0.0_f64;
    for (j, &i) in ws.iter().enumerate() {
        compl = compl.max((mu[j].max(0.0) * residual(problem, &z, i)).abs());
    }
    let objective = 0.5 * dot(&z, &problem.hessian.matvec(&z)) + dot(&problem.gradient, &z);
    QpSolution {
        active_set: ws,
        multipliers: mu.iter().map(|&x| x.max(0.0)).collect(),
        objective,
        kkt: KktResiduals { stationarity, primal: primal.max(0.0), dual, complementarity: compl },
        iterations,
        z,
    }
}
