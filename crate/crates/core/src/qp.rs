//! Exact solvers for the two tiny control-selection problems.
//!
//! [`solve_min_norm`] projects a nominal input onto a box intersected with a
//! few halfspaces. With at most three inputs the optimum lies on a face
//! spanned by at most three linearly independent active constraints, so every
//! such active set is enumerated (lowest indices first), the equality
//! constrained projection is solved for each, and the closest feasible
//! candidate wins. This is exact, branch-free in its outcome and
//! deterministic.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, norm_inf, solve_dense, Mat};
use crate::scalar::Scalar;

pub const MAX_INPUTS: usize = 3;
pub const MAX_HALFSPACES: usize = 8;

/// `normal·u ≤ offset`
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Halfspace<T> {
    pub fn new(normal: Vec<T>, offset: T) -> Self {
        Self { normal, offset }
    }

    pub fn violation(&self, u: &[T]) -> T {
        dot(&self.normal, u) - self.offset
    }
}

/// `min ‖u − target‖²` over `‖u‖∞ ≤ box_bound` and the halfspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem<T> {
    pub target: Vec<T>,
    pub box_bound: T,
    pub halfspaces: Vec<Halfspace<T>>,
}

impl<T: Scalar> QpProblem<T> {
    pub fn new(target: Vec<T>, box_bound: T) -> Self {
        Self { target, box_bound, halfspaces: Vec::new() }
    }

    pub fn with_halfspace(mut self, normal: Vec<T>, offset: T) -> Self {
        self.halfspaces.push(Halfspace::new(normal, offset));
        self
    }

    /// Halfspaces followed by the box rows `+eᵢ·u ≤ ū`, `−eᵢ·u ≤ ū`.
    pub fn all_constraints(&self) -> Vec<Halfspace<T>> {
        let m = self.target.len();
        let mut rows = self.halfspaces.clone();
        for i in 0..m {
            for sign in [T::one(), -T::one()] {
                let mut e = vec![T::zero(); m];
                e[i] = sign;
                rows.push(Halfspace::new(e, self.box_bound));
            }
        }
        rows
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution<T> {
    pub u: Vec<T>,
    /// Indices into [`QpProblem::all_constraints`] of the defining active set.
    pub active: Vec<usize>,
    /// Lagrange multipliers matching `active`.
    pub multipliers: Vec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResidual<T> {
    pub stationarity: T,
    pub primal: T,
    pub dual: T,
    pub complementarity: T,
}

impl<T: Scalar> KktResidual<T> {
    pub fn max(&self) -> T {
        self.stationarity.max(self.primal).max(self.dual).max(self.complementarity)
    }
}

fn feasibility_tol<T: Scalar>(row: &Halfspace<T>) -> T {
    T::lit(1e-10) * (T::one() + row.offset.abs()).max(norm(&row.normal))
}

fn subsets(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return;
    }
    loop {
        visit(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Projection of `target` onto the rows in `set` treated as equalities:
/// `u = target − Aᵀλ` with `(A·Aᵀ)λ = A·target − b`.
fn project_onto<T: Scalar>(rows: &[Halfspace<T>], set: &[usize], target: &[T]) -> Option<(Vec<T>, Vec<T>)> {
    if set.is_empty() {
        return Some((target.to_vec(), Vec::new()));
    }
    let k = set.len();
    let mut gram = Mat::zeros(k, k);
    let mut scale = T::zero();
    for (i, &a) in set.iter().enumerate() {
        for (j, &b) in set.iter().enumerate() {
            let v = dot(&rows[a].normal, &rows[b].normal);
            gram.set(i, j, v);
            if i == j {
                scale = scale.max(v);
            }
        }
    }
    let rhs: Vec<T> = set.iter().map(|&a| dot(&rows[a].normal, target) - rows[a].offset).collect();
    let lambda = solve_dense(&gram, &rhs, T::lit(1e-10) * scale.max(T::min_positive_value()))?;
    let mut u = target.to_vec();
    for (&a, &l) in set.iter().zip(&lambda) {
        for (ui, &ai) in u.iter_mut().zip(&rows[a].normal) {
            *ui = *ui - l * ai;
        }
    }
    Some((u, lambda))
}

/// Unique minimizer of `‖u − target‖²` over the box and halfspaces.
///
/// Returns [`Error::QpInfeasible`] with the constraints violated by the
/// least-infeasible candidate when the feasible set is empty.
pub fn solve_min_norm<T: Scalar>(problem: &QpProblem<T>) -> Result<QpSolution<T>> {
    let m = problem.target.len();
    if m == 0 || m > MAX_INPUTS {
        return Err(Error::param("target", format!("input dimension {m} outside 1..={MAX_INPUTS}")));
    }
    if problem.halfspaces.len() > MAX_HALFSPACES {
        return Err(Error::param("halfspaces", format!("at most {MAX_HALFSPACES} supported")));
    }
    if !(problem.box_bound > T::zero()) {
        return Err(Error::param("box_bound", "must be positive"));
    }
    if problem.halfspaces.iter().any(|h| h.normal.len() != m) {
        return Err(Error::param("halfspaces", "normal length differs from input dimension"));
    }
    let rows = problem.all_constraints();
    let target = &problem.target;
    let mut best: Option<(T, QpSolution<T>)> = None;
    let mut least_bad: Option<(T, Vec<T>)> = None;

    for k in 0..=m {
        subsets(rows.len(), k, |set| {
            let Some((u, lambda)) = project_onto(&rows, set, target) else {
                return;
            };
            let worst = rows
                .iter()
                .map(|r| r.violation(&u) / (T::one() + r.offset.abs()).max(norm(&r.normal)))
                .fold(T::neg_infinity(), T::max);
            let feasible = rows.iter().all(|r| r.violation(&u) <= feasibility_tol(r));
            if !feasible {
                if least_bad.as_ref().is_none_or(|(w, _)| worst < *w) {
                    least_bad = Some((worst, u));
                }
                return;
            }
            let dist: T = u.iter().zip(target).map(|(&a, &b)| (a - b) * (a - b)).fold(T::zero(), |s, v| s + v);
            let better = match &best {
                None => true,
                Some((d, _)) => dist < *d - T::lit(1e-14) * (T::one() + *d),
            };
            if better {
                best = Some((dist, QpSolution { u, active: set.to_vec(), multipliers: lambda }));
            }
        });
    }

    match best {
        Some((_, mut sol)) => {
            let hs = problem.halfspaces.len();
            for (&idx, _) in sol.active.iter().zip(&sol.multipliers) {
                if idx >= hs {
                    let coord = (idx - hs) / 2;
                    let sign = if (idx - hs) % 2 == 0 { T::one() } else { -T::one() };
                    sol.u[coord] = sign * problem.box_bound;
                }
            }
            for v in sol.u.iter_mut() {
                *v = v.max(-problem.box_bound).min(problem.box_bound);
            }
            Ok(sol)
        }
        None => {
            let u = least_bad.map(|(_, u)| u).unwrap_or_else(|| target.clone());
            let mut violated = Vec::new();
            let mut max_violation = T::zero();
            for (i, r) in rows.iter().enumerate() {
                let v = r.violation(&u);
                if v > feasibility_tol(r) {
                    violated.push(i);
                    max_violation = max_violation.max(v);
                }
            }
            Err(Error::QpInfeasible { violated, max_violation: max_violation.to_f64_lossy() })
        }
    }
}

/// KKT residuals of a candidate solution.
pub fn kkt_residual<T: Scalar>(problem: &QpProblem<T>, sol: &QpSolution<T>) -> KktResidual<T> {
    let rows = problem.all_constraints();
    let mut grad: Vec<T> = sol.u.iter().zip(&problem.target).map(|(&a, &b)| a - b).collect();
    let mut dual = T::zero();
    let mut complementarity = T::zero();
    for (&idx, &l) in sol.active.iter().zip(&sol.multipliers) {
        for (g, &a) in grad.iter_mut().zip(&rows[idx].normal) {
            *g = *g + l * a;
        }
        dual = dual.max(-l);
        complementarity = complementarity.max((l * rows[idx].violation(&sol.u)).abs());
    }
    let primal = rows.iter().map(|r| r.violation(&sol.u)).fold(T::zero(), T::max);
    KktResidual { stationarity: norm_inf(&grad), primal, dual, complementarity }
}

/// Which constraint limited the line maximization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineBinding {
    /// The input box saturated first.
    Box,
    /// The CBF row `(d·d)·b ≤ c` binds.
    Cbf,
    /// No scaling satisfies both; the box-saturated input against the
    /// direction is returned instead.
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineMax<T> {
    pub u: Vec<T>,
    pub scale: T,
    pub binding: LineBinding,
}

/// `u = b*·d` with `b* = max{ b : ‖b·d‖∞ ≤ ū, (d·d)·b ≤ c }`.
pub fn solve_line_max<T: Scalar>(direction: &[T], input_bound: T, rhs: T) -> Result<LineMax<T>> {
    let len = norm(direction);
    if !(len >= T::lit(1e-9)) {
        return Err(Error::DegenerateDirection(len.to_f64_lossy()));
    }
    let box_scale = input_bound / norm_inf(direction);
    let cbf_scale = rhs / (len * len);
    let (scale, binding) = if cbf_scale < -box_scale {
        (-box_scale, LineBinding::Infeasible)
    } else if cbf_scale < box_scale {
        (cbf_scale, LineBinding::Cbf)
    } else {
        (box_scale, LineBinding::Box)
    };
    let u = direction.iter().map(|&d| (scale * d).max(-input_bound).min(input_bound)).collect();
    Ok(LineMax { u, scale, binding })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unconstrained_target_inside_box_is_returned() {
        let p = QpProblem::new(vec![0.2, -0.4], 1.0);
        let s = solve_min_norm(&p).unwrap();
        assert_eq!(s.u, vec![0.2, -0.4]);
        assert!(s.active.is_empty());
    }

    #[test]
    fn box_clamp() {
        let p = QpProblem::new(vec![2.0, 0.0], 1.0);
        assert_eq!(solve_min_norm(&p).unwrap().u, vec![1.0, 0.0]);
    }

    #[test]
    fn single_halfspace_projection() {
        let p = QpProblem::<f64>::new(vec![1.0, 1.0], 1.0).with_halfspace(vec![1.0, 1.0], 1.0);
        let s = solve_min_norm(&p).unwrap();
        assert!((s.u[0] - 0.5).abs() < 1e-15 && (s.u[1] - 0.5).abs() < 1e-15);
        assert!(kkt_residual(&p, &s).max() < 1e-12);
    }

    #[test]
    fn infeasible_reports_violated_rows() {
        let p = QpProblem::new(vec![0.0, 0.0], 1.0).with_halfspace(vec![1.0, 0.0], -2.0);
        match solve_min_norm(&p) {
            Err(Error::QpInfeasible { violated, max_violation }) => {
                assert!(!violated.is_empty());
                assert!(max_violation > 0.0);
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn subset_enumeration_order() {
        let mut seen = Vec::new();
        subsets(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        subsets(3, 0, |_| count += 1);
        assert_eq!(count, 1);
    }

    #[test]
    fn line_max_box_binds() {
        let r = solve_line_max(&[1.0, 0.0, 0.0], 0.5, 100.0).unwrap();
        assert_eq!(r.u, vec![0.5, 0.0, 0.0]);
        assert_eq!(r.binding, LineBinding::Box);
    }

    #[test]
    fn line_max_cbf_binds() {
        let r = solve_line_max(&[1.0, 0.0, 0.0], 0.5, 0.1).unwrap();
        assert_eq!(r.u, vec![0.1, 0.0, 0.0]);
        assert_eq!(r.binding, LineBinding::Cbf);
    }

    #[test]
    fn line_max_degenerate_direction() {
        assert!(matches!(solve_line_max(&[0.0, 1e-12], 0.5, 1.0), Err(Error::DegenerateDirection(_))));
    }

    #[test]
    fn line_max_infeasible_saturates_against_direction() {
        let r = solve_line_max(&[0.0, 2.0], 0.5, -10.0).unwrap();
        assert_eq!(r.binding, LineBinding::Infeasible);
        assert_eq!(r.u, vec![0.0, -0.5]);
    }
}
