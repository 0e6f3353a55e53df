//! Dense two-phase simplex for small linear programs.
//!
//! Problems have the form
//!
//! ```text
//! minimize  cᵀx   subject to   a_iᵀx (≤ | ≥ | =) b_i,   x ≥ 0.
//! ```
//!
//! Pivoting follows Bland's smallest-index rule, so the method terminates
//! without anti-cycling perturbations. Free variables are handled by callers
//! through a shift.

use crate::error::{Error, Result};

/// Pivot and feasibility tolerance.
pub const LP_EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when `status` is optimal.
    pub x: Vec<f64>,
    pub objective: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    vars: usize,
    objective: Vec<f64>,
    rows: Vec<(Vec<f64>, Relation, f64)>,
}

impl LinearProgram {
    pub fn new(vars: usize) -> Self {
        Self {
            vars,
            objective: vec![0.0; vars],
            rows: Vec::new(),
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_objective(&mut self, c: Vec<f64>) -> Result<()> {
        if c.len() != self.vars {
            return Err(Error::LinearProgram(format!(
                "objective has {} coefficients for {} variables",
                c.len(),
                self.vars
            )));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearProgram("non-finite objective coefficient".into()));
        }
        self.objective = c;
        Ok(())
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, rel: Relation, rhs: f64) -> Result<()> {
        if coeffs.len() != self.vars {
            return Err(Error::LinearProgram(format!(
                "constraint has {} coefficients for {} variables",
                coeffs.len(),
                self.vars
            )));
        }
        if !rhs.is_finite() || coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::LinearProgram("non-finite constraint data".into()));
        }
        self.rows.push((coeffs, rel, rhs));
        Ok(())
    }

    /// Sparse convenience form of [`LinearProgram::add_constraint`].
    pub fn add_sparse(&mut self, terms: &[(usize, f64)], rel: Relation, rhs: f64) -> Result<()> {
        let mut coeffs = vec![0.0; self.vars];
        for &(j, a) in terms {
            if j >= self.vars {
                return Err(Error::LinearProgram(format!("variable index {j} out of range")));
            }
            coeffs[j] += a;
        }
        self.add_constraint(coeffs, rel, rhs)
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.vars;
        let m = self.rows.len();
        // normalize to nonnegative right-hand sides
        let rows: Vec<(Vec<f64>, Relation, f64)> = self
            .rows
            .iter()
            .map(|(a, rel, b)| {
                if *b < 0.0 {
                    let flipped = match rel {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (a.iter().map(|v| -v).collect(), flipped, -b)
                } else {
                    (a.clone(), *rel, *b)
                }
            })
            .collect();
        let slacks = rows.iter().filter(|r| r.1 != Relation::Eq).count();
        let artificials = rows.iter().filter(|r| r.1 != Relation::Le).count();
        let first_art = n + slacks;
        let cols = first_art + artificials;
        let mut t = Tableau {
            a: vec![vec![0.0; cols + 1]; m],
            basis: vec![0; m],
            cols,
        };
        let (mut s, mut art) = (n, first_art);
        for (i, (a, rel, b)) in rows.iter().enumerate() {
            t.a[i][..n].copy_from_slice(a);
            t.a[i][cols] = *b;
            match rel {
                Relation::Le => {
                    t.a[i][s] = 1.0;
                    t.basis[i] = s;
                    s += 1;
                }
                Relation::Ge => {
                    t.a[i][s] = -1.0;
                    s += 1;
                    t.a[i][art] = 1.0;
                    t.basis[i] = art;
                    art += 1;
                }
                Relation::Eq => {
                    t.a[i][art] = 1.0;
                    t.basis[i] = art;
                    art += 1;
                }
            }
        }

        let scale = 1.0 + rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if artificials > 0 {
            let mut cost = vec![0.0; cols];
            for c in cost.iter_mut().skip(first_art) {
                *c = 1.0;
            }
            t.optimize(&cost, cols)?;
            let infeasibility: f64 = (0..m)
                .filter(|&i| t.basis[i] >= first_art)
                .map(|i| t.a[i][cols])
                .sum();
            if infeasibility > 1e-9 * scale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    x: vec![0.0; n],
                    objective: f64::NAN,
                });
            }
            t.drive_out_artificials(first_art);
        }

        let mut cost = vec![0.0; cols];
        cost[..n].copy_from_slice(&self.objective);
        if !t.optimize(&cost, first_art)? {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: vec![0.0; n],
                objective: f64::NEG_INFINITY,
            });
        }
        let mut x = vec![0.0; n];
        for (i, &bv) in t.basis.iter().enumerate() {
            if bv < n {
                x[bv] = t.a[i][cols].max(0.0);
            }
        }
        let objective = x.iter().zip(&self.objective).map(|(x, c)| x * c).sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
        })
    }
}

struct Tableau {
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    /// Minimizes `cost` over columns `< allowed`; returns false when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        let m = self.a.len();
        let rhs = self.cols;
        for _ in 0..MAX_PIVOTS {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j]
                    - (0..m).map(|i| cost[self.basis[i]] * self.a[i][j]).sum::<f64>();
                reduced < -LP_EPS
            });
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..m {
                let aij = self.a[i][c];
                if aij > LP_EPS {
                    let ratio = self.a[i][rhs] / aij;
                    leaving = match leaving {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best - LP_EPS
                                || (ratio <= best + LP_EPS && self.basis[i] < self.basis[k])
                            {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leaving else {
                return Ok(false);
            };
            self.pivot(r, c);
        }
        Err(Error::LinearProgram(format!(
            "simplex exceeded {MAX_PIVOTS} pivots"
        )))
    }

    /// After phase one, replaces zero-level artificial basics by structural
    /// columns where possible and drops redundant rows.
    fn drive_out_artificials(&mut self, first_art: usize) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= first_art {
                let col = (0..first_art).find(|&j| self.a[i][j].abs() > 1e-9);
                match col {
                    Some(c) => {
                        self.pivot(i, c);
                        i += 1;
                    }
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18 → 36 at (2, 6)
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![-3.0, -5.0]).unwrap();
        lp.add_sparse(&[(0, 1.0)], Relation::Le, 4.0).unwrap();
        lp.add_sparse(&[(1, 2.0)], Relation::Le, 12.0).unwrap();
        lp.add_sparse(&[(0, 3.0), (1, 2.0)], Relation::Le, 18.0).unwrap();
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 36.0).abs() < 1e-12);
        assert!((s.x[0] - 2.0).abs() < 1e-12 && (s.x[1] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn equality_and_ge_rows() {
        // min x + y s.t. x + y = 3, x ≥ 1, y ≥ 1.5
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![1.0, 2.0]).unwrap();
        lp.add_sparse(&[(0, 1.0), (1, 1.0)], Relation::Eq, 3.0).unwrap();
        lp.add_sparse(&[(0, 1.0)], Relation::Ge, 1.0).unwrap();
        lp.add_sparse(&[(1, 1.0)], Relation::Ge, 1.5).unwrap();
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective - 4.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(1);
        lp.add_sparse(&[(0, 1.0)], Relation::Le, 1.0).unwrap();
        lp.add_sparse(&[(0, 1.0)], Relation::Ge, 2.0).unwrap();
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![-1.0, 0.0]).unwrap();
        lp.add_sparse(&[(0, 1.0), (1, -1.0)], Relation::Le, 1.0).unwrap();
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(2);
        lp.set_objective(vec![1.0, -1.0]).unwrap();
        lp.add_sparse(&[(0, 1.0), (1, 1.0)], Relation::Eq, 2.0).unwrap();
        lp.add_sparse(&[(0, 2.0), (1, 2.0)], Relation::Eq, 4.0).unwrap();
        let s = lp.solve().unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective + 2.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_errors() {
        let mut lp = LinearProgram::new(2);
        assert!(lp.set_objective(vec![1.0]).is_err());
        assert!(lp.add_constraint(vec![1.0], Relation::Le, 1.0).is_err());
        assert!(lp.add_sparse(&[(3, 1.0)], Relation::Le, 1.0).is_err());
        assert!(lp.add_sparse(&[(0, 1.0)], Relation::Le, f64::NAN).is_err());
    }
}
