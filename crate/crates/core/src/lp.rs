//! Dense two-phase simplex with Bland's rule.
//!
//! Problem sizes here are tiny (tens of rows, at most a few hundred
//! columns), so a full tableau is kept. Artificial columns stay in the
//! tableau after phase 1; they hold the basis inverse, which gives the row
//! duals and the Farkas ray for infeasible systems.

const PIVOT_TOL: f64 = 1e-11;
const OPT_TOL: f64 = 1e-10;
/// Phase-1 objective above which the system is declared infeasible.
pub const FEAS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `minimize objective·x` subject to the constraints, with `x_j ≥ 0`
/// unless `free[j]`.
#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub free: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per constraint, `c_B B⁻¹` in the original row signs.
    pub duals: Vec<f64>,
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal(LpSolution),
    /// `y` with `yᵀA_j ≤ 0` on every nonnegative column, `yᵀA_j = 0` on
    /// free columns, sign-compatible with inequality rows, and `yᵀb > 0`.
    Infeasible { farkas: Vec<f64> },
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            objective: vec![0.0; num_vars],
            constraints: Vec::new(),
            free: vec![false; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        debug_assert_eq!(coeffs.len(), self.num_vars());
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    rows: usize,
    /// structural + slack columns; artificials follow.
    cols: usize,
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    sign: Vec<f64>,
    /// standard column -> (original var, multiplier); slacks map to None.
    origin: Vec<Option<(usize, f64)>>,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.constraints.len();
        let mut origin = Vec::new();
        for j in 0..n {
            origin.push(Some((j, 1.0)));
            if lp.free[j] {
                origin.push(Some((j, -1.0)));
            }
        }
        let structural = origin.len();
        let slack_rows: Vec<usize> = (0..m)
            .filter(|&i| lp.constraints[i].relation != Relation::Eq)
            .collect();
        origin.extend(slack_rows.iter().map(|_| None));
        let cols = origin.len();
        let width = cols + m + 1;

        let mut t = vec![vec![0.0; width]; m];
        let mut sign = vec![1.0; m];
        for (i, c) in lp.constraints.iter().enumerate() {
            let row = &mut t[i];
            for (k, o) in origin[..structural].iter().enumerate() {
                let (j, mult) = o.unwrap();
                row[k] = c.coeffs[j] * mult;
            }
            if let Some(s) = slack_rows.iter().position(|&r| r == i) {
                row[structural + s] = if c.relation == Relation::Le { 1.0 } else { -1.0 };
            }
            row[width - 1] = c.rhs;
            if c.rhs < 0.0 {
                sign[i] = -1.0;
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            row[cols + i] = 1.0;
        }
        Self {
            rows: m,
            cols,
            t,
            basis: (cols..cols + m).collect(),
            sign,
            origin,
        }
    }

    fn rhs(&self, i: usize) -> f64 {
        self.t[i][self.cols + self.rows]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland-rule simplex on cost vector `cost` (length cols + rows),
    /// entering columns restricted to `allowed`.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> bool {
        let max_iter = 50_000;
        for _ in 0..max_iter {
            let cb = self.row_prices(cost);
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let reduced = cost[j] - (0..self.rows).map(|i| cb[i] * self.t[i][j]).sum::<f64>();
                reduced < -OPT_TOL
            });
            let Some(e) = entering else { return true };
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..self.rows {
                let a = self.t[i][e];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    let cand = (ratio, self.basis[i], i);
                    best = match best {
                        None => Some(cand),
                        Some(b) if ratio < b.0 - 1e-12 => Some(cand),
                        Some(b) if (ratio - b.0).abs() <= 1e-12 && cand.1 < b.1 => Some(cand),
                        keep => keep,
                    };
                }
            }
            match best {
                None => return false,
                Some((_, _, r)) => self.pivot(r, e),
            }
        }
        true
    }

    /// c_B, one price per row.
    fn row_prices(&self, cost: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|&b| cost[b]).collect()
    }

    /// y = c_B B⁻¹, read from the artificial block.
    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let cb = self.row_prices(cost);
        (0..self.rows)
            .map(|k| (0..self.rows).map(|i| cb[i] * self.t[i][self.cols + k]).sum())
            .collect()
    }

    fn run(mut self, lp: &LinearProgram) -> LpOutcome {
        let width = self.cols + self.rows;
        let mut phase1 = vec![0.0; width];
        for c in phase1.iter_mut().skip(self.cols) {
            *c = 1.0;
        }
        self.optimize(&phase1, self.cols);
        let infeas: f64 = (0..self.rows)
            .filter(|&i| self.basis[i] >= self.cols)
            .map(|i| self.rhs(i))
            .sum();
        if infeas > FEAS_TOL {
            let y = self.duals(&phase1);
            let farkas = y.iter().zip(&self.sign).map(|(v, s)| v * s).collect();
            return LpOutcome::Infeasible { farkas };
        }
        // drive remaining artificials out where possible
        for i in 0..self.rows {
            if self.basis[i] >= self.cols {
                if let Some(j) = (0..self.cols).find(|&j| self.t[i][j].abs() > 1e-9 && !self.basis.contains(&j)) {
                    self.pivot(i, j);
                }
            }
        }

        let mut cost = vec![0.0; width];
        for (k, o) in self.origin.iter().enumerate() {
            if let Some((j, mult)) = o {
                cost[k] = lp.objective[*j] * mult;
            }
        }
        if !self.optimize(&cost, self.cols) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![0.0; lp.num_vars()];
        for (i, &b) in self.basis.iter().enumerate() {
            if let Some(Some((j, mult))) = self.origin.get(b) {
                x[*j] += mult * self.rhs(i);
            }
        }
        let objective = lp.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let duals = self
            .duals(&cost)
            .iter()
            .zip(&self.sign)
            .map(|(v, s)| v * s)
            .collect();
        LpOutcome::Optimal(LpSolution {
            x,
            objective,
            duals,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_optimum() {
        // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6
        let mut lp = LinearProgram::new(2);
        lp.objective = vec![-1.0, -1.0];
        lp.add(vec![1.0, 2.0], Relation::Le, 4.0);
        lp.add(vec![3.0, 1.0], Relation::Le, 6.0);
        let LpOutcome::Optimal(s) = lp.solve() else { panic!() };
        assert!((s.x[0] - 1.6).abs() < 1e-9 && (s.x[1] - 1.2).abs() < 1e-9);
        assert!((s.objective + 2.8).abs() < 1e-9);
        // strong duality: b·y = objective
        let by: f64 = 4.0 * s.duals[0] + 6.0 * s.duals[1];
        assert!((by - s.objective).abs() < 1e-9);
    }

    #[test]
    fn free_variables_and_ge_rows() {
        // min x s.t. x >= -3, x free
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![1.0];
        lp.free = vec![true];
        lp.add(vec![1.0], Relation::Ge, -3.0);
        let LpOutcome::Optimal(s) = lp.solve() else { panic!() };
        assert!((s.x[0] + 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_gives_farkas_ray() {
        // x + y = 1, x + y = 2
        let mut lp = LinearProgram::new(2);
        lp.add(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add(vec![1.0, 1.0], Relation::Eq, 2.0);
        let LpOutcome::Infeasible { farkas } = lp.solve() else { panic!() };
        let yb = farkas[0] + 2.0 * farkas[1];
        assert!(yb > 0.0);
        for j in 0..2 {
            assert!(farkas[0] + farkas[1] <= 1e-12, "column {j}");
        }
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = LinearProgram::new(1);
        lp.objective = vec![-1.0];
        lp.add(vec![1.0], Relation::Ge, 0.0);
        assert!(matches!(lp.solve(), LpOutcome::Unbounded));
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new(3);
        lp.objective = vec![1.0, 2.0, 3.0];
        lp.add(vec![1.0, 1.0, 1.0], Relation::Eq, 1.0);
        lp.add(vec![2.0, 2.0, 2.0], Relation::Eq, 2.0);
        let LpOutcome::Optimal(s) = lp.solve() else { panic!() };
        assert!((s.x[0] - 1.0).abs() < 1e-9);
        assert!((s.objective - 1.0).abs() < 1e-9);
    }
}
