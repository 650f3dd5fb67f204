use serde::Serialize;
use thiserror::Error;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;
const FEAS_TOL: f64 = 1e-9;

/// One linear row `coefficients · x (<= or ==) rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpRow {
    pub coefficients: Vec<f64>,
    pub rhs: f64,
}

impl LpRow {
    pub fn new(coefficients: Vec<f64>, rhs: f64) -> Self {
        Self { coefficients, rhs }
    }
}

/// `maximize objective · x` subject to inequality rows (`<=`), equality rows and
/// `x >= lower_bounds`. A lower bound of `-inf` makes the variable free.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub inequalities: Vec<LpRow>,
    pub equalities: Vec<LpRow>,
    pub lower_bounds: Vec<f64>,
}

impl LpProblem {
    /// Problem over `n` nonnegative variables with no rows yet.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { objective, inequalities: Vec::new(), equalities: Vec::new(), lower_bounds: vec![0.0; n] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    /// Multipliers of the inequality rows (nonnegative at optimum).
    pub inequality_duals: Vec<f64>,
    pub equality_duals: Vec<f64>,
    /// Objective of the dual problem at the returned multipliers.
    pub dual_value: f64,
}

impl LpSolution {
    fn without_optimum(status: LpStatus, n: usize, m_ineq: usize, m_eq: usize) -> Self {
        Self {
            status,
            x: vec![f64::NAN; n],
            value: f64::NAN,
            inequality_duals: vec![f64::NAN; m_ineq],
            equality_duals: vec![f64::NAN; m_eq],
            dual_value: f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("LP dimension mismatch: {0}")]
    Dimension(String),
    #[error("LP contains a non-finite coefficient")]
    NonFinite,
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let factor = self.rows[i][c];
            if factor == 0.0 {
                continue;
            }
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                *v -= factor * pv;
            }
            self.rows[i][c] = 0.0;
            self.rhs[i] -= factor * pivot_rhs;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, costs: &[f64]) -> Vec<f64> {
        let mut d = costs.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = costs[self.basis[i]];
            if cb == 0.0 {
                continue;
            }
            for (dj, a) in d.iter_mut().zip(row) {
                *dj -= cb * a;
            }
        }
        d
    }

    /// Maximize `costs · y` with Bland's rule; columns flagged in `barred` never enter.
    fn optimize(&mut self, costs: &[f64], barred: &[bool]) -> bool {
        loop {
            let d = self.reduced_costs(costs);
            let entering = (0..d.len()).find(|&j| !barred[j] && d[j] > COST_TOL);
            let Some(c) = entering else { return true };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][c];
                if a > PIVOT_TOL {
                    let ratio = self.rhs[i].max(0.0) / a;
                    best = match best {
                        None => Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14 * (1.0 + br)
                                || (ratio <= br + 1e-14 * (1.0 + br) && self.basis[i] < self.basis[bi])
                            {
                                Some((i, ratio))
                            } else {
                                Some((bi, br))
                            }
                        }
                    };
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }
}

/// Dense two-phase primal simplex with Bland's anti-cycling rule.
pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    let n = p.objective.len();
    if p.lower_bounds.len() != n {
        return Err(LpError::Dimension(format!("{} lower bounds for {} variables", p.lower_bounds.len(), n)));
    }
    for row in p.inequalities.iter().chain(&p.equalities) {
        if row.coefficients.len() != n {
            return Err(LpError::Dimension(format!("row of length {} for {} variables", row.coefficients.len(), n)));
        }
        if !row.rhs.is_finite() || row.coefficients.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite);
        }
    }
    if p.objective.iter().any(|v| !v.is_finite()) || p.lower_bounds.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(LpError::NonFinite);
    }

    // Standard-form columns: each variable maps to one shifted column, or a
    // (+, -) pair when free.
    let mut var_cols: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    let mut n_std = 0;
    for &lb in &p.lower_bounds {
        if lb.is_finite() {
            var_cols.push(vec![(n_std, 1.0)]);
            n_std += 1;
        } else {
            var_cols.push(vec![(n_std, 1.0), (n_std + 1, -1.0)]);
            n_std += 2;
        }
    }
    let shift: Vec<f64> = p.lower_bounds.iter().map(|&lb| if lb.is_finite() { lb } else { 0.0 }).collect();

    let m_ineq = p.inequalities.len();
    let m_eq = p.equalities.len();
    let m = m_ineq + m_eq;
    let slack0 = n_std;
    let art0 = n_std + m_ineq;

    let mut sign = vec![1.0; m];
    let mut std_rows = Vec::with_capacity(m);
    let mut std_rhs = Vec::with_capacity(m);
    for (i, row) in p.inequalities.iter().chain(&p.equalities).enumerate() {
        let mut coeffs = vec![0.0; n_std];
        for (j, &a) in row.coefficients.iter().enumerate() {
            for &(c, s) in &var_cols[j] {
                coeffs[c] = a * s;
            }
        }
        let b = row.rhs - row.coefficients.iter().zip(&shift).map(|(a, l)| a * l).sum::<f64>();
        if b < 0.0 {
            sign[i] = -1.0;
        }
        std_rows.push(coeffs);
        std_rhs.push(b);
    }

    // Artificial variables for equality rows and for inequality rows whose
    // right-hand side had to be negated.
    let mut art_of_row = vec![None; m];
    let mut n_art = 0;
    for i in 0..m {
        if i >= m_ineq || sign[i] < 0.0 {
            art_of_row[i] = Some(art0 + n_art);
            n_art += 1;
        }
    }
    let width = art0 + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut identity_col = vec![0; m];
    for i in 0..m {
        let s = sign[i];
        let mut r = vec![0.0; width];
        for (v, a) in r.iter_mut().zip(&std_rows[i]) {
            *v = s * a;
        }
        if i < m_ineq {
            r[slack0 + i] = s;
        }
        if let Some(a) = art_of_row[i] {
            r[a] = 1.0;
            basis.push(a);
            identity_col[i] = a;
        } else {
            basis.push(slack0 + i);
            identity_col[i] = slack0 + i;
        }
        rows.push(r);
        rhs.push(s * std_rhs[i]);
    }
    let mut t = Tableau { rows, rhs, basis };

    // Phase 1.
    if n_art > 0 {
        let mut costs = vec![0.0; width];
        for c in costs.iter_mut().skip(art0) {
            *c = -1.0;
        }
        let barred = vec![false; width];
        t.optimize(&costs, &barred);
        let infeas: f64 = (0..m).filter(|&i| t.basis[i] >= art0).map(|i| t.rhs[i]).sum();
        let scale = 1.0 + std_rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if infeas > FEAS_TOL * scale {
            return Ok(LpSolution::without_optimum(LpStatus::Infeasible, n, m_ineq, m_eq));
        }
        // Drive remaining (zero-level) artificials out of the basis.
        for i in 0..m {
            if t.basis[i] >= art0 {
                if let Some(c) = (0..art0).find(|&j| t.rows[i][j].abs() > 1e-9) {
                    t.pivot(i, c);
                }
            }
        }
    }

    // Phase 2.
    let mut costs = vec![0.0; width];
    for (j, &c) in p.objective.iter().enumerate() {
        for &(col, s) in &var_cols[j] {
            costs[col] = c * s;
        }
    }
    let barred: Vec<bool> = (0..width).map(|j| j >= art0).collect();
    if !t.optimize(&costs, &barred) {
        return Ok(LpSolution::without_optimum(LpStatus::Unbounded, n, m_ineq, m_eq));
    }

    let mut y = vec![0.0; n_std];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n_std {
            y[b] = t.rhs[i];
        }
    }
    let x: Vec<f64> = (0..n)
        .map(|j| shift[j] + var_cols[j].iter().map(|&(c, s)| s * y[c]).sum::<f64>())
        .collect();
    let value: f64 = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();

    let mut duals = vec![0.0; m];
    for i in 0..m {
        let col = identity_col[i];
        let ybar: f64 = (0..m).map(|r| costs[t.basis[r]] * t.rows[r][col]).sum();
        duals[i] = sign[i] * ybar;
    }
    let shifted_obj: f64 = p.objective.iter().zip(&shift).map(|(c, l)| c * l).sum();
    let dual_value = duals.iter().zip(&std_rhs).map(|(d, b)| d * b).sum::<f64>() + shifted_obj;
    if (dual_value - value).abs() > 1e-8 * (1.0 + value.abs()) {
        log::warn!("LP strong-duality residual {:e}", dual_value - value);
    }
    let (inequality_duals, equality_duals) = {
        let mut d = duals;
        let eq = d.split_off(m_ineq);
        (d, eq)
    };
    Ok(LpSolution { status: LpStatus::Optimal, x, value, inequality_duals, equality_duals, dual_value })
}
