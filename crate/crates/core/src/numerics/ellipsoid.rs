use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Ellipsoid `{x : (x - c)^T A^{-1} (x - c) <= 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidState {
    pub center: Vec<f64>,
    pub shape_matrix: DMatrix<f64>,
    pub iteration: usize,
}

impl EllipsoidState {
    pub fn ball(center: Vec<f64>, radius: f64) -> Self {
        let n = center.len();
        Self { center, shape_matrix: DMatrix::identity(n, n) * (radius * radius), iteration: 0 }
    }

    pub fn is_positive_definite(&self) -> bool {
        self.shape_matrix.clone().cholesky().is_some()
    }

    pub fn determinant(&self) -> f64 {
        self.shape_matrix.determinant()
    }

    /// `sqrt(g^T A g)`: half-width of the ellipsoid along `g`, scaled by `|g|`.
    pub fn width_along(&self, g: &[f64]) -> f64 {
        let g = DVector::from_column_slice(g);
        (g.dot(&(&self.shape_matrix * &g))).max(0.0).sqrt()
    }

    /// Central cut keeping the half `{x : g^T (x - c) <= 0}`.
    pub fn cut(&mut self, g: &[f64]) {
        self.deep_cut(g, 0.0);
    }

    /// Cut keeping `{x : g^T (x - c) <= -depth}`. Returns `false`, leaving the
    /// state untouched, when that half-space misses the ellipsoid.
    pub fn deep_cut(&mut self, g: &[f64], depth: f64) -> bool {
        let n = self.center.len();
        let q = self.width_along(g);
        if q <= 0.0 {
            self.iteration += 1;
            return true;
        }
        let a = depth.max(0.0) / q;
        if a >= 1.0 {
            return false;
        }
        self.iteration += 1;
        if n == 1 {
            let r = self.shape_matrix[(0, 0)].sqrt();
            self.center[0] -= g[0].signum() * r * (1.0 + a) / 2.0;
            self.shape_matrix[(0, 0)] *= ((1.0 - a) / 2.0).powi(2);
            return true;
        }
        let nf = n as f64;
        let gv = DVector::from_column_slice(g) / q;
        let ag = &self.shape_matrix * &gv;
        let tau = (1.0 + nf * a) / (nf + 1.0);
        for (c, d) in self.center.iter_mut().zip(ag.iter()) {
            *c -= tau * d;
        }
        let sigma = 2.0 * tau / (1.0 + a);
        let delta = nf * nf * (1.0 - a * a) / (nf * nf - 1.0);
        let outer = &ag * ag.transpose();
        let m = (&self.shape_matrix - outer * sigma) * delta;
        self.shape_matrix = (&m + m.transpose()) * 0.5;
        true
    }
}

/// A convex constraint `g(x) <= 0` given by its value and a subgradient.
pub struct Constraint<'a> {
    oracle: Box<dyn Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync + 'a>,
}

impl<'a> Constraint<'a> {
    pub fn new(f: impl Fn(&[f64]) -> (f64, Vec<f64>) + Send + Sync + 'a) -> Self {
        Self { oracle: Box::new(f) }
    }

    /// `a · x <= b`.
    pub fn linear(a: Vec<f64>, b: f64) -> Self {
        Self::new(move |x: &[f64]| (a.iter().zip(x).map(|(ai, xi)| ai * xi).sum::<f64>() - b, a.clone()))
    }

    pub fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        (self.oracle)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipsoidSettings {
    /// Stop once `sqrt(g^T A g)` at a feasible center drops below this.
    pub tolerance: f64,
    /// Constraint violation treated as feasible.
    pub feasibility_tol: f64,
    /// Iteration budget is `iteration_factor * n^2`.
    pub iteration_factor: usize,
}

impl Default for EllipsoidSettings {
    fn default() -> Self {
        Self { tolerance: 1e-5, feasibility_tol: 1e-6, iteration_factor: 500 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidOutcome {
    /// Best feasible center visited.
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    /// `f(point) - min f` is at most this much when the run converged.
    pub certified_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EllipsoidError<E> {
    #[error("ellipsoid method hit {iterations} iterations; best value so far {:?}", best.as_ref().map(|b| b.value))]
    NotConverged { iterations: usize, best: Option<EllipsoidOutcome> },
    #[error("the ellipsoid contains no feasible point")]
    Infeasible,
    /// Every point of the starting ball has an objective above the target.
    #[error("the objective exceeds the target throughout the ellipsoid")]
    AboveTarget,
    #[error(transparent)]
    Oracle(E),
}

/// Minimize a convex function by the ellipsoid method.
///
/// `objective` returns the value and a subgradient. Iterates violating any
/// constraint by more than `feasibility_tol` take a constraint cut instead.
pub fn ellipsoid_minimize<F, E>(
    objective: F,
    constraints: &[Constraint<'_>],
    x0: &[f64],
    radius: f64,
    settings: &EllipsoidSettings,
) -> Result<EllipsoidOutcome, EllipsoidError<E>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>), E>,
{
    ellipsoid_minimize_below(objective, constraints, x0, radius, settings, None)
}

/// [`ellipsoid_minimize`] with objective cuts taken at the smaller of the best
/// value so far and `target`. Fails with [`EllipsoidError::AboveTarget`] once
/// those cuts prove the minimum exceeds `target`.
pub fn ellipsoid_minimize_below<F, E>(
    mut objective: F,
    constraints: &[Constraint<'_>],
    x0: &[f64],
    radius: f64,
    settings: &EllipsoidSettings,
    target: Option<f64>,
) -> Result<EllipsoidOutcome, EllipsoidError<E>>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>), E>,
{
    let n = x0.len();
    let max_iter = settings.iteration_factor * n * n;
    let mut state = EllipsoidState::ball(x0.to_vec(), radius);
    let mut best: Option<EllipsoidOutcome> = None;
    while state.iteration < max_iter {
        let violated = constraints
            .iter()
            .map(|c| c.evaluate(&state.center))
            .filter(|(v, _)| *v > settings.feasibility_tol)
            .max_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((v, g)) = violated {
            if !state.deep_cut(&g, v - settings.feasibility_tol) {
                return match best {
                    Some(b) => Err(EllipsoidError::NotConverged { iterations: state.iteration, best: Some(b) }),
                    None => Err(EllipsoidError::Infeasible),
                };
            }
            continue;
        }
        let (value, g) = objective(&state.center).map_err(EllipsoidError::Oracle)?;
        let width = state.width_along(&g);
        if best.as_ref().is_none_or(|b| value < b.value) {
            best = Some(EllipsoidOutcome {
                point: state.center.clone(),
                value,
                iterations: state.iteration,
                certified_gap: f64::INFINITY,
            });
        }
        let best_value = best.as_ref().expect("a feasible iterate was just recorded").value;
        if width <= settings.tolerance {
            let mut out = best.expect("a feasible iterate was just recorded");
            // The final cut certifies min f >= value - width.
            out.certified_gap = out.value - (value - width);
            out.iterations = state.iteration;
            return Ok(out);
        }
        let below_target = target.is_some_and(|t| t < best_value);
        let level = if below_target { target.expect("checked") } else { best_value };
        if !state.deep_cut(&g, value - level) {
            if below_target {
                return Err(EllipsoidError::AboveTarget);
            }
            // Every point left has a value of at least `best_value`.
            let mut out = best.expect("a feasible iterate was just recorded");
            out.certified_gap = 0.0;
            out.iterations = state.iteration;
            return Ok(out);
        }
    }
    Err(EllipsoidError::NotConverged { iterations: state.iteration, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    #[test]
    fn quadratic_unconstrained() {
        let c = [0.3, -1.2, 2.0];
        let f = |x: &[f64]| -> Result<(f64, Vec<f64>), Infallible> {
            let d: Vec<f64> = x.iter().zip(&c).map(|(a, b)| a - b).collect();
            Ok((d.iter().map(|v| v * v).sum(), d.iter().map(|v| 2.0 * v).collect()))
        };
        // A value gap of 1e-9 pins the minimizer of a unit quadratic to ~3e-5.
        let settings = EllipsoidSettings { tolerance: 1e-9, ..Default::default() };
        let out = ellipsoid_minimize(f, &[], &[0.0; 3], 10.0, &settings).unwrap();
        assert!(out.certified_gap <= 1e-9);
        for (a, b) in out.point.iter().zip(&c) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn one_dimensional_pinned() {
        let alpha = 0.4;
        let cons = [Constraint::linear(vec![alpha], 1.0), Constraint::linear(vec![-alpha], -1.0)];
        let f = |x: &[f64]| -> Result<(f64, Vec<f64>), Infallible> { Ok((x[0], vec![1.0])) };
        let out = ellipsoid_minimize(f, &cons, &[1.0], 10.0, &EllipsoidSettings::default()).unwrap();
        assert!((out.point[0] - 1.0 / alpha).abs() < 1e-5);
    }

    #[test]
    fn volume_shrinks() {
        let mut s = EllipsoidState::ball(vec![0.0; 3], 1.0);
        let mut det = s.determinant();
        for k in 0..50 {
            let g = [(k as f64).sin(), (k as f64 * 0.7).cos(), 1.0];
            s.cut(&g);
            let d = s.determinant();
            assert!(d < det);
            assert!(s.is_positive_definite());
            det = d;
        }
    }
}
