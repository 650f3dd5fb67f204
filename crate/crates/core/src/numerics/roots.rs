use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
}

/// Root of a function with a sign change on `[lo, hi]`, located to within `tol`
/// on the argument. An endpoint whose value is within `tol` of zero is accepted
/// as the root.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, RootError>
where
    F: FnMut(f64) -> f64,
{
    if !(lo <= hi) || !tol.is_finite() || tol <= 0.0 {
        return Err(RootError::InvalidBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let fa = f(a);
    if fa.abs() <= tol {
        return Ok(a);
    }
    let fb = f(b);
    if fb.abs() <= tol {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(RootError::NoSignChange { lo, hi, f_lo: fa, f_hi: fb });
    }
    let left_negative = fa < 0.0;
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == left_negative {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Newton iteration kept inside a shrinking sign-change bracket; falls back to
/// bisection whenever a Newton step leaves the bracket or stalls.
///
/// `f` returns the value and derivative. Stops once `|f| <= ftol` or the
/// bracket is narrower than `xtol`.
pub fn bracketed_newton<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    start: f64,
    xtol: f64,
    ftol: f64,
) -> Result<f64, RootError>
where
    F: FnMut(f64) -> (f64, f64),
{
    if !(lo <= hi) {
        return Err(RootError::InvalidBracket { lo, hi });
    }
    let (f_lo, _) = f(lo);
    if f_lo.abs() <= ftol {
        return Ok(lo);
    }
    let (f_hi, _) = f(hi);
    if f_hi.abs() <= ftol {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(RootError::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let left_negative = f_lo < 0.0;
    let (mut a, mut b) = (lo, hi);
    let mut x = if start > a && start < b { start } else { 0.5 * (a + b) };
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if (fx < 0.0) == left_negative {
            a = x;
        } else {
            b = x;
        }
        if b - a <= xtol * (1.0 + x.abs()) {
            return Ok(x);
        }
        let newton = x - fx / dfx;
        x = if dfx.is_finite() && dfx != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    Ok(x)
}
