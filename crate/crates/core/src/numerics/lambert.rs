use std::f64::consts::E;

use thiserror::Error;

/// The branch point of W0, where w = -1.
pub const BRANCH_POINT: f64 = -1.0 / E;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("Lambert W0 is undefined for x = {0} (below -1/e)")]
pub struct LambertDomainError(pub f64);

/// Principal branch of the Lambert W function: the w >= -1 solving w e^w = x.
pub fn lambert_w0(x: f64) -> Result<f64, LambertDomainError> {
    if x.is_nan() || x < BRANCH_POINT {
        return Err(LambertDomainError(x));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == BRANCH_POINT {
        return Ok(-1.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x.abs() < 1e-4 {
        // Taylor series; the first omitted term is below 1e-18 relative.
        return Ok(x * (1.0 - x * (1.0 - x * (1.5 - x * (8.0 / 3.0 - x * (125.0 / 24.0))))));
    }
    Ok(halley(x, initial_guess(x)))
}

fn initial_guess(x: f64) -> f64 {
    if x < -0.25 {
        // Series in p = sqrt(2(ex + 1)) about the branch point.
        let p = (2.0 * x.mul_add(E, 1.0)).max(0.0).sqrt();
        -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))))
    } else if x < 3.0 {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    } else {
        let l1 = x.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn halley(x: f64, mut w: f64) -> f64 {
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            return w;
        }
        let wp1 = w + 1.0;
        if wp1 <= 0.0 {
            // Overshot past the branch point; pull back inside the domain.
            w = -1.0 + 1e-8;
            continue;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = (w - step).max(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs()) {
            return next;
        }
        w = next;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w0(-1.0 / E).unwrap(), -1.0);
        assert!(lambert_w0(-0.5).is_err());
    }

    #[test]
    fn near_branch_point() {
        for &d in &[1e-15, 1e-12, 1e-9, 1e-6, 1e-3] {
            let x = BRANCH_POINT + d;
            let w = lambert_w0(x).unwrap();
            assert!(w >= -1.0);
            assert!((w * w.exp() - x).abs() <= 1e-15, "d={d}");
        }
    }

    #[test]
    fn series_agrees_with_iteration_at_switch() {
        for &x in &[-9.99e-5, -1e-6, 2e-9, 9.99e-5] {
            let series = lambert_w0(x).unwrap();
            let halley = halley(x, initial_guess(x));
            assert!((series - halley).abs() <= 1e-15 * halley.abs(), "x={x}");
            assert!((series * series.exp() - x).abs() <= 1e-18, "x={x}");
        }
    }
}
