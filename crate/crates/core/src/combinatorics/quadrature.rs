use std::f64::consts::PI;

use crate::{Error, Result};

const PANELS: usize = 8;

/// Adaptive Simpson with Richardson correction.
///
/// Starts from several panels: on periodic integrands the first two Simpson
/// estimates over a single interval can agree by symmetry long before either is
/// accurate.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    let h = (b - a) / PANELS as f64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let (lo, hi) = (a + h * i as f64, if i + 1 == PANELS { b } else { a + h * (i + 1) as f64 });
        let (flo, fhi) = (f(lo), f(hi));
        let fm = f(0.5 * (lo + hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        total += recurse(&f, lo, hi, flo, fm, fhi, whole, tol / PANELS as f64, max_depth)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "quadrature did not converge on [{a}, {b}]"
        )));
    }
    Ok(recurse(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + recurse(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// `∫ x^k dϱ_t` for the Marchenko-Pastur law, by quadrature of the density.
///
/// With `x = c + h cos θ` on `[a, b]` the square-root edges become `h sin θ` and
/// the integrand `(c + h cos θ)^(k-1) h² sin² θ / 2π` is smooth on `[0, π]`. The
/// atom at 0 contributes nothing for `k >= 1`.
pub fn mp_density_moment_quadrature(k: u32, t: f64) -> Result<f64> {
    if t <= 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("shape t must be positive, got {t}")));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("quadrature moments start at k = 1".into()));
    }
    let a = (1.0 - t.sqrt()).powi(2);
    let b = (1.0 + t.sqrt()).powi(2);
    let (c, h) = ((a + b) / 2.0, (b - a) / 2.0);
    let f = |theta: f64| {
        let s = theta.sin();
        (c + h * theta.cos()).powi(k as i32 - 1) * h * h * s * s / (2.0 * PI)
    };
    let scale = b.powi(k as i32);
    adaptive_simpson(f, 0.0, PI, 1e-13 * scale, 40)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!((mp_density_moment_quadrature(1, 1.0).unwrap() - 1.0).abs() < 1e-6);
        assert!((mp_density_moment_quadrature(2, 2.0).unwrap() - 6.0).abs() < 1e-5);
        assert!((mp_density_moment_quadrature(1, 0.5).unwrap() - 0.5).abs() < 1e-6);
        assert!(mp_density_moment_quadrature(1, -1.0).is_err());
        assert!(mp_density_moment_quadrature(0, 1.0).is_err());
        // symmetric integrands once fooled a single-interval start
        assert!((mp_density_moment_quadrature(3, 1.0).unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_reports_non_convergence() {
        assert!(adaptive_simpson(|x| x.sin(), 0.0, 1.0, 1e-12, 30).is_ok());
        assert!(adaptive_simpson(|x| if x < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, 1e-300, 3).is_err());
    }
}
