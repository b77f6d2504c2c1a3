use std::f64::consts::{PI, SQRT_2};

use super::Integrand;
use crate::error::{invalid, Result};
use crate::special::gaussian_inv_cdf;

/// `f(x) = pi^{d/2} cos(|(Phi^-1(x_1), ..., Phi^-1(x_d))| / sqrt 2)`, whose
/// integral over the unit cube equals `int cos(|t|) exp(-|t|^2) dt` over `R^d`.
#[derive(Debug, Clone)]
pub struct KeisterIntegrand {
    d: usize,
    scale: f64,
}

pub fn keister_integrand(d: usize) -> Result<KeisterIntegrand> {
    if d == 0 {
        return invalid("the Keister integrand needs d >= 1");
    }
    Ok(KeisterIntegrand {
        d,
        scale: PI.powf(d as f64 / 2.0),
    })
}

impl Integrand for KeisterIntegrand {
    fn dim(&self) -> usize {
        self.d
    }

    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let mut sq = 0.0;
        for &u in x {
            let z = gaussian_inv_cdf(u)?;
            sq += z * z;
        }
        Ok(self.scale * (sq.sqrt() / SQRT_2).cos())
    }

    fn label(&self) -> &str {
        "keister"
    }
}

/// `Gamma(d / 2)` from the recurrences starting at `Gamma(1) = 1` and `Gamma(1/2) = sqrt(pi)`.
fn gamma_half(d: usize) -> f64 {
    let mut g = if d.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut a = if d.is_multiple_of(2) { 1.0 } else { 0.5 };
    while a < d as f64 / 2.0 {
        g *= a;
        a += 1.0;
    }
    g
}

/// The Keister integral in spherical coordinates,
/// `2 pi^{d/2} / Gamma(d/2) int_0^inf cos(r) exp(-r^2) r^{d-1} dr`,
/// by adaptive Simpson quadrature on `[0, R]` with a negligible tail beyond `R`.
pub fn keister_reference(d: usize) -> Result<f64> {
    if !(1..=12).contains(&d) {
        return invalid(format!(
            "the Keister reference covers 1 <= d <= 12, got {d}"
        ));
    }
    let p = (d - 1) as i32;
    let radial = |r: f64| r.cos() * (-r * r).exp() * r.powi(p);
    let mut upper: f64 = 1.0;
    while (-upper * upper).exp() * upper.powi(p) >= 1e-16 || upper < (p as f64).sqrt() {
        upper += 0.25;
    }
    // split at unit intervals so each piece is smooth and well resolved
    let mut total = 0.0;
    let mut a = 0.0;
    while a < upper {
        let b = (a + 1.0).min(upper);
        total += adaptive_simpson(&radial, a, b, 1e-15, 50);
        a = b;
    }
    Ok(2.0 * PI.powf(d as f64 / 2.0) / gamma_half(d) * total)
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
