//! Reference tail probabilities by direct numerical integration of the
//! densities, independent of the library's special functions.

use std::f64::consts::PI;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
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
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fm, fb) = (f(a), f((a + b) / 2.0), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// ∫_x^∞ pdf(t) dt via t = x + s/(1 − s) on s ∈ [0, 1).
pub fn upper_tail(pdf: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let g = |s: f64| {
        let one_minus = 1.0 - s;
        pdf(x + s / one_minus) / (one_minus * one_minus)
    };
    // Split so the integrator sees the bulk of the mass near s = 0.
    let cuts = [0.0, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999, 1.0 - 1e-9];
    cuts.windows(2).map(|w| integrate(&g, w[0], w[1], 1e-14)).sum()
}

/// Γ(k/2) from the factorial closed forms.
pub fn gamma_half(k: u32) -> f64 {
    if k % 2 == 0 {
        (1..k / 2).map(f64::from).product()
    } else {
        // Γ(n + 1/2) = √π · ∏_{i<n} (i + 1/2)
        let n = (k - 1) / 2;
        let mut g = PI.sqrt();
        for i in 0..n {
            g *= f64::from(i) + 0.5;
        }
        g
    }
}

pub fn chi_square_pdf(k: u32) -> impl Fn(f64) -> f64 {
    let half = f64::from(k) / 2.0;
    let norm = 2f64.powf(half) * gamma_half(k);
    move |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            x.powf(half - 1.0) * (-x / 2.0).exp() / norm
        }
    }
}

pub fn normal_pdf(z: f64) -> f64 {
    (-z * z / 2.0).exp() / (2.0 * PI).sqrt()
}

pub fn t_pdf(df: u32) -> impl Fn(f64) -> f64 {
    let v = f64::from(df);
    let c = gamma_half(df + 1) / ((v * PI).sqrt() * gamma_half(df));
    move |t: f64| c * (1.0 + t * t / v).powf(-(v + 1.0) / 2.0)
}

pub const GRID: [f64; 10] = [0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 7.5, 10.0, 15.0, 20.0];

/// Largest absolute gap between the library tails and the integrated
/// tails over the grid with df 1 to 10.
pub fn max_tail_error() -> f64 {
    use cynote_science::stats::special::{chi_square_tail, normal_two_sided, t_two_sided};
    let mut worst: f64 = 0.0;
    for x in GRID {
        worst = worst.max((normal_two_sided(x) - 2.0 * upper_tail(&normal_pdf, x)).abs());
    }
    for df in 1..=10 {
        let chi = chi_square_pdf(df);
        let t = t_pdf(df);
        for x in GRID {
            worst = worst.max((chi_square_tail(x, df) - upper_tail(&chi, x)).abs());
            worst = worst.max((t_two_sided(x, f64::from(df)) - 2.0 * upper_tail(&t, x)).abs());
        }
    }
    worst
}
