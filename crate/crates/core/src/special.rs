//! Log-space regularized incomplete gamma function, used for the gamma
//! renewal hazard and its integral.

use statrs::function::gamma::ln_gamma;

const MAX_ITER: usize = 1000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// `ln Q(a, x)` where `Q` is the regularized upper incomplete gamma function.
///
/// Series for `P` when `x < a + 1`, Lentz continued fraction for `Q`
/// otherwise. Requires `a > 0`, `x >= 0`.
pub fn ln_gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return f64::NEG_INFINITY;
    }
    if x < a + 1.0 {
        (-gamma_p_series(a, x)).ln_1p()
    } else {
        -x + a * x.ln() - ln_gamma(a) + continued_fraction(a, x).ln()
    }
}

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_p_series(a, x)
    } else {
        -(ln_gamma_q(a, x).exp_m1())
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum.ln() - x + a * x.ln() - ln_gamma(a)).exp()
}

// Returns the continued fraction factor h with Q = exp(-x) x^a h / Gamma(a).
fn continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Log density of Gamma(shape, rate) at `u > 0`.
pub fn ln_gamma_density(shape: f64, rate: f64, u: f64) -> f64 {
    shape * rate.ln() + (shape - 1.0) * u.ln() - rate * u - ln_gamma(shape)
}

/// Hazard `g(u) / (1 - G(u))` of a Gamma(shape, rate) interevent time at
/// age `u`. Infinite at `u = 0` when `shape < 1`.
pub fn gamma_hazard(shape: f64, rate: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return if shape < 1.0 {
            f64::INFINITY
        } else if shape == 1.0 {
            rate
        } else {
            0.0
        };
    }
    (ln_gamma_density(shape, rate, u) - ln_gamma_q(shape, rate * u)).exp()
}

/// Cumulative hazard `-ln(1 - G(u))`.
pub fn gamma_cumulative_hazard(shape: f64, rate: f64, u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    -ln_gamma_q(shape, rate * u)
}
