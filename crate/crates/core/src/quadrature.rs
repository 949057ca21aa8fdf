//! Adaptive Simpson quadrature of the conditional intensity, an independent
//! route to the compensator.

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::pattern::History;

const MAX_DEPTH: u32 = 50;
const MIN_DEPTH: u32 = 4;

/// Adaptive Simpson integral of `f` over `[a, b]` to absolute tolerance `eps`.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, eps: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    simpson_with_noise(f, &|_| 0.0, a, b, eps)
}

// `noise(x)` is the relative error of f near x from sources other than the
// rule itself; differences below that level are not chased.
fn simpson_with_noise<F, N>(f: &F, noise: &N, a: f64, b: f64, eps: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    N: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    let fa = f(a)?;
    let fb = f(b)?;
    let m = 0.5 * (a + b);
    let fm = f(m)?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    refine(f, noise, a, b, fa, fm, fb, whole, eps, 0)
}

#[allow(clippy::too_many_arguments)]
fn refine<F, N>(
    f: &F,
    noise: &N,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    N: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::QuadratureFailure { a, b });
    }
    // Below this the error estimate is rounding noise.
    let floor = (4.0 * f64::EPSILON).max(2.0 * noise(a));
    let eps = eps.max(floor * (left.abs() + right.abs()));
    if depth >= MIN_DEPTH && delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH || m <= a || m >= b {
        return Err(Error::QuadratureFailure { a, b });
    }
    Ok(
        refine(f, noise, a, m, fa, flm, fm, left, 0.5 * eps, depth + 1)?
            + refine(f, noise, m, b, fm, frm, fb, right, 0.5 * eps, depth + 1)?,
    )
}

/// `∫₀ᵗ λ*(s) ds` by adaptive Simpson on each piece between consecutive
/// events and intensity discontinuities.
///
/// The integrand on a piece starting at an event uses the right limit at
/// the event; at a piece's right end it uses the left limit.
pub fn integrate_intensity(
    model: &ModelSpec,
    history: History<'_>,
    t: f64,
    tolerance: f64,
) -> Result<f64> {
    let past = history.before(t);
    let mut cuts: Vec<f64> = vec![0.0];
    cuts.extend(past.iter().map(|e| e.time).filter(|&x| x > 0.0));
    cuts.extend(model.discontinuities(0.0, t));
    cuts.push(t);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let pieces = (cuts.len() - 1).max(1) as f64;
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let known = &past[..past.partition_point(|e| e.time <= a)];
        let right_end = b.next_down();
        let start = a.next_up().min(right_end);
        let f = |s: f64| model.intensity_given_past(s.min(right_end).max(start), known);
        let width = b - a;
        let estimate = width * f(0.5 * (a + b))?;
        let eps = tolerance * (1.0 + estimate.abs()) / pieces;
        let singular_start = match model.intensity_given_past(a, known) {
            Ok(v) => !v.is_finite(),
            Err(Error::NonFiniteResult(_)) => true,
            Err(e) => return Err(e),
        };
        // The intensity may behave like a non-integer power of the time
        // since the piece start (a gamma hazard just after an event), so
        // pieces are integrated in v with s = a + (b - a) v^p.
        let (p, v0, exponent) = if singular_start {
            // Ages below h0 are not resolvable in absolute time; that
            // sliver is integrated from a fitted expansion instead.
            let h0 = if a == 0.0 {
                width * 1e-14
            } else {
                (a.next_up() - a) * 1048576.0
            }
            .min(width * 1e-3);
            let (sliver, exponent) = singular_sliver(&f, a, h0)?;
            total += sliver;
            let p = (2.0 / (1.0 + exponent)).clamp(2.0, 64.0);
            (p, (h0 / width).powf(1.0 / p), exponent)
        } else {
            (2.0, 0.0, 0.0)
        };
        let g = |v: f64| -> Result<f64> {
            if v <= 0.0 {
                return Ok(0.0);
            }
            Ok(f(a + width * v.powf(p))? * p * v.powf(p - 1.0) * width)
        };
        // Times are rounded to the spacing of floats near a, which is a
        // large relative error in small ages.
        let spacing = a.next_up() - a;
        let noise = |v: f64| 0.5 * spacing * exponent.abs() / (width * v.powf(p));
        total += simpson_with_noise(&g, &noise, v0, 1.0, eps)?;
    }
    Ok(total)
}

// Integral of f over [a, a + h0] for an integrable singularity at a, and
// the fitted exponent. The sliver is treated as the start of a hazard whose
// density is c h^e, so f(a + h) = c h^e / (1 - c h^q / q) with q = e + 1 and
// the integral is -ln(1 - c h0^q / q). (c, e) are fitted to two samples.
fn singular_sliver<F>(f: &F, a: f64, h0: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let h1 = 100.0 * h0;
    let (f0, f1) = (f(a + h0)?, f(a + h1)?);
    let failure = Error::QuadratureFailure { a, b: a + h0 };
    let scale = |e: f64| {
        let q = e + 1.0;
        f0 / (h0.powf(e) + f0 * h0.powf(q) / q)
    };
    let residual = |e: f64| {
        let q = e + 1.0;
        let c = scale(e);
        c * h1.powf(e) / (1.0 - c * h1.powf(q) / q) - f1
    };
    // The pure power law through both samples bounds e from above.
    let mut hi = (f0 / f1).ln() / (h0 / h1).ln();
    if !hi.is_finite() || hi <= -1.0 {
        return Err(failure);
    }
    let r_hi = residual(hi);
    let mut lo = hi;
    loop {
        lo = -1.0 + 0.5 * (lo + 1.0);
        if residual(lo) * r_hi <= 0.0 {
            break;
        }
        if lo + 1.0 < 1e-12 {
            return Err(failure);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid) * r_hi <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let e = 0.5 * (lo + hi);
    let q = e + 1.0;
    let sliver = -(-scale(e) * h0.powf(q) / q).ln_1p();
    if !sliver.is_finite() {
        return Err(failure);
    }
    Ok((sliver, e))
}
