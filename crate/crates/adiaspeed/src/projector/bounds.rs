//! Certification arithmetic for Gaussian-filter energy estimation: the
//! filter-width condition (via the -1 branch of the Lambert W function), the
//! worst-case energy-estimate error, the filtered-weight window it implies,
//! and Monte Carlo sample-count / variance bounds.

use crate::error::{Error, Result};

/// First fitted constant of the width condition.
pub const C0: f64 = 1.3802;
/// Second fitted constant of the width condition.
pub const C1: f64 = 0.3749;

/// The -1 branch of the Lambert W function on `[-1/e, 0)`.
///
/// Seeded with the asymptotic form `ln(-x) - ln(-ln(-x))` away from the
/// branch point and a branch-point series near it, then polished with Halley
/// iteration to residual `|w e^w - x| <= 1e-12 |x|`.
pub fn lambert_w_minus1(x: f64) -> Result<f64> {
    let branch = -(-1.0f64).exp(); // -1/e
    if !(x < 0.0) || x < branch - 1e-12 {
        return Err(Error::OutOfDomain {
            context: "Lambert W_{-1} argument (need -1/e <= x < 0)",
            value: x,
        });
    }
    let x = x.max(branch);
    let p2 = 2.0 * (1.0 + std::f64::consts::E * x);
    let mut w = if x < -0.25 {
        // Branch-point series in p = sqrt(2(1 + e x)).
        let p = p2.max(0.0).sqrt();
        if p < 1e-4 {
            return Ok(-1.0 - p - p * p / 3.0);
        }
        -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p
    } else {
        let l = (-x).ln();
        l - (-l).ln()
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        let fp = ew * (1.0 + w);
        let denom = fp - f * (2.0 + w) / (2.0 * (1.0 + w));
        let dw = f / denom;
        w -= dw;
        if dw.abs() <= 1e-15 * w.abs() {
            break;
        }
    }
    Ok(w)
}

/// The auxiliary map `1/2 - W_{-1}(-min(sqrt(e)/(4x), 1/e))` appearing in
/// the width condition; equals 1.5 whenever the clip engages.
pub fn width_condition_map(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::OutOfDomain {
            context: "width-condition argument (need > 0)",
            value: x,
        });
    }
    let inv_e = (-1.0f64).exp();
    let arg = -(0.25 * std::f64::consts::E.sqrt() / x).min(inv_e);
    Ok(0.5 - lambert_w_minus1(arg)?)
}

/// Minimum Gaussian filter width `beta` that guarantees a certifiable local
/// maximizer for a spectrum with gap `gap` and overlap ratio `r`
/// (tracked weight over total remainder weight).
pub fn beta_requirement(gap: f64, r: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::OutOfDomain {
            context: "spectral gap (need > 0)",
            value: gap,
        });
    }
    if !(r > 0.0) {
        return Err(Error::OutOfDomain {
            context: "overlap ratio r (need > 0)",
            value: r,
        });
    }
    let w = width_condition_map(1.0 + C0 + C1 / r)?;
    Ok(2.0f64.sqrt().max(w.sqrt()) / gap)
}

/// Worst-case distance between the local maximizer of the filtered weight
/// curve and the true eigenvalue, for filter width `beta`, gap `gap`, and
/// overlap ratio `r`. Requires `beta` at or above [`beta_requirement`].
pub fn energy_error_bound(beta: f64, gap: f64, r: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::OutOfDomain {
            context: "filter width beta (need > 0)",
            value: beta,
        });
    }
    if !(gap > 0.0) {
        return Err(Error::OutOfDomain {
            context: "spectral gap (need > 0)",
            value: gap,
        });
    }
    if !(r > 0.0) {
        return Err(Error::OutOfDomain {
            context: "overlap ratio r (need > 0)",
            value: r,
        });
    }
    let bd = beta * gap;
    let ex = (-bd * bd).exp();
    let a0 = 2.0f64.sqrt() * bd * ex;
    let a1 = r - (2.0 * bd * bd - 1.0) * ex;
    let a2 = C0 * r + C1;
    let disc = a1 * a1 - 2.0 * a0 * a2;
    if disc < 0.0 || a1 <= 0.0 {
        return Err(Error::BoundPrecondition {
            discriminant: disc,
            beta,
            beta_min: beta_requirement(gap, r)?,
        });
    }
    Ok((a1 - disc.sqrt()) / (2.0f64.sqrt() * beta * a2))
}

/// Two-sided window for the filtered weight at the estimated peak:
/// `w0 <= g(E*) <= w0 * gap/(gap - eps_u) * exp(-beta^2 eps_u^2)`.
pub fn filter_weight_window(w0: f64, gap: f64, beta: f64, epsilon_u: f64) -> Result<(f64, f64)> {
    if !(gap > epsilon_u) {
        return Err(Error::OutOfDomain {
            context: "weight window needs gap > epsilon_u",
            value: gap - epsilon_u,
        });
    }
    let upper = w0 * gap / (gap - epsilon_u) * (-beta * beta * epsilon_u * epsilon_u).exp();
    Ok((w0, upper))
}

/// Samples needed so the relative error of an overlap-ratio estimate stays
/// below `epsilon` when the consumed overlaps stay above `1 - eta`:
/// `ceil(2 eps^-2 (1-eta)^-2)`.
pub fn sample_count(epsilon: f64, eta: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(Error::OutOfDomain {
            context: "target relative error (need > 0)",
            value: epsilon,
        });
    }
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::OutOfDomain {
            context: "overlap slack eta (need 0 <= eta < 1)",
            value: eta,
        });
    }
    let raw = 2.0 / (epsilon * epsilon) / ((1.0 - eta) * (1.0 - eta));
    Ok(raw.ceil() as u64)
}

/// Standard-deviation bound for the Monte Carlo overlap-ratio estimator:
/// `sqrt(2) / ((1 - eta) sqrt(n_samples))`.
pub fn mc_variance_bound(eta: f64, n_samples: u64) -> Result<f64> {
    if !(0.0..1.0).contains(&eta) {
        return Err(Error::OutOfDomain {
            context: "overlap slack eta (need 0 <= eta < 1)",
            value: eta,
        });
    }
    if n_samples == 0 {
        return Err(Error::OutOfDomain {
            context: "sample count (need >= 1)",
            value: 0.0,
        });
    }
    Ok(2.0f64.sqrt() / ((1.0 - eta) * (n_samples as f64).sqrt()))
}
