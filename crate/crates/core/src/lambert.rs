//! Real branches of the Lambert W function.
//!
//! `W(z)` inverts `w e^w`. For `z` in `(-1/e, 0)` there are two real
//! solutions: the principal branch `W_0` carries the one with `w >= -1`, the
//! lower branch `W_{-1}` the one with `w <= -1`. Both stable points of the
//! success-probability equation are exponentials of these branches, so all
//! region arithmetic in this crate rests on the two evaluators here.
//!
//! Evaluation starts from a series expansion (around the origin for `W_0`,
//! around the branch point `-1/e` for both branches, log-asymptotics
//! elsewhere) and refines with Halley iteration until the residual
//! `|w e^w - z|` meets the module tolerances. If the iteration stalls the
//! root is recovered by bisection on a guaranteed bracket; each branch is a
//! monotone restriction of `w e^w`.

use crate::error::{Error, Result};
use crate::scalar::{e_inv, lit, tol_for, Real};

/// Residual tolerance of [`w0`], relative to `max(1, |z|)`.
pub const W0_RESIDUAL_RTOL: f64 = 1e-12;
/// Residual tolerance of [`wm1`], relative to `|z|`.
pub const WM1_RESIDUAL_RTOL: f64 = 1e-12;
/// Inputs within this distance of the branch point `-1/e` return exactly -1,
/// avoiding the square-root cancellation in the expansion there.
pub const BRANCH_POINT_NEIGHBORHOOD: f64 = 1e-12;
/// Slack below `-1/e` tolerated before a domain error, absorbing rounding in
/// callers that form `z = -rate`.
pub const DOMAIN_SLACK: f64 = 1e-15;

const MAX_HALLEY_STEPS: usize = 48;

/// Selector for the two real branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WBranch {
    /// `W_0`, mapping `[-1/e, inf)` onto `[-1, inf)`.
    Principal,
    /// `W_{-1}`, mapping `[-1/e, 0)` onto `(-inf, -1]`.
    MinusOne,
}

impl WBranch {
    pub fn eval<F: Real>(self, z: F) -> Result<F> {
        match self {
            WBranch::Principal => w0(z),
            WBranch::MinusOne => wm1(z),
        }
    }
}

/// Principal branch `W_0(z)` for `z >= -1/e`.
pub fn w0<F: Real>(z: F) -> Result<F> {
    let bp = -e_inv::<F>();
    if z < bp - lit(DOMAIN_SLACK) {
        return Err(Error::Domain(format!(
            "w0 requires z >= -1/e, got z = {z}"
        )));
    }
    let z = z.max(bp);
    if (z - bp).abs() < lit(BRANCH_POINT_NEIGHBORHOOD) {
        return Ok(-F::one());
    }
    if z == F::zero() {
        return Ok(F::zero());
    }

    let guess = if z <= lit(-0.25) {
        branch_point_series(branch_point_arg(z))
    } else if z.abs() <= lit(0.05) {
        w0_series(z)
    } else if z > lit(3.0) {
        let l = z.ln();
        l - l.ln()
    } else {
        (F::one() + z).ln()
    };

    let target = tol_for::<F>(W0_RESIDUAL_RTOL) * F::one().max(z.abs());
    let (w, ok) = halley(z, guess.max(-F::one()), target, -F::one(), F::infinity());
    if ok {
        return Ok(w);
    }
    // f(w) = w e^w - z is increasing on [-1, inf): bracket upward from -1.
    let mut hi = w.max(F::one());
    while hi * hi.exp() < z {
        hi = hi * lit(2.0) + F::one();
    }
    Ok(crate::solve::bisect(
        |w| w * w.exp() - z,
        -F::one(),
        hi,
        F::zero(),
    ))
}

/// Lower branch `W_{-1}(z)` for `-1/e <= z < 0`.
pub fn wm1<F: Real>(z: F) -> Result<F> {
    let bp = -e_inv::<F>();
    if z >= F::zero() || z < bp - lit(DOMAIN_SLACK) {
        return Err(Error::Domain(format!(
            "wm1 requires -1/e <= z < 0, got z = {z}"
        )));
    }
    let z = z.max(bp);
    if (z - bp).abs() < lit(BRANCH_POINT_NEIGHBORHOOD) {
        return Ok(-F::one());
    }

    let guess = if z <= lit(-0.25) {
        branch_point_series(-branch_point_arg(z))
    } else {
        // Asymptotics toward the logarithmic singularity at 0^-.
        let l = (-z).ln();
        l - (-l).ln()
    };

    let target = tol_for::<F>(WM1_RESIDUAL_RTOL) * z.abs();
    let (w, ok) = halley(z, guess.min(-F::one()), target, F::neg_infinity(), -F::one());
    if ok {
        return Ok(w);
    }
    // f(w) = w e^w - z is decreasing on (-inf, -1], positive far left.
    let lo = (lit::<F>(2.0) * (-z).ln()).min(lit(-2.0));
    Ok(crate::solve::bisect(
        |w| w * w.exp() - z,
        lo,
        -F::one(),
        F::zero(),
    ))
}

/// `x = sqrt(2 (e z + 1))`, the expansion variable at the branch point.
/// Clamped at zero so rounding just below `-1/e` cannot produce a NaN.
fn branch_point_arg<F: Real>(z: F) -> F {
    (lit::<F>(2.0) * (F::E() * z + F::one())).max(F::zero()).sqrt()
}

/// Truncated origin series of `W_0`, coefficients `(-i)^{i-1} / i!`.
fn w0_series<F: Real>(z: F) -> F {
    let c3 = lit::<F>(1.5);
    let c4 = lit::<F>(-8.0 / 3.0);
    let c5 = lit::<F>(125.0 / 24.0);
    z * (F::one() + z * (-F::one() + z * (c3 + z * (c4 + z * c5))))
}

/// Branch-point series `-1 + x - x^2/3 + 11x^3/72 - ...`; `x >= 0` lands on
/// the principal branch, `x <= 0` on the lower one.
fn branch_point_series<F: Real>(x: F) -> F {
    let mu = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
    ];
    let mut acc = lit::<F>(mu[5]);
    for &c in mu[..5].iter().rev() {
        acc = acc * x + lit(c);
    }
    acc
}

/// Halley iteration on `f(w) = w e^w - z`, keeping iterates inside
/// `[clamp_lo, clamp_hi]` so the step cannot jump between branches.
fn halley<F: Real>(z: F, mut w: F, target: F, clamp_lo: F, clamp_hi: F) -> (F, bool) {
    let two = lit::<F>(2.0);
    for _ in 0..MAX_HALLEY_STEPS {
        let ew = w.exp();
        let resid = w * ew - z;
        if resid.abs() <= target {
            return (w, true);
        }
        let wp1 = w + F::one();
        let denom = ew * wp1 - (w + two) * resid / (two * wp1);
        if denom == F::zero() || !denom.is_finite() {
            return (w, false);
        }
        let next = (w - resid / denom).max(clamp_lo).min(clamp_hi);
        if !next.is_finite() || next == w {
            return (w, false);
        }
        w = next;
    }
    let resid = w * w.exp() - z;
    (w, resid.abs() <= target)
}
