//! Stable regions of the retransmission factor and the classification of a
//! network configuration.
//!
//! Three nested guarantees are computed for a given `(n, rate, K)`:
//!
//! * the absolute region `[q_l, q_u]`, inside which the success probability
//!   is guaranteed to converge to `p_l` and every queue keeps `rho <= 1`;
//! * the asymptotic region `[q_l, q_u*]` of exponential backoff, where the
//!   worst-case attempt-rate bound is replaced by the typical backlog
//!   profile and holds with probability `1 - epsilon`, `epsilon -> 0` as `n`
//!   grows;
//! * the pseudo region `[1 - p_l, 1 - p_s]` of exponential backoff, where the
//!   saturated network still clears the arrival rate but queue delays are
//!   unbounded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{e_inv, lit, tol_for, Real};
use crate::solve::{bisect, brackets_on_log_grid};
use crate::steady_state::{
    network_throughput, phase_distribution, saturated_fixed_point, service_factor, stable_points,
    Cutoff, NetworkConfig,
};

/// Absolute x-tolerance for every scalar root in this module.
pub const ROOT_XTOL: f64 = 1e-10;
/// Default exceedance margin for [`theorem5_epsilon_bound`].
pub const DEFAULT_DELTA: f64 = 0.05;
/// Scan window for roots in the retransmission factor.
const Q_SCAN_LO: f64 = 1e-9;
const Q_SCAN_HI: f64 = 1.0 - 1e-9;

/// Which stability guarantee a region computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityMode {
    Absolute,
    Asymptotic,
}

/// Where a configuration's retransmission factor falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Absolute,
    Asymptotic,
    Pseudo,
    Unstable,
}

/// Region bounds and throughput prediction for one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport<F> {
    pub q_lower: Option<F>,
    pub q_upper: Option<F>,
    pub q_upper_star: Option<F>,
    pub pseudo_lower: Option<F>,
    pub pseudo_upper: Option<F>,
    pub absolute_region_empty: bool,
    pub classification: Classification,
    pub predicted_throughput: F,
    pub epsilon_bound: Option<F>,
}

/// How a maximum-throughput figure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ExactRoot,
    Approximation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaxThroughputResult<F> {
    pub lambda_max: F,
    pub q_at_max: F,
    pub method: SolveMethod,
}

/// The two printed upper bounds on the stability-failure probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonBounds<F> {
    pub markov: F,
    pub clt: F,
}

fn check_rate<F: Real>(aggregate_rate: F) -> Result<()> {
    if !(aggregate_rate > F::zero() && aggregate_rate <= e_inv::<F>() + lit(1e-15)) {
        return Err(Error::Domain(format!(
            "aggregate rate must lie in (0, 1/e], got {aggregate_rate}"
        )));
    }
    Ok(())
}

/// Upper bound `q_u = -ln(p_s)/n`: keeps the worst-case attempt rate below
/// the watershed `-ln p_s`.
pub fn q_upper<F: Real>(n: u32, aggregate_rate: F) -> Result<F> {
    check_rate(aggregate_rate)?;
    let sp = stable_points(aggregate_rate)?;
    Ok(-sp.p_s.ln() / F::from_u32(n).unwrap())
}

/// Lower bound `q_l`, the root of `rho(q) = 1` at `p = p_l`. Closed forms
/// exist for geometric retransmission and for an unbounded cutoff; other
/// cutoffs are solved numerically. A rate light enough that `rho < 1`
/// everywhere yields 0.
pub fn q_lower<F: Real>(n: u32, aggregate_rate: F, cutoff: Cutoff) -> Result<F> {
    if aggregate_rate == F::zero() {
        return Ok(F::zero());
    }
    check_rate(aggregate_rate)?;
    let p_l = stable_points(aggregate_rate)?.p_l;
    let lambda = aggregate_rate / F::from_u32(n).unwrap();
    match cutoff {
        Cutoff::Finite(1) => Ok(lambda * (F::one() - p_l) / (p_l * (F::one() - lambda))),
        Cutoff::Unbounded => Ok((F::one() - p_l) / (F::one() - lambda)),
        Cutoff::Finite(_) => {
            // rho(q) - 1 is monotone decreasing in q.
            let excess = |q: F| lambda * service_factor(p_l, q, cutoff) / p_l - F::one();
            let brackets = brackets_on_log_grid(excess, lit(Q_SCAN_LO), lit(Q_SCAN_HI));
            match brackets.first() {
                // Bisect to the last bit: the offered load is steep in q, so
                // meeting rho(q_l) = 1 to 1e-9 takes an x-error well below
                // the nominal ROOT_XTOL.
                Some(&(lo, hi)) => Ok(bisect(excess, lo, hi, F::zero())),
                None if excess(lit(Q_SCAN_LO)) < F::zero() => Ok(F::zero()),
                None => Err(Error::NoBracket("q_lower")),
            }
        }
    }
}

/// Large-`n` approximation of [`q_lower`] for a finite cutoff:
/// `(1 - p_l) / (n p_l / rate)^{1/K}`.
pub fn q_lower_approx<F: Real>(n: u32, aggregate_rate: F, k: u32) -> Result<F> {
    check_rate(aggregate_rate)?;
    let p_l = stable_points(aggregate_rate)?.p_l;
    let root = (F::from_u32(n).unwrap() * p_l / aggregate_rate).powf(F::from_u32(k).unwrap().recip());
    Ok((F::one() - p_l) / root)
}

/// Looser upper bound `q_u*` obtained when the backlog is spread over phases
/// according to the stationary profile instead of piled into phase 1. Equal
/// to `q_u` for geometric retransmission; closed form for an unbounded
/// cutoff; otherwise the root of a degree-`K+1` polynomial condition, solved
/// numerically with the root nearest [`q_upper_star_approx`] selected if the
/// scan ever reports more than one bracket.
pub fn q_upper_star<F: Real>(n: u32, aggregate_rate: F, cutoff: Cutoff) -> Result<F> {
    check_rate(aggregate_rate)?;
    let sp = stable_points(aggregate_rate)?;
    let (p_l, ln_ps) = (sp.p_l, -sp.p_s.ln());
    let nf = F::from_u32(n).unwrap();
    match cutoff {
        Cutoff::Finite(1) => q_upper(n, aggregate_rate),
        Cutoff::Unbounded => Ok(F::one() - p_l + ln_ps / nf * p_l),
        Cutoff::Finite(k) => {
            // g(p_l, q) = p_l + (1 - p_l) n / (-ln p_s), decreasing in q.
            let target = p_l + (F::one() - p_l) * nf / ln_ps;
            let gap = |q: F| service_factor(p_l, q, cutoff) - target;
            let brackets = brackets_on_log_grid(gap, lit(Q_SCAN_LO), lit(Q_SCAN_HI));
            if brackets.is_empty() {
                return Err(Error::NoBracket("q_upper_star"));
            }
            if brackets.len() > 1 {
                log::warn!(
                    "q_upper_star: {} sign brackets for n={n}, rate={aggregate_rate}, K={k}; \
                     taking the root nearest the closed-form approximation",
                    brackets.len()
                );
            }
            let approx = q_upper_star_approx(n, aggregate_rate, k)?;
            let root = brackets
                .into_iter()
                .map(|(lo, hi)| bisect(&gap, lo, hi, F::zero()))
                .min_by(|a, b| {
                    (*a - approx).abs().partial_cmp(&(*b - approx).abs()).unwrap()
                })
                .unwrap();
            Ok(root)
        }
    }
}

/// Large-`n` approximation of [`q_upper_star`] for a finite cutoff.
pub fn q_upper_star_approx<F: Real>(n: u32, aggregate_rate: F, k: u32) -> Result<F> {
    check_rate(aggregate_rate)?;
    let sp = stable_points(aggregate_rate)?;
    let ln_ps = -sp.p_s.ln();
    let inner = F::from_u32(n).unwrap() / (ln_ps / (F::one() - sp.p_l));
    Ok((F::one() - sp.p_l) / inner.powf(F::from_u32(k).unwrap().recip()))
}

/// Pseudo-stable region `(1 - p_l, 1 - p_s)` of exponential backoff, where
/// the saturated network still carries the arrival rate.
pub fn pseudo_region<F: Real>(aggregate_rate: F) -> Result<(F, F)> {
    check_rate(aggregate_rate)?;
    let sp = stable_points(aggregate_rate)?;
    Ok((F::one() - sp.p_l, F::one() - sp.p_s))
}

/// Supremum of arrival rates whose stable region is nonempty: the root of
/// `q_l(rate) = q_bound(rate)`, with `q_bound` the absolute or asymptotic
/// upper bound. If the region is still open at the channel capacity `1/e`,
/// the capacity itself is reported with method `Approximation`.
pub fn max_stable_throughput<F: Real>(
    n: u32,
    cutoff: Cutoff,
    mode: StabilityMode,
) -> Result<MaxThroughputResult<F>> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 nodes, got {n}")));
    }
    let bound = |rate: F| -> Result<F> {
        match mode {
            StabilityMode::Absolute => q_upper(n, rate),
            StabilityMode::Asymptotic => q_upper_star(n, rate, cutoff),
        }
    };
    let gap = |rate: F| {
        let ql = q_lower(n, rate, cutoff).expect("rate stays inside (0, 1/e]");
        let qb = bound(rate).expect("rate stays inside (0, 1/e]");
        ql - qb
    };
    let cap = e_inv::<F>();
    if gap(cap) < F::zero() {
        // q_l < q_bound all the way to capacity; the region never closes.
        return Ok(MaxThroughputResult {
            lambda_max: cap,
            q_at_max: q_lower(n, cap, cutoff)?,
            method: SolveMethod::Approximation,
        });
    }
    let lambda_max = bisect(gap, lit(1e-9), cap, tol_for(ROOT_XTOL));
    Ok(MaxThroughputResult {
        lambda_max,
        q_at_max: q_lower(n, lambda_max, cutoff)?,
        method: SolveMethod::ExactRoot,
    })
}

/// Printed approximations of the maximum stable throughput: `1/e` for
/// geometric retransmission, `ln n / n` for exponential backoff,
/// `ln(n^{1-1/K}) / n^{1-1/K}` for finite cutoffs, and `1/e` again in the
/// asymptotic sense. No printed form exists for the asymptotic bound of a
/// finite cutoff above 1.
pub fn max_stable_throughput_approx<F: Real>(
    n: u32,
    cutoff: Cutoff,
    mode: StabilityMode,
) -> Option<F> {
    let nf = F::from_u32(n).unwrap();
    match (mode, cutoff) {
        (StabilityMode::Absolute, Cutoff::Finite(1)) => Some(e_inv()),
        (StabilityMode::Absolute, Cutoff::Unbounded) => Some(nf.ln() / nf),
        (StabilityMode::Absolute, Cutoff::Finite(k)) => {
            let m = nf.powf(F::one() - F::from_u32(k).unwrap().recip());
            Some(m.ln() / m)
        }
        (StabilityMode::Asymptotic, Cutoff::Finite(1)) => Some(e_inv()),
        (StabilityMode::Asymptotic, Cutoff::Unbounded) => Some(e_inv()),
        (StabilityMode::Asymptotic, Cutoff::Finite(_)) => None,
    }
}

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf<F: Real>(x: F) -> F {
    let x = x.to_f64().unwrap_or(f64::NAN);
    lit(0.5 * libm::erfc(-x / std::f64::consts::SQRT_2))
}

/// Upper bounds on `epsilon = Pr{G_t > -ln p_s}` for exponential backoff with
/// `n_b` backlogged nodes: a Markov-inequality bound, tight for `n_b = o(n)`,
/// and a central-limit bound with exceedance margin `delta`, tight for large
/// `n_b`.
pub fn theorem5_epsilon_bound<F: Real>(
    n: u32,
    n_b: u32,
    aggregate_rate: F,
    q: F,
    delta: F,
) -> Result<EpsilonBounds<F>> {
    check_rate(aggregate_rate)?;
    if n_b > n {
        return Err(Error::InvalidConfig(format!(
            "backlogged count {n_b} exceeds node count {n}"
        )));
    }
    if !(delta > F::zero()) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    let sp = stable_points(aggregate_rate)?;
    let dist = phase_distribution(sp.p_l, q, Cutoff::Unbounded)?;
    let attempt = dist.backlogged_attempt_factor();
    let nf = F::from_u32(n).unwrap();
    let nbf = F::from_u32(n_b).unwrap();
    let denom = -sp.p_s.ln() - (F::one() - nbf / nf) * aggregate_rate;
    if denom <= F::zero() {
        return Err(Error::Domain(
            "Markov bound denominator is nonpositive".into(),
        ));
    }
    let markov = nbf * attempt / denom;
    let clt = F::one() - normal_cdf(delta / (attempt / nf).sqrt());
    Ok(EpsilonBounds { markov, clt })
}

/// Classify a configuration: fill every region bound, locate `q`, and predict
/// the long-run throughput.
///
/// A rate above `1/e` has no stable points; the report comes back `Unstable`
/// with no regions and the throughput the saturated network would carry. A
/// rate of zero trivially classifies as `Absolute` for any `q`.
pub fn classify<F: Real>(config: &NetworkConfig<F>) -> Result<StabilityReport<F>> {
    let rate = config.aggregate_rate;
    let n = config.n;

    if rate == F::zero() {
        return Ok(StabilityReport {
            q_lower: Some(F::zero()),
            q_upper: None,
            q_upper_star: None,
            pseudo_lower: if config.cutoff == Cutoff::Unbounded { Some(F::zero()) } else { None },
            pseudo_upper: if config.cutoff == Cutoff::Unbounded { Some(F::one()) } else { None },
            absolute_region_empty: false,
            classification: Classification::Absolute,
            predicted_throughput: F::zero(),
            epsilon_bound: None,
        });
    }

    let sp = stable_points(rate)?;
    if !sp.defined {
        let sat = saturated_fixed_point(n, config.q, config.cutoff)?;
        let served = F::from_u32(n).unwrap() * sat.p_a
            / service_factor(sat.p_a, config.q, config.cutoff);
        return Ok(StabilityReport {
            q_lower: None,
            q_upper: None,
            q_upper_star: None,
            pseudo_lower: None,
            pseudo_upper: None,
            absolute_region_empty: true,
            classification: Classification::Unstable,
            predicted_throughput: served.min(rate),
            epsilon_bound: None,
        });
    }

    let q_l = q_lower(n, rate, config.cutoff)?;
    let q_u = q_upper(n, rate)?;
    let q_us = q_upper_star(n, rate, config.cutoff)?;
    let unbounded = config.cutoff == Cutoff::Unbounded;
    let (ps_lo, ps_hi) = if unbounded {
        let (lo, hi) = pseudo_region(rate)?;
        (Some(lo), Some(hi))
    } else {
        (None, None)
    };

    let q = config.q;
    let classification = if q_l <= q && q <= q_u {
        Classification::Absolute
    } else if unbounded && q_l <= q && q <= q_us {
        Classification::Asymptotic
    } else if unbounded && ps_lo.unwrap() <= q && q <= ps_hi.unwrap() {
        Classification::Pseudo
    } else {
        Classification::Unstable
    };

    let mut report = StabilityReport {
        q_lower: Some(q_l),
        q_upper: Some(q_u),
        q_upper_star: Some(q_us),
        pseudo_lower: ps_lo,
        pseudo_upper: ps_hi,
        absolute_region_empty: q_l > q_u,
        classification,
        predicted_throughput: F::nan(),
        epsilon_bound: None,
    };
    report.predicted_throughput = network_throughput(config, &report)?;
    if classification == Classification::Asymptotic {
        report.epsilon_bound =
            Some(theorem5_epsilon_bound(n, n, rate, q, lit(DEFAULT_DELTA))?.clt);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    const E_INV: f64 = 1.0 / std::f64::consts::E;

    #[test]
    fn q_upper_values() {
        assert_abs_diff_eq!(q_upper(50, 0.3f64).unwrap(), 0.0356267404684, epsilon = 1e-10);
        // At capacity -W_{-1}(-1/e) = 1 exactly.
        assert_abs_diff_eq!(q_upper(50, E_INV).unwrap(), 0.02, epsilon = 1e-14);
        assert_abs_diff_eq!(q_upper(10, 0.1f64).unwrap(), 0.357715206396, epsilon = 1e-10);
        assert!(q_upper(50, 0.4f64).is_err());
        assert!(q_upper(50, 0.0f64).is_err());
    }

    #[test]
    fn q_lower_closed_forms() {
        assert_abs_diff_eq!(
            q_lower(50, 0.3f64, Cutoff::Finite(1)).unwrap(),
            0.00381091000363,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            q_lower(50, 0.3f64, Cutoff::Unbounded).unwrap(),
            0.389343345001,
            epsilon = 1e-10
        );
    }

    #[test]
    fn q_lower_finite_cutoff_root() {
        // Independent check: the root must put the offered load at 1.
        let ql = q_lower(10_000, 0.05f64, Cutoff::Finite(4)).unwrap();
        assert_abs_diff_eq!(ql, 0.00248917516295, epsilon = 1e-9);
        let config = NetworkConfig::new(10_000, 0.05, Cutoff::Finite(4), ql).unwrap();
        let p_l = stable_points(0.05f64).unwrap().p_l;
        let rho = crate::steady_state::offered_load(&config, p_l).unwrap();
        assert_abs_diff_eq!(rho, 1.0, epsilon = 1e-9);
        // And it agrees with the printed approximation to ~10%.
        let approx = q_lower_approx(10_000, 0.05f64, 4).unwrap();
        assert_abs_diff_eq!(approx, 0.00245997226558, epsilon = 1e-10);
        assert!(((ql - approx) / ql).abs() < 0.10);
    }

    #[test]
    fn q_lower_approx_behavior() {
        // Larger cutoff -> larger approximate lower bound (K-th root of a
        // number above 1 shrinks toward 1).
        let q4 = q_lower_approx(10_000, 0.05f64, 4).unwrap();
        let q8 = q_lower_approx(10_000, 0.05f64, 8).unwrap();
        assert!(q8 > q4);
        // Large-K limit approaches 1 - p_l.
        let q256 = q_lower_approx(10_000, 0.05f64, 256).unwrap();
        let p_l = stable_points(0.05f64).unwrap().p_l;
        assert_relative_eq!(q256, 1.0 - p_l, epsilon = 0.05);
    }

    #[test]
    fn q_upper_star_values() {
        assert_abs_diff_eq!(
            q_upper_star(50, 0.3f64, Cutoff::Unbounded).unwrap(),
            0.4088462173,
            epsilon = 1e-9
        );
        assert_eq!(
            q_upper_star(50, 0.3f64, Cutoff::Finite(1)).unwrap(),
            q_upper(50, 0.3f64).unwrap()
        );
        let qs = q_upper_star(10_000, 0.05f64, Cutoff::Finite(4)).unwrap();
        assert_abs_diff_eq!(qs, 0.0172758921588, epsilon = 1e-9);
        let approx = q_upper_star_approx(10_000, 0.05f64, 4).unwrap();
        assert_abs_diff_eq!(approx, 0.0157089134419, epsilon = 1e-10);
        assert!(((qs - approx) / qs).abs() < 0.10);
    }

    #[test]
    fn pseudo_region_values() {
        let (lo, hi) = pseudo_region(0.3f64).unwrap();
        assert_abs_diff_eq!(lo, 0.387007284931, epsilon = 1e-10);
        assert_abs_diff_eq!(hi, 0.83158717522, epsilon = 1e-10);
        let (lo, hi) = pseudo_region(0.1f64).unwrap();
        assert_abs_diff_eq!(lo, 0.105806030444, epsilon = 1e-10);
        assert_abs_diff_eq!(hi, 0.972044800385, epsilon = 1e-10);
        let (lo, hi) = pseudo_region(E_INV).unwrap();
        assert_abs_diff_eq!(lo, hi, epsilon = 1e-10);
    }

    #[test]
    fn max_throughput_geometric_stays_open() {
        // For geometric retransmission the region is still open at capacity.
        let r = max_stable_throughput::<f64>(1000, Cutoff::Finite(1), StabilityMode::Absolute)
            .unwrap();
        assert_eq!(r.method, SolveMethod::Approximation);
        assert_abs_diff_eq!(r.lambda_max, E_INV, epsilon = 1e-12);
        // Corollary-level sanity: the maximizing q is on the order of 1/n.
        assert!(r.q_at_max > 0.5e-3 && r.q_at_max < 1.5e-3);
    }

    #[test]
    fn max_throughput_exponential_root() {
        let expect = [
            (100, 0.0451856206249),
            (1000, 0.0068872467171),
            (10_000, 0.000920655715848),
        ];
        for (n, lam) in expect {
            let r = max_stable_throughput::<f64>(n, Cutoff::Unbounded, StabilityMode::Absolute)
                .unwrap();
            assert_eq!(r.method, SolveMethod::ExactRoot);
            assert_abs_diff_eq!(r.lambda_max, lam, epsilon = 1e-8);
            let approx =
                max_stable_throughput_approx::<f64>(n, Cutoff::Unbounded, StabilityMode::Absolute)
                    .unwrap();
            assert!(((r.lambda_max - approx) / approx).abs() < 0.15);
        }
    }

    #[test]
    fn max_throughput_asymptotic_mode() {
        let r = max_stable_throughput::<f64>(1000, Cutoff::Unbounded, StabilityMode::Asymptotic)
            .unwrap();
        assert_eq!(r.method, SolveMethod::Approximation);
        assert_abs_diff_eq!(r.lambda_max, E_INV, epsilon = 1e-12);
        assert_relative_eq!(r.q_at_max, 1.0 - E_INV, epsilon = 1e-2);
    }

    #[test]
    fn max_throughput_finite_cutoff_root() {
        let r = max_stable_throughput::<f64>(10_000, Cutoff::Finite(4), StabilityMode::Absolute)
            .unwrap();
        assert_eq!(r.method, SolveMethod::ExactRoot);
        assert_abs_diff_eq!(r.lambda_max, 0.0161860747153, epsilon = 1e-8);
    }

    #[test]
    fn normal_cdf_reference_values() {
        assert_abs_diff_eq!(normal_cdf(0.0f64), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(normal_cdf(1.0f64), 0.841344746068543, epsilon = 1e-12);
        assert_abs_diff_eq!(normal_cdf(-2.0f64), 0.0227501319481792, epsilon = 1e-12);
    }

    #[test]
    fn epsilon_bounds() {
        let b = theorem5_epsilon_bound(50, 50, 0.3f64, 0.40, 0.05).unwrap();
        assert_abs_diff_eq!(b.markov, 0.594933618986, epsilon = 1e-9);
        assert_abs_diff_eq!(b.clt, 0.00758134405418, epsilon = 1e-9);

        // Nothing backlogged, nothing to bound.
        let b = theorem5_epsilon_bound(50, 0, 0.3f64, 0.40, 0.05).unwrap();
        assert_eq!(b.markov, 0.0);

        // A million nodes with o(n) backlog: the bound has vanished.
        let q = q_lower(1_000_000, 0.3f64, Cutoff::Unbounded).unwrap() + 1e-9;
        let b = theorem5_epsilon_bound(1_000_000, 1000, 0.3f64, q, 0.05).unwrap();
        assert!(b.markov < 0.05);
        assert_abs_diff_eq!(b.markov, 0.00012893415981, epsilon = 1e-9);

        assert!(theorem5_epsilon_bound(50, 51, 0.3f64, 0.40, 0.05).is_err());
        assert!(theorem5_epsilon_bound(50, 50, 0.3f64, 0.40, 0.0).is_err());
        // q below the pseudo edge makes the phase distribution singular.
        assert!(theorem5_epsilon_bound(50, 50, 0.3f64, 0.2, 0.05).is_err());
    }

    #[test]
    fn classify_absolute_geometric() {
        let c = NetworkConfig::new(50, 0.3, Cutoff::Finite(1), 0.02).unwrap();
        let r = classify(&c).unwrap();
        assert_eq!(r.classification, Classification::Absolute);
        assert_abs_diff_eq!(r.predicted_throughput, 0.3, epsilon = 1e-12);
        assert!(!r.absolute_region_empty);
        assert!(r.pseudo_lower.is_none());
    }

    #[test]
    fn classify_pseudo() {
        let c = NetworkConfig::new(50, 0.3, Cutoff::Unbounded, 0.6).unwrap();
        let r = classify(&c).unwrap();
        assert_eq!(r.classification, Classification::Pseudo);
        assert_abs_diff_eq!(r.predicted_throughput, 0.3, epsilon = 1e-12);
        assert!(r.absolute_region_empty, "S^Exp is empty at n=50, rate=0.3");
    }

    #[test]
    fn classify_asymptotic_with_epsilon() {
        let c = NetworkConfig::new(50, 0.3, Cutoff::Unbounded, 0.40).unwrap();
        let r = classify(&c).unwrap();
        assert_eq!(r.classification, Classification::Asymptotic);
        assert_abs_diff_eq!(r.predicted_throughput, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(r.epsilon_bound.unwrap(), 0.00758134405418, epsilon = 1e-9);
    }

    #[test]
    fn classify_unstable_geometric_collapse() {
        let c = NetworkConfig::new(50, 0.3, Cutoff::Finite(1), 0.5).unwrap();
        let r = classify(&c).unwrap();
        assert_eq!(r.classification, Classification::Unstable);
        assert_abs_diff_eq!(r.predicted_throughput, 25.0 * (-25.0f64).exp(), epsilon = 1e-18);
    }

    #[test]
    fn classify_unstable_exponential() {
        let c = NetworkConfig::new(50, 0.3, Cutoff::Unbounded, 0.9).unwrap();
        let r = classify(&c).unwrap();
        assert_eq!(r.classification, Classification::Unstable);
        assert_abs_diff_eq!(r.predicted_throughput, 0.230258509299, epsilon = 1e-10);
    }

    #[test]
    fn classify_geometric_below_region() {
        // Below q_l the queues overload, the network saturates, and the
        // served rate is n f_0 at the saturated point.
        let c = NetworkConfig::new(50, 0.3, Cutoff::Finite(1), 0.002).unwrap();
        let r = classify(&c).unwrap();
        assert_eq!(r.classification, Classification::Unstable);
        let pa = saturated_fixed_point(50, 0.002f64, Cutoff::Finite(1)).unwrap().p_a;
        assert_relative_eq!(r.predicted_throughput, -pa * pa.ln(), epsilon = 1e-6);
        assert!(r.predicted_throughput < 0.3);
    }

    #[test]
    fn classify_degenerate_and_overloaded() {
        let c = NetworkConfig::new(10, 0.0, Cutoff::Finite(1), 0.5).unwrap();
        let r = classify(&c).unwrap();
        assert_eq!(r.classification, Classification::Absolute);
        assert_eq!(r.predicted_throughput, 0.0);

        let c = NetworkConfig::new(10, 0.4, Cutoff::Finite(1), 0.5).unwrap();
        let r = classify(&c).unwrap();
        assert_eq!(r.classification, Classification::Unstable);
        assert!(r.q_lower.is_none() && r.q_upper.is_none());
        assert!(r.predicted_throughput < 0.4);
    }

    #[test]
    fn criterion_regions_match_reported_intervals() {
        // n = 50, rate = 0.3: the published interval endpoints.
        let ql = q_lower(50, 0.3f64, Cutoff::Finite(1)).unwrap();
        let qu = q_upper(50, 0.3f64).unwrap();
        assert_abs_diff_eq!(ql, 0.0038, epsilon = 5e-4);
        assert_abs_diff_eq!(qu, 0.0356, epsilon = 5e-4);
        let qle = q_lower(50, 0.3f64, Cutoff::Unbounded).unwrap();
        let qus = q_upper_star(50, 0.3f64, Cutoff::Unbounded).unwrap();
        assert_abs_diff_eq!(qle, 0.3893, epsilon = 5e-4);
        assert_abs_diff_eq!(qus, 0.4088, epsilon = 5e-4);
    }
}
