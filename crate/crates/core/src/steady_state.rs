//! Decomposed-queue model of buffered slotted Aloha with K-exponential
//! backoff.
//!
//! Each node is a Geo/G/1 queue whose head-of-line packet climbs a phase
//! ladder on collisions and transmits with probability `q^phase`. The queues
//! couple only through the network-wide probability of success `p`, which in
//! steady state solves `p = exp(-rate/p)`. This module carries the phase
//! distribution and offered load of a single queue, the two roots of the
//! characteristic equation with their convergence dynamics, and the fixed
//! point the network falls to once it saturates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lambert::{w0, wm1, DOMAIN_SLACK};
use crate::scalar::{e_inv, lit, tol_for, Real};

/// Residual tolerance of [`saturated_fixed_point`].
pub const FIXED_POINT_TOL: f64 = 1e-10;
/// Iteration budget of [`saturated_fixed_point`].
pub const FIXED_POINT_MAX_STEPS: u32 = 10_000;
/// Damped-iteration steps attempted before falling back to bisection.
const DAMPED_STEPS: u32 = 256;

/// Backoff cutoff phase. Geometric retransmission is `Finite(1)`; pure
/// exponential backoff is `Unbounded`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    Finite(u32),
    Unbounded,
}

impl Cutoff {
    /// Advance a phase by one collision, saturating at the cutoff.
    #[inline]
    pub fn advance(self, phase: u32) -> u32 {
        match self {
            Cutoff::Finite(k) => (phase + 1).min(k),
            Cutoff::Unbounded => phase + 1,
        }
    }

    pub fn as_finite(self) -> Option<u32> {
        match self {
            Cutoff::Finite(k) => Some(k),
            Cutoff::Unbounded => None,
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Finite(k) => write!(f, "{k}"),
            Cutoff::Unbounded => write!(f, "inf"),
        }
    }
}

impl FromStr for Cutoff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Cutoff::Unbounded);
        }
        match s.parse::<u32>() {
            Ok(k) if k >= 1 => Ok(Cutoff::Finite(k)),
            _ => Err(Error::InvalidConfig(format!(
                "cutoff must be a positive integer or \"inf\", got {s:?}"
            ))),
        }
    }
}

/// One buffered-Aloha instance: `n` nodes sharing one slotted channel,
/// aggregate Bernoulli arrival rate, cutoff phase and retransmission factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig<F> {
    pub n: u32,
    pub aggregate_rate: F,
    pub cutoff: Cutoff,
    pub q: F,
}

impl<F: Real> NetworkConfig<F> {
    pub fn new(n: u32, aggregate_rate: F, cutoff: Cutoff, q: F) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("node count must be positive".into()));
        }
        if !(aggregate_rate >= F::zero()) {
            return Err(Error::InvalidConfig(format!(
                "aggregate rate must be nonnegative, got {aggregate_rate}"
            )));
        }
        if aggregate_rate / F::from_u32(n).unwrap() > F::one() {
            return Err(Error::InvalidConfig(format!(
                "per-node rate {} exceeds one packet per slot",
                aggregate_rate / F::from_u32(n).unwrap()
            )));
        }
        if !(q > F::zero() && q < F::one()) {
            return Err(Error::InvalidConfig(format!(
                "retransmission factor must lie strictly inside (0, 1), got {q}"
            )));
        }
        if let Cutoff::Finite(0) = cutoff {
            return Err(Error::InvalidConfig("cutoff phase must be >= 1".into()));
        }
        Ok(Self { n, aggregate_rate, cutoff, q })
    }

    /// Per-node arrival rate `rate / n`.
    #[inline]
    pub fn per_node_rate(&self) -> F {
        self.aggregate_rate / F::from_u32(self.n).unwrap()
    }
}

/// `p + q - 1` via a compensated sum. The plain expression loses most of its
/// relative precision when `p + q` is close to 1, which is exactly where the
/// unbounded-cutoff formulas evaluate it.
#[inline]
fn p_plus_q_minus_one<F: Real>(p: F, q: F) -> F {
    let s = p + q;
    let z = s - p;
    let err = (p - (s - z)) + (q - z);
    (s - F::one()) + err
}

/// The service factor `g(p) = p (1 + r + ... + r^{K-1}) + r^K` with
/// `r = (1 - p)/q`; equal to `p / f_0`, so `1/f_0 = g/p` is the mean
/// head-of-line service time. For an unbounded cutoff the limit is
/// `p q / (p + q - 1)` when `r < 1` and diverges otherwise.
pub(crate) fn service_factor<F: Real>(p: F, q: F, cutoff: Cutoff) -> F {
    let r = (F::one() - p) / q;
    match cutoff {
        Cutoff::Unbounded => {
            let d = p_plus_q_minus_one(p, q);
            if d <= F::zero() {
                F::infinity()
            } else {
                p * q / d
            }
        }
        Cutoff::Finite(k) => {
            let mut geom = F::one();
            let mut sum = F::one();
            for _ in 1..k {
                geom = geom * r;
                sum = sum + geom;
            }
            p * sum + geom * r
        }
    }
}

/// Limiting phase distribution `f_0..f_K` of a head-of-line packet, plus the
/// conditional distribution over phases given that the packet is backlogged.
///
/// Finite cutoffs store the full vector; the unbounded case keeps `f_0` and
/// the geometric ratio `(1 - p)/q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseDistribution<F> {
    p: F,
    q: F,
    cutoff: Cutoff,
    ratio: F,
    f0: F,
    f: Vec<F>,
}

/// Solve the phase balance equations at success probability `p`.
///
/// Fails with [`Error::Singular`] for an unbounded cutoff when `p + q <= 1`:
/// the geometric ratio reaches 1 and the chain has no stationary
/// distribution.
pub fn phase_distribution<F: Real>(p: F, q: F, cutoff: Cutoff) -> Result<PhaseDistribution<F>> {
    if !(p > F::zero() && p <= F::one()) {
        return Err(Error::Domain(format!(
            "success probability must lie in (0, 1], got {p}"
        )));
    }
    if !(q > F::zero() && q < F::one()) {
        return Err(Error::Domain(format!(
            "retransmission factor must lie in (0, 1), got {q}"
        )));
    }
    let ratio = (F::one() - p) / q;
    if cutoff == Cutoff::Unbounded && p_plus_q_minus_one(p, q) <= F::zero() {
        return Err(Error::Singular {
            p: p.to_f64().unwrap_or(f64::NAN),
            q: q.to_f64().unwrap_or(f64::NAN),
        });
    }
    let f0 = match cutoff {
        Cutoff::Unbounded => p_plus_q_minus_one(p, q) / q,
        Cutoff::Finite(_) => p / service_factor(p, q, cutoff),
    };
    let f = match cutoff {
        Cutoff::Unbounded => Vec::new(),
        Cutoff::Finite(k) => {
            let mut f = Vec::with_capacity(k as usize + 1);
            f.push(f0);
            let mut cur = f0;
            for _ in 1..k {
                cur = cur * ratio;
                f.push(cur);
            }
            f.push(cur * ratio / p);
            f
        }
    };
    Ok(PhaseDistribution { p, q, cutoff, ratio, f0, f })
}

impl<F: Real> PhaseDistribution<F> {
    #[inline]
    pub fn f0(&self) -> F {
        self.f0
    }

    pub fn cutoff(&self) -> Cutoff {
        self.cutoff
    }

    /// `(1 - p)/q`, the decay ratio of the phase ladder.
    pub fn ratio(&self) -> F {
        self.ratio
    }

    /// Probability of the head-of-line packet sitting in phase `i`.
    pub fn f(&self, i: u32) -> F {
        match self.cutoff {
            Cutoff::Finite(k) => {
                if i <= k {
                    self.f[i as usize]
                } else {
                    F::zero()
                }
            }
            Cutoff::Unbounded => {
                if i == 0 {
                    self.f0
                } else {
                    self.f0 * self.ratio.powi(i as i32)
                }
            }
        }
    }

    /// Conditional phase distribution of a backlogged packet,
    /// `phi_i = f_i / (1 - f_0)` for `i >= 1`.
    pub fn phase_given_backlogged(&self, i: u32) -> F {
        debug_assert!(i >= 1);
        let tail = F::one() - self.f0;
        if tail <= F::zero() {
            return F::zero();
        }
        self.f(i) / tail
    }

    /// `sum_i phi_i q^i`, the per-node attempt probability of a backlogged
    /// packet. The ladder telescopes to `f_0 (1 - p) / (p (1 - f_0))` for
    /// every cutoff.
    pub fn backlogged_attempt_factor(&self) -> F {
        let tail = F::one() - self.f0;
        if tail <= F::zero() {
            return F::zero();
        }
        self.f0 * (F::one() - self.p) / (self.p * tail)
    }
}

/// Offered load `rho = lambda / f_0` of one queue when the network success
/// probability is `p`. A result above 1 means the queue is unstable.
pub fn offered_load<F: Real>(config: &NetworkConfig<F>, p: F) -> Result<F> {
    let dist = phase_distribution(p, config.q, config.cutoff)?;
    Ok(config.per_node_rate() / dist.f0())
}

/// The two roots of `p = exp(-rate/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StablePoints<F> {
    /// Larger root, the desired operating point; attracts from above `p_s`.
    pub p_l: F,
    /// Smaller root, the unstable watershed of the dynamics.
    pub p_s: F,
    /// False when `rate > 1/e`, where the equation has no real roots.
    pub defined: bool,
    /// True for `rate = 0`, where `p_l = 1` and `p_s` is a limit value 0.
    pub degenerate: bool,
}

/// Solve the characteristic equation for a given aggregate arrival rate.
pub fn stable_points<F: Real>(aggregate_rate: F) -> Result<StablePoints<F>> {
    if !(aggregate_rate >= F::zero()) {
        return Err(Error::Domain(format!(
            "aggregate rate must be nonnegative, got {aggregate_rate}"
        )));
    }
    if aggregate_rate == F::zero() {
        return Ok(StablePoints {
            p_l: F::one(),
            p_s: F::zero(),
            defined: true,
            degenerate: true,
        });
    }
    if aggregate_rate > e_inv::<F>() + lit(DOMAIN_SLACK) {
        return Ok(StablePoints {
            p_l: F::nan(),
            p_s: F::nan(),
            defined: false,
            degenerate: false,
        });
    }
    let z = -aggregate_rate;
    Ok(StablePoints {
        p_l: w0(z)?.exp(),
        p_s: wm1(z)?.exp(),
        defined: true,
        degenerate: false,
    })
}

/// Attempt rate `G = rate / p`; equals `-ln p` when `p` solves the
/// characteristic equation.
pub fn attempt_rate<F: Real>(aggregate_rate: F, p: F) -> Result<F> {
    if !(p > F::zero() && p <= F::one()) {
        return Err(Error::Domain(format!(
            "attempt rate needs p in (0, 1], got {p}"
        )));
    }
    Ok(aggregate_rate / p)
}

/// Steady-state throughput `G e^{-G}` carried by attempt rate `G`.
pub fn throughput_of_attempt_rate<F: Real>(g: F) -> F {
    g * (-g).exp()
}

/// One step of the success-probability dynamics, `exp(-rate/p_t)`.
/// `p_t = 0` maps to 0, the limit value.
pub fn success_map<F: Real>(p_t: F, aggregate_rate: F) -> F {
    if p_t <= F::zero() {
        return F::zero();
    }
    (-aggregate_rate / p_t).exp()
}

/// Outcome of iterating [`success_map`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ConvergedToPL,
    DivergedBelowPS,
    Undecided,
}

/// Iterate the success-probability dynamics from `p_0`, recording the
/// trajectory. Converged means within `tol` of `p_l`; diverged means fallen
/// below `p_s - tol`. For rates above `1/e` there are no fixed points and the
/// verdict stays `Undecided`.
pub fn iterate_dynamics<F: Real>(
    p_0: F,
    aggregate_rate: F,
    max_steps: usize,
    tol: F,
) -> Result<(Vec<F>, Verdict)> {
    let sp = stable_points(aggregate_rate)?;
    let verdict_of = |p: F| {
        if !sp.defined {
            return None;
        }
        if (p - sp.p_l).abs() < tol {
            Some(Verdict::ConvergedToPL)
        } else if p < sp.p_s - tol {
            Some(Verdict::DivergedBelowPS)
        } else {
            None
        }
    };
    let mut trajectory = vec![p_0];
    if let Some(v) = verdict_of(p_0) {
        return Ok((trajectory, v));
    }
    let mut p = p_0;
    for _ in 0..max_steps {
        p = success_map(p, aggregate_rate);
        trajectory.push(p);
        if let Some(v) = verdict_of(p) {
            return Ok((trajectory, v));
        }
    }
    Ok((trajectory, Verdict::Undecided))
}

/// One step of the saturated-network dynamics, `exp(-n / g(p_t))`.
///
/// With an unbounded cutoff and `p_t + q <= 1` the service factor diverges
/// and the map returns its one-sided limit 1.
pub fn saturated_map<F: Real>(p_t: F, n: u32, q: F, cutoff: Cutoff) -> F {
    let g = service_factor(p_t, q, cutoff);
    (-F::from_u32(n).unwrap() / g).exp()
}

/// Fixed point of the saturated-network map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturatedPoint<F> {
    pub p_a: F,
    pub iterations: u32,
    pub converged: bool,
}

/// Solve `p = saturated_map(p)` by damped iteration with a bisection
/// fallback. The raw map alternates around the fixed point, so the damped
/// pass keeps a sign bracket on `p - map(p)` and bisection finishes whenever
/// damping fails to contract.
pub fn saturated_fixed_point<F: Real>(n: u32, q: F, cutoff: Cutoff) -> Result<SaturatedPoint<F>> {
    if n < 2 {
        return Err(Error::Domain(format!(
            "saturation analysis needs at least 2 nodes, got {n}"
        )));
    }
    if !(q > F::zero() && q < F::one()) {
        return Err(Error::Domain(format!(
            "retransmission factor must lie in (0, 1), got {q}"
        )));
    }
    let tol = tol_for::<F>(FIXED_POINT_TOL);
    let map = |p: F| saturated_map(p, n, q, cutoff);
    let mut lo = F::min_positive_value();
    let mut hi = F::one() - F::epsilon();
    let mut p = lit::<F>(0.5);
    let mut iterations = 0u32;
    let half = lit::<F>(0.5);

    while iterations < DAMPED_STEPS {
        let m = map(p);
        iterations += 1;
        let resid = p - m;
        if resid.abs() <= tol {
            return Ok(SaturatedPoint { p_a: p, iterations, converged: true });
        }
        if resid < F::zero() {
            lo = lo.max(p);
        } else {
            hi = hi.min(p);
        }
        let next = p + half * (m - p);
        if next <= lo || next >= hi {
            break;
        }
        p = next;
    }

    let mut best = p;
    let mut best_resid = (p - map(p)).abs();
    while iterations < FIXED_POINT_MAX_STEPS {
        let mid = (lo + hi) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        let m = map(mid);
        iterations += 1;
        let resid = mid - m;
        if resid.abs() < best_resid {
            best = mid;
            best_resid = resid.abs();
        }
        if resid.abs() <= tol {
            return Ok(SaturatedPoint { p_a: mid, iterations, converged: true });
        }
        if resid < F::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(SaturatedPoint { p_a: best, iterations, converged: best_resid <= tol })
}

/// Printed approximation `p_A ~ exp(-n q)` for geometric retransmission.
pub fn p_a_closed_form_geo<F: Real>(n: u32, q: F) -> Result<F> {
    check_saturation_args(n, q)?;
    Ok((-F::from_u32(n).unwrap() * q).exp())
}

/// Printed approximation `p_A ~ n(1-q) / (n + q ln(1-q))` for exponential
/// backoff.
pub fn p_a_closed_form_exp<F: Real>(n: u32, q: F) -> Result<F> {
    check_saturation_args(n, q)?;
    let nf = F::from_u32(n).unwrap();
    let denom = nf + q * (-q).ln_1p();
    if denom <= F::zero() {
        return Err(Error::Domain(format!(
            "closed form undefined: n + q ln(1-q) = {denom} <= 0"
        )));
    }
    Ok(nf * (F::one() - q) / denom)
}

fn check_saturation_args<F: Real>(n: u32, q: F) -> Result<()> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 nodes, got {n}")));
    }
    if !(q > F::zero() && q < F::one()) {
        return Err(Error::Domain(format!(
            "retransmission factor must lie in (0, 1), got {q}"
        )));
    }
    Ok(())
}

/// Long-run network throughput `min(n f_0, rate)` under the operating point
/// selected by `report`'s classification.
///
/// Inside any stable region the throughput equals the arrival rate. Outside,
/// the network sits at the saturated point: geometric retransmission with
/// `q` above the region collapses to `n q e^{-n q}`, below the region it
/// serves `n f_0(p_A)`; exponential backoff delivers `-(1-q) ln(1-q)`.
pub fn network_throughput<F: Real>(
    config: &NetworkConfig<F>,
    report: &crate::regions::StabilityReport<F>,
) -> Result<F> {
    use crate::regions::Classification;

    let rate = config.aggregate_rate;
    if rate > e_inv::<F>() + lit(DOMAIN_SLACK) {
        return Err(Error::Domain(format!(
            "no stable points: aggregate rate {rate} exceeds 1/e"
        )));
    }
    match report.classification {
        Classification::Absolute | Classification::Asymptotic | Classification::Pseudo => Ok(rate),
        Classification::Unstable => match config.cutoff {
            Cutoff::Unbounded => Ok(-(F::one() - config.q) * (-config.q).ln_1p()),
            Cutoff::Finite(k) => {
                let above = report.q_upper.map_or(false, |qu| config.q > qu);
                if k == 1 && above {
                    let nq = F::from_u32(config.n).unwrap() * config.q;
                    Ok(nq * (-nq).exp())
                } else {
                    // n f_0 evaluated at the saturated point.
                    let pa = saturated_fixed_point(config.n, config.q, config.cutoff)?.p_a;
                    let nf0 =
                        F::from_u32(config.n).unwrap() * pa / service_factor(pa, config.q, config.cutoff);
                    Ok(nf0.min(rate))
                }
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const E_INV: f64 = 1.0 / std::f64::consts::E;

    #[test]
    fn cutoff_parse_and_display() {
        assert_eq!("inf".parse::<Cutoff>().unwrap(), Cutoff::Unbounded);
        assert_eq!("4".parse::<Cutoff>().unwrap(), Cutoff::Finite(4));
        assert!("0".parse::<Cutoff>().is_err());
        assert!("-1".parse::<Cutoff>().is_err());
        assert_eq!(Cutoff::Unbounded.to_string(), "inf");
        assert_eq!(Cutoff::Finite(1).to_string(), "1");
        assert_eq!(Cutoff::Finite(3).advance(2), 3);
        assert_eq!(Cutoff::Finite(3).advance(5), 3);
        assert_eq!(Cutoff::Unbounded.advance(5), 6);
    }

    #[test]
    fn config_validation() {
        assert!(NetworkConfig::new(0, 0.1, Cutoff::Finite(1), 0.5).is_err());
        assert!(NetworkConfig::new(10, -0.1, Cutoff::Finite(1), 0.5).is_err());
        assert!(NetworkConfig::new(10, 11.0, Cutoff::Finite(1), 0.5).is_err());
        assert!(NetworkConfig::new(10, 0.1, Cutoff::Finite(1), 0.0).is_err());
        assert!(NetworkConfig::new(10, 0.1, Cutoff::Finite(1), 1.0).is_err());
        assert!(NetworkConfig::new(10, 0.1, Cutoff::Finite(0), 0.5).is_err());
        let c = NetworkConfig::new(10, 0.1, Cutoff::Finite(1), 0.5).unwrap();
        assert_abs_diff_eq!(c.per_node_rate(), 0.01);
    }

    #[test]
    fn phase_distribution_no_collisions() {
        // p = 1: a fresh head-of-line packet always leaves in one slot.
        let d = phase_distribution(1.0f64, 0.3, Cutoff::Finite(1)).unwrap();
        assert_eq!(d.f0(), 1.0);
        assert_eq!(d.f(1), 0.0);
    }

    #[test]
    fn phase_distribution_two_state_chain() {
        // Independent oracle: solve the K = 1 chain directly.
        // f1 q p = f0 (1 - p) and f0 + f1 = 1 give f0 = p q / (1 - p + p q).
        let (p, q) = (0.6131f64, 0.5);
        let oracle = p * q / (1.0 - p + p * q);
        assert_abs_diff_eq!(oracle, 0.442065037133175, epsilon = 1e-14);
        let d = phase_distribution(p, q, Cutoff::Finite(1)).unwrap();
        assert_abs_diff_eq!(d.f0(), oracle, epsilon = 1e-14);
    }

    #[test]
    fn phase_distribution_unbounded() {
        let (p, q) = (0.6131f64, 0.5);
        let d = phase_distribution(p, q, Cutoff::Unbounded).unwrap();
        assert_abs_diff_eq!(d.f0(), 0.2262, epsilon = 1e-14);
        // Cross-check against a long partial geometric sum.
        let r: f64 = (1.0 - p) / q;
        let tail: f64 = (1..10_000).map(|i| r.powi(i)).sum();
        assert_relative_eq!(d.f0(), 1.0 / (1.0 + tail), epsilon = 1e-12);
    }

    #[test]
    fn phase_distribution_singularity() {
        let err = phase_distribution(0.4f64, 0.5, Cutoff::Unbounded).unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
        // Finite cutoffs never diverge.
        assert!(phase_distribution(0.4f64, 0.5, Cutoff::Finite(8)).is_ok());
    }

    #[test]
    fn balance_equations_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = 0.05 + 0.9 * rng.random::<f64>();
            let q = 0.05 + 0.9 * rng.random::<f64>();
            let k = 1 + rng.random_range(0..12u32);
            let d = phase_distribution(p, q, Cutoff::Finite(k)).unwrap();
            let total: f64 = (0..=k).map(|i| d.f(i)).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            // f_i q^i = f_{i-1} q^{i-1} (1 - p) for interior phases,
            // f_K q^K p = f_{K-1} q^{K-1} (1 - p) at the cutoff.
            for i in 1..k {
                let lhs = d.f(i) * q.powi(i as i32);
                let rhs = d.f(i - 1) * q.powi(i as i32 - 1) * (1.0 - p);
                assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            }
            let lhs = d.f(k) * q.powi(k as i32) * p;
            let rhs = d.f(k - 1) * q.powi(k as i32 - 1) * (1.0 - p);
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
            // Conditional distribution sums to 1 when anything is backlogged.
            if d.f0() < 1.0 - 1e-9 {
                let phi: f64 = (1..=k).map(|i| d.phase_given_backlogged(i)).sum();
                assert_abs_diff_eq!(phi, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn backlogged_attempt_factor_matches_series() {
        let (p, q) = (0.613f64, 0.4);
        for cutoff in [Cutoff::Finite(1), Cutoff::Finite(6), Cutoff::Unbounded] {
            let d = phase_distribution(p, q, cutoff).unwrap();
            let kmax = cutoff.as_finite().unwrap_or(4000);
            let series: f64 = (1..=kmax)
                .map(|i| d.phase_given_backlogged(i) * q.powi(i as i32))
                .sum();
            assert_relative_eq!(d.backlogged_attempt_factor(), series, epsilon = 1e-10);
        }
    }

    #[test]
    fn offered_load_examples() {
        // p = 1 makes the queue an M/D/1-like ideal: rho = lambda.
        let c = NetworkConfig::new(1, 0.01, Cutoff::Finite(1), 0.5).unwrap();
        assert_abs_diff_eq!(offered_load(&c, 1.0).unwrap(), 0.01, epsilon = 1e-15);

        // Direct evaluation of the geometric form lambda (1 - p + p q)/(p q).
        let c = NetworkConfig::new(1, 0.006, Cutoff::Finite(1), 0.02).unwrap();
        assert_abs_diff_eq!(
            offered_load(&c, 0.613).unwrap(),
            0.195396411092985,
            epsilon = 1e-12
        );

        // The rho = 1 edge of the exponential-backoff region.
        let c = NetworkConfig::new(50, 0.3, Cutoff::Unbounded, 0.3893).unwrap();
        assert_abs_diff_eq!(offered_load(&c, 0.613).unwrap(), 1.0, epsilon = 2e-2);
    }

    #[test]
    fn stable_points_examples() {
        let sp = stable_points(0.3f64).unwrap();
        assert!(sp.defined && !sp.degenerate);
        assert_abs_diff_eq!(sp.p_l, 0.612992715068968, epsilon = 1e-12);
        assert_abs_diff_eq!(sp.p_s, 0.168412824780206, epsilon = 1e-12);

        let sp = stable_points(E_INV).unwrap();
        assert_abs_diff_eq!(sp.p_l, E_INV, epsilon = 1e-12);
        assert_abs_diff_eq!(sp.p_s, E_INV, epsilon = 1e-12);

        let sp = stable_points(0.0f64).unwrap();
        assert!(sp.defined && sp.degenerate);
        assert_eq!(sp.p_l, 1.0);
        assert_eq!(sp.p_s, 0.0);

        let sp = stable_points(0.4f64).unwrap();
        assert!(!sp.defined);

        assert!(stable_points(-0.1f64).is_err());
    }

    #[test]
    fn stable_points_satisfy_characteristic_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let rate = rng.random::<f64>() * E_INV;
            let sp = stable_points(rate).unwrap();
            assert!(sp.p_s <= E_INV + 1e-12 && sp.p_l >= E_INV - 1e-12);
            for p in [sp.p_l, sp.p_s] {
                assert!(
                    (p - (-rate / p).exp()).abs() <= 1e-10,
                    "rate = {rate}, p = {p}"
                );
            }
        }
    }

    #[test]
    fn attempt_rate_examples() {
        assert_abs_diff_eq!(attempt_rate(E_INV, E_INV).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(attempt_rate(0.0f64, 1.0).unwrap(), 0.0);
        let sp = stable_points(0.3f64).unwrap();
        let g = attempt_rate(0.3, sp.p_l).unwrap();
        assert_abs_diff_eq!(g, 0.489402227180215, epsilon = 1e-11);
        assert!((g - (-sp.p_l.ln())).abs() < 1e-10);
        assert!(attempt_rate(0.3f64, 0.0).is_err());
    }

    #[test]
    fn throughput_round_trip() {
        assert_abs_diff_eq!(throughput_of_attempt_rate(1.0f64), E_INV, epsilon = 1e-15);
        assert_eq!(throughput_of_attempt_rate(0.0f64), 0.0);
        assert_abs_diff_eq!(
            throughput_of_attempt_rate(0.489402227180215f64),
            0.3,
            epsilon = 1e-12
        );
    }

    #[test]
    fn success_map_examples() {
        assert_abs_diff_eq!(success_map(E_INV, E_INV), E_INV, epsilon = 1e-15);
        assert_abs_diff_eq!(success_map(0.9f64, 0.3), 0.716531310574, epsilon = 1e-12);
        let down = success_map(0.10f64, 0.3);
        assert_abs_diff_eq!(down, (-3.0f64).exp(), epsilon = 1e-15);
        assert!(down < 0.10);
        assert_eq!(success_map(0.0f64, 0.3), 0.0);
    }

    #[test]
    fn dynamics_verdicts() {
        let (traj, v) = iterate_dynamics(0.5f64, 0.1, 10_000, 1e-9).unwrap();
        assert_eq!(v, Verdict::ConvergedToPL);
        assert_abs_diff_eq!(*traj.last().unwrap(), 0.894193969556364, epsilon = 1e-8);

        let p_l = stable_points(0.1f64).unwrap().p_l;
        let (traj, v) = iterate_dynamics(p_l, 0.1, 10_000, 1e-9).unwrap();
        assert_eq!(v, Verdict::ConvergedToPL);
        assert_eq!(traj.len(), 1);

        let (_, v) = iterate_dynamics(0.10f64, 0.3, 10_000, 1e-9).unwrap();
        assert_eq!(v, Verdict::DivergedBelowPS);
    }

    #[test]
    fn dynamics_monotone_between_roots() {
        for rate in [0.1f64, 0.3] {
            let sp = stable_points(rate).unwrap();
            let start = 0.5 * (sp.p_s + sp.p_l);
            let (traj, _) = iterate_dynamics(start, rate, 200, 1e-12).unwrap();
            for w in traj.windows(2) {
                assert!(w[1] >= w[0], "trajectory must rise toward p_l");
            }
            let (traj, _) = iterate_dynamics(0.999f64, rate, 200, 1e-12).unwrap();
            for w in traj.windows(2) {
                assert!(w[1] <= w[0] + 1e-15, "trajectory must fall toward p_l");
            }
            let (traj, v) = iterate_dynamics(sp.p_s * 0.9, rate, 200, 1e-12).unwrap();
            assert_eq!(v, Verdict::DivergedBelowPS);
            for w in traj.windows(2) {
                assert!(w[1] <= w[0], "trajectory must fall below p_s");
            }
        }
    }

    #[test]
    fn saturated_map_geometric_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let p = 0.01 + 0.98 * rng.random::<f64>();
            let q = 0.01 + 0.98 * rng.random::<f64>();
            let direct = (-50.0 * q / (1.0 - p + p * q)).exp();
            assert_relative_eq!(
                saturated_map(p, 50, q, Cutoff::Finite(1)),
                direct,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn saturated_map_limits() {
        // Diverging service factor: the map tends to 1.
        assert_eq!(saturated_map(0.1f64, 50, 0.5, Cutoff::Unbounded), 1.0);
        // Fixed point of the unbounded map, found independently by bisection.
        let pa = 0.205199832644826f64;
        assert_abs_diff_eq!(
            saturated_map(pa, 50, 0.8, Cutoff::Unbounded),
            pa,
            epsilon = 1e-9
        );
    }

    #[test]
    fn saturated_map_alternates() {
        // Successive iterates straddle the fixed point: if p grew last step
        // it shrinks next, and conversely.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for cutoff in [Cutoff::Finite(1), Cutoff::Finite(4), Cutoff::Unbounded] {
            for _ in 0..50 {
                let q = 0.3 + 0.6 * rng.random::<f64>();
                let p0 = 0.05 + 0.9 * rng.random::<f64>();
                let p1 = saturated_map(p0, 20, q, cutoff);
                let p2 = saturated_map(p1, 20, q, cutoff);
                if p0 < p1 {
                    assert!(p1 >= p2, "q={q} p0={p0}");
                } else if p0 > p1 {
                    assert!(p1 <= p2, "q={q} p0={p0}");
                }
            }
        }
    }

    #[test]
    fn saturated_fixed_point_frozen_values() {
        // Bisection oracle values for p = exp(-n/g(p)).
        let cases: [(u32, f64, Cutoff, f64); 4] = [
            (50, 0.05, Cutoff::Finite(1), 0.0689000303821861),
            (50, 0.1, Cutoff::Finite(1), 0.00654135835319742),
            (50, 0.5, Cutoff::Unbounded, 0.503455014994598),
            (50, 0.8, Cutoff::Unbounded, 0.205199832644826),
        ];
        for (n, q, cutoff, expect) in cases {
            let sp = saturated_fixed_point(n, q, cutoff).unwrap();
            assert!(sp.converged, "n={n} q={q}");
            assert_abs_diff_eq!(sp.p_a, expect, epsilon = 1e-9);
            assert!((sp.p_a - saturated_map(sp.p_a, n, q, cutoff)).abs() <= 1e-10);
        }
    }

    #[test]
    fn saturated_fixed_point_large_n_limit() {
        let sp = saturated_fixed_point(1_000_000, 0.8f64, Cutoff::Unbounded).unwrap();
        assert!(sp.converged);
        assert_abs_diff_eq!(sp.p_a, 0.2, epsilon = 1e-4);
        assert_abs_diff_eq!(sp.p_a, 0.200000257510192, epsilon = 1e-8);
    }

    #[test]
    fn saturated_fixed_point_monotone_in_cutoff() {
        let mut prev = 0.0;
        for k in [2, 4, 8, 16] {
            let pa = saturated_fixed_point(50, 0.3f64, Cutoff::Finite(k)).unwrap().p_a;
            assert!(pa > prev, "p_A must grow with the cutoff, K={k}");
            prev = pa;
        }
        // Finite cutoffs cannot hold the channel open as n grows.
        let pa = saturated_fixed_point(100_000, 0.3f64, Cutoff::Finite(4)).unwrap().p_a;
        assert!(pa < 1e-3);
    }

    #[test]
    fn saturated_fixed_point_args() {
        assert!(saturated_fixed_point(1, 0.5f64, Cutoff::Finite(1)).is_err());
        assert!(saturated_fixed_point(10, 0.0f64, Cutoff::Finite(1)).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_abs_diff_eq!(
            p_a_closed_form_geo(50, 0.1f64).unwrap(),
            (-5.0f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            p_a_closed_form_exp(50, 0.8f64).unwrap(),
            0.205286329629,
            epsilon = 1e-12
        );
        // q -> 0 sends the exponential form to 1.
        assert_abs_diff_eq!(p_a_closed_form_exp(50, 1e-9f64).unwrap(), 1.0, epsilon = 1e-8);
        // Denominator can go nonpositive only for q exponentially close to 1.
        assert!(p_a_closed_form_exp(2, 1.0 - 1e-12f64).is_err());
    }

    #[test]
    fn geo_closed_form_accuracy_improves_with_nq() {
        // The exp(-n q) form overshoots by roughly exp(n q (1-q) p_A); the
        // error shrinks as n q grows.
        let rel = |n: u32, q: f64| {
            let pa = saturated_fixed_point(n, q, Cutoff::Finite(1)).unwrap().p_a;
            let geo = p_a_closed_form_geo(n, q).unwrap();
            ((pa - geo) / geo).abs()
        };
        let e1 = rel(50, 0.05);
        let e2 = rel(50, 0.1);
        let e3 = rel(50, 0.2);
        assert!(e1 > e2 && e2 > e3);
        assert_abs_diff_eq!(e2, 0.029176, epsilon = 1e-4);
    }
}
