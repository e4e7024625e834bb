//! Typed records produced by the subcommands, serializable to JSON and
//! renderable as CSV rows or a readable text block.

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use aloha::regions::{classify, max_stable_throughput, Classification, StabilityMode};
use aloha::sim::{SimConfig, SimMetrics};
use aloha::steady_state::{
    attempt_rate, offered_load, saturated_fixed_point, stable_points, Cutoff, NetworkConfig,
};
use aloha::{MaxThroughputResult64, StabilityReport64};

use crate::output::{fmt_f, fmt_opt, Csv};

const E_INV: f64 = 1.0 / std::f64::consts::E;

/// Stable points, region bounds, classification and throughput prediction
/// for one configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeRecord {
    pub n: u32,
    pub aggregate_rate: f64,
    pub cutoff: Cutoff,
    pub q: f64,
    pub p_l: f64,
    pub p_s: f64,
    pub degenerate: bool,
    pub attempt_rate_at_p_l: f64,
    #[serde(flatten)]
    pub report: StabilityReport64,
    /// Saturated operating point, filled when the configuration leaves the
    /// guaranteed regions (classification pseudo or unstable).
    pub p_a: Option<f64>,
}

impl AnalyzeRecord {
    pub fn build(config: &NetworkConfig<f64>) -> anyhow::Result<Self> {
        if config.aggregate_rate > E_INV + 1e-15 {
            bail!(
                "no stable points: aggregate rate {} exceeds 1/e ~ 0.3679",
                config.aggregate_rate
            );
        }
        let sp = stable_points(config.aggregate_rate)?;
        let report = classify(config)?;
        let p_a = match report.classification {
            Classification::Pseudo | Classification::Unstable => {
                Some(saturated_fixed_point(config.n, config.q, config.cutoff)?.p_a)
            }
            _ => None,
        };
        Ok(AnalyzeRecord {
            n: config.n,
            aggregate_rate: config.aggregate_rate,
            cutoff: config.cutoff,
            q: config.q,
            p_l: sp.p_l,
            p_s: sp.p_s,
            degenerate: sp.degenerate,
            attempt_rate_at_p_l: attempt_rate(config.aggregate_rate, sp.p_l)?,
            report,
            p_a,
        })
    }

    pub const CSV_HEADER: &'static [&'static str] = &[
        "n",
        "rate",
        "K",
        "q",
        "p_l",
        "p_s",
        "attempt_rate",
        "q_lower",
        "q_upper",
        "q_upper_star",
        "pseudo_lower",
        "pseudo_upper",
        "absolute_region_empty",
        "classification",
        "predicted_throughput",
        "epsilon_bound",
        "p_a",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            fmt_f(self.aggregate_rate),
            self.cutoff.to_string(),
            fmt_f(self.q),
            fmt_f(self.p_l),
            fmt_f(self.p_s),
            fmt_f(self.attempt_rate_at_p_l),
            fmt_opt(self.report.q_lower),
            fmt_opt(self.report.q_upper),
            fmt_opt(self.report.q_upper_star),
            fmt_opt(self.report.pseudo_lower),
            fmt_opt(self.report.pseudo_upper),
            self.report.absolute_region_empty.to_string(),
            classification_name(self.report.classification).into(),
            fmt_f(self.report.predicted_throughput),
            fmt_opt(self.report.epsilon_bound),
            fmt_opt(self.p_a),
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(Self::CSV_HEADER.to_vec());
        csv.push(self.csv_row());
        csv.render()
    }

    pub fn to_text(&self) -> String {
        let r = &self.report;
        let mut s = String::new();
        s += &format!(
            "network            n = {}, rate = {}, K = {}, q = {}\n",
            self.n, self.aggregate_rate, self.cutoff, self.q
        );
        s += &format!(
            "stable points      p_l = {:.6}, p_s = {:.6}{}\n",
            self.p_l,
            self.p_s,
            if self.degenerate { " (degenerate: rate = 0)" } else { "" }
        );
        s += &format!("attempt rate       G(p_l) = {:.6}\n", self.attempt_rate_at_p_l);
        match (r.q_lower, r.q_upper) {
            (Some(lo), Some(hi)) => {
                s += &format!(
                    "absolute region    [{lo:.6}, {hi:.6}]{}\n",
                    if r.absolute_region_empty { " (empty)" } else { "" }
                );
            }
            _ => s += "absolute region    none (rate above 1/e)\n",
        }
        if let Some(qs) = r.q_upper_star {
            s += &format!("asymptotic bound   q_u* = {qs:.6}\n");
        }
        if let (Some(lo), Some(hi)) = (r.pseudo_lower, r.pseudo_upper) {
            s += &format!("pseudo region      [{lo:.6}, {hi:.6}]\n");
        }
        s += &format!(
            "classification     {}\n",
            classification_name(r.classification)
        );
        s += &format!("predicted rate out {:.6}\n", r.predicted_throughput);
        if let Some(eps) = r.epsilon_bound {
            s += &format!("epsilon bound      {eps:.3e}\n");
        }
        if let Some(pa) = self.p_a {
            s += &format!("saturated point    p_a = {pa:.6}\n");
        }
        s
    }
}

pub fn classification_name(c: Classification) -> &'static str {
    match c {
        Classification::Absolute => "absolute",
        Classification::Asymptotic => "asymptotic",
        Classification::Pseudo => "pseudo",
        Classification::Unstable => "unstable",
    }
}

/// Region bounds and maximum stable throughput for `(n, rate, K)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionsRecord {
    pub n: u32,
    pub aggregate_rate: f64,
    pub cutoff: Cutoff,
    pub q_lower: f64,
    pub q_upper: f64,
    pub q_upper_star: f64,
    pub pseudo_lower: Option<f64>,
    pub pseudo_upper: Option<f64>,
    pub absolute_region_empty: bool,
    pub max_throughput_absolute: MaxThroughputResult64,
    pub max_throughput_asymptotic: MaxThroughputResult64,
    pub max_throughput_absolute_approx: Option<f64>,
}

impl RegionsRecord {
    pub fn build(n: u32, rate: f64, cutoff: Cutoff) -> anyhow::Result<Self> {
        let q_lower = aloha::q_lower(n, rate, cutoff)?;
        let q_upper = aloha::q_upper(n, rate)?;
        let q_upper_star = aloha::q_upper_star(n, rate, cutoff)?;
        let (pseudo_lower, pseudo_upper) = if cutoff == Cutoff::Unbounded {
            let (lo, hi) = aloha::pseudo_region(rate)?;
            (Some(lo), Some(hi))
        } else {
            (None, None)
        };
        Ok(RegionsRecord {
            n,
            aggregate_rate: rate,
            cutoff,
            q_lower,
            q_upper,
            q_upper_star,
            pseudo_lower,
            pseudo_upper,
            absolute_region_empty: q_lower > q_upper,
            max_throughput_absolute: max_stable_throughput(n, cutoff, StabilityMode::Absolute)?,
            max_throughput_asymptotic: max_stable_throughput(n, cutoff, StabilityMode::Asymptotic)?,
            max_throughput_absolute_approx: aloha::max_stable_throughput_approx(
                n,
                cutoff,
                StabilityMode::Absolute,
            ),
        })
    }

    pub const CSV_HEADER: &'static [&'static str] = &[
        "n",
        "rate",
        "K",
        "q_lower",
        "q_upper",
        "q_upper_star",
        "pseudo_lower",
        "pseudo_upper",
        "absolute_region_empty",
        "lambda_max_absolute",
        "q_at_max_absolute",
        "lambda_max_asymptotic",
        "q_at_max_asymptotic",
        "lambda_max_absolute_approx",
    ];

    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(Self::CSV_HEADER.to_vec());
        csv.push(vec![
            self.n.to_string(),
            fmt_f(self.aggregate_rate),
            self.cutoff.to_string(),
            fmt_f(self.q_lower),
            fmt_f(self.q_upper),
            fmt_f(self.q_upper_star),
            fmt_opt(self.pseudo_lower),
            fmt_opt(self.pseudo_upper),
            self.absolute_region_empty.to_string(),
            fmt_f(self.max_throughput_absolute.lambda_max),
            fmt_f(self.max_throughput_absolute.q_at_max),
            fmt_f(self.max_throughput_asymptotic.lambda_max),
            fmt_f(self.max_throughput_asymptotic.q_at_max),
            fmt_opt(self.max_throughput_absolute_approx),
        ]);
        csv.render()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s += &format!(
            "network            n = {}, rate = {}, K = {}\n",
            self.n, self.aggregate_rate, self.cutoff
        );
        s += &format!(
            "absolute region    [{:.6}, {:.6}]{}\n",
            self.q_lower,
            self.q_upper,
            if self.absolute_region_empty { " (empty)" } else { "" }
        );
        s += &format!("asymptotic bound   q_u* = {:.6}\n", self.q_upper_star);
        if let (Some(lo), Some(hi)) = (self.pseudo_lower, self.pseudo_upper) {
            s += &format!("pseudo region      [{lo:.6}, {hi:.6}]\n");
        }
        s += &format!(
            "max stable rate    {:.6} at q = {:.6} ({:?})\n",
            self.max_throughput_absolute.lambda_max,
            self.max_throughput_absolute.q_at_max,
            self.max_throughput_absolute.method,
        );
        s += &format!(
            "max asymptotic     {:.6} at q = {:.6} ({:?})\n",
            self.max_throughput_asymptotic.lambda_max,
            self.max_throughput_asymptotic.q_at_max,
            self.max_throughput_asymptotic.method,
        );
        if let Some(a) = self.max_throughput_absolute_approx {
            s += &format!("closed-form approx {a:.6}\n");
        }
        s
    }
}

/// One row of a retransmission-factor sweep: analytic predictions and,
/// when simulation is enabled, the measured counterparts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub q: f64,
    pub classification: Classification,
    /// Predicted operating success probability: `p_l` inside the absolute
    /// and asymptotic regions, the saturated point elsewhere.
    pub p_pred: f64,
    /// Offered load at the predicted operating point; infinite in the
    /// singular range of an unbounded cutoff (serialized as null in JSON).
    pub rho_pred: f64,
    pub lambda_out_pred: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub throughput_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho_hat: Option<f64>,
}

impl SweepRow {
    pub fn analytic(config: &NetworkConfig<f64>) -> anyhow::Result<Self> {
        let report = classify(config)?;
        let p_pred = match report.classification {
            Classification::Absolute | Classification::Asymptotic => {
                stable_points(config.aggregate_rate)?.p_l
            }
            Classification::Pseudo | Classification::Unstable => {
                saturated_fixed_point(config.n, config.q, config.cutoff)?.p_a
            }
        };
        let rho_pred = match offered_load(config, p_pred) {
            Ok(rho) => rho,
            Err(aloha::Error::Singular { .. }) => f64::INFINITY,
            Err(e) => return Err(e).context("offered load"),
        };
        Ok(SweepRow {
            q: config.q,
            classification: report.classification,
            p_pred,
            rho_pred,
            lambda_out_pred: report.predicted_throughput,
            seed: None,
            p_hat: None,
            g_hat: None,
            throughput_hat: None,
            rho_hat: None,
        })
    }

    pub fn attach_metrics(&mut self, seed: u64, m: &SimMetrics) {
        self.seed = Some(seed);
        self.p_hat = Some(m.p_hat);
        self.g_hat = Some(m.g_hat);
        self.throughput_hat = Some(m.throughput_hat);
        self.rho_hat = Some(m.rho_hat);
    }

    pub const CSV_HEADER: &'static [&'static str] = &[
        "q",
        "classification",
        "p_pred",
        "rho_pred",
        "lambda_out_pred",
        "seed",
        "p_hat",
        "g_hat",
        "throughput_hat",
        "rho_hat",
    ];

    pub fn csv_row(&self) -> Vec<String> {
        vec![
            fmt_f(self.q),
            classification_name(self.classification).into(),
            fmt_f(self.p_pred),
            fmt_f(self.rho_pred),
            fmt_f(self.lambda_out_pred),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            fmt_opt(self.p_hat),
            fmt_opt(self.g_hat),
            fmt_opt(self.throughput_hat),
            fmt_opt(self.rho_hat),
        ]
    }
}

/// A sweep over the retransmission factor at fixed `(n, rate, K)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: u32,
    pub aggregate_rate: f64,
    pub cutoff: Cutoff,
    pub rows: Vec<SweepRow>,
}

impl SweepRecord {
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new(SweepRow::CSV_HEADER.to_vec());
        for row in &self.rows {
            csv.push(row.csv_row());
        }
        csv.render()
    }
}

/// A full single-run record: configuration echo plus measured counters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateRecord {
    pub n: u32,
    pub aggregate_rate: f64,
    pub cutoff: Cutoff,
    pub q: f64,
    pub seed: u64,
    pub warmup_slots: u64,
    pub measure_slots: u64,
    pub saturated: bool,
    pub metrics: SimMetrics,
}

impl SimulateRecord {
    pub fn build(cfg: &SimConfig) -> anyhow::Result<Self> {
        let mut metrics = aloha::run(cfg)?;
        metrics.queue_trace = None;
        Ok(SimulateRecord {
            n: cfg.network.n,
            aggregate_rate: cfg.network.aggregate_rate,
            cutoff: cfg.network.cutoff,
            q: cfg.network.q,
            seed: cfg.seed,
            warmup_slots: cfg.warmup_slots,
            measure_slots: cfg.measure_slots,
            saturated: cfg.saturated,
            metrics,
        })
    }

    pub const CSV_HEADER: &'static [&'static str] = &[
        "n",
        "rate",
        "K",
        "q",
        "seed",
        "warmup_slots",
        "measure_slots",
        "saturated",
        "slots",
        "attempts",
        "successes",
        "p_hat",
        "p_hat_se",
        "g_hat",
        "throughput_hat",
        "rho_hat",
    ];

    pub fn to_csv(&self) -> String {
        let m = &self.metrics;
        let mut csv = Csv::new(Self::CSV_HEADER.to_vec());
        csv.push(vec![
            self.n.to_string(),
            fmt_f(self.aggregate_rate),
            self.cutoff.to_string(),
            fmt_f(self.q),
            self.seed.to_string(),
            self.warmup_slots.to_string(),
            self.measure_slots.to_string(),
            self.saturated.to_string(),
            m.slots.to_string(),
            m.attempts.to_string(),
            m.successes.to_string(),
            fmt_f(m.p_hat),
            fmt_f(m.p_hat_se),
            fmt_f(m.g_hat),
            fmt_f(m.throughput_hat),
            fmt_f(m.rho_hat),
        ]);
        csv.render()
    }
}
