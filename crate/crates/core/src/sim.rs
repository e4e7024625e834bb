//! Slot-level simulation of buffered nodes contending on one slotted channel.
//!
//! Time advances in slots. At the start of a slot each node receives a packet
//! with probability `rate/n` (early arrival: a packet landing in an empty
//! queue becomes the head-of-line packet and may transmit in the same slot).
//! Every node with a nonempty queue then transmits its head-of-line packet
//! with probability `q^phase`; a fresh packet is phase 0 and transmits
//! unconditionally. Exactly one transmitter is a success and the next queued
//! packet, if any, becomes a fresh head of line; two or more transmitters
//! collide and every participant climbs one phase, capped at the cutoff.
//!
//! Randomness comes from one counter-based generator per node plus one for
//! arrivals, all derived from the master seed, so runs are reproducible and
//! the per-node streams do not depend on each other's consumption.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::steady_state::NetworkConfig;

/// Seed used when none is given; fixed so published tables reproduce.
pub const DEFAULT_SEED: u64 = 0xBAC0FF;
pub const DEFAULT_WARMUP_SLOTS: u64 = 100_000;
pub const DEFAULT_MEASURE_SLOTS: u64 = 1_000_000;
/// Batch count for batch-means standard errors.
const BATCHES: u64 = 50;

/// Per-node view: queue occupancy, head-of-line phase and cumulative counts.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeState {
    pub queue_len: u64,
    /// Collisions suffered by the current head-of-line packet; meaningful
    /// only while `queue_len >= 1`.
    pub hol_phase: u32,
    pub attempts: u64,
    pub successes: u64,
    pub busy_slots: u64,
    tx_prob: f64,
}

impl NodeState {
    fn fresh(queue_len: u64) -> Self {
        NodeState {
            queue_len,
            hol_phase: 0,
            attempts: 0,
            successes: 0,
            busy_slots: 0,
            tx_prob: 1.0,
        }
    }
}

/// One simulation run: the network, its random seed and the slot budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub network: NetworkConfig<f64>,
    pub seed: u64,
    pub warmup_slots: u64,
    pub measure_slots: u64,
    /// Bottomless queues: every node always holds a packet and a departed
    /// head of line is replaced by a fresh phase-0 packet.
    pub saturated: bool,
    pub trace_node: Option<u32>,
}

impl SimConfig {
    pub fn new(network: NetworkConfig<f64>) -> Self {
        SimConfig {
            network,
            seed: DEFAULT_SEED,
            warmup_slots: DEFAULT_WARMUP_SLOTS,
            measure_slots: DEFAULT_MEASURE_SLOTS,
            saturated: false,
            trace_node: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.measure_slots == 0 {
            return Err(Error::InvalidConfig("need at least one measured slot".into()));
        }
        if let Some(t) = self.trace_node {
            if t >= self.network.n {
                return Err(Error::InvalidConfig(format!(
                    "trace node {t} out of range for {} nodes",
                    self.network.n
                )));
            }
        }
        Ok(())
    }
}

/// Decorrelated per-row seed for sweeps (splitmix64 of the master seed and
/// the row index).
pub fn derive_row_seed(master: u64, row: u64) -> u64 {
    let mut z = master
        .wrapping_add((row.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// What happened on the channel in one slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlotOutcome {
    Idle,
    Success(u32),
    Collision(Vec<u32>),
}

/// Queue length of the traced node at the end of a slot, with a flag for
/// whether that node departed a packet during the slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceSample {
    pub slot: u64,
    pub queue_len: u64,
    pub departed: bool,
}

/// Counters collected over the measurement window of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimMetrics {
    pub slots: u64,
    pub attempts: u64,
    pub successes: u64,
    pub arrivals: u64,
    pub busy_node_slots: u64,
    /// Successes per attempt.
    pub p_hat: f64,
    /// Batch-means standard error of `p_hat`.
    pub p_hat_se: f64,
    /// Attempts per slot.
    pub g_hat: f64,
    /// Successes per slot.
    pub throughput_hat: f64,
    /// Fraction of node-slots spent busy.
    pub rho_hat: f64,
    /// Busy node-slots per head-of-line phase.
    pub phase_hist: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queue_trace: Option<Vec<TraceSample>>,
    /// Whole-run totals (warmup included) for conservation checks.
    pub arrivals_run_total: u64,
    pub departures_run_total: u64,
    pub final_queue_total: u64,
}

impl SimMetrics {
    /// Empirical phase distribution of busy head-of-line packets.
    pub fn empirical_phase_dist(&self) -> Vec<f64> {
        let total: u64 = self.phase_hist.iter().sum();
        if total == 0 {
            return Vec::new();
        }
        self.phase_hist.iter().map(|&c| c as f64 / total as f64).collect()
    }
}

/// Longest capture-effect features of a queue trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaptureStats {
    /// Longest run of slots without a departure for the traced node.
    pub longest_idle_stretch: u64,
    /// Most departures in one drain episode; departures belong to the same
    /// episode while consecutive ones are at most `gap` slots apart.
    pub longest_drain_episode: u64,
    /// Largest queue length seen.
    pub peak_queue: u64,
}

/// Scan a queue trace for capture-effect features. `gap` separates drain
/// episodes: during a capture the traced node departs every few slots, while
/// between captures it waits thousands, so any gap between those scales works.
pub fn capture_stats(trace: &[TraceSample], gap: u64) -> CaptureStats {
    let mut longest_idle = 0u64;
    let mut idle = 0u64;
    let mut longest_episode = 0u64;
    let mut episode = 0u64;
    let mut last_departure: Option<u64> = None;
    let mut peak_queue = 0u64;
    for t in trace {
        peak_queue = peak_queue.max(t.queue_len);
        if t.departed {
            episode = match last_departure {
                Some(prev) if t.slot - prev <= gap => episode + 1,
                _ => 1,
            };
            longest_episode = longest_episode.max(episode);
            last_departure = Some(t.slot);
            idle = 0;
        } else {
            idle += 1;
            longest_idle = longest_idle.max(idle);
        }
    }
    CaptureStats {
        longest_idle_stretch: longest_idle,
        longest_drain_episode: longest_episode,
        peak_queue,
    }
}

struct InnerOutcome {
    busy: u32,
    transmitters: u32,
    winner: Option<u32>,
    arrivals: u32,
}

/// Slot-stepped state of one network.
pub struct Simulator {
    cfg: SimConfig,
    lambda: f64,
    nodes: Vec<NodeState>,
    node_rngs: Vec<ChaCha8Rng>,
    arrival_rng: ChaCha8Rng,
    scratch: Vec<u32>,
    slot: u64,
    arrivals_total: u64,
    departures_total: u64,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.network.n;
        let stream_rng = |stream: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(stream);
            rng
        };
        let initial_queue = if cfg.saturated { 1 } else { 0 };
        Ok(Simulator {
            lambda: cfg.network.per_node_rate(),
            nodes: (0..n).map(|_| NodeState::fresh(initial_queue)).collect(),
            node_rngs: (0..n as u64).map(stream_rng).collect(),
            arrival_rng: stream_rng(n as u64),
            scratch: Vec::with_capacity(n as usize),
            slot: 0,
            arrivals_total: 0,
            departures_total: 0,
            cfg,
        })
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Advance one slot and report the channel outcome.
    pub fn step(&mut self) -> SlotOutcome {
        let out = self.step_inner(None);
        match (out.transmitters, out.winner) {
            (0, _) => SlotOutcome::Idle,
            (1, Some(i)) => SlotOutcome::Success(i),
            _ => SlotOutcome::Collision(self.scratch.clone()),
        }
    }

    fn step_inner(&mut self, mut hist: Option<&mut Vec<u64>>) -> InnerOutcome {
        let q = self.cfg.network.q;
        let cutoff = self.cfg.network.cutoff;
        let saturated = self.cfg.saturated;

        let mut arrivals = 0u32;
        if !saturated && self.lambda > 0.0 {
            for node in &mut self.nodes {
                if self.arrival_rng.random::<f64>() < self.lambda {
                    node.queue_len += 1;
                    if node.queue_len == 1 {
                        node.hol_phase = 0;
                        node.tx_prob = 1.0;
                    }
                    arrivals += 1;
                }
            }
            self.arrivals_total += arrivals as u64;
        }

        self.scratch.clear();
        let mut busy = 0u32;
        for (i, node) in self.nodes.iter_mut().enumerate() {
            if !saturated && node.queue_len == 0 {
                continue;
            }
            busy += 1;
            node.busy_slots += 1;
            if let Some(h) = hist.as_deref_mut() {
                let phase = node.hol_phase as usize;
                if h.len() <= phase {
                    h.resize(phase + 1, 0);
                }
                h[phase] += 1;
            }
            let transmits =
                node.hol_phase == 0 || self.node_rngs[i].random::<f64>() < node.tx_prob;
            if transmits {
                node.attempts += 1;
                self.scratch.push(i as u32);
            }
        }

        let winner = match self.scratch.len() {
            0 => None,
            1 => {
                let idx = self.scratch[0];
                let node = &mut self.nodes[idx as usize];
                node.successes += 1;
                if !saturated {
                    node.queue_len -= 1;
                }
                node.hol_phase = 0;
                node.tx_prob = 1.0;
                self.departures_total += 1;
                Some(idx)
            }
            _ => {
                for &idx in &self.scratch {
                    let node = &mut self.nodes[idx as usize];
                    node.hol_phase = cutoff.advance(node.hol_phase);
                    node.tx_prob = q.powi(node.hol_phase as i32);
                }
                None
            }
        };

        self.slot += 1;
        InnerOutcome { busy, transmitters: self.scratch.len() as u32, winner, arrivals }
    }
}

/// Run warmup then measurement slots and collect [`SimMetrics`]. Identical
/// configurations (seed included) produce identical metrics.
pub fn run(cfg: &SimConfig) -> Result<SimMetrics> {
    let mut sim = Simulator::new(*cfg)?;
    for _ in 0..cfg.warmup_slots {
        sim.step_inner(None);
    }

    let n = cfg.network.n as u64;
    let slots = cfg.measure_slots;
    let batch_len = (slots / BATCHES).max(1);
    let mut phase_hist = Vec::new();
    let mut trace = cfg.trace_node.map(|_| Vec::with_capacity(slots as usize));

    let mut attempts = 0u64;
    let mut successes = 0u64;
    let mut arrivals = 0u64;
    let mut busy_node_slots = 0u64;
    let mut batch_p = Vec::with_capacity(BATCHES as usize + 1);
    let (mut batch_att, mut batch_succ) = (0u64, 0u64);

    for s in 0..slots {
        let out = sim.step_inner(Some(&mut phase_hist));
        attempts += out.transmitters as u64;
        batch_att += out.transmitters as u64;
        if out.winner.is_some() {
            successes += 1;
            batch_succ += 1;
        }
        arrivals += out.arrivals as u64;
        busy_node_slots += out.busy as u64;
        if (s + 1) % batch_len == 0 {
            if batch_att > 0 {
                batch_p.push(batch_succ as f64 / batch_att as f64);
            }
            batch_att = 0;
            batch_succ = 0;
        }
        if let (Some(t), Some(tr)) = (cfg.trace_node, trace.as_mut()) {
            tr.push(TraceSample {
                slot: s,
                queue_len: sim.nodes[t as usize].queue_len,
                departed: out.winner == Some(t),
            });
        }
    }

    let p_hat = if attempts > 0 { successes as f64 / attempts as f64 } else { 0.0 };
    let p_hat_se = if batch_p.len() >= 2 {
        let m = batch_p.len() as f64;
        let mean = batch_p.iter().sum::<f64>() / m;
        let var = batch_p.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (m - 1.0);
        (var / m).sqrt()
    } else {
        f64::NAN
    };

    Ok(SimMetrics {
        slots,
        attempts,
        successes,
        arrivals,
        busy_node_slots,
        p_hat,
        p_hat_se,
        g_hat: attempts as f64 / slots as f64,
        throughput_hat: successes as f64 / slots as f64,
        rho_hat: busy_node_slots as f64 / (n * slots) as f64,
        phase_hist,
        queue_trace: trace,
        arrivals_run_total: sim.arrivals_total,
        departures_run_total: sim.departures_total,
        final_queue_total: sim.nodes.iter().map(|nd| nd.queue_len).sum(),
    })
}

/// Run each configuration, in parallel; row order is preserved. Rows are
/// expected to share `n`, rate and cutoff and differ in `q` and seed.
pub fn sweep(configs: &[SimConfig]) -> Result<Vec<SimMetrics>> {
    configs.par_iter().map(run).collect()
}
