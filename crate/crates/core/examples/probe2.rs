//! Scratch measurement: buffered pseudo-stable behavior at n=50, rate=0.3.

use aloha::sim::{run, SimConfig};
use aloha::steady_state::{saturated_fixed_point, Cutoff, NetworkConfig};

fn main() {
    println!("== buffered n=50 rate=0.3 K=inf, 5e6 slots (criterion 8 preview)");
    for q in [0.5, 0.65, 0.8, 0.95] {
        let pa = saturated_fixed_point(50, q, Cutoff::Unbounded).unwrap().p_a;
        let cfg = SimConfig {
            warmup_slots: 100_000,
            measure_slots: 5_000_000,
            ..SimConfig::new(NetworkConfig::new(50, 0.3, Cutoff::Unbounded, q).unwrap())
        };
        let m = run(&cfg).unwrap();
        println!(
            "q={q:<5} p_hat={:.4} p_a={pa:.4}  thr={:.4}  rho={:.4}  -(1-q)ln(1-q)={:.4}",
            m.p_hat,
            m.throughput_hat,
            m.rho_hat,
            -(1.0 - q) * (1.0f64 - q).ln()
        );
    }

    println!("== buffered n=50 rate=0.3 K=1 q=0.2, 5e6 slots (criterion 9 preview)");
    let cfg = SimConfig {
        warmup_slots: 100_000,
        measure_slots: 5_000_000,
        ..SimConfig::new(NetworkConfig::new(50, 0.3, Cutoff::Finite(1), 0.2).unwrap())
    };
    let m = run(&cfg).unwrap();
    println!("thr={:.6} (predicted 4.54e-4)", m.throughput_hat);

    println!("== trace n=50 rate=0.3 K=inf q=0.8, 1e6 slots (criterion 11 preview)");
    let cfg = SimConfig {
        warmup_slots: 100_000,
        measure_slots: 1_000_000,
        trace_node: Some(0),
        ..SimConfig::new(NetworkConfig::new(50, 0.3, Cutoff::Unbounded, 0.8).unwrap())
    };
    let m = run(&cfg).unwrap();
    let trace = m.queue_trace.as_ref().unwrap();
    let mut longest_idle = 0u64;
    let mut cur_idle = 0u64;
    let mut longest_burst = 0u64;
    let mut cur_burst = 0u64;
    for t in trace {
        if t.departed {
            cur_burst += 1;
            longest_burst = longest_burst.max(cur_burst);
            cur_idle = 0;
        } else {
            cur_idle += 1;
            longest_idle = longest_idle.max(cur_idle);
            cur_burst = 0;
        }
    }
    let max_q = trace.iter().map(|t| t.queue_len).max().unwrap();
    println!(
        "longest idle stretch={longest_idle} slots, longest drain burst={longest_burst} departures, max queue={max_q}"
    );
}
