//! Scratch measurement harness used while calibrating test tolerances.

use aloha::sim::{run, SimConfig};
use aloha::steady_state::{saturated_fixed_point, stable_points, Cutoff, NetworkConfig};

fn main() {
    let p_l = stable_points(0.1f64).unwrap().p_l;
    println!("== criterion 3 cells: n=10 rate=0.1, 1e6 slots, p_l = {p_l:.6}");
    for (q, cutoff) in [
        (0.01, Cutoff::Finite(1)),
        (0.05, Cutoff::Finite(1)),
        (0.1, Cutoff::Finite(1)),
        (0.2, Cutoff::Finite(1)),
        (0.2, Cutoff::Unbounded),
        (0.1, Cutoff::Unbounded),
        (0.05, Cutoff::Unbounded),
    ] {
        let cfg = SimConfig {
            warmup_slots: 100_000,
            measure_slots: 1_000_000,
            ..SimConfig::new(NetworkConfig::new(10, 0.1, cutoff, q).unwrap())
        };
        let m = run(&cfg).unwrap();
        println!(
            "q={q:<5} K={cutoff:<10?} p_hat={:.5} (se {:.5})  thr={:.5}  |dp|={:.5}",
            m.p_hat,
            m.p_hat_se,
            m.throughput_hat,
            (m.p_hat - p_l).abs()
        );
    }

    println!("== saturated runs: n=50, windows of 1e6 slots");
    for (q, cutoff) in [
        (0.05, Cutoff::Finite(1)),
        (0.1, Cutoff::Finite(1)),
        (0.5, Cutoff::Unbounded),
        (0.8, Cutoff::Unbounded),
    ] {
        let pa = saturated_fixed_point(50, q, cutoff).unwrap().p_a;
        print!("q={q:<5} K={cutoff:<10?} p_a={pa:.5} windows:");
        for w in 0..6 {
            let cfg = SimConfig {
                warmup_slots: w * 1_000_000,
                measure_slots: 1_000_000,
                saturated: true,
                ..SimConfig::new(NetworkConfig::new(50, 0.0, cutoff, q).unwrap())
            };
            let m = run(&cfg).unwrap();
            print!(" {:.4}", m.p_hat);
        }
        println!();
    }
}
