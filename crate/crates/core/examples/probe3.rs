//! Scratch measurement: q=0.95 saturation onset, criterion 4 cells, spot checks.

use aloha::sim::{run, SimConfig};
use aloha::steady_state::{offered_load, stable_points, Cutoff, NetworkConfig};

fn main() {
    println!("== q=0.95 buffered transient: thr/rho per 4e6-slot window");
    for w in 0..8u64 {
        let cfg = SimConfig {
            warmup_slots: w * 4_000_000,
            measure_slots: 4_000_000,
            ..SimConfig::new(NetworkConfig::new(50, 0.3, Cutoff::Unbounded, 0.95).unwrap())
        };
        let m = run(&cfg).unwrap();
        println!(
            "  window {w}: thr={:.4} rho={:.4} p_hat={:.4}",
            m.throughput_hat, m.rho_hat, m.p_hat
        );
    }

    println!("== criterion 4 cells: n=10 rate=0.1, rho_hat vs analytic, 1e6 slots");
    let p_l = stable_points(0.1f64).unwrap().p_l;
    let cells: [(Cutoff, &[f64]); 4] = [
        (Cutoff::Finite(1), &[0.05, 0.1, 0.2, 0.3]),
        (Cutoff::Finite(2), &[0.05, 0.1, 0.2, 0.3]),
        (Cutoff::Finite(4), &[0.05, 0.1, 0.2, 0.3]),
        (Cutoff::Unbounded, &[0.15, 0.2, 0.3]),
    ];
    for (cutoff, qs) in cells {
        for &q in qs {
            let net = NetworkConfig::new(10, 0.1, cutoff, q).unwrap();
            let rho = offered_load(&net, p_l).unwrap();
            let cfg = SimConfig {
                warmup_slots: 100_000,
                measure_slots: 1_000_000,
                ..SimConfig::new(net)
            };
            let m = run(&cfg).unwrap();
            println!(
                "  K={cutoff:?} q={q}: rho_hat={:.5} rho={rho:.5} rel={:.4}",
                m.rho_hat,
                (m.rho_hat - rho).abs() / rho
            );
        }
    }

    println!("== criterion 10 spot check: n=10 rate=0.3 K=1 q just above q_l");
    let q = 0.02037; // offered load ~0.96 at p_l
    let net = NetworkConfig::new(10, 0.3, Cutoff::Finite(1), q).unwrap();
    let cfg = SimConfig {
        warmup_slots: 300_000,
        measure_slots: 1_000_000,
        ..SimConfig::new(net)
    };
    let m = run(&cfg).unwrap();
    println!("  rho_hat={:.4} (want > 0.9)", m.rho_hat);

    println!("== criterion 3 missing cell (0.01, inf)");
    let cfg = SimConfig {
        warmup_slots: 100_000,
        measure_slots: 1_000_000,
        ..SimConfig::new(NetworkConfig::new(10, 0.1, Cutoff::Unbounded, 0.01).unwrap())
    };
    let m = run(&cfg).unwrap();
    println!("  p_hat={:.4} thr={:.4}", m.p_hat, m.throughput_hat);

    println!("== phase histogram check at measured p (n=10 rate=0.25 K=4 q=0.18)");
    let cfg = SimConfig {
        warmup_slots: 100_000,
        measure_slots: 1_000_000,
        ..SimConfig::new(NetworkConfig::new(10, 0.25, Cutoff::Finite(4), 0.18).unwrap())
    };
    let m = run(&cfg).unwrap();
    let dist = aloha::steady_state::phase_distribution(m.p_hat, 0.18, Cutoff::Finite(4)).unwrap();
    for (i, &f_hat) in m.empirical_phase_dist().iter().enumerate() {
        let f = dist.f(i as u32);
        println!(
            "  phase {i}: empirical={f_hat:.5} chain(p_hat)={f:.5} rel={:.4}",
            (f_hat - f).abs() / f
        );
    }
}
