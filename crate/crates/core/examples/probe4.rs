//! Scratch measurement: criterion-4 grid feasibility, spot check, histograms.

use aloha::sim::{run, SimConfig};
use aloha::steady_state::{offered_load, phase_distribution, stable_points, Cutoff, NetworkConfig};

fn main() {
    println!("== criterion 4 cells: n=10 rate=0.1, 1e7 slots, 2 seeds, rho_hat vs Eq.6(p_L)");
    let p_l = stable_points(0.1f64).unwrap().p_l;
    let cells: [(Cutoff, &[f64]); 4] = [
        (Cutoff::Finite(1), &[0.05, 0.1, 0.2]),
        (Cutoff::Finite(2), &[0.05, 0.1, 0.2]),
        (Cutoff::Finite(4), &[0.2, 0.3]),
        (Cutoff::Unbounded, &[0.13, 0.15, 0.2]),
    ];
    for (cutoff, qs) in cells {
        for &q in qs {
            let net = NetworkConfig::new(10, 0.1, cutoff, q).unwrap();
            let rho = offered_load(&net, p_l).unwrap();
            print!("  K={cutoff:?} q={q}: rho={rho:.5} rho_hat:");
            for seed in [0xBAC0FFu64, 7, 99] {
                let cfg = SimConfig {
                    seed,
                    warmup_slots: 200_000,
                    measure_slots: 10_000_000,
                    ..SimConfig::new(net)
                };
                let m = run(&cfg).unwrap();
                print!(" {:.5} ({:+.3})", m.rho_hat, (m.rho_hat - rho) / rho);
            }
            println!();
        }
    }

    println!("== criterion 10 spot check variants: K=1, q=q_l*1.005");
    for (n, rate) in [(10u32, 0.3f64), (50, 0.3)] {
        let ql = aloha::regions::q_lower(n, rate, Cutoff::Finite(1)).unwrap();
        let q = ql * 1.005;
        let net = NetworkConfig::new(n, rate, Cutoff::Finite(1), q).unwrap();
        let cfg = SimConfig {
            warmup_slots: 500_000,
            measure_slots: 2_000_000,
            ..SimConfig::new(net)
        };
        let m = run(&cfg).unwrap();
        println!(
            "  n={n}: q={q:.6} rho_hat={:.4} p_hat={:.4}",
            m.rho_hat, m.p_hat
        );
    }

    println!("== phase histogram at n=50 (compare at measured p_hat)");
    let hist_cells = [
        (50u32, 0.3f64, Cutoff::Finite(1), 0.02f64, 2_000_000u64),
        (50, 0.1, Cutoff::Finite(2), 0.05, 5_000_000),
    ];
    for (n, rate, cutoff, q, slots) in hist_cells {
        let net = NetworkConfig::new(n, rate, cutoff, q).unwrap();
        let cfg = SimConfig {
            warmup_slots: 200_000,
            measure_slots: slots,
            ..SimConfig::new(net)
        };
        let m = run(&cfg).unwrap();
        let dist = phase_distribution(m.p_hat, q, cutoff).unwrap();
        println!("  n={n} rate={rate} K={cutoff:?} q={q}: p_hat={:.5}", m.p_hat);
        for (i, &f_hat) in m.empirical_phase_dist().iter().enumerate() {
            let f = dist.f(i as u32);
            println!(
                "    phase {i}: empirical={f_hat:.5} chain={f:.5} rel={:+.4} (samples {})",
                (f_hat - f) / f,
                m.phase_hist[i]
            );
        }
    }
}
