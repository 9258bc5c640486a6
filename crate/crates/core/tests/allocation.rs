use proptest::prelude::*;
use vcc_core::allocation::{mmf_bd_mrc, mmf_massive_mimo, waterfill, ServedUser, UserRateFunction};
use vcc_core::channel::{GroupChannel, UserChannel};
use vcc_core::linalg::complex_normal_matrix;
use vcc_core::precoding::bd_mrc;
use vcc_core::rng::SeedTree;

fn gains() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-2f64..1e2, 1..6)
}

proptest! {
    #[test]
    fn waterfill_kkt(eigs in gains(), budget in 1e-3f64..1e3, n0 in 1e-2f64..10.0) {
        let wf = waterfill(&eigs, budget, n0);
        let sum: f64 = wf.powers.iter().sum();
        prop_assert!((sum / budget - 1.0).abs() < 1e-9);
        for (&p, &l) in wf.powers.iter().zip(&eigs) {
            prop_assert!(p >= 0.0);
            if p > 0.0 {
                prop_assert!(((p + n0 / l) / wf.level - 1.0).abs() < 1e-9);
            } else {
                prop_assert!(n0 / l >= wf.level * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn rate_is_increasing_and_inverse_consistent(eigs in gains(), a in 1e-3f64..1e3, b in 1e-3f64..1e3) {
        let f = UserRateFunction::new(eigs, 0.5, 0.9).unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(f.rate(lo) <= f.rate(hi));
        prop_assert!((f.inverse(f.rate(a)) / a - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mmf_stays_inside_its_bracket(users in prop::collection::vec(gains(), 1..6), p in 1e-2f64..1e4) {
        let funcs: Vec<_> = users.into_iter().map(|e| UserRateFunction::new(e, 1.0, 0.95).unwrap()).collect();
        let sol = mmf_bd_mrc(&funcs, p).unwrap();
        let (lo, hi) = sol.bracket;
        prop_assert!(sol.sum_rate >= lo * (1.0 - 1e-12) && sol.sum_rate <= hi * (1.0 + 1e-12));
        prop_assert!(sol.total_power() <= p * (1.0 + 1e-9));
    }
}

/// Relative gap between the simulated BD-MRC MMF sum-rate and the
/// large-array value for one group of `q` users with `m` antennas each.
fn large_array_gap(l: usize, q: usize, m: usize, draws: u64) -> f64 {
    let (n0, p, xi) = (1.0, 100.0, 1.0);
    let served: Vec<_> = (0..q)
        .map(|_| ServedUser {
            beta: 1.0,
            antennas: m,
            group: 0,
        })
        .collect();
    let approx = mmf_massive_mimo(&served, l, xi, n0, p).unwrap().sum_rate;
    let mut sim = 0.0;
    for d in 0..draws {
        let mut rng = SeedTree::new(7).stream(&[l as u64, d]);
        let users = (0..q)
            .map(|_| UserChannel {
                h: complex_normal_matrix(&mut rng, l, m, 1.0),
                beta: 1.0,
            })
            .collect();
        let sol = bd_mrc(&GroupChannel::from_users(l, users).unwrap()).unwrap();
        let funcs: Vec<_> = sol
            .users
            .into_iter()
            .map(|u| UserRateFunction::new(u.eigenvalues, n0, xi).unwrap())
            .collect();
        sim += mmf_bd_mrc(&funcs, p).unwrap().sum_rate;
    }
    (approx / (sim / draws as f64) - 1.0).abs()
}

#[test]
fn large_array_gap_is_small() {
    let gap = large_array_gap(256, 4, 2, 20);
    assert!(gap <= 0.01, "{gap}");
}

#[test]
fn large_array_gap_shrinks_with_array_size() {
    let gaps: Vec<f64> = [16, 32, 64, 128]
        .iter()
        .map(|&l| large_array_gap(l, 4, 2, 40))
        .collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
}
