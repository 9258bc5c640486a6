use proptest::prelude::*;
use vcc_core::channel::{GroupChannel, UserChannel};
use vcc_core::linalg::{complex_normal_matrix, CMatrix};
use vcc_core::precoding::{bd_mrc, bd_mrc_sinr, zf_gains};
use vcc_core::rng::SeedTree;

fn group(seed: u64, l: usize, q: usize, m: usize, beta: f64) -> (Vec<CMatrix>, GroupChannel) {
    let mut rng = SeedTree::new(seed).stream(&[0]);
    let hs: Vec<CMatrix> = (0..q)
        .map(|_| complex_normal_matrix(&mut rng, l, m, beta))
        .collect();
    let users = hs
        .iter()
        .map(|h| UserChannel { h: h.clone(), beta })
        .collect();
    (hs.clone(), GroupChannel::from_users(l, users).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn streams_never_leak(seed in any::<u64>(), l in 4usize..=24, q in 1usize..=4, m in 1usize..=4) {
        prop_assume!(q * m <= l);
        let (hs, g) = group(seed, l, q, m, 1.0);
        let sol = bd_mrc(&g).unwrap();
        for (k, u) in sol.users.iter().enumerate() {
            prop_assert_eq!(u.streams(), m);
            for (j, h) in hs.iter().enumerate() {
                if j != k {
                    prop_assert!((h.transpose() * &u.v).norm() / h.norm() < 1e-9);
                }
            }
            for c in u.v.column_iter() {
                prop_assert!((c.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn sinr_from_definition_matches_eigenvalues() {
    let (hs, g) = group(4, 12, 3, 2, 0.7);
    let sol = bd_mrc(&g).unwrap();
    let (p, n0) = (0.5, 0.01);
    let powers: Vec<Vec<f64>> = sol.users.iter().map(|u| vec![p; u.streams()]).collect();
    let sinr = bd_mrc_sinr(&sol, &powers, n0);
    for (k, u) in sol.users.iter().enumerate() {
        for s in 0..u.streams() {
            let y = (u.r.column(s).adjoint() * hs[k].transpose() * u.v.column(s))[(0, 0)];
            let direct = p * y.norm_sqr() / n0;
            assert!((direct / sinr[k][s] - 1.0).abs() < 1e-10);
        }
    }
}

#[test]
fn eigenvalues_concentrate_for_large_arrays() {
    let (l, q, m, beta) = (256, 4, 2, 0.5);
    let expected = beta * (l - q * m + m) as f64;
    let mut sum = 0.0;
    let mut count = 0.0;
    for seed in 0..20 {
        let (_, g) = group(100 + seed, l, q, m, beta);
        for u in bd_mrc(&g).unwrap().users {
            sum += u.eigenvalues.iter().sum::<f64>();
            count += u.streams() as f64;
        }
    }
    let mean = sum / count;
    assert!((mean / expected - 1.0).abs() < 0.02, "{mean} vs {expected}");
}

#[test]
fn zf_inverse_gain_mean() {
    // E[1/g] = 1 / (β (L − N)) for N single-antenna users.
    let (l, n, beta) = (16, 6, 2.0);
    let mut acc = 0.0;
    let draws = 4000;
    for seed in 0..draws {
        let (_, g) = group(10_000 + seed, l, n, 1, beta);
        acc += zf_gains(&g).unwrap().iter().map(|x| 1.0 / x).sum::<f64>() / n as f64;
    }
    let mean = acc / draws as f64;
    let expected = 1.0 / (beta * (l - n) as f64);
    assert!((mean / expected - 1.0).abs() < 0.03, "{mean} vs {expected}");
}

#[test]
fn overfull_group_is_rejected() {
    let mut rng = SeedTree::new(0).stream(&[0]);
    let users = (0..3)
        .map(|_| UserChannel {
            h: complex_normal_matrix(&mut rng, 4, 2, 1.0),
            beta: 1.0,
        })
        .collect();
    assert!(GroupChannel::from_users(4, users).is_err());
}
