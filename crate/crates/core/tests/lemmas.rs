//! Auxiliary norm inequalities on random and adversarial instances.

mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use spectral_stop_core::bounds::complement_inf_norm;
use spectral_stop_core::matcore::{coherence, dist_2, inf_op_norm, procrustes_align, small_svd, spectral_norm, thin_qr, two_to_inf_norm};
use spectral_stop_core::Mat;

fn config() -> ProptestConfig {
    ProptestConfig { cases: 256, ..ProptestConfig::default() }
}

fn inf_norm_of_vdvt(v: &Mat, d: &[f64]) -> f64 {
    inf_op_norm(&v.scale_cols(d).matmul_tr(v)).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn complement_norm_bounded_by_coherence(seed in any::<u64>(), n in 2usize..40, r in 1usize..8, spike in 0.0f64..1.0) {
        prop_assume!(r < n);
        let mut g = rng(seed);
        // Mixing a Haar block with identity columns moves μ between its
        // typical value and the maximum sqrt(n / r).
        let haar = orthonormal(&mut g, n, r);
        let mixed = haar.scale(1.0 - spike).add(&Mat::eye_cols(n, r).scale(spike));
        let v = match thin_qr(&mixed) {
            Ok((q, _)) => q,
            Err(_) => haar,
        };
        let mu = coherence(&v).unwrap();
        prop_assert!(complement_inf_norm(&v) <= 1.0 + mu * (r as f64).sqrt() + 1e-12);
    }

    #[test]
    fn two_to_inf_submultiplicative(seed in any::<u64>(), n in 1usize..30, k in 1usize..10, m in 1usize..10) {
        let mut g = rng(seed);
        let a = gaussian(&mut g, n, k);
        let b = gaussian(&mut g, k, m);
        let ab = two_to_inf_norm(&a.matmul(&b)).unwrap();
        let slack = 1e-12 * (1.0 + ab);
        prop_assert!(ab <= two_to_inf_norm(&a).unwrap() * spectral_norm(&b, 1e-14).unwrap() + slack);

        let c = gaussian(&mut g, n, n);
        let d = gaussian(&mut g, n, m);
        let cd = two_to_inf_norm(&c.matmul(&d)).unwrap();
        prop_assert!(cd <= inf_op_norm(&c).unwrap() * two_to_inf_norm(&d).unwrap() + 1e-12 * (1.0 + cd));
    }

    #[test]
    fn two_to_inf_right_invariant(seed in any::<u64>(), n in 1usize..30, r in 1usize..8, extra in 0usize..10) {
        let mut g = rng(seed);
        let a = gaussian(&mut g, n, r);
        let w = orthonormal(&mut g, r + extra, r);
        let lhs = two_to_inf_norm(&a.matmul_tr(&w)).unwrap();
        let rhs = two_to_inf_norm(&a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1.0));
    }

    #[test]
    fn procrustes_residual_within_sqrt2_dist(seed in any::<u64>(), n in 2usize..30, r in 1usize..8, scale in 0.0f64..2.0) {
        prop_assume!(r < n);
        let mut g = rng(seed);
        let v = orthonormal(&mut g, n, r);
        let q = thin_qr(&v.add(&gaussian(&mut g, n, r).scale(scale))).unwrap().0;
        let z = procrustes_align(&q, &v).unwrap();
        let resid = spectral_norm(&q.sub(&v.matmul(&z)), 1e-14).unwrap();
        let d = dist_2(&q, &v).unwrap();
        prop_assert!(resid <= std::f64::consts::SQRT_2 * d + 1e-12);
        prop_assert!(resid <= 2.0 * (r as f64).sqrt() * d + 1e-12);
        // The residual norm is exactly sqrt(2 (1 - σ_min(VᵀQ))).
        let smin = *small_svd(&v.tr_matmul(&q)).unwrap().sigma.last().unwrap();
        prop_assert!((resid - (2.0 * (1.0 - smin.min(1.0))).sqrt()).abs() <= 1e-7);
    }
}

/// Draws `(V, D, P)` with `sign(d_i) = sign(p_i)` and `|d_i| <= |p_i|`.
fn diagonal_pair(g: &mut rand_chacha::ChaCha8Rng) -> (Mat, Vec<f64>, Vec<f64>) {
    let n = g.random_range(2..30);
    let r = g.random_range(1..n);
    let v = orthonormal(g, n, r);
    let p: Vec<f64> = (0..r).map(|_| g.random::<f64>() * 4.0 - 2.0).collect();
    let d: Vec<f64> = p.iter().map(|x| x * g.random::<f64>().max(1e-3)).collect();
    (v, d, p)
}

#[test]
fn diagonal_domination_on_random_instances() {
    let mut g = rng(0x5EED);
    let mut worst = 0.0f64;
    for _ in 0..400 {
        let (v, d, p) = diagonal_pair(&mut g);
        worst = worst.max(inf_norm_of_vdvt(&v, &d) / inf_norm_of_vdvt(&v, &p));
    }
    assert!(worst <= 1.0 + 1e-12, "worst ratio {worst}");
}

#[test]
fn diagonal_domination_fails_in_general() {
    // V spans e1 and (e2 + e3)/sqrt(2) rotated by 45 degrees. P = I gives the
    // projector, D keeps only the first direction.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = Mat::from_row_slice(3, 2, &[s, s, -0.5, 0.5, -0.5, 0.5]);
    assert!(v.orthonormality_defect() < 1e-15);
    let d = [1.0, 1e-9];
    let p = [1.0, 1.0];
    let ratio = inf_norm_of_vdvt(&v, &d) / inf_norm_of_vdvt(&v, &p);
    assert!(ratio > 1.2, "ratio {ratio}");
}
