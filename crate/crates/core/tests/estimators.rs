//! Monte Carlo oracles for the estimators, checked against closed forms
//! computed independently of the library.

use hdsim_core::estimate::{
    count_inversions, empirical_sign_prob, ks_critical_1pct, ks_statistic, local_time_zero, median,
    negative_moment, normal_cdf, occupation_time, McSummary,
};
use hdsim_core::exact::{benchmark_path, plateau_path};
use hdsim_core::integrate::{euler_maruyama_ito, ito_sum, SchemeConfig};
use hdsim_core::noise::{make_partition, sample_bm_pair, sample_skew_bm, Path};
use hdsim_core::{ModelParams, SkewMethod, SkewParams};

/// `int |z|^a phi(z) dz` by the midpoint rule after `z = s^2`, which removes the
/// singularity at 0 for `a > -1`.
fn gaussian_abs_moment_by_quadrature(a: f64) -> f64 {
    let n = 400_000;
    let s_max: f64 = 10.0f64.sqrt() * 1.5;
    let h = s_max / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let s = (i as f64 + 0.5) * h;
        let z = s * s;
        // dz = 2 s ds; factor 2 for the symmetric half-line.
        acc += z.powf(a) * (-0.5 * z * z).exp() * 2.0 * s * h;
    }
    2.0 * acc / (2.0 * std::f64::consts::PI).sqrt()
}

#[test]
fn quadrature_oracle_is_sane() {
    assert!((gaussian_abs_moment_by_quadrature(-0.5) - 1.720_1).abs() < 1e-3);
    // a -> 0 gives total mass one.
    assert!((gaussian_abs_moment_by_quadrature(-1e-9) - 1.0).abs() < 1e-6);
}

#[test]
fn local_time_matches_tanaka() {
    let p = make_partition(1.0, 16).unwrap();
    let delta = 0.1 * p.mesh().sqrt();
    let lt: Vec<f64> =
        (0..10_000).map(|i| local_time_zero(&sample_bm_pair(&p, 101, i).b, delta).unwrap()).collect();
    let s = McSummary::from_samples(&lt).unwrap();
    let target = (2.0 / std::f64::consts::PI).sqrt();
    assert!(s.within(target, 3.0), "{s:?} vs {target}");
}

#[test]
fn skew_local_time_matches_reflected_bm() {
    let p = make_partition(1.0, 12).unwrap();
    let delta = 3.0 * p.mesh().sqrt();
    let sp = SkewParams::new(0.5, 0.0).unwrap();
    let n = 10_000;
    let skew: Vec<f64> = (0..n)
        .map(|i| {
            let b = sample_skew_bm(&p, sp, 7, i, SkewMethod::ExcursionFlip).unwrap();
            local_time_zero(&b.map(f64::abs), delta).unwrap()
        })
        .collect();
    let plain: Vec<f64> = (0..n)
        .map(|i| local_time_zero(&sample_bm_pair(&p, 8, i).b.map(f64::abs), delta).unwrap())
        .collect();
    let (a, b) = (McSummary::from_samples(&skew).unwrap(), McSummary::from_samples(&plain).unwrap());
    let se = a.std_error.hypot(b.std_error);
    assert!((a.mean - b.mean).abs() <= 3.0 * se, "{a:?} vs {b:?}");
}

#[test]
fn benchmark_sign_is_symmetric() {
    let p = make_partition(1.0, 8).unwrap();
    let terminal: Vec<f64> = (0..10_000)
        .map(|i| benchmark_path(&sample_bm_pair(&p, 3, i).b, 0.0, 0.5).unwrap().terminal())
        .collect();
    let s = empirical_sign_prob(&terminal).unwrap();
    assert!((s.mean - 0.5).abs() <= 0.015, "{s:?}");
}

#[test]
fn normal_samples_pass_ks() {
    let p = make_partition(1.0, 0).unwrap();
    let mut passes = 0;
    for seed in 0..100 {
        let samples: Vec<f64> = (0..10_000).map(|i| sample_bm_pair(&p, seed, i).b.terminal()).collect();
        if ks_statistic(&samples, normal_cdf(0.0, 1.0)).unwrap() < ks_critical_1pct(samples.len()) {
            passes += 1;
        }
    }
    assert!(passes >= 97, "{passes} of 100 seeds passed");
}

#[test]
fn negative_moment_of_standard_normal() {
    let p = make_partition(1.0, 0).unwrap();
    let terminal: Vec<f64> = (0..10_000).map(|i| sample_bm_pair(&p, 12, i).b.terminal()).collect();
    let s = negative_moment(&terminal, -0.5).unwrap();
    let oracle = gaussian_abs_moment_by_quadrature(-0.5);
    assert!(s.within(oracle, 3.0), "{s:?} vs {oracle}");
}

#[test]
fn benchmark_occupation_shrinks_with_band() {
    let p = make_partition(1.0, 12).unwrap();
    let paths: Vec<Path> =
        (0..1000).map(|i| benchmark_path(&sample_bm_pair(&p, 14, i).b, 0.0, 0.5).unwrap()).collect();
    let means: Vec<f64> = [0.1, 0.05, 0.01]
        .iter()
        .map(|&d| paths.iter().map(|x| occupation_time(x, d).unwrap()).sum::<f64>() / paths.len() as f64)
        .collect();
    assert_eq!(count_inversions(&means), 0, "{means:?}");
    // Coupling bound: |X| <= d iff |B| <= F_0(d).
    for (&d, &m) in [0.1f64, 0.05, 0.01].iter().zip(&means) {
        let bm: f64 = (0..1000)
            .map(|i| occupation_time(&sample_bm_pair(&p, 14, i).b, 2.0 * d.sqrt()).unwrap())
            .sum::<f64>()
            / 1000.0;
        assert!(m <= 2.0 * bm);
    }
}

#[test]
fn plateau_occupation_is_positive() {
    let p = make_partition(1.0, 12).unwrap();
    let occ: f64 = (0..1000)
        .map(|i| occupation_time(&plateau_path(&sample_bm_pair(&p, 15, i).b, 0.5, 0.5, 0.5).unwrap(), 1e-12).unwrap())
        .sum::<f64>()
        / 1000.0;
    assert!(occ > 0.1, "{occ}");
}

#[test]
fn ito_integral_of_bm() {
    let p = make_partition(1.0, 16).unwrap();
    let b = sample_bm_pair(&p, 19, 0).b;
    let v = ito_sum(&b, &b).unwrap().terminal();
    let bt = b.terminal();
    assert!((v - 0.5 * (bt * bt - 1.0)).abs() < 0.02);
    let ones = Path::constant(&p, 1.0);
    assert!((ito_sum(&ones, &b).unwrap().terminal() - bt).abs() < 1e-12);
}

#[test]
fn euler_refinement_is_self_consistent() {
    let mp = ModelParams::new(0.5, 0.5, 1.0).unwrap();
    let base = make_partition(1.0, 10).unwrap();
    let noise: Vec<_> = (0..100).map(|i| sample_bm_pair(&base, 27, i)).collect();
    let levels = [10u32, 12, 14, 16];
    let terminals: Vec<Vec<f64>> = noise
        .iter()
        .map(|np| {
            levels
                .iter()
                .map(|&l| {
                    let f = np.refine(&make_partition(1.0, l).unwrap()).unwrap();
                    euler_maruyama_ito(&f, 1.0, &mp, &SchemeConfig::euler()).unwrap().terminal()
                })
                .collect()
        })
        .collect();
    let medians: Vec<f64> = (1..levels.len())
        .map(|j| median(&terminals.iter().map(|t| (t[j] - t[j - 1]).abs()).collect::<Vec<_>>()))
        .collect();
    assert!(count_inversions(&medians) <= 1, "{medians:?}");
}

#[test]
fn drift_flow_at_level_14() {
    let p = make_partition(1.0, 14).unwrap();
    let zero = Path::constant(&p, 0.0);
    let np = hdsim_core::NoisePair { b: zero.clone(), w: zero, seed: 0, path_index: 0 };
    let mp = ModelParams::new(0.5, 0.0, 1.0).unwrap();
    let y = euler_maruyama_ito(&np, 1.0, &mp, &SchemeConfig::euler()).unwrap();
    assert!((y.terminal() - 1.25).abs() < 1e-3);
}
