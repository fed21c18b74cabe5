//! Statistical behaviour of the weighted Monte Carlo estimators.

use detmart::exact::to_f64;
use detmart::finite_kernel::{FiniteKernel, TimeSlice};
use detmart::martingale::SiteConfiguration;
use detmart::mc::sample_weighted;

fn cfg(v: &[i64]) -> SiteConfiguration {
    SiteConfiguration::new(v.to_vec()).unwrap()
}

#[test]
fn mean_weight_is_one_for_almost_all_seeds() {
    let xi = cfg(&[0, 2, 4]);
    let misses = (0..100u64)
        .filter(|&seed| {
            let (m, se) = sample_weighted(&xi, 6, 2_000, seed, 4).mean_weight();
            (m - 1.0).abs() >= 3.0 * se
        })
        .count();
    assert!(misses <= 2, "{misses} of 100 seeds outside 3 standard errors");
}

#[test]
fn correlation_estimates_agree_with_determinants() {
    let xi = cfg(&[0, 2]);
    let ens = sample_weighted(&xi, 1, 100_000, 11, 8);
    let (est, se) = ens.estimate_correlation(&[TimeSlice::new(1, vec![1])]).unwrap();
    assert!((est - 0.5).abs() < 3.0 * se, "{est} ± {se}");

    let xi = cfg(&[0, 2, 4]);
    let q = [TimeSlice::new(2, vec![0, 4])];
    let exact = to_f64(&FiniteKernel::new(xi.clone()).correlation_exact(&q));
    let ens = sample_weighted(&xi, 4, 100_000, 12, 8);
    let (est, se) = ens.estimate_correlation(&q).unwrap();
    assert!((est - exact).abs() < 3.0 * se, "{est} ± {se} vs {exact}");
}

#[test]
fn error_shrinks_like_inverse_root_n() {
    let xi = cfg(&[0, 2]);
    let q = [TimeSlice::new(1, vec![1])];
    for n in [1_000usize, 10_000, 100_000] {
        let (est, se) = sample_weighted(&xi, 3, n, 99, 8).estimate_correlation(&q).unwrap();
        let sigma = se * (n as f64).sqrt();
        assert!((est - 0.5).abs() * (n as f64).sqrt() <= 4.0 * sigma, "n={n}");
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let xi = cfg(&[0, 2, 6]);
    let a = sample_weighted(&xi, 5, 3_000, 42, 6);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| sample_weighted(&xi, 5, 3_000, 42, 6));
    assert_eq!(a, b);
}
