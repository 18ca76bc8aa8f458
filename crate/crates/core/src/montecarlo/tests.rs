use super::*;
use crate::bounds::entropy_bounds;
use crate::families::ComponentParams;
use crate::presets;

fn gauss(m: f64, s: f64) -> Mixture<f64> {
    Mixture::single(ComponentParams::gaussian(m, s).unwrap()).unwrap()
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn sampling_is_deterministic() {
    let m = presets::gmm1::<f64>();
    let a = sample_mixture(&m, 5, 9);
    assert_eq!(a, sample_mixture(&m, 5, 9));
    assert_ne!(a, sample_mixture(&m, 5, 10));
}

#[test]
fn single_component_sampler_passes_ks() {
    let n = 100_000;
    let critical = 1.949_5 / (n as f64).sqrt();
    for p in [
        ComponentParams::exponential(0.7f64).unwrap(),
        ComponentParams::rayleigh(2.0).unwrap(),
        ComponentParams::gaussian(1.0, 3.0).unwrap(),
        ComponentParams::gamma(0.6, 2.0).unwrap(),
    ] {
        let m = Mixture::single(p).unwrap();
        let d = ks_statistic(sample_mixture(&m, n, 5), |x| p.cdf(x));
        assert!(d < critical, "{p}: D = {d}");
    }
}

#[test]
fn mixture_sampler_passes_ks() {
    let n = 100_000;
    let critical = 1.949_5 / (n as f64).sqrt();
    for m in [presets::gmm2::<f64>(), presets::gamm1(), presets::rmm2()] {
        let d = ks_statistic(sample_mixture(&m, n, 11), |x| m.cdf(x));
        assert!(d < critical, "D = {d}");
    }
}

#[test]
fn exponential_mixture_sample_mean() {
    let m = presets::emm1::<f64>();
    let xs = sample_mixture(&m, 1_000_000, 42);
    let (mean, sd) = mean_sd(&xs);
    let se = sd / 1000.0;
    assert!((m.mean() - 13.0 / 3.0).abs() < 1e-12);
    assert!((mean - 13.0 / 3.0).abs() < 4.0 * se, "{mean} ± {se}");
}

#[test]
fn evaluator_matches_mixture_log_density() {
    for (_, m, mp) in presets::kl_pairs::<f64>() {
        for x in [&m, &mp] {
            let e = LogDensityEval::new(x);
            let mut buf = Vec::new();
            for t in sample_mixture(x, 500, 3) {
                let a = e.eval(t, &mut buf);
                let b = x.ln_density(t);
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b} at {t}");
            }
        }
    }
}

#[test]
fn identical_mixtures_give_exact_zero() {
    let m = presets::gmm1::<f64>();
    for s in [1, 10, 1000] {
        let e = mc_kl(&m, &m, s, 4).unwrap();
        assert_eq!(e.mean, 0.0);
        assert_eq!(e.stddev, 0.0);
    }
    let r = mc_kl_repeated(&m, &m.clone(), 100, 5, 1).unwrap();
    assert_eq!((r.mean, r.stddev), (0.0, 0.0));
}

#[test]
fn gaussian_kl_estimate() {
    let e = mc_kl(&gauss(0.0, 1.0), &gauss(1.0, 1.0), 1_000_000, 42).unwrap();
    assert!((e.mean - 0.5).abs() <= 3.0 * e.standard_error(), "{} ± {}", e.mean, e.standard_error());
    assert_eq!((e.sample_size, e.repetitions, e.seed), (1_000_000, 1, 42));
}

#[test]
fn entropy_estimates() {
    let h = |s: f64| 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * s * s).ln();
    for s in [1.0, 0.1] {
        let e = mc_entropy(&gauss(0.0, s), 1_000_000, 8).unwrap();
        assert!((e.mean - h(s)).abs() <= 3.0 * e.standard_error(), "{} vs {}", e.mean, h(s));
    }
    let sym = presets::gaussian_mixture::<f64>(&[(-1.0, 1.0, 0.5), (1.0, 1.0, 0.5)]);
    let e = mc_entropy(&sym, 1_000_000, 8).unwrap();
    let b = entropy_bounds(&sym).unwrap();
    let se = e.standard_error();
    assert!(e.mean >= b.lower - 3.0 * se && e.mean <= b.upper + 3.0 * se);
}

#[test]
fn estimates_are_reproducible() {
    let (m, mp) = (presets::gamm1::<f64>(), presets::gamm2());
    assert_eq!(mc_kl(&m, &mp, 1000, 3).unwrap(), mc_kl(&m, &mp, 1000, 3).unwrap());
    assert_eq!(
        mc_kl_repeated(&m, &mp, 100, 8, 3).unwrap(),
        mc_kl_repeated(&m, &mp, 100, 8, 3).unwrap()
    );
}

#[test]
fn constant_estimator() {
    let e = repetition_stats(|_| Ok(2.5f64), 10, 7, 0).unwrap();
    assert_eq!((e.mean, e.stddev, e.repetitions), (2.5, 0.0, 7));
}

#[test]
fn repetition_stats_uses_derived_seeds() {
    let e = repetition_stats(|s| Ok(s as f64), 1, 3, 17).unwrap();
    let want = (0..3).map(|i| derive_seed(17, i) as f64).sum::<f64>() / 3.0;
    assert_eq!(e.mean, want);
}

#[test]
fn stddev_scales_with_sample_size() {
    let (m, mp) = (presets::gmm1::<f64>(), presets::gmm2());
    let small = mc_kl_repeated(&m, &mp, 100, 100, 1).unwrap();
    let large = mc_kl_repeated(&m, &mp, 10_000, 100, 1).unwrap();
    let ratio = small.stddev / large.stddev;
    assert!((5.0..20.0).contains(&ratio), "ratio {ratio}");
}

#[test]
fn argument_errors() {
    let m = presets::gmm1::<f64>();
    assert!(matches!(mc_kl(&m, &m, 0, 1), Err(Error::Argument(_))));
    assert!(matches!(repetition_stats(|_| Ok(1.0f64), 1, 1, 0), Err(Error::Argument(_))));
    assert!(matches!(mc_kl(&m, &presets::emm1(), 10, 1), Err(Error::FamilyMismatch(..))));
}

#[test]
fn estimator_errors_propagate() {
    let r = repetition_stats::<f64, _>(|_| Err(Error::NonFiniteSample { x: 0.0 }), 1, 3, 0);
    assert!(matches!(r, Err(Error::NonFiniteSample { .. })));
}
