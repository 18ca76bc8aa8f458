//! A fast invariant suite over the compiled-in benchmark mixtures.

use mixbound::bounds::entropy_bounds_detailed;
use mixbound::families::FamilyTag;
use mixbound::integrals::{bregman, kl3_truncated, truncated_kl_scaled};
use mixbound::montecarlo::mc_kl_repeated;
use mixbound::oracle::{entropy_quadrature, kl_quadrature, random_component, random_range};
use mixbound::rng::{UniformSource, Xoshiro256StarStar};
use mixbound::{kl_bounds, presets, BoundOptions, ComponentParams, Mixture64};

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn preset_kl_contains_truth() -> Result<(), String> {
    for (name, m, mp) in presets::kl_pairs::<f64>() {
        for (x, y, dir) in [(&m, &mp, "forward"), (&mp, &m, "reverse")] {
            let b = kl_bounds(x, y).map_err(|e| e.to_string())?;
            let t = kl_quadrature(x, y, 1e-10).map_err(|e| e.to_string())?;
            for i in [b.ce, b.ratio, b.adaptive] {
                ensure(i.lower <= t.value + t.error_bound && t.value - t.error_bound <= i.upper, || {
                    format!("{name} {dir}: [{}, {}] misses {}", i.lower, i.upper, t.value)
                })?;
            }
            ensure(
                b.adaptive.lower >= b.combinatorial.lower - 1e-12 && b.adaptive.upper <= b.combinatorial.upper + 1e-12,
                || format!("{name} {dir}: adaptive interval not nested"),
            )?;
        }
    }
    Ok(())
}

fn identical_pairs_contain_zero() -> Result<(), String> {
    for (name, m, _) in presets::kl_pairs::<f64>() {
        let b = kl_bounds(&m, &m).map_err(|e| e.to_string())?;
        ensure(b.adaptive.contains(0.0) && b.combinatorial.contains(0.0), || format!("{name}: 0 excluded"))?;
    }
    Ok(())
}

fn single_components_collapse() -> Result<(), String> {
    let cases = [
        (ComponentParams::gaussian(0.0, 1.0), ComponentParams::gaussian(1.0, 1.0), 0.5),
        (ComponentParams::exponential(1.0), ComponentParams::exponential(2.0), 1.0 - std::f64::consts::LN_2),
    ];
    for (p, q, kl) in cases {
        let (p, q) = (p.map_err(|e| e.to_string())?, q.map_err(|e| e.to_string())?);
        let b = kl_bounds(&Mixture64::single(p).unwrap(), &Mixture64::single(q).unwrap()).map_err(|e| e.to_string())?;
        ensure(b.adaptive.width() <= 1e-9 && (b.adaptive.midpoint() - kl).abs() <= 1e-9, || {
            format!("{p} vs {q}: [{}, {}]", b.adaptive.lower, b.adaptive.upper)
        })?;
    }
    Ok(())
}

fn entropy_contains_truth() -> Result<(), String> {
    for (name, m) in presets::entropy_mixtures::<f64>() {
        let e = entropy_bounds_detailed(&m, &BoundOptions::default()).map_err(|e| e.to_string())?;
        let t = entropy_quadrature(&m, 1e-10).map_err(|e| e.to_string())?;
        let b = e.adaptive;
        ensure(b.lower <= t.value + t.error_bound && t.value - t.error_bound <= b.upper, || {
            format!("{name}: [{}, {}] misses {}", b.lower, b.upper, t.value)
        })?;
        ensure(b.lower <= b.upper.min(e.meub) + 1e-12, || format!("{name}: lower above MEUB"))?;
    }
    Ok(())
}

fn truncated_identities() -> Result<(), String> {
    let mut rng = Xoshiro256StarStar::seed_from_u64(5);
    let families = [FamilyTag::Exponential, FamilyTag::Rayleigh, FamilyTag::Gaussian, FamilyTag::Gamma];
    for i in 0..200 {
        let f = families[i % 4];
        let p1 = random_component(&mut rng, f);
        let same_shape = |p: ComponentParams<f64>| match (p1, p) {
            (ComponentParams::Gamma { shape, .. }, ComponentParams::Gamma { scale, .. }) => {
                ComponentParams::gamma(shape, scale).unwrap()
            }
            _ => p,
        };
        let p2 = same_shape(random_component(&mut rng, f));
        let p3 = same_shape(random_component(&mut rng, f));
        let (w1, w2, w3) = (rng.next_open01(), rng.next_open01(), rng.next_open01());
        let (a, b) = random_range(&mut rng, &p1);
        let (n1, n2, n3) = (p1.to_natural(), p2.to_natural(), p3.to_natural());
        let e = |r: mixbound::Result<f64>| r.map_err(|e| e.to_string());
        let k = e(kl3_truncated(w1, &n1, w2, &n2, w3, &n3, a, b))?;
        let d = e(truncated_kl_scaled(w1, &n1, w3, &n3, a, b))? - e(truncated_kl_scaled(w1, &n1, w2, &n2, a, b))?;
        ensure((k - d).abs() <= 1e-9, || format!("{p1}, {p2}, {p3} on [{a}, {b}]: {k} vs {d}"))?;
        let bf = e(bregman(&n1.family, &n2.theta, &n1.theta))?;
        ensure(bf >= 0.0, || format!("bregman {bf} < 0"))?;
    }
    Ok(())
}

fn mc_sandwich() -> Result<(), String> {
    for (name, m, mp) in presets::kl_pairs::<f64>() {
        for (x, y, dir) in [(&m, &mp, "forward"), (&mp, &m, "reverse")] {
            let b = kl_bounds(x, y).map_err(|e| e.to_string())?.combinatorial;
            let e = mc_kl_repeated(x, y, 10_000, 10, 42).map_err(|e| e.to_string())?;
            let se = e.standard_error();
            ensure(e.mean >= b.lower - 3.0 * se && e.mean <= b.upper + 3.0 * se, || {
                format!("{name} {dir}: MC {} ± {se} outside [{}, {}]", e.mean, b.lower, b.upper)
            })?;
        }
    }
    Ok(())
}

/// Runs every check.
pub fn run() -> Vec<Check> {
    type Entry = (&'static str, fn() -> Result<(), String>);
    let checks: [Entry; 6] = [
        ("benchmark KL bounds contain the quadrature value", preset_kl_contains_truth),
        ("identical mixtures contain zero", identical_pairs_contain_zero),
        ("single components collapse to the closed form", single_components_collapse),
        ("entropy bounds contain the quadrature value", entropy_contains_truth),
        ("truncated KL identities and Bregman nonnegativity", truncated_identities),
        ("MC estimates fall inside the combinatorial bounds", mc_sandwich),
    ];
    checks
        .into_iter()
        .map(|(name, f)| Check { name, outcome: f() })
        .collect()
}
