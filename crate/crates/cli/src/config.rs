//! Experiment configuration: JSON documents and compiled-in presets.
//!
//! A mixture is written as
//!
//! ```json
//! {"family": "gaussian", "components": [{"weight": 0.5, "mean": 0, "stddev": 1}]}
//! ```
//!
//! with component parameters `rate` (exponential), `scale` (rayleigh),
//! `mean`/`stddev` (gaussian) or `shape`/`scale` (gamma). An experiment
//! document lists named pairs and/or single mixtures:
//!
//! ```json
//! {
//!   "pairs": [{"name": "demo", "m": {...}, "m_prime": {...}}],
//!   "mixtures": [{"name": "h", "mixture": {...}}],
//!   "sample_sizes": [10, 100, 1000, 10000],
//!   "repetitions": 100,
//!   "seed": 42,
//!   "quad_tol": 1e-10,
//!   "bounds": ["CELB", "CEUB", "CEALB", "CEAUB", "MEUB"]
//! }
//! ```
//!
//! A bare mixture document is accepted as a one-mixture entropy experiment.

use std::fmt;
use std::str::FromStr;

use mixbound::{presets, ComponentParams, Error, FamilyTag, Mixture64, Weighted64};
use serde_json::{Map, Value};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NamedPair {
    pub name: String,
    pub m: Mixture64,
    pub m_prime: Mixture64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedMixture {
    pub name: String,
    pub mixture: Mixture64,
}

/// Bound quantities a run can report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoundName {
    Celb,
    Ceub,
    Cealb,
    Ceaub,
    Meub,
}

impl BoundName {
    pub const ALL: [BoundName; 5] = [Self::Celb, Self::Ceub, Self::Cealb, Self::Ceaub, Self::Meub];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Celb => "CELB",
            Self::Ceub => "CEUB",
            Self::Cealb => "CEALB",
            Self::Ceaub => "CEAUB",
            Self::Meub => "MEUB",
        }
    }
}

impl fmt::Display for BoundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|b| b.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown bound {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub pairs: Vec<NamedPair>,
    pub mixtures: Vec<NamedMixture>,
    pub sample_sizes: Vec<usize>,
    pub repetitions: usize,
    pub base_seed: u64,
    pub quad_tol: f64,
    pub bounds: Vec<BoundName>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            pairs: Vec::new(),
            mixtures: Vec::new(),
            sample_sizes: vec![10, 100, 1000, 10_000],
            repetitions: 100,
            base_seed: 42,
            quad_tol: 1e-10,
            bounds: BoundName::ALL.to_vec(),
        }
    }
}

impl ExperimentConfig {
    /// Compiled-in experiments. `paper-s4` holds the four KL benchmark pairs
    /// and the six entropy benchmark mixtures.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper-s4" => Ok(Self {
                pairs: presets::kl_pairs()
                    .into_iter()
                    .map(|(name, m, m_prime)| NamedPair {
                        name: name.to_string(),
                        m,
                        m_prime,
                    })
                    .collect(),
                mixtures: presets::entropy_mixtures()
                    .into_iter()
                    .map(|(name, mixture)| NamedMixture {
                        name: name.to_string(),
                        mixture,
                    })
                    .collect(),
                ..Self::default()
            }),
            _ => Err(CliError::UnknownPreset(name.to_string())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs.is_empty() && self.mixtures.is_empty() {
            return Err(CliError::config("pairs", "no pairs or mixtures given"));
        }
        if self.sample_sizes.is_empty() {
            return Err(CliError::config("sample_sizes", "must not be empty"));
        }
        if self.sample_sizes[0] == 0 {
            return Err(CliError::config("sample_sizes[0]", "must be positive"));
        }
        for (i, w) in self.sample_sizes.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(CliError::config(
                    format!("sample_sizes[{}]", i + 1),
                    "sample sizes must be strictly increasing",
                ));
            }
        }
        if self.repetitions == 0 {
            return Err(CliError::config("repetitions", "must be positive"));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol.is_finite()) {
            return Err(CliError::config("quad_tol", "must be finite and positive"));
        }
        for (i, p) in self.pairs.iter().enumerate() {
            if p.m.family() != p.m_prime.family() {
                return Err(CliError::config(
                    format!("pairs[{i}].m_prime.family"),
                    format!("{} differs from {}", p.m_prime.family(), p.m.family()),
                ));
            }
        }
        Ok(())
    }

    pub fn wants(&self, b: BoundName) -> bool {
        self.bounds.contains(&b)
    }
}

/// Parses and validates an experiment (or bare mixture) JSON document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::config("document", e.to_string()))?;
    let obj = v.as_object().ok_or_else(|| CliError::config("document", "expected a JSON object"))?;
    let mut cfg = ExperimentConfig::default();
    if obj.contains_key("family") || obj.contains_key("components") {
        cfg.mixtures.push(NamedMixture {
            name: "mixture".into(),
            mixture: parse_mixture(&v, "document")?,
        });
        cfg.validate()?;
        return Ok(cfg);
    }
    for (key, val) in obj {
        match key.as_str() {
            "pairs" => {
                for (i, p) in array(val, "pairs")?.iter().enumerate() {
                    let path = format!("pairs[{i}]");
                    let o = object(p, &path, &["name", "m", "m_prime"])?;
                    cfg.pairs.push(NamedPair {
                        name: name(o, &path)?,
                        m: parse_mixture(required(o, "m", &path)?, &format!("{path}.m"))?,
                        m_prime: parse_mixture(required(o, "m_prime", &path)?, &format!("{path}.m_prime"))?,
                    });
                }
            }
            "mixtures" => {
                for (i, p) in array(val, "mixtures")?.iter().enumerate() {
                    let path = format!("mixtures[{i}]");
                    let o = object(p, &path, &["name", "mixture"])?;
                    cfg.mixtures.push(NamedMixture {
                        name: name(o, &path)?,
                        mixture: parse_mixture(required(o, "mixture", &path)?, &format!("{path}.mixture"))?,
                    });
                }
            }
            "sample_sizes" => {
                cfg.sample_sizes = array(val, key)?
                    .iter()
                    .enumerate()
                    .map(|(i, s)| count(s, &format!("sample_sizes[{i}]")))
                    .collect::<Result<_>>()?;
            }
            "repetitions" => cfg.repetitions = count(val, key)?,
            "seed" => {
                cfg.base_seed = val
                    .as_u64()
                    .ok_or_else(|| CliError::config(key, "expected a non-negative integer"))?;
            }
            "quad_tol" => cfg.quad_tol = number(val, key)?,
            "bounds" => {
                let mut bs = Vec::new();
                for (i, b) in array(val, key)?.iter().enumerate() {
                    let path = format!("bounds[{i}]");
                    let s = b.as_str().ok_or_else(|| CliError::config(&path, "expected a string"))?;
                    bs.push(s.parse::<BoundName>().map_err(|e| CliError::config(&path, e))?);
                }
                bs.sort();
                bs.dedup();
                cfg.bounds = bs;
            }
            other => return Err(CliError::config(other, "unknown field")),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses one `{family, components}` mixture document.
pub fn parse_mixture(v: &Value, path: &str) -> Result<Mixture64> {
    let o = object(v, path, &["family", "components"])?;
    let family = family(required(o, "family", path)?, &format!("{path}.family"))?;
    let comps = array(required(o, "components", path)?, &format!("{path}.components"))?;
    if comps.is_empty() {
        return Err(CliError::config(format!("{path}.components"), "at least one component required"));
    }
    let mut out = Vec::with_capacity(comps.len());
    for (i, c) in comps.iter().enumerate() {
        let cp = format!("{path}.components[{i}]");
        let names: &[&str] = match family {
            FamilyTag::Exponential => &["weight", "family", "rate"],
            FamilyTag::Rayleigh => &["weight", "family", "scale"],
            FamilyTag::Gaussian => &["weight", "family", "mean", "stddev"],
            FamilyTag::Gamma => &["weight", "family", "shape", "scale"],
        };
        let co = object(c, &cp, names)?;
        if let Some(f) = co.get("family") {
            let own = self::family(f, &format!("{cp}.family"))?;
            if own != family {
                return Err(CliError::config(
                    format!("{cp}.family"),
                    format!("{own} component in a {family} mixture"),
                ));
            }
        }
        let num = |k: &str| number(required(co, k, &cp)?, &format!("{cp}.{k}"));
        let weight = num("weight")?;
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(CliError::config(format!("{cp}.weight"), format!("weight {weight} must be positive")));
        }
        let params = match family {
            FamilyTag::Exponential => ComponentParams::exponential(num("rate")?),
            FamilyTag::Rayleigh => ComponentParams::rayleigh(num("scale")?),
            FamilyTag::Gaussian => ComponentParams::gaussian(num("mean")?, num("stddev")?),
            FamilyTag::Gamma => ComponentParams::gamma(num("shape")?, num("scale")?),
        }
        .map_err(|e| match e {
            Error::InvalidParameter { name, .. } => CliError::config(format!("{cp}.{name}"), e.to_string()),
            other => CliError::config(&cp, other.to_string()),
        })?;
        out.push(Weighted64 { weight, params });
    }
    Mixture64::new(out).map_err(|e| {
        let field = match e {
            Error::WeightSum { .. } => format!("{path}.components[*].weight"),
            _ => path.to_string(),
        };
        CliError::config(field, e.to_string())
    })
}

fn family(v: &Value, path: &str) -> Result<FamilyTag> {
    let s = v.as_str().ok_or_else(|| CliError::config(path, "expected a string"))?;
    [FamilyTag::Exponential, FamilyTag::Rayleigh, FamilyTag::Gaussian, FamilyTag::Gamma]
        .into_iter()
        .find(|f| f.name().eq_ignore_ascii_case(s))
        .ok_or_else(|| CliError::config(path, format!("unknown family {s:?}")))
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let o = v.as_object().ok_or_else(|| CliError::config(path, "expected an object"))?;
    if let Some(k) = o.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::config(format!("{path}.{k}"), "unknown field"));
    }
    Ok(o)
}

fn required<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key).ok_or_else(|| CliError::config(format!("{path}.{key}"), "missing"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| CliError::config(path, "expected an array"))
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| CliError::config(path, "expected a number"))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| CliError::config(path, "expected a non-negative integer"))
}

fn name(o: &Map<String, Value>, path: &str) -> Result<String> {
    let n = required(o, "name", path)?
        .as_str()
        .ok_or_else(|| CliError::config(format!("{path}.name"), "expected a string"))?;
    if n.is_empty() || n.contains(|c: char| c == ',' || c == '/' || c == '\\' || c.is_control()) {
        return Err(CliError::config(format!("{path}.name"), "names must be non-empty without , / or \\"));
    }
    Ok(n.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(e: CliError) -> (String, String) {
        match e {
            CliError::Config { field, message } => (field, message),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn preset_holds_the_benchmark_pairs() {
        let cfg = ExperimentConfig::preset("paper-s4").unwrap();
        let names: Vec<_> = cfg.pairs.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["EMM", "RMM", "GMM", "GaMM"]);
        assert_eq!(cfg.pairs[2].m, presets::gmm1());
        assert_eq!(cfg.pairs[2].m_prime, presets::gmm2());
        assert_eq!((cfg.pairs[2].m.len(), cfg.pairs[2].m_prime.len()), (7, 9));
        assert_eq!(cfg.mixtures.len(), 6);
        assert_eq!(cfg.sample_sizes, [10, 100, 1000, 10_000]);
        assert_eq!(cfg.repetitions, 100);
        assert!(matches!(ExperimentConfig::preset("nope"), Err(CliError::UnknownPreset(_))));
    }

    #[test]
    fn single_component_mixture_document() {
        let cfg = parse_config(r#"{"family": "gaussian", "components": [{"weight": 1, "mean": 0, "stddev": 1}]}"#).unwrap();
        assert_eq!(cfg.mixtures.len(), 1);
        assert_eq!(cfg.mixtures[0].mixture.len(), 1);
    }

    #[test]
    fn full_experiment_document() {
        let text = r#"{
            "pairs": [{"name": "e", "m": {"family": "exponential", "components": [{"weight": 1, "rate": 1}]},
                       "m_prime": {"family": "exponential", "components": [{"weight": 0.5, "rate": 2}, {"weight": 0.5, "rate": 3}]}}],
            "sample_sizes": [5, 50], "repetitions": 3, "seed": 7, "quad_tol": 1e-9, "bounds": ["ceub", "CELB"]
        }"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.pairs[0].m_prime.len(), 2);
        assert_eq!(cfg.sample_sizes, [5, 50]);
        assert_eq!((cfg.repetitions, cfg.base_seed, cfg.quad_tol), (3, 7, 1e-9));
        assert_eq!(cfg.bounds, [BoundName::Celb, BoundName::Ceub]);
    }

    #[test]
    fn weight_sum_is_reported() {
        let text = r#"{"family": "gaussian", "components": [{"weight": 0.5, "mean": 0, "stddev": 1}, {"weight": 0.6, "mean": 1, "stddev": 1}]}"#;
        let (field, message) = field_of(parse_config(text).unwrap_err());
        assert!(field.contains("weight"), "{field}");
        assert!(message.contains("1.1"), "{message}");
    }

    #[test]
    fn offending_fields_are_named() {
        let cases = [
            (r#"{"family": "gaussian", "components": [{"weight": 1, "mean": 0, "stddev": -1}]}"#, "document.components[0].stddev"),
            (r#"{"family": "gamma", "components": [{"weight": 1, "shape": 2}]}"#, "document.components[0].scale"),
            (r#"{"family": "poisson", "components": []}"#, "document.family"),
            (r#"{"family": "rayleigh", "components": [{"weight": 0, "scale": 1}]}"#, "document.components[0].weight"),
            (
                r#"{"family": "gaussian", "components": [{"weight": 1, "family": "gamma", "mean": 0, "stddev": 1}]}"#,
                "document.components[0].family",
            ),
            (r#"{"family": "exponential", "components": [{"weight": 1, "rate": 1, "mean": 2}]}"#, "document.components[0].mean"),
            (r#"{"pairs": [], "sample_sizes": [10, 10]}"#, "pairs"),
            (r#"{"unexpected": 1}"#, "unexpected"),
        ];
        for (text, want) in cases {
            let (field, _) = field_of(parse_config(text).unwrap_err());
            assert_eq!(field, want, "{text}");
        }
        assert!(matches!(parse_config("not json"), Err(CliError::Config { .. })));
    }

    #[test]
    fn pairs_must_share_a_family() {
        let text = r#"{"pairs": [{"name": "x",
            "m": {"family": "exponential", "components": [{"weight": 1, "rate": 1}]},
            "m_prime": {"family": "rayleigh", "components": [{"weight": 1, "scale": 1}]}}]}"#;
        let (field, _) = field_of(parse_config(text).unwrap_err());
        assert_eq!(field, "pairs[0].m_prime.family");
    }

    #[test]
    fn sample_sizes_strictly_increase() {
        let mut cfg = ExperimentConfig::preset("paper-s4").unwrap();
        cfg.sample_sizes = vec![10, 100, 100];
        assert_eq!(field_of(cfg.validate().unwrap_err()).0, "sample_sizes[2]");
    }
}
