use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cocycles::TrigMode;
use crate::precision::{AngleSpec, FixedReal};

/// A decimal or `p/q` literal kept in its textual form, so configs digest
/// the same way they were written.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real(String);

impl Real {
    pub fn new(s: impl Into<String>) -> Result<Self, String> {
        let s = s.into();
        s.parse::<FixedReal>().map_err(|e| e.to_string())?;
        Ok(Real(s))
    }

    pub fn value(&self) -> FixedReal {
        self.0.parse().expect("validated at construction")
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Real {
    fn from(s: &str) -> Self {
        Real::new(s).expect("valid literal")
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

struct RealVisitor;

impl Visitor<'_> for RealVisitor {
    type Value = Real;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number or a numeric string")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
        Real::new(v).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
        Real::new(v.to_string()).map_err(E::custom)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
        Real::new(v.to_string()).map_err(E::custom)
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
        Real::new(v.to_string()).map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Real, D::Error> {
        d.deserialize_any(RealVisitor)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    Rotation { alpha: AngleSpec },
    Iet { lengths: Vec<Real>, permutation: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoofConfig {
    pub starts: Vec<Real>,
    pub heights: Vec<Real>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossing_budget: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Rotation { alpha: AngleSpec },
    Iet { lengths: Vec<Real>, permutation: Vec<usize> },
    SpecialFlow { base: MapConfig, roof: RoofConfig },
    TorusWinding { gamma: AngleSpec },
    Skew { base: MapConfig, fiber: MapConfig },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandConfig {
    pub from: Real,
    pub value: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseCellConfig {
    pub start: Real,
    pub bands: Vec<BandConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CocycleConfig {
    /// Integer step function on the base.
    Step { breakpoints: Vec<Real>, values: Vec<i64> },
    /// Phase function constant on rectangles.
    Phase { cells: Vec<PhaseCellConfig> },
    /// Phase function depending on the base coordinate only.
    PhaseStep { breakpoints: Vec<Real>, values: Vec<Real> },
    Trig { modes: Vec<TrigMode> },
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub a: Real,
    pub b: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub x: Real,
    pub y: Real,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    pub lo: Real,
    pub hi: Real,
    /// `[h_lo, h_hi]`; full height when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<[Real; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RectConfig {
    pub x: [Real; 2],
    pub y: [Real; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DetectorConfig {
    ZeroSums {
        n: u64,
        start: Real,
    },
    NearReturns {
        n: u64,
        start: Real,
        eps: Real,
    },
    JointZeroReturns {
        n: u64,
        start: Real,
        eps: Real,
    },
    SigmaProfile {
        t_max: Real,
        start: StateConfig,
    },
    FlowZeroSetReturns {
        t_max: Real,
        start: StateConfig,
        target: Vec<PieceConfig>,
    },
    FlowZeroNearReturns {
        t_max: Real,
        start: StateConfig,
        eps: Real,
    },
    WindingZeroNearReturns {
        t_max: f64,
        start: PairConfig,
        eps: Real,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<f64>,
    },
    Weiss {
        n_list: Vec<u64>,
        eps: f64,
    },
    Induced {
        target: Vec<PieceConfig>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        budget: Option<u64>,
        #[serde(default)]
        write_samples: bool,
    },
    SkewStats {
        n: u64,
        start: PairConfig,
        observables: Vec<RectConfig>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

fn default_formats() -> Vec<OutputFormat> {
    vec![OutputFormat::Csv, OutputFormat::Json]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Relative to the output root; the experiment name when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: None,
            formats: default_formats(),
        }
    }
}

/// A complete experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub system: SystemConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<CocycleConfig>,
    pub detector: DetectorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling: Option<SamplingConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    /// Compact JSON with sorted keys; the bytes the digest is taken over.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let value = serde_json::to_value(self).expect("config serializes");
        serde_json::to_vec(&value).expect("value serializes")
    }

    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(self.canonical_bytes()))
    }

    pub fn output_directory(&self) -> &str {
        self.output.directory.as_deref().unwrap_or(&self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ZERO_SUMS: &str = r#"{
        "name": "half",
        "system": {"kind": "rotation", "alpha": "rational:1/2"},
        "cocycle": {"kind": "step", "breakpoints": ["0", 0.5], "values": [1, -1]},
        "detector": {"kind": "zero_sums", "n": 10, "start": 0}
    }"#;

    #[test]
    fn parses_and_canonicalizes() {
        let c = ExperimentConfig::from_json(ZERO_SUMS).unwrap();
        assert_eq!(c.output.formats, [OutputFormat::Csv, OutputFormat::Json]);
        let text = String::from_utf8(c.canonical_bytes()).unwrap();
        assert!(text.starts_with(r#"{"cocycle":{"breakpoints":["0","0.5"],"kind":"step""#), "{text}");
        let again = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.digest(), c.digest());
        assert_eq!(c.digest().len(), 64);
    }

    #[test]
    fn rejects_malformed() {
        let neg = ZERO_SUMS.replace("\"n\": 10", "\"n\": -10");
        assert!(ExperimentConfig::from_json(&neg).is_err());
        let unknown = ZERO_SUMS.replace("zero_sums", "zero_summs");
        assert!(ExperimentConfig::from_json(&unknown).is_err());
        let bad_real = ZERO_SUMS.replace("\"0\", 0.5", "\"zero\", 0.5");
        assert!(ExperimentConfig::from_json(&bad_real).is_err());
        let extra = ZERO_SUMS.replace("\"name\"", "\"colour\": 1, \"name\"");
        assert!(ExperimentConfig::from_json(&extra).is_err());
    }
}
