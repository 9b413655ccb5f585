use super::config::ExperimentConfig;

/// A named, ready-made experiment.
#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub config: ExperimentConfig,
}

const CATALOG: [(&str, &str, &str); 8] = [
    (
        "krygin-atkinson",
        "zero Birkhoff sums of the ±1 step over the golden rotation",
        r#"{
  "name": "krygin-atkinson",
  "system": {"kind": "rotation", "alpha": "preset:golden"},
  "cocycle": {"kind": "step", "breakpoints": ["0", "0.5"], "values": [1, -1]},
  "detector": {"kind": "zero_sums", "n": 100000, "start": "0.1"}
}"#,
    ),
    (
        "shneiberg",
        "near-return zeros of the cylindrical flow under the unit roof",
        r#"{
  "name": "shneiberg",
  "system": {"kind": "special_flow",
             "base": {"kind": "rotation", "alpha": "preset:golden"},
             "roof": {"starts": ["0"], "heights": ["1"]}},
  "cocycle": {"kind": "phase_step", "breakpoints": ["0", "0.5"], "values": ["1", "-1"]},
  "detector": {"kind": "flow_zero_near_returns", "t_max": "10000", "start": {"a": "0.1", "b": "0"}, "eps": "0.5"}
}"#,
    ),
    (
        "theorem-a",
        "zeros of sigma that land in a target set of the flow",
        r#"{
  "name": "theorem-a",
  "system": {"kind": "special_flow",
             "base": {"kind": "rotation", "alpha": "preset:golden"},
             "roof": {"starts": ["0"], "heights": ["1"]}},
  "cocycle": {"kind": "phase_step", "breakpoints": ["0", "0.5"], "values": ["1", "-1"]},
  "detector": {"kind": "flow_zero_set_returns", "t_max": "10000", "start": {"a": "0.1", "b": "0"},
               "target": [{"lo": "0", "hi": "0.5"}]}
}"#,
    ),
    (
        "theorem-b-flow",
        "zeros of sigma close to the start under a two-step roof",
        r#"{
  "name": "theorem-b-flow",
  "system": {"kind": "special_flow",
             "base": {"kind": "rotation", "alpha": "preset:golden"},
             "roof": {"starts": ["0", "0.5"], "heights": ["1", "2"]}},
  "cocycle": {"kind": "phase_step", "breakpoints": ["0", "0.5"], "values": ["2", "-1"]},
  "detector": {"kind": "flow_zero_near_returns", "t_max": "10000", "start": {"a": "0.1", "b": "0"}, "eps": "0.05"}
}"#,
    ),
    (
        "theorem-b-winding",
        "zeros of the cos(2πx) integral along the √2 winding close to the start",
        r#"{
  "name": "theorem-b-winding",
  "system": {"kind": "torus_winding", "gamma": "preset:sqrt2"},
  "cocycle": {"kind": "trig", "modes": [{"j": 1, "k": 0, "cos": 1.0}]},
  "detector": {"kind": "winding_zero_near_returns", "t_max": 1000.0, "start": {"x": "0", "y": "0"}, "eps": "0.05"}
}"#,
    ),
    (
        "theorem-c-induced",
        "return times and induced cocycle on A = [0, 1/2) over the golden rotation",
        r#"{
  "name": "theorem-c-induced",
  "system": {"kind": "rotation", "alpha": "preset:golden"},
  "cocycle": {"kind": "step", "breakpoints": ["0", "0.5"], "values": [1, -1]},
  "detector": {"kind": "induced", "target": [{"lo": "0", "hi": "0.5"}]},
  "sampling": {"samples": 100000, "seed": 1}
}"#,
    ),
    (
        "theorem-d-weiss",
        "probability that |S_n f| exceeds εn for the golden rotation",
        r#"{
  "name": "theorem-d-weiss",
  "system": {"kind": "rotation", "alpha": "preset:golden"},
  "cocycle": {"kind": "step", "breakpoints": ["0", "0.5"], "values": [1, -1]},
  "detector": {"kind": "weiss", "n_list": [100, 1000, 10000], "eps": 0.05},
  "sampling": {"samples": 1000, "seed": 1}
}"#,
    ),
    (
        "skew-construct",
        "time averages of rectangles under the skew product over the golden rotation",
        r#"{
  "name": "skew-construct",
  "system": {"kind": "skew",
             "base": {"kind": "rotation", "alpha": "preset:golden"},
             "fiber": {"kind": "rotation", "alpha": "preset:sqrt2"}},
  "cocycle": {"kind": "step", "breakpoints": ["0", "0.5"], "values": [1, -1]},
  "detector": {"kind": "skew_stats", "n": 100000, "start": {"x": "0.1", "y": "0.2"},
               "observables": [{"x": ["0", "1"], "y": ["0", "1"]},
                               {"x": ["0", "0.5"], "y": ["0", "1"]},
                               {"x": ["0", "0.5"], "y": ["0", "0.5"]}]}
}"#,
    ),
];

pub fn list_presets() -> Vec<Preset> {
    CATALOG
        .iter()
        .map(|(name, description, text)| Preset {
            name,
            description,
            config: ExperimentConfig::from_json(text).expect("preset parses"),
        })
        .collect()
}

pub fn preset(name: &str) -> Option<Preset> {
    list_presets().into_iter().find(|p| p.name == name)
}
