//! Run configuration. A config file holds `key = value` lines with `#` comments; command
//! line flags are applied on top through the same [`RunConfig::set`] entry point, so both
//! reject unknown keys and malformed values the same way.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use sublin_core::generate::{generate, GraphKind};
use sublin_core::pipeline::{Mode, PipelineConfig};
use sublin_core::sampling::ClassifyStrategy;
use sublin_core::{Graph, ListOrder, Seed};

use crate::io::{load_graph, GraphFileError};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {msg}")]
    BadValue { key: String, value: String, msg: String },
    #[error("line {0}: expected `key = value`")]
    Syntax(usize),
    #[error("no instance given")]
    NoInstance,
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("{path}: {source}")]
    File { path: PathBuf, source: GraphFileError },
    #[error(transparent)]
    Generate(#[from] sublin_core::generate::GenerateError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    Matrix,
    List,
    Hybrid,
    /// Dichotomy runner on top of the `base` pipeline.
    Dichotomy,
    /// Matrix pipeline with the exact plug-in estimator.
    Plugin,
}

impl RunMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RunMode::Matrix => "matrix",
            RunMode::List => "list",
            RunMode::Hybrid => "hybrid",
            RunMode::Dichotomy => "dichotomy",
            RunMode::Plugin => "plugin",
        }
    }
}

impl FromStr for RunMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "matrix" => Ok(RunMode::Matrix),
            "list" => Ok(RunMode::List),
            "hybrid" => Ok(RunMode::Hybrid),
            "dichotomy" => Ok(RunMode::Dichotomy),
            "plugin" => Ok(RunMode::Plugin),
            _ => Err("expected matrix, list, hybrid, dichotomy or plugin".into()),
        }
    }
}

/// A graph source: a file or a generator with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSpec {
    File(PathBuf),
    Generated(GraphKind),
}

impl InstanceSpec {
    /// Loads or generates the graph. Generated graphs depend on `seed` only.
    pub fn build(&self, seed: Seed) -> Result<Graph, InstanceError> {
        match self {
            InstanceSpec::File(p) => load_graph(p).map_err(|source| InstanceError::File {
                path: p.clone(),
                source,
            }),
            InstanceSpec::Generated(k) => Ok(generate(k, seed)?),
        }
    }
}

fn kind_params(k: &GraphKind) -> (&'static str, Vec<(&'static str, String)>) {
    match *k {
        GraphKind::Empty { n } => ("empty", vec![("n", n.to_string())]),
        GraphKind::Complete { n } => ("complete", vec![("n", n.to_string())]),
        GraphKind::Path { n } => ("path", vec![("n", n.to_string())]),
        GraphKind::Cycle { n } => ("cycle", vec![("n", n.to_string())]),
        GraphKind::Star { leaves } => ("star", vec![("leaves", leaves.to_string())]),
        GraphKind::Petersen => ("petersen", vec![]),
        GraphKind::ErdosRenyi { n, p } => ("erdos-renyi", vec![("n", n.to_string()), ("p", p.to_string())]),
        GraphKind::RandomBipartite { left, right, p } => (
            "random-bipartite",
            vec![
                ("left", left.to_string()),
                ("right", right.to_string()),
                ("p", p.to_string()),
            ],
        ),
        GraphKind::HiddenPerfectMatching { n, epsilon } => (
            "hidden-perfect-matching",
            vec![("n", n.to_string()), ("epsilon", epsilon.to_string())],
        ),
        GraphKind::RandomRegular { n, d } => ("regular", vec![("n", n.to_string()), ("d", d.to_string())]),
        GraphKind::Lollipop { clique, path } => (
            "lollipop",
            vec![("clique", clique.to_string()), ("path", path.to_string())],
        ),
        GraphKind::PerfectMatching { pairs } => ("perfect-matching", vec![("pairs", pairs.to_string())]),
    }
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::File(p) => write!(f, "file:{}", p.display()),
            InstanceSpec::Generated(k) => {
                let (name, params) = kind_params(k);
                f.write_str(name)?;
                for (i, (key, val)) in params.iter().enumerate() {
                    write!(f, "{}{key}={val}", if i == 0 { ':' } else { ',' })?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for InstanceSpec {
    type Err = String;

    /// `file:<path>`, or `<kind>[:key=value,...]`, e.g. `erdos-renyi:n=200,p=0.15`.
    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(p) = s.strip_prefix("file:") {
            return Ok(InstanceSpec::File(PathBuf::from(p)));
        }
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params: Vec<(&str, &str)> = Vec::new();
        for item in rest.split(',').filter(|x| !x.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            params.push((k.trim(), v.trim()));
        }
        let mut used = 0;
        let mut get = |key: &str| -> Result<&str, String> {
            used += 1;
            params
                .iter()
                .find(|(k, _)| *k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| format!("{name} needs `{key}`"))
        };
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
            v.parse().map_err(|_| format!("bad number `{v}` for `{key}`"))
        }
        let kind = match name {
            "empty" => GraphKind::Empty {
                n: num("n", get("n")?)?,
            },
            "complete" => GraphKind::Complete {
                n: num("n", get("n")?)?,
            },
            "path" => GraphKind::Path {
                n: num("n", get("n")?)?,
            },
            "cycle" => GraphKind::Cycle {
                n: num("n", get("n")?)?,
            },
            "star" => GraphKind::Star {
                leaves: num("leaves", get("leaves")?)?,
            },
            "petersen" => GraphKind::Petersen,
            "erdos-renyi" => GraphKind::ErdosRenyi {
                n: num("n", get("n")?)?,
                p: num("p", get("p")?)?,
            },
            "random-bipartite" => GraphKind::RandomBipartite {
                left: num("left", get("left")?)?,
                right: num("right", get("right")?)?,
                p: num("p", get("p")?)?,
            },
            "hidden-perfect-matching" => GraphKind::HiddenPerfectMatching {
                n: num("n", get("n")?)?,
                epsilon: num("epsilon", get("epsilon")?)?,
            },
            "regular" => GraphKind::RandomRegular {
                n: num("n", get("n")?)?,
                d: num("d", get("d")?)?,
            },
            "lollipop" => GraphKind::Lollipop {
                clique: num("clique", get("clique")?)?,
                path: num("path", get("path")?)?,
            },
            "perfect-matching" => GraphKind::PerfectMatching {
                pairs: num("pairs", get("pairs")?)?,
            },
            _ => return Err(format!("unknown instance kind `{name}`")),
        };
        if used != params.len() {
            return Err(format!("unexpected parameters for {name}"));
        }
        Ok(InstanceSpec::Generated(kind))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: RunMode,
    /// Pipeline under the dichotomy runner.
    pub base: Mode,
    pub epsilon: f64,
    pub gamma: Option<f64>,
    pub gamma_c: f64,
    pub scale: f64,
    pub estimator_scale: Option<f64>,
    pub c_beta: f64,
    pub beta: Option<u32>,
    pub slack: f64,
    pub classify: ClassifyStrategy,
    pub list_order: ListOrder,
    /// Exponent advertised by the plug-in estimator.
    pub plugin_q: f64,
    pub seed: u64,
    pub instance: Option<InstanceSpec>,
    pub verify: bool,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PipelineConfig::default();
        RunConfig {
            mode: RunMode::List,
            base: Mode::List,
            epsilon: p.epsilon,
            gamma: None,
            gamma_c: p.gamma_c,
            scale: p.scale,
            estimator_scale: None,
            c_beta: p.c_beta,
            beta: None,
            slack: p.slack,
            classify: ClassifyStrategy::Auto,
            list_order: ListOrder::PerVertexRandom,
            plugin_q: 1.0,
            seed: 0,
            instance: None,
            verify: false,
            json: None,
            csv: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "mode",
    "base",
    "epsilon",
    "gamma",
    "gamma_c",
    "scale",
    "estimator_scale",
    "c_beta",
    "beta",
    "slack",
    "classify",
    "list_order",
    "plugin_q",
    "seed",
    "instance",
    "verify",
    "json",
    "csv",
];

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |msg: &str| ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
            msg: msg.into(),
        };
        fn parse<T: FromStr>(v: &str) -> Result<T, ()> {
            v.parse().map_err(|_| ())
        }
        let number = "expected a number";
        match key {
            "mode" => self.mode = value.parse().map_err(|e: String| bad(&e))?,
            "base" => self.base = value.parse().map_err(|e: String| bad(&e))?,
            "epsilon" => self.epsilon = parse(value).map_err(|_| bad(number))?,
            "gamma" => {
                self.gamma = if value == "auto" {
                    None
                } else {
                    Some(parse(value).map_err(|_| bad(number))?)
                }
            }
            "gamma_c" => self.gamma_c = parse(value).map_err(|_| bad(number))?,
            "scale" => self.scale = parse(value).map_err(|_| bad(number))?,
            "estimator_scale" => {
                self.estimator_scale = if value == "auto" {
                    None
                } else {
                    Some(parse(value).map_err(|_| bad(number))?)
                }
            }
            "c_beta" => self.c_beta = parse(value).map_err(|_| bad(number))?,
            "beta" => {
                self.beta = if value == "auto" {
                    None
                } else {
                    Some(parse(value).map_err(|_| bad("expected an integer"))?)
                }
            }
            "slack" => self.slack = parse(value).map_err(|_| bad(number))?,
            "classify" => {
                self.classify = match value {
                    "auto" => ClassifyStrategy::Auto,
                    "sampled" => ClassifyStrategy::Sampled,
                    _ => return Err(bad("expected auto or sampled")),
                }
            }
            "list_order" => {
                self.list_order = match value {
                    "random" => ListOrder::PerVertexRandom,
                    "global" => ListOrder::Global,
                    _ => return Err(bad("expected random or global")),
                }
            }
            "plugin_q" => self.plugin_q = parse(value).map_err(|_| bad(number))?,
            "seed" => self.seed = parse(value).map_err(|_| bad("expected an unsigned integer"))?,
            "instance" => self.instance = Some(value.parse().map_err(|e: String| bad(&e))?),
            "verify" => self.verify = parse(value).map_err(|_| bad("expected true or false"))?,
            "json" => self.json = Some(PathBuf::from(value)),
            "csv" => self.csv = Some(PathBuf::from(value)),
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`.
    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (k, v) = body.split_once('=').ok_or(ConfigError::Syntax(i + 1))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        c.apply_str(&std::fs::read_to_string(path)?)?;
        Ok(c)
    }

    /// Every field as `(key, value)` in [`KEYS`] order; feeding the pairs back through
    /// [`RunConfig::set`] reproduces the config.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let path = |p: &Option<PathBuf>| p.as_ref().map_or_else(String::new, |p| p.display().to_string());
        vec![
            ("mode", self.mode.as_str().into()),
            ("base", self.base.as_str().into()),
            ("epsilon", self.epsilon.to_string()),
            ("gamma", opt(&self.gamma)),
            ("gamma_c", self.gamma_c.to_string()),
            ("scale", self.scale.to_string()),
            ("estimator_scale", opt(&self.estimator_scale)),
            ("c_beta", self.c_beta.to_string()),
            ("beta", opt(&self.beta)),
            ("slack", self.slack.to_string()),
            (
                "classify",
                match self.classify {
                    ClassifyStrategy::Auto => "auto",
                    ClassifyStrategy::Sampled => "sampled",
                }
                .into(),
            ),
            (
                "list_order",
                match self.list_order {
                    ListOrder::PerVertexRandom => "random",
                    ListOrder::Global => "global",
                }
                .into(),
            ),
            ("plugin_q", self.plugin_q.to_string()),
            ("seed", self.seed.to_string()),
            (
                "instance",
                self.instance.as_ref().map_or_else(String::new, |i| i.to_string()),
            ),
            ("verify", self.verify.to_string()),
            ("json", path(&self.json)),
            ("csv", path(&self.csv)),
        ]
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            epsilon: self.epsilon,
            scale: self.scale,
            estimator_scale: self.estimator_scale,
            gamma: self.gamma,
            gamma_c: self.gamma_c,
            c_beta: self.c_beta,
            beta: self.beta,
            slack: self.slack,
            classify: self.classify,
            seed: self.seed,
            ..PipelineConfig::default()
        }
    }

    /// The pipeline the run's queries go through.
    pub fn pipeline_mode(&self) -> Mode {
        match self.mode {
            RunMode::Matrix | RunMode::Plugin => Mode::Matrix,
            RunMode::List => Mode::List,
            RunMode::Hybrid => Mode::Hybrid,
            RunMode::Dichotomy => self.base,
        }
    }

    /// Builds the instance and applies the configured list order.
    pub fn graph(&self) -> Result<Graph, ConfigErrorOrInstance> {
        let spec = self.instance.as_ref().ok_or(ConfigError::NoInstance)?;
        let seed = Seed::new(self.seed);
        Ok(spec.build(seed)?.with_list_order(self.list_order, seed))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigErrorOrInstance {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}
