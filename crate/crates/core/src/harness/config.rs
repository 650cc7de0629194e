//! Experiment configuration: flat `key = value` text files plus CLI
//! overrides, one key per line, `#` comments, comma-separated lists.

use std::path::PathBuf;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    CenterCost,
    Figure1AlphaSweep,
    Figure2NSweep,
    CoreJunk,
    NoiseInjection,
    PairwiseMatrix,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "center_cost" => Ok(Self::CenterCost),
            "figure1_alpha_sweep" => Ok(Self::Figure1AlphaSweep),
            "figure2_n_sweep" => Ok(Self::Figure2NSweep),
            "core_junk" => Ok(Self::CoreJunk),
            "noise_injection" => Ok(Self::NoiseInjection),
            "pairwise_matrix" => Ok(Self::PairwiseMatrix),
            other => Err(Error::Config(format!("unknown experiment '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::CenterCost => "center_cost",
            Self::Figure1AlphaSweep => "figure1_alpha_sweep",
            Self::Figure2NSweep => "figure2_n_sweep",
            Self::CoreJunk => "core_junk",
            Self::NoiseInjection => "noise_injection",
            Self::PairwiseMatrix => "pairwise_matrix",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Centering {
    None,
    Oracle,
    Usvt,
}

impl Centering {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "oracle" => Ok(Self::Oracle),
            "usvt" => Ok(Self::Usvt),
            other => Err(Error::Config(format!("unknown centering '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Oracle => "oracle",
            Self::Usvt => "usvt",
        }
    }
}

/// How the USVT scale parameter `r_hat` is derived from a graph's marginal
/// structure (threshold is `usvt_a * sqrt(n * r_hat)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateRule {
    /// `m (1 - m)` with `m` the largest edge probability (or the empirical
    /// density for data graphs) — reproduces the `0.8 * 0.2` style constant.
    VarianceProxy,
    /// The largest edge probability itself.
    MaxEntry,
    /// `r_hat = 1`, i.e. threshold `a * sqrt(n)`.
    One,
    /// A fixed user-supplied value.
    Fixed(f64),
}

impl RateRule {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "varprox" => Ok(Self::VarianceProxy),
            "maxent" => Ok(Self::MaxEntry),
            "one" => Ok(Self::One),
            other => other
                .parse::<f64>()
                .map(Self::Fixed)
                .map_err(|_| Error::Config(format!("unknown usvt_rate '{other}'"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Correlation scale grid (alpha sweep) or the fixed scale elsewhere.
    pub alpha: Vec<f64>,
    /// Per-block sizes for the two-block experiments.
    pub n_per_block: Vec<usize>,
    /// Homogeneous model densities / correlations.
    pub p: Vec<f64>,
    pub rho: Vec<f64>,
    /// Vertex count for the homogeneous experiments.
    pub n: usize,
    /// Core-junk geometry.
    pub n_core: usize,
    pub n_junk: Vec<usize>,
    /// Noise injection grid and subset size.
    pub q_noise: Vec<f64>,
    pub noise_subset: usize,
    /// Input graphs for the data-driven experiments.
    pub graphs: Vec<PathBuf>,
    pub weighted: bool,
    pub centering: Vec<Centering>,
    pub replicates: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub usvt_a: f64,
    pub usvt_rate: RateRule,
    pub usvt_elbows: Option<usize>,
    /// None means the experiment-kind default (clip/hollow on for sampled
    /// 0/1 graphs, off for weighted data).
    pub usvt_clip: Option<bool>,
    pub usvt_hollow: Option<bool>,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub restarts: usize,
}

impl ExperimentConfig {
    /// Defaults reproduce the synthetic studies at desk scale.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = Self {
            experiment: kind,
            alpha: vec![1.0],
            n_per_block: vec![150],
            p: vec![0.5],
            rho: vec![0.6],
            n: 100,
            n_core: 60,
            n_junk: vec![15, 30, 60],
            q_noise: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            noise_subset: 25,
            graphs: Vec::new(),
            weighted: false,
            centering: vec![Centering::None, Centering::Oracle, Centering::Usvt],
            replicates: 20,
            seed: 1,
            out: PathBuf::from("experiment.csv"),
            usvt_a: 2.01,
            usvt_rate: RateRule::VarianceProxy,
            usvt_elbows: None,
            usvt_clip: None,
            usvt_hollow: None,
            max_iters: 30,
            rel_tol: 1e-6,
            restarts: 1,
        };
        match kind {
            ExperimentKind::CenterCost => Self {
                p: vec![0.1, 0.3, 0.5],
                rho: vec![0.1, 0.3, 0.5, 0.7, 0.9],
                centering: vec![Centering::None, Centering::Usvt],
                ..base
            },
            ExperimentKind::Figure1AlphaSweep => Self {
                alpha: vec![0.75, 0.85, 0.95, 1.0],
                ..base
            },
            ExperimentKind::Figure2NSweep => Self {
                n_per_block: vec![25, 50, 100, 150],
                ..base
            },
            ExperimentKind::CoreJunk => Self {
                centering: vec![Centering::None, Centering::Usvt],
                ..base
            },
            ExperimentKind::NoiseInjection => Self {
                centering: vec![Centering::None, Centering::Usvt],
                n: 150,
                noise_subset: 50,
                rho: vec![0.8],
                p: vec![0.3],
                ..base
            },
            ExperimentKind::PairwiseMatrix => Self {
                centering: vec![Centering::None, Centering::Usvt],
                replicates: 1,
                ..base
            },
        }
    }

    /// Parses a config file body. The `experiment` key must come first so
    /// the remaining keys land on the right defaults.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut config: Option<Self> = None;
        for (line_index, raw) in text.lines().enumerate() {
            let line_number = line_index + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_number,
                message: "expected 'key = value'".into(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if key == "experiment" {
                if config.is_some() {
                    return Err(Error::Parse {
                        line: line_number,
                        message: "duplicate 'experiment' key".into(),
                    });
                }
                config = Some(Self::defaults(ExperimentKind::parse(value)?));
            } else {
                let cfg = config.as_mut().ok_or_else(|| Error::Parse {
                    line: line_number,
                    message: "'experiment = <kind>' must come before other keys".into(),
                })?;
                cfg.apply_kv(key, value).map_err(|e| Error::Parse {
                    line: line_number,
                    message: e.to_string(),
                })?;
            }
        }
        config.ok_or_else(|| Error::Config("config file has no 'experiment' key".into()))
    }

    /// Applies one `key = value` setting (config file line or CLI flag).
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "alpha" => self.alpha = parse_list(value)?,
            "n_per_block" => self.n_per_block = parse_list(value)?,
            "p" => self.p = parse_list(value)?,
            "rho" => self.rho = parse_list(value)?,
            "n" => self.n = parse_scalar(value)?,
            "n_core" => self.n_core = parse_scalar(value)?,
            "n_junk" => self.n_junk = parse_list(value)?,
            "q_noise" => self.q_noise = parse_list(value)?,
            "noise_subset" => self.noise_subset = parse_scalar(value)?,
            "graphs" => {
                self.graphs = value
                    .split(',')
                    .map(|s| PathBuf::from(s.trim()))
                    .filter(|p| !p.as_os_str().is_empty())
                    .collect()
            }
            "weighted" => self.weighted = parse_bool(value)?,
            "centering" => {
                self.centering = value
                    .split(',')
                    .map(|s| Centering::parse(s.trim()))
                    .collect::<Result<_>>()?
            }
            "replicates" => self.replicates = parse_scalar(value)?,
            "seed" => self.seed = parse_scalar(value)?,
            "out" => self.out = PathBuf::from(value),
            "usvt_a" => self.usvt_a = parse_scalar(value)?,
            "usvt_rate" => self.usvt_rate = RateRule::parse(value)?,
            "usvt_elbows" => self.usvt_elbows = Some(parse_scalar(value)?),
            "usvt_clip" => self.usvt_clip = Some(parse_bool(value)?),
            "usvt_hollow" => self.usvt_hollow = Some(parse_bool(value)?),
            "max_iters" => self.max_iters = parse_scalar(value)?,
            "rel_tol" => self.rel_tol = parse_scalar(value)?,
            "restarts" => self.restarts = parse_scalar(value)?,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if self.centering.is_empty() {
            return Err(Error::Config("centering list is empty".into()));
        }
        let needs = |cond: bool, what: &str| -> Result<()> {
            if cond {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{what} for experiment '{}'",
                    self.experiment.name()
                )))
            }
        };
        match self.experiment {
            ExperimentKind::CenterCost => {
                needs(!self.p.is_empty() && !self.rho.is_empty(), "p and rho grids required")?;
                needs(self.n >= 2, "n >= 2 required")?;
            }
            ExperimentKind::Figure1AlphaSweep => {
                needs(!self.alpha.is_empty(), "alpha grid required")?;
                needs(!self.n_per_block.is_empty(), "n_per_block required")?;
            }
            ExperimentKind::Figure2NSweep => {
                needs(!self.n_per_block.is_empty(), "n_per_block grid required")?;
                needs(!self.alpha.is_empty(), "alpha required")?;
            }
            ExperimentKind::CoreJunk => {
                needs(self.n_core >= 2, "n_core >= 2 required")?;
                needs(!self.n_junk.is_empty(), "n_junk grid required")?;
            }
            ExperimentKind::NoiseInjection => {
                needs(!self.q_noise.is_empty(), "q_noise grid required")?;
                if self.graphs.is_empty() {
                    needs(self.noise_subset <= self.n, "noise_subset <= n required")?;
                }
            }
            ExperimentKind::PairwiseMatrix => {
                needs(self.graphs.len() >= 2, "at least two graphs required")?;
            }
        }
        let data_driven = !self.graphs.is_empty();
        if data_driven && self.centering.contains(&Centering::Oracle) {
            return Err(Error::Config(
                "oracle centering needs model expectations; not available for file graphs".into(),
            ));
        }
        Ok(())
    }
}

fn parse_scalar<T: std::str::FromStr>(value: &str) -> Result<T> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| Error::Config(format!("invalid value '{value}'")))
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|s| parse_scalar(s.trim()))
        .collect::<Result<Vec<T>>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(Error::Config("empty list".into()))
            } else {
                Ok(v)
            }
        })
}

fn parse_bool(value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        other => Err(Error::Config(format!("invalid boolean '{other}'"))),
    }
}
