//! Run configuration: an optional JSON file merged under command-line flags.

use crate::error::CliError;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use xxz_core::{FieldSpec, ModelParams, StringSpec};

pub const DEFAULT_N: usize = 128;
pub const DEFAULT_KGRID: usize = 201;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Beta1d,
    Lemma,
    Model,
    Hypotheses,
    All,
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

/// Every user-settable field; absent fields fall back to defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Anisotropy Δ = cos ζ, in (−1, 1).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "zeta")]
    pub delta: Option<f64>,
    /// Anisotropy angle ζ, in (0, π).
    #[arg(long)]
    pub zeta: Option<f64>,
    /// Exchange coupling (default 1).
    #[arg(long = "J", id = "j")]
    #[serde(rename = "J", alias = "j")]
    pub j: Option<f64>,
    /// Magnetic field.
    #[arg(long, conflicts_with_all = ["density", "q"])]
    pub h: Option<f64>,
    /// Magnetisation density D, in (0, 1/2).
    #[arg(long, conflicts_with = "q")]
    pub density: Option<f64>,
    /// Fermi rapidity.
    #[arg(long)]
    pub q: Option<f64>,
    /// Quadrature order (default 128).
    #[arg(long = "N", id = "n")]
    #[serde(rename = "N", alias = "n")]
    pub n: Option<usize>,
    /// Enabled strings as comma-separated `r:parity` pairs, e.g. "2:0".
    #[arg(long)]
    pub strings: Option<String>,
    /// Samples per curve or interval.
    #[arg(long)]
    pub kgrid: Option<usize>,
    /// Output path (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
}

impl Overrides {
    /// `self` wins field by field.
    pub fn over(self, base: Overrides) -> Overrides {
        let field_set = self.h.is_some() || self.density.is_some() || self.q.is_some();
        let angle_set = self.delta.is_some() || self.zeta.is_some();
        Overrides {
            delta: if angle_set { self.delta } else { base.delta },
            zeta: if angle_set { self.zeta } else { base.zeta },
            j: self.j.or(base.j),
            h: if field_set { self.h } else { base.h },
            density: if field_set { self.density } else { base.density },
            q: if field_set { self.q } else { base.q },
            n: self.n.or(base.n),
            strings: self.strings.or(base.strings),
            kgrid: self.kgrid.or(base.kgrid),
            out: self.out.or(base.out),
            seed: self.seed.or(base.seed),
            workers: self.workers.or(base.workers),
            suite: self.suite.or(base.suite),
        }
    }

    pub fn load(path: &Path) -> Result<Overrides, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn has_params(&self) -> bool {
        self.delta.is_some() || self.zeta.is_some()
    }
}

/// Validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: Option<ModelParams>,
    /// Quadrature order, also used for the built-in reference points.
    pub n: usize,
    pub kgrid: usize,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub workers: Option<usize>,
    pub suite: Suite,
}

impl RunConfig {
    pub fn resolve(o: Overrides) -> Result<RunConfig, CliError> {
        let params = if o.has_params() { Some(params_from(&o)?) } else { None };
        let kgrid = o.kgrid.unwrap_or(DEFAULT_KGRID);
        if kgrid < 2 {
            return Err(CliError::Config(format!("kgrid must be at least 2, got {kgrid}")));
        }
        if o.workers == Some(0) {
            return Err(CliError::Config("workers must be positive".into()));
        }
        Ok(RunConfig {
            params,
            n: o.n.unwrap_or(DEFAULT_N),
            kgrid,
            out: o.out,
            seed: o.seed.unwrap_or(DEFAULT_SEED),
            workers: o.workers,
            suite: o.suite.unwrap_or(Suite::All),
        })
    }

    pub fn require_params(&self) -> Result<&ModelParams, CliError> {
        self.params.as_ref().ok_or_else(|| CliError::Config("one of --delta or --zeta is required".into()))
    }
}

fn params_from(o: &Overrides) -> Result<ModelParams, CliError> {
    let field = match (o.h, o.density, o.q) {
        (Some(h), None, None) => FieldSpec::Field(h),
        (None, Some(d), None) => FieldSpec::Density(d),
        (None, None, Some(q)) => FieldSpec::FermiRapidity(q),
        (None, None, None) => return Err(CliError::Config("one of --h, --density or --q is required".into())),
        _ => return Err(CliError::Config("--h, --density and --q are mutually exclusive".into())),
    };
    let j = o.j.unwrap_or(1.0);
    let n = o.n.unwrap_or(DEFAULT_N);
    let params = match (o.delta, o.zeta) {
        (Some(delta), None) => ModelParams::from_delta(j, delta, field, n)?,
        (None, Some(zeta)) => {
            let p = ModelParams { j, zeta, field, n, strings: Vec::new() };
            p.validate()?;
            p
        }
        _ => return Err(CliError::Config("--delta and --zeta are mutually exclusive".into())),
    };
    match &o.strings {
        Some(s) => Ok(params.with_strings(parse_strings(s)?)?),
        None => Ok(params),
    }
}

pub fn parse_strings(s: &str) -> Result<Vec<StringSpec>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            let bad = || CliError::Config(format!("bad string spec {t:?}, expected r:parity"));
            let (r, parity) = t.split_once(':').ok_or_else(bad)?;
            Ok(StringSpec {
                r: r.trim().parse().map_err(|_| bad())?,
                parity: parity.trim().parse().map_err(|_| bad())?,
            })
        })
        .collect()
}
