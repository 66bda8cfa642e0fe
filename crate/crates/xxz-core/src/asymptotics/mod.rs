//! Numerical laboratory for the singular asymptotics of β-like integrals:
//! power-law fits, one-dimensional cases, the model integral and identities.

pub mod beta1d;
pub mod fit;
pub mod identities;
pub mod lemma;
pub mod model;

use serde::{Deserialize, Serialize};

/// One verified quantity: prediction, measured value and pass/fail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub predicted: f64,
    pub fitted: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Standard error of `fitted` when it is a Monte Carlo estimate.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
}

impl Check {
    pub fn new(name: impl Into<String>, predicted: f64, fitted: f64, tolerance: f64, pass: bool) -> Self {
        Check { name: name.into(), predicted, fitted, tolerance, pass, std_error: None }
    }

    pub fn with_std_error(mut self, se: f64) -> Self {
        self.std_error = Some(se);
        self
    }
}

use crate::Result;

/// Asymptotic checks on one-dimensional integrals: exact case a,
/// fitted case b and the smooth case without a common zero.
pub fn beta1d_checks() -> Result<Vec<Check>> {
    let mut out = beta1d::check_case_a(1e-3)?;
    out.extend(beta1d::check_case_b(0.7, 0.6)?);
    out.push(beta1d::check_regular()?);
    Ok(out)
}

pub fn lemma_checks() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (a0, b0) in [(-0.3, -0.4), (0.2, -0.6)] {
        out.extend(lemma::lemma_beta_aux_check(a0, b0, 0.5, &lemma::default_grid())?);
    }
    Ok(out)
}

/// Quadrature on the two-variable spec and stratified Monte Carlo on the
/// three-variable one; `seed` drives the sampler.
pub fn model_checks(seed: u64) -> Result<Vec<model::ModelReport>> {
    let (xs, degree) = model::quadrature_grid();
    let quad = model::model_quadrature_check(&model::golden_spec(), "quadrature,|u|<v", &xs, degree)?;
    let (xs, degree, samples, _) = model::mc_setup();
    let mc = model::model_mc_check(&model::mc_spec(), "monte-carlo,|u|>v", &xs, samples, seed, degree)?;
    Ok(vec![quad, mc])
}
