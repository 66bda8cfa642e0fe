use crate::config::{RunConfig, Suite};
use crate::error::CliError;
use serde_json::{json, Value};
use std::sync::Arc;
use xxz_core::asymptotics::model::ModelReport;
use xxz_core::asymptotics::{self, Check};
use xxz_core::thresholds::{self, curve_dataset, interior_grid, sector_kinds};
use xxz_core::{FieldSpec, ModelParams, MomentumSpace, Observables, VelocityAtlas};

/// Residual tolerance of the dressed charge/phase identities.
pub const IDENTITY_TOL: f64 = 1e-8;

/// Parameter points exercised by `verify` when none are configured.
pub const REFERENCE_POINTS: [(f64, f64); 2] = [(0.57, 0.21), (-0.60, 0.30)];

/// 17 significant digits.
pub fn dec(x: f64) -> String {
    format!("{x:.16e}")
}

fn decs(xs: &[f64]) -> Vec<String> {
    xs.iter().copied().map(dec).collect()
}

fn atlas(params: &ModelParams) -> Result<VelocityAtlas, CliError> {
    let obs = Arc::new(Observables::solve(params)?);
    Ok(VelocityAtlas::build(Arc::new(MomentumSpace::new(obs)?))?)
}

fn params_json(p: &ModelParams) -> Value {
    let field = match p.field {
        FieldSpec::Field(h) => json!({ "h": dec(h) }),
        FieldSpec::Density(d) => json!({ "density": dec(d) }),
        FieldSpec::FermiRapidity(q) => json!({ "q": dec(q) }),
    };
    let strings: Vec<String> = p.strings.iter().map(|s| format!("{}:{}", s.r, s.parity)).collect();
    json!({
        "J": dec(p.j),
        "zeta": dec(p.zeta),
        "delta": dec(p.delta()),
        "field": field,
        "N": p.n,
        "strings": strings,
    })
}

pub fn solve(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.require_params()?;
    let o = Observables::solve(p)?;
    let grid = o.grid();
    let doc = json!({
        "params": params_json(p),
        "q": dec(o.q()),
        "h": dec(o.h()),
        "p_F": dec(o.p_f()),
        "v_F": dec(o.v_f()),
        "density": dec(o.density()),
        "grid": { "nodes": decs(grid.nodes()), "weights": decs(grid.weights()) },
        "charge": decs(o.charge_nodes().values()),
        "energy": decs(o.energy_nodes().values()),
        "momentum_derivative": decs(o.momentum_derivative_nodes().values()),
    });
    Ok(pretty(&doc))
}

pub fn curves(cfg: &RunConfig) -> Result<String, CliError> {
    let a = atlas(cfg.require_params()?)?;
    Ok(thresholds::dataset_csv(&curve_dataset(&a, cfg.kgrid)?))
}

pub fn velocity(cfg: &RunConfig) -> Result<String, CliError> {
    let obs = Arc::new(Observables::solve(cfg.require_params()?)?);
    let space = MomentumSpace::new(obs)?;
    let iv = space.intervals().clone();
    let mut s = String::from("k,v1\n");
    for (lo, hi) in [iv.hole, iv.particle] {
        for k in interior_grid(lo, hi, cfg.kgrid) {
            s.push_str(&format!("{},{}\n", dec(k), dec(space.velocity(1, k)?)));
        }
    }
    Ok(s)
}

pub fn exponents(cfg: &RunConfig) -> Result<String, CliError> {
    let a = atlas(cfg.require_params()?)?;
    let mut s = String::from("kind,param,k,delta_plus,delta_minus,exponent\n");
    for (name, kind) in sector_kinds() {
        let (lo, hi) = kind.domain(&a)?;
        for t in thresholds::threshold_curve(kind, &interior_grid(lo, hi, cfg.kgrid), &a)? {
            s.push_str(&format!(
                "{name},{},{},{},{},{}\n",
                dec(t.param),
                dec(t.k()),
                dec(t.delta_plus),
                dec(t.delta_minus),
                dec(t.exponent)
            ));
        }
    }
    Ok(s)
}

/// Report text and the number of failed checks.
pub fn verify(cfg: &RunConfig) -> Result<(String, usize), CliError> {
    let suite = cfg.suite;
    let mut checks: Vec<Check> = Vec::new();
    let mut model: Vec<ModelReport> = Vec::new();

    let points: Vec<ModelParams> = match &cfg.params {
        Some(p) => vec![p.clone()],
        None => REFERENCE_POINTS
            .iter()
            .map(|&(delta, d)| ModelParams::from_delta(1.0, delta, FieldSpec::Density(d), cfg.n))
            .collect::<xxz_core::Result<_>>()?,
    };

    if suite.includes(Suite::Identities) {
        checks.extend(asymptotics::identities::identity_checks()?);
        for p in &points {
            let (first, second) = Observables::solve(p)?.identity_residuals()?;
            let tag = point_tag(p);
            for (name, r) in [("charge_phase_identity", first), ("charge_phase_identity_at_q", second)] {
                checks.push(Check::new(format!("{name}[{tag}]"), 0.0, r, IDENTITY_TOL, r < IDENTITY_TOL));
            }
        }
    }
    if suite.includes(Suite::Hypotheses) {
        for p in &points {
            let tag = point_tag(p);
            for h in atlas(p)?.verify_hypotheses(cfg.kgrid)? {
                checks.push(Check::new(format!("{}[{tag}]", h.name), 0.0, h.margin, 0.0, h.pass));
            }
        }
    }
    if suite.includes(Suite::Beta1d) {
        checks.extend(asymptotics::beta1d_checks()?);
    }
    if suite.includes(Suite::Lemma) {
        checks.extend(asymptotics::lemma_checks()?);
    }
    if suite.includes(Suite::Model) {
        model = asymptotics::model_checks(cfg.seed)?;
        checks.extend(model.iter().flat_map(|r| r.checks.iter().cloned()));
    }

    let failed = checks.iter().filter(|c| !c.pass).count();
    let doc = json!({
        "suite": serde_json::to_value(suite).expect("suite serializes"),
        "seed": cfg.seed.to_string(),
        "pass": failed == 0,
        "failed": failed,
        "checks": checks.iter().map(check_json).collect::<Vec<_>>(),
        "model": model.iter().map(model_json).collect::<Vec<_>>(),
    });
    Ok((pretty(&doc), failed))
}

fn point_tag(p: &ModelParams) -> String {
    match p.field {
        FieldSpec::Density(d) => format!("delta={},D={}", p.delta(), d),
        FieldSpec::Field(h) => format!("delta={},h={}", p.delta(), h),
        FieldSpec::FermiRapidity(q) => format!("delta={},q={}", p.delta(), q),
    }
}

fn check_json(c: &Check) -> Value {
    let mut v = json!({
        "name": c.name,
        "predicted": dec(c.predicted),
        "fitted": dec(c.fitted),
        "tolerance": dec(c.tolerance),
        "pass": c.pass,
    });
    if let Some(se) = c.std_error {
        v["std_error"] = json!(dec(se));
    }
    v
}

fn model_json(r: &ModelReport) -> Value {
    let s = &r.spec;
    let windows: Vec<Value> = r
        .window_sensitivity
        .iter()
        .map(|w| {
            json!({
                "x_max": dec(w.x_max),
                "points": w.points,
                "exponent": dec(w.exponent),
                "side_ratio": dec(w.side_ratio),
            })
        })
        .collect();
    let mut v = json!({
        "integral": {
            "n_r": s.n_r,
            "eps_r": s.eps_r,
            "xi_r": decs(&s.xi_r),
            "u": dec(s.u),
            "v": dec(s.v),
            "delta_plus": dec(s.delta_plus),
            "delta_minus": dec(s.delta_minus),
        },
        "x": decs(&r.xs),
        "plus": decs(&r.plus),
        "minus": decs(&r.minus),
        "window_sensitivity": windows,
    });
    if let Some((sp, sm)) = &r.std_errors {
        v["std_error_plus"] = json!(decs(sp));
        v["std_error_minus"] = json!(decs(sm));
    }
    v
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}
