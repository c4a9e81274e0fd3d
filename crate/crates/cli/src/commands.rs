use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use entps::analytic::{
    eta_gamma_overlap, eta_xi_overlap, gamma_coherent_overlap, gamma_gamma_inner, gamma_moments, gamma_wigner, xi_gamma_overlap,
    MomentSet,
};
use entps::fockspace::{
    apply_collective, coherent_state, eta_state, gamma_state, inner, resummed_inner, xi_state, Collective, TwoModeState,
};
use entps::phasespace::{wigner_numeric_row, wigner_rule};
use entps::verify::{self, Tier, VerifyConfig, CHECKS};
use entps::{husimi_params, validate_params, EtaLabel, GammaLabel, PhasePoint, RepParams, XiLabel};
use num_complex::Complex64;
use serde_json::json;

use crate::config::{Format, RunConfig};
use crate::{CliError, CoeffArgs, GridArgs, MomentArgs, ModelArgs, OverlapArgs, OverlapKind, ReportFormat, TierArg, VerifyArgs};

/// Tolerance for calling `βγ + αδ` zero.
const PAIR_ZERO: f64 = 1e-12;

fn model_params(m: &ModelArgs, cfg: &RunConfig) -> Result<Option<RepParams>, CliError> {
    if let (Some(a), Some(b), Some(g), Some(d)) = (m.alpha, m.beta, m.gamma, m.delta) {
        return Ok(Some(validate_params(a, b, g, d)?));
    }
    if let Some(k) = m.kappa {
        return Ok(Some(husimi_params(k)?));
    }
    cfg.params()
}

fn params_or_default(m: &ModelArgs, cfg: &RunConfig) -> Result<RepParams, CliError> {
    Ok(model_params(m, cfg)?.unwrap_or(VerifyConfig::default().params))
}

fn label(m: &ModelArgs, cfg: &RunConfig, default: GammaLabel) -> Result<GammaLabel, CliError> {
    let sigma = m.sigma.or(cfg.sigma()).unwrap_or(default.sigma);
    let tau = m.tau.or(cfg.tau()).unwrap_or(default.tau);
    Ok(GammaLabel::new(sigma, tau)?)
}

fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Invalid(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("ascii"))
}

pub fn params_check(m: &ModelArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let p = model_params(m, cfg)?
        .ok_or_else(|| CliError::Usage("params check needs --alpha, --beta, --gamma and --delta, or --kappa".into()))?;
    let mut s = String::from("valid\n");
    s += &format!("alpha = {}\nbeta = {}\ngamma = {}\ndelta = {}\n", p.alpha(), p.beta(), p.gamma(), p.delta());
    s += &format!("-alpha*beta*gamma*delta = {}\n", p.neg_product());
    s += &format!("beta*gamma + alpha*delta = {}\n", p.pair_sum());
    s += &format!("beta*gamma - alpha*delta = {}\n", p.constraint_value());
    match p.husimi_kappa() {
        Some(k) => s += &format!("kappa = {k}\n"),
        None => s += "kappa = none (not on the Husimi family)\n",
    }
    if p.pair_sum().abs() <= PAIR_ZERO {
        s += "regime: canonical coherent regime (beta*gamma + alpha*delta = 0)\n";
    }
    emit(&s, None)
}

pub fn wigner_grid(g: &GridArgs, cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.output.format == Some(Format::Json) {
        return Err(CliError::Invalid("config key `output.format`: wigner grid writes csv only".into()));
    }
    let p = params_or_default(&g.model, cfg)?;
    let l = label(&g.model, cfg, GammaLabel::origin())?;
    let rhos: Vec<Complex64> =
        g.rho_re.values().into_iter().flat_map(|x| g.rho_im.values().into_iter().map(move |y| Complex64::new(x, y))).collect();
    let vsigs: Vec<Complex64> =
        g.vsig_re.values().into_iter().flat_map(|x| g.vsig_im.values().into_iter().map(move |y| Complex64::new(x, y))).collect();
    let numeric = if g.numeric {
        let cutoff = g.cutoff.or(cfg.cutoff).unwrap_or(25);
        let order = g.order.or(cfg.quadrature.order2d).unwrap_or(32);
        Some((gamma_state(&l, &p, cutoff)?, wigner_rule(&p, order)?))
    } else {
        None
    };
    let mut rows = Vec::with_capacity(rhos.len() * vsigs.len());
    for &rho in &rhos {
        let row = match &numeric {
            Some((state, rule)) => Some(wigner_numeric_row(state, rho, &vsigs, rule)?),
            None => None,
        };
        for (j, &vs) in vsigs.iter().enumerate() {
            let w = gamma_wigner(&PhasePoint::new(rho, vs)?, &l, &p);
            let (wn, err) = match &row {
                Some(r) => (num(r[j]), num((r[j] - w).abs())),
                None => (String::new(), String::new()),
            };
            rows.push(vec![num(rho.re), num(rho.im), num(vs.re), num(vs.im), num(w), wn, err]);
        }
    }
    let text = csv_text(&["rho_re", "rho_im", "vsig_re", "vsig_im", "W_analytic", "W_numeric", "abs_err"], rows)?;
    emit(&text, g.output.as_deref().or(cfg.output.path.as_deref()))
}

pub fn verify(v: &VerifyArgs, cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.output.format == Some(Format::Csv) {
        return Err(CliError::Invalid("config key `output.format`: verify reports are json only".into()));
    }
    if let Some(only) = &v.only {
        for name in only {
            if !CHECKS.iter().any(|(n, _)| n == name) {
                let known: Vec<&str> = CHECKS.iter().map(|(n, _)| *n).collect();
                return Err(CliError::Invalid(format!("unknown check `{name}`; known checks: {}", known.join(", "))));
            }
        }
    }
    let defaults = VerifyConfig::default();
    let tier = match v.tier {
        Some(TierArg::Quick) => Tier::Quick,
        Some(TierArg::Full) => Tier::Full,
        None => cfg.tier.unwrap_or(Tier::Quick),
    };
    let config = VerifyConfig {
        params: params_or_default(&v.model, cfg)?,
        label: label(&v.model, cfg, defaults.label)?,
        tier,
        seed: v.seed.or(cfg.seed).unwrap_or(defaults.seed),
        cutoff: v.cutoff.or(cfg.cutoff),
        order2d: v.order2d.or(cfg.quadrature.order2d),
        order4d: v.order4d.or(cfg.quadrature.order4d),
        only: v.only.clone(),
        ..defaults
    };
    let reports = verify::run_all(&config);
    let json = verify::to_json(&reports) + "\n";
    if let Some(path) = v.output.as_deref().or(cfg.output.path.as_deref()) {
        emit(&json, Some(path))?;
    }
    match v.format {
        ReportFormat::Table => emit(&verify::to_table(&reports), None)?,
        ReportFormat::Json => emit(&json, None)?,
    }
    if verify::all_passed(&reports) {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}

fn pair(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

pub fn overlap(o: &OverlapArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let p = params_or_default(&o.model, cfg)?;
    let l = label(&o.model, cfg, GammaLabel::origin())?;
    let zero = Complex64::new(0.0, 0.0);
    let n = o.cutoff.or(cfg.cutoff).unwrap_or(30);
    let g = || gamma_state(&l, &p, n);
    let (closed, fock): (Complex64, Option<Complex64>) = match o.kind {
        OverlapKind::Coherent => {
            let (z1, z2) = (o.z1.unwrap_or(zero), o.z2.unwrap_or(zero));
            let fock = o.fock.then(|| inner(&g()?, &coherent_state(z1, z2, n)?)).transpose()?;
            (gamma_coherent_overlap(&l, &p, z1, z2), fock)
        }
        OverlapKind::Gamma => {
            let l2 = GammaLabel::new(o.sigma2.unwrap_or(zero), o.tau2.unwrap_or(zero))?;
            let fock = o.fock.then(|| inner(&g()?, &gamma_state(&l2, &p, n)?)).transpose()?;
            (gamma_gamma_inner(&l, &l2, &p), fock)
        }
        OverlapKind::Eta => {
            let e = EtaLabel::new(o.eta.unwrap_or(zero))?;
            let fock = o.fock.then(|| inner(&eta_state(&e, n)?, &g()?)).transpose()?;
            (eta_gamma_overlap(&e, &l, &p), fock)
        }
        OverlapKind::Xi => {
            let x = XiLabel::new(o.xi.unwrap_or(zero))?;
            let fock = o.fock.then(|| inner(&xi_state(&x, n)?, &g()?)).transpose()?;
            (xi_gamma_overlap(&x, &l, &p), fock)
        }
        OverlapKind::XiEta => {
            let e = EtaLabel::new(o.eta.unwrap_or(zero))?;
            let x = XiLabel::new(o.xi.unwrap_or(zero))?;
            let fock = o.fock.then(|| resummed_inner(&xi_state(&x, n)?, &eta_state(&e, n)?)).transpose()?;
            (eta_xi_overlap(&x, &e), fock)
        }
    };
    let kind = o.kind.to_possible_value().expect("named").get_name().to_string();
    let mut out = json!({ "kind": kind, "closed_form": pair(closed) });
    if let Some(f) = fock {
        out["fock"] = pair(f);
        out["abs_diff"] = json!((f - closed).norm());
        out["cutoff"] = json!(n);
    }
    emit(&(serde_json::to_string_pretty(&out).expect("json") + "\n"), None)
}

pub fn state_coeffs(c: &CoeffArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let p = params_or_default(&c.model, cfg)?;
    let l = label(&c.model, cfg, GammaLabel::origin())?;
    let s: TwoModeState = gamma_state(&l, &p, c.cutoff.or(cfg.cutoff).unwrap_or(10))?;
    let text = match c.format.or(cfg.output.format).unwrap_or(Format::Csv) {
        Format::Json => serde_json::to_string_pretty(&s).expect("json") + "\n",
        Format::Csv => {
            let d = s.cutoff() + 1;
            let rows = (0..d * d).map(|k| {
                let (n1, n2) = (k / d, k % d);
                let v = s.coeff(n1, n2);
                vec![n1.to_string(), n2.to_string(), num(v.re), num(v.im)]
            });
            csv_text(&["n1", "n2", "re", "im"], rows)?
        }
    };
    emit(&text, c.output.as_deref().or(cfg.output.path.as_deref()))
}

fn fock_moments(g: &TwoModeState) -> Result<MomentSet, CliError> {
    let mut v = [(0.0, 0.0); 4];
    for (slot, op) in v.iter_mut().zip([Collective::QMinus, Collective::QPlus, Collective::PMinus, Collective::PPlus]) {
        let x = apply_collective(g, op).state;
        *slot = (inner(g, &x)?.re, inner(&x, &x)?.re);
    }
    Ok(MomentSet {
        mean_q_minus: v[0].0,
        mean_q_plus: v[1].0,
        mean_p_minus: v[2].0,
        mean_p_plus: v[3].0,
        mean_q_minus_sq: v[0].1,
        mean_q_plus_sq: v[1].1,
        mean_p_minus_sq: v[2].1,
        mean_p_plus_sq: v[3].1,
    })
}

pub fn moments(m: &MomentArgs, cfg: &RunConfig) -> Result<(), CliError> {
    let p = params_or_default(&m.model, cfg)?;
    let l = label(&m.model, cfg, GammaLabel::origin())?;
    let closed = gamma_moments(&l, &p);
    let (minus, plus) = closed.uncertainty_products();
    let mut out = json!({
        "closed_form": closed,
        "variances": {
            "q_minus": closed.var_q_minus(),
            "q_plus": closed.var_q_plus(),
            "p_minus": closed.var_p_minus(),
            "p_plus": closed.var_p_plus(),
        },
        "uncertainty_products": { "minus": minus, "plus": plus },
    });
    if m.fock {
        let n = m.cutoff.or(cfg.cutoff).unwrap_or(30);
        out["fock"] = serde_json::to_value(fock_moments(&gamma_state(&l, &p, n)?)?).expect("json");
        out["cutoff"] = json!(n);
    }
    emit(&(serde_json::to_string_pretty(&out).expect("json") + "\n"), None)
}
