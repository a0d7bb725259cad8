//! Subcommand implementations: thin wrappers over the library operations
//! that render versioned JSON reports. Every report carries the evidence
//! horizon (grid bounds, q_max, big_q_max) its verdicts are relative to.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gennum::gauge::{Gauge, GenComplex, GridPoint, NetClass};
use gennum::ghf::{goursat_coefficients, GhfNet};
use gennum::hft::{gsf_delta1, gsf_exp_norm, gsf_gaussian, gsf_heaviside, gsf_zero, hft_point,
    log_halfwidth, paley_wiener_suite, GsfNet};
use gennum::hps::{builtin, radius, setconv_membership, BuiltinFamily, HpsCoefficients,
    RadiusClass};
use gennum::hyperseq::{hyperlimit, HyperSequence};
use gennum::hyperseries::{ratio_test, root_test, sum_hyperseries, TestVerdict};
use gennum::hyperseries::SeriesSequence;
use gennum::hps::series_at;
use gennum::prelude::*;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::expr::Expr;

pub const SCHEMA: &str = "gennum-report/1";

fn horizon(g: &Gauge) -> Value {
    let (k_min, k_max) = (
        -g.grid.first().map(|p| p.log2_rho).unwrap_or(0.0),
        -g.grid.last().map(|p| p.log2_rho).unwrap_or(0.0),
    );
    json!({
        "k_min": k_min, "k_max": k_max,
        "grid_points": g.grid.len(),
        "q_max": g.q_max, "big_q_max": g.big_q_max,
    })
}

fn family(name: &str) -> Result<HpsCoefficients> {
    Ok(match name {
        "geometric" => builtin(BuiltinFamily::Geometric),
        "exponential" | "exp" => builtin(BuiltinFamily::Exponential),
        "delta" | "dirac-delta" => builtin(BuiltinFamily::DiracDelta),
        _ => bail!("unknown coefficient family '{name}' (geometric|exponential|delta)"),
    })
}

fn ghf_net(name: &str) -> Result<GhfNet> {
    Ok(match name {
        "geometric" | "geometric-kernel" => GhfNet::geometric_kernel(),
        "exponential" | "exp" => GhfNet::exponential(),
        "delta" | "dirac-delta" => GhfNet::dirac_delta(),
        _ => {
            if let Some(c) = name.strip_prefix("constant:") {
                let v: f64 = c.parse().with_context(|| format!("constant value '{c}'"))?;
                GhfNet::constant(Complex64::new(v, 0.0))
            } else {
                bail!("unknown function net '{name}' (geometric|exponential|delta|constant:v)")
            }
        }
    })
}

fn gsf_net(name: &str, q_h: f64) -> Result<GsfNet> {
    let h = log_halfwidth(q_h);
    Ok(match name {
        "delta" | "delta1" => gsf_delta1(h),
        "gaussian" => gsf_gaussian(h),
        "exp-norm" | "exp_norm" => gsf_exp_norm(h),
        "heaviside" => gsf_heaviside(h),
        "zero" => gsf_zero(h),
        _ => bail!("unknown generalized function '{name}' (delta1|gaussian|exp_norm|heaviside|zero)"),
    })
}

/// Parse an expression and bind it per grid point with eps/rho/K in scope.
fn point_expr(src: &str) -> Result<impl Fn(&GridPoint) -> f64 + Send + Sync + Clone> {
    let e = Expr::parse(src).map_err(|err| anyhow!("in '{src}': {err}"))?;
    Ok(move |p: &GridPoint| {
        let vars: HashMap<String, f64> = [
            ("eps".to_string(), p.eps),
            ("rho".to_string(), p.rho),
            ("K".to_string(), 1.0),
        ]
        .into();
        e.eval(&vars).unwrap_or(f64::NAN)
    })
}

fn gen_from_expr(label: &str, src: &str) -> Result<GenComplex> {
    let f = point_expr(src)?;
    Ok(GenComplex::from_fn(label.to_string(), move |p| Xc::from_f64(f(p))))
}

/// Sampled values of a net over the grid tail (mantissa + log2 magnitude).
fn sample_net(x: &GenComplex, g: &Gauge) -> Value {
    let rows: Vec<Value> = g
        .tail()
        .iter()
        .step_by(6)
        .map(|p| {
            let v = x.eval(p);
            json!({
                "eps": p.eps,
                "log2_mag": finite(v.abs_log2()),
                "mantissa_re": v.m.re,
                "mantissa_im": v.m.im,
                "exponent_log2": v.e,
            })
        })
        .collect();
    Value::Array(rows)
}

/// JSON has no infinities; encode them as strings.
fn finite(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v == f64::NEG_INFINITY {
        json!("-inf")
    } else if v == f64::INFINITY {
        json!("inf")
    } else {
        json!("nan")
    }
}

fn class_name(c: &NetClass) -> String {
    match c {
        NetClass::Negligible => "negligible".into(),
        NetClass::Moderate(q) => format!("moderate(Q={q})"),
        NetClass::NonModerate => "non_moderate".into(),
        NetClass::Indeterminate => "indeterminate".into(),
    }
}

fn report(g: &Gauge, command: &str, verdict: &str, ok: bool, data: Value) -> Value {
    json!({
        "schema": SCHEMA,
        "command": command,
        "horizon": horizon(g),
        "verdict": verdict,
        "ok": ok,
        "data": data,
    })
}

// ---------------------------------------------------------------------------

pub fn op_sum(g: &Gauge, fam: &str, z_src: &str) -> Result<Value> {
    let a = family(fam)?;
    let z = gen_from_expr("z", z_src)?;
    let s = series_at(&a, &GenComplex::zero(), &z, g);
    let rep = sum_hyperseries(&s, g);
    let verdict = rep.result.status.name().to_string();
    let (value, class) = match &rep.result.status {
        gennum::hyperseq::LimitStatus::Converges(l) => (
            sample_net(l, g),
            Value::String(class_name(&valuation(l, g).class)),
        ),
        _ => (Value::Null, Value::Null),
    };
    Ok(report(
        g,
        "sum",
        &verdict,
        true,
        json!({
            "family": fam,
            "z": z_src,
            "moderate_q": rep.moderate_q,
            "value": value,
            "value_class": class,
            "diagnostic": rep.result.diagnostic,
        }),
    ))
}

pub fn op_hyperlim(g: &Gauge, term: &str) -> Result<Value> {
    let e = Expr::parse(term).map_err(|err| anyhow!("in '{term}': {err}"))?;
    let s = HyperSequence::from_fn(term.to_string(), move |n, p| {
        let vars: HashMap<String, f64> = [
            ("n".to_string(), n),
            ("eps".to_string(), p.eps),
            ("rho".to_string(), p.rho),
            ("K".to_string(), 1.0),
        ]
        .into();
        Xc::from_f64(e.eval(&vars).unwrap_or(f64::NAN))
    });
    let rep = hyperlimit(&s, g);
    let verdict = rep.status.name().to_string();
    let value = match &rep.status {
        gennum::hyperseq::LimitStatus::Converges(l) => sample_net(l, g),
        _ => Value::Null,
    };
    Ok(report(
        g,
        "hyperlim",
        &verdict,
        true,
        json!({"term": term, "value": value, "diagnostic": rep.diagnostic}),
    ))
}

pub fn op_radius(g: &Gauge, fam: &str) -> Result<Value> {
    let a = family(fam)?;
    let rep = radius(&a, g).map_err(|e| anyhow!("radius failed: {e:?}"))?;
    let (verdict, value) = match &rep.class {
        RadiusClass::Finite(r) => ("finite".to_string(), sample_net(r, g)),
        RadiusClass::Infinite => ("infinite".to_string(), Value::Null),
        RadiusClass::MixedSubpoints => ("mixed_subpoints".to_string(), Value::Null),
        RadiusClass::NonModerate => ("non_moderate".to_string(), Value::Null),
    };
    let table: Vec<Value> = rep
        .r_log2
        .iter()
        .map(|(idx, rl)| json!({"eps": g.grid[*idx].eps, "log2_r": finite(*rl)}))
        .collect();
    Ok(report(
        g,
        "radius",
        &verdict,
        true,
        json!({
            "family": fam,
            "per_point_log2": table,
            "limsup_window": [rep.limsup_cutoff.0, rep.limsup_cutoff.1],
            "value": value,
            "diagnostic": rep.diagnostic,
        }),
    ))
}

pub fn op_classify(
    g: &Gauge,
    fam: &str,
    z_src: &str,
    test: &str,
    n0: Option<f64>,
) -> Result<Value> {
    let a = family(fam)?;
    let z = gen_from_expr("z", z_src)?;
    // the sup-style tests are only meaningful past the term-ratio peak;
    // default to twice the largest |z| over the grid
    let n0 = n0.unwrap_or_else(|| {
        let zmax = g
            .grid
            .iter()
            .map(|p| z.eval(p).abs_log2().exp2())
            .fold(0.0f64, f64::max);
        (2.0 * zmax).max(8.0).min(2f64.powi(50)).ceil()
    });
    let s: SeriesSequence = series_at(&a, &GenComplex::zero(), &z, g);
    let rep = match test {
        "ratio" => ratio_test(&s, n0, g),
        "root" => root_test(&s, n0, g),
        _ => bail!("unknown test '{test}' (ratio|root)"),
    }
    .map_err(|e| anyhow!("{test} test failed: {e:?}"))?;
    let verdict = match rep.verdict {
        TestVerdict::Converges => "converges_absolutely",
        TestVerdict::Diverges => "diverges",
        TestVerdict::Inconclusive => "inconclusive",
    };
    Ok(report(
        g,
        "classify",
        verdict,
        true,
        json!({"family": fam, "z": z_src, "test": test, "n0": n0, "detail": rep.detail}),
    ))
}

pub fn op_setconv(g: &Gauge, fam: &str, z_src: &str) -> Result<Value> {
    let a = family(fam)?;
    let z = gen_from_expr("z", z_src)?;
    let m = setconv_membership(&a, &GenComplex::zero(), &z, g)
        .map_err(|e| anyhow!("membership test failed: {e:?}"))?;
    let verdict = if m.member { "member" } else { "not_member" };
    Ok(report(
        g,
        "setconv",
        verdict,
        true,
        json!({
            "family": fam,
            "z": z_src,
            "cond_radius": m.cond_radius,
            "cond_formal": m.cond_formal,
            "cond_sum": m.cond_sum,
            "cond_deriv": m.cond_deriv,
            "representative_independent": m.representative_independent,
            "witness": m.witness,
        }),
    ))
}

pub fn op_goursat(g: &Gauge, f: &str, center: &str, rad: &str, n_max: usize) -> Result<Value> {
    let net = ghf_net(f)?;
    let c = gen_from_expr("center", center)?;
    let r = gen_from_expr("radius", rad)?;
    let (coeffs, cert) =
        goursat_coefficients(&net, &c, &r, n_max, g).map_err(|e| anyhow!("goursat: {e:?}"))?;
    let mut rows = Vec::new();
    for p in g.tail().iter().step_by(9) {
        for n in 0..=n_max {
            let v = coeffs.coeff(n as f64, p);
            rows.push(json!({
                "eps": p.eps, "n": n,
                "log2_mag": finite(v.abs_log2()),
                "mantissa_re": v.m.re, "mantissa_im": v.m.im, "exponent_log2": v.e,
            }));
        }
    }
    Ok(report(
        g,
        "goursat",
        "ok",
        true,
        json!({
            "f": f, "center": center, "radius": rad, "n_max": n_max,
            "weak_moderate_cert": cert.map(|(q, r)| json!({"q": q, "r": r})),
            "coefficients": rows,
        }),
    ))
}

fn parse_omegas(spec: &str, steps: usize) -> Result<Vec<f64>> {
    if let Some((a, b)) = spec.split_once("..") {
        let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
        let n = steps.max(2);
        return Ok((0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect());
    }
    spec.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(Into::into))
        .collect()
}

pub fn op_hft(
    g: &Gauge,
    f: &str,
    omega: &str,
    steps: usize,
    q_h: f64,
    csv_path: Option<&Path>,
) -> Result<Value> {
    let net = gsf_net(f, q_h)?;
    let omegas = parse_omegas(omega, steps)?;
    let mut rows = Vec::new();
    for p in g.tail().iter().step_by(9) {
        for &om in &omegas {
            let v = hft_point(&net, p, Complex64::new(om, 0.0), 1.0)
                .map_err(|e| anyhow!("transform failed at eps={:.3e}, omega={om}: {e:?}", p.eps))?;
            rows.push((p.eps, om, v));
        }
    }
    if let Some(path) = csv_path {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["eps", "omega", "mantissa_re", "mantissa_im", "exponent_log2"])?;
        for (eps, om, v) in &rows {
            w.write_record([
                format!("{eps:e}"),
                format!("{om}"),
                format!("{}", v.m.re),
                format!("{}", v.m.im),
                format!("{}", v.e),
            ])?;
        }
        atomic_write(path, &w.into_inner()?)?;
    }
    let table: Vec<Value> = rows
        .iter()
        .map(|(eps, om, v)| {
            json!({
                "eps": eps, "omega": om,
                "log2_mag": finite(v.abs_log2()),
                "mantissa_re": v.m.re, "mantissa_im": v.m.im, "exponent_log2": v.e,
            })
        })
        .collect();
    Ok(report(
        g,
        "hft",
        "ok",
        true,
        json!({"f": f, "q_h": q_h, "rows": if csv_path.is_some() { Value::Null } else { Value::Array(table) },
               "csv": csv_path.map(|p| p.display().to_string())}),
    ))
}

pub fn op_pw(g: &Gauge, f: &str, q_h: f64) -> Result<Value> {
    let net = gsf_net(f, q_h)?;
    let rep = paley_wiener_suite(&net, g).map_err(|e| anyhow!("suite failed: {e:?}"))?;
    let ok = rep.is_ghf && rep.plancherel_ok && rep.exp_type_ok;
    let verdict = if ok { "pass" } else { "fail" };
    Ok(report(
        g,
        "pw",
        verdict,
        ok,
        json!({
            "f": f, "q_h": q_h,
            "holomorphy": {"cr_residual": finite(rep.cr_residual), "is_ghf": rep.is_ghf},
            "taylor_rel_err": rep.taylor_rel_err.map(finite),
            "plancherel": {
                "per_point": rep.plancherel_rel.iter()
                    .map(|(idx, r)| json!({"eps": g.grid[*idx].eps, "rel": finite(*r)}))
                    .collect::<Vec<_>>(),
                "ok": rep.plancherel_ok,
            },
            "exp_type": {"ratio": finite(rep.exp_type_ratio), "ok": rep.exp_type_ok},
        }),
    ))
}

pub fn op_report(dir: &Path) -> Result<Value> {
    let mut entries: Vec<Value> = Vec::new();
    let mut failures = 0usize;
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    for path in paths {
        let text = std::fs::read_to_string(&path)?;
        let v: Value = serde_json::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        let ok = v.get("ok").and_then(Value::as_bool).unwrap_or(false);
        if !ok {
            failures += 1;
        }
        entries.push(json!({
            "file": path.file_name().unwrap().to_string_lossy(),
            "command": v.get("command").cloned().unwrap_or(Value::Null),
            "verdict": v.get("verdict").cloned().unwrap_or(Value::Null),
            "ok": ok,
        }));
    }
    Ok(json!({
        "schema": SCHEMA,
        "command": "report",
        "verdict": if failures == 0 { "pass" } else { "fail" },
        "ok": failures == 0,
        "data": {"reports": entries, "failures": failures},
    }))
}

// ---------------------------------------------------------------------------

/// Write bytes to `path` atomically (temp file + rename in the same dir).
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension("tmp~");
    {
        let mut f = std::fs::File::create(&tmp)
            .with_context(|| format!("creating {}", tmp.display()))?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub fn emit(report: &Value, output: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(report)? + "\n";
    match output {
        Some(path) => atomic_write(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
