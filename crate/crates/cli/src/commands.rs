//! One function per subcommand.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use stochastic_coresets::apps::{expected_meb, expected_shell};
use stochastic_coresets::expkernel::{exp_kernel, exp_kernel_subset};
use stochastic_coresets::fpowkernel::{expected_t_r, fpow_kernel, polar_directions, FpowKernel};
use stochastic_coresets::geom::width as point_width;
use stochastic_coresets::model::{ExistentialSet, FlatSet, Instance, UncertainSet, WeightedPoint};
use stochastic_coresets::oracle::{
    band_check, enumerate_width_cdf, BandReport, Enumerated, WidthDistribution, ENUMERATION_BIT_CAP,
};
use stochastic_coresets::presets::{generate, Preset, PresetParams};
use stochastic_coresets::quantkernel::{self, Method, QuantConfig, QuantKernel};
use stochastic_coresets::width::{build_m, expected_support_many, expected_width, width_cdf};

use crate::io::{
    emit, fmt_vec, parse_list, read_set, read_text, report_directions, t_values, unit, CliError, CliResult,
};
use crate::{
    Against, BandArgs, EvalArgs, ExpkernelArgs, FitArgs, FpowkernelArgs, GenArgs, MethodArg, PolytopeArgs,
    QuantkernelArgs, ShapeArg, SweepArgs, WidthArgs,
};

fn existential(set: &UncertainSet, what: &str) -> CliResult<ExistentialSet> {
    match set {
        UncertainSet::Existential(s) => Ok(s.clone()),
        UncertainSet::Locational(_) => Err(CliError {
            code: "cli.unsupported".into(),
            message: format!("{what} needs an existential instance"),
            exit: crate::io::EXIT_PRECONDITION,
        }),
    }
}

fn planar(set: &UncertainSet, what: &str) -> CliResult<()> {
    if set.dimension() == 2 {
        Ok(())
    } else {
        Err(CliError {
            code: "cli.unsupported".into(),
            message: format!("{what} is planar; the instance has d = {}", set.dimension()),
            exit: crate::io::EXIT_PRECONDITION,
        })
    }
}

pub fn gen(a: GenArgs) -> CliResult<()> {
    let preset: Preset = a.preset.parse()?;
    let mut params = PresetParams::new(a.n, a.d, a.seed);
    params.p = a.p;
    params.beta = a.beta;
    let inst = generate(preset, &params)?;
    emit(a.output.out.as_ref(), &(inst.to_json() + "\n"))
}

pub fn width(a: WidthArgs) -> CliResult<()> {
    let set = read_set(&a.input)?;
    let u = unit(&parse_list(&a.dir)?, set.dimension())?;
    let mut out = String::new();
    let w = if a.enumerate {
        stochastic_coresets::oracle::enumerate_expected_width(&set, &u)?
    } else {
        expected_width(&set, &u)
    };
    writeln!(out, "{w}").unwrap();
    if let Some(ts) = &a.cdf {
        let ts = parse_list(ts)?;
        let c = if a.enumerate {
            enumerate_width_cdf(&set, &u, &ts)?
        } else {
            width_cdf(&set, &u, &ts)
        };
        writeln!(out, "t,cdf").unwrap();
        for (t, v) in ts.iter().zip(&c) {
            writeln!(out, "{t},{v}").unwrap();
        }
    }
    emit(None, &out)
}

pub fn sweep(a: SweepArgs) -> CliResult<()> {
    let set = read_set(&a.input)?;
    planar(&set, "sweep")?;
    if a.k == 0 {
        return Err(CliError::usage("k must be positive"));
    }
    let flat = set.flat();
    let thetas: Vec<f64> = (0..a.k).map(|j| std::f64::consts::TAU * j as f64 / a.k as f64).collect();
    let chunk = a.k.div_ceil(rayon::current_num_threads()).max(1);
    let rows: Vec<(f64, f64, f64)> = thetas
        .par_chunks(chunk)
        .flat_map_iter(|ts| {
            let up: Vec<Vec<f64>> = ts.iter().map(|t| vec![t.cos(), t.sin()]).collect();
            let down: Vec<Vec<f64>> = ts.iter().map(|t| vec![-t.cos(), -t.sin()]).collect();
            let f = expected_support_many(&flat, &up);
            let g = expected_support_many(&flat, &down);
            ts.iter()
                .zip(f.into_iter().zip(g))
                .map(|(&t, (f, g))| (t, f.f, g.f))
                .collect::<Vec<_>>()
        })
        .collect();
    let mut out = String::from("theta,expected_width,f_plus,f_minus\n");
    for (t, f, g) in rows {
        writeln!(out, "{t},{},{f},{g}", f + g).unwrap();
    }
    emit(a.output.out.as_ref(), &out)
}

pub fn polytope(a: PolytopeArgs) -> CliResult<()> {
    let set = read_set(&a.input)?;
    planar(&set, "polytope")?;
    let m = build_m(&set)?;
    emit(a.output.out.as_ref(), &(serde_json::to_string_pretty(&m).unwrap() + "\n"))
}

fn kernel_instance(points: Vec<WeightedPoint>, d: usize, eps: f64) -> Instance {
    Instance::Existential {
        dimension: d,
        points,
        epsilon: Some(eps),
    }
}

fn exp_report(set: &UncertainSet, kernel: &UncertainSet, deterministic: bool, dirs: &[Vec<f64>]) -> String {
    let locs = kernel.all_locations();
    let rows: Vec<(f64, f64)> = dirs
        .par_iter()
        .map(|u| {
            let p = expected_width(set, u);
            let s = if deterministic { point_width(&locs, u) } else { expected_width(kernel, u) };
            (p, s)
        })
        .collect();
    let mut out = String::from("direction,omega_P,omega_S,ratio\n");
    for (u, (p, s)) in dirs.iter().zip(rows) {
        let ratio = if p > 0.0 { s / p } else { 1.0 };
        writeln!(out, "{},{p},{s},{ratio}", fmt_vec(u)).unwrap();
    }
    out
}

pub fn expkernel(a: ExpkernelArgs) -> CliResult<()> {
    let set = read_set(&a.input)?;
    let d = set.dimension();
    let (inst, deterministic) = if a.subset {
        let s = existential(&set, "the subset kernel")?;
        let beta = a.beta.or(s.beta()).unwrap_or(1.0);
        let k = exp_kernel_subset(&s, a.eps, beta)?;
        (kernel_instance(k.set.points().to_vec(), d, a.eps), false)
    } else {
        let k = exp_kernel(&set, a.eps)?;
        let pts = k.points.into_iter().map(|c| WeightedPoint::new(c, 1.0)).collect();
        (kernel_instance(pts, d, a.eps), true)
    };
    if let Some(path) = &a.report.report {
        let kset = inst.clone().into_set()?;
        let dirs = report_directions(d, a.report.directions);
        emit(Some(path), &exp_report(&set, &kset, deterministic, &dirs))?;
    }
    emit(a.output.out.as_ref(), &(inst.to_json() + "\n"))
}

fn method(m: MethodArg) -> Method {
    match m {
        MethodArg::Simple => Method::Simple,
        MethodArg::Poisson => Method::Poisson,
        MethodArg::Tukey => Method::Tukey,
        MethodArg::TukeyFast => Method::TukeyFast,
        MethodArg::Subset => Method::Subset,
        MethodArg::Auto => Method::Auto,
    }
}

fn band(set: &UncertainSet, kernel: &QuantKernel, dirs: &[Vec<f64>], b: &BandArgs) -> CliResult<(String, BandReport)> {
    let ts = t_values(set, dirs, b.ts);
    let meta = kernel.meta();
    let flat: FlatSet;
    let reference: &(dyn WidthDistribution + Sync) = match b.against {
        Against::Exact => set,
        Against::Enumerate => {
            if set.realization_bits() > ENUMERATION_BIT_CAP {
                return Err(CliError::from(stochastic_coresets::Error::Limit {
                    module: "oracle",
                    message: format!(
                        "enumeration needs {} bits; the cap is {ENUMERATION_BIT_CAP}",
                        set.realization_bits()
                    ),
                }));
            }
            flat = set.flat();
            &Enumerated(&flat)
        }
    };
    let parts: Vec<BandReport> = dirs
        .par_iter()
        .map(|u| band_check(reference, kernel, meta.eps, meta.tau, std::slice::from_ref(u), &ts))
        .collect();
    let mut out = String::from("direction,t,cdf_lo_ref,cdf_kernel,cdf_hi_ref,in_band\n");
    let mut rows = Vec::new();
    for (u, part) in dirs.iter().zip(parts) {
        for mut r in part.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_vec(u),
                r.t,
                r.lower,
                r.kernel,
                r.upper,
                r.in_band
            )
            .unwrap();
            r.direction = rows.len() / ts.len();
            rows.push(r);
        }
    }
    let pass_fraction = if rows.is_empty() {
        1.0
    } else {
        rows.iter().filter(|r| r.in_band).count() as f64 / rows.len() as f64
    };
    Ok((out, BandReport { rows, pass_fraction }))
}

pub fn quantkernel(a: QuantkernelArgs) -> CliResult<()> {
    let set = read_set(&a.input)?;
    let cfg = QuantConfig {
        beta: a.beta,
        ..QuantConfig::default()
    };
    let k = quantkernel::build(&set, method(a.method), a.eps, a.tau, a.delta, a.seed, &cfg)?;
    for w in &k.meta().warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &a.report.report {
        let dirs = report_directions(set.dimension(), a.report.directions);
        let (csv, rep) = band(&set, &k, &dirs, &a.band)?;
        emit(Some(path), &csv)?;
        eprintln!("band pass fraction: {}", rep.pass_fraction);
    }
    emit(a.output.out.as_ref(), &(k.to_json() + "\n"))
}

fn fpow_report(set: &UncertainSet, k: &FpowKernel, count: usize) -> CliResult<String> {
    let dirs = polar_directions(set, count);
    let rows: Vec<CliResult<(f64, f64)>> = dirs
        .par_iter()
        .map(|u| Ok((expected_t_r(set, u, k.r)?, k.expected_t_r(u)?)))
        .collect();
    let mut out = String::from("direction,Etr_ref,Etr_kernel,rel_err\n");
    for (u, row) in dirs.iter().zip(rows) {
        let (r, e) = row?;
        let rel = if r > 0.0 { (e - r).abs() / r } else { (e - r).abs() };
        writeln!(out, "{},{r},{e},{rel}", fmt_vec(u)).unwrap();
    }
    Ok(out)
}

pub fn fpowkernel(a: FpowkernelArgs) -> CliResult<()> {
    let set = read_set(&a.input)?;
    let s = existential(&set, "the fpow kernel")?;
    let k = fpow_kernel(&s, a.eps, a.r, a.beta, a.seed)?;
    for w in &k.warnings {
        eprintln!("warning: {w}");
    }
    if let Some(path) = &a.report.report {
        emit(Some(path), &fpow_report(&set, &k, a.report.directions)?)?;
    }
    emit(a.output.out.as_ref(), &(k.to_json() + "\n"))
}

pub fn eval(a: EvalArgs) -> CliResult<()> {
    let set = read_set(&a.input)?;
    let text = read_text(&a.kernel)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("kernel is not JSON: {e}")))?;
    let csv = if value.get("form").is_some() {
        let k = QuantKernel::from_json(&text)?;
        let dirs = report_directions(set.dimension(), a.directions);
        let (csv, rep) = band(&set, &k, &dirs, &a.band)?;
        eprintln!("band pass fraction: {}", rep.pass_fraction);
        csv
    } else if value.get("r").is_some() {
        let k = FpowKernel::from_json(&text)?;
        fpow_report(&set, &k, a.directions)?
    } else {
        let inst = Instance::from_json(&text)?;
        let kset = inst.into_set()?;
        let deterministic = kset.beta() == Some(1.0);
        let dirs = report_directions(set.dimension(), a.directions);
        exp_report(&set, &kset, deterministic, &dirs)
    };
    emit(a.out.as_ref(), &csv)
}

pub fn fit(a: FitArgs) -> CliResult<()> {
    let set = read_set(&a.input)?;
    let s = existential(&set, "fit")?;
    let f = match a.shape {
        ShapeArg::Meb => expected_meb(&s, a.eps, a.beta, a.seed)?,
        ShapeArg::Shell => expected_shell(&s, a.eps, a.beta, a.seed)?,
    };
    for w in &f.warnings {
        eprintln!("warning: {w}");
    }
    let v = json!({
        "center": f.center,
        "value": f.value,
        "coreset_size": f.coreset_size,
        "optimizer_gap": f.optimizer_gap,
        "coreset_value": f.coreset_value,
        "lower_bound": f.lower_bound,
    });
    emit(a.output.out.as_ref(), &(serde_json::to_string_pretty(&v).unwrap() + "\n"))
}
