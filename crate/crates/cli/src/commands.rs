use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use ringrad::correlation::{d1, s_approx, s_exact};
use ringrad::dynamics::{
    self, center_state, default_span, propagate, time_grid, uniform_ring_state,
};
use ringrad::oracle::build_matrix;
use ringrad::spectrum::{eigen_ring, spectrum, track_p0_from_anchor, ModeLabel};
use ringrad::trapping;
use ringrad::{Complex64, Config, KernelF64};

use crate::format::{json_num, Cell, Table};
use crate::{Cli, CliError, Command, Format, KernelMode, RadiusArgs};

type Out = Result<String, CliError>;

pub(crate) fn execute(cli: &Cli) -> Out {
    let kernel = kernel(cli)?;
    let format = cli.opts.format;
    match &cli.command {
        Command::Correlation { x_grid } => correlation(&x_grid.values(), cli.opts.tol, format),
        Command::Spectrum { n, radius, center } => {
            spectrum_cmd(*n, &radii(radius)?, *center, &kernel, format)
        }
        Command::Crossings { n, radius_grid } => {
            crossings(*n, &radius_grid.values(), &kernel, format)
        }
        Command::Beats {
            n,
            radius,
            threshold,
        } => beats(n, &radii(radius)?, *threshold, &kernel, format),
        Command::Propagate {
            n,
            radius,
            center,
            initial,
            t_max,
            samples,
        } => {
            let center = *center || initial == "z";
            propagate_cmd(
                n, *radius, center, initial, *t_max, *samples, &kernel, format,
            )
        }
        Command::Trapscan {
            radii,
            n_min,
            n_max,
        } => trapscan(radii, *n_min, *n_max, &kernel, format),
        Command::DumpMatrix { n, radius, center } => {
            let config = Config::new(*n, *radius, *center)?;
            Ok(build_matrix(&config, &kernel)?.to_text())
        }
    }
}

fn kernel(cli: &Cli) -> Result<KernelF64, CliError> {
    match cli.opts.kernel {
        KernelMode::Approx => Ok(KernelF64::Approx),
        KernelMode::Exact if cli.opts.tol > 0.0 => Ok(KernelF64::Exact { tol: cli.opts.tol }),
        KernelMode::Exact => Err(CliError::Usage("--tol must be > 0".into())),
    }
}

fn radii(args: &RadiusArgs) -> Result<Vec<f64>, CliError> {
    match (args.radius, args.radius_grid) {
        (Some(r), _) if r > 0.0 && r.is_finite() => Ok(vec![r]),
        (Some(r), _) => Err(CliError::Usage(format!("radius must be > 0, got {r}"))),
        (None, Some(g)) => Ok(g.values()),
        (None, None) => Err(CliError::Usage(
            "one of --radius or --radius-grid is required".into(),
        )),
    }
}

fn emit(table: &Table, format: Format, extra: Option<(&str, Value)>) -> Out {
    match format {
        Format::Csv => Ok(table.to_csv()),
        Format::Json => {
            let mut obj = serde_json::Map::new();
            obj.insert("rows".into(), table.to_json());
            if let Some((k, v)) = extra {
                obj.insert(k.into(), v);
            }
            Ok(pretty(Value::Object(obj)))
        }
    }
}

fn pretty(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn correlation(xs: &[f64], tol: f64, format: Format) -> Out {
    if !(tol > 0.0) {
        return Err(CliError::Usage("--tol must be > 0".into()));
    }
    let rows: Vec<Vec<Cell>> = xs
        .par_iter()
        .map(|&x| {
            let cell = |v: ringrad::Result<f64>, what: &str| match v {
                Ok(v) => Cell::Num(v),
                Err(e) => {
                    eprintln!("warning: {what} at x = {x}: {e}");
                    Cell::Num(f64::NAN)
                }
            };
            vec![
                Cell::Num(x),
                cell(d1(x), "D1"),
                cell(s_exact(x, tol), "S_exact"),
                cell(s_approx(x), "S_approx"),
            ]
        })
        .collect();
    let mut table = Table::new(&["x", "D1", "S_exact", "S_approx"]);
    rows.into_iter().for_each(|r| table.push(r));
    emit(&table, format, None)
}

fn mode_row(table: &mut Table, r: f64, label: ModeLabel, mu: Complex64) {
    table.push(vec![
        r.into(),
        label.to_string().into(),
        (-mu.re / 2.0).into(),
        mu.im.into(),
    ]);
}

fn spectrum_cmd(n: usize, radii: &[f64], center: bool, kernel: &KernelF64, format: Format) -> Out {
    let rings = radii
        .par_iter()
        .map(|&r| eigen_ring(&Config::ring(n, r)?, kernel))
        .collect::<ringrad::Result<Vec<_>>>()?;
    let mut table = Table::new(&["r", "p", "shift", "rate"]);
    if !center {
        for (r, spec) in radii.iter().zip(&rings) {
            for m in &spec.modes {
                mode_row(&mut table, *r, m.label, m.mu);
            }
        }
        return emit(&table, format, None);
    }
    Config::centered(n, radii[0])?;
    let track = track_p0_from_anchor(n, radii, kernel)?;
    for (i, (r, spec)) in radii.iter().zip(&rings).enumerate() {
        mode_row(&mut table, *r, ModeLabel::ZeroPlus, track.plus[i]);
        mode_row(&mut table, *r, ModeLabel::ZeroMinus, track.minus[i]);
        for m in spec.modes.iter().filter(|m| m.label != ModeLabel::P(0)) {
            mode_row(&mut table, *r, m.label, m.mu);
        }
    }
    let crossings = Value::Array(track.crossings.iter().map(|&c| json_num(c)).collect());
    emit(&table, format, Some(("crossings", crossings)))
}

fn crossings(n: usize, radii: &[f64], kernel: &KernelF64, format: Format) -> Out {
    Config::centered(n, radii[0])?;
    let track = track_p0_from_anchor(n, radii, kernel)?;
    let mut table = Table::new(&["N", "index", "r"]);
    for (i, &c) in track.crossings.iter().enumerate() {
        table.push(vec![n.into(), (i + 1).into(), c.into()]);
    }
    emit(&table, format, None)
}

fn beats(ns: &[usize], radii: &[f64], threshold: f64, kernel: &KernelF64, format: Format) -> Out {
    let points: Vec<(usize, f64)> = ns
        .iter()
        .flat_map(|&n| radii.iter().map(move |&r| (n, r)))
        .collect();
    let results = points
        .par_iter()
        .map(|&(n, r)| dynamics::beat_frequency_with(n, r, kernel, threshold))
        .collect::<ringrad::Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "N",
        "r",
        "omega_r",
        "omega_shift_difference",
        "gamma_plus",
        "gamma_minus",
        "prefactor",
        "crossing",
    ]);
    for ((n, r), b) in points.iter().zip(&results) {
        table.push(vec![
            (*n).into(),
            (*r).into(),
            b.omega_r.into(),
            b.omega_shift_difference.into(),
            b.rates.0.into(),
            b.rates.1.into(),
            b.prefactor.into(),
            b.crossing.into(),
        ]);
    }
    emit(&table, format, None)
}

fn initial_state(name: &str, spec: &ringrad::Spectrum) -> Result<Vec<Complex64>, CliError> {
    let cfg = spec.config;
    let (n, sites) = (cfg.n_outer(), cfg.n_sites());
    let mode_state = |label: ModeLabel| {
        spec.mode(label)
            .map(|m| m.normalized_state())
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "mode {label} does not exist for this configuration"
                ))
            })
    };
    match name {
        "z" if cfg.has_center() => Ok(center_state(n)),
        "z" => Err(CliError::Usage(
            "initial state z needs the central atom".into(),
        )),
        "p0" => Ok(uniform_ring_state(n, sites)),
        "0+" => mode_state(ModeLabel::ZeroPlus),
        "0-" => mode_state(ModeLabel::ZeroMinus),
        _ if name.starts_with("p:") => {
            let k: usize = name[2..]
                .parse()
                .map_err(|_| CliError::Usage(format!("bad mode index in '{name}'")))?;
            if cfg.has_center() && k == 0 {
                return Err(CliError::Usage(
                    "with a central atom use p0, 0+ or 0- instead of p:0".into(),
                ));
            }
            mode_state(ModeLabel::P(k))
        }
        _ if Path::new(name).is_file() => read_coefficients(Path::new(name), sites),
        _ => Err(CliError::Usage(format!(
            "unknown initial state '{name}' (z, p0, 0+, 0-, p:<k> or a file)"
        ))),
    }
}

fn read_coefficients(path: &Path, sites: usize) -> Result<Vec<Complex64>, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad coefficient '{line}'")))
        };
        let z = match parts.as_slice() {
            [re] => Complex64::new(parse(re)?, 0.0),
            [re, im] => Complex64::new(parse(re)?, parse(im)?),
            _ => return Err(CliError::Usage(format!("bad coefficient '{line}'"))),
        };
        out.push(z);
    }
    if out.len() != sites {
        return Err(CliError::Usage(format!(
            "{} coefficients given, {sites} sites expected",
            out.len()
        )));
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn propagate_cmd(
    ns: &[usize],
    radius: f64,
    center: bool,
    initial: &str,
    t_max: Option<f64>,
    samples: usize,
    kernel: &KernelF64,
    format: Format,
) -> Out {
    if let Some(t) = t_max {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage("--t-max must be > 0".into()));
        }
    }
    let mut table = Table::new(&["N", "t", "P", "P_normalized", "survival"]);
    for &n in ns {
        let config = Config::new(n, radius, center)?;
        let spec = spectrum(&config, kernel)?;
        let init = initial_state(initial, &spec)?;
        let span = t_max.unwrap_or_else(|| {
            match (
                spec.mode(ModeLabel::ZeroPlus),
                spec.mode(ModeLabel::ZeroMinus),
            ) {
                (Some(a), Some(b)) => default_span((a.rate, b.rate)),
                _ => {
                    let slowest = spec
                        .modes
                        .iter()
                        .map(|m| m.rate)
                        .fold(f64::INFINITY, f64::min);
                    default_span((slowest, slowest))
                }
            }
        });
        let times = time_grid(span, samples);
        let traj = propagate(&spec, &init, &times)?;
        let c0 = uniform_ring_state::<f64>(n, config.n_sites());
        let prefactor = match (&spec.p0, initial) {
            (Some(p0), "z") if p0.beat_prefactor() > 0.0 => p0.beat_prefactor(),
            _ => 1.0,
        };
        for ((t, amps), s) in times.iter().zip(&traj.site_amplitudes).zip(&traj.survival) {
            let p = ringrad::scalar::hermitian(&c0, amps).norm_sqr();
            table.push(vec![
                n.into(),
                (*t).into(),
                p.into(),
                (p / prefactor).into(),
                (*s).into(),
            ]);
        }
    }
    emit(&table, format, None)
}

fn trapscan(radii: &[f64], n_min: usize, n_max: usize, kernel: &KernelF64, format: Format) -> Out {
    if n_min < 2 || n_min >= n_max {
        return Err(CliError::Usage("need 2 <= --n-min < --n-max".into()));
    }
    let ns: Vec<usize> = (n_min..=n_max).collect();
    let scans = radii
        .par_iter()
        .map(|&r| trapping::scan(r, &ns, kernel))
        .collect::<ringrad::Result<Vec<_>>>()?;
    let mut table = Table::new(&[
        "r",
        "N",
        "nn_exact",
        "nn_approx",
        "p_min",
        "gamma_min",
        "neg_log_gamma_min",
    ]);
    for s in &scans {
        for e in &s.entries {
            table.push(vec![
                s.radius.into(),
                e.n.into(),
                e.nn_exact.into(),
                e.nn_approx.into(),
                e.p_min.to_string().into(),
                e.gamma_min.into(),
                e.neg_log_gamma_min.into(),
            ]);
        }
    }
    if format == Format::Csv {
        return Ok(table.to_csv());
    }
    let fits: Vec<Value> = scans
        .iter()
        .map(|s| {
            let f = &s.fit;
            let law = s.lifetime_law();
            json!({
                "radius": json_num(s.radius),
                "slope": json_num(f.slope),
                "intercept": json_num(f.intercept),
                "n_hat": json_num(f.n_hat),
                "n_hat_formula": json_num(2.0 * std::f64::consts::TAU * s.radius),
                "critical_nn": json_num(s.critical_nn()),
                "plateau": json_num(f.plateau),
                "residual_rms": json_num(f.residual_rms),
                "fitted_range": json_num(f.fitted_range),
                "points": f.points,
                "lifetime_law_consistent": law.consistent,
                "monotone_violations": s.monotone_violations.iter().map(|(n, d)| json!([n, json_num(*d)])).collect::<Vec<_>>(),
            })
        })
        .collect();
    let decreasing = scans.windows(2).all(|w| w[1].fit.slope < w[0].fit.slope);
    Ok(pretty(json!({
        "fits": fits,
        "slopes_strictly_decreasing": decreasing,
        "rows": table.to_json(),
    })))
}
