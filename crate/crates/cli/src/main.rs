mod args;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use num_complex::Complex64;
use serde::Serialize;

use args::{Cli, Command, Common, Format, Output, SuiteArgs};
use ratsurf::charts;
use ratsurf::dynamics::{self, FixedPointType, ManifoldConfig, Orbit};
use ratsurf::exact::ZPoly;
use ratsurf::family::{compute_c_n, AffinePoint};
use ratsurf::lattice;
use ratsurf::params::ParamFile;
use ratsurf::reflections;
use ratsurf::report::{self, Status, SuiteConfig, VerdictReport};
use ratsurf::{Error, Result};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParams(_) | Error::ParamFile(_) | Error::Degenerate(_) => ExitCode::from(EXIT_USAGE),
                _ => ExitCode::from(EXIT_FAIL),
            }
        }
    }
}

/// `Ok(true)` when every check passed.
fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Spectrum(c) => spectrum(&c),
        Command::Cn { n, out } => cn(n, &out),
        Command::Verify(s) => verify(&s),
        Command::FixedPoints(c) => fixed_points(&c),
        Command::Orbit { common, seeds, points, steps, inverse } => {
            orbit(&common, seeds.as_deref(), &points, steps, inverse)
        }
        Command::Unstable { common, arclength, spacing, window, stable } => {
            let cfg = ManifoldConfig { arclength, spacing, window, ..Default::default() };
            unstable(&common, &cfg, stable)
        }
        Command::Charts(s) => chart_cmd(&s),
        Command::Parabolic(s) => parabolic(&s),
        Command::Weyl(c) => weyl(&c),
        Command::Degrees { common, m } => degrees(&common, m),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::ParamFile(format!("{}: {e}", path.display()))
}

/// Prints in the requested format and writes `name.json` (and `name.csv`
/// when there is tabular data) into `--out`.
fn emit<T: Serialize>(out: &Output, name: &str, data: &T, csv: Option<&str>, text: &str) -> Result<()> {
    let json = serde_json::to_string_pretty(data).map_err(|e| Error::ParamFile(e.to_string()))? + "\n";
    match (out.format, csv) {
        (Format::Json, _) | (Format::Csv, None) => print!("{json}"),
        (Format::Csv, Some(csv)) => print!("{csv}"),
        (Format::Text, _) => print!("{text}"),
    }
    if let Some(dir) = &out.out {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let path = dir.join(format!("{name}.json"));
        fs::write(&path, &json).map_err(|e| io_err(&path, e))?;
        if let Some(csv) = csv {
            let path = dir.join(format!("{name}.csv"));
            fs::write(&path, csv).map_err(|e| io_err(&path, e))?;
        }
    }
    Ok(())
}

fn fmt_poly(p: &ZPoly) -> String {
    let mut s = String::new();
    for (d, c) in p.to_strings().iter().enumerate().rev() {
        if c == "0" {
            continue;
        }
        let (neg, mag) = match c.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, c.as_str()),
        };
        if s.is_empty() {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if mag == "1" && d > 0 { "" } else { mag };
        match d {
            0 => s.push_str(mag),
            1 => write!(s, "{coeff}x").unwrap(),
            _ => write!(s, "{coeff}x^{d}").unwrap(),
        }
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.12}", z.re)
    } else {
        format!("{:.12}{:+.12}i", z.re, z.im)
    }
}

#[derive(Serialize)]
struct SpectrumOut {
    n: u32,
    k: u32,
    lambda: String,
    entropy: String,
    chi: Vec<String>,
    char_poly: Vec<String>,
    cofactor: Vec<String>,
    cyclotomic_factors: Vec<(u32, usize)>,
    non_cyclotomic: Vec<String>,
    det: String,
    report: VerdictReport,
}

fn spectrum(c: &Common) -> Result<bool> {
    let p = c.map.params()?;
    let (n, k) = (p.n as usize, p.k as usize);
    let sp = lattice::spectrum(n, k);
    let mut r = VerdictReport::new("spectrum");
    r.exact("chi_divides_char_poly", sp.divisible, "");
    r.numeric("cofactor_unit_roots", sp.cofactor_unit_deviation, 1e-9, "");
    let lambda = format!("{:.12}", sp.lambda);
    let entropy = format!("{:.12}", sp.entropy);
    let cyc: Vec<String> = sp.cyclotomic_factors.iter().map(|(m, e)| format!("Phi{m}^{e}")).collect();
    let mut text = String::new();
    writeln!(text, "n = {n}, k = {k}").unwrap();
    writeln!(text, "chi = {}", fmt_poly(&sp.chi)).unwrap();
    writeln!(text, "lambda = {lambda}").unwrap();
    writeln!(text, "entropy = {entropy}").unwrap();
    writeln!(text, "char_poly = {}", fmt_poly(&sp.char_poly)).unwrap();
    writeln!(text, "char_poly = chi * ({})", fmt_poly(&sp.cofactor)).unwrap();
    writeln!(text, "cyclotomic factors: {}", if cyc.is_empty() { "none".into() } else { cyc.join(" ") }).unwrap();
    writeln!(text, "non-cyclotomic part: {}", fmt_poly(&sp.non_cyclotomic)).unwrap();
    writeln!(text, "det = {}", sp.det).unwrap();
    let ok = r.passed();
    let data = SpectrumOut {
        n: p.n,
        k: p.k,
        lambda,
        entropy,
        chi: sp.chi.to_strings(),
        char_poly: sp.char_poly.to_strings(),
        cofactor: sp.cofactor.to_strings(),
        cyclotomic_factors: sp.cyclotomic_factors.clone(),
        non_cyclotomic: sp.non_cyclotomic.to_strings(),
        det: sp.det.to_string(),
        report: r,
    };
    emit(&c.out, "spectrum", &data, None, &text)?;
    Ok(ok)
}

fn cn(n: u32, out: &Output) -> Result<bool> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("n = {n} must be at least 2")));
    }
    let values: Vec<f64> = compute_c_n(n).into_iter().map(|c| if c.abs() < 5e-12 { 0.0 } else { c }).collect();
    let strs: Vec<String> = values.iter().map(|c| format!("{c:.11}")).collect();
    #[derive(Serialize)]
    struct CnOut {
        n: u32,
        c: Vec<String>,
    }
    emit(out, "cn", &CnOut { n, c: strs.clone() }, None, &(strs.join(", ") + "\n"))?;
    Ok(true)
}

fn suite_config(s: &SuiteArgs) -> Result<SuiteConfig> {
    let mut cfg = SuiteConfig { samples: s.samples, seed: s.seed, degree_steps: s.steps, ..Default::default() };
    if let Some(t) = s.tol {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::InvalidParams("--tol must be positive".into()));
        }
        cfg.transition_tol = t;
        cfg.deviation_tol = t;
    }
    if s.samples == 0 {
        return Err(Error::InvalidParams("--samples must be positive".into()));
    }
    Ok(cfg)
}

fn report_text(r: &VerdictReport, out: &mut String) {
    for c in &r.checks {
        let tag = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Report => "info",
        };
        let num = match (c.residual, c.bound) {
            (Some(x), Some(b)) => format!(" ({x:.3e} <= {b:.1e})"),
            _ => String::new(),
        };
        writeln!(out, "[{tag}] {}/{}{num} {}", r.suite, c.id, c.detail).unwrap();
    }
    writeln!(out, "{}: {}", r.suite, if r.passed() { "pass" } else { "FAIL" }).unwrap();
}

fn verify(s: &SuiteArgs) -> Result<bool> {
    let p = s.common.map.params()?;
    let cfg = suite_config(s)?;
    let v = report::verify(&p, &cfg);
    let mut text = String::new();
    for r in &v.suites {
        report_text(r, &mut text);
    }
    writeln!(text, "overall: {}", if v.passed() { "pass" } else { "FAIL" }).unwrap();
    emit(&s.common.out, "verify", &v, None, &text)?;
    Ok(v.passed())
}

fn fixed_points(c: &Common) -> Result<bool> {
    let p = c.map.params()?;
    let fps = dynamics::fixed_points(&p)?;
    let mut csv = String::from("index,zeta_re,zeta_im,trace_re,trace_im,type,multiplicity,residual\n");
    let mut text = String::new();
    for (i, r) in fps.iter().enumerate() {
        let kind = serde_json::to_value(r.kind).unwrap().as_str().unwrap_or("").to_string();
        writeln!(
            csv,
            "{i},{:.15e},{:.15e},{:.15e},{:.15e},{kind},{},{:.3e}",
            r.zeta.re, r.zeta.im, r.trace.re, r.trace.im, r.multiplicity, r.residual
        )
        .unwrap();
        writeln!(text, "{i}: zeta = {}, trace = {}, {kind}", fmt_c(r.zeta), fmt_c(r.trace)).unwrap();
    }
    let real = fps.iter().filter(|r| r.is_real()).count();
    writeln!(text, "{} fixed points, {real} real", fps.len()).unwrap();
    emit(&c.out, "fixed_points", &fps, Some(&csv), &text)?;
    Ok(fps.iter().all(|r| r.residual <= dynamics::FIXED_TOL))
}

fn parse_point(s: &str) -> Result<AffinePoint> {
    let bad = || Error::InvalidParams(format!("expected x,y, got {s:?}"));
    let (x, y) = s.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    Ok(AffinePoint::real(x, y))
}

fn read_seeds(path: &Path) -> Result<Vec<AffinePoint>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    if text.trim_start().starts_with('[') {
        let pts: Vec<[f64; 2]> = serde_json::from_str(&text).map_err(|e| Error::ParamFile(e.to_string()))?;
        return Ok(pts.into_iter().map(|[x, y]| AffinePoint::real(x, y)).collect());
    }
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_point(line) {
            Ok(p) => out.push(p),
            // a header line
            Err(_) if i == 0 => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

fn orbit(c: &Common, seeds: Option<&Path>, points: &[String], steps: usize, inverse: bool) -> Result<bool> {
    let p = c.map.params()?;
    let mut pts = match seeds {
        Some(path) => read_seeds(path)?,
        None => Vec::new(),
    };
    for s in points {
        pts.push(parse_point(s)?);
    }
    if pts.is_empty() {
        return Err(Error::InvalidParams("no seeds: pass --seeds <file> or --point x,y".into()));
    }
    let orbits: Vec<Orbit> = pts
        .iter()
        .map(|&q| {
            if inverse {
                dynamics::iterate_orbit_inverse(&p, q, steps)
            } else {
                dynamics::iterate_orbit(&p, q, steps)
            }
        })
        .collect();
    let mut csv = Vec::new();
    dynamics::write_orbits_csv(&mut csv, &orbits).map_err(|e| Error::ParamFile(e.to_string()))?;
    let csv = String::from_utf8(csv).expect("ascii");
    let mut text = String::new();
    for (i, o) in orbits.iter().enumerate() {
        let last = o.points.last().unwrap();
        let status = serde_json::to_value(o.status).unwrap().as_str().unwrap_or("").to_string();
        writeln!(text, "seed {i}: {} steps, {status}, last ({}, {})", o.points.len() - 1, fmt_c(last.x), fmt_c(last.y))
            .unwrap();
    }
    emit(&c.out, "orbits", &orbits, Some(&csv), &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct ManifoldMeta {
    params: ParamFile,
    manifold: &'static str,
    config: ManifoldConfig,
    saddles: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct ManifoldOut {
    metadata: ManifoldMeta,
    polylines: Vec<dynamics::Polyline>,
}

fn unstable(c: &Common, cfg: &ManifoldConfig, stable: bool) -> Result<bool> {
    let p = c.map.params()?;
    if !p.is_real() {
        return Err(Error::InvalidParams("manifolds are traced for real parameters".into()));
    }
    if !(cfg.spacing > 0.0 && cfg.arclength > 0.0 && cfg.window > 0.0) {
        return Err(Error::InvalidParams("--spacing, --arclength and --window must be positive".into()));
    }
    let fps = dynamics::fixed_points(&p)?;
    let saddles: Vec<_> = fps.iter().filter(|r| r.kind == FixedPointType::Saddle).collect();
    let mut lines = Vec::new();
    for fp in &saddles {
        let branches =
            if stable { dynamics::stable_manifold(&p, fp, cfg)? } else { dynamics::unstable_manifold(&p, fp, cfg)? };
        lines.extend(branches);
    }
    let mut csv = Vec::new();
    dynamics::write_polylines_csv(&mut csv, &lines).map_err(|e| Error::ParamFile(e.to_string()))?;
    let csv = String::from_utf8(csv).expect("ascii");
    let mut text = String::new();
    for (i, l) in lines.iter().enumerate() {
        writeln!(
            text,
            "branch {i}: saddle ({:.12}, {:.12}) side {:+} points {} length {:.6} stop {}",
            l.fixed_point[0],
            l.fixed_point[1],
            l.side,
            l.points.len(),
            l.length(),
            l.stop
        )
        .unwrap();
    }
    let data = ManifoldOut {
        metadata: ManifoldMeta {
            params: p.to_file_format(),
            manifold: if stable { "stable" } else { "unstable" },
            config: *cfg,
            saddles: saddles.iter().map(|r| [r.zeta.re, r.zeta.re]).collect(),
        },
        polylines: lines,
    };
    emit(&c.out, if stable { "stable" } else { "unstable" }, &data, Some(&csv), &text)?;
    Ok(true)
}

#[derive(Serialize)]
struct ChartsOut {
    report: VerdictReport,
    transitions: Vec<charts::TransitionRecord>,
}

fn chart_cmd(s: &SuiteArgs) -> Result<bool> {
    let p = s.common.map.params()?;
    let cfg = suite_config(s)?;
    let r = report::chart_suite(&p, &cfg);
    let transitions = if p.delta_is_one() { charts::transition_suite(&p, cfg.samples, cfg.seed)? } else { Vec::new() };
    let mut csv = String::from("chart,target,xi_re,xi_im,closed_re,closed_im,numeric_re,numeric_im,abs_err\n");
    for t in &transitions {
        writeln!(
            csv,
            "{},{},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.3e}",
            t.chart, t.target, t.xi[0], t.xi[1], t.closed[0], t.closed[1], t.numeric[0], t.numeric[1], t.abs_err
        )
        .unwrap();
    }
    let mut text = String::new();
    report_text(&r, &mut text);
    let ok = r.passed();
    emit(&s.common.out, "charts", &ChartsOut { report: r, transitions }, Some(&csv), &text)?;
    Ok(ok)
}

#[derive(Serialize)]
struct ParabolicOut {
    report: VerdictReport,
    components: Vec<charts::ParabolicComponent>,
}

fn parabolic(s: &SuiteArgs) -> Result<bool> {
    let p = s.common.map.params()?;
    let cfg = suite_config(s)?;
    let r = report::parabolic_suite(&p, &cfg);
    let components = if p.delta_is_one() { charts::parabolic_suite(&p, cfg.samples, cfg.seed)? } else { Vec::new() };
    let mut text = String::new();
    report_text(&r, &mut text);
    let ok = r.passed();
    emit(&s.common.out, "parabolic", &ParabolicOut { report: r, components }, None, &text)?;
    Ok(ok)
}

#[derive(Serialize)]
struct WeylOut {
    report: VerdictReport,
    verdict: reflections::WeylVerdict,
}

fn weyl(c: &Common) -> Result<bool> {
    let p = c.map.params()?;
    let (n, k) = (p.n as usize, p.k as usize);
    let r = report::factorization_suite(n, k);
    let mut text = String::new();
    report_text(&r, &mut text);
    let ok = r.passed();
    emit(&c.out, "weyl", &WeylOut { report: r, verdict: reflections::weyl_verdict(n, k) }, None, &text)?;
    Ok(ok)
}

#[derive(Serialize)]
struct DegreesOut {
    n: u32,
    k: u32,
    degrees: Vec<String>,
    ratio: String,
    lambda: String,
    recurrence: bool,
}

fn degrees(c: &Common, m: usize) -> Result<bool> {
    let p = c.map.params()?;
    if m < 1 {
        return Err(Error::InvalidParams("--m must be at least 1".into()));
    }
    let f = lattice::pushforward_matrix(&p);
    let d = lattice::degree_sequence(&f, m);
    let cp = f.char_poly();
    let recurrence = lattice::satisfies_recurrence(&d, &cp);
    let ratio = format!("{:.12}", report::big_ratio(&d[m], &d[m - 1]));
    let lambda = format!("{:.12}", lattice::spectral_radius(p.n as usize, p.k as usize));
    let degrees: Vec<String> = d.iter().map(|x| x.to_string()).collect();
    let mut csv = String::from("m,d\n");
    for (i, x) in degrees.iter().enumerate() {
        writeln!(csv, "{i},{x}").unwrap();
    }
    let text = format!("d = {}\nratio d_{m}/d_{} = {ratio}\nlambda = {lambda}\n", degrees.join(", "), m - 1);
    emit(&c.out, "degrees", &DegreesOut { n: p.n, k: p.k, degrees, ratio, lambda, recurrence }, Some(&csv), &text)?;
    Ok(recurrence)
}
