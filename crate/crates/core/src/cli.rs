//! The `shla` command-line tool.

use crate::acceptance;
use crate::algebroid::LInftyContext;
use crate::chart::{builtin_flat_torus, builtin_oscillator, load_chart, oscillator_levels, rational, ChartSpec, Point};
use crate::deformation::{fiber_profile, kuranishi, mc_solve, McOutcome, Profile, SolveOptions};
use crate::foliation::{pi_bracket, pi_differential, splitting_transform, transverse_curvature, TransverseField};
use crate::form::{subsets, Form};
use crate::leafform::{d_f, eval_form, form_from_doc, form_to_doc, one_form, FormDoc, LeafForm};
use crate::oracle::grassmann::{brute_force, grassmann_dimension, grassmann_is_coisotropic, sample};
use crate::oracle::{graph_coisotropy_defect, master_residual, validity_radius};
use crate::parallel::par_map;
use crate::report::{chart_hash, obstruction_doc, series_doc, RunManifest};
use crate::sampling::{default_seed, rng};
use crate::{expr, randgen};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "shla", version, about = "Coisotropic deformation toolkit for pre-symplectic foliation charts")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Sampling seed (default: $SHLA_SEED or 7).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Directory for result files and the run manifest; stdout otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Also write whitespace-separated `.dat` files for gnuplot.
    #[arg(long, global = true)]
    pub emit_gnuplot: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Chart operations.
    Chart {
        #[command(subcommand)]
        action: ChartAction,
    },
    /// Transverse curvature of the chart's splitting.
    Curvature {
        chart: String,
        /// Evaluate at a point, e.g. `y1=0.1,y2=0.2,q1=0,q2=0`.
        #[arg(long)]
        at: Option<String>,
        /// Run a residual suite instead of printing components.
        #[arg(long, value_enum)]
        check: Option<CurvatureCheck>,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Leafwise differential of a form.
    Df { chart: String, form: PathBuf },
    /// Check the L∞ relations on random inputs.
    LinftyCheck {
        chart: String,
        #[arg(long, default_value_t = 3)]
        arity: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Fiber profile of the Kuranishi class of a first-order deformation (CSV).
    Kuranishi {
        chart: String,
        #[arg(long)]
        gamma1: PathBuf,
        /// Nodes per transverse coordinate.
        #[arg(long, default_value_t = 32)]
        grid: usize,
        /// Leaf quadrature: `2 nq + 1` nodes per leaf coordinate.
        #[arg(long, default_value_t = 8)]
        nq: usize,
    },
    /// Solve the Maurer-Cartan equation order by order (JSON).
    McSolve {
        chart: String,
        #[arg(long)]
        gamma1: PathBuf,
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 16)]
        trunc: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Coisotropy defect and master-equation residual of a section's graph.
    VerifyGraph {
        chart: String,
        #[arg(long)]
        section: PathBuf,
        /// Rational multiplier applied to the section, e.g. `1/10` or `0.05`.
        #[arg(long, default_value = "1")]
        scale: String,
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Coisotropic subspaces near the model subspace.
    Grassmann {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
    },
    /// Rebuild one of the worked examples.
    Reproduce {
        #[arg(value_enum)]
        name: Example,
        /// Oscillator parameter.
        #[arg(long, default_value = "3/2")]
        alpha: String,
    },
    /// Run every acceptance criterion.
    Suite,
}

#[derive(Subcommand, Debug)]
pub enum ChartAction {
    /// Parse and check a chart.
    Validate { chart: String },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CurvatureCheck {
    Bianchi,
    Transform,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Example {
    /// Flat-torus obstruction and the unobstructed family.
    #[value(name = "zambon")]
    TorusObstruction,
    /// Oscillator chart checks.
    Oscillator,
}

/// Collected result files of one run.
struct Output {
    dir: Option<PathBuf>,
    gnuplot: bool,
    files: Vec<String>,
}

impl Output {
    fn new(g: &Global) -> Result<Output> {
        if let Some(d) = &g.out {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
        }
        Ok(Output { dir: g.out.clone(), gnuplot: g.emit_gnuplot, files: Vec::new() })
    }

    /// Write `name` into the output directory, or print it.
    fn emit(&mut self, name: &str, contents: &str) -> Result<()> {
        match &self.dir {
            Some(d) => {
                let p = d.join(name);
                std::fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
                self.files.push(name.to_string());
            }
            None => print!("{contents}"),
        }
        Ok(())
    }

    /// Write `name` into the output directory; skipped on stdout.
    fn emit_quiet(&mut self, name: &str, contents: &str) -> Result<()> {
        if self.dir.is_some() {
            self.emit(name, contents)?;
        }
        Ok(())
    }

    fn emit_dat(&mut self, name: &str, contents: &str) -> Result<()> {
        if !self.gnuplot {
            return Ok(());
        }
        let d = self.dir.clone().unwrap_or_else(|| PathBuf::from("."));
        let p = d.join(name);
        std::fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Manifest inputs collected while a command runs.
#[derive(Default)]
struct Meta {
    chart: Option<String>,
    tolerances: BTreeMap<String, f64>,
    truncation: Option<usize>,
}

/// Resolve `builtin:flat-torus`, `builtin:oscillator[:alpha]` or a JSON path.
pub fn resolve_chart(spec: &str) -> Result<ChartSpec> {
    if let Some(rest) = spec.strip_prefix("builtin:") {
        let mut parts = rest.splitn(2, ':');
        return match (parts.next(), parts.next()) {
            (Some("flat-torus"), None) => Ok(builtin_flat_torus()),
            (Some("oscillator"), a) => {
                let a = a.unwrap_or("3/2");
                let alpha = rational(a).with_context(|| format!("bad oscillator parameter `{a}`"))?;
                Ok(builtin_oscillator(&alpha)?)
            }
            _ => bail!("unknown builtin chart `{spec}` (builtin:flat-torus, builtin:oscillator[:alpha])"),
        };
    }
    let text = std::fs::read_to_string(spec).with_context(|| format!("reading chart {spec}"))?;
    load_chart(&text).with_context(|| format!("loading chart {spec}"))
}

fn read_form(chart: &ChartSpec, path: &Path) -> Result<LeafForm> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading form {}", path.display()))?;
    let doc: FormDoc = serde_json::from_str(&text).with_context(|| format!("parsing form {}", path.display()))?;
    form_from_doc(chart, &doc).with_context(|| format!("form {}", path.display()))
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Parse arguments, run, and map the outcome to an exit code: 0 on success,
/// 1 when a check fails, 2 on bad input.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli, std::env::args().collect()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Run a parsed command line; `Ok(false)` means a check failed.
pub fn run(cli: &Cli, argv: Vec<String>) -> Result<bool> {
    let t0 = Instant::now();
    let seed = cli.global.seed.unwrap_or_else(default_seed);
    let mut out = Output::new(&cli.global)?;
    let mut meta = Meta::default();
    let threads = cli.global.threads;
    let ok = match &cli.command {
        Command::Chart { action: ChartAction::Validate { chart } } => {
            let c = resolve_chart(chart)?;
            meta.chart = Some(chart_hash(&c));
            cmd_validate(&c, seed, &mut out)?
        }
        Command::Curvature { chart, at, check, points } => {
            let c = resolve_chart(chart)?;
            meta.chart = Some(chart_hash(&c));
            meta.tolerances.insert("residual".into(), 1e-8);
            cmd_curvature(&c, at.as_deref(), *check, *points, seed, &mut out)?
        }
        Command::Df { chart, form } => {
            let c = resolve_chart(chart)?;
            meta.chart = Some(chart_hash(&c));
            let xi = read_form(&c, form)?;
            let d = d_f(&c, &xi)?;
            out.emit("df.json", &format!("{}\n", serde_json::to_string_pretty(&form_to_doc(&d))?))?;
            true
        }
        Command::LinftyCheck { chart, arity, trials, points, tol } => {
            let c = resolve_chart(chart)?;
            meta.chart = Some(chart_hash(&c));
            meta.tolerances.insert("residual".into(), *tol);
            cmd_linfty(&c, *arity, *trials, *points, *tol, seed, threads, &mut out)?
        }
        Command::Kuranishi { chart, gamma1, grid, nq } => {
            let c = resolve_chart(chart)?;
            meta.chart = Some(chart_hash(&c));
            meta.truncation = Some(*nq);
            let g = read_form(&c, gamma1)?;
            let kr = kuranishi(&c, &g)?;
            let prof = fiber_profile(&c, &kr, *grid, *nq)?;
            emit_profile(&mut out, "kuranishi", &prof)?;
            true
        }
        Command::McSolve { chart, gamma1, order, trunc, tol } => {
            let c = resolve_chart(chart)?;
            meta.chart = Some(chart_hash(&c));
            meta.truncation = Some(*trunc);
            let opts = SolveOptions { order: *order, trunc: *trunc, tol: *tol, seed, ..Default::default() };
            meta.tolerances.insert("obstruction".into(), opts.tol);
            meta.tolerances.insert("closedness".into(), opts.closed_tol);
            meta.tolerances.insert("certificate".into(), 1e-9);
            let g = read_form(&c, gamma1)?;
            match mc_solve(&c, &g, &opts)? {
                McOutcome::Solved(s) => {
                    out.emit("series.json", &format!("{}\n", serde_json::to_string_pretty(&series_doc(&s))?))?;
                }
                McOutcome::Obstructed(r) => {
                    out.emit("obstruction.json", &format!("{}\n", serde_json::to_string_pretty(&obstruction_doc(&c, &r))?))?;
                }
            }
            true
        }
        Command::VerifyGraph { chart, section, scale, points } => {
            let c = resolve_chart(chart)?;
            meta.chart = Some(chart_hash(&c));
            meta.tolerances.insert("graph_defect".into(), 1e-8);
            meta.tolerances.insert("master_residual".into(), 1e-7);
            let s = read_form(&c, section)?;
            cmd_verify(&c, &s, scale, *points, seed, &mut out)?
        }
        Command::Grassmann { n, k, samples } => {
            meta.tolerances.insert("condition".into(), 1e-10);
            meta.tolerances.insert("brute_force".into(), 1e-8);
            cmd_grassmann(*n, *k, *samples, seed, threads, &mut out)?
        }
        Command::Reproduce { name, alpha } => match name {
            Example::TorusObstruction => {
                let c = builtin_flat_torus();
                meta.chart = Some(chart_hash(&c));
                meta.tolerances.insert("profile".into(), 1e-9);
                meta.truncation = Some(SolveOptions::default().trunc);
                reproduce_torus(seed, &mut out)?
            }
            Example::Oscillator => {
                let a = rational(alpha).with_context(|| format!("bad oscillator parameter `{alpha}`"))?;
                let c = builtin_oscillator(&a)?;
                meta.chart = Some(chart_hash(&c));
                meta.tolerances.insert("curvature".into(), 1e-12);
                meta.tolerances.insert("bracket".into(), 1e-9);
                reproduce_oscillator(&c, seed, &mut out)?
            }
        },
        Command::Suite => cmd_suite(seed, threads, &mut out)?,
    };
    if let Some(dir) = &out.dir {
        let manifest = RunManifest {
            command: argv,
            chart_hash: meta.chart,
            seed,
            tolerances: meta.tolerances,
            truncation: meta.truncation,
            version: env!("CARGO_PKG_VERSION").to_string(),
            files: out.files.clone(),
            wall_time_s: t0.elapsed().as_secs_f64(),
        };
        let p = dir.join("manifest.json");
        std::fs::write(&p, format!("{}\n", serde_json::to_string_pretty(&manifest)?))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ok)
}

fn cmd_validate(c: &ChartSpec, seed: u64, out: &mut Output) -> Result<bool> {
    c.validate(64, seed)?;
    let pts = c.sample(64, seed);
    let f = transverse_curvature(c).max_abs(c, &pts);
    let periodic: Vec<String> =
        c.coord_names().iter().zip(&c.periods).map(|(n, p)| format!("{n}:{}", p.map_or("open".into(), |t| t.to_string()))).collect();
    let mut s = String::new();
    s.push_str(&format!("chart {} (k={}, r={})\n", c.name, c.k, c.r));
    s.push_str(&format!("coordinates {}\n", periodic.join(" ")));
    s.push_str("omega closed, skew and nondegenerate at 64 points: ok\n");
    s.push_str(&format!("max |F| at 64 points: {f:.3e}{}\n", if f < 1e-12 { " (flat)" } else { "" }));
    s.push_str(&format!("sha256 {}\n", chart_hash(c)));
    out.emit("validate.txt", &s)?;
    Ok(true)
}

fn random_field(c: &ChartSpec, deg: usize, seed: u64) -> TransverseField {
    let mut g = rng(seed);
    let vars = c.coord_refs();
    let n = crate::form::binomial(c.k2(), deg);
    let comp = (0..c.r).map(|_| Form { deg, dim: c.k2(), c: (0..n).map(|_| randgen::trig_poly(&mut g, &vars, 2, 2)).collect() }).collect();
    TransverseField { deg, k2: c.k2(), r: c.r, comp }
}

fn cmd_curvature(
    c: &ChartSpec,
    at: Option<&str>,
    check: Option<CurvatureCheck>,
    points: usize,
    seed: u64,
    out: &mut Output,
) -> Result<bool> {
    let f = transverse_curvature(c);
    let pts = c.sample(points, seed);
    let idx = subsets(c.k2(), 2);
    match check {
        Some(CurvatureCheck::Bianchi) => {
            let mut s = String::new();
            let mut ok = true;
            if c.k2() >= 3 {
                let r = pi_differential(c, &f)?.max_abs(c, &pts);
                ok &= r < 1e-8;
                s.push_str(&format!("d^Pi F residual {r:.3e} {}\n", pass(r < 1e-8)));
            } else {
                s.push_str("d^Pi F: transverse 3-forms vanish for 2k = 2\n");
            }
            let b = random_field(c, 0, seed);
            let lhs = pi_differential(c, &pi_differential(c, &b)?)?;
            let r = lhs.sub(&pi_bracket(c, &f, &b)?).max_abs(c, &pts);
            ok &= r < 1e-8;
            s.push_str(&format!("(d^Pi)^2 B - [F,B] residual {r:.3e} {}\n", pass(r < 1e-8)));
            out.emit("bianchi.txt", &s)?;
            Ok(ok)
        }
        Some(CurvatureCheck::Transform) => {
            let b = random_field(c, 1, seed);
            let moved = splitting_transform(c, &b)?;
            let want = f.add(&pi_differential(c, &b)?).add(&pi_bracket(c, &b, &b)?);
            let r = transverse_curvature(&moved).sub(&want).max_abs(c, &pts);
            out.emit("transform.txt", &format!("F(R+B) - (F + d^Pi B + [B,B]) residual {r:.3e} {}\n", pass(r < 1e-8)))?;
            Ok(r < 1e-8)
        }
        None => {
            let mut s = String::new();
            match at {
                Some(text) => {
                    let p = c.parse_point(text)?;
                    let vals = f.eval_points(c, std::slice::from_ref(&p)).remove(0);
                    s.push_str("beta,i,j,F\n");
                    for beta in 0..c.r {
                        for (t, ij) in idx.iter().enumerate() {
                            s.push_str(&format!("{},{},{},{:.17e}\n", beta + 1, ij[0] + 1, ij[1] + 1, vals[beta * idx.len() + t]));
                        }
                    }
                }
                None => {
                    for beta in 0..c.r {
                        for (t, ij) in idx.iter().enumerate() {
                            s.push_str(&format!("F^{}_{}{} = {}\n", beta + 1, ij[0] + 1, ij[1] + 1, f.comp[beta].c[t]));
                        }
                    }
                }
            }
            out.emit("curvature.txt", &s)?;
            Ok(true)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_linfty(
    c: &ChartSpec,
    arity: usize,
    trials: usize,
    points: usize,
    tol: f64,
    seed: u64,
    threads: usize,
    out: &mut Output,
) -> Result<bool> {
    if arity == 0 {
        bail!("arity must be at least 1");
    }
    let ctx = LInftyContext::new(c, arity.max(2) + 1)?;
    let mut g = rng(seed);
    let jobs: Vec<(u64, Vec<usize>)> =
        (0..trials as u64).map(|t| (seed.wrapping_mul(1_000_003).wrapping_add(t), randgen::linfty_degrees(&mut g, arity, c.r))).collect();
    let results = par_map(threads, &jobs, |(s, degs)| -> Result<f64> {
        let xs: Vec<LeafForm> = degs.iter().enumerate().map(|(i, &d)| randgen::form(c, d, 2, s + 17 * i as u64)).collect();
        let refs: Vec<&LeafForm> = xs.iter().collect();
        Ok(ctx.linfty_residual(&refs, points, *s)?)
    });
    let mut text = String::from("trial,degrees,residual\n");
    let mut worst: f64 = 0.0;
    for (t, ((_, degs), r)) in jobs.iter().zip(results).enumerate() {
        let r = r?;
        worst = worst.max(r);
        let d: Vec<String> = degs.iter().map(|d| d.to_string()).collect();
        text.push_str(&format!("{t},{},{r:.3e}\n", d.join(" ")));
    }
    let ok = worst < tol;
    text.push_str(&format!("arity {arity}: max residual {worst:.3e} {}\n", pass(ok)));
    out.emit("linfty.csv", &text)?;
    Ok(ok)
}

fn profile_dat(p: &Profile) -> String {
    let mut s = format!("# {} {}\n", p.y_names.join(" "), p.comps.iter().map(|c| format!("profile_{c}")).collect::<Vec<_>>().join(" "));
    let mut prev: Option<f64> = None;
    for (y, v) in &p.rows {
        if prev.is_some_and(|x| x != y[0]) {
            s.push('\n');
        }
        prev = Some(y[0]);
        let cells: Vec<String> = y.iter().chain(v).map(|x| format!("{x:.17e}")).collect();
        s.push_str(&cells.join(" "));
        s.push('\n');
    }
    s
}

fn emit_profile(out: &mut Output, stem: &str, p: &Profile) -> Result<()> {
    out.emit(&format!("{stem}.csv"), &p.to_csv())?;
    out.emit_dat(&format!("{stem}.dat"), &profile_dat(p))
}

fn cmd_verify(c: &ChartSpec, s: &LeafForm, scale: &str, points: usize, seed: u64, out: &mut Output) -> Result<bool> {
    if s.deg != 1 {
        bail!("a section is a degree-1 leafwise form, got degree {}", s.deg);
    }
    let pts = c.sample(points, seed);
    let q = rational(scale).with_context(|| format!("scale `{scale}` is not a rational number"))?;
    let s = s.scale(&expr::Expr::rational(q.clone()));
    let scale = expr::rational_to_f64(&q);
    let radius = validity_radius(c, &s, &pts, 1.0)?;
    let report = if radius < 1.0 {
        serde_json::json!({
            "chart": c.name, "scale": scale, "points": points,
            "validity_radius": radius, "valid": false,
        })
    } else {
        let d = graph_coisotropy_defect(c, &s, &pts)?;
        let m = master_residual(c, &s, &pts)?;
        serde_json::json!({
            "chart": c.name, "scale": scale, "points": points, "validity_radius": radius, "valid": true,
            "graph_defect": d, "master_residual": m,
            "coisotropic": d < 1e-8, "master_solution": m < 1e-7, "consistent": (d < 1e-8) == (m < 1e-7),
        })
    };
    let consistent = report.get("consistent").and_then(|v| v.as_bool()).unwrap_or(true);
    out.emit("verify.json", &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
    Ok(consistent)
}

fn cmd_grassmann(n: usize, k: usize, samples: usize, seed: u64, threads: usize, out: &mut Output) -> Result<bool> {
    if k > n || n == 0 {
        bail!("need 0 <= k <= n and n >= 1, got n = {n}, k = {k}");
    }
    let mut g = rng(seed);
    let pts: Vec<_> = (0..samples).map(|_| sample(n, k, &mut g)).collect();
    let verdicts = par_map(threads, &pts, |gp| (grassmann_is_coisotropic(gp).0, brute_force(gp).0));
    let agree = verdicts.iter().filter(|(a, b)| a == b).count();
    let cois = verdicts.iter().filter(|(a, _)| *a).count();
    let dim = grassmann_dimension(n, k)?;
    let ok = agree == samples;
    let report = serde_json::json!({
        "n": n, "k": k, "samples": samples, "coisotropic": cois, "agreement": agree,
        "dimension": dim, "formula": "(n+3k+1)(n-k)/2", "pass": ok,
    });
    out.emit("grassmann.json", &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
    Ok(ok)
}

fn cosine_class(y: &[f64]) -> f64 {
    -4.0 * PI * PI * (2.0 * PI * y[0]).cos() * (2.0 * PI * y[1]).cos()
}

fn reproduce_torus(seed: u64, out: &mut Output) -> Result<bool> {
    let c = builtin_flat_torus();
    let gamma = one_form(&["sin(2*pi*y1)", "sin(2*pi*y2)"]);
    let mut summary = String::new();
    let mut ok = true;
    let mut line = |s: &mut String, text: String, good: bool| {
        ok &= good;
        s.push_str(&format!("{text} {}\n", pass(good)));
    };

    let kr = kuranishi(&c, &gamma)?;
    let prof = fiber_profile(&c, &kr, 32, 8)?;
    let err = prof.rows.iter().map(|(y, v)| (v[0] - cosine_class(y)).abs()).fold(0.0, f64::max);
    line(&mut summary, format!("Kr profile max-error {err:.1e} against -4pi^2 cos(2pi y1) cos(2pi y2)"), err < 1e-9);
    let opts = SolveOptions { seed, ..Default::default() };
    match mc_solve(&c, &gamma, &opts)? {
        McOutcome::Obstructed(r) => {
            line(&mut summary, format!("mc-solve obstructed at order {} with class norm {:.4}", r.order, r.norm), r.order == 2 && r.norm > 1.0);
            out.emit_quiet("torus_obstruction.json", &serde_json::to_string_pretty(&obstruction_doc(&c, &r))?)?;
        }
        McOutcome::Solved(_) => line(&mut summary, "mc-solve found no obstruction".into(), false),
    }
    let pts = c.sample(64, seed);
    let d = graph_coisotropy_defect(&c, &gamma.scale(&expr::Expr::frac(1, 10)), &pts)?;
    line(&mut summary, format!("graph of 0.1*Gamma1 has coisotropy defect {d:.3e} (not coisotropic)"), d > 1e-8);

    let family = randgen::form_in(&["y1"], 2, 1, 3, seed);
    let kr = kuranishi(&c, &family)?;
    let krmax = crate::leafform::max_abs(&c, &kr, &pts);
    line(&mut summary, format!("unobstructed family: Kr max {krmax:.1e}"), krmax < 1e-10);
    match mc_solve(&c, &family, &opts)? {
        McOutcome::Solved(s) => {
            let worst = (2..=s.order()).map(|k| s.max_abs(k)).fold(0.0, f64::max);
            line(&mut summary, format!("unobstructed family: max |Gamma_k|, k >= 2, {worst:.1e}"), worst < 1e-10);
            out.emit_quiet("family_series.json", &serde_json::to_string_pretty(&series_doc(&s))?)?;
        }
        McOutcome::Obstructed(r) => line(&mut summary, format!("unobstructed family obstructed at order {}", r.order), false),
    }
    let d = graph_coisotropy_defect(&c, &family.scale(&expr::Expr::frac(1, 10)), &pts)?;
    line(&mut summary, format!("unobstructed family: graph defect at eps = 0.1 {d:.1e}"), d < 1e-8);

    out.emit_quiet("torus_profile.csv", &prof.to_csv())?;
    out.emit_dat("torus_profile.dat", &profile_dat(&prof))?;
    out.emit("summary.txt", &summary)?;
    Ok(ok)
}

fn reproduce_oscillator(c: &ChartSpec, seed: u64, out: &mut Output) -> Result<bool> {
    let alpha = c.params.get("alpha").cloned().context("oscillator chart without alpha")?;
    let mut summary = String::new();
    let mut ok = true;
    let mut line = |s: &mut String, text: String, good: bool| {
        ok &= good;
        s.push_str(&format!("{text} {}\n", pass(good)));
    };
    let pts = c.sample(100, seed);
    let f = transverse_curvature(c).max_abs(c, &pts);
    line(&mut summary, format!("max |F| = {f:.1e}"), f < 1e-12);

    let two = num::BigRational::from_integer(2.into());
    let want = (&two * (&alpha - num::BigRational::from_integer(1.into()))).recip();
    let exact = c.omega[0][1].as_const() == Some(&want);
    line(&mut summary, format!("omega_12 = 1/(2(alpha-1)) = {}", expr::format_rational(&want)), exact);

    let (h1, h2) = oscillator_levels(&alpha);
    let mut consistent = true;
    for t in 0..=400 {
        let y2 = t as f64 / 400.0;
        let a = h1.eval_at(&[("y2", y2)])?;
        let b = h2.eval_at(&[("y2", y2)])?;
        let inside = c.contains(&Point(vec![0.5, y2, 0.0, 0.0]));
        if inside != (a > 0.0 && b > 0.0) {
            consistent = false;
        }
    }
    let (lo, hi) = c.domain[1];
    line(&mut summary, format!("domain {lo} < H3 < {hi:.6} is where both levels are positive"), consistent);

    let g = randgen::trig_poly(&mut rng(seed), &["y1", "y2"], 2, 3);
    let h = randgen::trig_poly(&mut rng(seed + 1), &["y1", "y2"], 2, 3);
    let gamma = Form { deg: 1, dim: 2, c: vec![g.clone(), h.clone()] };
    let m2 = LInftyContext::new(c, 2)?.m2(&gamma, &gamma);
    let parts = [g.diff("y1"), g.diff("y2"), h.diff("y1"), h.diff("y2")];
    let mut worst: f64 = 0.0;
    for x in &pts {
        let binds = [("y1", x.0[0]), ("y2", x.0[1])];
        let d: Vec<f64> = parts.iter().map(|e| e.eval_at(&binds)).collect::<Result<_, _>>()?;
        let winv = c.omega_inverse_at(x)?;
        let bracket = 2.0 * winv[(0, 1)] * (d[0] * d[3] - d[2] * d[1]);
        worst = worst.max((eval_form(c, &m2, x).c[0] - bracket).abs());
    }
    line(&mut summary, format!("m2(Gamma,Gamma) - 2 omega^12 (g_1 h_2 - h_1 g_2) max {worst:.1e} at 100 points"), worst < 1e-9);
    out.emit("summary.txt", &summary)?;
    Ok(ok)
}

fn cmd_suite(seed: u64, threads: usize, out: &mut Output) -> Result<bool> {
    let ids: Vec<usize> = (1..=acceptance::count()).collect();
    let results = par_map(threads, &ids, |&id| acceptance::run(id, seed));
    let mut s = String::new();
    for r in &results {
        s.push_str(&format!("{r}\n"));
    }
    let passed = results.iter().filter(|r| r.pass).count();
    let total: f64 = results.iter().map(|r| r.seconds).sum();
    s.push_str(&format!("{passed}/{} criteria passed in {total:.2}s\n", results.len()));
    out.emit("suite.txt", &s)?;
    Ok(passed == results.len())
}
