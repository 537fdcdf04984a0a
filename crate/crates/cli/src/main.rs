use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use k3corr::config::{Mode, RunConfig, Tolerances};
use k3corr::corr_j::{blowup_intersection, j_fiber_first, j_fiber_second, j_push_curve, SolverOptions};
use k3corr::corr_t::{t_fiber_first, t_fiber_second_search};
use k3corr::geom::ProjectivePoint;
use k3corr::suite::{run_suite, z4_partners};
use k3corr::surfaces::{PlaneCurve, SurfaceJson, SurfaceKind, SurfaceModel};
use k3corr::torsion::{bn_g1n_exists, expected_dim_y, expected_dim_zprime, z2_certificate, z3_from_pairs, z4_from_triples};
use k3corr::{Error, Result};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "k3corr", version, about = "Contact correspondences and torsion certificates on K3 surface models")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Certificate threshold (overrides K3CORR_EPS).
    #[arg(long, global = true)]
    eps_cert: Option<f64>,
    #[arg(long, global = true)]
    eps_cluster: Option<f64>,
    #[arg(long, global = true)]
    eps_rank: Option<f64>,
    /// `exact` requires surfaces with rational coefficients.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Float)]
    mode: ModeArg,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Include wall time in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
    #[arg(long, short, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Contact pairs (p, q) over a point p of a quartic.
    JFiber1 {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        point: String,
    },
    /// All p with a contact pair (p, q) over a point q of a quartic.
    JFiber2 {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 4)]
        runs: usize,
    },
    /// Push samples of a plane curve through J.
    JPush {
        /// `conic:<seed>` builds a quartic containing a conic.
        #[arg(long)]
        surface: String,
        /// Curve JSON; defaults to the built-in conic for `conic:<seed>`.
        #[arg(long)]
        curve: Option<String>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Contact triple (p, q, r) at a point of a (2,3) surface.
    TFiber {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        point: String,
    },
    /// Points p whose tangent plane contains q and r.
    TSearch {
        #[arg(long)]
        surface: String,
        /// Take (q, r) from the contact triple at this point.
        #[arg(long, conflicts_with_all = ["q", "r"])]
        point: Option<String>,
        #[arg(long, requires = "r")]
        q: Option<String>,
        #[arg(long, requires = "q")]
        r: Option<String>,
        #[arg(long, default_value_t = 120)]
        budget: usize,
    },
    /// n = 2 certificate on a double sextic.
    Z2 {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// n = 3 certificate from two contact pairs over q.
    Z3 {
        #[arg(long)]
        surface: String,
        #[arg(long)]
        q: String,
        /// Indices into the fiber over q, e.g. `0,1`.
        #[arg(long, default_value = "0,1")]
        pairs: String,
    },
    /// n = 4 certificate from two contact triples sharing (q, r).
    Z4 {
        /// `shared:<seed>` builds a surface with a shared tangent line.
        #[arg(long)]
        surface: String,
        /// Points tried in order: `sample:<seed>`, `sample:<seed+1>`, ...
        #[arg(long, default_value_t = 3)]
        tries: u64,
        #[arg(long, default_value_t = 120)]
        budget: usize,
    },
    /// Expected-dimension ledger for genus g.
    ExpDim {
        #[arg(long)]
        genus: i64,
    },
    /// Brill-Noether existence of a g^1_n.
    Bn {
        #[arg(long)]
        genus: i64,
        #[arg(long)]
        n: i64,
    },
    /// (a H' + b E).(a' H' + b' E) on the blowup at a point.
    Blowup {
        #[arg(long, allow_hyphen_values = true)]
        c1: String,
        #[arg(long, allow_hyphen_values = true)]
        c2: String,
        #[arg(long, default_value_t = 4)]
        h2: i64,
    },
    /// Random points on a surface.
    Sample {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Points on the ramification curve (double sextic only).
        #[arg(long)]
        ramification: bool,
    },
    /// Run an experiment suite.
    Suite { name: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::JFiber1 { .. } => "j-fiber1",
            Command::JFiber2 { .. } => "j-fiber2",
            Command::JPush { .. } => "j-push",
            Command::TFiber { .. } => "t-fiber",
            Command::TSearch { .. } => "t-search",
            Command::Z2 { .. } => "z2",
            Command::Z3 { .. } => "z3",
            Command::Z4 { .. } => "z4",
            Command::ExpDim { .. } => "exp-dim",
            Command::Bn { .. } => "bn",
            Command::Blowup { .. } => "blowup",
            Command::Sample { .. } => "sample",
            Command::Suite { .. } => "suite",
        }
    }
}

fn config(g: &Global) -> Result<RunConfig> {
    let mut tolerances = Tolerances::from_env();
    if let Some(v) = g.eps_cert {
        tolerances.eps_cert = v;
    }
    if let Some(v) = g.eps_cluster {
        tolerances.eps_cluster = v;
    }
    if let Some(v) = g.eps_rank {
        tolerances.eps_rank = v;
    }
    tolerances.validate()?;
    let mode = match g.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Float => Mode::Float,
    };
    Ok(RunConfig { seed: g.seed, tolerances, mode, output_path: g.output.as_ref().map(|p| p.display().to_string()), verbosity: g.verbose })
}

fn read_json(arg: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with(['[', '{']) { arg.to_string() } else { std::fs::read_to_string(arg)? };
    Ok(serde_json::from_str(&text)?)
}

/// `random:<seed>` (kind from the command), `quartic:<seed>`, `ci23:<seed>`,
/// `sextic:<seed>`, `fermat`, `conic:<seed>`, `shared:<seed>` or a JSON file.
fn load_surface(arg: &str, kind: SurfaceKind, cfg: &RunConfig) -> Result<SurfaceModel> {
    let seeded = |prefix: &str| -> Result<Option<u64>> {
        match arg.strip_prefix(prefix) {
            Some(s) => s.parse().map(Some).map_err(|_| Error::InvalidInput(format!("bad seed in '{}'", arg))),
            None => Ok(None),
        }
    };
    let x = if let Some(s) = seeded("random:")? {
        SurfaceModel::random(kind, s)
    } else if let Some(s) = seeded("quartic:")? {
        SurfaceModel::random_quartic(s)
    } else if let Some(s) = seeded("ci23:")? {
        SurfaceModel::random_ci23(s)
    } else if let Some(s) = seeded("sextic:")? {
        SurfaceModel::random_double_sextic(s)
    } else if let Some(s) = seeded("conic:")? {
        SurfaceModel::quartic_with_conic(s).0
    } else if let Some(s) = seeded("shared:")? {
        SurfaceModel::ci23_with_shared_tangent_line(s).0
    } else if arg == "fermat" {
        SurfaceModel::fermat_quartic()
    } else {
        let j: SurfaceJson = serde_json::from_value(read_json(arg)?)?;
        SurfaceModel::from_json(&j)?
    };
    if x.kind() != kind {
        return Err(Error::InvalidInput(format!("surface '{}' is {:?}, this command needs {:?}", arg, x.kind(), kind)));
    }
    if cfg.mode == Mode::Exact && x.exact_forms().is_none() {
        return Err(Error::InvalidInput("exact mode needs rational coefficients".into()));
    }
    Ok(x)
}

/// `sample:<k>` or a JSON coordinate list (inline or file).
fn load_point(arg: &str, x: &SurfaceModel, cfg: &RunConfig) -> Result<ProjectivePoint> {
    if let Some(k) = arg.strip_prefix("sample:") {
        let k: u64 = k.parse().map_err(|_| Error::InvalidInput(format!("bad sample index in '{}'", arg)))?;
        return x.sample_point(k, &cfg.tolerances);
    }
    if let Some(k) = arg.strip_prefix("ramification:") {
        let k: u64 = k.parse().map_err(|_| Error::InvalidInput(format!("bad sample index in '{}'", arg)))?;
        return x.sample_ramification_point(k, &cfg.tolerances);
    }
    Ok(serde_json::from_value(read_json(arg)?)?)
}

fn parse_pair(s: &str) -> Result<(i64, i64)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => Ok((
            a.parse().map_err(|_| Error::InvalidInput(format!("bad integer '{}'", a)))?,
            b.parse().map_err(|_| Error::InvalidInput(format!("bad integer '{}'", b)))?,
        )),
        _ => Err(Error::InvalidInput(format!("expected two comma-separated integers, got '{}'", s))),
    }
}

fn run(cmd: &Command, cfg: &RunConfig) -> Result<(Value, Value)> {
    let tol = &cfg.tolerances;
    Ok(match cmd {
        Command::JFiber1 { surface, point } => {
            let x = load_surface(surface, SurfaceKind::QuarticP3, cfg)?;
            let p = load_point(point, &x, cfg)?;
            let fib = j_fiber_first(&x, &p, tol)?;
            (json!({ "surface": surface, "point": p }), json!({ "generic": fib.is_generic(tol), "fiber": serde_json::to_value(&fib)? }))
        }
        Command::JFiber2 { surface, point, runs } => {
            let x = load_surface(surface, SurfaceKind::QuarticP3, cfg)?;
            let q = load_point(point, &x, cfg)?;
            let fib = j_fiber_second(&x, &q, &SolverOptions { max_runs: *runs, seed: cfg.seed, ..SolverOptions::default() }, tol)?;
            (json!({ "surface": surface, "point": q, "runs": runs }), json!({ "count": fib.count_with_multiplicity, "fiber": serde_json::to_value(&fib)? }))
        }
        Command::JPush { surface, curve, samples } => {
            let x = load_surface(surface, SurfaceKind::QuarticP3, cfg)?;
            let c = match (curve, surface.strip_prefix("conic:")) {
                (Some(path), _) => PlaneCurve::from_json(&serde_json::from_value(read_json(path)?)?)?,
                (None, Some(s)) => SurfaceModel::quartic_with_conic(s.parse().map_err(|_| Error::InvalidInput("bad conic seed".into()))?).1,
                (None, None) => return Err(Error::InvalidInput("--curve is required unless the surface is conic:<seed>".into())),
            };
            let pts = c.sample(&x, *samples, cfg.seed, tol)?;
            let report = j_push_curve(&x, &c, &pts, *samples, tol)?;
            (json!({ "surface": surface, "curve": c.to_json(), "samples": samples }), serde_json::to_value(&report)?)
        }
        Command::TFiber { surface, point } => {
            let x = load_surface(surface, SurfaceKind::CompleteIntersection23P4, cfg)?;
            let p = load_point(point, &x, cfg)?;
            (json!({ "surface": surface, "point": p }), serde_json::to_value(&t_fiber_first(&x, &p, tol)?)?)
        }
        Command::TSearch { surface, point, q, r, budget } => {
            let x = load_surface(surface, SurfaceKind::CompleteIntersection23P4, cfg)?;
            let (q, r) = match (point, q, r) {
                (Some(pt), _, _) => {
                    let p = load_point(pt, &x, cfg)?;
                    let fib = t_fiber_first(&x, &p, tol)?;
                    let t = fib
                        .triple
                        .ok_or_else(|| Error::Degenerate(format!("no contact triple at p: {:?}", fib.degenerate.iter().map(|d| d.kind).collect::<Vec<_>>())))?;
                    (t.q, t.r)
                }
                (None, Some(q), Some(r)) => (load_point(q, &x, cfg)?, load_point(r, &x, cfg)?),
                _ => return Err(Error::InvalidInput("give --point or both --q and --r".into())),
            };
            let report = t_fiber_second_search(&x, &q, &r, *budget, cfg.seed, tol)?;
            (json!({ "surface": surface, "q": q, "r": r, "budget": budget }), serde_json::to_value(&report)?)
        }
        Command::Z2 { surface, p, q } => {
            let x = load_surface(surface, SurfaceKind::DoubleSexticCover, cfg)?;
            let (pp, qq) = (load_point(p, &x, cfg)?, load_point(q, &x, cfg)?);
            (json!({ "surface": surface, "p": pp, "q": qq }), serde_json::to_value(&z2_certificate(&x, &pp, &qq, tol)?)?)
        }
        Command::Z3 { surface, q, pairs } => {
            let x = load_surface(surface, SurfaceKind::QuarticP3, cfg)?;
            let qp = load_point(q, &x, cfg)?;
            let (i, j) = parse_pair(pairs)?;
            let fib = j_fiber_second(&x, &qp, &SolverOptions { seed: cfg.seed, ..SolverOptions::default() }, tol)?;
            let get = |k: i64| {
                usize::try_from(k)
                    .ok()
                    .and_then(|k| fib.pairs.get(k))
                    .ok_or_else(|| Error::InvalidInput(format!("pair index {} out of range (fiber has {})", k, fib.pairs.len())))
            };
            let cert = z3_from_pairs(&x, &get(i)?.pair, &get(j)?.pair, tol)?;
            (json!({ "surface": surface, "q": qp, "pairs": [i, j] }), serde_json::to_value(&cert)?)
        }
        Command::Z4 { surface, tries, budget } => {
            let x = load_surface(surface, SurfaceKind::CompleteIntersection23P4, cfg)?;
            let mut starts: Vec<ProjectivePoint> = Vec::new();
            if let Some(s) = surface.strip_prefix("shared:") {
                let s: u64 = s.parse().map_err(|_| Error::InvalidInput("bad seed".into()))?;
                starts.push(SurfaceModel::ci23_with_shared_tangent_line(s).1.p);
            }
            for k in 0..*tries {
                starts.push(x.sample_point(cfg.seed + k, tol)?);
            }
            let mut attempts = Vec::new();
            let mut found = None;
            for p in &starts {
                let Some(t1) = t_fiber_first(&x, p, tol)?.triple else {
                    attempts.push(json!({ "p": p, "outcome": "no contact triple" }));
                    continue;
                };
                let partners = z4_partners(&x, &t1, *budget, cfg.seed, tol)?;
                attempts.push(json!({ "p": p, "partners": partners.len() }));
                if let Some(t2) = partners.first() {
                    found = Some(z4_from_triples(&x, &t1, t2, tol)?);
                    break;
                }
            }
            let cert = found.ok_or_else(|| Error::Precondition(format!("no second triple sharing (q, r) after {} starting points", attempts.len())))?;
            (json!({ "surface": surface, "tries": tries, "budget": budget }), json!({ "attempts": attempts, "certificate": serde_json::to_value(&cert)? }))
        }
        Command::ExpDim { genus } => {
            let l = expected_dim_zprime(*genus)?;
            let y = expected_dim_y(*genus)?;
            (
                json!({ "genus": genus }),
                json!({ "dim_Hn": l.dim_hn, "dim_CxC": l.dim_cxc, "dim_Mg2": l.dim_m_g2, "expected": l.expected_dim, "y_ledger": serde_json::to_value(y)? }),
            )
        }
        Command::Bn { genus, n } => {
            if *genus < 1 || *n < 2 {
                return Err(Error::InvalidInput("need genus >= 1 and n >= 2".into()));
            }
            (json!({ "genus": genus, "n": n }), serde_json::to_value(bn_g1n_exists(*genus, *n))?)
        }
        Command::Blowup { c1, c2, h2 } => {
            let (a, b) = (parse_pair(c1)?, parse_pair(c2)?);
            (json!({ "c1": [a.0, a.1], "c2": [b.0, b.1], "h2": h2 }), json!({ "value": blowup_intersection(a, b, *h2) }))
        }
        Command::Sample { surface, count, ramification } => {
            let kind = surface_kind_hint(surface);
            let x = load_surface(surface, kind, cfg)?;
            let mut pts = Vec::new();
            for k in 0..*count {
                pts.push(if *ramification { x.sample_ramification_point(cfg.seed + k, tol)? } else { x.sample_point(cfg.seed + k, tol)? });
            }
            let residuals: Vec<f64> = pts.iter().map(|p| x.residual(p)).collect::<Result<_>>()?;
            (json!({ "surface": surface, "count": count, "ramification": ramification }), json!({ "points": pts, "residuals": residuals }))
        }
        Command::Suite { name } => {
            let report = run_suite(name, cfg)?;
            (json!({ "name": name }), serde_json::to_value(&report)?)
        }
    })
}

/// Kind for `sample`: prefixes choose the model, files carry their own.
fn surface_kind_hint(arg: &str) -> SurfaceKind {
    if arg.starts_with("shared:") || arg.starts_with("ci23:") {
        SurfaceKind::CompleteIntersection23P4
    } else if arg.starts_with("sextic:") {
        SurfaceKind::DoubleSexticCover
    } else if let Ok(v) = read_json(arg) {
        serde_json::from_value::<SurfaceJson>(v).map(|j| j.model).unwrap_or(SurfaceKind::QuarticP3)
    } else {
        SurfaceKind::QuarticP3
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let start = Instant::now();
    let name = cli.command.name();
    let (doc, code) = match config(&cli.global) {
        Err(e) => (json!({ "command": name, "error": e.to_string(), "exit_code": e.exit_code() }), e.exit_code()),
        Ok(cfg) => match run(&cli.command, &cfg) {
            Ok((inputs, result)) => (json!({ "command": name, "inputs": inputs, "config": cfg, "result": result }), 0),
            Err(e) => (json!({ "command": name, "config": cfg, "error": e.to_string(), "exit_code": e.exit_code() }), e.exit_code()),
        },
    };
    let mut doc = doc;
    if cli.global.timing {
        doc["wall_time_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    let text = serde_json::to_string_pretty(&doc).expect("report serialises") + "\n";
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, &text).map_err(Error::from),
        None => {
            print!("{}", text);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("k3corr: {}", e);
        return ExitCode::from(1);
    }
    ExitCode::from(code as u8)
}
