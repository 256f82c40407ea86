use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use paracalc::anderson::{eigensolve, survival_fit, EigenConfig};
use paracalc::experiments::{self, ExperimentReport, ExperimentSpec};
use paracalc::io::{read_any_field, read_time_field, write_field, write_time_field, Provenance};
use paracalc::ops::{duhamel_j, heat_propagate, Paracalc, TimeField};
use paracalc::solvers::{self, Equation, RunConfig, ScalarFn};
use paracalc::spectral::{besov_norm, estimate_regularity, Field, Partition, TorusGrid};
use paracalc::stochastic::{
    derive_seed, enhance_csbe, enhance_gpam, enhance_gsbe, mollify, mollify_time, steps_for, wick_data, Mollifier,
};
use paracalc::{Error, Result};

#[derive(Parser)]
#[command(name = "paracalc", version, about = "Paracontrolled calculus on the periodic torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply one operator to PFLD inputs.
    Op(OpArgs),
    /// Sample noise and write its enhancement.
    Enhance(EnhanceArgs),
    /// Solve an equation from a JSON run configuration.
    Solve {
        #[arg(long)]
        equation: String,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "solution")]
        out: PathBuf,
    },
    /// Top eigenvalues of the Anderson Hamiltonian over independent noises.
    Spectrum(SpectrumArgs),
    /// Run, list or replay experiments.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OpName {
    Lp,
    BesovNorm,
    Regularity,
    ParaLess,
    ParaGreater,
    Resonant,
    Paralinearize,
    CommutatorC,
    CommutatorC2,
    SwapT,
    Heat,
    Mollify,
    Duhamel,
    IntertwinedPara,
    HeatCommutator,
}

#[derive(clap::Args)]
struct OpArgs {
    #[arg(value_enum)]
    name: OpName,
    inputs: Vec<PathBuf>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "smooth")]
    partition: String,
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Regression window `lo hi` for `regularity`.
    #[arg(long, num_args = 2, allow_negative_numbers = true)]
    window: Option<Vec<i32>>,
    /// Scalar function as JSON, e.g. `{"kind":"polynomial","coeffs":[0,0,1]}`.
    #[arg(long)]
    function: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value_t = 0.0)]
    mass: f64,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value = "gaussian")]
    kernel: String,
}

#[derive(clap::Args)]
struct EnhanceArgs {
    #[arg(long)]
    equation: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value = "gaussian")]
    kernel: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension for gPAM.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 0.1)]
    t_final: f64,
    #[arg(long, default_value = "enhancement")]
    out: PathBuf,
}

#[derive(clap::Args)]
struct SpectrumArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 5)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "gaussian")]
    kernel: String,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value = "spectrum")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum ExperimentAction {
    Run {
        spec: PathBuf,
        /// Overrides the spec's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    List,
    Replay {
        report: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Op(a) => op(a).map(|_| true),
        Command::Enhance(a) => enhance(a).map(|_| true),
        Command::Solve { equation, config, out } => {
            let eq: Equation = equation.parse()?;
            let rc = RunConfig::from_json(&fs::read_to_string(&config)?)?;
            let b = solvers::solve(eq, &rc)?;
            b.write(&out)?;
            println!("{}", serde_json::to_string_pretty(&b.diagnostics)?);
            Ok(!b.diagnostics.blowup)
        }
        Command::Spectrum(a) => spectrum(a).map(|_| true),
        Command::Experiment { action } => experiment(action),
    }
}

fn pool() -> Result<rayon::ThreadPool> {
    let w = experiments::workers_from_env()?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(w)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot build a pool of {w} workers: {e}")))
}

fn need(inputs: &[PathBuf], k: usize) -> Result<()> {
    if inputs.len() != k {
        return Err(Error::InvalidArgument(format!("operator takes {k} inputs, got {}", inputs.len())));
    }
    Ok(())
}

fn fields(inputs: &[PathBuf], k: usize) -> Result<Vec<Field>> {
    need(inputs, k)?;
    inputs.iter().map(|p| read_any_field(p)).collect()
}

fn time_fields(inputs: &[PathBuf], k: usize) -> Result<Vec<TimeField>> {
    need(inputs, k)?;
    inputs.iter().map(|p| read_time_field(p)).collect()
}

fn out_path(a: &OpArgs) -> PathBuf {
    a.out.clone().unwrap_or_else(|| PathBuf::from("out.pfld"))
}

fn provenance(name: &str) -> Provenance {
    Provenance { component: Some(name.to_string()), ..Provenance::default() }
}

fn op(a: OpArgs) -> Result<()> {
    let partition = match a.partition.as_str() {
        "sharp" => Partition::Sharp,
        "smooth" => Partition::Smooth,
        other => return Err(Error::Unknown { kind: "partition", name: other.into() }),
    };
    let pc = Paracalc::new(partition);
    let name = a.name.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default();
    let write = |f: Field| write_field(&out_path(&a), &f, provenance(&name));
    let write_t = |f: TimeField| write_time_field(&out_path(&a), &f, provenance(&name));
    match a.name {
        OpName::Lp => {
            let f = fields(&a.inputs, 1)?.remove(0);
            let d = pc.decompose(&f);
            if let Some(dir) = &a.out {
                fs::create_dir_all(dir)?;
                for (b, blk) in d.blocks().iter().enumerate() {
                    write_field(&dir.join(format!("block_{}.pfld", b as i32 - 1)), blk, provenance("lp-block"))?;
                }
            }
            println!("{}", json!({ "i_max": d.i_max(), "sup_norms": d.sup_norms() }));
        }
        OpName::BesovNorm => {
            let f = fields(&a.inputs, 1)?.remove(0);
            let alpha = a.alpha.ok_or_else(|| Error::InvalidArgument("--alpha is required".into()))?;
            println!("{}", json!({ "alpha": alpha, "norm": besov_norm(&f, alpha) }));
        }
        OpName::Regularity => {
            let f = fields(&a.inputs, 1)?.remove(0);
            let w = a.window.as_ref().map(|w| (w[0], w[1]));
            println!("{}", serde_json::to_string_pretty(&estimate_regularity(&f, w)?)?);
        }
        OpName::ParaLess | OpName::ParaGreater | OpName::Resonant => {
            let v = fields(&a.inputs, 2)?;
            write(match a.name {
                OpName::ParaLess => pc.para_less(&v[0], &v[1])?,
                OpName::ParaGreater => pc.para_greater(&v[0], &v[1])?,
                _ => pc.resonant(&v[0], &v[1])?,
            })?;
        }
        OpName::Paralinearize => {
            let f = fields(&a.inputs, 1)?.remove(0);
            let text = a.function.as_deref().ok_or_else(|| Error::InvalidArgument("--function is required".into()))?;
            let func: ScalarFn = serde_json::from_str(text)?;
            write(pc.paralinearize_remainder(|x| func.value(x), |x| func.d1(x), &f)?)?;
        }
        OpName::CommutatorC => {
            let v = fields(&a.inputs, 3)?;
            write(pc.commutator_c(&v[0], &v[1], &v[2])?)?;
        }
        OpName::CommutatorC2 => {
            let v = fields(&a.inputs, 4)?;
            write(pc.commutator_c2(&v[0], &v[1], &v[2], &v[3])?)?;
        }
        OpName::SwapT => {
            let v = fields(&a.inputs, 3)?;
            write(pc.commutator_t(&v[0], &v[1], &v[2])?)?;
        }
        OpName::Heat => {
            let f = fields(&a.inputs, 1)?.remove(0);
            write(heat_propagate(&f, a.t, a.mass))?;
        }
        OpName::Mollify => {
            need(&a.inputs, 1)?;
            let eps = a.eps.ok_or_else(|| Error::InvalidArgument("--eps is required".into()))?;
            let k: Mollifier = a.kernel.parse()?;
            match read_time_field(&a.inputs[0]) {
                Ok(tf) => write_t(mollify_time(&tf, eps, k))?,
                Err(_) => write(mollify(&read_any_field(&a.inputs[0])?, eps, k))?,
            }
        }
        OpName::Duhamel => write_t(duhamel_j(&time_fields(&a.inputs, 1)?.remove(0)))?,
        OpName::IntertwinedPara => {
            let v = time_fields(&a.inputs, 2)?;
            write_t(pc.intertwined_para(&v[0], &v[1])?)?;
        }
        OpName::HeatCommutator => {
            let v = time_fields(&a.inputs, 2)?;
            write_t(pc.heat_commutator_h(&v[0], &v[1], None)?)?;
        }
    }
    Ok(())
}

fn enhance(a: EnhanceArgs) -> Result<()> {
    let kernel: Mollifier = a.kernel.parse()?;
    let eq: Equation = a.equation.parse()?;
    fs::create_dir_all(&a.out)?;
    let prov = |c: &str| Provenance {
        seed: Some(a.seed),
        eps: Some(a.eps),
        kernel: Some(kernel.to_string()),
        equation: Some(eq.to_string()),
        component: Some(c.to_string()),
    };
    let mut constants = BTreeMap::new();
    let mut files = Vec::new();
    let mut put = |name: &str, f: Either| -> Result<()> {
        let file = format!("{name}.pfld");
        match f {
            Either::Space(f) => write_field(&a.out.join(&file), f, prov(name))?,
            Either::Time(tf) => write_time_field(&a.out.join(&file), tf, prov(name))?,
        }
        files.push(file);
        Ok(())
    };
    match eq {
        Equation::Gpam => {
            let e = enhance_gpam(TorusGrid::new(a.dim, a.n)?, a.eps, kernel, a.seed)?;
            for (name, f) in [("xi", &e.xi), ("X", &e.x), ("X_res_xi", &e.resonant)] {
                put(name, Either::Space(f))?;
            }
            constants.insert("c_eps", e.c_eps);
        }
        Equation::Gsbe => {
            let steps = steps_for(a.dt, a.t_final)?;
            let e = enhance_gsbe(TorusGrid::new(1, a.n)?, a.eps, kernel, a.dt, steps, a.seed)?;
            for (name, tf) in [("xi", &e.xi), ("X", &e.x), ("dX", &e.dx), ("X_res_dX", &e.x_res_dx)] {
                put(name, Either::Time(tf))?;
            }
        }
        Equation::Csbe => {
            let steps = steps_for(a.dt, a.t_final)?;
            let e = enhance_csbe(TorusGrid::new(1, a.n)?, a.eps, kernel, a.dt, steps, a.seed)?;
            put("xi", Either::Time(&e.xi))?;
            for (name, tf) in e.components() {
                put(name, Either::Time(tf))?;
            }
        }
        Equation::Phi42 => {
            let w = wick_data(TorusGrid::new(2, a.n)?, a.dt, a.t_final, a.eps, kernel, a.seed)?;
            for (name, tf) in [("X", &w.x), ("X2", &w.x2), ("X3", &w.x3)] {
                put(name, Either::Time(tf))?;
            }
            constants.insert("c1_eps", w.c1);
        }
        other => return Err(Error::InvalidArgument(format!("no stand-alone enhancement for {other}"))),
    }
    let manifest = json!({
        "equation": eq.to_string(),
        "n": a.n,
        "eps": a.eps,
        "kernel": kernel.to_string(),
        "seed": a.seed,
        "constants": constants,
        "files": files,
    });
    fs::write(a.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    println!("{}", serde_json::to_string_pretty(&manifest)?);
    Ok(())
}

enum Either<'a> {
    Space(&'a Field),
    Time(&'a TimeField),
}

fn spectrum(a: SpectrumArgs) -> Result<()> {
    let kernel: Mollifier = a.kernel.parse()?;
    let grid = TorusGrid::new(2, a.n)?;
    let cfg = EigenConfig { tol: a.tol, ..EigenConfig::new(a.m) };
    let pc = Paracalc::default();
    let reports = pool()?.install(|| {
        (0..a.samples)
            .into_par_iter()
            .map(|i| {
                let seed = derive_seed(a.seed, i as u64);
                let e = enhance_gpam(grid, a.eps, kernel, seed)?;
                Ok((seed, eigensolve(&pc, &e, &cfg)?))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    fs::create_dir_all(&a.out)?;
    let mut csv = String::from("sample,seed,index,eigenvalue,residual\n");
    for (i, (seed, r)) in reports.iter().enumerate() {
        for (k, (l, res)) in r.eigenvalues.iter().zip(&r.residuals).enumerate() {
            csv.push_str(&format!("{i},{seed},{k},{l},{res}\n"));
        }
    }
    fs::write(a.out.join("spectrum.csv"), csv)?;
    let lambda1: Vec<f64> = reports.iter().map(|(_, r)| r.eigenvalues[0]).collect();
    let mean: Vec<f64> =
        (0..a.m).map(|k| reports.iter().map(|(_, r)| r.eigenvalues[k]).sum::<f64>() / reports.len() as f64).collect();
    let tail = if lambda1.len() >= 8 { Some(survival_fit(&lambda1)?) } else { None };
    let summary = json!({
        "n": a.n,
        "eps": a.eps,
        "kernel": kernel.to_string(),
        "m": a.m,
        "samples": a.samples,
        "master_seed": a.seed,
        "c_eps": reports.first().map(|(_, r)| r.c_eps),
        "mean_eigenvalues": mean,
        "all_converged": reports.iter().all(|(_, r)| r.converged),
        "tail": tail.map(|t| json!({
            "slope": t.slope,
            "slope_halfwidth": t.slope_halfwidth,
            "r_squared": t.r_squared,
            "fit_points": t.fit_points,
        })),
    });
    fs::write(a.out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn print_checks(r: &ExperimentReport) {
    for c in &r.checks {
        println!("  [{}] {} = {} ({})", if c.passed { "pass" } else { "FAIL" }, c.name, c.value, c.bound);
    }
    for rec in r.records.iter().filter(|x| x.error.is_some()) {
        println!("  run {} failed: {}", rec.key, rec.error.as_deref().unwrap_or(""));
    }
}

fn experiment(action: ExperimentAction) -> Result<bool> {
    match action {
        ExperimentAction::List => {
            for (name, desc) in experiments::list_experiments() {
                println!("{name:<30} {desc}");
            }
            Ok(true)
        }
        ExperimentAction::Run { spec, out } => {
            let mut s = ExperimentSpec::from_json(&fs::read_to_string(&spec)?)?;
            if out.is_some() {
                s.output_dir = out;
            }
            let (r, dir) = experiments::run_and_write(&s)?;
            println!("{}: {} -> {}", r.name, if r.passed { "passed" } else { "FAILED" }, dir.display());
            print_checks(&r);
            Ok(r.passed)
        }
        ExperimentAction::Replay { report } => {
            let stored = ExperimentReport::from_json(&fs::read_to_string(&report)?)?;
            let outcome = experiments::replay(&stored)?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            for m in &outcome.mismatches {
                println!("mismatch: {m}");
            }
            let dir = report.parent().unwrap_or(Path::new(".")).join("replay");
            outcome.report.write(&dir)?;
            println!(
                "{}: replay {} -> {}",
                stored.name,
                if outcome.identical() { "identical" } else { "DIFFERS" },
                dir.display()
            );
            Ok(outcome.identical())
        }
    }
}
