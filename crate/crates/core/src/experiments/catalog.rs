//! Built-in experiments and their pinned thresholds.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{
    replay_with_workers, run_with_workers, Assessment, Check, ExperimentSpec, Params, Record, RunSpec, Values,
};
use crate::anderson::{
    dense_resolvent, dense_spectrum, eigensolve, lambda1_of, laplacian_spectrum, solve_resolvent_1d, survival_fit,
    symmetry_defect, ApplyMode, EigenConfig, MIN_TAIL_SAMPLES,
};
use crate::error::{Error, Result};
use crate::ops::{Paracalc, TimeField};
use crate::solvers::{
    cubic_decay, enhance_pam_ho, mesoscopic_x_variance, simulate_mesoscopic, solve_csbe, solve_csbe_direct,
    solve_gpam_direct, solve_gpam_modified, solve_gpam_pc, solve_gsbe, solve_gsbe_direct, solve_kpz, solve_pam_direct,
    solve_pam_ho, solve_phi42_dd, solve_phi42_direct, PamHoEnhancement, ScalarFn, SolverConfig, UniversalityConfig,
};
use crate::spectral::{estimate_regularity, linear_fit, lp_decompose_with, Field, Partition, Spectrum, TorusGrid};
use crate::stochastic::{
    band_limited, derive_seed, enhance_gpam, mollify, mollify_time, renormalization_constant,
    sample_spacetime_white_noise, sample_white_noise, steps_for, synthesize_gaussian, synthesize_lacunary,
    wick_data_from, CsbeEnhancement, GpamEnhancement, GsbeEnhancement, Mollifier, Phi42Noise, RenormKind, WickData,
};

pub const LP_RECONSTRUCTION_TOL: f64 = 1e-10;
pub const LP_ORTHOGONALITY_TOL: f64 = 1e-12;
pub const PARAPRODUCT_TOL: f64 = 1e-10;
pub const WHITE_NOISE_EXPONENT: f64 = -1.0;
pub const WHITE_NOISE_TOL: f64 = 0.15;
pub const MIN_WHITE_NOISE_SEEDS: usize = 20;
pub const SYNTH_EXPONENTS: [f64; 5] = [-1.5, -1.0, -0.5, 0.5, 1.0];
pub const SYNTH_TOL: f64 = 0.2;
/// `(f, g, h)` exponents of the commutator test.
pub const COMMUTATOR_EXPONENTS: [f64; 3] = [0.6, 0.5, -0.9];
pub const COMMUTATOR_MIN: f64 = 0.0;
pub const RESONANT_TARGET: f64 = -0.4;
pub const RESONANT_TOL: f64 = 0.2;
/// `(f, g, h, zeta)` exponents of the second-order commutator test.
pub const C2_EXPONENTS: [f64; 4] = [0.6, 0.6, 0.6, -1.4];
/// Allowed shortfall of an estimated exponent below its nominal value.
pub const ESTIMATOR_SLACK: f64 = 0.3;
/// `(xi, u, X)` exponents of the swap-operator test.
pub const SWAP_EXPONENTS: [f64; 3] = [-1.4, 0.6, 0.6];
pub const SWAP_MIN_GAIN: f64 = 0.4;
pub const RENORM_MIN_R2: f64 = 0.99;
pub const MIN_RENORM_EPS: usize = 5;
pub const MC_Z_MAX: f64 = 3.0;
/// `G(u) = GPAM_SLOPE u` in the mollifier-independence study.
pub const GPAM_SLOPE: f64 = 2.0;
pub const RICHARDSON_TARGET: f64 = 2.0;
pub const RICHARDSON_TOL: f64 = 0.4;
pub const CUBIC_DT: f64 = 1e-4;
pub const CUBIC_T: f64 = 1.0;
pub const CUBIC_IC: f64 = 1.5;
pub const CUBIC_TOL: f64 = 1e-3;
/// Relative gap allowed per unit `dt` for solvers that must agree to first order.
pub const FIRST_ORDER_RATE: f64 = 1.0;
pub const TRANSLATIONS: [f64; 3] = [-1.0, 0.0, 2.0];
pub const TRANSLATION_TOL: f64 = 1e-9;
pub const SYMMETRY_TOL: f64 = 1e-6;
pub const DENSE_ORACLE_TOL: f64 = 1e-6;
pub const ZERO_NOISE_TOL: f64 = 1e-10;
pub const ANDERSON_M: usize = 5;
pub const ZERO_NOISE_M: usize = 9;
pub const TAIL_MIN_R2: f64 = 0.9;
pub const PARALLEL_WORKERS: usize = 4;
pub const PAM_HO_ALPHAS: [f64; 3] = [0.55, 0.6, 0.65];
pub const PAM_HO_SLACK: f64 = 0.1;
/// `P(x) = x^2 + UNIVERSALITY_DELTA x^4` in the moment test.
pub const UNIVERSALITY_DELTA: f64 = 0.1;
pub const RESOLVENT_LAMBDA: f64 = 50.0;
pub const RESOLVENT_TOL: f64 = 1e-8;
pub const RESOLVENT_RESIDUAL_TOL: f64 = 1e-10;

/// A built-in experiment: defaults, run expansion, per-run work and assessment.
pub struct Builtin {
    pub name: &'static str,
    pub description: &'static str,
    /// Values accepted in the spec's `equation` field.
    pub equations: &'static [&'static str],
    pub checks: &'static [&'static str],
    pub defaults: fn() -> Params,
    pub validate: fn(&Params) -> Result<()>,
    pub plan: fn(&Params) -> Result<Vec<RunSpec>>,
    pub execute: fn(&Params, &RunSpec) -> Result<Values>,
    pub assess: fn(&Params, &[Record]) -> Assessment,
}

pub fn builtins() -> &'static [Builtin] {
    &CATALOG
}

pub fn builtin(name: &str) -> Result<&'static Builtin> {
    CATALOG.iter().find(|b| b.name == name).ok_or_else(|| Error::Unknown { kind: "experiment", name: name.to_string() })
}

fn base() -> Params {
    Params {
        equation: None,
        seeds: vec![0],
        eps: vec![0.125],
        kernels: vec![Mollifier::Gaussian],
        n: vec![64],
        dt: vec![1e-3],
        t_final: 0.1,
        samples: 1,
        assertions: Vec::new(),
    }
}

fn no_validation(_: &Params) -> Result<()> {
    Ok(())
}

fn vals<const N: usize>(pairs: [(&str, f64); N]) -> Values {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Sizes up to 256 are two-dimensional, larger ones one-dimensional.
fn grid_for(n: usize) -> Result<TorusGrid> {
    TorusGrid::new(if n > 256 { 1 } else { 2 }, n)
}

fn grid1(n: usize) -> Result<TorusGrid> {
    TorusGrid::new(1, n)
}

fn grid2(n: usize) -> Result<TorusGrid> {
    TorusGrid::new(2, n)
}

/// Values named `name` over the successful records whose key starts with `prefix`.
fn column(records: &[Record], prefix: &str, name: &str) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.key.starts_with(prefix) && r.error.is_none())
        .filter_map(|r| r.values.get(name).copied())
        .collect()
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        f64::NAN
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

fn std_err(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() / n.sqrt()
}

/// Maximum; NaN when empty or when any entry is NaN, so a check on it fails.
fn max_of(xs: &[f64]) -> f64 {
    if xs.is_empty() || xs.iter().any(|x| x.is_nan()) {
        f64::NAN
    } else {
        xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn min_of(xs: &[f64]) -> f64 {
    if xs.is_empty() || xs.iter().any(|x| x.is_nan()) {
        f64::NAN
    } else {
        xs.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

fn rel_gap(a: &Field, b: &Field) -> f64 {
    (a - b).sup_norm() / b.sup_norm().max(f64::MIN_POSITIVE)
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.len() >= 2 && xs.windows(2).all(|w| w[1] < w[0])
}

fn sample_runs(p: &Params, prefix: &str) -> Vec<RunSpec> {
    (0..p.samples)
        .map(|i| RunSpec::new(format!("{prefix}-{i:04}")).with("n", p.n[i % p.n.len()]).with("seed", p.sample_seed(i)))
        .collect()
}

// ---------------------------------------------------------------- lp-exactness

fn lp_defaults() -> Params {
    Params { n: vec![4096, 64, 1024, 128], samples: 100, ..base() }
}

fn lp_execute(_: &Params, r: &RunSpec) -> Result<Values> {
    let f = sample_white_noise(grid_for(r.usize("n")?)?, r.u64("seed")?);
    let norm2 = f.inner(&f)?;
    let mut out = Values::new();
    for (tag, partition, gap) in [("sharp", Partition::Sharp, 1), ("smooth", Partition::Smooth, 2)] {
        let d = lp_decompose_with(&f, partition);
        out.insert(format!("reconstruction_{tag}"), rel_gap(&d.reconstruct(), &f));
        let b = d.blocks();
        let mut orth: f64 = 0.0;
        for i in 0..b.len() {
            for j in i + gap..b.len() {
                orth = orth.max(b[i].inner(&b[j])?.abs() / norm2);
            }
        }
        out.insert(format!("orthogonality_{tag}"), orth);
    }
    Ok(out)
}

fn lp_assess(_: &Params, rs: &[Record]) -> Assessment {
    let rec = max_of(&[column(rs, "", "reconstruction_sharp"), column(rs, "", "reconstruction_smooth")].concat());
    let orth = max_of(&[column(rs, "", "orthogonality_sharp"), column(rs, "", "orthogonality_smooth")].concat());
    Assessment {
        aggregates: vals([("max_reconstruction", rec), ("max_orthogonality", orth)]),
        checks: vec![
            Check::at_most("reconstruction", rec, LP_RECONSTRUCTION_TOL),
            Check::at_most("orthogonality", orth, LP_ORTHOGONALITY_TOL),
        ],
    }
}

// ------------------------------------------------------- paraproduct-identity

fn pp_execute(_: &Params, r: &RunSpec) -> Result<Values> {
    let g = grid_for(r.usize("n")?)?;
    let seed = r.u64("seed")?;
    let f = sample_white_noise(g, derive_seed(seed, 0));
    let h = sample_white_noise(g, derive_seed(seed, 1));
    let fg = f.try_mul(&h)?;
    let mut out = Values::new();
    for (tag, pc) in [("sharp", Paracalc::sharp()), ("smooth", Paracalc::smooth())] {
        let p = pc.paraproducts(&f, &h)?;
        let sum = p.less.try_add(&p.resonant)?.try_add(&p.greater)?;
        out.insert(format!("identity_{tag}"), rel_gap(&sum, &fg));
    }
    Ok(out)
}

fn pp_assess(_: &Params, rs: &[Record]) -> Assessment {
    let e = max_of(&[column(rs, "", "identity_sharp"), column(rs, "", "identity_smooth")].concat());
    Assessment {
        aggregates: vals([("max_identity_defect", e)]),
        checks: vec![Check::at_most("decomposition", e, PARAPRODUCT_TOL)],
    }
}

// ------------------------------------------------------- regularity-estimator

fn reg_defaults() -> Params {
    Params { n: vec![256], seeds: (0..20).collect(), ..base() }
}

fn reg_validate(p: &Params) -> Result<()> {
    if p.seeds.len() < MIN_WHITE_NOISE_SEEDS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_WHITE_NOISE_SEEDS} seeds")));
    }
    Ok(())
}

fn reg_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs = Vec::new();
    for &s in &p.seeds {
        runs.push(RunSpec::new(format!("white-s{s}")).with("seed", s).with("target", WHITE_NOISE_EXPONENT));
    }
    for (k, a) in SYNTH_EXPONENTS.iter().enumerate() {
        for &s in &p.seeds {
            runs.push(RunSpec::new(format!("synth{k}-s{s}")).with("seed", s).with("target", *a));
        }
    }
    Ok(runs)
}

fn reg_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let g = grid2(p.n[0])?;
    let seed = r.u64("seed")?;
    let f = if r.key.starts_with("white") {
        sample_white_noise(g, seed)
    } else {
        synthesize_gaussian(g, r.f64("target")?, seed)
    };
    let e = estimate_regularity(&f, None)?;
    Ok(vals([("alpha_hat", e.alpha_hat), ("r_squared", e.r_squared)]))
}

fn reg_assess(_: &Params, rs: &[Record]) -> Assessment {
    let white = mean(&column(rs, "white", "alpha_hat"));
    let mut agg = vals([("white_mean", white)]);
    let mut worst: f64 = 0.0;
    for (k, a) in SYNTH_EXPONENTS.iter().enumerate() {
        let m = mean(&column(rs, &format!("synth{k}-"), "alpha_hat"));
        agg.insert(format!("synth_mean_{a}"), m);
        worst = if m.is_nan() { f64::NAN } else { worst.max((m - a).abs()) };
    }
    agg.insert("synth_max_deviation".into(), worst);
    Assessment {
        aggregates: agg,
        checks: vec![
            Check::within("white-noise", white, WHITE_NOISE_EXPONENT, WHITE_NOISE_TOL),
            Check::at_most("synthesized", worst, SYNTH_TOL),
        ],
    }
}

// ---------------------------------------------------------- commutator-gain

fn comm_defaults() -> Params {
    Params { n: vec![4096], seeds: (0..10).collect(), ..base() }
}

fn comm_plan(p: &Params) -> Result<Vec<RunSpec>> {
    Ok(p.seeds.iter().map(|&s| RunSpec::new(format!("s{s:03}")).with("seed", s)).collect())
}

fn comm_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let g = grid1(p.n[0])?;
    let seed = r.u64("seed")?;
    let pc = Paracalc::default();
    let mut k = 0;
    let mut syn = |a: f64| {
        k += 1;
        synthesize_lacunary(g, a, derive_seed(seed, k))
    };
    let est = |f: &Field| estimate_regularity(f, None).map(|e| e.alpha_hat);
    let [a, b, c] = COMMUTATOR_EXPONENTS;
    let (f, h, z) = (syn(a), syn(b), syn(c));
    let comm = est(&pc.commutator_c(&f, &h, &z)?)?;
    let res = est(&pc.resonant(&h, &z)?)?;
    let [a, b, c, d] = C2_EXPONENTS;
    let (f1, f2, f3, f4) = (syn(a), syn(b), syn(c), syn(d));
    let c2 = est(&pc.commutator_c2(&f1, &f2, &f3, &f4)?)?;
    let [a, b, c] = SWAP_EXPONENTS;
    let (xi, u, x) = (syn(a), syn(b), syn(c));
    let t = est(&pc.commutator_t(&xi, &u, &x)?)?;
    let t_term = est(&pc.para_less(&xi, &pc.para_less(&u, &x)?)?)?;
    Ok(vals([
        ("commutator", comm),
        ("resonant", res),
        ("c2", c2),
        ("swap", t),
        ("swap_term", t_term),
        ("swap_gain", t - t_term),
    ]))
}

fn comm_assess(_: &Params, rs: &[Record]) -> Assessment {
    let m = |name| mean(&column(rs, "", name));
    let (c, res, c2, gain) = (m("commutator"), m("resonant"), m("c2"), m("swap_gain"));
    let c2_floor = C2_EXPONENTS.iter().sum::<f64>() - ESTIMATOR_SLACK;
    Assessment {
        aggregates: vals([
            ("commutator_mean", c),
            ("commutator_min", min_of(&column(rs, "", "commutator"))),
            ("resonant_mean", res),
            ("c2_mean", c2),
            ("swap_gain_mean", gain),
        ]),
        checks: vec![
            Check::at_least("commutator", c, COMMUTATOR_MIN),
            Check::within("resonant", res, RESONANT_TARGET, RESONANT_TOL),
            Check::at_least("c2", c2, c2_floor),
            Check::at_least("swap", gain, SWAP_MIN_GAIN),
        ],
    }
}

// ------------------------------------------------------- renorm-divergence

fn renorm_defaults() -> Params {
    Params {
        eps: vec![1.0 / 4.0, 1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0],
        kernels: vec![Mollifier::Gaussian, Mollifier::Fejer],
        n: vec![256],
        samples: 50,
        ..base()
    }
}

fn renorm_validate(p: &Params) -> Result<()> {
    if p.eps.len() < MIN_RENORM_EPS {
        return Err(Error::InvalidArgument(format!("need at least {MIN_RENORM_EPS} values of eps")));
    }
    Ok(())
}

const RENORM_KINDS: [(&str, RenormKind); 2] = [("gpam", RenormKind::GpamResonant), ("phi42", RenormKind::Phi42Wick)];

/// Monte-Carlo runs use the middle `eps` of the list.
fn mc_eps(p: &Params) -> f64 {
    p.eps[p.eps.len() / 2]
}

fn renorm_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs = Vec::new();
    for (tag, _) in RENORM_KINDS {
        for k in &p.kernels {
            for (i, e) in p.eps.iter().enumerate() {
                runs.push(
                    RunSpec::new(format!("c-{tag}-{k}-{i}"))
                        .with("kind", tag)
                        .with("kernel", k.to_string())
                        .with("eps", *e),
                );
            }
        }
    }
    for k in &p.kernels {
        for i in 0..p.samples {
            runs.push(
                RunSpec::new(format!("mc-{k}-{i:04}"))
                    .with("kernel", k.to_string())
                    .with("eps", mc_eps(p))
                    .with("seed", p.sample_seed(i)),
            );
        }
    }
    Ok(runs)
}

fn renorm_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let g = grid2(p.n[0])?;
    let (k, eps) = (r.kernel()?, r.f64("eps")?);
    if r.key.starts_with("c-") {
        let kind = RENORM_KINDS.iter().find(|(t, _)| *t == r.str("kind").unwrap_or("")).map(|x| x.1);
        let kind = kind.ok_or_else(|| Error::Unknown { kind: "counterterm", name: r.key.clone() })?;
        return Ok(vals([("c", renormalization_constant(&g, eps, k, kind)), ("log_inv_eps", (1.0 / eps).ln())]));
    }
    let seed = r.u64("seed")?;
    let e = GpamEnhancement::from_noise(&Paracalc::default(), mollify(&sample_white_noise(g, seed), eps, k), 0.0)?;
    let noise = Phi42Noise::sample(g, 1.0, 0, eps, k, seed);
    let x0 = Spectrum { grid: g, coeffs: noise.x0 }.to_field();
    Ok(vals([("gpam", e.resonant.mean()), ("phi42", x0.try_mul(&x0)?.mean())]))
}

fn renorm_assess(p: &Params, rs: &[Record]) -> Assessment {
    let mut agg = BTreeMap::new();
    let (mut r2_min, mut slope_min, mut z_max) = (f64::INFINITY, f64::INFINITY, 0.0f64);
    for (tag, kind) in RENORM_KINDS {
        for k in &p.kernels {
            let xs = column(rs, &format!("c-{tag}-{k}-"), "log_inv_eps");
            let ys = column(rs, &format!("c-{tag}-{k}-"), "c");
            let (slope, _, r2) = if xs.len() == p.eps.len() && xs.len() >= 2 {
                linear_fit(&xs, &ys)
            } else {
                (f64::NAN, f64::NAN, f64::NAN)
            };
            agg.insert(format!("{tag}_{k}_slope"), slope);
            agg.insert(format!("{tag}_{k}_r2"), r2);
            r2_min = if r2.is_nan() { f64::NAN } else { r2_min.min(r2) };
            slope_min = if slope.is_nan() { f64::NAN } else { slope_min.min(slope) };
            let mc = column(rs, &format!("mc-{k}-"), tag);
            let exact = grid2(p.n[0]).map(|g| renormalization_constant(&g, mc_eps(p), *k, kind)).unwrap_or(f64::NAN);
            let z = (mean(&mc) - exact) / std_err(&mc);
            agg.insert(format!("{tag}_{k}_mc_mean"), mean(&mc));
            agg.insert(format!("{tag}_{k}_mc_stderr"), std_err(&mc));
            agg.insert(format!("{tag}_{k}_exact"), exact);
            agg.insert(format!("{tag}_{k}_z"), z);
            z_max = if z.is_nan() { f64::NAN } else { z_max.max(z.abs()) };
        }
    }
    Assessment {
        aggregates: agg,
        checks: vec![
            Check::at_least("regression-r2", r2_min, RENORM_MIN_R2),
            Check::holds("positive-slope", slope_min > 0.0, "every slope > 0"),
            Check::at_most("monte-carlo", z_max, MC_Z_MAX),
        ],
    }
}

// ------------------------------------------------ mollifier-independence-gpam

fn mi_defaults() -> Params {
    Params {
        eps: vec![1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0],
        kernels: vec![Mollifier::Gaussian, Mollifier::Fejer],
        seeds: vec![7],
        n: vec![128],
        dt: vec![5e-4],
        t_final: 0.25,
        ..base()
    }
}

fn mi_validate(p: &Params) -> Result<()> {
    if p.eps.len() < 3 || p.kernels.len() < 2 {
        return Err(Error::InvalidArgument("need at least three eps and two kernels".into()));
    }
    Ok(())
}

fn mi_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs = Vec::new();
    for &s in &p.seeds {
        for ct in [true, false] {
            let tag = if ct { "with" } else { "without" };
            runs.push(RunSpec::new(format!("{tag}-s{s}")).with("seed", s).with("counterterm", ct));
        }
    }
    Ok(runs)
}

fn mi_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let (seed, ct) = (r.u64("seed")?, r.bool("counterterm")?);
    let n = p.n[0];
    let g = grid2(n)?;
    let cfg = SolverConfig::new(p.t_final, p.dt[0], n).with_initial_condition(Field::constant(g, 1.0));
    let gf = ScalarFn::affine(0.0, GPAM_SLOPE);
    let jobs: Vec<(usize, Mollifier)> = (0..p.eps.len()).flat_map(|i| p.kernels.iter().map(move |k| (i, *k))).collect();
    let finals: Vec<Field> = jobs
        .par_iter()
        .map(|&(i, k)| {
            let e = enhance_gpam(g, p.eps[i], k, seed)?;
            let e = if ct { e } else { e.translate(e.c_eps) };
            Ok(solve_gpam_pc(&e, &gf, &cfg)?.final_state().clone())
        })
        .collect::<Result<_>>()?;
    let nk = p.kernels.len();
    let at = |i: usize, j: usize| &finals[i * nk + j];
    let mut out = Values::new();
    for i in 0..p.eps.len() {
        let gap = (1..nk).map(|j| (at(i, 0) - at(i, j)).sup_norm()).fold(0.0, f64::max);
        out.insert(format!("gap_{i}"), gap);
        out.insert(format!("sup_{i}"), at(i, 0).sup_norm());
    }
    for (j, k) in p.kernels.iter().enumerate() {
        for i in 0..p.eps.len() - 1 {
            out.insert(format!("cauchy_{k}_{i}"), (at(i, j) - at(i + 1, j)).sup_norm());
        }
    }
    Ok(out)
}

fn mi_assess(p: &Params, rs: &[Record]) -> Assessment {
    let series = |r: &Record, name: &dyn Fn(usize) -> String, len: usize| -> Vec<f64> {
        (0..len).filter_map(|i| r.values.get(&name(i)).copied()).collect()
    };
    let mut flags = [true; 4];
    for r in rs {
        let with = r.key.starts_with("with-");
        let gaps = series(r, &|i| format!("gap_{i}"), p.eps.len());
        let gap_dec = r.error.is_none() && gaps.len() == p.eps.len() && strictly_decreasing(&gaps);
        let cauchy: Vec<bool> = p
            .kernels
            .iter()
            .map(|k| {
                let c = series(r, &|i| format!("cauchy_{k}_{i}"), p.eps.len() - 1);
                r.error.is_none() && c.len() == p.eps.len() - 1 && strictly_decreasing(&c)
            })
            .collect();
        if with {
            flags[0] &= gap_dec;
            flags[1] &= cauchy.iter().all(|c| *c);
        } else {
            flags[2] &= r.error.is_none() && !gap_dec;
            flags[3] &= r.error.is_none() && cauchy.iter().all(|c| !*c);
        }
    }
    Assessment {
        aggregates: BTreeMap::new(),
        checks: vec![
            Check::holds("gap-decreases", flags[0], "inter-kernel gap decreases with eps (counterterm)"),
            Check::holds("cauchy-decreases", flags[1], "eps-Cauchy differences decrease (counterterm)"),
            Check::holds("gap-fails-without", flags[2], "gap does not decrease without counterterm"),
            Check::holds("cauchy-fails-without", flags[3], "Cauchy differences do not decrease without counterterm"),
        ],
    }
}

// ---------------------------------------------------------- phi42-cross-solver

fn phi4_defaults() -> Params {
    Params { seeds: vec![0, 1, 2, 3], n: vec![64], dt: vec![0.5 / 1024.0], t_final: 0.5, samples: 4, ..base() }
}

fn phi4_validate(p: &Params) -> Result<()> {
    let steps = steps_for(p.dt[0], p.t_final)?;
    if p.samples < 2 || steps % (1 << (p.samples - 1)) != 0 {
        return Err(Error::InvalidArgument(format!("{steps} steps cannot be halved {} times", p.samples - 1)));
    }
    Ok(())
}

fn phi4_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs: Vec<RunSpec> = p.seeds.iter().map(|&s| RunSpec::new(format!("s{s:03}")).with("seed", s)).collect();
    runs.push(RunSpec::new("cubic-decay"));
    Ok(runs)
}

fn phi4_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    if r.key == "cubic-decay" {
        let g = grid2(32)?;
        let steps = steps_for(CUBIC_DT, CUBIC_T)?;
        let cfg = SolverConfig::new(CUBIC_T, CUBIC_DT, 32).with_initial_condition(Field::constant(g, CUBIC_IC));
        let want = cubic_decay(CUBIC_IC, CUBIC_T);
        let dd = solve_phi42_dd(&WickData::zero(g, CUBIC_DT, steps), &cfg)?;
        let direct = solve_phi42_direct(&Phi42Noise::silent(g, CUBIC_DT, steps), 0.0, &cfg)?;
        let err = |f: &Field| f.data().iter().map(|v| (v - want).abs()).fold(0.0, f64::max);
        return Ok(vals([("error_dd", err(dd.final_state())), ("error_direct", err(direct.final_state()))]));
    }
    let g = grid2(p.n[0])?;
    let steps = steps_for(p.dt[0], p.t_final)?;
    let mut noise = Phi42Noise::sample(g, p.dt[0], steps, p.eps[0], p.kernels[0], r.u64("seed")?);
    let mut out = Values::new();
    for level in 0..p.samples {
        if level > 0 {
            noise = noise.coarsen()?;
        }
        let cfg = SolverConfig::new(p.t_final, noise.dt, p.n[0]);
        let w = wick_data_from(&noise);
        let a = solve_phi42_dd(&w, &cfg)?;
        let b = solve_phi42_direct(&noise, w.c1, &cfg)?;
        out.insert(format!("gap_{level}"), (a.final_state() - b.final_state()).l2_norm());
        out.insert(format!("dt_{level}"), noise.dt);
    }
    Ok(out)
}

fn phi4_assess(p: &Params, rs: &[Record]) -> Assessment {
    let mut agg = BTreeMap::new();
    let gaps: Vec<f64> = (0..p.samples).map(|l| mean(&column(rs, "s", &format!("gap_{l}")))).collect();
    for (l, g) in gaps.iter().enumerate() {
        agg.insert(format!("mean_gap_{l}"), *g);
    }
    let ratio = gaps.get(1).copied().unwrap_or(f64::NAN) / gaps[0];
    agg.insert("richardson_ratio".into(), ratio);
    let cubic = max_of(&[column(rs, "cubic", "error_dd"), column(rs, "cubic", "error_direct")].concat());
    agg.insert("cubic_error".into(), cubic);
    Assessment {
        aggregates: agg,
        checks: vec![
            Check::within("richardson", ratio, RICHARDSON_TARGET, RICHARDSON_TOL),
            Check::at_most("cubic-decay", cubic, CUBIC_TOL),
        ],
    }
}

// ---------------------------------------------------------- smooth-equivalence

const SMOOTH_EQUATIONS: [&str; 4] = ["gpam", "gsbe", "csbe", "pam-ho"];

fn smooth_defaults() -> Params {
    Params { seeds: vec![3], dt: vec![2e-3, 1e-3], t_final: 0.04, ..base() }
}

fn smooth_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs = Vec::new();
    for eq in SMOOTH_EQUATIONS {
        if p.equation.as_deref().is_some_and(|e| e != eq) {
            continue;
        }
        for &s in &p.seeds {
            for (i, dt) in p.dt.iter().enumerate() {
                runs.push(
                    RunSpec::new(format!("{eq}-s{s}-dt{i}")).with("equation", eq).with("seed", s).with("dt", *dt),
                );
            }
        }
    }
    Ok(runs)
}

/// Smooth space-time noise: two band-limited profiles with time-dependent weights.
fn smooth_spacetime(g: TorusGrid, dt: f64, steps: usize, seed: u64) -> Result<TimeField> {
    let a = band_limited(g, 5, derive_seed(seed, 0)).scale(3.0);
    let b = band_limited(g, 3, derive_seed(seed, 1)).scale(5.0);
    TimeField::from_fn(g, TimeField::uniform_times(dt, steps), |t| {
        a.scale(1.0 + t).try_add(&b.scale(t)).expect("same grid")
    })
}

fn smooth_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let (seed, dt) = (r.u64("seed")?, r.f64("dt")?);
    let pc = Paracalc::default();
    let steps = steps_for(dt, p.t_final)?;
    let (a, b) = match r.str("equation")? {
        "gpam" => {
            let g = grid2(32)?;
            let xi = band_limited(g, 6, seed).scale(4.0);
            let e = GpamEnhancement::from_noise(&pc, xi.clone(), 0.0)?;
            let cfg = SolverConfig::new(p.t_final, dt, 32).with_initial_condition(Field::constant(g, 1.0));
            let gf = ScalarFn::sine(1.0, 1.0);
            (solve_gpam_pc(&e, &gf, &cfg)?, solve_gpam_direct(&xi, 0.0, &gf, &cfg)?)
        }
        "gsbe" => {
            let g = grid1(64)?;
            let xi = smooth_spacetime(g, dt, steps, seed)?;
            let e = GsbeEnhancement::from_noise(&pc, xi.clone())?;
            let gf = ScalarFn::polynomial(&[0.5, 0.3, -0.2]);
            let cfg = SolverConfig::new(p.t_final, dt, 64).with_initial_condition(Field::mode(g, [2, 0], 0.3, 0.0));
            (solve_gsbe(&e, &gf, &cfg)?, solve_gsbe_direct(&xi, &gf, &cfg)?)
        }
        "csbe" => {
            let g = grid1(64)?;
            let xi = smooth_spacetime(g, dt, steps, seed)?;
            let e = CsbeEnhancement::from_noise(&pc, xi.clone())?;
            let cfg = SolverConfig::new(p.t_final, dt, 64).with_initial_condition(Field::mode(g, [1, 0], 0.5, 0.1));
            (solve_csbe(&e, 0.7, &cfg)?, solve_csbe_direct(&xi, 0.7, &cfg)?)
        }
        "pam-ho" => {
            let g = grid1(64)?;
            let xi = band_limited(g, 6, seed).scale(5.0);
            let cfg = SolverConfig::new(p.t_final, dt, 64).with_initial_condition(Field::constant(g, 1.0));
            let e = PamHoEnhancement::from_noise(&pc, xi.clone(), cfg.times()?)?;
            (solve_pam_ho(&e, &cfg)?, solve_pam_direct(&xi, &cfg)?)
        }
        other => return Err(Error::Unknown { kind: "equation", name: other.into() }),
    };
    let gap = rel_gap(a.final_state(), b.final_state());
    Ok(vals([("gap", gap), ("gap_per_dt", gap / dt)]))
}

fn first_order_assess(rs: &[Record], check: &str) -> Assessment {
    let worst = if rs.iter().any(|r| r.error.is_some()) { f64::NAN } else { max_of(&column(rs, "", "gap_per_dt")) };
    Assessment {
        aggregates: vals([("max_gap_per_dt", worst), ("max_gap", max_of(&column(rs, "", "gap")))]),
        checks: vec![Check::at_most(check, worst, FIRST_ORDER_RATE)],
    }
}

fn smooth_assess(_: &Params, rs: &[Record]) -> Assessment {
    first_order_assess(rs, "classical-equivalence")
}

// ---------------------------------------------------------------- kpz-burgers

fn kpz_defaults() -> Params {
    Params { n: vec![128], eps: vec![1.0 / 16.0], seeds: vec![5], dt: vec![1e-3, 5e-4], t_final: 0.05, ..base() }
}

fn dt_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs = Vec::new();
    for &s in &p.seeds {
        for (i, dt) in p.dt.iter().enumerate() {
            runs.push(RunSpec::new(format!("s{s}-dt{i}")).with("seed", s).with("dt", *dt));
        }
    }
    Ok(runs)
}

fn kpz_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let (seed, dt) = (r.u64("seed")?, r.f64("dt")?);
    let g = grid1(p.n[0])?;
    let steps = steps_for(dt, p.t_final)?;
    let (eps, k) = (p.eps[0], p.kernels[0]);
    let xi = mollify_time(&sample_spacetime_white_noise(g, dt, steps, seed), eps, k);
    let c = renormalization_constant(&g, eps, k, RenormKind::KpzSquare);
    let cfg = SolverConfig::new(p.t_final, dt, p.n[0]);
    let h = solve_kpz(&xi, c, &cfg)?;
    let u = solve_csbe_direct(&xi, 1.0, &cfg)?;
    let gap = rel_gap(&h.final_state().dx(), u.final_state());
    Ok(vals([("gap", gap), ("gap_per_dt", gap / dt), ("c_eps", c)]))
}

fn kpz_assess(_: &Params, rs: &[Record]) -> Assessment {
    first_order_assess(rs, "slope-is-burgers")
}

// ------------------------------------------------------- translation-duality

fn td_defaults() -> Params {
    Params { n: vec![32], seeds: vec![3], dt: vec![5e-3], t_final: 0.05, ..base() }
}

fn td_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs = Vec::new();
    for &s in &p.seeds {
        for (i, c) in TRANSLATIONS.iter().enumerate() {
            runs.push(RunSpec::new(format!("s{s}-c{i}")).with("seed", s).with("C", *c));
        }
    }
    Ok(runs)
}

fn td_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let (seed, c) = (r.u64("seed")?, r.f64("C")?);
    let n = p.n[0];
    let g = grid2(n)?;
    let eta = band_limited(g, 6, seed).scale(4.0);
    let e = GpamEnhancement::from_noise(&Paracalc::default(), eta.clone(), 0.0)?;
    let cfg = SolverConfig::new(p.t_final, p.dt[0], n).with_initial_condition(Field::constant(g, 1.0));
    let gf = ScalarFn::sine(1.0, 1.0);
    let a = solve_gpam_pc(&e.translate(c), &gf, &cfg)?;
    let b = solve_gpam_modified(&eta, c, &gf, &cfg)?;
    Ok(vals([("gap", rel_gap(a.final_state(), b.final_state()))]))
}

fn td_assess(_: &Params, rs: &[Record]) -> Assessment {
    let worst = if rs.iter().any(|r| r.error.is_some()) { f64::NAN } else { max_of(&column(rs, "", "gap")) };
    Assessment {
        aggregates: vals([("max_gap", worst)]),
        checks: vec![Check::at_most("translation", worst, TRANSLATION_TOL)],
    }
}

// ---------------------------------------------------------- anderson-spectrum

fn and_defaults() -> Params {
    Params { seeds: vec![3], samples: 20, ..base() }
}

fn and_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs: Vec<RunSpec> = (0..p.samples)
        .map(|i| {
            RunSpec::new(format!("pair-{i:03}")).with("u", p.sample_seed(2 * i)).with("v", p.sample_seed(2 * i + 1))
        })
        .collect();
    runs.push(RunSpec::new("dense-oracle"));
    runs.push(RunSpec::new("zero-noise"));
    Ok(runs)
}

fn and_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let g = grid2(p.n[0])?;
    let pc = Paracalc::default();
    if r.key == "zero-noise" {
        let e = GpamEnhancement::from_noise(&pc, Field::zeros(g), 0.0)?;
        let s = eigensolve(&pc, &e, &EigenConfig::new(ZERO_NOISE_M))?;
        let want = laplacian_spectrum(&g, ZERO_NOISE_M);
        let err = s.eigenvalues.iter().zip(&want).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max);
        return Ok(vals([("error", err), ("converged", if s.converged { 1.0 } else { 0.0 })]));
    }
    let e = enhance_gpam(g, p.eps[0], p.kernels[0], p.seeds[0])?;
    if r.key == "dense-oracle" {
        let s = eigensolve(&pc, &e, &EigenConfig::new(ANDERSON_M))?;
        let d = dense_spectrum(&pc, &e, ApplyMode::Paracontrolled)?;
        let err = s.eigenvalues.iter().zip(&d).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let mut out = vals([("error", err), ("orthonormality", s.orthonormality_defect)]);
        for (i, l) in s.eigenvalues.iter().enumerate() {
            out.insert(format!("lambda_{i}"), *l);
        }
        return Ok(out);
    }
    let u = sample_white_noise(g, r.u64("u")?);
    let v = sample_white_noise(g, r.u64("v")?);
    Ok(vals([
        ("defect", symmetry_defect(&pc, &e, &u, &v, ApplyMode::Paracontrolled)?),
        ("defect_classical", symmetry_defect(&pc, &e, &u, &v, ApplyMode::Classical)?),
    ]))
}

fn and_assess(_: &Params, rs: &[Record]) -> Assessment {
    let sym = if rs.iter().any(|r| r.key.starts_with("pair") && r.error.is_some()) {
        f64::NAN
    } else {
        max_of(&column(rs, "pair", "defect"))
    };
    let dense = max_of(&column(rs, "dense-oracle", "error"));
    let zero = max_of(&column(rs, "zero-noise", "error"));
    Assessment {
        aggregates: vals([("max_symmetry_defect", sym), ("dense_error", dense), ("zero_noise_error", zero)]),
        checks: vec![
            Check::at_most("symmetry", sym, SYMMETRY_TOL),
            Check::at_most("dense-oracle", dense, DENSE_ORACLE_TOL),
            Check::at_most("zero-noise", zero, ZERO_NOISE_TOL),
        ],
    }
}

// --------------------------------------------------------------- lambda1-tail

fn tail_defaults() -> Params {
    Params { samples: 200, ..base() }
}

fn tail_validate(p: &Params) -> Result<()> {
    if p.samples < MIN_TAIL_SAMPLES {
        return Err(Error::InvalidArgument(format!("need at least {MIN_TAIL_SAMPLES} samples")));
    }
    Ok(())
}

fn tail_plan(p: &Params) -> Result<Vec<RunSpec>> {
    Ok((0..p.samples).map(|i| RunSpec::new(format!("sample-{i:04}")).with("seed", p.sample_seed(i))).collect())
}

fn tail_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let l = lambda1_of(grid2(p.n[0])?, p.eps[0], p.kernels[0], r.u64("seed")?)?;
    Ok(vals([("lambda1", l)]))
}

fn tail_assess(_: &Params, rs: &[Record]) -> Assessment {
    let s = column(rs, "", "lambda1");
    let fit = if s.len() == rs.len() { survival_fit(&s).ok() } else { None };
    let (slope, hw, r2, mean_l) =
        fit.map_or((f64::NAN, f64::NAN, f64::NAN, f64::NAN), |f| (f.slope, f.slope_halfwidth, f.r_squared, f.mean));
    Assessment {
        aggregates: vals([("slope", slope), ("slope_halfwidth", hw), ("r_squared", r2), ("mean_lambda1", mean_l)]),
        checks: vec![
            Check::at_least("log-linear", r2, TAIL_MIN_R2),
            Check::holds("decaying", slope < 0.0, "log-survival slope < 0"),
        ],
    }
}

// ---------------------------------------------------------- weak-universality

fn wu_defaults() -> Params {
    Params { n: vec![32], eps: vec![0.25], seeds: vec![5], dt: vec![1e-3, 5e-4], t_final: 0.01, ..base() }
}

fn wu_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let (seed, dt) = (r.u64("seed")?, r.f64("dt")?);
    let u = UniversalityConfig::new(ScalarFn::polynomial(&[0.0, 0.0, 1.0]), p.eps[0], seed);
    let (b, chi) = simulate_mesoscopic(&u, &SolverConfig::new(p.t_final, dt, p.n[0]))?;
    let nf = u.fine_points(p.n[0])?;
    let d = solve_csbe_direct(b.component("xi")?, 1.0, &SolverConfig::new(p.t_final, dt, nf))?;
    let gap = rel_gap(b.final_state(), d.final_state());
    let chi_dev = chi.frames.iter().flat_map(|f| f.data().iter()).map(|c| (c - 2.0).abs()).fold(0.0, f64::max);
    Ok(vals([("gap", gap), ("gap_per_dt", gap / dt), ("chi_deviation", chi_dev)]))
}

fn wu_assess(_: &Params, rs: &[Record]) -> Assessment {
    first_order_assess(rs, "rescaled-is-burgers")
}

// ---------------------------------------------------------------- determinism

fn det_defaults() -> Params {
    Params { n: vec![64, 1024], samples: 8, ..base() }
}

fn det_plan(_: &Params) -> Result<Vec<RunSpec>> {
    Ok(vec![RunSpec::new("paraproduct-identity")])
}

fn det_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let spec = ExperimentSpec {
        seeds: Some(p.seeds.clone()),
        n: Some(p.n.clone()),
        samples: Some(p.samples),
        ..ExperimentSpec::named(&r.key)
    };
    let serial = run_with_workers(&spec, 1)?;
    let parallel = run_with_workers(&spec, PARALLEL_WORKERS)?;
    let same = serial.to_json()? == parallel.to_json()? && serial.to_csv() == parallel.to_csv();
    let stored = super::ExperimentReport::from_json(&serial.to_json()?)?;
    let replayed = replay_with_workers(&stored, PARALLEL_WORKERS)?;
    let bytes = replayed.report.to_json()? == serial.to_json()?;
    let mut edited = stored.clone();
    edited.spec.seeds[0] = edited.spec.seeds[0].wrapping_add(1);
    let flagged = !replay_with_workers(&edited, PARALLEL_WORKERS)?.identical();
    let b = |x: bool| if x { 1.0 } else { 0.0 };
    Ok(vals([
        ("serial_parallel_identical", b(same)),
        ("replay_identical", b(replayed.identical() && bytes)),
        ("edited_seed_flagged", b(flagged)),
    ]))
}

fn det_assess(_: &Params, rs: &[Record]) -> Assessment {
    let flag = |name| column(rs, "", name).first().copied() == Some(1.0);
    Assessment {
        aggregates: BTreeMap::new(),
        checks: vec![
            Check::holds("serial-parallel", flag("serial_parallel_identical"), "byte-identical reports"),
            Check::holds("replay", flag("replay_identical"), "replay reproduces every byte"),
            Check::holds("edited-seed", flag("edited_seed_flagged"), "replay of an edited seed is flagged"),
        ],
    }
}

// ---------------------------------------------------------- pam-ho-regularity

fn pamho_defaults() -> Params {
    Params { n: vec![1024], seeds: vec![0, 1, 2], dt: vec![2e-5], t_final: 0.05, ..base() }
}

fn pamho_plan(p: &Params) -> Result<Vec<RunSpec>> {
    let mut runs = Vec::new();
    for (i, a) in PAM_HO_ALPHAS.iter().enumerate() {
        for &s in &p.seeds {
            runs.push(RunSpec::new(format!("a{i}-s{s}")).with("alpha", *a).with("seed", s));
        }
    }
    Ok(runs)
}

fn pamho_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let (alpha, seed) = (r.f64("alpha")?, r.u64("seed")?);
    let g = grid1(p.n[0])?;
    let cfg = SolverConfig::new(p.t_final, p.dt[0], p.n[0]).with_initial_condition(Field::constant(g, 1.0));
    let e = enhance_pam_ho(g, alpha, seed, &cfg)?;
    let b = solve_pam_ho(&e, &cfg)?;
    let ru = estimate_regularity(&b.final_state().centered(), None)?.alpha_hat;
    let rs = estimate_regularity(&b.component("u_sharp")?.last().centered(), None)?.alpha_hat;
    Ok(vals([("u", ru), ("u_sharp", rs), ("gain", rs - ru), ("excess", rs - ru - 2.0 * alpha)]))
}

fn pamho_assess(_: &Params, rs: &[Record]) -> Assessment {
    let worst = if rs.iter().any(|r| r.error.is_some()) { f64::NAN } else { min_of(&column(rs, "", "excess")) };
    Assessment {
        aggregates: vals([("min_excess", worst), ("mean_gain", mean(&column(rs, "", "gain")))]),
        checks: vec![Check::at_least("remainder-gain", worst, -PAM_HO_SLACK)],
    }
}

// ------------------------------------------------------- universality-moment

fn um_defaults() -> Params {
    Params { n: vec![32], eps: vec![0.25], seeds: (0..20).collect(), dt: vec![1e-3], t_final: 0.05, ..base() }
}

fn um_plan(p: &Params) -> Result<Vec<RunSpec>> {
    Ok(p.seeds.iter().map(|&s| RunSpec::new(format!("s{s:03}")).with("seed", s)).collect())
}

fn um_config(p: &Params, seed: u64) -> UniversalityConfig {
    UniversalityConfig::new(ScalarFn::polynomial(&[0.0, 0.0, 1.0, 0.0, UNIVERSALITY_DELTA]), p.eps[0], seed)
}

fn um_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let u = um_config(p, r.u64("seed")?);
    let (_, chi) = simulate_mesoscopic(&u, &SolverConfig::new(p.t_final, p.dt[0], p.n[0]))?;
    Ok(vals([("chi_mean", chi.last().mean())]))
}

fn um_assess(p: &Params, rs: &[Record]) -> Assessment {
    let xs = column(rs, "", "chi_mean");
    let predicted = steps_for(p.dt[0], p.t_final)
        .and_then(|steps| mesoscopic_x_variance(&um_config(p, 0), p.n[0], p.dt[0], steps))
        .map(|var| 2.0 + 12.0 * UNIVERSALITY_DELTA * p.eps[0] * var)
        .unwrap_or(f64::NAN);
    let z = (mean(&xs) - predicted) / std_err(&xs);
    Assessment {
        aggregates: vals([("chi_mean", mean(&xs)), ("chi_stderr", std_err(&xs)), ("predicted", predicted), ("z", z)]),
        checks: vec![Check::at_most("moment", z.abs(), MC_Z_MAX)],
    }
}

// ---------------------------------------------------------- resolvent-identity

fn res_defaults() -> Params {
    Params { n: vec![128], seeds: vec![3, 4, 5], ..base() }
}

fn res_plan(p: &Params) -> Result<Vec<RunSpec>> {
    Ok(p.seeds.iter().map(|&s| RunSpec::new(format!("s{s:03}")).with("seed", s)).collect())
}

fn res_execute(p: &Params, r: &RunSpec) -> Result<Values> {
    let seed = r.u64("seed")?;
    let g = grid1(p.n[0])?;
    let xi = band_limited(g, 8, derive_seed(seed, 0)).scale(2.0);
    let phi = band_limited(g, 5, derive_seed(seed, 1));
    let s = solve_resolvent_1d(&Paracalc::default(), &xi, RESOLVENT_LAMBDA, &phi, 1e-13, 500)?;
    let d = dense_resolvent(&xi, RESOLVENT_LAMBDA, &phi)?;
    Ok(vals([("gap", rel_gap(&s.u, &d)), ("residual", s.residual), ("iterations", s.iterations as f64)]))
}

fn res_assess(_: &Params, rs: &[Record]) -> Assessment {
    let failed = rs.iter().any(|r| r.error.is_some());
    let gap = if failed { f64::NAN } else { max_of(&column(rs, "", "gap")) };
    let res = if failed { f64::NAN } else { max_of(&column(rs, "", "residual")) };
    Assessment {
        aggregates: vals([("max_gap", gap), ("max_residual", res)]),
        checks: vec![
            Check::at_most("dense-oracle", gap, RESOLVENT_TOL),
            Check::at_most("residual", res, RESOLVENT_RESIDUAL_TOL),
        ],
    }
}

fn lp_plan(p: &Params) -> Result<Vec<RunSpec>> {
    Ok(sample_runs(p, "field"))
}

fn pp_plan(p: &Params) -> Result<Vec<RunSpec>> {
    Ok(sample_runs(p, "pair"))
}

static CATALOG: [Builtin; 17] = [
    Builtin {
        name: "lp-exactness",
        description: "Littlewood-Paley blocks sum to the field and are mutually orthogonal",
        equations: &[],
        checks: &["reconstruction", "orthogonality"],
        defaults: lp_defaults,
        validate: no_validation,
        plan: lp_plan,
        execute: lp_execute,
        assess: lp_assess,
    },
    Builtin {
        name: "paraproduct-identity",
        description: "f g = f < g + f o g + f > g on random pairs",
        equations: &[],
        checks: &["decomposition"],
        defaults: lp_defaults,
        validate: no_validation,
        plan: pp_plan,
        execute: pp_execute,
        assess: pp_assess,
    },
    Builtin {
        name: "regularity-estimator",
        description: "Hoelder-Besov exponent of 2D white noise and of synthesized fields",
        equations: &[],
        checks: &["white-noise", "synthesized"],
        defaults: reg_defaults,
        validate: reg_validate,
        plan: reg_plan,
        execute: reg_execute,
        assess: reg_assess,
    },
    Builtin {
        name: "commutator-gain",
        description: "Estimated regularity of C, C2 and the swap operator against their naive terms",
        equations: &[],
        checks: &["commutator", "resonant", "c2", "swap"],
        defaults: comm_defaults,
        validate: no_validation,
        plan: comm_plan,
        execute: comm_execute,
        assess: comm_assess,
    },
    Builtin {
        name: "renorm-divergence",
        description: "Logarithmic growth of the gPAM and Phi^4_2 counterterms, checked by Monte Carlo",
        equations: &[],
        checks: &["regression-r2", "positive-slope", "monte-carlo"],
        defaults: renorm_defaults,
        validate: renorm_validate,
        plan: renorm_plan,
        execute: renorm_execute,
        assess: renorm_assess,
    },
    Builtin {
        name: "mollifier-independence-gpam",
        description: "Renormalized gPAM solutions converge as eps -> 0 independently of the kernel",
        equations: &["gpam"],
        checks: &["gap-decreases", "cauchy-decreases", "gap-fails-without", "cauchy-fails-without"],
        defaults: mi_defaults,
        validate: mi_validate,
        plan: mi_plan,
        execute: mi_execute,
        assess: mi_assess,
    },
    Builtin {
        name: "phi42-cross-solver",
        description: "Da Prato-Debussche and direct renormalized Phi^4_2 solvers agree to first order in dt",
        equations: &["phi42"],
        checks: &["richardson", "cubic-decay"],
        defaults: phi4_defaults,
        validate: phi4_validate,
        plan: phi4_plan,
        execute: phi4_execute,
        assess: phi4_assess,
    },
    Builtin {
        name: "smooth-equivalence",
        description: "Paracontrolled solvers reproduce the classical solution for smooth noise",
        equations: &SMOOTH_EQUATIONS,
        checks: &["classical-equivalence"],
        defaults: smooth_defaults,
        validate: no_validation,
        plan: smooth_plan,
        execute: smooth_execute,
        assess: smooth_assess,
    },
    Builtin {
        name: "kpz-burgers",
        description: "The slope of the mollified renormalized KPZ solution solves Burgers",
        equations: &["csbe"],
        checks: &["slope-is-burgers"],
        defaults: kpz_defaults,
        validate: no_validation,
        plan: dt_plan,
        execute: kpz_execute,
        assess: kpz_assess,
    },
    Builtin {
        name: "translation-duality",
        description: "gPAM with a translated enhancement equals the modified PDE",
        equations: &["gpam"],
        checks: &["translation"],
        defaults: td_defaults,
        validate: no_validation,
        plan: td_plan,
        execute: td_execute,
        assess: td_assess,
    },
    Builtin {
        name: "anderson-spectrum",
        description: "Symmetry, dense-oracle agreement and zero-noise spectrum of the Anderson Hamiltonian",
        equations: &[],
        checks: &["symmetry", "dense-oracle", "zero-noise"],
        defaults: and_defaults,
        validate: no_validation,
        plan: and_plan,
        execute: and_execute,
        assess: and_assess,
    },
    Builtin {
        name: "lambda1-tail",
        description: "Log-linear upper tail of the top Anderson eigenvalue",
        equations: &[],
        checks: &["log-linear", "decaying"],
        defaults: tail_defaults,
        validate: tail_validate,
        plan: tail_plan,
        execute: tail_execute,
        assess: tail_assess,
    },
    Builtin {
        name: "weak-universality",
        description: "Rescaled mesoscopic model with quadratic P reproduces the Burgers solve",
        equations: &["mesoscopic"],
        checks: &["rescaled-is-burgers"],
        defaults: wu_defaults,
        validate: no_validation,
        plan: dt_plan,
        execute: wu_execute,
        assess: wu_assess,
    },
    Builtin {
        name: "determinism",
        description: "Serial and parallel runs and replays give byte-identical reports",
        equations: &[],
        checks: &["serial-parallel", "replay", "edited-seed"],
        defaults: det_defaults,
        validate: no_validation,
        plan: det_plan,
        execute: det_execute,
        assess: det_assess,
    },
    Builtin {
        name: "pam-ho-regularity",
        description: "The two-level PAM remainder gains twice the noise regularity",
        equations: &["pam-ho"],
        checks: &["remainder-gain"],
        defaults: pamho_defaults,
        validate: no_validation,
        plan: pamho_plan,
        execute: pamho_execute,
        assess: pamho_assess,
    },
    Builtin {
        name: "universality-moment",
        description: "Mean of chi_eps = P''(eps^(1/2) X) for quartic P against its exact value",
        equations: &["mesoscopic"],
        checks: &["moment"],
        defaults: um_defaults,
        validate: no_validation,
        plan: um_plan,
        execute: um_execute,
        assess: um_assess,
    },
    Builtin {
        name: "resolvent-identity",
        description: "Paracontrolled Picard solve of the 1D singular resolvent against dense LU",
        equations: &[],
        checks: &["dense-oracle", "residual"],
        defaults: res_defaults,
        validate: no_validation,
        plan: res_plan,
        execute: res_execute,
        assess: res_assess,
    },
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::resolve;

    #[test]
    fn names_are_unique_and_checks_nonempty() {
        let mut names: Vec<&str> = CATALOG.iter().map(|b| b.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), CATALOG.len());
        assert!(CATALOG.iter().all(|b| !b.checks.is_empty()));
    }

    #[test]
    fn defaults_resolve_and_plan() {
        for b in &CATALOG {
            let (_, p) = resolve(&ExperimentSpec::named(b.name)).unwrap();
            assert!(!(b.plan)(&p).unwrap().is_empty(), "{}", b.name);
        }
    }

    #[test]
    fn decreasing_helper() {
        assert!(strictly_decreasing(&[3.0, 2.0, 1.0]));
        assert!(!strictly_decreasing(&[3.0, 3.0]));
        assert!(!strictly_decreasing(&[1.0]));
    }
}
