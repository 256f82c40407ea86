use paracalc::solvers::{
    cubic_decay, solve, solve_gpam_pc, solve_phi42_dd, solve_phi42_direct, Equation, Method, RunConfig, ScalarFn,
    SolverConfig, UniversalityConfig,
};
use paracalc::stochastic::{enhance_gpam, Mollifier, Phi42Noise, WickData};
use paracalc::{Field, TorusGrid};

fn gap(a: &Field, b: &Field) -> f64 {
    a.try_sub(b).unwrap().sup_norm() / b.sup_norm().max(1e-300)
}

#[test]
fn both_methods_agree_on_every_equation_with_mollified_noise() {
    for eq in [Equation::Gpam, Equation::Gsbe, Equation::Csbe, Equation::PamHo] {
        let mut rc = RunConfig::new(SolverConfig::new(0.01, 1e-3, 32));
        rc.eps = 0.25;
        rc.seed = 4;
        rc.g = ScalarFn::affine(1.0, 0.5);
        let a = solve(eq, &rc).unwrap();
        rc.method = Method::Classical;
        let b = solve(eq, &rc).unwrap();
        assert!(gap(a.final_state(), b.final_state()) < 1e-10, "{eq}");
    }
}

#[test]
fn zero_noise_phi42_follows_the_cubic_ode() {
    let grid = TorusGrid::new(2, 32).unwrap();
    let (dt, t) = (1e-3, 0.25);
    let steps = (t / dt) as usize;
    let noise = Phi42Noise::silent(grid, dt, steps);
    let cfg = SolverConfig::new(t, dt, 32).with_initial_condition(Field::constant(grid, 1.0));
    let u = solve_phi42_direct(&noise, 0.0, &cfg).unwrap();
    // Explicit Euler against the exact solution of u' = -u - u^3 is first order in dt.
    let exact = cubic_decay(1.0, t);
    assert!((u.final_state().mean() - exact).abs() < 5e-3);
    let v = solve_phi42_dd(&WickData::zero(grid, dt, steps), &cfg).unwrap();
    assert!(gap(u.final_state(), v.final_state()) < 1e-3);
}

#[test]
fn constant_nonlinearity_gives_linear_response() {
    // With G = 1 the gPAM solution is u0 + J(xi) at the discrete level, independent of the counterterm.
    let grid = TorusGrid::new(2, 32).unwrap();
    let e = enhance_gpam(grid, 0.25, Mollifier::Fejer, 2).unwrap();
    let cfg = SolverConfig::new(0.02, 1e-3, 32);
    let a = solve_gpam_pc(&e, &ScalarFn::constant(1.0), &cfg).unwrap();
    let b = solve_gpam_pc(&e.translate(3.0), &ScalarFn::constant(1.0), &cfg).unwrap();
    assert!(gap(a.final_state(), b.final_state()) < 1e-12);
}

#[test]
fn quadratic_mesoscopic_model_matches_burgers() {
    let mut rc = RunConfig::new(SolverConfig::new(0.01, 1e-3, 32));
    rc.universality = Some(UniversalityConfig::new(ScalarFn::polynomial(&[0.0, 0.0, 1.0]), 0.25, 8));
    let m = solve(Equation::Mesoscopic, &rc).unwrap();
    let chi = m.component("chi").unwrap();
    assert!(chi.frames.iter().all(|f| f.data().iter().all(|&c| c == 2.0)));
}

#[test]
fn bundles_round_trip_through_disk() {
    let mut rc = RunConfig::new(SolverConfig::new(0.01, 1e-3, 32));
    rc.eps = 0.25;
    let b = solve(Equation::Kpz, &rc).unwrap();
    let dir = std::env::temp_dir().join(format!("paracalc-bundle-{}", std::process::id()));
    b.write(&dir).unwrap();
    let back = paracalc::io::read_time_field(&dir.join("solution.pfld")).unwrap();
    assert_eq!(back.frames, b.solution.frames);
}
