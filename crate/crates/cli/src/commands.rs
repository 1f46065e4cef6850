use std::f64::consts::TAU;

use mpemba_core::channels::{build_heat_exchange, max_delay_ms, ThermalEnvironment};
use mpemba_core::config_io::Cell;
use mpemba_core::liouville::{decompose, extract_generator};
use mpemba_core::mpemba::{build_theta_family, cooling_curves, free_energy_surface, x_basis_state};
use mpemba_core::numerics::linspace;
use mpemba_core::otto::{default_tau2_grid, distance_curves, power_ratio_from_curves, qme_window, POWER_GRID_POINTS};
use mpemba_core::thermo::{detect_crossing, equilibrium_free_energy, kl_divergence, Observable};

use crate::{CliError, Run};

fn hot_env(run: &Run) -> Result<ThermalEnvironment<f64>, CliError> {
    Ok(ThermalEnvironment::new(run.cfg.t_hot_khz, run.cfg.nu1_khz)?)
}

pub fn spectrum(run: &Run, tau: f64, write_file: bool) -> Result<(), CliError> {
    let cfg = &run.cfg;
    let env = hot_env(run)?;
    let ch = build_heat_exchange(&env, cfg.j_hz, tau)?;
    let dec = decompose(&extract_generator(&ch, tau)?)?;
    let mut rows = Vec::with_capacity(dec.len());
    println!("k\tre_per_ms\tim_per_ms\tkind");
    for k in 1..=dec.len() {
        let lam = dec.eigenvalue(k)?;
        let kind = dec.classify(k)?.as_str();
        println!("{k}\t{}\t{}\t{kind}", run.num(lam.re), run.num(lam.im));
        rows.push(vec![Cell::from(k), Cell::from(lam.re), Cell::from(lam.im), Cell::from(kind)]);
    }
    let p = dec.fixed_point.populations();
    println!(
        "fixed point populations: {}",
        p.iter().map(|&x| run.num(x)).collect::<Vec<_>>().join(", ")
    );
    if write_file {
        run.write(&rows, &["k", "re_per_ms", "im_per_ms", "kind"])?;
    }
    Ok(())
}

pub fn surface(run: &Run) -> Result<(), CliError> {
    let cfg = &run.cfg;
    let env = hot_env(run)?;
    let h = env.hamiltonian();
    let base = x_basis_state(cfg.populations.0, cfg.populations.1)?;
    let thetas = linspace(0.0, TAU, cfg.theta_steps);
    let taus = linspace(0.0, max_delay_ms(cfg.j_hz), cfg.tau_steps);
    let family = build_theta_family(&base, &thetas)?;
    let points = free_energy_surface(&family, |t| build_heat_exchange(&env, cfg.j_hz, t), &taus, &h, env.temperature)?;
    let feq = equilibrium_free_energy(&h, env.temperature)?;
    let rows: Vec<Vec<Cell>> = points
        .iter()
        .map(|p| vec![Cell::from(p.theta), Cell::from(p.tau), Cell::from(p.f_neq - feq)])
        .collect();
    run.write(&rows, &["theta_rad", "tau_ms", "delta_f_neq_khz"])?;

    let initial = points.iter().step_by(taus.len());
    let lowest = initial.clone().min_by(|a, b| a.f_neq.total_cmp(&b.f_neq)).expect("nonempty grid");
    let highest = initial.max_by(|a, b| a.f_neq.total_cmp(&b.f_neq)).expect("nonempty grid");
    // first tau at which each row is within epsilon of equilibrium
    let reach = |theta: f64| {
        points
            .iter()
            .filter(|p| p.theta == theta)
            .find(|p| p.f_neq - feq <= cfg.epsilon_equilibrium_khz)
            .map(|p| p.tau)
    };
    let show = |t: Option<f64>| t.map_or("never".to_string(), |t| format!("{} ms", run.num(t)));
    println!(
        "surface: {} x {} rows; lowest initial dF_neq at theta = {} rad, highest at theta = {} rad; epsilon-equilibrium reached at {} (theta = 0) and {} (highest)",
        thetas.len(),
        taus.len(),
        run.num(lowest.theta),
        run.num(highest.theta),
        show(reach(thetas[0])),
        show(reach(highest.theta)),
    );
    Ok(())
}

pub fn cooling(run: &Run) -> Result<(), CliError> {
    let cfg = &run.cfg;
    let env = hot_env(run)?;
    let gibbs = env.gibbs_state();
    let rho0 = x_basis_state(cfg.populations.0, cfg.populations.1)?;
    let taus = linspace(0.0, max_delay_ms(cfg.j_hz), cfg.tau_steps);
    let plain = cooling_curves(&rho0, &env, cfg.j_hz, &taus, false)?;
    let kl = |states: &[mpemba_core::DensityMatrix64]| -> Result<Vec<f64>, CliError> {
        Ok(states
            .iter()
            .map(|s| kl_divergence(s, &gibbs))
            .collect::<Result<Vec<_>, _>>()?)
    };
    let kl_plain = kl(&plain.states)?;
    let df_plain = plain.delta_f();

    if !cfg.use_mpemba {
        let rows: Vec<Vec<Cell>> = (0..taus.len())
            .map(|i| {
                vec![
                    Cell::from(taus[i]),
                    Cell::from(df_plain[i]),
                    Cell::from(kl_plain[i]),
                    Cell::from(plain.trace_dist[i]),
                ]
            })
            .collect();
        run.write(&rows, &["tau_ms", "delta_f_rho0_khz", "kl_rho0", "trace_dist_rho0"])?;
        println!("cooling: Mpemba step disabled, no comparison");
        return Ok(());
    }

    let mb = cooling_curves(&rho0, &env, cfg.j_hz, &taus, true)?;
    let kl_mb = kl(&mb.states)?;
    let df_mb = mb.delta_f();
    let rows: Vec<Vec<Cell>> = (0..taus.len())
        .map(|i| {
            vec![
                Cell::from(taus[i]),
                Cell::from(df_plain[i]),
                Cell::from(df_mb[i]),
                Cell::from(kl_plain[i]),
                Cell::from(kl_mb[i]),
                Cell::from(plain.trace_dist[i]),
                Cell::from(mb.trace_dist[i]),
            ]
        })
        .collect();
    run.write(
        &rows,
        &[
            "tau_ms",
            "delta_f_rho0_khz",
            "delta_f_mb_khz",
            "kl_rho0",
            "kl_mb",
            "trace_dist_rho0",
            "trace_dist_mb",
        ],
    )?;
    let cross = detect_crossing(&mb, &plain, Observable::FNeq)?;
    match cross.t_cross {
        Some(t) => println!(
            "cooling: crossing detected, {} at t = {} ms (initial dF_neq: mb {} kHz, rho0 {} kHz)",
            if cross.persistent { "persistent" } else { "not persistent" },
            run.num(t),
            run.num(df_mb[0]),
            run.num(df_plain[0]),
        ),
        None => println!("cooling: no crossing detected"),
    }
    Ok(())
}

pub fn otto_distance(run: &Run) -> Result<(), CliError> {
    let cycle = run.cfg.cycle_config();
    let grid = default_tau2_grid(&cycle, run.cfg.tau_steps);
    let (plain, mb) = distance_curves(&cycle, &grid)?;
    let rows: Vec<Vec<Cell>> = (0..grid.len())
        .map(|i| vec![Cell::from(grid[i]), Cell::from(plain.trace_dist[i]), Cell::from(mb.trace_dist[i])])
        .collect();
    run.write(&rows, &["tau2_ms", "trace_dist_plain", "trace_dist_mb"])?;
    let cross = detect_crossing(&mb, &plain, Observable::TraceDist)?;
    let sep = (0..grid.len())
        .max_by(|&a, &b| {
            (plain.trace_dist[a] - mb.trace_dist[a]).total_cmp(&(plain.trace_dist[b] - mb.trace_dist[b]))
        })
        .map(|i| grid[i])
        .unwrap_or(f64::NAN);
    match cross.t_cross {
        Some(t) => println!(
            "otto-distance: crossing at tau2 = {} ms; maximum separation at tau2 = {} ms",
            run.num(t),
            run.num(sep)
        ),
        None => println!("otto-distance: no crossing; maximum separation at tau2 = {} ms", run.num(sep)),
    }
    Ok(())
}

pub fn otto_ratio(run: &Run) -> Result<(), CliError> {
    let cycle = run.cfg.cycle_config();
    let curves = distance_curves(&cycle, &default_tau2_grid(&cycle, POWER_GRID_POINTS))?;
    let Some(top) = qme_window(&curves)? else {
        run.write(&[], &["delta", "tau2_plain_ms", "tau2_mb_ms", "ratio"])?;
        println!("otto-ratio: distance curves do not cross, no advantage window");
        return Ok(());
    };
    let deltas = linspace(0.0, top, run.cfg.tau_steps);
    let reports = power_ratio_from_curves(&cycle, &curves, &deltas)?;
    let rows: Vec<Vec<Cell>> = reports
        .iter()
        .map(|r| vec![Cell::from(r.delta), Cell::from(r.tau2_plain), Cell::from(r.tau2_mb), Cell::from(r.ratio)])
        .collect();
    run.write(&rows, &["delta", "tau2_plain_ms", "tau2_mb_ms", "ratio"])?;
    let peak = reports
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .expect("nonempty delta grid");
    println!(
        "otto-ratio: peak R = {} at delta = {} (tau2_plain = {} ms, tau2_mb = {} ms)",
        run.num(peak.ratio),
        run.num(peak.delta),
        run.num(peak.tau2_plain),
        run.num(peak.tau2_mb)
    );
    Ok(())
}
