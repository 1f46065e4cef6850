use std::f64::consts::TAU;

use mpemba_core::channels::{build_heat_exchange, max_delay_ms, verify_davies_blocks, verify_gad_equivalence, ThermalEnvironment};
use mpemba_core::config_io::ExperimentConfig;
use mpemba_core::liouville::{decompose, extract_generator, SpectralDecomposition};
use mpemba_core::mpemba::{build_theta_family, mpemba_unitary, x_basis_state};
use mpemba_core::numerics::{eigh, linspace};
use mpemba_core::otto::{default_tau2_grid, distance_curves, heat_extracted, power_ratio_from_curves, qme_window, run_cycle};
use mpemba_core::thermo::{f_neq, kl_divergence};
use mpemba_core::Cx;

type Check = Result<(bool, String), String>;
type CheckFn = fn(&ExperimentConfig) -> Check;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn env(cfg: &ExperimentConfig) -> Result<ThermalEnvironment<f64>, String> {
    ThermalEnvironment::new(cfg.t_hot_khz, cfg.nu1_khz).map_err(err)
}

fn generator(cfg: &ExperimentConfig) -> Result<SpectralDecomposition<f64>, String> {
    let e = env(cfg)?;
    let tau = 0.5 * max_delay_ms(cfg.j_hz);
    let ch = build_heat_exchange(&e, cfg.j_hz, tau).map_err(err)?;
    decompose(&extract_generator(&ch, tau).map_err(err)?).map_err(err)
}

fn config(cfg: &ExperimentConfig) -> Check {
    cfg.validate().map_err(err)?;
    Ok((true, "all values within range".into()))
}

fn cptp(cfg: &ExperimentConfig) -> Check {
    let e = env(cfg)?;
    let (mut complete, mut choi) = (0.0f64, f64::INFINITY);
    for t in linspace(0.0, max_delay_ms(cfg.j_hz), 50) {
        let ch = build_heat_exchange(&e, cfg.j_hz, t).map_err(err)?;
        complete = complete.max(ch.completeness_error().map_err(err)?);
        choi = choi.min(ch.choi_min_eigenvalue().map_err(err)?);
    }
    Ok((
        complete <= 1e-12 && choi >= -1e-12,
        format!("completeness error {complete:.2e}, min Choi eigenvalue {choi:.2e}"),
    ))
}

fn gad(cfg: &ExperimentConfig) -> Check {
    let e = env(cfg)?;
    let ch = build_heat_exchange(&e, cfg.j_hz, 0.5 * max_delay_ms(cfg.j_hz)).map_err(err)?;
    let r = verify_gad_equivalence(&ch).map_err(err)?;
    Ok((r.pass, format!("eta = {:.6}, p = {:.6}, deviation {:.2e}", r.eta, r.p, r.max_deviation)))
}

fn biorthonormality(cfg: &ExperimentConfig) -> Check {
    let dec = generator(cfg)?;
    let mut worst = 0.0f64;
    for (j, l) in dec.left_modes.iter().enumerate() {
        for (k, r) in dec.right_modes.iter().enumerate() {
            let dot = l.iter().zip(r).fold(Cx::new(0.0, 0.0), |a, (x, y)| a + x * y);
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).norm());
        }
    }
    Ok((worst <= 1e-10, format!("max |<xi_j|zeta_k> - delta_jk| = {worst:.2e}")))
}

fn davies(cfg: &ExperimentConfig) -> Check {
    let e = env(cfg)?;
    let tau = 0.5 * max_delay_ms(cfg.j_hz);
    let gen = extract_generator(&build_heat_exchange(&e, cfg.j_hz, tau).map_err(err)?, tau).map_err(err)?;
    let basis = eigh(&e.hamiltonian()).map_err(err)?.vectors;
    let r = verify_davies_blocks(&gen, &basis);
    Ok((r.pass, format!("max population-coherence coupling {:.2e}", r.max_coupling)))
}

fn free_energy_identity(cfg: &ExperimentConfig) -> Check {
    let e = env(cfg)?;
    let h = e.hamiltonian();
    let gibbs = e.gibbs_state();
    let feq = f_neq(&gibbs, &h, e.temperature);
    let base = x_basis_state(cfg.populations.0, cfg.populations.1).map_err(err)?;
    let fam = build_theta_family(&base, &linspace(0.0, TAU, cfg.theta_steps.max(2))).map_err(err)?;
    let mut worst = 0.0f64;
    for s in &fam.rotated_states {
        let lhs = f_neq(s, &h, e.temperature) - feq;
        let rhs = e.temperature * kl_divergence(s, &gibbs).map_err(err)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok((worst <= 1e-10, format!("max |dF_neq - T S_KL| = {worst:.2e}")))
}

fn mpemba(cfg: &ExperimentConfig) -> Check {
    let e = env(cfg)?;
    let dec = generator(cfg)?;
    let base = x_basis_state(cfg.populations.0, cfg.populations.1).map_err(err)?;
    let t = mpemba_unitary(&base, &e.hamiltonian(), e.temperature, &dec).map_err(err)?;
    let unit = t.unitarity_error();
    let after = t.slow_overlaps_after.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok((
        unit <= 1e-12 && after <= 1e-10 && t.f_neq_gain > 0.0,
        format!(
            "unitarity error {unit:.2e}, slow overlap after {after:.2e}, free-energy gain {:.6} kHz",
            t.f_neq_gain
        ),
    ))
}

fn cycle_closure(cfg: &ExperimentConfig) -> Check {
    let base = cfg.cycle_config();
    let (mut state, mut energy) = (0.0f64, 0.0f64);
    for mb in [false, true] {
        let c = mpemba_core::otto::CycleConfig { use_mpemba: mb, ..base };
        let rho0 = c.cold_gibbs().map_err(err)?;
        for tau2 in linspace(0.0, c.max_tau2(), 9) {
            let rec = run_cycle(&c, tau2).map_err(err)?;
            let last = &rec.last().expect("cycle has strokes").state_after;
            state = state.max(last.matrix().max_abs_diff(rho0.matrix()));
            energy = energy.max(heat_extracted(&rec, &c).map_err(err)?.net().abs());
        }
    }
    Ok((
        state <= 1e-10 && energy <= 1e-8,
        format!("recurrence error {state:.2e}, net energy {energy:.2e} kHz"),
    ))
}

fn power_ratio(cfg: &ExperimentConfig) -> Check {
    let c = cfg.cycle_config();
    let curves = distance_curves(&c, &default_tau2_grid(&c, 513)).map_err(err)?;
    let Some(top) = qme_window(&curves).map_err(err)? else {
        return Ok((true, "no crossing, empty window".into()));
    };
    let deltas = linspace(top / 40.0, top, 40);
    let min = power_ratio_from_curves(&c, &curves, &deltas)
        .map_err(err)?
        .iter()
        .map(|r| r.ratio)
        .fold(f64::INFINITY, f64::min);
    Ok((min >= 1.0 - 1e-12, format!("min R = {min:.12} over 40 thresholds")))
}

/// Runs every check, printing one line each; true iff all pass.
pub fn run(cfg: &ExperimentConfig) -> bool {
    let checks: [(&str, CheckFn); 9] = [
        ("config", config),
        ("cptp", cptp),
        ("gad-equivalence", gad),
        ("biorthonormality", biorthonormality),
        ("davies-blocks", davies),
        ("free-energy-identity", free_energy_identity),
        ("mpemba-transform", mpemba),
        ("cycle-closure", cycle_closure),
        ("power-ratio", power_ratio),
    ];
    let mut passed = 0;
    for (name, check) in checks.iter() {
        let (ok, detail) = match check(cfg) {
            Ok(r) => r,
            Err(e) => (false, e),
        };
        if ok {
            passed += 1;
        }
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
    println!("verify: {passed}/{} checks passed", checks.len());
    passed == checks.len()
}
