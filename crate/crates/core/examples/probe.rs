//! Dev probe used while tuning: prints fidelities and timings for the
//! reference system at several step sizes.

use cphase_core::experiments::{run_single, validate_effective, RunConfig};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("coarse");

    match mode {
        "coarse" => {
            for dt_ps in [10.0, 5.0, 2.0] {
                let cfg = RunConfig::reference().with_dt_ps(dt_ps).unwrap();
                let t0 = Instant::now();
                let rec = run_single(&cfg).unwrap();
                println!(
                    "dt = {dt_ps} ps: F = {:.6}, leakage = {:.4e}, trace_err = {:.2e}, wall = {:.1} s",
                    rec.fidelity,
                    rec.leakage,
                    rec.trace_error,
                    t0.elapsed().as_secs_f64()
                );
            }
        }
        "flagship" => {
            let cfg = RunConfig::reference();
            let t0 = Instant::now();
            let rec = run_single(&cfg).unwrap();
            println!(
                "dt = 0.5 ps: F = {:.8}, leakage = {:.6e}, trace_err = {:.2e}, wall = {:.1} s",
                rec.fidelity,
                rec.leakage,
                rec.trace_error,
                t0.elapsed().as_secs_f64()
            );
        }
        "validate" => {
            let cfg = RunConfig::reference();
            let t0 = Instant::now();
            let rep = validate_effective(&cfg).unwrap();
            println!(
                "full-vs-effective: F = {:.8}, ground-sector leakage = {:.4e}, t_gate = {:.4e}, wall = {:.1} s",
                rep.fidelity,
                rep.ground_sector_leakage,
                rep.t_gate,
                t0.elapsed().as_secs_f64()
            );
        }
        "edges" => {
            use std::f64::consts::TAU;
            for ddelta_mhz in [-75.0, 75.0] {
                let mut cfg = RunConfig::reference().with_dt_ps(2.0).unwrap();
                for w in &mut cfg.params.omega_c {
                    *w -= TAU * ddelta_mhz * 1e6;
                }
                cfg.params.validate().unwrap();
                let t0 = Instant::now();
                let rec = run_single(&cfg).unwrap();
                println!(
                    "ddelta = {ddelta_mhz} MHz (dt 2 ps): F = {:.6}, wall = {:.1} s",
                    rec.fidelity,
                    t0.elapsed().as_secs_f64()
                );
            }
        }
        "gtilde" => {
            // unwanted couplings at full strength, closed system, coarse dt
            let mut cfg = RunConfig::reference().with_dt_ps(2.0).unwrap();
            cfg.params.g_tilde = cfg.params.g.clone();
            cfg.dec = cphase_core::lindblad::DecoherenceParams::zero(3);
            let t0 = Instant::now();
            let rec = run_single(&cfg).unwrap();
            println!(
                "g_tilde = g, closed (dt 2 ps): F = {:.6}, wall = {:.1} s",
                rec.fidelity,
                t0.elapsed().as_secs_f64()
            );
        }
        "resonance" => {
            // follow the population transfer |g;1,0,0> -> |e;0,1,0> under the
            // wanted couplings alone
            use cphase_core::hamiltonian::build_ideal;
            use cphase_core::hilbert::{basis_state, BasisLabel, QutritLevel};
            use cphase_core::lindblad::schrodinger_evolve;
            let cfg = RunConfig::reference();
            let h = build_ideal(&cfg.params, &cfg.space).unwrap();
            let start = basis_state(
                &cfg.space,
                &BasisLabel::new(QutritLevel::G, vec![1, 0, 0]),
            )
            .unwrap();
            let probe_idx = cfg
                .space
                .flat_index(&BasisLabel::new(QutritLevel::E, vec![0, 1, 0]))
                .unwrap();
            for t_ns in [7.0, 14.0, 21.0, 28.9, 43.0, 57.7, 66.7] {
                let psi = schrodinger_evolve(&start, t_ns * 1e-9, &h, 1e-12).unwrap();
                let p = psi.amplitudes()[probe_idx].norm_sqr();
                println!("t = {t_ns:5.1} ns: P(e;0,1,0) = {p:.4}");
            }
        }
        "effective-lossy" => {
            // the diagonal effective model plus the full dissipator set
            use cphase_core::gate;
            use cphase_core::hamiltonian::{build_effective, RotatingTermHamiltonian};
            use cphase_core::lindblad::{build_dissipators, evolve, DensityMatrix};
            for t_scale in [1.0, 5.0, 10.0] {
                let mut cfg = RunConfig::reference().with_dt_ps(5.0).unwrap();
                cfg.dec = cphase_core::lindblad::DecoherenceParams::from_t_scale(
                    t_scale, 10.0, 3,
                )
                .unwrap();
                let eff = build_effective(&cfg.params, &cfg.space).unwrap();
                let h = RotatingTermHamiltonian::new(eff.operator.clone(), vec![]).unwrap();
                let t_gate = std::f64::consts::PI / eff.strengths.chi;
                let diss = build_dissipators(&cfg.dec, &cfg.space).unwrap();
                let rho0 = DensityMatrix::from_pure(&gate::initial_state(&cfg.space));
                let out = evolve(&rho0, t_gate, &h, &diss, &cfg.solver, &cfg.space).unwrap();
                let f = gate::fidelity(&out.state, &gate::ideal_output_state(&cfg.space)).unwrap();
                println!("effective + lossy, T = {t_scale} us, kappa_inv = 10 us: F = {f:.6}");
            }
        }
        "crosstalk" => {
            for fraction in [0.01, 0.05] {
                let mut cfg = RunConfig::reference().with_dt_ps(2.0).unwrap();
                let g_max = cfg.params.g.iter().cloned().fold(0.0, f64::max);
                for k in 0..3 {
                    for l in 0..3 {
                        if k != l {
                            cfg.params.g_cross[(k, l)] = fraction * g_max;
                        }
                    }
                }
                let rec = run_single(&cfg).unwrap();
                println!("crosstalk {fraction}: F = {:.6}", rec.fidelity);
            }
        }
        "monotone-t" => {
            for t_scale in [1.0, 3.25, 5.5, 7.75, 10.0] {
                let mut cfg = RunConfig::reference().with_dt_ps(5.0).unwrap();
                cfg.dec = cphase_core::lindblad::DecoherenceParams::from_t_scale(
                    t_scale, 10.0, 3,
                )
                .unwrap();
                let rec = run_single(&cfg).unwrap();
                println!("T = {t_scale} us: F = {:.6}", rec.fidelity);
            }
        }
        "trunc" => {
            for n_photon in [3usize, 4] {
                let cfg = RunConfig::reference()
                    .with_dt_ps(2.0)
                    .unwrap()
                    .with_uniform_truncation(n_photon)
                    .unwrap();
                let t0 = Instant::now();
                let rec = run_single(&cfg).unwrap();
                println!(
                    "N = {n_photon} (dt 2 ps): F = {:.8}, wall = {:.1} s",
                    rec.fidelity,
                    t0.elapsed().as_secs_f64()
                );
            }
        }
        other => eprintln!("unknown mode {other}"),
    }
}
