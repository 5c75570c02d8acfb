//! Configuration file schema and resolution into solver-ready types.
//!
//! Configs are TOML with sections `system`, `decoherence`, `solver`,
//! `truncation`, `sweep`, `output`. Field names carry their unit as a
//! suffix (`_ghz`, `_mhz`, `_us`, `_ps`); values are linear frequencies and
//! are converted to angular frequencies (rad/s) exactly once, here. Unknown
//! keys are rejected.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::Deserialize;

use crate::design;
use crate::error::{Error, Result};
use crate::hamiltonian::SystemParams;
use crate::hilbert::SpaceDescriptor;
use crate::lindblad::{DecoherenceParams, SolverMethod, SolverOptions};

/// The worked reference configuration: three cavities, qutrit transitions at
/// 5.0 / 7.5 GHz, detunings 1.5 / 1.51 / 1.53 GHz, control coupling 150 MHz,
/// solved target couplings, crosstalk at 1% of the largest coupling,
/// decoherence time scale 5 us and cavity lifetime 10 us.
pub const REFERENCE_CONFIG: &str = r#"
[system]
n = 3
omega_eg_ghz = 5.0
omega_fe_ghz = 7.5
delta1_ghz = 1.5
delta_targets_ghz = [1.51, 1.53]
g1_mhz = 150.0
m = 2
crosstalk_fraction = 0.01

[decoherence]
t_scale_us = 5.0
kappa_inv_us = 10.0

[solver]
method = "fixed_rk4"
dt_ps = 0.5

[truncation]
n_photon = 3

[sweep]
t_scale_us = { min = 1.0, max = 10.0, steps = 5 }
kappa_inv_us = { min = 5.0, max = 20.0, steps = 5 }
detuning_error_mhz = { min = -75.0, max = 75.0, steps = 11 }
"#;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    system: RawSystem,
    decoherence: Option<RawDecoherence>,
    solver: Option<RawSolver>,
    truncation: Option<RawTruncation>,
    sweep: Option<RawSweep>,
    output: Option<RawOutput>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    n: usize,
    omega_eg_ghz: f64,
    omega_fe_ghz: f64,
    omega_fg_ghz: Option<f64>,
    delta1_ghz: f64,
    delta_targets_ghz: Vec<f64>,
    g1_mhz: f64,
    m: Option<u32>,
    /// Target couplings; solved from the design constraints when omitted.
    g_targets_mhz: Option<Vec<f64>>,
    /// Unwanted-coupling strengths per cavity; zero when omitted, i.e. the
    /// static dispersive pulls of the off-transitions are taken as
    /// calibrated out.
    g_tilde_mhz: Option<Vec<f64>>,
    /// Inter-cavity crosstalk as a fraction of the largest coupling.
    crosstalk_fraction: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecoherence {
    t_scale_us: Option<f64>,
    kappa_inv_us: Option<f64>,
    gamma_eg_inv_us: Option<f64>,
    gamma_fe_inv_us: Option<f64>,
    gamma_fg_inv_us: Option<f64>,
    gamma_phi_e_inv_us: Option<f64>,
    gamma_phi_f_inv_us: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    method: Option<RawMethod>,
    dt_ps: Option<f64>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
    max_step_ps: Option<f64>,
    samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawMethod {
    FixedRk4,
    AdaptiveRk,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTruncation {
    n_photon: Option<usize>,
    per_cavity: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    t_scale_us: Option<GridSpec>,
    kappa_inv_us: Option<GridSpec>,
    detuning_error_mhz: Option<GridSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    csv: Option<PathBuf>,
}

/// A one-dimensional grid: `steps` evenly spaced values over `[min, max]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        Self { min, max, steps }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config(format!("sweep grid '{name}' has zero steps")));
        }
        if !(self.min <= self.max) {
            return Err(Error::Config(format!(
                "sweep grid '{name}' has min {} > max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + i as f64 * step).collect()
    }
}

/// Grids used by the two sweep commands.
#[derive(Debug, Clone)]
pub struct SweepGrids {
    pub t_scale_us: GridSpec,
    pub kappa_inv_us: GridSpec,
    pub detuning_error_mhz: GridSpec,
}

impl Default for SweepGrids {
    fn default() -> Self {
        Self {
            t_scale_us: GridSpec::new(1.0, 10.0, 5),
            kappa_inv_us: GridSpec::new(5.0, 20.0, 5),
            detuning_error_mhz: GridSpec::new(-75.0, 75.0, 11),
        }
    }
}

/// The raw design inputs, kept for the `design` command and for reports.
#[derive(Debug, Clone)]
pub struct DesignInputs {
    pub g1: f64,
    pub delta1: f64,
    pub exchange_gaps: Vec<f64>,
    pub m: u32,
    pub kappa_inv_us: Option<f64>,
}

/// Fully resolved run configuration in internal units.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SystemParams,
    pub space: SpaceDescriptor,
    pub dec: DecoherenceParams,
    pub solver: SolverOptions,
    pub sweep: SweepGrids,
    pub csv_path: Option<PathBuf>,
    pub design_inputs: DesignInputs,
}

fn ghz(v: f64) -> f64 {
    TAU * v * 1e9
}

fn mhz(v: f64) -> f64 {
    TAU * v * 1e6
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        Self::resolve(raw)
    }

    /// The documented reference configuration.
    pub fn reference() -> Self {
        Self::from_toml_str(REFERENCE_CONFIG).expect("reference config is valid")
    }

    fn resolve(raw: RawConfig) -> Result<Self> {
        let sys = &raw.system;
        let n = sys.n;
        if n < 2 {
            return Err(Error::Config(format!(
                "system.n must be at least 2, got {n}"
            )));
        }
        if sys.delta_targets_ghz.len() != n - 1 {
            return Err(Error::Config(format!(
                "system.delta_targets_ghz needs {} entries for n = {n}, got {}",
                n - 1,
                sys.delta_targets_ghz.len()
            )));
        }
        let omega_eg = ghz(sys.omega_eg_ghz);
        let omega_fe = ghz(sys.omega_fe_ghz);
        let omega_fg = sys
            .omega_fg_ghz
            .map(ghz)
            .unwrap_or(omega_eg + omega_fe);
        let delta1 = ghz(sys.delta1_ghz);
        let g1 = mhz(sys.g1_mhz);
        let mut gaps = Vec::with_capacity(n - 1);
        for (i, &dt) in sys.delta_targets_ghz.iter().enumerate() {
            // subtract in GHz before scaling: the gaps are small differences
            // of large detunings and would lose precision in rad/s
            let gap = ghz(dt - sys.delta1_ghz);
            if gap <= 0.0 {
                return Err(Error::Config(format!(
                    "system.delta_targets_ghz[{i}] = {dt} must exceed delta1 = {}",
                    sys.delta1_ghz
                )));
            }
            gaps.push(gap);
        }
        let m = sys.m.unwrap_or_else(|| design::smallest_valid_m(n));

        let g_targets: Vec<f64> = match &sys.g_targets_mhz {
            Some(list) => {
                if list.len() != n - 1 {
                    return Err(Error::Config(format!(
                        "system.g_targets_mhz needs {} entries for n = {n}, got {}",
                        n - 1,
                        list.len()
                    )));
                }
                list.iter().map(|&v| mhz(v)).collect()
            }
            None => design::solve(g1, delta1, &gaps, m)?.g_targets,
        };
        let mut g = vec![g1];
        g.extend(&g_targets);

        let g_tilde: Vec<f64> = match &sys.g_tilde_mhz {
            Some(list) => {
                if list.len() != n {
                    return Err(Error::Config(format!(
                        "system.g_tilde_mhz needs {n} entries, got {}",
                        list.len()
                    )));
                }
                list.iter().map(|&v| mhz(v)).collect()
            }
            None => vec![0.0; n],
        };

        let fraction = sys.crosstalk_fraction.unwrap_or(0.01);
        if !(0.0..1.0).contains(&fraction) {
            return Err(Error::Config(format!(
                "system.crosstalk_fraction must be in [0, 1), got {fraction}"
            )));
        }
        let g_max = g.iter().cloned().fold(0.0, f64::max);
        let mut g_cross = Array2::zeros((n, n));
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    g_cross[(k, l)] = fraction * g_max;
                }
            }
        }

        let plan = design::derive_frequencies(omega_eg, omega_fe, delta1, &gaps)?;
        let params = SystemParams {
            n,
            omega_eg,
            omega_fe,
            omega_fg,
            omega_c: plan.omega_c,
            g,
            g_tilde,
            g_cross,
            m,
        };
        params.validate().map_err(|e| Error::Config(e.to_string()))?;

        let dec = match &raw.decoherence {
            None => DecoherenceParams::zero(n),
            Some(d) => resolve_decoherence(d, n)?,
        };

        let solver = resolve_solver(raw.solver.as_ref())?;

        let space = match &raw.truncation {
            None => SpaceDescriptor::uniform(n, 3)?,
            Some(t) => match (&t.per_cavity, t.n_photon) {
                (Some(list), None) => {
                    if list.len() != n {
                        return Err(Error::Config(format!(
                            "truncation.per_cavity needs {n} entries, got {}",
                            list.len()
                        )));
                    }
                    SpaceDescriptor::new(list.clone())?
                }
                (None, Some(np)) => SpaceDescriptor::uniform(n, np)?,
                (None, None) => SpaceDescriptor::uniform(n, 3)?,
                (Some(_), Some(_)) => {
                    return Err(Error::Config(
                        "truncation: give n_photon or per_cavity, not both".into(),
                    ))
                }
            },
        };

        let defaults = SweepGrids::default();
        let sweep = match &raw.sweep {
            None => defaults,
            Some(s) => {
                let grids = SweepGrids {
                    t_scale_us: s.t_scale_us.clone().unwrap_or(defaults.t_scale_us),
                    kappa_inv_us: s.kappa_inv_us.clone().unwrap_or(defaults.kappa_inv_us),
                    detuning_error_mhz: s
                        .detuning_error_mhz
                        .clone()
                        .unwrap_or(defaults.detuning_error_mhz),
                };
                grids.t_scale_us.validate("t_scale_us")?;
                grids.kappa_inv_us.validate("kappa_inv_us")?;
                grids.detuning_error_mhz.validate("detuning_error_mhz")?;
                grids
            }
        };

        let csv_path = raw.output.and_then(|o| o.csv);
        let kappa_inv_us = raw.decoherence.as_ref().and_then(|d| d.kappa_inv_us);

        Ok(RunConfig {
            params,
            space,
            dec,
            solver,
            sweep,
            csv_path,
            design_inputs: DesignInputs {
                g1,
                delta1,
                exchange_gaps: gaps,
                m,
                kappa_inv_us,
            },
        })
    }

    /// Replace the truncation with a uniform per-cavity photon cutoff.
    pub fn with_uniform_truncation(mut self, n_photon: usize) -> Result<Self> {
        self.space = SpaceDescriptor::uniform(self.params.n, n_photon)?;
        Ok(self)
    }

    /// Replace the fixed step, picoseconds.
    pub fn with_dt_ps(mut self, dt_ps: f64) -> Result<Self> {
        if !(dt_ps > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {dt_ps} ps")));
        }
        self.solver.dt = dt_ps * 1e-12;
        Ok(self)
    }
}

fn resolve_decoherence(d: &RawDecoherence, n: usize) -> Result<DecoherenceParams> {
    let explicit = [
        d.gamma_eg_inv_us,
        d.gamma_fe_inv_us,
        d.gamma_fg_inv_us,
        d.gamma_phi_e_inv_us,
        d.gamma_phi_f_inv_us,
    ];
    let any_explicit = explicit.iter().any(Option::is_some);
    if let Some(t) = d.t_scale_us {
        if any_explicit {
            return Err(Error::Config(
                "decoherence: t_scale_us and explicit qutrit rates are mutually exclusive".into(),
            ));
        }
        let kappa_inv = d.kappa_inv_us.ok_or_else(|| {
            Error::Config("decoherence: kappa_inv_us is required with t_scale_us".into())
        })?;
        return DecoherenceParams::from_t_scale(t, kappa_inv, n)
            .map_err(|e| Error::Config(e.to_string()));
    }
    let rate = |inv_us: Option<f64>, name: &str| -> Result<f64> {
        match inv_us {
            None => Ok(0.0),
            Some(v) if v > 0.0 => Ok(1.0 / (v * 1e-6)),
            Some(v) => Err(Error::Config(format!(
                "decoherence.{name} must be positive, got {v}"
            ))),
        }
    };
    let dec = DecoherenceParams {
        kappa: vec![rate(d.kappa_inv_us, "kappa_inv_us")?; n],
        gamma_eg: rate(d.gamma_eg_inv_us, "gamma_eg_inv_us")?,
        gamma_fe: rate(d.gamma_fe_inv_us, "gamma_fe_inv_us")?,
        gamma_fg: rate(d.gamma_fg_inv_us, "gamma_fg_inv_us")?,
        gamma_phi_e: rate(d.gamma_phi_e_inv_us, "gamma_phi_e_inv_us")?,
        gamma_phi_f: rate(d.gamma_phi_f_inv_us, "gamma_phi_f_inv_us")?,
    };
    dec.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(dec)
}

fn resolve_solver(raw: Option<&RawSolver>) -> Result<SolverOptions> {
    let mut opts = SolverOptions::default();
    if let Some(s) = raw {
        if let Some(m) = s.method {
            opts.method = match m {
                RawMethod::FixedRk4 => SolverMethod::FixedRk4,
                RawMethod::AdaptiveRk => SolverMethod::AdaptiveRk,
            };
        }
        if let Some(dt) = s.dt_ps {
            opts.dt = dt * 1e-12;
        }
        if let Some(r) = s.rel_tol {
            opts.rel_tol = r;
        }
        if let Some(a) = s.abs_tol {
            opts.abs_tol = a;
        }
        if let Some(ms) = s.max_step_ps {
            opts.max_step = ms * 1e-12;
        }
        if let Some(ns) = s.samples {
            opts.n_samples = ns;
        }
    }
    opts.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_config_resolves() {
        let cfg = RunConfig::reference();
        assert_eq!(cfg.params.n, 3);
        assert_eq!(cfg.space.total_dim(), 81);
        // solved target couplings land on the documented values
        assert!((cfg.params.g[1] / TAU - 86.89e6).abs() < 0.05e6);
        assert!((cfg.params.g[2] / TAU - 151.49e6).abs() < 0.05e6);
        // crosstalk = 1% of the largest coupling
        let g_max = cfg.params.g.iter().cloned().fold(0.0, f64::max);
        assert!((cfg.params.g_cross[(0, 1)] - 0.01 * g_max).abs() < 1e-9);
        // unwanted couplings default to zero
        assert!(cfg.params.g_tilde.iter().all(|&v| v == 0.0));
        assert!((cfg.dec.gamma_fg - 2.0e5).abs() < 1e-9);
        assert_eq!(cfg.solver.dt, 0.5e-12);
        assert_eq!(cfg.sweep.detuning_error_mhz.steps, 11);
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = REFERENCE_CONFIG.replace("crosstalk_fraction", "crosstalk_fractoin");
        let err = RunConfig::from_toml_str(&bad).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("crosstalk_fractoin"));
    }

    #[test]
    fn misordered_detunings_rejected() {
        let bad = REFERENCE_CONFIG.replace("[1.51, 1.53]", "[1.49, 1.53]");
        let err = RunConfig::from_toml_str(&bad).unwrap_err();
        assert!(err.to_string().contains("must exceed"));
    }

    #[test]
    fn wrong_target_count_rejected() {
        let bad = REFERENCE_CONFIG.replace("[1.51, 1.53]", "[1.51]");
        assert!(RunConfig::from_toml_str(&bad).is_err());
    }

    #[test]
    fn explicit_couplings_override_solver() {
        let cfg_text = REFERENCE_CONFIG.replace(
            "g1_mhz = 150.0",
            "g1_mhz = 150.0\ng_targets_mhz = [80.0, 140.0]",
        );
        let cfg = RunConfig::from_toml_str(&cfg_text).unwrap();
        assert!((cfg.params.g[1] - mhz(80.0)).abs() < 1e-9);
        assert!((cfg.params.g[2] - mhz(140.0)).abs() < 1e-9);
    }

    #[test]
    fn t_scale_excludes_explicit_rates() {
        let bad = REFERENCE_CONFIG.replace(
            "t_scale_us = 5.0",
            "t_scale_us = 5.0\ngamma_eg_inv_us = 25.0",
        );
        let err = RunConfig::from_toml_str(&bad).unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"));
    }

    #[test]
    fn grid_values_are_inclusive_and_even() {
        let g = GridSpec::new(5.0, 20.0, 4);
        assert_eq!(g.values(), vec![5.0, 10.0, 15.0, 20.0]);
        let single = GridSpec::new(3.0, 9.0, 1);
        assert_eq!(single.values(), vec![3.0]);
    }

    #[test]
    fn truncation_overrides() {
        let cfg = RunConfig::reference().with_uniform_truncation(4).unwrap();
        assert_eq!(cfg.space.total_dim(), 192);
        let cfg2 = RunConfig::from_toml_str(
            &REFERENCE_CONFIG.replace("n_photon = 3", "per_cavity = [3, 4, 3]"),
        )
        .unwrap();
        assert_eq!(cfg2.space.cavity_trunc(), &[3, 4, 3]);
    }

    #[test]
    fn closed_system_when_decoherence_absent() {
        let text = REFERENCE_CONFIG
            .replace("t_scale_us = 5.0", "")
            .replace("kappa_inv_us = 10.0", "");
        let cfg = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(cfg.dec.kappa, vec![0.0; 3]);
        assert_eq!(cfg.dec.gamma_fg, 0.0);
    }
}
