//! Closed-form solution of the gate design constraints.
//!
//! Given the control coupling `g_1`, its detuning, the ladder of exchange
//! detunings, and the phase-closure integer `m`, the solver produces the
//! cross-Kerr strength `chi`, the gate time `pi/chi`, and the target
//! couplings `g_l` that make every per-target cross-Kerr strength equal to
//! `chi`. The constraint system is solved for the couplings with the
//! detunings held fixed; solving for detunings at fixed couplings would work
//! equally well but is not implemented.

use crate::error::{Error, Result};
use crate::hamiltonian::SystemParams;
use std::f64::consts::PI;

/// Solved design point. All frequencies in rad/s, time in seconds.
#[derive(Debug, Clone)]
pub struct DesignSolution {
    pub chi: f64,
    pub eta: f64,
    pub lambda_1: f64,
    pub t_gate: f64,
    /// Couplings of the target cavities `l = 2..n`.
    pub g_targets: Vec<f64>,
    pub m: u32,
    /// Per-target cross-Kerr strengths recomputed from the solved couplings;
    /// equal to `chi` up to floating-point error.
    pub chi_per_target: Vec<f64>,
}

/// Cross-Kerr strength from the phase-closure constraint:
/// `chi = (g_1^2 / delta_1) / (2m - n + 1)`.
pub fn solve_chi(g1: f64, delta1: f64, m: u32, n: usize) -> Result<f64> {
    if !(g1 > 0.0) || !(delta1 > 0.0) {
        return Err(Error::Design(format!(
            "control coupling and detuning must be positive, got g1 = {g1:.3e}, delta1 = {delta1:.3e}"
        )));
    }
    let divisor = 2 * m as i64 - n as i64 + 1;
    if divisor <= 0 {
        return Err(Error::Design(format!(
            "no positive cross-Kerr strength: 2m - n + 1 = {divisor} with m = {m}, n = {n}"
        )));
    }
    Ok(g1 * g1 / delta1 / divisor as f64)
}

/// Smallest phase-closure integer valid for `n` qubits.
pub fn smallest_valid_m(n: usize) -> u32 {
    // need 2m - n + 1 > 0, i.e. m > (n - 1) / 2
    ((n - 1) / 2 + 1) as u32
}

/// Target coupling that pins the per-target cross-Kerr strength to `chi`:
/// the positive root `g_l = 2 sqrt(gap chi) / (g1 (1/delta1 + 1/delta_l))`.
pub fn solve_gl(g1: f64, delta1: f64, delta_l: f64, exchange_gap: f64, chi: f64) -> Result<f64> {
    if !(g1 > 0.0) || !(delta1 > 0.0) || !(delta_l > 0.0) || !(exchange_gap > 0.0) {
        return Err(Error::Design(format!(
            "couplings and detunings must be positive, got g1 = {g1:.3e}, delta1 = {delta1:.3e}, delta_l = {delta_l:.3e}, gap = {exchange_gap:.3e}"
        )));
    }
    if chi < 0.0 {
        return Err(Error::Design(format!("chi must be nonnegative, got {chi:.3e}")));
    }
    Ok(2.0 * (exchange_gap * chi).sqrt() / (g1 * (1.0 / delta1 + 1.0 / delta_l)))
}

/// Cavity frequencies and every derived detuning for a chosen ladder.
#[derive(Debug, Clone)]
pub struct FrequencyPlan {
    /// Cavity frequencies, rad/s.
    pub omega_c: Vec<f64>,
    /// Wanted-coupling detunings `delta_1..delta_n`.
    pub detunings: Vec<f64>,
    /// Unwanted-coupling detunings; the first entry may be negative.
    pub unwanted_detunings: Vec<f64>,
}

impl FrequencyPlan {
    /// Frequency spacing `omega_ck - omega_cl`.
    pub fn cavity_spacing(&self, k: usize, l: usize) -> f64 {
        self.omega_c[k - 1] - self.omega_c[l - 1]
    }
}

/// Place the cavities: `omega_c1 = omega_fg - delta_1`, then each target at
/// `omega_cl = omega_fe - delta_l` with `delta_l = delta_1 + gap_l`.
pub fn derive_frequencies(
    omega_eg: f64,
    omega_fe: f64,
    delta1: f64,
    exchange_gaps: &[f64],
) -> Result<FrequencyPlan> {
    if !(delta1 > 0.0) {
        return Err(Error::Design(format!(
            "control detuning must be positive, got {delta1:.3e}"
        )));
    }
    for (i, &gap) in exchange_gaps.iter().enumerate() {
        if !(gap > 0.0) {
            return Err(Error::Design(format!(
                "exchange detuning of target {} must be positive, got {gap:.3e}",
                i + 2
            )));
        }
    }
    let omega_fg = omega_eg + omega_fe;
    let mut omega_c = vec![omega_fg - delta1];
    let mut detunings = vec![delta1];
    let mut unwanted = vec![omega_fe - omega_c[0]];
    for &gap in exchange_gaps {
        let delta_l = delta1 + gap;
        let w = omega_fe - delta_l;
        omega_c.push(w);
        detunings.push(delta_l);
        unwanted.push(omega_fg - w);
    }
    Ok(FrequencyPlan {
        omega_c,
        detunings,
        unwanted_detunings: unwanted,
    })
}

/// Cavity quality factors `Q_l = omega_cl * kappa_inv`.
pub fn quality_factors(omega_c: &[f64], kappa_inv: f64) -> Vec<f64> {
    omega_c.iter().map(|w| w * kappa_inv).collect()
}

/// Solve the full design: `n = exchange_gaps.len() + 1` qubits.
pub fn solve(g1: f64, delta1: f64, exchange_gaps: &[f64], m: u32) -> Result<DesignSolution> {
    let n = exchange_gaps.len() + 1;
    if n < 2 {
        return Err(Error::Design("the gate needs at least one target cavity".into()));
    }
    let chi = solve_chi(g1, delta1, m, n)?;
    let lambda_1 = g1 * g1 / delta1;
    let mut g_targets = Vec::with_capacity(n - 1);
    let mut chi_per_target = Vec::with_capacity(n - 1);
    for &gap in exchange_gaps {
        let delta_l = delta1 + gap;
        let g_l = solve_gl(g1, delta1, delta_l, gap, chi)?;
        g_targets.push(g_l);
        // substitute back: the realized cross-Kerr strength
        let exchange = 0.5 * g1 * g_l * (1.0 / delta1 + 1.0 / delta_l);
        chi_per_target.push(exchange * exchange / gap);
    }
    let eta = lambda_1 + (n as f64 - 1.0) * chi;
    let t_gate = PI / chi;
    Ok(DesignSolution {
        chi,
        eta,
        lambda_1,
        t_gate,
        g_targets,
        m,
        chi_per_target,
    })
}

/// Advisory ratios behind the dispersive approximation. Ratios of ten or
/// more are comfortable; smaller values degrade the effective model but are
/// never an error.
#[derive(Debug, Clone)]
pub struct DispersiveReport {
    /// `detuning_l / g_l` per cavity.
    pub detuning_over_g: Vec<f64>,
    /// `exchange_gap_l / max(lambda)` per target.
    pub gap_over_lambda: Vec<f64>,
    /// Threshold used by [`DispersiveReport::is_comfortable`].
    pub recommended_ratio: f64,
}

impl DispersiveReport {
    pub fn is_comfortable(&self) -> bool {
        self.detuning_over_g
            .iter()
            .chain(self.gap_over_lambda.iter())
            .all(|r| *r >= self.recommended_ratio)
    }
}

/// Rate the dispersive-regime quality of a parameter set.
pub fn dispersive_report(params: &SystemParams) -> DispersiveReport {
    let n = params.n;
    let detuning_over_g = (1..=n)
        .map(|l| {
            let g = params.g[l - 1];
            if g == 0.0 {
                f64::INFINITY
            } else {
                params.detuning(l).abs() / g
            }
        })
        .collect();
    let delta1 = params.detuning(1);
    let lambda_max = (1..=n)
        .map(|l| {
            let g = params.g[l - 1];
            let d = params.detuning(l);
            let lam = g * g / d;
            let pair = if l >= 2 {
                0.5 * params.g[0] * g * (1.0 / delta1 + 1.0 / d)
            } else {
                0.0
            };
            lam.max(pair)
        })
        .fold(0.0_f64, f64::max);
    let gap_over_lambda = (2..=n)
        .map(|l| {
            if lambda_max == 0.0 {
                f64::INFINITY
            } else {
                params.exchange_detuning(l) / lambda_max
            }
        })
        .collect();
    DispersiveReport {
        detuning_over_g,
        gap_over_lambda,
        recommended_ratio: 10.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    const G1: f64 = TAU * 150.0e6;
    const DELTA1: f64 = TAU * 1.5e9;

    #[test]
    fn chi_and_gate_time_reference_point() {
        let chi = solve_chi(G1, DELTA1, 2, 3).unwrap();
        assert!((chi - TAU * 7.5e6).abs() < 1e-3);
        let t = PI / chi;
        assert!((t - 66.6667e-9).abs() < 0.1e-9);
    }

    #[test]
    fn chi_divisor_one() {
        // n = 2, m = 1: chi = g1^2 / delta1 exactly
        let chi = solve_chi(G1, DELTA1, 1, 2).unwrap();
        assert_eq!(chi, G1 * G1 / DELTA1);
    }

    #[test]
    fn chi_scalar_oracle_five_qubits() {
        // g1 = 100 MHz, delta1 = 2 GHz, m = 3, n = 5:
        // chi = (100^2/2000) / 2 = 2.5 MHz, by hand
        let chi = solve_chi(TAU * 100.0e6, TAU * 2.0e9, 3, 5).unwrap();
        assert!((chi - TAU * 2.5e6).abs() < 1e-6);
    }

    #[test]
    fn invalid_m_rejected() {
        // n = 4, m = 1: 2m - n + 1 = -1
        assert!(solve_chi(G1, DELTA1, 1, 4).is_err());
    }

    #[test]
    fn smallest_m_is_consistent() {
        for n in 2..=9 {
            let m = smallest_valid_m(n);
            assert!(2 * m as i64 - n as i64 + 1 > 0, "n = {n}, m = {m}");
            if m > 1 {
                let smaller = m - 1;
                assert!(2 * smaller as i64 - n as i64 + 1 <= 0);
            }
        }
        assert_eq!(smallest_valid_m(2), 1);
        assert_eq!(smallest_valid_m(3), 2);
    }

    #[test]
    fn target_couplings_reference_point() {
        let sol = solve(G1, DELTA1, &[TAU * 10.0e6, TAU * 30.0e6], 2).unwrap();
        let g2 = sol.g_targets[0] / TAU;
        let g3 = sol.g_targets[1] / TAU;
        assert!((g2 - 86.89e6).abs() < 0.05e6, "g2 = {g2:.4e}");
        assert!((g3 - 151.49e6).abs() < 0.05e6, "g3 = {g3:.4e}");
        // substitution reproduces chi
        for chi_l in &sol.chi_per_target {
            assert!((chi_l - sol.chi).abs() < 1e-12 * sol.chi);
        }
        // closure identities
        assert!((sol.chi * sol.t_gate - PI).abs() < 1e-12 * PI);
        assert!((sol.eta * sol.t_gate - 2.0 * PI * sol.m as f64).abs() < 1e-9 * PI);
        assert!((sol.eta - (sol.lambda_1 + 2.0 * sol.chi)).abs() < 1e-9);
    }

    #[test]
    fn zero_chi_gives_zero_coupling() {
        let g = solve_gl(G1, DELTA1, DELTA1 + TAU * 10.0e6, TAU * 10.0e6, 0.0).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn nonpositive_inputs_rejected() {
        assert!(solve_gl(G1, DELTA1, DELTA1, 0.0, 1.0).is_err());
        assert!(solve_gl(0.0, DELTA1, DELTA1, 1.0, 1.0).is_err());
        assert!(derive_frequencies(1.0, 2.0, 0.5, &[0.0]).is_err());
        assert!(derive_frequencies(1.0, 2.0, -0.5, &[1.0]).is_err());
    }

    #[test]
    fn frequency_plan_reference_point() {
        let plan = derive_frequencies(
            TAU * 5.0e9,
            TAU * 7.5e9,
            DELTA1,
            &[TAU * 10.0e6, TAU * 30.0e6],
        )
        .unwrap();
        let ghz = |w: f64| w / TAU / 1e9;
        assert!((ghz(plan.omega_c[0]) - 11.0).abs() < 1e-9);
        assert!((ghz(plan.omega_c[1]) - 5.99).abs() < 1e-9);
        assert!((ghz(plan.omega_c[2]) - 5.97).abs() < 1e-9);
        assert!((ghz(plan.unwanted_detunings[0]) + 3.5).abs() < 1e-9);
        assert!((ghz(plan.unwanted_detunings[1]) - 6.51).abs() < 1e-9);
        assert!((ghz(plan.unwanted_detunings[2]) - 6.53).abs() < 1e-9);
        assert!((ghz(plan.cavity_spacing(1, 2)) - 5.01).abs() < 1e-9);
        assert!((ghz(plan.cavity_spacing(2, 3)) - 0.02).abs() < 1e-9);
        assert!((ghz(plan.cavity_spacing(1, 3)) - 5.03).abs() < 1e-9);
    }

    #[test]
    fn quality_factors_reference_point() {
        let plan = derive_frequencies(
            TAU * 5.0e9,
            TAU * 7.5e9,
            DELTA1,
            &[TAU * 10.0e6, TAU * 30.0e6],
        )
        .unwrap();
        let q = quality_factors(&plan.omega_c, 10.0e-6);
        assert!((q[0] - 6.9e5).abs() / 6.9e5 < 0.01, "Q1 = {:.4e}", q[0]);
        assert!((q[1] - 3.76e5).abs() / 3.76e5 < 0.01, "Q2 = {:.4e}", q[1]);
        assert!((q[2] - 3.75e5).abs() / 3.75e5 < 0.01, "Q3 = {:.4e}", q[2]);
        // zero lifetime means zero quality factor
        assert_eq!(quality_factors(&plan.omega_c, 0.0), vec![0.0; 3]);
    }

    #[test]
    fn round_trip_against_effective_strengths() {
        use crate::hamiltonian::{effective_strengths, SystemParams};
        use ndarray::Array2;
        let gaps = [TAU * 10.0e6, TAU * 30.0e6];
        let sol = solve(G1, DELTA1, &gaps, 2).unwrap();
        let plan = derive_frequencies(TAU * 5.0e9, TAU * 7.5e9, DELTA1, &gaps).unwrap();
        let mut g = vec![G1];
        g.extend(&sol.g_targets);
        let params = SystemParams {
            n: 3,
            omega_eg: TAU * 5.0e9,
            omega_fe: TAU * 7.5e9,
            omega_fg: TAU * 12.5e9,
            omega_c: plan.omega_c.clone(),
            g,
            g_tilde: vec![0.0; 3],
            g_cross: Array2::zeros((3, 3)),
            m: 2,
        };
        let eff = effective_strengths(&params).unwrap();
        for chi_l in &eff.chi_per_target {
            assert!((chi_l - sol.chi).abs() < 1e-9 * sol.chi);
        }
        assert!((eff.eta - sol.eta).abs() < 1e-9 * sol.eta);
        assert!((eff.lambda_1 - sol.lambda_1).abs() < 1e-12 * sol.lambda_1);
    }

    #[test]
    fn dispersive_report_reference_point() {
        use ndarray::Array2;
        let gaps = [TAU * 10.0e6, TAU * 30.0e6];
        let sol = solve(G1, DELTA1, &gaps, 2).unwrap();
        let plan = derive_frequencies(TAU * 5.0e9, TAU * 7.5e9, DELTA1, &gaps).unwrap();
        let mut g = vec![G1];
        g.extend(&sol.g_targets);
        let params = SystemParams {
            n: 3,
            omega_eg: TAU * 5.0e9,
            omega_fe: TAU * 7.5e9,
            omega_fg: TAU * 12.5e9,
            omega_c: plan.omega_c,
            g,
            g_tilde: vec![0.0; 3],
            g_cross: Array2::zeros((3, 3)),
            m: 2,
        };
        let report = dispersive_report(&params);
        // delta1/g1 = 10 exactly at the reference point
        assert!((report.detuning_over_g[0] - 10.0).abs() < 1e-9);
        assert!(report.detuning_over_g[1] > 10.0);
        // the (2,3) exchange gaps sit below the comfortable ratio; the
        // report flags this without erroring
        assert!(!report.gap_over_lambda.is_empty());
    }
}
