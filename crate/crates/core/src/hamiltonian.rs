//! Interaction-picture Hamiltonians of the cavity-qutrit system.
//!
//! All Hamiltonians here are sums of rotating terms
//! `H(t) = H_static + sum_j (exp(-i nu_j t) A_j + h.c.)`, represented as a
//! static part plus a list of `(A_j, nu_j)` pairs. Frequencies may be
//! negative; the representation handles either sign without special cases.
//!
//! Internally everything is in angular frequency (rad/s). Configuration
//! files speak linear frequency (GHz/MHz) and are converted once at parse
//! time by the `experiments` module.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation_op, number_op, qutrit_op, qutrit_projector, Operator, QutritLevel,
    SpaceDescriptor,
};
use crate::C64;

/// Physical rates and frequencies of the cavity-qutrit system, in rad/s.
///
/// `g[0]` couples cavity 1 to the `g-f` transition; `g[l-1]` for `l >= 2`
/// couples cavity `l` to the `e-f` transition. `g_tilde` holds the strengths
/// of the corresponding unwanted couplings (cavity 1 to `e-f`, cavity `l` to
/// `g-f`), and `g_cross` the symmetric inter-cavity crosstalk matrix.
#[derive(Debug, Clone)]
pub struct SystemParams {
    pub n: usize,
    pub omega_eg: f64,
    pub omega_fe: f64,
    pub omega_fg: f64,
    pub omega_c: Vec<f64>,
    pub g: Vec<f64>,
    pub g_tilde: Vec<f64>,
    pub g_cross: Array2<f64>,
    pub m: u32,
}

impl SystemParams {
    /// Detuning of the wanted coupling of cavity `l` (1-based):
    /// `omega_fg - omega_c1` for the control cavity, `omega_fe - omega_cl`
    /// for targets.
    pub fn detuning(&self, l: usize) -> f64 {
        if l == 1 {
            self.omega_fg - self.omega_c[0]
        } else {
            self.omega_fe - self.omega_c[l - 1]
        }
    }

    /// Detuning of the unwanted coupling of cavity `l` (1-based); the control
    /// cavity couples off-resonantly to `e-f`, targets to `g-f`.
    pub fn unwanted_detuning(&self, l: usize) -> f64 {
        if l == 1 {
            self.omega_fe - self.omega_c[0]
        } else {
            self.omega_fg - self.omega_c[l - 1]
        }
    }

    /// Detuning gap between target `l` (2-based) and the control cavity,
    /// `detuning(l) - detuning(1)`; sets the rate at which the virtual
    /// photon exchange between cavities 1 and `l` is suppressed.
    pub fn exchange_detuning(&self, l: usize) -> f64 {
        self.detuning(l) - self.detuning(1)
    }

    /// Frequency spacing `omega_ck - omega_cl` between two cavities.
    pub fn cavity_spacing(&self, k: usize, l: usize) -> f64 {
        self.omega_c[k - 1] - self.omega_c[l - 1]
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("system needs at least one cavity".into()));
        }
        for (name, len) in [
            ("omega_c", self.omega_c.len()),
            ("g", self.g.len()),
            ("g_tilde", self.g_tilde.len()),
        ] {
            if len != self.n {
                return Err(Error::InvalidParams(format!(
                    "{name} has {len} entries, expected n = {}",
                    self.n
                )));
            }
        }
        if self.g_cross.dim() != (self.n, self.n) {
            return Err(Error::InvalidParams(format!(
                "g_cross is {:?}, expected ({n}, {n})",
                self.g_cross.dim(),
                n = self.n
            )));
        }
        let sum = self.omega_eg + self.omega_fe;
        if (self.omega_fg - sum).abs() > 1e-9 * self.omega_fg.abs().max(1.0) {
            return Err(Error::InvalidParams(format!(
                "level diagram inconsistent: omega_fg = {:.6e} but omega_eg + omega_fe = {sum:.6e}",
                self.omega_fg
            )));
        }
        for l in 1..=self.n {
            if self.detuning(l) <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "wanted detuning of cavity {l} must be positive, got {:.6e}",
                    self.detuning(l)
                )));
            }
        }
        for l in 2..=self.n {
            if self.exchange_detuning(l) <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "exchange detuning of target {l} must be positive, got {:.6e}",
                    self.exchange_detuning(l)
                )));
            }
        }
        for k in 0..self.n {
            if self.g_cross[(k, k)] != 0.0 {
                return Err(Error::InvalidParams("g_cross diagonal must be zero".into()));
            }
            for l in 0..self.n {
                if (self.g_cross[(k, l)] - self.g_cross[(l, k)]).abs() > 0.0 {
                    return Err(Error::InvalidParams("g_cross must be symmetric".into()));
                }
            }
        }
        if self.m == 0 {
            return Err(Error::InvalidParams("m must be a positive integer".into()));
        }
        Ok(())
    }
}

/// One rotating term: contributes `exp(-i frequency t) * operator + h.c.`.
#[derive(Debug, Clone)]
pub struct RotatingTerm {
    pub operator: Operator,
    pub frequency: f64,
}

/// Hamiltonian as a static Hermitian part plus rotating terms.
#[derive(Debug, Clone)]
pub struct RotatingTermHamiltonian {
    static_part: Operator,
    terms: Vec<RotatingTerm>,
}

impl RotatingTermHamiltonian {
    pub fn new(static_part: Operator, terms: Vec<RotatingTerm>) -> Result<Self> {
        let dim = static_part.dim();
        for (j, term) in terms.iter().enumerate() {
            if term.operator.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "rotating term {j} has dim {}, static part has {dim}",
                    term.operator.dim()
                )));
            }
        }
        Ok(Self { static_part, terms })
    }

    /// The zero Hamiltonian.
    pub fn zero(dim: usize) -> Self {
        Self {
            static_part: Operator::zeros(dim),
            terms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.static_part.dim()
    }

    pub fn static_part(&self) -> &Operator {
        &self.static_part
    }

    pub fn terms(&self) -> &[RotatingTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Concatenate the term lists of two Hamiltonians on the same space.
    pub fn concat(&self, other: &RotatingTermHamiltonian) -> Result<RotatingTermHamiltonian> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot concatenate Hamiltonians of dims {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let static_sum = Operator::hermitian_from_matrix(
            self.static_part.matrix() + other.static_part.matrix(),
        )?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        RotatingTermHamiltonian::new(static_sum, terms)
    }

    /// Evaluate `H(t)`. The h.c. partner of each entry is written explicitly,
    /// so the result is Hermitian to the bit.
    pub fn assemble_at(&self, t: f64) -> Operator {
        let dim = self.dim();
        let mut h = self.static_part.matrix().clone();
        for term in &self.terms {
            let phase = C64::from_polar(1.0, -term.frequency * t);
            let a = term.operator.matrix();
            for i in 0..dim {
                for j in 0..dim {
                    let v = a[(i, j)];
                    if v != C64::new(0.0, 0.0) {
                        let w = phase * v;
                        h[(i, j)] += w;
                        h[(j, i)] += w.conj();
                    }
                }
            }
        }
        Operator::hermitian_from_matrix(h).expect("assembled Hamiltonian is Hermitian by construction")
    }
}

fn check_space(params: &SystemParams, space: &SpaceDescriptor) -> Result<()> {
    params.validate()?;
    if space.n_cavities() != params.n {
        return Err(Error::DimensionMismatch(format!(
            "space has {} cavities, params have n = {}",
            space.n_cavities(),
            params.n
        )));
    }
    Ok(())
}

/// Wanted couplings only: cavity 1 on the `g-f` transition and every target
/// on the `e-f` transition, each rotating at its own detuning. No static
/// part. Zero-strength couplings contribute no term.
pub fn build_ideal(
    params: &SystemParams,
    space: &SpaceDescriptor,
) -> Result<RotatingTermHamiltonian> {
    check_space(params, space)?;
    let mut terms = Vec::new();
    for l in 1..=params.n {
        let strength = params.g[l - 1];
        if strength == 0.0 {
            continue;
        }
        let raise = annihilation_op(space, l)?.adjoint();
        let lower = if l == 1 {
            qutrit_op(space, QutritLevel::G, QutritLevel::F)
        } else {
            qutrit_op(space, QutritLevel::E, QutritLevel::F)
        };
        terms.push(RotatingTerm {
            operator: raise.dot(&lower).scaled(C64::new(strength, 0.0)),
            frequency: params.detuning(l),
        });
    }
    RotatingTermHamiltonian::new(Operator::zeros(space.total_dim()), terms)
}

/// Error Hamiltonian: the unwanted qutrit couplings (cavity 1 to `e-f`,
/// targets to `g-f`) plus inter-cavity crosstalk. Each unordered cavity pair
/// is stored once; the h.c. expansion supplies the reverse process.
pub fn build_error_terms(
    params: &SystemParams,
    space: &SpaceDescriptor,
) -> Result<RotatingTermHamiltonian> {
    check_space(params, space)?;
    let mut terms = Vec::new();
    for l in 1..=params.n {
        let strength = params.g_tilde[l - 1];
        if strength == 0.0 {
            continue;
        }
        let raise = annihilation_op(space, l)?.adjoint();
        let lower = if l == 1 {
            qutrit_op(space, QutritLevel::E, QutritLevel::F)
        } else {
            qutrit_op(space, QutritLevel::G, QutritLevel::F)
        };
        terms.push(RotatingTerm {
            operator: raise.dot(&lower).scaled(C64::new(strength, 0.0)),
            frequency: params.unwanted_detuning(l),
        });
    }
    // Crosstalk pair (k, l), k < l: exp(+i spacing_kl t) a_k^dag a_l + h.c.,
    // stored as the h.c. partner so the recorded frequency is spacing_kl.
    for k in 1..=params.n {
        for l in (k + 1)..=params.n {
            let strength = params.g_cross[(k - 1, l - 1)];
            if strength == 0.0 {
                continue;
            }
            let op = annihilation_op(space, l)?
                .adjoint()
                .dot(&annihilation_op(space, k)?)
                .scaled(C64::new(strength, 0.0));
            terms.push(RotatingTerm {
                operator: op,
                frequency: params.cavity_spacing(k, l),
            });
        }
    }
    RotatingTermHamiltonian::new(Operator::zeros(space.total_dim()), terms)
}

/// Full Hamiltonian: wanted couplings plus all error terms.
pub fn build_full(
    params: &SystemParams,
    space: &SpaceDescriptor,
) -> Result<RotatingTermHamiltonian> {
    build_ideal(params, space)?.concat(&build_error_terms(params, space)?)
}

/// Second-order coupling strengths of the dispersive model.
#[derive(Debug, Clone)]
pub struct EffectiveStrengths {
    /// Photon-number shift of the control cavity, `g_1^2 / detuning_1`.
    pub lambda_1: f64,
    /// Cross-Kerr strength contributed by each target cavity.
    pub chi_per_target: Vec<f64>,
    /// Mean cross-Kerr strength; the design solver makes the per-target
    /// values equal, so under solved parameters the mean is exact.
    pub chi: f64,
    /// Total phase rate on a control photon, `lambda_1 + (n-1) chi`.
    pub eta: f64,
}

/// Compute the dispersive strengths from bare couplings and detunings.
pub fn effective_strengths(params: &SystemParams) -> Result<EffectiveStrengths> {
    let delta1 = params.detuning(1);
    if delta1 <= 0.0 {
        return Err(Error::Design(format!(
            "control detuning must be positive, got {delta1:.6e}"
        )));
    }
    let g1 = params.g[0];
    let lambda_1 = g1 * g1 / delta1;
    let mut chi_per_target = Vec::with_capacity(params.n.saturating_sub(1));
    for l in 2..=params.n {
        let gap = params.exchange_detuning(l);
        if gap <= 0.0 {
            return Err(Error::Design(format!(
                "exchange detuning of target {l} must be positive for the dispersive reduction, got {gap:.6e}"
            )));
        }
        let delta_l = params.detuning(l);
        let exchange = 0.5 * g1 * params.g[l - 1] * (1.0 / delta1 + 1.0 / delta_l);
        chi_per_target.push(exchange * exchange / gap);
    }
    let chi = if chi_per_target.is_empty() {
        0.0
    } else {
        chi_per_target.iter().sum::<f64>() / chi_per_target.len() as f64
    };
    let eta = lambda_1 + (params.n as f64 - 1.0) * chi;
    Ok(EffectiveStrengths {
        lambda_1,
        chi_per_target,
        chi,
        eta,
    })
}

/// Time-independent diagonal effective Hamiltonian of the ground-state
/// sector, `-eta n_1 - chi sum_l n_1 n_l` on `|g>` and zero on `|e>`, `|f>`.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    pub operator: Operator,
    pub strengths: EffectiveStrengths,
}

/// Build the diagonal effective Hamiltonian for the ground-state sector.
pub fn build_effective(
    params: &SystemParams,
    space: &SpaceDescriptor,
) -> Result<EffectiveHamiltonian> {
    check_space(params, space)?;
    let strengths = effective_strengths(params)?;
    let d = space.total_dim();
    let mut mat = Array2::<C64>::zeros((d, d));
    for i in 0..d {
        if space.qutrit_of(i) != QutritLevel::G.index() {
            continue;
        }
        let n1 = space.photons_of(i, 1) as f64;
        let mut target_sum = 0.0;
        for l in 2..=params.n {
            target_sum += space.photons_of(i, l) as f64;
        }
        mat[(i, i)] = C64::new(-strengths.eta * n1 - strengths.chi * n1 * target_sum, 0.0);
    }
    Ok(EffectiveHamiltonian {
        operator: Operator::hermitian_from_matrix(mat)?,
        strengths,
    })
}

/// Diagnostic operators used by property checks: total qutrit excitation
/// projector `|e><e| + |f><f|`.
pub fn qutrit_excited_projector(space: &SpaceDescriptor) -> Operator {
    let m = qutrit_projector(space, QutritLevel::E).matrix()
        + qutrit_projector(space, QutritLevel::F).matrix();
    Operator::hermitian_from_matrix(m).expect("sum of projectors is Hermitian")
}

/// Total photon number operator across all cavities.
pub fn total_photon_op(space: &SpaceDescriptor) -> Operator {
    let d = space.total_dim();
    let mut m = Array2::<C64>::zeros((d, d));
    for l in 1..=space.n_cavities() {
        m += number_op(space, l)
            .expect("cavity index in range")
            .matrix();
    }
    Operator::hermitian_from_matrix(m).expect("diagonal real matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{basis_state, BasisLabel};
    use crate::linalg::{hermiticity_defect, max_abs, max_abs_diff};
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn label(q: QutritLevel, photons: &[usize]) -> BasisLabel {
        BasisLabel::new(q, photons.to_vec())
    }

    /// The worked three-cavity reference point used throughout the docs:
    /// transition frequencies 5.0/7.5 GHz, detunings 1.5/1.51/1.53 GHz,
    /// control coupling 150 MHz, target couplings from the design solution.
    pub(crate) fn reference_params(g_tilde_like_g: bool, crosstalk_fraction: f64) -> SystemParams {
        let delta = [TAU * 1.5e9, TAU * 1.51e9, TAU * 1.53e9];
        let omega_eg = TAU * 5.0e9;
        let omega_fe = TAU * 7.5e9;
        let omega_fg = omega_eg + omega_fe;
        let omega_c = vec![
            omega_fg - delta[0],
            omega_fe - delta[1],
            omega_fe - delta[2],
        ];
        let g1 = TAU * 150.0e6;
        let chi = g1 * g1 / delta[0] / 2.0; // 2m - n + 1 = 2 at m = 2, n = 3
        let g_l = |l: usize| {
            let gap = delta[l - 1] - delta[0];
            2.0 * (gap * chi).sqrt() / (g1 * (1.0 / delta[0] + 1.0 / delta[l - 1]))
        };
        let g = vec![g1, g_l(2), g_l(3)];
        let g_tilde = if g_tilde_like_g {
            g.clone()
        } else {
            vec![0.0; 3]
        };
        let g_max = g.iter().cloned().fold(0.0, f64::max);
        let mut g_cross = Array2::zeros((3, 3));
        for k in 0..3 {
            for l in 0..3 {
                if k != l {
                    g_cross[(k, l)] = crosstalk_fraction * g_max;
                }
            }
        }
        SystemParams {
            n: 3,
            omega_eg,
            omega_fe,
            omega_fg,
            omega_c,
            g,
            g_tilde,
            g_cross,
            m: 2,
        }
    }

    fn space3() -> SpaceDescriptor {
        SpaceDescriptor::uniform(3, 3).unwrap()
    }

    #[test]
    fn reference_params_validate() {
        let p = reference_params(true, 0.01);
        p.validate().unwrap();
        assert!((p.detuning(1) - TAU * 1.5e9).abs() < 1e-3);
        assert!((p.exchange_detuning(2) - TAU * 10.0e6).abs() < 1e-3);
        assert!((p.exchange_detuning(3) - TAU * 30.0e6).abs() < 1e-3);
        // cavity frequencies land on the documented values
        assert!((p.omega_c[0] - TAU * 11.0e9).abs() < 1.0);
        assert!((p.omega_c[1] - TAU * 5.99e9).abs() < 1.0);
        assert!((p.omega_c[2] - TAU * 5.97e9).abs() < 1.0);
    }

    #[test]
    fn ideal_control_coupling_element() {
        let p = reference_params(false, 0.0);
        let space = space3();
        let h = build_ideal(&p, &space).unwrap();
        let h0 = h.assemble_at(0.0);
        let space_ref = &space;
        let idx =
            |q, ph: &[usize]| space_ref.flat_index(&label(q, ph)).unwrap();
        let f000 = idx(QutritLevel::F, &[0, 0, 0]);
        let g100 = idx(QutritLevel::G, &[1, 0, 0]);
        let elem = h0.matrix()[(f000, g100)];
        assert!((elem - c(TAU * 150.0e6, 0.0)).norm() < 1e-3);
    }

    #[test]
    fn vacuum_ground_state_is_dark() {
        let p = reference_params(false, 0.0);
        let space = space3();
        let h = build_ideal(&p, &space).unwrap();
        let vac = basis_state(&space, &label(QutritLevel::G, &[0, 0, 0])).unwrap();
        for t in [0.0, 0.3e-9, 7.7e-9, 66.7e-9] {
            let out = h.assemble_at(t).apply(&vac).unwrap();
            assert!(out.norm() < 1e-12 * TAU * 150.0e6);
        }
    }

    #[test]
    fn target_coupling_phase_matches_scalar_oracle() {
        let p = reference_params(false, 0.0);
        let space = space3();
        let h = build_ideal(&p, &space).unwrap();
        let t = 1.0e-9;
        let ht = h.assemble_at(t);
        let f000 = space.flat_index(&label(QutritLevel::F, &[0, 0, 0])).unwrap();
        let e010 = space.flat_index(&label(QutritLevel::E, &[0, 1, 0])).unwrap();
        // scalar route: g2 * exp(+i delta2 t), computed from raw scalars
        let delta2 = p.omega_fe - p.omega_c[1];
        let expect = c(p.g[1], 0.0) * c(0.0, delta2 * t).exp();
        let got = ht.matrix()[(f000, e010)];
        assert!(
            (got - expect).norm() < 1e-12 * expect.norm(),
            "got {got}, expected {expect}"
        );
    }

    #[test]
    fn error_term_frequencies_match_reference_values() {
        let p = reference_params(true, 0.01);
        let space = space3();
        let h = build_error_terms(&p, &space).unwrap();
        let freqs: Vec<f64> = h.terms().iter().map(|t| t.frequency / TAU).collect();
        let expected = [
            -3.5e9, 6.51e9, 6.53e9, // unwanted-coupling detunings
            5.01e9, 5.03e9, 0.02e9, // cavity spacings for pairs (1,2), (1,3), (2,3)
        ];
        assert_eq!(freqs.len(), 6);
        for (got, want) in freqs.iter().zip(expected) {
            assert!(
                (got - want).abs() < 1e-3 * want.abs().max(1e6),
                "got {got:.4e}, want {want:.4e}"
            );
        }
    }

    #[test]
    fn zero_couplings_shrink_term_list() {
        let mut p = reference_params(true, 0.0);
        let space = space3();
        // crosstalk off: only the unwanted-coupling family remains
        let h = build_error_terms(&p, &space).unwrap();
        assert_eq!(h.term_count(), 3);
        // unwanted couplings off as well: empty list
        p.g_tilde = vec![0.0; 3];
        let h = build_error_terms(&p, &space).unwrap();
        assert_eq!(h.term_count(), 0);
    }

    #[test]
    fn full_hamiltonian_term_count_and_additivity() {
        let p = reference_params(true, 0.01);
        let space = space3();
        let ideal = build_ideal(&p, &space).unwrap();
        let errs = build_error_terms(&p, &space).unwrap();
        let full = build_full(&p, &space).unwrap();
        assert_eq!(full.term_count(), 9); // 3 wanted + 3 unwanted + 3 crosstalk pairs
        let sum = ideal.assemble_at(0.0).matrix() + errs.assemble_at(0.0).matrix();
        assert!(max_abs_diff(full.assemble_at(0.0).matrix(), &sum) < 1e-9);
    }

    #[test]
    fn assembled_hamiltonian_hermitian_at_random_times() {
        let p = reference_params(true, 0.01);
        let space = space3();
        let full = build_full(&p, &space).unwrap();
        // deterministic xorshift over [0, 100 ns]
        let mut s = 0x9e3779b97f4a7c15_u64;
        for _ in 0..10 {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            let t = (s >> 11) as f64 / (1u64 << 53) as f64 * 100e-9;
            let h = full.assemble_at(t);
            assert!(hermiticity_defect(h.matrix()) < 1e-12);
        }
    }

    #[test]
    fn ideal_hamiltonian_preserves_excitation_blocks() {
        // Two conserved labels: total excitation (photons + 1 for |f>) and
        // control-side excitation (n_1 + 1 for |e> or |f>). The wanted
        // couplings never connect states with different labels.
        let p = reference_params(false, 0.0);
        let space = space3();
        let h = build_ideal(&p, &space).unwrap();
        let block = |i: usize| {
            let q = space.qutrit_of(i);
            let photons: usize = (1..=3).map(|l| space.photons_of(i, l)).sum();
            let m_tot = photons + usize::from(q == QutritLevel::F.index());
            let m_ctrl = space.photons_of(i, 1) + usize::from(q != QutritLevel::G.index());
            (m_tot, m_ctrl)
        };
        for t in [0.0, 2.1e-9, 33.3e-9] {
            let ht = h.assemble_at(t);
            for i in 0..space.total_dim() {
                for j in 0..space.total_dim() {
                    if block(i) != block(j) {
                        assert!(
                            ht.matrix()[(i, j)].norm() < 1e-12,
                            "coupling across blocks at ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn effective_reference_strengths() {
        let p = reference_params(false, 0.0);
        let space = space3();
        let eff = build_effective(&p, &space).unwrap();
        let s = &eff.strengths;
        assert!((s.chi - TAU * 7.5e6).abs() < TAU * 1.0, "chi = {}", s.chi / TAU);
        assert!((s.lambda_1 - TAU * 15.0e6).abs() < TAU * 1.0);
        assert!((s.eta - (s.lambda_1 + 2.0 * s.chi)).abs() < 1e-6);
        for chi_l in &s.chi_per_target {
            assert!((chi_l - s.chi).abs() < 1e-9 * s.chi);
        }
    }

    #[test]
    fn effective_operator_is_diagonal_with_expected_eigenvalues() {
        let p = reference_params(false, 0.0);
        let space = space3();
        let eff = build_effective(&p, &space).unwrap();
        let m = eff.operator.matrix();
        let s = &eff.strengths;
        for i in 0..space.total_dim() {
            for j in 0..space.total_dim() {
                if i != j {
                    assert_eq!(m[(i, j)], c(0.0, 0.0));
                }
            }
        }
        let diag_of = |q, ph: &[usize]| {
            let idx = space.flat_index(&label(q, ph)).unwrap();
            m[(idx, idx)].re
        };
        let eta = s.eta;
        let chi = s.chi;
        assert!((diag_of(QutritLevel::G, &[1, 1, 1]) - (-eta - 2.0 * chi)).abs() < 1e-3);
        assert!((diag_of(QutritLevel::G, &[1, 0, 0]) - (-eta)).abs() < 1e-3);
        assert!(diag_of(QutritLevel::G, &[0, 2, 1]).abs() < 1e-12);
        // zero outside the ground sector
        assert!(diag_of(QutritLevel::E, &[1, 1, 1]).abs() < 1e-12);
        assert!(diag_of(QutritLevel::F, &[1, 1, 1]).abs() < 1e-12);
    }

    #[test]
    fn effective_reduces_to_control_shift_without_targets() {
        let mut p = reference_params(false, 0.0);
        p.g[1] = 0.0;
        p.g[2] = 0.0;
        let space = space3();
        let eff = build_effective(&p, &space).unwrap();
        assert_eq!(eff.strengths.chi, 0.0);
        let n1 = number_op(&space, 1).unwrap();
        let proj_g = qutrit_projector(&space, QutritLevel::G);
        let expect = n1
            .dot(&proj_g)
            .scaled(c(-eff.strengths.lambda_1, 0.0));
        assert!(max_abs_diff(eff.operator.matrix(), expect.matrix()) < 1e-9);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let p = reference_params(false, 0.0);
        let wrong_space = SpaceDescriptor::uniform(2, 3).unwrap();
        assert!(build_ideal(&p, &wrong_space).is_err());
        assert!(build_effective(&p, &wrong_space).is_err());
    }

    #[test]
    fn zero_hamiltonian_assembles_to_zeros() {
        let h = RotatingTermHamiltonian::zero(5);
        assert!(max_abs(h.assemble_at(3.7).matrix()) == 0.0);
    }
}
