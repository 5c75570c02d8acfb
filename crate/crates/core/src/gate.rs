//! Ideal gate definitions, analytic evolution under the effective model,
//! benchmark states, and fidelity.
//!
//! Logical embedding: logical `|i_1 ... i_n>` lives at Fock occupations
//! `(i_1, ..., i_n)` with the qutrit in `|g>`. Logical indices order `i_1`
//! as the most significant bit.

use crate::error::{Error, Result};
use crate::hilbert::{BasisLabel, Operator, QutritLevel, SpaceDescriptor, StateVector};
use crate::lindblad::DensityMatrix;
use crate::C64;
use ndarray::Array2;

/// Shape of the multi-target controlled-phase gate: cavity 1 controls
/// phase flips on cavities `2..=n`.
#[derive(Debug, Clone, Copy)]
pub struct GateSpec {
    pub n: usize,
}

impl GateSpec {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!(
                "the gate needs at least one target, got n = {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn logical_dim(&self) -> usize {
        1 << self.n
    }
}

/// Bits of a logical index, most significant first (control bit first).
fn bits_of(index: usize, n: usize) -> Vec<usize> {
    (0..n).map(|k| (index >> (n - 1 - k)) & 1).collect()
}

/// The target unitary on the `2^n` logical space: diagonal with entry
/// `(-1)^(i_1 (i_2 + ... + i_n))`.
pub fn ideal_gate_unitary(spec: &GateSpec) -> Operator {
    let dim = spec.logical_dim();
    let mut m = Array2::<C64>::zeros((dim, dim));
    for idx in 0..dim {
        let bits = bits_of(idx, spec.n);
        let flips: usize = bits[1..].iter().sum();
        let sign = if bits[0] == 1 && flips % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        m[(idx, idx)] = C64::new(sign, 0.0);
    }
    Operator::hermitian_from_matrix(m).expect("diagonal of +-1 is Hermitian")
}

/// Flat index of the physical embedding of a logical basis state.
pub fn logical_flat_index(space: &SpaceDescriptor, bits: &[usize]) -> Result<usize> {
    if bits.len() != space.n_cavities() {
        return Err(Error::DimensionMismatch(format!(
            "{} logical bits for a space with {} cavities",
            bits.len(),
            space.n_cavities()
        )));
    }
    space.flat_index(&BasisLabel::new(QutritLevel::G, bits.to_vec()))
}

/// Analytic propagator of the diagonal effective model at time `t`:
/// phase `exp(i (eta n_1 + chi n_1 sum_l n_l) t)` on the ground sector,
/// identity on the `|e>` and `|f>` sectors.
pub fn analytic_propagator(eta: f64, chi: f64, t: f64, space: &SpaceDescriptor) -> Operator {
    let d = space.total_dim();
    let mut m = Array2::<C64>::zeros((d, d));
    for i in 0..d {
        m[(i, i)] = if space.qutrit_of(i) == QutritLevel::G.index() {
            let n1 = space.photons_of(i, 1) as f64;
            let targets: f64 = (2..=space.n_cavities())
                .map(|l| space.photons_of(i, l) as f64)
                .sum();
            C64::from_polar(1.0, (eta * n1 + chi * n1 * targets) * t)
        } else {
            C64::new(1.0, 0.0)
        };
    }
    Operator::from_matrix(m)
}

/// Benchmark input: the uniform superposition of all `2^n` logical states,
/// tensored with `|g>`.
pub fn initial_state(space: &SpaceDescriptor) -> StateVector {
    let n = space.n_cavities();
    let amp = C64::new(1.0 / ((1u64 << n) as f64).sqrt(), 0.0);
    let mut v = StateVector::zeros(space.total_dim());
    for idx in 0..(1usize << n) {
        let bits = bits_of(idx, n);
        let flat = logical_flat_index(space, &bits).expect("logical state fits any valid space");
        v.amplitudes_mut()[flat] = amp;
    }
    v
}

/// Benchmark target: the ideal gate applied to the logical part of
/// [`initial_state`], tensored with `|g>`.
pub fn ideal_output_state(space: &SpaceDescriptor) -> StateVector {
    let n = space.n_cavities();
    let spec = GateSpec { n };
    let gate = ideal_gate_unitary(&spec);
    let amp = 1.0 / ((1u64 << n) as f64).sqrt();
    let mut v = StateVector::zeros(space.total_dim());
    for idx in 0..(1usize << n) {
        let bits = bits_of(idx, n);
        let flat = logical_flat_index(space, &bits).expect("logical state fits any valid space");
        let sign = gate.matrix()[(idx, idx)];
        v.amplitudes_mut()[flat] = sign * amp;
    }
    v
}

/// Gate fidelity against a pure target: `sqrt(<psi| rho |psi>)`, clamped to
/// `[0, 1]` against roundoff. Evaluated as a quadratic form; no
/// eigendecomposition.
pub fn fidelity(rho: &DensityMatrix, psi: &StateVector) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs target dim {}",
            rho.dim(),
            psi.dim()
        )));
    }
    let amps = psi.amplitudes();
    let mut form = C64::new(0.0, 0.0);
    for (i, ai) in amps.iter().enumerate() {
        if *ai == C64::new(0.0, 0.0) {
            continue;
        }
        let mut row_sum = C64::new(0.0, 0.0);
        for (j, aj) in amps.iter().enumerate() {
            if *aj != C64::new(0.0, 0.0) {
                row_sum += rho.entries()[(i, j)] * *aj;
            }
        }
        form += ai.conj() * row_sum;
    }
    Ok(form.re.clamp(0.0, 1.0).sqrt())
}
