//! Truncated Fock-space and qutrit operator algebra.
//!
//! The composite Hilbert space is `qutrit (x) cavity_1 (x) ... (x) cavity_n`
//! with per-cavity photon truncations `N_l` (occupations `0..N_l-1`). A basis
//! state is addressed by the flat index
//!
//! ```text
//! index = qutrit + 3 * (n_1 + N_1 * (n_2 + N_2 * (n_3 + ...)))
//! ```
//!
//! i.e. the qutrit index varies fastest, then cavity 1, then cavity 2, and so
//! on. This one convention is fixed here and used everywhere else in the
//! crate.
//!
//! All operators are dense complex matrices on the composite space; at the
//! dimensions this crate targets (total dimension <= a few hundred) sparse
//! machinery would buy nothing.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::linalg;
use crate::C64;

/// Number of qutrit levels; fixed by the physical model.
pub const QUTRIT_DIM: usize = 3;

/// Flux-qutrit level: ground, first excited, second excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QutritLevel {
    G,
    E,
    F,
}

impl QutritLevel {
    pub const ALL: [QutritLevel; 3] = [QutritLevel::G, QutritLevel::E, QutritLevel::F];

    /// Matrix index of the level (`G = 0`, `E = 1`, `F = 2`).
    pub fn index(self) -> usize {
        match self {
            QutritLevel::G => 0,
            QutritLevel::E => 1,
            QutritLevel::F => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        match i {
            0 => Some(QutritLevel::G),
            1 => Some(QutritLevel::E),
            2 => Some(QutritLevel::F),
            _ => None,
        }
    }
}

impl std::fmt::Display for QutritLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            QutritLevel::G => "g",
            QutritLevel::E => "e",
            QutritLevel::F => "f",
        };
        write!(f, "{s}")
    }
}

/// Shape of the truncated composite space: qutrit plus `n` cavities with
/// per-cavity Fock truncations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpaceDescriptor {
    cavity_trunc: Vec<usize>,
    total_dim: usize,
}

impl SpaceDescriptor {
    /// Build a descriptor from per-cavity truncation dimensions.
    ///
    /// Every truncation must be at least 2 so the cavity can represent the
    /// logical `|0>` and `|1>` photon states.
    pub fn new(cavity_trunc: Vec<usize>) -> Result<Self> {
        if cavity_trunc.is_empty() {
            return Err(Error::InvalidParams(
                "space needs at least one cavity".into(),
            ));
        }
        if let Some(bad) = cavity_trunc.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidParams(format!(
                "cavity truncation {bad} < 2 cannot hold a logical qubit"
            )));
        }
        let total_dim = QUTRIT_DIM * cavity_trunc.iter().product::<usize>();
        Ok(Self {
            cavity_trunc,
            total_dim,
        })
    }

    /// All cavities share one truncation.
    pub fn uniform(n_cavities: usize, trunc: usize) -> Result<Self> {
        Self::new(vec![trunc; n_cavities])
    }

    pub fn n_cavities(&self) -> usize {
        self.cavity_trunc.len()
    }

    pub fn cavity_trunc(&self) -> &[usize] {
        &self.cavity_trunc
    }

    pub fn qutrit_dim(&self) -> usize {
        QUTRIT_DIM
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Index stride of cavity `l` (1-based) in the flat ordering.
    fn cavity_stride(&self, cavity_index: usize) -> usize {
        QUTRIT_DIM
            * self.cavity_trunc[..cavity_index - 1]
                .iter()
                .product::<usize>()
    }

    fn check_cavity_index(&self, cavity_index: usize) -> Result<()> {
        if cavity_index == 0 || cavity_index > self.n_cavities() {
            return Err(Error::CavityIndexOutOfRange {
                index: cavity_index,
                n_cavities: self.n_cavities(),
            });
        }
        Ok(())
    }

    /// Flat index of a labeled basis state.
    pub fn flat_index(&self, label: &BasisLabel) -> Result<usize> {
        if label.photons.len() != self.n_cavities() {
            return Err(Error::InvalidLabel(format!(
                "label has {} cavities, space has {}",
                label.photons.len(),
                self.n_cavities()
            )));
        }
        let mut idx = 0usize;
        for (l, (&n, &trunc)) in label.photons.iter().zip(&self.cavity_trunc).enumerate().rev() {
            if n >= trunc {
                return Err(Error::InvalidLabel(format!(
                    "occupation {n} exceeds truncation {trunc} in cavity {}",
                    l + 1
                )));
            }
            idx = idx * trunc + n;
        }
        Ok(idx * QUTRIT_DIM + label.qutrit.index())
    }

    /// Basis label of a flat index.
    pub fn label_of(&self, index: usize) -> BasisLabel {
        assert!(index < self.total_dim, "flat index out of range");
        let qutrit = QutritLevel::from_index(index % QUTRIT_DIM).unwrap();
        let mut rest = index / QUTRIT_DIM;
        let photons = self
            .cavity_trunc
            .iter()
            .map(|&trunc| {
                let n = rest % trunc;
                rest /= trunc;
                n
            })
            .collect();
        BasisLabel { qutrit, photons }
    }

    /// Qutrit index of a flat index (cheap decode, no allocation).
    pub fn qutrit_of(&self, index: usize) -> usize {
        index % QUTRIT_DIM
    }

    /// Photon occupation of cavity `l` (1-based) at a flat index.
    pub fn photons_of(&self, index: usize, cavity_index: usize) -> usize {
        (index / self.cavity_stride(cavity_index)) % self.cavity_trunc[cavity_index - 1]
    }

    /// Iterate all basis labels in flat-index order.
    pub fn labels(&self) -> impl Iterator<Item = BasisLabel> + '_ {
        (0..self.total_dim).map(|i| self.label_of(i))
    }
}

/// Label of a composite basis state: qutrit level plus per-cavity photon
/// occupations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisLabel {
    pub qutrit: QutritLevel,
    pub photons: Vec<usize>,
}

impl BasisLabel {
    pub fn new(qutrit: QutritLevel, photons: Vec<usize>) -> Self {
        Self { qutrit, photons }
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let occ: Vec<String> = self.photons.iter().map(|n| n.to_string()).collect();
        write!(f, "|{};{}>", self.qutrit, occ.join(","))
    }
}

/// Dense complex operator on the composite space, with an optional
/// Hermiticity hint. When the hint is set the matrix is verified Hermitian
/// to within 1e-12 at construction.
#[derive(Debug, Clone)]
pub struct Operator {
    matrix: Array2<C64>,
    hermitian: bool,
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: Array2::zeros((dim, dim)),
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: linalg::identity(dim),
            hermitian: true,
        }
    }

    /// Wrap a matrix without a Hermiticity claim.
    pub fn from_matrix(matrix: Array2<C64>) -> Self {
        assert_eq!(matrix.nrows(), matrix.ncols(), "operator must be square");
        Self {
            matrix,
            hermitian: false,
        }
    }

    /// Wrap a matrix that is claimed Hermitian; the claim is checked.
    pub fn hermitian_from_matrix(matrix: Array2<C64>) -> Result<Self> {
        assert_eq!(matrix.nrows(), matrix.ncols(), "operator must be square");
        let defect = linalg::hermiticity_defect(&matrix);
        if defect > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "matrix flagged Hermitian deviates from its adjoint by {defect:.3e}"
            )));
        }
        Ok(Self {
            matrix,
            hermitian: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn is_flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            matrix: linalg::adjoint(&self.matrix),
            hermitian: self.hermitian,
        }
    }

    /// Matrix product `self * other`.
    pub fn dot(&self, other: &Operator) -> Operator {
        Operator::from_matrix(self.matrix.dot(&other.matrix))
    }

    /// Scale by a complex factor.
    pub fn scaled(&self, factor: C64) -> Operator {
        Operator::from_matrix(self.matrix.mapv(|z| z * factor))
    }

    /// Apply to a state vector.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if state.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator dim {} vs state dim {}",
                self.dim(),
                state.dim()
            )));
        }
        Ok(StateVector::new(self.matrix.dot(state.amplitudes())))
    }
}

/// Pure state on the composite space.
#[derive(Debug, Clone)]
pub struct StateVector {
    amplitudes: Array1<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Array1<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amplitudes: Array1::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut Array1<C64> {
        &mut self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Check the unit-norm invariant for states flagged normalized.
    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < 1e-12
    }
}

/// Embed a single-factor operator into the composite space.
///
/// `stride` is the flat-index stride of the factor and `fdim` its dimension;
/// all other factors carry the identity.
fn embed_factor(space: &SpaceDescriptor, stride: usize, fdim: usize, local: &Array2<C64>) -> Array2<C64> {
    let d = space.total_dim();
    let mut out = Array2::zeros((d, d));
    for col in 0..d {
        let f = (col / stride) % fdim;
        for fp in 0..fdim {
            let v = local[(fp, f)];
            if v != C64::new(0.0, 0.0) {
                let row = col + fp * stride - f * stride;
                out[(row, col)] = v;
            }
        }
    }
    out
}

/// Photon annihilation operator of cavity `cavity_index` (1-based), embedded
/// in the composite space: `<n-1| a |n> = sqrt(n)` within the truncation.
pub fn annihilation_op(space: &SpaceDescriptor, cavity_index: usize) -> Result<Operator> {
    space.check_cavity_index(cavity_index)?;
    let trunc = space.cavity_trunc[cavity_index - 1];
    let mut local = Array2::zeros((trunc, trunc));
    for n in 1..trunc {
        local[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    let stride = space.cavity_stride(cavity_index);
    Ok(Operator::from_matrix(embed_factor(
        space, stride, trunc, &local,
    )))
}

/// Photon creation operator of cavity `cavity_index` (1-based).
pub fn creation_op(space: &SpaceDescriptor, cavity_index: usize) -> Result<Operator> {
    Ok(annihilation_op(space, cavity_index)?.adjoint())
}

/// Photon number operator of cavity `cavity_index` (1-based); diagonal.
pub fn number_op(space: &SpaceDescriptor, cavity_index: usize) -> Result<Operator> {
    space.check_cavity_index(cavity_index)?;
    let d = space.total_dim();
    let mut m = Array2::zeros((d, d));
    for i in 0..d {
        m[(i, i)] = C64::new(space.photons_of(i, cavity_index) as f64, 0.0);
    }
    Ok(Operator {
        matrix: m,
        hermitian: true,
    })
}

/// Qutrit transition operator `|bra><ket|` embedded in the composite space.
pub fn qutrit_op(space: &SpaceDescriptor, bra: QutritLevel, ket: QutritLevel) -> Operator {
    let mut local = Array2::zeros((QUTRIT_DIM, QUTRIT_DIM));
    local[(bra.index(), ket.index())] = C64::new(1.0, 0.0);
    let m = embed_factor(space, 1, QUTRIT_DIM, &local);
    Operator {
        hermitian: bra == ket,
        matrix: m,
    }
}

/// Projector on one qutrit level, `|level><level|`.
pub fn qutrit_projector(space: &SpaceDescriptor, level: QutritLevel) -> Operator {
    qutrit_op(space, level, level)
}

/// Unit basis vector for a label.
pub fn basis_state(space: &SpaceDescriptor, label: &BasisLabel) -> Result<StateVector> {
    let idx = space.flat_index(label)?;
    let mut v = StateVector::zeros(space.total_dim());
    v.amplitudes_mut()[idx] = C64::new(1.0, 0.0);
    Ok(v)
}
