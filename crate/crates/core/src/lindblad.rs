//! Master-equation integration for the lossy cavity-qutrit system.
//!
//! The generator is
//!
//! ```text
//! drho/dt = -i [H(t), rho]
//!           + sum_l kappa_l D[a_l]
//!           + gamma_eg D[|g><e|] + gamma_fe D[|e><f|] + gamma_fg D[|g><f|]
//!           + sum_{j=e,f} gamma_phi_j (s_jj rho s_jj - s_jj rho/2 - rho s_jj/2)
//! ```
//!
//! with `D[x](rho) = x rho x^dag - x^dag x rho / 2 - rho x^dag x / 2`. The
//! dephasing bracket is `D[s_jj]` since the projectors are idempotent, and
//! the integrator treats both lists uniformly.
//!
//! The public [`rhs`] is the plain dense-matrix transcription of the
//! generator. [`evolve`] integrates with a kernel that applies every
//! coupling operator through its nonzero entries instead of full matrix
//! products; the two routes are checked against each other in the tests.
//! The superoperator is never materialized.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::hamiltonian::RotatingTermHamiltonian;
use crate::hilbert::{
    annihilation_op, qutrit_op, qutrit_projector, Operator, QutritLevel, SpaceDescriptor,
    StateVector,
};
use crate::linalg;
use crate::C64;

/// Decoherence rates in 1/s.
#[derive(Debug, Clone)]
pub struct DecoherenceParams {
    /// Photon decay rate of each cavity.
    pub kappa: Vec<f64>,
    /// Relaxation `|e> -> |g>`.
    pub gamma_eg: f64,
    /// Relaxation `|f> -> |e>`.
    pub gamma_fe: f64,
    /// Relaxation `|f> -> |g>`.
    pub gamma_fg: f64,
    /// Dephasing of `|e>`.
    pub gamma_phi_e: f64,
    /// Dephasing of `|f>`.
    pub gamma_phi_f: f64,
}

impl DecoherenceParams {
    /// The closed-system limit: every rate zero.
    pub fn zero(n_cavities: usize) -> Self {
        Self {
            kappa: vec![0.0; n_cavities],
            gamma_eg: 0.0,
            gamma_fe: 0.0,
            gamma_fg: 0.0,
            gamma_phi_e: 0.0,
            gamma_phi_f: 0.0,
        }
    }

    /// Derive all qutrit rates from a single time scale `T` (microseconds):
    /// relaxation times `5T`, `2T`, `T` for the `e-g`, `f-e`, `f-g` channels
    /// and dephasing time `T` for both excited levels. Every cavity gets the
    /// same photon lifetime `kappa_inv_us`.
    pub fn from_t_scale(t_scale_us: f64, kappa_inv_us: f64, n_cavities: usize) -> Result<Self> {
        if t_scale_us <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "decoherence time scale must be positive, got {t_scale_us} us"
            )));
        }
        if kappa_inv_us <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "cavity lifetime must be positive, got {kappa_inv_us} us"
            )));
        }
        let t = t_scale_us * 1e-6;
        Ok(Self {
            kappa: vec![1.0 / (kappa_inv_us * 1e-6); n_cavities],
            gamma_eg: 1.0 / (5.0 * t),
            gamma_fe: 1.0 / (2.0 * t),
            gamma_fg: 1.0 / t,
            gamma_phi_e: 1.0 / t,
            gamma_phi_f: 1.0 / t,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let all = self
            .kappa
            .iter()
            .chain([
                &self.gamma_eg,
                &self.gamma_fe,
                &self.gamma_fg,
                &self.gamma_phi_e,
                &self.gamma_phi_f,
            ]);
        for &r in all {
            if !(r >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "decoherence rates must be nonnegative, got {r}"
                )));
            }
        }
        Ok(())
    }
}

/// Collapse and dephasing channels, each as a `(rate, operator)` pair on the
/// composite space. Zero-rate channels are omitted.
#[derive(Debug, Clone)]
pub struct Dissipators {
    pub collapse: Vec<(f64, Operator)>,
    pub dephasing: Vec<(f64, Operator)>,
}

impl Dissipators {
    pub fn none() -> Self {
        Self {
            collapse: Vec::new(),
            dephasing: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.collapse.is_empty() && self.dephasing.is_empty()
    }

    fn channels(&self) -> impl Iterator<Item = &(f64, Operator)> {
        self.collapse.iter().chain(self.dephasing.iter())
    }
}

/// Build the dissipator lists: one photon-decay channel per cavity, the three
/// qutrit relaxation channels, and the two dephasing projector channels.
pub fn build_dissipators(dec: &DecoherenceParams, space: &SpaceDescriptor) -> Result<Dissipators> {
    dec.validate()?;
    if dec.kappa.len() != space.n_cavities() {
        return Err(Error::DimensionMismatch(format!(
            "kappa has {} entries, space has {} cavities",
            dec.kappa.len(),
            space.n_cavities()
        )));
    }
    let mut collapse = Vec::new();
    for (l, &kappa) in dec.kappa.iter().enumerate() {
        if kappa > 0.0 {
            collapse.push((kappa, annihilation_op(space, l + 1)?));
        }
    }
    let relaxations = [
        (dec.gamma_eg, QutritLevel::G, QutritLevel::E),
        (dec.gamma_fe, QutritLevel::E, QutritLevel::F),
        (dec.gamma_fg, QutritLevel::G, QutritLevel::F),
    ];
    for (rate, bra, ket) in relaxations {
        if rate > 0.0 {
            collapse.push((rate, qutrit_op(space, bra, ket)));
        }
    }
    let mut dephasing = Vec::new();
    for (rate, level) in [
        (dec.gamma_phi_e, QutritLevel::E),
        (dec.gamma_phi_f, QutritLevel::F),
    ] {
        if rate > 0.0 {
            dephasing.push((rate, qutrit_projector(space, level)));
        }
    }
    Ok(Dissipators {
        collapse,
        dephasing,
    })
}

/// Trace-one Hermitian positive-semidefinite state of the composite system.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: Array2<C64>,
}

impl DensityMatrix {
    /// Projector onto a pure state.
    pub fn from_pure(state: &StateVector) -> Self {
        let d = state.dim();
        let mut m = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = state.amplitudes()[i] * state.amplitudes()[j].conj();
            }
        }
        Self { entries: m }
    }

    /// Wrap a matrix, checking trace and Hermiticity.
    pub fn from_matrix(entries: Array2<C64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch(
                "density matrix must be square".into(),
            ));
        }
        let tr = linalg::trace(&entries);
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::InvalidParams(format!(
                "density matrix trace {tr} is not 1"
            )));
        }
        if linalg::hermiticity_defect(&entries) > 1e-10 {
            return Err(Error::InvalidParams(
                "density matrix is not Hermitian".into(),
            ));
        }
        Ok(Self { entries })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = Array2::zeros((dim, dim));
        let p = C64::new(1.0 / dim as f64, 0.0);
        for i in 0..dim {
            m[(i, i)] = p;
        }
        Self { entries: m }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.entries)
    }

    /// `Tr rho^2`; equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Smallest eigenvalue; slightly negative values witness integration
    /// error and are reported rather than hidden.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_eigenvalues(&self.entries)
            .first()
            .copied()
            .unwrap_or(0.0)
    }

    /// Population of one basis state.
    pub fn population(&self, index: usize) -> f64 {
        self.entries[(index, index)].re
    }

    /// Full invariant check: unit trace, Hermitian, positive semidefinite up
    /// to 1e-8.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
            return Err(Error::InvalidParams(format!("trace {tr} is not 1")));
        }
        if linalg::hermiticity_defect(&self.entries) > 1e-10 {
            return Err(Error::InvalidParams("not Hermitian".into()));
        }
        let min = self.min_eigenvalue();
        if min < -1e-8 {
            return Err(Error::InvalidParams(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }
}

/// Integration method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverMethod {
    FixedRk4,
    AdaptiveRk,
}

/// Integrator settings.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub method: SolverMethod,
    /// Fixed step (seconds). The default, 0.5 ps, gives ~300 samples per
    /// period of the fastest rotating term of the reference system.
    pub dt: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step the adaptive method may take.
    pub max_step: f64,
    /// Number of trajectory samples kept (decimated; the final state is
    /// always sampled).
    pub n_samples: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: SolverMethod::FixedRk4,
            dt: 0.5e-12,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_step: 10.0e-12,
            n_samples: 200,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParams(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.rel_tol > 0.0) || !(self.abs_tol > 0.0) {
            return Err(Error::InvalidParams("tolerances must be > 0".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParams("max_step must be > 0".into()));
        }
        Ok(())
    }
}

/// One dissipator application, plain dense route:
/// `rate (xi rho xi^dag - xi^dag xi rho / 2 - rho xi^dag xi / 2)`.
fn dissipator_action(rate: f64, xi: &Array2<C64>, rho: &Array2<C64>) -> Array2<C64> {
    let xi_dag = linalg::adjoint(xi);
    let gram = xi_dag.dot(xi);
    let gain = xi.dot(rho).dot(&xi_dag);
    let loss = &gram.dot(rho) + &rho.dot(&gram);
    (gain - loss * C64::new(0.5, 0.0)) * C64::new(rate, 0.0)
}

/// Right-hand side of the master equation at time `t`, dense route.
pub fn rhs(
    rho: &DensityMatrix,
    t: f64,
    h: &RotatingTermHamiltonian,
    diss: &Dissipators,
) -> Result<Array2<C64>> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs Hamiltonian dim {}",
            rho.dim(),
            h.dim()
        )));
    }
    let ht = h.assemble_at(t);
    let hm = ht.matrix();
    let rm = rho.entries();
    let i = C64::new(0.0, 1.0);
    let mut out = -i * (&hm.dot(rm) - &rm.dot(hm));
    for (rate, xi) in diss.channels() {
        if xi.dim() != rho.dim() {
            return Err(Error::DimensionMismatch(
                "dissipator dimension differs from state".into(),
            ));
        }
        out += &dissipator_action(*rate, xi.matrix(), rm);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// entry-based kernel
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Entry {
    row: usize,
    col: usize,
    val: C64,
}

fn entries_of(m: &Array2<C64>) -> Vec<Entry> {
    let mut out = Vec::new();
    for ((row, col), &val) in m.indexed_iter() {
        if val != C64::new(0.0, 0.0) {
            out.push(Entry { row, col, val });
        }
    }
    out
}

/// `out[row, :] += s * val * rho[col, :]` for one entry.
#[inline]
fn axpy_row(out: &mut [C64], src: &[C64], dim: usize, e: &Entry, s: C64) {
    let w = s * e.val;
    let dst = &mut out[e.row * dim..(e.row + 1) * dim];
    let from = &src[e.col * dim..(e.col + 1) * dim];
    for (o, x) in dst.iter_mut().zip(from) {
        *o += w * *x;
    }
}

/// `out[:, dest_col] += s * src[:, src_col]`.
#[inline]
fn axpy_col(out: &mut [C64], src: &[C64], dim: usize, dest_col: usize, src_col: usize, s: C64) {
    let mut io = dest_col;
    let mut is = src_col;
    for _ in 0..dim {
        out[io] += s * src[is];
        io += dim;
        is += dim;
    }
}

struct CollapseKernel {
    rate: f64,
    xi: Vec<Entry>,
    gram: Vec<Entry>,
}

/// Precomputed entry lists for the generator. The coupling operators touch
/// O(dim) basis pairs each, so applying them entrywise replaces full matrix
/// products in the hot loop.
struct Kernel {
    dim: usize,
    static_entries: Vec<Entry>,
    terms: Vec<(Vec<Entry>, f64)>,
    collapses: Vec<CollapseKernel>,
}

impl Kernel {
    fn new(h: &RotatingTermHamiltonian, diss: &Dissipators) -> Kernel {
        let dim = h.dim();
        let static_entries = entries_of(h.static_part().matrix());
        let terms = h
            .terms()
            .iter()
            .map(|t| (entries_of(t.operator.matrix()), t.frequency))
            .collect();
        let collapses = diss
            .channels()
            .map(|(rate, xi)| {
                let m = xi.matrix();
                let gram = linalg::adjoint(m).dot(m);
                CollapseKernel {
                    rate: *rate,
                    xi: entries_of(m),
                    gram: entries_of(&gram),
                }
            })
            .collect();
        Kernel {
            dim,
            static_entries,
            terms,
            collapses,
        }
    }

    /// `out = -i [H(t), rho] + dissipators(rho)`, with `scratch` as work
    /// space. `rho` must be Hermitian for the one-sided commutator trick.
    fn eval(&self, t: f64, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let d = self.dim;
        // scratch = H(t) rho
        scratch.fill(C64::new(0.0, 0.0));
        let one = C64::new(1.0, 0.0);
        for e in &self.static_entries {
            axpy_row(scratch, rho, d, e, one);
        }
        for (entries, freq) in &self.terms {
            let phase = C64::from_polar(1.0, -freq * t);
            let phase_c = phase.conj();
            for e in entries {
                axpy_row(scratch, rho, d, e, phase);
                // h.c. partner: entry (col, row, conj val)
                let adj = Entry {
                    row: e.col,
                    col: e.row,
                    val: e.val.conj(),
                };
                axpy_row(scratch, rho, d, &adj, phase_c);
            }
        }
        // out = -i (scratch - scratch^dag); rho H = (H rho)^dag for Hermitian rho
        let minus_i = C64::new(0.0, -1.0);
        for i in 0..d {
            for j in 0..d {
                let m = scratch[i * d + j];
                let mt = scratch[j * d + i].conj();
                out[i * d + j] = minus_i * (m - mt);
            }
        }
        // dissipators
        for ck in &self.collapses {
            // scratch = xi rho
            scratch.fill(C64::new(0.0, 0.0));
            for e in &ck.xi {
                axpy_row(scratch, rho, d, e, one);
            }
            // out += rate (xi rho) xi^dag
            let rate = C64::new(ck.rate, 0.0);
            for e in &ck.xi {
                axpy_col(out, scratch, d, e.row, e.col, rate * e.val.conj());
            }
            // out -= rate/2 (gram rho + rho gram)
            let half = C64::new(-0.5 * ck.rate, 0.0);
            for e in &ck.gram {
                axpy_row(out, rho, d, e, half);
                axpy_col(out, rho, d, e.col, e.row, half * e.val);
            }
        }
    }
}

/// One decimated trajectory sample; all fields derive from the diagonal of
/// the state.
#[derive(Debug, Clone, Copy)]
pub struct TrajectorySample {
    pub t: f64,
    /// `|tr rho - 1|` at the sample time.
    pub trace_dev: f64,
    /// Total population of the qutrit `|e>` and `|f>` levels.
    pub qutrit_excited_pop: f64,
    /// Population outside the logical subspace (photon number >= 2 anywhere
    /// or qutrit not in `|g>`).
    pub leakage_pop: f64,
}

/// Result of an integration.
#[derive(Debug, Clone)]
pub struct EvolveOutput {
    pub state: DensityMatrix,
    /// Largest `|tr rho - 1|` seen at any step.
    pub max_trace_dev: f64,
    /// Number of accepted steps.
    pub steps: usize,
    pub samples: Vec<TrajectorySample>,
}

struct DiagMasks {
    excited: Vec<usize>,
    logical: Vec<usize>,
}

impl DiagMasks {
    fn new(space: &SpaceDescriptor) -> Self {
        let mut excited = Vec::new();
        let mut logical = Vec::new();
        for i in 0..space.total_dim() {
            if space.qutrit_of(i) != QutritLevel::G.index() {
                excited.push(i);
            } else if (1..=space.n_cavities()).all(|l| space.photons_of(i, l) <= 1) {
                logical.push(i);
            }
        }
        Self { excited, logical }
    }

    fn sample(&self, t: f64, rho: &[C64], dim: usize) -> TrajectorySample {
        let diag = |i: usize| rho[i * dim + i].re;
        let trace: f64 = (0..dim).map(diag).sum();
        let excited: f64 = self.excited.iter().map(|&i| diag(i)).sum();
        let logical: f64 = self.logical.iter().map(|&i| diag(i)).sum();
        TrajectorySample {
            t,
            trace_dev: (trace - 1.0).abs(),
            qutrit_excited_pop: excited,
            leakage_pop: (1.0 - logical).max(0.0),
        }
    }
}

fn trace_of(rho: &[C64], dim: usize) -> C64 {
    (0..dim).map(|i| rho[i * dim + i]).sum()
}

fn symmetrize(rho: &mut [C64], dim: usize) {
    for i in 0..dim {
        for j in (i + 1)..dim {
            let a = rho[i * dim + j];
            let b = rho[j * dim + i];
            let avg = (a + b.conj()) * 0.5;
            rho[i * dim + j] = avg;
            rho[j * dim + i] = avg.conj();
        }
        let d = rho[i * dim + i];
        rho[i * dim + i] = C64::new(d.re, 0.0);
    }
}

/// Integrate the master equation from `rho0` to `t_final`.
///
/// The state is re-symmetrized after every step, the trace deviation is
/// tracked along the whole trajectory, and non-finite values abort with a
/// solver error.
pub fn evolve(
    rho0: &DensityMatrix,
    t_final: f64,
    h: &RotatingTermHamiltonian,
    diss: &Dissipators,
    opts: &SolverOptions,
    space: &SpaceDescriptor,
) -> Result<EvolveOutput> {
    opts.validate()?;
    if rho0.dim() != h.dim() || rho0.dim() != space.total_dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {}, Hamiltonian dim {}, space dim {}",
            rho0.dim(),
            h.dim(),
            space.total_dim()
        )));
    }
    for (_, xi) in diss.channels() {
        if xi.dim() != rho0.dim() {
            return Err(Error::DimensionMismatch(
                "dissipator dimension differs from state".into(),
            ));
        }
    }
    if !(t_final >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "t_final must be nonnegative, got {t_final}"
        )));
    }
    match opts.method {
        SolverMethod::FixedRk4 => evolve_fixed_rk4(rho0, t_final, h, diss, opts, space),
        SolverMethod::AdaptiveRk => evolve_adaptive(rho0, t_final, h, diss, opts, space),
    }
}

fn evolve_fixed_rk4(
    rho0: &DensityMatrix,
    t_final: f64,
    h: &RotatingTermHamiltonian,
    diss: &Dissipators,
    opts: &SolverOptions,
    space: &SpaceDescriptor,
) -> Result<EvolveOutput> {
    let kernel = Kernel::new(h, diss);
    let masks = DiagMasks::new(space);
    let dim = rho0.dim();
    let len = dim * dim;

    let mut rho = rho0.entries().clone().into_raw_vec_and_offset().0;
    let mut k = vec![C64::new(0.0, 0.0); len];
    let mut acc = vec![C64::new(0.0, 0.0); len];
    let mut stage = vec![C64::new(0.0, 0.0); len];
    let mut scratch = vec![C64::new(0.0, 0.0); len];

    let n_full = (t_final / opts.dt).floor() as usize;
    let rem = t_final - n_full as f64 * opts.dt;
    let has_rem = rem > opts.dt * 1e-9;
    let total_steps = n_full + usize::from(has_rem);

    let sample_stride = (total_steps / opts.n_samples.max(1)).max(1);
    let mut samples = Vec::with_capacity(opts.n_samples + 2);
    samples.push(masks.sample(0.0, &rho, dim));
    let mut max_trace_dev = samples[0].trace_dev;

    let do_step = |step_index: usize,
                       t0: f64,
                       hstep: f64,
                       rho: &mut Vec<C64>,
                       k: &mut Vec<C64>,
                       acc: &mut Vec<C64>,
                       stage: &mut Vec<C64>,
                       scratch: &mut Vec<C64>|
     -> Result<()> {
        let half = hstep * 0.5;
        kernel.eval(t0, rho, k, scratch);
        acc.copy_from_slice(k);
        for ((s, r), kv) in stage.iter_mut().zip(rho.iter()).zip(k.iter()) {
            *s = *r + *kv * half;
        }
        kernel.eval(t0 + half, stage, k, scratch);
        for (a, kv) in acc.iter_mut().zip(k.iter()) {
            *a += *kv * 2.0;
        }
        for ((s, r), kv) in stage.iter_mut().zip(rho.iter()).zip(k.iter()) {
            *s = *r + *kv * half;
        }
        kernel.eval(t0 + half, stage, k, scratch);
        for (a, kv) in acc.iter_mut().zip(k.iter()) {
            *a += *kv * 2.0;
        }
        for ((s, r), kv) in stage.iter_mut().zip(rho.iter()).zip(k.iter()) {
            *s = *r + *kv * hstep;
        }
        kernel.eval(t0 + hstep, stage, k, scratch);
        for (a, kv) in acc.iter_mut().zip(k.iter()) {
            *a += *kv;
        }
        let w = hstep / 6.0;
        for (r, a) in rho.iter_mut().zip(acc.iter()) {
            *r += *a * w;
        }
        symmetrize(rho, dim);
        let tr = trace_of(rho, dim);
        if !tr.re.is_finite() || !tr.im.is_finite() {
            return Err(Error::Solver(format!(
                "non-finite state at step {step_index} (t = {:.3e} s)",
                t0 + hstep
            )));
        }
        Ok(())
    };

    for i in 0..n_full {
        let t0 = i as f64 * opts.dt;
        do_step(i, t0, opts.dt, &mut rho, &mut k, &mut acc, &mut stage, &mut scratch)?;
        let dev = (trace_of(&rho, dim).re - 1.0).abs();
        max_trace_dev = max_trace_dev.max(dev);
        if (i + 1) % sample_stride == 0 && i + 1 < total_steps {
            samples.push(masks.sample((i + 1) as f64 * opts.dt, &rho, dim));
        }
    }
    if has_rem {
        do_step(
            n_full,
            n_full as f64 * opts.dt,
            rem,
            &mut rho,
            &mut k,
            &mut acc,
            &mut stage,
            &mut scratch,
        )?;
        let dev = (trace_of(&rho, dim).re - 1.0).abs();
        max_trace_dev = max_trace_dev.max(dev);
    }
    samples.push(masks.sample(t_final, &rho, dim));

    let entries = Array2::from_shape_vec((dim, dim), rho)
        .expect("state buffer has matrix shape");
    Ok(EvolveOutput {
        state: DensityMatrix { entries },
        max_trace_dev,
        steps: total_steps,
        samples,
    })
}

/// Dormand-Prince 5(4) coefficients.
mod dopri {
    pub const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    pub const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    /// 5th-order weights (same as the last A row; the 7th stage weight is 0).
    pub const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    /// Error weights `b5 - b4`.
    pub const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
}

fn evolve_adaptive(
    rho0: &DensityMatrix,
    t_final: f64,
    h: &RotatingTermHamiltonian,
    diss: &Dissipators,
    opts: &SolverOptions,
    space: &SpaceDescriptor,
) -> Result<EvolveOutput> {
    let kernel = Kernel::new(h, diss);
    let masks = DiagMasks::new(space);
    let dim = rho0.dim();
    let len = dim * dim;

    let mut rho = rho0.entries().clone().into_raw_vec_and_offset().0;
    let mut stages: Vec<Vec<C64>> = (0..7).map(|_| vec![C64::new(0.0, 0.0); len]).collect();
    let mut work = vec![C64::new(0.0, 0.0); len];
    let mut scratch = vec![C64::new(0.0, 0.0); len];
    let mut candidate = vec![C64::new(0.0, 0.0); len];

    let mut t = 0.0_f64;
    let mut hstep = opts.max_step.min(t_final.max(f64::MIN_POSITIVE));
    let h_floor = (t_final * 1e-12).max(1e-18);
    let mut steps = 0usize;
    let mut max_trace_dev = 0.0_f64;
    let mut samples = Vec::new();
    samples.push(masks.sample(0.0, &rho, dim));
    let sample_dt = t_final / opts.n_samples.max(1) as f64;
    let mut next_sample = sample_dt;

    while t < t_final * (1.0 - 1e-15) {
        hstep = hstep.min(t_final - t).min(opts.max_step);
        // seven stages
        kernel.eval(t, &rho, &mut stages[0], &mut scratch);
        for s in 1..7 {
            work.copy_from_slice(&rho);
            let row = &dopri::A[s - 1];
            for (j, &a) in row.iter().enumerate().take(s) {
                if a != 0.0 {
                    let w = a * hstep;
                    let stage_j = &stages[j];
                    for (wk, kv) in work.iter_mut().zip(stage_j.iter()) {
                        *wk += *kv * w;
                    }
                }
            }
            let ts = t + dopri::C[s - 1] * hstep;
            let (_, rest) = stages.split_at_mut(s);
            kernel.eval(ts, &work, &mut rest[0], &mut scratch);
        }
        // 5th-order candidate and embedded error
        candidate.copy_from_slice(&rho);
        let mut err_max = 0.0_f64;
        for idx in 0..len {
            let mut acc5 = C64::new(0.0, 0.0);
            let mut errv = C64::new(0.0, 0.0);
            for s in 0..7 {
                let k = stages[s][idx];
                if dopri::B5[s] != 0.0 {
                    acc5 += k * dopri::B5[s];
                }
                if dopri::E[s] != 0.0 {
                    errv += k * dopri::E[s];
                }
            }
            let newv = rho[idx] + acc5 * hstep;
            candidate[idx] = newv;
            let scale = opts.abs_tol + opts.rel_tol * rho[idx].norm().max(newv.norm());
            err_max = err_max.max((errv.norm() * hstep) / scale);
        }
        if !err_max.is_finite() {
            return Err(Error::Solver(format!(
                "non-finite error estimate at t = {t:.3e} s"
            )));
        }
        if err_max <= 1.0 {
            rho.copy_from_slice(&candidate);
            symmetrize(&mut rho, dim);
            t += hstep;
            steps += 1;
            let tr = trace_of(&rho, dim);
            if !tr.re.is_finite() {
                return Err(Error::Solver(format!("non-finite state at t = {t:.3e} s")));
            }
            max_trace_dev = max_trace_dev.max((tr.re - 1.0).abs());
            if t >= next_sample && t < t_final {
                samples.push(masks.sample(t, &rho, dim));
                next_sample += sample_dt;
            }
        }
        let grow = 0.9 * err_max.powf(-0.2);
        hstep *= grow.clamp(0.2, 5.0);
        if err_max > 1.0 && hstep < h_floor {
            return Err(Error::Solver(format!(
                "adaptive step fell below {h_floor:.3e} s at t = {t:.3e} s without meeting tolerance (err ratio {err_max:.3e})"
            )));
        }
    }
    samples.push(masks.sample(t_final, &rho, dim));

    let entries = Array2::from_shape_vec((dim, dim), rho)
        .expect("state buffer has matrix shape");
    Ok(EvolveOutput {
        state: DensityMatrix { entries },
        max_trace_dev,
        steps,
        samples,
    })
}

/// Closed-system companion: integrate the Schroedinger equation for a pure
/// state under the same rotating-term Hamiltonian, fixed-step RK4. Used for
/// effective-model validation where no dissipation is present.
pub fn schrodinger_evolve(
    psi0: &StateVector,
    t_final: f64,
    h: &RotatingTermHamiltonian,
    dt: f64,
) -> Result<StateVector> {
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dim {} vs Hamiltonian dim {}",
            psi0.dim(),
            h.dim()
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParams(format!("dt must be > 0, got {dt}")));
    }
    let dim = psi0.dim();
    let static_entries = entries_of(h.static_part().matrix());
    let terms: Vec<(Vec<Entry>, f64)> = h
        .terms()
        .iter()
        .map(|t| (entries_of(t.operator.matrix()), t.frequency))
        .collect();
    let minus_i = C64::new(0.0, -1.0);

    let apply = |t: f64, psi: &[C64], out: &mut Vec<C64>| {
        out.fill(C64::new(0.0, 0.0));
        for e in &static_entries {
            out[e.row] += e.val * psi[e.col];
        }
        for (entries, freq) in &terms {
            let phase = C64::from_polar(1.0, -freq * t);
            for e in entries {
                out[e.row] += phase * e.val * psi[e.col];
                out[e.col] += (phase * e.val).conj() * psi[e.row];
            }
        }
        for v in out.iter_mut() {
            *v *= minus_i;
        }
    };

    let mut psi: Vec<C64> = psi0.amplitudes().to_vec();
    let mut k = vec![C64::new(0.0, 0.0); dim];
    let mut acc = vec![C64::new(0.0, 0.0); dim];
    let mut stage = vec![C64::new(0.0, 0.0); dim];

    let n_full = (t_final / dt).floor() as usize;
    let rem = t_final - n_full as f64 * dt;
    let has_rem = rem > dt * 1e-9;
    let step = |t0: f64, hstep: f64, psi: &mut Vec<C64>, k: &mut Vec<C64>, acc: &mut Vec<C64>, stage: &mut Vec<C64>| {
        let half = hstep * 0.5;
        apply(t0, psi, k);
        acc.copy_from_slice(k);
        for ((s, p), kv) in stage.iter_mut().zip(psi.iter()).zip(k.iter()) {
            *s = *p + *kv * half;
        }
        apply(t0 + half, stage, k);
        for (a, kv) in acc.iter_mut().zip(k.iter()) {
            *a += *kv * 2.0;
        }
        for ((s, p), kv) in stage.iter_mut().zip(psi.iter()).zip(k.iter()) {
            *s = *p + *kv * half;
        }
        apply(t0 + half, stage, k);
        for (a, kv) in acc.iter_mut().zip(k.iter()) {
            *a += *kv * 2.0;
        }
        for ((s, p), kv) in stage.iter_mut().zip(psi.iter()).zip(k.iter()) {
            *s = *p + *kv * hstep;
        }
        apply(t0 + hstep, stage, k);
        for (a, kv) in acc.iter_mut().zip(k.iter()) {
            *a += *kv;
        }
        let w = hstep / 6.0;
        for (p, a) in psi.iter_mut().zip(acc.iter()) {
            *p += *a * w;
        }
    };
    for i in 0..n_full {
        step(i as f64 * dt, dt, &mut psi, &mut k, &mut acc, &mut stage);
    }
    if has_rem {
        step(n_full as f64 * dt, rem, &mut psi, &mut k, &mut acc, &mut stage);
    }
    let out = StateVector::new(Array1::from_vec(psi));
    if !out.norm().is_finite() {
        return Err(Error::Solver("non-finite state in closed-system evolution".into()));
    }
    Ok(out)
}
