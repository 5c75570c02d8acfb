//! Small dense complex linear-algebra helpers.
//!
//! Everything here operates on `ndarray::Array2<Complex64>` at the modest
//! dimensions this crate works with (tens to a few hundred), so plain
//! O(n^3) dense algorithms are used throughout.

use ndarray::{Array1, Array2};

use crate::C64;

/// Conjugate transpose.
pub fn adjoint(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

/// Trace.
pub fn trace(m: &Array2<C64>) -> C64 {
    m.diag().iter().sum()
}

/// Largest elementwise modulus.
pub fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    assert_eq!(a.dim(), b.dim(), "max_abs_diff: shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest deviation from Hermiticity, `max |m - m^dagger|`.
pub fn hermiticity_defect(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Frobenius norm.
pub fn frobenius(m: &Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Complex identity matrix.
pub fn identity(dim: usize) -> Array2<C64> {
    Array2::from_diag(&Array1::from_elem(dim, C64::new(1.0, 0.0)))
}

/// Eigenvalues of a Hermitian matrix, ascending, via cyclic complex Jacobi
/// rotations. Input is assumed Hermitian; only the upper triangle drives the
/// rotations.
pub fn hermitian_eigenvalues(m: &Array2<C64>) -> Vec<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "hermitian_eigenvalues: matrix must be square");
    if n == 0 {
        return Vec::new();
    }
    let mut a = m.clone();
    let scale = frobenius(&a).max(1.0);
    let tol = 1e-14 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= tol * 1e-3 {
                    continue;
                }
                let phase = apq / r;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                let c = theta.cos();
                let s = theta.sin();
                // Unitary J: identity except J[p,p]=c, J[p,q]=-s*phase,
                // J[q,p]=s*conj(phase), J[q,q]=c; apply a <- J^dagger a J.
                let sp = C64::new(s, 0.0) * phase;
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = c * aip + sp.conj() * aiq;
                    a[(i, q)] = -sp * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = c * apj + sp * aqj;
                    a[(q, j)] = -sp.conj() * apj + c * aqj;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = a.diag().iter().map(|z| z.re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = array![
            [c(3.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-1.0, 0.0)]
        ];
        let e = hermitian_eigenvalues(&m);
        assert!((e[0] + 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_complex_2x2() {
        // [[1, i], [-i, 1]] has eigenvalues {0, 2}.
        let m = array![[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, -1.0), c(1.0, 0.0)]];
        let e = hermitian_eigenvalues(&m);
        assert!(e[0].abs() < 1e-12);
        assert!((e[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_known_2x2() {
        // [[2, 1+i], [1-i, 3]]: eigenvalues (5 +- 3)/2 = {1, 4}.
        let m = array![[c(2.0, 0.0), c(1.0, 1.0)], [c(1.0, -1.0), c(3.0, 0.0)]];
        let e = hermitian_eigenvalues(&m);
        assert!((e[0] - 1.0).abs() < 1e-12);
        assert!((e[1] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_sums_match_trace_and_frobenius() {
        // Deterministic pseudo-random Hermitian matrix.
        let n = 12;
        let mut seed = 0x2545f4914f6cdd1d_u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            m[(i, i)] = c(next(), 0.0);
            for j in (i + 1)..n {
                let v = c(next(), next());
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        let e = hermitian_eigenvalues(&m);
        let tr: f64 = e.iter().sum();
        let fr2: f64 = e.iter().map(|x| x * x).sum();
        assert!((tr - trace(&m).re).abs() < 1e-10);
        assert!((fr2 - frobenius(&m).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn shift_moves_eigenvalues() {
        let m = array![[c(2.0, 0.0), c(1.0, 1.0)], [c(1.0, -1.0), c(3.0, 0.0)]];
        let shifted = &m + &(identity(2) * c(5.0, 0.0));
        let e0 = hermitian_eigenvalues(&m);
        let e1 = hermitian_eigenvalues(&shifted);
        for (a, b) in e0.iter().zip(&e1) {
            assert!((a + 5.0 - b).abs() < 1e-12);
        }
    }
}
