//! Minimal dense complex matrices and a cyclic-Jacobi Hermitian
//! eigensolver.
//!
//! The oracle only ever diagonalizes small projected matrices (dimension
//! ≤ 8) or, on the audit path, a few hundred rows. Jacobi keeps every
//! eigenvalue attached to its own eigenvector by construction, which the
//! general-purpose solver this replaced did not guarantee for
//! near-diagonal inputs.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CMat {
    pub n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![ZERO; n * n] }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] += v;
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// (self − other) · scale
    pub fn sub_scaled(&self, other: &CMat, scale: f64) -> CMat {
        assert_eq!(self.n, other.n);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * scale)
            .collect();
        CMat { n: self.n, data }
    }

    /// self · other
    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aik * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// self† · other
    pub fn adjoint_mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for k in 0..n {
            for i in 0..n {
                let aki = self.get(k, i).conj();
                if aki == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += aki * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn off_diagonal_sqr(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    acc += self.get(i, j).norm_sqr();
                }
            }
        }
        acc
    }
}

/// Eigendecomposition of a Hermitian matrix; `vectors` holds the
/// eigenvectors as columns, paired index-for-index with `values`.
#[derive(Debug, Clone)]
pub(crate) struct EigenH {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl EigenH {
    /// Column `j` as a slice-free accessor.
    pub fn vector(&self, j: usize) -> Vec<Complex64> {
        (0..self.vectors.n).map(|i| self.vectors.get(i, j)).collect()
    }
}

/// Cyclic Jacobi for complex Hermitian matrices.
///
/// Each rotation zeroes one off-diagonal pair with the unitary
/// `U = [[c, −s·e^{iφ}], [s·e^{−iφ}, c]]` (φ the phase of the pivot);
/// off-diagonal mass decreases monotonically and quadratically near
/// convergence. Eigenpairs come out sorted by descending eigenvalue.
pub(crate) fn eigen_hermitian(input: &CMat) -> EigenH {
    let n = input.n;
    let mut m = input.clone();
    let mut v = CMat::identity(n);
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let tol = 1e-15 * scale;

    for _sweep in 0..100 {
        if m.off_diagonal_sqr().sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let z = m.get(p, q);
                let zn = z.norm();
                if zn <= 1e-18 * scale {
                    continue;
                }
                let a = m.get(p, p).re;
                let b = m.get(q, q).re;
                let phase = z / zn; // e^{iφ}
                let tau = (b - a) / (2.0 * zn);
                // Small root of t² − 2τt − 1 = 0 in its cancellation-free
                // form; the naive τ − √(τ²+1) loses the pivot for τ ≫ 1.
                let t = -tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let se_m = phase.conj() * s; // s·e^{−iφ}
                let se_p = phase * s; // s·e^{iφ}

                // Column mix: columns p and q of M.
                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, mip * c + miq * se_m);
                    m.set(i, q, miq * c - mip * se_p);
                }
                // Row mix: rows p and q of M.
                for j in 0..n {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, mpj * c + mqj * se_p);
                    m.set(q, j, mqj * c - mpj * se_m);
                }
                // Pivot pair is zero by construction; pin it against
                // rounding drift and keep the diagonal real.
                m.set(p, q, ZERO);
                m.set(q, p, ZERO);
                let dpp = m.get(p, p);
                let dqq = m.get(q, q);
                m.set(p, p, Complex64::new(dpp.re, 0.0));
                m.set(q, q, Complex64::new(dqq.re, 0.0));

                // Accumulate the eigenvector rotation, V := V·U.
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c + viq * se_m);
                    v.set(i, q, viq * c - vip * se_p);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m.get(b, b).re.total_cmp(&m.get(a, a).re));
    let values: Vec<f64> = order.iter().map(|&k| m.get(k, k).re).collect();
    let mut vectors = CMat::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            vectors.set(i, col, v.get(i, k));
        }
    }
    EigenH { values, vectors }
}
