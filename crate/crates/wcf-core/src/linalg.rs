//! Small dense complex linear algebra: just enough for the certificate
//! oracles and the strategy search. Matrices are row-major and square.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

pub type C64 = num_complex::Complex<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        CMatrix { dim, data: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// Outer product v v† as a matrix.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, t: C64) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(i, j) * t)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
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

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len());
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// Largest column-orthonormality defect, i.e. max |(U†U − I)_{ij}|.
    pub fn max_isometry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let mut dot = ZERO;
                for k in 0..n {
                    dot += self.get(k, i).conj() * self.get(k, j);
                }
                if i == j {
                    dot -= ONE;
                }
                let d = dot.norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Eigendecomposition of a Hermitian matrix: `a == vectors · diag(values) · vectors†`.
#[derive(Debug, Clone)]
pub struct Eigh {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

const HERMITICITY_TOL: f64 = 1e-9;
const MAX_SWEEPS: usize = 60;

/// Cyclic complex Jacobi. Suitable for the dimensions this crate needs
/// (at most a few hundred); quadratically convergent once nearly diagonal.
pub fn eigh(a: &CMatrix) -> Result<Eigh> {
    let n = a.dim;
    let scale = a.frobenius_norm().max(1.0);
    if a.max_hermiticity_defect() > HERMITICITY_TOL * scale {
        return Err(Error::invalid("eigh requires a Hermitian matrix"));
    }
    let mut m = a.clone();
    // symmetrize exactly so rounding in the input cannot bias the sweep
    for i in 0..n {
        for j in 0..i {
            let avg = (m.get(i, j) + m.get(j, i).conj()) * C64::new(0.5, 0.0);
            m.set(i, j, avg);
            m.set(j, i, avg.conj());
        }
        let d = m.get(i, i);
        m.set(i, i, C64::new(d.re, 0.0));
    }
    let mut v = CMatrix::identity(n);
    let tol = f64::EPSILON * scale;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= tol * (n as f64) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.get(i, i).re.partial_cmp(&m.get(j, j).re).unwrap_or(core::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i).re).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v.get(i, order[j]));
    Ok(Eigh { values, vectors })
}

/// One two-sided rotation zeroing the (p,q) entry: m ← U† m U, v ← v U.
fn rotate(m: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let zpq = m.get(p, q);
    let r = zpq.norm();
    if r == 0.0 {
        return;
    }
    let phase = zpq / r; // e^{iθ}
    let app = m.get(p, p).re;
    let aqq = m.get(q, q).re;
    let tau = (app - aqq) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // U = I except U[p][p]=c, U[p][q]=-s·e^{iθ}, U[q][p]=s·e^{-iθ}, U[q][q]=c
    let se = C64::new(s, 0.0) * phase; // s·e^{iθ}
    let n = m.dim;
    // column update: m ← m U
    for k in 0..n {
        let mkp = m.get(k, p);
        let mkq = m.get(k, q);
        m.set(k, p, mkp * c + mkq * se.conj());
        m.set(k, q, mkq * c - mkp * se);
    }
    // row update: m ← U† m
    for k in 0..n {
        let mpk = m.get(p, k);
        let mqk = m.get(q, k);
        m.set(p, k, mpk * c + mqk * se);
        m.set(q, k, mqk * c - mpk * se.conj());
    }
    // clean the pivot pair
    let dpp = m.get(p, p);
    let dqq = m.get(q, q);
    m.set(p, p, C64::new(dpp.re, 0.0));
    m.set(q, q, C64::new(dqq.re, 0.0));
    m.set(p, q, ZERO);
    m.set(q, p, ZERO);
    // accumulate eigenvectors
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c + vkq * se.conj());
        v.set(k, q, vkq * c - vkp * se);
    }
}

pub fn min_eigenvalue(a: &CMatrix) -> Result<f64> {
    Ok(*eigh(a)?.values.first().ok_or_else(|| Error::invalid("empty matrix"))?)
}

pub fn max_eigenvalue(a: &CMatrix) -> Result<f64> {
    Ok(*eigh(a)?.values.last().ok_or_else(|| Error::invalid("empty matrix"))?)
}

/// Operator (spectral) norm via A†A.
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    let gram = a.adjoint().mul(a);
    Ok(max_eigenvalue(&gram)?.max(0.0).sqrt())
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}
