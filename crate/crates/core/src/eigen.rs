//! Dense real-symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Sized for the model's matrices (2x2 up to 36x36); accuracy and
//! determinism over speed. No randomized pivoting: repeated calls on the
//! same input are bit-identical.

use ndarray::Array2;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("matrix is not symmetric (max |A - Aᵀ| = {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },
}

/// Eigenvalues in ascending order with the matching orthonormal
/// eigenvector columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub values: Vec<T>,
    /// Column k is the eigenvector of `values[k]`.
    pub vectors: Array2<T>,
}

impl<T: Real> EigenDecomposition<T> {
    /// k-th eigenvector as a slice-backed Vec.
    pub fn vector(&self, k: usize) -> Vec<T> {
        self.vectors.column(k).to_vec()
    }
}

const MAX_SWEEPS: usize = 64;

/// Decompose a symmetric matrix.
///
/// The input is symmetrized as (A + Aᵀ)/2 before solving; asymmetry beyond
/// 1e-8 (absolute) is an error. Each eigenvector is sign-normalized so its
/// entry of largest magnitude (first such index on ties) is positive.
pub fn eigh<T: Real>(a: &Array2<T>) -> Result<EigenDecomposition<T>, EigenError> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigh needs a square matrix");

    let mut max_asym = T::zero();
    for i in 0..n {
        for j in 0..n {
            let d = (a[(i, j)] - a[(j, i)]).abs();
            if d > max_asym {
                max_asym = d;
            }
        }
    }
    if max_asym > T::of(1e-8) {
        return Err(EigenError::NotSymmetric {
            max_asymmetry: max_asym.to_f64().unwrap_or(f64::NAN),
        });
    }

    let mut m = Array2::<T>::zeros((n, n));
    let half = T::of(0.5);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (a[(i, j)] + a[(j, i)]) * half;
        }
    }

    let mut v = Array2::<T>::eye(n);
    let norm: T = m.iter().map(|&x| x * x).sum::<T>().sqrt();
    let tol = T::epsilon() * norm.max(T::one());

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                // Golub & Van Loan rotation choice: the smaller-angle root.
                let theta = (m[(q, q)] - m[(p, p)]) / (T::of(2.0) * apq);
                let t = {
                    let s = theta.abs() + (theta * theta + T::one()).sqrt();
                    if theta >= T::zero() {
                        T::one() / s
                    } else {
                        -T::one() / s
                    }
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;

                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    // ascending eigenvalues, stable on ties
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(i, i)]
            .partial_cmp(&m[(j, j)])
            .expect("eigenvalues are finite")
    });

    let mut values = Vec::with_capacity(n);
    let mut vectors = Array2::<T>::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        values.push(m[(k, k)]);
        // sign convention: largest-magnitude entry positive
        let mut best = 0;
        for r in 1..n {
            if v[(r, k)].abs() > v[(best, k)].abs() {
                best = r;
            }
        }
        let flip = v[(best, k)] < T::zero();
        for r in 0..n {
            vectors[(r, col)] = if flip { -v[(r, k)] } else { v[(r, k)] };
        }
    }

    Ok(EigenDecomposition { values, vectors })
}
