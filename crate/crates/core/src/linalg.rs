//! Small dense complex-matrix helpers for gates and Kraus operators.
//!
//! Gate matrices are fixed-size row-major arrays ([`Mat2`], [`Mat4`]); channel
//! operators use heap vectors tagged with their dimension. Everything here is
//! exact dense arithmetic; the statevector kernels in [`crate::sim`] never go
//! through these paths in hot loops.

use num_complex::Complex;

use crate::scalar::{lit, Real};

/// Complex number over the working scalar.
pub type Cx<T> = Complex<T>;

/// 2x2 row-major complex matrix.
pub type Mat2<T> = [Cx<T>; 4];

/// 4x4 row-major complex matrix.
pub type Mat4<T> = [Cx<T>; 16];

/// Builds a complex number from `f64` parts.
#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(lit(re), lit(im))
}

/// `dim`-dimensional identity as a row-major vector.
pub fn identity<T: Real>(dim: usize) -> Vec<Cx<T>> {
    let mut m = vec![Cx::new(T::zero(), T::zero()); dim * dim];
    for i in 0..dim {
        m[i * dim + i] = Cx::new(T::one(), T::zero());
    }
    m
}

/// Row-major product `a * b` of two `dim` x `dim` matrices.
pub fn mat_mul<T: Real>(dim: usize, a: &[Cx<T>], b: &[Cx<T>]) -> Vec<Cx<T>> {
    assert_eq!(a.len(), dim * dim);
    assert_eq!(b.len(), dim * dim);
    let zero = Cx::new(T::zero(), T::zero());
    let mut out = vec![zero; dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let ark = a[r * dim + k];
            for c in 0..dim {
                out[r * dim + c] += ark * b[k * dim + c];
            }
        }
    }
    out
}

/// Conjugate transpose of a `dim` x `dim` matrix.
pub fn mat_dagger<T: Real>(dim: usize, a: &[Cx<T>]) -> Vec<Cx<T>> {
    assert_eq!(a.len(), dim * dim);
    let mut out = vec![Cx::new(T::zero(), T::zero()); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[c * dim + r] = a[r * dim + c].conj();
        }
    }
    out
}

/// Kronecker product of two 2x2 matrices, yielding a 4x4 matrix in the
/// convention where the first factor acts on the higher-order bit.
pub fn kron2<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat4<T> {
    let mut out = [Cx::new(T::zero(), T::zero()); 16];
    for ar in 0..2 {
        for ac in 0..2 {
            for br in 0..2 {
                for bc in 0..2 {
                    out[(2 * ar + br) * 4 + (2 * ac + bc)] = a[ar * 2 + ac] * b[br * 2 + bc];
                }
            }
        }
    }
    out
}

/// Largest absolute entry-wise deviation of `m` from the identity.
pub fn max_identity_deviation<T: Real>(dim: usize, m: &[Cx<T>]) -> T {
    assert_eq!(m.len(), dim * dim);
    let mut worst = T::zero();
    for r in 0..dim {
        for c in 0..dim {
            let target = if r == c { T::one() } else { T::zero() };
            let d = (m[r * dim + c] - Cx::new(target, T::zero())).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// True when every entry of `a` and `b` agrees within `tol` in modulus.
pub fn mat_close<T: Real>(a: &[Cx<T>], b: &[Cx<T>], tol: T) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (*x - *y).norm() <= tol)
}
