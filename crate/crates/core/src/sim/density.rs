//! Exact density-matrix evolution for small sections.
//!
//! The density matrix is stored row-major and treated as a vectorized pure
//! state of `2n` qubits: entry `(r, c)` lives at index `r * 2^n + c`, so the
//! column bits are positions `0..n` and the row bits are positions `n..2n`.
//! A unitary `U` then acts as `U` on the row positions and `conj(U)` on the
//! column positions, which lets the statevector kernels drive the exact
//! channel-sum evolution.

use crate::error::{Error, Result};
use crate::linalg::Cx;
use crate::noise::KrausChannel;
use crate::scalar::{lit, Real};

use super::state::StateVector;

/// Largest section the exact density evolution will handle (1 MiB of f64).
pub const MAX_DENSITY_QUBITS: usize = 8;

/// Exact mixed state of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    n: usize,
    dim: usize,
    /// Vectorized matrix as a `2n`-qubit statevector.
    vec: StateVector<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// `|0..0><0..0|`.
    pub fn pure_zero(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DENSITY_QUBITS {
            return Err(Error::QubitCap {
                n,
                cap: MAX_DENSITY_QUBITS,
            });
        }
        Ok(Self {
            n,
            dim: 1 << n,
            vec: StateVector::zero_state(2 * n)?,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn entry(&self, r: usize, c: usize) -> Cx<T> {
        self.vec.amplitudes()[r * self.dim + c]
    }

    pub fn trace(&self) -> Cx<T> {
        (0..self.dim)
            .map(|r| self.entry(r, r))
            .fold(Cx::new(T::zero(), T::zero()), |acc, v| acc + v)
    }

    /// Largest modulus of `rho - rho^dag`, zero for exactly Hermitian states.
    pub fn hermiticity_deviation(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                let d = (self.entry(r, c) - self.entry(c, r).conj()).norm();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }

    /// True when `rho + tol * I` admits a Cholesky factorization, i.e. all
    /// eigenvalues exceed `-tol`.
    pub fn is_positive_semidefinite(&self, tol: T) -> bool {
        // Work on an f64 copy for pivot stability regardless of T.
        let dim = self.dim;
        let mut a = vec![0.0f64; dim * dim * 2];
        for r in 0..dim {
            for c in 0..dim {
                let v = self.entry(r, c);
                a[2 * (r * dim + c)] = v.re.to_f64().unwrap_or(f64::NAN);
                a[2 * (r * dim + c) + 1] = v.im.to_f64().unwrap_or(f64::NAN);
            }
        }
        let shift = tol.to_f64().unwrap_or(0.0);
        cholesky_passes(dim, &mut a, shift)
    }

    /// `<Z_p>` for every position (real diagonal accumulation), clamped to
    /// `[-1, 1]`.
    pub fn expectation_z_all(&self) -> Vec<T> {
        let mut z = vec![T::zero(); self.n];
        for r in 0..self.dim {
            let p = self.entry(r, r).re;
            for (pos, zp) in z.iter_mut().enumerate() {
                if r & (1 << pos) == 0 {
                    *zp += p;
                } else {
                    *zp -= p;
                }
            }
        }
        for zp in &mut z {
            *zp = zp.min(T::one()).max(-T::one());
        }
        z
    }

    /// Applies a dense single-qubit unitary at position `pos`.
    pub fn apply_single(&mut self, pos: usize, m: &[Cx<T>]) {
        let conj: Vec<Cx<T>> = m.iter().map(|v| v.conj()).collect();
        self.vec.apply_single(self.n + pos, m);
        self.vec.apply_single(pos, &conj);
    }

    /// Applies a dense two-qubit unitary; `pos_hi` maps to the high matrix
    /// bit, as in [`StateVector::apply_two`].
    pub fn apply_two(&mut self, pos_hi: usize, pos_lo: usize, m: &[Cx<T>]) {
        let conj: Vec<Cx<T>> = m.iter().map(|v| v.conj()).collect();
        self.vec.apply_two(self.n + pos_hi, self.n + pos_lo, m);
        self.vec.apply_two(pos_hi, pos_lo, &conj);
    }

    /// Applies a Kraus channel exactly: `rho -> sum_b w_b B rho B^dag +
    /// sum_g K rho K^dag`.
    pub fn apply_channel(&mut self, positions: &[usize], channel: &KrausChannel<T>) {
        let zero = Cx::new(T::zero(), T::zero());
        let mut acc = vec![zero; self.vec.amplitudes().len()];
        for branch in channel.branches() {
            let mut term = self.clone();
            match positions {
                [pos] => term.apply_single(*pos, &branch.matrix),
                [hi, lo] => term.apply_two(*hi, *lo, &branch.matrix),
                _ => unreachable!("channels act on one or two qubits"),
            }
            let w = branch.weight.unwrap_or_else(T::one);
            let scale = Cx::new(w, T::zero());
            for (a, t) in acc.iter_mut().zip(term.vec.amplitudes()) {
                *a += scale * *t;
            }
        }
        self.vec = StateVector::from_raw(2 * self.n, acc);
    }
}

/// In-place complex Cholesky check of `A + shift * I` stored as interleaved
/// re/im; returns false at the first non-positive pivot.
fn cholesky_passes(dim: usize, a: &mut [f64], shift: f64) -> bool {
    // L is built in the lower triangle of `a`.
    let at = |a: &[f64], r: usize, c: usize| -> (f64, f64) {
        (a[2 * (r * dim + c)], a[2 * (r * dim + c) + 1])
    };
    let set = |a: &mut [f64], r: usize, c: usize, re: f64, im: f64| {
        a[2 * (r * dim + c)] = re;
        a[2 * (r * dim + c) + 1] = im;
    };
    for k in 0..dim {
        let (mut d, _) = at(a, k, k);
        d += shift;
        for j in 0..k {
            let (re, im) = at(a, k, j);
            d -= re * re + im * im;
        }
        if !d.is_finite() || d <= 0.0 {
            return false;
        }
        let lkk = d.sqrt();
        set(a, k, k, lkk, 0.0);
        for i in k + 1..dim {
            let (mut re, mut im) = at(a, i, k);
            for j in 0..k {
                let (lre, lim) = at(a, i, j);
                let (kre, kim) = at(a, k, j);
                // l_ij * conj(l_kj)
                re -= lre * kre + lim * kim;
                im -= lim * kre - lre * kim;
            }
            set(a, i, k, re / lkk, im / lkk);
        }
    }
    true
}

impl<T: Real> DensityMatrix<T> {
    /// Default positive-semidefiniteness tolerance used by state checks.
    pub fn default_psd_tol() -> T {
        lit(1e-10)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::rx_matrix;
    use crate::linalg::cx;
    use crate::noise::KrausChannel;
    use std::f64::consts::PI;

    #[test]
    fn pure_zero_has_unit_trace_and_z_one() {
        let rho = DensityMatrix::<f64>::pure_zero(3).unwrap();
        assert!((rho.trace() - cx(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(rho.expectation_z_all(), vec![1.0, 1.0, 1.0]);
        assert_eq!(rho.hermiticity_deviation(), 0.0);
        assert!(rho.is_positive_semidefinite(1e-12));
    }

    #[test]
    fn unitary_preserves_trace_and_purity() {
        let mut rho = DensityMatrix::<f64>::pure_zero(2).unwrap();
        rho.apply_single(0, &rx_matrix(1.23));
        rho.apply_single(1, &rx_matrix(0.4));
        assert!((rho.trace() - cx(1.0, 0.0)).norm() < 1e-14);
        assert!(rho.hermiticity_deviation() < 1e-14);
        assert!(rho.is_positive_semidefinite(1e-12));
    }

    #[test]
    fn depolarizing_mixes_toward_identity() {
        let mut rho = DensityMatrix::<f64>::pure_zero(1).unwrap();
        let full = KrausChannel::<f64>::depolarizing_1q(1.0).unwrap();
        rho.apply_channel(&[0], &full);
        // Full depolarizing sends Z-expectation to (1 - p) z = hmm, for the
        // standard parameterization <Z> -> (1 - p) <Z> = 0 at p = 1.
        let z = rho.expectation_z_all();
        assert!(z[0].abs() < 1e-14);
        assert!((rho.trace() - cx(1.0, 0.0)).norm() < 1e-14);
        assert!((rho.entry(0, 0) - cx(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rx_pi_on_density_flips_z() {
        let mut rho = DensityMatrix::<f64>::pure_zero(2).unwrap();
        rho.apply_single(1, &rx_matrix(PI));
        let z = rho.expectation_z_all();
        assert!((z[0] - 1.0).abs() < 1e-14);
        assert!((z[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            DensityMatrix::<f64>::pure_zero(9),
            Err(Error::QubitCap { n: 9, cap: 8 })
        ));
    }

    #[test]
    fn non_psd_matrix_fails_cholesky() {
        // rho = diag(1.5, -0.5) has trace 1 but a negative eigenvalue.
        let mut rho = DensityMatrix::<f64>::pure_zero(1).unwrap();
        let amps = vec![cx(1.5, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(-0.5, 0.0)];
        rho.vec = StateVector::from_raw(2, amps);
        assert!(!rho.is_positive_semidefinite(1e-10));
        assert!(rho.is_positive_semidefinite(0.6));
    }
}
