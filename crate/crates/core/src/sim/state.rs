//! Dense statevector with little-endian qubit ordering.
//!
//! Basis index bit `p` holds the state of the qubit at section position `p`,
//! so position 0 is the least significant bit. Two-qubit operators use the
//! convention that the *first* position argument maps to the high bit of the
//! 2-bit matrix index.

use num_complex::Complex;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::Cx;
use crate::scalar::{count, Real};

/// Largest section a statevector will represent (16 MiB of f64 amplitudes).
pub const MAX_STATE_QUBITS: usize = 20;

/// Pure state of `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n: usize,
    amps: Vec<Cx<T>>,
}

impl<T: Real> StateVector<T> {
    /// The all-zeros computational basis state.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::QubitCap {
                n,
                cap: MAX_STATE_QUBITS,
            });
        }
        let mut amps = vec![Cx::new(T::zero(), T::zero()); 1 << n];
        amps[0] = Cx::new(T::one(), T::zero());
        Ok(Self { n, amps })
    }

    /// Wraps an existing amplitude buffer (length must be `2^n`); used by the
    /// density-matrix representation, which is not normalized as a vector.
    pub(crate) fn from_raw(n: usize, amps: Vec<Cx<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Cx<T>] {
        &self.amps
    }

    /// Squared 2-norm.
    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > T::zero() {
            let inv = T::one() / norm;
            for a in &mut self.amps {
                *a = Cx::new(a.re * inv, a.im * inv);
            }
        }
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Cx<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Cx::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * *b
            })
    }

    /// Applies a dense 2x2 operator at `pos`.
    pub fn apply_single(&mut self, pos: usize, m: &[Cx<T>]) {
        debug_assert_eq!(m.len(), 4);
        let (m00, m01, m10, m11) = (m[0], m[1], m[2], m[3]);
        let step = 1 << pos;
        let mut base = 0;
        while base < self.amps.len() {
            for i in base..base + step {
                let a = self.amps[i];
                let b = self.amps[i + step];
                self.amps[i] = m00 * a + m01 * b;
                self.amps[i + step] = m10 * a + m11 * b;
            }
            base += 2 * step;
        }
    }

    /// Applies `diag(d0, d1)` at `pos`.
    pub fn apply_diag_single(&mut self, pos: usize, d0: Cx<T>, d1: Cx<T>) {
        let mask = 1 << pos;
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a = if i & mask == 0 { d0 * *a } else { d1 * *a };
        }
    }

    /// Applies a dense 4x4 operator; `pos_hi` maps to the high bit of the
    /// matrix index, `pos_lo` to the low bit.
    pub fn apply_two(&mut self, pos_hi: usize, pos_lo: usize, m: &[Cx<T>]) {
        debug_assert_eq!(m.len(), 16);
        debug_assert_ne!(pos_hi, pos_lo);
        let mh = 1 << pos_hi;
        let ml = 1 << pos_lo;
        let both = mh | ml;
        for i in 0..self.amps.len() {
            if i & both != 0 {
                continue;
            }
            let idx = [i, i | ml, i | mh, i | both];
            let v = [
                self.amps[idx[0]],
                self.amps[idx[1]],
                self.amps[idx[2]],
                self.amps[idx[3]],
            ];
            for (r, &out_idx) in idx.iter().enumerate() {
                let row = &m[r * 4..r * 4 + 4];
                self.amps[out_idx] = row[0] * v[0] + row[1] * v[1] + row[2] * v[2] + row[3] * v[3];
            }
        }
    }

    /// Applies a two-qubit diagonal `(d00, d01, d10, d11)`; `pos_hi` maps to
    /// the first bit of the diagonal index.
    pub fn apply_diag_two(&mut self, pos_hi: usize, pos_lo: usize, d: &[Cx<T>; 4]) {
        let mh = 1 << pos_hi;
        let ml = 1 << pos_lo;
        for (i, a) in self.amps.iter_mut().enumerate() {
            let k = (usize::from(i & mh != 0) << 1) | usize::from(i & ml != 0);
            *a = d[k] * *a;
        }
    }

    /// Applies CNOT with control at `control` and target at `target`
    /// (section positions).
    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        debug_assert_ne!(control, target);
        let mc = 1 << control;
        let mt = 1 << target;
        for i in 0..self.amps.len() {
            if i & mc != 0 && i & mt == 0 {
                self.amps.swap(i, i | mt);
            }
        }
    }

    /// `<Z_p>` for every position, in position order. Values are clamped to
    /// `[-1, 1]` against round-off.
    pub fn expectation_z_all(&self) -> Vec<T> {
        let mut z = vec![T::zero(); self.n];
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            for (pos, zp) in z.iter_mut().enumerate() {
                if i & (1 << pos) == 0 {
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

    /// Samples one basis index from `|amps|^2` (assumes a normalized state;
    /// rounding slack falls onto the last nonzero amplitude).
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let target = T::from_f64(u).unwrap_or_else(T::zero);
        let mut acc = T::zero();
        let mut last_nonzero = 0;
        for (i, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p > T::zero() {
                last_nonzero = i;
            }
            acc += p;
            if target < acc {
                return i;
            }
        }
        last_nonzero
    }
}

/// Complex double shortcut for tests.
#[allow(dead_code)]
type C64 = Complex<f64>;

/// Mean of per-position z-expectations.
pub fn mean_z<T: Real>(z: &[T]) -> T {
    if z.is_empty() {
        return T::zero();
    }
    z.iter().copied().sum::<T>() / count(z.len())
}
