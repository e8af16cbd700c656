//! Deterministic seeded random substreams and small dense complex-matrix
//! kernels.
//!
//! Every stochastic quantity in the simulator is drawn from an [`RngStream`]
//! addressed by `(master_seed, frame_index, role)`. ChaCha exposes 2^64
//! independent streams per seed, so each frame task owns its randomness by
//! value and Monte Carlo results are reproducible for any worker count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Role tag selecting one of a frame's independent random substreams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Source data bits of a frame.
    Data,
    /// Fading and noise draws for a frame's transmissions.
    Channel,
    /// The run-wide interleaver permutation.
    Interleaver,
}

impl StreamRole {
    fn tag(self) -> u64 {
        match self {
            StreamRole::Data => 0,
            StreamRole::Channel => 1,
            StreamRole::Interleaver => 2,
        }
    }
}

/// A deterministic random substream.
///
/// Two streams with the same `(master_seed, frame_index, role)` produce
/// identical sequences; distinct addresses select distinct ChaCha streams.
#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, frame_index: u64, role: StreamRole) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        // Eight role slots per frame index; frame counts stay far below 2^61.
        rng.set_stream((frame_index << 3) | role.tag());
        Self { rng }
    }

    /// One standard normal variate.
    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One fair bit.
    pub fn bit(&mut self) -> bool {
        self.rng.random()
    }

    /// `n` fair bits.
    pub fn bits(&mut self, n: usize) -> Vec<bool> {
        (0..n).map(|_| self.bit()).collect()
    }

    /// Uniform index in `[0, bound)`.
    pub fn index(&mut self, bound: usize) -> usize {
        self.rng.random_range(0..bound)
    }
}

/// Draws `n` complex samples whose real and imaginary parts are independent
/// zero-mean Gaussians, each with variance `variance_per_dim`.
pub fn gaussian_complex(
    stream: &mut RngStream,
    n: usize,
    variance_per_dim: f64,
) -> Result<Vec<Complex64>> {
    if !(variance_per_dim > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "variance per dimension must be positive, got {variance_per_dim}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameter(
            "sample count must be at least 1".into(),
        ));
    }
    let sd = variance_per_dim.sqrt();
    Ok((0..n)
        .map(|_| Complex64::new(sd * stream.standard_normal(), sd * stream.standard_normal()))
        .collect())
}

/// Dense row-major complex matrix. Sized for link simulation (N <= 1024),
/// so no blocking or decomposition machinery.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimensions must be positive".into(),
            ));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    /// Plain matrix product `self * rhs`.
    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + aik * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * v`.
    pub fn mul_vec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &x)| a * x)
                    .sum::<Complex64>()
            })
            .collect())
    }
}

/// `a^H * b` without materializing the conjugate transpose.
pub fn hermitian_times(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_times requires equal row counts, got {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    let mut out = ComplexMatrix::zeros(a.cols(), b.cols());
    for j in 0..a.rows() {
        let arow = a.row(j);
        let brow = b.row(j);
        for (i, &aji) in arow.iter().enumerate() {
            let c = aji.conj();
            for (k, &bjk) in brow.iter().enumerate() {
                let v = out.get(i, k) + c * bjk;
                out.set(i, k, v);
            }
        }
    }
    Ok(out)
}

/// `a^H * v` for a column vector `v`.
pub fn hermitian_times_vec(a: &ComplexMatrix, v: &[Complex64]) -> Result<Vec<Complex64>> {
    if a.rows() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "hermitian_times_vec requires {} entries, got {}",
            a.rows(),
            v.len()
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.cols()];
    for (j, &vj) in v.iter().enumerate() {
        for (o, &aji) in out.iter_mut().zip(a.row(j)) {
            *o += aji.conj() * vj;
        }
    }
    Ok(out)
}
