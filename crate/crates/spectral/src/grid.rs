use crate::SpectralError;

/// Integer wavevector. Components beyond the grid dimension are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mode(pub [i64; 3]);

impl Mode {
    pub fn new(components: &[i64]) -> Mode {
        assert!(components.len() <= 3, "at most three components");
        let mut k = [0; 3];
        k[..components.len()].copy_from_slice(components);
        Mode(k)
    }

    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|c| c * c).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0 == [0; 3]
    }

    pub fn neg(&self) -> Mode {
        Mode([-self.0[0], -self.0[1], -self.0[2]])
    }

    /// First nonzero component is positive. Exactly one of `k`, `-k` has this property.
    pub fn is_positive(&self) -> bool {
        self.0.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
    }

    /// The member of `{k, -k}` that `is_positive`.
    pub fn representative(&self) -> Mode {
        if self.is_positive() {
            *self
        } else {
            self.neg()
        }
    }

    pub fn sup_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    pub fn as_f64(&self) -> [f64; 3] {
        [self.0[0] as f64, self.0[1] as f64, self.0[2] as f64]
    }
}

/// Uniform `n^d` grid on the unit torus with a spectral cutoff on `|k|_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    dim: usize,
    n: usize,
    cutoff: usize,
}

impl Grid {
    /// Grid with the two-thirds cutoff `n / 3`.
    pub fn new(dim: usize, n: usize) -> Result<Grid, SpectralError> {
        Grid::with_cutoff(dim, n, n / 3)
    }

    pub fn with_cutoff(dim: usize, n: usize, cutoff: usize) -> Result<Grid, SpectralError> {
        if dim != 2 && dim != 3 {
            return Err(SpectralError::Dimension(dim));
        }
        if n < 8 || !n.is_multiple_of(2) {
            return Err(SpectralError::Resolution(n));
        }
        if cutoff > n / 3 {
            return Err(SpectralError::Cutoff { cutoff, limit: n / 3, n });
        }
        Ok(Grid { dim, n, cutoff })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Number of grid points, equal to the number of stored coefficients.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest `λ_k` among retained modes.
    pub fn max_eigenvalue(&self) -> f64 {
        crate::eigenvalue((self.dim * self.cutoff * self.cutoff) as i64)
    }

    pub(crate) fn signed(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber used by derivative multipliers; the Nyquist index has no
    /// real-valued derivative and maps to zero.
    pub(crate) fn derivative_wavenumber(&self, i: usize) -> f64 {
        if i == self.n / 2 {
            0.0
        } else {
            self.signed(i) as f64
        }
    }

    pub(crate) fn axis_indices(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            2 => [idx / n, idx % n, 0],
            _ => [idx / (n * n), (idx / n) % n, idx % n],
        }
    }

    pub fn mode_at(&self, idx: usize) -> Mode {
        let a = self.axis_indices(idx);
        let mut k = [0i64; 3];
        for j in 0..self.dim {
            k[j] = self.signed(a[j]);
        }
        Mode(k)
    }

    /// Storage index of `k`, if every component fits in `[-n/2, n/2)`.
    pub fn index_of(&self, k: Mode) -> Option<usize> {
        let half = (self.n / 2) as i64;
        let mut idx = 0usize;
        for j in 0..3 {
            let c = k.0[j];
            if j >= self.dim {
                if c != 0 {
                    return None;
                }
                continue;
            }
            if c < -half || c >= half {
                return None;
            }
            idx = idx * self.n + c.rem_euclid(self.n as i64) as usize;
        }
        Some(idx)
    }

    /// Index of `-k` for the mode stored at `idx`.
    pub(crate) fn neg_index(&self, idx: usize) -> usize {
        let a = self.axis_indices(idx);
        let n = self.n;
        let mut out = 0;
        for &aj in &a[..self.dim] {
            out = out * n + (n - aj) % n;
        }
        out
    }

    pub(crate) fn is_retained(&self, idx: usize) -> bool {
        let a = self.axis_indices(idx);
        (0..self.dim).all(|j| self.signed(a[j]).unsigned_abs() as usize <= self.cutoff)
    }

    /// `λ_k` of the mode stored at `idx`.
    pub fn eigenvalue_at(&self, idx: usize) -> f64 {
        crate::eigenvalue(self.mode_at(idx).norm_sq())
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let a = self.axis_indices(idx);
        let h = 1.0 / self.n as f64;
        let mut x = [0.0; 3];
        for j in 0..self.dim {
            x[j] = a[j] as f64 * h;
        }
        x
    }
}
