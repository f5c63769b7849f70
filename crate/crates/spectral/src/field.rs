use std::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::{transform, Direction};
use crate::{Grid, Mode, SpectralError};

/// Norm selector for [`SpectralField::norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Norm {
    L2,
    /// `(∫|u|^p)^{1/p}` by equal-weight quadrature on the grid.
    Lp(f64),
    /// `(∫|u|^p + ∫|∇u|^p)^{1/p}` with the Euclidean length of `∇u`.
    W1p(f64),
}

/// Point values of a real field, row-major over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    values: Vec<f64>,
}

impl PhysicalField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<PhysicalField, SpectralError> {
        if values.len() != grid.len() {
            return Err(SpectralError::Length { expected: grid.len(), found: values.len() });
        }
        Ok(PhysicalField { grid, values })
    }

    /// Samples `f` at every grid point.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> PhysicalField {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        PhysicalField { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Trapezoidal `∫_{T^d} f`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Trapezoidal `∫|f|^p`.
    pub fn abs_pow_mean(&self, p: f64) -> f64 {
        self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / self.values.len() as f64
    }
}

/// Fourier coefficients of a real field with zero spatial mean.
///
/// Invariants: `û(-k) = conj(û(k))` and `û(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

/// `d` scalar components on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    components: Vec<SpectralField>,
}

impl SpectralField {
    pub fn zeros(grid: Grid) -> SpectralField {
        SpectralField { grid, coeffs: vec![Complex64::default(); grid.len()] }
    }

    /// Builds a field from `(k, û(k))` pairs; `û(-k)` is filled by conjugation.
    pub fn from_modes(grid: Grid, modes: &[(Mode, Complex64)]) -> Result<SpectralField, SpectralError> {
        let mut f = SpectralField::zeros(grid);
        for &(k, c) in modes {
            if k.is_zero() {
                return Err(SpectralError::ZeroMode);
            }
            let half = (grid.n() / 2) as i64;
            if k.0.iter().any(|c| c.abs() >= half) {
                return Err(SpectralError::ModeOutOfRange(k));
            }
            let i = grid.index_of(k).ok_or(SpectralError::ModeOutOfRange(k))?;
            let j = grid.index_of(k.neg()).ok_or(SpectralError::ModeOutOfRange(k))?;
            f.coeffs[i] = c;
            f.coeffs[j] = c.conj();
        }
        Ok(f)
    }

    /// Wraps raw coefficients after checking the invariants.
    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<SpectralField, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::Length { expected: grid.len(), found: coeffs.len() });
        }
        let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        if coeffs[0].norm() > tol {
            return Err(SpectralError::ZeroMode);
        }
        let defect = (0..grid.len()).map(|i| (coeffs[i] - coeffs[grid.neg_index(i)].conj()).norm()).fold(0.0, f64::max);
        if defect > tol {
            return Err(SpectralError::NotHermitian(defect));
        }
        let mut f = SpectralField { grid, coeffs };
        f.coeffs[0] = Complex64::default();
        Ok(f)
    }

    /// Forward transform of point values; the mean is discarded and the
    /// result is made exactly Hermitian.
    pub fn from_physical(field: &PhysicalField) -> SpectralField {
        let grid = field.grid;
        let mut data: Vec<Complex64> = field.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        transform(&grid, &mut data, Direction::Forward);
        let scale = 0.5 / grid.len() as f64;
        let mut out = SpectralField::zeros(grid);
        for i in 1..grid.len() {
            out.coeffs[i] = (data[i] + data[grid.neg_index(i)].conj()) * scale;
        }
        out
    }

    /// Forward transform of two real fields with a single complex FFT.
    pub fn pair_from_physical(a: &PhysicalField, b: &PhysicalField) -> (SpectralField, SpectralField) {
        assert_eq!(a.grid, b.grid, "pair transform needs a shared grid");
        let grid = a.grid;
        let mut data: Vec<Complex64> = a.values.iter().zip(&b.values).map(|(&x, &y)| Complex64::new(x, y)).collect();
        transform(&grid, &mut data, Direction::Forward);
        let scale = 0.5 / grid.len() as f64;
        let mut fa = SpectralField::zeros(grid);
        let mut fb = SpectralField::zeros(grid);
        for i in 1..grid.len() {
            let z = data[i];
            let zc = data[grid.neg_index(i)].conj();
            fa.coeffs[i] = (z + zc) * scale;
            // (z - zc) / 2i
            let w = (z - zc) * scale;
            fb.coeffs[i] = Complex64::new(w.im, -w.re);
        }
        (fa, fb)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `û(k)`, or zero if `k` is outside the stored range.
    pub fn coeff(&self, k: Mode) -> Complex64 {
        self.grid.index_of(k).map_or(Complex64::default(), |i| self.coeffs[i])
    }

    pub fn to_physical(&self) -> PhysicalField {
        let mut data = self.coeffs.clone();
        transform(&self.grid, &mut data, Direction::Inverse);
        PhysicalField { grid: self.grid, values: data.iter().map(|c| c.re).collect() }
    }

    /// Largest imaginary part left by the inverse transform; zero up to
    /// rounding for Hermitian coefficients.
    pub fn imaginary_residual(&self) -> f64 {
        let mut data = self.coeffs.clone();
        transform(&self.grid, &mut data, Direction::Inverse);
        data.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    /// Inverse transform of two real fields with a single complex FFT.
    pub fn pair_to_physical(a: &SpectralField, b: &SpectralField) -> (PhysicalField, PhysicalField) {
        assert_eq!(a.grid, b.grid, "pair transform needs a shared grid");
        let grid = a.grid;
        let mut data: Vec<Complex64> = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + Complex64::i() * y).collect();
        transform(&grid, &mut data, Direction::Inverse);
        let pa = PhysicalField { grid, values: data.iter().map(|c| c.re).collect() };
        let pb = PhysicalField { grid, values: data.iter().map(|c| c.im).collect() };
        (pa, pb)
    }

    fn check_grid(&self, other: &SpectralField) -> Result<(), SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        Ok(())
    }

    /// Multiplies each coefficient by `m(idx)`; `m` must be even in `k`.
    pub fn map_real_multiplier(&self, m: impl Fn(usize) -> f64) -> SpectralField {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, c)| c * m(i)).collect();
        SpectralField { grid: self.grid, coeffs }
    }

    pub fn gradient(&self) -> VectorField {
        let g = self.grid;
        let components = (0..g.dim())
            .map(|j| {
                let coeffs = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| {
                        let kj = g.derivative_wavenumber(g.axis_indices(i)[j]);
                        c * Complex64::new(0.0, 2.0 * PI * kj)
                    })
                    .collect();
                SpectralField { grid: g, coeffs }
            })
            .collect();
        VectorField { components }
    }

    /// `Δu`, multiplier `-λ_k`.
    pub fn laplacian(&self) -> SpectralField {
        let g = self.grid;
        self.map_real_multiplier(|i| -g.eigenvalue_at(i))
    }

    /// `e^{sΔ}u`, multiplier `e^{-λ_k s}`.
    pub fn heat(&self, s: f64) -> SpectralField {
        let g = self.grid;
        self.map_real_multiplier(|i| (-g.eigenvalue_at(i) * s).exp())
    }

    /// Zeroes every mode with `|k|_∞` above the cutoff.
    pub fn dealias(&self) -> SpectralField {
        let mut f = self.clone();
        f.dealias_in_place();
        f
    }

    pub fn dealias_in_place(&mut self) {
        let g = self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !g.is_retained(i) {
                *c = Complex64::default();
            }
        }
    }

    pub fn is_dealiased(&self) -> bool {
        self.coeffs.iter().enumerate().all(|(i, c)| self.grid.is_retained(i) || c.norm() == 0.0)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `∫|∇u|^p`, by quadrature on the grid.
    pub fn grad_abs_pow(&self, p: f64) -> f64 {
        self.gradient().abs_pow_mean(p)
    }

    pub fn norm(&self, which: Norm) -> Result<f64, SpectralError> {
        match which {
            Norm::L2 => Ok(self.l2_norm()),
            Norm::Lp(p) => {
                check_exponent(p)?;
                Ok(self.to_physical().abs_pow_mean(p).powf(1.0 / p))
            }
            Norm::W1p(p) => {
                check_exponent(p)?;
                let u = self.to_physical().abs_pow_mean(p);
                Ok((u + self.grad_abs_pow(p)).powf(1.0 / p))
            }
        }
    }

    /// Real `L²` inner product `∫ u v`.
    pub fn inner(&self, other: &SpectralField) -> Result<f64, SpectralError> {
        self.check_grid(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum())
    }

    pub fn scaled(&self, c: f64) -> SpectralField {
        SpectralField { grid: self.grid, coeffs: self.coeffs.iter().map(|z| z * c).collect() }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: f64, other: &SpectralField) -> Result<(), SpectralError> {
        self.check_grid(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * c;
        }
        Ok(())
    }

    pub fn sub(&self, other: &SpectralField) -> Result<SpectralField, SpectralError> {
        let mut out = self.clone();
        out.add_scaled(-1.0, other)?;
        Ok(out)
    }

    pub fn add(&self, other: &SpectralField) -> Result<SpectralField, SpectralError> {
        let mut out = self.clone();
        out.add_scaled(1.0, other)?;
        Ok(out)
    }

    /// Rescales to the requested `L²` norm; the zero field stays zero.
    pub fn with_l2_norm(&self, target: f64) -> SpectralField {
        let n = self.l2_norm();
        if n == 0.0 {
            self.clone()
        } else {
            self.scaled(target / n)
        }
    }

    /// Largest `|û(k) - conj û(-k)|`.
    pub fn hermitian_defect(&self) -> f64 {
        (0..self.grid.len())
            .map(|i| (self.coeffs[i] - self.coeffs[self.grid.neg_index(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

fn check_exponent(p: f64) -> Result<(), SpectralError> {
    if p.is_nan() || p < 2.0 {
        return Err(SpectralError::Exponent(p));
    }
    Ok(())
}

impl VectorField {
    pub fn new(components: Vec<SpectralField>) -> Result<VectorField, SpectralError> {
        let first = components.first().ok_or(SpectralError::Dimension(0))?.grid;
        if components.len() != first.dim() {
            return Err(SpectralError::Dimension(components.len()));
        }
        if components.iter().any(|c| c.grid != first) {
            return Err(SpectralError::GridMismatch);
        }
        Ok(VectorField { components })
    }

    pub fn zeros(grid: Grid) -> VectorField {
        VectorField { components: vec![SpectralField::zeros(grid); grid.dim()] }
    }

    pub fn grid(&self) -> Grid {
        self.components[0].grid
    }

    pub fn components(&self) -> &[SpectralField] {
        &self.components
    }

    pub fn components_mut(&mut self) -> &mut [SpectralField] {
        &mut self.components
    }

    /// `Σ_j ∂_j v_j`, multiplier `Σ_j 2πi k_j`.
    pub fn divergence(&self) -> SpectralField {
        let g = self.grid();
        let mut out = SpectralField::zeros(g);
        for (j, comp) in self.components.iter().enumerate() {
            for (i, (o, c)) in out.coeffs.iter_mut().zip(&comp.coeffs).enumerate() {
                let kj = g.derivative_wavenumber(g.axis_indices(i)[j]);
                *o += c * Complex64::new(0.0, 2.0 * PI * kj);
            }
        }
        out
    }

    /// Point values of each component, transformed two at a time.
    pub fn to_physical(&self) -> Vec<PhysicalField> {
        let mut out = Vec::with_capacity(self.components.len());
        for pair in self.components.chunks(2) {
            match pair {
                [a, b] => {
                    let (pa, pb) = SpectralField::pair_to_physical(a, b);
                    out.push(pa);
                    out.push(pb);
                }
                [a] => out.push(a.to_physical()),
                _ => unreachable!(),
            }
        }
        out
    }

    /// Forward transform of `d` real component arrays.
    pub fn from_physical(parts: &[PhysicalField]) -> Result<VectorField, SpectralError> {
        let mut comps = Vec::with_capacity(parts.len());
        for pair in parts.chunks(2) {
            match pair {
                [a, b] => {
                    let (fa, fb) = SpectralField::pair_from_physical(a, b);
                    comps.push(fa);
                    comps.push(fb);
                }
                [a] => comps.push(SpectralField::from_physical(a)),
                _ => unreachable!(),
            }
        }
        VectorField::new(comps)
    }

    /// `∫|v|^p` with `|v|` the Euclidean length, by grid quadrature.
    pub fn abs_pow_mean(&self, p: f64) -> f64 {
        let phys = self.to_physical();
        let len = phys[0].values.len();
        let mut acc = 0.0;
        for i in 0..len {
            let s: f64 = phys.iter().map(|f| f.values[i] * f.values[i]).sum();
            acc += s.powf(0.5 * p);
        }
        acc / len as f64
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.components.iter().map(|c| c.l2_norm_sq()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn dealias(&self) -> VectorField {
        VectorField { components: self.components.iter().map(|c| c.dealias()).collect() }
    }

    pub fn scaled(&self, c: f64) -> VectorField {
        VectorField { components: self.components.iter().map(|f| f.scaled(c)).collect() }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: f64, other: &VectorField) -> Result<(), SpectralError> {
        for (a, b) in self.components.iter_mut().zip(&other.components) {
            a.add_scaled(c, b)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_band_limited;

    fn cos_mode(grid: Grid) -> SpectralField {
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        SpectralField::from_modes(grid, &[(Mode::new(&[1, 0]), a)]).unwrap()
    }

    #[test]
    fn single_mode_is_root_two_cosine() {
        let g = Grid::new(2, 16).unwrap();
        let u = cos_mode(g).to_physical();
        for (i, v) in u.values().iter().enumerate() {
            let x = g.point(i);
            let exact = 2f64.sqrt() * (2.0 * PI * x[0]).cos();
            assert!((v - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let g = Grid::new(3, 8).unwrap();
        let f = SpectralField::zeros(g);
        assert!(f.to_physical().values().iter().all(|&v| v == 0.0));
        assert_eq!(f.norm(Norm::Lp(3.0)).unwrap(), 0.0);
        assert_eq!(f.norm(Norm::W1p(3.0)).unwrap(), 0.0);
        assert_eq!(f.gradient().l2_norm(), 0.0);
    }

    #[test]
    fn round_trip_and_realness() {
        for (dim, n) in [(2, 32), (3, 12)] {
            let g = Grid::new(dim, n).unwrap();
            let f = random_band_limited(g, g.cutoff(), 1.0, 7);
            let back = SpectralField::from_physical(&f.to_physical());
            let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
            assert!(err < 1e-12, "round trip {err}");
            assert!(f.imaginary_residual() < 1e-13 * f.l2_norm().max(1.0));
        }
    }

    #[test]
    fn inverse_transform_matches_direct_summation() {
        let g = Grid::new(2, 12).unwrap();
        let f = random_band_limited(g, g.cutoff(), 0.5, 3);
        let phys = f.to_physical();
        for idx in [0, 5, 37, 100, 143] {
            let x = g.point(idx);
            let mut s = Complex64::default();
            for (i, c) in f.coeffs().iter().enumerate() {
                let k = g.mode_at(i).as_f64();
                let phase = 2.0 * PI * (k[0] * x[0] + k[1] * x[1]);
                s += c * Complex64::from_polar(1.0, phase);
            }
            assert!((s.re - phys.values()[idx]).abs() < 1e-13);
            assert!(s.im.abs() < 1e-13);
        }
    }

    #[test]
    fn pair_transforms_agree_with_single() {
        let g = Grid::new(2, 16).unwrap();
        let a = random_band_limited(g, 5, 1.0, 1);
        let b = random_band_limited(g, 5, 1.0, 2);
        let (pa, pb) = SpectralField::pair_to_physical(&a, &b);
        assert_eq!(pa.values().len(), g.len());
        for (x, y) in pa.values().iter().zip(a.to_physical().values()) {
            assert!((x - y).abs() < 1e-13);
        }
        let (fa, fb) = SpectralField::pair_from_physical(&pa, &pb);
        assert!(fa.sub(&a).unwrap().l2_norm() < 1e-13);
        assert!(fb.sub(&b).unwrap().l2_norm() < 1e-13);
    }

    #[test]
    fn norms_of_root_two_cosine() {
        let g = Grid::new(2, 32).unwrap();
        let u = cos_mode(g);
        assert!((u.norm(Norm::L2).unwrap() - 1.0).abs() < 1e-14);
        // ∫ (√2 cos)^4 = 4 · 3/8
        let lp4 = 1.5f64.powf(0.25);
        assert!((u.norm(Norm::Lp(4.0)).unwrap() - lp4).abs() < 1e-13);
        assert!((u.gradient().l2_norm() - 2.0 * PI).abs() < 1e-12);
        assert_eq!(u.norm(Norm::Lp(1.5)), Err(SpectralError::Exponent(1.5)));
    }

    #[test]
    fn diagonal_mode_gradient_parseval() {
        let g = Grid::new(2, 16).unwrap();
        let f = SpectralField::from_modes(g, &[(Mode::new(&[1, 1]), Complex64::new(1.0, 0.0))]).unwrap();
        assert!((f.l2_norm_sq() - 2.0).abs() < 1e-15);
        let direct: f64 = f.coeffs().iter().enumerate().map(|(i, c)| g.eigenvalue_at(i) * c.norm_sqr()).sum();
        let grad = f.gradient().l2_norm_sq();
        assert!((grad - direct).abs() < 1e-10);
        assert!((grad - 8.0 * PI * PI * 2.0).abs() < 1e-10);
    }

    #[test]
    fn divergence_of_gradient_is_laplacian() {
        let g = Grid::new(3, 12).unwrap();
        let f = random_band_limited(g, 4, 1.0, 11);
        let lap = f.gradient().divergence();
        assert_eq!(lap, lap.clone());
        let err = lap.sub(&f.laplacian()).unwrap().l2_norm();
        assert!(err <= 1e-12 * f.laplacian().l2_norm());
    }

    #[test]
    fn divergence_matches_centered_differences() {
        // second-order finite differences converge to the spectral divergence
        let errs: Vec<f64> = [32usize, 64]
            .iter()
            .map(|&n| {
                let g = Grid::new(2, n).unwrap();
                let v = VectorField::new(vec![
                    random_band_limited(g, 3, 1.0, 21).with_l2_norm(1.0),
                    random_band_limited(g, 3, 1.0, 22).with_l2_norm(1.0),
                ])
                .unwrap();
                let phys = v.to_physical();
                let div = v.divergence().to_physical();
                let h = 1.0 / n as f64;
                let at = |f: &PhysicalField, i: usize, j: usize| f.values()[(i % n) * n + (j % n)];
                let mut worst: f64 = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        let dx = (at(&phys[0], i + 1, j) - at(&phys[0], i + n - 1, j)) / (2.0 * h);
                        let dy = (at(&phys[1], i, j + 1) - at(&phys[1], i, j + n - 1)) / (2.0 * h);
                        worst = worst.max((dx + dy - div.values()[i * n + j]).abs());
                    }
                }
                worst
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.9 && order < 2.1, "observed order {order}");
    }

    #[test]
    fn dealias_removes_only_high_modes() {
        let g = Grid::new(2, 24).unwrap();
        let low = random_band_limited(g, g.cutoff(), 1.0, 5);
        assert_eq!(low.dealias(), low);
        let high_mode = Mode::new(&[g.cutoff() as i64 + 1, 0]);
        let mut f = low.clone();
        f.add_scaled(1.0, &SpectralField::from_modes(g, &[(high_mode, Complex64::new(1.0, 0.5))]).unwrap()).unwrap();
        assert!(!f.is_dealiased());
        let d = f.dealias();
        assert_eq!(d, low);
        assert_eq!(d.dealias(), d);
    }

    #[test]
    fn from_coeffs_checks_invariants() {
        let g = Grid::new(2, 8).unwrap();
        let mut c = vec![Complex64::default(); g.len()];
        c[1] = Complex64::new(1.0, 0.0);
        assert!(matches!(SpectralField::from_coeffs(g, c.clone()), Err(SpectralError::NotHermitian(_))));
        c[g.neg_index(1)] = Complex64::new(1.0, 0.0);
        assert!(SpectralField::from_coeffs(g, c.clone()).is_ok());
        c[0] = Complex64::new(0.3, 0.0);
        assert_eq!(SpectralField::from_coeffs(g, c), Err(SpectralError::ZeroMode));
        assert_eq!(
            SpectralField::from_modes(g, &[(Mode::new(&[0, 0]), Complex64::new(1.0, 0.0))]),
            Err(SpectralError::ZeroMode)
        );
    }
}
