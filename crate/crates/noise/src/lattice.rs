use plap_spectral::Mode;

use crate::NoiseError;

/// All nonzero lattice modes with a given `|k|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub radius_sq: u32,
    /// Sorted, closed under `k ↦ -k` and coordinate permutations/sign flips.
    pub modes: Vec<Mode>,
}

impl Shell {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

pub fn build_shells(dim: usize, radii: &[u32]) -> Result<Vec<Shell>, NoiseError> {
    let mut shells: Vec<Shell> = Vec::with_capacity(radii.len());
    for &r in radii {
        if shells.iter().any(|s| s.radius_sq == r) {
            return Err(NoiseError::DuplicateShell(r));
        }
        let modes = shell_modes(dim, r);
        if modes.is_empty() {
            return Err(NoiseError::EmptyShell { dim, radius_sq: r });
        }
        shells.push(Shell { radius_sq: r, modes });
    }
    Ok(shells)
}

fn shell_modes(dim: usize, radius_sq: u32) -> Vec<Mode> {
    if radius_sq == 0 {
        return Vec::new();
    }
    let m = (radius_sq as f64).sqrt().floor() as i64;
    let r = radius_sq as i64;
    let mut out = Vec::new();
    for a in -m..=m {
        for b in -m..=m {
            if dim == 2 {
                if a * a + b * b == r {
                    out.push(Mode::new(&[a, b]));
                }
                continue;
            }
            for c in -m..=m {
                if a * a + b * b + c * c == r {
                    out.push(Mode::new(&[a, b, c]));
                }
            }
        }
    }
    out.sort();
    out
}

/// Orthonormal basis `a_{k,1..d-1}` of `k^⊥`, identical for `k` and `-k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub mode: Mode,
    pub vectors: Vec<[f64; 3]>,
}

/// Frame of the positive representative `k⁺`: in 2D the +90° rotation of
/// `k⁺/|k⁺|`; in 3D `a₁ = k⁺ × e / |k⁺ × e|` with `e` the first coordinate axis
/// not parallel to `k⁺`, and `a₂ = k̂⁺ × a₁`.
pub fn build_frame(dim: usize, k: Mode) -> Result<Frame, NoiseError> {
    if k.is_zero() {
        return Err(NoiseError::ZeroMode);
    }
    let kp = k.representative().as_f64();
    let norm = dot(&kp, &kp).sqrt();
    let khat = kp.map(|c| c / norm);
    let vectors = if dim == 2 {
        vec![[-khat[1], khat[0], 0.0]]
    } else {
        let axis = (0..3)
            .map(|j| {
                let mut e = [0.0; 3];
                e[j] = 1.0;
                e
            })
            .find(|e| dot(&cross(&kp, e), &cross(&kp, e)) > 0.0)
            .expect("a nonzero vector is parallel to at most one axis");
        let c = cross(&kp, &axis);
        let cn = dot(&c, &c).sqrt();
        let a1 = c.map(|x| x / cn);
        let a2 = cross(&khat, &a1);
        vec![a1, a2]
    };
    Ok(Frame { mode: k, vectors })
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
