use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::Grid;

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `Σ_x f(x) e^{-2πik·x}`, unnormalised.
    Forward,
    /// `Σ_k f̂(k) e^{2πik·x}`.
    Inverse,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let mut cache = CACHE.get_or_init(Default::default).lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) })
        })
        .clone()
}

/// In-place `d`-dimensional transform of a row-major `n^d` array.
pub(crate) fn transform(grid: &Grid, data: &mut [Complex64], dir: Direction) {
    let n = grid.n();
    let len = grid.len();
    debug_assert_eq!(data.len(), len);
    let plans = plans(n);
    let fft = match dir {
        Direction::Forward => &plans.forward,
        Direction::Inverse => &plans.inverse,
    };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // last axis is contiguous
    fft.process_with_scratch(data, &mut scratch);

    let mut lines = vec![Complex64::default(); len];
    for axis in 0..grid.dim() - 1 {
        let stride = n.pow((grid.dim() - 1 - axis) as u32);
        let block = stride * n;
        let mut pos = 0;
        for outer in (0..len).step_by(block) {
            for inner in 0..stride {
                for j in 0..n {
                    lines[pos + j] = data[outer + inner + j * stride];
                }
                pos += n;
            }
        }
        fft.process_with_scratch(&mut lines, &mut scratch);
        let mut pos = 0;
        for outer in (0..len).step_by(block) {
            for inner in 0..stride {
                for j in 0..n {
                    data[outer + inner + j * stride] = lines[pos + j];
                }
                pos += n;
            }
        }
    }
}
