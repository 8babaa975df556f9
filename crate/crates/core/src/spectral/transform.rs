//! Cached-plan FFTs along the axes of a 3D coefficient array.
//!
//! Forward transforms carry the `1/(grid size)` factor so that coefficients
//! are the Fourier coefficients of the sampled function; the inverse is the
//! plain synthesis sum.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::parallel::prelude::*;
use ndarray::{Array3, Axis, Zip};
use num_complex::Complex64;
use rayon::slice::ParallelSliceMut;
use rustfft::{Fft, FftPlanner};

use super::grid::Grid;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Direction {
    Forward,
    Inverse,
}

fn plan(len: usize, dir: Direction) -> Arc<dyn Fft<f64>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, Direction), Arc<dyn Fft<f64>>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((len, dir))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            match dir {
                Direction::Forward => planner.plan_fft_forward(len),
                Direction::Inverse => planner.plan_fft_inverse(len),
            }
        })
        .clone()
}

/// Run the FFT along one axis of `data`, in place. `scale` multiplies every
/// output element (used to fold normalisation into the last pass).
/// Lanes that are identically zero are skipped.
fn fft_axis(data: &mut Array3<Complex64>, axis: usize, dir: Direction, scale: f64) {
    let len = data.shape()[axis];
    let fft = plan(len, dir);
    let scratch_len = fft.get_inplace_scratch_len();

    if axis == 2 {
        // Contiguous lanes: transform in place.
        let slice = data.as_slice_mut().expect("standard layout");
        slice
            .par_chunks_exact_mut(len)
            .for_each_init(
                || vec![Complex64::ZERO; scratch_len],
                |scratch, lane| {
                    if lane.iter().all(|c| c.re == 0.0 && c.im == 0.0) {
                        return;
                    }
                    fft.process_with_scratch(lane, scratch);
                    if scale != 1.0 {
                        for c in lane.iter_mut() {
                            *c *= scale;
                        }
                    }
                },
            );
        return;
    }

    Zip::from(data.lanes_mut(Axis(axis))).into_par_iter().for_each_init(
        || (vec![Complex64::ZERO; len], vec![Complex64::ZERO; scratch_len]),
        |(buf, scratch), (mut lane,)| {
            let mut nonzero = false;
            for (b, c) in buf.iter_mut().zip(lane.iter()) {
                *b = *c;
                nonzero |= c.re != 0.0 || c.im != 0.0;
            }
            if !nonzero {
                return;
            }
            fft.process_with_scratch(buf, scratch);
            for (c, b) in lane.iter_mut().zip(buf.iter()) {
                *c = if scale != 1.0 { *b * scale } else { *b };
            }
        },
    );
}

/// Physical samples -> Fourier coefficients.
pub fn forward(grid: &Grid, samples: &Array3<f64>) -> Array3<Complex64> {
    let mut data = samples.mapv(|v| Complex64::new(v, 0.0));
    forward_in_place(grid, &mut data);
    data
}

pub(crate) fn forward_in_place(grid: &Grid, data: &mut Array3<Complex64>) {
    let norm = 1.0 / grid.mode_count() as f64;
    fft_axis(data, 0, Direction::Forward, 1.0);
    fft_axis(data, 1, Direction::Forward, 1.0);
    fft_axis(data, 2, Direction::Forward, norm);
}

/// Fourier coefficients -> physical samples (complex-valued synthesis).
pub fn inverse(_grid: &Grid, coeffs: &Array3<Complex64>) -> Array3<Complex64> {
    let mut data = coeffs.clone();
    fft_axis(&mut data, 0, Direction::Inverse, 1.0);
    fft_axis(&mut data, 1, Direction::Inverse, 1.0);
    fft_axis(&mut data, 2, Direction::Inverse, 1.0);
    data
}

/// Synthesise two Hermitian-symmetric coefficient arrays with a single
/// complex FFT: the result of `a + i b` has `a` in its real part and `b` in
/// its imaginary part.
pub fn inverse_pair(
    grid: &Grid,
    a: &Array3<Complex64>,
    b: &Array3<Complex64>,
) -> (Array3<f64>, Array3<f64>) {
    let mut packed = Array3::zeros(a.raw_dim());
    Zip::from(&mut packed)
        .and(a)
        .and(b)
        .for_each(|p, &ca, &cb| *p = ca + Complex64::new(0.0, 1.0) * cb);
    let phys = inverse(grid, &packed);
    let pa = phys.mapv(|c| c.re);
    let pb = phys.mapv(|c| c.im);
    (pa, pb)
}

/// Analyse two real sample arrays with a single complex FFT.
pub fn forward_pair(
    grid: &Grid,
    a: &Array3<f64>,
    b: &Array3<f64>,
) -> (Array3<Complex64>, Array3<Complex64>) {
    let mut packed = Array3::zeros(a.raw_dim());
    Zip::from(&mut packed)
        .and(a)
        .and(b)
        .for_each(|p, &pa, &pb| *p = Complex64::new(pa, pb));
    forward_in_place(grid, &mut packed);
    unpack_pair(grid, &packed)
}

/// Split the spectrum of `a + i b` (a, b real) into the spectra of a and b:
/// `A(k) = (H(k) + conj(H(-k)))/2`, `B(k) = (H(k) - conj(H(-k)))/(2i)`.
fn unpack_pair(grid: &Grid, packed: &Array3<Complex64>) -> (Array3<Complex64>, Array3<Complex64>) {
    let (n1, n2, n3) = grid.shape();
    let neg_h: Vec<usize> = (0..n1).map(|i| Grid::negated_index(i, n1)).collect();
    let neg_v: Vec<usize> = (0..n3).map(|k| Grid::negated_index(k, n3)).collect();
    let p = packed.as_slice().expect("standard layout");
    let mut fa = vec![Complex64::ZERO; p.len()];
    let mut fb = vec![Complex64::ZERO; p.len()];
    for i in 0..n1 {
        for j in 0..n2 {
            let base = (i * n2 + j) * n3;
            let nbase = (neg_h[i] * n2 + neg_h[j]) * n3;
            for k in 0..n3 {
                let h = p[base + k];
                let hc = p[nbase + neg_v[k]].conj();
                fa[base + k] = 0.5 * (h + hc);
                fb[base + k] = Complex64::new(0.0, -0.5) * (h - hc);
            }
        }
    }
    let fa = Array3::from_shape_vec((n1, n2, n3), fa).expect("shape");
    let fb = Array3::from_shape_vec((n1, n2, n3), fb).expect("shape");
    (fa, fb)
}
