use nalgebra::DMatrix;
use num_complex::Complex64;

/// Ratio of largest to smallest singular value (`inf` if singular).
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}
