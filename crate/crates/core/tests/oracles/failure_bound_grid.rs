//! Failure-bound values on a fixed grid, computed with 50-digit arithmetic
//! by `failure_bound.py` in this directory.

#![allow(clippy::excessive_precision)]

/// `(n, m, d, gc, exponent is d, value)`.
pub const FAILURE_BOUND_GRID: [(usize, usize, usize, usize, bool, f64); 20] = [
    (5, 0, 3, 0, false, 2.6041666666666667e+2),
    (7, 0, 3, 0, false, 5.9295096e+2),
    (7, 2, 3, 2, false, 7.9385299272472718e+2),
    (7, 10, 3, 10, false, 4.566022258099371e+1),
    (7, 18, 3, 18, false, 6.93675227880622e-1),
    (9, 4, 3, 4, false, 7.4640851131894566e+2),
    (9, 30, 3, 30, false, 6.9294732977254794e-4),
    (15, 5, 5, 5, false, 3.372302437298913e+5),
    (17, 40, 5, 40, false, 5.8894503951395766e-3),
    (23, 12, 7, 12, false, 2.1293303464371076e+7),
    (23, 60, 7, 60, false, 8.7306373719281262e-5),
    (49, 100, 9, 100, false, 1.8131388275705466e-11),
    (100, 0, 11, 0, false, 7.7515168898301091e+18),
    (100, 150, 11, 150, false, 1.0715052471450071e-20),
    (7, 1, 3, 0, false, 8.0908641975308642e+2),
    (13, 7, 3, 3, false, 2.9981084874190501e+3),
    (7, 5, 3, 5, true, 4.3151275720164609e+3),
    (9, 20, 3, 20, true, 8.353226802064104),
    (31, 25, 9, 25, true, 8.0364149568089538e+8),
    (1, 0, 1, 0, false, 1.0),
];
