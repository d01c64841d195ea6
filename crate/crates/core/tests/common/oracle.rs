//! Exact rational least-squares fit, used as an independent check on the
//! floating-point Savitzky-Golay weights.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pow(base: i64, exp: usize) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= int(base);
    }
    acc
}

/// Weights mapping the samples at offsets `-half..=half` to the
/// `derivative`-th coefficient of the least-squares polynomial of degree
/// `order` in the integer offset, solved exactly by Gauss-Jordan elimination.
pub fn exact_savgol_weights(window: usize, order: usize, derivative: usize) -> Vec<BigRational> {
    let half = (window / 2) as i64;
    let offsets: Vec<i64> = (-half..=half).collect();
    let n = order + 1;

    // augmented [N | e_d], N_jk = sum z^(j+k)
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigRational> = (0..n)
                .map(|k| offsets.iter().fold(BigRational::zero(), |s, &z| s + pow(z, j + k)))
                .collect();
            row.push(if j == derivative { BigRational::one() } else { BigRational::zero() });
            row
        })
        .collect();

    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero()).expect("nonsingular");
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = &*v / &p;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let pivot_row = m[col].clone();
                for (v, pv) in m[r].iter_mut().zip(&pivot_row) {
                    *v = &*v - &factor * pv;
                }
            }
        }
    }
    let coeffs: Vec<BigRational> = m.iter().map(|row| row[n].clone()).collect();

    offsets
        .iter()
        .map(|&z| {
            coeffs
                .iter()
                .enumerate()
                .fold(BigRational::zero(), |s, (k, c)| s + c * pow(z, k))
        })
        .collect()
}

pub fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().expect("finite")
}
