//! Exact linear algebra over ℚ.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(k: i64) -> Rational {
    Rational::from_integer(BigInt::from(k))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// The exact value of a finite float.
pub fn from_f64_exact(x: f64) -> Result<Rational> {
    Rational::from_float(x).ok_or_else(|| Error::Numerical(format!("{x} is not finite")))
}

/// Nearest fraction with the given denominator.
pub fn snap(x: f64, denominator: u64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::Numerical(format!("{x} is not finite")));
    }
    let scaled = (x * denominator as f64).round();
    let num = BigInt::from(scaled as i128);
    Ok(Rational::new(num, BigInt::from(denominator)))
}

/// Reduced row echelon form in place, dropping zero rows; returns pivots.
pub fn rref(rows: &mut Vec<Vec<Rational>>) -> Vec<usize> {
    let width = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..width {
        let Some(found) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, found);
        let inv = rows[rank][col].recip();
        for entry in rows[rank].iter_mut() {
            if !entry.is_zero() {
                *entry *= &inv;
            }
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (entry, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *entry -= &factor * pv;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rows.truncate(rank);
    pivots
}

pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    rref(&mut rows).len()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Orthogonal projection of `x` onto the affine subspace {y : C y = d}.
/// Fails when the subspace is empty.
pub fn project_affine(constraints: &[Vec<Rational>], rhs: &[Rational], x: &[Rational]) -> Result<Vec<Rational>> {
    let width = x.len();
    let mut aug: Vec<Vec<Rational>> = constraints
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&width) {
        return Err(Error::NoSolution("constraint system is inconsistent".into()));
    }
    let rows: Vec<Vec<Rational>> = aug.iter().map(|r| r[..width].to_vec()).collect();
    let d: Vec<Rational> = aug.iter().map(|r| r[width].clone()).collect();
    let k = rows.len();
    if k == 0 {
        return Ok(x.to_vec());
    }
    // Solve (C Cᵀ) λ = C x − d.
    let mut system: Vec<Vec<Rational>> = (0..k)
        .map(|i| {
            let mut r: Vec<Rational> = (0..k).map(|j| dot(&rows[i], &rows[j])).collect();
            r.push(dot(&rows[i], x) - &d[i]);
            r
        })
        .collect();
    rref(&mut system);
    let lambda: Vec<Rational> = system.iter().map(|r| r[k].clone()).collect();
    let mut out = x.to_vec();
    for (row, l) in rows.iter().zip(&lambda) {
        if l.is_zero() {
            continue;
        }
        for (o, c) in out.iter_mut().zip(row) {
            if !c.is_zero() {
                *o -= l * c;
            }
        }
    }
    Ok(out)
}

pub fn max_abs_diff(a: &[Rational], b: &[Rational]) -> f64 {
    a.iter().zip(b).map(|(x, y)| to_f64(&(x - y).abs())).fold(0.0, f64::max)
}

pub fn is_one(q: &Rational) -> bool {
    q.is_one()
}
