//! Tensor kernels shared by the float and rational code paths.
//!
//! Tables are indexed in mixed radix with coordinate 0 most significant.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) trait Scalar:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self>
{
    fn conj(&self) -> Self;
    fn from_weight(exact: &BigRational, shadow: f64) -> Self;
}

impl Scalar for Complex64 {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn from_weight(_: &BigRational, shadow: f64) -> Self {
        Complex64::new(shadow, 0.0)
    }
}

impl Scalar for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_weight(exact: &BigRational, _: f64) -> Self {
        exact.clone()
    }
}

/// Applies `T_rho` in place, one coordinate at a time.
pub(crate) fn noise<T: Scalar>(vals: &mut [T], s: usize, n: usize, w: &[T], rho: &T) {
    let rest = T::one() - rho.clone();
    let mut stride = vals.len();
    for _ in 0..n {
        let block = stride;
        stride /= s;
        for start in (0..vals.len()).step_by(block) {
            for off in 0..stride {
                let mut mean = T::zero();
                for a in 0..s {
                    mean = mean + w[a].clone() * vals[start + a * stride + off].clone();
                }
                let m = rest.clone() * mean;
                for a in 0..s {
                    let v = &mut vals[start + a * stride + off];
                    *v = rho.clone() * v.clone() + m.clone();
                }
            }
        }
    }
}

/// `E_{x ~ w^n}[f(x)]` by contracting the last coordinate repeatedly.
pub(crate) fn expectation<T: Scalar>(vals: &[T], s: usize, w: &[T]) -> T {
    let mut cur: Vec<T> = vals.to_vec();
    while cur.len() > 1 {
        cur = cur
            .chunks(s)
            .map(|c| {
                c.iter()
                    .zip(w)
                    .fold(T::zero(), |acc, (v, p)| acc + p.clone() * v.clone())
            })
            .collect();
    }
    cur.pop().unwrap_or_else(T::zero)
}

/// `<f, g> = E[f conj(g)]`.
pub(crate) fn inner<T: Scalar>(f: &[T], g: &[T], s: usize, w: &[T]) -> T {
    let prod: Vec<T> = f.iter().zip(g).map(|(a, b)| a.clone() * b.conj()).collect();
    expectation(&prod, s, w)
}

/// `Stab_rho[f] = <f, T_rho f>`.
pub(crate) fn stability<T: Scalar>(f: &[T], s: usize, n: usize, w: &[T], rho: &T) -> T {
    let mut t = f.to_vec();
    noise(&mut t, s, n, w, rho);
    inner(f, &t, s, w)
}

/// The table of `f` with coordinate `c` fixed to `fixed[c]` where given, on the remaining
/// coordinates in their original order.
pub(crate) fn restrict<T: Clone>(vals: &[T], s: usize, fixed: &[Option<usize>]) -> Vec<T> {
    let alive = fixed.iter().filter(|f| f.is_none()).count();
    let len = s.pow(alive as u32);
    let mut out = Vec::with_capacity(len);
    let mut y = vec![0usize; alive];
    for _ in 0..len {
        let mut idx = 0;
        let mut t = 0;
        for f in fixed {
            let d = match f {
                Some(z) => *z,
                None => {
                    t += 1;
                    y[t - 1]
                }
            };
            idx = idx * s + d;
        }
        out.push(vals[idx].clone());
        // odometer, last coordinate fastest
        for p in (0..alive).rev() {
            y[p] += 1;
            if y[p] < s {
                break;
            }
            y[p] = 0;
        }
    }
    out
}
