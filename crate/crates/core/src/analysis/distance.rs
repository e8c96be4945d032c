use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::util::{checked_product, decode_into};

fn same_len<T>(p: &[T], q: &[T]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::Invalid(format!(
            "distributions over {} and {} points",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

pub fn l1_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    Ok(p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum())
}

pub fn l1_distance_exact(p: &[BigRational], q: &[BigRational]) -> Result<BigRational> {
    same_len(p, q)?;
    Ok(p.iter()
        .zip(q)
        .map(|(a, b)| crate::rational::abs(&(a - b)))
        .fold(BigRational::zero(), |acc, d| acc + d))
}

/// Relative entropy `D(P || Q)` in bits.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    same_len(p, q)?;
    let mut d = 0.0;
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a > 0.0 {
            if b <= 0.0 {
                return Err(Error::Invalid(format!("support violation at point {i}")));
            }
            d += a * (a / b).log2();
        }
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DriftBound {
    pub lhs: f64,
    pub rhs: f64,
    pub mass: f64,
}

impl DriftBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs + 1e-12
    }
}

/// Average marginal drift of a product distribution conditioned on an event, against
/// `sqrt((2/n) log2(1/P[F]))`. The event is a membership table over the product space.
pub fn marginal_drift_bound(marginals: &[Vec<f64>], event: &[bool]) -> Result<DriftBound> {
    let sizes: Vec<usize> = marginals.iter().map(Vec::len).collect();
    let n = sizes.len();
    if n == 0 {
        return Err(Error::Invalid("no coordinates".into()));
    }
    let total = checked_product(&sizes, 1 << 24, "product space")?;
    if event.len() != total {
        return Err(Error::Invalid(format!("event table has {} entries, expected {total}", event.len())));
    }
    let mut cond: Vec<Vec<f64>> = sizes.iter().map(|&s| vec![0.0; s]).collect();
    let mut mass = 0.0;
    let mut x = vec![0; n];
    for (idx, &inside) in event.iter().enumerate() {
        if !inside {
            continue;
        }
        decode_into(idx, &sizes, &mut x);
        let p: f64 = x.iter().enumerate().map(|(i, &a)| marginals[i][a]).product();
        mass += p;
        for (i, &a) in x.iter().enumerate() {
            cond[i][a] += p;
        }
    }
    if mass <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let mut lhs = 0.0;
    for i in 0..n {
        let c: Vec<f64> = cond[i].iter().map(|v| v / mass).collect();
        lhs += l1_distance(&c, &marginals[i])?;
    }
    lhs /= n as f64;
    let rhs = ((2.0 / n as f64) * (1.0 / mass).log2()).max(0.0).sqrt();
    Ok(DriftBound { lhs, rhs, mass })
}
