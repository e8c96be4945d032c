//! Mixed-radix indexing helpers. Digit 0 is the most significant one everywhere.

use crate::error::{Error, Result};

pub(crate) fn encode(digits: &[usize], radices: &[usize]) -> usize {
    digits
        .iter()
        .zip(radices)
        .fold(0usize, |acc, (&d, &r)| acc * r + d)
}

pub(crate) fn decode_into(mut idx: usize, radices: &[usize], out: &mut [usize]) {
    for t in (0..radices.len()).rev() {
        out[t] = idx % radices[t];
        idx /= radices[t];
    }
}

pub(crate) fn decode(idx: usize, radices: &[usize]) -> Vec<usize> {
    let mut out = vec![0; radices.len()];
    decode_into(idx, radices, &mut out);
    out
}

/// Uniform radix decode: `n` digits base `s`.
pub(crate) fn digits(idx: usize, s: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0; n];
    let mut x = idx;
    for t in (0..n).rev() {
        out[t] = x % s;
        x /= s;
    }
    out
}

pub(crate) fn undigits(d: &[usize], s: usize) -> usize {
    d.iter().fold(0usize, |acc, &x| acc * s + x)
}

pub(crate) fn checked_product(sizes: &[usize], cap: u128, what: &str) -> Result<usize> {
    let mut acc: u128 = 1;
    for &s in sizes {
        acc = acc
            .checked_mul(s as u128)
            .filter(|&v| v <= cap)
            .ok_or_else(|| Error::cap(what, format!("> {cap}"), cap))?;
    }
    Ok(acc as usize)
}

pub(crate) fn checked_pow(base: usize, exp: usize, cap: u128, what: &str) -> Result<usize> {
    checked_product(&vec![base; exp], cap, what)
}
