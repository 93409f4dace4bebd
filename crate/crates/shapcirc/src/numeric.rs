//! Exact rational arithmetic helpers: parsing, deterministic rendering,
//! interpolation grids, and the Vandermonde solver used by the reductions.
//!
//! [`Rational`] is an arbitrary-precision `num_rational::BigRational`; the
//! type keeps values reduced with a positive denominator by construction, so
//! structural equality is semantic equality everywhere in the crate.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number, always reduced, denominator > 0.
pub type Rational = num_rational::BigRational;

/// Significant digits emitted by [`render_decimal`].
pub const DECIMAL_SIGNIFICANT_DIGITS: u32 = 15;

/// Shorthand constructor. Panics on a zero denominator; intended for
/// literals in code and tests.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse::<BigInt>().ok()
}

/// Parse a rational literal: `p/q`, a decimal such as `0.25`, or an integer.
/// A single leading `-` (or `+`) is accepted. Decimals are converted exactly;
/// scientific notation is rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidRational(s.to_string());
    let t = s.trim();
    let (neg, body) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let value = if let Some((n, d)) = body.split_once('/') {
        let numer = parse_digits(n).ok_or_else(bad)?;
        let denom = parse_digits(d).ok_or_else(bad)?;
        if denom.is_zero() {
            return Err(bad());
        }
        Rational::new(numer, denom)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return Err(bad());
        }
        let int_part = if int.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int).ok_or_else(bad)?
        };
        let frac_part = if frac.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(frac).ok_or_else(bad)?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        Rational::new(int_part * &scale + frac_part, scale)
    } else {
        Rational::from_integer(parse_digits(body).ok_or_else(bad)?)
    };
    Ok(if neg { -value } else { value })
}

/// Serialize a rational as `p/q` (always with an explicit denominator, so the
/// TSV column grammar stays uniform: `3/1`, `0/1`, `-7/2`, …).
pub fn render_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn pow10(e: u32) -> BigInt {
    BigInt::from(10u32).pow(e)
}

/// Render a rational in positional decimal with exactly
/// [`DECIMAL_SIGNIFICANT_DIGITS`] significant digits, rounding half to even.
/// Zero renders as `0.` followed by that many zeros.
pub fn render_decimal(r: &Rational) -> String {
    let sig = DECIMAL_SIGNIFICANT_DIGITS as i64;
    if r.is_zero() {
        return format!("0.{}", "0".repeat(sig as usize));
    }
    let neg = r.is_negative();
    let a = r.numer().abs();
    let b = r.denom().clone();

    // Decimal exponent e with b·10^e ≤ a < b·10^(e+1), i.e. 10^e ≤ |r| < 10^(e+1).
    let digit_gap = a.to_string().len() as i64 - b.to_string().len() as i64;
    let mut e = digit_gap;
    let cmp_scaled = |e: i64| -> std::cmp::Ordering {
        // compare a / 10^e with b using integer arithmetic only
        if e >= 0 {
            a.cmp(&(&b * pow10(e as u32)))
        } else {
            (&a * pow10((-e) as u32)).cmp(&b)
        }
    };
    while cmp_scaled(e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    while cmp_scaled(e + 1) != std::cmp::Ordering::Less {
        e += 1;
    }

    // N = round_half_even(a·10^(sig−1−e) / b), a (sig)-digit integer.
    let shift = sig - 1 - e;
    let (num, den) = if shift >= 0 {
        (&a * pow10(shift as u32), b.clone())
    } else {
        (a.clone(), &b * pow10((-shift) as u32))
    };
    let (mut q, rem) = num_integer::Integer::div_rem(&num, &den);
    let twice = &rem * BigInt::from(2u32);
    let round_up = match twice.cmp(&den) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => num_integer::Integer::is_odd(&q),
        std::cmp::Ordering::Less => false,
    };
    if round_up {
        q += 1;
    }
    if q == pow10(sig as u32) {
        // 999…9 rounded up to the next power of ten
        q = pow10(sig as u32 - 1);
        e += 1;
    }

    let digits = q.to_string();
    debug_assert_eq!(digits.len(), sig as usize);
    let body = if e < 0 {
        format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
    } else if e >= sig - 1 {
        format!("{}{}", digits, "0".repeat((e - (sig - 1)) as usize))
    } else {
        let split = (e + 1) as usize;
        format!("{}.{}", &digits[..split], &digits[split..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Strictly positive, pairwise-distinct interpolation nodes, optionally
/// confined below an exclusive upper bound.
#[derive(Clone, Debug)]
pub struct InterpolationGrid {
    nodes: Vec<Rational>,
}

impl InterpolationGrid {
    /// Validate and wrap a node list: non-empty, every node > 0, pairwise
    /// distinct, and `node < bound` when a bound is supplied.
    pub fn new(nodes: Vec<Rational>, bound: Option<&Rational>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidGrid("no nodes".into()));
        }
        for (i, z) in nodes.iter().enumerate() {
            if !z.is_positive() {
                return Err(Error::InvalidGrid(format!(
                    "node {i} = {} is not positive",
                    render_rational(z)
                )));
            }
            if let Some(b) = bound {
                if z >= b {
                    return Err(Error::InvalidGrid(format!(
                        "node {i} = {} is not below the bound {}",
                        render_rational(z),
                        render_rational(b)
                    )));
                }
            }
        }
        let mut sorted: Vec<&Rational> = nodes.iter().collect();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGrid("nodes are not pairwise distinct".into()));
        }
        Ok(Self { nodes })
    }

    /// The grid used throughout the reductions: `n + 1` nodes. Without a
    /// bound these are the small integers `1, 2, …, n + 1` (smallest exact
    /// arithmetic); with an exclusive bound `b` they are `(i + 1)·b/(n + 2)`.
    pub fn default_grid(n: usize, bound: Option<&Rational>) -> Self {
        let nodes = (0..=n)
            .map(|i| {
                let step = Rational::from_integer(BigInt::from(i as u64 + 1));
                match bound {
                    None => step,
                    Some(b) => step * b / Rational::from_integer(BigInt::from(n as u64 + 2)),
                }
            })
            .collect();
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Solve the Vandermonde system `Σ_j x_j · z_i^j = v_i` for the coefficient
/// vector `x`, given the grid nodes `z_i` and values `v_i`.
///
/// Implemented as Lagrange-basis reconstruction: the solution is the
/// coefficient vector of the unique interpolating polynomial through
/// `(z_i, v_i)`, assembled in O(n²) exact operations.
pub fn solve_vandermonde(grid: &InterpolationGrid, values: &[Rational]) -> Result<Vec<Rational>> {
    let nodes = grid.nodes();
    if nodes.len() != values.len() {
        return Err(Error::InterpolationMismatch {
            nodes: nodes.len(),
            values: values.len(),
        });
    }
    let n = nodes.len() - 1;

    // Master polynomial W(z) = Π_i (z − z_i), degree n + 1.
    let mut w: Vec<Rational> = vec![Rational::one()];
    for z in nodes {
        let mut next = vec![Rational::zero(); w.len() + 1];
        for (j, c) in w.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= c * z;
        }
        w = next;
    }

    let mut out = vec![Rational::zero(); n + 1];
    let mut quot = vec![Rational::zero(); n + 1];
    for (i, zi) in nodes.iter().enumerate() {
        // Numerator of the i-th Lagrange basis: W(z)/(z − z_i), by synthetic
        // division (exact; z_i is a root of W).
        quot[n] = w[n + 1].clone();
        for j in (0..n).rev() {
            quot[j] = &w[j + 1] + zi * &quot[j + 1];
        }
        // Denominator Π_{m≠i} (z_i − z_m); nonzero because nodes are distinct.
        let mut denom = Rational::one();
        for (m, zm) in nodes.iter().enumerate() {
            if m != i {
                denom *= zi - zm;
            }
        }
        let scale = &values[i] / denom;
        for (acc, q) in out.iter_mut().zip(quot.iter()) {
            *acc += &scale * q;
        }
    }
    Ok(out)
}

/// Convert to `f64` (used only by the opt-in floating-point mode).
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
