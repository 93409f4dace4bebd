//! Coefficient functions weighting a variable's marginal contributions, and
//! the binomial table they are evaluated against.
//!
//! A coefficient function maps a pair `(k, ℓ)` — game size and coalition
//! size, `0 ≤ ℓ < k` — to a rational weight. Shapley, Banzhaf, and
//! Penrose–Banzhaf are built in; arbitrary tables can be loaded from TSV.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numeric::{parse_rational, Rational};

/// Pascal-triangle table of binomial coefficients `C(n, k)` for `n ≤ n_max`.
///
/// Score algorithms hold one table sized by the universe and evaluate every
/// coefficient against it; factorials are never formed.
#[derive(Clone, Debug)]
pub struct BinomialTable {
    rows: Vec<Vec<BigInt>>,
    zero: BigInt,
}

impl BinomialTable {
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
            }
            rows.push(row);
        }
        Self {
            rows,
            zero: BigInt::zero(),
        }
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(n, k)`; zero for `k > n`. Panics if `n` exceeds the table size.
    pub fn get(&self, n: usize, k: usize) -> &BigInt {
        if k > n {
            &self.zero
        } else {
            &self.rows[n][k]
        }
    }
}

/// A user-supplied coefficient table: explicit rational weights per `(k, ℓ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CustomTable {
    entries: BTreeMap<(usize, usize), Rational>,
}

impl CustomTable {
    /// Parse the TSV format: one `k<TAB>ℓ<TAB>rational` entry per line,
    /// `#` comments and blank lines ignored. Duplicate pairs are an error.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("expected k<TAB>l<TAB>value, got {} fields", fields.len()),
                });
            }
            let parse_idx = |s: &str, col: usize| {
                s.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    column: col,
                    message: format!("invalid index {s:?}"),
                })
            };
            let k = parse_idx(fields[0], 1)?;
            let l = parse_idx(fields[1], 2)?;
            if k == 0 || l >= k {
                return Err(Error::CoefficientDomain { k, l });
            }
            let value = parse_rational(fields[2])?;
            if entries.insert((k, l), value).is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    column: 1,
                    message: format!("duplicate entry for (k = {k}, l = {l})"),
                });
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, k: usize, l: usize) -> Option<&Rational> {
        self.entries.get(&(k, l))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// The coefficient function `c(k, ℓ)` a score computation is weighted by.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientFunction {
    /// `c(k, ℓ) = ℓ!(k−ℓ−1)!/k! = 1/(k·C(k−1, ℓ))`.
    Shapley,
    /// `c(k, ℓ) = 1`.
    Banzhaf,
    /// `c(k, ℓ) = 2^(1−k)`.
    PenroseBanzhaf,
    /// Explicit table of weights.
    Custom(CustomTable),
}

impl CoefficientFunction {
    /// Evaluate `c(k, ℓ)` for `1 ≤ k ≤ table.n_max()`, `0 ≤ ℓ < k`.
    pub fn eval(&self, binom: &BinomialTable, k: usize, l: usize) -> Result<Rational> {
        if k == 0 || l >= k {
            return Err(Error::CoefficientDomain { k, l });
        }
        match self {
            Self::Shapley => {
                let denom = BigInt::from(k as u64) * binom.get(k - 1, l);
                Ok(Rational::new(BigInt::one(), denom))
            }
            Self::Banzhaf => Ok(Rational::one()),
            Self::PenroseBanzhaf => Ok(Rational::new(BigInt::one(), BigInt::one() << (k - 1))),
            Self::Custom(table) => table
                .get(k, l)
                .cloned()
                .ok_or(Error::CustomTableMissing { k, l }),
        }
    }

    /// Stable lower-case name used in reports and CLI output.
    pub fn name(&self) -> &'static str {
        match self {
            Self::Shapley => "shapley",
            Self::Banzhaf => "banzhaf",
            Self::PenroseBanzhaf => "penrose",
            Self::Custom(_) => "table",
        }
    }
}

impl fmt::Display for CoefficientFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
