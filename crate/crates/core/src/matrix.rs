//! Random binary matrices and the column-identification games on them.
//!
//! Rows are the queries and columns the targets: asking row `w` about
//! column `v` returns `A[w][v]`. Values of `q` above one half are handled by
//! complementing, which swaps the roles of 0 and 1 and changes nothing else.

use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{maxgain_worst_case, minimax_value, play_game, AdversaryPolicy, Player1Policy, Transcript};
use crate::localization::{greedy_resolving_set, min_resolving_set, QuerySet};
use crate::oracle::QueryOracle;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMatrix {
    m: usize,
    n: usize,
    /// Row-major 0/1 entries.
    bits: Vec<u8>,
    distinct: bool,
}

impl BinaryMatrix {
    pub fn new(m: usize, n: usize, bits: Vec<u8>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidArgument(format!("matrix dimensions must be positive, got {m}x{n}")));
        }
        if bits.len() != m * n {
            return Err(Error::LengthMismatch {
                expected: m * n,
                got: bits.len(),
            });
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidArgument(format!("entry {b} is not 0 or 1")));
        }
        let mut a = Self {
            m,
            n,
            bits,
            distinct: false,
        };
        a.distinct = collision_stats(&a).x_pairs == 0;
        Ok(a)
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Self::new(rows.len(), n, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.n + col]
    }

    pub fn complement(&self) -> Self {
        Self {
            bits: self.bits.iter().map(|b| 1 - b).collect(),
            ..self.clone()
        }
    }

    /// Column `c` packed into 64-bit words, row 0 in the lowest bit.
    fn packed_column(&self, c: usize) -> Vec<u64> {
        let mut words = vec![0u64; self.m.div_ceil(64)];
        for r in 0..self.m {
            if self.get(r, c) == 1 {
                words[r / 64] |= 1 << (r % 64);
            }
        }
        words
    }

    /// Parses a `M N` header followed by `M` lines of `N` characters `0`/`1`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "missing header".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse {
                line: 1,
                message: format!("bad header {header:?}"),
            })?;
        let [m, n] = dims[..] else {
            return Err(Error::Parse {
                line: 1,
                message: "header must be `M N`".into(),
            });
        };
        let mut bits = Vec::with_capacity(m * n);
        let mut rows = 0;
        for (line, content) in lines {
            let row: Vec<u8> = content
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse {
                        line,
                        message: format!("unexpected character {c:?}"),
                    }),
                })
                .collect::<Result<_>>()?;
            if row.len() != n {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {n} entries, found {}", row.len()),
                });
            }
            bits.extend(row);
            rows += 1;
        }
        if rows != m {
            return Err(Error::Parse {
                line: text.lines().count(),
                message: format!("header declares {m} rows, found {rows}"),
            });
        }
        Self::new(m, n, bits)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.m, self.n);
        for r in 0..self.m {
            for c in 0..self.n {
                out.push(if self.get(r, c) == 1 { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

impl QueryOracle for BinaryMatrix {
    fn query_count(&self) -> usize {
        self.m
    }

    fn target_count(&self) -> usize {
        self.n
    }

    fn answer(&self, w: usize, v: usize) -> u32 {
        u32::from(self.get(w, v))
    }

    fn label_bound(&self) -> usize {
        2
    }

    fn check_playable(&self) -> Result<()> {
        if self.distinct {
            Ok(())
        } else {
            Err(Error::Undefined)
        }
    }
}

/// `m × n` matrix of independent Bernoulli(`q`) entries.
pub fn sample_bernoulli(m: usize, n: usize, q: f64, seed: u64) -> Result<BinaryMatrix> {
    let coin = Bernoulli::new(q).map_err(|_| Error::InvalidProbability(q))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits = (0..m * n).map(|_| u8::from(coin.sample(&mut rng))).collect();
    BinaryMatrix::new(m, n, bits)
}

pub fn columns_pairwise_distinct(a: &BinaryMatrix) -> bool {
    a.distinct
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CollisionStats {
    /// Number of unordered pairs of equal columns.
    pub x_pairs: u64,
    pub z_zero: usize,
    pub z_one: usize,
}

pub fn collision_stats(a: &BinaryMatrix) -> CollisionStats {
    let mut columns: Vec<Vec<u64>> = (0..a.n).map(|c| a.packed_column(c)).collect();
    let zero = vec![0u64; a.m.div_ceil(64)];
    let mut one = vec![u64::MAX; a.m.div_ceil(64)];
    if !a.m.is_multiple_of(64) {
        *one.last_mut().expect("m > 0") = (1 << (a.m % 64)) - 1;
    }
    let z_zero = columns.iter().filter(|c| **c == zero).count();
    let z_one = columns.iter().filter(|c| **c == one).count();
    columns.sort_unstable();
    let mut x_pairs = 0u64;
    let mut run = 1u64;
    for w in columns.windows(2) {
        if w[0] == w[1] {
            x_pairs += run;
            run += 1;
        } else {
            run = 1;
        }
    }
    CollisionStats {
        x_pairs,
        z_zero,
        z_one,
    }
}

/// `ln N / ln(1 / sqrt(q² + (1 - q)²))`, the row count at which `N` columns
/// switch from colliding to distinct.
pub fn qc_threshold(n: usize, q: f64) -> Result<f64> {
    let q = fold_probability(q)?;
    if q == 0.0 {
        return Err(Error::InvalidProbability(q));
    }
    let collide = q * q + (1.0 - q) * (1.0 - q);
    Ok(2.0 * (n as f64).log2() / -collide.log2())
}

/// `(γ_qc, γ_sqc) = (sqrt(q² + (1 - q)²), max(q, 1 - q))`.
pub fn gamma_qc_sqc(q: f64) -> Result<(f64, f64)> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidProbability(q));
    }
    Ok(((q * q + (1.0 - q) * (1.0 - q)).sqrt(), q.max(1.0 - q)))
}

fn fold_probability(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidProbability(q));
    }
    Ok(if q > 0.5 { 1.0 - q } else { q })
}

/// Fewest rows whose restriction keeps all columns distinct, with the
/// lexicographically first such row set.
pub fn qc_exact(a: &BinaryMatrix, cap: usize) -> Result<(usize, QuerySet)> {
    let r = min_resolving_set(a, cap)?;
    Ok((r.len(), r))
}

pub fn qc_greedy(a: &BinaryMatrix) -> Result<QuerySet> {
    greedy_resolving_set(a)
}

pub fn sqc_play(
    a: &BinaryMatrix,
    p1: &Player1Policy,
    p2: &AdversaryPolicy,
    cap: usize,
) -> Result<Transcript> {
    play_game(a, p1, p2, cap)
}

/// Adaptive query complexity by exhaustive minimax (at most 64 columns).
pub fn sqc_exact(a: &BinaryMatrix, cap: usize) -> Result<usize> {
    minimax_value(a, cap)
}

pub fn sqc_maxgain_worstcase(a: &BinaryMatrix, cap: usize) -> Result<usize> {
    maxgain_worst_case(a, cap)
}
