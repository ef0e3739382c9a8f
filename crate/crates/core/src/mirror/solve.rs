//! Linear systems over GF(2) and their solution by Gaussian elimination.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gf2::BitVec;
use crate::verify::Side;

/// Where a constraint row came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowTag {
    /// Pins payload bit `bit` of `side`.
    MessageBit {
        side: Side,
        bit: usize,
    },
    /// Ties parity bit `bit` (0..8) of codeword `byte` (19..26) to the data.
    ParityBit {
        side: Side,
        byte: usize,
        bit: usize,
    },
    /// Links intended data bit `bit` of `side` to the grid cell carrying it.
    DataLink {
        side: Side,
        bit: usize,
    },
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    nvars: usize,
    rows: Vec<BitVec>,
    rhs: Vec<bool>,
    tags: Vec<RowTag>,
}

impl LinearSystem {
    pub fn new(nvars: usize) -> Self {
        LinearSystem {
            nvars,
            rows: Vec::new(),
            rhs: Vec::new(),
            tags: Vec::new(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn push(&mut self, row: BitVec, rhs: bool, tag: RowTag) {
        assert_eq!(row.len(), self.nvars, "row width mismatch");
        self.rows.push(row);
        self.rhs.push(rhs);
        self.tags.push(tag);
    }

    /// Add the row `Σ vars = rhs`; repeated variables cancel.
    pub fn push_sparse(&mut self, vars: &[usize], rhs: bool, tag: RowTag) {
        let mut row = BitVec::zeros(self.nvars);
        for &v in vars {
            row.flip(v);
        }
        self.push(row, rhs, tag);
    }

    pub fn row(&self, i: usize) -> (&BitVec, bool, RowTag) {
        (&self.rows[i], self.rhs[i], self.tags[i])
    }

    pub fn tags(&self) -> &[RowTag] {
        &self.tags
    }

    /// Indices of rows violated by `assignment`.
    pub fn violations(&self, assignment: &BitVec) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&i| self.rows[i].dot(assignment) != self.rhs[i])
            .collect()
    }

    pub fn is_satisfied_by(&self, assignment: &BitVec) -> bool {
        self.violations(assignment).is_empty()
    }
}

/// How variables left free by elimination are set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeBitPolicy {
    Zeros,
    Random(u64),
    /// Value per variable; variables beyond the vector default to zero.
    Preferred(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub assignment: BitVec,
    pub free_variable_count: usize,
    pub rank: usize,
    pub pivot_columns: Vec<usize>,
    pub free_columns: Vec<usize>,
    /// Reduced rows, one per pivot column, without right-hand side.
    reduced: Vec<BitVec>,
}

impl Solution {
    /// A basis of the solution space's direction: one vector per free
    /// variable. Adding any combination to `assignment` gives another solution.
    pub fn nullspace_basis(&self) -> Vec<BitVec> {
        let nvars = self.assignment.len();
        self.free_columns
            .iter()
            .map(|&f| {
                let mut v = BitVec::zeros(nvars);
                v.set(f, true);
                for (row, &p) in self.reduced.iter().zip(&self.pivot_columns) {
                    if row.get(f) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Infeasible {
    pub rank: usize,
}

/// Reduce `[A | b]` to reduced row echelon form and read off one solution.
///
/// Returns `Err` exactly when some combination of rows reads `0 = 1`.
pub fn solve_gf2(sys: &LinearSystem, policy: &FreeBitPolicy) -> Result<Solution, Infeasible> {
    let n = sys.nvars;
    // Augmented rows: column `n` holds the right-hand side.
    let mut rows: Vec<BitVec> = sys
        .rows
        .iter()
        .zip(&sys.rhs)
        .map(|(r, &b)| {
            let mut a = BitVec::zeros(n + 1);
            for i in r.iter_ones() {
                a.set(i, true);
            }
            a.set(n, b);
            a
        })
        .collect();

    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r.get(n)) {
        return Err(Infeasible { rank });
    }

    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let free_columns: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();

    let mut assignment = BitVec::zeros(n);
    match policy {
        FreeBitPolicy::Zeros => {}
        FreeBitPolicy::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for &f in &free_columns {
                assignment.set(f, rng.gen());
            }
        }
        FreeBitPolicy::Preferred(values) => {
            for &f in &free_columns {
                assignment.set(f, values.get(f).copied().unwrap_or(false));
            }
        }
    }
    let mut reduced = Vec::with_capacity(rank);
    for (row, &p) in rows.iter().zip(&pivots) {
        let mut value = row.get(n);
        for f in row.iter_ones().filter(|&i| i < n && i != p) {
            value ^= assignment.get(f);
        }
        assignment.set(p, value);
        let mut coeffs = BitVec::zeros(n);
        for i in row.iter_ones().filter(|&i| i < n) {
            coeffs.set(i, true);
        }
        reduced.push(coeffs);
    }

    Ok(Solution {
        assignment,
        free_variable_count: free_columns.len(),
        rank,
        pivot_columns: pivots,
        free_columns,
        reduced,
    })
}

/// Row combinations of `sys` that cancel every variable.
///
/// Each returned vector has one bit per row of `sys`; the span is the whole
/// left null space of the coefficient matrix.
pub fn left_null_space(sys: &LinearSystem) -> Vec<BitVec> {
    let n = sys.nvars;
    let m = sys.rows.len();
    // Coefficients followed by an identity block that records combinations.
    let mut rows: Vec<BitVec> = sys
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut a = BitVec::zeros(n + m);
            for c in r.iter_ones() {
                a.set(c, true);
            }
            a.set(n + i, true);
            a
        })
        .collect();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for row in rows[rank + 1..].iter_mut() {
            if row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        rank += 1;
    }
    rows[rank..]
        .iter()
        .map(|r| {
            let mut y = BitVec::zeros(m);
            for i in r.iter_ones().filter(|&i| i >= n) {
                y.set(i - n, true);
            }
            y
        })
        .collect()
}
