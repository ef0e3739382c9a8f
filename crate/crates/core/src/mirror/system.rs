//! The GF(2) system whose solutions are grids readable both ways.
//!
//! Variables `0..208` are the physical data-region cells, numbered by their
//! position in the straight zigzag order. Side A reads codeword bit `t` from
//! variable `t`; side B reads it from the variable of the transposed cell.
//! Sharing the variable is what binds the two readings together.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::BitString;
use crate::format::MirrorFormat;
use crate::gf2::BitVec;
use crate::grid::{data_placement_order, mirrored_index, DATA_BITS, REGION_BITS};
use crate::masks::{mask_bit, MaskId};
use crate::rscode::{parity_matrix, DATA_CODEWORDS, TOTAL_CODEWORDS};
use crate::verify::Side;

use super::solve::{left_null_space, LinearSystem, RowTag};

/// Codeword bytes per side that the construction leaves to error
/// correction instead of constraining.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ErrorAllocation {
    pub side_a: BTreeSet<usize>,
    pub side_b: BTreeSet<usize>,
}

impl ErrorAllocation {
    pub fn new(
        side_a: impl IntoIterator<Item = usize>,
        side_b: impl IntoIterator<Item = usize>,
    ) -> Self {
        ErrorAllocation {
            side_a: side_a.into_iter().collect(),
            side_b: side_b.into_iter().collect(),
        }
    }

    pub fn side(&self, side: Side) -> &BTreeSet<usize> {
        match side {
            Side::A => &self.side_a,
            Side::B => &self.side_b,
        }
    }

    pub fn len(&self) -> usize {
        self.side_a.len() + self.side_b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl fmt::Display for ErrorAllocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{:?} B{:?}", self.side_a, self.side_b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("mask {0} is not transpose-symmetric")]
    AsymmetricMask(MaskId),
    #[error("side {side} pins {len} bits, capacity is {DATA_BITS}")]
    PayloadTooLong { side: Side, len: usize },
    #[error("side {side} allocates codeword {byte}, which does not exist")]
    BadAllocation { side: Side, byte: usize },
}

/// How one side reads the shared cells.
#[derive(Clone, Debug)]
pub struct SideView {
    pub side: Side,
    pub mask: MaskId,
    /// Variable holding codeword bit `t`.
    pub var_of: Vec<usize>,
    /// Mask value over the cell carrying codeword bit `t`.
    pub mask_of: Vec<bool>,
}

impl SideView {
    pub fn new(side: Side, mask: MaskId) -> Self {
        let order = data_placement_order();
        let var_of = order
            .iter()
            .map(|&c| match side {
                Side::A => placement_index_of(c),
                Side::B => mirrored_index(c).expect("data region is closed under transposition"),
            })
            .collect();
        // Side B sees the transposed grid, so its mask is evaluated in its
        // own frame at the cell it believes it is reading.
        let mask_of = order.iter().map(|&c| mask_bit(mask, c)).collect();
        SideView {
            side,
            mask,
            var_of,
            mask_of,
        }
    }

    /// Codeword bit `t` as read from the cell values `x`.
    pub fn read_bit(&self, x: &[bool], t: usize) -> bool {
        x[self.var_of[t]] ^ self.mask_of[t]
    }

    /// Store codeword bit `t` into the cell values `x`.
    pub fn write_bit(&self, x: &mut [bool], t: usize, bit: bool) {
        x[self.var_of[t]] = bit ^ self.mask_of[t];
    }

    pub fn read_codeword(&self, x: &[bool]) -> [u8; TOTAL_CODEWORDS] {
        let mut out = [0u8; TOTAL_CODEWORDS];
        for (k, byte) in out.iter_mut().enumerate() {
            for i in 0..8 {
                *byte = (*byte << 1) | self.read_bit(x, 8 * k + i) as u8;
            }
        }
        out
    }
}

fn placement_index_of(c: crate::grid::CellCoord) -> usize {
    crate::grid::placement_index(c).expect("cell is in the data region")
}

/// Both side views for a format choice.
pub fn side_views(format: &MirrorFormat) -> Result<(SideView, SideView), SystemError> {
    for mask in [format.straight.mask, format.mirrored.mask] {
        if !mask.is_symmetric() {
            return Err(SystemError::AsymmetricMask(mask));
        }
    }
    Ok((
        SideView::new(Side::A, format.straight.mask),
        SideView::new(Side::B, format.mirrored.mask),
    ))
}

fn check_inputs(
    msg_a: &BitString,
    msg_b: &BitString,
    alloc: &ErrorAllocation,
) -> Result<(), SystemError> {
    for (side, msg) in [(Side::A, msg_a), (Side::B, msg_b)] {
        if msg.len() > DATA_BITS {
            return Err(SystemError::PayloadTooLong {
                side,
                len: msg.len(),
            });
        }
        if let Some(&byte) = alloc.side(side).iter().find(|&&b| b >= TOTAL_CODEWORDS) {
            return Err(SystemError::BadAllocation { side, byte });
        }
    }
    Ok(())
}

/// The intended value of a data bit: an affine function of the variables.
#[derive(Clone, Copy)]
enum DataTerm {
    Const(bool),
    Var(usize, bool),
}

/// A constraint system together with its variable layout.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub system: LinearSystem,
    /// Variables past the 208 cells: free data bits of allocated bytes,
    /// as `(side, data bit)`.
    pub aux: Vec<(Side, usize)>,
}

impl ConstraintSystem {
    pub fn cell_values(&self, assignment: &BitVec) -> Vec<bool> {
        (0..REGION_BITS).map(|v| assignment.get(v)).collect()
    }
}

/// Build the system for pinned payload prefixes `msg_a`, `msg_b`.
///
/// Per side, every codeword byte outside the allocation is constrained: its
/// payload bits are pinned to the message and its parity bits are tied to
/// the intended data. Allocated bytes impose nothing; inside them the
/// intended data is the message where it is pinned and a fresh auxiliary
/// variable elsewhere, so the parity of the other bytes stays correct for
/// the codeword a decoder will reconstruct.
pub fn build_constraint_system(
    msg_a: &BitString,
    msg_b: &BitString,
    format: &MirrorFormat,
    alloc: &ErrorAllocation,
) -> Result<ConstraintSystem, SystemError> {
    check_inputs(msg_a, msg_b, alloc)?;
    let (view_a, view_b) = side_views(format)?;

    let mut terms: Vec<Vec<DataTerm>> = Vec::new();
    let mut aux = Vec::new();
    for (view, msg) in [(&view_a, msg_a), (&view_b, msg_b)] {
        let allocated = alloc.side(view.side);
        let side_terms = (0..DATA_BITS)
            .map(|j| {
                if allocated.contains(&(j / 8)) {
                    match msg.get(j) {
                        Some(bit) => DataTerm::Const(bit),
                        None => {
                            aux.push((view.side, j));
                            DataTerm::Var(REGION_BITS + aux.len() - 1, false)
                        }
                    }
                } else {
                    DataTerm::Var(view.var_of[j], view.mask_of[j])
                }
            })
            .collect();
        terms.push(side_terms);
    }

    let mut system = LinearSystem::new(REGION_BITS + aux.len());
    let parity = parity_matrix();
    for (view, msg, terms) in [(&view_a, msg_a, &terms[0]), (&view_b, msg_b, &terms[1])] {
        let allocated = alloc.side(view.side);
        for (j, &bit) in msg.bits().iter().enumerate() {
            if !allocated.contains(&(j / 8)) {
                system.push_sparse(
                    &[view.var_of[j]],
                    bit ^ view.mask_of[j],
                    RowTag::MessageBit {
                        side: view.side,
                        bit: j,
                    },
                );
            }
        }
        for p in 0..(TOTAL_CODEWORDS - DATA_CODEWORDS) * 8 {
            let t = DATA_BITS + p;
            if allocated.contains(&(t / 8)) {
                continue;
            }
            let mut vars = vec![view.var_of[t]];
            let mut rhs = view.mask_of[t];
            for j in parity.row(p).iter_ones() {
                match terms[j] {
                    DataTerm::Const(b) => rhs ^= b,
                    DataTerm::Var(v, m) => {
                        vars.push(v);
                        rhs ^= m;
                    }
                }
            }
            system.push_sparse(
                &vars,
                rhs,
                RowTag::ParityBit {
                    side: view.side,
                    byte: t / 8,
                    bit: p % 8,
                },
            );
        }
    }
    Ok(ConstraintSystem { system, aux })
}

/// Decides feasibility of many allocations for fixed messages quickly.
///
/// Every allocation is a row deletion from one fixed system that carries
/// explicit intended-data variables for both sides (allocating a data byte
/// deletes the rows linking its intended bits to the cells; allocating a
/// parity byte deletes its parity rows). A reduced system is infeasible
/// exactly when a combination of its rows cancels all variables but not
/// the right-hand side, so with a basis `K` of the full system's left null
/// space, deleting rows `D` leaves a feasible system iff `K·b` lies in the
/// span of the columns of `K` indexed by `D`.
#[derive(Clone, Debug)]
pub struct FeasibilityScreen {
    /// Column of `K` for each row of the full system.
    columns: Vec<BitVec>,
    /// `K·b`.
    target: BitVec,
    /// Rows removed by allocating byte `k`, per side.
    groups: [Vec<Vec<usize>>; 2],
}

impl FeasibilityScreen {
    pub fn new(
        msg_a: &BitString,
        msg_b: &BitString,
        format: &MirrorFormat,
    ) -> Result<Self, SystemError> {
        check_inputs(msg_a, msg_b, &ErrorAllocation::default())?;
        let (view_a, view_b) = side_views(format)?;
        // Variables: 208 cells, then 152 intended data bits for A, then B.
        let nvars = REGION_BITS + 2 * DATA_BITS;
        let mut sys = LinearSystem::new(nvars);
        let mut groups: [Vec<Vec<usize>>; 2] = [
            vec![Vec::new(); TOTAL_CODEWORDS],
            vec![Vec::new(); TOTAL_CODEWORDS],
        ];
        let parity = parity_matrix();
        for (s, (view, msg)) in [(&view_a, msg_a), (&view_b, msg_b)].into_iter().enumerate() {
            let data_var = |j: usize| REGION_BITS + s * DATA_BITS + j;
            for (j, &bit) in msg.bits().iter().enumerate() {
                sys.push_sparse(
                    &[data_var(j)],
                    bit,
                    RowTag::MessageBit {
                        side: view.side,
                        bit: j,
                    },
                );
            }
            for j in 0..DATA_BITS {
                groups[s][j / 8].push(sys.nrows());
                sys.push_sparse(
                    &[data_var(j), view.var_of[j]],
                    view.mask_of[j],
                    RowTag::DataLink {
                        side: view.side,
                        bit: j,
                    },
                );
            }
            for p in 0..(TOTAL_CODEWORDS - DATA_CODEWORDS) * 8 {
                let t = DATA_BITS + p;
                let mut vars = vec![view.var_of[t]];
                vars.extend(parity.row(p).iter_ones().map(data_var));
                groups[s][t / 8].push(sys.nrows());
                sys.push_sparse(
                    &vars,
                    view.mask_of[t],
                    RowTag::ParityBit {
                        side: view.side,
                        byte: t / 8,
                        bit: p % 8,
                    },
                );
            }
        }

        let null = left_null_space(&sys);
        let k = null.len();
        let mut columns = vec![BitVec::zeros(k); sys.nrows()];
        let mut target = BitVec::zeros(k);
        for (i, y) in null.iter().enumerate() {
            let mut acc = false;
            for r in y.iter_ones() {
                columns[r].set(i, true);
                acc ^= sys.row(r).1;
            }
            target.set(i, acc);
        }
        Ok(FeasibilityScreen {
            columns,
            target,
            groups,
        })
    }

    /// Whether the messages admit a solution with every byte constrained.
    pub fn unconstrained_feasible(&self) -> bool {
        self.target.is_zero()
    }

    pub fn is_feasible(&self, alloc: &ErrorAllocation) -> bool {
        self.is_feasible_cached(alloc, &mut None)
    }

    /// As [`Self::is_feasible`], reusing the span of the side-A rows from the
    /// previous call when the side-A bytes are unchanged.
    pub fn is_feasible_cached(
        &self,
        alloc: &ErrorAllocation,
        cache: &mut Option<SpanCache>,
    ) -> bool {
        if self.target.is_zero() {
            return true;
        }
        let reuse = matches!(cache, Some(c) if c.side_a == alloc.side_a);
        if !reuse {
            let mut span = Span::default();
            for &byte in &alloc.side_a {
                for &r in &self.groups[0][byte] {
                    span.insert(self.columns[r].clone());
                }
            }
            *cache = Some(SpanCache {
                side_a: alloc.side_a.clone(),
                span,
            });
        }
        let mut span = cache.as_ref().unwrap().span.clone();
        for &byte in &alloc.side_b {
            for &r in &self.groups[1][byte] {
                span.insert(self.columns[r].clone());
            }
        }
        let mut t = self.target.clone();
        span.reduce(&mut t);
        t.is_zero()
    }
}

/// Echelon basis in insertion order: each vector is zero at the leading
/// bits of all earlier ones.
#[derive(Clone, Debug, Default)]
struct Span {
    basis: Vec<(usize, BitVec)>,
}

impl Span {
    fn reduce(&self, v: &mut BitVec) {
        for (lead, b) in &self.basis {
            if v.get(*lead) {
                v.xor_assign(b);
            }
        }
    }

    fn insert(&mut self, mut v: BitVec) {
        self.reduce(&mut v);
        if let Some(lead) = v.next_one(0) {
            self.basis.push((lead, v));
        }
    }
}

/// Side-A span kept between calls of [`FeasibilityScreen::is_feasible_cached`].
#[derive(Clone, Debug)]
pub struct SpanCache {
    side_a: BTreeSet<usize>,
    span: Span,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{build_flip_graph, select_mirror_format, Domain};
    use crate::mirror::solve::{solve_gf2, FreeBitPolicy};

    fn format() -> MirrorFormat {
        select_mirror_format(&build_flip_graph(Domain::OnGrid)).unwrap()
    }

    fn bits(n: usize, seed: u64) -> BitString {
        let mut s = BitString::new();
        let mut x = seed;
        for _ in 0..n {
            x = x
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            s.push(x >> 63 == 1);
        }
        s
    }

    #[test]
    fn side_views_share_the_region() {
        let f = format();
        let (a, b) = side_views(&f).unwrap();
        assert_eq!(a.var_of, (0..REGION_BITS).collect::<Vec<_>>());
        let mut seen = b.var_of.clone();
        seen.sort_unstable();
        assert_eq!(seen, (0..REGION_BITS).collect::<Vec<_>>());
    }

    #[test]
    fn shapes_of_the_system() {
        let f = format();
        let sys =
            build_constraint_system(&bits(41, 1), &bits(41, 2), &f, &ErrorAllocation::default())
                .unwrap();
        assert_eq!(sys.system.nvars(), 208);
        assert_eq!(sys.system.nrows(), 41 + 41 + 112);
        let alloc = ErrorAllocation::new([0], [25]);
        let sys = build_constraint_system(&bits(41, 1), &bits(41, 2), &f, &alloc).unwrap();
        assert_eq!(sys.aux.len(), 0);
        assert_eq!(sys.system.nrows(), 33 + 41 + 112 - 8);
        let alloc = ErrorAllocation::new([5], []);
        let sys = build_constraint_system(&bits(41, 1), &bits(41, 2), &f, &alloc).unwrap();
        assert_eq!(sys.aux.len(), 7);
        assert_eq!(sys.system.nvars(), 215);
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = format();
        let mut bad = f;
        bad.mirrored.mask = MaskId::new(1).unwrap();
        assert_eq!(
            build_constraint_system(&bits(8, 1), &bits(8, 2), &bad, &ErrorAllocation::default())
                .unwrap_err(),
            SystemError::AsymmetricMask(MaskId::new(1).unwrap())
        );
        assert!(matches!(
            build_constraint_system(&bits(153, 1), &bits(8, 2), &f, &ErrorAllocation::default()),
            Err(SystemError::PayloadTooLong { side: Side::A, .. })
        ));
        assert!(matches!(
            build_constraint_system(
                &bits(8, 1),
                &bits(8, 2),
                &f,
                &ErrorAllocation::new([], [26])
            ),
            Err(SystemError::BadAllocation {
                side: Side::B,
                byte: 26
            })
        ));
    }

    #[test]
    fn screen_agrees_with_direct_solve() {
        let f = format();
        for (la, lb, seed) in [(41, 41, 3), (60, 52, 4), (74, 79, 5), (20, 90, 6)] {
            let (ma, mb) = (bits(la, seed), bits(lb, seed + 100));
            let screen = FeasibilityScreen::new(&ma, &mb, &f).unwrap();
            let mut x = seed;
            for _ in 0..60 {
                let mut pick = || {
                    x = x
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    ((x >> 33) % 26) as usize
                };
                let n = (pick() % 4, pick() % 4);
                let side_a: Vec<usize> = (0..n.0).map(|_| pick()).collect();
                let side_b: Vec<usize> = (0..n.1).map(|_| pick()).collect();
                let alloc = ErrorAllocation::new(side_a, side_b);
                let direct = build_constraint_system(&ma, &mb, &f, &alloc).unwrap();
                let solved = solve_gf2(&direct.system, &FreeBitPolicy::Zeros);
                assert_eq!(
                    screen.is_feasible(&alloc),
                    solved.is_ok(),
                    "{la}/{lb} {alloc}"
                );
            }
        }
    }

    #[test]
    fn cached_screen_matches_uncached() {
        let f = format();
        let (ma, mb) = (bits(74, 8), bits(57, 9));
        let screen = FeasibilityScreen::new(&ma, &mb, &f).unwrap();
        let part = crate::grid::overlap_partition(74, 57).unwrap();
        let mut cache = None;
        let mut feasible = 0;
        for alloc in crate::mirror::enumerate_error_allocations(&part).take(3000) {
            let cached = screen.is_feasible_cached(&alloc, &mut cache);
            assert_eq!(cached, screen.is_feasible(&alloc), "{alloc}");
            feasible += cached as usize;
        }
        assert!(feasible < 3000);
    }
}
