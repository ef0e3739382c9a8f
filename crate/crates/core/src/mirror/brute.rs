//! Randomised search for a double-sided grid.
//!
//! Each trial fills the data region at random, pins both payloads, writes
//! one side's parity honestly and then repairs as many of the other side's
//! damaged codewords as the first side's error budget allows. A trial
//! succeeds when both sides end up within Reed-Solomon reach.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::BitString;
use crate::format::MirrorFormat;
use crate::grid::{
    data_placement_order, function_pattern_grid, ModuleGrid, DATA_BITS, REGION_BITS,
};
use crate::rscode::{rs_codeword, rs_encode, DATA_CODEWORDS, MAX_CORRECTIONS, TOTAL_CODEWORDS};
use crate::symbol::write_format;
use crate::verify::Side;

use super::system::{side_views, SideView, SystemError};

/// Damage left by one trial: codewords of the honest side altered by the
/// repairs, and codewords of the other side still wrong.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Damage {
    pub honest_side: Side,
    pub honest: usize,
    pub residual: usize,
}

impl Damage {
    pub fn within_budget(&self) -> bool {
        self.honest <= MAX_CORRECTIONS && self.residual <= MAX_CORRECTIONS
    }
}

#[derive(Clone, Debug)]
pub struct BruteForceHit {
    pub grid: ModuleGrid,
    /// Zero-based index of the successful trial.
    pub trial: u64,
    pub damage: Damage,
    /// Codewords of the non-honest side rewritten to their intended value.
    pub repaired: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruteForceMiss {
    pub trials: u64,
    /// The trial that came closest, by residual damage.
    pub best: Option<Damage>,
}

struct Roles<'a> {
    honest: &'a SideView,
    other: &'a SideView,
    msg_honest: &'a BitString,
    msg_other: &'a BitString,
    /// Honest-side codeword bit stored in each variable.
    honest_bit_of_var: Vec<usize>,
}

impl<'a> Roles<'a> {
    fn new(
        honest: &'a SideView,
        other: &'a SideView,
        msg_honest: &'a BitString,
        msg_other: &'a BitString,
    ) -> Self {
        let mut honest_bit_of_var = vec![0; REGION_BITS];
        for (t, &v) in honest.var_of.iter().enumerate() {
            honest_bit_of_var[v] = t;
        }
        Roles {
            honest,
            other,
            msg_honest,
            msg_other,
            honest_bit_of_var,
        }
    }

    /// Run one trial on the cell values `x`, leaving the repaired cells in
    /// place. Returns the damage and the repaired codewords.
    fn trial(&self, x: &mut [bool]) -> (Damage, Vec<usize>) {
        for (t, &bit) in self.msg_other.bits().iter().enumerate() {
            self.other.write_bit(x, t, bit);
        }
        for (t, &bit) in self.msg_honest.bits().iter().enumerate() {
            self.honest.write_bit(x, t, bit);
        }
        let data: [u8; DATA_CODEWORDS] = self.honest.read_codeword(x)[..DATA_CODEWORDS]
            .try_into()
            .unwrap();
        let parity = rs_encode(&data);
        for (p, byte) in parity.iter().enumerate() {
            for i in 0..8 {
                self.honest
                    .write_bit(x, DATA_BITS + 8 * p + i, (byte >> (7 - i)) & 1 == 1);
            }
        }

        let received = self.other.read_codeword(x);
        let mut wanted: [u8; DATA_CODEWORDS] = received[..DATA_CODEWORDS].try_into().unwrap();
        for (t, &bit) in self.msg_other.bits().iter().enumerate() {
            let mask = 0x80u8 >> (t % 8);
            if bit {
                wanted[t / 8] |= mask;
            } else {
                wanted[t / 8] &= !mask;
            }
        }
        let ideal = rs_codeword(&wanted);

        // Each damaged codeword, with the honest-side codewords its repair
        // would touch.
        let damaged: Vec<(usize, u32)> = (0..TOTAL_CODEWORDS)
            .filter(|&k| received[k] != ideal[k])
            .map(|k| {
                let diff = received[k] ^ ideal[k];
                let cost = (0..8)
                    .filter(|i| (diff >> (7 - i)) & 1 == 1)
                    .fold(0u32, |acc, i| {
                        let v = self.other.var_of[8 * k + i];
                        acc | 1 << (self.honest_bit_of_var[v] / 8)
                    });
                (k, cost)
            })
            .collect();

        let mut best = (damaged.len(), 0u32, 0u64);
        search_repairs(&damaged, 0, 0, 0, 0, &mut best);
        let (residual, touched, chosen) = best;
        let repaired: Vec<usize> = damaged
            .iter()
            .enumerate()
            .filter(|(i, _)| chosen >> i & 1 == 1)
            .map(|(_, &(k, _))| k)
            .collect();
        for &k in &repaired {
            for i in 0..8 {
                self.other
                    .write_bit(x, 8 * k + i, (ideal[k] >> (7 - i)) & 1 == 1);
            }
        }
        let damage = Damage {
            honest_side: self.honest.side,
            honest: touched.count_ones() as usize,
            residual,
        };
        (damage, repaired)
    }
}

/// Branch and bound over which damaged codewords to repair, keeping the
/// honest side within its correction budget and minimising what is left.
fn search_repairs(
    damaged: &[(usize, u32)],
    i: usize,
    left: usize,
    touched: u32,
    chosen: u64,
    best: &mut (usize, u32, u64),
) {
    if left >= best.0 && !(left == best.0 && touched.count_ones() < best.1.count_ones()) {
        return;
    }
    if i == damaged.len() {
        *best = (left, touched, chosen);
        return;
    }
    let with = touched | damaged[i].1;
    if with.count_ones() as usize <= MAX_CORRECTIONS {
        search_repairs(damaged, i + 1, left, with, chosen | 1 << i, best);
    }
    search_repairs(damaged, i + 1, left + 1, touched, chosen, best);
}

pub(crate) fn grid_from_cells(x: &[bool], witness: u16) -> ModuleGrid {
    let mut grid = function_pattern_grid();
    for (v, &c) in data_placement_order().iter().enumerate() {
        grid.set(c, x[v]);
    }
    write_format(&mut grid, witness);
    grid
}

/// Run up to `trials` seeded trials. Each trial tries both choices of the
/// honest side on the same random fill; the outcome depends only on the
/// inputs and `seed`.
pub fn brute_force_search(
    msg_a: &BitString,
    msg_b: &BitString,
    format: &MirrorFormat,
    trials: u64,
    seed: u64,
) -> Result<Result<BruteForceHit, BruteForceMiss>, SystemError> {
    for (side, msg) in [(Side::A, msg_a), (Side::B, msg_b)] {
        if msg.len() > DATA_BITS {
            return Err(SystemError::PayloadTooLong {
                side,
                len: msg.len(),
            });
        }
    }
    let (view_a, view_b) = side_views(format)?;
    let roles = [
        Roles::new(&view_a, &view_b, msg_a, msg_b),
        Roles::new(&view_b, &view_a, msg_b, msg_a),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Damage> = None;
    let mut fill = vec![false; REGION_BITS];
    for trial in 0..trials {
        for cell in fill.iter_mut() {
            *cell = rng.gen();
        }
        for role in &roles {
            let mut x = fill.clone();
            let (damage, repaired) = role.trial(&mut x);
            if damage.within_budget() {
                return Ok(Ok(BruteForceHit {
                    grid: grid_from_cells(&x, format.witness),
                    trial,
                    damage,
                    repaired,
                }));
            }
            let better = match best {
                None => true,
                Some(b) => (damage.residual, damage.honest) < (b.residual, b.honest),
            };
            if better {
                best = Some(damage);
            }
        }
    }
    Ok(Err(BruteForceMiss { trials, best }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repair_search_respects_budget() {
        // Three damaged codewords, each touching its own honest codeword,
        // plus one that would need two more.
        let damaged = [(19, 0b1), (20, 0b10), (21, 0b100), (22, 0b11000)];
        let mut best = (damaged.len(), 0, 0);
        search_repairs(&damaged, 0, 0, 0, 0, &mut best);
        assert_eq!(best.0, 1);
        assert!(best.1.count_ones() <= 3);
    }

    #[test]
    fn repair_search_prefers_shared_costs() {
        let damaged = [(19, 0b1), (20, 0b1), (21, 0b1), (22, 0b1), (23, 0b10)];
        let mut best = (damaged.len(), 0, 0);
        search_repairs(&damaged, 0, 0, 0, 0, &mut best);
        assert_eq!(best.0, 0);
        assert_eq!(best.1, 0b11);
    }
}
