//! Format information: BCH(15,5) words, the fixed on-grid XOR pattern, and
//! the flip-graph that pairs codewords readable both straight and reversed.
//!
//! Words are 15-bit integers with bit 14 as the most significant (first)
//! character of the string form.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::masks::MaskId;

/// x^10 + x^8 + x^5 + x^4 + x^2 + x + 1
const GENERATOR: u16 = 0b101_0011_0111;
/// XOR pattern applied to every format word before it is drawn.
pub const FORMAT_MASK: u16 = 0b101_0100_0001_0010;
/// Bit errors BCH(15,5) corrects.
pub const MAX_FORMAT_ERRORS: u32 = 3;
/// Index of the middle bit, hit by the dark module on the mirrored reading.
pub const MIDDLE_BIT: u32 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("no format codeword within distance {MAX_FORMAT_ERRORS} of {0:015b}")]
    Undecodable(u16),
    #[error("no admissible mirror format witness in the {0} domain")]
    NoWitness(Domain),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EcLevel {
    L,
    M,
    Q,
    H,
}

impl EcLevel {
    pub fn bits(self) -> u8 {
        match self {
            EcLevel::L => 0b01,
            EcLevel::M => 0b00,
            EcLevel::Q => 0b11,
            EcLevel::H => 0b10,
        }
    }

    pub fn from_bits(bits: u8) -> EcLevel {
        match bits & 0b11 {
            0b01 => EcLevel::L,
            0b00 => EcLevel::M,
            0b11 => EcLevel::Q,
            _ => EcLevel::H,
        }
    }
}

impl fmt::Display for EcLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// The five information bits of a format word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FormatWord {
    pub ec: EcLevel,
    pub mask: MaskId,
}

impl FormatWord {
    pub fn new(ec: EcLevel, mask: MaskId) -> Self {
        FormatWord { ec, mask }
    }

    pub fn info(self) -> u8 {
        (self.ec.bits() << 3) | self.mask.value()
    }

    pub fn from_info(info: u8) -> Self {
        FormatWord {
            ec: EcLevel::from_bits(info >> 3),
            mask: MaskId::new(info & 7).unwrap(),
        }
    }

    /// BCH codeword before the on-grid XOR.
    pub fn codeword(self) -> u16 {
        bch_encode(self.info())
    }

    /// The 15 bits as drawn on the grid.
    pub fn on_grid(self) -> u16 {
        apply_format_mask(self.codeword())
    }

    pub fn bch_parity(self) -> u16 {
        self.codeword() & 0x3FF
    }
}

pub fn bits15(word: u16) -> String {
    format!("{word:015b}")
}

/// Reverse the order of the 15 bits.
pub fn reverse15(word: u16) -> u16 {
    word.reverse_bits() >> 1
}

fn distance(a: u16, b: u16) -> u32 {
    (a ^ b).count_ones()
}

/// Systematic BCH(15,5): `info` followed by the remainder of info·x^10.
pub fn bch_encode(info: u8) -> u16 {
    let info = (info & 0x1F) as u16;
    let mut rem = info << 10;
    for shift in (0..5).rev() {
        if rem & (1 << (shift + 10)) != 0 {
            rem ^= GENERATOR << shift;
        }
    }
    (info << 10) | rem
}

/// Nearest codeword within distance 3, as (info bits, distance).
///
/// The code has minimum distance 7, so radius-3 balls are disjoint and the
/// answer is unique whenever it exists.
pub fn bch_decode(word: u16) -> Result<(u8, u32), FormatError> {
    let word = word & 0x7FFF;
    (0u8..32)
        .map(|info| (info, distance(word, bch_encode(info))))
        .filter(|&(_, d)| d <= MAX_FORMAT_ERRORS)
        .min_by_key(|&(_, d)| d)
        .ok_or(FormatError::Undecodable(word))
}

pub fn apply_format_mask(word: u16) -> u16 {
    word ^ FORMAT_MASK
}

/// Which 15-bit strings the flip-graph is built over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Strings as drawn on the grid, after the fixed XOR pattern.
    OnGrid,
    /// Bare BCH codewords.
    Raw,
}

impl Domain {
    pub fn node(self, info: u8) -> u16 {
        match self {
            Domain::OnGrid => apply_format_mask(bch_encode(info)),
            Domain::Raw => bch_encode(info),
        }
    }

    /// Decode a string of this domain.
    pub fn decode(self, word: u16) -> Result<(u8, u32), FormatError> {
        match self {
            Domain::OnGrid => bch_decode(apply_format_mask(word)),
            Domain::Raw => bch_decode(word),
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::OnGrid => "on-grid",
            Domain::Raw => "raw",
        })
    }
}

/// A 15-bit string that decodes to `from` straight and to `to` reversed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub word: u16,
    pub from: u8,
    pub to: u8,
    pub dist_from: u32,
    pub dist_to: u32,
}

impl Witness {
    pub fn total(&self) -> u32 {
        self.dist_from + self.dist_to
    }

    pub fn reversed(&self) -> Witness {
        Witness {
            word: reverse15(self.word),
            from: self.to,
            to: self.from,
            dist_from: self.dist_to,
            dist_to: self.dist_from,
        }
    }
}

/// Undirected edge keyed by `(min, max)` info value; `best` is oriented
/// from the lower node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipEdge {
    pub a: u8,
    pub b: u8,
    pub best: Witness,
    pub witness_count: usize,
}

#[derive(Clone, Debug)]
pub struct FlipGraph {
    pub domain: Domain,
    /// Node `i` is the string for info value `i`.
    pub nodes: [u16; 32],
    pub edges: Vec<FlipEdge>,
    /// Every enumerated string whose reversal also decodes.
    pub witnesses: Vec<Witness>,
    /// Strings examined: all radius ≤ 3 neighbourhoods (32 × 576).
    pub candidates: usize,
    /// Strings on the radius-3 shells only (32 × C(15,3)).
    pub shell_candidates: usize,
    /// Distinct strings examined.
    pub distinct_candidates: usize,
}

impl FlipGraph {
    pub fn edge(&self, a: u8, b: u8) -> Option<&FlipEdge> {
        let (a, b) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.a == a && e.b == b)
    }

    pub fn has_self_loop(&self, a: u8) -> bool {
        self.edge(a, a).is_some()
    }

    /// Graphviz rendering; nodes are labelled by their 5 information bits.
    pub fn to_dot(&self) -> String {
        let mut out = String::new();
        out.push_str("graph flip {\n");
        out.push_str(&format!(
            "  label=\"flip-graph ({} domain)\";\n",
            self.domain
        ));
        for info in 0..32u8 {
            let w = FormatWord::from_info(info);
            out.push_str(&format!(
                "  n{info:05b} [label=\"{info:05b}\" tooltip=\"ec {} mask {} word {}\"];\n",
                w.ec,
                w.mask,
                bits15(self.nodes[info as usize])
            ));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  n{:05b} -- n{:05b} [label=\"{} ({}+{})\"];\n",
                e.a,
                e.b,
                bits15(e.best.word),
                e.best.dist_from,
                e.best.dist_to
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// All 15-bit patterns of weight 0..=3.
fn error_patterns() -> impl Iterator<Item = u16> {
    (0u16..1 << 15).filter(|e| e.count_ones() <= MAX_FORMAT_ERRORS)
}

/// Enumerate every string within radius 3 of each node and join the nodes
/// whose reversed strings land inside another node's radius-3 ball.
pub fn build_flip_graph(domain: Domain) -> FlipGraph {
    let nodes: [u16; 32] = std::array::from_fn(|i| domain.node(i as u8));
    let mut witnesses = Vec::new();
    let mut candidates = 0;
    let mut shell_candidates = 0;
    let mut seen = std::collections::HashSet::new();
    for info in 0u8..32 {
        for e in error_patterns() {
            let word = nodes[info as usize] ^ e;
            candidates += 1;
            if e.count_ones() == MAX_FORMAT_ERRORS {
                shell_candidates += 1;
            }
            seen.insert(word);
            if let Ok((to, dist_to)) = domain.decode(reverse15(word)) {
                witnesses.push(Witness {
                    word,
                    from: info,
                    to,
                    dist_from: e.count_ones(),
                    dist_to,
                });
            }
        }
    }
    let mut edges: BTreeMap<(u8, u8), FlipEdge> = BTreeMap::new();
    for w in &witnesses {
        let oriented = if w.from <= w.to { *w } else { w.reversed() };
        let key = (oriented.from, oriented.to);
        edges
            .entry(key)
            .and_modify(|e| {
                e.witness_count += 1;
                if (oriented.total(), oriented.word) < (e.best.total(), e.best.word) {
                    e.best = oriented;
                }
            })
            .or_insert(FlipEdge {
                a: key.0,
                b: key.1,
                best: oriented,
                witness_count: 1,
            });
    }
    FlipGraph {
        domain,
        nodes,
        edges: edges.into_values().collect(),
        witnesses,
        candidates,
        shell_candidates,
        distinct_candidates: seen.len(),
    }
}

/// Format chosen for a double-sided symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MirrorFormat {
    /// The 15 bits drawn into both format areas, in on-grid form.
    pub witness: u16,
    /// Decoded format and distance of the straight reading.
    pub straight: FormatWord,
    pub straight_distance: u32,
    /// Decoded format and distance of the mirrored reading.
    pub mirrored: FormatWord,
    pub mirrored_distance: u32,
}

impl MirrorFormat {
    pub fn witness_string(&self) -> String {
        bits15(self.witness)
    }

    pub fn is_self_loop(&self) -> bool {
        self.straight == self.mirrored
    }
}

/// Pick the witness to draw for a double-sided symbol.
///
/// Admissible witnesses come from the on-grid graph, decode to level L with
/// a transpose-symmetric mask in both directions and have the middle bit set
/// (the mirrored reading sees the dark module there). Ties are broken by
/// total distance, then self-loops, then the lower mask ids, then the
/// smaller worst-side distance, then the numeric value of the word.
pub fn select_mirror_format(graph: &FlipGraph) -> Result<MirrorFormat, FormatError> {
    if graph.domain != Domain::OnGrid {
        return Err(FormatError::NoWitness(graph.domain));
    }
    graph
        .witnesses
        .iter()
        .filter(|w| {
            let (a, b) = (FormatWord::from_info(w.from), FormatWord::from_info(w.to));
            a.ec == EcLevel::L
                && b.ec == EcLevel::L
                && a.mask.is_symmetric()
                && b.mask.is_symmetric()
                && (w.word >> MIDDLE_BIT) & 1 == 1
        })
        .min_by_key(|w| {
            let (a, b) = (FormatWord::from_info(w.from), FormatWord::from_info(w.to));
            (
                w.total(),
                w.from != w.to,
                a.mask.value(),
                b.mask.value(),
                w.dist_from.max(w.dist_to),
                w.word,
            )
        })
        .map(|w| MirrorFormat {
            witness: w.word,
            straight: FormatWord::from_info(w.from),
            straight_distance: w.dist_from,
            mirrored: FormatWord::from_info(w.to),
            mirrored_distance: w.dist_to,
        })
        .ok_or(FormatError::NoWitness(graph.domain))
}

/// Whether `word` reads as a flip-graph witness in `domain`: both it and its
/// reversal decode within distance 3.
pub fn witness_in(domain: Domain, word: u16) -> Option<Witness> {
    let (from, dist_from) = domain.decode(word).ok()?;
    let (to, dist_to) = domain.decode(reverse15(word)).ok()?;
    Some(Witness {
        word,
        from,
        to,
        dist_from,
        dist_to,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Long division over GF(2), written independently of `bch_encode`.
    fn remainder_by_long_division(info: u8) -> u16 {
        let mut dividend: Vec<u8> = format!("{:05b}", info).bytes().map(|b| b - b'0').collect();
        dividend.extend(std::iter::repeat_n(0, 10));
        let divisor = [1u8, 0, 1, 0, 0, 1, 1, 0, 1, 1, 1];
        for i in 0..5 {
            if dividend[i] == 1 {
                for (j, d) in divisor.iter().enumerate() {
                    dividend[i + j] ^= d;
                }
            }
        }
        dividend[5..]
            .iter()
            .fold(0u16, |acc, &b| (acc << 1) | b as u16)
    }

    #[test]
    fn encode_matches_long_division() {
        for info in 0..32u8 {
            assert_eq!(bch_encode(info) & 0x3FF, remainder_by_long_division(info));
            assert_eq!(bch_encode(info) >> 10, info as u16);
        }
        assert_eq!(bch_encode(0), 0);
    }

    #[test]
    fn thirty_two_distinct_codewords() {
        let set: std::collections::BTreeSet<_> = (0..32u8).map(bch_encode).collect();
        assert_eq!(set.len(), 32);
    }

    #[test]
    fn known_on_grid_words() {
        // L / mask 0 and M / mask 7 from the standard's format table.
        let l0 = FormatWord::new(EcLevel::L, MaskId::new(0).unwrap());
        assert_eq!(bits15(l0.on_grid()), "111011111000100");
        let m7 = FormatWord::new(EcLevel::M, MaskId::new(7).unwrap());
        assert_eq!(bits15(m7.on_grid()), "100101010100000");
    }

    #[test]
    fn mask_is_an_involution() {
        assert_eq!(apply_format_mask(0), FORMAT_MASK);
        for w in [0u16, 0x1234, 0x7FFF] {
            assert_eq!(apply_format_mask(apply_format_mask(w)), w);
        }
    }

    #[test]
    fn decode_clean_and_failure() {
        assert_eq!(bch_decode(bch_encode(0b01011)), Ok((0b01011, 0)));
        let far = (0u16..1 << 15)
            .find(|&w| (0..32u8).all(|i| distance(w, bch_encode(i)) >= 4))
            .expect("some word lies outside every radius-3 ball");
        assert_eq!(bch_decode(far), Err(FormatError::Undecodable(far)));
    }

    #[test]
    fn reverse_is_an_involution() {
        assert_eq!(reverse15(0b100000000000000), 1);
        assert_eq!(bits15(reverse15(0b100101010100001)), "100001010101001");
    }

    #[test]
    fn flip_graph_is_symmetric() {
        let g = build_flip_graph(Domain::OnGrid);
        for w in &g.witnesses {
            let r = w.reversed();
            assert_eq!(witness_in(Domain::OnGrid, r.word), Some(r));
        }
    }

    #[test]
    fn selected_format_has_middle_bit_and_level_l() {
        let g = build_flip_graph(Domain::OnGrid);
        let f = select_mirror_format(&g).unwrap();
        assert_eq!((f.witness >> MIDDLE_BIT) & 1, 1);
        assert_eq!(f.straight.ec, EcLevel::L);
        assert_eq!(f.mirrored.ec, EcLevel::L);
        assert!(f.straight.mask.is_symmetric() && f.mirrored.mask.is_symmetric());
        assert!(f.straight_distance <= 3 && f.mirrored_distance <= 3);
        assert_eq!(
            select_mirror_format(&build_flip_graph(Domain::Raw)),
            Err(FormatError::NoWitness(Domain::Raw))
        );
    }
}
