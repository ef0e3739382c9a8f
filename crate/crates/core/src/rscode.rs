//! Reed–Solomon (26, 19) over GF(256) as used by Version 1-L.
//!
//! The field is GF(2)[x] / (x^8 + x^4 + x^3 + x^2 + 1) with generator α = 2.
//! The code generator polynomial has roots α^0 .. α^6, so the decoder can
//! correct up to three symbol errors. Codeword byte `k` is the coefficient of
//! x^(25 - k).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign};
use std::sync::OnceLock;

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};

pub const DATA_CODEWORDS: usize = 19;
pub const ECC_CODEWORDS: usize = 7;
pub const TOTAL_CODEWORDS: usize = DATA_CODEWORDS + ECC_CODEWORDS;
/// Symbol errors correctable with seven parity codewords.
pub const MAX_CORRECTIONS: usize = 3;

const PRIMITIVE: u16 = 0x11D;

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

const fn build_tables() -> Tables {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u16 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        x <<= 1;
        if x & 0x100 != 0 {
            x ^= PRIMITIVE;
        }
        i += 1;
    }
    while i < 512 {
        exp[i] = exp[i - 255];
        i += 1;
    }
    Tables { exp, log }
}

static TABLES: Tables = build_tables();

/// An element of GF(256).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    /// α^k for any integer exponent.
    pub fn alpha_pow(k: i64) -> Gf256 {
        Gf256(TABLES.exp[k.rem_euclid(255) as usize])
    }

    /// Discrete logarithm base α; `None` for zero.
    pub fn log(self) -> Option<u8> {
        (self.0 != 0).then(|| TABLES.log[self.0 as usize])
    }

    pub fn inv(self) -> Gf256 {
        assert!(self.0 != 0, "zero has no inverse in GF(256)");
        Gf256(TABLES.exp[255 - TABLES.log[self.0 as usize] as usize])
    }

    pub fn pow(self, e: u32) -> Gf256 {
        match self.log() {
            None if e == 0 => Gf256::ONE,
            None => Gf256::ZERO,
            Some(l) => Gf256::alpha_pow(l as i64 * e as i64),
        }
    }
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

impl Add for Gf256 {
    type Output = Gf256;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

#[allow(clippy::suspicious_op_assign_impl)]
impl AddAssign for Gf256 {
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    fn mul(self, rhs: Gf256) -> Gf256 {
        if self.0 == 0 || rhs.0 == 0 {
            return Gf256::ZERO;
        }
        let l = TABLES.log[self.0 as usize] as usize + TABLES.log[rhs.0 as usize] as usize;
        Gf256(TABLES.exp[l])
    }
}

impl MulAssign for Gf256 {
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

impl Div for Gf256 {
    type Output = Gf256;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Gf256) -> Gf256 {
        self * rhs.inv()
    }
}

/// Generator polynomial ∏ (x - α^i), i in 0..7, highest degree first
/// (leading coefficient 1 omitted).
fn generator() -> &'static [Gf256; ECC_CODEWORDS] {
    static GEN: OnceLock<[Gf256; ECC_CODEWORDS]> = OnceLock::new();
    GEN.get_or_init(|| {
        // Coefficients low degree first while building.
        let mut poly = vec![Gf256::ONE];
        for i in 0..ECC_CODEWORDS {
            let root = Gf256::alpha_pow(i as i64);
            let mut next = vec![Gf256::ZERO; poly.len() + 1];
            for (j, &c) in poly.iter().enumerate() {
                next[j + 1] += c;
                next[j] += c * root;
            }
            poly = next;
        }
        let mut out = [Gf256::ZERO; ECC_CODEWORDS];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = poly[ECC_CODEWORDS - 1 - k];
        }
        out
    })
}

/// Systematic parity: the remainder of data·x^7 divided by the generator.
pub fn rs_encode(data: &[u8; DATA_CODEWORDS]) -> [u8; ECC_CODEWORDS] {
    let gen = generator();
    let mut rem = [Gf256::ZERO; ECC_CODEWORDS];
    for &d in data {
        let factor = Gf256(d) + rem[0];
        rem.copy_within(1.., 0);
        rem[ECC_CODEWORDS - 1] = Gf256::ZERO;
        for (r, &g) in rem.iter_mut().zip(gen.iter()) {
            *r += g * factor;
        }
    }
    rem.map(|g| g.0)
}

/// Data followed by its parity.
pub fn rs_codeword(data: &[u8; DATA_CODEWORDS]) -> [u8; TOTAL_CODEWORDS] {
    let mut out = [0u8; TOTAL_CODEWORDS];
    out[..DATA_CODEWORDS].copy_from_slice(data);
    out[DATA_CODEWORDS..].copy_from_slice(&rs_encode(data));
    out
}

/// S_i = r(α^i) for i in 0..7.
pub fn syndromes(received: &[u8; TOTAL_CODEWORDS]) -> [Gf256; ECC_CODEWORDS] {
    let mut out = [Gf256::ZERO; ECC_CODEWORDS];
    for (i, s) in out.iter_mut().enumerate() {
        let x = Gf256::alpha_pow(i as i64);
        *s = received
            .iter()
            .fold(Gf256::ZERO, |acc, &b| acc * x + Gf256(b));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsError {
    #[error("more than {MAX_CORRECTIONS} codeword errors")]
    TooManyErrors,
    #[error("error locator has no consistent root set")]
    LocatorMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corrected {
    pub data: [u8; DATA_CODEWORDS],
    pub codeword: [u8; TOTAL_CODEWORDS],
    /// Byte indices that were changed, ascending.
    pub corrected: Vec<usize>,
}

/// Correct up to three symbol errors.
///
/// Berlekamp–Massey finds the error locator, a Chien search its roots and
/// Forney's formula the magnitudes. The result is re-checked against the
/// syndromes before it is returned.
pub fn rs_decode(received: &[u8; TOTAL_CODEWORDS]) -> Result<Corrected, RsError> {
    let synd = syndromes(received);
    if synd.iter().all(|s| s.0 == 0) {
        return Ok(Corrected {
            data: received[..DATA_CODEWORDS].try_into().unwrap(),
            codeword: *received,
            corrected: Vec::new(),
        });
    }

    // Berlekamp–Massey; polynomials low degree first.
    let mut locator = vec![Gf256::ONE];
    let mut prev = vec![Gf256::ONE];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = Gf256::ONE;
    for n in 0..ECC_CODEWORDS {
        let mut disc = synd[n];
        for i in 1..=len.min(locator.len() - 1) {
            disc += locator[i] * synd[n - i];
        }
        if disc.0 == 0 {
            shift += 1;
            continue;
        }
        let coef = disc / prev_disc;
        let mut next = locator.clone();
        if next.len() < prev.len() + shift {
            next.resize(prev.len() + shift, Gf256::ZERO);
        }
        for (i, &p) in prev.iter().enumerate() {
            next[i + shift] += coef * p;
        }
        if 2 * len <= n {
            prev = std::mem::replace(&mut locator, next);
            len = n + 1 - len;
            prev_disc = disc;
            shift = 1;
        } else {
            locator = next;
            shift += 1;
        }
    }
    while locator.len() > 1 && locator.last() == Some(&Gf256::ZERO) {
        locator.pop();
    }
    let degree = locator.len() - 1;
    if degree > MAX_CORRECTIONS || degree != len {
        return Err(RsError::TooManyErrors);
    }

    // Chien search over the 26 valid positions.
    let eval =
        |poly: &[Gf256], x: Gf256| poly.iter().rev().fold(Gf256::ZERO, |acc, &c| acc * x + c);
    let positions: Vec<usize> = (0..TOTAL_CODEWORDS)
        .filter(|&k| {
            let power = (TOTAL_CODEWORDS - 1 - k) as i64;
            eval(&locator, Gf256::alpha_pow(-power)).0 == 0
        })
        .collect();
    if positions.len() != degree {
        return Err(RsError::LocatorMismatch);
    }

    // Ω = S·Λ mod x^7.
    let mut omega = vec![Gf256::ZERO; ECC_CODEWORDS];
    for (i, &s) in synd.iter().enumerate() {
        for (j, &l) in locator.iter().enumerate() {
            if i + j < ECC_CODEWORDS {
                omega[i + j] += s * l;
            }
        }
    }
    // Formal derivative: only odd-degree terms survive in characteristic 2.
    let derivative: Vec<Gf256> = locator
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| if i % 2 == 1 { c } else { Gf256::ZERO })
        .collect();

    let mut codeword = *received;
    for &k in &positions {
        let x = Gf256::alpha_pow((TOTAL_CODEWORDS - 1 - k) as i64);
        let x_inv = x.inv();
        let denom = eval(&derivative, x_inv);
        if denom.0 == 0 {
            return Err(RsError::LocatorMismatch);
        }
        let magnitude = x * eval(&omega, x_inv) / denom;
        codeword[k] ^= magnitude.0;
    }
    if syndromes(&codeword).iter().any(|s| s.0 != 0) {
        return Err(RsError::LocatorMismatch);
    }
    Ok(Corrected {
        data: codeword[..DATA_CODEWORDS].try_into().unwrap(),
        codeword,
        corrected: positions,
    })
}

/// The parity map as a 56×152 GF(2) matrix: parity bits = M · data bits,
/// bits taken MSB first within each codeword.
pub fn parity_matrix() -> &'static BitMatrix {
    static MATRIX: OnceLock<BitMatrix> = OnceLock::new();
    MATRIX.get_or_init(|| {
        let data_bits = DATA_CODEWORDS * 8;
        let ecc_bits = ECC_CODEWORDS * 8;
        let mut m = BitMatrix::zeros(ecc_bits, data_bits);
        for j in 0..data_bits {
            let mut data = [0u8; DATA_CODEWORDS];
            data[j / 8] = 0x80 >> (j % 8);
            let parity = rs_encode(&data);
            for p in 0..ecc_bits {
                if parity[p / 8] & (0x80 >> (p % 8)) != 0 {
                    m.set(p, j, true);
                }
            }
        }
        m
    })
}

/// Bytes to MSB-first bits.
pub fn bytes_to_bits(bytes: &[u8]) -> BitVec {
    let mut v = BitVec::zeros(bytes.len() * 8);
    for (i, &b) in bytes.iter().enumerate() {
        for k in 0..8 {
            if b & (0x80 >> k) != 0 {
                v.set(i * 8 + k, true);
            }
        }
    }
    v
}

/// MSB-first bits to bytes; `bits.len()` must be a multiple of 8.
pub fn bits_to_bytes(bits: &BitVec) -> Vec<u8> {
    assert_eq!(bits.len() % 8, 0);
    (0..bits.len() / 8)
        .map(|i| (0..8).fold(0u8, |acc, k| acc | ((bits.get(i * 8 + k) as u8) << (7 - k))))
        .collect()
}
