//! Fixed-length bit strings, the search points of every algorithm in the crate.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::rng::RandomSource;

const WORD: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid bit character {0:?} (expected '0' or '1')")]
    BadBit(char),
    #[error("invalid hex digit {0:?}")]
    BadHex(char),
    #[error("hex target has {got} digits, expected {expected} for n = {n}")]
    HexLength { got: usize, expected: usize, n: usize },
    #[error("hex target sets padding bits beyond position {0}")]
    HexPadding(usize),
}

/// A string in `{0,1}^n`, packed 64 positions per word.
///
/// Position `i` lives in word `i / 64` at bit `i % 64`. Padding bits of the
/// last word are always zero, so derived equality and hashing are bitwise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(WORD)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = Self {
            words: vec![!0; len.div_ceil(WORD)],
            len,
        };
        s.clear_padding();
        s
    }

    /// Uniformly random string; consumes `ceil(len / 64)` words from `rng`.
    pub fn random(len: usize, rng: &mut RandomSource) -> Self {
        let mut s = Self {
            words: (0..len.div_ceil(WORD)).map(|_| rng.next_word()).collect(),
            len,
        };
        s.clear_padding();
        s
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                s.set(i, true);
            }
        }
        s
    }

    /// Parses a hex string, most significant bit first: digit `j` carries
    /// positions `4j..4j+4`, the first of them in the digit's high bit.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self, BitsError> {
        let expected = len.div_ceil(4);
        let digits: Vec<char> = hex.chars().collect();
        if digits.len() != expected {
            return Err(BitsError::HexLength {
                got: digits.len(),
                expected,
                n: len,
            });
        }
        let mut s = Self::zeros(len);
        for (j, c) in digits.into_iter().enumerate() {
            let v = c.to_digit(16).ok_or(BitsError::BadHex(c))?;
            for b in 0..4 {
                if v & (8 >> b) != 0 {
                    let pos = 4 * j + b;
                    if pos >= len {
                        return Err(BitsError::HexPadding(len));
                    }
                    s.set(pos, true);
                }
            }
        }
        Ok(s)
    }

    pub fn to_hex(&self) -> String {
        (0..self.len.div_ceil(4))
            .map(|j| {
                let v = (0..4)
                    .filter(|&b| 4 * j + b < self.len && self.get(4 * j + b))
                    .fold(0u32, |acc, b| acc | (8 >> b));
                char::from_digit(v, 16).expect("nibble")
            })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Length of the maximal prefix of ones.
    pub fn leading_ones(&self) -> usize {
        let mut total = 0;
        for w in &self.words {
            if *w == !0 {
                total += WORD;
            } else {
                total += w.trailing_ones() as usize;
                break;
            }
        }
        total.min(self.len)
    }

    pub fn hamming(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "hamming distance of unequal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        Self {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a ^ b)
                .collect(),
            len: self.len,
        }
    }

    pub fn complement(&self) -> Self {
        let mut s = Self {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        s.clear_padding();
        s
    }

    /// Positions set to one, in increasing order.
    pub fn ones_positions(&self) -> impl Iterator<Item = usize> + '_ {
        set_bits(&self.words)
    }

    /// Positions where `self` and `other` differ, in increasing order.
    pub fn differing_positions<'a>(&'a self, other: &'a Self) -> impl Iterator<Item = usize> + 'a {
        assert_eq!(self.len, other.len, "comparison of unequal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .enumerate()
            .flat_map(|(wi, (a, b))| WordBits(a ^ b).map(move |b| wi * WORD + b))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    fn clear_padding(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

fn set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words
        .iter()
        .enumerate()
        .flat_map(|(wi, &w)| WordBits(w).map(move |b| wi * WORD + b))
}

struct WordBits(u64);

impl Iterator for WordBits {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}

impl FromStr for BitString {
    type Err = BitsError;

    /// Parses a string of `0`/`1` characters; `_` is ignored as a separator.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .filter(|&c| c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitsError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bools(&bits))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}
