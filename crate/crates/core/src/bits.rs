//! Fixed-width bit vectors for edge subsets `S ⊆ E` and spin configurations
//! `σ : V → {0,1}`.
//!
//! Both types share one packed representation. The partial order `⪯` used by
//! the monotone coupling is [`EdgeSubset::is_subset_of`].

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Bits {
    len: usize,
    words: Vec<u64>,
}

impl Bits {
    fn zeros(len: usize) -> Self {
        Bits { len, words: vec![0; len.div_ceil(64)] }
    }

    fn ones(len: usize) -> Self {
        let mut b = Bits { len, words: vec![u64::MAX; len.div_ceil(64)] };
        b.trim();
        b
    }

    fn trim(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn from_index(len: usize, index: u64) -> Self {
        assert!(len <= 64, "index encoding supports at most 64 bits");
        let mut b = Bits::zeros(len);
        if len > 0 {
            b.words[0] = index;
            b.trim();
        }
        b
    }

    fn to_index(&self) -> u64 {
        assert!(self.len <= 64, "index encoding supports at most 64 bits");
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + tz)
                }
            })
        })
    }

    fn is_subset_of(&self, other: &Bits) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn zip_with(&self, other: &Bits, f: impl Fn(u64, u64) -> u64) -> Bits {
        assert_eq!(self.len, other.len, "bit widths differ");
        Bits {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// Hex digits of the integer `Σ_i bit_i 2^i`, most significant first,
    /// zero-padded to `ceil(len / 4)` digits.
    fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut out = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let i = d * 4 + b;
                if i < self.len && self.get(i) {
                    nibble |= 1 << b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    fn from_hex(len: usize, hex: &str) -> Result<Bits> {
        let mut b = Bits::zeros(len);
        let digits: Vec<char> = hex.trim().chars().collect();
        for (pos, c) in digits.iter().rev().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidParameter(format!("invalid hex digit {c:?}")))?;
            for bit in 0..4 {
                if nibble >> bit & 1 == 1 {
                    let i = pos * 4 + bit;
                    if i >= len {
                        return Err(Error::InvalidParameter(format!(
                            "hex state {hex:?} does not fit in {len} bits"
                        )));
                    }
                    b.set(i, true);
                }
            }
        }
        Ok(b)
    }

    /// Packed little-endian bytes (bit `i` is bit `i % 8` of byte `i / 8`).
    fn to_bytes(&self) -> Vec<u8> {
        let n = self.len.div_ceil(8);
        (0..n).map(|k| (self.words[k / 8] >> ((k % 8) * 8)) as u8).collect()
    }

    fn from_bytes(len: usize, bytes: &[u8]) -> Result<Bits> {
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::DimensionMismatch { expected: len.div_ceil(8), actual: bytes.len() });
        }
        let mut b = Bits::zeros(len);
        for (k, &byte) in bytes.iter().enumerate() {
            b.words[k / 8] |= (byte as u64) << ((k % 8) * 8);
        }
        let before = b.clone();
        b.trim();
        if b != before {
            return Err(Error::InvalidParameter("padding bits set".into()));
        }
        Ok(b)
    }
}

macro_rules! bitset_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(Bits);

        impl $name {
            /// All-zero vector of the given width.
            pub fn empty(len: usize) -> Self {
                $name(Bits::zeros(len))
            }

            /// All-one vector of the given width.
            pub fn full(len: usize) -> Self {
                $name(Bits::ones(len))
            }

            /// Decode from the canonical enumeration index (bit `i` of `index`
            /// is coordinate `i`). Width must be at most 64.
            pub fn from_index(len: usize, index: u64) -> Self {
                $name(Bits::from_index(len, index))
            }

            /// Canonical enumeration index; inverse of [`Self::from_index`].
            pub fn to_index(&self) -> u64 {
                self.0.to_index()
            }

            pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
                let mut b = Bits::zeros(len);
                for i in ones {
                    b.set(i, true);
                }
                $name(b)
            }

            pub fn len(&self) -> usize {
                self.0.len
            }

            pub fn is_empty(&self) -> bool {
                self.0.len == 0
            }

            #[inline]
            pub fn get(&self, i: usize) -> bool {
                self.0.get(i)
            }

            #[inline]
            pub fn set(&mut self, i: usize, value: bool) {
                self.0.set(i, value)
            }

            #[inline]
            pub fn flip(&mut self, i: usize) {
                self.0.flip(i)
            }

            pub fn count_ones(&self) -> usize {
                self.0.count_ones()
            }

            pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
                self.0.iter_ones()
            }

            /// Coordinatewise `self ≤ other`.
            pub fn is_subset_of(&self, other: &Self) -> bool {
                self.0.is_subset_of(&other.0)
            }

            pub fn union(&self, other: &Self) -> Self {
                $name(self.0.zip_with(&other.0, |a, b| a | b))
            }

            pub fn intersection(&self, other: &Self) -> Self {
                $name(self.0.zip_with(&other.0, |a, b| a & b))
            }

            pub fn symmetric_difference(&self, other: &Self) -> Self {
                $name(self.0.zip_with(&other.0, |a, b| a ^ b))
            }

            pub fn to_hex(&self) -> String {
                self.0.to_hex()
            }

            pub fn from_hex(len: usize, hex: &str) -> Result<Self> {
                Bits::from_hex(len, hex).map($name)
            }

            pub fn to_bytes(&self) -> Vec<u8> {
                self.0.to_bytes()
            }

            pub fn from_bytes(len: usize, bytes: &[u8]) -> Result<Self> {
                Bits::from_bytes(len, bytes).map($name)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}[", stringify!($name))?;
                for i in 0..self.len() {
                    write!(f, "{}", self.get(i) as u8)?;
                }
                write!(f, "]")
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.to_hex())
            }
        }
    };
}

bitset_newtype!(
    /// A subset `S ⊆ E`, bit `e` set iff `e ∈ S`.
    EdgeSubset
);

bitset_newtype!(
    /// A spin configuration, bit `v` is `σ(v)`.
    SpinConfig
);
