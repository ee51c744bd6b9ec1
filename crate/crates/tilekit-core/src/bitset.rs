//! Fixed-width bitset used for adjacency rows and vertex sets.

use alloc::vec;
use alloc::vec::Vec;

/// A set over `0..width` backed by 64-bit words.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitSet {
    width: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(width: usize) -> Self {
        BitSet {
            width,
            words: vec![0; width.div_ceil(64)],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.width);
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.width);
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.width);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn clear(&mut self) {
        self.words.fill(0);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of elements in `self ∩ other`.
    pub fn intersection_count(&self, other: &BitSet) -> usize {
        debug_assert_eq!(self.width, other.width);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &BitSet) {
        debug_assert_eq!(self.width, other.width);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Number of set bits with index in `lo..hi`.
    pub fn count_range(&self, lo: usize, hi: usize) -> usize {
        debug_assert!(lo <= hi && hi <= self.width);
        let mut total = 0;
        let (wl, wh) = (lo / 64, hi.div_ceil(64));
        for w in wl..wh {
            let mut word = self.words[w];
            let base = w * 64;
            if base < lo {
                word &= !0 << (lo - base);
            }
            if base + 64 > hi {
                word &= !0 >> (base + 64 - hi);
            }
            total += word.count_ones() as usize;
        }
        total
    }

    /// Ascending indices of set bits.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            core::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    /// Ascending indices of set bits within `lo..hi`.
    pub fn iter_range(&self, lo: usize, hi: usize) -> impl Iterator<Item = usize> + '_ {
        self.iter().skip_while(move |&i| i < lo).take_while(move |&i| i < hi)
    }
}
