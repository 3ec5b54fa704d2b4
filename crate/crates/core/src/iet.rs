//! Interval exchange transformations in canonical (merged) form.
//!
//! An IET is stored as its length vector and underlying permutation; the
//! breakpoints and translation vector are derived once at construction.
//! Canonical form merges adjacent intervals whose images stay adjacent, so
//! the permutation always satisfies sigma(i+1) != sigma(i) + 1 and equality
//! of IETs is a structural comparison.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::neighborhoods::{IntervalSet, PointSet};
use crate::scalar::Scalar;

/// Underlying permutation of an IET: `rank(i)` is the position (0-based) of
/// interval `i`'s image among all images, left to right.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct Permutation {
    ranks: Vec<usize>,
}

impl Permutation {
    /// Builds from the conventional 1-based image list `sigma(1..n)`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::InvalidIet(format!(
                    "permutation {images:?} is not a bijection on 1..{n}"
                )));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation {
            ranks: images.iter().map(|&v| v - 1).collect(),
        })
    }

    pub(crate) fn from_ranks(ranks: Vec<usize>) -> Self {
        Permutation { ranks }
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.ranks.iter().map(|&r| r + 1).collect()
    }

    pub fn n(&self) -> usize {
        self.ranks.len()
    }

    /// 0-based rank of interval `i`'s image.
    pub fn rank(&self, i: usize) -> usize {
        self.ranks[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.ranks.len()];
        for (i, &r) in self.ranks.iter().enumerate() {
            inv[r] = i;
        }
        Permutation { ranks: inv }
    }

    /// Merged-form constraint: no interval's image stays immediately after
    /// its left neighbour's image.
    pub fn is_merged(&self) -> bool {
        self.ranks.windows(2).all(|w| w[1] != w[0] + 1)
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.one_based().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let images = Vec::<usize>::deserialize(deserializer)?;
        Permutation::from_one_based(&images).map_err(D::Error::custom)
    }
}

/// Distance between two IETs: the L1 distance of length vectors when the
/// canonical permutations agree, infinity otherwise.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Distance {
    Finite(Scalar),
    Infinite,
}

impl Distance {
    pub fn is_less_than(&self, bound: &Scalar) -> bool {
        match self {
            Distance::Finite(d) => d < bound,
            Distance::Infinite => false,
        }
    }

    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

/// An interval exchange transformation of [0, 1) in canonical form.
#[derive(Clone)]
pub struct Iet {
    lengths: Vec<Scalar>,
    perm: Permutation,
    /// cuts[0] = 0 < cuts[1] < ... < cuts[n] = 1
    cuts: Vec<Scalar>,
    translations: Vec<Scalar>,
}

impl PartialEq for Iet {
    fn eq(&self, other: &Self) -> bool {
        self.perm == other.perm && self.lengths == other.lengths
    }
}

impl Eq for Iet {}

impl fmt::Debug for Iet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Iet {{ lengths: {:?}, perm: {:?} }}",
            self.lengths,
            self.perm.one_based()
        )
    }
}

impl Iet {
    /// Builds an IET from positive lengths summing to 1 and a permutation.
    /// The input need not be merged; the result is canonical.
    pub fn new(lengths: Vec<Scalar>, perm: Permutation) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidIet("no intervals".into()));
        }
        if lengths.len() != perm.n() {
            return Err(Error::InvalidIet(format!(
                "{} lengths vs permutation on {} symbols",
                lengths.len(),
                perm.n()
            )));
        }
        let mut sum = Scalar::zero();
        for (i, l) in lengths.iter().enumerate() {
            if !l.is_positive() {
                return Err(Error::InvalidIet(format!(
                    "length {l} at index {i} is not positive"
                )));
            }
            sum = sum + l;
        }
        if sum != Scalar::one() {
            return Err(Error::InvalidIet(format!("lengths sum to {sum}, not 1")));
        }
        Ok(Self::canonical(lengths, perm.ranks))
    }

    /// Merges maximal runs of intervals whose images remain adjacent and in
    /// order, then derives cuts and translations.
    fn canonical(lengths: Vec<Scalar>, ranks: Vec<usize>) -> Self {
        let n = lengths.len();
        // Split the domain into maximal runs with consecutive image ranks.
        let mut run_lengths: Vec<Scalar> = Vec::new();
        let mut run_keys: Vec<usize> = Vec::new(); // rank of the run's first piece
        let mut i = 0;
        while i < n {
            let mut len = lengths[i].clone();
            let key = ranks[i];
            let mut j = i + 1;
            while j < n && ranks[j] == ranks[j - 1] + 1 {
                len = len + &lengths[j];
                j += 1;
            }
            run_lengths.push(len);
            run_keys.push(key);
            i = j;
        }
        // Rank the runs by image position.
        let m = run_lengths.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&r| run_keys[r]);
        let mut run_ranks = vec![0usize; m];
        for (pos, &r) in order.iter().enumerate() {
            run_ranks[r] = pos;
        }
        debug_assert!(Permutation::from_ranks(run_ranks.clone()).is_merged());

        let perm = Permutation::from_ranks(run_ranks);
        let cuts = {
            let mut c = Vec::with_capacity(m + 1);
            c.push(Scalar::zero());
            let mut acc = Scalar::zero();
            for l in &run_lengths {
                acc = acc + l;
                c.push(acc.clone());
            }
            c
        };
        // Image start of interval i: total length of intervals ranked below it.
        let inv = perm.inverse();
        let mut image_cut = Scalar::zero();
        let mut image_starts = vec![Scalar::zero(); m];
        for pos in 0..m {
            let i = inv.rank(pos);
            image_starts[i] = image_cut.clone();
            image_cut = image_cut + &run_lengths[i];
        }
        let translations = (0..m)
            .map(|i| &image_starts[i] - &cuts[i])
            .collect();
        Iet {
            lengths: run_lengths,
            perm,
            cuts,
            translations,
        }
    }

    pub fn identity() -> Self {
        Iet::new(vec![Scalar::one()], Permutation::from_ranks(vec![0])).unwrap()
    }

    /// The rotation x -> x + r mod 1 for r in [0, 1).
    pub fn rotation(r: Scalar) -> Result<Self> {
        if r.is_negative() || r >= Scalar::one() {
            return Err(Error::InvalidIet(format!("rotation angle {r} not in [0,1)")));
        }
        if r.is_zero() {
            return Ok(Iet::identity());
        }
        Iet::new(
            vec![Scalar::one() - &r, r],
            Permutation::from_one_based(&[2, 1])?,
        )
    }

    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[Scalar] {
        &self.lengths
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    /// Interior discontinuity points b_1 < ... < b_{n-1}.
    pub fn breakpoints(&self) -> &[Scalar] {
        &self.cuts[1..self.n()]
    }

    /// Translation amounts per interval; each lies in (-1, 1).
    pub fn translations(&self) -> &[Scalar] {
        &self.translations
    }

    /// The discontinuity set Delta(T). In canonical form every interior
    /// breakpoint is a genuine discontinuity.
    pub fn discontinuities(&self) -> PointSet {
        PointSet::from_points(self.breakpoints().to_vec())
    }

    /// Delta(T^{-1}): the interior breakpoints of the image partition.
    pub fn inverse_discontinuities(&self) -> PointSet {
        self.inverse().discontinuities()
    }

    /// Index of the continuity interval containing x in [0, 1).
    fn locate(&self, x: &Scalar) -> usize {
        // cuts is sorted; find the last cut <= x.
        let mut lo = 0usize;
        let mut hi = self.n(); // invariant: cuts[lo] <= x < cuts[hi]
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if &self.cuts[mid] <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn evaluate(&self, x: &Scalar) -> Result<Scalar> {
        if x.is_negative() || x >= &Scalar::one() {
            return Err(Error::PointOutOfDomain(x.to_string()));
        }
        Ok(x + &self.translations[self.locate(x)])
    }

    /// The translation amount on [lo, hi) when that interval fits inside a
    /// single continuity interval; `None` when it straddles a breakpoint.
    /// In canonical form adjacent intervals translate differently, so `None`
    /// means the restriction is genuinely not a translation.
    pub fn translation_on(&self, lo: &Scalar, hi: &Scalar) -> Option<Scalar> {
        let i = self.locate(lo);
        if hi <= &self.cuts[i + 1] {
            Some(self.translations[i].clone())
        } else {
            None
        }
    }

    fn evaluate_unchecked(&self, x: &Scalar) -> Scalar {
        x + &self.translations[self.locate(x)]
    }

    pub fn inverse(&self) -> Iet {
        let inv = self.perm.inverse();
        let lengths: Vec<Scalar> = (0..self.n())
            .map(|pos| self.lengths[inv.rank(pos)].clone())
            .collect();
        // The inverse of a merged permutation is merged, so no re-canonicalization
        // can occur; still go through the constructor for the derived data.
        Iet::new(lengths, inv).expect("inverse of a valid IET is valid")
    }

    /// Composition self . other (apply `other` first).
    pub fn compose(&self, other: &Iet) -> Iet {
        self.compose_with_inner_inverse(other, &other.inverse())
    }

    /// Composition with the inner map's inverse supplied, so iterated
    /// composition against a fixed map computes that inverse only once.
    pub(crate) fn compose_with_inner_inverse(&self, other: &Iet, other_inv: &Iet) -> Iet {
        let inner = other;
        let outer = self;
        let inner_inv = other_inv;
        let mut breaks: Vec<Scalar> = Vec::with_capacity(inner.n() + outer.n());
        breaks.push(Scalar::zero());
        breaks.extend_from_slice(inner.breakpoints());
        for b in outer.breakpoints() {
            breaks.push(inner_inv.evaluate_unchecked(b));
        }
        breaks.sort();
        breaks.dedup();

        let m = breaks.len();
        let mut lengths = Vec::with_capacity(m);
        let mut image_starts = Vec::with_capacity(m);
        for (j, x) in breaks.iter().enumerate() {
            let next = breaks.get(j + 1).cloned().unwrap_or_else(Scalar::one);
            lengths.push(&next - x);
            image_starts.push(outer.evaluate_unchecked(&inner.evaluate_unchecked(x)));
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&p, &q| image_starts[p].cmp(&image_starts[q]));
        let mut ranks = vec![0usize; m];
        for (pos, &p) in order.iter().enumerate() {
            ranks[p] = pos;
        }
        Iet::new(lengths, Permutation::from_ranks(ranks))
            .expect("composition of valid IETs is valid")
    }

    /// Exact m-th power (negative m through the inverse). Iterated
    /// composition keeps intermediate interval counts linear in |m|.
    pub fn power(&self, m: i64) -> Iet {
        if m < 0 {
            return self.inverse().power(-m);
        }
        let inv = self.inverse();
        let mut acc = Iet::identity();
        for _ in 0..m {
            acc = acc.compose_with_inner_inverse(self, &inv);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.n() == 1
    }

    /// The set where the map differs from the identity, as a normalized
    /// union of half-open intervals.
    pub fn support(&self) -> IntervalSet {
        let intervals: Vec<(Scalar, Scalar)> = (0..self.n())
            .filter(|&i| !self.translations[i].is_zero())
            .map(|i| (self.cuts[i].clone(), self.cuts[i + 1].clone()))
            .collect();
        IntervalSet::from_intervals(intervals)
    }

    pub fn distance(&self, other: &Iet) -> Distance {
        if self.perm != other.perm {
            return Distance::Infinite;
        }
        let mut sum = Scalar::zero();
        for (a, b) in self.lengths.iter().zip(&other.lengths) {
            sum = sum + (a - b).abs();
        }
        Distance::Finite(sum)
    }

    /// Brute-force equality oracle: samples every breakpoint of the common
    /// refinement of both partitions plus one interior midpoint per refined
    /// interval, independent of the structural comparison.
    pub fn pointwise_equal(&self, other: &Iet) -> bool {
        let mut breaks: Vec<Scalar> = Vec::new();
        breaks.push(Scalar::zero());
        breaks.extend_from_slice(self.breakpoints());
        breaks.extend_from_slice(other.breakpoints());
        breaks.sort();
        breaks.dedup();
        let half = Scalar::ratio(1, 2);
        for (j, x) in breaks.iter().enumerate() {
            let next = breaks.get(j + 1).cloned().unwrap_or_else(Scalar::one);
            let mid = (x + &next) * &half;
            if self.evaluate_unchecked(x) != other.evaluate_unchecked(x)
                || self.evaluate_unchecked(&mid) != other.evaluate_unchecked(&mid)
            {
                return false;
            }
        }
        true
    }
}

impl Serialize for Iet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            lengths: &'a [Scalar],
            perm: Vec<usize>,
        }
        Repr {
            lengths: &self.lengths,
            perm: self.perm.one_based(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Iet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            lengths: Vec<Scalar>,
            perm: Vec<usize>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let perm = Permutation::from_one_based(&repr.perm).map_err(D::Error::custom)?;
        Iet::new(repr.lengths, perm).map_err(D::Error::custom)
    }
}
