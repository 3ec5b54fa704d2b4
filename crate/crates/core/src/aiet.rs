//! Affine interval exchange transformations: right-continuous bijections of
//! [0, 1) that are affine with positive slope on each piece, and the
//! ping-pong certificate that two of them span a free group of rank 2.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::iet::Iet;
use crate::neighborhoods::IntervalSet;
use crate::scalar::Scalar;

/// One affine piece: x -> slope * x + offset on [lo, hi).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffinePiece {
    pub lo: Scalar,
    pub hi: Scalar,
    pub slope: Scalar,
    pub offset: Scalar,
}

impl AffinePiece {
    fn apply(&self, x: &Scalar) -> Scalar {
        &self.slope * x + &self.offset
    }

    fn image(&self) -> (Scalar, Scalar) {
        (self.apply(&self.lo), self.apply(&self.hi))
    }
}

/// An AIET in normalized form: pieces sorted by domain, tiling [0, 1), with
/// adjacent pieces carrying distinct affine maps; piece images tile [0, 1) as
/// well (bijectivity is checked at construction).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Aiet {
    pieces: Vec<AffinePiece>,
}

impl Aiet {
    pub fn new(mut pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidAiet("no pieces".into()));
        }
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo));
        // domain tiles [0, 1)
        if !pieces[0].lo.is_zero() {
            return Err(Error::InvalidAiet("domain does not start at 0".into()));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::InvalidAiet(format!(
                    "domain gap or overlap at {}",
                    w[0].hi
                )));
            }
        }
        if pieces.last().unwrap().hi != Scalar::one() {
            return Err(Error::InvalidAiet("domain does not end at 1".into()));
        }
        for p in &pieces {
            if p.lo >= p.hi {
                return Err(Error::InvalidAiet(format!("empty piece at {}", p.lo)));
            }
            if !p.slope.is_positive() {
                return Err(Error::InvalidAiet(format!("slope {} not positive", p.slope)));
            }
        }
        // images tile [0, 1)
        let mut images: Vec<(Scalar, Scalar)> = pieces.iter().map(|p| p.image()).collect();
        images.sort_by(|a, b| a.0.cmp(&b.0));
        if !images[0].0.is_zero() || images.last().unwrap().1 != Scalar::one() {
            return Err(Error::InvalidAiet("images do not cover [0,1)".into()));
        }
        for w in images.windows(2) {
            if w[0].1 != w[1].0 {
                return Err(Error::InvalidAiet(format!(
                    "images overlap or leave a gap at {}",
                    w[0].1
                )));
            }
        }
        // merge adjacent pieces with the same affine map
        let mut merged: Vec<AffinePiece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match merged.last_mut() {
                Some(last) if last.slope == p.slope && last.offset == p.offset => {
                    last.hi = p.hi;
                }
                _ => merged.push(p),
            }
        }
        Ok(Aiet { pieces: merged })
    }

    pub fn identity() -> Self {
        Aiet {
            pieces: vec![AffinePiece {
                lo: Scalar::zero(),
                hi: Scalar::one(),
                slope: Scalar::one(),
                offset: Scalar::zero(),
            }],
        }
    }

    /// Every IET embeds as an AIET with unit slopes.
    pub fn from_iet(t: &Iet) -> Self {
        let mut cuts = vec![Scalar::zero()];
        cuts.extend_from_slice(t.breakpoints());
        cuts.push(Scalar::one());
        let pieces = (0..t.n())
            .map(|i| AffinePiece {
                lo: cuts[i].clone(),
                hi: cuts[i + 1].clone(),
                slope: Scalar::one(),
                offset: t.translations()[i].clone(),
            })
            .collect();
        Aiet::new(pieces).expect("IET pieces form a bijection")
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn is_identity(&self) -> bool {
        self.pieces.len() == 1
            && self.pieces[0].slope == Scalar::one()
            && self.pieces[0].offset.is_zero()
    }

    fn locate(&self, x: &Scalar) -> usize {
        let mut lo = 0usize;
        let mut hi = self.pieces.len();
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if &self.pieces[mid].lo <= x {
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
        Ok(self.pieces[self.locate(x)].apply(x))
    }

    fn evaluate_unchecked(&self, x: &Scalar) -> Scalar {
        self.pieces[self.locate(x)].apply(x)
    }

    pub fn inverse(&self) -> Aiet {
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                let (ilo, ihi) = p.image();
                let slope = Scalar::one().checked_div(&p.slope).expect("positive slope");
                let offset = -&p.offset * &slope;
                AffinePiece {
                    lo: ilo,
                    hi: ihi,
                    slope,
                    offset,
                }
            })
            .collect();
        Aiet::new(pieces).expect("inverse of a bijection is a bijection")
    }

    /// Composition self . other (apply `other` first).
    pub fn compose(&self, other: &Aiet) -> Aiet {
        let inner = other;
        let inner_inv = inner.inverse();
        let mut breaks: Vec<Scalar> = inner.pieces.iter().map(|p| p.lo.clone()).collect();
        for p in &self.pieces {
            if !p.lo.is_zero() {
                breaks.push(inner_inv.evaluate_unchecked(&p.lo));
            }
        }
        breaks.sort();
        breaks.dedup();
        let pieces = (0..breaks.len())
            .map(|j| {
                let lo = breaks[j].clone();
                let hi = breaks.get(j + 1).cloned().unwrap_or_else(Scalar::one);
                let pi = &inner.pieces[inner.locate(&lo)];
                let po = &self.pieces[self.locate(&pi.apply(&lo))];
                AffinePiece {
                    lo,
                    hi,
                    slope: &po.slope * &pi.slope,
                    offset: &po.slope * &pi.offset + &po.offset,
                }
            })
            .collect();
        Aiet::new(pieces).expect("composition of bijections is a bijection")
    }

    /// Exact image of an interval set; affine pieces preserve orientation.
    pub fn image_of_set(&self, a: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for (lo, hi) in a.intervals() {
            for p in &self.pieces {
                let flo = if lo > &p.lo { lo.clone() } else { p.lo.clone() };
                let fhi = if hi < &p.hi { hi.clone() } else { p.hi.clone() };
                if flo < fhi {
                    out.push((p.apply(&flo), p.apply(&fhi)));
                }
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn power(&self, m: i64) -> Aiet {
        if m < 0 {
            return self.inverse().power(-m);
        }
        let mut acc = Aiet::identity();
        for _ in 0..m {
            acc = acc.compose(self);
        }
        acc
    }
}

// JSON: {"pieces": [{"lo": "0", "hi": "1/5", "slope": "4", "offset": "0"}]}
// with all values rational strings.
#[derive(Serialize, Deserialize)]
struct PieceRepr {
    lo: String,
    hi: String,
    slope: String,
    offset: String,
}

#[derive(Serialize, Deserialize)]
struct AietRepr {
    pieces: Vec<PieceRepr>,
}

impl Serialize for Aiet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::Error as _;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                if !(p.lo.is_rational()
                    && p.hi.is_rational()
                    && p.slope.is_rational()
                    && p.offset.is_rational())
                {
                    return Err(S::Error::custom("AIET serialization is rational-only"));
                }
                Ok(PieceRepr {
                    lo: p.lo.to_string(),
                    hi: p.hi.to_string(),
                    slope: p.slope.to_string(),
                    offset: p.offset.to_string(),
                })
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        AietRepr { pieces }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Aiet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = AietRepr::deserialize(deserializer)?;
        let pieces = repr
            .pieces
            .into_iter()
            .map(|p| {
                Ok(AffinePiece {
                    lo: p.lo.parse().map_err(D::Error::custom)?,
                    hi: p.hi.parse().map_err(D::Error::custom)?,
                    slope: p.slope.parse().map_err(D::Error::custom)?,
                    offset: p.offset.parse().map_err(D::Error::custom)?,
                })
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        Aiet::new(pieces).map_err(D::Error::custom)
    }
}

/// Exact ping-pong test: V, W, X, Y pairwise disjoint, nonempty, not
/// covering [0, 1); f maps the complement of V into W and f^-1 maps the
/// complement of W into V; same for g with (X, Y). These inclusions give
/// f^n(X u Y) inside V u W and g^n(V u W) inside X u Y for all n != 0, the
/// ping-pong hypotheses, so <f, g> is free of rank 2.
pub fn pingpong_check(
    f: &Aiet,
    g: &Aiet,
    v: &IntervalSet,
    w: &IntervalSet,
    x: &IntervalSet,
    y: &IntervalSet,
) -> bool {
    let sets = [v, w, x, y];
    for s in sets {
        if s.is_empty() {
            return false;
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if !sets[i].intersection(sets[j]).is_empty() {
                return false;
            }
        }
    }
    let union = v.union(w).union(&x.union(y));
    if union == IntervalSet::full() {
        return false;
    }
    f.image_of_set(&v.complement()).is_subset_of(w)
        && f.inverse().image_of_set(&w.complement()).is_subset_of(v)
        && g.image_of_set(&x.complement()).is_subset_of(y)
        && g.inverse().image_of_set(&y.complement()).is_subset_of(x)
}

/// A concrete ping-pong instance: V = [0, 1/5), W = [7/10, 4/5),
/// X = [2/5, 1/2), Y = [9/10, 1); f expands V onto the complement of W and
/// contracts everything else into W; g plays the same role for (X, Y).
pub fn standard_pingpong_pair() -> (Aiet, Aiet, IntervalSet, IntervalSet, IntervalSet, IntervalSet)
{
    let piece = |lo: (i64, i64), hi: (i64, i64), slope: (i64, i64), offset: (i64, i64)| {
        AffinePiece {
            lo: Scalar::ratio(lo.0, lo.1),
            hi: Scalar::ratio(hi.0, hi.1),
            slope: Scalar::ratio(slope.0, slope.1),
            offset: Scalar::ratio(offset.0, offset.1),
        }
    };
    // f: [0,1/10) -> [0,7/10) by 7x; [1/10,1/5) -> [4/5,1) by 2x + 3/5;
    //    [1/5,1) -> [7/10,4/5) by x/8 + 27/40.
    let f = Aiet::new(vec![
        piece((0, 1), (1, 10), (7, 1), (0, 1)),
        piece((1, 10), (1, 5), (2, 1), (3, 5)),
        piece((1, 5), (1, 1), (1, 8), (27, 40)),
    ])
    .expect("f is a bijection");
    // g: [0,2/5) -> [9/10,19/20) by x/8 + 9/10; [2/5,1/2) -> [0,9/10) by
    //    9x - 18/5; [1/2,1) -> [19/20,1) by x/10 + 9/10.
    let g = Aiet::new(vec![
        piece((0, 1), (2, 5), (1, 8), (9, 10)),
        piece((2, 5), (1, 2), (9, 1), (-18, 5)),
        piece((1, 2), (1, 1), (1, 10), (9, 10)),
    ])
    .expect("g is a bijection");
    let iv = |lo: (i64, i64), hi: (i64, i64)| {
        IntervalSet::from_intervals(vec![(Scalar::ratio(lo.0, lo.1), Scalar::ratio(hi.0, hi.1))])
    };
    (
        f,
        g,
        iv((0, 1), (1, 5)),
        iv((7, 10), (4, 5)),
        iv((2, 5), (1, 2)),
        iv((9, 10), (1, 1)),
    )
}
