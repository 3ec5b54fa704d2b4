//! q-rational IETs: grid permutations and orders, nearest q-rational
//! approximation in L1, the Arnoux-Yoccoz construction over Q(a), and the
//! (q, delta, order, bound) sweep.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::iet::{Iet, Permutation};
use crate::scalar::Scalar;

/// True iff every discontinuity of T lies on the grid (1/q)N, equivalently
/// every length is an integer multiple of 1/q.
pub fn is_q_rational(t: &Iet, q: u64) -> bool {
    let qs = Scalar::from_int(q as i64);
    t.lengths().iter().all(|l| (l * &qs).is_integer())
}

/// The permutation a q-rational IET induces on the q grid cells.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GridPermutation {
    q: u64,
    images: Vec<usize>,
}

impl GridPermutation {
    pub fn q(&self) -> u64 {
        self.q
    }

    /// images[c] = index of the cell the c-th cell is translated onto.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut c = start;
            while !seen[c] {
                seen[c] = true;
                c = self.images[c];
                len += 1;
            }
            cycles.push(len);
        }
        cycles
    }

    /// Order of the permutation: the lcm of its cycle lengths.
    pub fn order(&self) -> BigUint {
        self.cycle_lengths()
            .into_iter()
            .map(BigUint::from)
            .fold(BigUint::one(), |acc, l| acc.lcm(&l))
    }
}

/// Grid permutation of a q-rational IET; errors on non-q-rational input.
pub fn grid_permutation(t: &Iet, q: u64) -> Result<GridPermutation> {
    if !is_q_rational(t, q) {
        return Err(Error::NotQRational { q });
    }
    let qs = Scalar::from_int(q as i64);
    // cell counts per interval, exact
    let counts: Vec<usize> = t
        .lengths()
        .iter()
        .map(|l| {
            let m = l * &qs;
            m.as_rational()
                .expect("q-rational length")
                .to_integer()
                .to_usize()
                .expect("cell count fits usize")
        })
        .collect();
    let n = t.n();
    let perm = t.permutation();
    // image start cell of interval i = total cells of intervals ranked below
    let mut image_start = vec![0usize; n];
    {
        let inv = perm.inverse();
        let mut acc = 0;
        for pos in 0..n {
            let i = inv.rank(pos);
            image_start[i] = acc;
            acc += counts[i];
        }
    }
    let mut images = Vec::with_capacity(q as usize);
    for (i, &c) in counts.iter().enumerate() {
        for off in 0..c {
            images.push(image_start[i] + off);
        }
    }
    debug_assert_eq!(images.len(), q as usize);
    Ok(GridPermutation { q, images })
}

/// Order of a q-rational IET: the order of its grid permutation.
pub fn order(t0: &Iet, q: u64) -> Result<BigUint> {
    Ok(grid_permutation(t0, q)?.order())
}

/// The closest q-rational IET with the same permutation: lengths p_i/q with
/// integers p_i >= 1 summing to q, minimizing the exact L1 distance. Starts
/// from per-coordinate rounding and repairs the sum by greedy unit moves of
/// least cost (ties to the lowest index), which is optimal for this separable
/// convex objective.
pub fn nearest_q_rational(s: &Iet, q: u64) -> Result<(Iet, Scalar)> {
    let n = s.n();
    if (q as usize) < n {
        return Err(Error::QTooSmall { q, n });
    }
    let qs = Scalar::from_int(q as i64);
    let half = Scalar::ratio(1, 2);
    let mut p: Vec<i64> = s
        .lengths()
        .iter()
        .map(|l| {
            let r = (l * &qs + &half).floor();
            r.to_i64().expect("rounded numerator fits i64").max(1)
        })
        .collect();

    // |lambda_i - p/q| as a function of the integer p
    let coord_cost = |i: usize, pi: i64| -> Scalar {
        (&s.lengths()[i] - &Scalar::ratio(pi, q as i64)).abs()
    };
    let mut sum: i64 = p.iter().sum();
    while sum != q as i64 {
        let dir: i64 = if sum > q as i64 { -1 } else { 1 };
        let mut best: Option<(Scalar, usize)> = None;
        for (i, &pi) in p.iter().enumerate() {
            if dir < 0 && pi <= 1 {
                continue;
            }
            let delta = coord_cost(i, pi + dir) - coord_cost(i, pi);
            let better = match &best {
                Some((b, _)) => &delta < b,
                None => true,
            };
            if better {
                best = Some((delta, i));
            }
        }
        let (_, i) = best.expect("some coordinate can move");
        p[i] += dir;
        sum += dir;
    }

    let lengths: Vec<Scalar> = p.iter().map(|&pi| Scalar::ratio(pi, q as i64)).collect();
    let t0 = Iet::new(lengths, s.permutation().clone())?;
    let mut delta = Scalar::zero();
    for (i, &pi) in p.iter().enumerate() {
        delta = delta + coord_cost(i, pi);
    }
    Ok((t0, delta))
}

/// The Arnoux-Yoccoz triple (g, h, f = h . g) over Q(a):
/// g swaps three pairs of intervals of lengths a/2, a^2/2, a^3/2 and h is the
/// half rotation.
pub fn arnoux_yoccoz() -> (Iet, Iet, Iet) {
    let a = Scalar::a();
    let a2 = &a * &a;
    let a3 = &a2 * &a;
    let half = Scalar::ratio(1, 2);
    let g = Iet::new(
        vec![
            &a * &half,
            &a * &half,
            &a2 * &half,
            &a2 * &half,
            &a3 * &half,
            &a3 * &half,
        ],
        Permutation::from_one_based(&[2, 1, 4, 3, 6, 5]).unwrap(),
    )
    .expect("a + a^2 + a^3 = 1");
    let h = Iet::rotation(half).unwrap();
    let f = h.compose(&g);
    (g, h, f)
}

/// One row of the approximation sweep: the distance delta to the closest
/// q-rational IET, its order o, and the bound b = 40 q (o + 2) delta.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub q: u64,
    pub delta: Scalar,
    pub order: BigUint,
    pub bound: Scalar,
}

impl SweepRow {
    pub fn bound_lt_1(&self) -> bool {
        self.bound < Scalar::one()
    }

    pub fn csv_header() -> &'static str {
        "q,delta_exact,delta_decimal,order,bound_exact,bound_decimal,bound_lt_1"
    }

    /// CSV row with exact values and 30-significant-digit decimals.
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.q,
            self.delta,
            self.delta.decimal_string(30),
            self.order,
            self.bound,
            self.bound.decimal_string(30),
            self.bound_lt_1()
        )
    }
}

fn sweep_row(f: &Iet, q: u64) -> Result<SweepRow> {
    let (t0, delta) = nearest_q_rational(f, q)?;
    let o = order(&t0, q)?;
    let o_scalar = Scalar::from_rational(num_rational::BigRational::from(BigInt::from(
        o.clone(),
    )));
    let bound = Scalar::from_int(40)
        * Scalar::from_int(q as i64)
        * (o_scalar + Scalar::from_int(2))
        * &delta;
    Ok(SweepRow {
        q,
        delta,
        order: o,
        bound,
    })
}

/// Sweeps q over [q_min, q_max] against the Arnoux-Yoccoz map f, producing
/// one row per q. Requires q_min >= 7 since f has 7 intervals.
pub fn ay_sweep(q_min: u64, q_max: u64) -> Result<Vec<SweepRow>> {
    let (_, _, f) = arnoux_yoccoz();
    if q_min < 7 {
        return Err(Error::QTooSmall { q: q_min, n: 7 });
    }
    (q_min..=q_max).map(|q| sweep_row(&f, q)).collect()
}
