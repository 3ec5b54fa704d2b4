//! Exact scalars: rationals and elements of the cubic field Q(a), where a is
//! the unique real root of a^3 + a^2 + a = 1.
//!
//! Every geometric quantity in this crate is a [`Scalar`]. Arithmetic is exact;
//! comparisons of cubic elements are decided by refining a rational enclosure
//! of `a` until the sign is certain.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact number: either a rational or `c0 + c1*a + c2*a^2` in Q(a).
///
/// Invariants: rationals are stored reduced (num-rational keeps them so);
/// a `Cubic` value always has `(c1, c2) != (0, 0)`, otherwise it is
/// normalized down to `Rational`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(BigRational),
    Cubic {
        c0: BigRational,
        c1: BigRational,
        c2: BigRational,
    },
}

/// Defining polynomial p(x) = x^3 + x^2 + x - 1 of the generator `a`.
fn eval_p(x: &BigRational) -> BigRational {
    ((x + BigRational::one()) * x + BigRational::one()) * x - BigRational::one()
}

/// Shared enclosure of `a`, refined monotonically across the process.
/// Invariant: p(lo) < 0 < p(hi), so lo < a < hi.
fn bracket_cell() -> &'static Mutex<(BigRational, BigRational)> {
    static CELL: OnceLock<Mutex<(BigRational, BigRational)>> = OnceLock::new();
    CELL.get_or_init(|| {
        Mutex::new((
            BigRational::new(BigInt::from(1), BigInt::from(2)),
            BigRational::new(BigInt::from(3), BigInt::from(5)),
        ))
    })
}

fn current_bracket() -> (BigRational, BigRational) {
    bracket_cell().lock().unwrap().clone()
}

/// One bisection step on the enclosure of `a`.
fn bisect(lo: &mut BigRational, hi: &mut BigRational) {
    let two = BigRational::from(BigInt::from(2));
    let mid = (&*lo + &*hi) / two;
    // p has no rational root, so the sign at mid is never zero.
    if eval_p(&mid).is_negative() {
        *lo = mid;
    } else {
        *hi = mid;
    }
}

fn store_bracket(lo: BigRational, hi: BigRational) {
    let mut guard = bracket_cell().lock().unwrap();
    if &hi - &lo < &guard.1 - &guard.0 {
        *guard = (lo, hi);
    }
}

/// Interval hull of c0 + c1*x + c2*x^2 for x in [lo, hi], with 0 < lo < hi.
fn quadratic_hull(
    c0: &BigRational,
    c1: &BigRational,
    c2: &BigRational,
    lo: &BigRational,
    hi: &BigRational,
) -> (BigRational, BigRational) {
    let mul = |c: &BigRational, l: &BigRational, h: &BigRational| {
        if c.is_negative() {
            (c * h, c * l)
        } else {
            (c * l, c * h)
        }
    };
    let (l1, h1) = mul(c1, lo, hi);
    let sq_lo = lo * lo;
    let sq_hi = hi * hi;
    let (l2, h2) = mul(c2, &sq_lo, &sq_hi);
    (c0 + l1 + l2, c0 + h1 + h2)
}

/// Hard cap on enclosure refinements. A nonzero element of Q(a) always
/// separates from zero well before this; hitting the cap is a logic error.
const MAX_REFINEMENTS: usize = 256;

/// Sign of c0 + c1*a + c2*a^2, assuming the element is nonzero.
fn cubic_sign(c0: &BigRational, c1: &BigRational, c2: &BigRational) -> Ordering {
    let (mut lo, mut hi) = current_bracket();
    for _ in 0..MAX_REFINEMENTS {
        let (vlo, vhi) = quadratic_hull(c0, c1, c2, &lo, &hi);
        if vlo.is_positive() {
            store_bracket(lo, hi);
            return Ordering::Greater;
        }
        if vhi.is_negative() {
            store_bracket(lo, hi);
            return Ordering::Less;
        }
        bisect(&mut lo, &mut hi);
    }
    panic!("sign determination did not converge: element of Q(a) must be zero");
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rational(BigRational::one())
    }

    /// The field generator `a` itself.
    pub fn a() -> Self {
        Scalar::Cubic {
            c0: BigRational::zero(),
            c1: BigRational::one(),
            c2: BigRational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rational(BigRational::from(BigInt::from(n)))
    }

    /// Exact rational p/q. Panics if q = 0.
    pub fn ratio(p: i64, q: i64) -> Self {
        Scalar::Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Rational(r)
    }

    /// Builds c0 + c1*a + c2*a^2, normalizing to a rational when c1 = c2 = 0.
    pub fn cubic(c0: BigRational, c1: BigRational, c2: BigRational) -> Self {
        if c1.is_zero() && c2.is_zero() {
            Scalar::Rational(c0)
        } else {
            Scalar::Cubic { c0, c1, c2 }
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Scalar::Rational(_))
    }

    /// The underlying rational, if this scalar is one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Rational(r) => Some(r),
            Scalar::Cubic { .. } => None,
        }
    }

    /// Coefficients (c0, c1, c2) over the basis (1, a, a^2).
    pub fn coefficients(&self) -> (BigRational, BigRational, BigRational) {
        match self {
            Scalar::Rational(r) => (r.clone(), BigRational::zero(), BigRational::zero()),
            Scalar::Cubic { c0, c1, c2 } => (c0.clone(), c1.clone(), c2.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_zero())
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Scalar::Rational(r) if r.is_integer())
    }

    /// Sign as an ordering against zero.
    pub fn sign(&self) -> Ordering {
        match self {
            Scalar::Rational(r) => r.cmp(&BigRational::zero()),
            // (c1, c2) != (0, 0) means the element is irrational, hence nonzero.
            Scalar::Cubic { c0, c1, c2 } => cubic_sign(c0, c1, c2),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Exact division; the divisor must be nonzero.
    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self * &rhs.recip_unchecked())
    }

    /// Multiplicative inverse of a nonzero scalar.
    fn recip_unchecked(&self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Cubic { c0, c1, c2 } => {
                // Columns of the multiplication-by-self matrix over (1, a, a^2):
                //   self * 1   = (c0, c1, c2)
                //   self * a   = (c2, c0 - c2, c1 - c2)
                //   self * a^2 = (c1 - c2, 2c2 - c1, c0 - c1)
                let m = [
                    [c0.clone(), c2.clone(), c1 - c2],
                    [c1.clone(), c0 - c2, BigRational::from(BigInt::from(2)) * c2 - c1],
                    [c2.clone(), c1 - c2, c0 - c1],
                ];
                let det3 = |m: &[[BigRational; 3]; 3]| {
                    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
                        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
                        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
                };
                let det = det3(&m);
                debug_assert!(!det.is_zero(), "Q(a) is a field");
                // Cramer's rule for M y = (1, 0, 0)^T.
                let col = |j: usize| {
                    let mut mj = m.clone();
                    for (row, mj_row) in mj.iter_mut().enumerate() {
                        mj_row[j] = if row == 0 {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        };
                    }
                    det3(&mj) / &det
                };
                Scalar::cubic(col(0), col(1), col(2))
            }
        }
    }

    /// Largest integer <= self. For cubic values the enclosure of `a` is
    /// refined until the floor is certain (cubic values are irrational, so
    /// this terminates).
    pub fn floor(&self) -> BigInt {
        match self {
            Scalar::Rational(r) => r.floor().to_integer(),
            Scalar::Cubic { c0, c1, c2 } => {
                let (mut lo, mut hi) = current_bracket();
                for _ in 0..MAX_REFINEMENTS {
                    let (vlo, vhi) = quadratic_hull(c0, c1, c2, &lo, &hi);
                    let flo = vlo.floor().to_integer();
                    let fhi = vhi.floor().to_integer();
                    if flo == fhi {
                        store_bracket(lo, hi);
                        return flo;
                    }
                    bisect(&mut lo, &mut hi);
                }
                panic!("floor did not converge: cubic value suspiciously close to an integer");
            }
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self).floor()
    }

    /// Representative of self modulo `m` in [0, m), for m > 0.
    pub fn rem_euclid(&self, m: &Scalar) -> Scalar {
        debug_assert!(m.is_positive());
        let q = self.checked_div(m).expect("positive modulus").floor();
        self - &(&Scalar::Rational(BigRational::from(q)) * m)
    }

    /// A rational approximation within 2^-60 of the exact value.
    fn approx_rational(&self) -> BigRational {
        match self {
            Scalar::Rational(r) => r.clone(),
            Scalar::Cubic { c0, c1, c2 } => {
                let tol = BigRational::new(BigInt::from(1), BigInt::from(2).pow(60));
                let (mut lo, mut hi) = current_bracket();
                loop {
                    let (vlo, vhi) = quadratic_hull(c0, c1, c2, &lo, &hi);
                    if &vhi - &vlo < tol {
                        store_bracket(lo, hi);
                        let two = BigRational::from(BigInt::from(2));
                        return (vlo + vhi) / two;
                    }
                    bisect(&mut lo, &mut hi);
                }
            }
        }
    }

    /// Nearest f64, for plotting only.
    pub fn to_f64(&self) -> f64 {
        self.approx_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal expansion with the given number of significant digits
    /// (rounded toward zero beyond the last digit).
    pub fn decimal_string(&self, sig_digits: usize) -> String {
        let r = match self {
            Scalar::Rational(r) => r.clone(),
            Scalar::Cubic { c0, c1, c2 } => {
                // Refine until the hull pins down sig_digits + a guard digit.
                let (mut lo, mut hi) = current_bracket();
                loop {
                    let (vlo, vhi) = quadratic_hull(c0, c1, c2, &lo, &hi);
                    let width = &vhi - &vlo;
                    let scale = vlo.abs().min(vhi.abs());
                    let budget = BigRational::new(
                        BigInt::from(1),
                        BigInt::from(10).pow(sig_digits as u32 + 2),
                    );
                    if !scale.is_zero() && &width / &scale < budget {
                        store_bracket(lo, hi);
                        let two = BigRational::from(BigInt::from(2));
                        break (vlo + vhi) / two;
                    }
                    bisect(&mut lo, &mut hi);
                }
            }
        };
        rational_decimal(&r, sig_digits)
    }
}

/// Decimal rendering of a rational with `sig` significant digits.
fn rational_decimal(r: &BigRational, sig: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let v = r.abs();
    // exponent e with 10^e <= v < 10^(e+1)
    let mut e: i64 = 0;
    let ten = BigRational::from(BigInt::from(10));
    let mut scaled = v.clone();
    while scaled >= ten {
        scaled /= &ten;
        e += 1;
    }
    while scaled < BigRational::one() {
        scaled *= &ten;
        e -= 1;
    }
    // digits of v * 10^(sig-1-e), truncated
    let shift = sig as i64 - 1 - e;
    let shifted = if shift >= 0 {
        v * BigRational::from(BigInt::from(10).pow(shift as u32))
    } else {
        v / BigRational::from(BigInt::from(10).pow((-shift) as u32))
    };
    let digits = shifted.floor().to_integer().to_string();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= 0 && (e as usize) < sig {
        let point = e as usize + 1;
        out.push_str(&digits[..point]);
        if point < digits.len() {
            out.push('.');
            out.push_str(&digits[point..]);
        }
    } else if (-5..0).contains(&e) {
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        // scientific notation
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push('e');
        out.push_str(&e.to_string());
    }
    out
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => write!(f, "{}", format_rational(r)),
            Scalar::Cubic { c0, c1, c2 } => {
                write!(
                    f,
                    "{} + {}*a + {}*a^2",
                    format_rational(c0),
                    format_rational(c1),
                    format_rational(c2)
                )
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = |_| Error::Parse(format!("invalid rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(bad)?;
            let q = BigInt::from_str(q.trim()).map_err(bad)?;
            if q.is_zero() {
                return Err(Error::Parse(format!("zero denominator: {s:?}")));
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from(BigInt::from_str(s).map_err(bad)?)),
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Parses "p/q" or "p". Cubic values travel as coefficient triples in
    /// JSON, not as strings.
    fn from_str(s: &str) -> Result<Self> {
        Ok(Scalar::Rational(parse_rational(s)?))
    }
}

// JSON encoding: {"Q": "3/10"} or {"Qa": ["1/2", "-1/2", "0"]}.
impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(1))?;
        match self {
            Scalar::Rational(r) => map.serialize_entry("Q", &format_rational(r))?,
            Scalar::Cubic { c0, c1, c2 } => map.serialize_entry(
                "Qa",
                &[format_rational(c0), format_rational(c1), format_rational(c2)],
            )?,
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        enum Repr {
            Q(String),
            Qa([String; 3]),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Q(s) => Ok(Scalar::Rational(
                parse_rational(&s).map_err(D::Error::custom)?,
            )),
            Repr::Qa([s0, s1, s2]) => Ok(Scalar::cubic(
                parse_rational(&s0).map_err(D::Error::custom)?,
                parse_rational(&s1).map_err(D::Error::custom)?,
                parse_rational(&s2).map_err(D::Error::custom)?,
            )),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a.cmp(b),
            _ => {
                // Equality is coefficientwise: (1, a, a^2) are Q-independent.
                if self == other {
                    return Ordering::Equal;
                }
                (self - other).sign()
            }
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let (x0, x1, x2) = self.coefficients();
        let (y0, y1, y2) = rhs.coefficients();
        Scalar::cubic(x0 + y0, x1 + y1, x2 + y2)
    }
}

impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let (x0, x1, x2) = self.coefficients();
        let (y0, y1, y2) = rhs.coefficients();
        Scalar::cubic(x0 - y0, x1 - y1, x2 - y2)
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Rational(x), Scalar::Rational(y)) => Scalar::Rational(x * y),
            _ => {
                let (x0, x1, x2) = self.coefficients();
                let (y0, y1, y2) = rhs.coefficients();
                let p0 = &x0 * &y0;
                let p1 = &x0 * &y1 + &x1 * &y0;
                let p2 = &x0 * &y2 + &x1 * &y1 + &x2 * &y0;
                let p3 = &x1 * &y2 + &x2 * &y1;
                let p4 = &x2 * &y2;
                // Reduce with a^3 = 1 - a - a^2 and a^4 = 2a - 1.
                let two = BigRational::from(BigInt::from(2));
                Scalar::cubic(p0 + &p3 - &p4, p1 - &p3 + two * &p4, p2 - &p3)
            }
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(r) => Scalar::Rational(-r),
            Scalar::Cubic { c0, c1, c2 } => Scalar::Cubic {
                c0: -c0,
                c1: -c1,
                c2: -c2,
            },
        }
    }
}
