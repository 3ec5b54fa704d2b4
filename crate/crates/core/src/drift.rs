//! Admissibility of permutations, drifting directions found by exact linear
//! feasibility (Fourier-Motzkin elimination over the rationals), drifted
//! length perturbations, and the drift-power search.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::iet::{Iet, Permutation};
use crate::scalar::Scalar;

/// A drifting direction `d` (zero-sum length perturbation) together with the
/// induced translation change `v` and the ratio rho = v_max / v_min.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct DriftData {
    pub direction: Vec<Scalar>,
    pub vector: Vec<Scalar>,
    pub rho: Scalar,
}

impl DriftData {
    pub fn v_min(&self) -> Scalar {
        self.vector.iter().cloned().reduce(Scalar::min).unwrap()
    }

    pub fn v_max(&self) -> Scalar {
        self.vector.iter().cloned().reduce(Scalar::max).unwrap()
    }

    pub fn direction_l1_norm(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for d in &self.direction {
            acc = acc + d.abs();
        }
        acc
    }

    /// Exact consistency: sum d = 0, v is the translation image of d, all
    /// v_i > 0, rho = v_max/v_min, and max |d_i| = 1.
    pub fn is_consistent(&self, perm: &Permutation) -> bool {
        if self.direction.len() != perm.n() || self.vector.len() != perm.n() {
            return false;
        }
        let mut sum = Scalar::zero();
        let mut max_abs = Scalar::zero();
        for d in &self.direction {
            sum = sum + d;
            max_abs = max_abs.max(d.abs());
        }
        if !sum.is_zero() || max_abs != Scalar::one() {
            return false;
        }
        let v = translation_image(perm, &self.direction);
        if v != self.vector || !v.iter().all(|x| x.is_positive()) {
            return false;
        }
        self.rho == self.v_max().checked_div(&self.v_min()).unwrap()
    }
}

/// The linear map taking a length perturbation to the induced change of the
/// translation vector: image start minus domain start, per interval.
pub fn translation_image(perm: &Permutation, d: &[Scalar]) -> Vec<Scalar> {
    let n = perm.n();
    (0..n)
        .map(|i| {
            let mut acc = Scalar::zero();
            for (j, dj) in d.iter().enumerate() {
                if perm.rank(j) < perm.rank(i) {
                    acc = acc + dj;
                }
                if j < i {
                    acc = acc - dj;
                }
            }
            acc
        })
        .collect()
}

/// A permutation is non-admissible when some prefix {1..k} is invariant with
/// sigma(k) = k; admissible otherwise.
pub fn is_admissible(perm: &Permutation) -> bool {
    let mut prefix_max = 0usize;
    for k in 0..perm.n() {
        let r = perm.rank(k);
        prefix_max = prefix_max.max(r);
        if r == k && prefix_max == k {
            return false;
        }
    }
    true
}

/// One inequality sum(coeffs[j] * x_j) >= rhs.
#[derive(Clone)]
struct Row {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
}

/// Fourier-Motzkin elimination in index order; on feasibility, returns the
/// canonical back-substitution point.
fn feasible_point(rows: Vec<Row>, nvars: usize) -> Option<Vec<BigRational>> {
    let mut systems: Vec<Vec<Row>> = Vec::with_capacity(nvars + 1);
    systems.push(rows);
    for var in 0..nvars {
        let cur = &systems[var];
        let mut next: Vec<Row> = Vec::new();
        let mut pos: Vec<&Row> = Vec::new();
        let mut neg: Vec<&Row> = Vec::new();
        for r in cur {
            if r.coeffs[var].is_positive() {
                pos.push(r);
            } else if r.coeffs[var].is_negative() {
                neg.push(r);
            } else {
                next.push(r.clone());
            }
        }
        for p in &pos {
            for n in &neg {
                // (-c_n) * p + c_p * n cancels the variable.
                let cp = p.coeffs[var].clone();
                let cn = n.coeffs[var].clone();
                let coeffs = (0..nvars)
                    .map(|j| -&cn * &p.coeffs[j] + &cp * &n.coeffs[j])
                    .collect();
                let rhs = -&cn * &p.rhs + &cp * &n.rhs;
                next.push(Row { coeffs, rhs });
            }
        }
        systems.push(next);
    }
    if systems[nvars].iter().any(|r| r.rhs.is_positive()) {
        return None;
    }
    // Back-substitute x_{nvars-1}, ..., x_0.
    let mut x = vec![BigRational::zero(); nvars];
    for var in (0..nvars).rev() {
        let mut lower: Option<BigRational> = None;
        let mut upper: Option<BigRational> = None;
        for r in &systems[var] {
            let c = &r.coeffs[var];
            if c.is_zero() {
                continue;
            }
            let mut residual = r.rhs.clone();
            for (j, xj) in x.iter().enumerate().skip(var + 1) {
                residual -= &r.coeffs[j] * xj;
            }
            let bound = residual / c;
            if c.is_positive() {
                lower = Some(match lower {
                    Some(l) if l >= bound => l,
                    _ => bound,
                });
            } else {
                upper = Some(match upper {
                    Some(u) if u <= bound => u,
                    _ => bound,
                });
            }
        }
        x[var] = match (lower, upper) {
            (Some(l), Some(u)) => {
                debug_assert!(l <= u, "Fourier-Motzkin bounds must be consistent");
                (l + u) / BigRational::from(BigInt::from(2))
            }
            (Some(l), None) => l + BigRational::one(),
            (None, Some(u)) => u - BigRational::one(),
            (None, None) => BigRational::zero(),
        };
    }
    Some(x)
}

/// Searches for a drifting direction of the permutation: a zero-sum `d`
/// making every translation length strictly increase. Returns data scaled so
/// max |d_i| = 1, or `None` when the permutation is not driftable
/// (equivalently, not admissible).
pub fn find_drifting_direction(perm: &Permutation) -> Option<DriftData> {
    let n = perm.n();
    // Coefficient of d_j in v_i.
    let coef = |i: usize, j: usize| -> i64 {
        let mut c = 0;
        if perm.rank(j) < perm.rank(i) {
            c += 1;
        }
        if j < i {
            c -= 1;
        }
        c
    };
    // Substitute d_n = -(d_1 + ... + d_{n-1}); require v_i(d) >= 1.
    let nvars = n - 1;
    let rows: Vec<Row> = (0..n)
        .map(|i| {
            let last = coef(i, n - 1);
            Row {
                coeffs: (0..nvars)
                    .map(|j| BigRational::from(BigInt::from(coef(i, j) - last)))
                    .collect(),
                rhs: BigRational::one(),
            }
        })
        .collect();
    let head = feasible_point(rows, nvars)?;

    let mut d: Vec<Scalar> = head.into_iter().map(Scalar::from_rational).collect();
    let mut total = Scalar::zero();
    for di in &d {
        total = total + di;
    }
    d.push(-total);
    let max_abs = d
        .iter()
        .map(Scalar::abs)
        .reduce(Scalar::max)
        .expect("nonempty direction");
    let d: Vec<Scalar> = d
        .iter()
        .map(|di| di.checked_div(&max_abs).expect("nonzero direction"))
        .collect();

    let v = translation_image(perm, &d);
    let v_min = v.iter().cloned().reduce(Scalar::min).unwrap();
    let v_max = v.iter().cloned().reduce(Scalar::max).unwrap();
    debug_assert!(v_min.is_positive());
    let rho = v_max.checked_div(&v_min).unwrap();
    Some(DriftData {
        direction: d,
        vector: v,
        rho,
    })
}

/// The IET with lengths lambda(T0) + theta * u and the permutation of T0.
/// `u` must sum to zero; every perturbed length must stay positive.
pub fn drifted_iet(t0: &Iet, u: &[Scalar], theta: &Scalar) -> Result<Iet> {
    if u.len() != t0.n() {
        return Err(Error::InvalidIet(format!(
            "direction has {} entries for {} intervals",
            u.len(),
            t0.n()
        )));
    }
    let mut sum = Scalar::zero();
    for ui in u {
        sum = sum + ui;
    }
    if !sum.is_zero() {
        return Err(Error::DirectionNotZeroSum);
    }
    let mut lengths = Vec::with_capacity(t0.n());
    for (index, (l, ui)) in t0.lengths().iter().zip(u).enumerate() {
        let nl = l + &(theta * ui);
        if !nl.is_positive() {
            return Err(Error::ThetaTooLarge { index });
        }
        lengths.push(nl);
    }
    Iet::new(lengths, t0.permutation().clone())
}

/// Smallest k >= 1 such that every translation length of T^k, reduced modulo
/// 1/q into [0, 1/q), lies in the closed window [2*eps, alpha - 2*eps].
/// Verifies directly on each power rather than trusting any estimate; errors
/// when the window is empty or the cap is exceeded.
pub fn find_drift_power(t: &Iet, q: u64, eps: &Scalar, alpha: &Scalar, cap: u64) -> Result<u64> {
    let four_eps = Scalar::from_int(4) * eps;
    if &four_eps >= alpha {
        return Err(Error::EmptyDriftWindow);
    }
    let lo = Scalar::from_int(2) * eps;
    let hi = alpha - &lo;
    let step = Scalar::ratio(1, q as i64);
    let t_inv = t.inverse();
    let mut acc = Iet::identity();
    for k in 1..=cap {
        acc = acc.compose_with_inner_inverse(t, &t_inv);
        let ok = acc.translations().iter().all(|w| {
            let r = w.rem_euclid(&step);
            lo <= r && r <= hi
        });
        if ok {
            return Ok(k);
        }
    }
    Err(Error::NoDriftPower { cap })
}

/// Cap used by the drift-power search when drift data is available:
/// ceil(10 / (theta * v_min)).
pub fn drift_power_cap(theta: &Scalar, v_min: &Scalar) -> u64 {
    let bound = Scalar::from_int(10)
        .checked_div(&(theta * v_min))
        .expect("positive drift step");
    let c = bound.ceil();
    u64::try_from(&c).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_one_based(images).unwrap()
    }

    fn rot(p: i64, q: i64) -> Iet {
        Iet::rotation(Scalar::ratio(p, q)).unwrap()
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&perm(&[2, 1])));
        assert!(!is_admissible(&perm(&[1, 3, 2]))); // k = 1 fixed
        assert!(!is_admissible(&perm(&[2, 1, 3]))); // k = 3 fixes the whole prefix
        assert!(is_admissible(&perm(&[3, 2, 1])));
        assert!(!is_admissible(&perm(&[1])));
    }

    #[test]
    fn drifting_direction_of_swap() {
        let data = find_drifting_direction(&perm(&[2, 1])).unwrap();
        assert_eq!(data.direction, vec![Scalar::from_int(-1), Scalar::one()]);
        assert_eq!(data.vector, vec![Scalar::one(), Scalar::one()]);
        assert_eq!(data.rho, Scalar::one());
        assert!(data.is_consistent(&perm(&[2, 1])));
    }

    #[test]
    fn drifting_direction_of_reversal() {
        let sigma = perm(&[3, 2, 1]);
        let data = find_drifting_direction(&sigma).unwrap();
        assert!(data.is_consistent(&sigma));
        // v_1 = d_2 + d_3, v_2 = d_3 - d_1, v_3 = -(d_1 + d_2), all positive
        for v in &data.vector {
            assert!(v.is_positive());
        }
    }

    #[test]
    fn non_admissible_has_no_direction() {
        assert!(find_drifting_direction(&perm(&[1, 3, 2])).is_none());
        assert!(find_drifting_direction(&perm(&[2, 1, 3])).is_none());
        assert!(find_drifting_direction(&perm(&[1])).is_none());
    }

    /// Exhaustive equivalence of admissibility and driftability over all
    /// merged-form permutations with n <= 5.
    #[test]
    fn admissible_iff_driftable_small_n() {
        for n in 1..=5usize {
            let mut images: Vec<usize> = (1..=n).collect();
            permute(&mut images, 0, &mut |p| {
                let sigma = perm(p);
                if !sigma.is_merged() {
                    return;
                }
                let adm = is_admissible(&sigma);
                let drift = find_drifting_direction(&sigma);
                assert_eq!(adm, drift.is_some(), "permutation {p:?}");
                if let Some(d) = drift {
                    assert!(d.is_consistent(&sigma), "permutation {p:?}");
                }
            });
        }
    }

    fn permute(items: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == items.len() {
            f(items);
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            permute(items, k + 1, f);
            items.swap(k, i);
        }
    }

    #[test]
    fn drifted_iet_examples() {
        let t0 = rot(1, 5);
        let u = [Scalar::from_int(-1), Scalar::one()];
        let t = drifted_iet(&t0, &u, &Scalar::ratio(1, 100)).unwrap();
        assert_eq!(t.lengths(), &[Scalar::ratio(79, 100), Scalar::ratio(21, 100)]);
        assert_eq!(drifted_iet(&t0, &u, &Scalar::zero()).unwrap(), t0);
        // omega moves linearly by theta * v
        let theta = Scalar::ratio(1, 100);
        let dt = drifted_iet(&t0, &u, &theta).unwrap();
        for (w_new, w_old) in dt.translations().iter().zip(t0.translations()) {
            assert_eq!(&(w_new - w_old), &theta);
        }
        // theta too large: the first length drops to zero
        assert!(matches!(
            drifted_iet(&t0, &u, &Scalar::ratio(4, 5)),
            Err(Error::ThetaTooLarge { .. })
        ));
        // non-zero-sum direction
        assert!(matches!(
            drifted_iet(&t0, &[Scalar::one(), Scalar::one()], &Scalar::ratio(1, 100)),
            Err(Error::DirectionNotZeroSum)
        ));
    }

    #[test]
    fn drift_linearity_on_admissible_permutations() {
        for images in [vec![2usize, 1], vec![3, 2, 1], vec![4, 3, 2, 1], vec![2, 4, 1, 3]] {
            let sigma = perm(&images);
            let data = match find_drifting_direction(&sigma) {
                Some(d) => d,
                None => continue,
            };
            let n = images.len();
            let lengths: Vec<Scalar> = (0..n).map(|_| Scalar::ratio(1, n as i64)).collect();
            let t0 = Iet::new(lengths, sigma.clone()).unwrap();
            let theta = Scalar::ratio(1, 1000);
            let t = drifted_iet(&t0, &data.direction, &theta).unwrap();
            for i in 0..n {
                let expected = &t0.translations()[i] + &(&theta * &data.vector[i]);
                assert_eq!(t.translations()[i], expected);
            }
        }
    }

    #[test]
    fn drift_power_search() {
        // T = rotation by 1/5 + theta; translations of T^k are k*theta mod 1/5.
        let theta = Scalar::ratio(1, 100);
        let t = drifted_iet(
            &rot(1, 5),
            &[Scalar::from_int(-1), Scalar::one()],
            &theta,
        )
        .unwrap();
        let alpha = Scalar::ratio(1, 10);
        // eps = theta/3: k = 1 already lands inside [2eps, alpha - 2eps]
        let eps = theta.checked_div(&Scalar::from_int(3)).unwrap();
        assert_eq!(find_drift_power(&t, 5, &eps, &alpha, 100).unwrap(), 1);
        // eps = theta: need 2theta <= k*theta, so k = 2
        assert_eq!(find_drift_power(&t, 5, &theta, &alpha, 100).unwrap(), 2);
        // empty window
        assert!(matches!(
            find_drift_power(&t, 5, &Scalar::ratio(1, 40), &alpha, 100),
            Err(Error::EmptyDriftWindow)
        ));
        // cap exceeded: window reachable only beyond the cap
        assert!(matches!(
            find_drift_power(&t, 5, &theta, &alpha, 1),
            Err(Error::NoDriftPower { cap: 1 })
        ));
    }

    #[test]
    fn drift_power_verifies_postcondition() {
        let theta = Scalar::ratio(1, 97);
        let t = drifted_iet(&rot(1, 5), &[Scalar::from_int(-1), Scalar::one()], &theta).unwrap();
        let alpha = Scalar::ratio(1, 10);
        let eps = Scalar::ratio(1, 200);
        let k = find_drift_power(&t, 5, &eps, &alpha, 1000).unwrap();
        let tk = t.power(k as i64);
        let step = Scalar::ratio(1, 5);
        let lo = Scalar::from_int(2) * &eps;
        let hi = &alpha - &lo;
        for w in tk.translations() {
            let r = w.rem_euclid(&step);
            assert!(lo <= r && r <= hi);
        }
    }
}
