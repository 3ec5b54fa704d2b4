//! End-to-end certification that a fixed IET S and a perturbed rational IET T
//! satisfy a nontrivial free-group relation, so that <S, T> is not free of
//! rank 2.
//!
//! The pipeline: pick a drifting direction for the permutation of the
//! q-rational base T0; choose the parameter schedule (delta, eps, eta, theta,
//! mu) with each parameter at half its strict bound; set T = T0 drifted by
//! theta; form U = [T^{q!}, S T^{q!} S^{-1}], whose support lies in an
//! eps-neighborhood of X_q(S); find a power T^k that moves that support off
//! itself; and verify exactly that the witness word evaluates to the
//! identity. Every step is checked by exact computation and recorded in the
//! certificate.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::drift::{
    drift_power_cap, drifted_iet, find_drift_power, find_drifting_direction, is_admissible,
    DriftData,
};
use crate::error::{Error, Result};
use crate::iet::Iet;
use crate::neighborhoods::{image_set, neighborhood, x_q, IntervalSet};
use crate::rational::is_q_rational;
use crate::scalar::Scalar;
use crate::word::{relation_u_word, relation_w_word, Letter, Word};

/// q! as i64; certification is a desk-scale computation, so q stays small.
pub fn factorial(q: u64) -> Result<i64> {
    let mut acc: i64 = 1;
    for j in 2..=q {
        acc = acc
            .checked_mul(j as i64)
            .ok_or_else(|| Error::Unsupported(format!("{q}! overflows the exponent range")))?;
    }
    Ok(acc)
}

/// Evaluates a word at (R, T): the letter r becomes R, t becomes T, and the
/// written product acts by composition. Block powers are memoized.
pub fn evaluate_word(word: &Word, r: &Iet, t: &Iet) -> Iet {
    let mut memo: HashMap<(Letter, i64), Iet> = HashMap::new();
    let mut acc = Iet::identity();
    for &(letter, exp) in word.blocks() {
        let base = match letter {
            Letter::R => r,
            Letter::T => t,
        };
        let abs = exp.abs();
        let pow = memo
            .entry((letter, abs))
            .or_insert_with(|| base.power(abs))
            .clone();
        let factor = if exp < 0 { pow.inverse() } else { pow };
        acc = acc.compose(&factor);
    }
    acc
}

/// True iff on every connected component of [0,1) minus `excluded`, the map
/// restricts to a single translation of absolute length strictly below eps.
pub fn check_small_translations(f: &Iet, excluded: &IntervalSet, eps: &Scalar) -> bool {
    excluded.complement().intervals().iter().all(|(lo, hi)| {
        match f.translation_on(lo, hi) {
            Some(w) => &w.abs() < eps,
            None => false,
        }
    })
}

/// U = T^e (S T^e S^-1) T^-e (S T^-e S^-1) = [T^e, S T^e S^-1].
pub fn commutator_u(s: &Iet, t: &Iet, e: i64) -> Iet {
    let te = t.power(e);
    let te_inv = te.inverse();
    let conj = s.compose(&te).compose(&s.inverse());
    te.compose(&conj).compose(&te_inv).compose(&conj.inverse())
}

/// True iff the supports are disjoint; in that case the two maps commute,
/// which is verified exactly as well.
pub fn disjoint_support_commutation(u: &Iet, v: &Iet) -> bool {
    if !u.support().intersection(&v.support()).is_empty() {
        return false;
    }
    let commutes = u.compose(v) == v.compose(u);
    debug_assert!(commutes, "maps with disjoint supports must commute");
    commutes
}

/// The certified parameter schedule. Each value sits at exactly half its
/// strict upper bound.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Schedule {
    pub delta: Scalar,
    pub eps: Scalar,
    pub eta: Scalar,
    pub theta: Scalar,
    pub mu: Scalar,
}

impl Schedule {
    /// The strict inequalities required of the schedule, re-checked exactly:
    /// delta < alpha, eps < delta/(11 rho), eta < eps/(4 q!),
    /// theta < min(eps/v_min, eta/(2 |d|_1)), mu < min(theta v_min/4, eta/2).
    pub fn satisfies_bounds(&self, alpha: &Scalar, drift: &DriftData, q_factorial: i64) -> bool {
        let two = Scalar::from_int(2);
        let pos = self.delta.is_positive()
            && self.eps.is_positive()
            && self.eta.is_positive()
            && self.theta.is_positive()
            && self.mu.is_positive();
        if !pos {
            return false;
        }
        let eps_bound = self
            .delta
            .checked_div(&(Scalar::from_int(11) * &drift.rho))
            .unwrap();
        let eta_bound = self
            .eps
            .checked_div(&(Scalar::from_int(4) * Scalar::from_int(q_factorial)))
            .unwrap();
        let theta_bound = self
            .eps
            .checked_div(&drift.v_min())
            .unwrap()
            .min(self.eta.checked_div(&(&two * &drift.direction_l1_norm())).unwrap());
        let mu_bound = (&self.theta * &drift.v_min())
            .checked_div(&Scalar::from_int(4))
            .unwrap()
            .min(self.eta.checked_div(&two).unwrap());
        &self.delta < alpha
            && self.eps < eps_bound
            && self.eta < eta_bound
            && self.theta < theta_bound
            && self.mu < mu_bound
    }
}

/// Picks the schedule for a non-q-rational S: delta = alpha_q(S)/2 and each
/// later parameter at half its strict bound.
pub fn choose_parameters(s: &Iet, q: u64, drift: &DriftData) -> Result<Schedule> {
    let alpha = crate::neighborhoods::alpha_q(s, q);
    if alpha.is_zero() {
        return Err(Error::RationalCaseDelegated { q });
    }
    let q_factorial = factorial(q)?;
    let two = Scalar::from_int(2);
    let delta = alpha.checked_div(&two).unwrap();
    let eps = delta
        .checked_div(&(Scalar::from_int(22) * &drift.rho))
        .unwrap();
    let eta = eps
        .checked_div(&(Scalar::from_int(8) * Scalar::from_int(q_factorial)))
        .unwrap();
    let theta_bound = eps
        .checked_div(&drift.v_min())
        .unwrap()
        .min(eta.checked_div(&(&two * &drift.direction_l1_norm())).unwrap());
    let theta = theta_bound.checked_div(&two).unwrap();
    let mu_bound = (&theta * &drift.v_min())
        .checked_div(&Scalar::from_int(4))
        .unwrap()
        .min(eta.checked_div(&two).unwrap());
    let mu = mu_bound.checked_div(&two).unwrap();
    let schedule = Schedule {
        delta,
        eps,
        eta,
        theta,
        mu,
    };
    debug_assert!(schedule.satisfies_bounds(&alpha, drift, q_factorial));
    Ok(schedule)
}

/// Membership in the mu-ball around the canonical drifted map: the open set
/// of perturbations the construction tolerates for an externally supplied T.
pub fn in_v_ball(t: &Iet, t_theta: &Iet, mu: &Scalar) -> bool {
    t.distance(t_theta).is_less_than(mu)
}

/// One named exact check inside a certificate.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

/// Machine-checkable evidence that the word is a nontrivial relation for
/// (S, T): all chosen parameters plus the exact checks performed.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Certificate {
    pub q: u64,
    pub s: Iet,
    pub t0: Iet,
    pub t: Iet,
    pub schedule: Schedule,
    pub drift: DriftData,
    /// Drift power; absent when the commutator is already the identity and
    /// the shorter witness u is used.
    pub k: Option<u64>,
    pub word: Word,
    pub checks: Vec<Check>,
}

fn check(name: &str, pass: bool) -> Check {
    Check {
        name: name.to_string(),
        pass,
    }
}

/// Re-executes every exact check of the certificate from its stored data.
/// Nothing stored is trusted: the commutator, supports, drift window, and
/// word evaluation are all recomputed.
pub fn run_checks(cert: &Certificate) -> Vec<Check> {
    let mut checks = Vec::new();
    let q = cert.q;
    checks.push(check("t0_is_q_rational", is_q_rational(&cert.t0, q)));
    checks.push(check("t0_admissible", is_admissible(cert.t0.permutation())));
    checks.push(check("s_not_q_rational", !is_q_rational(&cert.s, q)));
    checks.push(check(
        "drift_data_consistent",
        cert.drift.is_consistent(cert.t0.permutation()),
    ));

    let q_factorial = match factorial(q) {
        Ok(f) => f,
        Err(_) => {
            checks.push(check("q_within_supported_scale", false));
            return checks;
        }
    };
    let alpha = crate::neighborhoods::alpha_q(&cert.s, q);
    checks.push(check(
        "schedule_bounds",
        cert.schedule.satisfies_bounds(&alpha, &cert.drift, q_factorial),
    ));
    checks.push(check(
        "t_is_drifted_t0",
        drifted_iet(&cert.t0, &cert.drift.direction, &cert.schedule.theta)
            .map(|t| t == cert.t)
            .unwrap_or(false),
    ));
    checks.push(check(
        "t_within_eta_of_t0",
        cert.t.distance(&cert.t0).is_less_than(&cert.schedule.eta),
    ));

    let u = commutator_u(&cert.s, &cert.t, q_factorial);
    let support = u.support();
    let target = neighborhood(&x_q(&cert.s, q), &cert.schedule.eps);
    checks.push(check(
        "commutator_support_in_x_q_neighborhood",
        support.is_subset_of(&target),
    ));

    match cert.k {
        Some(k) => {
            let k = k as i64;
            let tk = cert.t.power(k);
            let step = Scalar::ratio(1, q as i64);
            let lo = Scalar::from_int(2) * &cert.schedule.eps;
            let hi = &cert.schedule.delta - &lo;
            checks.push(check(
                "drift_window",
                tk.translations().iter().all(|w| {
                    let r = w.rem_euclid(&step);
                    lo <= r && r <= hi
                }),
            ));
            checks.push(check(
                "drift_separates_support",
                image_set(&tk, &support).intersection(&support).is_empty(),
            ));
            let v = tk.compose(&u).compose(&tk.inverse());
            checks.push(check(
                "disjoint_supports_commute",
                disjoint_support_commutation(&u, &v),
            ));
            checks.push(check(
                "word_matches_construction",
                cert.word == relation_w_word(q_factorial, k),
            ));
        }
        None => {
            checks.push(check("commutator_is_identity", u.is_identity()));
            checks.push(check(
                "word_matches_construction",
                cert.word == relation_u_word(q_factorial),
            ));
        }
    }

    checks.push(check("word_nonempty_reduced", !cert.word.is_trivial()));
    let evaluated = evaluate_word(&cert.word, &cert.s, &cert.t);
    checks.push(check("word_evaluates_to_identity", evaluated.is_identity()));
    checks.push(check(
        "word_identity_pointwise",
        evaluated.pointwise_equal(&Iet::identity()),
    ));
    checks
}

/// Builds and fully verifies a relation certificate for (S, T0, q).
///
/// Preconditions checked: T0 is q-rational with an admissible permutation,
/// and S is not q-rational (the rational case needs a different q).
pub fn certify_relation(s: &Iet, t0: &Iet, q: u64) -> Result<Certificate> {
    let q_factorial = factorial(q)?;
    if !is_q_rational(t0, q) {
        return Err(Error::NotQRational { q });
    }
    if is_q_rational(s, q) {
        return Err(Error::RationalCaseDelegated { q });
    }
    let drift = find_drifting_direction(t0.permutation()).ok_or(Error::NotAdmissible)?;
    let schedule = choose_parameters(s, q, &drift)?;
    let t = drifted_iet(t0, &drift.direction, &schedule.theta)?;

    let u = commutator_u(s, &t, q_factorial);
    let (k, word) = if u.is_identity() {
        (None, relation_u_word(q_factorial))
    } else {
        let cap = drift_power_cap(&schedule.theta, &drift.v_min());
        let k = find_drift_power(&t, q, &schedule.eps, &schedule.delta, cap)?;
        (Some(k), relation_w_word(q_factorial, k as i64))
    };

    let mut cert = Certificate {
        q,
        s: s.clone(),
        t0: t0.clone(),
        t,
        schedule,
        drift,
        k,
        word,
        checks: Vec::new(),
    };
    let checks = run_checks(&cert);
    if let Some(failed) = checks.iter().find(|c| !c.pass) {
        return Err(Error::CheckFailed(failed.name.clone()));
    }
    cert.checks = checks;
    Ok(cert)
}

/// Full verification of a stored certificate: re-runs every exact check on
/// the stored data, then re-derives the canonical certificate from (S, T0, q)
/// and requires the stored one to match it field for field. Any tampering
/// with a stored parameter fails at least one of these.
pub fn verify_certificate(cert: &Certificate) -> Vec<Check> {
    let mut checks = run_checks(cert);
    let canonical = match certify_relation(&cert.s, &cert.t0, cert.q) {
        Ok(c) => {
            let same = serde_json::to_value(&c).ok() == serde_json::to_value(cert).ok();
            check("matches_canonical_derivation", same)
        }
        Err(_) => check("matches_canonical_derivation", false),
    };
    checks.push(canonical);
    checks
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
