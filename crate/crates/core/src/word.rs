//! Reduced words in the free group on two letters r and t, stored as
//! alternating letter-exponent blocks.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// The two generators.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Letter {
    R,
    T,
}

impl Letter {
    fn symbol(self) -> char {
        match self {
            Letter::R => 'r',
            Letter::T => 't',
        }
    }
}

/// A reduced word: adjacent blocks carry distinct letters and no exponent is
/// zero. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Word {
    blocks: Vec<(Letter, i64)>,
}

impl Word {
    pub fn empty() -> Self {
        Word { blocks: Vec::new() }
    }

    /// Free reduction of an arbitrary block sequence: merges same-letter
    /// neighbours, drops zero exponents, cascades.
    pub fn from_blocks<I: IntoIterator<Item = (Letter, i64)>>(raw: I) -> Self {
        let mut blocks: Vec<(Letter, i64)> = Vec::new();
        for (letter, exp) in raw {
            if exp == 0 {
                continue;
            }
            match blocks.last_mut() {
                Some((l, e)) if *l == letter => {
                    *e += exp;
                    if *e == 0 {
                        blocks.pop();
                    }
                }
                _ => blocks.push((letter, exp)),
            }
        }
        Word { blocks }
    }

    pub fn letter(letter: Letter, exp: i64) -> Self {
        Word::from_blocks([(letter, exp)])
    }

    pub fn blocks(&self) -> &[(Letter, i64)] {
        &self.blocks
    }

    pub fn is_trivial(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Total letter count, counting multiplicity.
    pub fn len(&self) -> u64 {
        self.blocks.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_trivial()
    }

    pub fn inverse(&self) -> Word {
        Word {
            blocks: self.blocks.iter().rev().map(|&(l, e)| (l, -e)).collect(),
        }
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &Word) -> Word {
        Word::from_blocks(self.blocks.iter().chain(&other.blocks).copied())
    }

    /// g w g^-1.
    pub fn conjugate(&self, g: &Word) -> Word {
        g.concat(self).concat(&g.inverse())
    }

    /// [x, y] = x y x^-1 y^-1.
    pub fn commutator(x: &Word, y: &Word) -> Word {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }
}

/// The base relation word u = t^e r t^e r^-1 t^-e r t^-e r^-1, whose
/// evaluation at (R, T) is the commutator [T^e, R T^e R^-1].
pub fn relation_u_word(e: i64) -> Word {
    Word::from_blocks([
        (Letter::T, e),
        (Letter::R, 1),
        (Letter::T, e),
        (Letter::R, -1),
        (Letter::T, -e),
        (Letter::R, 1),
        (Letter::T, -e),
        (Letter::R, -1),
    ])
}

/// The witness word w = [u, t^k u t^-k] with u = relation_u_word(e).
pub fn relation_w_word(e: i64, k: i64) -> Word {
    let u = relation_u_word(e);
    let tk = Word::letter(Letter::T, k);
    Word::commutator(&u, &u.conjugate(&tk))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.blocks.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(l, e) in &self.blocks {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{}", l.symbol())?;
            } else {
                write!(f, "{}^{}", l.symbol(), e)?;
            }
        }
        Ok(())
    }
}

// JSON encoding: a list of [letter, exponent] pairs, e.g. [["t",120],["r",1]].
impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr: Vec<(String, i64)> = self
            .blocks
            .iter()
            .map(|&(l, e)| (l.symbol().to_string(), e))
            .collect();
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = Vec::<(String, i64)>::deserialize(deserializer)?;
        let mut blocks = Vec::with_capacity(repr.len());
        for (l, e) in repr {
            let letter = match l.as_str() {
                "r" => Letter::R,
                "t" => Letter::T,
                other => return Err(D::Error::custom(format!("unknown letter {other:?}"))),
            };
            blocks.push((letter, e));
        }
        let word = Word::from_blocks(blocks.iter().copied());
        if word.blocks != blocks {
            return Err(D::Error::custom("word is not reduced"));
        }
        Ok(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_cases() {
        let w = Word::from_blocks([
            (Letter::R, 1),
            (Letter::T, 1),
            (Letter::T, -1),
            (Letter::R, -1),
        ]);
        assert!(w.is_trivial());

        let v = Word::from_blocks([(Letter::T, 2), (Letter::T, 3), (Letter::R, 0)]);
        assert_eq!(v.blocks(), &[(Letter::T, 5)]);

        let ww = Word::from_blocks([(Letter::T, 1), (Letter::R, 2), (Letter::R, -2), (Letter::T, 4)]);
        assert_eq!(ww.blocks(), &[(Letter::T, 5)]);
    }

    #[test]
    fn inverse_and_concat() {
        let w = Word::from_blocks([(Letter::T, 3), (Letter::R, -2)]);
        assert!(w.concat(&w.inverse()).is_trivial());
        assert_eq!(w.inverse().blocks(), &[(Letter::R, 2), (Letter::T, -3)]);
    }

    #[test]
    fn witness_word_is_reduced_and_nontrivial() {
        let e = 120;
        for k in [1i64, 7, 119, 121, 15360] {
            let w = relation_w_word(e, k);
            assert!(!w.is_trivial(), "k = {k}");
            // reduced by construction: adjacent letters distinct
            for pair in w.blocks().windows(2) {
                assert_ne!(pair[0].0, pair[1].0);
            }
        }
    }

    /// At k = e the word collapses further and a t^{2e} block appears.
    #[test]
    fn witness_word_at_k_equal_e() {
        let e = 120;
        let w = relation_w_word(e, e);
        assert!(!w.is_trivial());
        assert!(w.blocks().contains(&(Letter::T, 2 * e)));
        // strictly shorter than the generic shape
        assert!(w.len() < relation_w_word(e, e + 1).len());
    }

    #[test]
    fn serde_round_trip() {
        let w = relation_w_word(24, 5);
        let json = serde_json::to_string(&w).unwrap();
        let back: Word = serde_json::from_str(&json).unwrap();
        assert_eq!(w, back);
        // non-reduced input is rejected
        assert!(serde_json::from_str::<Word>(r#"[["t",1],["t",2]]"#).is_err());
    }

    mod word_properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_blocks() -> impl Strategy<Value = Vec<(Letter, i64)>> {
            proptest::collection::vec(
                (proptest::bool::ANY, -4i64..=4),
                0..10,
            )
            .prop_map(|raw| {
                raw.into_iter()
                    .map(|(r, e)| (if r { Letter::R } else { Letter::T }, e))
                    .collect()
            })
        }

        proptest! {
            #[test]
            fn reduction_is_reduced(raw in arb_blocks()) {
                let w = Word::from_blocks(raw);
                for pair in w.blocks().windows(2) {
                    prop_assert_ne!(pair[0].0, pair[1].0);
                }
                for &(_, e) in w.blocks() {
                    prop_assert_ne!(e, 0);
                }
            }

            #[test]
            fn inverse_cancels(raw in arb_blocks()) {
                let w = Word::from_blocks(raw);
                prop_assert!(w.concat(&w.inverse()).is_trivial());
                prop_assert!(w.inverse().concat(&w).is_trivial());
                prop_assert_eq!(w.inverse().inverse(), w);
            }

            #[test]
            fn concat_is_associative(a in arb_blocks(), b in arb_blocks(), c in arb_blocks()) {
                let (a, b, c) = (Word::from_blocks(a), Word::from_blocks(b), Word::from_blocks(c));
                prop_assert_eq!(a.concat(&b).concat(&c), a.concat(&b.concat(&c)));
            }
        }
    }
}
