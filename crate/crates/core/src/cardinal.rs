//! Edge counts in ℕ ∪ {ω}.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul};

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A count that is either a finite natural number or ω (countably infinite).
///
/// Edge multiplicities are always positive; zero only shows up as a derived
/// count, e.g. the indegree of a source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Cardinal {
    Finite(u64),
    Omega,
}

impl Cardinal {
    pub const ZERO: Cardinal = Cardinal::Finite(0);
    pub const ONE: Cardinal = Cardinal::Finite(1);

    pub fn is_zero(self) -> bool {
        self == Cardinal::ZERO
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Cardinal::Finite(_))
    }

    pub fn is_omega(self) -> bool {
        self == Cardinal::Omega
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Cardinal::Finite(n) => Some(n),
            Cardinal::Omega => None,
        }
    }

    /// Addition that reports `None` on `u64` overflow instead of panicking.
    pub fn checked_add(self, rhs: Cardinal) -> Option<Cardinal> {
        match (self, rhs) {
            (Cardinal::Finite(a), Cardinal::Finite(b)) => a.checked_add(b).map(Cardinal::Finite),
            _ => Some(Cardinal::Omega),
        }
    }

    /// Multiplication with `0 · ω = 0`; `None` on `u64` overflow.
    pub fn checked_mul(self, rhs: Cardinal) -> Option<Cardinal> {
        match (self, rhs) {
            (Cardinal::Finite(0), _) | (_, Cardinal::Finite(0)) => Some(Cardinal::ZERO),
            (Cardinal::Finite(a), Cardinal::Finite(b)) => a.checked_mul(b).map(Cardinal::Finite),
            _ => Some(Cardinal::Omega),
        }
    }
}

impl Default for Cardinal {
    fn default() -> Self {
        Cardinal::ZERO
    }
}

impl From<u64> for Cardinal {
    fn from(n: u64) -> Self {
        Cardinal::Finite(n)
    }
}

impl PartialOrd for Cardinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cardinal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Cardinal::Finite(a), Cardinal::Finite(b)) => a.cmp(b),
            (Cardinal::Finite(_), Cardinal::Omega) => Ordering::Less,
            (Cardinal::Omega, Cardinal::Finite(_)) => Ordering::Greater,
            (Cardinal::Omega, Cardinal::Omega) => Ordering::Equal,
        }
    }
}

impl Add for Cardinal {
    type Output = Cardinal;

    fn add(self, rhs: Cardinal) -> Cardinal {
        self.checked_add(rhs).expect("cardinal addition overflowed u64")
    }
}

impl Mul for Cardinal {
    type Output = Cardinal;

    fn mul(self, rhs: Cardinal) -> Cardinal {
        self.checked_mul(rhs).expect("cardinal multiplication overflowed u64")
    }
}

impl Sum for Cardinal {
    fn sum<I: Iterator<Item = Cardinal>>(iter: I) -> Cardinal {
        iter.fold(Cardinal::ZERO, |acc, c| acc + c)
    }
}

impl<'a> Sum<&'a Cardinal> for Cardinal {
    fn sum<I: Iterator<Item = &'a Cardinal>>(iter: I) -> Cardinal {
        iter.copied().sum()
    }
}

impl fmt::Display for Cardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinal::Finite(n) => write!(f, "{n}"),
            Cardinal::Omega => f.write_str("ω"),
        }
    }
}

// On disk a cardinal is a non-negative integer or the string "omega".
impl Serialize for Cardinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Cardinal::Finite(n) => serializer.serialize_u64(*n),
            Cardinal::Omega => serializer.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for Cardinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct CardinalVisitor;

        impl Visitor<'_> for CardinalVisitor {
            type Value = Cardinal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer or \"omega\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cardinal, E> {
                Ok(Cardinal::Finite(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cardinal, E> {
                u64::try_from(v)
                    .map(Cardinal::Finite)
                    .map_err(|_| E::custom(format!("negative count {v}")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Cardinal, E> {
                match v {
                    "omega" | "ω" => Ok(Cardinal::Omega),
                    other => Err(E::custom(format!("expected \"omega\", got {other:?}"))),
                }
            }
        }

        deserializer.deserialize_any(CardinalVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_cardinal() -> impl Strategy<Value = Cardinal> {
        prop_oneof![
            4 => (0u64..1_000_000).prop_map(Cardinal::Finite),
            1 => Just(Cardinal::Omega),
        ]
    }

    #[test]
    fn omega_absorbs() {
        assert_eq!(Cardinal::Finite(3) + Cardinal::Omega, Cardinal::Omega);
        assert_eq!(Cardinal::Omega * Cardinal::Finite(2), Cardinal::Omega);
        assert_eq!(Cardinal::Omega * Cardinal::ZERO, Cardinal::ZERO);
        assert!(Cardinal::Finite(u64::MAX) < Cardinal::Omega);
    }

    #[test]
    fn overflow_is_reported() {
        assert_eq!(Cardinal::Finite(u64::MAX).checked_add(Cardinal::ONE), None);
        assert_eq!(Cardinal::Finite(u64::MAX).checked_mul(Cardinal::Finite(2)), None);
    }

    #[test]
    fn serde_forms() {
        let c: Vec<Cardinal> = serde_json::from_str(r#"[1, "omega", 7]"#).unwrap();
        assert_eq!(c, vec![Cardinal::ONE, Cardinal::Omega, Cardinal::Finite(7)]);
        assert_eq!(serde_json::to_string(&c).unwrap(), r#"[1,"omega",7]"#);
        assert!(serde_json::from_str::<Cardinal>(r#""many""#).is_err());
        assert!(serde_json::from_str::<Cardinal>("-2").is_err());
    }

    proptest! {
        #[test]
        fn addition_is_commutative_and_associative(a in arb_cardinal(), b in arb_cardinal(), c in arb_cardinal()) {
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!((a + b) + c, a + (b + c));
        }

        #[test]
        fn finite_below_omega(n in any::<u64>()) {
            prop_assert!(Cardinal::Finite(n) < Cardinal::Omega);
            prop_assert!((Cardinal::Finite(n) + Cardinal::Omega).is_omega());
        }
    }
}
