//! Bit strings, Hamming arithmetic, the binary symmetric channel and seeded
//! randomness.

mod bits;
mod channel;
mod random;

pub use bits::{hamming, BitString};
pub use channel::{bsc_apply, error_pattern, NoiseModel};
pub use random::RandomSource;

pub(crate) use bits::hamming_unchecked;

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn bits(len: usize) -> impl Strategy<Value = BitString> {
        proptest::collection::vec(any::<bool>(), len).prop_map(|v| BitString::from_bools(&v))
    }

    fn triple() -> impl Strategy<Value = (BitString, BitString, BitString)> {
        (0usize..200).prop_flat_map(|n| (bits(n), bits(n), bits(n)))
    }

    proptest! {
        #[test]
        fn triangle_inequality((a, b, c) in triple()) {
            let ac = hamming(&a, &c).unwrap();
            let ab = hamming(&a, &b).unwrap();
            let bc = hamming(&b, &c).unwrap();
            prop_assert!(ac <= ab + bc);
            prop_assert_eq!(ab, hamming(&b, &a).unwrap());
        }

        #[test]
        fn algebraic_identities((a, b, _c) in triple(), cut in 0usize..200) {
            prop_assert_eq!(a.complement().complement(), a.clone());
            prop_assert_eq!(a.xor(&a).unwrap(), BitString::zeros(a.len()));
            prop_assert_eq!(a.concat(&b).len(), a.len() + b.len());
            let i = cut.min(a.len());
            let rebuilt = a.prefix(i).unwrap().concat(&a.suffix(a.len() - i).unwrap());
            prop_assert_eq!(rebuilt, a.clone());
            prop_assert_eq!(a.to_string().parse::<BitString>().unwrap(), a);
        }
    }
}
