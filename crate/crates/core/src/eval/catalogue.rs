use crate::codes::SharedCodec;
use crate::error::Result;
use crate::registry::CodecRegistry;

/// A named code small enough for exhaustive enumeration.
#[derive(Clone, Debug)]
pub struct TestCode {
    pub descriptor: &'static str,
    pub codec: SharedCodec,
}

const SMALL: &[&str] = &[
    "repetition:d=1",
    "repetition:d=2",
    "repetition:d=3",
    "repetition:d=4",
    "repetition:d=5",
    "repetition:d=7",
    "pairtriple",
    "bitrep:bits=2,reps=2",
    "bitrep:bits=3,reps=2",
    "bitrep:bits=2,reps=4",
    "bitrep:bits=3,reps=3",
    "bitrep:bits=4,reps=3",
    "unary:m=4",
    "unary:m=7",
    "linear:rows=101/011",
    "linear:rows=1100/0011",
    "linear:rows=1000110/0100101/0010011/0001111",
    "linear:rows=11110000/00111100/00001111/01010101",
    "linear:rows=111000/000111/101101",
    "linear:rows=1110000000/0001110000/0000001111",
    "complement:inner=(repetition:d=3)",
    "complement:inner=(pairtriple)",
    "complement:inner=(linear:rows=101/011)",
    "complement:inner=(unary:m=4)",
];

/// Codes of block length at most 14 covering repetition, bit-repetition,
/// unary, linear and complement constructions.
pub fn small_test_codes() -> Result<Vec<TestCode>> {
    let registry = CodecRegistry::with_builtins();
    SMALL
        .iter()
        .map(|&descriptor| {
            Ok(TestCode {
                descriptor,
                codec: registry.build(descriptor)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_is_enumerable() {
        let codes = small_test_codes().unwrap();
        assert!(codes.iter().all(|c| c.codec.params().block_len <= 14));
    }
}
