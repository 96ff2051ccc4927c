use std::sync::Arc;

use proptest::prelude::*;

use ecgray::bitcore::{hamming, BitString, RandomSource};
use ecgray::codes::{Codec, GrayCode, UnaryCode};
use ecgray::dphist::{neighbor_sensitivity, Dataset, HashSeeds, HistParams, Rounding};
use ecgray::eval::{exact_code_distance, small_test_codes};
use ecgray::linear::{
    count_codewords, count_codewords_brute_force, random_generator, GeneratorMatrix, LinearCodec,
    LinearGrayCode, RepeatCode,
};
use ecgray::registry::{CodecRegistry, Descriptor};

fn bits(max_len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 1..=max_len).prop_map(|b| BitString::from_bools(&b))
}

fn generator(max_n: usize, max_d: usize) -> impl Strategy<Value = GeneratorMatrix> {
    (1..=max_n, any::<u64>()).prop_flat_map(move |(n, seed)| {
        (n..=max_d).prop_map(move |d| {
            random_generator(n, d, &mut RandomSource::new(seed)).expect("full rank sample")
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bitstring_text_roundtrip(b in bits(200)) {
        let back: BitString = b.to_string().parse().unwrap();
        prop_assert_eq!(back, b);
    }

    #[test]
    fn hamming_is_a_metric(a in bits(40), seed in any::<u64>()) {
        let mut r = RandomSource::new(seed);
        let b = ecgray::bitcore::error_pattern(a.len(), ecgray::bitcore::NoiseModel::new(0.3).unwrap(), &mut r);
        let c = ecgray::bitcore::error_pattern(a.len(), ecgray::bitcore::NoiseModel::new(0.3).unwrap(), &mut r);
        let (ab, bc, ac) = (hamming(&a, &b).unwrap(), hamming(&b, &c).unwrap(), hamming(&a, &c).unwrap());
        prop_assert_eq!(ab, hamming(&b, &a).unwrap());
        prop_assert!(ac <= ab + bc);
        prop_assert_eq!(hamming(&a, &a).unwrap(), 0);
        prop_assert_eq!(ab, a.xor(&b).unwrap().weight());
    }

    #[test]
    fn count_matches_brute_force(g in generator(10, 32), t_frac in 0.0f64..1.0) {
        let t = ((1u64 << g.message_bits()) as f64 * t_frac) as u64;
        prop_assert_eq!(count_codewords(t, &g), count_codewords_brute_force(t, &g).unwrap());
    }

    #[test]
    fn cumulative_distance_steps(g in generator(8, 20)) {
        let m = 1u64 << g.message_bits();
        for t in 0..m - 1 {
            let step = hamming(&g.encode_u64(t).unwrap(), &g.encode_u64(t + 1).unwrap()).unwrap() as u64;
            prop_assert_eq!(count_codewords(t + 1, &g), count_codewords(t, &g) + step);
        }
    }

    #[test]
    fn linear_gray_axioms(g in generator(4, 10)) {
        let code = LinearGrayCode::new(Arc::new(LinearCodec::ml(g).unwrap())).unwrap();
        let mut prev: Option<BitString> = None;
        for v in 0..code.max_value() {
            let c = code.encode(v).unwrap();
            prop_assert_eq!(code.decode(&c).unwrap(), v);
            let (l, r) = code.find_block(v).unwrap();
            prop_assert_eq!(3 * code.cumulative(l) + r, v);
            prop_assert!(r < code.step(l).unwrap());
            if let Some(p) = prev {
                prop_assert_eq!(hamming(&p, &c).unwrap(), 1);
            }
            prev = Some(c);
        }
    }

    #[test]
    fn median_survives_one_bad_copy(g in generator(5, 12), v_frac in 0.0f64..1.0, junk in any::<u64>(), copy in 0usize..3) {
        let inner = Arc::new(LinearCodec::ml(g).unwrap());
        let code = RepeatCode::new(inner.clone());
        let v = ((inner.params().messages as f64) * v_frac) as u64;
        let d = inner.params().block_len;
        let mut r = RandomSource::new(junk);
        let noise = ecgray::bitcore::error_pattern(d, ecgray::bitcore::NoiseModel::new(0.45).unwrap(), &mut r);
        let mut corrupt = BitString::zeros(3 * d);
        for i in noise.one_positions() {
            corrupt = corrupt.flipped(copy * d + i).unwrap();
        }
        let received = code.encode(v).unwrap().xor(&corrupt).unwrap();
        prop_assert_eq!(code.decode(&received).unwrap(), v);
    }

    #[test]
    fn gray_over_catalogue_codes(idx in 0usize..24, v_frac in 0.0f64..1.0, flip_frac in 0.0f64..1.0) {
        let inner = small_test_codes().unwrap()[idx].codec.clone();
        let corrects_one = exact_code_distance(inner.as_ref()).unwrap() >= 3;
        let code = GrayCode::new(inner).unwrap();
        let m = code.params().messages;
        let v = ((m - 1) as f64 * v_frac) as u64;
        let c = code.encode(v).unwrap();
        prop_assert_eq!(code.decode(&c).unwrap(), v);
        if v + 1 < m {
            prop_assert_eq!(hamming(&c, &code.encode(v + 1).unwrap()).unwrap(), 1);
        }
        // with inner distance 2 a single flip can make the block index tie
        if !corrects_one {
            return Ok(());
        }
        let pos = 1 + ((c.len() - 1) as f64 * flip_frac) as usize;
        let w = code.decode(&c.flipped(pos).unwrap()).unwrap();
        prop_assert!(w.abs_diff(v) <= 2, "v={} w={}", v, w);
    }

    #[test]
    fn unary_single_flip(m in 2usize..40, v_frac in 0.0f64..1.0, pos_frac in 0.0f64..1.0) {
        let code = UnaryCode::new(m).unwrap();
        let v = ((code.params().messages - 1) as f64 * v_frac) as u64;
        let c = code.encode(v).unwrap();
        prop_assert_eq!(code.decode(&c).unwrap(), v);
        // 11010 is at distance 1 from both 11000 and 11110, so 2 is tight
        let pos = 1 + ((m - 1) as f64 * pos_frac) as usize;
        prop_assert!(code.decode(&c.flipped(pos).unwrap()).unwrap().abs_diff(v) <= 2);
    }

    #[test]
    fn descriptors_roundtrip(idx in 0usize..24, wrap in 0usize..3) {
        let base = small_test_codes().unwrap()[idx].codec.descriptor();
        let text = match wrap {
            0 => base,
            1 => format!("gray:inner=({base})"),
            _ => format!("repeat3:inner=(complement:inner=({base}))"),
        };
        let d = Descriptor::parse(&text).unwrap();
        prop_assert_eq!(Descriptor::parse(&d.to_string()).unwrap(), d);
        let code = CodecRegistry::with_builtins().build(&text).unwrap();
        let again = CodecRegistry::with_builtins().build(&code.descriptor()).unwrap();
        prop_assert_eq!(again.params(), code.params());
        prop_assert_eq!(again.encode(1).unwrap(), code.encode(1).unwrap());
    }

    #[test]
    fn neighbors_differ_in_at_most_one_bit(
        elems in prop::collection::vec(0u64..64, 0..30),
        extra in 0u64..64,
        seed in any::<u64>(),
    ) {
        // eps above ln 19 gives gamma = 1
        let params = HistParams::new(64, 40, 3.0).unwrap();
        prop_assert_eq!(params.gamma, 1.0);
        let codec = params.validate().unwrap();
        let a = Dataset::from_elements(elems);
        let mut b = a.clone();
        b.add(extra, 1);
        let root = RandomSource::new(seed);
        let seeds = HashSeeds::sample(codec.params().block_len, false, &root);
        let rounding = Rounding::new(seed);
        prop_assert!(neighbor_sensitivity(&a, &b, &params, &seeds, &rounding).unwrap() <= 1);
        prop_assert_eq!(neighbor_sensitivity(&a, &a, &params, &seeds, &rounding).unwrap(), 0);
    }
}
