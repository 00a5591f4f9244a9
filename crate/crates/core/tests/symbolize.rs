use loadmotif_core::symbolize::{
    compress, difference_series, letter_for, normalize_household, normalize_values, symbolize, symbolize_window,
    NormalizeMode,
};
use loadmotif_core::{Normalization, SymbolWord, Variant};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ODD_ALPHABETS: [usize; 12] = [3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25];

fn word(s: &str, k: usize) -> SymbolWord {
    SymbolWord::parse(s, k).unwrap()
}

/// Bin by counting how many boundaries `i / k` lie at or below the value.
fn oracle_letter(v: f64, k: usize) -> u8 {
    let below = (1..k).filter(|&i| v >= i as f64 / k as f64).count();
    below as u8
}

#[test]
fn difference_series_matches_loop() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let w: Vec<f64> = (0..6).map(|_| rng.random_range(0.0..3000.0)).collect();
        let mut expected = Vec::new();
        for i in 0..5 {
            expected.push(w[i + 1] - w[i]);
        }
        assert_eq!(difference_series(&w), expected);
    }
    assert_eq!(difference_series(&[100.0, 100.0, 100.0]), vec![0.0, 0.0]);
    assert_eq!(difference_series(&[0.0, 500.0, 200.0]), vec![500.0, -300.0]);
}

#[test]
#[should_panic]
fn difference_series_needs_two_readings() {
    difference_series(&[1.0]);
}

#[test]
fn normalization_examples() {
    assert_eq!(normalize_values(&[100.0, 300.0, 200.0], NormalizeMode::MinMaxUnit), vec![0.0, 1.0, 0.5]);
    assert_eq!(normalize_values(&[500.0, -500.0, 0.0], NormalizeMode::SymmetricUnit), vec![1.0, -1.0, 0.0]);
    assert_eq!(normalize_values(&[42.0; 4], NormalizeMode::MinMaxUnit), vec![0.5; 4]);
    assert_eq!(normalize_values(&[0.0; 3], NormalizeMode::SymmetricUnit), vec![0.0; 3]);
}

#[test]
fn household_normalization_matches_global_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let readings: Vec<f64> = (0..2000).map(|_| rng.random_range(50.0..5050.0)).collect();
    let (mut lo, mut hi) = (f64::MAX, f64::MIN);
    for &r in &readings {
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let got = normalize_household(&readings);
    for (r, g) in readings.iter().zip(&got) {
        assert_eq!(*g, (r - lo) / (hi - lo));
    }
    let mid = normalize_household(&[50.0, 2550.0, 5050.0]);
    assert_eq!(mid[1], 0.5);
    assert_eq!(normalize_household(&[7.0; 5]), vec![0.5; 5]);
}

#[test]
fn bin_boundaries_go_up() {
    let w = symbolize(&[0.0, 0.25, 0.5, 0.75, 1.0], 5).unwrap();
    assert_eq!(w.to_string(), "abcde");
    assert_eq!(letter_for(0.2, 5), 1);
    assert_eq!(letter_for(0.6, 5), 3);
    assert_eq!(letter_for(1.0, 7), 6);
}

#[test]
fn alphabet_seven_matches_binning_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut values: Vec<f64> = (0..100).map(|_| rng.random_range(0.0..=1.0)).collect();
    values.extend((0..=7).map(|i| i as f64 / 7.0));
    let w = symbolize(&values, 7).unwrap();
    for (v, &l) in values.iter().zip(w.letters()) {
        let floor = ((v * 7.0).floor() as u8).min(6);
        assert_eq!(l, oracle_letter(*v, 7), "value {v}");
        assert!(l == floor || l == floor + 1 || l + 1 == floor, "value {v}");
    }
}

#[test]
fn even_and_out_of_range_inputs_are_rejected() {
    assert!(symbolize(&[0.5], 6).unwrap_err().to_string().contains("odd"));
    assert!(symbolize(&[1.5], 5).is_err());
    assert!(symbolize(&[-0.1], 5).is_err());
}

#[test]
fn compression_examples() {
    assert_eq!(compress(&word("abcccb", 5)).to_string(), "abcb");
    assert_eq!(compress(&word("aaaa", 5)).to_string(), "a");
    assert_eq!(compress(&word("abab", 5)).to_string(), "abab");
}

#[test]
fn word_lengths_follow_variant() {
    let window = [100.0, 400.0, 200.0, 900.0, 300.0, 150.0];
    for norm in [Normalization::WithinWindow, Normalization::WithinHousehold] {
        let input: Vec<f64> = match norm {
            Normalization::WithinWindow => window.to_vec(),
            Normalization::WithinHousehold => window.iter().map(|v| v / 1000.0).collect(),
        };
        assert_eq!(symbolize_window(&input, Variant::Raw, norm, 5).unwrap().len(), 6);
        assert_eq!(symbolize_window(&input, Variant::Difference, norm, 5).unwrap().len(), 5);
    }
}

fn arb_word() -> impl Strategy<Value = SymbolWord> {
    prop::sample::select(ODD_ALPHABETS.to_vec()).prop_flat_map(|k| {
        prop::collection::vec(0..k as u8, 1..16).prop_map(move |letters| SymbolWord::new(letters, k))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn compress_is_idempotent_without_repeats(w in arb_word()) {
        let c = compress(&w);
        prop_assert_eq!(compress(&c), c.clone());
        prop_assert!(c.letters().windows(2).all(|p| p[0] != p[1]));
        prop_assert!(!c.is_empty());
        prop_assert_eq!(c.alphabet_size(), w.alphabet_size());
    }

    #[test]
    fn constant_windows_give_middle_letters(
        k in prop::sample::select(ODD_ALPHABETS.to_vec()),
        level in 0.0..10_000.0f64,
        len in 2usize..13,
    ) {
        let window = vec![level; len];
        for variant in [Variant::Raw, Variant::Difference] {
            let w = symbolize_window(&window, variant, Normalization::WithinWindow, k).unwrap();
            prop_assert!(w.letters().iter().all(|&l| l == w.middle()));
        }
        let scaled = vec![0.5; len];
        let w = symbolize_window(&scaled, Variant::Raw, Normalization::WithinHousehold, k).unwrap();
        prop_assert!(w.letters().iter().all(|&l| l == w.middle()));
        let flat = vec![level / 10_000.0; len];
        let w = symbolize_window(&flat, Variant::Difference, Normalization::WithinHousehold, k).unwrap();
        prop_assert!(w.letters().iter().all(|&l| l == w.middle()));
    }

    #[test]
    fn letters_are_monotone_in_value(
        k in prop::sample::select(ODD_ALPHABETS.to_vec()),
        a in 0.0..=1.0f64,
        b in 0.0..=1.0f64,
    ) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(letter_for(lo, k) <= letter_for(hi, k));
        prop_assert_eq!(letter_for(a, k), oracle_letter(a, k));
    }

    #[test]
    fn window_words_have_expected_length(
        window in prop::collection::vec(0.0..5000.0f64, 2..13),
        k in prop::sample::select(vec![5usize, 7, 9]),
    ) {
        let n = window.len();
        let raw = symbolize_window(&window, Variant::Raw, Normalization::WithinWindow, k).unwrap();
        let diff = symbolize_window(&window, Variant::Difference, Normalization::WithinWindow, k).unwrap();
        prop_assert_eq!(raw.len(), n);
        prop_assert_eq!(diff.len(), n - 1);
    }
}
