use proptest::prelude::*;
use puppetwire_core::estimation::{
    arousal_raw, encode_valence, estimate_arousal, EmotionClass, FaceFilter, EMOTION_CLASSES,
};

/// `winner` gets `k/20`, the rest share what is left equally.
fn peaked(winner: usize, k: u32) -> [f64; EMOTION_CLASSES] {
    let p = k as f64 / 20.0;
    let mut probs = [(1.0 - p) / 6.0; EMOTION_CLASSES];
    probs[winner] = p;
    probs
}

#[test]
fn valence_grid_matches_integer_oracle() {
    for (i, class) in EmotionClass::ALL[..6].iter().enumerate() {
        for k in 3..=20u32 {
            // floor(4 * k/20) == k div 5, with no floating point involved
            let base = (k / 5) as i64;
            let expected = if class.is_positive() { base + 5 } else { base + 1 };
            assert_eq!(encode_valence(&peaked(i, k)).unwrap(), expected, "{class:?} k={k}");
        }
    }
}

#[test]
fn neutral_winner_is_midpoint() {
    for k in 3..=20u32 {
        assert_eq!(encode_valence(&peaked(6, k)).unwrap(), 5);
    }
}

#[test]
fn arousal_integer_oracle() {
    for bpm in 41..=79i64 {
        // hundredths of arousal: 7000 + 105 (bpm - 60), rounded half up
        let hundredths = 7000 + 105 * (bpm - 60);
        assert!((arousal_raw(bpm as f64) * 100.0 - hundredths as f64).abs() < 1e-9);
        assert_eq!(
            estimate_arousal(bpm as f64).unwrap(),
            (hundredths + 50) / 100,
            "bpm {bpm}"
        );
    }
    for bpm in [1.0, 20.0, 40.0, 80.0, 81.0, 200.0] {
        let expected = if bpm < 60.0 { 50 } else { 90 };
        assert_eq!(estimate_arousal(bpm).unwrap(), expected);
    }
    assert!(estimate_arousal(0.0).is_err());
    assert!(estimate_arousal(f64::NAN).is_err());
}

fn probs() -> impl Strategy<Value = [f64; EMOTION_CLASSES]> {
    proptest::array::uniform7(0.0f64..1.0).prop_filter_map("all zero", |raw| {
        let s: f64 = raw.iter().sum();
        (s > 1e-6).then(|| raw.map(|x| x / s))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn valence_in_range(p in probs()) {
        let v = encode_valence(&p).unwrap();
        prop_assert!((1..=9).contains(&v));
    }

    #[test]
    fn valence_monotone_in_winner(p in probs(), boost in 0.0f64..1.0) {
        let (w, _) = p[..6].iter().enumerate().fold((0, -1.0), |b, (i, &x)| if x > b.1 { (i, x) } else { b });
        prop_assume!(p[6] < p[w]);
        // move mass from every other class onto the winner
        let mut q = p;
        for (i, x) in q.iter_mut().enumerate() {
            if i != w {
                *x *= 1.0 - boost;
            }
        }
        q[w] += boost * (1.0 - p[w]);
        prop_assert!(encode_valence(&q).unwrap() >= encode_valence(&p).unwrap());
    }

    #[test]
    fn arousal_monotone_and_clamped(a in 1.0f64..250.0, b in 1.0f64..250.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (alo, ahi) = (estimate_arousal(lo).unwrap(), estimate_arousal(hi).unwrap());
        prop_assert!(alo <= ahi);
        prop_assert!((50..=90).contains(&alo) && (50..=90).contains(&ahi));
    }
}

#[test]
fn filter_converges_on_a_still_target() {
    let mut f = FaceFilter::new(0);
    let mut est = (0.0, 0.0);
    for _ in 0..100 {
        est = f.update(&[[0.5, 0.5]]).unwrap();
    }
    let err = ((est.0 - 0.5).powi(2) + (est.1 - 0.5).powi(2)).sqrt();
    assert!(err < 0.02, "error {err}");
}

pub fn circle(k: usize) -> (f64, f64) {
    let t = std::f64::consts::TAU * k as f64 / 240.0;
    (0.5 + 0.2 * t.cos(), 0.5 + 0.2 * t.sin())
}

#[test]
fn filter_tracks_a_circle() {
    for seed in [0, 1, 2, 3] {
        let mut f = FaceFilter::new(seed);
        let mut sq = 0.0;
        for k in 0..240 {
            let (x, y) = circle(k);
            let (ex, ey) = f.update(&[[x, y]]).unwrap();
            sq += (ex - x).powi(2) + (ey - y).powi(2);
        }
        let rmse = (sq / 240.0).sqrt();
        assert!(rmse < 0.05, "seed {seed}: rmse {rmse}");
    }
}
