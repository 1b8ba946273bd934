use rootbe::{find_roots, general_witness, random_poly, tbe, trial_rng, AberthConfig, WitnessConfig, UNIT_ROUNDOFF};

#[test]
fn general_witness_tracks_tbe() {
    let cfg = WitnessConfig::default();
    let mut good = 0;
    let mut worst: f64 = 0.0;
    for trial in 0..100 {
        let p = random_poly(10, 6.0, &mut trial_rng(2024, trial));
        let Ok(x) = find_roots(&p, &AberthConfig::default()) else {
            continue;
        };
        let t = tbe(&p, &x).unwrap().value;
        let Ok(w) = general_witness(&p, &x, &cfg) else {
            continue;
        };
        let ratio = w.epsilon / t.max(UNIT_ROUNDOFF);
        worst = worst.max(ratio);
        if ratio <= 1e3 {
            good += 1;
        }
    }
    assert!(good >= 95, "{good} of 100 trials, worst ratio {worst:e}");
}
