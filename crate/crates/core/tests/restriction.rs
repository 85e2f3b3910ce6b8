use boundwealth::analytics::{
    fully_constrained_factors, limit_diagnostics, mc_prob_fully_constrained, mc_prob_no_effect,
    no_effect_factors, prob_fully_constrained, prob_no_effect, restriction_probabilities,
};
use boundwealth::distribution::{normal_cdf, normal_pdf};
use boundwealth::strategies::optimal_amount;
use boundwealth::MarketParams;
use proptest::prelude::*;

const ALPHA: f64 = 1e-3;

fn restriction_market(horizon: f64) -> MarketParams {
    MarketParams::new(0.01, 0.04, 0.1, horizon).unwrap()
}

fn threshold(m: &MarketParams) -> f64 {
    optimal_amount(m, ALPHA, 0.0).unwrap()
}

#[test]
fn two_year_no_effect_is_exact() {
    // one factor, and it is the exact probability of the single event
    let m = restriction_market(2.0);
    let x0 = 1.05 * threshold(&m);
    let p = prob_no_effect(&m, ALPHA, x0).unwrap();
    let mc = mc_prob_no_effect(&m, ALPHA, x0, 1_000_000, 41).unwrap();
    assert!(
        (mc.estimate - p).abs() < 3.0 * mc.std_error,
        "{} vs {p}",
        mc.estimate
    );
}

#[test]
fn two_year_fully_constrained_needs_the_opposite_drift_sign() {
    // the event X0 S_1 < optimal amount at year 1 has probability
    // Φ((ln(θ/(σαX0)) - r - (μ - σ²/2))/σ); the stated factor adds the drift
    let m = restriction_market(2.0);
    let x0 = 0.9 * threshold(&m);
    let sigma = m.sigma();
    let drift = m.mu() - 0.5 * sigma * sigma;
    let log_ratio = (m.theta() / (sigma * ALPHA * x0)).ln();
    let exact = normal_cdf((log_ratio - m.r() - drift) / sigma);
    let stated = prob_fully_constrained(&m, ALPHA, x0).unwrap();
    assert!((stated - normal_cdf((log_ratio - m.r() + drift) / sigma)).abs() < 1e-15);

    let mc = mc_prob_fully_constrained(&m, ALPHA, x0, 1_000_000, 43).unwrap();
    assert!(
        (mc.estimate - exact).abs() < 3.0 * mc.std_error,
        "{} vs {exact}",
        mc.estimate
    );
    assert!(
        (mc.estimate - stated).abs() > 10.0 * mc.std_error,
        "{} vs {stated}",
        mc.estimate
    );
}

#[test]
fn no_effect_product_brackets_the_joint_event() {
    // each factor is the exact marginal of an increasing event in the
    // Brownian path, so product <= joint <= smallest factor
    let m = restriction_market(20.0);
    for scale in [1.0, 1.5, 3.0] {
        let x0 = scale * threshold(&m);
        let factors = no_effect_factors(&m, ALPHA, x0).unwrap();
        let product: f64 = factors.iter().product();
        let smallest = factors.iter().cloned().fold(1.0, f64::min);
        let mc = mc_prob_no_effect(&m, ALPHA, x0, 200_000, 45).unwrap();
        // the standard error vanishes when every path hits, so allow one path
        let slack = 3.0 * mc.std_error + 1.0 / 200_000.0;
        assert!(
            mc.estimate + slack >= product,
            "{scale}: {} < {product}",
            mc.estimate
        );
        assert!(
            mc.estimate - slack <= smallest,
            "{scale}: {} > {smallest}",
            mc.estimate
        );
    }
}

#[test]
fn factors_match_direct_gaussian_integration() {
    let m = restriction_market(20.0);
    let x0 = threshold(&m);
    let theta = m.theta();
    let sigma = m.sigma();
    let c0 = ALPHA / theta * x0 * (m.r() * 20.0).exp() - 1.0 / sigma;
    let log_ratio = (theta / (sigma * ALPHA * x0)).ln();
    let drift = m.mu() - 0.5 * sigma * sigma;
    let integrate = |upper: f64| {
        // Simpson on [-40, upper]
        let n = 200_000;
        let a = -40.0;
        let h = (upper - a) / n as f64;
        let mut s = normal_pdf(a) + normal_pdf(upper);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * normal_pdf(a + i as f64 * h);
        }
        s * h / 3.0
    };
    let no_effect = no_effect_factors(&m, ALPHA, x0).unwrap();
    let fully = fully_constrained_factors(&m, ALPHA, x0).unwrap();
    for t in 0..19 {
        let s = t as f64 + 1.0;
        let z1 = (c0 + theta * t as f64 + theta) / s.sqrt();
        assert!((no_effect[t] - integrate(z1)).abs() <= 1e-10, "t={t}");
        let z3 = (log_ratio - m.r() * (20.0 - s) + drift * s) / (sigma * s.sqrt());
        assert!((fully[t] - integrate(z3)).abs() <= 1e-10, "t={t}");
    }
}

#[test]
fn sigma_to_zero_drives_no_effect_to_zero() {
    // μ - r = 0.03 < 1/(T-1), σ falling
    let sweep: Vec<MarketParams> = [0.4, 0.2, 0.1, 0.05, 0.02, 0.01]
        .iter()
        .map(|&s| MarketParams::new(0.01, 0.04, s, 20.0).unwrap())
        .collect();
    let rows = limit_diagnostics(&sweep, ALPHA, 5000.0).unwrap();
    assert!(rows.last().unwrap().p_no_effect < 1e-12);
    assert!(rows.first().unwrap().p_no_effect > rows.last().unwrap().p_no_effect);
}

#[test]
fn growing_excess_return_drives_full_constraint_to_one() {
    let sweep: Vec<MarketParams> = [0.02, 0.05, 0.1, 0.3, 0.6, 1.0]
        .iter()
        .map(|&excess| MarketParams::new(0.01, 0.01 + excess, 0.1, 20.0).unwrap())
        .collect();
    let rows = limit_diagnostics(&sweep, ALPHA, 100.0).unwrap();
    assert!(rows
        .windows(2)
        .all(|w| w[1].p_fully_constrained >= w[0].p_fully_constrained));
    assert!(rows.last().unwrap().p_fully_constrained > 1.0 - 1e-9);
    assert!(rows.iter().all(|r| r.fully_constrained_applies));
}

#[test]
fn vanishing_excess_return_drives_no_effect_to_one() {
    let sweep: Vec<MarketParams> = [0.03, 0.01, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&excess| MarketParams::new(0.01, 0.01 + excess, 0.1, 20.0).unwrap())
        .collect();
    let rows = limit_diagnostics(&sweep, ALPHA, 1000.0).unwrap();
    assert!(rows.last().unwrap().no_effect_applies);
    assert!(rows.last().unwrap().p_no_effect > 1.0 - 1e-9);
}

#[test]
fn repeated_evaluation_is_identical() {
    let m = restriction_market(20.0);
    let x0 = threshold(&m);
    let a = restriction_probabilities(&m, ALPHA, x0).unwrap();
    let b = restriction_probabilities(&m, ALPHA, x0).unwrap();
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn monotone_in_initial_wealth(lo in 10.0f64..5_000.0, step in 1.0f64..5_000.0) {
        let m = restriction_market(20.0);
        let hi = lo + step;
        let a = restriction_probabilities(&m, ALPHA, lo).unwrap();
        let b = restriction_probabilities(&m, ALPHA, hi).unwrap();
        prop_assert!(b.p_no_effect >= a.p_no_effect);
        prop_assert!(b.p_fully_constrained <= a.p_fully_constrained);
    }
}
