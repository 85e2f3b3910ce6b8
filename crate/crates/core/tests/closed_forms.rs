use boundwealth::distribution::{normal_pdf, terminal_law};
use boundwealth::shadow::{balanced_upper_bound, solve_shadow};
use boundwealth::strategies::{
    call_fraction_at, call_price, call_replication_fraction, d_lower, d_upper, hjb_residual,
    optimal_amount, put_fraction_at, put_price, put_replication_fraction, strategy_amount,
    value_function,
};
use boundwealth::{Bounds, InvestorParams, MarketParams, Scenario, StrategySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALPHA: f64 = 1e-4;

fn standard() -> MarketParams {
    MarketParams::new(0.01, 0.03, 0.1, 20.0).unwrap()
}

fn scenario(market: MarketParams, x0: f64, k_lower: Option<f64>, k_upper: Option<f64>) -> Scenario {
    Scenario::new(
        market,
        InvestorParams::new(ALPHA, x0).unwrap(),
        Bounds::new(k_lower, k_upper).unwrap(),
    )
    .unwrap()
    .resolved()
    .unwrap()
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Risk-neutral price of a payoff on the shadow terminal wealth: under the
/// pricing measure `X̃_T = X̃ e^{rτ} + (θ/α)√τ Z`. The integral is split at
/// the payoff's kinks.
fn risk_neutral_price<F: Fn(f64) -> f64>(
    market: &MarketParams,
    t: f64,
    shadow: f64,
    kinks: &[f64],
    payoff: F,
) -> f64 {
    let tau = market.horizon() - t;
    let forward = shadow * (market.r() * tau).exp();
    let spread = market.theta() / ALPHA * tau.sqrt();
    let mut cuts = vec![-12.0, 12.0];
    cuts.extend(
        kinks
            .iter()
            .map(|k| (k - forward) / spread)
            .filter(|z| z.abs() < 12.0),
    );
    cuts.sort_by(f64::total_cmp);
    let integral: f64 = cuts
        .windows(2)
        .map(|w| {
            simpson(
                |z| payoff(forward + spread * z) * normal_pdf(z),
                w[0],
                w[1],
                20_000,
            )
        })
        .sum();
    (-market.r() * tau).exp() * integral
}

#[test]
fn put_price_at_the_forward_matches_quadrature() {
    let m = standard();
    let shadow = 800.0 * (-0.2f64).exp();
    assert!(d_lower(&m, ALPHA, 800.0, 0.0, shadow).unwrap().abs() < 1e-12);
    let p = put_price(&m, ALPHA, 800.0, 0.0, shadow).unwrap();
    let oracle = risk_neutral_price(&m, 0.0, shadow, &[800.0], |x| (800.0 - x).max(0.0));
    assert!((p - oracle).abs() < 1e-6, "{p} vs {oracle}");
    assert!((p - 2921.43).abs() < 0.01, "{p}");
}

#[test]
fn prices_match_quadrature_across_moneyness() {
    let m = MarketParams::new(0.02, 0.05, 0.25, 10.0).unwrap();
    for &(t, shadow, k) in &[
        (0.0, 1000.0, 800.0),
        (3.0, -500.0, 2000.0),
        (9.5, 4000.0, 3000.0),
        (1.0, 0.0, -1e4),
    ] {
        let p = put_price(&m, ALPHA, k, t, shadow).unwrap();
        let c = call_price(&m, ALPHA, k, t, shadow).unwrap();
        let po = risk_neutral_price(&m, t, shadow, &[k], |x| (k - x).max(0.0));
        let co = risk_neutral_price(&m, t, shadow, &[k], |x| (x - k).max(0.0));
        let scale = 1.0 + po.abs().max(co.abs());
        assert!((p - po).abs() / scale < 1e-8, "put {p} vs {po}");
        assert!((c - co).abs() / scale < 1e-8, "call {c} vs {co}");
    }
}

#[test]
fn parity_and_antisymmetry_over_random_draws() {
    let m = standard();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst_parity: f64 = 0.0;
    let mut worst_anti: f64 = 0.0;
    for _ in 0..10_000 {
        let t = rng.random_range(0.0..19.99);
        let shadow = rng.random_range(-20_000.0..40_000.0);
        let k = rng.random_range(-20_000.0..40_000.0);
        let tau = m.horizon() - t;
        let p = put_price(&m, ALPHA, k, t, shadow).unwrap();
        let c = call_price(&m, ALPHA, k, t, shadow).unwrap();
        let forward_gap = shadow - k * (-m.r() * tau).exp();
        let scale = p.abs().max(c.abs()).max(forward_gap.abs());
        worst_parity = worst_parity.max((c - p - forward_gap).abs() / scale);

        let d = d_upper(&m, ALPHA, k, t, shadow).unwrap();
        let call = call_replication_fraction(&m, ALPHA, k, t, shadow).unwrap();
        let mirrored = -put_fraction_at(&m, t, -d);
        worst_anti = worst_anti.max((call - mirrored).abs() / call.abs().max(f64::MIN_POSITIVE));
        let direct = call_fraction_at(&m, t, d);
        worst_anti = worst_anti.max((call - direct).abs() / call.abs().max(f64::MIN_POSITIVE));
    }
    assert!(worst_parity <= 1e-10, "parity {worst_parity:e}");
    assert!(worst_anti <= 1e-10, "antisymmetry {worst_anti:e}");
}

#[test]
fn replicating_stock_amount_is_price_delta_times_optimal_amount() {
    let m = standard();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..500 {
        let t = rng.random_range(0.0..19.0);
        let k = rng.random_range(-5_000.0..20_000.0);
        let tau = m.horizon() - t;
        // keep |d| moderate so the difference quotient is well conditioned
        let d = rng.random_range(-4.0..4.0);
        let shadow = (k - d * tau.sqrt() * m.theta() / ALPHA) * (-m.r() * tau).exp();
        let step = 0.5;
        let amount = optimal_amount(&m, ALPHA, t).unwrap();

        let p = put_price(&m, ALPHA, k, t, shadow).unwrap();
        let dp = (put_price(&m, ALPHA, k, t, shadow + step).unwrap()
            - put_price(&m, ALPHA, k, t, shadow - step).unwrap())
            / (2.0 * step);
        let held = put_replication_fraction(&m, ALPHA, k, t, shadow).unwrap() * p;
        assert!(
            (held - dp * amount).abs() <= 1e-6 * amount,
            "put {held} vs {}",
            dp * amount
        );

        let c = call_price(&m, ALPHA, k, t, shadow).unwrap();
        let dc = (call_price(&m, ALPHA, k, t, shadow + step).unwrap()
            - call_price(&m, ALPHA, k, t, shadow - step).unwrap())
            / (2.0 * step);
        let held = call_replication_fraction(&m, ALPHA, k, t, shadow).unwrap() * c;
        assert!(
            (held - dc * amount).abs() <= 1e-6 * amount,
            "call {held} vs {}",
            dc * amount
        );
    }
}

#[test]
fn doubly_bounded_amount_equals_its_decomposition() {
    // optimal - put stock + call stock, each taken from the public pieces
    let s = scenario(standard(), 1000.0, Some(0.0), Some(2000.0));
    let m = *s.market();
    let spec = StrategySpec::for_bounds(s.bounds());
    for &(t, shadow) in &[
        (0.0, s.shadow_x0().unwrap()),
        (5.0, -3000.0),
        (12.0, 800.0),
        (19.5, 5000.0),
    ] {
        let amount = strategy_amount(&spec, &s, t, shadow, f64::INFINITY).unwrap();
        let put = put_price(&m, ALPHA, 0.0, t, shadow).unwrap()
            * put_replication_fraction(&m, ALPHA, 0.0, t, shadow).unwrap();
        let call = call_price(&m, ALPHA, 2000.0, t, shadow).unwrap()
            * call_replication_fraction(&m, ALPHA, 2000.0, t, shadow).unwrap();
        let expected = optimal_amount(&m, ALPHA, t).unwrap() + put - call;
        assert!(
            (amount - expected).abs() <= 1e-9 * expected.abs().max(1.0),
            "{amount} vs {expected}"
        );
    }
}

#[test]
fn hjb_residual_on_grid() {
    let m = standard();
    let dt = 1e-3 * m.horizon();
    let dx = 1e-3 / ALPHA;
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let t = dt + (m.horizon() - 2.0 * dt) * i as f64 / 49.0;
        for j in 0..50 {
            let x = -20_000.0 + 60_000.0 * j as f64 / 49.0;
            let v = value_function(&m, ALPHA, t, x).unwrap();
            let res = hjb_residual(&m, ALPHA, t, x, dt, dx).unwrap();
            // V_t is of order θ²|V|, the natural scale of every term
            worst = worst.max(res.abs() / (m.theta() * m.theta() * v.abs()));
        }
    }
    assert!(worst <= 1e-4, "{worst:e}");
}

#[test]
fn budget_holds_by_quadrature_at_the_solved_shadow() {
    // E[H_T X_T] = X0 evaluated as the risk-neutral price of the clamped payoff
    for &(kl, ku) in &[
        (Some(1000.0), None),
        (Some(-1000.0), None),
        (None, Some(1500.0)),
        (Some(0.0), Some(1500.0)),
    ] {
        let s = scenario(standard(), 1000.0, kl, ku);
        let x = s.shadow_x0().unwrap();
        let payoff = |v: f64| {
            v.max(kl.unwrap_or(f64::NEG_INFINITY))
                .min(ku.unwrap_or(f64::INFINITY))
        };
        let kinks: Vec<f64> = kl.into_iter().chain(ku).collect();
        let value = risk_neutral_price(s.market(), 0.0, x, &kinks, payoff);
        assert!((value - 1000.0).abs() < 1e-6, "{kl:?} {ku:?}: {value}");
    }
}

#[test]
fn shadow_converges_to_wealth_as_floor_drops() {
    let mut previous = f64::NEG_INFINITY;
    for k in [0.0, -5_000.0, -10_000.0, -20_000.0, -30_000.0, -60_000.0] {
        let x = scenario(standard(), 1000.0, Some(k), None)
            .shadow_x0()
            .unwrap();
        assert!(x < 1000.0 && x > previous, "K_l = {k}: {x}");
        previous = x;
    }
    assert!(1000.0 - previous < 1e-6);
}

#[test]
fn collar_column_with_zero_floor() {
    let m = MarketParams::new(0.01, 0.03, 0.2, 20.0).unwrap();
    let balanced = balanced_upper_bound(1000.0, &m, 0.0).unwrap();
    let mut xs = Vec::new();
    for ku in [None, Some(4000.0), Some(balanced), Some(1500.0)] {
        xs.push(scenario(m, 1000.0, Some(0.0), ku).shadow_x0().unwrap());
    }
    assert!((xs[2] - 1000.0).abs() <= 1e-6 * 1000.0);
    assert!(xs.windows(2).all(|w| w[1] > w[0]), "{xs:?}");
}

#[test]
fn law_support_and_masses() {
    let s = scenario(standard(), 1000.0, Some(800.0), Some(3000.0));
    let law = terminal_law(&s).unwrap();
    assert_eq!(law.support(), (800.0, 3000.0));
    assert!(law.mass_lower > 0.0 && law.mass_upper > 0.0);
    assert!((law.cdf(800.0) - law.mass_lower).abs() < 1e-15);
    assert_eq!(law.cdf(3000.0), 1.0);
    // the solver really is at a root
    let again = solve_shadow(&s).unwrap();
    assert!((again.shadow_x0 - s.shadow_x0().unwrap()).abs() < 1e-9 * 1000.0);
}
