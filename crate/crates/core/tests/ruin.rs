use fracrisk::compound::ClaimDistribution;
use fracrisk::counting::GfcpParams;
use fracrisk::mc::RngStreams;
use fracrisk::risk::RiskModelSpec;
use fracrisk::ruin::{
    heavy_tail_asymptotic, light_tail_bound, ruin_curve, ruin_probability_mc, solve_xi0, RuinQuery,
    Xi0Inputs, GAMMA_Y0,
};
use fracrisk::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

/// Event-driven Cramér–Lundberg simulation: unit-rate Poisson claims,
/// exponential(1) sizes, premium rate `eta`. Returns (ruin frequency, SE).
fn classical_ruin(u: f64, t: f64, eta: f64, n: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..n {
        let (mut time, mut paid) = (0.0, 0.0);
        loop {
            time += -(1.0 - rng.random::<f64>()).ln();
            if time > t {
                break;
            }
            paid += -(1.0 - rng.random::<f64>()).ln();
            if u + eta * time - paid < 0.0 {
                hits += 1;
                break;
            }
        }
    }
    let p = hits as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

fn classical_model(eta: f64) -> RiskModelSpec {
    let gfcp = GfcpParams::new(1.0, vec![1.0]).unwrap();
    let claims = ClaimDistribution::exponential(1.0).unwrap();
    RiskModelSpec::agfrp(0.0, eta, gfcp, claims).unwrap()
}

#[test]
fn calendar_clock_matches_classical_simulator() {
    let model = classical_model(2.0);
    let n = 100_000;
    for (i, (u, t)) in [(1.0, 5.0), (0.0, 1.0), (2.0, 3.0), (4.0, 10.0), (0.5, 0.5)]
        .iter()
        .enumerate()
    {
        let q = RuinQuery::new(*u, *t, model.clone(), n, 0.01, 0.99).unwrap();
        let est = ruin_probability_mc(&q, &RngStreams::new(60 + i as u64)).unwrap();
        let se_lib = (est.psi_hat * (1.0 - est.psi_hat) / n as f64).sqrt();
        let (p, se) = classical_ruin(*u, *t, 2.0, n, 900 + i as u64);
        let joint = (se * se + se_lib * se_lib).sqrt();
        assert!(
            (est.psi_hat - p).abs() < 4.0 * joint,
            "u={u} t={t}: {} vs {p}",
            est.psi_hat
        );
    }
}

#[test]
fn ruin_is_monotone_in_capital_and_horizon() {
    let gfcp = GfcpParams::new(0.7, vec![0.6, 0.3]).unwrap();
    let claims = ClaimDistribution::exponential(1.0).unwrap();
    let model = RiskModelSpec::agfrp(0.0, 1.0, gfcp, claims).unwrap();
    let streams = RngStreams::new(61);
    let capitals = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0];
    let curve = ruin_curve(&model, &capitals, 3.0, 50_000, 0.01, 0.99, &streams).unwrap();
    for w in curve.windows(2) {
        assert!(w[1].psi_hat <= w[0].psi_hat);
    }
    assert!(curve[0].psi_hat > 0.0);
    let mut prev_hi = 0.0_f64;
    let mut prev_hat = 0.0_f64;
    for t in [0.5, 1.0, 2.0, 4.0] {
        let e = &ruin_curve(&model, &[1.0], t, 50_000, 0.01, 0.99, &streams).unwrap()[0];
        assert!(e.psi_hat >= prev_hat || e.ci_hi >= prev_hi.min(prev_hat));
        prev_hi = e.ci_hi;
        prev_hat = e.psi_hat;
    }
}

#[test]
fn huge_premium_prevents_ruin() {
    let gfcp = GfcpParams::new(0.8, vec![1.0]).unwrap();
    let claims = ClaimDistribution::exponential(1.0).unwrap();
    let model = RiskModelSpec::agfrp(0.0, 1e6, gfcp, claims).unwrap();
    let q = RuinQuery::new(1.0, 1.0, model, 10_000, 0.01, 0.99).unwrap();
    let e = ruin_probability_mc(&q, &RngStreams::new(62)).unwrap();
    assert!(e.ci_hi < 0.01, "{e:?}");
}

#[test]
fn query_validation() {
    let model = classical_model(1.0);
    assert!(RuinQuery::new(1.0, 1.0, model.clone(), 99, 0.01, 0.99).is_err());
    assert!(RuinQuery::new(1.0, 1.0, model.clone(), 100, 0.2, 0.99).is_err());
    assert!(RuinQuery::new(-1.0, 1.0, model, 100, 0.01, 0.99).is_err());
    let gfcp = GfcpParams::new(0.8, vec![1.0]).unwrap();
    let claims = ClaimDistribution::exponential(1.0).unwrap();
    let gfrp = RiskModelSpec::gfrp(1.0, 1.0, 0.1, gfcp, claims, false).unwrap();
    assert!(RuinQuery::new(1.0, 1.0, gfrp, 100, 0.01, 0.99).is_err());
}

#[test]
fn xi0_matches_closed_form() {
    for (beta, lambda, theta, t) in [
        (0.8, 0.5, 2.0, 2.0),
        (0.5, 0.9, 1.0, 0.7),
        (1.0, 0.2, 3.0, 5.0),
    ] {
        let gfcp = GfcpParams::new(beta, vec![lambda]).unwrap();
        let claims = ClaimDistribution::exponential(theta).unwrap();
        let inputs = Xi0Inputs::new(t, gfcp, claims).unwrap();
        let c = (2.0 * GAMMA_Y0 - 1.0) / (2.0 * f64::powf(t, beta) * GAMMA_Y0);
        let closed = theta * (1.0 - lambda / (1.0 + c));
        let xi0 = solve_xi0(&inputs).unwrap();
        assert!((xi0 - closed).abs() < 1e-9, "{xi0} vs {closed}");
        assert!((inputs.mgf_sum(xi0).unwrap() - inputs.target()).abs() < 1e-9);
    }
}

#[test]
fn xi0_with_two_jump_kinds_and_bounded_claims() {
    let gfcp = GfcpParams::new(0.7, vec![0.3, 0.2]).unwrap();
    let claims = ClaimDistribution::discrete(vec![0.0, 0.5, 0.5]).unwrap();
    let inputs = Xi0Inputs::new(1.5, gfcp, claims).unwrap();
    let xi0 = solve_xi0(&inputs).unwrap();
    assert!((inputs.mgf_sum(xi0).unwrap() - inputs.target()).abs() < 1e-9);
    // independent scan: the sum crosses the target once, between grid neighbours of xi0
    let below = inputs.mgf_sum(xi0 * 0.999).unwrap();
    let above = inputs.mgf_sum(xi0 * 1.001).unwrap();
    assert!(below < inputs.target() && above > inputs.target());
}

#[test]
fn xi0_reports_missing_root() {
    let gfcp = GfcpParams::new(0.8, vec![5.0]).unwrap();
    let claims = ClaimDistribution::exponential(1.0).unwrap();
    let inputs = Xi0Inputs::new(1.0, gfcp, claims).unwrap();
    assert!(matches!(solve_xi0(&inputs), Err(Error::NoRoot { .. })));
    let pareto = ClaimDistribution::pareto(3.0, 1.0).unwrap();
    let gfcp = GfcpParams::new(0.8, vec![0.5]).unwrap();
    assert!(matches!(
        Xi0Inputs::new(1.0, gfcp, pareto),
        Err(Error::Capability(_))
    ));
}

#[test]
fn light_tail_bound_dominates_half_the_ruin_probability() {
    let gfcp = GfcpParams::new(0.8, vec![0.5]).unwrap();
    let claims = ClaimDistribution::exponential(2.0).unwrap();
    let model = RiskModelSpec::agfrp(0.0, 1.0, gfcp.clone(), claims.clone()).unwrap();
    let inputs = Xi0Inputs::new(2.0, gfcp, claims).unwrap();
    let capitals: Vec<f64> = (0..=8).map(f64::from).collect();
    let curve = ruin_curve(
        &model,
        &capitals,
        2.0,
        100_000,
        1e-3,
        0.99,
        &RngStreams::new(63),
    )
    .unwrap();
    let mut prev = f64::INFINITY;
    for e in &curve {
        let b = light_tail_bound(e.u, &inputs).unwrap();
        assert!(0.5 * e.ci_hi <= b.bound, "u={}: {e:?} vs {b:?}", e.u);
        assert!(b.bound < prev);
        prev = b.bound;
    }
    assert_eq!(light_tail_bound(0.0, &inputs).unwrap().bound, 1.0);
}

#[test]
fn heavy_tail_asymptotic_values() {
    let gfcp = GfcpParams::new(1.0, vec![1.0]).unwrap();
    let claims = ClaimDistribution::pareto(2.0, 1.0).unwrap();
    let a = heavy_tail_asymptotic(10.0, 1.0, &gfcp, &claims).unwrap();
    assert!((a - 0.01).abs() < 1e-15);
    let b = heavy_tail_asymptotic(20.0, 1.0, &gfcp, &claims).unwrap();
    assert!((a / b - 4.0).abs() < 1e-12);
    let exp = ClaimDistribution::exponential(1.0).unwrap();
    assert!(heavy_tail_asymptotic(10.0, 1.0, &gfcp, &exp).is_err());
    assert!(heavy_tail_asymptotic(0.5, 1.0, &gfcp, &claims).is_err());
}
