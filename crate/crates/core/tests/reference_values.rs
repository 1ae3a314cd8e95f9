//! Reference values at p = 0.35, c = 4, t = 3 with log utility.

mod common;

use approx::assert_abs_diff_eq;
use common::*;
use zrsim_core::user_model::{consumption_oracle, solve_consumption};
use zrsim_core::{aggregate_user_surplus, market_share, Config, Isp, SystemState};

// first-order conditions solved by hand: 1/(1+z) = p and 0.35 z^2 + 0.6 z − 5.75 = 0
const TH_NN: f64 = 13.0 / 7.0;
const TH_SN: f64 = 23.0 / 7.0;

fn u_nn() -> f64 {
    2.0 * ((20.0f64 / 7.0).ln() - 0.35 * TH_NN)
}

fn u_sn() -> f64 {
    (30.0f64 / 7.0).ln() + (12.0f64 / 7.0).ln() - 0.35 * 5.0 / 7.0
}

#[test]
fn consumption_closed_forms() {
    let params = reference(0.0, 0.0);
    let nn = solve_consumption(&params, Config::NN);
    assert_abs_diff_eq!(nn.theta1, TH_NN, epsilon = 1e-12);
    assert_abs_diff_eq!(nn.theta2, TH_NN, epsilon = 1e-12);
    assert_abs_diff_eq!(nn.u, u_nn(), epsilon = 1e-12);
    assert_abs_diff_eq!(nn.u, 0.799_644_249, epsilon = 1e-9);

    let sn = solve_consumption(&params, Config::SN);
    assert_abs_diff_eq!(sn.theta1, TH_SN, epsilon = 1e-9);
    assert_abs_diff_eq!(sn.theta2, 4.0 - TH_SN, epsilon = 1e-9);
    assert_abs_diff_eq!(sn.u, u_sn(), epsilon = 1e-9);

    let ns = solve_consumption(&params, Config::NS);
    assert_abs_diff_eq!(ns.theta1, sn.theta2, epsilon = 1e-12);

    let ss = solve_consumption(&params, Config::SS);
    assert_eq!((ss.theta1, ss.theta2), (2.0, 2.0));
    assert_abs_diff_eq!(ss.u, 2.0 * 3.0f64.ln(), epsilon = 1e-12);
}

#[test]
fn oracle_agrees_with_closed_forms() {
    let params = reference(0.0, 0.0);
    for m in Config::ALL {
        let grid = consumption_oracle(&params, m, 4001);
        let (z1, z2, u) = log_consumption_grid(0.35, 4.0, m, 4001);
        let exact = solve_consumption(&params, m);
        assert!((grid.theta1 - exact.theta1).abs() <= 2e-3, "{m}");
        assert!((grid.theta2 - exact.theta2).abs() <= 2e-3, "{m}");
        assert!(
            (z1 - exact.theta1).abs() <= 2e-3 && (z2 - exact.theta2).abs() <= 2e-3,
            "{m}"
        );
        assert!((u - exact.u).abs() <= 1e-4, "{m}");
    }
}

#[test]
fn market_split_examples() {
    assert_eq!(market_share(1.2, 1.2, 3.0, 3.0).unwrap(), 0.5);
    let x = market_share(u_sn(), u_nn(), 3.0, 3.0).unwrap();
    assert_abs_diff_eq!(x, (u_sn() - u_nn() + 3.0) / 6.0, epsilon = 1e-15);
    assert_abs_diff_eq!(x, 0.6575, epsilon = 1e-4);
    assert_abs_diff_eq!(market_share(0.8, 0.8, 3.0, 6.0).unwrap(), 2.0 / 3.0, epsilon = 1e-15);
}

#[test]
fn aggregate_surplus_matches_integration() {
    let (u1, u2, t) = (2.0 * 3.0f64.ln(), u_nn(), 3.0);
    let x = market_share(u1, u2, t, t).unwrap();
    // midpoint rule is exact on each linear piece
    let n = 1000;
    let left: f64 = (0..n).map(|k| u1 - t * (k as f64 + 0.5) * x / n as f64).sum::<f64>() * x / n as f64;
    let right: f64 = (0..n)
        .map(|k| u2 - t * (1.0 - (x + (k as f64 + 0.5) * (1.0 - x) / n as f64)))
        .sum::<f64>()
        * (1.0 - x)
        / n as f64;
    assert_abs_diff_eq!(
        aggregate_user_surplus(u1, u2, x, t, t, true),
        left + right,
        epsilon = 1e-9
    );
}

#[test]
fn alpha1_against_nn() {
    let k = reference_game(0.0, 0.0).nash_coefficients(Isp::One, Config::NN);
    // both shares cancel: 1 − θ1^NN / θ1^SN
    assert_abs_diff_eq!(k.alpha1, 10.0 / 23.0, epsilon = 1e-9);
    assert_eq!([k.alpha2, k.beta2, k.gamma2, k.delta2], [0.0; 4]);
}

#[test]
fn alpha1_matches_cp1_indifference() {
    let game = reference_game(2.0, 0.2);
    // CP1 indifferent between NN and SN on ISP1 at q1 = a1·α1, located by bisection on payoffs
    let gain = |q: f64| {
        cp_payoff(&game, Isp::One, 0, q, Config::SN, 0.0, Config::NN)
            - cp_payoff(&game, Isp::One, 0, q, Config::NN, 0.0, Config::NN)
    };
    let (mut lo, mut hi) = (0.0, 2.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if gain(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert_abs_diff_eq!(lo, 2.0 * 10.0 / 23.0, epsilon = 1e-9);
}

#[test]
fn boundary_charge_admits_sn_and_nn() {
    let game = reference_game(2.0, 0.2);
    let q1 = 2.0 * game.nash_coefficients(Isp::One, Config::NN).alpha1;
    assert_abs_diff_eq!(q1, 0.869_565_2, epsilon = 1e-6);
    let set = game.equilibrium_configs(Isp::One, q1, 0.7, Config::NN);
    assert!(set.contains(Config::SN) && set.contains(Config::NN), "{set}");
    // the same two survive the direct check slightly inside each side
    assert!(direct_equilibria(&game, Isp::One, q1 * (1.0 - 1e-9), 0.7, Config::NN).contains(Config::SN));
    assert!(direct_equilibria(&game, Isp::One, q1 * (1.0 + 1e-9), 0.7, Config::NN).contains(Config::NN));
}

#[test]
fn free_sponsorship_admits_ss() {
    let game = reference_game(1.0, 1.5);
    assert!(game
        .equilibrium_configs(Isp::One, 0.0, 0.0, Config::NN)
        .contains(Config::SS));
}

#[test]
fn cp_surplus_examples() {
    let (a1, a2) = (3.0, 1.2);
    let game = reference_game(a1, a2);
    let nn = game.cp_surplus(0.4, Config::NN, 0.9, Config::NN);
    assert_abs_diff_eq!(nn.cp1, a1 * TH_NN, epsilon = 1e-12);
    assert_abs_diff_eq!(nn.cp2, a2 * TH_NN, epsilon = 1e-12);

    let q = a1 * (1.0 - TH_NN / TH_SN);
    let sn = game.cp_surplus(q, Config::SN, q, Config::SN);
    assert_abs_diff_eq!(sn.cp1, a1 * TH_NN, epsilon = 1e-9);
    assert_abs_diff_eq!(sn.cp2, a2 * (4.0 - TH_SN), epsilon = 1e-9);
    assert!(sn.cp2 < a2 * TH_NN);
}

#[test]
fn isp_surplus_examples() {
    let a = 6.0;
    let game = reference_game(a, 0.6);
    let nn = SystemState::evaluate(&game, 1.0, Config::NN, 2.0, Config::NN);
    assert_abs_diff_eq!(nn.isp1, 0.5 * 0.35 * 2.0 * TH_NN, epsilon = 1e-12);
    assert_abs_diff_eq!(nn.isp1, 0.65, epsilon = 1e-12);
    assert_abs_diff_eq!(nn.isp2, nn.isp1, epsilon = 1e-15);

    let q = a * (1.0 - TH_NN / TH_SN);
    let sn = SystemState::evaluate(&game, q, Config::SN, q, Config::SN);
    assert_abs_diff_eq!(
        sn.isp1,
        0.5 * (a * (TH_SN - TH_NN) + 0.35 * (4.0 - TH_SN)),
        epsilon = 1e-9
    );

    let rho = 0.9;
    let game = reference_game(a, rho * a);
    let q = a * rho * (1.0 - (4.0 - TH_SN) / 2.0);
    let ss = SystemState::evaluate(&game, q, Config::SS, q, Config::SS);
    assert_abs_diff_eq!(
        ss.isp1,
        0.5 * 4.0 * a * rho * (1.0 - (4.0 - TH_SN) / 2.0),
        epsilon = 1e-9
    );
}
