//! Independent oracles shared by the integration tests.
//!
//! Nothing here uses the equilibrium coefficients: CP equilibria are decided
//! by comparing surpluses directly, best responses by searching over charges.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zrsim_core::{Config, ConfigSet, Game, Isp, ModelParams};

pub const REF_P: f64 = 0.35;
pub const REF_C: f64 = 4.0;
pub const REF_T: f64 = 3.0;

pub fn reference(a1: f64, a2: f64) -> ModelParams {
    ModelParams::log(REF_P, REF_C, REF_T, a1, a2).unwrap()
}

pub fn reference_game(a1: f64, a2: f64) -> Game {
    Game::duopoly(reference(a1, a2)).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Gap `u^SS − u^NN` computed straight from log utility.
pub fn log_gap(p: f64, c: f64) -> f64 {
    let nn = (1.0 / p - 1.0).clamp(0.0, c / 2.0);
    let u_nn = 2.0 * (nn.ln_1p() - p * nn);
    2.0 * (c / 2.0).ln_1p() - u_nn
}

/// Random valid log-utility parameters: p in (0.05, 0.9), c in (0.5, 100),
/// symmetric t between 1.01 and 11 times the validity gap, a's in (0, 20).
pub fn random_params(rng: &mut impl Rng) -> ModelParams {
    let p = rng.gen_range(0.05..0.9);
    let c = rng.gen_range(0.5..100.0);
    let t = log_gap(p, c) * rng.gen_range(1.01..11.0);
    let a1 = rng.gen_range(0.0..20.0);
    let a2 = rng.gen_range(0.0..20.0);
    ModelParams::log(p, c, t, a1, a2).unwrap()
}

/// Same as [`random_params`] with independent t1 and t2.
pub fn random_params_asym(rng: &mut impl Rng) -> ModelParams {
    let base = random_params(rng);
    let gap = log_gap(base.p(), base.c());
    let t1 = gap * rng.gen_range(1.01..11.0);
    let t2 = gap * rng.gen_range(1.01..11.0);
    base.with_transport(t1, t2).unwrap()
}

pub fn random_config(rng: &mut impl Rng) -> Config {
    Config::ALL[rng.gen_range(0..4)]
}

/// Surplus of CP `i` when `isp` runs `m_own` at `q_own` and the rival runs
/// `m_other` at `q_other`, computed from shares and consumptions only.
pub fn cp_payoff(game: &Game, isp: Isp, i: usize, q_own: f64, m_own: Config, q_other: f64, m_other: Config) -> f64 {
    let a = game.params().rate(i);
    let t_own = game.transport(isp);
    let t_other = game.transport(isp.other());
    let x = (game.surplus(m_own) - game.surplus(m_other) + t_other) / (t_own + t_other);
    let margin = |q: f64, m: Config| if m.sponsors(i) { a - q } else { a };
    x * margin(q_own, m_own) * game.theta(m_own, i) + (1.0 - x) * margin(q_other, m_other) * game.theta(m_other, i)
}

/// Configurations on `isp` from which no CP gains by a unilateral switch on
/// that ISP alone.
pub fn direct_equilibria(game: &Game, isp: Isp, q_own: f64, q_other: f64, m_other: Config) -> ConfigSet {
    Config::ALL
        .into_iter()
        .filter(|&m| {
            (0..2).all(|i| {
                let stay = cp_payoff(game, isp, i, q_own, m, q_other, m_other);
                let flip = cp_payoff(game, isp, i, q_own, m.flip(i), q_other, m_other);
                flip <= stay
            })
        })
        .collect()
}

/// Revenue of `isp` in configuration `m` at charge `q`.
pub fn revenue(game: &Game, isp: Isp, q: f64, m: Config, m_other: Config) -> f64 {
    let t_own = game.transport(isp);
    let t_other = game.transport(isp.other());
    let x = (game.surplus(m) - game.surplus(m_other) + t_other) / (t_own + t_other);
    let p = game.params().p();
    x * (0..2)
        .map(|i| if m.sponsors(i) { q } else { p } * game.theta(m, i))
        .sum::<f64>()
}

fn best_at(game: &Game, isp: Isp, q: f64, q_other: f64, m_other: Config) -> Option<(f64, Config)> {
    direct_equilibria(game, isp, q, q_other, m_other)
        .iter()
        .map(|m| (revenue(game, isp, q, m, m_other), m))
        .max_by(|a, b| a.0.total_cmp(&b.0))
}

/// Grid search for the best charge over `[0, a1 + a2 + q_other]`: at each
/// charge the ISP picks its most profitable direct equilibrium. With `refine`,
/// wherever the equilibrium set changes between neighbouring grid points the
/// boundary is located by bisection on the direct predicate.
pub fn grid_best_response(
    game: &Game,
    isp: Isp,
    q_other: f64,
    m_other: Config,
    points: usize,
    refine: bool,
) -> (f64, f64, Config) {
    let hi = game.params().a1() + game.params().a2() + q_other;
    let step = hi / (points - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, Config::NN);
    let mut consider = |q: f64| {
        if let Some((r, m)) = best_at(game, isp, q, q_other, m_other) {
            if r > best.0 {
                best = (r, q, m);
            }
        }
    };
    let mut prev_set = direct_equilibria(game, isp, 0.0, q_other, m_other);
    consider(0.0);
    for k in 1..points {
        let q = k as f64 * step;
        let set = direct_equilibria(game, isp, q, q_other, m_other);
        consider(q);
        if refine && set != prev_set {
            for m in Config::ALL {
                if prev_set.contains(m) && !set.contains(m) {
                    let (mut lo, mut up) = (q - step, q);
                    for _ in 0..60 {
                        let mid = 0.5 * (lo + up);
                        if direct_equilibria(game, isp, mid, q_other, m_other).contains(m) {
                            lo = mid;
                        } else {
                            up = mid;
                        }
                    }
                    consider(lo);
                }
            }
        }
        prev_set = set;
    }
    // NN at a charge above the whole grid
    consider(hi * 2.0 + 1.0);
    best
}

/// Brute-force maximiser of `ln(1+z1) + ln(1+z2) − p·(unsponsored z)` on a
/// uniform grid of the simplex `z1 + z2 ≤ c`.
pub fn log_consumption_grid(p: f64, c: f64, m: Config, n: usize) -> (f64, f64, f64) {
    let h = c / (n - 1) as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..n {
        let z1 = i as f64 * h;
        for j in 0..(n - i) {
            let z2 = j as f64 * h;
            let pay = p * (if m.sponsors(0) { 0.0 } else { z1 } + if m.sponsors(1) { 0.0 } else { z2 });
            let u = z1.ln_1p() + z2.ln_1p() - pay;
            if u > best.0 {
                best = (u, z1, z2);
            }
        }
    }
    (best.1, best.2, best.0)
}
