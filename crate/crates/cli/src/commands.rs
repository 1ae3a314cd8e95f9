use std::collections::BTreeMap;
use std::fmt::Write as _;

use zrsim_core::dynamics::{Check, Witness, DEFAULT_MAX_ROUNDS};
use zrsim_core::experiments::{
    sweep_region_map, sweep_single_isp, sweep_surplus_ray, DEFAULT_A_RANGE, DEFAULT_MAP_STEPS, DEFAULT_RAY_STEPS,
    REGION_HEADER, SURPLUS_HEADER,
};
use zrsim_core::user_model::solve_consumption;
use zrsim_core::{
    fmt_sig, Config, ConfigOption, DynamicsOutcome, Game, GridAxis, Isp, ModelParams, RaySpec, RegionCell, RegionLabel,
    SurplusRow, SweepSpec, SystemState, ThresholdMethod, DEFAULT_A_MAX,
};

use crate::args::{Command, SweepArgs};
use crate::error::CliError;
use crate::output::{opt_sig, state_fields, Report, STATE_HEADER};
use crate::settings::FileConfig;

fn charge(name: &str, q: f64) -> Result<f64, CliError> {
    if q.is_finite() && q >= 0.0 {
        Ok(q)
    } else {
        Err(CliError::Usage(format!(
            "invalid `{name}` = {q}: charges must be finite and non-negative"
        )))
    }
}

pub fn run(command: &Command, params: ModelParams, file: &FileConfig) -> Result<Report, CliError> {
    match command {
        Command::SolveUser { config } => Ok(solve_user(&params, *config)),
        Command::BestResponse { isp, q_other, m_other } => {
            let game = Game::duopoly(params)?;
            Ok(best_response(
                &game,
                (*isp).into(),
                charge("q-other", *q_other)?,
                *m_other,
            ))
        }
        Command::Dynamics {
            initial_m2,
            initial_q2,
            max_rounds,
        } => {
            let game = Game::duopoly(params)?;
            let rounds = max_rounds.or(file.sweep.max_rounds).unwrap_or(DEFAULT_MAX_ROUNDS);
            let q2 = initial_q2.map(|q| charge("initial-q2", q)).transpose()?;
            dynamics(&game, *initial_m2, q2, rounds)
        }
        Command::Verify { q1, m1, q2, m2, exact } => {
            let game = Game::duopoly(params)?;
            Ok(verify(&game, charge("q1", *q1)?, *m1, charge("q2", *q2)?, *m2, !*exact))
        }
        Command::SweepMap { sweep, initial_m2 } => sweep_map(params, &file.sweep(sweep), *initial_m2),
        Command::SweepRay { rho, sweep } => {
            let rows = sweep_surplus_ray(&ray_spec(params, file.rho(*rho)?, &file.sweep(sweep))?)?;
            Ok(surplus_report(&rows))
        }
        Command::SweepSingleIsp { rho, sweep } => {
            let rows = sweep_single_isp(&ray_spec(params, file.rho(*rho)?, &file.sweep(sweep))?)?;
            Ok(surplus_report(&rows))
        }
        Command::Thresholds { rho, isp, a_max } => {
            let game = Game::duopoly(params)?;
            let a_max = a_max.or(file.sweep.a_max).unwrap_or(DEFAULT_A_MAX);
            thresholds(&game, (*isp).into(), file.rho(*rho)?, a_max)
        }
    }
}

fn isp_name(isp: Isp) -> &'static str {
    match isp {
        Isp::One => "ISP1",
        Isp::Two => "ISP2",
    }
}

fn solve_user(params: &ModelParams, only: Option<Config>) -> Report {
    let mut report = Report::new(vec!["config", "theta1", "theta2", "u"]);
    for m in Config::ALL.into_iter().filter(|m| only.is_none_or(|o| o == *m)) {
        let prof = solve_consumption(params, m);
        report.rows.push(vec![
            m.to_string(),
            fmt_sig(prof.theta1),
            fmt_sig(prof.theta2),
            fmt_sig(prof.u),
        ]);
    }
    report
}

fn best_response(game: &Game, isp: Isp, q_other: f64, m_other: Config) -> Report {
    let br = game.best_response(isp, q_other, m_other);
    let mut report = Report::new(vec!["config", "q", "feasible", "profit", "chosen"]);
    report.preamble.push(format!(
        "{} best response against {m_other} at q = {}: {} at q = {}, profit {}",
        isp_name(isp),
        fmt_sig(q_other),
        br.config,
        fmt_sig(br.q),
        fmt_sig(br.profit)
    ));
    for (m, opt) in Config::ALL.into_iter().zip(br.per_config) {
        let (q, feasible, profit) = match opt {
            ConfigOption::Feasible { q, profit } => (q, true, Some(profit)),
            ConfigOption::Infeasible { q } => (q, false, None),
        };
        report.rows.push(vec![
            m.to_string(),
            fmt_sig(q),
            feasible.to_string(),
            opt_sig(profit),
            (m == br.config).to_string(),
        ]);
    }
    report
}

fn dynamics(game: &Game, initial_m2: Config, initial_q2: Option<f64>, max_rounds: usize) -> Result<Report, CliError> {
    let outcome = game.run_dynamics(initial_m2, initial_q2, max_rounds)?;
    let mut header = vec!["outcome", "rounds"];
    header.extend(STATE_HEADER);
    let mut report = Report::new(header);
    let (name, rounds, states): (&str, usize, Vec<&SystemState>) = match &outcome {
        DynamicsOutcome::Converged { state, rounds } => {
            report.preamble.push(format!(
                "converged after {rounds} rounds ({})",
                RegionLabel::classify(&outcome)
            ));
            ("converged", *rounds, vec![state])
        }
        DynamicsOutcome::Oscillating { cycle, period } => {
            report.preamble.push(format!("oscillating with period {period}"));
            ("oscillating", *period, cycle.iter().collect())
        }
        DynamicsOutcome::MaxRoundsExceeded { history } => {
            report
                .preamble
                .push(format!("no convergence within {max_rounds} rounds"));
            ("max_rounds", history.len(), history.last().into_iter().collect())
        }
    };
    for s in states {
        let mut row = vec![name.to_string(), rounds.to_string()];
        row.extend(state_fields(s));
        report.rows.push(row);
    }
    Ok(report)
}

fn describe(w: &Witness<f64>) -> String {
    match w {
        Witness::BetterResponse {
            isp,
            q,
            config,
            profit,
            state_profit,
        } => format!(
            "{} earns {} with {config} at q = {} (state: {})",
            isp_name(*isp),
            fmt_sig(*profit),
            fmt_sig(*q),
            fmt_sig(*state_profit)
        ),
        Witness::NotCpEquilibrium {
            isp,
            config,
            equilibria,
        } => {
            format!(
                "{config} is not a CP equilibrium on {} (equilibria {equilibria})",
                isp_name(*isp)
            )
        }
        Witness::ProfitableFlip { cp, m1, m2, gain } => {
            format!("CP{cp} gains {} by moving to {m1}/{m2}", fmt_sig(*gain))
        }
    }
}

/// Half a unit in the ninth significant digit, the precision charges are printed with.
const PRINTED_REL: f64 = 5e-9;

/// Moves `q` onto a CP indifference boundary when it is within printing error of one.
fn snap(game: &Game, isp: Isp, q: f64, q_other: f64, m_other: Config) -> f64 {
    let th = game.nash_thresholds(isp, q_other, m_other);
    [th.cp1_alone, th.cp2_alone, th.cp1_joining, th.cp2_joining]
        .into_iter()
        .filter(|b| (q - b).abs() <= PRINTED_REL * b.abs())
        .min_by(|a, b| (q - a).abs().total_cmp(&(q - b).abs()))
        .unwrap_or(q)
}

fn verify(game: &Game, q1: f64, m1: Config, q2: f64, m2: Config, snap_charges: bool) -> Report {
    let (mut s1, mut s2) = (q1, q2);
    if snap_charges {
        // each ISP's boundaries move with the rival's charge; iterate to the joint fixed point
        for _ in 0..100 {
            let next = (snap(game, Isp::One, q1, s2, m2), snap(game, Isp::Two, q2, s1, m1));
            if next == (s1, s2) {
                break;
            }
            (s1, s2) = next;
        }
    }
    let state = SystemState::evaluate(game, s1, m1, s2, m2);
    let checked = game.verify_system_equilibrium(&state);
    let mut report = Report::new(vec!["check", "passed", "witnesses"]);
    if (s1, s2) != (q1, q2) {
        report.preamble.push(format!(
            "charges snapped to equilibrium boundaries: q1 = {s1}, q2 = {s2}"
        ));
    }
    let checks: [(&str, &Check<f64>); 3] = [
        ("best_response", &checked.best_response),
        ("cp_nash", &checked.cp_nash),
        ("strong", &checked.strong),
    ];
    for (name, check) in checks {
        let witnesses: Vec<String> = check.witnesses.iter().map(describe).collect();
        report
            .rows
            .push(vec![name.to_string(), check.passed.to_string(), witnesses.join("; ")]);
    }
    report.preamble.push(if checked.all_passed() {
        "system equilibrium: all checks pass".to_string()
    } else {
        "not a system equilibrium".to_string()
    });
    report
}

fn map_spec(params: ModelParams, sweep: &SweepArgs, initial_m2: Option<Config>) -> Result<SweepSpec, CliError> {
    let mut spec = SweepSpec::new(params)?;
    let axis = GridAxis::excluding_zero(
        sweep.a_max.unwrap_or(DEFAULT_A_RANGE),
        sweep.grid.unwrap_or(DEFAULT_MAP_STEPS),
    )?;
    spec.a1 = axis;
    spec.a2 = axis;
    spec.initial_m2 = initial_m2.unwrap_or(Config::NN);
    spec.max_rounds = sweep.max_rounds.unwrap_or(DEFAULT_MAX_ROUNDS);
    spec.threads = sweep.threads;
    Ok(spec)
}

fn ray_spec(params: ModelParams, rho: f64, sweep: &SweepArgs) -> Result<RaySpec, CliError> {
    let mut spec = RaySpec::new(params, rho)?;
    spec.a = GridAxis::excluding_zero(
        sweep.a_max.unwrap_or(DEFAULT_A_RANGE),
        sweep.grid.unwrap_or(DEFAULT_RAY_STEPS),
    )?;
    spec.max_rounds = sweep.max_rounds.unwrap_or(DEFAULT_MAX_ROUNDS);
    spec.threads = sweep.threads;
    Ok(spec)
}

fn glyph(label: RegionLabel) -> char {
    match label {
        RegionLabel::NN => '.',
        RegionLabel::SN => '>',
        RegionLabel::NS => '^',
        RegionLabel::SS => '#',
        RegionLabel::OSC => '~',
        RegionLabel::MAX => '!',
        RegionLabel::ASYM => '?',
    }
}

fn sweep_map(params: ModelParams, sweep: &SweepArgs, initial_m2: Option<Config>) -> Result<Report, CliError> {
    let spec = map_spec(params, sweep, initial_m2)?;
    let cells = sweep_region_map(&spec)?;
    let mut report = Report::new(REGION_HEADER.to_vec());
    report.rows = cells
        .iter()
        .map(|c| {
            vec![
                fmt_sig(c.a1),
                fmt_sig(c.a2),
                c.label.to_string(),
                c.rounds.to_string(),
                fmt_sig(c.q1),
                fmt_sig(c.q2),
            ]
        })
        .collect();
    report.human = Some(map_picture(&cells, spec.a1.steps, spec.a2.steps));
    Ok(report)
}

fn map_picture(cells: &[RegionCell], n1: usize, n2: usize) -> String {
    let mut out = String::new();
    let mut counts = BTreeMap::new();
    for c in cells {
        *counts.entry(c.label).or_insert(0usize) += 1;
    }
    // a2 grows upwards, a1 to the right
    for j in (0..n2).rev() {
        let row: String = (0..n1).map(|i| glyph(cells[i * n2 + j].label)).collect();
        writeln!(out, "{row}").unwrap();
    }
    writeln!(out).unwrap();
    let legend: Vec<String> = counts.iter().map(|(l, k)| format!("{} {l}: {k}", glyph(*l))).collect();
    writeln!(out, "{}", legend.join("  ")).unwrap();
    let rounds = cells
        .iter()
        .filter(|c| !matches!(c.label, RegionLabel::OSC | RegionLabel::MAX))
        .map(|c| c.rounds)
        .max();
    if let Some(r) = rounds {
        writeln!(out, "longest convergence: {r} rounds").unwrap();
    }
    out
}

fn surplus_report(rows: &[SurplusRow]) -> Report {
    let mut report = Report::new(SURPLUS_HEADER.to_vec());
    let mut header = vec!["a", "mode", "label"];
    header.extend(STATE_HEADER);
    // the human table also shows how each dynamics run ended
    let mut human = Report::new(header);
    for r in rows {
        let head = [fmt_sig(r.a), r.mode.to_string()];
        let state = state_fields(&r.state);
        report
            .rows
            .push(head.iter().cloned().chain(state.iter().cloned()).collect());
        let label = r.label.map(|l| l.to_string()).unwrap_or_default();
        human.rows.push(head.into_iter().chain([label]).chain(state).collect());
    }
    report.human = Some(human.table());
    report
}

fn thresholds(game: &Game, isp: Isp, rho: f64, a_max: f64) -> Result<Report, CliError> {
    let r = game.sponsorship_threshold(isp, rho, Config::NN, 0.0, a_max)?;
    let cf = game.symmetric_closed_forms();
    let mut report = Report::new(vec![
        "isp",
        "rho",
        "a_s",
        "branch",
        "method",
        "a_prime",
        "a_double_prime",
        "a_sn",
    ]);
    report.rows.push(vec![
        isp_name(isp).to_string(),
        fmt_sig(rho),
        fmt_sig(r.a_s),
        r.branch.to_string(),
        match r.method {
            ThresholdMethod::ClosedForm => "closed_form",
            ThresholdMethod::Bisection => "bisection",
        }
        .to_string(),
        opt_sig(r.a_prime),
        opt_sig(r.a_double_prime),
        fmt_sig(cf.a_sn),
    ]);
    report.human = Some(format!(
        "{} leaves NN at a_s = {} ({} branch, {}) along (a, {} a) against an NN rival\n\
         a' (NN/SN revenue crossing)  = {}\n\
         a'' (NN/SS revenue crossing) = {}\n\
         a_sn = {}: rate above which symmetric SN-SN revenue exceeds 0.5 p c\n",
        isp_name(isp),
        fmt_sig(r.a_s),
        r.branch,
        report.rows[0][4],
        fmt_sig(rho),
        r.a_prime.map_or("-".into(), fmt_sig),
        r.a_double_prime.map_or("-".into(), fmt_sig),
        fmt_sig(cf.a_sn),
    ));
    Ok(report)
}
