use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use qkd3_core::bound::{approx_bound, exact_bound, simple_bound, BoundMethod};
use qkd3_core::decoy::{distance_sweep, ChannelParams, Protocol};
use qkd3_core::keyrate::secure_region_frontier;
use qkd3_core::sim::{azuma_check, run_protocol, ProtocolStats, SimConfig, AzumaReport, DEFAULT_DELTA};
use qkd3_core::{Error, KrausCoefficients};

use crate::format::csv_row;
use crate::CliError;

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Debug, Args, Serialize)]
pub struct BoundArgs {
    #[arg(long)]
    pub eb: f64,
    #[arg(long)]
    pub alpha: f64,
}

#[derive(Serialize)]
struct BoundRecord {
    e_b: f64,
    alpha: f64,
    ep_exact: f64,
    ep_approx: f64,
    ep_simple: f64,
    ay_star: f64,
    witness: KrausCoefficients,
}

pub fn bound(a: &BoundArgs) -> Result<String, CliError> {
    let exact = exact_bound(a.eb, a.alpha)?;
    Ok(to_json(&BoundRecord {
        e_b: a.eb,
        alpha: a.alpha,
        ep_exact: exact.ep_max,
        ep_approx: approx_bound(a.eb, a.alpha)?,
        ep_simple: simple_bound(a.eb, a.alpha)?,
        ay_star: exact.ay_star,
        witness: exact.witness,
    }))
}

#[derive(Debug, Args, Serialize)]
pub struct Fig1Args {
    /// Largest e_b on the grid.
    #[arg(long = "eb-max", default_value_t = 0.1)]
    pub eb_max: f64,
    /// Number of grid points, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
}

pub fn fig1(a: &Fig1Args) -> Result<String, CliError> {
    if a.steps < 2 {
        return Err(Error::InvalidArgument("--steps must be at least 2".into()).into());
    }
    if !(a.eb_max > 0.0 && a.eb_max <= 0.5) {
        return Err(Error::Domain {
            name: "eb_max",
            value: a.eb_max,
            domain: "(0, 1/2]",
        }
        .into());
    }
    let last = a.steps - 1;
    let mut out = String::from("eb,ep_exact,ep_approx,ep_5eb\n");
    for k in 0..a.steps {
        let e = if k == last { a.eb_max } else { a.eb_max * k as f64 / last as f64 };
        let row = [e, exact_bound(e, e)?.ep_max, approx_bound(e, e)?, 5.0 * e];
        out.push_str(&csv_row(&row));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Args, Serialize)]
pub struct RegionArgs {
    /// Number of alpha values in [0, 1/2].
    #[arg(long, default_value_t = 51)]
    pub steps: usize,
    #[arg(long, default_value = "approx", value_parser = parse_method)]
    pub method: BoundMethod,
}

fn parse_method(s: &str) -> Result<BoundMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn region(a: &RegionArgs) -> Result<String, CliError> {
    let frontier = secure_region_frontier(a.steps, a.method)?;
    let mut out = String::from("alpha,eb_max\n");
    for (alpha, eb) in frontier {
        out.push_str(&csv_row(&[alpha, eb]));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Args, Serialize)]
pub struct DecoyArgs {
    #[arg(long, default_value = "three-state", value_parser = parse_protocol)]
    pub protocol: Protocol,
    #[arg(long = "L-min", default_value_t = 0.0)]
    pub l_min: f64,
    #[arg(long = "L-max", default_value_t = 160.0)]
    pub l_max: f64,
    #[arg(long = "L-step", default_value_t = 1.0)]
    pub l_step: f64,
    /// key=value channel parameters; unspecified keys keep the GYS defaults.
    #[arg(long, value_name = "FILE")]
    pub params: Option<PathBuf>,
}

fn parse_protocol(s: &str) -> Result<Protocol, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn decoy(a: &DecoyArgs) -> Result<String, CliError> {
    let params = match &a.params {
        Some(path) => ChannelParams::from_file(path)?,
        None => ChannelParams::default(),
    };
    let points = distance_sweep(&params, a.protocol, a.l_min, a.l_max, a.l_step)?;
    let mut out = String::from("L_km,mu,Q_mu,E_mu,Q1,e1,e_p,R\n");
    for p in points {
        let row = [
            p.l_km,
            p.mu,
            p.obs.q_mu,
            p.obs.e_mu,
            p.obs.q1,
            p.obs.e1,
            p.e_p,
            p.rate.max(0.0),
        ];
        out.push_str(&csv_row(&row));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    /// Data bits per run; 8 N (1 + delta) rounds are sent.
    #[arg(long = "N", default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Re(a_I),Im(a_I),Re(a_X),Im(a_X),Re(a_Y),Im(a_Y),Re(a_Z),Im(a_Z)
    #[arg(long, default_value = "1,0,0,0,0,0,0,0", allow_hyphen_values = true, value_parser = parse_attack)]
    #[serde(serialize_with = "attack_as_text")]
    pub attack: KrausCoefficients,
}

fn parse_attack(s: &str) -> Result<KrausCoefficients, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn attack_as_text<S: serde::Serializer>(k: &KrausCoefficients, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&k.to_string())
}

#[derive(Serialize)]
struct SimulationRecord {
    stats: ProtocolStats,
    azuma: AzumaReport,
}

pub fn simulate(a: &SimulateArgs) -> Result<String, CliError> {
    let config = SimConfig {
        n: a.n,
        delta: a.delta,
        attack: a.attack,
        seed: a.seed,
    };
    let stats = run_protocol(&config)?;
    let azuma = azuma_check(&stats, &a.attack)?;
    Ok(to_json(&SimulationRecord { stats, azuma }))
}
