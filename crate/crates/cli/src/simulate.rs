//! `simulate`: synthetic judge runs plus gold labels.

use std::path::PathBuf;

use serde::Serialize;

use judgekit_core::record::write_jsonl;
use judgekit_core::sim::{generate_dataset, LatentJudge, SimConfig};

use crate::errors::{CliError, CliResult};
use crate::manifest::{ensure_out_dir, write_manifest};
use crate::pipeline;

#[derive(Debug, Clone, Serialize)]
pub struct SimulateConfig {
    pub setting: String,
    pub k: usize,
    pub likert: usize,
    pub n_instances: usize,
    pub responses: usize,
    pub seed: u64,
    pub tau: f64,
    pub noise: f64,
    pub position_bias: f64,
    pub token_bias: f64,
    pub annotators: usize,
    pub annotator_noise: f64,
    pub order_noise: f64,
    pub listwise_interm: bool,
    pub output: PathBuf,
}

pub fn run(config: &SimulateConfig) -> CliResult<()> {
    let setting = pipeline::parse_setting(&config.setting)?;
    let judge = LatentJudge {
        tau: config.tau,
        noise: config.noise,
        position_bias: config.position_bias,
        token_bias: config.token_bias,
        seed: config.seed,
    };
    let mut sim = SimConfig::new(
        setting,
        pipeline::resolve_granularity(setting, config.k, config.likert),
        config.n_instances,
    );
    sim.responses = config.responses;
    sim.annotators = config.annotators;
    sim.annotator_noise = config.annotator_noise;
    sim.order_noise = config.order_noise;
    sim.listwise_interm = config.listwise_interm;

    let dataset = generate_dataset(&judge, &sim).map_err(CliError::from)?;
    ensure_out_dir(&config.output)?;
    write_jsonl(config.output.join("records.jsonl"), &dataset.records)?;
    write_jsonl(config.output.join("labels.jsonl"), &dataset.labels)?;
    write_manifest(&config.output, "simulate", config, &[])?;
    Ok(())
}
