//! judgekit: extract judgment distributions from LLM-judge logprob runs
//! and turn them into pointwise, pairwise, and listwise preferences, with
//! evaluation reports and distributional diagnostics.

mod compare;
mod diagnose;
mod errors;
mod evaluate;
mod judge;
mod manifest;
mod pipeline;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use errors::CliResult;

#[derive(Parser)]
#[command(name = "judgekit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic judge dataset (records + labels).
    Simulate(SimulateArgs),
    /// Run prompts against a live judge endpoint and record logprobs.
    Judge(JudgeArgs),
    /// Turn records into per-method preference predictions.
    Compare(CompareArgs),
    /// Score predictions against labels: accuracy, MSE, tie analysis.
    Evaluate(EvaluateArgs),
    /// Distributional diagnostics over a run.
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// pointwise-score, pairwise-score, pairwise-rank, or listwise.
    #[arg(long)]
    setting: String,
    /// Score granularity for scoring settings.
    #[arg(long, default_value_t = 9)]
    k: usize,
    /// Likert size for pairwise ranking (2, 3, or 5).
    #[arg(long, default_value_t = 3)]
    likert: usize,
    #[arg(short = 'n', long, default_value_t = 100)]
    instances: usize,
    /// Responses per instance (pointwise groups, listwise length).
    #[arg(long, default_value_t = 2)]
    responses: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Judge kernel width in 1-to-9 score units; smaller is sharper.
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    /// Judge perception noise, score units.
    #[arg(long, default_value_t = 0.5)]
    noise: f64,
    /// Latent boost for the first-presented response, score units.
    #[arg(long, default_value_t = 0.0)]
    position_bias: f64,
    /// Unnormalized mass spike on scores divisible by 5.
    #[arg(long, default_value_t = 0.0)]
    token_bias: f64,
    /// Annotator count; 0 emits hard labels.
    #[arg(long, default_value_t = 0)]
    annotators: usize,
    #[arg(long, default_value_t = 1.0)]
    annotator_noise: f64,
    /// Per-presentation-order perception jitter, score units.
    #[arg(long, default_value_t = 0.0)]
    order_noise: f64,
    /// Emit intermediate pairwise verdicts in listwise runs.
    #[arg(long)]
    listwise_interm: bool,
    /// Output directory (records.jsonl, labels.jsonl, manifest.json).
    #[arg(long)]
    output: PathBuf,
    /// Worker threads for generation; 0 keeps the default pool.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct JudgeArgs {
    #[arg(long)]
    setting: String,
    #[arg(long, default_value_t = 9)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    likert: usize,
    /// Ask the judge for an explanation before the verdict.
    #[arg(long)]
    cot: bool,
    #[arg(long)]
    model: String,
    /// Instances JSONL: {"id", "prompt", "responses": [...]}.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Environment variable holding the endpoint URL.
    #[arg(long, default_value = "JUDGE_ENDPOINT")]
    endpoint_env: String,
    /// Environment variable holding the API key.
    #[arg(long, default_value = "JUDGE_API_KEY")]
    key_env: String,
    /// Replay cache directory.
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Concurrent requests.
    #[arg(long, default_value_t = 4)]
    workers: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    listwise_interm: bool,
    #[arg(long, default_value_t = 1024)]
    max_tokens: u32,
    #[arg(long, default_value_t = 20)]
    top_logprobs: u32,
    /// Declare that the endpoint accepts an assistant-prefix message.
    #[arg(long)]
    assume_prefix_support: bool,
    /// Force this assistant-response prefix (requires prefix support).
    #[arg(long)]
    forced_prefix: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    setting: String,
    /// Comma-separated methods. Pointwise: mode,mean,rmean,medi,1p,ram,qt,ps.
    /// Pairwise: mode,medi,mean (timing from --agg). Listwise:
    /// list_mode,list_mean,interm_mode,interm_mean.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long, default_value_t = 9)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    likert: usize,
    /// Aggregation timing for pairwise settings: pre or post.
    #[arg(long, default_value = "pre")]
    agg: String,
    /// Records JSONL.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Listwise length override; inferred from records when absent.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Predictions JSONL from `compare`.
    #[arg(long)]
    predictions: PathBuf,
    /// Labels JSONL: {"id", "label"?, "human_judgments"?}.
    #[arg(long)]
    labels: PathBuf,
    /// Reference method for the tie analysis.
    #[arg(long, default_value = "mean")]
    reference: String,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    setting: String,
    #[arg(long, default_value_t = 9)]
    k: usize,
    #[arg(long, default_value_t = 3)]
    likert: usize,
    #[arg(long)]
    input: PathBuf,
    /// Labels with human_judgments enable alignment and disagreement
    /// sections.
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Same run at the other score granularity (coarsified Wasserstein).
    #[arg(long)]
    alt_records: Option<PathBuf>,
    #[arg(long, default_value_t = 99)]
    alt_k: usize,
    /// Predictions at this granularity, paired with --alt-predictions for
    /// the sign flip rate.
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long)]
    alt_predictions: Option<PathBuf>,
    /// Two-sided significance level for the disagreement correlation.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

fn default_methods(setting: &str) -> &'static str {
    match setting {
        "pairwise-score" | "pairwise-rank" => "mode,medi,mean",
        "listwise" => "list_mode,list_mean",
        _ => "mode,mean,rmean,medi,1p,ram,qt,ps",
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(args) => {
            judgekit_core::parallel::configure_workers(args.workers);
            simulate::run(&simulate::SimulateConfig {
                setting: args.setting,
                k: args.k,
                likert: args.likert,
                n_instances: args.instances,
                responses: args.responses,
                seed: args.seed,
                tau: args.tau,
                noise: args.noise,
                position_bias: args.position_bias,
                token_bias: args.token_bias,
                annotators: args.annotators,
                annotator_noise: args.annotator_noise,
                order_noise: args.order_noise,
                listwise_interm: args.listwise_interm,
                output: args.output,
            })
        }
        Command::Judge(args) => judge::run(&judge::JudgeConfig {
            setting: args.setting,
            k: args.k,
            likert: args.likert,
            cot: args.cot,
            model: args.model,
            input: args.input,
            output: args.output,
            endpoint_env: args.endpoint_env,
            key_env: args.key_env,
            cache_dir: args.cache_dir,
            workers: args.workers,
            seed: args.seed,
            listwise_interm: args.listwise_interm,
            max_tokens: args.max_tokens,
            top_logprobs: args.top_logprobs,
            assume_prefix_support: args.assume_prefix_support,
            forced_prefix: args.forced_prefix,
        }),
        Command::Compare(args) => {
            judgekit_core::parallel::configure_workers(args.workers);
            let methods = args
                .methods
                .unwrap_or_else(|| default_methods(&args.setting).to_string())
                .split(',')
                .map(|m| m.trim().to_string())
                .filter(|m| !m.is_empty())
                .collect();
            compare::run(&compare::CompareConfig {
                setting: args.setting,
                methods,
                k: args.k,
                likert: args.likert,
                agg: args.agg,
                input: args.input,
                output: args.output,
                n: args.n,
            })
        }
        Command::Evaluate(args) => evaluate::run(&evaluate::EvaluateConfig {
            predictions: args.predictions,
            labels: args.labels,
            reference: args.reference,
            output: args.output,
        }),
        Command::Diagnose(args) => {
            judgekit_core::parallel::configure_workers(args.workers);
            diagnose::run(&diagnose::DiagnoseConfig {
                setting: args.setting,
                k: args.k,
                likert: args.likert,
                input: args.input,
                labels: args.labels,
                alt_records: args.alt_records,
                alt_k: args.alt_k,
                predictions: args.predictions,
                alt_predictions: args.alt_predictions,
                alpha: args.alpha,
                output: args.output,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("judgekit: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
