use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use powerslic::bench::{self, EvalConfig, Method, RunConfig, SegmentConfig};
use powerslic::Result;

#[derive(Parser)]
#[command(name = "powerslic", version, about = "Diagram-based superpixel segmentation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Segment one PNG and write a 16-bit label PNG.
    Segment {
        input: PathBuf,
        #[arg(long, default_value = "power")]
        method: Method,
        #[arg(long, default_value_t = 600)]
        k: usize,
        #[arg(long, default_value_t = 10.0)]
        m: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma2: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Subtract the cell weight in Power-SLIC's windowed pass.
        #[arg(long)]
        power_offset: bool,
        #[arg(long, default_value_t = 10)]
        max_iters: usize,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the diagram (power and optimal only).
        #[arg(long)]
        diagram: Option<PathBuf>,
    },
    /// Add Gaussian noise to a PNG.
    Noise {
        input: PathBuf,
        #[arg(long)]
        sigma2: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep methods, k and noise over a directory of PNGs and write a CSV.
    Eval {
        dataset: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "slic,power")]
        method: Vec<Method>,
        #[arg(long, value_delimiter = ',', default_value = "600")]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        sigma2: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seed: Vec<u64>,
        #[arg(long, default_value_t = 10.0)]
        m: f64,
        #[arg(long, default_value_t = 10)]
        max_iters: usize,
        #[arg(long)]
        power_offset: bool,
        /// Directory holding `<image>.gt*.png`; defaults to the dataset.
        #[arg(long)]
        gt_dir: Option<PathBuf>,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Rasterize a stored diagram at a new resolution.
    Upscale {
        diagram: PathBuf,
        #[arg(long)]
        factor: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn threads() -> usize {
    std::env::var("POWERSLIC_THREADS").ok().and_then(|v| v.parse().ok()).unwrap_or(0)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Segment {
            input,
            method,
            k,
            m,
            sigma2,
            seed,
            power_offset,
            max_iters,
            out,
            diagram,
        } => {
            let cfg = RunConfig {
                segment: SegmentConfig {
                    method,
                    k,
                    m,
                    max_iters,
                    power_offset,
                },
                sigma2,
                seed,
                input,
                out,
                diagram,
            };
            let seg = rayon::ThreadPoolBuilder::new()
                .num_threads(threads())
                .build()
                .expect("thread pool")
                .install(|| bench::cmd_segment(&cfg))?;
            println!("k_out={} runtime_ms={:.3}", seg.k_out, seg.runtime_ms);
        }
        Command::Noise { input, sigma2, seed, out } => bench::cmd_noise(&input, sigma2, seed, &out)?,
        Command::Eval {
            dataset,
            method,
            k,
            sigma2,
            seed,
            m,
            max_iters,
            power_offset,
            gt_dir,
            csv,
        } => {
            let cfg = EvalConfig {
                dataset,
                gt_dir,
                methods: method,
                ks: k,
                sigma2s: sigma2,
                seeds: seed,
                m,
                max_iters,
                power_offset,
                threads: threads(),
            };
            let rows = bench::run_eval(&cfg)?;
            bench::write_csv(&csv, &rows)?;
            println!("{} rows written to {}", rows.len(), csv.display());
        }
        Command::Upscale { diagram, factor, out } => {
            let lm = bench::cmd_upscale(&diagram, factor, &out)?;
            println!("{}x{} labels written to {}", lm.width(), lm.height(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
