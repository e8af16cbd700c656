//! BER sweep driver: merges defaults, an optional config file and command
//! line flags into one simulation configuration, runs the SNR sweep and
//! writes the CSV report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use mrtsim_core::io::{self, ConfigOverlay};
use mrtsim_core::sim::{self, BerRecord, SimConfig};

#[derive(Parser, Debug)]
#[command(
    name = "mrtsim",
    version,
    about = "Monte Carlo BER simulator for massive MIMO with re-transmission combining and turbo coding"
)]
struct Cli {
    /// Antenna count at both ends
    #[arg(long)]
    n: Option<usize>,
    /// Re-transmissions per symbol vector
    #[arg(long = "n-rt")]
    n_rt: Option<usize>,
    /// Constituent code: 4-state | 16-state
    #[arg(long)]
    code: Option<String>,
    /// Comma-separated SNR-per-bit points in dB, e.g. 2.5,3,3.5,4
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Maximum frames per SNR point
    #[arg(long)]
    frames: Option<u64>,
    /// Stop a point early once this many bit errors were counted
    #[arg(long = "min-errors")]
    min_errors: Option<u64>,
    /// Turbo decoder iterations
    #[arg(long)]
    iters: Option<usize>,
    /// Data bits per frame
    #[arg(long = "frame-bits")]
    frame_bits: Option<usize>,
    /// Master seed for all random substreams
    #[arg(long)]
    seed: Option<u64>,
    /// Flat key-value config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Cli {
    fn overlay(&self) -> ConfigOverlay {
        ConfigOverlay {
            n: self.n,
            n_rt: self.n_rt,
            code: self.code.clone(),
            frame_bits: self.frame_bits,
            snr_db_list: self.snr.clone(),
            max_frames: self.frames,
            min_bit_errors: self.min_errors,
            turbo_iterations: self.iters,
            master_seed: self.seed,
            output_path: self.out.clone(),
        }
    }
}

fn print_record(r: &BerRecord) {
    eprintln!(
        "snr {:>6.2} dB | frames {:>8} | bits {:>11} | errors {:>8} | ber {:.3e} | {:.1}s",
        r.snr_db, r.frames_run, r.bits_simulated, r.bit_errors, r.ber, r.wall_seconds
    );
}

fn run(cli: Cli) -> mrtsim_core::Result<()> {
    let mut cfg = SimConfig::default();
    if let Some(path) = &cli.config {
        io::read_config(path)?.apply(&mut cfg)?;
    }
    cli.overlay().apply(&mut cfg)?;
    cfg.validate()?;

    let out_path = cfg
        .output_path
        .clone()
        .unwrap_or_else(|| PathBuf::from("ber.csv"));

    eprintln!(
        "n = {}, n_rt = {}, code = {}, frame_bits = {}, iterations = {}, seed = {}",
        cfg.n, cfg.n_rt, cfg.code, cfg.frame_bits, cfg.turbo_iterations, cfg.master_seed
    );

    // One sweep per SNR point so progress appears as results land.
    let mut records = Vec::with_capacity(cfg.snr_db_list.len());
    for snr_db in cfg.snr_db_list.clone() {
        let mut point_cfg = cfg.clone();
        point_cfg.snr_db_list = vec![snr_db];
        let mut point_records = sim::run_sweep(&point_cfg)?;
        for r in &point_records {
            print_record(r);
        }
        records.append(&mut point_records);
    }

    io::write_csv_file(&out_path, &records)?;
    eprintln!("wrote {} record(s) to {}", records.len(), out_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
