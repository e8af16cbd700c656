//! CSV reporting and flat key-value configuration files.
//!
//! The CSV schema is fixed:
//! `snr_db,n,n_rt,code,frame_bits,iterations,frames,bits,bit_errors,ber,seconds`
//! with exactly one header line, UTF-8 and LF endings. Floats are written in
//! shortest round-trip form, so parsing a report reproduces the records
//! exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::sim::{BerRecord, SimConfig};

pub const CSV_HEADER: &str = "snr_db,n,n_rt,code,frame_bits,iterations,frames,bits,bit_errors,ber,seconds";

/// Writes records to any sink in the fixed CSV schema.
pub fn write_csv<W: Write>(mut sink: W, records: &[BerRecord]) -> Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            sink,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.snr_db,
            r.n,
            r.n_rt,
            r.code,
            r.frame_bits,
            r.iterations,
            r.frames_run,
            r.bits_simulated,
            r.bit_errors,
            r.ber,
            r.wall_seconds
        )?;
    }
    Ok(())
}

/// Writes records to a file.
pub fn write_csv_file(path: &Path, records: &[BerRecord]) -> Result<()> {
    let mut file = BufWriter::new(File::create(path)?);
    write_csv(&mut file, records)?;
    file.flush()?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(field: &str, name: &str, line: usize) -> Result<T> {
    field.parse().map_err(|_| {
        Error::Config(format!(
            "line {line}: cannot parse `{field}` as column `{name}`"
        ))
    })
}

/// Parses a CSV report back into records.
pub fn read_csv<R: Read>(source: R) -> Result<Vec<BerRecord>> {
    let reader = BufReader::new(source);
    let mut records = Vec::new();
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != CSV_HEADER {
                return Err(Error::Config(format!(
                    "unexpected CSV header `{line}`"
                )));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::Config(format!(
                "line {}: expected 11 columns, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let n = idx + 1;
        records.push(BerRecord {
            snr_db: parse_field(fields[0], "snr_db", n)?,
            n: parse_field(fields[1], "n", n)?,
            n_rt: parse_field(fields[2], "n_rt", n)?,
            code: fields[3].parse()?,
            frame_bits: parse_field(fields[4], "frame_bits", n)?,
            iterations: parse_field(fields[5], "iterations", n)?,
            frames_run: parse_field(fields[6], "frames", n)?,
            bits_simulated: parse_field(fields[7], "bits", n)?,
            bit_errors: parse_field(fields[8], "bit_errors", n)?,
            ber: parse_field(fields[9], "ber", n)?,
            wall_seconds: parse_field(fields[10], "seconds", n)?,
        });
    }
    if !saw_header {
        return Err(Error::Config("CSV report is missing its header".into()));
    }
    Ok(records)
}

pub fn read_csv_file(path: &Path) -> Result<Vec<BerRecord>> {
    read_csv(File::open(path)?)
}

/// Partial configuration gathered from a file or command-line flags. Fields
/// left `None` keep the value from the layer below.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverlay {
    pub n: Option<usize>,
    pub n_rt: Option<usize>,
    pub code: Option<String>,
    pub frame_bits: Option<usize>,
    pub snr_db_list: Option<Vec<f64>>,
    pub max_frames: Option<u64>,
    pub min_bit_errors: Option<u64>,
    pub turbo_iterations: Option<usize>,
    pub master_seed: Option<u64>,
    pub output_path: Option<PathBuf>,
}

impl ConfigOverlay {
    /// Applies the overlay on top of `cfg`.
    pub fn apply(&self, cfg: &mut SimConfig) -> Result<()> {
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(n_rt) = self.n_rt {
            cfg.n_rt = n_rt;
        }
        if let Some(code) = &self.code {
            cfg.code = code.parse()?;
        }
        if let Some(frame_bits) = self.frame_bits {
            cfg.frame_bits = frame_bits;
        }
        if let Some(list) = &self.snr_db_list {
            cfg.snr_db_list = list.clone();
        }
        if let Some(max_frames) = self.max_frames {
            cfg.max_frames = max_frames;
        }
        if let Some(min_bit_errors) = self.min_bit_errors {
            cfg.min_bit_errors = min_bit_errors;
        }
        if let Some(iters) = self.turbo_iterations {
            cfg.turbo_iterations = iters;
        }
        if let Some(seed) = self.master_seed {
            cfg.master_seed = seed;
        }
        if let Some(path) = &self.output_path {
            cfg.output_path = Some(path.clone());
        }
        Ok(())
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| {
        Error::Config(format!("config key `{key}`: cannot parse value `{value}`"))
    })
}

fn parse_snr_list(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value::<f64>(key, s))
        .collect()
}

/// Parses a flat `key = value` configuration text. Blank lines and lines
/// starting with `#` are ignored; keys mirror the [`SimConfig`] fields.
pub fn parse_config(text: &str) -> Result<ConfigOverlay> {
    let mut overlay = ConfigOverlay::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`, got `{line}`", idx + 1))
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "n" => overlay.n = Some(parse_value(key, value)?),
            "n_rt" => overlay.n_rt = Some(parse_value(key, value)?),
            "code" => overlay.code = Some(value.to_string()),
            "frame_bits" => overlay.frame_bits = Some(parse_value(key, value)?),
            "snr_db_list" => overlay.snr_db_list = Some(parse_snr_list(key, value)?),
            "max_frames" => overlay.max_frames = Some(parse_value(key, value)?),
            "min_bit_errors" => overlay.min_bit_errors = Some(parse_value(key, value)?),
            "turbo_iterations" => overlay.turbo_iterations = Some(parse_value(key, value)?),
            "master_seed" => overlay.master_seed = Some(parse_value(key, value)?),
            "output_path" => overlay.output_path = Some(PathBuf::from(value)),
            other => {
                return Err(Error::Config(format!(
                    "line {}: unknown config key `{other}`",
                    idx + 1
                )))
            }
        }
    }
    Ok(overlay)
}

/// Reads and parses a configuration file.
pub fn read_config(path: &Path) -> Result<ConfigOverlay> {
    let mut text = String::new();
    File::open(path)?.read_to_string(&mut text)?;
    parse_config(&text)
}
