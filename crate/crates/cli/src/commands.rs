use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;

use reflectnet_core::channel::{link_budget, synthesize_capture, wavelength_m, ChannelParams, IqCapture, LinkBudget};
use reflectnet_core::demod::symbols::write_confident_symbols;
use reflectnet_core::demod::{DemodConfig, Discriminator, LinearModel};
use reflectnet_core::eval::sweep::BurstModel;
use reflectnet_core::eval::{
    cer_model, check_cer_model, compute_stats, correction_sweep, correlation_map, default_grid, CerVariant,
    SweepConfig, SweepDiscriminator,
};
use reflectnet_core::phy::framing::{MIN_IPG_BITS, SYMBOL_RATE_BAUD};
use reflectnet_core::phy::io::{read_frames, read_symbols, write_frames, write_symbols, SymbolSidecar};
use reflectnet_core::phy::{frame_to_wire, Code5, ScramblerState, WireConfig};
use reflectnet_core::Complex64;
use reflectnet_core::recover::{
    build_report, decode_capture, recovered_frames, train_from_idle, DecodeConfig, TrainingConfig,
};

use crate::DiscriminatorArg;

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Output was produced but some frames carry errors.
    Degraded,
}

/// Bad arguments detected by the front end itself.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_err(msg: impl Into<String>) -> anyhow::Error {
    InputError(msg.into()).into()
}

/// Complex numbers on the command line are written `re,im`.
fn complex_arg(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok(Complex64::new(p(re)?, p(im)?))
}

/// Decimal or `0x`-prefixed hexadecimal register value.
fn register_arg(s: &str) -> Result<u16, String> {
    let v = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(h) => u16::from_str_radix(h, 16),
        None => s.parse(),
    };
    v.map_err(|e| format!("{s:?}: {e}"))
}

fn open_input(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

// --- encode ---------------------------------------------------------------

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Frames, one JSON object `{"id", "hex"}` per line.
    pub frames: PathBuf,
    /// Output symbol file; a `.json` sidecar is written next to it.
    pub out: PathBuf,
    /// Inter-packet gap in bit times.
    #[arg(long, default_value_t = MIN_IPG_BITS)]
    pub ipg: usize,
    /// IDLE bits before the first frame.
    #[arg(long, default_value_t = reflectnet_core::phy::framing::DEFAULT_IDLE_PREFIX)]
    pub idle_prefix: usize,
    /// Initial scrambler register, nonzero 11-bit.
    #[arg(long, default_value = "0x7ff", value_parser = register_arg)]
    pub seed: u16,
}

pub fn encode(a: &EncodeArgs) -> Result<Status> {
    let frames = read_frames(BufReader::new(open_input(&a.frames)?))
        .with_context(|| format!("reading {}", a.frames.display()))?;
    let cfg = WireConfig {
        ipg_bits: a.ipg,
        idle_prefix_bits: a.idle_prefix,
        seed: ScramblerState::new(a.seed)?,
        ..WireConfig::default()
    };
    let symbols = frame_to_wire(&frames, &cfg)?;
    write_symbols(&a.out, &symbols, &SymbolSidecar::default())?;
    log::info!("encoded {} frames into {} symbols", frames.len(), symbols.len());
    Ok(Status::Ok)
}

// --- simulate -------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub symbols: PathBuf,
    /// Output capture of interleaved f32 I/Q with a `.json` sidecar.
    pub out: PathBuf,
    /// Per-sample SNR against half the on/off separation; `inf` is noiseless.
    #[arg(long, default_value_t = 20.0, allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long, default_value_t = 12.8)]
    pub sps: f64,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub gamma_on: Option<Complex64>,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub gamma_off: Option<Complex64>,
    #[arg(long, value_parser = complex_arg, allow_hyphen_values = true)]
    pub background: Option<Complex64>,
    /// Edge ramp as a fraction of a symbol.
    #[arg(long, default_value_t = 0.1)]
    pub rise: f64,
    /// First symbol boundary in samples; drawn from the seed if absent.
    #[arg(long)]
    pub timing_offset: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn simulate(a: &SimulateArgs) -> Result<Status> {
    let (symbols, side) = read_symbols(&a.symbols).with_context(|| format!("reading {}", a.symbols.display()))?;
    let base = ChannelParams::default();
    let params = ChannelParams {
        gamma_on: a.gamma_on.unwrap_or(base.gamma_on),
        gamma_off: a.gamma_off.unwrap_or(base.gamma_off),
        background: a.background.unwrap_or(base.background),
        snr_db: a.snr_db,
        samples_per_symbol: a.sps,
        rise_fraction: a.rise,
        symbol_rate_hz: side.symbol_rate_baud as f64,
        timing_offset: a.timing_offset,
    };
    let capture = synthesize_capture(&symbols, &params, a.seed)?;
    capture.write(&a.out)?;
    log::info!("wrote {} samples at {} Hz", capture.len(), capture.sample_rate_hz);
    Ok(Status::Ok)
}

// --- decode ---------------------------------------------------------------

#[derive(Debug, Args)]
pub struct DecodeArgs {
    pub capture: PathBuf,
    /// Recovered frames as JSON lines.
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = DiscriminatorArg::Median)]
    pub discriminator: DiscriminatorArg,
    /// Classifier to use with `--discriminator model`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Train a classifier on this capture, assumed to carry IDLE, save it
    /// here and decode with it.
    #[arg(long, value_name = "MODEL_OUT", conflicts_with = "model")]
    pub train_idle: Option<PathBuf>,
    /// Disable invalid-code correction.
    #[arg(long)]
    pub no_correct: bool,
    /// JSON decode report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Receive filter bandwidth in Hz applied before demodulation.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Transmitted symbol file, for the symbol error rate in the report.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Also write the confidence-annotated symbols.
    #[arg(long)]
    pub symbols_out: Option<PathBuf>,
}

pub fn decode(a: &DecodeArgs) -> Result<Status> {
    let capture = IqCapture::read(&a.capture).with_context(|| format!("reading {}", a.capture.display()))?;
    let demod = DemodConfig {
        bandwidth_hz: a.bandwidth,
        ..DemodConfig::default()
    };
    let model = match (&a.train_idle, &a.model, a.discriminator) {
        (Some(out), _, _) => {
            let m = train_from_idle(&capture, &demod, &TrainingConfig::default()).context("training on IDLE")?;
            m.save(out)?;
            log::info!("saved classifier to {}", out.display());
            Some(m)
        }
        (None, Some(path), DiscriminatorArg::Model) => Some(LinearModel::load(path)?),
        (None, None, DiscriminatorArg::Model) => {
            return Err(input_err("--discriminator model needs --model or --train-idle"));
        }
        (None, _, DiscriminatorArg::Median) => None,
    };
    let disc = match &model {
        Some(m) => Discriminator::Model(m),
        None => Discriminator::Median,
    };
    let cfg = DecodeConfig {
        correction: !a.no_correct,
        ..DecodeConfig::default()
    };
    let (demodulated, out) = decode_capture(&capture, &demod, disc, &cfg).context("decoding capture")?;

    if let Some(path) = &a.symbols_out {
        let rate = capture.symbol_rate().unwrap_or(SYMBOL_RATE_BAUD);
        write_confident_symbols(path, &demodulated.symbols, rate)?;
    }
    let ser = match &a.truth {
        Some(path) => {
            let (truth, _) = read_symbols(path)?;
            Some(compute_stats(&truth, &demodulated.symbols.symbols, 3)?.ser)
        }
        None => None,
    };
    let frames = recovered_frames(&out);
    let mut w = BufWriter::new(File::create(&a.out)?);
    write_frames(&mut w, &frames)?;
    w.flush()?;
    if let Some(path) = &a.report {
        let report = build_report(&out, ser);
        std::fs::write(path, serde_json::to_vec_pretty(&report)?)?;
    }
    log::info!("recovered {} frames", frames.len());
    Ok(if out.frames.iter().any(|f| f.has_errors()) {
        Status::Degraded
    } else {
        Status::Ok
    })
}

// --- eval -----------------------------------------------------------------

#[derive(Debug, Args)]
pub struct EvalOptions {
    /// Sweep output; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Symbol error rate for `--cer-model`.
    #[arg(long)]
    pub pe: Option<f64>,
    #[arg(long, value_enum, default_value = "as-printed")]
    pub variant: CerVariantArg,
    /// Also simulate this many six-symbol windows and compare both forms.
    #[arg(long)]
    pub windows: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Symbol decision rule simulated by the sweep.
    #[arg(long, value_enum, default_value = "median")]
    pub sweep_discriminator: SweepDiscriminatorArg,
    /// Codes per sweep point.
    #[arg(long, default_value_t = 20_000)]
    pub codes: usize,
    /// Comma-separated symbol error rates; 21 points over [0, 0.5] by default.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// XOR mask applied to the data table.
    #[arg(long, default_value = "00001")]
    pub mask: String,
    /// Two-state burst noise `p_good_to_bad,p_bad_to_good,noise_scale`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub burst: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CerVariantArg {
    AsPrinted,
    Exclusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SweepDiscriminatorArg {
    Median,
    Classifier,
}

pub fn eval_sweep(o: &EvalOptions) -> Result<Status> {
    let burst = match o.burst.as_deref() {
        Some(&[p_good_to_bad, p_bad_to_good, bad_noise_scale]) => Some(BurstModel {
            p_good_to_bad,
            p_bad_to_good,
            bad_noise_scale,
        }),
        _ => None,
    };
    let cfg = SweepConfig {
        grid: o.grid.clone().unwrap_or_else(default_grid),
        codes_per_point: o.codes,
        seed: o.seed,
        discriminator: match o.sweep_discriminator {
            SweepDiscriminatorArg::Median => SweepDiscriminator::Median,
            SweepDiscriminatorArg::Classifier => SweepDiscriminator::Classifier,
        },
        mask: Code5::parse(&o.mask)?,
        burst,
        ..SweepConfig::default()
    };
    let points = correction_sweep(&cfg)?;
    let sink: Box<dyn Write> = match &o.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for p in &points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(Status::Ok)
}

pub fn eval_correlation(path: &Path, o: &EvalOptions) -> Result<Status> {
    let capture = IqCapture::read(path).with_context(|| format!("reading {}", path.display()))?;
    let r = correlation_map(&capture, o.seed)?;
    println!("{}", serde_json::to_string(&r)?);
    Ok(Status::Ok)
}

pub fn eval_cer(o: &EvalOptions) -> Result<Status> {
    let p = o.pe.ok_or_else(|| input_err("--cer-model needs --pe"))?;
    let variant = match o.variant {
        CerVariantArg::AsPrinted => CerVariant::AsPrinted,
        CerVariantArg::Exclusion => CerVariant::Exclusion,
    };
    let mut v = json!({ "p_e": p, "variant": variant, "cer": cer_model(p, variant)? });
    if let Some(n) = o.windows {
        v["check"] = serde_json::to_value(check_cer_model(p, n, o.seed)?)?;
    }
    println!("{v}");
    Ok(Status::Ok)
}

// --- budget ---------------------------------------------------------------

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub pt_dbm: f64,
    /// Gain of each antenna.
    #[arg(long, allow_hyphen_values = true)]
    pub gain_dbi: f64,
    #[arg(long)]
    pub freq_mhz: f64,
    /// Implant radar cross-section in dBsm.
    #[arg(long, allow_hyphen_values = true)]
    pub rcs_dbsm: f64,
    #[arg(long)]
    pub range_m: f64,
}

pub fn budget(a: &BudgetArgs) -> Result<Status> {
    let pr = link_budget(&LinkBudget {
        pt_dbm: a.pt_dbm,
        gain_dbi: a.gain_dbi,
        wavelength_m: wavelength_m(a.freq_mhz * 1e6),
        rcs_m2: 10f64.powf(a.rcs_dbsm / 10.0),
        range_m: a.range_m,
    })?;
    println!("{pr:.4}");
    Ok(Status::Ok)
}
