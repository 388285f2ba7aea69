//! The six experiments. Each turns a resolved [`Config`] into in-memory
//! artifacts and a list of summary metrics; nothing here touches the disk.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use afc_core::analysis::{analyze_comb, efficiency_table, efficiency_vs_storage, fit_exponential, StorageSweep};
use afc_core::bloch::{echo_decay_scan, rabi_scan, EchoExperiment, EchoScanResult};
use afc_core::device::{rabi_cyclic_hz, DeviceModel};
use afc_core::io::{csv_row, fmt_f64};
use afc_core::memory::{burn, input_trace, probe_scan, store_recall, BurnModel, EchoResult};
use afc_core::sequencer::{
    afc_burn_sequence, aom_filter, fringe_spacing, incoherent_power_spectrum, probe_pulse, BurnConfig, InterPairPhase,
    PulseShape,
};
use afc_core::spectral::{flat_profile, make_grid, CombSpec, InhomogeneousProfile, IonParameters, SpectralGrid, ToothShape};

use crate::config::{Config, ConfigError, Experiment};

/// A named text file produced by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

/// Whether the analysis found what it was looking for.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Complete,
    /// No echo or no comb; the data are still written.
    NoSignal(String),
}

/// Everything a run produces, before it is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub experiment: Experiment,
    pub artifacts: Vec<Artifact>,
    /// Ordered `(name, value)` pairs; the first ones head sweep tables.
    pub metrics: Vec<(String, f64)>,
    pub outcome: Outcome,
    /// Gnuplot script body, written when `output.gnuplot` is set.
    pub plot: String,
}

/// Failure of a run, mapped to an exit code by [`CliError::exit_code`].
#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    /// A model routine rejected its inputs or violated an invariant.
    Core { context: String, source: afc_core::Error },
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Core { context, source } => write!(f, "{context}: {source}"),
            CliError::Io(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use afc_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core { source, .. } => match source {
                E::NotAComb { .. } => 4,
                E::Fit(_) | E::Invariant(_) | E::GridMismatch(_) | E::SampleRateMismatch { .. } => 3,
                _ => 2,
            },
            CliError::Io(_) => 1,
        }
    }
}

trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for afc_core::Result<T> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { context: what.to_string(), source })
    }
}

fn header(cfg: &Config) -> Vec<String> {
    let mut h = vec![format!("afc {} {}", env!("CARGO_PKG_VERSION"), cfg.experiment.name())];
    h.extend(cfg.header_lines());
    h
}

fn with_header(cfg: &Config, columns: &str, body: &str) -> String {
    let mut out = String::new();
    for line in header(cfg) {
        let _ = writeln!(out, "# {line}");
    }
    out.push_str(columns);
    out.push('\n');
    out.push_str(body);
    out
}

fn summary(cfg: &Config, metrics: &[(String, f64)], notes: &[String]) -> Artifact {
    let mut out = format!("experiment: {}\n", cfg.experiment.name());
    for (k, v) in metrics {
        let _ = writeln!(out, "{k}: {}", fmt_f64(*v));
    }
    for n in notes {
        let _ = writeln!(out, "note: {n}");
    }
    Artifact { name: "summary.txt".into(), contents: out }
}

fn grid(cfg: &Config) -> Result<SpectralGrid, CliError> {
    let n = usize::try_from(cfg.int("grid.n_points")).map_err(|_| ConfigError { key: "grid.n_points".into(), reason: "out of range".into() })?;
    make_grid(cfg.f64("grid.span_hz"), n).context("grid")
}

fn ions(cfg: &Config) -> Result<IonParameters, CliError> {
    IonParameters::new(cfg.f64("ions.t2_s"), cfg.f64("ions.t1_s")).context("ions")
}

/// Device model from the `device.*` keys.
pub fn device(cfg: &Config) -> Result<DeviceModel, CliError> {
    let d = DeviceModel {
        mode_area: cfg.f64("device.mode_area_m2"),
        length: cfg.f64("device.length_m"),
        coupling_in: cfg.f64("device.coupling_in"),
        coupling_out: cfg.f64("device.coupling_out"),
        anchor_power: cfg.f64("device.rabi_anchor_power_w"),
        anchor_rabi: cfg.f64("device.rabi_anchor_rad_s"),
        anchor_area: cfg.f64("device.anchor_area_m2"),
    };
    d.validate().context("device")?;
    Ok(d)
}

fn burn_config(cfg: &Config) -> Result<BurnConfig, CliError> {
    let peak_rabi = match cfg.opt_f64("burn.peak_rabi_rad_s") {
        Some(r) => r,
        None => device(cfg)?.rabi_from_power(cfg.f64("burn.peak_power_w")).context("burn power")?,
    };
    let shape = match cfg.str("burn.shape") {
        "square" => PulseShape::Square,
        _ => PulseShape::SquareWithRise { rise_time: cfg.f64("burn.rise_s") },
    };
    let inter_pair_phase = match cfg.str("burn.inter_pair_phase") {
        "coherent" => InterPairPhase::Coherent,
        _ => InterPairPhase::Randomized { seed: cfg.seed() },
    };
    let b = BurnConfig {
        pair_separation: cfg.f64("burn.pair_separation_s"),
        pulse_duration: cfg.f64("burn.pulse_duration_s"),
        n_pairs: cfg.int("burn.n_pairs") as usize,
        pair_wait: cfg.f64("burn.pair_wait_s"),
        peak_rabi,
        carrier_offset: cfg.f64("burn.carrier_offset_hz"),
        shape,
        inter_pair_phase,
    };
    b.validate().context("burn")?;
    Ok(b)
}

fn storage_sweep(cfg: &Config) -> Result<StorageSweep, CliError> {
    Ok(StorageSweep {
        grid: grid(cfg)?,
        ions: ions(cfg)?,
        initial_od: cfg.f64("burn.initial_od"),
        target_background_od: cfg.opt_f64("burn.target_background_od"),
        reference_time: cfg.opt_f64("burn.reference_time_s"),
        length: cfg.f64("device.length_m"),
        burn: burn_config(cfg)?,
        coherence_gap: cfg.f64("burn.coherence_gap_s"),
        aom_bandwidth: cfg.opt_f64("burn.aom_bandwidth_hz"),
        target_contrast: cfg.f64("burn.target_contrast"),
        hole_depth_cap: cfg.f64("burn.hole_depth_cap"),
        analysis_window: (cfg.f64("burn.window_low_hz"), cfg.f64("burn.window_high_hz")),
        probe_duration: cfg.f64("probe.duration_s"),
        probe_rabi: cfg.f64("probe.rabi_rad_s"),
    })
}

/// A fixed burn model when `burn.kappa` is set.
fn fixed_burn(cfg: &Config) -> Result<Option<(BurnModel, f64)>, CliError> {
    match cfg.opt_f64("burn.kappa") {
        None => Ok(None),
        Some(k) => {
            let model = BurnModel::new(k, cfg.f64("burn.hole_depth_cap")).context("burn model")?;
            Ok(Some((model, cfg.f64("burn.initial_od"))))
        }
    }
}

fn echo_experiment(cfg: &Config) -> Result<EchoExperiment, CliError> {
    Ok(EchoExperiment {
        t1: cfg.f64("echo.pulse1_s"),
        t2: cfg.f64("echo.pulse2_s"),
        tau: cfg.f64("echo.tau_s"),
        omega: cfg.f64("echo.rabi_rad_s"),
        ions: ions(cfg)?,
        bandwidth: cfg.f64("echo.bandwidth_hz"),
        n_classes: cfg.int("echo.n_classes") as usize,
        dt: cfg.opt_f64("echo.dt_s"),
    })
}

/// Build every model object the experiment needs without running it.
pub fn prepare(cfg: &Config) -> Result<(), CliError> {
    device(cfg)?;
    match cfg.experiment {
        Experiment::Spectrum => {
            grid(cfg)?;
            burn_config(cfg)?;
        }
        Experiment::BurnAndProbe | Experiment::EfficiencySweep => {
            storage_sweep(cfg)?;
            fixed_burn(cfg)?;
        }
        Experiment::StoreRecall => {
            grid(cfg)?;
            ions(cfg)?;
            tooth_shape(cfg);
        }
        Experiment::EchoDecay | Experiment::RabiScan => {
            echo_experiment(cfg)?;
        }
    }
    Ok(())
}

/// Run the configured experiment.
pub fn run_experiment(cfg: &Config) -> Result<RunOutput, CliError> {
    match cfg.experiment {
        Experiment::Spectrum => spectrum(cfg),
        Experiment::BurnAndProbe => burn_and_probe(cfg),
        Experiment::StoreRecall => store_and_recall(cfg),
        Experiment::EfficiencySweep => efficiency_sweep(cfg),
        Experiment::EchoDecay => echo_decay(cfg),
        Experiment::RabiScan => rabi(cfg),
    }
}

fn spectrum(cfg: &Config) -> Result<RunOutput, CliError> {
    let grid = grid(cfg)?;
    let b = burn_config(cfg)?;
    let seq = afc_burn_sequence(&b).context("burn sequence")?;
    let mut spec = incoherent_power_spectrum(&seq, &grid, cfg.f64("burn.coherence_gap_s")).context("burn spectrum")?;
    if let Some(bw) = cfg.opt_f64("burn.aom_bandwidth_hz") {
        spec = aom_filter(&spec, bw, b.carrier_offset).context("aom filter")?;
    }
    let window = (cfg.f64("burn.window_low_hz"), cfg.f64("burn.window_high_hz"));
    let fringe = fringe_spacing(&spec, window);
    let mut metrics = vec![
        ("fringe_spacing_hz".to_string(), fringe.unwrap_or(f64::NAN)),
        ("expected_spacing_hz".to_string(), 1.0 / b.pair_separation),
        ("peak_rabi_rad_s".to_string(), b.peak_rabi),
        ("peak_rabi_cyclic_hz".to_string(), rabi_cyclic_hz(b.peak_rabi)),
    ];
    metrics.push(("energy".to_string(), spec.energy()));
    let outcome = match fringe {
        Some(_) => Outcome::Complete,
        None => Outcome::NoSignal("no fringes inside the analysis window".into()),
    };
    let notes = outcome_notes(&outcome);
    Ok(RunOutput {
        experiment: cfg.experiment,
        artifacts: vec![Artifact { name: "spectrum.dat".into(), contents: spec.to_text(&header(cfg)) }, summary(cfg, &metrics, &notes)],
        metrics,
        outcome,
        plot: plot_script("spectrum.dat", "frequency (Hz)", "power", "1:4"),
    })
}

fn outcome_notes(outcome: &Outcome) -> Vec<String> {
    match outcome {
        Outcome::Complete => Vec::new(),
        Outcome::NoSignal(why) => vec![why.clone()],
    }
}

fn burn_and_probe(cfg: &Config) -> Result<RunOutput, CliError> {
    let sweep = storage_sweep(cfg)?;
    let t = sweep.burn.pair_separation;
    let (profile, model, initial_od) = match fixed_burn(cfg)? {
        Some((model, od)) => {
            let flat = flat_profile(sweep.grid, od, sweep.length).context("profile")?;
            (burn(&flat, &sweep.burn_spectrum(t).context("burn spectrum")?, &model).context("burn")?, model, od)
        }
        None => sweep.burned_profile(t).context("burn calibration")?,
    };
    let freqs: Vec<f64> = sweep
        .grid
        .frequencies()
        .into_iter()
        .filter(|f| *f >= sweep.analysis_window.0 && *f <= sweep.analysis_window.1)
        .collect();
    let od = probe_scan(&profile, &sweep.ions, &freqs, cfg.f64("probe.fwhm_hz")).context("probe scan")?;
    let mut scan = String::new();
    for (f, d) in freqs.iter().zip(&od) {
        let _ = writeln!(scan, "{}", csv_row(&[*f, *d]));
    }
    let mut artifacts = vec![Artifact { name: "probe_scan.dat".into(), contents: with_header(cfg, "frequency_hz,od", &scan) }];
    let mut metrics = vec![
        ("expected_spacing_hz".to_string(), 1.0 / t),
        ("kappa".to_string(), model.kappa),
        ("initial_od".to_string(), initial_od),
    ];
    let outcome = match analyze_comb(&freqs, &od, sweep.analysis_window) {
        Ok(comb) => {
            metrics.splice(
                0..0,
                [
                    ("spacing_hz".to_string(), comb.spacing),
                    ("finesse".to_string(), comb.finesse),
                    ("od_contrast".to_string(), comb.od_contrast),
                    ("background_od".to_string(), comb.background_od),
                ],
            );
            let mut text = String::new();
            for line in header(cfg) {
                let _ = writeln!(text, "# {line}");
            }
            text.push_str(&comb.to_text());
            artifacts.push(Artifact { name: "comb.dat".into(), contents: text });
            Outcome::Complete
        }
        Err(afc_core::Error::NotAComb { found }) => {
            for k in ["background_od", "od_contrast", "finesse", "spacing_hz"] {
                metrics.insert(0, (k.to_string(), f64::NAN));
            }
            Outcome::NoSignal(format!("not a comb: {found} teeth in the analysis window"))
        }
        Err(e) => return Err(CliError::Core { context: "comb analysis".into(), source: e }),
    };
    artifacts.push(summary(cfg, &metrics, &outcome_notes(&outcome)));
    Ok(RunOutput {
        experiment: cfg.experiment,
        artifacts,
        metrics,
        outcome,
        plot: plot_script("probe_scan.dat", "detuning (Hz)", "optical depth", "1:2"),
    })
}

fn tooth_shape(cfg: &Config) -> ToothShape {
    match cfg.str("comb.shape") {
        "gaussian" => ToothShape::Gaussian,
        "lorentzian" => ToothShape::Lorentzian,
        _ => ToothShape::Square,
    }
}

fn echo_rows(cfg: &Config, rows: &[(f64, &EchoResult)]) -> (Artifact, Vec<(String, f64)>, Outcome) {
    let mut body = String::new();
    let mut metrics = Vec::new();
    let mut missing = Vec::new();
    for (i, (t, r)) in rows.iter().enumerate() {
        let _ = writeln!(body, "{},{}", fmt_f64(*t), r.to_row(1.0 / t));
        metrics.push((format!("efficiency_{i}"), r.efficiency));
        metrics.push((format!("echo_time_s_{i}"), r.echo_time.unwrap_or(f64::NAN)));
        if r.echo_time.is_none() {
            missing.push(format!("{t:e}"));
        }
    }
    let columns = format!("storage_time_s,{}", afc_core::memory::EchoResult::ROW_HEADER);
    let outcome = if missing.is_empty() {
        Outcome::Complete
    } else {
        Outcome::NoSignal(format!("no echo for storage time(s) {}", missing.join(", ")))
    };
    (Artifact { name: "echoes.dat".into(), contents: with_header(cfg, &columns, &body) }, metrics, outcome)
}

fn store_and_recall(cfg: &Config) -> Result<RunOutput, CliError> {
    let grid = grid(cfg)?;
    let ions = ions(cfg)?;
    let times = cfg.opt_list("store.storage_times_s").expect("defaulted");
    let finesse = cfg.f64("comb.finesse");
    let input = input_trace(&probe_pulse(cfg.f64("probe.duration_s"), 0.0, cfg.f64("probe.rabi_rad_s")).context("probe")?, &grid)
        .context("input trace")?;
    let results: Vec<EchoResult> = times
        .par_iter()
        .map(|&t| {
            let spec = CombSpec {
                spacing: 1.0 / t,
                fwhm: 1.0 / (t * finesse),
                tooth_od: cfg.f64("comb.tooth_od"),
                background_od: cfg.f64("comb.background_od"),
                shape: tooth_shape(cfg),
                offset: 0.0,
            };
            let profile = InhomogeneousProfile::comb(grid, &spec, cfg.f64("device.length_m")).context("comb")?;
            store_recall(&profile, &ions, &input, Some(t)).context("store and recall")
        })
        .collect::<Result<_, _>>()?;
    let rows: Vec<(f64, &EchoResult)> = times.iter().cloned().zip(&results).collect();
    let (table, metrics, outcome) = echo_rows(cfg, &rows);
    let mut artifacts = vec![table];
    for (i, r) in results.iter().enumerate() {
        artifacts.push(Artifact { name: format!("trace_{i:03}.dat"), contents: r.output_trace.to_text(&header(cfg)) });
    }
    artifacts.push(summary(cfg, &metrics, &outcome_notes(&outcome)));
    Ok(RunOutput {
        experiment: cfg.experiment,
        artifacts,
        metrics,
        outcome,
        plot: plot_script("echoes.dat", "storage time (s)", "efficiency", "1:4"),
    })
}

fn efficiency_sweep(cfg: &Config) -> Result<RunOutput, CliError> {
    let sweep = storage_sweep(cfg)?;
    let times = cfg.opt_list("store.storage_times_s").expect("defaulted");
    let points = match fixed_burn(cfg)? {
        Some(cal) => times.par_iter().map(|&t| sweep.point(t, Some(cal))).collect::<Result<Vec<_>, _>>(),
        None => efficiency_vs_storage(&sweep, &times),
    }
    .context("efficiency sweep")?;
    let table = efficiency_table(&points);
    let (columns, body) = table.split_once('\n').unwrap_or((&table, ""));
    let mut metrics = Vec::new();
    let mut missing = Vec::new();
    for (i, p) in points.iter().enumerate() {
        metrics.push((format!("efficiency_{i}"), p.efficiency));
        metrics.push((format!("echo_time_s_{i}"), p.echo_time.unwrap_or(f64::NAN)));
        metrics.push((format!("finesse_{i}"), p.comb.finesse));
        metrics.push((format!("od_contrast_{i}"), p.comb.od_contrast));
        metrics.push((format!("kappa_{i}"), p.kappa));
        metrics.push((format!("initial_od_{i}"), p.initial_od));
        if p.echo_time.is_none() {
            missing.push(format!("{:e}", p.storage_time));
        }
    }
    let outcome = if missing.is_empty() {
        Outcome::Complete
    } else {
        Outcome::NoSignal(format!("no echo for storage time(s) {}", missing.join(", ")))
    };
    let artifacts = vec![
        Artifact { name: "efficiency.dat".into(), contents: with_header(cfg, columns, body) },
        summary(cfg, &metrics, &outcome_notes(&outcome)),
    ];
    Ok(RunOutput {
        experiment: cfg.experiment,
        artifacts,
        metrics,
        outcome,
        plot: plot_script("efficiency.dat", "storage time (s)", "efficiency", "1:2"),
    })
}

/// Multiply each intensity by `1 + σ·g`, `g` standard normal from a ChaCha8
/// stream seeded by `seed`. Clipped at zero.
fn add_noise(values: &mut [f64], sigma: f64, seed: u64) {
    if sigma == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).expect("sigma checked at parse time");
    for v in values {
        *v = (*v * (1.0 + normal.sample(&mut rng))).max(0.0);
    }
}

fn scan_artifact(cfg: &Config, name: &str, scan: &EchoScanResult) -> Artifact {
    Artifact { name: name.into(), contents: scan.to_text(&header(cfg)) }
}

fn echo_decay(cfg: &Config) -> Result<RunOutput, CliError> {
    let exp = echo_experiment(cfg)?;
    let taus = cfg.opt_list("scan.values_s").expect("required");
    let mut scan = echo_decay_scan(&exp, &taus).context("echo decay scan")?;
    add_noise(&mut scan.echo_intensity, cfg.f64("noise.relative_sigma"), cfg.seed());
    let fit = fit_exponential(&scan.scan_values, &scan.amplitudes()).context("echo decay fit")?;
    let metrics = vec![
        ("t2_s".to_string(), 2.0 * fit.decay_constant),
        ("t2_std_error_s".to_string(), 2.0 * fit.std_error),
        ("decay_constant_s".to_string(), fit.decay_constant),
        ("decay_std_error_s".to_string(), fit.std_error),
        ("amplitude".to_string(), fit.amplitude),
        ("residual_rms".to_string(), fit.residual_rms),
    ];
    let mut fit_body = String::new();
    for (x, y) in scan.scan_values.iter().zip(scan.amplitudes()) {
        let _ = writeln!(fit_body, "{}", csv_row(&[*x, y, fit.predict(*x)]));
    }
    Ok(RunOutput {
        experiment: cfg.experiment,
        artifacts: vec![
            scan_artifact(cfg, "scan.dat", &scan),
            Artifact { name: "fit.dat".into(), contents: with_header(cfg, "tau_s,amplitude,fitted_amplitude", &fit_body) },
            summary(cfg, &metrics, &[]),
        ],
        metrics,
        outcome: Outcome::Complete,
        plot: "set logscale y\n".to_string() + &plot_script("fit.dat", "tau (s)", "echo amplitude", "1:2"),
    })
}

fn rabi(cfg: &Config) -> Result<RunOutput, CliError> {
    let exp = echo_experiment(cfg)?;
    let single = cfg.opt_list("scan.values_s").is_none();
    let t2s = cfg.opt_list("scan.values_s").unwrap_or_else(|| vec![exp.t2]);
    let mut scan = rabi_scan(&exp, &t2s).context("rabi scan")?;
    add_noise(&mut scan.echo_intensity, cfg.f64("noise.relative_sigma"), cfg.seed());
    let first = scan.first_maximum();
    let mut metrics = vec![
        ("rabi_rad_s".to_string(), exp.omega),
        ("rabi_cyclic_hz".to_string(), rabi_cyclic_hz(exp.omega)),
    ];
    let outcome = if single {
        metrics.insert(0, ("echo_intensity".to_string(), scan.echo_intensity[0]));
        Outcome::Complete
    } else {
        metrics.splice(
            0..0,
            [
                ("first_maximum_s".to_string(), first.map_or(f64::NAN, |m| m.0)),
                ("first_maximum_intensity".to_string(), first.map_or(f64::NAN, |m| m.1)),
            ],
        );
        match first {
            Some(_) => Outcome::Complete,
            None => Outcome::NoSignal("no echo maximum inside the scanned range".into()),
        }
    };
    Ok(RunOutput {
        experiment: cfg.experiment,
        artifacts: vec![scan_artifact(cfg, "scan.dat", &scan), summary(cfg, &metrics, &outcome_notes(&outcome))],
        metrics,
        outcome,
        plot: plot_script("scan.dat", "second pulse length (s)", "echo intensity", "1:2"),
    })
}

fn plot_script(file: &str, xlabel: &str, ylabel: &str, using: &str) -> String {
    format!(
        "set datafile separator ','\nset datafile commentschars '#'\nset key off\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\nplot '{file}' every ::1 using {using} with linespoints\n"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_is_seeded() {
        let mut a = vec![1.0; 16];
        let mut b = vec![1.0; 16];
        add_noise(&mut a, 0.1, 7);
        add_noise(&mut b, 0.1, 7);
        assert_eq!(a, b);
        let mut c = vec![1.0; 16];
        add_noise(&mut c, 0.1, 8);
        assert_ne!(a, c);
        let mut d = vec![1.0; 4];
        add_noise(&mut d, 0.0, 7);
        assert_eq!(d, vec![1.0; 4]);
    }

    #[test]
    fn exit_codes() {
        let core = |source| CliError::Core { context: "x".into(), source };
        assert_eq!(core(afc_core::Error::NotAComb { found: 1 }).exit_code(), 4);
        assert_eq!(core(afc_core::Error::Fit("f".into())).exit_code(), 3);
        assert_eq!(core(afc_core::Error::Invariant("i".into())).exit_code(), 3);
        assert_eq!(core(afc_core::Error::GridTooNarrow { span: 1.0, min: 2.0 }).exit_code(), 2);
        assert_eq!(CliError::Config(ConfigError { key: "k".into(), reason: "r".into() }).exit_code(), 2);
    }
}
