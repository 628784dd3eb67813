//! One function per subcommand. Each writes its artifacts into the run's
//! staging directory and returns a one-line summary.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use twistwave::analysis::{
    derive_kinematics, fit_rotation_curve, measure_series, registration_for, FitReport,
    RotationSeries,
};
use twistwave::electrodynamics::{
    bessel_em, lg_em, radiated_power_check, sample_cylinder, write_profile, EMSample, LineDensity,
    ProfileHeader, ProfileUnits, RadiationReport,
};
use twistwave::holography::{design_hologram, HologramMode, HologramSpec};
use twistwave::io;
use twistwave::kinematics::{trace_flux_lines, write_trajectories_csv, FluxOptions, RotationLaw};
use twistwave::propagation::{
    default_z_list, encoded_law, make_focal_series_with, stack_to_volume, EncodedLaw, FocalStack,
    Optics, SeriesOptions,
};
use twistwave::quadrature::QuadControl;
use twistwave::specfun::SeriesControl;
use twistwave::wavefield::{
    default_half_width, sample_wave, AccelPair, Dynamics, LGParams, ModeParams, PhysicalBeam,
};

use crate::error::{CliError, Result};

/// Where a command writes and the seed for any noise it draws.
pub struct Context<'a> {
    pub dir: &'a Path,
    pub seed: u64,
}

impl Context<'_> {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn positive_charge(ell: i32) -> Result<u32> {
    u32::try_from(ell)
        .ok()
        .filter(|&l| l > 0)
        .ok_or_else(|| CliError::config(format!("ell must be ≥ 1 here, got {ell}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    /// Single anisotropic Bessel mode
    Aniso,
    /// Two-ring angularly accelerating superposition
    Accel,
}

/// Sample a wave on a square grid in natural units and export intensity and phase.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct WaveArgs {
    #[arg(long, value_enum, default_value = "aniso")]
    pub kind: WaveKind,
    /// Topological charge; negative values only for `aniso`
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub ell: i32,
    /// Anisotropy parameter in [0, 1]
    #[arg(long = "D", default_value_t = 0.0)]
    #[serde(rename = "D")]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    /// Radial wavenumber (the first ring for `accel`)
    #[arg(long, default_value_t = 0.8)]
    pub kr: f64,
    /// Radial wavenumber of the second ring (`accel` only)
    #[arg(long, default_value_t = 0.7)]
    pub kr2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z: f64,
    /// Grid side [samples]
    #[arg(long, default_value_t = 512)]
    pub n: usize,
    /// Half-width of the grid; twelve radial zeros of J_ℓ(k_r r) when absent
    #[arg(long)]
    pub half_width: Option<f64>,
}

pub fn wave(a: &WaveArgs, ctx: &Context) -> Result<String> {
    if a.n < 2 {
        return Err(CliError::config("grid needs n ≥ 2"));
    }
    let half = match a.half_width {
        Some(h) => h,
        None => default_half_width(a.ell, a.kr)?,
    };
    let field = match a.kind {
        WaveKind::Aniso => sample_wave(&ModeParams::new(a.ell, a.d, a.k, a.kr)?, a.n, half, a.z)?,
        WaveKind::Accel => sample_wave(
            &AccelPair::new(positive_charge(a.ell)?, a.d, a.k, a.kr, a.kr2)?,
            a.n,
            half,
            a.z,
        )?,
    };
    let phase = field.phase();
    field.write_intensity_pgm(&ctx.path("intensity.pgm"))?;
    field.write_intensity_csv(&ctx.path("intensity.csv"))?;
    // −π..π maps onto the full 16-bit range
    let shifted: Vec<f64> = phase.iter().map(|p| p + PI).collect();
    io::write_pgm16_scaled(
        &ctx.path("phase.pgm"),
        field.nx,
        field.ny,
        &shifted,
        2.0 * PI,
    )?;
    io::write_csv_grid(&ctx.path("phase.csv"), field.nx, field.ny, &phase)?;
    field.write_raw(&ctx.path("field.c64"))?;
    Ok(format!(
        "{}² samples, half-width {half:.4}, peak |ψ|² {:.4e}",
        a.n,
        max_of(&field.intensity())
    ))
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().cloned().fold(0.0, f64::max)
}

/// Rotation, angular velocity and acceleration of the petals, plus their tracks on a cylinder.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct KinematicsArgs {
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    #[arg(long = "D", default_value_t = 0.325)]
    #[serde(rename = "D")]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.8)]
    pub kr1: f64,
    #[arg(long, default_value_t = 0.7)]
    pub kr2: f64,
    /// Lower end of the z range; one period below focus when absent
    #[arg(long, allow_negative_numbers = true)]
    pub z_min: Option<f64>,
    /// Upper end of the z range; one period above focus when absent
    #[arg(long, allow_negative_numbers = true)]
    pub z_max: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub n: usize,
    /// Radius of the tube the petal tracks are drawn on; (ℓ+1)/k_r1 when absent
    #[arg(long)]
    pub tube_radius: Option<f64>,
}

pub fn kinematics(a: &KinematicsArgs, ctx: &Context) -> Result<String> {
    let pair = AccelPair::new(a.ell, a.d, a.k, a.kr1, a.kr2)?;
    let law = RotationLaw::from_pair(&pair)?;
    let z0 = a.z_min.unwrap_or(-law.period());
    let z1 = a.z_max.unwrap_or(law.period());
    if a.n < 2 || !(z1 > z0) {
        return Err(CliError::config("need n ≥ 2 and z-max > z-min"));
    }
    let z = linspace(z0, z1, a.n);
    law.write_curves_csv(&ctx.path("curves.csv"), &z)?;
    let radius = a.tube_radius.unwrap_or((f64::from(a.ell) + 1.0) / a.kr1);
    let step = PI / f64::from(a.ell);
    let mut rows = Vec::with_capacity(z.len() * 2 * a.ell as usize);
    for &zz in &z {
        let base = law.rotation(zz);
        for j in 0..2 * a.ell {
            let phi = base + f64::from(j) * step;
            rows.push(vec![
                zz,
                f64::from(j),
                phi,
                radius * phi.cos(),
                radius * phi.sin(),
            ]);
        }
    }
    io::write_csv_table(
        &ctx.path("tube.csv"),
        &["z", "petal", "phi", "x", "y"],
        &rows,
    )?;
    Ok(format!(
        "period {:.6e}, speed ratio {:.4}",
        law.period(),
        ((1.0 + a.d) / (1.0 - a.d)).powi(2)
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Bessel,
    Lg,
}

/// Radial profiles of E_r, B_φ, B_z and S for a beam current, with a far-cylinder flux check.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FieldsArgs {
    #[arg(long, value_enum, default_value = "bessel")]
    pub family: Family,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub ell: i32,
    /// Radial index (`lg` only)
    #[arg(long, default_value_t = 0)]
    pub p: u32,
    /// Kinetic energy [eV]
    #[arg(long, default_value_t = 300e3)]
    pub energy_ev: f64,
    /// Beam current [A]
    #[arg(long, default_value_t = 1e-9)]
    pub current: f64,
    /// k_r/k of the Bessel beam
    #[arg(long, default_value_t = 0.01)]
    pub kr_ratio: f64,
    /// Waist of the LG beam [m]
    #[arg(long, default_value_t = 1e-9)]
    pub w0: f64,
    /// Plane of the LG profile [m]
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z: f64,
    /// Evaluate at this single radius [m] instead of a grid
    #[arg(long)]
    pub r: Option<f64>,
    /// Outer radius of the grid [m]; 60/k_r (Bessel) or 4w(z) (LG) when absent
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub n: usize,
    /// Radius of the flux-check cylinder [m]; 200/k_r (Bessel) or 6w0 (LG) when absent
    #[arg(long)]
    pub far_r: Option<f64>,
}

#[derive(Debug, Serialize)]
struct RadiationSummary {
    report: RadiationReport,
    /// Every profile sample has S_r exactly zero.
    s_r_identically_zero: bool,
}

pub fn fields(a: &FieldsArgs, ctx: &Context) -> Result<String> {
    let beam = PhysicalBeam::new(a.energy_ev, Dynamics::Relativistic)?;
    let k = beam.k();
    let eta = LineDensity::from_current(a.current, beam.velocity())?;
    let radii = |default_max: f64| -> Result<Vec<f64>> {
        match a.r {
            Some(r) => Ok(vec![r]),
            None if a.n >= 2 => Ok(linspace(0.0, a.r_max.unwrap_or(default_max), a.n)),
            None => Err(CliError::config("profile needs n ≥ 2")),
        }
    };
    let (header, samples, cylinder) = match a.family {
        Family::Bessel => {
            let mode = ModeParams::new(a.ell, 0.0, k, a.kr_ratio * k)?;
            let ctrl = SeriesControl::default();
            let profile = |r: f64, _z: f64| bessel_em(&mode, &eta, r, &ctrl);
            let samples = radii(60.0 / mode.kr)?
                .into_iter()
                .map(|r| profile(r, 0.0))
                .collect::<twistwave::Result<Vec<EMSample>>>()?;
            let r_far = a.far_r.unwrap_or(200.0 / mode.kr);
            let cylinder = sample_cylinder(profile, r_far, 64, 8, 2.0 * PI / mode.kz)?;
            let header = ProfileHeader {
                beam: "bessel".into(),
                eta: eta.eta,
                ell: a.ell,
                k,
                kr: Some(mode.kr),
                kz: Some(mode.kz),
                p: None,
                w0: None,
                z: None,
                units: ProfileUnits::default(),
            };
            (header, samples, (r_far, cylinder))
        }
        Family::Lg => {
            let params = LGParams::new(a.ell, a.p, a.w0, k)?;
            let ctrl = QuadControl::default();
            let profile = |r: f64, z: f64| lg_em(&params, &eta, r, z, &ctrl);
            let samples = radii(4.0 * params.w(a.z))?
                .into_iter()
                .map(|r| profile(r, a.z))
                .collect::<twistwave::Result<Vec<EMSample>>>()?;
            let r_far = a.far_r.unwrap_or(6.0 * a.w0);
            let cylinder = sample_cylinder(profile, r_far, 64, 8, 2.0 * params.z_r())?;
            let header = ProfileHeader {
                beam: "lg".into(),
                eta: eta.eta,
                ell: a.ell,
                k,
                kr: None,
                kz: None,
                p: Some(a.p),
                w0: Some(a.w0),
                z: Some(a.z),
                units: ProfileUnits::default(),
            };
            (header, samples, (r_far, cylinder))
        }
    };
    write_profile(&ctx.path("profile.csv"), &header, &samples)?;
    let report = radiated_power_check(cylinder.0, &cylinder.1);
    let summary = RadiationSummary {
        report,
        s_r_identically_zero: samples.iter().all(|s| s.s_r == 0.0),
    };
    io::write_json(&ctx.path("radiation.json"), &summary)?;
    let first = &samples[0];
    Ok(format!(
        "{} samples, B_z(r = {:.3e}) = {:.6e} T, radial flux / axial scale = {:.2e}",
        samples.len(),
        first.r,
        first.b_z,
        report.relative_flux
    ))
}

/// Flux lines of the probability current traced from a ring of seeds.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct TrajectoriesArgs {
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    #[arg(long = "D", default_value_t = 0.325)]
    #[serde(rename = "D")]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub k: f64,
    #[arg(long, default_value_t = 0.6)]
    pub kr1: f64,
    #[arg(long, default_value_t = 0.6)]
    pub kr2: f64,
    /// Seed radii, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.8, 2.0, 4.5, 7.0])]
    pub radii: Vec<f64>,
    /// Seed azimuths in units of π/ℓ, comma separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.13, 0.37])]
    pub azimuths: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z_start: f64,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub z_end: f64,
    /// Integration steps between z-start and z-end
    #[arg(long, default_value_t = 4000)]
    pub steps: usize,
    /// Stop a line where |ψ|² falls to this value
    #[arg(long, default_value_t = 1e-16)]
    pub density_floor: f64,
}

#[derive(Debug, Serialize)]
struct TrajectorySummary {
    count: usize,
    truncated: usize,
    /// Largest chord deviation relative to chord length.
    max_relative_deviation: f64,
}

pub fn trajectories(a: &TrajectoriesArgs, ctx: &Context) -> Result<String> {
    if a.steps == 0 || a.radii.is_empty() || a.azimuths.is_empty() {
        return Err(CliError::config(
            "need steps ≥ 1 and at least one seed radius and azimuth",
        ));
    }
    let pair = AccelPair::new(a.ell, a.d, a.k, a.kr1, a.kr2)?;
    let l = f64::from(a.ell);
    let seeds: Vec<(f64, f64)> = a
        .radii
        .iter()
        .flat_map(|&r| a.azimuths.iter().map(move |&f| (r, f * PI / l)))
        .collect();
    let opt = FluxOptions {
        z_start: a.z_start,
        z_end: a.z_end,
        step: (a.z_end - a.z_start) / a.steps as f64,
        density_floor: a.density_floor,
    };
    let lines = trace_flux_lines(&pair, &seeds, &opt)?;
    write_trajectories_csv(&ctx.path("trajectories.csv"), &lines)?;
    let summary = TrajectorySummary {
        count: lines.len(),
        truncated: lines.iter().filter(|t| t.truncated).count(),
        max_relative_deviation: lines
            .iter()
            .map(|t| t.relative_deviation())
            .fold(0.0, f64::max),
    };
    io::write_json(&ctx.path("summary.json"), &summary)?;
    Ok(format!(
        "{} lines, {} truncated, max relative chord deviation {:.2e}",
        summary.count, summary.truncated, summary.max_relative_deviation
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 4096² scale model that resolves the carrier
    Desk,
    /// Fabricated geometry on a 1024² canvas
    Experiment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Grayscale,
    Binary,
}

fn hologram_spec(preset: Preset, ell: u32, d: f64, mode: Mode) -> HologramSpec {
    let base = match preset {
        Preset::Desk => HologramSpec::desk(ell, d),
        Preset::Experiment => HologramSpec::experiment(ell, d),
    };
    HologramSpec {
        mode: match mode {
            Mode::Grayscale => HologramMode::Grayscale,
            Mode::Binary => HologramMode::Binary,
        },
        ..base
    }
}

#[derive(Debug, Serialize)]
struct LawSummary {
    optics: Optics,
    law: EncodedLaw,
    period: f64,
}

fn write_law(ctx: &Context, spec: &HologramSpec) -> Result<(Optics, EncodedLaw)> {
    let optics = Optics::kv300();
    let law = encoded_law(spec, &optics)?;
    let summary = LawSummary {
        optics,
        law,
        period: law.period(),
    };
    io::write_json(&ctx.path("law.json"), &summary)?;
    Ok((optics, law))
}

/// Double-ring transmission mask.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct HologramArgs {
    #[arg(long, value_enum, default_value = "desk")]
    pub preset: Preset,
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    #[arg(long = "D", default_value_t = 0.325)]
    #[serde(rename = "D")]
    pub d: f64,
    #[arg(long, value_enum, default_value = "grayscale")]
    pub mode: Mode,
    /// Also write the mask as CSV
    #[arg(long)]
    pub csv: bool,
}

pub fn hologram(a: &HologramArgs, ctx: &Context) -> Result<String> {
    let spec = hologram_spec(a.preset, a.ell, a.d, a.mode);
    let (_, law) = write_law(ctx, &spec)?;
    let map = design_hologram(&spec)?;
    map.write_pgm(&ctx.path("hologram.pgm"), &spec)?;
    if a.csv {
        map.write_csv(&ctx.path("hologram.csv"))?;
    }
    let open = map.values.iter().sum::<f64>() / map.values.len() as f64;
    Ok(format!(
        "{}×{} mask, mean transmission {open:.4e}, Δk_z {:.4e} 1/m",
        map.nx, map.ny, law.dkz
    ))
}

/// Synthetic defocus series: hologram → far field → first order → angular-spectrum planes.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct SeriesArgs {
    #[arg(long, value_enum, default_value = "desk")]
    pub preset: Preset,
    #[arg(long, default_value_t = 1)]
    pub ell: u32,
    #[arg(long = "D", default_value_t = 0.325)]
    #[serde(rename = "D")]
    pub d: f64,
    #[arg(long, value_enum, default_value = "grayscale")]
    pub mode: Mode,
    /// Number of planes
    #[arg(long, default_value_t = 41)]
    pub frames: usize,
    /// Planes cover Δk_z z ∈ [−half-phase, half-phase]
    #[arg(long, default_value_t = 0.6 * PI)]
    pub half_phase: f64,
    /// First-order window radius as a fraction of the order spacing
    #[arg(long, default_value_t = 0.6)]
    pub window_fraction: f64,
    /// Raised-cosine fraction of the window radius
    #[arg(long, default_value_t = 0.3)]
    pub taper: f64,
    /// Defocus band limit in units of the outer ring's spatial frequency
    #[arg(long, default_value_t = 2.0)]
    pub band_factor: f64,
    /// Side of the stored frames [pixels]
    #[arg(long, default_value_t = 512)]
    pub frame_size: usize,
}

pub fn series(a: &SeriesArgs, ctx: &Context) -> Result<String> {
    if a.frames < 2 || !(a.half_phase > 0.0) {
        return Err(CliError::config("need frames ≥ 2 and half-phase > 0"));
    }
    let spec = hologram_spec(a.preset, a.ell, a.d, a.mode);
    let (optics, law) = write_law(ctx, &spec)?;
    let options = SeriesOptions {
        window_fraction: a.window_fraction,
        taper: a.taper,
        band_factor: a.band_factor,
        frame_size: a.frame_size,
    };
    let z = default_z_list(&law, a.frames, a.half_phase);
    let stack = make_focal_series_with(&spec, &optics, &z, &options)?;
    stack.write_dir(ctx.dir)?;
    let f = &stack.frames[0];
    Ok(format!(
        "{} frames of {}² over z ∈ [{:.4e}, {:.4e}] m",
        stack.frames.len(),
        f.nx,
        z[0],
        z[z.len() - 1]
    ))
}

fn stack_from(path: &Option<PathBuf>) -> Result<FocalStack> {
    let dir = path
        .as_ref()
        .ok_or_else(|| CliError::config("`stack` is required"))?;
    Ok(FocalStack::read_dir(dir)?)
}

/// Register a stored series against its lowest-z frame and fit the rotation law.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct FitArgs {
    /// Directory written by `series`
    #[arg(long)]
    pub stack: Option<PathBuf>,
    /// Standard deviation of Gaussian noise added to the measured angles [deg]
    #[arg(long, default_value_t = 0.0)]
    pub noise_deg: f64,
    /// Samples of the fitted curves
    #[arg(long, default_value_t = 401)]
    pub n_curve: usize,
}

/// Add N(0, σ²) to every non-reference angle and widen its uncertainty to match.
fn add_noise(series: &RotationSeries, sigma: f64, seed: u64) -> Result<RotationSeries> {
    let normal = Normal::new(0.0, sigma).map_err(|e| CliError::config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut angles = series.angles.clone();
    let mut unc = series.uncertainties.clone();
    for k in (0..angles.len()).filter(|&k| k != series.reference_index) {
        angles[k] += normal.sample(&mut rng);
        unc[k] = unc[k].hypot(sigma);
    }
    Ok(RotationSeries::new(
        series.z_values.clone(),
        angles,
        series.reference_index,
        unc,
    )?)
}

pub fn fit(a: &FitArgs, ctx: &Context) -> Result<String> {
    if !(a.noise_deg >= 0.0 && a.noise_deg.is_finite()) || a.n_curve < 2 {
        return Err(CliError::config("need noise-deg ≥ 0 and n-curve ≥ 2"));
    }
    let stack = stack_from(&a.stack)?;
    let ell = stack.spec.ell;
    let mut series = measure_series(&stack, &registration_for(&stack)?)?;
    if a.noise_deg > 0.0 {
        series = add_noise(&series, a.noise_deg.to_radians(), ctx.seed)?;
    }
    let fit = fit_rotation_curve(&series, ell)?;
    let rows: Vec<Vec<f64>> = (0..series.angles.len())
        .map(|k| {
            vec![
                series.z_values[k],
                series.angles[k],
                series.uncertainties[k],
                fit.residuals[k],
            ]
        })
        .collect();
    io::write_csv_table(
        &ctx.path("rotation.csv"),
        &["z", "angle", "uncertainty", "residual"],
        &rows,
    )?;
    let z = &stack.z_values;
    derive_kinematics(&fit, ell, &linspace(z[0], z[z.len() - 1], a.n_curve))?
        .write_csv(&ctx.path("curves.csv"))?;
    let summary = format!(
        "D_fit = {:.4}, Δk_z = {:.6e} 1/m, residual rms {:.3}°",
        fit.d_fit,
        fit.dkz_fit,
        fit.residual_rms.to_degrees()
    );
    FitReport::new(ell, series, fit, Some(stack.provenance.clone()))
        .write(&ctx.path("fit.json"))?;
    Ok(summary)
}

/// Intensity volume interpolated onto uniform z planes.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct VolumeArgs {
    /// Directory written by `series`
    #[arg(long)]
    pub stack: Option<PathBuf>,
    /// Number of z planes
    #[arg(long, default_value_t = 64)]
    pub nz: usize,
}

pub fn volume(a: &VolumeArgs, ctx: &Context) -> Result<String> {
    let stack = stack_from(&a.stack)?;
    let vol = stack_to_volume(&stack, a.nz)?;
    vol.write(&ctx.path("volume.f32"), &stack.provenance)?;
    Ok(format!("{}×{}×{} float32 volume", vol.nx, vol.ny, vol.nz))
}

#[cfg(test)]
mod tests {
    use super::*;
    use twistwave::wavefield::Wave;

    #[test]
    fn tube_tracks_start_on_petal_maxima() {
        // the law's azimuths are the brightest petals at focus; away from it the
        // anisotropic envelope pulls the maxima off, but never onto the dark lines
        for (ell, d) in [(1u32, 0.0), (2, 0.325), (3, 0.51)] {
            let pair = AccelPair::new(ell, d, 1.0, 0.8, 0.7).unwrap();
            let law = RotationLaw::from_pair(&pair).unwrap();
            let r = (f64::from(ell) + 1.0) / 0.8;
            for z in [-3.0, 0.0, 5.0] {
                let at = |phi: f64| pair.psi(r, phi, z).norm_sqr();
                let phi = law.rotation(z);
                let brightest = (0..720)
                    .map(|i| at(2.0 * PI * i as f64 / 720.0))
                    .fold(0.0, f64::max);
                let dark = at(phi + PI / (2.0 * f64::from(ell)));
                let lit = at(phi);
                assert!(lit > dark, "ℓ = {ell}, D = {d}, z = {z}: {lit} vs {dark}");
                if z == 0.0 {
                    assert!(
                        lit >= 0.999 * brightest,
                        "ℓ = {ell}, D = {d}: {lit} vs {brightest}"
                    );
                }
            }
        }
    }

    #[test]
    fn noise_is_seeded_and_spares_the_reference() {
        let s = RotationSeries::new(vec![0.0, 1.0, 2.0], vec![0.0; 3], 0, vec![0.01; 3]).unwrap();
        let a = add_noise(&s, 0.02, 7).unwrap();
        let b = add_noise(&s, 0.02, 7).unwrap();
        let c = add_noise(&s, 0.02, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.angles, c.angles);
        assert_eq!(a.angles[0], 0.0);
        assert!((a.uncertainties[1] - 0.01f64.hypot(0.02)).abs() < 1e-15);
    }

    #[test]
    fn linspace_ends() {
        assert_eq!(linspace(-1.0, 1.0, 3), vec![-1.0, 0.0, 1.0]);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
