//! Command drivers. Each returns JSON results, a plot-ready table and warnings.

use std::path::Path;

use orbitframe::frames::{fourier_basis, standard_basis};
use orbitframe::gabor::{density_check, gabor_family, FiniteGaborSystem, GaborLadder, GaborOrder, Step, ThirdsExample, Window};
use orbitframe::hilbert::random_matrix;
use orbitframe::operator_rep::{
    aldroubi_family, boundedness_profile, construct_iteration_operator_with, interleaving_classify,
    shift_invariance_residual, tail_frame_check, truncation_sweep, AldroubiGenerator, AlternatingOnbGenerator,
    IndependencePolicy, ShiftMode, ShiftOnbGenerator, SweepSeries, TailSpec,
};
use orbitframe::shift_invariant::{
    classify_si, gauss_spectrum, phi_profile, si_family, sinc_spectrum, translation_representation_check,
    PhiProfile, SampledSpectrum, ShannonGenerator, TranslationMode,
};
use orbitframe::{FamilyGenerator, FrameFamily, IndexConvention, RepresentationOptions, Tolerance};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::config::{typed, Command, ExperimentConfig, Input};
use crate::error::{CliError, CliResult};
use crate::report::{num, Table};

pub const DEMOS: [&str; 4] = ["aldroubi", "sinc-half-shift", "gabor-thirds", "two-onb-alternate"];

pub struct Outcome {
    pub results: Value,
    pub table: Table,
    pub warnings: Vec<String>,
}

pub fn run(cfg: &ExperimentConfig, tol: &Tolerance) -> CliResult<Outcome> {
    let out = match cfg.command {
        Command::Analyze => analyze(cfg, tol),
        Command::Represent => represent(cfg, tol),
        Command::Gabor => gabor(cfg, tol),
        Command::Shiftinv => shiftinv(cfg, tol),
        Command::Sweep => sweep(cfg, tol),
        Command::Demo => demo(cfg, tol),
    }?;
    Ok(out)
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize to JSON")
}

fn require_input(cfg: &ExperimentConfig) -> CliResult<&Input> {
    cfg.input.as_ref().ok_or_else(|| CliError::config("this command needs an `input`"))
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn save_family(cfg: &ExperimentConfig, fam: &FrameFamily) -> CliResult<()> {
    if let Some(path) = &cfg.family_out {
        std::fs::write(path, fam.to_json()?).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DimArgs {
    dim: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AldroubiArgs {
    dim: usize,
    count: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlternateArgs {
    size: usize,
    #[serde(default = "default_ambient")]
    ambient: usize,
}

fn default_ambient() -> usize {
    AlternatingOnbGenerator::DEFAULT_AMBIENT
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThirdsArgs {
    #[serde(default = "default_cells")]
    cells: usize,
    #[serde(default = "default_cell_len")]
    cell_len: usize,
    truncation: Option<usize>,
}

fn default_cells() -> usize {
    24
}

fn default_cell_len() -> usize {
    4
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GaborArgs {
    l: usize,
    a: usize,
    b: usize,
    #[serde(default = "default_window")]
    window: Window,
    #[serde(default = "default_order")]
    order: GaborOrder,
}

fn default_window() -> Window {
    Window::Gauss
}

fn default_order() -> GaborOrder {
    GaborOrder::Raster
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShannonArgs {
    size: usize,
    #[serde(default = "one")]
    oversample: usize,
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RandomArgs {
    dim: usize,
    count: usize,
    rank: Option<usize>,
}

/// Single-family builtins and family files.
fn load_family(cfg: &ExperimentConfig) -> CliResult<FrameFamily> {
    match require_input(cfg)? {
        Input::File { file } => {
            let text = read_file(file)?;
            let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::from_json(&file.display().to_string(), e))?;
            serde_json::from_value(raw).map_err(|e| CliError::config(format!("{}: {e}", file.display())))
        }
        Input::Builtin { builtin, args } => {
            let what = format!("builtin {builtin:?}");
            Ok(match builtin.as_str() {
                "standard" => standard_basis(typed::<DimArgs>(&what, args)?.dim)?,
                "fourier" => fourier_basis(typed::<DimArgs>(&what, args)?.dim)?,
                "aldroubi" => {
                    let a: AldroubiArgs = typed(&what, args)?;
                    aldroubi_family(a.dim, a.count.unwrap_or(a.dim))?
                }
                "two-onb-alternate" => {
                    let a: AlternateArgs = typed(&what, args)?;
                    AlternatingOnbGenerator::new(a.ambient)?.family(a.size)?
                }
                "gabor-thirds" => {
                    let a: ThirdsArgs = typed(&what, args)?;
                    let ex = ThirdsExample::new(a.cells, a.cell_len)?;
                    match a.truncation {
                        Some(n) => ex.family(n)?,
                        None => ex.lattice_family()?,
                    }
                }
                "gabor" => {
                    let a: GaborArgs = typed(&what, args)?;
                    gabor_family(&FiniteGaborSystem::with_window(a.l, a.a, a.b, &a.window)?, &a.order)?
                }
                "shannon" => {
                    let a: ShannonArgs = typed(&what, args)?;
                    ShannonGenerator { oversample: a.oversample }.family(a.size)?
                }
                "random" => {
                    let a: RandomArgs = typed(&what, args)?;
                    if a.dim == 0 || a.count == 0 {
                        return Err(CliError::config("random family needs positive dim and count"));
                    }
                    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
                    let m = match a.rank {
                        Some(r) if r == 0 || r > a.dim.min(a.count) => {
                            return Err(CliError::config(format!("rank {r} outside 1..=min(dim, count)")))
                        }
                        Some(r) => random_matrix(a.dim, r, &mut rng) * random_matrix(r, a.count, &mut rng),
                        None => random_matrix(a.dim, a.count, &mut rng),
                    };
                    FrameFamily::from_columns(&m, IndexConvention::Nat0)?
                }
                other => return Err(CliError::config(format!("unknown family builtin {other:?}"))),
            })
        }
    }
}

fn family_summary(fam: &FrameFamily) -> Value {
    json!({ "dim": fam.dim(), "len": fam.len(), "index": fam.index() })
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct AnalyzeParams {
    tail: Option<TailSpec>,
}

fn analyze(cfg: &ExperimentConfig, tol: &Tolerance) -> CliResult<Outcome> {
    let p: AnalyzeParams = typed("analyze params", &cfg.params)?;
    let fam = load_family(cfg)?;
    save_family(cfg, &fam)?;
    let report = fam.classify(tol)?;
    let mut results = json!({ "family": family_summary(&fam), "frame": report });
    let mut table = Table::flatten(&results);
    if let Some(tail) = &p.tail {
        let bounds = tail_frame_check(&fam, tail.n, &tail.ms, tol)?;
        table = Table::new(["m", "lower_bound"], bounds.iter().map(|t| vec![t.m.to_string(), num(t.lower_bound)]));
        results["tail"] = json!({ "n": tail.n, "bounds": bounds });
    }
    Ok(Outcome { results, table, warnings: Vec::new() })
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RepresentParams {
    #[serde(default)]
    independence: IndependencePolicy,
    #[serde(default)]
    shift_mode: ShiftMode,
}

fn represent(cfg: &ExperimentConfig, tol: &Tolerance) -> CliResult<Outcome> {
    let p: RepresentParams = typed("represent params", &cfg.params)?;
    let fam = load_family(cfg)?;
    save_family(cfg, &fam)?;
    let op = construct_iteration_operator_with(&fam, tol, p.independence)?;
    let shift = shift_invariance_residual(&fam, tol, p.shift_mode)?;
    let mut results = json!({
        "family": family_summary(&fam),
        "operator_norm": op.operator_norm,
        "interp_residual": op.interp_residual,
        "family_rank": op.family_rank,
        "condition": op.condition,
        "shift_residual": shift,
    });
    let mut warnings = op.warnings.clone();
    match interleaving_classify(&fam) {
        Ok(cls) => results["interleaving"] = to_value(&cls),
        Err(e) if fam.labels().is_some() => warnings.push(format!("no interleaving classification: {e}")),
        Err(_) => {}
    }
    Ok(Outcome { table: Table::flatten(&results), results, warnings })
}

fn gabor(cfg: &ExperimentConfig, tol: &Tolerance) -> CliResult<Outcome> {
    if cfg.input.is_some() {
        return Err(CliError::config("gabor reads its system from `params`, not `input`"));
    }
    let p: GaborArgs = typed("gabor params", &cfg.params)?;
    let sys = FiniteGaborSystem::with_window(p.l, p.a, p.b, &p.window)?;
    let fam = gabor_family(&sys, &p.order)?;
    save_family(cfg, &fam)?;
    let density = density_check(&sys);
    let results = json!({
        "system": { "l": sys.l(), "a": sys.a(), "b": sys.b(), "window": p.window, "count": sys.count() },
        "density": density,
        "frame": fam.classify(tol)?,
    });
    Ok(Outcome { table: Table::flatten(&results), results, warnings: Vec::new() })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumArgs {
    grid_size: usize,
    #[serde(default = "unit")]
    freq_extent: f64,
    width: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

fn load_spectrum(cfg: &ExperimentConfig) -> CliResult<SampledSpectrum> {
    match require_input(cfg)? {
        Input::File { file } => {
            let text = read_file(file)?;
            let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::from_json(&file.display().to_string(), e))?;
            serde_json::from_value(raw).map_err(|e| CliError::config(format!("{}: {e}", file.display())))
        }
        Input::Builtin { builtin, args } => {
            let a: SpectrumArgs = typed(&format!("spectrum {builtin:?}"), args)?;
            match (builtin.as_str(), a.width) {
                ("sinc", None) => Ok(sinc_spectrum(a.grid_size, a.freq_extent)?),
                ("gauss", Some(w)) => Ok(gauss_spectrum(a.grid_size, a.freq_extent, w)?),
                ("gauss", None) => Err(CliError::config("gauss spectrum needs `width`")),
                ("sinc", Some(_)) => Err(CliError::config("sinc spectrum takes no `width`")),
                (other, _) => Err(CliError::config(format!("unknown spectrum builtin {other:?}"))),
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TranslatesArgs {
    count: usize,
    dim: usize,
    #[serde(default)]
    mode: TranslationMode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ShiftinvParams {
    b: f64,
    #[serde(default = "default_points")]
    points: usize,
    family: Option<TranslatesArgs>,
}

fn default_points() -> usize {
    1024
}

fn phi_table(profiles: &[(&str, &PhiProfile)]) -> Table {
    let mut headers = vec!["gamma".to_string()];
    headers.extend(profiles.iter().map(|(name, _)| name.to_string()));
    let grid = &profiles[0].1.gamma_grid;
    let rows = (0..grid.len()).map(|i| {
        let mut row = vec![num(grid[i])];
        row.extend(profiles.iter().map(|(_, p)| num(p.phi_values[i])));
        row
    });
    Table::new(headers, rows)
}

fn shiftinv(cfg: &ExperimentConfig, tol: &Tolerance) -> CliResult<Outcome> {
    let p: ShiftinvParams = typed("shiftinv params", &cfg.params)?;
    let spec = load_spectrum(cfg)?;
    let profile = phi_profile(&spec, p.b, p.points, tol)?;
    let mut warnings = profile.warnings.clone();
    let mut results = json!({
        "spectrum": { "grid_size": spec.grid_size(), "freq_extent": spec.freq_extent(), "energy": spec.energy() },
        "b": p.b,
        "classification": classify_si(&profile, tol),
        "phi": profile,
    });
    if let Some(f) = &p.family {
        let tf = si_family(&spec, p.b, f.count, f.dim, f.mode)?;
        save_family(cfg, &tf.family)?;
        let check = translation_representation_check(&tf, tol)?;
        if !check.is_iterated {
            warnings.push("sampled translates are not an exact orbit of the sample shift".into());
        }
        results["family"] = json!({
            "step": tf.step,
            "mode": tf.mode,
            "frame": tf.family.classify(tol)?,
            "translation": check,
        });
    }
    Ok(Outcome { table: phi_table(&[("phi", &profile)]), results, warnings })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LadderArgs {
    a: Step,
    b: Step,
    #[serde(default = "default_window")]
    window: Window,
    #[serde(default = "default_order")]
    order: GaborOrder,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OversampleArgs {
    #[serde(default = "one")]
    oversample: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmbientArgs {
    #[serde(default = "default_ambient")]
    ambient: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ThirdsLadderArgs {
    #[serde(default = "default_cells")]
    cells: usize,
    #[serde(default = "default_cell_len")]
    cell_len: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

/// Size-indexed family ladders. A family file becomes the ladder of its prefixes.
fn load_generator(cfg: &ExperimentConfig) -> CliResult<Box<dyn FamilyGenerator>> {
    match require_input(cfg)? {
        Input::File { .. } => {
            let fam = load_family(cfg)?;
            Ok(Box::new(move |n: usize| fam.prefix(n)))
        }
        Input::Builtin { builtin, args } => {
            let what = format!("generator {builtin:?}");
            Ok(match builtin.as_str() {
                "aldroubi" => {
                    typed::<Empty>(&what, args)?;
                    Box::new(AldroubiGenerator)
                }
                "shift-onb" => {
                    typed::<Empty>(&what, args)?;
                    Box::new(ShiftOnbGenerator)
                }
                "two-onb-alternate" => Box::new(AlternatingOnbGenerator::new(typed::<AmbientArgs>(&what, args)?.ambient)?),
                "gabor-thirds" => {
                    let a: ThirdsLadderArgs = typed(&what, args)?;
                    Box::new(ThirdsExample::new(a.cells, a.cell_len)?)
                }
                "gabor-ladder" => {
                    let a: LadderArgs = typed(&what, args)?;
                    Box::new(GaborLadder { a: a.a, b: a.b, window: a.window, order: a.order })
                }
                "shannon" => Box::new(ShannonGenerator { oversample: typed::<OversampleArgs>(&what, args)?.oversample }),
                other => return Err(CliError::config(format!("unknown generator builtin {other:?}"))),
            })
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepParams {
    sizes: Vec<usize>,
    tail: Option<TailSpec>,
    #[serde(default)]
    independence: IndependencePolicy,
    #[serde(default)]
    shift_mode: ShiftMode,
    growth_factor: Option<f64>,
    plateau_rel: Option<f64>,
}

fn sweep_table(series: &SweepSeries) -> Table {
    fn cell(v: Option<f64>) -> String {
        v.map(num).unwrap_or_default()
    }
    Table::new(
        ["size", "excess", "lower_bound", "upper_bound", "shift_residual", "operator_norm", "interp_residual"],
        series.rows.iter().map(|r| {
            vec![
                r.size.to_string(),
                r.excess.map(|e| e.to_string()).unwrap_or_default(),
                cell(r.lower_bound),
                cell(r.upper_bound),
                cell(r.shift_residual),
                cell(r.operator_norm),
                cell(r.interp_residual),
            ]
        }),
    )
}

fn sweep_outcome(series: SweepSeries) -> Outcome {
    Outcome { table: sweep_table(&series), warnings: series.warnings.clone(), results: to_value(&series) }
}

fn sweep(cfg: &ExperimentConfig, tol: &Tolerance) -> CliResult<Outcome> {
    let p: SweepParams = typed("sweep params", &cfg.params)?;
    if p.sizes.len() < 3 {
        return Err(CliError::config("a sweep needs at least three sizes"));
    }
    let d = RepresentationOptions::default();
    let opts = RepresentationOptions {
        independence: p.independence,
        shift_mode: p.shift_mode,
        growth_factor: p.growth_factor.unwrap_or(d.growth_factor),
        plateau_rel: p.plateau_rel.unwrap_or(d.plateau_rel),
    };
    let generator = load_generator(cfg)?;
    let series = truncation_sweep(generator.as_ref(), &p.sizes, tol, &opts, p.tail.as_ref())?;
    Ok(sweep_outcome(series))
}

fn demo(cfg: &ExperimentConfig, tol: &Tolerance) -> CliResult<Outcome> {
    let name = match require_input(cfg)? {
        Input::Builtin { builtin, args } if args.is_empty() => builtin.as_str(),
        Input::Builtin { .. } => return Err(CliError::config("demos take no arguments")),
        Input::File { .. } => return Err(CliError::config("demo input must be a builtin name")),
    };
    if !cfg.params.is_empty() {
        return Err(CliError::config("demos take no params"));
    }
    match name {
        "aldroubi" => demo_aldroubi(tol),
        "two-onb-alternate" => {
            let gen = AlternatingOnbGenerator::new(AlternatingOnbGenerator::DEFAULT_AMBIENT)?;
            Ok(sweep_outcome(truncation_sweep(&gen, &[32, 64, 128], tol, &RepresentationOptions::default(), None)?))
        }
        "gabor-thirds" => demo_thirds(tol),
        "sinc-half-shift" => demo_sinc(tol),
        other => Err(CliError::config(format!("unknown demo {other:?}; available: {}", DEMOS.join(", ")))),
    }
}

fn demo_aldroubi(tol: &Tolerance) -> CliResult<Outcome> {
    let fam = aldroubi_family(100, 100)?;
    let frame = fam.classify(tol)?;
    let diag = boundedness_profile(&AldroubiGenerator, &[50, 100, 200], tol, &RepresentationOptions::resolved())?;
    let table = Table::new(["size", "operator_norm"], diag.norm_profile.iter().map(|(n, x)| vec![n.to_string(), num(*x)]));
    let warnings = diag.warnings.clone();
    let results = json!({ "family": family_summary(&fam), "frame": frame, "representation": diag });
    Ok(Outcome { results, table, warnings })
}

fn demo_thirds(tol: &Tolerance) -> CliResult<Outcome> {
    let ex = ThirdsExample::new(24, 4)?;
    let sizes = [48, 96, 192];
    let series = truncation_sweep(&ex, &sizes, tol, &RepresentationOptions::resolved(), None)?;
    let fam = ex.family(192)?;
    let even: Vec<usize> = (0..fam.len()).step_by(2).collect();
    let kernel = fam.kernel_basis_supported_on(&even, tol)?;
    let u = fam.synthesis_matrix();
    let residual = (0..kernel.ncols()).map(|i| (&u * kernel.column(i)).norm()).fold(0.0, f64::max);
    let mut out = sweep_outcome(series);
    let mut results = Map::new();
    results.insert("sweep".into(), out.results);
    results.insert(
        "even_kernel".into(),
        json!({ "size": fam.len(), "dimension": kernel.ncols(), "max_synthesis_residual": residual }),
    );
    out.results = Value::Object(results);
    Ok(out)
}

fn demo_sinc(tol: &Tolerance) -> CliResult<Outcome> {
    let fine = sinc_spectrum(8192, 1.0)?;
    let band = 64;
    let coarse = sinc_spectrum(2 * band, 1.0)?;
    let mut results = Map::new();
    let mut profiles = Vec::new();
    let mut warnings = Vec::new();
    for (key, b, count) in [("b_1", 1.0, band), ("b_half", 0.5, 2 * band)] {
        let profile = phi_profile(&fine, b, 1024, tol)?;
        let tf = si_family(&coarse, b, count, count, TranslationMode::Cyclic)?;
        warnings.extend(profile.warnings.iter().map(|w| format!("{key}: {w}")));
        results.insert(
            key.into(),
            json!({
                "b": b,
                "classification": classify_si(&profile, tol),
                "ess_inf_support": profile.ess_inf_support,
                "ess_sup": profile.ess_sup,
                "zero_fraction": profile.zero_fraction,
                "frame": tf.family.classify(tol)?,
            }),
        );
        profiles.push(profile);
    }
    let table = phi_table(&[("phi_b_1", &profiles[0]), ("phi_b_half", &profiles[1])]);
    Ok(Outcome { results: Value::Object(results), table, warnings })
}
