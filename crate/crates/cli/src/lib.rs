//! The `xylem` command line: render, sweep, bake, estimate and serve.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;
use xylem::grid::CellHashSeed;
use xylem::wood::{estimate_color_params, preset, WoodParams, DEFAULT_PRESET, PRESET_NAMES};
use xylem::FieldError;
use xylem_preview::{estimate_document, ServiceConfig};
use xylem_render::raster::decode_linear;
use xylem_render::{bake, frame_name, Cut, Light, MapKind, Quality, RenderError, Slab, SlabScene, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "xylem", version, about = "Procedural wood textures")]
pub struct Cli {
    /// Replaces the seed of the loaded parameters.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; all cores when unset.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render one image of a slab.
    Render {
        #[command(flatten)]
        input: SceneArgs,
        #[arg(long, value_enum, default_value = "full")]
        quality: QualityArg,
        /// Output image; `.pfm` writes linear floats, anything else PNG.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a sequence of frames with the light moving in elevation.
    Sweep {
        #[command(flatten)]
        input: SceneArgs,
        #[arg(long, default_value_t = 64)]
        frames: usize,
        /// First and last light elevation in degrees.
        #[arg(long, value_parser = parse_pair, default_value = "10,170")]
        arc: [f64; 2],
        /// Directory for `frame_NNN.png`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Bake texture maps of the slab surface.
    Bake {
        #[command(flatten)]
        input: SceneArgs,
        /// `all` or a comma separated list of map names.
        #[arg(long, default_value = "all", value_parser = parse_maps)]
        maps: MapList,
        /// Texture size, `N` or `WxH`.
        #[arg(long, value_parser = parse_res, default_value = "512")]
        res: [u32; 2],
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate color parameters from a photograph.
    Estimate {
        #[arg(long)]
        photo: PathBuf,
        #[command(flatten)]
        base: ParamsArgs,
        /// Where to write the parameters with the estimate applied.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the preview HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

#[derive(Clone, Debug)]
pub struct MapList(pub Vec<MapKind>);

fn parse_maps(s: &str) -> Result<MapList, String> {
    MapKind::parse_list(s).map(MapList)
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum QualityArg {
    Draft,
    Full,
}

impl From<QualityArg> for Quality {
    fn from(q: QualityArg) -> Self {
        match q {
            QualityArg::Draft => Quality::Draft,
            QualityArg::Full => Quality::Full,
        }
    }
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    /// Wood parameter JSON file.
    #[arg(long, conflicts_with = "preset")]
    pub params: Option<PathBuf>,
    /// Built-in preset, used when no parameter file is given.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESET_NAMES))]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[command(flatten)]
    pub params: ParamsArgs,
    /// Scene JSON file; the flags below override its fields.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// `tangential[:d]`, `radial[:d]`, `transverse[:z]` or `plane:ox,oy,oz:ux,uy,uz:vx,vy,vz`.
    #[arg(long, value_parser = parse_cut)]
    pub cut: Option<Cut>,
    /// Image size in pixels, `WxH`.
    #[arg(long, value_parser = parse_res)]
    pub size: Option<[u32; 2]>,
    /// Slab width and height in world units, `WxH`.
    #[arg(long, value_parser = parse_extent)]
    pub extent: Option<[f64; 2]>,
    /// Light elevation and azimuth in degrees.
    #[arg(long, value_parser = parse_pair)]
    pub light: Option<[f64; 2]>,
    #[arg(long)]
    pub exposure: Option<f64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameters:\n{}", list(.0))]
    Validation(Vec<FieldError>),
    #[error("{0}")]
    Failed(String),
}

fn list(errors: &[FieldError]) -> String {
    errors.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n")
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 2,
            Self::Failed(_) => 1,
        }
    }
}

impl From<RenderError> for CliError {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Invalid(errors) | RenderError::Degenerate(errors) => Self::Validation(errors),
            other => Self::Failed(other.to_string()),
        }
    }
}

impl From<xylem::Error> for CliError {
    fn from(e: xylem::Error) -> Self {
        Self::Validation(e.field_errors())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Failed(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Failed(format!("cannot write {}: {e}", path.display())))
}

fn numbers(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"))).collect()
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    numbers(s)?.try_into().map_err(|_| format!("expected two comma separated numbers, got `{s}`"))
}

fn parse_extent(s: &str) -> Result<[f64; 2], String> {
    let (w, h) = s.split_once('x').ok_or_else(|| format!("expected WxH, got `{s}`"))?;
    Ok([w.parse().map_err(|e| format!("`{w}`: {e}"))?, h.parse().map_err(|e| format!("`{h}`: {e}"))?])
}

fn parse_res(s: &str) -> Result<[u32; 2], String> {
    let int = |v: &str| v.parse::<u32>().map_err(|e| format!("`{v}`: {e}"));
    match s.split_once('x') {
        Some((w, h)) => Ok([int(w)?, int(h)?]),
        None => int(s).map(|n| [n, n]),
    }
}

fn parse_cut(s: &str) -> Result<Cut, String> {
    let (kind, rest) = s.split_once(':').map_or((s, None), |(k, r)| (k, Some(r)));
    let scalar = |default: f64| rest.map_or(Ok(default), |r| r.parse::<f64>().map_err(|e| format!("`{r}`: {e}")));
    match kind {
        "tangential" => Ok(Cut::Tangential { distance: scalar(40.0)? }),
        "radial" => Ok(Cut::Radial { distance: scalar(40.0)? }),
        "transverse" => Ok(Cut::Transverse { z: scalar(0.0)? }),
        "plane" => {
            let parts = rest.unwrap_or("").split(':').map(numbers).collect::<Result<Vec<_>, _>>()?;
            let vec3 = |v: &Vec<f64>| <[f64; 3]>::try_from(v.as_slice()).ok();
            match parts.iter().map(vec3).collect::<Option<Vec<_>>>().as_deref() {
                Some(&[origin, u, v]) => Ok(Cut::Plane { origin, u, v }),
                _ => Err("plane needs origin, u and v as `plane:ox,oy,oz:ux,uy,uz:vx,vy,vz`".into()),
            }
        }
        _ => Err(format!("unknown cut `{kind}`; expected tangential, radial, transverse or plane")),
    }
}

impl ParamsArgs {
    pub fn load(&self, seed: Option<u64>) -> Result<WoodParams, CliError> {
        let mut params = match (&self.params, &self.preset) {
            (Some(path), _) => WoodParams::from_json(&read(path)?)?,
            (None, name) => preset(name.as_deref().unwrap_or(DEFAULT_PRESET)).expect("preset names are checked by the parser"),
        };
        if let Some(s) = seed {
            params.seed = CellHashSeed(s);
        }
        params.validate()?;
        Ok(params)
    }
}

impl SceneArgs {
    pub fn scene(&self) -> Result<SlabScene, CliError> {
        let mut scene = match &self.scene {
            Some(path) => serde_json::from_str(&read(path)?)
                .map_err(|e| CliError::Validation(vec![FieldError::new("scene", e.to_string())]))?,
            None => SlabScene::default(),
        };
        if let Some(cut) = self.cut {
            scene.cut = cut;
        }
        if let Some(size) = self.size {
            scene.resolution = size;
        }
        if let Some(extent) = self.extent {
            scene.extent = extent;
        }
        if let Some([elevation, azimuth]) = self.light {
            scene.light = Light { elevation, azimuth };
        }
        if let Some(exposure) = self.exposure {
            scene.exposure = exposure;
        }
        Ok(scene)
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let workers = cli.workers;
    match cli.command {
        Command::Render { input, quality, out } => {
            let params = input.params.load(cli.seed)?;
            let (scene, params) = Quality::from(quality).apply(&input.scene()?, &params);
            Slab::new(&scene, &params)?.render(workers)?.save(&out)?;
        }
        Command::Sweep { input, frames, arc, out } => {
            let params = input.params.load(cli.seed)?;
            let slab = Slab::new(&input.scene()?, &params)?;
            std::fs::create_dir_all(&out).map_err(|e| CliError::Failed(format!("cannot create {}: {e}", out.display())))?;
            let spec = SweepSpec { frames, arc };
            slab.sweep_each(&spec, workers, |k, frame| frame.save(&out.join(frame_name(k, frames))))?;
        }
        Command::Bake { input, maps, res, out } => {
            let params = input.params.load(cli.seed)?;
            bake(&input.scene()?, &params, res, workers)?.write(&out, &maps.0)?;
        }
        Command::Estimate { photo, base, out } => {
            let mut params = base.load(cli.seed)?;
            let bytes = std::fs::read(&photo).map_err(|e| CliError::Failed(format!("cannot read {}: {e}", photo.display())))?;
            let pixels = decode_linear(&bytes).map_err(|e| CliError::Failed(format!("cannot decode {}: {e}", photo.display())))?;
            let estimate = estimate_color_params(&pixels)?;
            estimate.apply(&mut params);
            write(&out, params.to_json_pretty().as_bytes())?;
            println!("{}", serde_json::to_string_pretty(&estimate_document(&estimate)).expect("estimate serializes"));
        }
        Command::Serve { host, port } => {
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Failed(e.to_string()))?;
            eprintln!("listening on http://{host}:{port}");
            runtime
                .block_on(xylem_preview::serve(&host, port, ServiceConfig { seed: cli.seed }))
                .map_err(|e| CliError::Failed(format!("server: {e}")))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cut_specs() {
        assert_eq!(parse_cut("radial").unwrap(), Cut::Radial { distance: 40.0 });
        assert_eq!(parse_cut("transverse:-3.5").unwrap(), Cut::Transverse { z: -3.5 });
        assert_eq!(
            parse_cut("plane:0,0,1:1,0,0:0,1,0").unwrap(),
            Cut::Plane { origin: [0.0, 0.0, 1.0], u: [1.0, 0.0, 0.0], v: [0.0, 1.0, 0.0] }
        );
        assert!(parse_cut("plane:0,0:1,0,0:0,1,0").is_err());
        assert!(parse_cut("diagonal").is_err());
    }

    #[test]
    fn sizes_and_pairs() {
        assert_eq!(parse_res("64").unwrap(), [64, 64]);
        assert_eq!(parse_res("64x32").unwrap(), [64, 32]);
        assert_eq!(parse_pair("10, 170").unwrap(), [10.0, 170.0]);
        assert!(parse_pair("10").is_err());
        assert_eq!(parse_extent("20x7.5").unwrap(), [20.0, 7.5]);
    }
}
