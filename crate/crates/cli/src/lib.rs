//! Command implementations behind the `foliated-hodge` binary.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use foliated_hodge::gaussian::parse_rational;
use foliated_hodge::hodge::{betti_rank_nullity, harmonic_basis};
use foliated_hodge::models::fcx::{canonicalize, parse_model, to_canonical_string, FcxScalar, StoredMorphism};
use foliated_hodge::{
    build_torus_model, check_diamond_symmetries, check_harmonic_transport, check_laplacian_conjugations,
    check_sign_identities, equality_classes, hodge_diamond, render_diamond, Backend, Error, Exact, FcxModel, Float,
    HodgeDiamond, IdentityRecord, LoadMode, LoadedModel, MorphismKind, Report, Scalar, TorusModelSpec, TwistedComplex,
};
use num_rational::BigRational;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "foliated-hodge", version, about = "Leafwise twisted cohomology of finite foliated complexes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a canonical .fcx model (from a torus spec, or re-encode an input file)
    Build(CommonArgs),
    /// Print the Hodge diamond for omega and -omega with its symmetry report
    Diamond(CommonArgs),
    /// Run every identity check on a model
    Verify(CommonArgs),
    /// Summarize a model
    Info(CommonArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Model file (.fcx)
    #[arg(long, conflicts_with = "torus")]
    pub input: Option<PathBuf>,
    /// Inline torus spec, e.g. `--torus p=2 q=3 K=1 c=1,0`
    #[arg(long, num_args = 1.., value_name = "KEY=VALUE")]
    pub torus: Option<Vec<String>>,
    #[arg(long)]
    pub backend: Option<Backend>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the result here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Text to print and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_MODEL_ERROR: i32 = 2;

/// Parses `p=.. q=.. K=.. c=..` into a torus spec. `c` defaults to zero.
pub fn parse_torus_spec(items: &[String]) -> Result<TorusModelSpec, Error> {
    let bad = |msg: String| Error::InvalidModel(msg);
    let (mut p, mut q, mut k, mut c) = (None, None, None, None);
    for item in items.iter().flat_map(|s| s.split_whitespace()) {
        let (key, value) = item.split_once('=').ok_or_else(|| bad(format!("expected KEY=VALUE, got `{item}`")))?;
        let int = |v: &str| v.parse::<i64>().map_err(|_| bad(format!("`{key}` needs an integer, got `{v}`")));
        match key {
            "p" => p = Some(int(value)?),
            "q" => q = Some(int(value)?),
            "K" | "k" => k = Some(int(value)?),
            "c" => {
                let cs: Result<Vec<BigRational>, Error> = value
                    .split(',')
                    .map(|x| parse_rational(x).ok_or_else(|| bad(format!("bad rational `{x}` in c"))))
                    .collect();
                c = Some(cs?);
            }
            other => return Err(bad(format!("unknown torus key `{other}` (expected p, q, K, c)"))),
        }
    }
    let dim = |name: &str, v: Option<i64>| -> Result<usize, Error> {
        let v = v.ok_or_else(|| bad(format!("torus spec needs {name}=..")))?;
        usize::try_from(v).map_err(|_| bad(format!("{name} must be non-negative")))
    };
    let (p, q) = (dim("p", p)?, dim("q", q)?);
    let k = k.ok_or_else(|| bad("torus spec needs K=..".into()))?;
    let c = c.unwrap_or_else(|| vec![BigRational::from_integer(0.into()); p]);
    TorusModelSpec::new(p, q, k, c)
}

/// The torus model as a file model, with one quarter-period shift per leaf direction.
pub fn torus_file<S: Scalar>(spec: &TorusModelSpec) -> Result<FcxModel<S>, Error> {
    let m = build_torus_model::<S>(spec)?;
    let mut morphisms = Vec::new();
    for j in 0..spec.p {
        morphisms.push(StoredMorphism {
            name: format!("quarter_leaf_shift_{}", j + 1),
            kind: MorphismKind::Pullback,
            blocks: m.leaf_translation(j)?,
        });
    }
    Ok(FcxModel { complex: Arc::clone(&m.complex), twist: Some(m.twist.clone()), stars: Some(m.stars.clone()), morphisms })
}

fn load(args: &CommonArgs, mode: LoadMode) -> Result<LoadedModel, Error> {
    let model = match (&args.input, &args.torus) {
        (Some(path), None) => parse_model(&std::fs::read_to_string(path)?, mode)?,
        (None, Some(items)) => {
            let spec = parse_torus_spec(items)?;
            match args.backend.unwrap_or(Backend::Exact) {
                Backend::Exact => LoadedModel::Exact(torus_file(&spec)?),
                Backend::Float => LoadedModel::Float(torus_file(&spec)?),
            }
        }
        _ => return Err(Error::InvalidModel("give exactly one of --input PATH or --torus p=.. q=.. K=.. c=..".into())),
    };
    match args.backend {
        Some(b) => model.with_backend(b),
        None => Ok(model),
    }
}

fn harmonic_counts<S: Scalar>(t: &TwistedComplex<S>) -> Result<Vec<Vec<usize>>, Error> {
    (0..=t.q() as isize)
        .map(|u| (0..=t.p() as isize).map(|v| Ok(harmonic_basis(t, u, v)?.cols())).collect())
        .collect()
}

/// Every identity check that applies to the model. Checks that need stars are
/// skipped when the model has none.
pub fn verify_model<S: Scalar>(model: &FcxModel<S>) -> Result<Report, Error> {
    let c = &model.complex;
    let (p, q) = (c.p() as isize, c.q() as isize);
    let mut report = Report::new();
    for u in 0..=q {
        for v in 0..p {
            let sq = &c.d_f(u, v + 1) * &c.d_f(u, v);
            report.push(IdentityRecord::vanishes("leafwise_d_squared", (u as usize, v as usize), &sq));
        }
    }
    let t = model.twisted()?;
    if model.twist.is_some() {
        report.extend(t.axiom_report());
    }
    let minus = t.negated();
    if let Some(stars) = &model.stars {
        report.extend(stars.invariant_report());
        report.extend(check_sign_identities(stars, &t)?);
        report.extend(check_laplacian_conjugations(&t, &minus, stars)?);
        report.extend(check_harmonic_transport(&t, &minus, stars)?);
    }
    let plus_counts = harmonic_counts(&t)?;
    for u in 0..=q {
        for v in 0..=p {
            let h = plus_counts[u as usize][v as usize];
            report.push(IdentityRecord::counts("betti_double_route", (u as usize, v as usize), h, betti_rank_nullity(&t, u, v)?));
        }
    }
    if model.stars.is_some() {
        let d = HodgeDiamond { p: c.p(), q: c.q(), h_plus: plus_counts, h_minus: harmonic_counts(&minus)? };
        report.extend(check_diamond_symmetries(&d));
    }
    for m in &model.morphisms {
        let name = format!("intertwining[{}]", m.name);
        for u in 0..=q {
            for v in 0..=p {
                let (ui, vi) = (u as usize, v as usize);
                let next = if v < p { m.blocks[ui][vi + 1].clone() } else { foliated_hodge::Matrix::zeros(0, c.dim(u, v + 1)) };
                let defect = &(&next * &t.d_omega(u, v)) - &(&t.d_omega(u, v) * &m.blocks[ui][vi]);
                report.push(IdentityRecord::vanishes(name.clone(), (ui, vi), &defect));
            }
        }
    }
    Ok(report)
}

fn report_outcome(report: &Report, format: Format) -> Outcome {
    let output = match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    };
    Outcome { output, code: if report.all_pass() { EXIT_PASS } else { EXIT_FAIL } }
}

pub fn cmd_verify(args: &CommonArgs) -> Result<Outcome, Error> {
    let report = match load(args, LoadMode::Structural)? {
        LoadedModel::Exact(m) => verify_model(&m)?,
        LoadedModel::Float(m) => verify_model(&m)?,
    };
    Ok(report_outcome(&report, args.format))
}

fn diamond_of<S: Scalar>(model: &FcxModel<S>) -> Result<HodgeDiamond, Error> {
    hodge_diamond(&model.twisted()?)
}

pub fn cmd_diamond(args: &CommonArgs) -> Result<Outcome, Error> {
    let d = match load(args, LoadMode::Strict)? {
        LoadedModel::Exact(m) => diamond_of(&m)?,
        LoadedModel::Float(m) => diamond_of(&m)?,
    };
    let report = check_diamond_symmetries(&d);
    let output = match args.format {
        Format::Text => format!("{}\n{}", render_diamond(&d), report.to_text()),
        Format::Json => {
            let (cp, cm) = equality_classes(d.p, d.q);
            let letters = |t: Vec<Vec<char>>| -> Vec<Vec<String>> {
                t.into_iter().map(|row| row.into_iter().map(String::from).collect()).collect()
            };
            let value = json!({
                "p": d.p,
                "q": d.q,
                "h_plus": d.h_plus,
                "h_minus": d.h_minus,
                "classes_plus": letters(cp),
                "classes_minus": letters(cm),
                "report": report,
            });
            serde_json::to_string_pretty(&value)? + "\n"
        }
    };
    Ok(Outcome { output, code: if report.all_pass() { EXIT_PASS } else { EXIT_FAIL } })
}

fn info_of<S: Scalar>(model: &FcxModel<S>) -> serde_json::Value {
    let c = &model.complex;
    json!({
        "p": c.p(),
        "q": c.q(),
        "backend": S::BACKEND.as_str(),
        "dims": c.dims(),
        "total_dim": c.total_dim(),
        "twist": model.twist.is_some(),
        "stars": model.stars.is_some(),
        "morphisms": model.morphisms.iter().map(|m| m.name.clone()).collect::<Vec<_>>(),
    })
}

pub fn cmd_info(args: &CommonArgs) -> Result<Outcome, Error> {
    let info = match load(args, LoadMode::Strict)? {
        LoadedModel::Exact(m) => info_of(&m),
        LoadedModel::Float(m) => info_of(&m),
    };
    let output = match args.format {
        Format::Json => serde_json::to_string_pretty(&info)? + "\n",
        Format::Text => {
            let yes = |k: &str| if info[k].as_bool() == Some(true) { "yes" } else { "no" };
            let mut s = format!("p = {}\nq = {}\nbackend = {}\n", info["p"], info["q"], info["backend"].as_str().unwrap_or(""));
            s += &format!("twist = {}\nstars = {}\n", yes("twist"), yes("stars"));
            let names: Vec<&str> = info["morphisms"].as_array().into_iter().flatten().filter_map(|v| v.as_str()).collect();
            s += &format!("morphisms = {}\n", if names.is_empty() { "none".to_string() } else { names.join(", ") });
            s += &format!("total dim = {}\n", info["total_dim"]);
            s += "dims (row u, column v):\n";
            for (u, row) in info["dims"].as_array().into_iter().flatten().enumerate() {
                let cells: Vec<String> = row.as_array().into_iter().flatten().map(|x| format!("{:>6}", x.to_string())).collect();
                s += &format!("  u={u}:{}\n", cells.join(""));
            }
            s
        }
    };
    Ok(Outcome { output, code: EXIT_PASS })
}

fn encode<S: Scalar + FcxScalar>(model: &FcxModel<S>) -> String {
    to_canonical_string(model)
}

pub fn cmd_build(args: &CommonArgs) -> Result<Outcome, Error> {
    let output = match (&args.input, args.backend) {
        (Some(path), None) => canonicalize(&std::fs::read_to_string(path)?)?,
        _ => match load(args, LoadMode::Strict)? {
            LoadedModel::Exact(m) => encode::<Exact>(&m),
            LoadedModel::Float(m) => encode::<Float>(&m),
        },
    };
    Ok(Outcome { output, code: EXIT_PASS })
}

pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    match &cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Diamond(a) => cmd_diamond(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Info(a) => cmd_info(a),
    }
}

pub fn output_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Build(a) | Command::Diamond(a) | Command::Verify(a) | Command::Info(a) => a.output.as_ref(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn items(s: &str) -> Vec<String> {
        s.split(' ').map(String::from).collect()
    }

    #[test]
    fn parses_rational_twists() {
        let spec = parse_torus_spec(&items("p=2 q=3 K=1 c=1/2,-3")).unwrap();
        assert_eq!((spec.p, spec.q, spec.k), (2, 3, 1));
        assert_eq!(spec.c, vec![BigRational::new(1.into(), 2.into()), BigRational::from_integer((-3).into())]);
    }

    #[test]
    fn twist_defaults_to_zero() {
        let spec = parse_torus_spec(&items("q=1 p=1 k=0")).unwrap();
        assert_eq!(spec.c, vec![BigRational::from_integer(0.into())]);
    }

    #[test]
    fn rejects_bad_specs() {
        for bad in ["p=1 q=1", "p=1 q=1 K=1 c=x", "p=1 q=1 K=1 r=2", "p=-1 q=1 K=0", "p=1 q=1 K=1 c=1,1", "p q"] {
            assert!(parse_torus_spec(&items(bad)).is_err(), "{bad}");
        }
    }
}
