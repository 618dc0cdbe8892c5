//! `.fcx` model files (JSON).
//!
//! ```text
//! { "p": 1, "q": 0, "backend": "exact",
//!   "blocks":  [{"u":0,"v":0,"dim":2,"labels":["v0","v1"]}, ...],
//!   "dF":      [{"u":0,"v":0,"rows":1,"cols":2,"nonzeros":[[0,0,-1,1,0,1],[0,1,1,1,0,1]]}, ...],
//!   "twist":   {"omega":[[1,1,0,1]], "W":[...]},
//!   "stars":   {"starF":[...], "starPerp":[...], "starFull":[...],
//!               "orientation":{"leafVolume":0,"transverseVolume":0}},
//!   "morphisms": [{"name":"...","kind":"general","blocks":[...]}] }
//! ```
//!
//! A scalar is `[re_num, re_den, im_num, im_den]` (exact) or `[re, im]`
//! (float); integers that do not fit in 64 bits are written as strings. A map
//! is given either densely as row-major `entries` (a list of scalars) or as
//! `nonzeros`, a list of `[row, col, scalar...]`. Missing map blocks are zero.
//! `starFull` is optional and derived from the other two stars when absent.
//!
//! The canonical form written by [`to_canonical_string`] is compact JSON with
//! sorted keys, blocks sorted by `(u,v)` and sparse entries in row-major order.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::complex::{BigradedComplex, LeafwiseForm};
use crate::error::Error;
use crate::gaussian::GaussianRational;
use crate::matrix::Matrix;
use crate::morphism::MorphismKind;
use crate::scalar::{Backend, Scalar};
use crate::star::{Orientation, StarOperators};
use crate::twist::{make_twist, TwistData, TwistedComplex};

/// Scalars with a file encoding.
pub trait FcxScalar: Scalar {
    /// Number of JSON values per scalar.
    const WIDTH: usize;
    fn encode(&self) -> Vec<Value>;
    fn decode(values: &[Value], path: &str) -> Result<Self, Error>;
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema { path: path.to_string(), message: message.into() }
}

fn encode_int(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(x) => json!(x),
        None => json!(n.to_string()),
    }
}

fn decode_int(v: &Value, path: &str) -> Result<BigInt, Error> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| schema(path, "expected an integer")),
        Value::String(s) => s.parse().map_err(|_| schema(path, format!("`{s}` is not an integer"))),
        _ => Err(schema(path, "expected an integer")),
    }
}

fn decode_ratio(num: &Value, den: &Value, path: &str) -> Result<BigRational, Error> {
    let n = decode_int(num, path)?;
    let d = decode_int(den, path)?;
    if d.is_zero() {
        return Err(schema(path, "zero denominator"));
    }
    Ok(BigRational::new(n, d))
}

impl FcxScalar for GaussianRational {
    const WIDTH: usize = 4;

    fn encode(&self) -> Vec<Value> {
        vec![encode_int(self.re.numer()), encode_int(self.re.denom()), encode_int(self.im.numer()), encode_int(self.im.denom())]
    }

    fn decode(values: &[Value], path: &str) -> Result<Self, Error> {
        if values.len() != 4 {
            return Err(schema(path, "exact scalar must be [re_num, re_den, im_num, im_den]"));
        }
        Ok(GaussianRational::new(decode_ratio(&values[0], &values[1], path)?, decode_ratio(&values[2], &values[3], path)?))
    }
}

impl FcxScalar for Complex<f64> {
    const WIDTH: usize = 2;

    fn encode(&self) -> Vec<Value> {
        vec![json!(self.re), json!(self.im)]
    }

    fn decode(values: &[Value], path: &str) -> Result<Self, Error> {
        let f = |v: &Value| v.as_f64().ok_or_else(|| schema(path, "expected a number"));
        if values.len() != 2 {
            return Err(schema(path, "float scalar must be [re, im]"));
        }
        Ok(Complex::new(f(&values[0])?, f(&values[1])?))
    }
}

/// A morphism stored in a model file: block maps from the model to itself.
#[derive(Clone, Debug, PartialEq)]
pub struct StoredMorphism<S> {
    pub name: String,
    pub kind: MorphismKind,
    pub blocks: Vec<Vec<Matrix<S>>>,
}

#[derive(Clone, Debug)]
pub struct FcxModel<S> {
    pub complex: Arc<BigradedComplex<S>>,
    pub twist: Option<TwistData<S>>,
    pub stars: Option<StarOperators<S>>,
    pub morphisms: Vec<StoredMorphism<S>>,
}

impl<S: Scalar> FcxModel<S> {
    /// The twisted complex (untwisted when the file has no twist), without
    /// re-checking the twist axioms.
    pub fn twisted(&self) -> Result<TwistedComplex<S>, Error> {
        match &self.twist {
            Some(t) => TwistedComplex::unchecked(Arc::clone(&self.complex), t.clone()),
            None => Ok(TwistedComplex::untwisted(Arc::clone(&self.complex))),
        }
    }

    pub fn convert<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> FcxModel<T> {
        let grid = |g: &Vec<Vec<Matrix<S>>>| -> Vec<Vec<Matrix<T>>> {
            g.iter().map(|row| row.iter().map(|m| m.convert(f)).collect()).collect()
        };
        FcxModel {
            complex: Arc::new(self.complex.convert(f)),
            twist: self.twist.as_ref().map(|t| TwistData {
                omega: LeafwiseForm::new(t.omega.bidegree, t.omega.coefficients.iter().map(f).collect()),
                w: grid(&t.w),
            }),
            stars: self.stars.as_ref().map(|s| s.convert(f)),
            morphisms: self
                .morphisms
                .iter()
                .map(|m| StoredMorphism { name: m.name.clone(), kind: m.kind, blocks: grid(&m.blocks) })
                .collect(),
        }
    }
}

/// How much checking happens at load time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoadMode {
    /// Schema and shapes only; invariant violations are left for the caller to report.
    Structural,
    /// Also requires `dF^2 = 0`, the twist axioms and the star invariants.
    Strict,
}

#[derive(Clone, Debug)]
pub enum LoadedModel {
    Exact(FcxModel<GaussianRational>),
    Float(FcxModel<Complex<f64>>),
}

impl LoadedModel {
    pub fn backend(&self) -> Backend {
        match self {
            LoadedModel::Exact(_) => Backend::Exact,
            LoadedModel::Float(_) => Backend::Float,
        }
    }

    /// Exact models convert to float; float models cannot become exact.
    pub fn with_backend(self, backend: Backend) -> Result<LoadedModel, Error> {
        match (self, backend) {
            (LoadedModel::Exact(m), Backend::Float) => Ok(LoadedModel::Float(m.convert(to_float))),
            (LoadedModel::Float(_), Backend::Exact) => {
                Err(Error::Backend("a float model cannot be evaluated with the exact backend".into()))
            }
            (m, _) => Ok(m),
        }
    }
}

pub fn to_float(x: &GaussianRational) -> Complex<f64> {
    Complex::new(x.re.to_f64().unwrap_or(f64::NAN), x.im.to_f64().unwrap_or(f64::NAN))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, Error> {
    obj.get(key).ok_or_else(|| schema(path, format!("missing key `{key}`")))
}

fn as_usize(v: &Value, path: &str) -> Result<usize, Error> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, Error> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, Error> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn decode_scalar<S: FcxScalar>(v: &Value, path: &str) -> Result<S, Error> {
    S::decode(as_array(v, path)?, path)
}

/// Reads one map block; returns its `(u,v)` and the matrix.
fn decode_block<S: FcxScalar>(v: &Value, path: &str) -> Result<((usize, usize), Matrix<S>), Error> {
    let obj = as_object(v, path)?;
    let u = as_usize(field(obj, "u", path)?, &format!("{path}.u"))?;
    let vv = as_usize(field(obj, "v", path)?, &format!("{path}.v"))?;
    let rows = as_usize(field(obj, "rows", path)?, &format!("{path}.rows"))?;
    let cols = as_usize(field(obj, "cols", path)?, &format!("{path}.cols"))?;
    let m = match (obj.get("entries"), obj.get("nonzeros")) {
        (Some(_), Some(_)) => return Err(schema(path, "give either `entries` or `nonzeros`, not both")),
        (Some(e), None) => {
            let list = as_array(e, &format!("{path}.entries"))?;
            if list.len() != rows * cols {
                return Err(schema(&format!("{path}.entries"), format!("{} entries for a {rows}x{cols} map", list.len())));
            }
            let entries = list
                .iter()
                .enumerate()
                .map(|(k, x)| decode_scalar::<S>(x, &format!("{path}.entries[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            Matrix::from_dense(rows, cols, entries)?
        }
        (None, Some(nz)) => {
            let list = as_array(nz, &format!("{path}.nonzeros"))?;
            let mut triplets = Vec::with_capacity(list.len());
            for (k, item) in list.iter().enumerate() {
                let p = format!("{path}.nonzeros[{k}]");
                let vals = as_array(item, &p)?;
                if vals.len() != 2 + S::WIDTH {
                    return Err(schema(&p, format!("expected [row, col] and {} scalar values", S::WIDTH)));
                }
                let (i, j) = (as_usize(&vals[0], &p)?, as_usize(&vals[1], &p)?);
                if i >= rows || j >= cols {
                    return Err(schema(&p, format!("position ({i},{j}) outside a {rows}x{cols} map")));
                }
                triplets.push((i, j, S::decode(&vals[2..], &p)?));
            }
            Matrix::from_triplets(rows, cols, triplets)?
        }
        (None, None) => Matrix::zeros(rows, cols),
    };
    Ok(((u, vv), m))
}

/// Reads a list of map blocks into a `(q+1) x (p+1)` grid. `shape(u,v)` is the
/// required shape; absent blocks are zero.
fn decode_grid<S: FcxScalar>(
    v: &Value,
    path: &str,
    p: usize,
    q: usize,
    shape: impl Fn(usize, usize) -> (usize, usize),
) -> Result<Vec<Vec<Matrix<S>>>, Error> {
    let mut grid: Vec<Vec<Option<Matrix<S>>>> = vec![vec![None; p + 1]; q + 1];
    for (k, item) in as_array(v, path)?.iter().enumerate() {
        let p_item = format!("{path}[{k}]");
        let ((u, vv), m) = decode_block::<S>(item, &p_item)?;
        if u > q || vv > p {
            return Err(Error::Bidegree { u: u as isize, v: vv as isize, p, q });
        }
        if grid[u][vv].is_some() {
            return Err(schema(&p_item, format!("duplicate block ({u},{vv})")));
        }
        if m.shape() != shape(u, vv) {
            return Err(Error::Shape {
                context: format!("{path} block ({u},{vv})"),
                expected: shape(u, vv),
                found: m.shape(),
            });
        }
        grid[u][vv] = Some(m);
    }
    Ok((0..=q)
        .map(|u| {
            (0..=p)
                .map(|vv| {
                    let (r, c) = shape(u, vv);
                    grid[u][vv].take().unwrap_or_else(|| Matrix::zeros(r, c))
                })
                .collect()
        })
        .collect())
}

fn parse_typed<S: FcxScalar>(root: &Map<String, Value>, mode: LoadMode) -> Result<FcxModel<S>, Error> {
    let p = as_usize(field(root, "p", "$")?, "$.p")?;
    let q = as_usize(field(root, "q", "$")?, "$.q")?;
    let mut dims = vec![vec![None; p + 1]; q + 1];
    let mut labels = vec![vec![Vec::new(); p + 1]; q + 1];
    for (k, b) in as_array(field(root, "blocks", "$")?, "$.blocks")?.iter().enumerate() {
        let path = format!("$.blocks[{k}]");
        let obj = as_object(b, &path)?;
        let u = as_usize(field(obj, "u", &path)?, &path)?;
        let v = as_usize(field(obj, "v", &path)?, &path)?;
        if u > q || v > p {
            return Err(Error::Bidegree { u: u as isize, v: v as isize, p, q });
        }
        let dim = as_usize(field(obj, "dim", &path)?, &path)?;
        if dims[u][v].is_some() {
            return Err(schema(&path, format!("duplicate block ({u},{v})")));
        }
        dims[u][v] = Some(dim);
        labels[u][v] = match obj.get("labels") {
            Some(l) => {
                let list = as_array(l, &format!("{path}.labels"))?;
                if list.len() != dim {
                    return Err(schema(&format!("{path}.labels"), format!("{} labels for dimension {dim}", list.len())));
                }
                list.iter()
                    .map(|x| x.as_str().map(str::to_string).ok_or_else(|| schema(&format!("{path}.labels"), "expected strings")))
                    .collect::<Result<_, _>>()?
            }
            None => (0..dim).map(|i| format!("b{i}")).collect(),
        };
    }
    let dims: Vec<Vec<usize>> = dims
        .into_iter()
        .enumerate()
        .map(|(u, row)| {
            row.into_iter()
                .enumerate()
                .map(|(v, d)| d.ok_or_else(|| schema("$.blocks", format!("missing block ({u},{v})"))))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let dim = |u: usize, v: usize| if u <= q && v <= p { dims[u][v] } else { 0 };
    let leaf_shape = |u: usize, v: usize| (dim(u, v + 1), dim(u, v));
    let d_f = match root.get("dF") {
        Some(v) => decode_grid::<S>(v, "$.dF", p, q, leaf_shape)?,
        None => decode_grid::<S>(&json!([]), "$.dF", p, q, leaf_shape)?,
    };
    let complex = BigradedComplex::new(p, q, dims.clone(), Some(labels), d_f)?;
    if mode == LoadMode::Strict {
        if let Some(d) = complex.validate().first() {
            return Err(Error::InvalidModel(d.to_string()));
        }
    }
    let complex = Arc::new(complex);

    let twist = match root.get("twist") {
        None | Some(Value::Null) => None,
        Some(t) => {
            let obj = as_object(t, "$.twist")?;
            let omega_vals = as_array(field(obj, "omega", "$.twist")?, "$.twist.omega")?;
            let omega = omega_vals
                .iter()
                .enumerate()
                .map(|(k, x)| decode_scalar::<S>(x, &format!("$.twist.omega[{k}]")))
                .collect::<Result<Vec<_>, _>>()?;
            let w = decode_grid::<S>(field(obj, "W", "$.twist")?, "$.twist.W", p, q, leaf_shape)?;
            let data = TwistData { omega: LeafwiseForm::new((0, 1), omega), w };
            match mode {
                LoadMode::Strict => {
                    make_twist(Arc::clone(&complex), data.omega.clone(), data.w.clone())?;
                }
                LoadMode::Structural => {
                    TwistedComplex::unchecked(Arc::clone(&complex), data.clone())?;
                }
            }
            Some(data)
        }
    };

    let stars = match root.get("stars") {
        None | Some(Value::Null) => None,
        Some(s) => {
            let obj = as_object(s, "$.stars")?;
            let sf = decode_grid::<S>(field(obj, "starF", "$.stars")?, "$.stars.starF", p, q, |u, v| (dim(u, p - v), dim(u, v)))?;
            let sp =
                decode_grid::<S>(field(obj, "starPerp", "$.stars")?, "$.stars.starPerp", p, q, |u, v| (dim(q - u, v), dim(u, v)))?;
            let full = match obj.get("starFull") {
                Some(f) => Some(decode_grid::<S>(f, "$.stars.starFull", p, q, |u, v| (dim(q - u, p - v), dim(u, v)))?),
                None => None,
            };
            let orientation = match obj.get("orientation") {
                Some(o) => {
                    let o = as_object(o, "$.stars.orientation")?;
                    Orientation {
                        leaf_volume: as_usize(field(o, "leafVolume", "$.stars.orientation")?, "$.stars.orientation.leafVolume")?,
                        transverse_volume: as_usize(
                            field(o, "transverseVolume", "$.stars.orientation")?,
                            "$.stars.orientation.transverseVolume",
                        )?,
                    }
                }
                None => Orientation::default(),
            };
            Some(match mode {
                LoadMode::Strict => StarOperators::from_blocks(&complex, sf, sp, full, orientation)?,
                LoadMode::Structural => StarOperators::unchecked(&complex, sf, sp, full, orientation)?,
            })
        }
    };

    let mut morphisms = Vec::new();
    if let Some(list) = root.get("morphisms") {
        let mut names = BTreeSet::new();
        for (k, m) in as_array(list, "$.morphisms")?.iter().enumerate() {
            let path = format!("$.morphisms[{k}]");
            let obj = as_object(m, &path)?;
            let name = field(obj, "name", &path)?
                .as_str()
                .ok_or_else(|| schema(&format!("{path}.name"), "expected a string"))?
                .to_string();
            if !names.insert(name.clone()) {
                return Err(schema(&path, format!("duplicate morphism name `{name}`")));
            }
            let kind: MorphismKind = match obj.get("kind") {
                Some(v) => serde_json::from_value(v.clone()).map_err(|e| schema(&format!("{path}.kind"), e.to_string()))?,
                None => MorphismKind::General,
            };
            let blocks = decode_grid::<S>(field(obj, "blocks", &path)?, &format!("{path}.blocks"), p, q, |u, v| {
                (dim(u, v), dim(u, v))
            })?;
            morphisms.push(StoredMorphism { name, kind, blocks });
        }
    }
    Ok(FcxModel { complex, twist, stars, morphisms })
}

pub fn parse_model(text: &str, mode: LoadMode) -> Result<LoadedModel, Error> {
    let root: Value = serde_json::from_str(text)?;
    let obj = as_object(&root, "$")?;
    let backend = match obj.get("backend") {
        None => Backend::Exact,
        Some(v) => v
            .as_str()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| schema("$.backend", "expected \"exact\" or \"float\""))?,
    };
    Ok(match backend {
        Backend::Exact => LoadedModel::Exact(parse_typed(obj, mode)?),
        Backend::Float => LoadedModel::Float(parse_typed(obj, mode)?),
    })
}

/// Strict load.
pub fn load_model(path: impl AsRef<Path>) -> Result<LoadedModel, Error> {
    load_model_with(path, LoadMode::Strict)
}

pub fn load_model_with(path: impl AsRef<Path>, mode: LoadMode) -> Result<LoadedModel, Error> {
    parse_model(&std::fs::read_to_string(path)?, mode)
}

fn encode_block<S: FcxScalar>(u: usize, v: usize, m: &Matrix<S>) -> Value {
    let nonzeros: Vec<Value> = m
        .triplets()
        .map(|(i, j, x)| {
            let mut row = vec![json!(i), json!(j)];
            row.extend(x.encode());
            Value::Array(row)
        })
        .collect();
    json!({"u": u, "v": v, "rows": m.rows(), "cols": m.cols(), "nonzeros": nonzeros})
}

fn encode_grid<S: FcxScalar>(grid: &[Vec<Matrix<S>>]) -> Value {
    Value::Array(
        grid.iter()
            .enumerate()
            .flat_map(|(u, row)| row.iter().enumerate().map(move |(v, m)| encode_block(u, v, m)))
            .collect(),
    )
}

pub fn to_value<S: FcxScalar>(model: &FcxModel<S>) -> Value {
    let c = &model.complex;
    let (p, q) = (c.p(), c.q());
    let blocks: Vec<Value> = (0..=q)
        .flat_map(|u| (0..=p).map(move |v| (u, v)))
        .map(|(u, v)| json!({"u": u, "v": v, "dim": c.dims()[u][v], "labels": c.labels(u, v)}))
        .collect();
    let mut root = Map::new();
    root.insert("p".into(), json!(p));
    root.insert("q".into(), json!(q));
    root.insert("backend".into(), json!(S::BACKEND.as_str()));
    root.insert("blocks".into(), Value::Array(blocks));
    root.insert("dF".into(), encode_grid(c.d_f_blocks()));
    if let Some(t) = &model.twist {
        let omega: Vec<Value> = t.omega.coefficients.iter().map(|x| Value::Array(x.encode())).collect();
        root.insert("twist".into(), json!({"omega": omega, "W": encode_grid(&t.w)}));
    }
    if let Some(s) = &model.stars {
        let o = s.orientation();
        root.insert(
            "stars".into(),
            json!({
                "starF": encode_grid(s.star_f_blocks()),
                "starPerp": encode_grid(s.star_perp_blocks()),
                "starFull": encode_grid(s.star_full_blocks()),
                "orientation": {"leafVolume": o.leaf_volume, "transverseVolume": o.transverse_volume},
            }),
        );
    }
    if !model.morphisms.is_empty() {
        let list: Vec<Value> = model
            .morphisms
            .iter()
            .map(|m| json!({"name": m.name, "kind": m.kind, "blocks": encode_grid(&m.blocks)}))
            .collect();
        root.insert("morphisms".into(), Value::Array(list));
    }
    Value::Object(root)
}

pub fn to_canonical_string<S: FcxScalar>(model: &FcxModel<S>) -> String {
    let mut s = serde_json::to_string(&to_value(model)).expect("model serializes");
    s.push('\n');
    s
}

pub fn save_model<S: FcxScalar>(model: &FcxModel<S>, path: impl AsRef<Path>) -> Result<(), Error> {
    std::fs::write(path, to_canonical_string(model))?;
    Ok(())
}

/// Rewrites a model file's text in canonical form.
pub fn canonicalize(text: &str) -> Result<String, Error> {
    Ok(match parse_model(text, LoadMode::Structural)? {
        LoadedModel::Exact(m) => to_canonical_string(&m),
        LoadedModel::Float(m) => to_canonical_string(&m),
    })
}
