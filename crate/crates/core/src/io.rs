//! JSON instance files, canonical exports and report envelopes.
//!
//! Instance files are either explicit,
//!
//! ```json
//! {"kind": "simplex", "vertices": [["0","0"],["1","0"],["0","1"]], "c": ["1","2"]}
//! {"kind": "product", "factors": [<simplex>, <simplex>]}
//! ```
//!
//! or generated: `{"random_simplex": {"m": 3, "seed": 1}}` and
//! `{"random_product": {"blocks": "2,2", "seed": 1}}`. Product factors may
//! themselves be `random_simplex` generators. Exports are always explicit,
//! with vertices in objective order, so export, import, export is a fixed
//! point.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::arith::{format_rational, parse_rational, HCone, Rational, RationalVector};
use crate::error::{Error, Result};
use crate::model::{
    make_product, make_simplex, random_product, random_simplex, BlockStructure, LinearProgram,
    ProductInstance, SimplexInstance, Vertex,
};
use crate::pivot::{check_fan, Arborescence, Fan, FanViolation, Wall};
use crate::slope_map::{
    projection_check, verify_isomorphism, IsomorphismCertificate, ProjectionReport, VerifyOptions,
};
use crate::sylvester::{
    class_cone, normal_fan_check, MinkowskiReport, Permutation, SylvesterClass,
};

pub const TOOL: &str = "pivotfan";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Simplex(SimplexInstance),
    Product(ProductInstance),
}

impl Instance {
    pub fn blocks(&self) -> BlockStructure {
        match self {
            Instance::Simplex(s) => BlockStructure::single(s.m()).expect("m >= 1"),
            Instance::Product(p) => p.blocks().clone(),
        }
    }

    /// Canonical explicit form.
    pub fn to_json(&self) -> Value {
        match self {
            Instance::Simplex(s) => simplex_json(s, true),
            Instance::Product(p) => json!({
                "kind": "product",
                "factors": p.factors().iter().map(|f| simplex_json(f, true)).collect::<Vec<_>>(),
            }),
        }
    }

    /// Hex SHA-256 of the compact canonical form.
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&self.to_json()).expect("json values serialize");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// Delegates to the wrapped instance.
impl LinearProgram for Instance {
    fn dim(&self) -> usize {
        match self {
            Instance::Simplex(s) => s.dim(),
            Instance::Product(p) => p.dim(),
        }
    }
    fn objective(&self) -> &[Rational] {
        match self {
            Instance::Simplex(s) => s.objective(),
            Instance::Product(p) => p.objective(),
        }
    }
    fn vertices(&self) -> Vec<Vertex> {
        match self {
            Instance::Simplex(s) => s.vertices(),
            Instance::Product(p) => p.vertices(),
        }
    }
    fn is_vertex(&self, v: &Vertex) -> bool {
        match self {
            Instance::Simplex(s) => s.is_vertex(v),
            Instance::Product(p) => p.is_vertex(v),
        }
    }
    fn point(&self, v: &Vertex) -> RationalVector {
        match self {
            Instance::Simplex(s) => s.point(v),
            Instance::Product(p) => p.point(v),
        }
    }
    fn improving_neighbors(&self, v: &Vertex) -> Vec<Vertex> {
        match self {
            Instance::Simplex(s) => s.improving_neighbors(v),
            Instance::Product(p) => p.improving_neighbors(v),
        }
    }
    fn top(&self) -> Vertex {
        match self {
            Instance::Simplex(s) => s.top(),
            Instance::Product(p) => p.top(),
        }
    }
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn simplex_json(s: &SimplexInstance, with_kind: bool) -> Value {
    let vertices: Vec<Vec<String>> = (1..=s.n()).map(|i| strings(s.coords(i))).collect();
    let mut obj = Map::new();
    if with_kind {
        obj.insert("kind".into(), json!("simplex"));
    }
    obj.insert("vertices".into(), json!(vertices));
    obj.insert("c".into(), json!(strings(s.objective())));
    Value::Object(obj)
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance JSON: {e}")))?;
    instance_from_value(&value)
}

pub fn instance_from_value(value: &Value) -> Result<Instance> {
    let obj = value
        .as_object()
        .ok_or_else(|| Error::Parse("instance must be a JSON object".into()))?;
    if let Some(g) = obj.get("random_simplex") {
        let (m, seed) = (field_u64(g, "m")?, field_u64(g, "seed")?);
        return Ok(Instance::Simplex(random_simplex(m as usize, seed)?));
    }
    if let Some(g) = obj.get("random_product") {
        let blocks = match g.get("blocks") {
            Some(Value::String(t)) => BlockStructure::parse(t)?,
            Some(Value::Array(items)) => BlockStructure::new(
                items
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .map(|n| n as usize)
                            .ok_or_else(|| Error::Parse("block sizes must be integers".into()))
                    })
                    .collect::<Result<_>>()?,
            )?,
            _ => return Err(Error::Parse("random_product needs \"blocks\"".into())),
        };
        return Ok(Instance::Product(random_product(
            &blocks,
            field_u64(g, "seed")?,
        )?));
    }
    match obj.get("kind").and_then(Value::as_str) {
        Some("simplex") => Ok(Instance::Simplex(simplex_from_value(value)?)),
        Some("product") => {
            let factors = obj
                .get("factors")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse("product needs a \"factors\" array".into()))?;
            let factors = factors
                .iter()
                .map(|f| match f.get("random_simplex") {
                    Some(g) => random_simplex(field_u64(g, "m")? as usize, field_u64(g, "seed")?),
                    None => simplex_from_value(f),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(Instance::Product(make_product(factors)?))
        }
        Some(other) => Err(Error::Parse(format!("unknown instance kind {other:?}"))),
        None => Err(Error::Parse(
            "instance needs \"kind\" or a generator (random_simplex, random_product)".into(),
        )),
    }
}

fn field_u64(value: &Value, name: &str) -> Result<u64> {
    value
        .get(name)
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse(format!("generator needs a nonnegative integer {name:?}")))
}

fn rational_from_value(value: &Value) -> Result<Rational> {
    match value {
        Value::String(t) => parse_rational(t),
        Value::Number(n) if n.is_i64() => Ok(crate::arith::int(n.as_i64().unwrap())),
        _ => Err(Error::Parse(format!(
            "expected a rational string, got {value}"
        ))),
    }
}

fn vector_from_value(value: &Value) -> Result<RationalVector> {
    value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("expected an array, got {value}")))?
        .iter()
        .map(rational_from_value)
        .collect()
}

fn simplex_from_value(value: &Value) -> Result<SimplexInstance> {
    let vertices = value
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("simplex needs a \"vertices\" array".into()))?
        .iter()
        .map(vector_from_value)
        .collect::<Result<Vec<_>>>()?;
    let c = vector_from_value(
        value
            .get("c")
            .ok_or_else(|| Error::Parse("simplex needs an objective \"c\"".into()))?,
    )?;
    Ok(make_simplex(vertices, c)?.0)
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty<T: Serialize + ?Sized>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("values serialize");
    text.push('\n');
    text
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// One class as exported by the `classes` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub canonical: Permutation,
    pub size: usize,
    pub members: Vec<Permutation>,
    #[serde(flatten)]
    pub cone: HCone,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassesFile {
    pub blocks: BlockStructure,
    pub count: usize,
    pub classes: Vec<ClassRecord>,
}

impl ClassesFile {
    pub fn new(blocks: &BlockStructure, classes: &[SylvesterClass]) -> Result<Self> {
        let classes = classes
            .iter()
            .map(|cls| {
                Ok(ClassRecord {
                    canonical: cls.canonical().clone(),
                    size: cls.members.len(),
                    members: cls.members.clone(),
                    cone: class_cone(cls)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            blocks: blocks.clone(),
            count: classes.len(),
            classes,
        })
    }
}

/// Payload of the `fan` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanFile {
    pub engine: String,
    pub count: usize,
    /// Set when both engines ran.
    pub engines_agree: Option<bool>,
    pub complete: bool,
    pub fan: Fan<Arborescence>,
    pub walls: Vec<Wall>,
    pub violations: Vec<FanViolation>,
}

impl FanFile {
    pub fn new(engine: &str, fan: Fan<Arborescence>, engines_agree: Option<bool>) -> Self {
        let report = check_fan(&fan);
        Self {
            engine: engine.into(),
            count: fan.len(),
            engines_agree,
            complete: report.pass(),
            fan,
            walls: report.walls,
            violations: report.violations,
        }
    }
}

/// Payload of the `verify` command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyFile {
    pub pass: bool,
    pub certificate: IsomorphismCertificate,
    pub projection: ProjectionReport,
    pub minkowski: MinkowskiReport,
}

impl VerifyFile {
    pub fn new(
        certificate: IsomorphismCertificate,
        projection: ProjectionReport,
        minkowski: MinkowskiReport,
    ) -> Self {
        Self {
            pass: certificate.pass && projection.pass() && minkowski.pass(),
            certificate,
            projection,
            minkowski,
        }
    }
}

/// Certificate, projection check and Minkowski check for one instance.
pub fn verify_instance(inst: &Instance, options: VerifyOptions) -> Result<VerifyFile> {
    let blocks = inst.blocks();
    let (certificate, projection) = match inst {
        Instance::Simplex(s) => {
            let as_product = make_product(vec![s.clone()])?;
            (
                verify_isomorphism(s, &blocks, options),
                projection_check(&as_product, options.samples, options.seed)?,
            )
        }
        Instance::Product(p) => (
            verify_isomorphism(p, &blocks, options),
            projection_check(p, options.samples, options.seed)?,
        ),
    };
    Ok(VerifyFile::new(
        certificate,
        projection,
        normal_fan_check(&blocks)?,
    ))
}

/// Envelope written by every command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub instance_digest: Option<String>,
    pub results: Value,
    /// Wall-clock seconds per phase; `null` unless requested, so reports
    /// stay byte-identical by default.
    pub timing: Option<Value>,
}

impl ReportFile {
    pub fn new(command: &str, instance: Option<&Instance>, results: Value) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            instance_digest: instance.map(Instance::digest),
            results,
            timing: None,
        }
    }
}
