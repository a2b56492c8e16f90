//! The problem file: serde model, loading and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use qwx_core::class::validate_twist;
use qwx_core::quiver::{build_double_quiver, ArrowSpec};
use qwx_core::rational;
use qwx_core::wallcross::FramedValues;
use qwx_core::{
    CurveTwistData, Error as CoreError, FramedQuiverShape, FramingContext, LieAlgebra, Matrix, NumericalClass, Quiver,
    Rational, Representation, SupportSet, VertexCharge,
};

pub const FORMAT_VERSION: u32 = 1;

/// A rational read from `"p/q"` or an integer and written back as a string.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a rational string \"p/q\"")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(rational::int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                i64::try_from(v).map(|v| Q(rational::int(v))).map_err(|_| E::custom("integer out of range"))
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Q, E> {
                Err(E::custom(format!("{v} is a float; write rationals as \"p/q\" strings")))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                rational::parse(v)
                    .map(Q)
                    .ok_or_else(|| E::custom(format!("`{v}` is not a rational \"p/q\"")))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub id: String,
    pub tail: String,
    pub head: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuiverDoc {
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowDoc>,
    pub framing: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistDoc {
    pub genus: u32,
    /// Degree of `M_b` for every arrow of the double quiver, reverses
    /// included (`"a*"`).
    pub degrees: BTreeMap<String, i64>,
}

/// `[rank, degree]` at one gauged vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeDoc(pub u32, pub i64);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassDoc {
    pub v0: u32,
    /// Gauged vertices left out carry rank and degree zero.
    #[serde(default)]
    pub charges: BTreeMap<String, ChargeDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepDoc {
    pub dims: BTreeMap<String, usize>,
    /// Matrices by arrow id, `dim(head) x dim(tail)`; missing arrows act by 0.
    #[serde(default)]
    pub maps: BTreeMap<String, Vec<Vec<Q>>>,
    /// λ by gauged vertex id; missing vertices get 0.
    #[serde(default)]
    pub lambda: BTreeMap<String, Q>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablesDoc {
    /// `J(β)` by unframed class name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub unframed: BTreeMap<String, Q>,
    /// `J_τ(γ)` in the top chamber by framed class name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub asymptotic: BTreeMap<String, Q>,
    /// `J_{τ-}(γ)` just below `run.tau0`, for `invert`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub low_side: BTreeMap<String, Q>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_max: Option<Q>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<Q>,
    /// Unframed class names; defaults to every class in `tables.unframed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub euler_pairs: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ext_pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub format: u32,
    pub quiver: QuiverDoc,
    pub twist: TwistDoc,
    pub dim_k: u32,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub classes: BTreeMap<String, ClassDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub representations: BTreeMap<String, RepDoc>,
    #[serde(default)]
    pub tables: TablesDoc,
    #[serde(default)]
    pub run: RunDoc,
}

/// An input problem, with a machine-readable code and the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub code: &'static str,
    pub field: String,
    pub message: String,
}

impl InputError {
    pub fn new(code: &'static str, field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn core(field: impl Into<String>, err: &CoreError) -> Self {
        Self::new(core_code(err), field, err.to_string())
    }
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}: {}", self.code, self.message)
        } else {
            write!(f, "{} at `{}`: {}", self.code, self.field, self.message)
        }
    }
}

impl std::error::Error for InputError {}

pub fn core_code(err: &CoreError) -> &'static str {
    match err {
        CoreError::DuplicateVertex(_) => "DUPLICATE_VERTEX",
        CoreError::DuplicateArrow(_) => "DUPLICATE_ARROW",
        CoreError::UnknownVertex { .. } => "UNKNOWN_VERTEX",
        CoreError::UnknownFramingVertex(_) => "UNKNOWN_FRAMING_VERTEX",
        CoreError::NoGaugedVertices => "NO_GAUGED_VERTICES",
        CoreError::DimensionMismatch(_) => "DIMENSION_MISMATCH",
        CoreError::ShapeMismatch(_) => "SHAPE_MISMATCH",
        CoreError::RelationFailed(_) => "RELATION_FAILED",
        CoreError::MissingTwist(_) => "MISSING_TWIST",
        CoreError::TwistPairing { .. } => "TWIST_PAIRING",
        CoreError::FramingRank { .. } => "FRAMING_RANK",
        CoreError::NonPositiveTau(_) => "NON_POSITIVE_TAU",
        CoreError::NotFramed(_) => "NOT_FRAMED",
        CoreError::NotUnframed(_) => "NOT_UNFRAMED",
        CoreError::ZeroRankSupport(_) => "ZERO_RANK_SUPPORT",
        CoreError::ClassArity { .. } => "CLASS_ARITY",
        CoreError::ZeroLength => "ZERO_LENGTH",
        CoreError::InsufficientTable(_) => "INSUFFICIENT_TABLE",
    }
}

/// A validated problem with every name resolved.
#[derive(Debug, Clone)]
pub struct Problem {
    pub doc: ProblemDocument,
    pub shape: Arc<FramedQuiverShape>,
    pub twist: CurveTwistData,
    pub framing: FramingContext,
    pub lie: LieAlgebra,
    pub classes: BTreeMap<String, NumericalClass>,
    pub representations: BTreeMap<String, Representation>,
    pub unframed: BTreeMap<NumericalClass, Rational>,
    pub asymptotic: FramedValues,
    pub low_side: FramedValues,
}

impl Problem {
    pub fn class(&self, name: &str, field: &str) -> Result<&NumericalClass, InputError> {
        self.classes
            .get(name)
            .ok_or_else(|| InputError::new("UNKNOWN_NAME", field, format!("no class named `{name}`")))
    }

    /// A display name for a class: its document name if it has one.
    pub fn name_of(&self, class: &NumericalClass) -> String {
        self.classes
            .iter()
            .find(|(_, c)| *c == class)
            .map(|(n, _)| n.clone())
            .unwrap_or_else(|| class.to_string())
    }

    pub fn gamma(&self) -> Result<&NumericalClass, InputError> {
        let name = self
            .doc
            .run
            .gamma
            .as_deref()
            .ok_or_else(|| InputError::new("MISSING_FIELD", "run.gamma", "this command needs `run.gamma`"))?;
        let c = self.class(name, "run.gamma")?;
        if !self.framing.is_framed(c) {
            return Err(InputError::new("NOT_FRAMED", "run.gamma", format!("class `{name}` is not framed")));
        }
        Ok(c)
    }

    /// The unframed invariants restricted to `run.support`, if given.
    pub fn support_table(&self) -> Result<BTreeMap<NumericalClass, Rational>, InputError> {
        let Some(names) = &self.doc.run.support else {
            return Ok(self.unframed.clone());
        };
        let mut out = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            let field = format!("run.support[{i}]");
            let c = self.class(n, &field)?;
            let j = self.unframed.get(c).cloned().unwrap_or_else(|| rational::int(0));
            out.insert(c.clone(), j);
        }
        SupportSet::new(out.keys().cloned()).map_err(|e| InputError::core("run.support", &e))?;
        Ok(out)
    }

    pub fn support(&self) -> Result<SupportSet, InputError> {
        SupportSet::new(self.support_table()?.into_keys()).map_err(|e| InputError::core("run.support", &e))
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemDocument, InputError> {
    serde_json::from_str(text).map_err(|e| {
        let code = match e.classify() {
            serde_json::error::Category::Data => "SCHEMA_VIOLATION",
            _ => "PARSE_ERROR",
        };
        InputError::new(code, format!("line {} column {}", e.line(), e.column()), e.to_string())
    })
}

/// Reads, parses and validates a problem file.
pub fn load_problem(path: &Path) -> Result<Problem, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::new("IO_ERROR", path.display().to_string(), e.to_string()))?;
    validate(parse_problem(&text)?)
}

fn build_shape(doc: &QuiverDoc) -> Result<FramedQuiverShape, InputError> {
    let arrows = doc
        .arrows
        .iter()
        .map(|a| ArrowSpec {
            id: a.id.clone(),
            tail: a.tail.clone(),
            head: a.head.clone(),
        })
        .collect();
    let q = Quiver::new(doc.vertices.clone(), arrows).map_err(|e| InputError::core("quiver", &e))?;
    let dq = build_double_quiver(q).map_err(|e| InputError::core("quiver.arrows", &e))?;
    FramedQuiverShape::new(dq, &doc.framing).map_err(|e| InputError::core("quiver.framing", &e))
}

fn build_class(name: &str, doc: &ClassDoc, shape: &FramedQuiverShape) -> Result<NumericalClass, InputError> {
    let q = shape.quiver();
    let mut parts = vec![VertexCharge::new(0, 0); shape.gauged().len()];
    for (v, ChargeDoc(r, d)) in &doc.charges {
        let field = format!("classes.{name}.charges.{v}");
        let idx = q
            .vertex_index(v)
            .ok_or_else(|| InputError::new("UNKNOWN_NAME", &field, format!("no vertex `{v}`")))?;
        let pos = shape
            .gauged_position(idx)
            .ok_or_else(|| InputError::new("FRAMING_VERTEX_CHARGE", &field, "use `v0` for the framing vertex"))?;
        parts[pos] = VertexCharge::new(*r, *d);
    }
    Ok(NumericalClass::new(doc.v0, parts))
}

fn build_rep(
    name: &str,
    doc: &RepDoc,
    shape: &Arc<FramedQuiverShape>,
) -> Result<Representation, InputError> {
    let q = shape.quiver();
    let prefix = format!("representations.{name}");
    let mut dims = vec![0usize; q.vertex_count()];
    for (v, &n) in &doc.dims {
        let idx = q
            .vertex_index(v)
            .ok_or_else(|| InputError::new("UNKNOWN_NAME", format!("{prefix}.dims.{v}"), format!("no vertex `{v}`")))?;
        dims[idx] = n;
    }
    for id in doc.maps.keys() {
        if q.arrow_index(id).is_none() {
            return Err(InputError::new("UNKNOWN_NAME", format!("{prefix}.maps.{id}"), format!("no arrow `{id}`")));
        }
    }
    let mut mats = Vec::with_capacity(q.arrow_count());
    for a in 0..q.arrow_count() {
        let (rows, cols) = (dims[q.head(a)], dims[q.tail(a)]);
        let m = match doc.maps.get(q.arrow_id(a)) {
            None => Matrix::zeros(rows, cols),
            Some(entries) => {
                let entries = entries.iter().map(|r| r.iter().map(|x| x.0.clone()).collect()).collect();
                Matrix::from_rows_with_shape(rows, cols, entries).ok_or_else(|| {
                    InputError::new(
                        "DIMENSION_MISMATCH",
                        format!("{prefix}.maps.{}", q.arrow_id(a)),
                        format!("expected a {rows}x{cols} matrix"),
                    )
                })?
            }
        };
        mats.push(m);
    }
    let mut lambda = vec![rational::int(0); shape.gauged().len()];
    for (v, l) in &doc.lambda {
        let field = format!("{prefix}.lambda.{v}");
        let pos = q
            .vertex_index(v)
            .and_then(|i| shape.gauged_position(i))
            .ok_or_else(|| InputError::new("UNKNOWN_NAME", &field, format!("`{v}` is not a gauged vertex")))?;
        lambda[pos] = l.0.clone();
    }
    let rep = Representation::new(shape.clone(), dims, mats, lambda).map_err(|e| InputError::core(&prefix, &e))?;
    let report = rep.validate_relation();
    if !report.holds() {
        return Err(InputError::core(&prefix, &CoreError::RelationFailed(report.failures())));
    }
    Ok(rep)
}

fn resolve_values(
    table: &BTreeMap<String, Q>,
    field: &str,
    classes: &BTreeMap<String, NumericalClass>,
    framed: bool,
    framing: &FramingContext,
) -> Result<BTreeMap<NumericalClass, Rational>, InputError> {
    let mut out = BTreeMap::new();
    for (name, j) in table {
        let f = format!("{field}.{name}");
        let c = classes
            .get(name)
            .ok_or_else(|| InputError::new("UNKNOWN_NAME", &f, format!("no class named `{name}`")))?;
        if framed && !framing.is_framed(c) {
            return Err(InputError::new("NOT_FRAMED", &f, format!("class `{name}` is not framed")));
        }
        if !framed && c.is_framed() {
            return Err(InputError::new("NOT_UNFRAMED", &f, format!("class `{name}` is not unframed")));
        }
        if out.insert(c.clone(), j.0.clone()).is_some() {
            return Err(InputError::new("DUPLICATE_CLASS", &f, format!("class of `{name}` listed twice")));
        }
    }
    Ok(out)
}

/// Runs every module-level check on a parsed document.
pub fn validate(doc: ProblemDocument) -> Result<Problem, InputError> {
    if doc.format != FORMAT_VERSION {
        return Err(InputError::new(
            "SCHEMA_VIOLATION",
            "format",
            format!("unsupported format {}, expected {FORMAT_VERSION}", doc.format),
        ));
    }
    let shape = Arc::new(build_shape(&doc.quiver)?);
    let q = shape.quiver();
    for id in doc.twist.degrees.keys() {
        if q.arrow_index(id).is_none() {
            return Err(InputError::new("UNKNOWN_NAME", format!("twist.degrees.{id}"), format!("no arrow `{id}`")));
        }
    }
    let twist = CurveTwistData::from_lookup(doc.twist.genus, &shape, |id| doc.twist.degrees.get(id).copied())
        .map_err(|e| InputError::core("twist.degrees", &e))?;
    let report = validate_twist(&twist, &shape).map_err(|e| InputError::core("twist.degrees", &e))?;
    if let Some(bad) = report.first_failure() {
        let err = CoreError::TwistPairing {
            arrow: bad.arrow.clone(),
            sum: bad.sum,
            expected: bad.expected,
        };
        return Err(InputError::core(format!("twist.degrees.{}", bad.arrow), &err));
    }
    let framing = FramingContext::new(doc.dim_k).map_err(|e| InputError::core("dim_k", &e))?;
    let lie = LieAlgebra::from_data(&shape, &twist, framing).map_err(|e| InputError::core("twist", &e))?;

    let mut classes = BTreeMap::new();
    for (name, c) in &doc.classes {
        let class = build_class(name, c, &shape)?;
        framing
            .check_class(&class)
            .map_err(|e| InputError::core(format!("classes.{name}.v0"), &e))?;
        classes.insert(name.clone(), class);
    }
    let mut representations = BTreeMap::new();
    for (name, r) in &doc.representations {
        representations.insert(name.clone(), build_rep(name, r, &shape)?);
    }

    let unframed = resolve_values(&doc.tables.unframed, "tables.unframed", &classes, false, &framing)?;
    SupportSet::new(unframed.keys().cloned()).map_err(|e| InputError::core("tables.unframed", &e))?;
    let asymptotic = resolve_values(&doc.tables.asymptotic, "tables.asymptotic", &classes, true, &framing)?;
    let low_side = resolve_values(&doc.tables.low_side, "tables.low_side", &classes, true, &framing)?;

    for (field, value) in [("run.tau_max", &doc.run.tau_max), ("run.tau0", &doc.run.tau0)] {
        if let Some(Q(t)) = value {
            if *t <= rational::int(0) {
                return Err(InputError::core(field, &CoreError::NonPositiveTau(rational::format(t))));
            }
        }
    }
    for (field, pairs, known) in [
        ("run.euler_pairs", &doc.run.euler_pairs, classes.keys().collect::<Vec<_>>()),
        ("run.ext_pairs", &doc.run.ext_pairs, representations.keys().collect::<Vec<_>>()),
    ] {
        for (i, (a, b)) in pairs.iter().enumerate() {
            for n in [a, b] {
                if !known.contains(&n) {
                    return Err(InputError::new("UNKNOWN_NAME", format!("{field}[{i}]"), format!("unknown name `{n}`")));
                }
            }
        }
    }

    let problem = Problem {
        doc,
        shape,
        twist,
        framing,
        lie,
        classes,
        representations,
        unframed,
        asymptotic,
        low_side,
    };
    problem.support_table()?;
    if problem.doc.run.gamma.is_some() {
        problem.gamma()?;
    }
    Ok(problem)
}
