//! JSON formats: fields, lattices, series files (JSON lines), τ points, orbit data and
//! verification reports.
//!
//! Rationals are strings `"p"` or `"p/q"` (JSON integers are accepted on input). A field
//! element is a single rational (read as `q·1`) or an array of rationals in the integral basis.

use std::sync::Arc;

use num::{Complex, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{parse_q, Interval, Q, Z};
use crate::cyclealg::{
    check_series_product, AdelicSurrogate, CheckReport, CycleClass, CycleRing, Frame, Matrix, NaturalReport, OrbitDatum,
    Pullback, QuadSpace, WeightFunction,
};
use crate::error::{Error, Result};
use crate::ffs::{CoefficientRing, FormalSeries, GaussianRing, RationalRing};
use crate::numberfield::{FieldElem, NumberField};
use crate::symcone::{ConeLattice, SymMat};
use crate::theta::{QuadLattice, TailModel, TauPoint};

pub const SERIES_FORMAT: &str = "ffskit-series";

fn schema<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Schema(msg.into()))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Schema(format!("malformed JSON: {e}")))
}

fn field_of<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Schema(format!("missing key {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Schema(format!("{what} must be an array")))
}

pub fn q_from_json(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => parse_q(&n.to_string()),
        _ => schema(format!("expected a rational as a string or integer, got {v}")),
    }
}

pub fn q_to_json(q: &Q) -> Value {
    Value::String(q.to_string())
}

fn usize_from_json(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| Error::Schema(format!("{what} must be a nonnegative integer")))
}

// ---- fields and elements

/// `{"min_poly": [c0, …, 1], "integral_basis"?: [[…]], "isolators"?: [[lo, hi], …]}`, or one of
/// the names `"Q"` and `"Q(sqrt5)"`.
pub fn field_from_json(v: &Value) -> Result<NumberField> {
    if let Some(name) = v.as_str() {
        return match name {
            "Q" => Ok(NumberField::rationals()),
            "Q(sqrt5)" => Ok(NumberField::golden()),
            _ => schema(format!("unknown field name {name:?}")),
        };
    }
    let mp = array(field_of(v, "min_poly")?, "min_poly")?;
    let coeffs: Vec<Z> = mp
        .iter()
        .map(|c| {
            let q = q_from_json(c)?;
            if !q.is_integer() {
                return schema("minimal polynomial coefficients must be integers");
            }
            Ok(q.to_integer())
        })
        .collect::<Result<_>>()?;
    let d = coeffs.len().saturating_sub(1);
    let basis = match v.get("integral_basis") {
        None | Some(Value::Null) => (0..d).map(|i| (0..d).map(|k| if i == k { Q::from_integer(1.into()) } else { Q::zero() }).collect()).collect(),
        Some(b) => array(b, "integral_basis")?
            .iter()
            .map(|row| array(row, "integral_basis row")?.iter().map(q_from_json).collect())
            .collect::<Result<_>>()?,
    };
    let isolators = match v.get("isolators") {
        None | Some(Value::Null) => None,
        Some(iv) => Some(
            array(iv, "isolators")?
                .iter()
                .map(|p| {
                    let p = array(p, "isolator")?;
                    if p.len() != 2 {
                        return schema("an isolator is a pair [lo, hi]");
                    }
                    Ok(Interval::new(q_from_json(&p[0])?, q_from_json(&p[1])?))
                })
                .collect::<Result<_>>()?,
        ),
    };
    NumberField::new(&coeffs, basis, isolators)
}

pub fn field_to_json(f: &NumberField) -> Value {
    let mp: Vec<Value> = f.min_poly().coeffs().iter().map(q_to_json).collect();
    let basis: Vec<Value> = f.basis_matrix().iter().map(|r| Value::Array(r.iter().map(q_to_json).collect())).collect();
    let iso: Vec<Value> = f.isolators().iter().map(|i| json!([q_to_json(&i.lo), q_to_json(&i.hi)])).collect();
    json!({ "min_poly": mp, "integral_basis": basis, "isolators": iso })
}

pub fn elem_from_json(f: &NumberField, v: &Value) -> Result<FieldElem> {
    match v {
        Value::Array(cs) => {
            if cs.len() != f.degree() {
                return schema(format!("field element needs {} coordinates", f.degree()));
            }
            Ok(f.elem(cs.iter().map(q_from_json).collect::<Result<_>>()?))
        }
        _ => Ok(f.from_q(&q_from_json(v)?)),
    }
}

pub fn elem_to_json(f: &NumberField, a: &FieldElem) -> Value {
    if f.degree() == 1 {
        q_to_json(&a.coords[0])
    } else {
        Value::Array(a.coords.iter().map(q_to_json).collect())
    }
}

pub fn vector_from_json(f: &NumberField, v: &Value) -> Result<Vec<FieldElem>> {
    array(v, "vector")?.iter().map(|x| elem_from_json(f, x)).collect()
}

pub fn matrix_from_json(f: &NumberField, v: &Value) -> Result<Matrix> {
    array(v, "matrix")?.iter().map(|r| vector_from_json(f, r)).collect()
}

pub fn matrix_to_json(f: &NumberField, m: &[Vec<FieldElem>]) -> Value {
    Value::Array(m.iter().map(|r| Value::Array(r.iter().map(|x| elem_to_json(f, x)).collect())).collect())
}

pub fn symmat_from_json(f: &NumberField, v: &Value) -> Result<SymMat> {
    let rows = matrix_from_json(f, v)?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return schema("T must be a square matrix");
    }
    SymMat::from_rows(rows)
}

pub fn symmat_to_json(f: &NumberField, t: &SymMat) -> Value {
    matrix_to_json(f, &t.rows())
}

// ---- lattices

/// `{"field": …, "gram": [[…]]}`.
pub fn lattice_from_json(v: &Value) -> Result<QuadLattice> {
    let f = Arc::new(field_from_json(field_of(v, "field")?)?);
    let gram = matrix_from_json(&f, field_of(v, "gram")?)?;
    QuadLattice::new(f, gram)
}

// ---- series files

/// Serialization of coefficients for series files.
pub trait Codec: CoefficientRing {
    const TAG: &'static str;
    fn encode(&self, a: &Self::Elem) -> Value;
    fn decode(&self, v: &Value) -> Result<Self::Elem>;
}

impl Codec for RationalRing {
    const TAG: &'static str = "Q";
    fn encode(&self, a: &Q) -> Value {
        q_to_json(a)
    }
    fn decode(&self, v: &Value) -> Result<Q> {
        q_from_json(v)
    }
}

impl Codec for GaussianRing {
    const TAG: &'static str = "Q(i)";
    fn encode(&self, a: &Complex<Q>) -> Value {
        json!([q_to_json(&a.re), q_to_json(&a.im)])
    }
    fn decode(&self, v: &Value) -> Result<Complex<Q>> {
        let p = array(v, "Gaussian rational")?;
        if p.len() != 2 {
            return schema("a Gaussian rational is a pair [re, im]");
        }
        Ok(Complex::new(q_from_json(&p[0])?, q_from_json(&p[1])?))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TailJson {
    Exact,
    Lattice { pivots: Vec<String>, genus: usize },
    Unknown,
}

pub fn tail_to_json(t: &TailModel) -> Value {
    let j = match t {
        TailModel::Exact => TailJson::Exact,
        TailModel::LatticeCount { pivots, genus } => TailJson::Lattice { pivots: pivots.iter().map(|p| p.to_string()).collect(), genus: *genus },
        TailModel::Unknown => TailJson::Unknown,
    };
    serde_json::to_value(j).expect("serializable")
}

pub fn tail_from_json(v: &Value) -> Result<TailModel> {
    let j: TailJson = serde_json::from_value(v.clone()).map_err(|e| Error::Schema(format!("bad tail model: {e}")))?;
    Ok(match j {
        TailJson::Exact => TailModel::Exact,
        TailJson::Lattice { pivots, genus } => {
            TailModel::LatticeCount { pivots: pivots.iter().map(|p| parse_q(p)).collect::<Result<_>>()?, genus }
        }
        TailJson::Unknown => TailModel::Unknown,
    })
}

/// A series together with what is known about its tail.
#[derive(Clone, Debug)]
pub struct SeriesFile<R: CoefficientRing> {
    pub series: FormalSeries<R>,
    pub tail: TailModel,
}

/// Header line, then one `{"T", "coeff"}` line per nonzero term in canonical order.
pub fn write_series<R: Codec>(s: &SeriesFile<R>) -> String {
    let cone = s.series.cone();
    let f = cone.field();
    let header = json!({
        "format": SERIES_FORMAT,
        "field": field_to_json(f),
        "genus": cone.n(),
        "level": cone.nu(),
        "height_bound": q_to_json(s.series.bound()),
        "ring": R::TAG,
        "tail": tail_to_json(&s.tail),
    });
    let mut out = header.to_string();
    out.push('\n');
    for (p, c) in s.series.terms() {
        let line = json!({ "T": symmat_to_json(f, &p.t), "coeff": s.series.ring().encode(c) });
        out.push_str(&line.to_string());
        out.push('\n');
    }
    out
}

pub fn read_series<R: Codec + Default>(text: &str) -> Result<SeriesFile<R>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = parse_json(lines.next().ok_or_else(|| Error::Schema("empty series file".into()))?)?;
    if header.get("format").and_then(Value::as_str) != Some(SERIES_FORMAT) {
        return schema(format!("series header must have format {SERIES_FORMAT:?}"));
    }
    let ring_tag = field_of(&header, "ring")?.as_str().unwrap_or("");
    if ring_tag != R::TAG {
        return schema(format!("series has coefficient ring {ring_tag:?}, expected {:?}", R::TAG));
    }
    let f = Arc::new(field_from_json(field_of(&header, "field")?)?);
    let n = usize_from_json(field_of(&header, "genus")?, "genus")?;
    let nu = field_of(&header, "level")?.as_u64().ok_or_else(|| Error::Schema("level must be a positive integer".into()))?;
    let bound = q_from_json(field_of(&header, "height_bound")?)?;
    let tail = match header.get("tail") {
        None | Some(Value::Null) => TailModel::Unknown,
        Some(t) => tail_from_json(t)?,
    };
    let ring = R::default();
    let cone = ConeLattice::new(f.clone(), n, nu)?;
    let mut series = FormalSeries::zero(cone, ring.clone(), bound);
    for l in lines {
        let v = parse_json(l)?;
        let t = symmat_from_json(&f, field_of(&v, "T")?)?;
        if t.n() != n {
            return schema(format!("exponent of size {} in a genus-{n} series", t.n()));
        }
        series.add_term(t, ring.decode(field_of(&v, "coeff")?)?)?;
    }
    Ok(SeriesFile { series, tail })
}

// ---- τ points

/// `{"tau": [Z_1, …, Z_d]}`, one symmetric matrix per real place with entries `[re, im]`.
/// For genus one, `{"tau": [[x, y], …]}` with one pair per place is also accepted.
pub fn tau_from_json(v: &Value) -> Result<TauPoint> {
    let places = array(field_of(v, "tau")?, "tau")?;
    let num = |x: &Value| x.as_f64().ok_or_else(|| Error::Schema("τ entries must be numbers".into()));
    let complex = |x: &Value| -> Result<Complex<f64>> {
        let p = array(x, "complex entry")?;
        if p.len() != 2 {
            return schema("a complex entry is a pair [re, im]");
        }
        Ok(Complex::new(num(&p[0])?, num(&p[1])?))
    };
    let mut taus = Vec::new();
    for z in places {
        let rows = array(z, "τ component")?;
        if rows.len() == 2 && rows.iter().all(|r| r.is_number()) {
            taus.push(vec![vec![Complex::new(num(&rows[0])?, num(&rows[1])?)]]);
            continue;
        }
        taus.push(rows.iter().map(|r| array(r, "τ row")?.iter().map(complex).collect()).collect::<Result<_>>()?);
    }
    TauPoint::new(taus)
}

// ---- orbit data and weights

pub fn space_from_json(v: &Value) -> Result<QuadSpace> {
    let f = Arc::new(field_from_json(field_of(v, "field")?)?);
    let gram = matrix_from_json(&f, field_of(v, "gram")?)?;
    let d_plus = match v.get("d_plus") {
        None => 1,
        Some(x) => x.as_u64().ok_or_else(|| Error::Schema("d_plus must be a positive integer".into()))? as u32,
    };
    QuadSpace::new(f, gram, d_plus)
}

fn matrices(f: &NumberField, v: Option<&Value>) -> Result<Vec<Matrix>> {
    match v {
        None | Some(Value::Null) => Ok(Vec::new()),
        Some(v) => array(v, "matrix list")?.iter().map(|m| matrix_from_json(f, m)).collect(),
    }
}

/// `{field, gram, d_plus?, generators?, components?: [{generators, g}]}`.
pub fn orbit_datum_from_json(v: &Value) -> Result<OrbitDatum> {
    let space = space_from_json(v)?;
    let f = space.field().clone();
    match v.get("components") {
        None | Some(Value::Null) => OrbitDatum::new(space, &matrices(&f, v.get("generators"))?),
        Some(cs) => {
            let comps = array(cs, "components")?
                .iter()
                .map(|c| Ok((matrices(&f, c.get("generators"))?, matrix_from_json(&f, field_of(c, "g")?)?)))
                .collect::<Result<Vec<_>>>()?;
            OrbitDatum::with_components(space, &comps)
        }
    }
}

/// `{"genus": n, "points": [{"frame": [[…], …], "weight"?: q}]}`; weights default to 1.
pub fn weight_from_json(f: &NumberField, v: &Value) -> Result<WeightFunction> {
    let n = usize_from_json(field_of(v, "genus")?, "genus")?;
    let pts = array(field_of(v, "points")?, "points")?;
    let vals = pts
        .iter()
        .map(|p| {
            let x = matrix_from_json(f, field_of(p, "frame")?)?;
            let w = match p.get("weight") {
                None => Q::from_integer(1.into()),
                Some(w) => q_from_json(w)?,
            };
            Ok((x, w))
        })
        .collect::<Result<Vec<(Frame, Q)>>>()?;
    WeightFunction::new(n, vals)
}

pub fn cycle_class_to_json(f: &NumberField, a: &CycleClass) -> Value {
    Value::Array(
        a.terms()
            .map(|(s, c)| {
                json!({
                    "component": s.component,
                    "subspace": matrix_to_json(f, s.space.basis()),
                    "c_power": s.c_power,
                    "coeff": q_to_json(c),
                })
            })
            .collect(),
    )
}

fn report_json(f: &NumberField, check: &str, r: &CheckReport) -> Value {
    json!({
        "check": check,
        "equal": r.equal,
        "lhs": cycle_class_to_json(f, &r.lhs),
        "rhs": cycle_class_to_json(f, &r.rhs),
        "diff": cycle_class_to_json(f, &r.lhs.sub(&r.rhs)),
    })
}

fn series_json(f: &NumberField, s: &FormalSeries<CycleRing>) -> Value {
    Value::Array(s.terms().map(|(p, c)| json!({ "T": symmat_to_json(f, &p.t), "coeff": cycle_class_to_json(f, c) })).collect())
}

/// Which identity `verify` runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Product,
    Pullback,
    Natural,
    SeriesProduct,
}

impl Check {
    pub fn key(&self) -> &'static str {
        match self {
            Check::Product => "product",
            Check::Pullback => "pullback",
            Check::Natural => "natural",
            Check::SeriesProduct => "series_product",
        }
    }
}

/// Outcome of a verification: the boolean and a machine-readable report.
pub struct Verification {
    pub holds: bool,
    pub report: Value,
}

/// Runs one check described in an orbit-datum document; parameters sit under the check's key.
pub fn verify(doc: &Value, check: Check) -> Result<Verification> {
    let params = field_of(doc, check.key())?;
    match check {
        Check::Product => {
            let od = orbit_datum_from_json(doc)?;
            let f = od.field().clone();
            let t1 = symmat_from_json(&f, field_of(params, "T1")?)?;
            let t2 = symmat_from_json(&f, field_of(params, "T2")?)?;
            let phi1 = weight_from_json(&f, field_of(params, "phi1")?)?;
            let phi2 = weight_from_json(&f, field_of(params, "phi2")?)?;
            let joint = params.get("joint").map(|j| weight_from_json(&f, j)).transpose()?;
            let r = od.check_product_formula(&t1, &phi1, &t2, &phi2, joint.as_ref())?;
            Ok(Verification { holds: r.equal, report: report_json(&f, "product", &r) })
        }
        Check::Pullback => {
            let od = orbit_datum_from_json(doc)?;
            let f = od.field().clone();
            let u0 = matrix_from_json(&f, field_of(params, "U0")?)?;
            let pb = Pullback::new(&od, &u0)?;
            let t = symmat_from_json(&f, field_of(params, "T")?)?;
            let split = match params.get("split") {
                Some(s) => array(s, "split")?
                    .iter()
                    .map(|r| {
                        let p0 = weight_from_json(&f, field_of(r, "phi0")?)?;
                        let p1 = weight_from_json(&f, field_of(r, "phi1")?)?;
                        let mut sub = Vec::new();
                        for (x, w) in p1.support() {
                            sub.push((x.iter().map(|v| pb.to_sub(v)).collect::<Result<Frame>>()?, w.clone()));
                        }
                        Ok((p0, WeightFunction::new(p1.genus(), sub)?))
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => pb.split(&weight_from_json(&f, field_of(params, "phi")?)?)?,
            };
            let ambient = params.get("ambient").map(|j| weight_from_json(&f, j)).transpose()?;
            let r = pb.check_factorization(&t, &split, ambient.as_ref())?;
            let mut report = report_json(&f, "pullback", &r);
            report["complement_basis"] = matrix_to_json(&f, pb.complement_basis());
            Ok(Verification { holds: r.equal, report })
        }
        Check::Natural => {
            let space = space_from_json(doc)?;
            let f = space.field().clone();
            let group = matrices(&f, params.get("group"))?;
            let plus = matrices(&f, params.get("g_plus"))?;
            let k = matrices(&f, params.get("K"))?;
            let h = params.get("H").map(|h| matrices(&f, Some(h))).transpose()?;
            let x0 = matrix_from_json(&f, field_of(params, "x0")?)?;
            let phi = weight_from_json(&f, field_of(params, "phi")?)?;
            let s = AdelicSurrogate::new(space, &group, &plus, &k, h.as_deref(), x0, phi)?;
            let r: NaturalReport = s.check()?;
            let report = json!({
                "check": "natural",
                "equal": r.equal,
                "bijection": r.bijection,
                "orbits": r.orbits,
                "double_cosets": r.double_cosets,
                "components": s.datum().components().len(),
                "lhs": cycle_class_to_json(&f, &r.lhs),
                "rhs": cycle_class_to_json(&f, &r.rhs),
                "diff": cycle_class_to_json(&f, &r.lhs.sub(&r.rhs)),
            });
            Ok(Verification { holds: r.equal, report })
        }
        Check::SeriesProduct => {
            let od = Arc::new(orbit_datum_from_json(doc)?);
            let f = od.field().clone();
            let phi1 = weight_from_json(&f, field_of(params, "phi1")?)?;
            let phi2 = weight_from_json(&f, field_of(params, "phi2")?)?;
            let joint = params.get("joint").map(|j| weight_from_json(&f, j)).transpose()?;
            let b = q_from_json(field_of(params, "height_bound")?)?;
            let r = check_series_product(&od, &phi1, &phi2, joint.as_ref(), &b)?;
            let report = json!({
                "check": "series_product",
                "equal": r.equal,
                "level": r.lhs.cone().nu(),
                "lhs": series_json(&f, &r.lhs),
                "rhs": series_json(&f, &r.rhs),
            });
            Ok(Verification { holds: r.equal, report })
        }
    }
}

/// Pretty JSON with a trailing newline; keys come out sorted.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
