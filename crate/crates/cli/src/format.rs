//! Matrix and channel files.
//!
//! A matrix file is `{"rows": r, "cols": c, "data": [[re, im], ...]}` with
//! row-major data, or a nested array of reals such as `[[0, 1], [1, 0]]`.
//! A channel file is `{"dim_in": n, "dim_out": m, "kraus": [matrix, ...]}`
//! with an optional `"subnormalized": true`.

use std::fs;
use std::io;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use oaqec_core::channels::Channel;
use oaqec_core::ComplexMatrix;
use serde::ser::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

fn read_json(path: &Path) -> Result<Value> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: malformed JSON", path.display()))
}

pub fn parse_matrix_file(path: &Path) -> Result<ComplexMatrix> {
    matrix_from_value(&read_json(path)?).with_context(|| format!("{}", path.display()))
}

pub fn parse_channel_file(path: &Path) -> Result<Channel> {
    channel_from_value(&read_json(path)?).with_context(|| format!("{}", path.display()))
}

fn finite(v: &Value, at: &str) -> Result<f64> {
    let x = v
        .as_f64()
        .ok_or_else(|| anyhow!("{at}: expected a number, found {v}"))?;
    if !x.is_finite() {
        bail!("{at}: non-finite entry");
    }
    Ok(x)
}

fn size(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    let v = obj
        .get(key)
        .ok_or_else(|| anyhow!("missing field \"{key}\""))?;
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| anyhow!("field \"{key}\" must be a nonnegative integer, found {v}"))
}

fn only_keys(obj: &Map<String, Value>, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => bail!("unknown field \"{k}\""),
        None => Ok(()),
    }
}

pub fn matrix_from_value(v: &Value) -> Result<ComplexMatrix> {
    match v {
        Value::Object(obj) => {
            only_keys(obj, &["rows", "cols", "data"])?;
            let (rows, cols) = (size(obj, "rows")?, size(obj, "cols")?);
            let data = obj
                .get("data")
                .and_then(Value::as_array)
                .ok_or_else(|| anyhow!("field \"data\" must be an array"))?;
            if data.len() != rows * cols {
                bail!(
                    "data has {} entries, expected rows*cols = {}",
                    data.len(),
                    rows * cols
                );
            }
            let mut entries = Vec::with_capacity(data.len());
            for (k, z) in data.iter().enumerate() {
                let at = format!("data entry {k}");
                match z.as_array().map(Vec::as_slice) {
                    Some([re, im]) => {
                        entries.push(Complex64::new(finite(re, &at)?, finite(im, &at)?))
                    }
                    _ => bail!("{at}: expected [re, im], found {z}"),
                }
            }
            Ok(ComplexMatrix::new(rows, cols, entries)?)
        }
        Value::Array(rows) => {
            if rows.is_empty() {
                bail!("empty matrix");
            }
            let mut entries = Vec::new();
            let mut cols = None;
            for (i, row) in rows.iter().enumerate() {
                let row = row
                    .as_array()
                    .ok_or_else(|| anyhow!("row {i}: expected an array of reals"))?;
                if *cols.get_or_insert(row.len()) != row.len() || row.is_empty() {
                    bail!(
                        "row {i}: has {} entries, expected {}",
                        row.len(),
                        cols.unwrap_or(0)
                    );
                }
                for (j, x) in row.iter().enumerate() {
                    entries.push(Complex64::new(
                        finite(x, &format!("entry ({i}, {j})"))?,
                        0.0,
                    ));
                }
            }
            Ok(ComplexMatrix::new(rows.len(), cols.unwrap_or(0), entries)?)
        }
        other => bail!("expected a matrix object or nested array, found {other}"),
    }
}

pub fn channel_from_value(v: &Value) -> Result<Channel> {
    let obj = v
        .as_object()
        .ok_or_else(|| anyhow!("channel file must be a JSON object"))?;
    only_keys(obj, &["dim_in", "dim_out", "kraus", "subnormalized"])?;
    let (dim_in, dim_out) = (size(obj, "dim_in")?, size(obj, "dim_out")?);
    let sub = match obj.get("subnormalized") {
        None => false,
        Some(Value::Bool(b)) => *b,
        Some(other) => bail!("field \"subnormalized\" must be a boolean, found {other}"),
    };
    let kraus = obj
        .get("kraus")
        .and_then(Value::as_array)
        .ok_or_else(|| anyhow!("field \"kraus\" must be an array"))?;
    if kraus.is_empty() {
        bail!("field \"kraus\" is empty");
    }
    let mut elements = Vec::with_capacity(kraus.len());
    for (a, k) in kraus.iter().enumerate() {
        let m = matrix_from_value(k).with_context(|| format!("kraus[{a}]"))?;
        if (m.rows(), m.cols()) != (dim_out, dim_in) {
            bail!(
                "kraus[{a}]: shape {}x{}, expected dim_out x dim_in = {dim_out}x{dim_in}",
                m.rows(),
                m.cols()
            );
        }
        elements.push(m);
    }
    Ok(if sub {
        Channel::subnormalized(elements)?
    } else {
        Channel::new(elements)?
    })
}

/// Matrix in file format.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: m.data().iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Channel in file format.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub subnormalized: bool,
}

impl From<&Channel> for ChannelJson {
    fn from(ch: &Channel) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus().iter().map(MatrixJson::from).collect(),
            subnormalized: ch.is_subnormalized(),
        }
    }
}

/// Pretty JSON with every float written as `d.dddddddddddddddde±x` (17 significant digits).
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, FixedFloats(PrettyFormatter::new()));
    value
        .serialize(&mut ser)
        .expect("report types always serialize");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn object_and_shorthand_forms() {
        let id = matrix_from_value(&json!({"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[1,0]]}))
            .unwrap();
        assert_eq!(id, ComplexMatrix::identity(2));
        let x = matrix_from_value(&json!([[0, 1], [1, 0]])).unwrap();
        assert_eq!(x, oaqec_core::numerics::gates::pauli_x());
    }

    #[test]
    fn wrong_length_is_rejected() {
        let err =
            matrix_from_value(&json!({"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0]]})).unwrap_err();
        assert!(err.to_string().contains("3 entries"), "{err}");
    }

    #[test]
    fn first_bad_entry_is_named() {
        let err =
            matrix_from_value(&json!({"rows":1,"cols":3,"data":[[1,0],[0],[1]]})).unwrap_err();
        assert!(err.to_string().contains("data entry 1"), "{err}");
        let err = matrix_from_value(&json!([[1, 0], [0, "a"]])).unwrap_err();
        assert!(err.to_string().contains("(1, 1)"), "{err}");
    }

    #[test]
    fn ragged_shorthand_is_rejected() {
        assert!(matrix_from_value(&json!([[1, 0], [0]])).is_err());
    }

    #[test]
    fn channel_tp_check() {
        let id = json!([[1, 0], [0, 1]]);
        let ch = channel_from_value(&json!({"dim_in":2,"dim_out":2,"kraus":[id]})).unwrap();
        assert!(ch.same_map(&Channel::identity(2), 1e-14));
        let err =
            channel_from_value(&json!({"dim_in":2,"dim_out":2,"kraus":[id, id]})).unwrap_err();
        assert!(format!("{err:#}").contains("trace preserving"), "{err:#}");
        let half = json!([[0.5, 0], [0, 0.5]]);
        let sub = channel_from_value(
            &json!({"dim_in":2,"dim_out":2,"kraus":[half],"subnormalized":true}),
        );
        assert!(sub.unwrap().is_subnormalized());
    }

    #[test]
    fn phase_flip_file() {
        let a = 0.75f64.sqrt();
        let b = 0.25f64.sqrt();
        let v = json!({"dim_in":2,"dim_out":2,"kraus":[[[a,0],[0,a]],[[b,0],[0,-b]]]});
        let ch = channel_from_value(&v).unwrap();
        assert_eq!(ch.kraus().len(), 2);
        assert!(ch.tp_defect() < 1e-12);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let v = json!({"dim_in":2,"dim_out":3,"kraus":[[[1,0],[0,1]]]});
        assert!(channel_from_value(&v).is_err());
    }

    #[test]
    fn floats_keep_seventeen_digits() {
        let s = to_json(&[0.1f64, -2.5e-300, 0.0]);
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, -2.5e-300, 0.0]);
    }

    #[test]
    fn matrix_round_trip_is_exact() {
        let m = ComplexMatrix::new(
            1,
            2,
            vec![Complex64::new(1.0 / 3.0, -0.7), Complex64::new(1e-17, 2.0)],
        )
        .unwrap();
        let text = to_json(&MatrixJson::from(&m));
        let back = matrix_from_value(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, m);
    }
}
