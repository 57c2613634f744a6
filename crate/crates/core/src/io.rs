//! Matrix JSON, boundary CSV, and a JSON formatter that writes every float
//! with 17 significant digits.

use std::io;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::range::BoundaryPoint;

/// On-disk matrix: `{"n": int, "re": [[f64; n]; n], "im": [[f64; n]; n]}`.
/// Unknown fields are ignored so annotated outputs re-parse as matrices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        let n = a.n();
        Self {
            n,
            re: (0..n).map(|i| a.row(i).iter().map(|z| z.re).collect()).collect(),
            im: (0..n).map(|i| a.row(i).iter().map(|z| z.im).collect()).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        if n == 0 {
            return Err(Error::InvalidMatrix("n must be positive".into()));
        }
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != n {
                return Err(Error::InvalidMatrix(format!("{name} has {} rows, expected {n}", part.len())));
            }
            if let Some(i) = part.iter().position(|r| r.len() != n) {
                return Err(Error::InvalidMatrix(format!(
                    "{name} row {i} has {} entries, expected {n}",
                    part[i].len()
                )));
            }
        }
        let data = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| C64::new(self.re[i][j], self.im[i][j]))
            .collect();
        ComplexMatrix::from_vec(n, data)
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let parsed: MatrixJson =
        serde_json::from_str(text).map_err(|e| Error::InvalidMatrix(format!("malformed matrix JSON: {e}")))?;
    parsed.to_matrix()
}

pub fn matrix_to_json(a: &ComplexMatrix) -> String {
    to_json_string(&MatrixJson::from_matrix(a))
}

/// Pretty-printing formatter with `{:.16e}` floats.
pub struct SigDigitsFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Default for SigDigitsFormatter<'_> {
    fn default() -> Self {
        Self {
            inner: PrettyFormatter::with_indent(b"  "),
        }
    }
}

impl Formatter for SigDigitsFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", format_f64(value))
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// 17 significant digits in scientific notation, valid JSON for finite input.
pub fn format_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        // JSON has no non-finite literals
        "null".to_string()
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitsFormatter::default());
    value.serialize(&mut ser).expect("serialization to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

/// Serializes a complex vector as `{"re": [...], "im": [...]}`.
pub fn serialize_complex_vec<S: Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let im: Vec<f64> = v.iter().map(|z| z.im).collect();
    let mut st = s.serialize_struct("ComplexVec", 2)?;
    st.serialize_field("re", &re)?;
    st.serialize_field("im", &im)?;
    st.end()
}

pub fn serialize_matrix<S: Serializer>(a: &ComplexMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    MatrixJson::from_matrix(a).serialize(s)
}

/// Boundary CSV: header `theta,re,im`, 17 significant digits per value.
pub fn boundary_csv(points: &[BoundaryPoint]) -> String {
    let mut out = String::from("theta,re,im\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", format_f64(p.theta), format_f64(p.z.re), format_f64(p.z.im)));
    }
    out
}
