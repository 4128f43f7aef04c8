//! JSON system files.
//!
//! A system file is a JSON object tagged by `"kind"`:
//!
//! ```json
//! {"kind": "dense", "A": [[...]], "B": [[...]], "Q": [[...]], "R": [[...]]}
//! {"kind": "circulant", "A": {"first_row": [...]}, "B": {...}, "Q": {...}, "R": {...}}
//! {"kind": "second_order", "A1": [[...]], "A2": ..., "B0": ..., "Q0": ..., "Q2": ..., "R0": ...}
//! ```
//!
//! Dense files may carry `"neighborhoods"`, a list of 0-based state index
//! lists, one per input. Any file may carry `"model": {"name": ..., "params":
//! {...}}` naming the constructor that produced it. Floats are written with 17
//! significant digits.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::decentral::NeighborhoodMap;
use crate::error::{Error, Result};
use crate::lqr::LqrProblem;
use crate::secondorder::SecondOrderSystem;
use crate::spectral::CirculantSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelTag {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ModelTag {
    pub fn new(name: &str, params: &[(&str, f64)]) -> Self {
        ModelTag {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    pub fn param(&self, key: &str) -> Result<f64> {
        self.params
            .get(key)
            .copied()
            .ok_or_else(|| Error::Input(format!("model '{}' is missing parameter '{key}'", self.name)))
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculantQuad {
    pub A: CirculantSpec,
    pub B: CirculantSpec,
    pub Q: CirculantSpec,
    pub R: CirculantSpec,
}

impl CirculantQuad {
    pub fn n(&self) -> Result<usize> {
        let n = self.A.n();
        if [&self.B, &self.Q, &self.R].iter().any(|s| s.n() != n) {
            return Err(Error::Dimension("circulant first rows differ in length".into()));
        }
        Ok(n)
    }

    pub fn to_problem(&self) -> Result<LqrProblem> {
        self.n()?;
        LqrProblem::new(
            self.A.materialize(),
            self.B.materialize(),
            self.Q.materialize(),
            self.R.materialize(),
        )
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemFile {
    Dense {
        #[serde(flatten)]
        problem: LqrProblem,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        neighborhoods: Option<NeighborhoodMap>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<ModelTag>,
    },
    Circulant {
        #[serde(flatten)]
        quad: CirculantQuad,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<ModelTag>,
    },
    SecondOrder {
        #[serde(flatten)]
        system: SecondOrderSystem,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        model: Option<ModelTag>,
    },
}

impl SystemFile {
    pub fn dense(problem: LqrProblem) -> Self {
        SystemFile::Dense {
            problem,
            neighborhoods: None,
            model: None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SystemFile::Dense { .. } => "dense",
            SystemFile::Circulant { .. } => "circulant",
            SystemFile::SecondOrder { .. } => "second_order",
        }
    }

    pub fn model(&self) -> Option<&ModelTag> {
        match self {
            SystemFile::Dense { model, .. }
            | SystemFile::Circulant { model, .. }
            | SystemFile::SecondOrder { model, .. } => model.as_ref(),
        }
    }

    pub fn with_model(mut self, tag: ModelTag) -> Self {
        match &mut self {
            SystemFile::Dense { model, .. }
            | SystemFile::Circulant { model, .. }
            | SystemFile::SecondOrder { model, .. } => *model = Some(tag),
        }
        self
    }

    /// The (possibly augmented) state-space LQR problem.
    pub fn to_problem(&self) -> Result<LqrProblem> {
        match self {
            SystemFile::Dense { problem, .. } => Ok(problem.clone()),
            SystemFile::Circulant { quad, .. } => quad.to_problem(),
            SystemFile::SecondOrder { system, .. } => crate::secondorder::augment(system),
        }
    }

    /// The subcontroller neighborhoods implied by the file.
    pub fn neighborhoods(&self) -> Result<NeighborhoodMap> {
        match self {
            SystemFile::Dense {
                problem,
                neighborhoods,
                ..
            } => match neighborhoods {
                Some(map) => Ok(map.clone()),
                None if problem.n_inputs() == problem.n_states() => {
                    Ok(NeighborhoodMap::diagonal(problem.n_states()))
                }
                None => Err(Error::Input(
                    "non-square B needs explicit \"neighborhoods\" in the system file".into(),
                )),
            },
            SystemFile::Circulant { quad, .. } => Ok(NeighborhoodMap::diagonal(quad.n()?)),
            SystemFile::SecondOrder { system, .. } => Ok(NeighborhoodMap::second_order(system.n())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SystemFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("system file: {e}")))?;
        if let SystemFile::SecondOrder { system, .. } = &file {
            system.validate()?;
        }
        if let SystemFile::Circulant { quad, .. } = &file {
            quad.n()?;
        }
        Ok(file)
    }

    pub fn to_json(&self) -> String {
        to_json_17(self)
    }
}

/// Writes every float with 17 significant digits.
#[derive(Default)]
pub struct SeventeenDigits {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
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

/// `{:.16e}`: 17 significant digits, round-trips every finite `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        // JSON has no representation for these; emitters avoid them.
        "null".to_string()
    }
}

pub fn to_json_17<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits::default());
    value.serialize(&mut ser).expect("in-memory JSON serialization");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_file_round_trip() {
        let text = r#"{"kind":"dense","A":[[1,2],[-3,4]],"B":[[1,0],[0,1]],
                       "Q":[[3,0],[0,8]],"R":[[1,0],[0,0.16666666666666666]]}"#;
        let file = SystemFile::from_json(text).unwrap();
        assert_eq!(file.kind(), "dense");
        let again = SystemFile::from_json(&file.to_json()).unwrap();
        assert_eq!(again, file);
        assert_eq!(file.neighborhoods().unwrap(), NeighborhoodMap::diagonal(2));
    }

    #[test]
    fn circulant_file_uses_first_rows() {
        let text = r#"{"kind":"circulant","A":{"first_row":[-2,1,0,1]},"B":{"first_row":[1,0,0,0]},
                       "Q":{"first_row":[5,-2,0,-2]},"R":{"first_row":[1,0,0,0]},
                       "model":{"name":"diffusion","params":{"n":4,"delta":1}}}"#;
        let file = SystemFile::from_json(text).unwrap();
        let prob = file.to_problem().unwrap();
        assert_eq!(prob.q()[(1, 0)], -2.0);
        assert_eq!(file.model().unwrap().param("delta").unwrap(), 1.0);
        let json = file.to_json();
        assert!(json.contains("\"first_row\""));
        assert_eq!(SystemFile::from_json(&json).unwrap(), file);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(SystemFile::from_json(r#"{"kind":"dense","A":[[1]]}"#).is_err());
        assert!(SystemFile::from_json(r#"{"kind":"bogus"}"#).is_err());
        let bad_len = r#"{"kind":"circulant","A":{"first_row":[1,0]},"B":{"first_row":[1]},
                         "Q":{"first_row":[1,0]},"R":{"first_row":[1,0]}}"#;
        assert!(SystemFile::from_json(bad_len).is_err());
        let indefinite = r#"{"kind":"dense","A":[[1]],"B":[[1]],"Q":[[-1]],"R":[[1]]}"#;
        assert!(SystemFile::from_json(indefinite).is_err());
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(-3.0), "-3.0000000000000000e0");
        let v: f64 = fmt_f64(1.0 / 3.0).parse().unwrap();
        assert_eq!(v, 1.0 / 3.0);
        let json = to_json_17(&vec![2.5f64]);
        assert!(json.contains("2.5000000000000000e0"), "{json}");
    }
}
