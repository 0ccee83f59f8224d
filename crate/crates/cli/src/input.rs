use std::path::Path;

use rootcert_core::rational::{self, ScalarInput};
use rootcert_core::torus::{SplitDatum, SubtorusSubspace};
use rootcert_core::{Error, Result, RootSystem, TorusVector, Weight};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum KindInput {
    Name(String),
    Cartan { cartan: Vec<Vec<i64>> },
}

/// `{"kind": "A2" | {"cartan": [...]}, "split": [...], "subspace": [...]}`;
/// `ambient` and `split_basis` are accepted as aliases.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumInput {
    #[serde(alias = "ambient")]
    pub kind: KindInput,
    #[serde(default, alias = "split_basis")]
    pub split: Option<Vec<Vec<ScalarInput>>>,
    #[serde(default)]
    pub subspace: Option<Vec<Vec<ScalarInput>>>,
}

pub struct Datum {
    pub split: SplitDatum,
    pub subspace: Option<SubtorusSubspace>,
}

impl Datum {
    pub fn system(&self) -> &RootSystem {
        self.split.ambient()
    }

    pub fn require_subspace(&self) -> Result<&SubtorusSubspace> {
        self.subspace.as_ref().ok_or_else(|| Error::Parse("input has no \"subspace\" field".into()))
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)
            .map_err(|e| Error::Parse(format!("reading stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("reading {}: {e}", path.display())))
}

fn vectors(rows: &[Vec<ScalarInput>]) -> Result<(Vec<TorusVector>, bool)> {
    let mut approx = false;
    let mut out = Vec::new();
    for row in rows {
        let mut coords = Vec::new();
        for x in row {
            let (v, snapped) = x.resolve()?;
            approx |= snapped;
            coords.push(v);
        }
        out.push(TorusVector::new(coords));
    }
    Ok((out, approx))
}

pub fn parse_datum(text: &str) -> Result<Datum> {
    let input: DatumInput = serde_json::from_str(text).map_err(|e| Error::Parse(format!("datum JSON: {e}")))?;
    let system = match input.kind {
        KindInput::Name(name) => RootSystem::from_kind(&name)?,
        KindInput::Cartan { cartan } => RootSystem::from_cartan(cartan)?,
    };
    let split = match input.split {
        Some(rows) => SplitDatum::new(system, vectors(&rows)?.0)?,
        None => SplitDatum::split(system),
    };
    let subspace = match input.subspace {
        Some(rows) => {
            let (basis, approximate) = vectors(&rows)?;
            let mut s = SubtorusSubspace::new(basis)?;
            s.approximate = approximate;
            Some(s)
        }
        None => None,
    };
    Ok(Datum { split, subspace })
}

pub fn load_datum(path: &Path) -> Result<Datum> {
    parse_datum(&read_text(path)?)
}

pub fn weight(s: &str) -> Result<Weight> {
    Ok(Weight::new(rational::parse_list(s)?))
}

pub fn torus_vector(s: &str) -> Result<TorusVector> {
    Ok(TorusVector::new(rational::parse_list(s)?))
}

/// Float matrix from JSON rows; integers, decimals, and "p/q" strings.
pub fn matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<ScalarInput>> =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("matrix JSON: {e}")))?;
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|x| match x {
                    ScalarInput::Float(f) => Ok(*f),
                    other => other.resolve().map(|(v, _)| rational::to_f64(&v)),
                })
                .collect()
        })
        .collect()
}
