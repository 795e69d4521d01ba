//! Binary snapshot files.
//!
//! Layout (little-endian): `"MHD2"`, version `u32 = 1`, `n: u32`, `time: f64`,
//! `field_count: u32`, then per field `name_len: u8`, ASCII name and `n·n`
//! `f64` samples (y outer, x inner).

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::solver::State;
use crate::spectral::{FieldError, Grid, ScalarField, VectorField2};

pub const MAGIC: [u8; 4] = *b"MHD2";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic bytes {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("field name {0:?} is not ASCII or longer than 255 bytes")]
    BadName(String),
    #[error("field {0:?} is on a {1}-grid, snapshot is {2}")]
    GridMismatch(String, usize, usize),
    #[error("invalid field: {0}")]
    Field(#[from] FieldError),
    #[error("missing field {0:?}")]
    MissingField(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub grid: Grid,
    pub fields: Vec<(String, ScalarField)>,
}

impl Snapshot {
    pub fn new(time: f64, grid: Grid) -> Self {
        Self {
            time,
            grid,
            fields: Vec::new(),
        }
    }

    pub fn with_field(mut self, name: impl Into<String>, field: ScalarField) -> Self {
        self.fields.push((name.into(), field));
        self
    }

    pub fn field(&self, name: &str) -> Option<&ScalarField> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn require(&self, name: &str) -> Result<&ScalarField, SnapshotError> {
        self.field(name)
            .ok_or_else(|| SnapshotError::MissingField(name.to_string()))
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), SnapshotError> {
        let n = self.grid.n();
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(n as u32).to_le_bytes())?;
        w.write_all(&self.time.to_le_bytes())?;
        w.write_all(&(self.fields.len() as u32).to_le_bytes())?;
        for (name, field) in &self.fields {
            if !name.is_ascii() || name.len() > u8::MAX as usize {
                return Err(SnapshotError::BadName(name.clone()));
            }
            if field.grid().n() != n {
                return Err(SnapshotError::GridMismatch(name.clone(), field.grid().n(), n));
            }
            w.write_all(&[name.len() as u8])?;
            w.write_all(name.as_bytes())?;
            let mut buf = Vec::with_capacity(8 * field.values().len());
            for v in field.values() {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, SnapshotError> {
        let mut out = Vec::new();
        self.write_to(&mut out)?;
        Ok(out)
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, SnapshotError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if magic != MAGIC {
            return Err(SnapshotError::BadMagic(magic));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(SnapshotError::Version(version));
        }
        let n = read_u32(&mut r)? as usize;
        let grid = Grid::new(n)?;
        let mut t = [0u8; 8];
        r.read_exact(&mut t)?;
        let time = f64::from_le_bytes(t);
        let count = read_u32(&mut r)?;
        let mut fields = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let mut len = [0u8; 1];
            r.read_exact(&mut len)?;
            let mut name = vec![0u8; len[0] as usize];
            r.read_exact(&mut name)?;
            let name = String::from_utf8(name)
                .ok()
                .filter(|s| s.is_ascii())
                .ok_or_else(|| SnapshotError::BadName("<non-ascii>".into()))?;
            let mut raw = vec![0u8; 8 * grid.len()];
            r.read_exact(&mut raw)?;
            let values = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            fields.push((name, ScalarField::new(grid, values)?));
        }
        Ok(Self { time, grid, fields })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), SnapshotError> {
        let file = fs::File::create(path)?;
        let mut w = io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SnapshotError> {
        let file = fs::File::open(path)?;
        Self::read_from(io::BufReader::new(file))
    }

    /// Fields `rho`, `ux`, `uy`, `Bx`, `By`.
    pub fn of_state(state: &State) -> Self {
        Self::new(state.t, state.rho.grid())
            .with_field("rho", state.rho.clone())
            .with_field("ux", state.u.x().clone())
            .with_field("uy", state.u.y().clone())
            .with_field("Bx", state.b.x().clone())
            .with_field("By", state.b.y().clone())
    }

    /// Inverse of [`Snapshot::of_state`]. Extra fields are ignored.
    pub fn to_state(&self) -> Result<State, SnapshotError> {
        let pair = |a: &str, b: &str| -> Result<VectorField2, SnapshotError> {
            Ok(VectorField2::new(self.require(a)?.clone(), self.require(b)?.clone())?)
        };
        Ok(State {
            t: self.time,
            rho: self.require("rho")?.clone(),
            u: pair("ux", "uy")?,
            b: pair("Bx", "By")?,
        })
    }
}

fn read_u32<R: Read>(r: &mut R) -> io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn state_round_trip() {
        let g = Grid::new(16).unwrap();
        let s = crate::solver::Scenario::new(crate::solver::ScenarioKind::RandomSmooth)
            .initial_state(g)
            .unwrap();
        let back = Snapshot::read_from(&Snapshot::of_state(&s).to_bytes().unwrap()[..]).unwrap();
        assert_eq!(back.to_state().unwrap(), s);
        assert!(matches!(
            Snapshot::new(0.0, g).to_state(),
            Err(SnapshotError::MissingField(_))
        ));
    }

    #[test]
    fn header_bytes_are_exact() {
        let g = Grid::new(16).unwrap();
        let snap = Snapshot::new(0.25, g).with_field("rho", ScalarField::constant(g, 2.0));
        let bytes = snap.to_bytes().unwrap();
        assert_eq!(&bytes[0..4], &[0x4D, 0x48, 0x44, 0x32]);
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &16u32.to_le_bytes());
        assert_eq!(&bytes[12..20], &0.25f64.to_le_bytes());
        assert_eq!(&bytes[20..24], &1u32.to_le_bytes());
        assert_eq!(bytes[24], 3);
        assert_eq!(&bytes[25..28], b"rho");
        assert_eq!(&bytes[28..36], &2.0f64.to_le_bytes());
        assert_eq!(bytes.len(), 28 + 8 * 256);
    }

    #[test]
    fn rejects_bad_magic() {
        let err = Snapshot::read_from(&b"MHD3\x01\0\0\0"[..]).unwrap_err();
        assert!(matches!(err, SnapshotError::BadMagic(_)));
    }

    #[test]
    fn rejects_truncated() {
        let g = Grid::new(16).unwrap();
        let bytes = Snapshot::new(0.0, g)
            .with_field("ux", ScalarField::zeros(g))
            .to_bytes()
            .unwrap();
        assert!(Snapshot::read_from(&bytes[..bytes.len() - 3]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(time in -1e3f64..1e3, seed in 0u64..1000, count in 0usize..4) {
            let g = Grid::new(16).unwrap();
            let mut snap = Snapshot::new(time, g);
            for k in 0..count {
                let f = crate::random::band_limited(g, 6.0, 0.0, &mut crate::random::rng(seed + k as u64));
                snap = snap.with_field(format!("band_q{k}"), f);
            }
            let back = Snapshot::read_from(&snap.to_bytes().unwrap()[..]).unwrap();
            prop_assert_eq!(back, snap);
        }
    }
}
