//! Little-endian binary dumps of sampled arrays:
//! magic, kind tag, axis count, (points, half-width) per axis, then
//! interleaved real and imaginary parts in row-major order.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use modcomp_core::grid::UniformGrid;
use modcomp_core::signal::SampledSignal;
use modcomp_core::stft::TfMatrix;
use modcomp_core::symbol::SymbolStft;
use modcomp_core::Complex64;

use crate::error::RunError;

pub const MAGIC: &[u8; 8] = b"MODCOMP1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DumpKind {
    Signal,
    TfMatrix,
    SymbolStft,
}

impl DumpKind {
    fn tag(self) -> u64 {
        match self {
            DumpKind::Signal => 1,
            DumpKind::TfMatrix => 2,
            DumpKind::SymbolStft => 3,
        }
    }

    fn from_tag(tag: u64) -> Option<Self> {
        match tag {
            1 => Some(DumpKind::Signal),
            2 => Some(DumpKind::TfMatrix),
            3 => Some(DumpKind::SymbolStft),
            _ => None,
        }
    }
}

impl fmt::Display for DumpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DumpKind::Signal => "sampled signal",
            DumpKind::TfMatrix => "time-frequency matrix",
            DumpKind::SymbolStft => "symbol stft",
        })
    }
}

/// Axis stored in a dump; `half_width` is the grid's half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DumpAxis {
    pub points: u64,
    pub half_width: f64,
}

impl From<UniformGrid> for DumpAxis {
    fn from(g: UniformGrid) -> Self {
        Self { points: g.len() as u64, half_width: g.half_width() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dump {
    pub kind: DumpKind,
    pub axes: Vec<DumpAxis>,
    pub values: Vec<Complex64>,
}

impl Dump {
    pub fn from_signal(s: &SampledSignal) -> Self {
        Self { kind: DumpKind::Signal, axes: vec![s.axis.into(); s.d], values: s.values.clone() }
    }

    pub fn from_tf_matrix(v: &TfMatrix) -> Self {
        Self { kind: DumpKind::TfMatrix, axes: vec![v.x.into(), v.xi.into()], values: v.values.clone() }
    }

    pub fn from_symbol_stft(v: &SymbolStft) -> Self {
        let zeta = v.grid.zeta();
        Self {
            kind: DumpKind::SymbolStft,
            axes: vec![v.grid.z1.into(), v.grid.z2.into(), zeta.into(), zeta.into()],
            values: v.values.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), RunError> {
        let mut out = BufWriter::new(File::create(path)?);
        out.write_all(MAGIC)?;
        out.write_all(&self.kind.tag().to_le_bytes())?;
        out.write_all(&(self.axes.len() as u64).to_le_bytes())?;
        for a in &self.axes {
            out.write_all(&a.points.to_le_bytes())?;
            out.write_all(&a.half_width.to_le_bytes())?;
        }
        for v in &self.values {
            out.write_all(&v.re.to_le_bytes())?;
            out.write_all(&v.im.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, RunError> {
        let mut input = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic).map_err(|_| RunError::Dump("file shorter than the header".into()))?;
        if &magic != MAGIC {
            return Err(RunError::Dump("not a modcomp dump (bad magic)".into()));
        }
        let tag = read_u64(&mut input)?;
        let kind = DumpKind::from_tag(tag).ok_or_else(|| RunError::Dump(format!("unknown kind tag {tag}")))?;
        let count = read_u64(&mut input)?;
        if !(1..=4).contains(&count) {
            return Err(RunError::Dump(format!("implausible axis count {count}")));
        }
        let mut axes = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let points = read_u64(&mut input)?;
            let half_width = f64::from_le_bytes(read_bytes(&mut input)?);
            axes.push(DumpAxis { points, half_width });
        }
        let total = axes
            .iter()
            .try_fold(1u64, |acc, a| acc.checked_mul(a.points))
            .ok_or_else(|| RunError::Dump("axis sizes overflow".into()))?;
        let mut values = Vec::with_capacity(total.min(1 << 24) as usize);
        for _ in 0..total {
            let re = f64::from_le_bytes(read_bytes(&mut input)?);
            let im = f64::from_le_bytes(read_bytes(&mut input)?);
            values.push(Complex64::new(re, im));
        }
        let mut rest = [0u8; 1];
        if input.read(&mut rest)? != 0 {
            return Err(RunError::Dump("trailing bytes after payload".into()));
        }
        Ok(Self { kind, axes, values })
    }

    /// Headers and summary statistics for the `dump` subcommand.
    pub fn describe(&self) -> String {
        let mut s = format!("kind: {}\naxes: {}\n", self.kind, self.axes.len());
        for (i, a) in self.axes.iter().enumerate() {
            s.push_str(&format!("  axis {i}: points = {}, half_width = {}\n", a.points, a.half_width));
        }
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let energy: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        s.push_str(&format!("values: {}\nmax |v|: {}\nsum |v|^2: {}\n", self.values.len(), max, energy));
        s
    }
}

fn read_bytes<R: Read>(r: &mut R) -> Result<[u8; 8], RunError> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| RunError::Dump("truncated file".into()))?;
    Ok(b)
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64, RunError> {
    Ok(u64::from_le_bytes(read_bytes(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let axis = UniformGrid::new(2.0, 8).unwrap();
        let s = modcomp_core::signal::sample(|t| Complex64::new(t, -t * t), axis);
        let d = Dump::from_signal(&s);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.bin");
        d.write(&p).unwrap();
        assert_eq!(Dump::read(&p).unwrap(), d);
        assert!(d.describe().contains("points = 8"));
    }

    #[test]
    fn rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.bin");
        std::fs::write(&p, b"hello").unwrap();
        assert!(matches!(Dump::read(&p), Err(RunError::Dump(_))));
        std::fs::write(&p, b"MODCOMP1\x09\0\0\0\0\0\0\0").unwrap();
        assert!(Dump::read(&p).unwrap_err().to_string().contains("kind tag"));
    }
}
