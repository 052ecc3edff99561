//! Binary container for [`Field3`]: magic `LERF`, a `u32` version, the three
//! half-widths as `f64`, the three counts as `u32`, then `(re, im)` pairs in
//! row-major `(r, s, t)` order. Everything is little-endian.

use super::grid::{Field3, GridSpec, C64};
use crate::error::{LerayError, Result};
use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"LERF";
pub const VERSION: u32 = 1;

pub fn write_field<W: Write>(mut w: W, f: &Field3) -> Result<()> {
    let g = f.grid();
    w.write_all(MAGIC)?;
    w.write_u32::<LittleEndian>(VERSION)?;
    for hw in g.half_widths() {
        w.write_f64::<LittleEndian>(hw)?;
    }
    for n in g.counts() {
        let n = u32::try_from(n).map_err(|_| LerayError::Format(format!("axis count {n} exceeds u32")))?;
        w.write_u32::<LittleEndian>(n)?;
    }
    for z in f.data() {
        w.write_f64::<LittleEndian>(z.re)?;
        w.write_f64::<LittleEndian>(z.im)?;
    }
    Ok(())
}

pub fn read_field<R: Read>(mut r: R) -> Result<Field3> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LerayError::Format("bad magic".into()));
    }
    let version = r.read_u32::<LittleEndian>()?;
    if version != VERSION {
        return Err(LerayError::Format(format!("unsupported version {version}")));
    }
    let mut hw = [0.0; 3];
    for v in &mut hw {
        *v = r.read_f64::<LittleEndian>()?;
    }
    let mut counts = [0usize; 3];
    for c in &mut counts {
        *c = r.read_u32::<LittleEndian>()? as usize;
    }
    let grid = GridSpec::new(hw, counts)?;
    let mut data = Vec::with_capacity(grid.len());
    for _ in 0..grid.len() {
        let re = r.read_f64::<LittleEndian>()?;
        let im = r.read_f64::<LittleEndian>()?;
        data.push(C64::new(re, im));
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(LerayError::Format("trailing bytes after field data".into()));
    }
    Field3::from_data(grid, data)
}

pub fn save_field(path: &Path, f: &Field3) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_field(&mut w, f)?;
    w.flush()?;
    Ok(())
}

pub fn load_field(path: &Path) -> Result<Field3> {
    let file = std::fs::File::open(path)?;
    read_field(std::io::BufReader::new(file))
}
