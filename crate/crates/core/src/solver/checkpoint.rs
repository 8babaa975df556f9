//! Flat binary checkpoints: a versioned header with the run parameters
//! followed by the raw coefficient arrays.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

use super::state::{VelocityState, VerticalProfile};

const MAGIC: &[u8; 4] = b"NSLB";
const VERSION: u32 = 1;

/// Everything needed to resume a run.
#[derive(Debug, Clone)]
pub struct Checkpoint {
    pub grid: Grid,
    pub eps: f64,
    pub a: f64,
    pub lambda: f64,
    pub n_radius: f64,
    pub t: f64,
    pub theta: f64,
    pub state: VelocityState,
}

fn write_complex_slice<W: Write>(out: &mut W, data: &[Complex64]) -> Result<()> {
    for c in data {
        out.write_all(&c.re.to_le_bytes())?;
        out.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_complex_vec<R: Read>(input: &mut R, len: usize) -> Result<Vec<Complex64>> {
    let mut buf = [0u8; 16];
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        input.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[0..8].try_into().unwrap());
        let im = f64::from_le_bytes(buf[8..16].try_into().unwrap());
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

impl Checkpoint {
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&VERSION.to_le_bytes())?;
        out.write_all(&(self.grid.n_h() as u64).to_le_bytes())?;
        out.write_all(&(self.grid.n_v() as u64).to_le_bytes())?;
        for v in [
            self.grid.l_vert(),
            self.eps,
            self.a,
            self.lambda,
            self.n_radius,
            self.t,
            self.theta,
        ] {
            out.write_all(&v.to_le_bytes())?;
        }
        for f in [&self.state.w_h[0], &self.state.w_h[1], &self.state.w3] {
            write_complex_slice(out, f.coeffs().as_slice().expect("standard layout"))?;
        }
        for p in &self.state.vbar_h {
            write_complex_slice(out, p.coeffs())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> Result<Checkpoint> {
        let mut magic = [0u8; 4];
        input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::BadCheckpoint("magic bytes mismatch".into()));
        }
        let mut u32buf = [0u8; 4];
        input.read_exact(&mut u32buf)?;
        let version = u32::from_le_bytes(u32buf);
        if version != VERSION {
            return Err(Error::BadCheckpoint(format!(
                "unsupported version {version}"
            )));
        }
        let mut u64buf = [0u8; 8];
        input.read_exact(&mut u64buf)?;
        let n_h = u64::from_le_bytes(u64buf) as usize;
        input.read_exact(&mut u64buf)?;
        let n_v = u64::from_le_bytes(u64buf) as usize;
        let mut f64s = [0.0f64; 7];
        for v in f64s.iter_mut() {
            input.read_exact(&mut u64buf)?;
            *v = f64::from_le_bytes(u64buf);
        }
        let [l_vert, eps, a, lambda, n_radius, t, theta] = f64s;
        let grid = Grid::new(n_h, n_v, l_vert)?;
        let count = grid.mode_count();
        let mut fields = Vec::with_capacity(3);
        for _ in 0..3 {
            let data = read_complex_vec(input, count)?;
            let arr = ndarray::Array3::from_shape_vec(grid.shape(), data)
                .map_err(|e| Error::BadCheckpoint(e.to_string()))?;
            fields.push(SpectralField::from_coeffs(&grid, arr)?);
        }
        let mut profiles = Vec::with_capacity(2);
        for _ in 0..2 {
            let data = read_complex_vec(input, n_v)?;
            let mut p = VerticalProfile::zeros(&grid);
            p.coeffs_mut().copy_from_slice(&data);
            profiles.push(p);
        }
        let state = VelocityState {
            w_h: [fields[0].clone(), fields[1].clone()],
            w3: fields[2].clone(),
            vbar_h: [profiles[0].clone(), profiles[1].clone()],
            t,
        };
        Ok(Checkpoint {
            grid,
            eps,
            a,
            lambda,
            n_radius,
            t,
            theta,
            state,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_to(&mut file)
    }

    pub fn load(path: &Path) -> Result<Checkpoint> {
        let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
        Self::read_from(&mut file)
    }
}
