//! Invertible 3x3 complex matrices used to pair points with dual coordinates.

use crate::error::{LerayError, Result};
use crate::model_surface::C64;
use serde::{Deserialize, Serialize};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Relative determinant threshold for accepting a matrix as invertible.
pub const INVERTIBILITY_REL_TOL: f64 = 1e-12;

/// `M` in row-major layout
/// `[[c1, a1, a2], [b1, m11, m12], [b2, m21, m22]]`, so that
/// `Phi_M(z, w) = (1, w1, w2) M (1, z1, z2)^T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProjMatrixJson", into = "ProjMatrixJson")]
pub struct ProjMatrix {
    rows: [[C64; 3]; 3],
}

/// Conditioning summary computed at construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionReport {
    pub det: C64,
    /// `||M||_F ||M^{-1}||_F`.
    pub condition: f64,
}

impl ProjMatrix {
    pub fn from_rows(rows: [[C64; 3]; 3]) -> Result<Self> {
        if rows.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(LerayError::Validation("matrix entries must be finite".into()));
        }
        let m = Self { rows };
        let scale = rows.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
        let det = m.det();
        if scale == 0.0 || det.norm() <= INVERTIBILITY_REL_TOL * scale.powi(3) {
            return Err(LerayError::SingularSystem { det: det.norm(), threshold: INVERTIBILITY_REL_TOL * scale.powi(3) });
        }
        Ok(m)
    }

    /// Built-in enclosing-the-origin matrix `diag(-1, 1, 1)`.
    pub fn m1() -> Self {
        Self { rows: [[-ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]] }
    }

    /// Built-in matrix for graphs over `C x R`: `Phi = 2 z1 w1 + i z2 - i w2`.
    pub fn m2() -> Self {
        Self { rows: [[ZERO, ZERO, I], [ZERO, 2.0 * ONE, ZERO], [-I, ZERO, ZERO]] }
    }

    /// Built-in matrix for surfaces without horizontal complex tangents.
    pub fn m3() -> Self {
        Self { rows: [[ZERO, I, ZERO], [-I, ZERO, ZERO], [ZERO, ZERO, 2.0 * ONE]] }
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "M1" => Some(Self::m1()),
            "M2" => Some(Self::m2()),
            "M3" => Some(Self::m3()),
            _ => None,
        }
    }

    pub fn identity() -> Self {
        Self { rows: [[ONE, ZERO, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]] }
    }

    pub fn rows(&self) -> &[[C64; 3]; 3] {
        &self.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.rows[i][j]
    }

    pub fn c1(&self) -> C64 {
        self.rows[0][0]
    }
    pub fn a1(&self) -> C64 {
        self.rows[0][1]
    }
    pub fn a2(&self) -> C64 {
        self.rows[0][2]
    }
    pub fn b1(&self) -> C64 {
        self.rows[1][0]
    }
    pub fn m11(&self) -> C64 {
        self.rows[1][1]
    }
    pub fn m12(&self) -> C64 {
        self.rows[1][2]
    }
    pub fn b2(&self) -> C64 {
        self.rows[2][0]
    }
    pub fn m21(&self) -> C64 {
        self.rows[2][1]
    }
    pub fn m22(&self) -> C64 {
        self.rows[2][2]
    }

    /// Determinant of the lower-right 2x2 block.
    pub fn block_det(&self) -> C64 {
        self.m11() * self.m22() - self.m12() * self.m21()
    }

    pub fn det(&self) -> C64 {
        let m = &self.rows;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Self {
        let m = &self.rows;
        let d = self.det();
        let mut out = [[ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                *v = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / d;
            }
        }
        Self { rows: out }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = [[ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.rows[i][k] * other.rows[k][j]).sum();
            }
        }
        Self { rows: out }
    }

    pub fn transpose(&self) -> Self {
        let mut out = [[ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.rows[j][i];
            }
        }
        Self { rows: out }
    }

    pub fn frobenius(&self) -> f64 {
        self.rows.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn condition_report(&self) -> ConditionReport {
        ConditionReport { det: self.det(), condition: self.frobenius() * self.inverse().frobenius() }
    }

    /// Row vector times matrix: `(v0, v1, v2) M`.
    pub fn left_mul(&self, v: [C64; 3]) -> [C64; 3] {
        let mut out = [ZERO; 3];
        for (j, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|k| v[k] * self.rows[k][j]).sum();
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// On-disk form: nine `[re, im]` pairs keyed by entry name.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjMatrixJson {
    c1: [f64; 2],
    a1: [f64; 2],
    a2: [f64; 2],
    b1: [f64; 2],
    m11: [f64; 2],
    m12: [f64; 2],
    b2: [f64; 2],
    m21: [f64; 2],
    m22: [f64; 2],
}

impl TryFrom<ProjMatrixJson> for ProjMatrix {
    type Error = LerayError;

    fn try_from(j: ProjMatrixJson) -> Result<Self> {
        let c = |p: [f64; 2]| C64::new(p[0], p[1]);
        ProjMatrix::from_rows([[c(j.c1), c(j.a1), c(j.a2)], [c(j.b1), c(j.m11), c(j.m12)], [c(j.b2), c(j.m21), c(j.m22)]])
    }
}

impl From<ProjMatrix> for ProjMatrixJson {
    fn from(m: ProjMatrix) -> Self {
        let p = |z: C64| [z.re, z.im];
        Self {
            c1: p(m.c1()),
            a1: p(m.a1()),
            a2: p(m.a2()),
            b1: p(m.b1()),
            m11: p(m.m11()),
            m12: p(m.m12()),
            b2: p(m.b2()),
            m21: p(m.m21()),
            m22: p(m.m22()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng) -> ProjMatrix {
        loop {
            let mut rows = [[ZERO; 3]; 3];
            for v in rows.iter_mut().flatten() {
                *v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            if let Ok(m) = ProjMatrix::from_rows(rows) {
                return m;
            }
        }
    }

    #[test]
    fn builtins_have_expected_entries() {
        assert_eq!(ProjMatrix::m1().c1(), -ONE);
        assert_eq!(ProjMatrix::m2().a2(), I);
        assert_eq!(ProjMatrix::m2().b2(), -I);
        assert_eq!(ProjMatrix::m2().m11(), 2.0 * ONE);
        assert_eq!(ProjMatrix::m3().a1(), I);
        assert_eq!(ProjMatrix::m3().b1(), -I);
        assert_eq!(ProjMatrix::m3().m22(), 2.0 * ONE);
        for m in [ProjMatrix::m1(), ProjMatrix::m2(), ProjMatrix::m3()] {
            assert!(ProjMatrix::from_rows(*m.rows()).is_ok());
        }
        assert!(ProjMatrix::by_name("m2").is_some());
        assert!(ProjMatrix::by_name("M4").is_none());
    }

    #[test]
    fn singular_matrices_are_rejected() {
        let r = [[ONE, ONE, ZERO], [ONE, ONE, ZERO], [ZERO, ZERO, ONE]];
        assert!(matches!(ProjMatrix::from_rows(r), Err(LerayError::SingularSystem { .. })));
        assert!(ProjMatrix::from_rows([[ZERO; 3]; 3]).is_err());
    }

    #[test]
    fn inverse_and_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let m = random_matrix(&mut rng);
            let id = m.mul(&m.inverse());
            assert!(id.max_abs_diff(&ProjMatrix::identity()) < 1e-9 * m.condition_report().condition);
            assert!(m.condition_report().condition >= 3.0 - 1e-12);
        }
    }

    #[test]
    fn json_roundtrip_and_schema() {
        let m = ProjMatrix::m2();
        let text = m.to_json().unwrap();
        assert!(text.contains("\"m11\"") && text.contains("\"c1\""));
        assert_eq!(ProjMatrix::from_json(&text).unwrap(), m);
        let bad = text.replace("\"m11\": [\n    2.0", "\"m11\": [\n    0.0");
        assert!(ProjMatrix::from_json(&bad).is_err());
        assert!(ProjMatrix::from_json("{\"c1\":[1,0]}").is_err());
    }
}
