//! Raw tables: base matrices as root-of-unity exponents or symbolic entries,
//! phase-pattern templates, circulant generating vectors and the algebraic
//! constants behind the non-Butson matrices.

use num::complex::Complex64;
use serde::Serialize;

/// Closed-form constants of the non-Butson isolated matrices, evaluated once
/// to double precision.
#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicConstants {
    /// Root of `d² − (1 − √3)·d + 1 = 0` with positive imaginary part.
    pub d_c6: Complex64,
    /// `(−3 + i√7)/4`, a root of `d² + (3/2)·d + 1 = 0`.
    pub d_c7: Complex64,
    /// `(A, B, C) = (a, a·b, a·b·c)` from the printed six-digit phases of
    /// `a`, `b`, `c`.
    pub abc_c7c: [Complex64; 3],
    /// `−5/6 + i√11/6`.
    pub e_c11: Complex64,
    /// `−3/4 − i√7/4`.
    pub a_n11: Complex64,
    /// `(−1 + √13)/12 + i·√(130 + 2√13)/12`.
    pub c_c13: Complex64,
    /// `(−1 − √13)/12 + i·√(130 − 2√13)/12`.
    pub d_c13: Complex64,
}

/// Printed phases (radians) of `a`, `b`, `c` for the cyclic 7-root matrix C7C.
pub const C7C_PHASES: [f64; 3] = [4.312839, 1.356228, 1.900668];

impl AlgebraicConstants {
    pub fn get() -> Self {
        let s3 = 3f64.sqrt();
        let s7 = 7f64.sqrt();
        let s13 = 13f64.sqrt();
        let a = Complex64::from_polar(1.0, C7C_PHASES[0]);
        let b = Complex64::from_polar(1.0, C7C_PHASES[1]);
        let c = Complex64::from_polar(1.0, C7C_PHASES[2]);
        AlgebraicConstants {
            d_c6: Complex64::new((1.0 - s3) / 2.0, (s3 / 2.0).sqrt()),
            d_c7: Complex64::new(-0.75, s7 / 4.0),
            abc_c7c: [a, a * b, a * b * c],
            e_c11: Complex64::new(-5.0 / 6.0, 11f64.sqrt() / 6.0),
            a_n11: Complex64::new(-0.75, -s7 / 4.0),
            c_c13: Complex64::new((-1.0 + s13) / 12.0, (130.0 + 2.0 * s13).sqrt() / 12.0),
            d_c13: Complex64::new((-1.0 - s13) / 12.0, (130.0 - 2.0 * s13).sqrt() / 12.0),
        }
    }

    /// `(relation, |residual|)` for every defining polynomial and every
    /// unimodularity requirement.
    pub fn residuals(&self) -> Vec<(&'static str, f64)> {
        let one = Complex64::new(1.0, 0.0);
        let s3 = 3f64.sqrt();
        let d6 = self.d_c6;
        let d7 = self.d_c7;
        let mut out = vec![
            ("d_c6² − (1−√3)·d_c6 + 1", (d6 * d6 - (1.0 - s3) * d6 + one).norm()),
            ("|d_c6| − 1", (d6.norm() - 1.0).abs()),
            ("d_c7² + (3/2)·d_c7 + 1", (d7 * d7 + 1.5 * d7 + one).norm()),
            ("d_c7·conj(d_c7) − 1", (d7 * d7.conj() - one).norm()),
            ("|e_c11| − 1", (self.e_c11.norm() - 1.0).abs()),
            ("|a_n11| − 1", (self.a_n11.norm() - 1.0).abs()),
            ("|c_c13| − 1", (self.c_c13.norm() - 1.0).abs()),
            ("|d_c13| − 1", (self.d_c13.norm() - 1.0).abs()),
        ];
        for (name, z) in ["|A_c7c| − 1", "|B_c7c| − 1", "|C_c7c| − 1"]
            .into_iter()
            .zip(self.abc_c7c)
        {
            out.push((name, (z.norm() - 1.0).abs()));
        }
        out
    }
}

/// Circulant generating vectors `x`, with `C_ij = x_{(i−j) mod N}`.
pub(crate) fn circulant_vector(id: &str) -> Option<Vec<Complex64>> {
    let k = AlgebraicConstants::get();
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let pick = |mask: &[u8], z: Complex64| -> Vec<Complex64> {
        mask.iter().map(|&m| if m == 1 { z } else { one }).collect()
    };
    let c13 = |z: Complex64| -> Vec<Complex64> {
        // 0: 1, 1: z, 2: conj(z)
        [0u8, 1, 2, 1, 1, 2, 2, 2, 2, 1, 1, 2, 1]
            .iter()
            .map(|&m| match m {
                0 => one,
                1 => z,
                _ => z.conj(),
            })
            .collect()
    };
    let c7c = |[a, b, c]: [Complex64; 3]| vec![one, a, b, c, c, b, a];
    let d = k.d_c6;
    Some(match id {
        "C6" => vec![one, i / d, -one / d, -i, -d, i * d],
        "C7A" => pick(&[0, 0, 0, 1, 0, 1, 1], k.d_c7),
        "C7B" => pick(&[0, 0, 0, 1, 0, 1, 1], k.d_c7.conj()),
        "C7C" => c7c(k.abc_c7c),
        "C7D" => c7c(k.abc_c7c.map(|z| z.conj())),
        "C11A" => pick(&[0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 1], k.e_c11),
        "C11B" => pick(&[0, 0, 1, 0, 0, 0, 1, 1, 1, 0, 1], k.e_c11.conj()),
        "C13A" => c13(k.c_c13),
        "C13B" => c13(k.d_c13),
        _ => return None,
    })
}

/// `D_6` as exponents of `i`.
pub(crate) const D6_EXPS: &[&[i64]] = &[
    &[0, 0, 0, 0, 0, 0],
    &[0, 2, 1, 3, 3, 1],
    &[0, 1, 2, 1, 3, 3],
    &[0, 3, 1, 2, 1, 3],
    &[0, 3, 3, 1, 2, 1],
    &[0, 1, 3, 3, 1, 2],
];

pub(crate) const D6_PATTERN: &[&str] = &[
    ".",
    ".",
    ".,.,.,c,c,.",
    ".,.,-c,.,.,-c",
    ".,.,-c,.,.,-c",
    ".,.,.,c,c,.",
];

/// `S_6` as exponents of `exp(2πi/3)`.
pub(crate) const S6_EXPS: &[&[i64]] = &[
    &[0, 0, 0, 0, 0, 0],
    &[0, 0, 1, 1, 2, 2],
    &[0, 1, 0, 2, 2, 1],
    &[0, 1, 2, 0, 1, 2],
    &[0, 2, 2, 1, 0, 1],
    &[0, 2, 1, 2, 1, 0],
];

/// `P_7` as exponents of `exp(2πi/6)`.
pub(crate) const P7_EXPS: &[&[i64]] = &[
    &[0, 0, 0, 0, 0, 0, 0],
    &[0, 1, 4, 5, 3, 3, 1],
    &[0, 4, 1, 3, 5, 3, 1],
    &[0, 5, 3, 1, 4, 1, 3],
    &[0, 3, 5, 4, 1, 1, 3],
    &[0, 3, 3, 1, 1, 4, 5],
    &[0, 1, 1, 3, 3, 5, 4],
];

pub(crate) const P7_PATTERN: &[&str] = &[
    ".",
    ".,a,a,.,.,.,.",
    ".,a,a,.,.,.,.",
    ".,.,.,-a,-a,.,.",
    ".,.,.,-a,-a,.,.",
    ".",
    ".",
];

/// `N_11` with `a = −3/4 − i√7/4`, `A = a⁻¹`, `B = a⁻²`.
pub(crate) const N11_ROWS: &[&str] = &[
    "1 1 1 1 1 1 1 1 1 1 1",
    "1 a -a -a -a -1 -1 -A -A -1 -1",
    "1 -a a -a -a -1 -1 -1 -1 -A -A",
    "1 -a -a -1 a -1 -a -A -1 -A -1",
    "1 -a -a a -1 -a -1 -1 -A -1 -A",
    "1 -1 -1 -1 -a -a 1 -A -1 -1 -A",
    "1 -1 -1 -a -1 1 -a -1 -A -A -1",
    "1 -A -1 -A -1 -A -1 -A A -B -B",
    "1 -A -1 -1 -A -1 -A A -A -B -B",
    "1 -1 -A -A -1 -1 -A -B -B -B B",
    "1 -1 -A -1 -A -A -1 -B -B B -B",
];

/// `P_13` in powers of `t = exp(2πi/30)`, optionally times `i` and a sign.
pub(crate) const P13_ROWS: &[&str] = &[
    "1 1 1 1 1 1 1 1 1 1 1 1 1",
    "1 -1 t10 -t5 t5 it5 -it5 it15 -it15 t16 t4 t22 t28",
    "1 t10 -1 t5 -t5 -it5 it5 -it15 it15 t16 t4 t22 t28",
    "1 -t5 t5 -1 t10 it15 -it15 it5 -it5 t4 t16 t28 t22",
    "1 t5 -t5 t10 -1 -it15 it15 -it5 it5 t4 t16 t28 t22",
    "1 it5 -it5 it25 -it25 -1 t10 -t5 t5 t22 t28 t4 t16",
    "1 -it5 it5 -it25 it25 t10 -1 t5 -t5 t22 t28 t4 t16",
    "1 it25 -it25 it5 -it5 -t5 t5 -1 t10 t28 t22 t16 t4",
    "1 -it25 it25 -it5 it5 t5 -t5 t10 -1 t28 t22 t16 t4",
    "1 t4 t4 t16 t16 t28 t28 t22 t22 t20 t10 t10 t10",
    "1 t16 t16 t4 t4 t22 t22 t28 t28 t10 t20 t10 t10",
    "1 t28 t28 t22 t22 t16 t16 t4 t4 t10 t10 t20 t10",
    "1 t22 t22 t28 t28 t4 t4 t16 t16 t10 t10 t10 t20",
];

/// Pattern of `P_13(e, f)`; the name `g` stands for `G(f)`.
pub(crate) const P13_PATTERN: &[&str] = &[
    ".",
    ".,.,.,f,f,e,e,e+g,e+g,.,.,.,.",
    ".,.,.,f,f,e,e,e+g,e+g,.,.,.,.",
    ".,f,f,.,.,e+g,e+g,e,e,.,.,.,.",
    ".,f,f,.,.,e+g,e+g,e,e,.,.,.,.",
    ".,-e,-e,-e-g,-e-g,.,.,-f,-f,.,.,.,.",
    ".,-e,-e,-e-g,-e-g,.,.,-f,-f,.,.,.,.",
    ".,-e-g,-e-g,-e,-e,-f,-f,.,.,.,.,.,.",
    ".,-e-g,-e-g,-e,-e,-f,-f,.,.,.,.,.,.",
    ".",
    ".",
    ".",
    ".",
];

pub(crate) const F4_PATTERN: &[&str] = &[".", ".,a"];
pub(crate) const F6_PATTERN: &[&str] = &[".", ".,a,b"];
pub(crate) const F8_PATTERN: &[&str] = &[".", ".,a,b,c", ".,d", ".,e,b,c-a+e"];
pub(crate) const F9_PATTERN: &[&str] = &[".", ".,a,b", ".,c,d"];
pub(crate) const F10_PATTERN: &[&str] = &[".", ".,a,b,c,d"];
pub(crate) const F12A_PATTERN: &[&str] = &[
    ".",
    ".,a,b,c,d,e",
    ".,f",
    ".,g,b,c-a+g,d,e-a+g",
    ".,h",
    ".,i,b,c-a+i,d,e-a+i",
];
pub(crate) const F12B_PATTERN: &[&str] = &[".", ".,a,b,c,d,e", ".,f,g", ".,h,i,c,d-a+h,e-b+i"];
pub(crate) const F12C_PATTERN: &[&str] = &[
    ".",
    ".,a,b,c,.,d,b,a,.,c,b,d",
    ".,e,f,e,.,e,f,e,.,e,f,e",
    ".,g,.,c-a+g,.,d-a+g,.,g,.,c-a+g,.,d-a+g",
    ".,h,b,h,.,h,b,h,.,h,b,h",
    ".,i,f,c-a+i,.,d-a+i,f,i,.,c-a+i,f,d-a+i",
];
pub(crate) const F12D_PATTERN: &[&str] = &[
    ".",
    ".,a,b,c,d,a,.,c,b,a,d,c",
    ".,e,.,f,.,e,.,f,.,e,.,f",
    ".,g,b,g,d,g,.,g,b,g,d,g",
    ".,h,.,c-a+h,.,h,.,c-a+h,.,h,.,c-a+h",
    ".,i,b,f-e+i,d,i,.,f-e+i,b,i,d,f-e+i",
];
pub(crate) const F14_PATTERN: &[&str] = &[".", ".,a,b,c,d,e,f"];
pub(crate) const F15_PATTERN: &[&str] = &[".", ".,a,b,c,d", ".,e,f,g,h"];
pub(crate) const F16_PATTERN: &[&str] = &[
    ".",
    ".,a,b,c,d,e,f,g",
    ".,h,i,j",
    ".,k,l,m,d,e-a+k,f-b+l,g-c+m",
    ".,n",
    ".,o,b,c-a+o,d,e-a+o,f,g-a+o",
    ".,p,i,j-h+p",
    ".,r,l,m-k+r,d,e-a+r,f-b+l,g-c+m+r-k",
];
