//! JSON shapes shared by every report: complex numbers are `{re, im}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex64 {
    fn from(z: ComplexJson) -> Self {
        Complex64::new(z.re, z.im)
    }
}

pub fn complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    ComplexJson::from(*z).serialize(s)
}

pub fn complex_vec<S: Serializer>(zs: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(zs.iter().map(|&z| ComplexJson::from(z)))
}
