//! Seeded random instances of the matrix classes under test.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{cis, ComplexMatrix, C64, I};
use crate::power::power_spectral;
use crate::range::sector_angle;

pub const DEFAULT_EIG_FLOOR: f64 = 1e-3;
const SECTOR_BISECTION_ITERS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MatrixClass {
    #[serde(rename = "hpd")]
    Hpd,
    #[serde(rename = "accretive")]
    Accretive,
    #[serde(rename = "dissipative")]
    Dissipative,
    #[serde(rename = "ad")]
    AccretiveDissipative,
    #[serde(rename = "sectorial")]
    Sectorial,
    #[serde(rename = "generic")]
    Generic,
}

impl MatrixClass {
    pub fn name(self) -> &'static str {
        match self {
            Self::Hpd => "hpd",
            Self::Accretive => "accretive",
            Self::Dissipative => "dissipative",
            Self::AccretiveDissipative => "ad",
            Self::Sectorial => "sectorial",
            Self::Generic => "generic",
        }
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hpd" => Self::Hpd,
            "accretive" => Self::Accretive,
            "dissipative" => Self::Dissipative,
            "ad" | "accretive_dissipative" => Self::AccretiveDissipative,
            "sectorial" => Self::Sectorial,
            "generic" => Self::Generic,
            other => return Err(Error::InvalidConfig(format!("unknown matrix class {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: MatrixClass,
    pub n: usize,
    pub seed: u64,
    /// Target sector half-angle, sectorial kind only.
    pub alpha: Option<f64>,
    pub eig_floor: f64,
}

impl GeneratorSpec {
    pub fn new(kind: MatrixClass, n: usize, seed: u64) -> Self {
        Self {
            kind,
            n,
            seed,
            alpha: None,
            eig_floor: DEFAULT_EIG_FLOOR,
        }
    }

    pub fn sectorial(n: usize, seed: u64, alpha: f64) -> Self {
        Self {
            alpha: Some(alpha),
            ..Self::new(MatrixClass::Sectorial, n, seed)
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidConfig("generator dimension must be at least 1".into()));
        }
        if !(self.eig_floor > 0.0) {
            return Err(Error::InvalidConfig("eigenvalue floor must be positive".into()));
        }
        match (self.kind, self.alpha) {
            (MatrixClass::Sectorial, Some(a)) if a > 0.0 && a < FRAC_PI_2 => Ok(()),
            (MatrixClass::Sectorial, _) => Err(Error::InvalidConfig(
                "sectorial generator needs alpha in (0, pi/2)".into(),
            )),
            (_, Some(a)) if !(a > 0.0 && a < FRAC_PI_2) => {
                Err(Error::InvalidConfig("alpha must lie in (0, pi/2)".into()))
            }
            _ => Ok(()),
        }
    }
}

/// SplitMix64 finalizer; derives independent per-item seeds from a master seed.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian scaled to variance `var` (split evenly between parts).
pub fn complex_gaussian(rng: &mut impl Rng, var: f64) -> C64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re * s, im * s)
}

/// Gaussian matrix with entry variance `1/n`, so its norm stays O(1).
pub fn gaussian_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let var = 1.0 / n as f64;
    ComplexMatrix::from_fn(n, |_, _| complex_gaussian(rng, var))
}

/// `(G + G*)/2` for Gaussian `G`: indefinite Hermitian.
pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n).hermitian_part()
}

/// `G* G + floor I`, exactly Hermitian with `lambda_min >= floor`.
pub fn random_hpd(rng: &mut impl Rng, n: usize, floor: f64) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n);
    (&g.adjoint() * &g).hermitian_part().shift(C64::new(floor, 0.0))
}

pub fn combine(h: &ComplexMatrix, k: &ComplexMatrix, c: f64) -> ComplexMatrix {
    &(h.clone()) + &k.scale(I * c)
}

/// Deterministic instance of the requested class.
pub fn generate(spec: &GeneratorSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    let n = spec.n;
    let floor = spec.eig_floor;
    Ok(match spec.kind {
        MatrixClass::Hpd => random_hpd(&mut rng, n, floor),
        MatrixClass::Accretive => {
            let h = random_hpd(&mut rng, n, floor);
            let k = random_hermitian(&mut rng, n);
            combine(&h, &k, 1.0)
        }
        MatrixClass::AccretiveDissipative => {
            let h = random_hpd(&mut rng, n, floor);
            let k = random_hpd(&mut rng, n, floor);
            combine(&h, &k, 1.0)
        }
        MatrixClass::Dissipative => {
            let h = random_hpd(&mut rng, n, floor);
            let k = random_hermitian(&mut rng, n);
            combine(&h, &k, 1.0).scale(I)
        }
        MatrixClass::Sectorial => {
            let alpha = spec.alpha.expect("validated");
            let h = random_hpd(&mut rng, n, floor);
            let k = random_hermitian(&mut rng, n);
            sectorial_from_parts(&h, &k, alpha)?
        }
        MatrixClass::Generic => {
            let var = 1.0 / n as f64;
            ComplexMatrix::from_fn(n, |_, _| complex_gaussian(&mut rng, var))
        }
    })
}

/// `H + i c K` with `c` chosen by bisection so that the sector angle lands in
/// `(0.9 alpha, alpha]`.
fn sectorial_from_parts(h: &ComplexMatrix, k: &ComplexMatrix, alpha: f64) -> Result<ComplexMatrix> {
    let angle = |c: f64| sector_angle(&combine(h, k, c));
    let mut hi = 1.0;
    let mut grow = 0;
    while angle(hi)? <= alpha {
        hi *= 2.0;
        grow += 1;
        if grow > SECTOR_BISECTION_ITERS {
            return Err(Error::SectorUnreachable { alpha });
        }
    }
    let mut lo = 0.0;
    for _ in 0..SECTOR_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        let a = angle(mid)?;
        if a > alpha {
            hi = mid;
        } else {
            lo = mid;
            if a > 0.9 * alpha {
                return Ok(combine(h, k, mid));
            }
        }
    }
    let a = angle(lo)?;
    if a <= alpha && a > 0.9 * alpha {
        Ok(combine(h, k, lo))
    } else {
        Err(Error::SectorUnreachable { alpha })
    }
}

/// An accretive `A` whose integer powers up to `A^k` stay accretive:
/// `A = e^{i phi} B^{1/k}` with `B` sectorial of angle `beta` and
/// `beta + k |phi| < pi/2`, so `A^k = e^{i k phi} B`.
pub fn generate_root_instance(n: usize, k: u32, seed: u64) -> Result<ComplexMatrix> {
    let mut rng = rng_from_seed(seed);
    let beta = rng.random_range(0.2..1.3);
    let slack = (FRAC_PI_2 - beta) / k as f64;
    let phi = rng.random_range(-0.9..0.9) * slack;
    let b = generate(&GeneratorSpec::sectorial(n, rng.random(), beta))?;
    Ok(power_spectral(&b, 1.0 / k as f64)?.scale(cis(phi)))
}
