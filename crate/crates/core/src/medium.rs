//! Dispersion relations: the quadratic band, hollow cylindrical waveguide
//! modes and a 1D two-layer photonic crystal.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::numerics::{bessel_j, bessel_zero, bisect, scan_brackets, BesselZeroKind};

/// `ω(k) = ω_c + v²k²/(2ω_c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticBand {
    pub omega_c: f64,
    pub v: f64,
}

impl QuadraticBand {
    pub fn new(omega_c: f64, v: f64) -> Result<Self> {
        ensure_positive("omega_c", omega_c)?;
        ensure_positive("v", v)?;
        Ok(Self { omega_c, v })
    }

    /// The dimensionless band `ω_c = v = 1`.
    pub fn unit() -> Self {
        Self { omega_c: 1.0, v: 1.0 }
    }

    pub fn k_c(&self) -> f64 {
        self.omega_c / self.v
    }

    pub fn omega(&self, k: f64) -> f64 {
        self.omega_c + self.v * self.v * k * k / (2.0 * self.omega_c)
    }

    /// Group velocity `dω/dk`.
    pub fn group_velocity(&self, k: f64) -> f64 {
        self.v * self.v * k / self.omega_c
    }

    /// Non-negative branch of the inverse dispersion.
    pub fn k_of_omega(&self, omega: f64) -> Result<f64> {
        if !(omega >= self.omega_c) {
            return Err(Error::BelowCutoff {
                omega,
                omega_c: self.omega_c,
            });
        }
        Ok((2.0 * self.omega_c * (omega - self.omega_c)).sqrt() / self.v)
    }

    /// `k₀ + 2/σ_f ≤ ω_c/(2v)`: the pulse bandwidth stays where the quadratic
    /// expansion of the waveguide band holds.
    pub fn quadratic_validity(&self, k0: f64, sigma_f: f64) -> Validity {
        let ratio = (k0.abs() + 2.0 / sigma_f) / (self.omega_c / (2.0 * self.v));
        Validity {
            valid: ratio <= 1.0,
            ratio,
        }
    }
}

/// Result of a regime check; `ratio ≤ 1` means inside the regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub valid: bool,
    pub ratio: f64,
}

/// `m`-th positive zero of `J_n` or `J_n'`.
pub fn bessel_root(kind: BesselZeroKind, n: u32, m: u32) -> f64 {
    bessel_zero(kind, n, m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModeFamily {
    TE,
    TM,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideGeometry {
    pub radius: f64,
    pub c: f64,
}

impl WaveguideGeometry {
    pub fn new(radius: f64, c: f64) -> Result<Self> {
        ensure_positive("radius", radius)?;
        ensure_positive("c", c)?;
        Ok(Self { radius, c })
    }

    /// Geometry whose TM₀₁ band has cutoff `band.omega_c` and curvature
    /// velocity `band.v` (so `c = v`, `R = c p₀₁/ω_c`).
    pub fn for_band(band: &QuadraticBand) -> Self {
        let p01 = bessel_zero(BesselZeroKind::Function, 0, 1);
        Self {
            radius: band.v * p01 / band.omega_c,
            c: band.v,
        }
    }

    /// Transverse wavenumber `p_nm/R` (TM) or `q_nm/R` (TE).
    pub fn transverse_k(&self, family: ModeFamily, n: u32, m: u32) -> Result<f64> {
        if m == 0 {
            return Err(Error::InvalidParameter {
                name: "m",
                reason: "radial index starts at 1".into(),
            });
        }
        let kind = match family {
            ModeFamily::TM => BesselZeroKind::Function,
            ModeFamily::TE => BesselZeroKind::Derivative,
        };
        Ok(bessel_zero(kind, n, m) / self.radius)
    }

    pub fn dispersion(&self, family: ModeFamily, n: u32, m: u32, k: f64) -> Result<f64> {
        let kt = self.transverse_k(family, n, m)?;
        Ok(self.c * (kt * kt + k * k).sqrt())
    }

    /// TM₀₁ cutoff `c p₀₁/R`.
    pub fn omega_c(&self) -> f64 {
        self.c * bessel_zero(BesselZeroKind::Function, 0, 1) / self.radius
    }

    /// Quadratic expansion of the TM₀₁ band about `k = 0`.
    pub fn quadratic_band(&self) -> QuadraticBand {
        QuadraticBand {
            omega_c: self.omega_c(),
            v: self.c,
        }
    }

    /// On-axis normalisation of the TM₀₁ mode, `C = ω_c/(R √(2π² J₁²(ω_c R/c)))`.
    pub fn mode_constant(&self) -> f64 {
        let wc = self.omega_c();
        let j1 = bessel_j(1, wc * self.radius / self.c);
        wc / (self.radius * (2.0 * PI * PI * j1 * j1).sqrt())
    }
}

pub fn waveguide_dispersion(
    geom: &WaveguideGeometry,
    family: ModeFamily,
    n: u32,
    m: u32,
    k: f64,
) -> Result<f64> {
    geom.dispersion(family, n, m, k)
}

pub fn quadratic_band_from_waveguide(geom: &WaveguideGeometry) -> QuadraticBand {
    geom.quadratic_band()
}

/// Two-layer unit cell: thickness `b` at velocity `c1`, then `a − b` at `c2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrystalParams {
    pub c1: f64,
    pub c2: f64,
    pub b: f64,
    pub a: f64,
}

/// Grid points per scan range when bracketing band frequencies.
const CRYSTAL_SCAN_POINTS: usize = 2000;

impl CrystalParams {
    pub fn new(c1: f64, c2: f64, b: f64, a: f64) -> Result<Self> {
        ensure_positive("c1", c1)?;
        ensure_positive("c2", c2)?;
        ensure_positive("b", b)?;
        if !(b < a) {
            return Err(Error::InvalidParameter {
                name: "b",
                reason: format!("layer thickness {b} must be below the period {a}"),
            });
        }
        Ok(Self { c1, c2, b, a })
    }

    /// The layer stack used for the reference band diagram: `c₂ = 0.3 c₁`, `b = a/2`.
    pub fn reference() -> Self {
        Self {
            c1: 1.0,
            c2: 0.3,
            b: 0.5,
            a: 1.0,
        }
    }

    /// `α(ω)`; the Bloch condition reads `cos(ka) = α(ω)/2`.
    pub fn alpha(&self, omega: f64) -> f64 {
        let p1 = self.b * omega / self.c1;
        let p2 = omega * (self.a - self.b) / self.c2;
        2.0 * p1.cos() * p2.cos()
            - (self.c1 * self.c1 + self.c2 * self.c2) / (self.c1 * self.c2) * p1.sin() * p2.sin()
    }

    fn transit_velocity(&self) -> f64 {
        self.a / (self.b / self.c1 + (self.a - self.b) / self.c2)
    }

    /// Lowest `n_bands` frequencies at Bloch wavenumber `k` (`|k| ≤ π/a`).
    pub fn bands_at(&self, k: f64, n_bands: usize) -> Result<Vec<f64>> {
        if k.abs() > PI / self.a * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter {
                name: "k",
                reason: format!("{k} outside the first Brillouin zone"),
            });
        }
        let target = (k * self.a).cos();
        let f = |w: f64| target - self.alpha(w) / 2.0;
        // Each band spans roughly π·c̄/a in frequency.
        let mut w_max = (n_bands as f64 + 1.0) * PI * self.transit_velocity() / self.a;
        for _ in 0..8 {
            let brackets = scan_brackets(&f, 0.0, w_max, CRYSTAL_SCAN_POINTS);
            if brackets.len() >= n_bands {
                let mut roots = Vec::with_capacity(n_bands);
                for (lo, hi) in brackets.into_iter().take(n_bands) {
                    roots.push(bisect(&f, lo, hi, 0.0)?);
                }
                return Ok(roots);
            }
            w_max *= 2.0;
        }
        Err(Error::RootNotBracketed {
            what: format!("crystal band {n_bands} at k = {k}"),
            lo: 0.0,
            hi: w_max,
        })
    }

    /// Bands on `n_k` uniform points of `[0, π/a]` (the bands are even in `k`).
    pub fn band_table(&self, n_k: usize, n_bands: usize) -> Result<BandTable> {
        let n_k = n_k.max(2);
        let k: Vec<f64> = (0..n_k)
            .map(|i| PI / self.a * i as f64 / (n_k - 1) as f64)
            .collect();
        let mut bands = vec![Vec::with_capacity(n_k); n_bands];
        for &ki in &k {
            for (b, w) in bands.iter_mut().zip(self.bands_at(ki, n_bands)?) {
                b.push(w);
            }
        }
        Ok(BandTable {
            a: self.a,
            k,
            bands,
        })
    }

    /// Least-squares fit of `ω₂(k) = ω_c + v²(k − π/a)²/(2ω_c)` about the zone
    /// edge. `ω_c` is pinned to the exact band-2 edge value; the curvature is
    /// fitted over `|k − π/a| ≤ fit_half_width/a` and the deviation reported over
    /// `|k − π/a| ≤ report_half_width/a`.
    pub fn band2_fit(&self, fit_half_width: f64, report_half_width: f64) -> Result<Band2Fit> {
        let edge = PI / self.a;
        let omega_c = self.bands_at(edge, 2)?[1];
        let n = 301;
        let span = fit_half_width.max(report_half_width) / self.a;
        let mut samples = Vec::with_capacity(n);
        for i in 0..n {
            let dk = -span * i as f64 / (n - 1) as f64;
            samples.push((dk, self.bands_at(edge + dk, 2)?[1]));
        }
        let (mut num, mut den) = (0.0, 0.0);
        for &(dk, w) in samples.iter().filter(|(dk, _)| dk.abs() <= fit_half_width / self.a + 1e-15) {
            num += dk * dk * (w - omega_c);
            den += dk.powi(4);
        }
        let curvature = num / den;
        let v = (2.0 * omega_c * curvature).sqrt();
        let max_rel_deviation = samples
            .iter()
            .filter(|(dk, _)| dk.abs() <= report_half_width / self.a + 1e-15)
            .map(|&(dk, w)| ((omega_c + curvature * dk * dk) - w).abs() / w)
            .fold(0.0, f64::max);
        Ok(Band2Fit {
            band: QuadraticBand { omega_c, v },
            fit_half_width,
            report_half_width,
            max_rel_deviation,
        })
    }

    /// `k₀a ≤ 0.1` and `σ_f/a ≥ 3` (inclusive); also reports `σ_f/λ_q` for the
    /// fitted band-2 wavelength `λ_q = 2πv/ω_c`.
    pub fn envelope_validity(&self, k0: f64, sigma_f: f64, band2: &QuadraticBand) -> EnvelopeValidity {
        let k0a = k0 * self.a;
        let sigma_over_a = sigma_f / self.a;
        let lambda_q = 2.0 * PI * band2.v / band2.omega_c;
        EnvelopeValidity {
            valid: k0a <= 0.1 && sigma_over_a >= 3.0,
            k0a,
            sigma_over_a,
            sigma_over_lambda_q: sigma_f / lambda_q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band2Fit {
    pub band: QuadraticBand,
    pub fit_half_width: f64,
    pub report_half_width: f64,
    pub max_rel_deviation: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeValidity {
    pub valid: bool,
    pub k0a: f64,
    pub sigma_over_a: f64,
    pub sigma_over_lambda_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandTable {
    pub a: f64,
    pub k: Vec<f64>,
    /// `bands[n][i]` is band `n + 1` at `k[i]`.
    pub bands: Vec<Vec<f64>>,
}

impl BandTable {
    /// CSV with columns `k*a, omega_band1, …, omega_fit`. The fit column is
    /// empty when no fit is supplied.
    pub fn to_csv(&self, fit: Option<&QuadraticBand>) -> String {
        let mut out = String::from("k*a");
        for n in 1..=self.bands.len() {
            let _ = write!(out, ",omega_band{n}");
        }
        out.push_str(",omega_fit\n");
        let edge = PI / self.a;
        for (i, k) in self.k.iter().enumerate() {
            let _ = write!(out, "{:.12e}", k * self.a);
            for b in &self.bands {
                let _ = write!(out, ",{:.12e}", b[i]);
            }
            match fit {
                Some(f) => {
                    let _ = writeln!(out, ",{:.12e}", f.omega(k - edge));
                }
                None => out.push_str(",\n"),
            }
        }
        out
    }
}
