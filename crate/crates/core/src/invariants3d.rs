//! Cubic-symmetry strain invariants and the sixth-order Falk-Konopka free
//! energy of a cubic parent phase.
//!
//! Only even-order invariants enter the expansion; odd orders are absent.

use std::sync::OnceLock;

use nalgebra::Matrix3;

use crate::error::{Error, Result};

/// Symmetric 3x3 small-strain tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strain3(Matrix3<f64>);

impl Strain3 {
    /// Builds the tensor from its six independent components.
    pub fn from_components(e11: f64, e22: f64, e33: f64, e23: f64, e13: f64, e12: f64) -> Self {
        Self(Matrix3::new(e11, e12, e13, e12, e22, e23, e13, e23, e33))
    }

    /// Symmetric part of an arbitrary matrix.
    pub fn symmetrized(m: &Matrix3<f64>) -> Self {
        Self((m + m.transpose()) * 0.5)
    }

    pub fn hydrostatic(delta: f64) -> Self {
        Self(Matrix3::identity() * delta)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `Q eps Q^T`.
    pub fn conjugate(&self, q: &Matrix3<f64>) -> Self {
        Self::symmetrized(&(q * self.0 * q.transpose()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0 * factor)
    }
}

/// The ten even-order invariants, grouped by order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrainInvariants {
    pub second: [f64; 3],
    pub fourth: [f64; 5],
    pub sixth: [f64; 2],
}

impl StrainInvariants {
    /// Flattened in the order I2_1..I2_3, I4_1..I4_5, I6_1, I6_2.
    pub fn to_array(&self) -> [f64; 10] {
        let mut out = [0.0; 10];
        out[..3].copy_from_slice(&self.second);
        out[3..8].copy_from_slice(&self.fourth);
        out[8..].copy_from_slice(&self.sixth);
        out
    }
}

pub fn invariants(eps: &Strain3) -> StrainInvariants {
    let (e11, e22, e33) = (eps.get(0, 0), eps.get(1, 1), eps.get(2, 2));
    let (e23, e13, e12) = (eps.get(1, 2), eps.get(0, 2), eps.get(0, 1));

    let trace = e11 + e22 + e33;
    let tetragonal = 2.0 * e33 - e11 - e22;
    let orthorhombic = e11 - e22;

    let i2_1 = trace * trace / 9.0;
    let i2_2 = tetragonal * tetragonal / 12.0 + orthorhombic * orthorhombic / 4.0;
    let i2_3 = e23 * e23 + e13 * e13 + e12 * e12;

    let i4_1 = i2_2 * i2_2;
    let i4_2 = e23.powi(4) + e13.powi(4) + e12.powi(4);
    let i4_3 = i2_3 * i2_3;
    let i4_4 = i2_2 * i2_3;
    let a = tetragonal / 6.0 - orthorhombic / 2.0;
    let b = tetragonal / 6.0 + orthorhombic / 2.0;
    let i4_5 = e23 * e23 * a * a + e13 * e13 * b * b + e12 * e12 * tetragonal * tetragonal / 9.0;

    let i6_1 = i2_2 * i2_2 * i2_2;
    let t2 = tetragonal * tetragonal / 36.0;
    let inner = t2 - orthorhombic * orthorhombic / 4.0;
    let i6_2 = t2 * inner * inner;

    StrainInvariants {
        second: [i2_1, i2_2, i2_3],
        fourth: [i4_1, i4_2, i4_3, i4_4, i4_5],
        sixth: [i6_1, i6_2],
    }
}

/// Coefficient affine in temperature: `base + slope (theta - pivot)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineCoeff {
    pub base: f64,
    #[serde(default)]
    pub slope: f64,
}

impl AffineCoeff {
    pub const fn constant(base: f64) -> Self {
        Self { base, slope: 0.0 }
    }

    pub fn at(&self, theta: f64, pivot: f64) -> f64 {
        self.base + self.slope * (theta - pivot)
    }
}

/// The ten material constants of the sixth-order expansion plus the thermal part.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FalkKonopkaCoeffs {
    pub psi2: [AffineCoeff; 3],
    pub psi4: [AffineCoeff; 5],
    pub psi6: [AffineCoeff; 2],
    /// Coefficient of the thermal term `-a1 theta ln((theta - theta0)/theta0)`.
    pub psi0_alpha1: f64,
    /// Reference temperature and pivot of the affine coefficients, K.
    pub theta0: f64,
    /// Whether the thermal term is part of the energy.
    pub include_psi0: bool,
}

impl FalkKonopkaCoeffs {
    /// Cu-based alloy table, g/(ms^2 cm), pivot 300 K.
    pub fn cu_based_3d() -> Self {
        Self {
            psi2: [
                AffineCoeff::constant(5.92e6),
                AffineCoeff {
                    base: 1.41e5,
                    slope: 46.0,
                },
                AffineCoeff {
                    base: 1.48e6,
                    slope: -940.0,
                },
            ],
            psi4: [
                AffineCoeff {
                    base: -1.182e8,
                    slope: 3.55e5,
                },
                AffineCoeff::constant(3.13e9),
                AffineCoeff::constant(1.64e9),
                AffineCoeff::constant(-5.53e8),
                AffineCoeff::constant(-4.27e8),
            ],
            psi6: [AffineCoeff::constant(3.35e10), AffineCoeff::constant(3.71e11)],
            // Same a1 = C_v / rho as the rod parameters.
            psi0_alpha1: 29.0 / 11.1,
            theta0: 300.0,
            include_psi0: true,
        }
    }

    pub fn second_order(&self, theta: f64) -> [f64; 3] {
        self.psi2.map(|c| c.at(theta, self.theta0))
    }

    pub fn fourth_order(&self, theta: f64) -> [f64; 5] {
        self.psi4.map(|c| c.at(theta, self.theta0))
    }

    pub fn sixth_order(&self, theta: f64) -> [f64; 2] {
        self.psi6.map(|c| c.at(theta, self.theta0))
    }

    /// Thermal term `psi0(theta)`; requires `theta > theta0`.
    pub fn thermal(&self, theta: f64) -> Result<f64> {
        let ratio = (theta - self.theta0) / self.theta0;
        if !(ratio > 0.0) || !theta.is_finite() {
            return Err(Error::ThermalLogDomain {
                theta,
                theta0: self.theta0,
            });
        }
        Ok(-self.psi0_alpha1 * theta * ratio.ln())
    }
}

impl Default for FalkKonopkaCoeffs {
    fn default() -> Self {
        Self::cu_based_3d()
    }
}

pub fn free_energy_3d(c: &FalkKonopkaCoeffs, eps: &Strain3, theta: f64) -> Result<f64> {
    let inv = invariants(eps);
    let thermal = if c.include_psi0 { c.thermal(theta)? } else { 0.0 };
    let dot = |coeffs: &[f64], values: &[f64]| -> f64 { coeffs.iter().zip(values).map(|(a, b)| a * b).sum() };
    Ok(thermal
        + dot(&c.second_order(theta), &inv.second)
        + dot(&c.fourth_order(theta), &inv.fourth)
        + dot(&c.sixth_order(theta), &inv.sixth))
}

/// The 48 elements of the full cubic group: every signed permutation matrix.
pub fn cubic_group_elements() -> &'static [Matrix3<f64>] {
    static GROUP: OnceLock<Vec<Matrix3<f64>>> = OnceLock::new();
    GROUP.get_or_init(|| {
        const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let mut group = Vec::with_capacity(48);
        for perm in PERMUTATIONS {
            for signs in 0..8u8 {
                let mut q = Matrix3::zeros();
                for (row, &col) in perm.iter().enumerate() {
                    q[(row, col)] = if signs >> row & 1 == 1 { -1.0 } else { 1.0 };
                }
                group.push(q);
            }
        }
        assert_eq!(group.len(), 48);
        assert!(group.iter().all(|q| q.transpose() * q == Matrix3::identity()));
        group
    })
}
