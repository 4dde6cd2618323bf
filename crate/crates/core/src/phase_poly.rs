//! Phase polynomials of CNOT + diagonal circuits.
//!
//! Every wire carries a parity of the input variables (a bit mask). A phase
//! gate on a wire adds its pi/4 units to the coefficient of that parity.

use std::collections::BTreeMap;

use crate::error::DecomposeError;
use crate::gate::{Gate, GateKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePolynomial {
    pub variables: usize,
    /// Parity mask -> coefficient in units of pi/4, mod 8. Zero entries are omitted.
    pub coefficients: BTreeMap<u64, u8>,
    /// Final parity carried by each wire.
    pub parities: Vec<u64>,
}

impl PhasePolynomial {
    pub fn coefficient(&self, mask: u64) -> u8 {
        self.coefficients.get(&mask).copied().unwrap_or(0)
    }

    /// Every wire ends on its own input variable.
    pub fn parities_restored(&self) -> bool {
        self.parities.iter().enumerate().all(|(i, &p)| p == 1 << i)
    }

    /// Phase (units of pi/4, mod 8) picked up by input basis state `x`
    /// (bit i of `x` is variable i).
    pub fn evaluate(&self, x: u64) -> u8 {
        self.coefficients
            .iter()
            .filter(|(&mask, _)| (mask & x).count_ones() % 2 == 1)
            .fold(0u8, |acc, (_, &c)| (acc + c) % 8)
    }

    /// Coefficients of CCZ on variables `(x, y, z)`:
    /// `4xyz = x + y + z - (x^y) - (y^z) - (x^z) + (x^y^z)`.
    pub fn ccz_pattern(x: usize, y: usize, z: usize) -> BTreeMap<u64, u8> {
        let (x, y, z) = (1u64 << x, 1u64 << y, 1u64 << z);
        [(x, 1), (y, 1), (z, 1), (x | y, 7), (y | z, 7), (x | z, 7), (x | y | z, 1)]
            .into_iter()
            .collect()
    }

    pub fn is_ccz_on(&self, x: usize, y: usize, z: usize) -> bool {
        self.coefficients == Self::ccz_pattern(x, y, z)
    }
}

/// Symbolic evaluation over `variables` wires of a CX / fan-out / diagonal gate list.
pub fn phase_polynomial_of(gates: &[Gate], variables: usize) -> Result<PhasePolynomial, DecomposeError> {
    if variables > 64 {
        return Err(DecomposeError::TooManyVariables(variables));
    }
    let mut parities: Vec<u64> = (0..variables).map(|i| 1u64 << i).collect();
    let mut coeffs: BTreeMap<u64, u8> = BTreeMap::new();
    for g in gates {
        if let Some(w) = g.wires().find(|w| w.0 >= variables) {
            return Err(crate::error::IrError::UnknownWireId(w).into());
        }
        match g.kind {
            GateKind::Cx | GateKind::McxFanout => {
                let c = parities[g.controls[0].wire.0];
                for t in &g.targets {
                    parities[t.0] ^= c;
                }
            }
            k if k.is_diagonal_1q() => {
                let p = parities[g.targets[0].0];
                let units = k.phase_units().expect("diagonal");
                let e = coeffs.entry(p).or_insert(0);
                *e = (*e + units) % 8;
            }
            k => return Err(DecomposeError::NonLinearFragment(k)),
        }
    }
    coeffs.retain(|_, c| *c != 0);
    Ok(PhasePolynomial { variables, coefficients: coeffs, parities })
}
