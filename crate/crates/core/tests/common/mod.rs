#![allow(dead_code)]

use num_complex::Complex64;
use qramforge::sim::{StateVector, UnitaryMatrix};
use qramforge::{Circuit, Gate};

pub fn circuit(wires: usize, gates: impl IntoIterator<Item = Gate>) -> Circuit {
    let mut c = Circuit::with_wires((0..wires).map(|i| format!("w{i}"))).unwrap();
    c.extend(gates).unwrap();
    c
}

/// Bits of a dense basis index, wire 0 first (wire 0 is the most significant bit).
pub fn bits_of(wires: usize, index: usize) -> Vec<bool> {
    (0..wires).map(|k| (index >> (wires - 1 - k)) & 1 == 1).collect()
}

pub fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

/// Unitary of a classical reversible map written directly on bit vectors,
/// with an optional phase per input.
pub fn reference_unitary(
    wires: usize,
    f: impl Fn(&mut Vec<bool>) -> Complex64,
) -> UnitaryMatrix {
    let dim = 1 << wires;
    let mut perm = vec![0; dim];
    let mut phases = vec![Complex64::new(1.0, 0.0); dim];
    for (i, slot) in perm.iter_mut().enumerate() {
        let mut b = bits_of(wires, i);
        phases[i] = f(&mut b);
        *slot = index_of(&b);
    }
    UnitaryMatrix::from_permutation(&perm).mul(&UnitaryMatrix::diagonal(&phases))
}

pub fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `(-i)^k`
pub fn minus_i_pow(k: usize) -> Complex64 {
    [one(), Complex64::new(0.0, -1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0)][k % 4]
}

pub fn max_diff(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
