//! Spin coupling: Clebsch-Gordan coefficients, the |S, S_M, S_L⟩ basis
//! over the neutral determinants, the total-spin operator and the
//! decomposition of eigenvectors into local-spin weights.
//!
//! Condon-Shortley phases throughout; only squared weights are reported
//! externally, but coefficient-level goldens assume that convention.

use std::collections::BTreeMap;

use ndarray::Array2;
use thiserror::Error;

use crate::determinant::{ConfigSpace, Determinant};
use crate::eigen::{eigh, EigenError};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("input vector norm {norm} deviates from 1 by more than 1e-10")]
    NormError { norm: f64 },
}

/// Clebsch-Gordan coefficient ⟨j1 m1; j2 m2 | J M⟩ with all spins passed
/// doubled (so j = 1/2 is 1). Returns 0 for forbidden combinations.
pub fn clebsch_gordan<T: Real>(
    two_j1: i32,
    two_m1: i32,
    two_j2: i32,
    two_m2: i32,
    two_j: i32,
    two_m: i32,
) -> T {
    if two_m1 + two_m2 != two_m {
        return T::zero();
    }
    if two_m1.abs() > two_j1 || two_m2.abs() > two_j2 || two_m.abs() > two_j {
        return T::zero();
    }
    if two_j < (two_j1 - two_j2).abs() || two_j > two_j1 + two_j2 {
        return T::zero();
    }
    if (two_j1 + two_j2 + two_j) % 2 != 0
        || (two_j1 + two_m1) % 2 != 0
        || (two_j2 + two_m2) % 2 != 0
    {
        return T::zero();
    }

    fn fact(n: i32) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }
    let half = |x: i32| -> i32 {
        debug_assert!(x % 2 == 0);
        x / 2
    };

    let pref = (two_j + 1) as f64
        * fact(half(two_j1 + two_j2 - two_j))
        * fact(half(two_j1 - two_j2 + two_j))
        * fact(half(-two_j1 + two_j2 + two_j))
        / fact(half(two_j1 + two_j2 + two_j) + 1)
        * fact(half(two_j + two_m))
        * fact(half(two_j - two_m))
        * fact(half(two_j1 - two_m1))
        * fact(half(two_j1 + two_m1))
        * fact(half(two_j2 - two_m2))
        * fact(half(two_j2 + two_m2));

    let mut sum = 0.0f64;
    for k in 0..=half(two_j1 + two_j2 - two_j) {
        let d1 = half(two_j1 + two_j2 - two_j) - k;
        let d2 = half(two_j1 - two_m1) - k;
        let d3 = half(two_j2 + two_m2) - k;
        let d4 = half(two_j - two_j2 + two_m1) + k;
        let d5 = half(two_j - two_j1 - two_m2) + k;
        if d1 < 0 || d2 < 0 || d3 < 0 || d4 < 0 || d5 < 0 {
            continue;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / (fact(k) * fact(d1) * fact(d2) * fact(d3) * fact(d4) * fact(d5));
    }
    T::of(pref.sqrt() * sum)
}

/// (S, S_M, S_L) labels of the spin-coupled basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinLabel {
    pub s_total: u8,
    pub s_m: u8,
    pub s_l: u8,
}

/// The six admissible labels, in the fixed reporting order
/// (000, 011, 101, 110, 111, 211).
pub const LABELS: [SpinLabel; 6] = [
    SpinLabel {
        s_total: 0,
        s_m: 0,
        s_l: 0,
    },
    SpinLabel {
        s_total: 0,
        s_m: 1,
        s_l: 1,
    },
    SpinLabel {
        s_total: 1,
        s_m: 0,
        s_l: 1,
    },
    SpinLabel {
        s_total: 1,
        s_m: 1,
        s_l: 0,
    },
    SpinLabel {
        s_total: 1,
        s_m: 1,
        s_l: 1,
    },
    SpinLabel {
        s_total: 2,
        s_m: 1,
        s_l: 1,
    },
];

/// One |S, S_M, S_L⟩ state expanded over the six neutral determinants
/// (lexicographic order).
#[derive(Clone, Debug)]
pub struct SpinCoupledState<T> {
    pub label: SpinLabel,
    pub coeffs: [T; 6],
}

fn neutral_index(det: Determinant) -> usize {
    // lexicographic rank of the up-mask among the C(4,2) masks
    const UPS: [u8; 6] = [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100];
    UPS.iter()
        .position(|&u| u == det.up_occ())
        .expect("neutral determinant")
}

/// Couple (φ_M, φ_M') to S_M and (φ_L1, φ_L2) to S_L, then both to S at
/// M_S = 0, expanding into the neutral determinants with canonical phases.
pub fn coupled_basis<T: Real>() -> [SpinCoupledState<T>; 6] {
    LABELS.map(|label| {
        let mut coeffs = [T::zero(); 6];
        let two_sm = 2 * label.s_m as i32;
        let two_sl = 2 * label.s_l as i32;
        let two_s = 2 * label.s_total as i32;
        for two_mm in (-two_sm..=two_sm).step_by(2) {
            let two_ml = -two_mm;
            let top: T = clebsch_gordan(two_sm, two_mm, two_sl, two_ml, two_s, 0);
            if top == T::zero() {
                continue;
            }
            // spin assignments: +1 = up, -1 = down per orbital
            for sm in [1i32, -1] {
                for smp in [1i32, -1] {
                    let cm: T = clebsch_gordan(1, sm, 1, smp, two_sm, two_mm);
                    if cm == T::zero() {
                        continue;
                    }
                    for sl1 in [1i32, -1] {
                        for sl2 in [1i32, -1] {
                            let cl: T = clebsch_gordan(1, sl1, 1, sl2, two_sl, two_ml);
                            if cl == T::zero() {
                                continue;
                            }
                            let mut up = 0u8;
                            let mut dn = 0u8;
                            for (orb, s) in [(0, sl1), (1, sm), (2, smp), (3, sl2)] {
                                if s > 0 {
                                    up |= 1 << orb;
                                } else {
                                    dn |= 1 << orb;
                                }
                            }
                            let det = Determinant::new(up, dn);
                            coeffs[neutral_index(det)] += top * cm * cl;
                        }
                    }
                }
            }
        }
        SpinCoupledState { label, coeffs }
    })
}

// --- total-spin operator via ladder operators ------------------------------

type Ket<T> = BTreeMap<(u8, u8), T>;

fn sign_below(up: u8, dn: u8, so_index: usize) -> i32 {
    let mut count = 0;
    for i in 0..so_index {
        let orb = i / 2;
        let mask = if i % 2 == 0 { up } else { dn };
        count += (mask >> orb) & 1;
    }
    if count % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Apply Σ_p c†_{p,to} c_{p,from} (a spin ladder term) to a ket.
fn apply_ladder<T: Real>(state: &Ket<T>, raise: bool) -> Ket<T> {
    let mut out = Ket::new();
    for (&(up, dn), &c) in state {
        for p in 0..4u8 {
            let (has_from, has_to) = if raise {
                ((dn >> p) & 1 == 1, (up >> p) & 1 == 1)
            } else {
                ((up >> p) & 1 == 1, (dn >> p) & 1 == 1)
            };
            if !has_from || has_to {
                continue;
            }
            let (from_idx, to_idx) = if raise {
                (2 * p as usize + 1, 2 * p as usize)
            } else {
                (2 * p as usize, 2 * p as usize + 1)
            };
            let s1 = sign_below(up, dn, from_idx);
            let (mid_up, mid_dn) = if raise {
                (up, dn & !(1 << p))
            } else {
                (up & !(1 << p), dn)
            };
            let s2 = sign_below(mid_up, mid_dn, to_idx);
            let (new_up, new_dn) = if raise {
                (mid_up | (1 << p), mid_dn)
            } else {
                (mid_up, mid_dn | (1 << p))
            };
            let amp = c * T::from_i32(s1 * s2).unwrap();
            *out.entry((new_up, new_dn)).or_insert_with(T::zero) += amp;
        }
    }
    out
}

/// Matrix of total S² = S⁻S⁺ + S_z(S_z + 1) in the determinant basis of
/// `space` (doubly occupied orbitals carry zero spin).
pub fn s2_matrix<T: Real>(space: &ConfigSpace) -> Array2<T> {
    let n = space.len();
    let mut m = Array2::<T>::zeros((n, n));
    for (j, &det) in space.dets.iter().enumerate() {
        let mut ket = Ket::new();
        ket.insert((det.up_occ(), det.dn_occ()), T::one());
        let raised = apply_ladder(&ket, true);
        let lowered = apply_ladder(&raised, false);
        let two_ms = det.two_m_s();
        let sz_term = T::of(two_ms as f64 / 2.0) * T::of(two_ms as f64 / 2.0 + 1.0);
        for (i, &other) in space.dets.iter().enumerate() {
            let mut v = lowered
                .get(&(other.up_occ(), other.dn_occ()))
                .copied()
                .unwrap_or_else(T::zero);
            if i == j {
                v += sz_term;
            }
            m[(i, j)] = v;
        }
    }
    m
}

/// Eigenvalue gap below which states count as degenerate and get rotated
/// to diagonalize S² within the cluster.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// Diagonalized block with total-spin labels per eigenstate.
#[derive(Clone, Debug)]
pub struct LabeledStates<T> {
    pub energies: Vec<T>,
    /// Column k is eigenstate k, possibly rotated within degenerate
    /// clusters so S² is diagonal.
    pub vectors: Array2<T>,
    pub s_total: Vec<u8>,
}

/// Diagonalize a symmetric matrix over `space` and label each eigenstate
/// by its total spin from the S² expectation value.
pub fn diagonalize_and_label<T: Real>(
    matrix: &Array2<T>,
    space: &ConfigSpace,
) -> Result<LabeledStates<T>, EigenError> {
    let n = space.len();
    let decomp = eigh(matrix)?;
    let s2 = s2_matrix::<T>(space);
    let mut vectors = decomp.vectors;
    let values = decomp.values;

    // rotate degenerate clusters to diagonalize S²
    let gap = T::of(DEGENERACY_GAP);
    let mut start = 0;
    while start < n {
        let mut end = start;
        while end + 1 < n && (values[end + 1] - values[start]).abs() < gap {
            end += 1;
        }
        if end > start {
            let k = end - start + 1;
            let mut sub = Array2::<T>::zeros((k, k));
            for a in 0..k {
                for b in 0..k {
                    let mut acc = T::zero();
                    for i in 0..n {
                        for j in 0..n {
                            acc += vectors[(i, start + a)] * s2[(i, j)] * vectors[(j, start + b)];
                        }
                    }
                    sub[(a, b)] = acc;
                }
            }
            let rot = eigh(&sub)?;
            let mut rotated = Array2::<T>::zeros((n, k));
            for i in 0..n {
                for b in 0..k {
                    let mut acc = T::zero();
                    for a in 0..k {
                        acc += vectors[(i, start + a)] * rot.vectors[(a, b)];
                    }
                    rotated[(i, b)] = acc;
                }
            }
            for b in 0..k {
                // restore the deterministic sign convention per column
                let mut best = 0;
                for i in 1..n {
                    if rotated[(i, b)].abs() > rotated[(best, b)].abs() {
                        best = i;
                    }
                }
                let flip = rotated[(best, b)] < T::zero();
                for i in 0..n {
                    vectors[(i, start + b)] = if flip {
                        -rotated[(i, b)]
                    } else {
                        rotated[(i, b)]
                    };
                }
            }
        }
        start = end + 1;
    }

    let mut s_total = Vec::with_capacity(n);
    for k in 0..n {
        let mut expect = T::zero();
        for i in 0..n {
            for j in 0..n {
                expect += vectors[(i, k)] * s2[(i, j)] * vectors[(j, k)];
            }
        }
        let x = expect.to_f64().unwrap();
        let s = (-1.0 + (1.0 + 4.0 * x).sqrt()) / 2.0;
        s_total.push(s.round() as u8);
    }

    Ok(LabeledStates {
        energies: values,
        vectors,
        s_total,
    })
}

/// Squared weights of a unit vector on the six coupled states.
#[derive(Clone, Debug)]
pub struct DecomposedState<T> {
    /// Weight per label, in `LABELS` order.
    pub weights: [T; 6],
    /// Sector inferred from the dominant labels.
    pub s_total: u8,
    /// Weight on the S_M = 1 metal channel within the sector.
    pub w_sm1: T,
    /// Complement within the sector (S_M = 0 channel).
    pub w_sm0: T,
}

/// Project a unit-norm neutral-space vector onto the coupled basis.
pub fn decompose<T: Real>(
    vec: &[T],
    basis: &[SpinCoupledState<T>; 6],
) -> Result<DecomposedState<T>, SpinError> {
    assert_eq!(vec.len(), 6);
    let norm = vec.iter().map(|&x| x * x).sum::<T>().sqrt();
    if (norm - T::one()).abs() > T::of(1e-10) {
        return Err(SpinError::NormError {
            norm: norm.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut weights = [T::zero(); 6];
    for (k, state) in basis.iter().enumerate() {
        let mut proj = T::zero();
        for d in 0..6 {
            proj += state.coeffs[d] * vec[d];
        }
        weights[k] = proj * proj;
    }
    // sector with the dominant summed weight
    let mut sector_weight = [T::zero(); 3];
    for (k, label) in LABELS.iter().enumerate() {
        sector_weight[label.s_total as usize] += weights[k];
    }
    let mut s_total = 0u8;
    for s in 1..3 {
        if sector_weight[s] > sector_weight[s_total as usize] {
            s_total = s as u8;
        }
    }
    let (w_sm1, w_sm0) = match s_total {
        0 => (weights[1], weights[0]),
        1 => (weights[4] + weights[3], weights[2]),
        _ => (weights[5], T::zero()),
    };
    Ok(DecomposedState {
        weights,
        s_total,
        w_sm1,
        w_sm0,
    })
}

/// Per-eigenstate energies, spin labels and local-spin weights.
#[derive(Clone, Debug)]
pub struct WeightRow<T> {
    pub energy: T,
    pub s_total: u8,
    pub weights: [T; 6],
    pub w_sm1: T,
    pub w_sm0: T,
}

#[derive(Clone, Debug)]
pub struct WeightTable<T> {
    pub rows: Vec<WeightRow<T>>,
}

/// Decompose every eigenstate of a labeled neutral-space block.
pub fn weight_table<T: Real>(labeled: &LabeledStates<T>) -> Result<WeightTable<T>, SpinError> {
    let basis = coupled_basis::<T>();
    let mut rows = Vec::with_capacity(labeled.energies.len());
    for k in 0..labeled.energies.len() {
        let vec: Vec<T> = labeled.vectors.column(k).to_vec();
        let d = decompose(&vec, &basis)?;
        rows.push(WeightRow {
            energy: labeled.energies[k],
            s_total: labeled.s_total[k],
            weights: d.weights,
            w_sm1: d.w_sm1,
            w_sm0: d.w_sm0,
        });
    }
    Ok(WeightTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{validate, ModelParams};
    use crate::determinant::{enumerate_space, SpaceKind};
    use crate::hamiltonian::{build_full_h, build_h0};

    fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }

    #[test]
    fn cg_reference_values() {
        let cases: Vec<(i32, i32, i32, i32, i32, i32, f64)> = vec![
            (1, 1, 1, -1, 0, 0, 1.0 / sqrt(2.0)),
            (1, -1, 1, 1, 0, 0, -1.0 / sqrt(2.0)),
            (1, 1, 1, -1, 2, 0, 1.0 / sqrt(2.0)),
            (2, 2, 2, -2, 4, 0, 1.0 / sqrt(6.0)),
            (2, 0, 2, 0, 4, 0, sqrt(2.0 / 3.0)),
            (2, 2, 2, -2, 2, 0, 1.0 / sqrt(2.0)),
            (2, 0, 2, 0, 2, 0, 0.0),
            (2, 2, 2, -2, 0, 0, 1.0 / sqrt(3.0)),
            (2, 0, 2, 0, 0, 0, -1.0 / sqrt(3.0)),
        ];
        for (j1, m1, j2, m2, j, m, expect) in cases {
            let got: f64 = clebsch_gordan(j1, m1, j2, m2, j, m);
            assert!(
                (got - expect).abs() < 1e-14,
                "cg({j1},{m1};{j2},{m2}|{j},{m}) = {got}, expected {expect}"
            );
        }
    }

    #[test]
    fn cg_forbidden_combinations_vanish() {
        assert_eq!(clebsch_gordan::<f64>(1, 1, 1, 1, 0, 2), 0.0); // M mismatch handled
        assert_eq!(clebsch_gordan::<f64>(1, 1, 1, 1, 0, 0), 0.0); // M ≠ m1+m2
        assert_eq!(clebsch_gordan::<f64>(1, 1, 1, -1, 6, 0), 0.0); // triangle
        assert_eq!(clebsch_gordan::<f64>(1, 3, 1, -1, 2, 2), 0.0); // |m| > j
    }

    /// Independent oracle: build coupled states by lowering from the
    /// stretched state and Gram-Schmidt within each M subspace, then
    /// compare against the closed-form coefficients.
    #[test]
    fn cg_matches_lowering_operator_construction() {
        for &two_j1 in &[1, 2] {
            for &two_j2 in &[1, 2] {
                lowering_check(two_j1, two_j2);
            }
        }
    }

    fn lowering_check(two_j1: i32, two_j2: i32) {
        let dim1 = (two_j1 + 1) as usize;
        let dim2 = (two_j2 + 1) as usize;
        let idx = |two_m1: i32, two_m2: i32| -> usize {
            let i1 = ((two_j1 - two_m1) / 2) as usize;
            let i2 = ((two_j2 - two_m2) / 2) as usize;
            i1 * dim2 + i2
        };
        let lower_amp = |two_j: i32, two_m: i32| -> f64 {
            let j = two_j as f64 / 2.0;
            let m = two_m as f64 / 2.0;
            (j * (j + 1.0) - m * (m - 1.0)).sqrt()
        };
        // build all |J M⟩ top-down
        let mut states: Vec<(i32, i32, Vec<f64>)> = Vec::new();
        let mut two_j = two_j1 + two_j2;
        while two_j >= (two_j1 - two_j2).abs() {
            let mut v = vec![0.0; dim1 * dim2];
            if two_j == two_j1 + two_j2 {
                v[idx(two_j1, two_j2)] = 1.0;
            } else {
                // orthogonal complement within the M = J subspace,
                // Condon-Shortley sign: coefficient of max m1 positive
                let mut candidates: Vec<usize> = Vec::new();
                for two_m1 in (-two_j1..=two_j1).step_by(2) {
                    let two_m2 = two_j - two_m1;
                    if two_m2.abs() <= two_j2 {
                        candidates.push(idx(two_m1, two_m2));
                    }
                }
                // start from an arbitrary vector in the subspace and project
                // out every higher-J state at this M
                v[candidates[0]] = 1.0;
                for (tj, tm, w) in &states {
                    if *tm == two_j && *tj > two_j {
                        let dot: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
                        for (x, y) in v.iter_mut().zip(w) {
                            *x -= dot * y;
                        }
                    }
                }
                let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                for x in v.iter_mut() {
                    *x /= nrm;
                }
                // CS sign: the component with the largest m1 is positive
                let lead = idx(
                    two_j1.min(two_j + two_j2),
                    two_j - two_j1.min(two_j + two_j2),
                );
                if v[lead] < 0.0 {
                    for x in v.iter_mut() {
                        *x = -*x;
                    }
                }
            }
            states.push((two_j, two_j, v.clone()));
            // lower all the way down
            let mut two_m = two_j;
            let mut cur = v;
            while two_m - 2 >= -two_j {
                let mut nxt = vec![0.0; dim1 * dim2];
                for two_m1 in (-two_j1..=two_j1).step_by(2) {
                    for two_m2 in (-two_j2..=two_j2).step_by(2) {
                        let c = cur[idx(two_m1, two_m2)];
                        if c == 0.0 {
                            continue;
                        }
                        if two_m1 - 2 >= -two_j1 {
                            nxt[idx(two_m1 - 2, two_m2)] += c * lower_amp(two_j1, two_m1);
                        }
                        if two_m2 - 2 >= -two_j2 {
                            nxt[idx(two_m1, two_m2 - 2)] += c * lower_amp(two_j2, two_m2);
                        }
                    }
                }
                let denom = lower_amp(two_j, two_m);
                for x in nxt.iter_mut() {
                    *x /= denom;
                }
                two_m -= 2;
                states.push((two_j, two_m, nxt.clone()));
                cur = nxt;
            }
            two_j -= 2;
        }
        for (tj, tm, v) in states {
            for two_m1 in (-two_j1..=two_j1).step_by(2) {
                for two_m2 in (-two_j2..=two_j2).step_by(2) {
                    let expect = v[idx(two_m1, two_m2)];
                    let got: f64 = clebsch_gordan(two_j1, two_m1, two_j2, two_m2, tj, tm);
                    assert!(
                        (got - expect).abs() < 1e-12,
                        "cg({two_j1},{two_m1};{two_j2},{two_m2}|{tj},{tm}): {got} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn coupled_basis_is_orthonormal() {
        let basis = coupled_basis::<f64>();
        for (a, sa) in basis.iter().enumerate() {
            for (b, sb) in basis.iter().enumerate() {
                let dot: f64 = (0..6).map(|d| sa.coeffs[d] * sb.coeffs[d]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn singlet_singlet_product_state_coefficients() {
        // |0,0,0⟩ spreads over four determinants with coefficients ±1/2
        let basis = coupled_basis::<f64>();
        let expect = [0.5, -0.5, 0.0, 0.0, -0.5, 0.5];
        for d in 0..6 {
            assert!((basis[0].coeffs[d] - expect[d]).abs() < 1e-14);
        }
    }

    #[test]
    fn quintet_is_the_symmetric_combination() {
        let basis = coupled_basis::<f64>();
        let c = 1.0 / 6.0f64.sqrt();
        for d in 0..6 {
            assert!((basis[5].coeffs[d] - c).abs() < 1e-14);
        }
    }

    #[test]
    fn quintet_h0_eigenvalue_is_fully_ferromagnetic() {
        let p = validate(ModelParams {
            k_m: 0.9,
            k1: 0.2,
            k2: 0.3,
            kp1: 0.4,
            kp2: 0.5,
            eps_mprime: 0.1,
            eps_l1: -0.2,
            eps_l2: 0.3,
            u_m: 0.0,
            u_l: 0.0,
            t: 0.0,
        })
        .unwrap();
        let h0 = build_h0(&p);
        let basis = coupled_basis::<f64>();
        let q = &basis[5].coeffs;
        let e0 = 0.1 - 0.2 + 0.3;
        let expect = e0 - (0.9 + 0.2 + 0.3 + 0.4 + 0.5);
        for i in 0..6 {
            let mut hq = 0.0;
            for j in 0..6 {
                hq += h0.matrix[(i, j)] * q[j];
            }
            assert!((hq - expect * q[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn s2_eigenvalues_on_coupled_states() {
        let neutral = enumerate_space(SpaceKind::Neutral);
        let s2 = s2_matrix::<f64>(&neutral);
        let basis = coupled_basis::<f64>();
        for state in &basis {
            let s = state.label.s_total as f64;
            let mut expect_val = 0.0;
            for i in 0..6 {
                for j in 0..6 {
                    expect_val += state.coeffs[i] * s2[(i, j)] * state.coeffs[j];
                }
            }
            assert!((expect_val - s * (s + 1.0)).abs() < 1e-12);
        }
        let trace: f64 = (0..6).map(|i| s2[(i, i)]).sum();
        assert!((trace - 12.0).abs() < 1e-12, "Σ S(S+1) over the six labels");
    }

    #[test]
    fn s2_commutes_with_the_hamiltonian() {
        let p = validate(ModelParams {
            k_m: 1.0,
            k1: 0.35,
            k2: 0.10,
            kp1: 0.58,
            kp2: 0.75,
            eps_mprime: 0.80,
            eps_l1: -2.80,
            eps_l2: -1.50,
            u_m: 4.0,
            u_l: 2.95,
            t: 0.52,
        })
        .unwrap();
        for block in [build_h0(&p), build_full_h(&p)] {
            let s2 = s2_matrix::<f64>(&block.space);
            let n = block.space.len();
            let mut worst = 0.0f64;
            for i in 0..n {
                for j in 0..n {
                    let mut comm = 0.0;
                    for k in 0..n {
                        comm +=
                            block.matrix[(i, k)] * s2[(k, j)] - s2[(i, k)] * block.matrix[(k, j)];
                    }
                    worst = worst.max(comm.abs());
                }
            }
            assert!(worst <= 1e-12, "‖[H, S²]‖_max = {worst}");
        }
    }

    #[test]
    fn decompose_rejects_non_unit_vectors() {
        let basis = coupled_basis::<f64>();
        let v = [0.5, 0.5, 0.5, 0.5, 0.5, 0.5];
        match decompose(&v, &basis) {
            Err(SpinError::NormError { norm }) => assert!((norm - 1.5f64.sqrt()).abs() < 1e-12),
            other => panic!("expected NormError, got {other:?}"),
        }
    }

    #[test]
    fn decompose_identifies_the_quintet() {
        let basis = coupled_basis::<f64>();
        let v = basis[5].coeffs;
        let d = decompose(&v, &basis).unwrap();
        assert_eq!(d.s_total, 2);
        assert!((d.weights[5] - 1.0).abs() < 1e-14);
        assert!((d.w_sm1 - 1.0).abs() < 1e-14);
        assert_eq!(d.w_sm0, 0.0);
    }

    fn second_lowest_triplet(table: &WeightTable<f64>) -> &WeightRow<f64> {
        let mut triplets: Vec<&WeightRow<f64>> =
            table.rows.iter().filter(|r| r.s_total == 1).collect();
        triplets.sort_by(|a, b| {
            a.energy
                .partial_cmp(&b.energy)
                .unwrap()
                .then(b.weights[4].partial_cmp(&a.weights[4]).unwrap())
        });
        triplets[1]
    }

    fn mixing_case(k: f64, kp1: f64, kp2: f64) -> WeightTable<f64> {
        let p = validate(ModelParams {
            k_m: 1.0,
            k1: k,
            k2: k,
            kp1,
            kp2,
            eps_mprime: 0.0,
            eps_l1: 0.0,
            eps_l2: 0.0,
            u_m: 0.0,
            u_l: 0.0,
            t: 0.0,
        })
        .unwrap();
        let h0 = build_h0(&p);
        let labeled = diagonalize_and_label(&h0.matrix, &h0.space).unwrap();
        weight_table(&labeled).unwrap()
    }

    #[test]
    fn reference_mixing_proportions_reproduce() {
        // frozen full-precision values; the bundled reference table rounds them to
        // 81/19, 90/10, 79/21 and 86/14 percent
        let cases = [
            (0.25, 0.60, 0.80, 0.81213082413810578),
            (0.50, 0.60, 0.80, 0.90140084799237119),
            (0.25, 0.75, 0.75, 0.78867513459481209),
            (0.50, 0.75, 0.75, 0.86380343755449918),
        ];
        for (k, kp1, kp2, expect) in cases {
            let table = mixing_case(k, kp1, kp2);
            let row = second_lowest_triplet(&table);
            assert!(
                (row.w_sm1 - expect).abs() < 1e-12,
                "k={k}: w_sm1 = {} vs {expect}",
                row.w_sm1
            );
            assert!((row.w_sm0 - (1.0 - expect)).abs() < 1e-12);
        }
    }

    #[test]
    fn weights_sum_to_one_and_stay_in_sector() {
        let table = mixing_case(0.25, 0.60, 0.80);
        for row in &table.rows {
            let total: f64 = row.weights.iter().sum();
            assert!((total - 1.0).abs() <= 1e-12);
            for (k, label) in LABELS.iter().enumerate() {
                if label.s_total != row.s_total {
                    assert!(
                        row.weights[k] <= 1e-12,
                        "cross-sector leak {}",
                        row.weights[k]
                    );
                }
            }
        }
    }

    #[test]
    fn td_symmetry_decouples_the_metal_singlet_triplet() {
        // K₁=K₂, K'₁=K'₂: one triplet is exactly |1,1,0⟩, the other two mix
        // only {(1,1,1), (1,0,1)}
        let table = mixing_case(0.25, 0.75, 0.75);
        let triplets: Vec<&WeightRow<f64>> = table.rows.iter().filter(|r| r.s_total == 1).collect();
        let pure: Vec<_> = triplets.iter().filter(|r| r.weights[3] > 0.5).collect();
        assert_eq!(pure.len(), 1);
        assert!((pure[0].weights[3] - 1.0).abs() <= 1e-12);
        for r in triplets.iter().filter(|r| r.weights[3] <= 0.5) {
            assert!(r.weights[3] <= 1e-12, "cross-weight into |1,1,0⟩");
        }
    }

    #[test]
    fn balanced_couplings_conserve_metal_spin() {
        // K₁=K'₁ and K₂=K'₂: [H₀, S_M²] = 0, every eigenstate has pure S_M
        let p = validate(ModelParams::<f64> {
            k_m: 1.0,
            k1: 0.4,
            k2: 0.7,
            kp1: 0.4,
            kp2: 0.7,
            eps_mprime: 0.0,
            eps_l1: 0.0,
            eps_l2: 0.0,
            u_m: 0.0,
            u_l: 0.0,
            t: 0.0,
        })
        .unwrap();
        let h0 = build_h0(&p);
        let labeled = diagonalize_and_label(&h0.matrix, &h0.space).unwrap();
        let table = weight_table(&labeled).unwrap();
        for row in &table.rows {
            let total = row.w_sm1 + row.w_sm0;
            let pure = row.w_sm1 <= 1e-12 || (row.w_sm1 - total).abs() <= 1e-12;
            assert!(
                pure,
                "mixed S_M weight {} found in the balanced limit",
                row.w_sm1
            );
        }
    }

    #[test]
    fn labels_match_weight_sectors() {
        let table = mixing_case(0.3, 0.6, 0.9);
        let counts =
            [0usize, 1, 2].map(|s| table.rows.iter().filter(|r| r.s_total == s as u8).count());
        assert_eq!(counts, [2, 3, 1]);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn any_unit_vector_decomposes_to_unit_weight(raw in prop::array::uniform6(-1.0f64..1.0)) {
                let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
                prop_assume!(norm > 1e-3);
                let v: Vec<f64> = raw.iter().map(|x| x / norm).collect();
                let basis = coupled_basis::<f64>();
                let d = decompose(&v, &basis).unwrap();
                let total: f64 = d.weights.iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }
}
