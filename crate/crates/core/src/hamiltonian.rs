//! Restricted integral dictionary and Hamiltonian assembly.
//!
//! The model's two-electron dictionary holds only on-site repulsions U_p,
//! the direct exchange map K(p,q) and a uniform ligand-metal hopping t;
//! every other integral (inter-orbital Coulomb, three- and four-index
//! terms) is identically zero. Matrix elements follow the Slater-Condon
//! rules specialized to that dictionary.

use ndarray::Array2;

use crate::config::ValidatedParams;
use crate::determinant::{
    enumerate_space, excitation_info, ConfigSpace, Determinant, SpaceKind, LIGAND_ORBITALS,
    METAL_ORBITALS,
};
use crate::scalar::Real;

/// One- and two-electron integrals of the model.
#[derive(Clone, Debug)]
pub struct IntegralTable<T> {
    /// ε_p relative to φ_M: [ε₁, 0, ε_M', ε₂] in orbital order.
    pub orbital_energy: [T; 4],
    /// Hopping amplitudes t_pq; non-zero only on ligand-metal pairs.
    pub hopping: [[T; 4]; 4],
    /// Direct exchange K(p,q), symmetric, with K(L1,L2) = 0.
    pub exchange: [[T; 4]; 4],
    /// On-site repulsion U_p per orbital.
    pub on_site: [T; 4],
}

/// Fill the integral table from a validated parameter set.
pub fn build_integral_table<T: Real>(p: &ValidatedParams<T>) -> IntegralTable<T> {
    let z = T::zero();
    let mut tab = IntegralTable {
        orbital_energy: [p.eps_l1, z, p.eps_mprime, p.eps_l2],
        hopping: [[z; 4]; 4],
        exchange: [[z; 4]; 4],
        on_site: [p.u_l, p.u_m, p.u_m, p.u_l],
    };
    for l in LIGAND_ORBITALS {
        for m in METAL_ORBITALS {
            tab.hopping[l][m] = p.t;
            tab.hopping[m][l] = p.t;
        }
    }
    let mut set_k = |a: usize, b: usize, k: T| {
        tab.exchange[a][b] = k;
        tab.exchange[b][a] = k;
    };
    set_k(0, 1, p.k1); // K(L1, M)
    set_k(3, 1, p.k2); // K(L2, M)
    set_k(0, 2, p.kp1); // K(L1, M')
    set_k(3, 2, p.kp2); // K(L2, M')
    set_k(1, 2, p.k_m); // K(M, M')
    tab
}

/// Slater-Condon matrix element ⟨a|H|b⟩ under the restricted dictionary.
pub fn matrix_element<T: Real>(a: Determinant, b: Determinant, tab: &IntegralTable<T>) -> T {
    let info = excitation_info(a, b);
    match info.degree {
        0 => {
            let mut e = T::zero();
            for p in 0..4 {
                let occ = a.occ(p);
                e += tab.orbital_energy[p] * T::from_u8(occ).unwrap();
                if occ == 2 {
                    e += tab.on_site[p];
                }
            }
            for p in 0..4 {
                for q in (p + 1)..4 {
                    let up_pair = (a.up_occ() >> p) & (a.up_occ() >> q) & 1;
                    let dn_pair = (a.dn_occ() >> p) & (a.dn_occ() >> q) & 1;
                    let same_spin_pairs = up_pair + dn_pair;
                    e -= tab.exchange[p][q] * T::from_u8(same_spin_pairs).unwrap();
                }
            }
            e
        }
        1 => {
            let h = info.holes[0];
            let part = info.particles[0];
            if h.spin != part.spin {
                return T::zero();
            }
            let sign = T::from_i32(info.parity).unwrap();
            sign * tab.hopping[h.orbital][part.orbital]
        }
        2 => {
            let (h1, h2) = (info.holes[0], info.holes[1]);
            let (p1, p2) = (info.particles[0], info.particles[1]);
            // Opposite-spin exchange within one orbital pair: both spins
            // flip in place. In the ascending hole-particle pairing this is
            // the crossed match, hence the extra minus sign.
            let is_flip = h1.orbital != h2.orbital
                && h1.orbital == p1.orbital
                && h2.orbital == p2.orbital
                && h1.spin != p1.spin
                && h2.spin != p2.spin
                && h1.spin != h2.spin;
            if is_flip {
                let sign = T::from_i32(-info.parity).unwrap();
                sign * tab.exchange[h1.orbital][h2.orbital]
            } else {
                T::zero()
            }
        }
        _ => T::zero(),
    }
}

/// A dense symmetric Hamiltonian over one configuration space.
#[derive(Clone, Debug)]
pub struct HamiltonianBlock<T> {
    pub space: ConfigSpace,
    pub matrix: Array2<T>,
}

fn matrix_over_space<T: Real>(space: ConfigSpace, tab: &IntegralTable<T>) -> HamiltonianBlock<T> {
    let n = space.len();
    let mut matrix = Array2::<T>::zeros((n, n));
    for i in 0..n {
        for j in i..n {
            let v = matrix_element(space.dets[i], space.dets[j], tab);
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    HamiltonianBlock { space, matrix }
}

/// The 6x6 zeroth-order Hamiltonian on the neutral space. Independent of
/// t, U_M and U_L by construction.
pub fn build_h0<T: Real>(p: &ValidatedParams<T>) -> HamiltonianBlock<T> {
    let tab = build_integral_table(p);
    matrix_over_space(enumerate_space(SpaceKind::Neutral), &tab)
}

/// The 16 charge-transfer perturbers: their hopping couplings to the
/// neutral determinants and their diagonal energies.
#[derive(Clone, Debug)]
pub struct PerturberSet<T> {
    /// LMCT determinants first, then MLCT, each in lexicographic order.
    pub dets: Vec<Determinant>,
    /// couplings[(b, a)] = ⟨Φ_β|V|Φ_α⟩ over (perturber b, neutral a).
    pub couplings: Array2<T>,
    /// E_β: diagonal energy of each perturber (degree-0 rule, including
    /// the on-site U of the doubly occupied orbital).
    pub energies: Vec<T>,
}

impl<T: Real> PerturberSet<T> {
    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    /// Coupling 6-vector of one perturber over the neutral space.
    pub fn coupling(&self, b: usize) -> Vec<T> {
        self.couplings.row(b).to_vec()
    }
}

/// Build ⟨Φ_β|V|Φ_α⟩ (entries 0 or ±t) and E_β for the 16 LMCT/MLCT
/// perturbers.
pub fn build_v_and_perturbers<T: Real>(p: &ValidatedParams<T>) -> PerturberSet<T> {
    let tab = build_integral_table(p);
    let neutral = enumerate_space(SpaceKind::Neutral);
    let mut dets = enumerate_space(SpaceKind::Lmct).dets;
    dets.extend(enumerate_space(SpaceKind::Mlct).dets);

    let mut couplings = Array2::<T>::zeros((dets.len(), neutral.len()));
    let mut energies = Vec::with_capacity(dets.len());
    for (b, &beta) in dets.iter().enumerate() {
        for (a, &alpha) in neutral.dets.iter().enumerate() {
            couplings[(b, a)] = matrix_element(beta, alpha, &tab);
        }
        energies.push(matrix_element(beta, beta, &tab));
    }
    PerturberSet {
        dets,
        couplings,
        energies,
    }
}

/// The full 36x36 Hamiltonian over all M_S = 0 determinants (oracle for
/// the perturbative treatment and symmetry checks).
pub fn build_full_h<T: Real>(p: &ValidatedParams<T>) -> HamiltonianBlock<T> {
    let tab = build_integral_table(p);
    matrix_over_space(enumerate_space(SpaceKind::FullMs0), &tab)
}
