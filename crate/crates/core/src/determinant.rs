//! Slater determinants of four electrons in four orbitals and the
//! configuration spaces built from them.
//!
//! Orbital order is fixed as (L1, M, M', L2) = (0, 1, 2, 3); spin-orbitals
//! are ordered by (orbital, spin) with up before down, and a determinant
//! carries coefficient +1 when its creation operators are written in that
//! ascending order.

use std::fmt;

/// Names of the four orbitals, in index order.
pub const ORBITAL_NAMES: [&str; 4] = ["L1", "M", "M'", "L2"];

/// Orbital indices of the two metal-centred orbitals.
pub const METAL_ORBITALS: [usize; 2] = [1, 2];
/// Orbital indices of the two ligand-centred orbitals.
pub const LIGAND_ORBITALS: [usize; 2] = [0, 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// One of the eight spin-orbitals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SpinOrbital {
    pub orbital: usize,
    pub spin: Spin,
}

impl SpinOrbital {
    /// Position in the canonical (orbital, spin) ordering, 0..8.
    pub fn index(self) -> usize {
        2 * self.orbital + if self.spin == Spin::Down { 1 } else { 0 }
    }

    pub fn from_index(i: usize) -> Self {
        SpinOrbital {
            orbital: i / 2,
            spin: if i % 2 == 0 { Spin::Up } else { Spin::Down },
        }
    }
}

/// Occupation of the four orbitals by up and down spins, 4 electrons total.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Determinant {
    up: u8,
    dn: u8,
}

impl Determinant {
    /// Build from occupation bitmasks over orbitals 0..4.
    ///
    /// Panics if the masks use bits above the fourth or do not hold four
    /// electrons in total.
    pub fn new(up: u8, dn: u8) -> Self {
        assert!(up < 16 && dn < 16, "orbital masks are 4 bits wide");
        assert_eq!(
            up.count_ones() + dn.count_ones(),
            4,
            "a determinant holds exactly four electrons"
        );
        Determinant { up, dn }
    }

    pub fn up_occ(self) -> u8 {
        self.up
    }

    pub fn dn_occ(self) -> u8 {
        self.dn
    }

    /// Number of electrons in `orbital` (0, 1 or 2).
    pub fn occ(self, orbital: usize) -> u8 {
        ((self.up >> orbital) & 1) + ((self.dn >> orbital) & 1)
    }

    pub fn has(self, so: SpinOrbital) -> bool {
        let mask = match so.spin {
            Spin::Up => self.up,
            Spin::Down => self.dn,
        };
        (mask >> so.orbital) & 1 == 1
    }

    /// The four occupied spin-orbitals in canonical ascending order.
    pub fn occupied(self) -> [SpinOrbital; 4] {
        let mut out = [SpinOrbital {
            orbital: 0,
            spin: Spin::Up,
        }; 4];
        let mut n = 0;
        for i in 0..8 {
            let so = SpinOrbital::from_index(i);
            if self.has(so) {
                out[n] = so;
                n += 1;
            }
        }
        debug_assert_eq!(n, 4);
        out
    }

    /// Twice the spin projection (so M_S = 0 reads 0).
    pub fn two_m_s(self) -> i32 {
        self.up.count_ones() as i32 - self.dn.count_ones() as i32
    }

    pub fn is_neutral(self) -> bool {
        self.up | self.dn == 0b1111 && self.up & self.dn == 0
    }

    /// Mask of doubly occupied orbitals.
    pub fn doubly(self) -> u8 {
        self.up & self.dn
    }

    /// Mask of empty orbitals.
    pub fn empty(self) -> u8 {
        !(self.up | self.dn) & 0b1111
    }
}

impl fmt::Debug for Determinant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Determinant {
    /// Diagnostic rendering like `|L1↑↓ M↑ . L2↓|`; not a stable format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for p in 0..4 {
            if p > 0 {
                write!(f, " ")?;
            }
            let up = self.has(SpinOrbital {
                orbital: p,
                spin: Spin::Up,
            });
            let dn = self.has(SpinOrbital {
                orbital: p,
                spin: Spin::Down,
            });
            match (up, dn) {
                (false, false) => write!(f, ".")?,
                (true, false) => write!(f, "{}↑", ORBITAL_NAMES[p])?,
                (false, true) => write!(f, "{}↓", ORBITAL_NAMES[p])?,
                (true, true) => write!(f, "{}↑↓", ORBITAL_NAMES[p])?,
            }
        }
        write!(f, "|")
    }
}

/// Which configuration space to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceKind {
    /// The six neutral, singly occupied M_S = 0 determinants (model space).
    Neutral,
    /// Eight ligand-to-metal charge-transfer determinants.
    Lmct,
    /// Eight metal-to-ligand charge-transfer determinants.
    Mlct,
    /// All 36 M_S = 0 determinants of 4 electrons in 4 orbitals.
    FullMs0,
}

/// An ordered determinant basis.
#[derive(Clone, Debug)]
pub struct ConfigSpace {
    pub kind: SpaceKind,
    pub dets: Vec<Determinant>,
}

impl ConfigSpace {
    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    /// Position of `det` in this space, if present.
    pub fn position(&self, det: Determinant) -> Option<usize> {
        self.dets.iter().position(|&d| d == det)
    }
}

/// Enumerate a configuration space in deterministic lexicographic
/// (up_occ, dn_occ) order.
pub fn enumerate_space(kind: SpaceKind) -> ConfigSpace {
    let mut dets = Vec::new();
    for up in 0..16u8 {
        for dn in 0..16u8 {
            if up.count_ones() != 2 || dn.count_ones() != 2 {
                continue; // four electrons, M_S = 0 throughout
            }
            let det = Determinant { up, dn };
            let keep = match kind {
                SpaceKind::FullMs0 => true,
                SpaceKind::Neutral => det.is_neutral(),
                SpaceKind::Lmct => {
                    det.doubly().count_ones() == 1
                        && det.doubly() & 0b0110 != 0
                        && det.empty() & 0b1001 != 0
                }
                SpaceKind::Mlct => {
                    det.doubly().count_ones() == 1
                        && det.doubly() & 0b1001 != 0
                        && det.empty() & 0b0110 != 0
                }
            };
            if keep {
                dets.push(det);
            }
        }
    }
    ConfigSpace { kind, dets }
}

/// Degree, permutation sign and differing spin-orbitals between two
/// determinants.
#[derive(Clone, Debug)]
pub struct ExcitationInfo {
    /// Half the size of the symmetric difference of the occupied sets.
    pub degree: usize,
    /// Sign of the permutation bringing a's canonical order onto b's after
    /// substituting holes by particles in ascending pairing.
    pub parity: i32,
    /// Spin-orbitals occupied in `a` only, ascending.
    pub holes: Vec<SpinOrbital>,
    /// Spin-orbitals occupied in `b` only, ascending.
    pub particles: Vec<SpinOrbital>,
}

pub fn excitation_info(a: Determinant, b: Determinant) -> ExcitationInfo {
    let mut holes = Vec::new();
    let mut particles = Vec::new();
    for i in 0..8 {
        let so = SpinOrbital::from_index(i);
        match (a.has(so), b.has(so)) {
            (true, false) => holes.push(so),
            (false, true) => particles.push(so),
            _ => {}
        }
    }
    // Substitute holes by particles (ascending pairing) in a's canonical
    // list, then count the inversions needed to re-sort.
    let mut list: Vec<usize> = a.occupied().iter().map(|so| so.index()).collect();
    for (h, p) in holes.iter().zip(particles.iter()) {
        let pos = list.iter().position(|&x| x == h.index()).unwrap();
        list[pos] = p.index();
    }
    let mut parity = 1i32;
    for i in 0..list.len() {
        for j in (i + 1)..list.len() {
            if list[i] > list[j] {
                parity = -parity;
            }
        }
    }
    ExcitationInfo {
        degree: holes.len(),
        parity,
        holes,
        particles,
    }
}
