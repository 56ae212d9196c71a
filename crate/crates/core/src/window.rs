//! Finite windows of basis monomials.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fock::{Family, ModeRef, Monomial, State, Weight};

/// Which part of the Fock module a window or character ranges over.
///
/// `gamma[i,-1]` has weight zero, so every weight level of the full module is
/// infinite-dimensional; the full sector caps the total number of such
/// factors at `gamma_degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[derive(Default)]
pub enum Sector {
    #[default]
    Fermionic,
    Full { gamma_degree: u32 },
}


impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sector::Fermionic => f.write_str("fermionic"),
            Sector::Full { gamma_degree } => write!(f, "full:{}", gamma_degree),
        }
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fermionic" => Ok(Sector::Fermionic),
            "full" => Ok(Sector::Full { gamma_degree: 0 }),
            _ => {
                if let Some(g) = s.strip_prefix("full:") {
                    let gamma_degree = g
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad sector '{}'", s)))?;
                    Ok(Sector::Full { gamma_degree })
                } else {
                    Err(Error::InvalidArgument(format!(
                        "unknown sector '{}' (expected fermionic, full or full:<g>)",
                        s
                    )))
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub rank: u32,
    pub hmax: Weight,
    pub sector: Sector,
}

impl Window {
    pub fn new(rank: u32, hmax: Weight, sector: Sector) -> Self {
        Window { rank, hmax, sector }
    }

    pub fn fermionic(rank: u32, hmax: Weight) -> Self {
        Self::new(rank, hmax, Sector::Fermionic)
    }

    /// All canonical monomials of weight at most `hmax`, in canonical order.
    pub fn basis(&self) -> Vec<Monomial> {
        enumerate_monomials(self.rank, self.hmax, self.sector)
    }

    pub fn basis_states(&self) -> Vec<State> {
        self.basis().into_iter().map(State::from_monomial).collect()
    }
}

fn candidate_modes(rank: u32, budget2: i64, sector: Sector) -> Vec<ModeRef> {
    let mut modes = Vec::new();
    for family in Family::ALL {
        if !family.is_odd() && sector == Sector::Fermionic {
            continue;
        }
        for index in 1..=rank {
            let mut n = -1;
            loop {
                let m = ModeRef::new(family, index, n);
                if m.weight2() > budget2 {
                    break;
                }
                modes.push(m);
                n -= 1;
            }
        }
    }
    modes.sort();
    modes
}

/// Enumerates canonical monomials with weight at most `hmax`.
pub fn enumerate_monomials(rank: u32, hmax: Weight, sector: Sector) -> Vec<Monomial> {
    let budget2 = (hmax * 2).floor().to_integer();
    if budget2 < 0 {
        return Vec::new();
    }
    let gamma_cap = match sector {
        Sector::Fermionic => 0,
        Sector::Full { gamma_degree } => gamma_degree as usize,
    };
    let modes = candidate_modes(rank, budget2, sector);
    let mut out = Vec::new();
    let mut cur: Vec<ModeRef> = Vec::new();
    walk(&modes, 0, budget2, gamma_cap, &mut cur, &mut out);
    out.sort();
    out
}

fn walk(
    modes: &[ModeRef],
    i: usize,
    budget2: i64,
    gamma_left: usize,
    cur: &mut Vec<ModeRef>,
    out: &mut Vec<Monomial>,
) {
    if i == modes.len() {
        let (sign, m) = Monomial::from_modes(cur).expect("enumeration never repeats fermions");
        debug_assert_eq!(sign, 1);
        out.push(m);
        return;
    }
    let m = modes[i];
    walk(modes, i + 1, budget2, gamma_left, cur, out);
    let w = m.weight2();
    let zero_weight = w == 0;
    let max_copies = if m.is_odd() {
        1
    } else if zero_weight {
        gamma_left
    } else {
        (budget2 / w) as usize
    };
    let mut pushed = 0;
    let mut budget = budget2;
    let mut gl = gamma_left;
    while pushed < max_copies {
        if w > budget {
            break;
        }
        if zero_weight {
            if gl == 0 {
                break;
            }
            gl -= 1;
        }
        budget -= w;
        cur.push(m);
        pushed += 1;
        walk(modes, i + 1, budget, gl, cur, out);
    }
    for _ in 0..pushed {
        cur.pop();
    }
}
