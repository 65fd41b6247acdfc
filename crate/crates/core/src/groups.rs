//! Finite subgroups of SO(3) with their multiplication tables.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::so3::Rotation;

/// Products within this distance of a known element are identified with it.
pub const SNAP_TOLERANCE: f64 = 1e-9;

/// Closure gives up after this many times the expected order.
const CLOSURE_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    Cyclic(u32),
    Dihedral(u32),
    Tetrahedral,
    Octahedral,
    Icosahedral,
}

impl GroupKind {
    pub fn order(&self) -> usize {
        match *self {
            GroupKind::Cyclic(n) => n as usize,
            GroupKind::Dihedral(n) => 2 * n as usize,
            GroupKind::Tetrahedral => 12,
            GroupKind::Octahedral => 24,
            GroupKind::Icosahedral => 60,
        }
    }

    fn generators(&self) -> Result<Vec<Rotation>> {
        let half = 0.5;
        let corner = Rotation::from_quaternion([half; 4])?;
        let i = Rotation::about_x(PI);
        Ok(match *self {
            GroupKind::Cyclic(n) | GroupKind::Dihedral(n) if n == 0 => {
                return Err(Error::input("group parameter n must be at least 1"));
            }
            GroupKind::Cyclic(n) => vec![Rotation::about_z(2.0 * PI / n as f64)],
            GroupKind::Dihedral(n) => vec![Rotation::about_z(2.0 * PI / n as f64), i],
            GroupKind::Tetrahedral => vec![i, corner],
            GroupKind::Octahedral => vec![Rotation::about_z(PI / 2.0), corner],
            GroupKind::Icosahedral => {
                let phi = (1.0 + 5f64.sqrt()) / 2.0;
                let five = Rotation::from_quaternion([phi / 2.0, 0.5 / phi, 0.5, 0.0])?;
                vec![i, corner, five]
            }
        })
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupKind::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupKind::Tetrahedral => write!(f, "tetra"),
            GroupKind::Octahedral => write!(f, "octa"),
            GroupKind::Icosahedral => write!(f, "icosa"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    /// Accepts `cyclic:N`, `dihedral:N`, `tetra`, `octa`, `icosa`.
    fn from_str(s: &str) -> Result<Self> {
        let param = |rest: &str| -> Result<u32> {
            match rest.parse::<u32>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(Error::input(format!("bad group parameter in {s:?}"))),
            }
        };
        match s.split_once(':') {
            Some(("cyclic", n)) => Ok(GroupKind::Cyclic(param(n)?)),
            Some(("dihedral", n)) => Ok(GroupKind::Dihedral(param(n)?)),
            None if s == "tetra" => Ok(GroupKind::Tetrahedral),
            None if s == "octa" => Ok(GroupKind::Octahedral),
            None if s == "icosa" => Ok(GroupKind::Icosahedral),
            _ => Err(Error::input(format!(
                "unknown group {s:?}; expected cyclic:N, dihedral:N, tetra, octa or icosa"
            ))),
        }
    }
}

/// A finite rotation group; element 0 is the identity.
#[derive(Debug, Clone)]
pub struct FiniteSubgroup {
    kind: GroupKind,
    elements: Vec<Rotation>,
    table: Vec<usize>,
    inverses: Vec<usize>,
}

fn find(elements: &[Rotation], g: &Rotation) -> Option<usize> {
    elements
        .iter()
        .position(|e| e.distance(g) <= SNAP_TOLERANCE)
}

impl FiniteSubgroup {
    /// Generates the group by closing its generators under products.
    pub fn new(kind: GroupKind) -> Result<Self> {
        let gens = kind.generators()?;
        let expected = kind.order();
        let mut elements = vec![Rotation::IDENTITY];
        let mut next = 0;
        while next < elements.len() {
            let e = elements[next];
            for g in &gens {
                let p = e * *g;
                if find(&elements, &p).is_none() {
                    elements.push(p);
                    if elements.len() > CLOSURE_CAP * expected {
                        return Err(Error::Construction(format!(
                            "closure of {kind} did not terminate"
                        )));
                    }
                }
            }
            next += 1;
        }
        if elements.len() != expected {
            return Err(Error::Construction(format!(
                "{kind} closed at {} elements, expected {expected}",
                elements.len()
            )));
        }
        let n = elements.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elements {
            for b in &elements {
                let k = find(&elements, &(*a * *b))
                    .ok_or_else(|| Error::Construction(format!("{kind} is not closed")))?;
                table.push(k);
            }
        }
        let inverses = (0..n)
            .map(|i| {
                (0..n)
                    .find(|&j| table[i * n + j] == 0)
                    .ok_or_else(|| Error::Construction(format!("{kind} lacks an inverse")))
            })
            .collect::<Result<_>>()?;
        Ok(FiniteSubgroup {
            kind,
            elements,
            table,
            inverses,
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Rotation] {
        &self.elements
    }

    /// Index of `g_i g_j`.
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.order() + j]
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverses[i]
    }

    /// Row-major multiplication table.
    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Every group with order at most `max_order` among the families used
    /// in checks: cyclic, dihedral, tetrahedral, octahedral, icosahedral.
    pub fn all_up_to(max_order: usize) -> Result<Vec<FiniteSubgroup>> {
        let mut kinds = Vec::new();
        for n in 1..=max_order as u32 {
            kinds.push(GroupKind::Cyclic(n));
        }
        for n in 1..=(max_order / 2) as u32 {
            kinds.push(GroupKind::Dihedral(n));
        }
        for k in [
            GroupKind::Tetrahedral,
            GroupKind::Octahedral,
            GroupKind::Icosahedral,
        ] {
            if k.order() <= max_order {
                kinds.push(k);
            }
        }
        kinds.into_iter().map(FiniteSubgroup::new).collect()
    }
}
