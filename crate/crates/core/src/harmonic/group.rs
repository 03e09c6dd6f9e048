//! Group models and points of the unitary dual.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The two families of compact groups that are instantiated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    /// The torus `T^n = R^n / Z^n`.
    Torus(usize),
    /// `SU(2)`, identified with the sphere `S^3`.
    Su2,
}

/// A compact Lie group together with the data the multiplier theorems need.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupModel {
    kind: GroupKind,
}

impl GroupModel {
    pub fn torus(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::OutOfRange("torus dimension must be positive".into()));
        }
        Ok(Self {
            kind: GroupKind::Torus(n),
        })
    }

    pub fn su2() -> Self {
        Self {
            kind: GroupKind::Su2,
        }
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn is_su2(&self) -> bool {
        matches!(self.kind, GroupKind::Su2)
    }

    /// Torus dimension, if this is a torus.
    pub fn torus_dim(&self) -> Option<usize> {
        match self.kind {
            GroupKind::Torus(n) => Some(n),
            GroupKind::Su2 => None,
        }
    }

    /// Manifold dimension `n`.
    pub fn dimension(&self) -> usize {
        match self.kind {
            GroupKind::Torus(n) => n,
            GroupKind::Su2 => 3,
        }
    }

    pub fn rank(&self) -> usize {
        match self.kind {
            GroupKind::Torus(n) => n,
            GroupKind::Su2 => 1,
        }
    }

    /// Smallest even integer strictly larger than `dim / 2`.
    pub fn kappa(&self) -> usize {
        let n = self.dimension();
        // smallest even k with 2k > n
        let mut k = 2;
        while 2 * k <= n {
            k += 2;
        }
        k
    }

    /// Number of positive roots (`|Δ₀⁺|`).
    pub fn positive_roots(&self) -> usize {
        match self.kind {
            GroupKind::Torus(_) => 0,
            GroupKind::Su2 => 1,
        }
    }

    pub fn trivial_label(&self) -> IrrepLabel {
        match self.kind {
            GroupKind::Torus(n) => IrrepLabel::Torus(vec![0; n]),
            GroupKind::Su2 => IrrepLabel::Su2(0),
        }
    }

    /// The representations making up the extended set Δ₀ that defines the
    /// pseudo-distance: the `2n` characters `e^{±2πi x_j}` on the torus and the
    /// adjoint representation on SU(2).
    pub fn delta0(&self) -> Vec<IrrepLabel> {
        match self.kind {
            GroupKind::Torus(n) => {
                let mut out = Vec::with_capacity(2 * n);
                for j in 0..n {
                    for s in [1i64, -1] {
                        let mut k = vec![0; n];
                        k[j] = s;
                        out.push(IrrepLabel::Torus(k));
                    }
                }
                out
            }
            GroupKind::Su2 => vec![IrrepLabel::Su2(2)],
        }
    }

    /// Every label with band at most `band`, in a fixed order.
    pub fn labels_up_to(&self, band: u32) -> Vec<IrrepLabel> {
        match self.kind {
            GroupKind::Su2 => (0..=band).map(IrrepLabel::Su2).collect(),
            GroupKind::Torus(n) => {
                let b = band as i64;
                let side = 2 * b + 1;
                let total = (side as usize).pow(n as u32);
                let mut out = Vec::with_capacity(total);
                let mut k = vec![-b; n];
                for _ in 0..total {
                    out.push(IrrepLabel::Torus(k.clone()));
                    for j in (0..n).rev() {
                        if k[j] < b {
                            k[j] += 1;
                            break;
                        }
                        k[j] = -b;
                    }
                }
                out
            }
        }
    }

    pub fn check_label(&self, label: &IrrepLabel) -> Result<()> {
        match (&self.kind, label) {
            (GroupKind::Torus(n), IrrepLabel::Torus(k)) if k.len() == *n => Ok(()),
            (GroupKind::Su2, IrrepLabel::Su2(_)) => Ok(()),
            _ => Err(Error::InvalidLabel(format!(
                "{label} is not a label of {self}"
            ))),
        }
    }

    pub fn check_same(&self, other: &GroupModel) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ModelMismatch {
                expected: self.to_string(),
                found: other.to_string(),
            })
        }
    }
}

impl fmt::Display for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Torus(n) => write!(f, "torus-{n}"),
            GroupKind::Su2 => write!(f, "su2"),
        }
    }
}

impl std::str::FromStr for GroupModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("su2") {
            return Ok(Self::su2());
        }
        if let Some(n) = s.strip_prefix("torus-") {
            let n: usize = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad torus dimension in {s:?}")))?;
            return Self::torus(n);
        }
        Err(Error::Parse(format!(
            "unknown group {s:?} (expected su2 or torus-N)"
        )))
    }
}

/// A point of the unitary dual.
///
/// SU(2) spins are stored doubled so half-integers stay integral.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IrrepLabel {
    Torus(Vec<i64>),
    Su2(u32),
}

impl IrrepLabel {
    /// Degree `d_ξ` of the representation.
    pub fn dimension(&self) -> usize {
        irrep_dimension(self)
    }

    /// Size used for band bookkeeping: `max_j |k_j|` on the torus, twice the
    /// spin on SU(2).
    pub fn band(&self) -> u32 {
        match self {
            IrrepLabel::Torus(k) => k.iter().map(|x| x.unsigned_abs() as u32).max().unwrap_or(0),
            IrrepLabel::Su2(t) => *t,
        }
    }

    pub fn twice_spin(&self) -> Option<u32> {
        match self {
            IrrepLabel::Su2(t) => Some(*t),
            IrrepLabel::Torus(_) => None,
        }
    }

    pub fn freq(&self) -> Option<&[i64]> {
        match self {
            IrrepLabel::Torus(k) => Some(k),
            IrrepLabel::Su2(_) => None,
        }
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrrepLabel::Su2(t) => write!(f, "{t}"),
            IrrepLabel::Torus(k) => {
                let parts: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

impl IrrepLabel {
    /// Parses the textual form used in symbol files: a twice-spin integer for
    /// SU(2), a comma separated frequency vector for the torus.
    pub fn parse_for(model: &GroupModel, s: &str) -> Result<Self> {
        let label = match model.kind() {
            GroupKind::Su2 => IrrepLabel::Su2(
                s.parse()
                    .map_err(|_| Error::Parse(format!("bad twice-spin {s:?}")))?,
            ),
            GroupKind::Torus(_) => {
                let k: std::result::Result<Vec<i64>, _> =
                    s.split(',').map(|p| p.trim().parse::<i64>()).collect();
                IrrepLabel::Torus(k.map_err(|_| Error::Parse(format!("bad frequency {s:?}")))?)
            }
        };
        model.check_label(&label)?;
        Ok(label)
    }
}

/// Weyl dimension formula with a single positive root on SU(2); every torus
/// representation is a character.
pub fn irrep_dimension(label: &IrrepLabel) -> usize {
    match label {
        IrrepLabel::Torus(_) => 1,
        IrrepLabel::Su2(t) => *t as usize + 1,
    }
}

/// `λ_ξ`, the square root of the Laplace eigenvalue on matrix coefficients of ξ.
///
/// SU(2): `λ² = ‖ξ+ρ‖² − ‖ρ‖² = ℓ(ℓ+1)`; torus: `λ = 2π|k|` for characters
/// `e^{2πi x·k}`.
pub fn casimir_lambda(label: &IrrepLabel) -> f64 {
    casimir_lambda_sq(label).sqrt()
}

pub fn casimir_lambda_sq(label: &IrrepLabel) -> f64 {
    match label {
        IrrepLabel::Su2(t) => {
            let l = *t as f64 / 2.0;
            let rho = 0.5;
            (l + rho) * (l + rho) - rho * rho
        }
        IrrepLabel::Torus(k) => {
            let k2: f64 = k.iter().map(|&x| (x * x) as f64).sum();
            4.0 * PI * PI * k2
        }
    }
}

/// `⟨ξ⟩ = max{1, λ_ξ}`.
pub fn bracket(label: &IrrepLabel) -> f64 {
    casimir_lambda(label).max(1.0)
}
