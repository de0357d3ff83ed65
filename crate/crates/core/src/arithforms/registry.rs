use super::characters::{principal, DirichletCharacter};
use crate::error::{Error, Result};

/// A built-in primitive holomorphic newform given as an eta quotient
/// ∏_d η(dτ)^{e_d}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewformSpec {
    pub label: &'static str,
    pub level: u64,
    pub weight: u32,
    pub eta: &'static [(u64, i32)],
    /// Discriminant of the CM field when the form has complex multiplication.
    pub cm_discriminant: Option<i64>,
}

impl NewformSpec {
    /// Nebentypus; principal for every built-in.
    pub fn nebentypus(&self) -> DirichletCharacter {
        principal(self.level).expect("level fits character table")
    }

    /// Exponent of the leading q-power, Σ d·e_d / 24.
    pub fn q_shift(&self) -> i64 {
        let s: i64 = self.eta.iter().map(|&(d, e)| d as i64 * e as i64).sum();
        assert_eq!(s % 24, 0, "eta quotient must have integral q-shift");
        s / 24
    }
}

pub const DELTA: NewformSpec =
    NewformSpec { label: "1.12.a", level: 1, weight: 12, eta: &[(1, 24)], cm_discriminant: None };

// Not CM: a(3) = -12. Its only in-registry twist is by the trivial character mod 2.
pub const ETA2_12: NewformSpec =
    NewformSpec { label: "4.6.a", level: 4, weight: 6, eta: &[(2, 12)], cm_discriminant: None };

pub const ETA3_8: NewformSpec =
    NewformSpec { label: "9.4.a", level: 9, weight: 4, eta: &[(3, 8)], cm_discriminant: Some(-3) };

pub const ETA1_11: NewformSpec =
    NewformSpec { label: "11.2.a", level: 11, weight: 2, eta: &[(1, 2), (11, 2)], cm_discriminant: None };

pub const BUILTINS: [NewformSpec; 4] = [DELTA, ETA2_12, ETA3_8, ETA1_11];

pub fn lookup(label: &str) -> Result<NewformSpec> {
    BUILTINS.iter().find(|f| f.label == label).cloned().ok_or_else(|| Error::UnknownForm(label.to_string()))
}
