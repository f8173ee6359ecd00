//! Ready-made varieties: PGL(2n)/PSp(2n) for n = 2, 3 and the group case
//! for A₁ and A₂, each with its wonderful fan and, in restricted rank 2, a
//! subdivided fan.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::fan::{Fan, FanError, SubdivisionSpec};
use crate::lattice::IntMatrix;
use crate::root_datum::{DatumSpec, SymmetricDatum};

/// A datum together with an optional subdivision of the positive chamber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietySpec {
    #[serde(flatten)]
    pub datum: DatumSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subdivision: Option<SubdivisionSpec>,
}

impl VarietySpec {
    pub fn build(&self) -> Result<Fan, FanError> {
        let datum = Arc::new(SymmetricDatum::from_spec(&self.datum)?);
        Fan::new(datum, self.subdivision.as_ref())
    }
}

/// θ for PGL(2n)/PSp(2n): fixes α₁, α₃, …, α_{2n−1} and sends α_{2i} to
/// −α_{2i−1} − α_{2i} − α_{2i+1}.
pub fn pgl_psp_theta(n: usize) -> IntMatrix {
    let r = 2 * n - 1;
    let mut theta = IntMatrix::identity(r);
    for i in (1..r).step_by(2) {
        theta[(i, i)] = -1;
        theta[(i - 1, i)] = -1;
        theta[(i + 1, i)] = -1;
    }
    theta
}

/// The subdivision of a rank-2 chamber by the ray (1, 1).
pub fn split_rank2() -> SubdivisionSpec {
    SubdivisionSpec { rays: vec![vec![1, 0], vec![0, 1], vec![1, 1]], max_cones: vec![vec![0, 2], vec![1, 2]] }
}

/// Named entries in a fixed order.
pub fn entries() -> Vec<(&'static str, VarietySpec)> {
    let pgl = |n| DatumSpec::simple("A", 2 * n - 1, pgl_psp_theta(n));
    vec![
        ("pgl4_wonderful", VarietySpec { datum: pgl(2), subdivision: None }),
        ("pgl6_wonderful", VarietySpec { datum: pgl(3), subdivision: None }),
        ("pgl6_split", VarietySpec { datum: pgl(3), subdivision: Some(split_rank2()) }),
        ("group_a1_wonderful", VarietySpec { datum: DatumSpec::group_case("A", 1), subdivision: None }),
        ("group_a2_wonderful", VarietySpec { datum: DatumSpec::group_case("A", 2), subdivision: None }),
        ("group_a2_split", VarietySpec { datum: DatumSpec::group_case("A", 2), subdivision: Some(split_rank2()) }),
    ]
}

pub fn build(name: &str) -> Option<Fan> {
    entries().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s.build().expect("catalog entries are valid"))
}

pub fn pgl4_wonderful() -> Fan {
    build("pgl4_wonderful").expect("catalog entry")
}

pub fn pgl6_wonderful() -> Fan {
    build("pgl6_wonderful").expect("catalog entry")
}

pub fn pgl6_split() -> Fan {
    build("pgl6_split").expect("catalog entry")
}

pub fn group_a1_wonderful() -> Fan {
    build("group_a1_wonderful").expect("catalog entry")
}

pub fn group_a2_wonderful() -> Fan {
    build("group_a2_wonderful").expect("catalog entry")
}

pub fn group_a2_split() -> Fan {
    build("group_a2_split").expect("catalog entry")
}

/// SL(4)/Sp(4) on the simply-connected side, used by the splitting test.
pub fn sl4_datum() -> SymmetricDatum {
    SymmetricDatum::from_spec(&DatumSpec::simple("A", 3, pgl_psp_theta(2))).expect("valid datum")
}
