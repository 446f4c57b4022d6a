//! Two-component states: unordered zero pairs, labelled (double, simple)
//! zero pairs and plain ordered pairs.

use serde::{Deserialize, Serialize};

use crate::numeric::{approx_eq, rel_error, Cx, Tolerance};

/// Ordered pair `(z1, z2)`.
pub type OrderedPair = [Cx; 2];

/// The two zeros of a monic quadratic. Labels carry no meaning, so equality
/// is [`pair_eq_unordered`]; the stored order is only a presentation order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPair(pub [Cx; 2]);

impl ZeroPair {
    pub fn new(x1: Cx, x2: Cx) -> Self {
        Self([x1, x2])
    }

    pub fn first(&self) -> Cx {
        self.0[0]
    }

    pub fn second(&self) -> Cx {
        self.0[1]
    }

    pub fn swapped(&self) -> Self {
        Self([self.0[1], self.0[0]])
    }
}

/// `x1` is the zero of multiplicity two, `x2` the simple zero of
/// `(z - x1)^2 (z - x2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistinctZeroPair {
    pub x1: Cx,
    pub x2: Cx,
}

impl DistinctZeroPair {
    pub fn new(x1: Cx, x2: Cx) -> Self {
        Self { x1, x2 }
    }
}

/// True iff the pairs agree under some assignment of labels.
pub fn pair_eq_unordered(p: &ZeroPair, q: &ZeroPair, tol: Tolerance) -> bool {
    let [a1, a2] = p.0;
    let [b1, b2] = q.0;
    (approx_eq(a1, b1, tol) && approx_eq(a2, b2, tol))
        || (approx_eq(a1, b2, tol) && approx_eq(a2, b1, tol))
}

/// Common view over the pair types used by the solvers and the harness.
pub trait PairState: Copy + std::fmt::Debug {
    /// Whether component labels are meaningless.
    const UNORDERED: bool;

    fn to_array(&self) -> [Cx; 2];
    fn from_array(v: [Cx; 2]) -> Self;

    fn same_state(&self, other: &Self, tol: Tolerance) -> bool {
        states_match(self.to_array(), other.to_array(), Self::UNORDERED, tol)
    }

    /// Largest componentwise relative error, minimised over relabellings
    /// when the pair is unordered.
    fn distance(&self, other: &Self) -> f64 {
        state_distance(self.to_array(), other.to_array(), Self::UNORDERED)
    }
}

impl PairState for ZeroPair {
    const UNORDERED: bool = true;
    fn to_array(&self) -> [Cx; 2] {
        self.0
    }
    fn from_array(v: [Cx; 2]) -> Self {
        Self(v)
    }
}

impl PairState for DistinctZeroPair {
    const UNORDERED: bool = false;
    fn to_array(&self) -> [Cx; 2] {
        [self.x1, self.x2]
    }
    fn from_array(v: [Cx; 2]) -> Self {
        Self { x1: v[0], x2: v[1] }
    }
}

impl PairState for OrderedPair {
    const UNORDERED: bool = false;
    fn to_array(&self) -> [Cx; 2] {
        *self
    }
    fn from_array(v: [Cx; 2]) -> Self {
        v
    }
}

pub fn states_match(a: [Cx; 2], b: [Cx; 2], unordered: bool, tol: Tolerance) -> bool {
    let direct = approx_eq(a[0], b[0], tol) && approx_eq(a[1], b[1], tol);
    direct || (unordered && approx_eq(a[0], b[1], tol) && approx_eq(a[1], b[0], tol))
}

pub fn state_distance(a: [Cx; 2], b: [Cx; 2], unordered: bool) -> f64 {
    let direct = rel_error(a[0], b[0]).max(rel_error(a[1], b[1]));
    if unordered {
        direct.min(rel_error(a[0], b[1]).max(rel_error(a[1], b[0])))
    } else {
        direct
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::re;

    #[test]
    fn unordered_equality_examples() {
        let tol = Tolerance::DEFAULT;
        let p = ZeroPair::new(re(1.0), re(2.0));
        assert!(pair_eq_unordered(&p, &ZeroPair::new(re(2.0), re(1.0)), tol));
        let d = ZeroPair::new(re(1.0), re(1.0));
        assert!(pair_eq_unordered(&d, &d, tol));
        assert!(!pair_eq_unordered(
            &p,
            &ZeroPair::new(re(1.0), re(3.0)),
            tol
        ));
    }

    #[test]
    fn ordered_states_respect_labels() {
        let a: OrderedPair = [re(1.0), re(2.0)];
        let b: OrderedPair = [re(2.0), re(1.0)];
        assert!(!a.same_state(&b, Tolerance::DEFAULT));
        assert!(ZeroPair(a).same_state(&ZeroPair(b), Tolerance::DEFAULT));
        assert_eq!(ZeroPair(a).distance(&ZeroPair(b)), 0.0);
    }
}
