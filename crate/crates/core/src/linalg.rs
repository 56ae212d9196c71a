//! Exact row reduction over states viewed as sparse vectors.

use num_traits::{One, Zero};

use crate::fock::{Coeff, Monomial, State};

/// An incrementally maintained, fully reduced basis of a span of states.
#[derive(Clone, Debug, Default)]
pub struct Span {
    rows: Vec<(Monomial, State)>,
}

impl Span {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` modulo the span.
    pub fn reduce(&self, v: &State) -> State {
        let mut v = v.clone();
        for (pivot, row) in &self.rows {
            let c = v.coefficient(pivot);
            if !c.is_zero() {
                v.add_scaled(row, &-c);
            }
        }
        v
    }

    pub fn contains(&self, v: &State) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v`; returns true when the span grew.
    pub fn insert(&mut self, v: &State) -> bool {
        let r = self.reduce(v);
        let Some((pivot, lead)) = r.terms().next().map(|(m, c)| (m.clone(), c.clone())) else {
            return false;
        };
        let row = r.scaled(&(Coeff::one() / lead));
        for (_, other) in self.rows.iter_mut() {
            let c = other.coefficient(&pivot);
            if !c.is_zero() {
                other.add_scaled(&row, &-c);
            }
        }
        self.rows.push((pivot, row));
        true
    }
}

/// Rank of a family of states.
pub fn rank(states: &[State]) -> usize {
    let mut span = Span::new();
    for s in states {
        span.insert(s);
    }
    span.dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_state;

    #[test]
    fn rank_and_membership() {
        let a = parse_state("1 c[1,-1] |0> ; 1 b[1,-1] |0>").unwrap();
        let b = parse_state("1 c[1,-1] |0> ; -1 b[1,-1] |0>").unwrap();
        let c = parse_state("3 b[1,-1] |0>").unwrap();
        assert_eq!(rank(&[a.clone(), b.clone(), c.clone()]), 2);
        let mut s = Span::new();
        s.insert(&a);
        assert!(!s.contains(&c));
        s.insert(&b);
        assert!(s.contains(&c));
        assert!(!s.insert(&c));
    }
}
