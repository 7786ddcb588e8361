use super::{DiffPoly, Monomial};

/// Picks out a sub-sum of a polynomial, monomial by monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Selector {
    /// Terms with exactly `eps^h`.
    EpsPower(u32),
    TildeDeg(u32),
    TildeDegAtLeast(u32),
    TildeDegAtMost(u32),
    /// Terms containing index `gamma` and no higher index: the `[gamma]` part.
    TopIndex(u32),
    TopIndexAtLeast(u32),
    TopIndexAtMost(u32),
    And(Box<Selector>, Box<Selector>),
    Or(Box<Selector>, Box<Selector>),
    Not(Box<Selector>),
}

impl Selector {
    pub fn and(self, other: Selector) -> Selector {
        Selector::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Selector) -> Selector {
        Selector::Or(Box::new(self), Box::new(other))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Selector {
        Selector::Not(Box::new(self))
    }

    pub fn matches(&self, m: &Monomial) -> bool {
        let tilde = || m.grading().tilde_deg as u32;
        match self {
            Selector::EpsPower(h) => m.eps_power() == *h,
            Selector::TildeDeg(d) => tilde() == *d,
            Selector::TildeDegAtLeast(d) => tilde() >= *d,
            Selector::TildeDegAtMost(d) => tilde() <= *d,
            Selector::TopIndex(g) => m.top_index() == *g,
            Selector::TopIndexAtLeast(g) => m.top_index() >= *g,
            Selector::TopIndexAtMost(g) => m.top_index() <= *g,
            Selector::And(a, b) => a.matches(m) && b.matches(m),
            Selector::Or(a, b) => a.matches(m) || b.matches(m),
            Selector::Not(a) => !a.matches(m),
        }
    }
}

impl DiffPoly {
    pub fn extract_slice(&self, selector: &Selector) -> DiffPoly {
        self.filter(|m, _| selector.matches(m))
    }
}
