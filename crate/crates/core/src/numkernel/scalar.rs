use std::fmt;
use std::sync::Arc;

/// One end of a real interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Unbounded,
    Closed(f64),
    Open(f64),
}

/// Interval of the real line on which a [`ScalarFn`] is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub lower: Bound,
    pub upper: Bound,
}

impl Domain {
    pub const REAL: Domain = Domain { lower: Bound::Unbounded, upper: Bound::Unbounded };

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self { lower: Bound::Closed(lo), upper: Bound::Closed(hi) }
    }

    pub fn at_least(lo: f64) -> Self {
        Self { lower: Bound::Closed(lo), upper: Bound::Unbounded }
    }

    pub fn greater_than(lo: f64) -> Self {
        Self { lower: Bound::Open(lo), upper: Bound::Unbounded }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = match self.lower {
            Bound::Unbounded => true,
            Bound::Closed(lo) => x >= lo,
            Bound::Open(lo) => x > lo,
        };
        let below = match self.upper {
            Bound::Unbounded => true,
            Bound::Closed(hi) => x <= hi,
            Bound::Open(hi) => x < hi,
        };
        x.is_finite() && above && below
    }
}

/// A real function together with the interval where it may be evaluated.
///
/// Evaluation outside the domain yields `None` instead of extrapolating.
#[derive(Clone)]
pub struct ScalarFn {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: Domain,
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn").field("domain", &self.domain).finish_non_exhaustive()
    }
}

impl ScalarFn {
    pub fn new(domain: Domain, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f), domain }
    }

    /// A function defined on all of the real line.
    pub fn total(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(Domain::REAL, f)
    }

    pub fn identity() -> Self {
        Self::total(|t| t)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// `Some(f(x))` when `x` is in the domain and the value is finite.
    pub fn eval(&self, x: f64) -> Option<f64> {
        if !self.domain.contains(x) {
            return None;
        }
        let y = (self.f)(x);
        y.is_finite().then_some(y)
    }

    /// `self ∘ inner`, defined where `inner` is defined and lands in `self`'s domain.
    pub fn compose(&self, inner: &ScalarFn) -> ScalarFn {
        let outer = self.clone();
        let inner_c = inner.clone();
        ScalarFn::new(inner.domain, move |x| {
            inner_c.eval(x).and_then(|y| outer.eval(y)).unwrap_or(f64::NAN)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_membership() {
        let d = Domain::greater_than(-1.0);
        assert!(!d.contains(-1.0));
        assert!(d.contains(-0.999));
        assert!(Domain::closed(0.0, 1.0).contains(1.0));
        assert!(!Domain::REAL.contains(f64::NAN));
    }

    #[test]
    fn composition_propagates_domain_failure() {
        let recip = ScalarFn::new(Domain::greater_than(0.0), |t| 1.0 / t);
        let shift = ScalarFn::total(|t| t - 1.0);
        let h = recip.compose(&shift);
        assert_eq!(h.eval(3.0), Some(0.5));
        assert_eq!(h.eval(1.0), None);
    }
}
