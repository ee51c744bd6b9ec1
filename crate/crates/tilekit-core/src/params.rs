//! Exact parameter arithmetic: regularity thresholds of the form q or
//! q^(1/5), and the derived constant chain used by the pipeline.
//!
//! Comparisons against fifth roots are decided by raising to the fifth
//! power, so no floating point enters any threshold decision.

use alloc::boxed::Box;
use core::cmp::Ordering;
use core::fmt;

use crate::rational::Rational;

/// A regularity parameter: either an exact rational or the fifth root of
/// one. The fifth-root form arises from good-pair certificates, whose
/// guaranteed parameter is (16 eps)^(1/5).
#[derive(Debug, Clone)]
pub enum EpsParam {
    Exact(Rational),
    /// `FifthRoot(x)` denotes x^(1/5); `x` is kept nonnegative.
    FifthRoot(Rational),
}

impl EpsParam {
    pub fn exact(r: Rational) -> Self {
        EpsParam::Exact(r)
    }

    pub fn fifth_root(x: Rational) -> Self {
        assert!(!x.is_negative(), "fifth root argument must be nonnegative");
        EpsParam::FifthRoot(x)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            EpsParam::Exact(r) => r.to_f64(),
            EpsParam::FifthRoot(x) => libm::pow(x.to_f64(), 0.2),
        }
    }

    /// Scales by a nonnegative rational: c * x^(1/5) = (c^5 x)^(1/5).
    pub fn scale(&self, c: &Rational) -> EpsParam {
        assert!(!c.is_negative(), "scale factor must be nonnegative");
        match self {
            EpsParam::Exact(r) => EpsParam::Exact(c * r),
            EpsParam::FifthRoot(x) => EpsParam::FifthRoot(&c.pow(5) * x),
        }
    }

    /// True iff `self >= q`, decided exactly.
    pub fn at_least(&self, q: &Rational) -> bool {
        match self {
            EpsParam::Exact(r) => r >= q,
            EpsParam::FifthRoot(x) => !q.is_positive() || &q.pow(5) <= x,
        }
    }

    /// True iff `self <= q`, decided exactly.
    pub fn at_most(&self, q: &Rational) -> bool {
        match self {
            EpsParam::Exact(r) => r <= q,
            EpsParam::FifthRoot(x) => !q.is_negative() && x <= &q.pow(5),
        }
    }

    /// A parameter of 1 or more certifies nothing.
    pub fn is_vacuous(&self) -> bool {
        self.at_least(&Rational::one())
    }

    pub fn clamp_to_one(&self) -> EpsParam {
        if self.is_vacuous() {
            EpsParam::Exact(Rational::one())
        } else {
            self.clone()
        }
    }

    /// The smallest rational of the form p/1024 that is >= the value, for
    /// use where an exact rational bound is required. Values >= 1 fall back
    /// to a coarse but valid bound.
    pub fn rational_upper_bound(&self) -> Rational {
        match self {
            EpsParam::Exact(r) => r.clone(),
            EpsParam::FifthRoot(x) => {
                if x >= &Rational::one() {
                    // x^(1/5) <= x for x >= 1
                    return x.clone();
                }
                let (mut lo, mut hi) = (0u32, 1024u32);
                // invariant: (lo/1024)^5 < x <= (hi/1024)^5
                while hi - lo > 1 {
                    let mid = (lo + hi) / 2;
                    let cand = Rational::new(mid as i64, 1024);
                    if &cand.pow(5) >= x {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                Rational::new(hi as i64, 1024)
            }
        }
    }
}

impl PartialEq for EpsParam {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for EpsParam {}

impl PartialOrd for EpsParam {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EpsParam {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (EpsParam::Exact(a), EpsParam::Exact(b)) => a.cmp(b),
            (EpsParam::FifthRoot(a), EpsParam::FifthRoot(b)) => a.cmp(b),
            (EpsParam::Exact(q), EpsParam::FifthRoot(x)) => {
                if q.is_negative() {
                    Ordering::Less
                } else {
                    q.pow(5).cmp(x)
                }
            }
            (EpsParam::FifthRoot(x), EpsParam::Exact(q)) => {
                if q.is_negative() {
                    Ordering::Greater
                } else {
                    x.cmp(&q.pow(5))
                }
            }
        }
    }
}

impl From<Rational> for EpsParam {
    fn from(r: Rational) -> Self {
        EpsParam::Exact(r)
    }
}

impl fmt::Display for EpsParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EpsParam::Exact(r) => write!(f, "{}", r),
            EpsParam::FifthRoot(x) => write!(f, "({})^(1/5)", x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamError {
    BadInput(&'static str),
    /// A chain inequality failed; the message names it.
    ChainViolation(&'static str),
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::BadInput(m) => write!(f, "bad input: {}", m),
            ParamError::ChainViolation(m) => write!(f, "parameter chain violated: {}", m),
        }
    }
}

/// The nested constants driving the pipeline, ordered
/// gamma >> d >> eps_prime >> eps >> zeta. `m_bound` caps the cluster count
/// and `d_bound` the blow-up denominator; both are inputs since no formula
/// for them is available, as is the optional embedding epsilon that can
/// further shrink eps_prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterChain {
    pub k: usize,
    pub h: usize,
    pub gamma: Rational,
    pub d: Rational,
    pub d_prime: Rational,
    pub eps_prime: Rational,
    pub eps: Rational,
    pub zeta: Rational,
    pub m_bound: u64,
    pub d_bound: u64,
}

impl ParameterChain {
    /// Derives the full chain from the free inputs:
    /// d = gamma/4, eps_prime = min{eps_embed^2, d/(12 k^2)},
    /// eps = min{eps_prime^5/16, d/(4(k+2))}, d' = d - eps,
    /// zeta = 1/(12 h^2 k^2 m_bound^2 d_bound^2).
    pub fn derive(
        k: usize,
        h: usize,
        gamma: Rational,
        m_bound: u64,
        d_bound: u64,
        eps_embed: Option<&Rational>,
    ) -> Result<ParameterChain, ParamError> {
        if k < 2 {
            return Err(ParamError::BadInput("at least 2 parts required"));
        }
        if h == 0 {
            return Err(ParamError::BadInput("tile height must be positive"));
        }
        if !gamma.is_positive() || gamma >= Rational::one() {
            return Err(ParamError::BadInput("gamma must lie in (0,1)"));
        }
        if m_bound == 0 || d_bound == 0 {
            return Err(ParamError::BadInput("bounds must be positive"));
        }
        let d = &gamma / &Rational::from_integer(4);
        let mut eps_prime = &d / &Rational::from_integer(12 * (k * k) as i64);
        if let Some(e) = eps_embed {
            if !e.is_positive() {
                return Err(ParamError::BadInput("embedding epsilon must be positive"));
            }
            eps_prime = eps_prime.min(e.pow(2));
        }
        let eps = (&eps_prime.pow(5) / &Rational::from_integer(16))
            .min(&d / &Rational::from_integer(4 * (k + 2) as i64));
        let d_prime = &d - &eps;
        let denom = Rational::from_integer(12)
            * Rational::from(h * h)
            * Rational::from(k * k)
            * Rational::from(m_bound as usize).pow(2)
            * Rational::from(d_bound as usize).pow(2);
        let zeta = denom.recip();
        let chain = ParameterChain {
            k,
            h,
            gamma,
            d,
            d_prime,
            eps_prime,
            eps,
            zeta,
            m_bound,
            d_bound,
        };
        chain.validate()?;
        Ok(chain)
    }

    /// Checks every chain inequality; `derive` always passes.
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.k < 2 || self.h == 0 {
            return Err(ParamError::BadInput("bad k or h"));
        }
        if !self.gamma.is_positive() || self.gamma >= Rational::one() {
            return Err(ParamError::ChainViolation("gamma must lie in (0,1)"));
        }
        let four = Rational::from_integer(4);
        if self.d != &self.gamma / &four {
            return Err(ParamError::ChainViolation("d must equal gamma/4"));
        }
        if !self.eps_prime.is_positive() {
            return Err(ParamError::ChainViolation("eps_prime must be positive"));
        }
        let ep_cap = &self.d / &Rational::from_integer(12 * (self.k * self.k) as i64);
        if self.eps_prime > ep_cap {
            return Err(ParamError::ChainViolation("eps_prime exceeds d/(12 k^2)"));
        }
        if !self.eps.is_positive() {
            return Err(ParamError::ChainViolation("eps must be positive"));
        }
        if self.eps > &self.eps_prime.pow(5) / &Rational::from_integer(16) {
            return Err(ParamError::ChainViolation("eps exceeds eps_prime^5/16"));
        }
        if self.eps > &self.d / &Rational::from_integer(4 * (self.k + 2) as i64) {
            return Err(ParamError::ChainViolation("eps exceeds d/(4(k+2))"));
        }
        if self.d_prime != &self.d - &self.eps {
            return Err(ParamError::ChainViolation("d_prime must equal d - eps"));
        }
        if !self.zeta.is_positive() {
            return Err(ParamError::ChainViolation("zeta must be positive"));
        }
        let hk = (self.h * self.h * self.k * self.k) as u64;
        let zeta_cap = (Rational::from_integer(12)
            * Rational::from(hk as usize)
            * Rational::from(self.m_bound as usize).pow(2)
            * Rational::from(self.d_bound as usize).pow(2))
        .recip();
        if self.zeta > zeta_cap {
            return Err(ParamError::ChainViolation(
                "zeta exceeds 1/(12 h^2 k^2 M^2 D^2)",
            ));
        }
        Ok(())
    }
}

/// Convenience container used by certificates; `lo <= hi` always.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityWindow {
    pub lo: Rational,
    pub hi: Rational,
}

impl DensityWindow {
    pub fn point(d: Rational) -> Self {
        DensityWindow { lo: d.clone(), hi: d }
    }

    pub fn around(center: &Rational, radius: &Rational) -> Self {
        DensityWindow {
            lo: (center - radius).max(Rational::zero()),
            hi: (center + radius).min(Rational::one()),
        }
    }

    pub fn contains(&self, d: &Rational) -> bool {
        &self.lo <= d && d <= &self.hi
    }
}

/// How a pair came to be considered regular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateKind {
    /// Verified by exhaustive subset enumeration.
    ExactExhaustive,
    /// Certified through the good-pair count; `good_pairs` is the verified
    /// count of ordered pairs, `refined` marks the sharper threshold.
    KrGoodPairs { good_pairs: usize, refined: bool },
    /// Inherited from a parent certificate through slicing.
    SlicingDerived {
        parent: Box<RegularityCertificate>,
        alpha: Rational,
    },
    /// Known regular by how the pair was built (e.g. complete or empty).
    ByConstruction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityCertificate {
    pub kind: CertificateKind,
    pub epsilon: EpsParam,
    /// Certified bounds on the pair's own density, when known.
    pub density_window: Option<DensityWindow>,
}

impl RegularityCertificate {
    /// A parameter >= 1 certifies nothing; callers are expected to surface
    /// this rather than hide it.
    pub fn is_vacuous(&self) -> bool {
        self.epsilon.is_vacuous()
    }

    pub fn epsilon_clamped(&self) -> EpsParam {
        self.epsilon.clamp_to_one()
    }
}
