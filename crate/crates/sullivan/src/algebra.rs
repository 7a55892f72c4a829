//! Free graded-commutative algebra on a finite list of homogeneous generators.
//!
//! Monomials are stored in a canonical form: factors sorted by generator id,
//! exponents merged, odd generators never squared. Normalization reports the
//! Koszul sign it produced, one factor of minus one per transposition of two
//! odd-degree generators. Polynomials keep their terms in a `BTreeMap` keyed
//! by the canonical monomial order, so iteration, serialization, and equality
//! are deterministic by construction.
//!
//! A context owns the generator table and the degree cap. The cap bounds the
//! degrees of generators and of publicly enumerated components; polynomial
//! arithmetic itself is exact and never truncates.

use crate::Q;
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Index of a generator inside its context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId(pub usize);

/// A homogeneous algebra generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Generator {
    pub name: String,
    pub degree: u32,
    pub stage: u32,
    pub is_circle: bool,
}

impl Generator {
    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

/// Generator table plus the degree cap of the ambient model.
#[derive(Clone, Debug)]
pub struct AlgebraContext {
    generators: Vec<Generator>,
    cap: u32,
}

impl AlgebraContext {
    pub fn new(cap: u32) -> Self {
        AlgebraContext {
            generators: Vec::new(),
            cap,
        }
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Appends a generator and returns its id. Names must be unique and
    /// degrees must be positive and within the cap.
    pub fn add_generator(&mut self, name: &str, degree: u32, stage: u32) -> GenId {
        assert!(degree >= 1, "generator {name} must have positive degree");
        assert!(
            degree <= self.cap,
            "generator {name} of degree {degree} exceeds cap {}",
            self.cap
        );
        assert!(
            self.by_name(name).is_none(),
            "duplicate generator name {name}"
        );
        self.generators.push(Generator {
            name: name.to_string(),
            degree,
            stage,
            is_circle: false,
        });
        GenId(self.generators.len() - 1)
    }

    /// Appends the degree-1 circle generator `x`. At most one may exist.
    pub fn add_circle(&mut self) -> GenId {
        assert!(
            self.circle().is_none(),
            "circle generator already present"
        );
        assert!(self.by_name("x").is_none(), "name x already taken");
        self.generators.push(Generator {
            name: "x".to_string(),
            degree: 1,
            stage: 0,
            is_circle: true,
        });
        GenId(self.generators.len() - 1)
    }

    pub fn generator(&self, id: GenId) -> &Generator {
        &self.generators[id.0]
    }

    pub fn by_name(&self, name: &str) -> Option<GenId> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .map(GenId)
    }

    pub fn circle(&self) -> Option<GenId> {
        self.generators
            .iter()
            .position(|g| g.is_circle)
            .map(GenId)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = GenId> {
        (0..self.generators.len()).map(GenId)
    }

    fn check_id(&self, id: GenId) {
        assert!(
            id.0 < self.generators.len(),
            "unknown generator id {}",
            id.0
        );
    }
}

// ---- Monomials ----

/// Canonical monomial: factors sorted by generator id, exponents positive,
/// odd generators with exponent one. The unit monomial has no factors.
///
/// The derived order (lexicographic on the factor list) is the canonical
/// monomial order used for polynomial storage and basis enumeration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<(GenId, u32)>,
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial { factors: Vec::new() }
    }

    pub fn generator(id: GenId) -> Self {
        Monomial {
            factors: vec![(id, 1)],
        }
    }

    /// Wraps a factor list that is already canonical. Callers must guarantee
    /// sortedness; used internally when stripping factors from known-canonical
    /// monomials.
    pub(crate) fn from_sorted(factors: Vec<(GenId, u32)>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(factors.iter().all(|&(_, e)| e > 0));
        Monomial { factors }
    }

    pub fn factors(&self) -> &[(GenId, u32)] {
        &self.factors
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self, ctx: &AlgebraContext) -> u32 {
        self.factors
            .iter()
            .map(|&(id, e)| ctx.generator(id).degree * e)
            .sum()
    }

    pub fn stage(&self, ctx: &AlgebraContext) -> u32 {
        self.factors
            .iter()
            .map(|&(id, e)| ctx.generator(id).stage * e)
            .sum()
    }

    pub fn word_length(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent_of(&self, id: GenId) -> u32 {
        self.factors
            .iter()
            .find(|&&(g, _)| g == id)
            .map_or(0, |&(_, e)| e)
    }

    pub fn to_text(&self, ctx: &AlgebraContext) -> String {
        if self.is_unit() {
            return "1".to_string();
        }
        let mut out = String::new();
        for (i, &(id, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                out.push('*');
            }
            out.push_str(&ctx.generator(id).name);
            if e > 1 {
                let _ = write!(out, "^{e}");
            }
        }
        out
    }
}

/// Sorts an arbitrary generator-power list into canonical form.
///
/// Returns the Koszul sign together with the canonical monomial, or `None`
/// when the product vanishes because some odd generator occurs at least twice.
/// Factors with exponent zero are dropped. Panics on unknown generator ids.
pub fn normalize(ctx: &AlgebraContext, factors: &[(GenId, u32)]) -> Option<(i8, Monomial)> {
    let mut flat: Vec<GenId> = Vec::new();
    for &(id, e) in factors {
        ctx.check_id(id);
        for _ in 0..e {
            flat.push(id);
        }
    }
    // Count inversions between odd generators: each such pair costs one
    // transposition of two odd elements under a stable sort.
    let mut sign = 1i8;
    for i in 0..flat.len() {
        for j in i + 1..flat.len() {
            if flat[j] < flat[i]
                && ctx.generator(flat[i]).is_odd()
                && ctx.generator(flat[j]).is_odd()
            {
                sign = -sign;
            }
        }
    }
    flat.sort();
    let mut merged: Vec<(GenId, u32)> = Vec::new();
    for id in flat {
        match merged.last_mut() {
            Some((last, e)) if *last == id => *e += 1,
            _ => merged.push((id, 1)),
        }
    }
    if merged
        .iter()
        .any(|&(id, e)| e >= 2 && ctx.generator(id).is_odd())
    {
        return None;
    }
    Some((sign, Monomial { factors: merged }))
}

// ---- Polynomials ----

/// Finite rational linear combination of canonical monomials. Zero
/// coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Q>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn one() -> Self {
        Polynomial::from_monomial(Monomial::unit(), Q::one())
    }

    pub fn from_monomial(m: Monomial, c: Q) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(m, c);
        p
    }

    pub fn from_generator(id: GenId) -> Self {
        Polynomial::from_monomial(Monomial::generator(id), Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, f: &Q) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c * f);
        }
        out
    }

    /// Graded-commutative product; signs come from monomial normalization.
    pub fn mul(&self, other: &Polynomial, ctx: &AlgebraContext) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                let mut factors = m1.factors.clone();
                factors.extend_from_slice(&m2.factors);
                if let Some((sign, m)) = normalize(ctx, &factors) {
                    out.add_term(m, c1 * c2 * crate::q(sign as i64));
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32, ctx: &AlgebraContext) -> Polynomial {
        let mut out = Polynomial::one();
        for _ in 0..e {
            out = out.mul(self, ctx);
        }
        out
    }

    /// Common degree of all terms: `None` for the zero polynomial; panics if
    /// the terms are not degree-homogeneous.
    pub fn homogeneous_degree(&self, ctx: &AlgebraContext) -> Option<u32> {
        let mut degs = self.terms.keys().map(|m| m.degree(ctx));
        let first = degs.next()?;
        assert!(
            degs.all(|d| d == first),
            "polynomial is not degree-homogeneous"
        );
        Some(first)
    }

    pub fn is_homogeneous_of_degree(&self, k: u32, ctx: &AlgebraContext) -> bool {
        self.terms.keys().all(|m| m.degree(ctx) == k)
    }

    /// Splits into word-length-homogeneous components, omitting zero ones.
    pub fn word_split(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.word_length())
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Splits into stage-homogeneous components, omitting zero ones.
    pub fn stage_split(&self, ctx: &AlgebraContext) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (m, c) in self.terms() {
            out.entry(m.stage(ctx))
                .or_default()
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Report-friendly text form: terms sorted by word length, then by the
    /// canonical monomial order, with sign-aware joining.
    pub fn to_text(&self, ctx: &AlgebraContext) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut sorted: Vec<(&Monomial, &Q)> = self.terms().collect();
        sorted.sort_by_key(|(m, _)| (m.word_length(), (*m).clone()));
        let mut out = String::new();
        for (i, (m, c)) in sorted.into_iter().enumerate() {
            let negative = c < &Q::zero();
            let abs = if negative { -c.clone() } else { c.clone() };
            if i == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            if m.is_unit() {
                let _ = write!(out, "{abs}");
            } else if abs.is_one() {
                out.push_str(&m.to_text(ctx));
            } else {
                let _ = write!(out, "{abs}*{}", m.to_text(ctx));
            }
        }
        out
    }
}

// ---- Basis enumeration ----

/// Word-length restriction for basis enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordFilter {
    Any,
    Exactly(u32),
    AtLeast(u32),
}

/// Restriction on the monomials enumerated by [`basis_of`].
#[derive(Clone, Copy, Debug)]
pub struct BasisFilter {
    pub word: WordFilter,
    pub stage: Option<u32>,
}

impl BasisFilter {
    pub fn any() -> Self {
        BasisFilter {
            word: WordFilter::Any,
            stage: None,
        }
    }

    pub fn word_exactly(w: u32) -> Self {
        BasisFilter {
            word: WordFilter::Exactly(w),
            stage: None,
        }
    }

    pub fn word_at_least(w: u32) -> Self {
        BasisFilter {
            word: WordFilter::AtLeast(w),
            stage: None,
        }
    }

    pub fn with_stage(mut self, s: u32) -> Self {
        self.stage = Some(s);
        self
    }

    fn admits(&self, m: &Monomial, ctx: &AlgebraContext) -> bool {
        let word_ok = match self.word {
            WordFilter::Any => true,
            WordFilter::Exactly(w) => m.word_length() == w,
            WordFilter::AtLeast(w) => m.word_length() >= w,
        };
        word_ok && self.stage.is_none_or(|s| m.stage(ctx) == s)
    }
}

/// All canonical monomials of the given degree passing the filter, sorted in
/// the canonical monomial order. Degree zero yields the unit monomial alone
/// (unless filtered out). Panics when the degree exceeds the cap; internal
/// callers that legitimately need the slightly larger window used during
/// model construction go through [`enumerate_basis`].
pub fn basis_of(ctx: &AlgebraContext, degree: u32, filter: BasisFilter) -> Vec<Monomial> {
    assert!(
        degree <= ctx.cap(),
        "basis degree {degree} exceeds cap {}",
        ctx.cap()
    );
    enumerate_basis(ctx, degree, filter)
}

/// Cap-unchecked enumeration backing `basis_of`. The model builder uses this
/// for quadratic components one degree above the cap and their cubic images.
pub(crate) fn enumerate_basis(
    ctx: &AlgebraContext,
    degree: u32,
    filter: BasisFilter,
) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current: Vec<(GenId, u32)> = Vec::new();
    recurse(ctx, degree, 0, &mut current, &mut out);
    out.retain(|m| filter.admits(m, ctx));
    out.sort();
    out
}

fn recurse(
    ctx: &AlgebraContext,
    remaining: u32,
    next: usize,
    current: &mut Vec<(GenId, u32)>,
    out: &mut Vec<Monomial>,
) {
    if remaining == 0 {
        out.push(Monomial {
            factors: current.clone(),
        });
        return;
    }
    if next == ctx.len() {
        return;
    }
    let id = GenId(next);
    let g = ctx.generator(id);
    let max_e = if g.is_odd() {
        1.min(remaining / g.degree)
    } else {
        remaining / g.degree
    };
    // Exponent zero first: skip this generator entirely.
    recurse(ctx, remaining, next + 1, current, out);
    for e in 1..=max_e {
        current.push((id, e));
        recurse(ctx, remaining - e * g.degree, next + 1, current, out);
        current.pop();
    }
}
