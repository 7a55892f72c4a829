//! Commutative differential graded algebras with a minimal differential.
//!
//! A model pairs an algebra context with one differential polynomial per
//! generator. Construction enforces shape only: each `d(g)` must be
//! homogeneous of degree `|g| + 1` and decomposable (word length at least
//! two), and a circle generator must be closed. Whether `d` squares to zero
//! is a property to be checked, not a construction precondition, so corrupted
//! models can be built and then convicted by [`CdgaModel::check_d_squared`].
//!
//! Degrees above the cap are where the truncated model stops being a faithful
//! picture of the infinite one. The public [`CdgaModel::apply_d`] therefore
//! drops above-cap terms and raises an overflow flag, and the d-squared and
//! chain-map checkers report generators whose identities would leave the cap
//! window as unverifiable instead of silently passing them.

use crate::algebra::{
    basis_of, AlgebraContext, BasisFilter, GenId, Monomial, Polynomial,
};
use crate::linalg::{kernel_basis, quotient_dimension, rref, solve, QMatrix};
use crate::Q;
use num::Zero;
use std::collections::HashMap;

/// Result of a cap-aware differential application.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Truncated {
    pub value: Polynomial,
    /// True when terms above the cap were dropped from the exact result.
    pub overflowed: bool,
}

/// Outcome of the d-squared check over all generators.
#[derive(Clone, Debug)]
pub struct DSquaredReport {
    /// Generators with `d(d(g))` nonzero, with the offending residual,
    /// in generator order.
    pub failures: Vec<(String, Polynomial)>,
    /// Generators whose check would need components above the cap.
    pub unverifiable: Vec<String>,
    /// Number of generators checked exactly.
    pub checked: usize,
}

impl DSquaredReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.failures.first().map(|(n, _)| n.as_str())
    }
}

/// Cohomology of one degree: ranks and chosen representative cocycles.
#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub degree: u32,
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub dim: usize,
    /// Cocycles completing the coboundary basis inside the cocycle space;
    /// class coordinates everywhere in the crate refer to this list.
    pub representatives: Vec<Polynomial>,
}

/// Monomial basis of one graded component, with reverse lookup.
#[derive(Clone, Debug)]
pub(crate) struct Component {
    pub monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl Component {
    fn new(monomials: Vec<Monomial>) -> Self {
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Component { monomials, index }
    }

    pub fn dim(&self) -> usize {
        self.monomials.len()
    }

    /// Coordinates of a polynomial in this component. Panics if some term
    /// falls outside the enumerated basis, which means the caller mixed
    /// degrees or filters.
    pub fn to_vec(&self, p: &Polynomial) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.monomials.len()];
        for (m, c) in p.terms() {
            let i = *self
                .index
                .get(m)
                .unwrap_or_else(|| panic!("monomial outside component basis"));
            v[i] = c.clone();
        }
        v
    }

    pub fn to_poly(&self, v: &[Q]) -> Polynomial {
        assert_eq!(v.len(), self.monomials.len(), "coordinate length mismatch");
        let mut p = Polynomial::zero();
        for (i, c) in v.iter().enumerate() {
            p.add_term(self.monomials[i].clone(), c.clone());
        }
        p
    }
}

/// A free graded-commutative algebra equipped with a minimal differential.
#[derive(Clone, Debug)]
pub struct CdgaModel {
    ctx: AlgebraContext,
    diff: Vec<Polynomial>,
}

impl CdgaModel {
    /// Wraps a context and one differential per generator.
    ///
    /// Panics unless every differential is homogeneous of degree `|g| + 1`
    /// and decomposable, and the circle (if present) is closed.
    pub fn new(ctx: AlgebraContext, diff: Vec<Polynomial>) -> Self {
        assert_eq!(
            diff.len(),
            ctx.len(),
            "one differential required per generator"
        );
        for id in ctx.ids() {
            let g = ctx.generator(id);
            let d = &diff[id.0];
            if g.is_circle {
                assert!(d.is_zero(), "circle generator must be closed");
                continue;
            }
            if d.is_zero() {
                continue;
            }
            assert!(
                d.is_homogeneous_of_degree(g.degree + 1, &ctx),
                "d({}) is not homogeneous of degree {}",
                g.name,
                g.degree + 1
            );
            assert!(
                d.terms().all(|(m, _)| m.word_length() >= 2),
                "d({}) has a linear term, violating minimality",
                g.name
            );
        }
        CdgaModel { ctx, diff }
    }

    pub fn ctx(&self) -> &AlgebraContext {
        &self.ctx
    }

    pub fn cap(&self) -> u32 {
        self.ctx.cap()
    }

    pub fn differential(&self, id: GenId) -> &Polynomial {
        &self.diff[id.0]
    }

    /// Exact differential of a monomial by the graded Leibniz rule.
    fn d_monomial(&self, m: &Monomial) -> Polynomial {
        let mut out = Polynomial::zero();
        let factors = m.factors();
        for (i, &(id, e)) in factors.iter().enumerate() {
            let dg = &self.diff[id.0];
            if dg.is_zero() {
                continue;
            }
            let g_deg = self.ctx.generator(id).degree;
            // Sign bookkeeping: remove the first copy of this generator. The
            // differential of that copy first passes the prefix (one minus
            // sign per odd degree crossed), then d(g), which has degree
            // g_deg + 1, is commuted right past the rest of the word.
            let prefix: u32 = factors[..i]
                .iter()
                .map(|&(j, ej)| self.ctx.generator(j).degree * ej)
                .sum();
            let suffix: u32 = (e - 1) * g_deg
                + factors[i + 1..]
                    .iter()
                    .map(|&(j, ej)| self.ctx.generator(j).degree * ej)
                    .sum::<u32>();
            let sign_exp = prefix + (g_deg + 1) * suffix;
            let mut coeff = crate::q(e as i64);
            if sign_exp % 2 == 1 {
                coeff = -coeff;
            }
            let mut rest: Vec<(GenId, u32)> = factors.to_vec();
            if e == 1 {
                rest.remove(i);
            } else {
                rest[i].1 -= 1;
            }
            let rest_poly = Polynomial::from_monomial(Monomial::from_sorted(rest), coeff);
            out = out.add(&rest_poly.mul(dg, &self.ctx));
        }
        out
    }

    /// Exact differential of a polynomial, used internally wherever the
    /// result must be trusted above the cap.
    pub(crate) fn d_exact(&self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in p.terms() {
            out = out.add(&self.d_monomial(m).scale(c));
        }
        out
    }

    /// Applies the differential, dropping terms above the cap.
    ///
    /// The flag records whether anything was dropped; consumers that need the
    /// exact answer must check it.
    pub fn apply_d(&self, p: &Polynomial) -> Truncated {
        let exact = self.d_exact(p);
        let cap = self.ctx.cap();
        let mut value = Polynomial::zero();
        let mut overflowed = false;
        for (m, c) in exact.terms() {
            if m.degree(&self.ctx) > cap {
                overflowed = true;
            } else {
                value.add_term(m.clone(), c.clone());
            }
        }
        Truncated { value, overflowed }
    }

    /// Checks `d(d(g)) = 0` for every generator. A generator of degree `k`
    /// needs the degree `k + 2` component, so generators with `k + 2` above
    /// the cap are reported unverifiable rather than passed or failed.
    pub fn check_d_squared(&self) -> DSquaredReport {
        let mut failures = Vec::new();
        let mut unverifiable = Vec::new();
        let mut checked = 0;
        for id in self.ctx.ids() {
            let g = self.ctx.generator(id);
            if g.degree + 2 > self.ctx.cap() {
                unverifiable.push(g.name.clone());
                continue;
            }
            checked += 1;
            let dd = self.d_exact(&self.diff[id.0]);
            if !dd.is_zero() {
                failures.push((g.name.clone(), dd));
            }
        }
        DSquaredReport {
            failures,
            unverifiable,
            checked,
        }
    }

    pub(crate) fn component(&self, degree: u32, filter: BasisFilter) -> Component {
        Component::new(basis_of(&self.ctx, degree, filter))
    }

    pub(crate) fn component_unchecked(&self, degree: u32, filter: BasisFilter) -> Component {
        Component::new(crate::algebra::enumerate_basis(&self.ctx, degree, filter))
    }

    /// Matrix of the exact differential between two component bases; entry
    /// `(i, j)` is the coefficient of target monomial `i` in `d` of source
    /// monomial `j`.
    pub(crate) fn d_matrix(&self, from: &Component, to: &Component) -> QMatrix {
        QMatrix::from_columns(
            from.monomials
                .iter()
                .map(|m| to.to_vec(&self.d_monomial(m)))
                .collect(),
        )
    }

    /// Basis of the image of `d` into the given degree, as coordinate vectors
    /// in `comp`: the pivot columns of the differential matrix out of degree
    /// `degree - 1`.
    fn coboundary_basis(&self, degree: u32, comp: &Component) -> Vec<Vec<Q>> {
        if degree == 0 {
            return Vec::new();
        }
        let below = self.component(degree - 1, BasisFilter::any());
        let m = self.d_matrix(&below, comp);
        let piv = rref(&m).pivots;
        piv.into_iter().map(|j| m.column(j)).collect()
    }

    /// Cohomology in degree `k`, valid for `k <= cap - 1`; higher degrees
    /// would need components the truncated model cannot represent fully.
    ///
    /// Representatives complete the coboundary basis inside the cocycle
    /// space, chosen deterministically from the kernel basis.
    pub fn cohomology(&self, k: u32) -> CohomologyReport {
        assert!(
            k < self.ctx.cap(),
            "cohomology degree {k} not below cap {}",
            self.ctx.cap()
        );
        let comp = self.component(k, BasisFilter::any());
        let above = self.component(k + 1, BasisFilter::any());
        let cocycles = kernel_basis(&self.d_matrix(&comp, &above));
        let coboundaries = self.coboundary_basis(k, &comp);
        let quot = quotient_dimension(&coboundaries, &cocycles);
        assert_eq!(
            quot.dimension,
            cocycles.len() - coboundaries.len(),
            "rank bookkeeping mismatch in degree {k}"
        );
        CohomologyReport {
            degree: k,
            cocycle_dim: cocycles.len(),
            coboundary_dim: coboundaries.len(),
            dim: quot.dimension,
            representatives: quot
                .representatives
                .iter()
                .map(|v| comp.to_poly(v))
                .collect(),
        }
    }

    /// Coordinates of a cocycle's class against the representatives of
    /// `cohomology(k)`. Panics if the input is not a closed homogeneous
    /// polynomial of degree `k`.
    pub fn class_of(&self, p: &Polynomial, k: u32) -> Vec<Q> {
        assert!(
            p.is_homogeneous_of_degree(k, &self.ctx),
            "class_of input is not homogeneous of degree {k}"
        );
        assert!(
            self.d_exact(p).is_zero(),
            "class_of input is not a cocycle"
        );
        let report = self.cohomology(k);
        let comp = self.component(k, BasisFilter::any());
        let mut columns = self.coboundary_basis(k, &comp);
        let split = columns.len();
        for r in &report.representatives {
            columns.push(comp.to_vec(r));
        }
        let sol = solve(&QMatrix::from_columns(columns), &comp.to_vec(p))
            .expect("cocycle not spanned by coboundaries and representatives");
        sol[split..].to_vec()
    }

    /// Tensors with the circle model: adds the closed degree-1 generator `x`.
    /// Panics if a circle factor is already present.
    pub fn adjoin_circle(&self) -> CdgaModel {
        let mut ctx = self.ctx.clone();
        ctx.add_circle();
        let mut diff = self.diff.clone();
        diff.push(Polynomial::zero());
        CdgaModel { ctx, diff }
    }
}
