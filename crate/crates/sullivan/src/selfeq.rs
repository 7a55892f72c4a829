//! The self-equivalence that is trivial through every homotopy degree yet
//! nontrivial on cohomology.
//!
//! On the circle-adjoined model the morphism is seeded on stage zero by
//! fixing everything except the second degree-3 class, which picks up the
//! product of the degree-2 class with the circle. The seed propagates
//! stagewise: for a generator `w` the defect `phi(d w) - d w` is always of
//! the form `alpha * x` with `alpha` a closed quadratic word, so each
//! stage-homogeneous component of `alpha` is the differential of a unique
//! linear combination `w'` of next-stage generators, and `phi(w) = w + w' x`
//! restores the chain-map identity. Every image then differs from its
//! generator by a decomposable multiple of `x`, which is exactly membership
//! in the subgroups of self-equivalences with identity linear part up to any
//! degree, while the moved degree-3 class witnesses nontriviality on
//! cohomology.
//!
//! The circle is kept on the right throughout: images are stored as
//! `w + w' * x`, which is already the canonical monomial order because the
//! circle carries the largest generator id.

use crate::algebra::{BasisFilter, GenId, Monomial, Polynomial};
use crate::bigraded::BigradedModel;
use crate::cdga::CdgaModel;
use crate::Q;
use num::Zero;
use thiserror::Error;

/// Failure modes of the seeded construction. On models produced by the
/// builder none of these can occur; they guard hand-crafted inputs.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PhiError {
    #[error("the seed needs the wedge degree signature (2, 3, 3), got {0:?}")]
    SpecShape(Vec<u32>),
    #[error("the model has no circle generator to twist against")]
    MissingCircle,
    #[error("defect of {generator} is not a quadratic multiple of the circle")]
    DefectShape { generator: String },
    #[error("defect of {generator} is not closed")]
    DefectNotCycle { generator: String },
    #[error("defect of {generator} has a stage-{stage} component that is not a boundary")]
    DefectNotBoundary { generator: String, stage: u32 },
}

/// A degree-preserving algebra endomorphism, one image per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdgaMorphism {
    images: Vec<Polynomial>,
}

impl CdgaMorphism {
    /// Wraps explicit images; each must be zero or homogeneous of its
    /// generator's degree.
    pub fn new(model: &CdgaModel, images: Vec<Polynomial>) -> Self {
        assert_eq!(
            images.len(),
            model.ctx().len(),
            "one image required per generator"
        );
        for id in model.ctx().ids() {
            let g = model.ctx().generator(id);
            assert!(
                images[id.0].is_homogeneous_of_degree(g.degree, model.ctx()),
                "image of {} is not homogeneous of degree {}",
                g.name,
                g.degree
            );
        }
        CdgaMorphism { images }
    }

    pub fn identity(model: &CdgaModel) -> Self {
        CdgaMorphism {
            images: model.ctx().ids().map(Polynomial::from_generator).collect(),
        }
    }

    pub fn image(&self, id: GenId) -> &Polynomial {
        &self.images[id.0]
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    /// Extends the generator images multiplicatively to a polynomial.
    pub fn apply(&self, model: &CdgaModel, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (mono, c) in p.terms() {
            let mut term = Polynomial::from_monomial(Monomial::unit(), c.clone());
            for &(id, e) in mono.factors() {
                term = term.mul(&self.images[id.0].pow(e, model.ctx()), model.ctx());
            }
            out = out.add(&term);
        }
        out
    }

    /// `self` after `other`: `(self . other)(g) = self(other(g))`.
    pub fn compose(&self, other: &CdgaMorphism, model: &CdgaModel) -> CdgaMorphism {
        CdgaMorphism {
            images: other
                .images
                .iter()
                .map(|p| self.apply(model, p))
                .collect(),
        }
    }

    pub fn is_identity(&self, model: &CdgaModel) -> bool {
        model
            .ctx()
            .ids()
            .all(|id| self.images[id.0] == Polynomial::from_generator(id))
    }
}

/// Chain-map verdict: exact failures and the generators whose identity would
/// need components above the cap.
#[derive(Clone, Debug)]
pub struct ChainMapReport {
    pub failures: Vec<(String, Polynomial)>,
    pub unverifiable: Vec<String>,
    pub checked: usize,
}

impl ChainMapReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.failures.first().map(|(n, _)| n.as_str())
    }
}

/// Checks `phi(d g) = d(phi g)` exactly for every generator whose identity
/// stays within the cap window; generators of degree equal to the cap are
/// reported unverifiable.
pub fn is_chain_map(model: &CdgaModel, phi: &CdgaMorphism) -> ChainMapReport {
    let mut failures = Vec::new();
    let mut unverifiable = Vec::new();
    let mut checked = 0;
    for id in model.ctx().ids() {
        let g = model.ctx().generator(id);
        if g.degree + 1 > model.cap() {
            unverifiable.push(g.name.clone());
            continue;
        }
        checked += 1;
        let lhs = phi.apply(model, model.differential(id));
        let rhs = model.d_exact(phi.image(id));
        let residual = lhs.sub(&rhs);
        if !residual.is_zero() {
            failures.push((g.name.clone(), residual));
        }
    }
    ChainMapReport {
        failures,
        unverifiable,
        checked,
    }
}

/// A cohomology class not fixed by the morphism.
#[derive(Clone, Debug)]
pub struct MovedClass {
    pub degree: u32,
    /// Index into the representative list of `cohomology(degree)`.
    pub class_index: usize,
    pub representative: String,
    pub image_coords: Vec<Q>,
    pub image_text: String,
}

/// Membership and action data for one linear-part threshold `m`.
#[derive(Clone, Debug)]
pub struct ESharpReport {
    pub m: u32,
    /// True when every generator of degree at most `m` has image equal to
    /// itself plus decomposables.
    pub is_member: bool,
    pub is_chain_map: bool,
    /// Largest degree below which every generator has identity linear part
    /// (the cap when all do).
    pub linear_part_identity_up_to: u32,
    /// Classes moved by the induced map on cohomology, over all degrees
    /// below the cap. Empty when the morphism is not a chain map, since the
    /// action is undefined then.
    pub moved_classes: Vec<MovedClass>,
}

/// Whether `phi(v) - v` has no linear component, per generator.
fn linear_part_clean(phi: &CdgaMorphism, id: GenId) -> bool {
    let defect = phi.image(id).sub(&Polynomial::from_generator(id));
    defect.word_split().get(&1).is_none()
}

/// Reports membership of the morphism class in the subgroup with identity
/// linear part up to degree `m`, plus its action on cohomology.
pub fn e_sharp_report(model: &CdgaModel, phi: &CdgaMorphism, m: u32) -> ESharpReport {
    assert!(m <= model.cap(), "threshold {m} exceeds cap {}", model.cap());
    let mut identity_up_to = model.cap();
    for id in model.ctx().ids() {
        let g = model.ctx().generator(id);
        if !linear_part_clean(phi, id) && g.degree <= identity_up_to {
            identity_up_to = g.degree - 1;
        }
    }
    let chain = is_chain_map(model, phi);
    let mut moved_classes = Vec::new();
    if chain.passed() {
        for k in 0..model.cap() {
            let report = model.cohomology(k);
            for (i, rep) in report.representatives.iter().enumerate() {
                let image = phi.apply(model, rep);
                let coords = model.class_of(&image, k);
                let expected: Vec<Q> = (0..report.dim)
                    .map(|j| if j == i { crate::q(1) } else { Q::zero() })
                    .collect();
                if coords != expected {
                    moved_classes.push(MovedClass {
                        degree: k,
                        class_index: i,
                        representative: rep.to_text(model.ctx()),
                        image_coords: coords,
                        image_text: image.to_text(model.ctx()),
                    });
                }
            }
        }
    }
    ESharpReport {
        m,
        is_member: identity_up_to >= m,
        is_chain_map: chain.passed(),
        linear_part_identity_up_to: identity_up_to,
        moved_classes,
    }
}

/// Partially-defined morphism produced by the seed and grown stage by stage.
pub struct PhiBuilder<'a> {
    model: &'a BigradedModel,
    images: Vec<Option<Polynomial>>,
    stages_done: u32,
}

/// Seeds the twist on a circle-adjoined model of the wedge: the degree-2
/// class and the first degree-3 class are fixed, the second degree-3 class
/// gains the product of the degree-2 class with the circle.
pub fn seed_phi(model: &BigradedModel) -> Result<PhiBuilder<'_>, PhiError> {
    let ctx = model.ctx();
    let Some(x) = ctx.circle() else {
        return Err(PhiError::MissingCircle);
    };
    let degrees: Vec<u32> = model
        .spec()
        .classes()
        .iter()
        .map(|c| c.degree)
        .collect();
    if degrees != vec![2, 3, 3] {
        return Err(PhiError::SpecShape(degrees));
    }
    let stage0 = &model.stages()[0];
    let (a, c) = (stage0[0], stage0[2]);
    let mut images: Vec<Option<Polynomial>> = vec![None; ctx.len()];
    for &id in stage0 {
        images[id.0] = Some(Polynomial::from_generator(id));
    }
    let ax = Polynomial::from_generator(a).mul(&Polynomial::from_generator(x), ctx);
    images[c.0] = Some(Polynomial::from_generator(c).add(&ax));
    images[x.0] = Some(Polynomial::from_generator(x));
    Ok(PhiBuilder {
        model,
        images,
        stages_done: 0,
    })
}

impl<'a> PhiBuilder<'a> {
    fn apply_partial(&self, p: &Polynomial) -> Polynomial {
        let ctx = self.model.ctx();
        let mut out = Polynomial::zero();
        for (mono, c) in p.terms() {
            let mut term = Polynomial::from_monomial(Monomial::unit(), c.clone());
            for &(id, e) in mono.factors() {
                let image = self.images[id.0]
                    .as_ref()
                    .expect("image applied before being defined");
                term = term.mul(&image.pow(e, ctx), ctx);
            }
            out = out.add(&term);
        }
        out
    }

    /// Splits a defect `alpha * x` into `alpha`, requiring every term to be
    /// quadratic-times-circle.
    fn strip_circle_factor(&self, defect: &Polynomial, x: GenId) -> Option<Polynomial> {
        let mut alpha = Polynomial::zero();
        for (mono, c) in defect.terms() {
            if mono.exponent_of(x) != 1 || mono.word_length() != 3 {
                return None;
            }
            let rest: Vec<(GenId, u32)> = mono
                .factors()
                .iter()
                .copied()
                .filter(|&(id, _)| id != x)
                .collect();
            alpha.add_term(Monomial::from_sorted(rest), c.clone());
        }
        Some(alpha)
    }

    /// Extends the morphism over stage `m`, solving the defect of each
    /// generator. Stages must be extended in order. Returns the number of
    /// generators whose image gained a correction term.
    pub fn extend_stage(&mut self, m: u32) -> Result<usize, PhiError> {
        assert!(m >= 1, "stage 0 is covered by the seed");
        assert_eq!(m, self.stages_done + 1, "stages must be extended in order");
        let ctx = self.model.ctx();
        let x = ctx.circle().expect("seeded builder always has a circle");
        let cdga = self.model.model();
        let mut corrected = 0;
        for &w in &self.model.stages()[m as usize] {
            let name = || ctx.generator(w).name.clone();
            let k = ctx.generator(w).degree;
            let dw = cdga.differential(w);
            let defect = self.apply_partial(dw).sub(dw);
            if defect.is_zero() {
                self.images[w.0] = Some(Polynomial::from_generator(w));
                continue;
            }
            let alpha = self
                .strip_circle_factor(&defect, x)
                .ok_or_else(|| PhiError::DefectShape { generator: name() })?;
            if !cdga.d_exact(&alpha).is_zero() {
                return Err(PhiError::DefectNotCycle { generator: name() });
            }
            // Solve each stage component of alpha against the differentials
            // of the next stage's generators of degree k - 1.
            let mut correction = Polynomial::zero();
            for (j, alpha_j) in alpha.stage_split(ctx) {
                let candidates: Vec<GenId> = self
                    .model
                    .stages()
                    .get(j as usize + 1)
                    .map(|stage| {
                        stage
                            .iter()
                            .copied()
                            .filter(|&id| ctx.generator(id).degree == k - 1)
                            .collect()
                    })
                    .unwrap_or_default();
                let comp = cdga.component_unchecked(
                    k,
                    BasisFilter::word_exactly(2).with_stage(j),
                );
                let matrix = crate::linalg::QMatrix::from_columns(
                    candidates
                        .iter()
                        .map(|&id| comp.to_vec(cdga.differential(id)))
                        .collect(),
                );
                assert!(
                    crate::linalg::kernel_basis(&matrix).is_empty(),
                    "next-stage differentials are dependent; the bigrading is broken"
                );
                let sol = crate::linalg::solve(&matrix, &comp.to_vec(&alpha_j)).ok_or(
                    PhiError::DefectNotBoundary {
                        generator: name(),
                        stage: j,
                    },
                )?;
                for (coeff, &id) in sol.iter().zip(&candidates) {
                    correction.add_term(Monomial::generator(id), coeff.clone());
                }
            }
            let wx = correction.mul(&Polynomial::from_generator(x), ctx);
            self.images[w.0] = Some(Polynomial::from_generator(w).add(&wx));
            corrected += 1;
        }
        self.stages_done = m;
        Ok(corrected)
    }

    /// Finalizes once every stage has been extended.
    pub fn finish(self) -> CdgaMorphism {
        assert_eq!(
            self.stages_done as usize + 1,
            self.model.stages().len(),
            "not all stages have been extended"
        );
        let images: Vec<Polynomial> = self
            .images
            .into_iter()
            .map(|i| i.expect("every image defined after all stages"))
            .collect();
        CdgaMorphism::new(self.model.model(), images)
    }
}

/// Runs seed and all stage extensions on a circle-adjoined model.
pub fn construct_phi(model: &BigradedModel) -> Result<CdgaMorphism, PhiError> {
    let mut builder = seed_phi(model)?;
    for m in 1..model.stages().len() as u32 {
        builder.extend_stage(m)?;
    }
    Ok(builder.finish())
}

/// Inverts a morphism whose linear part is the identity, by word-length
/// back-substitution in order of generator degree. Panics otherwise.
pub fn invert(model: &CdgaModel, phi: &CdgaMorphism) -> CdgaMorphism {
    for id in model.ctx().ids() {
        assert!(
            linear_part_clean(phi, id),
            "linear part is not the identity at {}",
            model.ctx().generator(id).name
        );
    }
    let mut order: Vec<GenId> = model.ctx().ids().collect();
    order.sort_by_key(|&id| (model.ctx().generator(id).degree, id));
    let mut images: Vec<Option<Polynomial>> = vec![None; model.ctx().len()];
    for id in order {
        // psi(g) = g - psi(phi(g) - g); the defect only involves generators
        // of strictly smaller degree, whose inverses are already known.
        let defect = phi.image(id).sub(&Polynomial::from_generator(id));
        let mut pulled = Polynomial::zero();
        for (mono, c) in defect.terms() {
            let mut term = Polynomial::from_monomial(Monomial::unit(), c.clone());
            for &(fid, e) in mono.factors() {
                let image = images[fid.0]
                    .as_ref()
                    .expect("defect references a not-yet-inverted generator");
                term = term.mul(&image.pow(e, model.ctx()), model.ctx());
            }
            pulled = pulled.add(&term);
        }
        images[id.0] = Some(Polynomial::from_generator(id).sub(&pulled));
    }
    CdgaMorphism::new(
        model,
        images.into_iter().map(Option::unwrap).collect(),
    )
}

/// Pushes a morphism of the circle-adjoined model down to the base model by
/// substituting zero for the circle: terms containing the circle are dropped
/// from every image of a non-circle generator.
///
/// Generator ids agree between the two models because the circle carries the
/// last id.
pub fn substitute_circle_zero(
    adjoined: &CdgaModel,
    phi: &CdgaMorphism,
    base: &CdgaModel,
) -> CdgaMorphism {
    let x = adjoined
        .ctx()
        .circle()
        .expect("substitution source must have a circle");
    assert!(
        base.ctx().circle().is_none(),
        "substitution target must not have a circle"
    );
    assert_eq!(
        base.ctx().len() + 1,
        adjoined.ctx().len(),
        "base and adjoined generator tables do not align"
    );
    let images: Vec<Polynomial> = base
        .ctx()
        .ids()
        .map(|id| {
            assert_eq!(
                base.ctx().generator(id).name,
                adjoined.ctx().generator(id).name,
                "generator tables disagree"
            );
            let mut out = Polynomial::zero();
            for (mono, c) in phi.image(id).terms() {
                if mono.exponent_of(x) == 0 {
                    out.add_term(mono.clone(), c.clone());
                }
            }
            out
        })
        .collect();
    CdgaMorphism::new(base, images)
}
