//! Stagewise construction of the bigraded minimal model realizing a graded
//! vector space with trivial products as its cohomology.
//!
//! Stage zero adjoins one closed generator per prescribed cohomology class.
//! Stage `m + 1` adjoins one generator per basis element of the space of
//! closed quadratic words of stage exactly `m`, with the differential sending
//! the new generator to its cycle. Iterating until no cycle would produce a
//! generator of degree within the cap yields a model whose cohomology is the
//! prescribed space again: the new cocycles introduced by each stage are
//! exactly the differentials of the next one.
//!
//! Nothing here is assumed: [`BigradedModel::verify`] re-derives the expected
//! cohomology dimensions, checks that every decomposable cocycle bounds, that
//! `d` squares to zero where the cap permits checking, and that `d` really is
//! an isomorphism from each positive stage onto the previous stage's
//! quadratic cycles.

use crate::algebra::{AlgebraContext, BasisFilter, GenId, Monomial, Polynomial};
use crate::cdga::CdgaModel;
use crate::linalg::{kernel_basis, rref, solve, QMatrix};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// One prescribed cohomology class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecClass {
    pub name: String,
    pub degree: u32,
}

/// A finite list of positive-degree classes with all products zero; the
/// target cohomology of the models built here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologySpec {
    classes: Vec<SpecClass>,
}

impl CohomologySpec {
    /// Validates that all degrees are at least two (the realized space is
    /// simply connected) and that names are distinct.
    pub fn new(classes: Vec<SpecClass>) -> Self {
        for c in &classes {
            assert!(c.degree >= 2, "spec class {} must have degree >= 2", c.name);
        }
        for (i, c) in classes.iter().enumerate() {
            assert!(
                classes[..i].iter().all(|o| o.name != c.name),
                "duplicate spec class name {}",
                c.name
            );
        }
        CohomologySpec { classes }
    }

    /// The built-in wedge of one 2-sphere and two 3-spheres.
    pub fn wedge_s2_s3_s3() -> Self {
        CohomologySpec::new(vec![
            SpecClass {
                name: "a2".into(),
                degree: 2,
            },
            SpecClass {
                name: "b3".into(),
                degree: 3,
            },
            SpecClass {
                name: "c3".into(),
                degree: 3,
            },
        ])
    }

    pub fn classes(&self) -> &[SpecClass] {
        &self.classes
    }

    pub fn max_degree(&self) -> u32 {
        self.classes.iter().map(|c| c.degree).max().unwrap_or(0)
    }

    /// Expected cohomology dimension in degree `k`: the unit in degree zero,
    /// one dimension per class elsewhere.
    pub fn expected_h_dim(&self, k: u32) -> usize {
        if k == 0 {
            1
        } else {
            self.classes.iter().filter(|c| c.degree == k).count()
        }
    }
}

/// Verification outcome: re-derived cohomology dimensions and the list of
/// violated properties, empty when the model is certified.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub cap: u32,
    /// `h_dims[k]` for `k` up to `cap - 1`, the trustworthy window.
    pub h_dims: Vec<usize>,
    pub expected_h_dims: Vec<usize>,
    pub violations: Vec<String>,
    /// Generators whose d-squared check would need components above the cap.
    pub d2_unverifiable: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A minimal model carrying the stage decomposition of its generators.
#[derive(Clone, Debug)]
pub struct BigradedModel {
    model: CdgaModel,
    spec: CohomologySpec,
    stages: Vec<Vec<GenId>>,
}

impl BigradedModel {
    pub fn model(&self) -> &CdgaModel {
        &self.model
    }

    pub fn ctx(&self) -> &AlgebraContext {
        self.model.ctx()
    }

    pub fn cap(&self) -> u32 {
        self.model.cap()
    }

    pub fn spec(&self) -> &CohomologySpec {
        &self.spec
    }

    pub fn stages(&self) -> &[Vec<GenId>] {
        &self.stages
    }

    /// Number of generators in each degree, for reporting and goldens.
    pub fn generator_counts(&self) -> BTreeMap<u32, usize> {
        let mut counts = BTreeMap::new();
        for id in self.ctx().ids() {
            if self.ctx().generator(id).is_circle {
                continue;
            }
            *counts.entry(self.ctx().generator(id).degree).or_insert(0) += 1;
        }
        counts
    }

    /// The same model tensored with a closed circle class. The circle gets
    /// the last generator id and belongs to no stage.
    pub fn adjoin_circle(&self) -> BigradedModel {
        BigradedModel {
            model: self.model.adjoin_circle(),
            spec: self.spec.clone(),
            stages: self.stages.clone(),
        }
    }

    /// Reassembles a model from parts already known to be structurally
    /// consistent, as the JSON loader produces them. Stage lists must
    /// partition the non-circle generators in id order.
    pub(crate) fn from_parts(
        model: CdgaModel,
        spec: CohomologySpec,
        stages: Vec<Vec<GenId>>,
    ) -> Self {
        let listed: usize = stages.iter().map(Vec::len).sum();
        let expected = model
            .ctx()
            .ids()
            .filter(|&id| !model.ctx().generator(id).is_circle)
            .count();
        assert_eq!(listed, expected, "stage lists must cover all generators");
        BigradedModel {
            model,
            spec,
            stages,
        }
    }
}

/// Stage zero: one closed generator per spec class, in spec order.
///
/// Panics if some class degree exceeds the cap; callers that want a graceful
/// cap-too-small verdict must gate on [`CohomologySpec::max_degree`] first.
pub fn build_stage_zero(spec: &CohomologySpec, cap: u32) -> BigradedModel {
    assert!(
        spec.max_degree() <= cap,
        "cap {cap} is below the largest spec class degree {}",
        spec.max_degree()
    );
    let mut ctx = AlgebraContext::new(cap);
    let mut stage0 = Vec::new();
    for class in spec.classes() {
        stage0.push(ctx.add_generator(&class.name, class.degree, 0));
    }
    let diffs = vec![Polynomial::zero(); ctx.len()];
    BigradedModel {
        model: CdgaModel::new(ctx, diffs),
        spec: spec.clone(),
        stages: vec![stage0],
    }
}

impl BigradedModel {
    /// Basis of the closed quadratic words of stage exactly `m` and degree
    /// `k`, in the deterministic kernel order. Degree may run one past the
    /// cap: those cycles correspond to generators of degree exactly the cap.
    pub fn quadratic_cycles(&self, m: u32, k: u32) -> Vec<Polynomial> {
        assert!(
            (m as usize) < self.stages.len(),
            "stage {m} has not been built"
        );
        assert!(k <= self.cap() + 1, "cycle degree {k} beyond cap window");
        let source = self
            .model
            .component_unchecked(k, BasisFilter::word_exactly(2).with_stage(m));
        if source.dim() == 0 {
            return Vec::new();
        }
        // Coordinates for the image: the monomials actually hit by d.
        let mut target_monomials: std::collections::BTreeSet<Monomial> =
            std::collections::BTreeSet::new();
        let images: Vec<Polynomial> = source
            .monomials
            .iter()
            .map(|mono| {
                self.model
                    .d_exact(&Polynomial::from_monomial(mono.clone(), crate::q(1)))
            })
            .collect();
        for img in &images {
            for (mono, _) in img.terms() {
                target_monomials.insert(mono.clone());
            }
        }
        let target: Vec<Monomial> = target_monomials.into_iter().collect();
        let index: std::collections::HashMap<&Monomial, usize> =
            target.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut matrix = QMatrix::zeros(target.len(), source.dim());
        for (j, img) in images.iter().enumerate() {
            for (mono, c) in img.terms() {
                matrix.set(index[mono], j, c.clone());
            }
        }
        kernel_basis(&matrix)
            .into_iter()
            .map(|v| source.to_poly(&v))
            .collect()
    }

    /// Adjoins stage `m + 1`: one generator per quadratic stage-`m` cycle
    /// whose degree stays within the cap. Returns the number adjoined.
    ///
    /// Must be called with `m` equal to the last built stage.
    pub fn extend_stage(&mut self, m: u32) -> usize {
        assert_eq!(
            m as usize + 1,
            self.stages.len(),
            "extend_stage must target the last built stage"
        );
        let mut ctx = self.ctx().clone();
        let mut diffs: Vec<Polynomial> =
            self.ctx().ids().map(|id| self.model.differential(id).clone()).collect();
        let mut new_stage = Vec::new();
        for cycle_degree in 2..=self.cap() + 1 {
            let cycles = self.quadratic_cycles(m, cycle_degree);
            if cycles.is_empty() {
                continue;
            }
            let gen_degree = cycle_degree - 1;
            // Quadratic stage-m words have degree at least m + 4, so every
            // stage-(m+1) generator has degree at least its stage plus two;
            // this is what makes the cap a stage bound as well.
            assert!(
                gen_degree >= m + 3,
                "stage {} generator of degree {gen_degree} contradicts the stage grading",
                m + 1
            );
            if gen_degree > self.cap() {
                continue;
            }
            for (i, cycle) in cycles.into_iter().enumerate() {
                let name = format!("w{}_{}_{}", m + 1, gen_degree, i);
                let id = ctx.add_generator(&name, gen_degree, m + 1);
                debug_assert_eq!(id.0, diffs.len());
                diffs.push(cycle);
                new_stage.push(id);
            }
        }
        let added = new_stage.len();
        self.stages.push(new_stage);
        self.model = CdgaModel::new(ctx, diffs);
        added
    }
}

/// Runs the full construction: stage zero, then extensions until a stage
/// contributes nothing within the cap.
pub fn build(spec: &CohomologySpec, cap: u32) -> BigradedModel {
    let mut model = build_stage_zero(spec, cap);
    let mut m = 0;
    loop {
        assert!(m <= cap, "stage count exceeded the cap without terminating");
        if model.extend_stage(m) == 0 {
            model.stages.pop();
            return model;
        }
        m += 1;
    }
}

impl BigradedModel {
    /// Certifies the construction. The checks are independent re-derivations,
    /// not replays of the builder:
    ///
    /// 1. cohomology dimensions match the spec in every degree below the cap;
    /// 2. every decomposable cocycle below the cap is a coboundary;
    /// 3. `d` squares to zero wherever the cap permits checking;
    /// 4. differentials respect the bigrading, and `d` maps each positive
    ///    stage isomorphically onto the previous stage's quadratic cycles;
    /// 5. no further generator of degree within the cap is missing.
    pub fn verify(&self) -> VerifyReport {
        let cap = self.cap();
        let mut violations = Vec::new();

        // Bigrading shape of every differential.
        for (s, stage) in self.stages.iter().enumerate() {
            for &id in stage {
                let g = self.ctx().generator(id);
                let d = self.model.differential(id);
                if g.stage != s as u32 {
                    violations.push(format!("generator {} recorded in stage {s}", g.name));
                }
                if s == 0 {
                    if !d.is_zero() {
                        violations.push(format!("stage-0 generator {} is not closed", g.name));
                    }
                    continue;
                }
                if d.is_zero() {
                    violations.push(format!("stage-{s} generator {} is closed", g.name));
                    continue;
                }
                if !d.terms().all(|(mono, _)| mono.word_length() == 2) {
                    violations.push(format!("d({}) is not purely quadratic", g.name));
                }
                if !d
                    .terms()
                    .all(|(mono, _)| mono.stage(self.ctx()) == s as u32 - 1)
                {
                    violations.push(format!("d({}) does not lower the stage by one", g.name));
                }
            }
        }

        // d restricted to each positive stage and degree must be a bijection
        // onto the quadratic cycles of the stage below.
        for s in 1..self.stages.len() {
            let stage = &self.stages[s];
            let degrees: std::collections::BTreeSet<u32> = stage
                .iter()
                .map(|&id| self.ctx().generator(id).degree)
                .collect();
            for &k in &degrees {
                let gens: Vec<GenId> = stage
                    .iter()
                    .copied()
                    .filter(|&id| self.ctx().generator(id).degree == k)
                    .collect();
                let cycles = self.quadratic_cycles(s as u32 - 1, k + 1);
                if cycles.len() != gens.len() {
                    violations.push(format!(
                        "stage {s} degree {k}: {} generators against {} quadratic cycles",
                        gens.len(),
                        cycles.len()
                    ));
                    continue;
                }
                let comp = self.model.component_unchecked(
                    k + 1,
                    BasisFilter::word_exactly(2).with_stage(s as u32 - 1),
                );
                let d_vecs: Vec<Vec<crate::Q>> = gens
                    .iter()
                    .map(|&id| comp.to_vec(self.model.differential(id)))
                    .collect();
                let cycle_vecs: Vec<Vec<crate::Q>> =
                    cycles.iter().map(|c| comp.to_vec(c)).collect();
                let rank_d = rref(&QMatrix::from_columns(d_vecs.clone())).rank;
                if rank_d != gens.len() {
                    violations.push(format!(
                        "stage {s} degree {k}: differentials are dependent"
                    ));
                }
                let mut union = d_vecs;
                union.extend(cycle_vecs);
                if rref(&QMatrix::from_columns(union)).rank != gens.len() {
                    violations.push(format!(
                        "stage {s} degree {k}: differentials do not span the cycle space"
                    ));
                }
            }
        }

        // Exhaustion: the last stage leaves no cycle that should have become
        // a generator of degree within the cap.
        let last = self.stages.len() as u32 - 1;
        for cycle_degree in 2..=cap + 1 {
            if cycle_degree - 1 > cap {
                continue;
            }
            let missed = self.quadratic_cycles(last, cycle_degree).len();
            if missed > 0 {
                violations.push(format!(
                    "stage {last} still has {missed} unkilled cycles of degree {cycle_degree}"
                ));
            }
        }

        // d squared, within the verifiable window.
        let d2 = self.model.check_d_squared();
        for (name, _) in &d2.failures {
            violations.push(format!("d(d({name})) is nonzero"));
        }

        // Cohomology dimensions and vanishing of decomposable classes, per
        // degree; degrees are independent, so compute them in parallel.
        let expected_h_dims: Vec<usize> =
            (0..cap).map(|k| self.spec.expected_h_dim(k)).collect();
        let per_degree: Vec<(usize, Vec<String>)> = (0..cap)
            .into_par_iter()
            .map(|k| {
                let mut local = Vec::new();
                let report = self.model.cohomology(k);
                let decomposable = self
                    .model
                    .component(k, BasisFilter::word_at_least(2));
                if decomposable.dim() > 0 {
                    let full = self.model.component(k, BasisFilter::any());
                    let above = self.model.component(k + 1, BasisFilter::any());
                    let restricted = self.model.d_matrix(&decomposable, &above);
                    let below = if k > 0 {
                        Some(self.model.component(k - 1, BasisFilter::any()))
                    } else {
                        None
                    };
                    for v in kernel_basis(&restricted) {
                        let poly = decomposable.to_poly(&v);
                        let solvable = below.as_ref().is_some_and(|b| {
                            solve(
                                &self.model.d_matrix(b, &full),
                                &full.to_vec(&poly),
                            )
                            .is_some()
                        });
                        if !solvable {
                            local.push(format!(
                                "decomposable cocycle {} of degree {k} is not a boundary",
                                poly.to_text(self.ctx())
                            ));
                        }
                    }
                }
                (report.dim, local)
            })
            .collect();
        let h_dims: Vec<usize> = per_degree.iter().map(|(d, _)| *d).collect();
        for (k, (dim, local)) in per_degree.into_iter().enumerate() {
            if dim != expected_h_dims[k] {
                violations.push(format!(
                    "H^{k} has dimension {dim}, expected {}",
                    expected_h_dims[k]
                ));
            }
            violations.extend(local);
        }

        VerifyReport {
            cap,
            h_dims,
            expected_h_dims,
            violations,
            d2_unverifiable: d2.unverifiable,
        }
    }
}
