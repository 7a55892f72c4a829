//! Exact JSON persistence for models and morphisms.
//!
//! Every rational coefficient travels as a string `"p/q"` (or `"p"` for
//! integers), so a save/load cycle is bit-exact. Terms are emitted in the
//! canonical monomial order and generators in id order, which makes
//! serialization a pure function of the mathematical content: loading a
//! file and saving it again reproduces it byte for byte, and two equal
//! models always produce identical files.
//!
//! Writes go through a temporary file in the target directory followed by
//! a rename, so readers never observe a half-written artifact.

use crate::algebra::{normalize, AlgebraContext, GenId, Polynomial};
use crate::bigraded::{BigradedModel, CohomologySpec, SpecClass};
use crate::cdga::CdgaModel;
use crate::selfeq::CdgaMorphism;
use crate::Q;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid content in {path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

/// One monomial with its coefficient: `coef` is the exact rational as text,
/// `mono` the sorted factor list as `[name, exponent]` pairs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub coef: String,
    pub mono: Vec<(String, u32)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GeneratorJson {
    pub name: String,
    pub degree: u32,
    pub stage: u32,
    pub circle: bool,
    pub diff: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpecClassJson {
    pub name: String,
    pub degree: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelJson {
    pub cap: u32,
    pub spec: Vec<SpecClassJson>,
    pub generators: Vec<GeneratorJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ImageJson {
    pub generator: String,
    pub value: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MorphismJson {
    pub images: Vec<ImageJson>,
}

fn poly_to_terms(ctx: &AlgebraContext, p: &Polynomial) -> Vec<TermJson> {
    p.terms()
        .map(|(m, c)| TermJson {
            coef: c.to_string(),
            mono: m
                .factors()
                .iter()
                .map(|&(id, e)| (ctx.generator(id).name.clone(), e))
                .collect(),
        })
        .collect()
}

fn terms_to_poly(
    ctx: &AlgebraContext,
    terms: &[TermJson],
    fail: &impl Fn(String) -> LoadError,
) -> Result<Polynomial, LoadError> {
    let by_name: HashMap<&str, GenId> = ctx
        .ids()
        .map(|id| (ctx.generator(id).name.as_str(), id))
        .collect();
    let mut p = Polynomial::zero();
    for t in terms {
        let coef = Q::from_str(&t.coef)
            .map_err(|_| fail(format!("cannot read coefficient \"{}\"", t.coef)))?;
        let mut factors = Vec::new();
        for (name, e) in &t.mono {
            let id = *by_name
                .get(name.as_str())
                .ok_or_else(|| fail(format!("unknown generator \"{name}\"")))?;
            factors.push((id, *e));
        }
        let (sign, mono) = normalize(ctx, &factors)
            .ok_or_else(|| fail("monomial squares an odd generator".to_string()))?;
        p.add_term(mono, coef * crate::q(sign as i64));
    }
    Ok(p)
}

pub fn model_to_json(model: &BigradedModel) -> ModelJson {
    let ctx = model.ctx();
    let mut stage_of: HashMap<GenId, u32> = HashMap::new();
    for (s, stage) in model.stages().iter().enumerate() {
        for &id in stage {
            stage_of.insert(id, s as u32);
        }
    }
    ModelJson {
        cap: model.cap(),
        spec: model
            .spec()
            .classes()
            .iter()
            .map(|c| SpecClassJson {
                name: c.name.clone(),
                degree: c.degree,
            })
            .collect(),
        generators: ctx
            .ids()
            .map(|id| {
                let g = ctx.generator(id);
                GeneratorJson {
                    name: g.name.clone(),
                    degree: g.degree,
                    stage: if g.is_circle { 0 } else { stage_of[&id] },
                    circle: g.is_circle,
                    diff: poly_to_terms(ctx, model.model().differential(id)),
                }
            })
            .collect(),
    }
}

pub fn model_from_json(json: &ModelJson, path: &Path) -> Result<BigradedModel, LoadError> {
    let fail = |message: String| LoadError::Invalid {
        path: path.to_path_buf(),
        message,
    };
    let mut ctx = AlgebraContext::new(json.cap);
    for g in &json.generators {
        if g.circle {
            if g.name != "x" || g.degree != 1 {
                return Err(fail("the circle generator must be \"x\" of degree 1".into()));
            }
            if ctx.circle().is_some() {
                return Err(fail("more than one circle generator".into()));
            }
            ctx.add_circle();
            continue;
        }
        if g.degree < 1 || g.degree > json.cap {
            return Err(fail(format!(
                "generator {} has degree {} outside 1..={}",
                g.name, g.degree, json.cap
            )));
        }
        if ctx.by_name(&g.name).is_some() {
            return Err(fail(format!("generator {} listed twice", g.name)));
        }
        ctx.add_generator(&g.name, g.degree, g.stage);
    }
    let mut diff = Vec::new();
    for g in &json.generators {
        let p = terms_to_poly(&ctx, &g.diff, &fail)?;
        if g.circle && !p.is_zero() {
            return Err(fail("the circle generator must be closed".into()));
        }
        if !p.is_homogeneous_of_degree(g.degree + 1, &ctx) {
            return Err(fail(format!(
                "differential of {} is not homogeneous of degree {}",
                g.name,
                g.degree + 1
            )));
        }
        if p.terms().any(|(m, _)| m.word_length() < 2) {
            return Err(fail(format!(
                "differential of {} has a linear term",
                g.name
            )));
        }
        diff.push(p);
    }
    let mut stages: Vec<Vec<GenId>> = Vec::new();
    for (g, id) in json.generators.iter().zip(ctx.ids()) {
        if g.circle {
            continue;
        }
        if stages.len() <= g.stage as usize {
            stages.resize(g.stage as usize + 1, Vec::new());
        }
        stages[g.stage as usize].push(id);
    }
    if stages.is_empty() {
        return Err(fail("the model has no stage-zero generators".into()));
    }
    let spec = CohomologySpec::new(
        json.spec
            .iter()
            .map(|c| SpecClass {
                name: c.name.clone(),
                degree: c.degree,
            })
            .collect(),
    );
    Ok(BigradedModel::from_parts(
        CdgaModel::new(ctx, diff),
        spec,
        stages,
    ))
}

pub fn morphism_to_json(model: &CdgaModel, phi: &CdgaMorphism) -> MorphismJson {
    MorphismJson {
        images: model
            .ctx()
            .ids()
            .map(|id| ImageJson {
                generator: model.ctx().generator(id).name.clone(),
                value: poly_to_terms(model.ctx(), phi.image(id)),
            })
            .collect(),
    }
}

pub fn morphism_from_json(
    model: &CdgaModel,
    json: &MorphismJson,
    path: &Path,
) -> Result<CdgaMorphism, LoadError> {
    let fail = |message: String| LoadError::Invalid {
        path: path.to_path_buf(),
        message,
    };
    let ctx = model.ctx();
    if json.images.len() != ctx.len() {
        return Err(fail(format!(
            "expected {} images, found {}",
            ctx.len(),
            json.images.len()
        )));
    }
    let mut images = Vec::new();
    for (img, id) in json.images.iter().zip(ctx.ids()) {
        let g = ctx.generator(id);
        if img.generator != g.name {
            return Err(fail(format!(
                "image list names {} where {} was expected",
                img.generator, g.name
            )));
        }
        let p = terms_to_poly(ctx, &img.value, &fail)?;
        if !p.is_homogeneous_of_degree(g.degree, ctx) {
            return Err(fail(format!(
                "image of {} is not homogeneous of degree {}",
                g.name, g.degree
            )));
        }
        images.push(p);
    }
    Ok(CdgaMorphism::new(model, images))
}

/// Stable text form: pretty-printed with a trailing newline, a pure
/// function of the value.
pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("serialization cannot fail");
    out.push('\n');
    out
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut file = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    use std::io::Write;
    file.write_all(content.as_bytes())?;
    file.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn save_model(path: &Path, model: &BigradedModel) -> std::io::Result<()> {
    write_atomic(path, &to_canonical_string(&model_to_json(model)))
}

pub fn load_model(path: &Path) -> Result<BigradedModel, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let json: ModelJson = serde_json::from_str(&text).map_err(|source| LoadError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    model_from_json(&json, path)
}

pub fn save_morphism(path: &Path, model: &CdgaModel, phi: &CdgaMorphism) -> std::io::Result<()> {
    write_atomic(path, &to_canonical_string(&morphism_to_json(model, phi)))
}

pub fn load_morphism(path: &Path, model: &CdgaModel) -> Result<CdgaMorphism, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let json: MorphismJson = serde_json::from_str(&text).map_err(|source| LoadError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    morphism_from_json(model, &json, path)
}
