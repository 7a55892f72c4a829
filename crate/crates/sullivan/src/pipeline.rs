//! The command layer behind the binary: build and verify a model, construct
//! and certify the self-equivalence, abelianize group presentations, and
//! the umbrella run chaining all three.
//!
//! Every command returns a [`CommandOutput`] whose `passed` flag separates
//! mathematical verdicts from environmental faults: fault conditions
//! (unreadable files, malformed input, bad configuration) surface as
//! [`PipelineError`] instead. The binary maps `passed` to exit codes 0/2
//! and errors to exit code 1, never conflating the two.
//!
//! All artifacts are written through the canonical JSON layer, so repeated
//! runs with the same inputs produce byte-identical files.

use crate::bigraded::{build, BigradedModel, CohomologySpec, SpecClass};
use crate::groups::{self, AbelianInvariants, GroupPresentation};
use crate::json::{self, LoadError, SpecClassJson};
use crate::selfeq::{
    construct_phi, e_sharp_report, invert, is_chain_map, substitute_circle_zero,
};
use crate::{Q, Z};
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// The built-in spec name for the wedge of one 2-sphere and two 3-spheres.
pub const WEDGE_SPEC_NAME: &str = "wedge-s2-s3-s3";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("in {path}: {source}")]
    Presentation {
        path: PathBuf,
        #[source]
        source: groups::ParseError,
    },
    #[error("{0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Json,
}

/// What a command hands back to the caller: the report to print and the
/// mathematical verdict. Artifact files are already on disk at this point.
pub struct CommandOutput {
    pub passed: bool,
    pub text: String,
}

fn write_file(path: &Path, content: &str) -> Result<(), PipelineError> {
    json::write_atomic(path, content).map_err(|source| PipelineError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Resolves a `--spec` argument: the built-in name, or a path to a JSON
/// file listing `{name, degree}` classes.
pub fn resolve_spec(arg: &str) -> Result<(CohomologySpec, String), PipelineError> {
    if arg == WEDGE_SPEC_NAME {
        return Ok((CohomologySpec::wedge_s2_s3_s3(), arg.to_string()));
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(PipelineError::Config(format!(
            "spec \"{arg}\" is neither the built-in \"{WEDGE_SPEC_NAME}\" nor a readable file"
        )));
    }
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let classes: Vec<SpecClassJson> =
        serde_json::from_str(&text).map_err(|source| LoadError::Json {
            path: path.to_path_buf(),
            source,
        })?;
    let mut seen = std::collections::HashSet::new();
    for c in &classes {
        if c.degree < 2 {
            return Err(PipelineError::Config(format!(
                "spec class {} has degree {} below 2",
                c.name, c.degree
            )));
        }
        if !seen.insert(c.name.clone()) {
            return Err(PipelineError::Config(format!(
                "spec class {} listed twice",
                c.name
            )));
        }
    }
    let spec = CohomologySpec::new(
        classes
            .into_iter()
            .map(|c| SpecClass {
                name: c.name,
                degree: c.degree,
            })
            .collect(),
    );
    Ok((spec, arg.to_string()))
}

#[derive(Clone, Debug, Serialize)]
pub struct ModelReport {
    pub spec: String,
    pub cap: u32,
    pub generators_by_degree: std::collections::BTreeMap<u32, usize>,
    pub generators_by_stage: std::collections::BTreeMap<u32, usize>,
    pub h_dims: Vec<usize>,
    pub expected_h_dims: Vec<usize>,
    pub violations: Vec<String>,
    pub d2_unverifiable: usize,
    pub passed: bool,
}

fn counts_line(counts: &std::collections::BTreeMap<u32, usize>) -> String {
    if counts.is_empty() {
        return "none".to_string();
    }
    counts
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn dims_line(dims: &[usize]) -> String {
    dims.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

fn render_model(r: &ModelReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "spec: {}", r.spec);
    let _ = writeln!(out, "cap: {}", r.cap);
    let _ = writeln!(
        out,
        "generators by degree: {}",
        counts_line(&r.generators_by_degree)
    );
    let _ = writeln!(
        out,
        "generators by stage: {}",
        counts_line(&r.generators_by_stage)
    );
    let _ = writeln!(
        out,
        "H dims (0..{}): {}",
        r.cap.saturating_sub(1),
        dims_line(&r.h_dims)
    );
    let _ = writeln!(out, "expected H dims: {}", dims_line(&r.expected_h_dims));
    let _ = writeln!(out, "d2 checks above cap: {}", r.d2_unverifiable);
    if r.violations.is_empty() {
        let _ = writeln!(out, "violations: none");
    } else {
        for v in &r.violations {
            let _ = writeln!(out, "violation: {v}");
        }
    }
    let _ = writeln!(out, "model check: {}", verdict(r.passed));
    out
}

fn verdict(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn model_report(spec_name: &str, model: &BigradedModel) -> ModelReport {
    let report = model.verify();
    let by_stage = model
        .stages()
        .iter()
        .enumerate()
        .map(|(s, stage)| (s as u32, stage.len()))
        .collect();
    ModelReport {
        spec: spec_name.to_string(),
        cap: model.cap(),
        generators_by_degree: model.generator_counts(),
        generators_by_stage: by_stage,
        h_dims: report.h_dims.clone(),
        expected_h_dims: report.expected_h_dims.clone(),
        violations: report.violations.clone(),
        d2_unverifiable: report.d2_unverifiable.len(),
        passed: report.passed(),
    }
}

/// A model report for a cap too small to hold the prescribed classes; the
/// build itself is not attempted.
fn cap_too_small_report(spec_name: &str, spec: &CohomologySpec, cap: u32) -> ModelReport {
    ModelReport {
        spec: spec_name.to_string(),
        cap,
        generators_by_degree: Default::default(),
        generators_by_stage: Default::default(),
        h_dims: Vec::new(),
        expected_h_dims: Vec::new(),
        violations: vec![format!(
            "cap {} is below the largest prescribed class degree {}; \
             the cohomology does not fit",
            cap,
            spec.max_degree()
        )],
        d2_unverifiable: 0,
        passed: false,
    }
}

/// Builds the model for a spec argument, writes it to `out`, and reports
/// the verification outcome.
pub fn model_build(
    spec_arg: &str,
    cap: u32,
    out: &Path,
    format: ReportFormat,
) -> Result<CommandOutput, PipelineError> {
    let (spec, spec_name) = resolve_spec(spec_arg)?;
    let report = if cap < spec.max_degree() {
        cap_too_small_report(&spec_name, &spec, cap)
    } else {
        let model = build(&spec, cap);
        json::save_model(out, &model).map_err(|source| PipelineError::Write {
            path: out.to_path_buf(),
            source,
        })?;
        model_report(&spec_name, &model)
    };
    let text = match format {
        ReportFormat::Text => format!("{}verdict: {}\n", render_model(&report), verdict(report.passed)),
        ReportFormat::Json => json::to_canonical_string(&report),
    };
    Ok(CommandOutput {
        passed: report.passed,
        text,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MovedClassReport {
    pub degree: u32,
    pub class_index: usize,
    pub representative: String,
    pub image: String,
    pub image_coords: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfeqReport {
    pub model_verified: bool,
    pub model_violations: Vec<String>,
    /// `None` when construction succeeded, otherwise the failure.
    pub construction_error: Option<String>,
    pub twisted_images: usize,
    pub total_images: usize,
    pub chain_map_passed: bool,
    pub chain_map_checked: usize,
    pub chain_map_unverifiable: usize,
    pub linear_part_identity_up_to: u32,
    pub member_for_all_m: bool,
    pub inverse_passed: bool,
    pub substitution_identity: bool,
    pub moved_classes: Vec<MovedClassReport>,
    pub action_passed: bool,
    pub passed: bool,
}

impl SelfeqReport {
    fn failed_early(verified: bool, violations: Vec<String>, error: Option<String>) -> Self {
        SelfeqReport {
            model_verified: verified,
            model_violations: violations,
            construction_error: error,
            twisted_images: 0,
            total_images: 0,
            chain_map_passed: false,
            chain_map_checked: 0,
            chain_map_unverifiable: 0,
            linear_part_identity_up_to: 0,
            member_for_all_m: false,
            inverse_passed: false,
            substitution_identity: false,
            moved_classes: Vec::new(),
            action_passed: false,
            passed: false,
        }
    }
}

fn vec_add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Runs the whole self-equivalence certification on a verified base model:
/// adjoin the circle, construct, check the chain map, the linear part
/// through every degree, the inverse, the circle substitution, and the
/// induced action on cohomology. Writes the morphism to `phi_out` and the
/// inverse to `psi_out` when given.
fn selfeq_core(
    base: &BigradedModel,
    phi_out: &Path,
    psi_out: Option<&Path>,
) -> Result<SelfeqReport, PipelineError> {
    let verify = base.verify();
    if !verify.passed() {
        return Ok(SelfeqReport::failed_early(
            false,
            verify.violations.clone(),
            None,
        ));
    }
    let adjoined = base.adjoin_circle();
    let model = adjoined.model();
    let phi = match construct_phi(&adjoined) {
        Ok(phi) => phi,
        Err(e) => {
            return Ok(SelfeqReport::failed_early(true, Vec::new(), Some(e.to_string())))
        }
    };
    json::save_morphism(phi_out, model, &phi).map_err(|source| PipelineError::Write {
        path: phi_out.to_path_buf(),
        source,
    })?;

    let ctx = model.ctx();
    let twisted = ctx
        .ids()
        .filter(|&id| phi.image(id) != &crate::algebra::Polynomial::from_generator(id))
        .count();
    let chain = is_chain_map(model, &phi);
    let esharp = e_sharp_report(model, &phi, model.cap());
    let member_for_all_m = esharp.linear_part_identity_up_to == model.cap();

    let inverse_passed = if member_for_all_m {
        let psi = invert(model, &phi);
        if let Some(path) = psi_out {
            json::save_morphism(path, model, &psi).map_err(|source| PipelineError::Write {
                path: path.to_path_buf(),
                source,
            })?;
        }
        psi.compose(&phi, model).is_identity(model) && phi.compose(&psi, model).is_identity(model)
    } else {
        false
    };

    let substitution_identity =
        substitute_circle_zero(model, &phi, base.model()).is_identity(base.model());

    // The expected action: exactly one moved class, the second degree-3
    // spec class, sent to itself plus the class of (degree-2 class) * x.
    let stage0 = &adjoined.stages()[0];
    let a = crate::algebra::Polynomial::from_generator(stage0[0]);
    let c = crate::algebra::Polynomial::from_generator(stage0[2]);
    let x = crate::algebra::Polynomial::from_generator(ctx.circle().expect("adjoined"));
    let ax = a.mul(&x, ctx);
    let expected_coords = vec_add(&model.class_of(&c, 3), &model.class_of(&ax, 3));
    let action_passed = chain.passed()
        && esharp.moved_classes.len() == 1
        && esharp.moved_classes[0].degree == 3
        && {
            let rep = &model.cohomology(3).representatives[esharp.moved_classes[0].class_index];
            model.class_of(rep, 3) == model.class_of(&c, 3)
        }
        && esharp.moved_classes[0].image_coords == expected_coords;

    let moved_classes = esharp
        .moved_classes
        .iter()
        .map(|m| MovedClassReport {
            degree: m.degree,
            class_index: m.class_index,
            representative: m.representative.clone(),
            image: m.image_text.clone(),
            image_coords: m.image_coords.iter().map(Q::to_string).collect(),
        })
        .collect();

    let passed = chain.passed()
        && member_for_all_m
        && inverse_passed
        && substitution_identity
        && action_passed;
    Ok(SelfeqReport {
        model_verified: true,
        model_violations: Vec::new(),
        construction_error: None,
        twisted_images: twisted,
        total_images: ctx.len(),
        chain_map_passed: chain.passed(),
        chain_map_checked: chain.checked,
        chain_map_unverifiable: chain.unverifiable.len(),
        linear_part_identity_up_to: esharp.linear_part_identity_up_to,
        member_for_all_m,
        inverse_passed,
        substitution_identity,
        moved_classes,
        action_passed,
        passed,
    })
}

fn render_selfeq(r: &SelfeqReport, cap: u32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model check: {}", verdict(r.model_verified));
    for v in &r.model_violations {
        let _ = writeln!(out, "violation: {v}");
    }
    match &r.construction_error {
        Some(e) => {
            let _ = writeln!(out, "construction: FAIL ({e})");
        }
        None if r.model_verified => {
            let _ = writeln!(out, "construction: ok");
            let _ = writeln!(out, "twisted images: {} of {}", r.twisted_images, r.total_images);
            let _ = writeln!(
                out,
                "chain map: {} ({} checked, {} above cap)",
                verdict(r.chain_map_passed),
                r.chain_map_checked,
                r.chain_map_unverifiable
            );
            let _ = writeln!(
                out,
                "linear part: identity through degree {}",
                r.linear_part_identity_up_to
            );
            if r.member_for_all_m {
                let _ = writeln!(out, "membership: all m <= {cap}");
            } else {
                let _ = writeln!(
                    out,
                    "membership: FAIL above degree {}",
                    r.linear_part_identity_up_to
                );
            }
            let _ = writeln!(out, "inverse: {}", verdict(r.inverse_passed));
            let _ = writeln!(
                out,
                "substitution x -> 0: {}",
                if r.substitution_identity {
                    "identity"
                } else {
                    "FAIL"
                }
            );
            let _ = writeln!(out, "moved classes: {}", r.moved_classes.len());
            for m in &r.moved_classes {
                let _ = writeln!(
                    out,
                    "moved: degree {}, [{}] -> [{}]",
                    m.degree, m.representative, m.image
                );
            }
            let _ = writeln!(out, "action: {}", verdict(r.action_passed));
        }
        None => {}
    }
    let _ = writeln!(out, "selfeq check: {}", verdict(r.passed));
    out
}

/// Loads a model, gates on its verification, and runs the certification.
pub fn selfeq(
    model_path: &Path,
    phi_out: &Path,
    psi_out: Option<&Path>,
    format: ReportFormat,
) -> Result<CommandOutput, PipelineError> {
    let model = json::load_model(model_path)?;
    let report = selfeq_core(&model, phi_out, psi_out)?;
    let text = match format {
        ReportFormat::Text => format!(
            "{}verdict: {}\n",
            render_selfeq(&report, model.cap()),
            verdict(report.passed)
        ),
        ReportFormat::Json => json::to_canonical_string(&report),
    };
    Ok(CommandOutput {
        passed: report.passed,
        text,
    })
}

/// What a `--expect` argument asks for; absent parts are not checked.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expectation {
    pub rank: Option<usize>,
    pub torsion: Option<Vec<i64>>,
}

/// Parses `rank=R,torsion=a,b,c` with either part optional.
pub fn parse_expectation(s: &str) -> Result<Expectation, PipelineError> {
    let bad = |msg: String| PipelineError::Config(format!("expectation \"{s}\": {msg}"));
    let mut out = Expectation::default();
    let mut in_torsion = false;
    for piece in s.split(',') {
        let piece = piece.trim();
        if let Some((key, value)) = piece.split_once('=') {
            match key.trim() {
                "rank" => {
                    if out.rank.is_some() {
                        return Err(bad("rank given twice".to_string()));
                    }
                    out.rank = Some(
                        value
                            .trim()
                            .parse()
                            .map_err(|_| bad(format!("cannot read rank \"{value}\"")))?,
                    );
                    in_torsion = false;
                }
                "torsion" => {
                    if out.torsion.is_some() {
                        return Err(bad("torsion given twice".to_string()));
                    }
                    let first = value
                        .trim()
                        .parse()
                        .map_err(|_| bad(format!("cannot read torsion entry \"{value}\"")))?;
                    out.torsion = Some(vec![first]);
                    in_torsion = true;
                }
                other => return Err(bad(format!("unknown key \"{other}\""))),
            }
        } else if in_torsion {
            let entry = piece
                .parse()
                .map_err(|_| bad(format!("cannot read torsion entry \"{piece}\"")))?;
            out.torsion.as_mut().expect("in torsion list").push(entry);
        } else {
            return Err(bad(format!("expected key=value, found \"{piece}\"")));
        }
    }
    Ok(out)
}

fn expectation_met(inv: &AbelianInvariants, expect: &Expectation) -> bool {
    if let Some(rank) = expect.rank {
        if inv.free_rank != rank {
            return false;
        }
    }
    if let Some(torsion) = &expect.torsion {
        let given: Vec<Z> = torsion.iter().map(|&t| Z::from(t)).collect();
        if inv.torsion != given {
            return false;
        }
    }
    true
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupReport {
    pub source: String,
    pub generators: usize,
    pub relators: usize,
    pub free_rank: usize,
    pub torsion: Vec<String>,
    pub expectation: Option<String>,
    pub passed: bool,
}

fn group_report(
    source: &str,
    pres: &GroupPresentation,
    expect: Option<&Expectation>,
) -> GroupReport {
    let inv = pres.abelian_invariants();
    let passed = expect.is_none_or(|e| expectation_met(&inv, e));
    GroupReport {
        source: source.to_string(),
        generators: pres.generators().len(),
        relators: pres.relators().len(),
        free_rank: inv.free_rank,
        torsion: inv.torsion.iter().map(Z::to_string).collect(),
        expectation: expect.map(|e| {
            let mut parts = Vec::new();
            if let Some(r) = e.rank {
                parts.push(format!("rank={r}"));
            }
            if let Some(t) = &e.torsion {
                parts.push(format!(
                    "torsion={}",
                    t.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
                ));
            }
            parts.join(",")
        }),
        passed,
    }
}

fn render_group(r: &GroupReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "source: {}", r.source);
    let _ = writeln!(
        out,
        "presentation: {} generators, {} relators",
        r.generators, r.relators
    );
    let torsion = if r.torsion.is_empty() {
        "none".to_string()
    } else {
        r.torsion.join(",")
    };
    let _ = writeln!(
        out,
        "abelianization: rank {}, torsion {}",
        r.free_rank, torsion
    );
    match &r.expectation {
        Some(e) => {
            let _ = writeln!(out, "expectation: {e} -> {}", verdict(r.passed));
        }
        None => {
            let _ = writeln!(out, "expectation: none");
        }
    }
    let _ = writeln!(out, "group check: {}", verdict(r.passed));
    out
}

/// Reads a presentation file, abelianizes, and optionally gates on an
/// expectation.
pub fn group_abelianize(
    path: &Path,
    expect: Option<&Expectation>,
    format: ReportFormat,
) -> Result<CommandOutput, PipelineError> {
    let text = std::fs::read_to_string(path).map_err(|source| PipelineError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let pres = groups::parse(&text).map_err(|source| PipelineError::Presentation {
        path: path.to_path_buf(),
        source,
    })?;
    let report = group_report(&path.display().to_string(), &pres, expect);
    let text = match format {
        ReportFormat::Text => format!(
            "{}verdict: {}\n",
            render_group(&report),
            verdict(report.passed)
        ),
        ReportFormat::Json => json::to_canonical_string(&report),
    };
    Ok(CommandOutput {
        passed: report.passed,
        text,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproduceReport {
    pub cap: u32,
    pub model: ModelReport,
    pub selfeq: Option<SelfeqReport>,
    pub groups: Vec<GroupReport>,
    pub all_passed: bool,
}

/// The umbrella run: build and verify the wedge model at the given cap,
/// certify the self-equivalence, and check both bundled presentations,
/// writing `model.json`, `phi.json`, `psi.json`, and `report.json` into
/// `out_dir`.
pub fn reproduce(
    cap: u32,
    out_dir: &Path,
    format: ReportFormat,
) -> Result<CommandOutput, PipelineError> {
    std::fs::create_dir_all(out_dir).map_err(|source| PipelineError::Write {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let spec = CohomologySpec::wedge_s2_s3_s3();
    let (model_section, selfeq_section) = if cap < spec.max_degree() {
        (cap_too_small_report(WEDGE_SPEC_NAME, &spec, cap), None)
    } else {
        let model = build(&spec, cap);
        json::save_model(&out_dir.join("model.json"), &model).map_err(|source| {
            PipelineError::Write {
                path: out_dir.join("model.json"),
                source,
            }
        })?;
        let model_section = model_report(WEDGE_SPEC_NAME, &model);
        let selfeq_section = if model_section.passed {
            Some(selfeq_core(
                &model,
                &out_dir.join("phi.json"),
                Some(&out_dir.join("psi.json")),
            )?)
        } else {
            None
        };
        (model_section, selfeq_section)
    };

    let f = groups::parse(groups::F_GRP).expect("bundled presentation parses");
    let g = groups::parse(groups::G_GRP).expect("bundled presentation parses");
    let f_expect = Expectation {
        rank: Some(0),
        torsion: Some(vec![2, 4, 4]),
    };
    let g_expect = Expectation {
        rank: Some(1),
        torsion: Some(vec![2, 4, 4]),
    };
    let groups_section = vec![
        group_report("F.grp (bundled)", &f, Some(&f_expect)),
        group_report("G.grp (bundled)", &g, Some(&g_expect)),
    ];

    let all_passed = model_section.passed
        && selfeq_section.as_ref().is_some_and(|s| s.passed)
        && groups_section.iter().all(|g| g.passed);
    let report = ReproduceReport {
        cap,
        model: model_section,
        selfeq: selfeq_section,
        groups: groups_section,
        all_passed,
    };
    write_file(
        &out_dir.join("report.json"),
        &json::to_canonical_string(&report),
    )?;

    let text = match format {
        ReportFormat::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "== model ==");
            out.push_str(&render_model(&report.model));
            if let Some(s) = &report.selfeq {
                let _ = writeln!(out, "== self-equivalence ==");
                out.push_str(&render_selfeq(s, cap));
            }
            for (g, name) in report.groups.iter().zip(["F", "G"]) {
                let _ = writeln!(out, "== group {name} ==");
                out.push_str(&render_group(g));
            }
            let _ = writeln!(out, "verdict: {}", verdict(all_passed));
            out
        }
        ReportFormat::Json => json::to_canonical_string(&report),
    };
    Ok(CommandOutput {
        passed: all_passed,
        text,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectation_parsing_accepts_rank_and_torsion() {
        assert_eq!(
            parse_expectation("rank=0,torsion=2,4,4").unwrap(),
            Expectation {
                rank: Some(0),
                torsion: Some(vec![2, 4, 4]),
            }
        );
        assert_eq!(
            parse_expectation("rank=1").unwrap(),
            Expectation {
                rank: Some(1),
                torsion: None,
            }
        );
        assert_eq!(
            parse_expectation("torsion=6").unwrap(),
            Expectation {
                rank: None,
                torsion: Some(vec![6]),
            }
        );
    }

    #[test]
    fn expectation_parsing_rejects_malformed_input() {
        assert!(parse_expectation("rank=zz").is_err());
        assert!(parse_expectation("5").is_err());
        assert!(parse_expectation("rank=1,rank=2").is_err());
        assert!(parse_expectation("size=3").is_err());
        assert!(parse_expectation("rank=1,4").is_err());
    }

    #[test]
    fn builtin_spec_resolves_and_unknown_name_faults() {
        assert!(resolve_spec(WEDGE_SPEC_NAME).is_ok());
        assert!(matches!(
            resolve_spec("no-such-spec"),
            Err(PipelineError::Config(_))
        ));
    }

    #[test]
    fn spec_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.json");
        std::fs::write(&path, r#"[{"name": "s4", "degree": 4}]"#).unwrap();
        let (spec, _) = resolve_spec(path.to_str().unwrap()).unwrap();
        assert_eq!(spec.classes().len(), 1);
        assert_eq!(spec.max_degree(), 4);
    }

    #[test]
    fn spec_file_with_low_degree_is_a_config_fault() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("spec.json");
        std::fs::write(&path, r#"[{"name": "bad", "degree": 1}]"#).unwrap();
        assert!(matches!(
            resolve_spec(path.to_str().unwrap()),
            Err(PipelineError::Config(_))
        ));
    }

    #[test]
    fn model_build_passes_and_writes_the_model() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("model.json");
        let result = model_build(WEDGE_SPEC_NAME, 6, &out, ReportFormat::Text).unwrap();
        assert!(result.passed);
        assert!(out.exists());
        assert!(result.text.contains("model check: PASS"));
        assert!(result.text.ends_with("verdict: PASS\n"));
        assert!(result.text.contains("H dims (0..5): 1 0 1 2 0 0"));
    }

    #[test]
    fn model_build_with_small_cap_fails_without_writing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("model.json");
        let result = model_build(WEDGE_SPEC_NAME, 2, &out, ReportFormat::Text).unwrap();
        assert!(!result.passed);
        assert!(!out.exists());
        assert!(result.text.contains("below the largest prescribed class degree"));
    }

    #[test]
    fn model_build_into_missing_directory_faults() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("missing").join("model.json");
        assert!(matches!(
            model_build(WEDGE_SPEC_NAME, 5, &out, ReportFormat::Text),
            Err(PipelineError::Write { .. })
        ));
    }

    #[test]
    fn selfeq_command_passes_on_a_built_model() {
        let dir = tempfile::tempdir().unwrap();
        let model_path = dir.path().join("model.json");
        model_build(WEDGE_SPEC_NAME, 8, &model_path, ReportFormat::Text).unwrap();
        let phi_path = dir.path().join("phi.json");
        let psi_path = dir.path().join("psi.json");
        let result = selfeq(&model_path, &phi_path, Some(&psi_path), ReportFormat::Text).unwrap();
        assert!(result.passed, "{}", result.text);
        assert!(phi_path.exists());
        assert!(psi_path.exists());
        assert!(result.text.contains("membership: all m <= 8"));
        assert!(result.text.contains("moved: degree 3, [c3] -> [c3 + a2*x]"));
    }

    #[test]
    fn selfeq_gate_rejects_an_unverifiable_model() {
        // A stage-zero-only model is valid JSON but fails verification.
        let dir = tempfile::tempdir().unwrap();
        let model_path = dir.path().join("model.json");
        let stage0 = crate::bigraded::build_stage_zero(&CohomologySpec::wedge_s2_s3_s3(), 6);
        crate::json::save_model(&model_path, &stage0).unwrap();
        let result = selfeq(
            &model_path,
            &dir.path().join("phi.json"),
            None,
            ReportFormat::Text,
        )
        .unwrap();
        assert!(!result.passed);
        assert!(result.text.contains("model check: FAIL"));
    }

    #[test]
    fn group_command_matches_expectations() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("F.grp");
        std::fs::write(&path, groups::F_GRP).unwrap();
        let expect = parse_expectation("rank=0,torsion=2,4,4").unwrap();
        let result = group_abelianize(&path, Some(&expect), ReportFormat::Text).unwrap();
        assert!(result.passed);
        assert!(result.text.contains("abelianization: rank 0, torsion 2,4,4"));
    }

    #[test]
    fn group_command_fails_a_wrong_expectation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("F.grp");
        std::fs::write(&path, groups::F_GRP).unwrap();
        let expect = parse_expectation("rank=3").unwrap();
        let result = group_abelianize(&path, Some(&expect), ReportFormat::Text).unwrap();
        assert!(!result.passed);
        assert!(result.text.ends_with("verdict: FAIL\n"));
    }

    #[test]
    fn group_command_faults_on_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.grp");
        std::fs::write(&path, "a\nb").unwrap();
        assert!(matches!(
            group_abelianize(&path, None, ReportFormat::Text),
            Err(PipelineError::Presentation { .. })
        ));
    }

    #[test]
    fn reproduce_passes_and_writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let result = reproduce(8, dir.path(), ReportFormat::Text).unwrap();
        assert!(result.passed, "{}", result.text);
        for name in ["model.json", "phi.json", "psi.json", "report.json"] {
            assert!(dir.path().join(name).exists(), "{name} missing");
        }
        assert!(result.text.contains("== model =="));
        assert!(result.text.contains("== self-equivalence =="));
        assert!(result.text.contains("== group F =="));
        assert!(result.text.contains("== group G =="));
        assert!(result.text.ends_with("verdict: PASS\n"));
    }

    #[test]
    fn reproduce_runs_are_byte_identical() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let out1 = reproduce(6, dir1.path(), ReportFormat::Json).unwrap();
        let out2 = reproduce(6, dir2.path(), ReportFormat::Json).unwrap();
        assert_eq!(out1.text, out2.text);
        for name in ["model.json", "phi.json", "psi.json", "report.json"] {
            assert_eq!(
                std::fs::read(dir1.path().join(name)).unwrap(),
                std::fs::read(dir2.path().join(name)).unwrap(),
                "{name} differs"
            );
        }
    }

    #[test]
    fn reproduce_with_tiny_cap_reports_failure() {
        let dir = tempfile::tempdir().unwrap();
        let result = reproduce(2, dir.path(), ReportFormat::Text).unwrap();
        assert!(!result.passed);
        assert!(result.text.ends_with("verdict: FAIL\n"));
        // The group sections run regardless.
        assert!(result.text.contains("== group F =="));
        assert!(dir.path().join("report.json").exists());
    }

    #[test]
    fn json_format_emits_the_report_structure() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("model.json");
        let result = model_build(WEDGE_SPEC_NAME, 5, &out, ReportFormat::Json).unwrap();
        let value: serde_json::Value = serde_json::from_str(&result.text).unwrap();
        assert_eq!(value["cap"], 5);
        assert_eq!(value["passed"], true);
    }
}
