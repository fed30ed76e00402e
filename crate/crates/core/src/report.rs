//! Command dispatch and reporting.
//!
//! Each command runs a list of named checks against the parsed document and
//! produces a machine payload plus human-readable lines. Exit codes: 0 all
//! checks pass, 1 a check failed, 2 input error, 3 internal invariant
//! breach.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::acyclic::{generic_acyclicity, AcyclicityMode, AcyclicityVerdict};
use crate::cech::{cech_h, mesa_bundle_on_support};
use crate::contraction::{contract_fiber, ring_presentation, ContractionError};
use crate::doc::{CurveModel, DocError};
use crate::family::{validate_mesa_family, LogFamily, DEFAULT_RANK_BOUND};
use crate::linalg::{format_rat, format_row};
use crate::monoid::Face;
use crate::pl::{decompose, is_small};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Mesa,
    Degrees,
    Cohomology,
    Contract,
    Strata,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Mesa => "mesa",
            Command::Degrees => "degrees",
            Command::Cohomology => "cohomology",
            Command::Contract => "contract",
            Command::Strata => "strata",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Flags {
    pub mode: Option<AcyclicityMode>,
    pub truncation: Option<usize>,
    /// 1-based generator indices to inspect a single stratum.
    pub face: Option<Vec<usize>>,
    pub rank_bound: usize,
}

impl Default for Flags {
    fn default() -> Self {
        Flags {
            mode: None,
            truncation: None,
            face: None,
            rank_bound: DEFAULT_RANK_BOUND,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Indeterminate,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Check {
    pub name: String,
    /// The property the check verifies, in plain language.
    pub rule: String,
    pub status: CheckStatus,
    pub details: String,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub payload: Value,
    /// Extra human-readable material (tables, ring presentations) appended
    /// after the check lines in text mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extra_text: Option<String>,
}

impl Report {
    pub fn text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Indeterminate => "INDET",
            };
            let _ = writeln!(out, "[{tag:5}] {}: {}", c.name, c.details);
        }
        if let Some(extra) = &self.extra_text {
            let _ = writeln!(out, "{extra}");
        }
        out
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn exit_code(&self) -> i32 {
        if self
            .checks
            .iter()
            .any(|c| c.status == CheckStatus::Fail)
        {
            1
        } else {
            0
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("input error: {0}")]
    Input(String),
    #[error("internal invariant breach: {0}")]
    Internal(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Input(_) => 2,
            RunError::Internal(_) => 3,
        }
    }
}

impl From<DocError> for RunError {
    fn from(e: DocError) -> Self {
        RunError::Input(e.to_string())
    }
}

fn check(name: &str, rule: &str, ok: bool, details: String) -> Check {
    Check {
        name: name.into(),
        rule: rule.into(),
        status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
        details,
    }
}

/// Run one command against a parsed document.
pub fn run(command: Command, model: &CurveModel, flags: &Flags) -> Result<Report, RunError> {
    let mode = flags.mode.unwrap_or(model.mode);
    match command {
        Command::Validate => run_validate(model),
        Command::Mesa => run_mesa(model, mode),
        Command::Degrees => run_degrees(model),
        Command::Cohomology => run_cohomology(model, mode),
        Command::Contract => run_contract(model, flags.truncation.unwrap_or(model.truncation)),
        Command::Strata => run_strata(model, flags),
    }
}

fn run_validate(model: &CurveModel) -> Result<Report, RunError> {
    let mut checks = Vec::new();
    checks.push(check(
        "graph",
        "graph is connected with consistent ids and delta ranks",
        true,
        format!(
            "{} vertices, {} edges, rank {}, genus {}",
            model.graph.num_vertices(),
            model.graph.num_edges(),
            model.graph.rank(),
            model.graph.total_genus()
        ),
    ));
    // parse() already validated the PL condition; re-deriving keeps the
    // check visible in the report
    let pl_ok = crate::pl::validate_pl(&model.graph, &model.pl);
    checks.push(check(
        "pl",
        "vertex value differences are integer multiples of the edge deltas",
        pl_ok.is_ok(),
        match &pl_ok {
            Ok(()) => "all edges satisfy the multiple condition".into(),
            Err(e) => e.to_string(),
        },
    ));
    if let Some(geo) = &model.geometry {
        let ok = geo.validate(&model.graph);
        checks.push(check(
            "geometry",
            "coordinates distinct per component, gluing units nonzero",
            ok.is_ok(),
            match &ok {
                Ok(()) => format!("{} components realized", geo.components.len()),
                Err(e) => e.to_string(),
            },
        ));
    }
    Ok(Report {
        command: "validate".into(),
        checks,
        payload: json!({
            "vertices": model.graph.num_vertices(),
            "edges": model.graph.num_edges(),
            "rank": model.graph.rank(),
            "genus": model.graph.total_genus(),
        }),
        extra_text: None,
    })
}

fn run_mesa(model: &CurveModel, mode: AcyclicityMode) -> Result<Report, RunError> {
    let mut checks = Vec::new();
    match decompose(&model.graph, &model.pl) {
        Ok(d) => {
            checks.push(check(
                "decomposition",
                "the section is a sum of mesas with disjoint supports",
                true,
                format!("{} mesa(s)", d.len()),
            ));
            let mut payload = Vec::new();
            for (i, mesa) in d.mesas.iter().enumerate() {
                let small = is_small(&model.graph, mesa).ok();
                let verdict = generic_acyclicity(&model.graph, mesa, mode);
                checks.push(Check {
                    name: format!("mesa[{i}].acyclic"),
                    rule: "first cohomology of the twisted structure sheaf vanishes".into(),
                    status: match verdict {
                        AcyclicityVerdict::Yes => CheckStatus::Pass,
                        AcyclicityVerdict::No => CheckStatus::Fail,
                        AcyclicityVerdict::Indeterminate => CheckStatus::Indeterminate,
                    },
                    details: format!(
                        "support {{{}}}, top {{{}}}, radius {}, small: {}, verdict: {}",
                        mesa.support
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(","),
                        mesa.top
                            .iter()
                            .map(ToString::to_string)
                            .collect::<Vec<_>>()
                            .join(","),
                        mesa.radius,
                        small.map_or("n/a (genus 0)".into(), |b| b.to_string()),
                        verdict
                    ),
                });
                payload.push(json!({
                    "support": mesa.support.iter().map(|v| v.0).collect::<Vec<_>>(),
                    "top": mesa.top.iter().map(|v| v.0).collect::<Vec<_>>(),
                    "radius": mesa.radius.to_string(),
                    "small": small,
                    "acyclicity": verdict,
                }));
            }
            Ok(Report {
                command: "mesa".into(),
                checks,
                payload: json!({ "mesas": payload }),
                extra_text: None,
            })
        }
        Err(e) => {
            checks.push(check(
                "decomposition",
                "the section is a sum of mesas with disjoint supports",
                false,
                e.to_string(),
            ));
            Ok(Report {
                command: "mesa".into(),
                checks,
                payload: json!({ "error": e.to_string() }),
                extra_text: None,
            })
        }
    }
}

fn run_degrees(model: &CurveModel) -> Result<Report, RunError> {
    let md = crate::bundle::multidegree(&model.graph, &model.pl)
        .map_err(|e| RunError::Input(e.to_string()))?;
    let neg = md.neg();
    let mut table = String::new();
    let _ = writeln!(table, "{:>8} {:>10} {:>10}", "vertex", "deg(σ)", "deg(−σ)");
    for v in model.graph.vertices() {
        let _ = writeln!(
            table,
            "{:>8} {:>10} {:>10}",
            v.id.to_string(),
            md.degree(v.id).to_string(),
            neg.degree(v.id).to_string()
        );
    }
    let _ = writeln!(table, "{:>8} {:>10} {:>10}", "total", md.total.to_string(), neg.total.to_string());
    let has_loop_values = model.graph.edges().any(|e| {
        e.is_loop() && !model.pl.vertex_values[&e.ends.0].is_zero()
    });
    let mut checks = vec![check(
        "degrees",
        "per-component degree is the sum of outgoing slopes",
        true,
        format!("total deg(σ) = {}", md.total),
    )];
    if has_loop_values {
        checks.push(Check {
            name: "loops".into(),
            rule: "loop ends contribute opposite slopes and net zero".into(),
            status: CheckStatus::Indeterminate,
            details: "section is nonzero on a loop vertex; per-end slopes are reported as net 0"
                .into(),
        });
    }
    Ok(Report {
        command: "degrees".into(),
        checks,
        payload: json!({
            "per_vertex": md
                .per_vertex
                .iter()
                .map(|(v, d)| (v.0.to_string(), d.to_string()))
                .collect::<BTreeMap<_, _>>(),
            "total": md.total.to_string(),
            "table": table.clone(),
        }),
        extra_text: Some(table),
    })
}

fn run_cohomology(model: &CurveModel, mode: AcyclicityMode) -> Result<Report, RunError> {
    let d = decompose(&model.graph, &model.pl)
        .map_err(|e| RunError::Input(format!("section is not a sum of mesas: {e}")))?;
    let mut checks = Vec::new();
    let mut payload = Vec::new();
    for (i, mesa) in d.mesas.iter().enumerate() {
        let verdict = generic_acyclicity(&model.graph, mesa, mode);
        let mut entry = json!({
            "support": mesa.support.iter().map(|v| v.0).collect::<Vec<_>>(),
            "verdict": verdict,
        });
        let mut details = format!("combinatorial verdict: {verdict}");
        if let Some(geo) = &model.geometry {
            let realizes = mesa.support.iter().all(|v| geo.is_realized(*v))
                && geo.components.len() == mesa.support.len();
            if realizes {
                let bundle = mesa_bundle_on_support(&model.graph, mesa, geo)
                    .map_err(|e| RunError::Input(e.to_string()))?;
                let (h0, h1) = cech_h(&model.graph, geo, &bundle)
                    .map_err(|e| RunError::Input(e.to_string()))?;
                details = format!("{details}; exact h0 = {h0}, h1 = {h1}");
                entry["h0"] = json!(h0);
                entry["h1"] = json!(h1);
                if verdict == AcyclicityVerdict::Yes && h1 != 0 {
                    return Err(RunError::Internal(
                        "combinatorial verdict yes but exact h1 nonzero".into(),
                    ));
                }
                checks.push(check(
                    &format!("mesa[{i}].h1"),
                    "first cohomology of the twisted structure sheaf vanishes",
                    h1 == 0,
                    details.clone(),
                ));
            } else {
                checks.push(Check {
                    name: format!("mesa[{i}].h1"),
                    rule: "first cohomology of the twisted structure sheaf vanishes".into(),
                    status: match verdict {
                        AcyclicityVerdict::Yes => CheckStatus::Pass,
                        AcyclicityVerdict::No => CheckStatus::Fail,
                        AcyclicityVerdict::Indeterminate => CheckStatus::Indeterminate,
                    },
                    details: format!("{details}; geometry does not realize this support"),
                });
            }
        } else {
            checks.push(Check {
                name: format!("mesa[{i}].h1"),
                rule: "first cohomology of the twisted structure sheaf vanishes".into(),
                status: match verdict {
                    AcyclicityVerdict::Yes => CheckStatus::Pass,
                    AcyclicityVerdict::No => CheckStatus::Fail,
                    AcyclicityVerdict::Indeterminate => CheckStatus::Indeterminate,
                },
                details,
            });
        }
        payload.push(entry);
    }
    if d.mesas.is_empty() {
        checks.push(check(
            "cohomology",
            "empty decomposition has nothing to verify",
            true,
            "no mesas".into(),
        ));
    }
    Ok(Report {
        command: "cohomology".into(),
        checks,
        payload: json!({ "mesas": payload }),
        extra_text: None,
    })
}

fn run_contract(model: &CurveModel, pole_bound: usize) -> Result<Report, RunError> {
    let d = decompose(&model.graph, &model.pl)
        .map_err(|e| RunError::Input(format!("section is not a sum of mesas: {e}")))?;
    // geometry applies to the mesa whose support it realizes
    let mut geometries = BTreeMap::new();
    if let Some(geo) = &model.geometry {
        for (i, mesa) in d.mesas.iter().enumerate() {
            if geo.components.len() == mesa.support.len()
                && mesa.support.iter().all(|v| geo.is_realized(*v))
            {
                geometries.insert(i, geo.clone());
            }
        }
    }
    let (contracted, descriptors, vmap) =
        contract_fiber(&model.graph, &d, &geometries).map_err(|e| match e {
            ContractionError::GenusBreach { .. } => RunError::Internal(e.to_string()),
            other => RunError::Input(other.to_string()),
        })?;
    let mut checks = Vec::new();
    checks.push(check(
        "genus",
        "arithmetic genus is preserved by the contraction",
        true,
        format!("genus {}", model.graph.total_genus()),
    ));
    let mut payload = Vec::new();
    let mut text_blocks = Vec::new();
    for (i, desc) in descriptors.iter().enumerate() {
        checks.push(check(
            &format!("singularity[{i}]"),
            "genus equals delta minus branches plus one",
            desc.genus == desc.delta_invariant + 1 - desc.branches as u64,
            format!(
                "g = {}, m = {}, δ = {}, gorenstein = {}",
                desc.genus, desc.branches, desc.delta_invariant, desc.elliptic_gorenstein
            ),
        ));
        let mut entry = json!({
            "genus": desc.genus,
            "branches": desc.branches,
            "delta": desc.delta_invariant,
            "elliptic_gorenstein": desc.elliptic_gorenstein,
            "branch_edges": desc.branch_data.iter().map(|b| b.edge.0).collect::<Vec<_>>(),
        });
        if let Some(v) = &desc.v_space {
            entry["v_codim"] = json!(v.codim());
            entry["v_basis"] = json!(v
                .basis
                .iter_rows()
                .map(format_row)
                .collect::<Vec<_>>());
        }
        if let Some(c) = &desc.constants {
            entry["constants"] = json!(c.iter().map(format_rat).collect::<Vec<_>>());
        }
        if let Some(geo) = geometries.get(&i) {
            let pres = ring_presentation(&model.graph, &d.mesas[i], geo)
                .map_err(|e| RunError::Input(e.to_string()))?;
            entry["presentation"] = json!(pres.to_string());
            entry["type"] = json!(pres.classification.clone());
            // pole bound of the truncated local ring model built on this
            // presentation
            entry["pole_bound"] = json!(pole_bound);
            text_blocks.push(pres.to_string());
        }
        payload.push(entry);
    }
    let extra_text = if text_blocks.is_empty() {
        None
    } else {
        Some(text_blocks.join("\n"))
    };
    Ok(Report {
        command: "contract".into(),
        checks,
        payload: json!({
            "singularities": payload,
            "contracted_vertices": contracted.num_vertices(),
            "vertex_map": vmap.iter().map(|(a, b)| (a.0.to_string(), b.0)).collect::<BTreeMap<_,_>>(),
            "presentations": text_blocks,
        }),
        extra_text,
    })
}

fn run_strata(model: &CurveModel, flags: &Flags) -> Result<Report, RunError> {
    let fam = LogFamily::new(model.graph.clone(), model.pl.clone())
        .map_err(|e| RunError::Input(e.to_string()))?;
    if let Some(indices) = &flags.face {
        // inspect one stratum; CLI indices are 1-based
        let mut zero_based = Vec::new();
        for &i in indices {
            if i == 0 || i > fam.rank() {
                return Err(RunError::Input(format!(
                    "face index {i} out of range 1..={}",
                    fam.rank()
                )));
            }
            zero_based.push(i - 1);
        }
        let face = Face::from_indices(zero_based);
        let stratum = crate::family::specialize(&fam, &face)
            .map_err(|e| RunError::Input(e.to_string()))?;
        let (ok, details) = match &stratum.decomposition {
            Ok(d) => (true, format!("{} mesa(s)", d.len())),
            Err(e) => (false, e.to_string()),
        };
        let checks = vec![check(
            "stratum",
            "the specialized section is a sum of mesas",
            ok,
            details,
        )];
        return Ok(Report {
            command: "strata".into(),
            checks,
            payload: json!({
                "face": indices,
                "vertices": stratum.graph.num_vertices(),
                "edges": stratum.graph.num_edges(),
                "mesas": stratum.decomposition.as_ref().map(|d| d.len()).unwrap_or(0),
                "radii": stratum.radii().iter().map(ToString::to_string).collect::<Vec<_>>(),
            }),
            extra_text: None,
        });
    }
    let report = validate_mesa_family(&fam, flags.rank_bound)
        .map_err(|e| RunError::Input(e.to_string()))?;

    // geometry does not specialize; where it realizes a generic-stratum
    // mesa support, the exact engine settles acyclicity there
    let mut exact_checks = Vec::new();
    if let Some(geo) = &model.geometry {
        if let Ok(d) = decompose(&model.graph, &model.pl) {
            for (i, mesa) in d.mesas.iter().enumerate() {
                if geo.components.len() == mesa.support.len()
                    && mesa.support.iter().all(|v| geo.is_realized(*v))
                {
                    let bundle = mesa_bundle_on_support(&model.graph, mesa, geo)
                        .map_err(|e| RunError::Input(e.to_string()))?;
                    let (_, h1) = cech_h(&model.graph, geo, &bundle)
                        .map_err(|e| RunError::Input(e.to_string()))?;
                    exact_checks.push(check(
                        &format!("generic-stratum mesa[{i}].h1"),
                        "exact first cohomology vanishes on the realized support",
                        h1 == 0,
                        format!("h1 = {h1}"),
                    ));
                }
            }
        }
    }

    let mut table = String::new();
    let _ = writeln!(table, "{:>12} {:>3} {:>16} {:>8}", "face", "k", "radii", "verdict");
    for s in &report.strata {
        let face_str = if s.face.is_empty() {
            "-".to_string()
        } else {
            s.face
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        let verdict = if !s.shape_ok || s.acyclicity.contains(&AcyclicityVerdict::No) {
            "fail".to_string()
        } else if s.acyclicity.contains(&AcyclicityVerdict::Indeterminate) {
            "indet".to_string()
        } else {
            "pass".to_string()
        };
        let _ = writeln!(
            table,
            "{:>12} {:>3} {:>16} {:>8}",
            face_str,
            s.mesas,
            s.radii.join(" "),
            verdict
        );
    }
    let overall_status = match report.overall {
        AcyclicityVerdict::Yes => CheckStatus::Pass,
        AcyclicityVerdict::No => CheckStatus::Fail,
        AcyclicityVerdict::Indeterminate => CheckStatus::Indeterminate,
    };
    let simple = crate::family::is_simple(&fam, flags.rank_bound).ok();
    let mut checks = vec![Check {
        name: "family".into(),
        rule: "every stratum decomposes into acyclic mesas".into(),
        status: overall_status,
        details: format!("{} strata", report.strata.len()),
    }];
    checks.extend(exact_checks);
    if let Some(simple) = simple {
        checks.push(check(
            "simple",
            "no stratum has more than one mesa",
            true,
            simple.to_string(),
        ));
        if simple {
            let coherent = crate::family::global_radius(&fam, flags.rank_bound);
            checks.push(check(
                "radius",
                "the generic radius restricts to every stratum through the face quotient",
                coherent.is_ok(),
                match &coherent {
                    Ok(_) => "coherent".into(),
                    Err(e) => e.to_string(),
                },
            ));
        }
    }
    Ok(Report {
        command: "strata".into(),
        checks,
        payload: json!({
            "strata": report.strata,
            "overall": report.overall,
            "table": table.clone(),
        }),
        extra_text: Some(table),
    })
}
