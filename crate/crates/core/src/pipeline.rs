//! Per-document evaluation entry points: validate, then run every check
//! or metric applicable to the document's format.
//!
//! A document that fails validation is rejected with the full violation
//! list. Once validation passes, individual metric or check failures
//! (for example an unreachable oracle) are collected without aborting
//! the rest.

use serde::Serialize;

use crate::config::EvalConfig;
use crate::error::EvalError;
use crate::graph::{
    check_coherence, check_non_circularity, check_non_redundancy, check_strong_relevance,
    check_weak_relevance, subset_cap, PropertyReport,
};
use crate::argsem::{
    check_acceptability, check_dialectical_faithfulness, check_dialectical_non_circularity,
    BipolarGraph,
};
use crate::metrics::{
    acc, acc_structure_note, band_expectation_flags, cir_cycle, cir_literal, coh, red, rel_strong,
    rel_weak, MetricReport,
};
use crate::model::{
    band_of, validate_argumentative, validate_deductive, validate_free_form,
    ExplanationDocument, ExplanationFormat, Violation,
};
use crate::oracle::TextOracle;

/// Property-check results for one document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub document_id: String,
    pub format: ExplanationFormat,
    pub reports: Vec<PropertyReport>,
    /// Checks that could not run at all, as `"<property>: <error>"`.
    pub errors: Vec<String>,
}

fn push_metric(
    slot: &mut Option<f64>,
    errors: &mut Vec<String>,
    name: &str,
    result: Result<f64, EvalError>,
) {
    match result {
        Ok(value) => *slot = Some(value),
        Err(e) => errors.push(format!("{name}: {e}")),
    }
}

fn coherence_notes(doc: &ExplanationDocument, config: &EvalConfig, notes: &mut Vec<String>) {
    let non_prediction = doc.propositions.iter().filter(|p| !p.is_prediction()).count();
    if non_prediction == 0 {
        notes.push("coh: no propositions besides the prediction; 1.0 by convention".to_owned());
    }
    let (cap, truncated) = subset_cap(doc.propositions.len(), config.max_subset_size.max(1));
    if truncated {
        notes.push(format!("coh: subset enumeration capped at size {cap}"));
    }
}

/// Scores one document with every metric its format supports.
pub fn score_document(
    doc: &ExplanationDocument,
    oracle: &dyn TextOracle,
    config: &EvalConfig,
) -> Result<MetricReport, Vec<Violation>> {
    let mut report = MetricReport::empty(&doc.id, doc.format, config);
    match doc.format {
        ExplanationFormat::FreeForm => {
            let explanation = validate_free_form(doc)?;
            coherence_notes(doc, config, &mut report.notes);
            push_metric(
                &mut report.coh,
                &mut report.errors,
                "coh",
                coh(
                    &explanation.propositions,
                    &doc.input,
                    oracle,
                    config.max_subset_size,
                ),
            );
        }
        ExplanationFormat::Deductive => {
            let explanation = validate_deductive(doc)?;
            coherence_notes(doc, config, &mut report.notes);
            push_metric(
                &mut report.coh,
                &mut report.errors,
                "coh",
                coh(
                    &explanation.propositions,
                    &doc.input,
                    oracle,
                    config.max_subset_size,
                ),
            );
            push_metric(
                &mut report.rel_weak,
                &mut report.errors,
                "rel_weak",
                rel_weak(&explanation),
            );
            push_metric(
                &mut report.rel_strong,
                &mut report.errors,
                "rel_strong",
                rel_strong(&explanation),
            );
            if explanation.propositions.len() == 1 {
                report
                    .notes
                    .push("rel_strong/red: no propositions besides the prediction".to_owned());
            }
            push_metric(
                &mut report.red,
                &mut report.errors,
                "red",
                red(&explanation, &doc.input, &config.matcher),
            );
        }
        ExplanationFormat::Argumentative => {
            let explanation = validate_argumentative(doc)?;
            if let Some(note) = acc_structure_note(&explanation) {
                report.notes.push(note);
            }
            push_metric(&mut report.acc, &mut report.errors, "acc", acc(&explanation));
            report.cir_literal = Some(cir_literal(&explanation));
            report.cir_cycle = Some(cir_cycle(&explanation));
            if let Some(acc_score) = report.acc {
                match band_of(doc.prediction.confidence, &config.bands) {
                    Ok(band) => {
                        report.band_expectation_flags =
                            band_expectation_flags(band, acc_score);
                    }
                    Err(e) => report.errors.push(format!("band: {e}")),
                }
            }
        }
    }
    Ok(report)
}

fn push_check(
    reports: &mut Vec<PropertyReport>,
    errors: &mut Vec<String>,
    name: &str,
    result: Result<PropertyReport, EvalError>,
) {
    match result {
        Ok(report) => reports.push(report),
        Err(e) => errors.push(format!("{name}: {e}")),
    }
}

/// Runs every property check applicable to the document's format.
pub fn check_document(
    doc: &ExplanationDocument,
    oracle: &dyn TextOracle,
    config: &EvalConfig,
) -> Result<CheckOutcome, Vec<Violation>> {
    let mut outcome = CheckOutcome {
        document_id: doc.id.clone(),
        format: doc.format,
        reports: Vec::new(),
        errors: Vec::new(),
    };
    match doc.format {
        ExplanationFormat::FreeForm => {
            let explanation = validate_free_form(doc)?;
            push_check(
                &mut outcome.reports,
                &mut outcome.errors,
                "coherence",
                check_coherence(&explanation.propositions, oracle, config.max_subset_size),
            );
        }
        ExplanationFormat::Deductive => {
            let explanation = validate_deductive(doc)?;
            push_check(
                &mut outcome.reports,
                &mut outcome.errors,
                "coherence",
                check_coherence(&explanation.propositions, oracle, config.max_subset_size),
            );
            outcome.reports.push(check_non_circularity(&explanation));
            push_check(
                &mut outcome.reports,
                &mut outcome.errors,
                "weak-relevance",
                check_weak_relevance(&explanation),
            );
            push_check(
                &mut outcome.reports,
                &mut outcome.errors,
                "strong-relevance",
                check_strong_relevance(&explanation),
            );
            push_check(
                &mut outcome.reports,
                &mut outcome.errors,
                "non-redundancy",
                check_non_redundancy(&explanation),
            );
        }
        ExplanationFormat::Argumentative => {
            let explanation = validate_argumentative(doc)?;
            let graph = BipolarGraph::from_explanation(&explanation);
            outcome
                .reports
                .push(check_dialectical_non_circularity(&graph));
            push_check(
                &mut outcome.reports,
                &mut outcome.errors,
                "dialectical-faithfulness",
                check_dialectical_faithfulness(&explanation, &doc.prediction, oracle, config),
            );
            push_check(
                &mut outcome.reports,
                &mut outcome.errors,
                "acceptability",
                check_acceptability(&explanation, &doc.prediction, config),
            );
        }
    }
    Ok(outcome)
}
