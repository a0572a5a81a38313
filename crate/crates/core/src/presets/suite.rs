use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use super::{
    make_preset, omega_samples, tau_samples, w_samples, Check, IdentityCheck, PresetName, PresetParams, Sample,
};
use crate::error::Result;
use crate::relation::{build_relation_with, evaluate_relation, RelationOptions, VerificationReport};
use crate::theta::ThetaParams;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCase {
    pub preset: PresetName,
    pub params: PresetParams,
}

impl SuiteCase {
    pub fn new(preset: PresetName, params: PresetParams) -> Self {
        SuiteCase { preset, params }
    }
}

/// One evaluated equation at one sample.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteRecord {
    pub preset: PresetName,
    pub label: String,
    pub d: u64,
    pub g: usize,
    pub h: usize,
    pub sample: usize,
    pub order_g1: Option<u64>,
    pub order_g2: Option<u64>,
    pub expected_order_g1: Option<u64>,
    pub expected_order_g2: Option<u64>,
    pub groups_match: Option<bool>,
    pub report: VerificationReport,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub seconds: f64,
}

impl SuiteRecord {
    pub fn pass(&self) -> bool {
        self.report.pass && self.groups_match != Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub records: Vec<SuiteRecord>,
    pub passed: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    /// The JSON form; contains no timings, so it is reproducible.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("suite report serialises")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("preset,g,d,order_G1,residual_rel,seconds\n");
        for r in &self.records {
            let order = r.order_g1.map(|o| o.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{:e},{:.6}\n",
                r.preset, r.g, r.d, order, r.report.residual_rel, r.seconds
            ));
        }
        out
    }
}

/// The preset cases of the standard suite.
pub fn default_suite() -> Vec<SuiteCase> {
    use PresetName::*;
    let p = |g: usize| PresetParams::with_g(g);
    let with = |g: usize, d: u64, h: Option<usize>| PresetParams { d: Some(d), g: Some(g), h, ..Default::default() };
    let mut cases = vec![
        SuiteCase::new(JacobiIdentity, p(1)),
        SuiteCase::new(HalfFormulas, p(1)),
        SuiteCase::new(DoubleFormulas, p(1)),
        SuiteCase::new(RiemannQuad, p(1)),
        SuiteCase::new(RiemannQuad, p(2)),
    ];
    for name in [PropHalfGeneral, PropHalfGeneral2] {
        for d in [1, 2, 3, 7] {
            cases.push(SuiteCase::new(name, with(1, d, None)));
        }
    }
    for d in [1, 3] {
        for h in [2, 3] {
            cases.push(SuiteCase::new(CartanAh, with(1, d, Some(h))));
        }
    }
    cases.push(SuiteCase::new(CubicD3, p(1)));
    cases.push(SuiteCase::new(
        CubicD3,
        PresetParams { g: Some(1), alpha: Some(json!([["1/3", "1/2*delta", "-1/4+1/3*delta"]])), ..Default::default() },
    ));
    cases.push(SuiteCase::new(CubicD3, p(2)));
    cases.push(SuiteCase::new(CubicD3Cor1, p(1)));
    cases.push(SuiteCase::new(CubicD3Cor2, p(1)));
    cases.push(SuiteCase::new(QuarticD1, p(1)));
    cases.push(SuiteCase::new(
        QuarticD1,
        PresetParams {
            g: Some(1),
            alpha: Some(json!([["1/4", "0+1/4*delta", "1/2", "1/3+1/5*delta"]])),
            ..Default::default()
        },
    ));
    cases.push(SuiteCase::new(QuarticD1Zero, p(1)));
    cases.push(SuiteCase::new(Matsumoto, p(1)));
    cases.push(SuiteCase::new(Matsumoto, p(2)));
    cases.push(SuiteCase::new(
        Matsumoto,
        PresetParams {
            g: Some(1),
            alpha: Some(json!([["1/3", "1/4+1/2*delta"]])),
            beta: Some(json!([["0+1/5*delta", "1/2"]])),
            ..Default::default()
        },
    ));
    cases
}

fn identity_samples(check: &IdentityCheck, g: usize, seed: u64) -> Vec<Sample> {
    match check {
        IdentityCheck::Jacobi | IdentityCheck::Half | IdentityCheck::Double => {
            tau_samples().into_iter().map(Sample::Tau).collect()
        }
        IdentityCheck::RiemannQuad { .. } => omega_samples(g, seed).into_iter().map(Sample::Siegel).collect(),
        _ => w_samples(g, seed).into_iter().map(Sample::Domain).collect(),
    }
}

/// Runs every check of one preset at its three samples.
pub fn run_case(case: &SuiteCase, params: &ThetaParams, seed: u64) -> Result<Vec<SuiteRecord>> {
    run_case_with(case, &RelationOptions::default(), params, seed)
}

pub fn run_case_with(
    case: &SuiteCase,
    opts: &RelationOptions,
    params: &ThetaParams,
    seed: u64,
) -> Result<Vec<SuiteRecord>> {
    let preset = make_preset(case.preset, &case.params)?;
    let mut out = Vec::new();
    let base = |label: String, sample: usize, report: VerificationReport, seconds: f64| SuiteRecord {
        preset: preset.name,
        label,
        d: preset.d,
        g: preset.g,
        h: preset.h,
        sample,
        order_g1: None,
        order_g2: None,
        expected_order_g1: None,
        expected_order_g2: None,
        groups_match: None,
        report,
        warnings: preset.warnings.clone(),
        seconds,
    };
    for check in &preset.checks {
        match check {
            Check::Relation(rp) => {
                let inst = build_relation_with(&rp.spec, opts, params)?;
                let e = &rp.expected;
                let matches =
                    e.order_g1.is_none_or(|o| o == inst.g1.order) && e.order_g2.is_none_or(|o| o == inst.g2.order);
                for (i, w) in w_samples(preset.g, seed).iter().enumerate() {
                    let start = Instant::now();
                    let report = evaluate_relation(&inst, w, params)?;
                    let mut rec = base("relation".into(), i, report, start.elapsed().as_secs_f64());
                    rec.order_g1 = Some(inst.g1.order);
                    rec.order_g2 = Some(inst.g2.order);
                    rec.expected_order_g1 = e.order_g1;
                    rec.expected_order_g2 = e.order_g2;
                    rec.groups_match = Some(matches);
                    out.push(rec);
                }
            }
            Check::Identity(ic) => {
                for (i, s) in identity_samples(ic, preset.g, seed).iter().enumerate() {
                    let start = Instant::now();
                    let reports = ic.evaluate(s, params)?;
                    let secs = start.elapsed().as_secs_f64() / reports.len().max(1) as f64;
                    for (label, report) in reports {
                        out.push(base(label, i, report, secs));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Runs the given cases in parallel; records come back in case order.
pub fn run_paper_suite(cases: &[SuiteCase], params: &ThetaParams, seed: u64) -> Result<SuiteReport> {
    let per_case: Vec<Vec<SuiteRecord>> = cases.par_iter().map(|c| run_case(c, params, seed)).collect::<Result<_>>()?;
    let records: Vec<SuiteRecord> = per_case.into_iter().flatten().collect();
    let passed = records.iter().filter(|r| r.pass()).count();
    let failed = records.len() - passed;
    Ok(SuiteReport { records, passed, failed })
}
