//! End-to-end analysis of one hypersurface: hypothesis gates, the B¹ module,
//! its presentation, and the determinant identity, collected into a report.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::detrep::{degree_profile_check, skew_equivalence_probe, verify_det_power, DetCertificate};
use crate::error::{Error, Result};
use crate::invariants::{
    degree_bound_check, fedder_split_test, hasse_witt, is_smooth, HasseWittMatrix, HypersurfaceSpec,
};
use crate::module::{
    b1_cokernel_module, minimal_generators, presentation, regularity_from_betti, saturate, twist, ulrich_check,
    BettiData, GradedModule, PresentationMatrix,
};
use crate::parse::parse_poly;
use crate::poly::HomogPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Curve,
    Hypersurface,
}

impl Mode {
    /// Plane curves of genus at least one use the curve pipeline; everything else,
    /// conics included, goes through the hypersurface pipeline.
    pub fn infer(h: &HypersurfaceSpec) -> Mode {
        if h.n() == 2 && h.d() >= 3 {
            Mode::Curve
        } else {
            Mode::Hypersurface
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s.trim() {
            "curve" => Ok(Mode::Curve),
            "hypersurface" => Ok(Mode::Hypersurface),
            other => Err(Error::InvalidInput(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    HypothesisNotMet,
    Inconsistent,
    Error,
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub seed: u64,
    pub sz_trials: usize,
    pub mode: Option<Mode>,
    pub skew_probe_trials: usize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions { seed: 0, sz_trials: 16, mode: None, skew_probe_trials: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputEcho {
    pub poly: String,
    pub p: u32,
    pub n: Option<usize>,
    pub d: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixReport {
    #[serde(default)]
    pub gen_degrees: Vec<i32>,
    #[serde(default)]
    pub rel_degrees: Vec<i32>,
    pub entries: Vec<Vec<String>>,
}

impl MatrixReport {
    /// Parses the entries over `F_p` in `nvars` variables. Missing twist data is
    /// inferred from the entry degrees, anchoring each connected block at `a = 0`.
    pub fn to_presentation(&self, p: u32, nvars: usize) -> Result<PresentationMatrix> {
        let s = self.entries.len();
        let mut entries = Vec::with_capacity(s);
        for row in &self.entries {
            if row.len() != s {
                return Err(Error::MatrixShape { rows: s, cols: row.len() });
            }
            entries.push(row.iter().map(|t| parse_poly(t, p, Some(nvars))).collect::<Result<Vec<_>>>()?);
        }
        let (gen_degrees, rel_degrees) = if self.gen_degrees.is_empty() && self.rel_degrees.is_empty() {
            infer_twists(&entries)?
        } else {
            (self.gen_degrees.clone(), self.rel_degrees.clone())
        };
        if gen_degrees.len() != s || rel_degrees.len() != s {
            return Err(Error::InvalidInput("twist lists do not match the matrix size".into()));
        }
        for (j, row) in entries.iter_mut().enumerate() {
            for (i, e) in row.iter_mut().enumerate() {
                let want = rel_degrees[i] - gen_degrees[j];
                if e.is_zero() {
                    *e = HomogPoly::zero(e.fp(), nvars, want.max(0) as u32);
                } else if e.degree() as i32 != want {
                    return Err(Error::InvalidInput(format!("entry ({j}, {i}) has degree {} but the twists require {want}", e.degree())));
                }
            }
        }
        Ok(PresentationMatrix { gen_degrees, rel_degrees, entries })
    }
}

fn infer_twists(entries: &[Vec<HomogPoly>]) -> Result<(Vec<i32>, Vec<i32>)> {
    let s = entries.len();
    let mut a: Vec<Option<i32>> = vec![None; s];
    let mut b: Vec<Option<i32>> = vec![None; s];
    for start in 0..s {
        if a[start].is_some() {
            continue;
        }
        a[start] = Some(0);
        // alternate sweeps over rows and columns until this block is labelled
        let mut changed = true;
        while changed {
            changed = false;
            for j in 0..s {
                for i in 0..s {
                    let e = &entries[j][i];
                    if e.is_zero() {
                        continue;
                    }
                    let deg = e.degree() as i32;
                    match (a[j], b[i]) {
                        (Some(x), None) => {
                            b[i] = Some(x + deg);
                            changed = true;
                        }
                        (None, Some(y)) => {
                            a[j] = Some(y - deg);
                            changed = true;
                        }
                        (Some(x), Some(y)) if y - x != deg => {
                            return Err(Error::InvalidInput(format!("entry ({j}, {i}) breaks the degree pattern")));
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    let b = b.into_iter().zip(&a).map(|(y, x)| y.unwrap_or(x.unwrap_or(0) + 1)).collect();
    Ok((a.into_iter().map(|x| x.unwrap_or(0)).collect(), b))
}

impl From<&PresentationMatrix> for MatrixReport {
    fn from(p: &PresentationMatrix) -> Self {
        MatrixReport { gen_degrees: p.gen_degrees.clone(), rel_degrees: p.rel_degrees.clone(), entries: p.to_strings() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    pub mode: Option<Mode>,
    pub smooth: Option<bool>,
    pub fedder_split: Option<bool>,
    pub degree_bound_ok: Option<bool>,
    pub genus: Option<u32>,
    pub ordinary: Option<bool>,
    pub hasse_witt: Option<HasseWittMatrix>,
    /// degrees of the minimal generators of the saturated, untwisted module
    pub untwisted_generator_degrees: Option<Vec<i32>>,
    pub betti: Option<BettiData>,
    pub matrix: Option<MatrixReport>,
    pub certificate: Option<DetCertificate>,
    pub skew_witness_found: Option<bool>,
    pub checks: BTreeMap<String, bool>,
    pub seed: u64,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub stage: Option<String>,
    pub timings: BTreeMap<String, u64>,
}

impl AnalysisReport {
    fn new(input: InputEcho, seed: u64) -> Self {
        AnalysisReport {
            input,
            mode: None,
            smooth: None,
            fedder_split: None,
            degree_bound_ok: None,
            genus: None,
            ordinary: None,
            hasse_witt: None,
            untwisted_generator_degrees: None,
            betti: None,
            matrix: None,
            certificate: None,
            skew_witness_found: None,
            checks: BTreeMap::new(),
            seed,
            verdict: Verdict::Error,
            reason: None,
            stage: None,
            timings: BTreeMap::new(),
        }
    }

    fn finish(mut self, verdict: Verdict, reason: Option<&str>, stage: Option<&str>) -> Self {
        self.verdict = verdict;
        self.reason = reason.map(str::to_string);
        self.stage = stage.map(str::to_string);
        self
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Verified => 0,
            Verdict::HypothesisNotMet if self.reason.as_deref() == Some("singular") => 2,
            Verdict::HypothesisNotMet => 3,
            Verdict::Inconsistent => 4,
            Verdict::Error if self.stage.as_deref() == Some("input") => 1,
            Verdict::Error => 5,
        }
    }

    /// Pretty JSON without the `timings` field, byte-identical across runs.
    pub fn canonical_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings");
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Parses and validates an input polynomial.
pub fn parse_input(text: &str, p: u32, expected_nvars: Option<usize>) -> Result<HypersurfaceSpec> {
    HypersurfaceSpec::new(parse_poly(text, p, expected_nvars)?)
}

struct Timer<'a> {
    timings: &'a mut BTreeMap<String, u64>,
}

impl Timer<'_> {
    fn run<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.timings.entry(stage.to_string()).or_insert(0) += start.elapsed().as_millis() as u64;
        out
    }
}

/// The saturated module of twisted sections of B¹ and a minimal presentation of
/// its twist by `t`, with relations collected up to (twisted) degree `e_max`.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub saturated: GradedModule,
    pub twisted: GradedModule,
    pub presentation: PresentationMatrix,
    pub untwisted_generator_degrees: Vec<i32>,
}

/// Degrees of slack above the saturated range needed by the saturation systems.
/// For `n >= 3` the cokernel is already saturated; for curves saturation can
/// need an ideal power up to about `d`.
fn saturation_slack(h: &HypersurfaceSpec) -> i32 {
    if h.n() == 2 {
        h.d() as i32 + 1
    } else {
        2
    }
}

/// Degree from which the cokernel of `A -> A_{p*}` is already saturated:
/// the top cohomology of `O_X(k)` vanishes for `k >= d - n`.
pub fn saturation_floor(h: &HypersurfaceSpec) -> i32 {
    h.d() as i32 - h.n() as i32
}

pub fn saturation_cap(h: &HypersurfaceSpec) -> usize {
    (h.p() * (h.d() + h.n() as u32)) as usize
}

pub fn resolve_b1(h: &HypersurfaceSpec, t: i32, e_max: i32) -> Result<Resolved> {
    if t < 0 {
        return Err(Error::InvalidInput(format!("twist must be non-negative, got {t}")));
    }
    let top = e_max + 2 + t;
    if top < 1 {
        return Err(Error::InvalidInput(format!("relation cutoff {e_max} is too small")));
    }
    let cokernel = b1_cokernel_module(h, top + saturation_slack(h))?;
    let saturated = saturate(&cokernel, 0, top, saturation_floor(h), saturation_cap(h))?;
    let untwisted_generator_degrees = minimal_generators(&saturated).iter().map(|g| g.degree).collect();
    let twisted = twist(&saturated, t);
    let presentation = presentation(&twisted, e_max)?;
    Ok(Resolved { saturated, twisted, presentation, untwisted_generator_degrees })
}

/// Sheaf rank of B¹ on a hypersurface of dimension `n - 1`.
pub fn expected_rank(h: &HypersurfaceSpec) -> u64 {
    (h.p() as u64).pow(h.dim_x() as u32) - 1
}

fn stage_error(report: AnalysisReport, stage: &str, e: &Error) -> AnalysisReport {
    let verdict = match e {
        Error::Mismatch { .. } => Verdict::Inconsistent,
        _ => Verdict::Error,
    };
    report.finish(verdict, Some(&e.to_string()), Some(stage))
}

fn failed_checks(report: &AnalysisReport) -> Option<String> {
    let failed: Vec<&str> = report.checks.iter().filter(|(_, ok)| !**ok).map(|(k, _)| k.as_str()).collect();
    (!failed.is_empty()).then(|| format!("failed checks: {}", failed.join(", ")))
}

pub fn run_curve_pipeline(h: &HypersurfaceSpec, options: &PipelineOptions) -> AnalysisReport {
    let mut report = AnalysisReport::new(echo(h), options.seed);
    report.mode = Some(Mode::Curve);
    if h.n() != 2 {
        return stage_error(report, "input", &Error::NotACurve(h.n()));
    }
    let mut timings = BTreeMap::new();
    let mut timer = Timer { timings: &mut timings };
    let result = curve_stages(h, options, &mut report, &mut timer);
    report.timings = timings;
    match result {
        Ok(r) => r.apply(report),
        Err((stage, e)) => stage_error(report, stage, &e),
    }
}

/// How a pipeline ended before being written into the report.
enum Outcome {
    Done,
    NotMet(&'static str),
}

impl Outcome {
    fn apply(self, report: AnalysisReport) -> AnalysisReport {
        match self {
            Outcome::NotMet(reason) => report.finish(Verdict::HypothesisNotMet, Some(reason), None),
            Outcome::Done => match failed_checks(&report) {
                Some(reason) => report.finish(Verdict::Inconsistent, Some(&reason), None),
                None => report.finish(Verdict::Verified, None, None),
            },
        }
    }
}

type StageResult = std::result::Result<Outcome, (&'static str, Error)>;

fn tag<T>(stage: &'static str, r: Result<T>) -> std::result::Result<T, (&'static str, Error)> {
    r.map_err(|e| (stage, e))
}

fn echo(h: &HypersurfaceSpec) -> InputEcho {
    InputEcho { poly: h.g().to_string(), p: h.p(), n: Some(h.n()), d: Some(h.d()) }
}

fn curve_stages(
    h: &HypersurfaceSpec,
    options: &PipelineOptions,
    report: &mut AnalysisReport,
    timer: &mut Timer,
) -> StageResult {
    let genus = tag("genus", h.genus())?;
    report.genus = Some(genus);
    let smooth = timer.run("smoothness", || is_smooth(h));
    report.smooth = Some(smooth);
    if !smooth {
        return Ok(Outcome::NotMet("singular"));
    }
    if genus == 0 {
        return Ok(Outcome::NotMet("genus zero"));
    }
    report.fedder_split = Some(timer.run("fedder", || fedder_split_test(h)));
    report.degree_bound_ok = Some(degree_bound_check(h));
    let hw = tag("hasse-witt", timer.run("hasse-witt", || hasse_witt(h)))?;
    let ordinary = tag("hasse-witt", hw.is_invertible(h.g().fp()))?;
    report.hasse_witt = Some(hw);
    report.ordinary = Some(ordinary);
    if !ordinary {
        return Ok(Outcome::NotMet("not ordinary"));
    }

    let resolved = tag("module", timer.run("module", || resolve_b1(h, 1, 1)))?;
    let p = h.p() as usize;
    let d = h.d() as usize;
    let hilbert_ok = (0..=3).all(|m| resolved.saturated.dim(m) == (p - 1) * d * m as usize);
    report.checks.insert("hilbert_identity".into(), hilbert_ok);
    record_module(report, h, &resolved, 1);
    let pres = &resolved.presentation;
    report.checks.insert("ulrich".into(), ulrich_check(pres, h));
    report.checks.insert("generator_degree_lemma".into(), resolved.untwisted_generator_degrees.iter().all(|&a| a >= 1));

    let cert = tag("determinant", timer.run("determinant", || verify_det_power(pres, h.g(), options.sz_trials, options.seed)))?;
    report.checks.insert("rank_exponent".into(), cert.r as u64 == expected_rank(h));
    report.certificate = Some(cert);
    if h.p() == 3 {
        let witness = timer.run("skew-probe", || skew_equivalence_probe(&pres.entries, options.skew_probe_trials, options.seed));
        report.skew_witness_found = Some(witness.is_some());
    }
    Ok(Outcome::Done)
}

fn record_module(report: &mut AnalysisReport, h: &HypersurfaceSpec, resolved: &Resolved, t: i32) {
    report.untwisted_generator_degrees = Some(resolved.untwisted_generator_degrees.clone());
    report.betti = Some(BettiData::new(&resolved.presentation, &resolved.saturated, t, expected_rank(h)));
    report.matrix = Some(MatrixReport::from(&resolved.presentation));
}

pub fn run_hypersurface_pipeline(h: &HypersurfaceSpec, options: &PipelineOptions) -> AnalysisReport {
    let mut report = AnalysisReport::new(echo(h), options.seed);
    report.mode = Some(Mode::Hypersurface);
    let mut timings = BTreeMap::new();
    let mut timer = Timer { timings: &mut timings };
    let result = hypersurface_stages(h, options, &mut report, &mut timer);
    report.timings = timings;
    match result {
        Ok(r) => r.apply(report),
        Err((stage, e)) => stage_error(report, stage, &e),
    }
}

fn hypersurface_stages(
    h: &HypersurfaceSpec,
    options: &PipelineOptions,
    report: &mut AnalysisReport,
    timer: &mut Timer,
) -> StageResult {
    let smooth = timer.run("smoothness", || is_smooth(h));
    report.smooth = Some(smooth);
    if !smooth {
        return Ok(Outcome::NotMet("singular"));
    }
    let split = timer.run("fedder", || fedder_split_test(h));
    report.fedder_split = Some(split);
    let bound = degree_bound_check(h);
    report.degree_bound_ok = Some(bound);
    if h.n() == 2 {
        report.genus = Some(tag("genus", h.genus())?);
    }
    if !split {
        return Ok(Outcome::NotMet("not Frobenius split"));
    }
    report.checks.insert("degree_bound".into(), bound);
    if !bound {
        return Ok(Outcome::Done);
    }

    let n = h.n() as i32;
    let resolved = tag("module", timer.run("module", || resolve_b1(h, 0, n)))?;
    record_module(report, h, &resolved, 0);
    let pres = &resolved.presentation;
    report.checks.insert("degree_profile".into(), degree_profile_check(pres, h.n()));
    let reg = regularity_from_betti(pres);
    report.checks.insert("regularity_bound".into(), reg.is_none_or(|r| r <= h.dim_x() as i32));
    report.checks.insert("generator_degree_lemma".into(), resolved.untwisted_generator_degrees.iter().all(|&a| a >= 1));

    let cert = tag("determinant", timer.run("determinant", || verify_det_power(pres, h.g(), options.sz_trials, options.seed)))?;
    report.certificate = Some(cert);
    Ok(Outcome::Done)
}

/// Parses the input and runs the pipeline for the requested or inferred mode.
pub fn analyze(text: &str, p: u32, options: &PipelineOptions) -> AnalysisReport {
    let h = match parse_input(text, p, None) {
        Ok(h) => h,
        Err(e) => return input_error(text, p, options.seed, &e),
    };
    analyze_spec(&h, options)
}

/// Report for input that could not be read or parsed.
pub fn input_error(text: &str, p: u32, seed: u64, e: &Error) -> AnalysisReport {
    let input = InputEcho { poly: text.to_string(), p, n: None, d: None };
    stage_error(AnalysisReport::new(input, seed), "input", e)
}

pub fn analyze_spec(h: &HypersurfaceSpec, options: &PipelineOptions) -> AnalysisReport {
    match options.mode.unwrap_or_else(|| Mode::infer(h)) {
        Mode::Curve => run_curve_pipeline(h, options),
        Mode::Hypersurface => run_hypersurface_pipeline(h, options),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_input_examples() {
        let h = parse_input("x^3+y^3+z^3", 7, None).unwrap();
        assert_eq!((h.d(), h.n()), (3, 2));
        let h = parse_input("x0^4 + x1^4 + x2^4 + x3^4", 3, None).unwrap();
        assert_eq!((h.d(), h.n()), (4, 3));
        assert_eq!(parse_input("x^3 + y^2", 5, None).unwrap_err(), Error::NotHomogeneous);
        assert_eq!(parse_input("2*x^3", 2, None).unwrap_err(), Error::ZeroModP(2));
    }

    #[test]
    fn curve_examples() {
        let opts = PipelineOptions::default();
        let r = analyze("x^3+y^3+z^3+x*y*z+x^2*y", 2, &opts);
        assert_eq!(r.verdict, Verdict::Verified, "{:?}", r.reason);
        let cert = r.certificate.as_ref().unwrap();
        assert_eq!((cert.size, cert.r, cert.lambda), (3, 1, 1));

        let r = analyze("x^3+y^3+z^3", 5, &opts);
        assert_eq!(r.verdict, Verdict::HypothesisNotMet);
        assert_eq!(r.exit_code(), 3);
    }

    #[test]
    fn conic_through_hypersurface_pipeline() {
        let r = analyze("x^2+y^2+x*z", 3, &PipelineOptions::default());
        assert_eq!(r.mode, Some(Mode::Hypersurface));
        assert_eq!(r.verdict, Verdict::Verified, "{:?}", r.reason);
        let m = r.matrix.unwrap();
        assert!(m.entries.iter().flatten().all(|e| e == "0" || !e.contains('^')));
    }

    #[test]
    fn matrix_text_round_trip() {
        let r = analyze("x^3+y^3+z^3+2*x*y*z", 3, &PipelineOptions::default());
        let m = r.matrix.unwrap();
        let parsed = m.to_presentation(3, 3).unwrap();
        assert_eq!(MatrixReport::from(&parsed), m);
        let bare = MatrixReport { gen_degrees: vec![], rel_degrees: vec![], entries: m.entries.clone() };
        let inferred = bare.to_presentation(3, 3).unwrap();
        assert_eq!(inferred.entries, parsed.entries);
        assert!(inferred.rel_degrees.iter().zip(&inferred.gen_degrees).all(|(b, a)| b - a == 1));
    }

    #[test]
    fn exit_codes() {
        let opts = PipelineOptions::default();
        assert_eq!(analyze("x^3 + y^", 5, &opts).exit_code(), 1);
        // nodal cubic
        assert_eq!(analyze("y^2*z - x^3 - x^2*z", 5, &opts).exit_code(), 2);
    }
}
