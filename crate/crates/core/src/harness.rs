//! Scene files, check orchestration and reports.
//!
//! A scene is a JSON document:
//!
//! ```json
//! {
//!   "surface": { "genus": 0 },
//!   "forms": [
//!     { "type": "rational", "num": [[1, 0]], "den": [[0, 0], [1, 0]] },
//!     { "type": "dlog", "num": [[-1, 0], [1, 0]], "den": [[1, 0], [1, 0]] }
//!   ],
//!   "basepoint": [0.5, 0.5],
//!   "degree": 3,
//!   "tolerances": { "default": 1e-8, "residue": 1e-12 },
//!   "checks": ["residue", "global"]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs (a bare number is read as real),
//! polynomials are coefficient arrays with the constant term first. On a
//! torus (`"genus": 1, "tau": [re, im]`) the forms are `elliptic3k` entries
//! `{ "a": .., "b": .. }`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::forms::{Lattice, MeromorphicForm, Poly};
use crate::reciprocity::{
    global_reciprocity, layout, residue_linear_check, riemann_bilinear_check, shuffle_check,
    triple_check, weil_check, DefectReport, Residual, SurfaceScene,
};
use crate::transport::FormAssignment;

pub const TOOL: &str = "chenrec";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Residue,
    Riemann,
    Weil,
    Triple,
    Global,
    Shuffle,
}

impl Check {
    pub const ALL: [Check; 6] = [
        Check::Residue,
        Check::Riemann,
        Check::Weil,
        Check::Triple,
        Check::Global,
        Check::Shuffle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Residue => "residue",
            Check::Riemann => "riemann",
            Check::Weil => "weil",
            Check::Triple => "triple",
            Check::Global => "global",
            Check::Shuffle => "shuffle",
        }
    }

    fn default_tolerance(self) -> f64 {
        match self {
            Check::Residue => 1e-12,
            Check::Weil => 1e-10,
            _ => 1e-6,
        }
    }

    /// Forms whose poles must be pairwise disjoint.
    fn disjoint_forms(self, spec: &SceneSpec) -> Vec<usize> {
        match self {
            Check::Riemann | Check::Weil => vec![spec.pair.0, spec.pair.1],
            Check::Triple => vec![spec.triple.0, spec.triple.1, spec.triple.2],
            _ => Vec::new(),
        }
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Precondition(format!("unknown check `{s}`")))
    }
}

/// Parses a comma-separated check list, keeping the first occurrence of each.
pub fn parse_checks(list: &str) -> Result<Vec<Check>> {
    let mut out: Vec<Check> = Vec::new();
    for part in list.split(',').filter(|p| !p.trim().is_empty()) {
        let c: Check = part.parse()?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

/// A validated scene.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneSpec {
    pub scene: SurfaceScene,
    pub degree: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    /// Forms used by the bilinear and Weil checks.
    pub pair: (usize, usize),
    /// Forms used by the triple check.
    pub triple: (usize, usize, usize),
}

impl SceneSpec {
    pub fn tolerance(&self, check: Check) -> f64 {
        self.tolerances
            .get(check.name())
            .or_else(|| self.tolerances.get("default"))
            .copied()
            .unwrap_or_else(|| check.default_tolerance())
    }

    /// Replaces every tolerance by `tol`.
    pub fn set_tolerance(&mut self, tol: f64) {
        self.tolerances = BTreeMap::from([("default".to_string(), tol)]);
    }
}

fn scene_err(path: &str, message: impl Into<String>) -> Error {
    Error::Scene {
        path: path.to_string(),
        message: message.into(),
    }
}

fn field<'a>(obj: &'a Value, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| scene_err(path, format!("missing field `{key}`")))
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| scene_err(path, "expected a finite number"))
}

fn complex(v: &Value, path: &str) -> Result<Complex64> {
    if v.is_number() {
        return Ok(Complex64::new(number(v, path)?, 0.0));
    }
    match v.as_array().map(|a| a.as_slice()) {
        Some([re, im]) => Ok(Complex64::new(
            number(re, &format!("{path}[0]"))?,
            number(im, &format!("{path}[1]"))?,
        )),
        _ => Err(scene_err(path, "expected a complex number [re, im]")),
    }
}

fn poly(v: &Value, path: &str) -> Result<Poly> {
    let arr = v
        .as_array()
        .ok_or_else(|| scene_err(path, "expected an array of coefficients"))?;
    if arr.is_empty() {
        return Err(scene_err(path, "empty polynomial"));
    }
    let coeffs = arr
        .iter()
        .enumerate()
        .map(|(i, c)| complex(c, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Poly::new(coeffs))
}

fn index(v: &Value, path: &str, n: usize) -> Result<usize> {
    let i = v
        .as_u64()
        .ok_or_else(|| scene_err(path, "expected a form index"))? as usize;
    if i >= n {
        return Err(scene_err(
            path,
            format!("form index {i} out of range for {n} forms"),
        ));
    }
    Ok(i)
}

fn indices<const K: usize>(root: &Value, key: &str, n: usize) -> Result<Option<[usize; K]>> {
    let Some(v) = root.get(key) else {
        return Ok(None);
    };
    let arr = v
        .as_array()
        .filter(|a| a.len() == K)
        .ok_or_else(|| scene_err(key, format!("expected {K} form indices")))?;
    let mut out = [0; K];
    for (j, x) in arr.iter().enumerate() {
        out[j] = index(x, &format!("{key}[{j}]"), n)?;
    }
    Ok(Some(out))
}

fn parse_form(v: &Value, path: &str, lattice: Option<Lattice>) -> Result<MeromorphicForm> {
    let kind = field(v, path, "type")?
        .as_str()
        .ok_or_else(|| scene_err(&join(path, "type"), "expected a string"))?;
    let invalid = |e: Error| scene_err(path, e.to_string());
    match (kind, lattice) {
        ("rational" | "dlog", Some(_)) => Err(scene_err(
            &join(path, "type"),
            format!("`{kind}` forms live on the sphere, but the surface has genus 1"),
        )),
        ("elliptic3k", None) => Err(scene_err(
            &join(path, "type"),
            "`elliptic3k` forms need a genus 1 surface",
        )),
        ("rational", None) => {
            let num = poly(field(v, path, "num")?, &join(path, "num"))?;
            let den = poly(field(v, path, "den")?, &join(path, "den"))?;
            MeromorphicForm::rational(num, den).map_err(invalid)
        }
        ("dlog", None) => {
            let num = poly(field(v, path, "num")?, &join(path, "num"))?;
            let den = poly(field(v, path, "den")?, &join(path, "den"))?;
            MeromorphicForm::dlog(num, den).map_err(invalid)
        }
        ("elliptic3k", Some(l)) => {
            let a = complex(field(v, path, "a")?, &join(path, "a"))?;
            let b = complex(field(v, path, "b")?, &join(path, "b"))?;
            MeromorphicForm::elliptic(l, a, b).map_err(invalid)
        }
        _ => Err(scene_err(
            &join(path, "type"),
            format!("unknown form type `{kind}`"),
        )),
    }
}

const KNOWN_FIELDS: [&str; 8] = [
    "surface",
    "forms",
    "basepoint",
    "degree",
    "tolerances",
    "checks",
    "pair",
    "triple",
];

/// Parses and validates a scene document.
pub fn parse_scene(text: &str) -> Result<SceneSpec> {
    let root: Value = serde_json::from_str(text).map_err(|e| scene_err("$", e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| scene_err("$", "expected a JSON object"))?;
    if let Some(k) = obj.keys().find(|k| !KNOWN_FIELDS.contains(&k.as_str())) {
        return Err(scene_err(k, "unknown field"));
    }
    let surface = field(&root, "", "surface")?;
    let genus = field(surface, "surface", "genus")?
        .as_u64()
        .ok_or_else(|| scene_err("surface.genus", "expected 0 or 1"))?;
    let lattice = match genus {
        0 => None,
        1 => {
            let tau = complex(field(surface, "surface", "tau")?, "surface.tau")?;
            Some(Lattice::new(tau).map_err(|e| scene_err("surface.tau", e.to_string()))?)
        }
        g => {
            return Err(scene_err(
                "surface.genus",
                format!("genus {g} is not supported; use 0 or 1"),
            ))
        }
    };
    let forms = field(&root, "", "forms")?
        .as_array()
        .ok_or_else(|| scene_err("forms", "expected an array"))?;
    if forms.is_empty() {
        return Err(scene_err("forms", "at least one form is required"));
    }
    let forms = forms
        .iter()
        .enumerate()
        .map(|(i, f)| parse_form(f, &format!("forms[{i}]"), lattice))
        .collect::<Result<Vec<_>>>()?;
    let n = forms.len();
    let basepoint = complex(field(&root, "", "basepoint")?, "basepoint")?;
    let degree = match root.get("degree") {
        None => 3,
        Some(v) => v
            .as_u64()
            .filter(|&d| (1..=8).contains(&d))
            .ok_or_else(|| scene_err("degree", "expected an integer in 1..=8"))?
            as usize,
    };
    let mut tolerances = BTreeMap::new();
    if let Some(t) = root.get("tolerances") {
        let t = t
            .as_object()
            .ok_or_else(|| scene_err("tolerances", "expected an object"))?;
        for (k, v) in t {
            let path = format!("tolerances.{k}");
            if k != "default" && k.parse::<Check>().is_err() {
                return Err(scene_err(&path, "unknown check"));
            }
            let x = number(v, &path)?;
            if !(x > 0.0) {
                return Err(scene_err(&path, "tolerance must be positive"));
            }
            tolerances.insert(k.clone(), x);
        }
    }
    let mut checks = Vec::new();
    if let Some(c) = root.get("checks") {
        let arr = c
            .as_array()
            .ok_or_else(|| scene_err("checks", "expected an array of check names"))?;
        for (i, v) in arr.iter().enumerate() {
            let path = format!("checks[{i}]");
            let name = v
                .as_str()
                .ok_or_else(|| scene_err(&path, "expected a string"))?;
            let check: Check = name
                .parse()
                .map_err(|e: Error| scene_err(&path, e.to_string()))?;
            if !checks.contains(&check) {
                checks.push(check);
            }
        }
    }
    let pair = indices::<2>(&root, "pair", n)?
        .map(|[a, b]| (a, b))
        .unwrap_or((0, 1.min(n - 1)));
    let triple = indices::<3>(&root, "triple", n)?
        .map(|[a, b, c]| (a, b, c))
        .unwrap_or((0, 1.min(n - 1), 2.min(n - 1)));
    let omega = FormAssignment::new(forms).map_err(|e| scene_err("forms", e.to_string()))?;
    let scene = SurfaceScene::new(omega, basepoint);
    layout(&scene)?;
    let spec = SceneSpec {
        scene,
        degree,
        tolerances,
        checks,
        pair,
        triple,
    };
    for c in spec.checks.clone() {
        check_preconditions(&spec, c)?;
    }
    Ok(spec)
}

pub fn load_scene(path: &Path) -> Result<SceneSpec> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_scene(&text)
}

/// Pole disjointness and form types required by `check`.
pub fn check_preconditions(spec: &SceneSpec, check: Check) -> Result<()> {
    let forms = spec.scene.omega.forms();
    let idx = check.disjoint_forms(spec);
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != idx.len() {
        return Err(Error::Precondition(format!(
            "check `{}` needs {} distinct forms",
            check.name(),
            idx.len()
        )));
    }
    for (x, &i) in idx.iter().enumerate() {
        for &j in &idx[x + 1..] {
            let (f, g) = (&forms[i], &forms[j]);
            let shared = f
                .finite_poles()
                .into_iter()
                .find(|&p| g.pole_distance(p) < 1e-9);
            if let Some(p) = shared {
                return Err(Error::Precondition(format!(
                    "check `{}`: forms {i} and {j} share the pole {p}",
                    check.name()
                )));
            }
            if spec.scene.genus() == 0 && f.singular_at_infinity() && g.singular_at_infinity() {
                return Err(Error::Precondition(format!(
                    "check `{}`: forms {i} and {j} share the pole at infinity",
                    check.name()
                )));
            }
        }
    }
    if check == Check::Weil
        && idx
            .iter()
            .any(|&i| !matches!(forms[i], MeromorphicForm::Dlog(_)))
    {
        return Err(Error::Precondition(
            "check `weil` needs two dlog forms".into(),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub status: Status,
    pub tolerance: f64,
    pub runtime_ms: f64,
    pub defect: Option<DefectReport>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub degree: usize,
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub provenance: Provenance,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
    pub total_runtime_ms: f64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

fn weil_report(spec: &SceneSpec, tol: f64) -> Result<DefectReport> {
    let forms = spec.scene.omega.forms();
    let (MeromorphicForm::Dlog(f), MeromorphicForm::Dlog(g)) =
        (&forms[spec.pair.0], &forms[spec.pair.1])
    else {
        return Err(Error::Precondition(
            "check `weil` needs two dlog forms".into(),
        ));
    };
    let w = weil_check(f, g, tol)?;
    let mut report = DefectReport::new("weil", tol, w.defect).with_value(w.product);
    match (w.cross_check, w.base) {
        (Some(x), Some(p)) => {
            report.residuals.push(Residual {
                label: "bilinear cross-check".into(),
                value: (x - w.product).norm(),
            });
            report.notes.push(format!("cross-check base point {p}"));
        }
        _ => report
            .notes
            .push("no base point with grouped divisors; cross-check skipped".into()),
    }
    Ok(report)
}

fn run_one(spec: &SceneSpec, check: Check) -> Result<DefectReport> {
    check_preconditions(spec, check)?;
    let tol = spec.tolerance(check);
    let scene = &spec.scene;
    match check {
        Check::Residue => residue_linear_check(scene, tol),
        Check::Riemann => riemann_bilinear_check(scene, spec.pair, tol),
        Check::Weil => weil_report(spec, tol),
        Check::Triple => triple_check(scene, spec.triple, tol),
        Check::Global => global_reciprocity(scene, spec.degree, tol),
        Check::Shuffle => shuffle_check(scene, spec.degree, tol),
    }
}

/// Runs the checks concurrently; the report lists them in request order.
/// Module errors are recorded per check.
pub fn run_checks(spec: &SceneSpec, checks: &[Check]) -> Report {
    let start = Instant::now();
    let mut unique: Vec<Check> = Vec::new();
    for &c in checks {
        if !unique.contains(&c) {
            unique.push(c);
        }
    }
    let outcomes: Vec<CheckOutcome> = unique
        .par_iter()
        .map(|&check| {
            let t = Instant::now();
            let result = run_one(spec, check);
            let runtime_ms = t.elapsed().as_secs_f64() * 1e3;
            let tolerance = spec.tolerance(check);
            match result {
                Ok(d) => CheckOutcome {
                    check,
                    status: if d.passed { Status::Pass } else { Status::Fail },
                    tolerance,
                    runtime_ms,
                    defect: Some(d),
                    error: None,
                },
                Err(e) => CheckOutcome {
                    check,
                    status: Status::Error,
                    tolerance,
                    runtime_ms,
                    defect: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let tolerances = unique
        .iter()
        .map(|&c| (c.name().to_string(), spec.tolerance(c)))
        .collect();
    Report {
        provenance: Provenance {
            tool: TOOL.into(),
            version: VERSION.into(),
            degree: spec.degree,
            tolerances,
        },
        passed: outcomes.iter().all(|o| o.status == Status::Pass),
        checks: outcomes,
        total_runtime_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(Error::Precondition(format!(
                "unknown report format `{s}`; use text or json"
            ))),
        }
    }
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn text_report(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} {}  degree {}",
        r.provenance.tool, r.provenance.version, r.provenance.degree
    );
    for o in &r.checks {
        let status = match o.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
        };
        let _ = write!(
            out,
            "{:<8} {:<5} tol {:e}  ",
            o.check.name(),
            status,
            o.tolerance
        );
        match (&o.defect, &o.error) {
            (Some(d), _) => {
                let _ = write!(out, "defect {}", sci(d.max_defect));
                if let Some([re, im]) = d.value {
                    let _ = write!(out, "  value {} {}", sci(re), sci(im));
                }
            }
            (None, Some(e)) => {
                let _ = write!(out, "error: {e}");
            }
            (None, None) => {}
        }
        let _ = writeln!(out, "  ({:.1} ms)", o.runtime_ms);
        if let Some(d) = &o.defect {
            for (k, x) in d.per_degree.iter().enumerate() {
                let _ = writeln!(out, "    degree {k}: {}", sci(*x));
            }
            for res in &d.residuals {
                let _ = writeln!(out, "    {}: {}", res.label, sci(res.value));
            }
            for n in &d.notes {
                let _ = writeln!(out, "    note: {n}");
            }
        }
    }
    let _ = writeln!(
        out,
        "overall {}  ({:.1} ms)",
        if r.passed { "PASS" } else { "FAIL" },
        r.total_runtime_ms
    );
    out
}

pub fn emit_report(report: &Report, format: Format) -> String {
    match format {
        Format::Text => text_report(report),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
    }
}

pub fn parse_report(json: &str) -> Result<Report> {
    serde_json::from_str(json).map_err(|e| Error::Scene {
        path: "$".into(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "surface": { "genus": 0 },
        "forms": [ { "type": "rational", "num": [[1, 0]], "den": [[0, 0], [1, 0]] } ],
        "basepoint": [1, 1]
    }"#;

    const WORKED: &str = r#"{
        "surface": { "genus": 0 },
        "forms": [
            { "type": "dlog", "num": [[0, 0], [1, 0]], "den": [[1, 0]] },
            { "type": "dlog", "num": [[-1, 0], [1, 0]], "den": [[1, 0], [1, 0]] }
        ],
        "basepoint": [0.3, 0.9],
        "degree": 2,
        "checks": ["residue", "shuffle", "weil"]
    }"#;

    #[test]
    fn minimal_scene_loads() {
        let s = parse_scene(MINIMAL).unwrap();
        assert_eq!(s.degree, 3);
        assert!(s.checks.is_empty());
        assert_eq!(s.tolerance(Check::Residue), 1e-12);
    }

    #[test]
    fn schema_errors_carry_field_paths() {
        let bad_tau = r#"{"surface": {"genus": 1, "tau": [0.2, -1]}, "forms": [], "basepoint": 0}"#;
        assert!(
            matches!(parse_scene(bad_tau), Err(Error::Scene { path, .. }) if path == "surface.tau")
        );
        let bad_coeff = MINIMAL.replace("[[1, 0]]", "[[1, \"x\"]]");
        assert!(
            matches!(parse_scene(&bad_coeff), Err(Error::Scene { path, .. }) if path == "forms[0].num[0][1]")
        );
        let bad_check = WORKED.replace("\"weil\"", "\"weill\"");
        assert!(
            matches!(parse_scene(&bad_check), Err(Error::Scene { path, .. }) if path == "checks[2]")
        );
        let extra = MINIMAL.replace("\"basepoint\"", "\"colour\": 1, \"basepoint\"");
        assert!(matches!(parse_scene(&extra), Err(Error::Scene { path, .. }) if path == "colour"));
    }

    #[test]
    fn shared_pole_rejected_for_bilinear_check() {
        let scene = r#"{
            "surface": { "genus": 0 },
            "forms": [
                { "type": "rational", "num": [[-1, 0]], "den": [[2, 0], [-3, 0], [1, 0]] },
                { "type": "rational", "num": [[-1, 0]], "den": [[3, 0], [-4, 0], [1, 0]] }
            ],
            "basepoint": [0, 1],
            "checks": ["riemann"]
        }"#;
        assert!(matches!(parse_scene(scene), Err(Error::Precondition(_))));
        assert!(parse_scene(&scene.replace("\"riemann\"", "\"residue\"")).is_ok());
    }

    #[test]
    fn suite_on_a_genus_zero_scene() {
        let s = parse_scene(WORKED).unwrap();
        let r = run_checks(&s, &s.checks);
        assert_eq!(r.checks.len(), 3);
        assert!(r.passed, "{}", emit_report(&r, Format::Text));
        assert_eq!(r.exit_code(), 0);
        let order: Vec<Check> = r.checks.iter().map(|o| o.check).collect();
        assert_eq!(order, vec![Check::Residue, Check::Shuffle, Check::Weil]);
    }

    #[test]
    fn empty_check_list() {
        let s = parse_scene(MINIMAL).unwrap();
        let r = run_checks(&s, &[]);
        assert!(r.checks.is_empty() && r.passed);
        let back = parse_report(&emit_report(&r, Format::Json)).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn impossible_tolerance_fails() {
        let mut s = parse_scene(WORKED).unwrap();
        s.set_tolerance(1e-15);
        let r = run_checks(&s, &[Check::Global]);
        assert_eq!(r.exit_code(), 1);
        let d = r.checks[0].defect.as_ref().unwrap();
        assert!(d.max_defect > 0.0);
    }

    #[test]
    fn json_round_trip_keeps_verdicts() {
        let s = parse_scene(WORKED).unwrap();
        let r = run_checks(&s, &[Check::Residue, Check::Weil]);
        let json = emit_report(&r, Format::Json);
        let back = parse_report(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(
            emit_report(&back, Format::Text),
            emit_report(&r, Format::Text)
        );
    }

    #[test]
    fn check_lists() {
        assert_eq!(
            parse_checks("residue, weil,residue").unwrap(),
            vec![Check::Residue, Check::Weil]
        );
        assert!(parse_checks("residue,bogus").is_err());
        assert!(parse_checks("").unwrap().is_empty());
    }
}
