//! Report document, claim registry and the JSON / CSV / text renderers.

use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;

use crate::classes::{CompletenessAudit, LambdaRow};
use crate::config::{OutputFormat, RunConfig};
use crate::error::Result;
use crate::euler::{CaseTag, ChiReport};
use crate::geometry::GeometrySummary;
use crate::group::TypeTag;
use crate::maximal::{ClosureClass, ClosureType, MaximalCount, StructuralIntersection, TriangleCensus};
use crate::moebius::{ser_bigint, MonteCarlo, PropertyReport};

pub const TOOL_NAME: &str = "psu3";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Internally consistent, but differs from a published value.
    Discrepancy,
    /// Evaluated and recorded without a pass/fail expectation.
    Reported,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Discrepancy => "discrepancy",
            Status::Reported => "reported",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Claim {
    pub id: &'static str,
    pub location: &'static str,
    pub statement: &'static str,
}

/// One entry per acceptance criterion, in criterion order.
pub const CLAIMS: [Claim; 13] = [
    Claim {
        id: "geometry",
        location: "Hermitian curve and its triangles",
        statement: "q^3+1 curve points; lines meet the curve in 1 or q+1 points; 416 self-polar and 1600 Frobenius triangles at q = 4",
    },
    Claim {
        id: "group",
        location: "action of G on the curve points",
        statement: "|G| = 62400, 2-transitive; element census covers all 62399 nontrivial elements; 195 involutions; 4160 elements of order 3",
    },
    Claim {
        id: "maximals",
        location: "maximal subgroup list",
        statement: "four families of orders 960, 300, 150, 39 and sizes 65, 208, 416, 1600",
    },
    Claim {
        id: "closure",
        location: "intersection closure of the maximal subgroups",
        statement: "15 proper types, one conjugacy class each, with the listed normaliser orders",
    },
    Claim {
        id: "triangle-counts",
        location: "triangle counting lemmas",
        statement: "C2 fixes 32 self-polar triangles; C3 fixes 5 self-polar and 10 Frobenius triangles; Sym(3) fixes 5 self-polar triangles",
    },
    Claim {
        id: "mu-table",
        location: "summary table, mu column",
        statement: "mu(H, G) on the intersection closure",
    },
    Claim {
        id: "lambda-table",
        location: "summary table, lambda column",
        statement: "lambda nonzero for exactly nine proper types, with values +-1",
    },
    Claim {
        id: "mu-lambda-identities",
        location: "mu/lambda identities for perfect groups",
        statement: "mu({1}, G) = |G| lambda({1}, G); mu(H, G) = [N(H) : H] lambda(H, G) per class",
    },
    Claim {
        id: "euler-characteristics",
        location: "Euler characteristics of the p-subgroup complexes",
        statement: "two independent computations of chi agree and satisfy Brown's congruence",
    },
    Claim {
        id: "gaussian-telescoping",
        location: "Gaussian binomial telescoping identity",
        statement: "sum_{r=1}^{2^n} (-1)^r 2^(r(r-1)/2) binom(2^n, r)_2 = -1",
    },
    Claim {
        id: "generation-probability",
        location: "probability that two random elements generate G",
        statement: "sum mu(H, G) / [G:H]^2 lies in [0, 1], agrees with Monte Carlo; |mu(H, G)| <= [G:H]",
    },
    Claim {
        id: "determinism",
        location: "report reproducibility",
        statement: "identical configuration and seed give byte-identical reports",
    },
    Claim {
        id: "stretch-q16",
        location: "q = 16 geometry and group order",
        statement: "4097 curve points, (16^6+16^5-16^4-16^3)/3 Frobenius triangles, |G| = 16^3 * 4097 * 255",
    },
];

pub fn claim(id: &str) -> Option<&'static Claim> {
    CLAIMS.iter().find(|c| c.id == id)
}

#[derive(Clone, Debug, Serialize)]
pub struct Verdict {
    pub claim: String,
    pub location: String,
    pub check: String,
    pub expected: String,
    pub computed: String,
    pub status: Status,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: u64,
    pub fail: u64,
    pub discrepancy: u64,
    pub reported: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LineIntersections {
    /// Number of curve points on a line.
    pub size: u64,
    pub lines: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GeometryBlock {
    pub summary: GeometrySummary,
    pub line_intersections: Vec<LineIntersections>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusRow {
    pub tag: TypeTag,
    pub order: u64,
    pub count: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GroupBlock {
    pub order: u128,
    pub order_formula: u128,
    pub degree: u64,
    pub generators: u64,
    pub bsgs_base: Vec<u32>,
    pub transitive: bool,
    pub two_transitive: bool,
    pub point_stabilizer_order: u128,
    /// Element census; only at n = 1.
    pub census: Option<Vec<CensusRow>>,
    pub census_total: Option<u64>,
    pub involutions: Option<u64>,
    pub order_three: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureBlock {
    pub nodes: u64,
    pub invariant: bool,
    pub intersection_closed_sample: bool,
    pub classes: Vec<ClosureClass>,
    pub triangle_census: Vec<TriangleCensus>,
    pub structural: Vec<StructuralIntersection>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MaximalsBlock {
    pub families: Vec<MaximalCount>,
    /// Number of maximal subgroups built element by element (n = 1).
    pub materialized: Option<u64>,
    pub closure: Option<ClosureBlock>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MuTableRow {
    pub label: ClosureType,
    pub order: u64,
    pub normalizer_order: u64,
    pub class_size: u64,
    #[serde(serialize_with = "ser_bigint")]
    pub mu: BigInt,
    /// From the class poset; absent when class enumeration did not run.
    #[serde(serialize_with = "ser_opt_bigint")]
    pub lambda: Option<BigInt>,
    pub published_mu: i128,
    pub published_lambda: i64,
    pub constant_on_class: bool,
}

fn ser_opt_bigint<S: serde::Serializer>(v: &Option<BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(x) => ser_bigint(x, s),
        None => s.serialize_none(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbabilityBlock {
    pub s: u32,
    /// Exact value as `numerator/denominator`.
    pub exact: String,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MuBlock {
    pub rows: Vec<MuTableRow>,
    pub dual_check: bool,
    pub upward_sums_vanish: bool,
    pub generation_probability: ProbabilityBlock,
    pub mann_violations: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaBlock {
    pub classes: u64,
    pub subgroups: u64,
    pub rows: Vec<LambdaRow>,
    pub completeness: CompletenessAudit,
    pub order_audit: bool,
    pub recursion_vanishes: bool,
    /// Full-lattice mu equals the closure mu on closure classes and vanishes elsewhere.
    pub closure_mu_agrees: Option<bool>,
    pub properties: PropertyReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct TelescopingRow {
    pub n: u32,
    #[serde(serialize_with = "ser_bigint")]
    pub value: BigInt,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeterminismBlock {
    pub mu_csv_identical: bool,
    pub monte_carlo_identical: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StretchBlock {
    pub geometry: GeometrySummary,
    pub expected_frobenius_triangles: u64,
    pub group_order: u128,
    pub expected_group_order: u128,
    pub families: Vec<MaximalCount>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyBlock {
    pub telescoping: Vec<TelescopingRow>,
    pub monte_carlo: MonteCarlo,
    pub determinism: DeterminismBlock,
    pub stretch: Option<StretchBlock>,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Results {
    pub geometry: Option<GeometryBlock>,
    pub group: Option<GroupBlock>,
    pub maximals: Option<MaximalsBlock>,
    pub mu: Option<MuBlock>,
    pub lambda: Option<LambdaBlock>,
    pub chi: Option<Vec<ChiReport>>,
    pub verify: Option<VerifyBlock>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub results: Results,
    pub verdicts: Vec<Verdict>,
    pub summary: Summary,
    /// Resource errors that cut the run short.
    pub errors: Vec<String>,
    /// Wall-clock seconds per task. Left out of JSON and CSV so that reports
    /// stay byte-identical between runs.
    #[serde(skip)]
    pub timing: Vec<(String, f64)>,
}

impl ReportDocument {
    pub fn new(config: RunConfig) -> Self {
        ReportDocument {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            config,
            results: Results::default(),
            verdicts: Vec::new(),
            summary: Summary::default(),
            errors: Vec::new(),
            timing: Vec::new(),
        }
    }

    /// Records a verdict. `claim_id` must be in [`CLAIMS`].
    pub fn verdict(&mut self, claim_id: &str, check: &str, expected: String, computed: String, status: Status) {
        let c = claim(claim_id).unwrap_or_else(|| panic!("unregistered claim {claim_id}"));
        match status {
            Status::Pass => self.summary.pass += 1,
            Status::Fail => self.summary.fail += 1,
            Status::Discrepancy => self.summary.discrepancy += 1,
            Status::Reported => self.summary.reported += 1,
        }
        self.verdicts.push(Verdict {
            claim: c.id.to_string(),
            location: c.location.to_string(),
            check: check.to_string(),
            expected,
            computed,
            status,
        });
    }

    /// Pass when `ok`, fail otherwise.
    pub fn check(&mut self, claim_id: &str, check: &str, expected: impl ToString, computed: impl ToString, ok: bool) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.verdict(claim_id, check, expected.to_string(), computed.to_string(), status);
    }

    /// Discrepancy when the values differ, pass otherwise.
    pub fn compare_published(
        &mut self,
        claim_id: &str,
        check: &str,
        published: impl ToString,
        computed: impl ToString,
        equal: bool,
    ) {
        let status = if equal { Status::Pass } else { Status::Discrepancy };
        self.verdict(claim_id, check, published.to_string(), computed.to_string(), status);
    }

    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0 || !self.errors.is_empty()
    }

    /// 0 iff no verdict failed and no resource error occurred.
    pub fn exit_code(&self) -> i32 {
        if self.has_failures() {
            1
        } else {
            0
        }
    }

    pub fn verdicts_for(&self, claim_id: &str) -> impl Iterator<Item = &Verdict> {
        let id = claim_id.to_string();
        self.verdicts.iter().filter(move |v| v.claim == id)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        Ok(match format {
            OutputFormat::Json => self.to_json()?,
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Text => self.to_text(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// One CSV section per result block, each led by `#` comment lines.
    pub fn to_csv(&self) -> String {
        let mut sections = Vec::new();
        let r = &self.results;
        if let Some(g) = &r.geometry {
            sections.push(geometry_csv(g));
        }
        if let Some(g) = &r.group {
            sections.push(group_csv(g));
        }
        if let Some(m) = &r.maximals {
            sections.push(maximals_csv(m));
        }
        if let Some(m) = &r.mu {
            sections.push(mu_csv(&m.rows));
        }
        if let Some(l) = &r.lambda {
            sections.push(lambda_csv(&l.rows));
        }
        if let Some(c) = &r.chi {
            sections.push(chi_csv(c));
        }
        sections.push(verdicts_csv(&self.verdicts));
        sections.join("\n")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} (n = {})", self.tool, self.version, self.config.n);
        if let Some(m) = &self.results.mu {
            let _ = writeln!(out, "\nmu table");
            let _ = writeln!(out, "{:<26} {:>6} {:>8} {:>8} {:>6}", "type", "|H|", "|N(H)|", "mu", "lambda");
            for row in &m.rows {
                let lambda = row.lambda.as_ref().map(|l| l.to_string()).unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "{:<26} {:>6} {:>8} {:>8} {:>6}",
                    row.label.label(),
                    row.order,
                    row.normalizer_order,
                    row.mu,
                    lambda
                );
            }
            let _ = writeln!(
                out,
                "P(2) = {} ~ {:.6}",
                m.generation_probability.exact, m.generation_probability.value
            );
        }
        if let Some(chi) = &self.results.chi {
            let _ = writeln!(out, "\nEuler characteristics");
            for c in chi {
                let _ = writeln!(
                    out,
                    "p = {:<3} {:<14} chi = {:>6}  table {:>6}  theorem {:>6}  brown {}",
                    c.p,
                    c.case_tag.name(),
                    c.chi,
                    c.table_value,
                    c.theorem_value,
                    if c.brown_holds { "ok" } else { "FAILS" }
                );
            }
        }
        let _ = writeln!(out, "\nverdicts");
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "[{}] {}: {}: computed {}; expected {}",
                v.status.name(),
                v.claim,
                v.check,
                v.computed,
                v.expected
            );
        }
        for e in &self.errors {
            let _ = writeln!(out, "[error] {e}");
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "\n{} pass, {} fail, {} discrepancy, {} reported",
            s.pass, s.fail, s.discrepancy, s.reported
        );
        if !self.timing.is_empty() {
            let parts: Vec<String> = self.timing.iter().map(|(t, secs)| format!("{t} {secs:.2}s")).collect();
            let _ = writeln!(out, "timing: {}", parts.join(", "));
        }
        out
    }
}

/// Closed forms of order, normaliser order and published mu, in q.
pub fn type_formulas(t: ClosureType) -> [&'static str; 3] {
    match t {
        ClosureType::Borel => ["q^3(q^2-1)", "q^3(q^2-1)", "-1"],
        ClosureType::Psl2TimesC => ["q(q^2-1)(q+1)", "q(q^2-1)(q+1)", "-1"],
        ClosureType::TorusSym3 => ["6(q+1)^2", "6(q+1)^2", "-1"],
        ClosureType::SingerC3 => ["3(q^2-q+1)", "3(q^2-q+1)", "-1"],
        ClosureType::EqSplit => ["q(q^2-1)", "q(q^2-1)", "1"],
        ClosureType::TorusC2 => ["2(q+1)^2", "2(q+1)^2", "1"],
        ClosureType::Torus => ["(q+1)^2", "6(q+1)^2", "0"],
        ClosureType::CyclicQ2Minus1 => ["q^2-1", "2(q^2-1)", "0"],
        ClosureType::Cyclic2QPlus1 => ["2(q+1)", "q(q+1)", "0"],
        ClosureType::Homology => ["q+1", "q(q^2-1)(q+1)", "0"],
        ClosureType::Eq => ["q", "q^3(q^2-1)", "0"],
        ClosureType::Sym3 => ["6", "6(q+1)", "q+1"],
        ClosureType::C3 => ["3", "2(q^2-1)", "2(q^2-1)/3"],
        ClosureType::C2 => ["2", "q^3(q+1)", "-q^3(q+1)/2"],
        ClosureType::Trivial => ["1", "q^3(q^3+1)(q^2-1)", "0"],
        ClosureType::Whole => ["q^3(q^3+1)(q^2-1)", "q^3(q^3+1)(q^2-1)", "1"],
    }
}

/// Published closed forms of chi per case: (table, theorem).
pub fn chi_formulas(case: CaseTag) -> [&'static str; 2] {
    match case {
        CaseTag::NotDividing => ["0", "0"],
        CaseTag::PEq2 => ["q^3+1", "q^3+1"],
        CaseTag::DivQPlus1 => ["-(q^6-2q^5-q^4+2q^3-3q^2)/3", "-(q^6-2q^5-q^4+2q^3-3q^2)/3"],
        CaseTag::DivQMinus1 => ["(q^6+q^3)/2", "-(q^6+q^3)/2"],
        CaseTag::DivQ2Q1 => ["-(q^6+q^5-q^4-q^3)/3", "-(q^6+q^5-q^4-q^3)/3"],
    }
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(fields).expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("utf-8 fields")
}

fn geometry_csv(g: &GeometryBlock) -> String {
    let s = &g.summary;
    let mut out = String::from("# section: geometry\nquantity,value\n");
    let rows: Vec<(&str, String)> = vec![
        ("n", s.n.to_string()),
        ("q", s.q.to_string()),
        ("plane_points", s.plane_points.to_string()),
        ("curve_points", s.curve_points.to_string()),
        ("tangent_lines", s.tangent_lines.to_string()),
        ("chords", s.chords.to_string()),
        ("sextic_points", s.sextic_points.to_string()),
        ("frobenius_triangles", s.frobenius_triangles.to_string()),
        (
            "self_polar_triangles",
            s.self_polar_triangles.map(|x| x.to_string()).unwrap_or_default(),
        ),
    ];
    for (k, v) in rows {
        out.push_str(&csv_line(&[k.to_string(), v]));
    }
    out
}

fn group_csv(g: &GroupBlock) -> String {
    let mut out = format!("# section: group\n# |G| = {}, degree {}\ntag,order,count\n", g.order, g.degree);
    for row in g.census.iter().flatten() {
        out.push_str(&csv_line(&[
            row.tag.name().to_string(),
            row.order.to_string(),
            row.count.to_string(),
        ]));
    }
    out
}

fn maximals_csv(m: &MaximalsBlock) -> String {
    let mut out = String::from("# section: maximals\nfamily,type,order,family_size,computed\n");
    for f in &m.families {
        out.push_str(&csv_line(&[
            format!("{:?}", f.kind),
            f.kind.closure_type().label().to_string(),
            f.order.to_string(),
            f.family_size.to_string(),
            f.computed.to_string(),
        ]));
    }
    if let Some(c) = &m.closure {
        out.push_str("\n# section: closure classes\ntype,order,class_size,normalizer_order,expected_normalizer_order,single_class\n");
        for k in &c.classes {
            out.push_str(&csv_line(&[
                k.label.label().to_string(),
                k.order.to_string(),
                k.count.to_string(),
                k.normalizer_order.to_string(),
                k.expected_normalizer_order.to_string(),
                k.single_class.to_string(),
            ]));
        }
    }
    out
}

/// The mu table in the column layout type, |H|, |N_G(H)|, mu, lambda, with
/// the closed forms as comments.
pub fn mu_csv(rows: &[MuTableRow]) -> String {
    let mut out = String::from("# section: mu\n# type | |H| | |N_G(H)| | mu | lambda\n");
    for row in rows {
        let [o, n, mu] = type_formulas(row.label);
        let _ = writeln!(
            out,
            "# {} | {} | {} | {} | {}",
            row.label.label(),
            o,
            n,
            mu,
            row.published_lambda
        );
    }
    out.push_str("type,order,normalizer_order,mu,lambda\n");
    for row in rows {
        out.push_str(&csv_line(&[
            row.label.label().to_string(),
            row.order.to_string(),
            row.normalizer_order.to_string(),
            row.mu.to_string(),
            row.lambda.as_ref().map(|l| l.to_string()).unwrap_or_default(),
        ]));
    }
    out
}

fn lambda_csv(rows: &[LambdaRow]) -> String {
    let mut out =
        String::from("# section: lambda\nclass_id,type,order,class_size,normalizer_order,solvable,lambda,mu\n");
    for r in rows {
        out.push_str(&csv_line(&[
            r.class_id.to_string(),
            r.label.map(|l| l.label().to_string()).unwrap_or_default(),
            r.order.to_string(),
            r.class_size.to_string(),
            r.normalizer_order.to_string(),
            r.solvable.to_string(),
            r.lambda.to_string(),
            r.mu.to_string(),
        ]));
    }
    out
}

fn chi_csv(reports: &[ChiReport]) -> String {
    let mut out = String::from("# section: chi\n# case | table | theorem\n");
    let mut seen = Vec::new();
    for c in reports {
        if !seen.contains(&c.case_tag) {
            seen.push(c.case_tag);
            let [a, b] = chi_formulas(c.case_tag);
            let _ = writeln!(out, "# {} | {} | {}", c.case_tag.name(), a, b);
        }
    }
    out.push_str("p,case,sylow_order,chi,chi_hall,table_value,theorem_value,brown,methods_agree\n");
    for c in reports {
        out.push_str(&csv_line(&[
            c.p.to_string(),
            c.case_tag.name().to_string(),
            c.sylow_order.to_string(),
            c.chi.to_string(),
            c.hall.chi.to_string(),
            c.table_value.to_string(),
            c.theorem_value.to_string(),
            c.brown_holds.to_string(),
            c.methods_agree.to_string(),
        ]));
    }
    out
}

fn verdicts_csv(verdicts: &[Verdict]) -> String {
    let mut out = String::from("# section: verdicts\nclaim,location,check,expected,computed,status\n");
    for v in verdicts {
        out.push_str(&csv_line(&[
            v.claim.clone(),
            v.location.clone(),
            v.check.clone(),
            v.expected.clone(),
            v.computed.clone(),
            v.status.name().to_string(),
        ]));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete() {
        assert_eq!(CLAIMS.len(), 13);
        let mut ids: Vec<&str> = CLAIMS.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 13);
    }

    #[test]
    fn csv_quoting() {
        let line = csv_line(&["a,b".into(), "x\"y".into(), "plain".into()]);
        assert_eq!(line, "\"a,b\",\"x\"\"y\",plain\n");
    }
}
