//! Run configuration, report bundles, and their text/structured rendering.
//!
//! Structured output is a single JSON document with a fixed field order and
//! no timing data, so identical configurations give identical bytes.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::lattice::{check_ccr, CcrReport, LatticeWindow};
use crate::metatensor::canonical_lines;
use crate::scalar::Tower;
use crate::symmetry::{
    cell_rep_report, CellReport, CheckKind, Checker, CliffordReport, InvarianceReport, NumberReport, ParastatisticsReport,
};
use crate::vacua::{build, DSector, MetricForm, VacuumState, VacuumTag};

pub const DEFAULT_WINDOW: u32 = 3;
pub const DEFAULT_SEED: u64 = 20240917;
pub const DEFAULT_SAMPLES: usize = 20;
pub const PARASTATISTICS_WORDS: usize = 100;
pub const NUMBER_WORDS: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSelection {
    Abstract,
    Lattice,
    Both,
}

impl FromStr for ModeSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abstract" => Ok(ModeSelection::Abstract),
            "lattice" => Ok(ModeSelection::Lattice),
            "both" => Ok(ModeSelection::Both),
            other => Err(Error::Parse(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Text,
    Structured,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "structured" => Ok(Format::Structured),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub window: u32,
    pub tower: Tower,
    pub vacua: Vec<VacuumTag>,
    pub checks: Vec<CheckKind>,
    pub seed: u64,
    pub mode: ModeSelection,
    pub samples: usize,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            window: DEFAULT_WINDOW,
            tower: Tower::QiSqrt3,
            vacua: VacuumTag::ALL.to_vec(),
            checks: CheckKind::ALL.to_vec(),
            seed: DEFAULT_SEED,
            mode: ModeSelection::Both,
            samples: DEFAULT_SAMPLES,
            format: Format::Text,
        }
    }
}

impl RunConfig {
    /// Requires `N ≥ 2`; sorts and dedups the selections.
    pub fn validated(mut self) -> Result<Self> {
        if self.window < 2 {
            return Err(Error::Config(format!("window half-width must be at least 2, got {}", self.window)));
        }
        self.normalize();
        Ok(self)
    }

    fn normalize(&mut self) {
        self.vacua.sort();
        self.vacua.dedup();
        self.checks.sort();
        self.checks.dedup();
    }

    fn sectors(&self) -> Result<Vec<DSector>> {
        let lattice = || LatticeWindow::new(self.window).map(DSector::Lattice);
        Ok(match self.mode {
            ModeSelection::Abstract => vec![DSector::Abstract],
            ModeSelection::Lattice => vec![lattice()?],
            ModeSelection::Both => vec![DSector::Abstract, lattice()?],
        })
    }
}

/// A vacuum/mode pair that was not built, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub vacuum: VacuumTag,
    pub mode: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SummaryRow {
    pub vacuum: VacuumTag,
    pub check: CheckKind,
    pub mode: String,
    pub reports: usize,
    pub passed: usize,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckBundle {
    pub reports: Vec<InvarianceReport>,
    pub skipped: Vec<Skipped>,
    pub summary: Vec<SummaryRow>,
    pub agree: bool,
}

fn applicable(check: CheckKind, v: &VacuumState) -> bool {
    match check {
        CheckKind::Sl4 => v.sector.window().is_none() && v.tag.spinor_sector().is_none(),
        CheckKind::Parity => v.tag.spinor_sector().is_some(),
        _ => true,
    }
}

/// Builds the selected vacua in every selected mode and runs the selected
/// checks on them.
pub fn run_checks(config: &RunConfig) -> Result<CheckBundle> {
    let g = MetricForm::null_form();
    let checker = Checker::new(&g, config.seed);
    let mut vacua = Vec::new();
    let mut skipped = Vec::new();
    for sector in config.sectors()? {
        for &tag in &config.vacua {
            match build(tag, &g, checker.rep(), config.tower, sector) {
                Ok(v) => vacua.push(v),
                Err(e @ (Error::Infeasible(_) | Error::TowerTooSmall { .. })) => {
                    skipped.push(Skipped { vacuum: tag, mode: sector.mode_name().into(), reason: e.to_string() })
                }
                Err(e) => return Err(e),
            }
        }
    }
    let jobs: Vec<(&VacuumState, CheckKind)> =
        vacua.iter().flat_map(|v| config.checks.iter().filter(|c| applicable(**c, v)).map(move |c| (v, *c))).collect();
    let results = exec::map(&jobs, |(v, c)| checker.check(*c, v, config.samples));
    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    reports.sort_by_key(InvarianceReport::sort_key);
    let summary = summarize(&reports);
    let agree = reports.iter().all(|r| r.pass);
    Ok(CheckBundle { reports, skipped, summary, agree })
}

fn summarize(reports: &[InvarianceReport]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    for r in reports {
        let same = rows.last().is_some_and(|s| s.vacuum == r.vacuum && s.check == r.check && s.mode == r.mode);
        if !same {
            rows.push(SummaryRow { vacuum: r.vacuum, check: r.check, mode: r.mode.clone(), reports: 0, passed: 0, verdict: String::new() });
        }
        let row = rows.last_mut().expect("pushed");
        row.reports += 1;
        row.passed += usize::from(r.pass);
    }
    for (row, group) in rows.iter_mut().zip(group_reports(reports)) {
        row.verdict = verdict(row, group);
    }
    rows
}

fn group_reports(reports: &[InvarianceReport]) -> Vec<&[InvarianceReport]> {
    reports.chunk_by(|a, b| a.vacuum == b.vacuum && a.check == b.check && a.mode == b.mode).collect()
}

fn verdict(row: &SummaryRow, group: &[InvarianceReport]) -> String {
    if row.passed != row.reports {
        return "fail".into();
    }
    let zero = group.iter().filter(|r| r.residual_zero).count();
    let signed = group.iter().filter(|r| r.sign.as_deref() == Some("-1")).count();
    let realized = group.iter().filter(|r| r.intertwiner_dim.is_some_and(|d| d > 0)).count();
    let mut parts = vec![format!("pass, {zero}/{} zero", row.reports)];
    if signed > 0 {
        parts.push(format!("{signed} sign -1"));
    }
    if group.iter().any(|r| r.intertwiner_dim.is_some()) {
        parts.push(format!("{realized} realizable"));
    }
    parts.join(", ")
}

#[derive(Clone, Debug, Serialize)]
struct CheckDocument<'a> {
    command: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    bundle: &'a CheckBundle,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullReport {
    pub ccr: CcrReport,
    pub clifford: CliffordReport,
    pub parastatistics: ParastatisticsReport,
    pub number_operators: NumberReport,
    pub cell: CellReport,
    pub checks: CheckBundle,
    pub agree: bool,
}

/// Everything: CCR at the configured window, the γ identities, statistics,
/// number operators, the S₄ report, and the invariance checks.
pub fn report_all(config: &RunConfig) -> Result<FullReport> {
    let checker = Checker::new(&MetricForm::null_form(), config.seed);
    let window = LatticeWindow::new(config.window)?;
    let ((ccr, checks), (clifford, (parastatistics, (number_operators, cell)))) = exec::join(
        || exec::join(|| check_ccr(window), || run_checks(config)),
        || {
            exec::join(
                || checker.clifford_report(),
                || {
                    exec::join(
                        || checker.parastatistics(PARASTATISTICS_WORDS),
                        || exec::join(|| checker.number_operators(NUMBER_WORDS), || cell_rep_report(config.seed)),
                    )
                },
            )
        },
    );
    let (ccr, checks) = (ccr?, checks?);
    let agree = ccr.passed() && clifford.pass && parastatistics.pass && number_operators.pass && checks.agree && cell_ok(&cell);
    Ok(FullReport { ccr, clifford, parastatistics, number_operators, cell, checks, agree })
}

/// The ∂ sector splits as trivial ⊕ standard with a 2-dimensional commutant.
fn cell_ok(cell: &CellReport) -> bool {
    cell.sectors.first().is_some_and(|s| s.isotypic.iter().map(|i| i.dim).collect::<Vec<_>>() == [1, 3] && s.commutant_dim == 2)
}

#[derive(Clone, Debug, Serialize)]
struct FullDocument<'a> {
    command: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    report: &'a FullReport,
}

#[derive(Clone, Debug, Serialize)]
struct CcrDocument<'a> {
    command: &'static str,
    window: u32,
    #[serde(flatten)]
    report: &'a CcrReport,
    passed: bool,
}

/// Canonical dump of one vacuum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VacuumDump {
    pub vacuum: VacuumTag,
    pub mode: String,
    pub window: Option<u32>,
    pub terms: usize,
    pub grade: Option<usize>,
    pub level: usize,
    pub lines: Vec<String>,
}

/// Builds one vacuum in the configured mode (`both` dumps the abstract form).
pub fn dump_vacuum(config: &RunConfig, tag: VacuumTag) -> Result<VacuumDump> {
    let g = MetricForm::null_form();
    let checker = Checker::new(&g, config.seed);
    let sector = match config.mode {
        ModeSelection::Lattice => DSector::Lattice(LatticeWindow::new(config.window)?),
        _ => DSector::Abstract,
    };
    let v = build(tag, &g, checker.rep(), config.tower, sector)?;
    Ok(VacuumDump {
        vacuum: tag,
        mode: sector.mode_name().into(),
        window: sector.window().map(|w| w.half_width()),
        terms: v.element.len(),
        grade: v.element.homogeneous_grade(),
        level: v.element.level(),
        lines: canonical_lines(&v.element),
    })
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

pub fn render_ccr(report: &CcrReport, format: Format) -> String {
    match format {
        Format::Structured => {
            to_json(&CcrDocument { command: "verify-ccr", window: report.half_width, report, passed: report.passed() })
        }
        Format::Text => {
            let mut s = format!(
                "verify-ccr N={} interior_kets={} index_pairs={} checks={} failures={} {}\n",
                report.half_width,
                report.interior_kets,
                report.index_pairs,
                report.checks,
                report.failures.len(),
                pass_word(report.passed())
            );
            if let Some(f) = report.failures.first() {
                let _ = writeln!(s, "first failure: [∂{}, x{}] at ket {:?}", f.mu, f.lambda, f.ket);
            }
            s
        }
    }
}

fn config_text(c: &RunConfig) -> String {
    let vacua: Vec<&str> = c.vacua.iter().map(|v| v.name()).collect();
    let checks: Vec<&str> = c.checks.iter().map(|k| k.name()).collect();
    format!(
        "config: window={} tower={} mode={} seed={} samples={}\nvacua: {}\nchecks: {}\n",
        c.window,
        c.tower,
        match c.mode {
            ModeSelection::Abstract => "abstract",
            ModeSelection::Lattice => "lattice",
            ModeSelection::Both => "both",
        },
        c.seed,
        c.samples,
        vacua.join(" "),
        checks.join(" ")
    )
}

fn bundle_text(b: &CheckBundle, out: &mut String) {
    for r in &b.reports {
        let mut line = format!(
            "[{}/{}/{}] {} {} expect={} residual_terms={}",
            r.vacuum.name(),
            r.check.name(),
            r.mode,
            r.action,
            match r.kind {
                crate::symmetry::ActionKind::Derivation => "derivation",
                crate::symmetry::ActionKind::Substitution => "substitution",
            },
            r.expected,
            r.residual_terms
        );
        if let Some(s) = &r.sign {
            let _ = write!(line, " sign={s}");
        }
        if let Some(bd) = &r.boundary {
            let _ = write!(line, " off_shell={}", bd.off_shell_terms);
        }
        if let Some(d) = r.intertwiner_dim {
            let _ = write!(line, " intertwiners={d}");
        }
        let _ = writeln!(out, "{line} {}", pass_word(r.pass));
        if !r.pass {
            for w in &r.witnesses {
                let _ = writeln!(out, "    witness: {w}");
            }
        }
    }
    for s in &b.skipped {
        let _ = writeln!(out, "skipped {}/{}: {}", s.vacuum.name(), s.mode, s.reason);
    }
    let _ = writeln!(out, "\nsummary");
    let _ = writeln!(out, "{:<14}{:<16}{:<10}{:<8}verdict", "vacuum", "check", "mode", "passed");
    for row in &b.summary {
        let _ = writeln!(
            out,
            "{:<14}{:<16}{:<10}{:<8}{}",
            row.vacuum.name(),
            row.check.name(),
            row.mode,
            format!("{}/{}", row.passed, row.reports),
            row.verdict
        );
    }
    let _ = writeln!(out, "claims agree: {}", if b.agree { "yes" } else { "no" });
}

pub fn render_checks(config: &RunConfig, bundle: &CheckBundle, format: Format) -> String {
    match format {
        Format::Structured => to_json(&CheckDocument { command: "check", config, bundle }),
        Format::Text => {
            let mut out = format!("hypercrystal check\n{}\n", config_text(config));
            bundle_text(bundle, &mut out);
            out
        }
    }
}

pub fn render_full(config: &RunConfig, report: &FullReport, format: Format) -> String {
    match format {
        Format::Structured => to_json(&FullDocument { command: "report-all", config, report }),
        Format::Text => {
            let mut out = format!("hypercrystal report-all\n{}\n", config_text(config));
            out.push_str(&render_ccr(&report.ccr, Format::Text));
            let c = &report.clifford;
            let _ = writeln!(
                out,
                "clifford forms={} pairs={} anticommutators={} gamma5^2=-1:{} tr(gamma5)=0:{} gamma5-anticommutes:{} spin-identity={}/{} projector-ranks={:?} {}",
                c.carrier_forms,
                c.index_pairs,
                c.anticommutators_ok,
                c.gamma5_square_is_minus_one,
                c.gamma5_traceless,
                c.gamma5_anticommutes,
                c.spin_identity.iter().filter(|b| **b).count(),
                c.spin_identity.len(),
                c.projector_ranks,
                pass_word(c.pass)
            );
            let p = &report.parastatistics;
            let _ = writeln!(
                out,
                "parastatistics words={} factor-swaps-negated={} subfactor-swaps={} independent={} degenerate={} dipole-swaps={} {}",
                p.words,
                p.factor_swaps_negated,
                p.subfactor_swaps,
                p.subfactor_independent,
                p.degenerate.len(),
                p.vacuum_factor_swaps,
                pass_word(p.pass)
            );
            let n = &report.number_operators;
            let _ = writeln!(out, "number-operators words={} mismatches={} {}", n.words, n.mismatches.len(), pass_word(n.pass));
            for s in &report.cell.sectors {
                let iso: Vec<String> = s.isotypic.iter().map(|i| format!("{}x{}={}", i.irrep, i.multiplicity, i.dim)).collect();
                let _ = writeln!(
                    out,
                    "cell sector={} dim={} character={:?} isotypic=[{}] commutant={}",
                    s.sector,
                    s.dim,
                    s.character,
                    iso.join(" "),
                    s.commutant_dim
                );
            }
            out.push('\n');
            bundle_text(&report.checks, &mut out);
            let _ = writeln!(out, "all claims agree: {}", if report.agree { "yes" } else { "no" });
            out
        }
    }
}

pub fn render_dump(d: &VacuumDump, format: Format) -> String {
    match format {
        Format::Structured => to_json(d),
        Format::Text => {
            let mut out = format!(
                "# vacuum={} mode={} terms={} grade={} level={}\n",
                d.vacuum.name(),
                d.mode,
                d.terms,
                d.grade.map_or("mixed".to_string(), |g| g.to_string()),
                d.level
            );
            for l in &d.lines {
                out.push_str(l);
                out.push('\n');
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abstract_config() -> RunConfig {
        RunConfig { mode: ModeSelection::Abstract, ..RunConfig::default() }
    }

    #[test]
    fn small_windows_rejected() {
        assert!(matches!(RunConfig { window: 1, ..RunConfig::default() }.validated(), Err(Error::Config(_))));
    }

    #[test]
    fn abstract_bundle_agrees() {
        let b = run_checks(&abstract_config()).unwrap();
        assert!(b.agree, "{:?}", b.reports.iter().find(|r| !r.pass));
        let vacua: Vec<VacuumTag> = b.summary.iter().map(|r| r.vacuum).collect();
        assert!(VacuumTag::ALL.iter().all(|t| vacua.contains(t)));
    }

    #[test]
    fn selection_filters_reports() {
        let c = RunConfig { checks: vec![CheckKind::Parity], ..abstract_config() };
        let b = run_checks(&c).unwrap();
        assert!(b.reports.iter().all(|r| r.check == CheckKind::Parity));
        assert_eq!(b.reports.len(), 24);
    }

    #[test]
    fn small_tower_skips_left() {
        let c = RunConfig { tower: Tower::Q, vacua: vec![VacuumTag::Left], ..abstract_config() };
        let b = run_checks(&c).unwrap();
        assert!(b.reports.is_empty());
        assert_eq!(b.skipped.len(), 1);
    }

    #[test]
    fn dumps() {
        let c = abstract_config();
        let d = dump_vacuum(&c, VacuumTag::Dipole).unwrap();
        assert_eq!((d.terms, d.grade), (1, Some(4)));
        assert_eq!(dump_vacuum(&c, VacuumTag::Dalembertian).unwrap().terms, 12);
        assert_eq!(dump_vacuum(&c, VacuumTag::Dirac).unwrap().terms, 4);
        assert!(render_dump(&d, Format::Text).starts_with("# vacuum=dipole"));
    }

    #[test]
    fn structured_output_is_stable() {
        let c = RunConfig { checks: vec![CheckKind::Sl4], ..abstract_config() };
        let a = render_checks(&c, &run_checks(&c).unwrap(), Format::Structured);
        let b = render_checks(&c, &run_checks(&c).unwrap(), Format::Structured);
        assert_eq!(a, b);
        assert!(a.contains("\"seed\": 20240917"));
    }
}
