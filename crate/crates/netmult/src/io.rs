//! Document formats: networks, coefficients and reports as JSON with
//! 1-based node indices and complex numbers as `[re, im]` pairs. The
//! structured format is byte-stable for identical inputs and seed, emits
//! floats with 17 significant digits and round-trips losslessly.

use indexmap::IndexMap;
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;

use crate::admissible::Coefficients;
use crate::error::{Error, Result};
use crate::multiplier::MultiplierSet;
use crate::network::{InputMap, Monoid, Network, Partition};
use crate::spectral::CheckResult;

/// A network as a document: node count plus an ordered map of 1-based input
/// maps. `monoid_labels` declares that the arrow labels are monoid element
/// names (a constructible labelling).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub nodes: u64,
    pub arrows: IndexMap<String, Vec<u64>>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub monoid_labels: bool,
}

impl NetworkDocument {
    pub fn from_network(net: &Network, monoid_labels: bool) -> Self {
        NetworkDocument {
            nodes: net.node_count() as u64,
            arrows: net
                .arrows()
                .iter()
                .map(|(label, map)| {
                    (
                        label.clone(),
                        map.targets().iter().map(|&t| (t + 1) as u64).collect(),
                    )
                })
                .collect(),
            monoid_labels,
        }
    }

    pub fn to_network(&self) -> Result<Network> {
        let n = self.nodes as usize;
        let mut arrows = Vec::with_capacity(self.arrows.len());
        for (label, targets) in &self.arrows {
            if targets.len() != n {
                return Err(Error::Parse(format!(
                    "arrow `{label}` has {} entries, expected {n}",
                    targets.len()
                )));
            }
            let mut map = Vec::with_capacity(n);
            for &t in targets {
                if t == 0 || t > n as u64 {
                    return Err(Error::Parse(format!(
                        "arrow `{label}`: node indices are 1-based and at most {n}, got {t}"
                    )));
                }
                map.push((t - 1) as usize);
            }
            arrows.push((label.clone(), InputMap::new(map)));
        }
        Network::new(n, arrows)
    }
}

/// Coefficient blocks as a document: `block_dim` and one `m x m` array of
/// `[re, im]` pairs per arrow label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientDocument {
    pub block_dim: u64,
    pub blocks: IndexMap<String, Vec<Vec<[f64; 2]>>>,
}

impl CoefficientDocument {
    pub fn from_coefficients(c: &Coefficients) -> Self {
        CoefficientDocument {
            block_dim: c.block_dim() as u64,
            blocks: c
                .blocks()
                .iter()
                .map(|(label, block)| (label.clone(), complex_matrix_to_rows(block)))
                .collect(),
        }
    }

    pub fn to_coefficients(&self) -> Result<Coefficients> {
        let dim = self.block_dim as usize;
        let mut blocks = IndexMap::new();
        for (label, rows) in &self.blocks {
            blocks.insert(label.clone(), rows_to_complex_matrix(rows, dim, label)?);
        }
        Coefficients::new(dim, blocks)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonoidSection {
    /// element name -> its map, 1-based, in element order (unit first)
    pub elements: IndexMap<String, Vec<u64>>,
    pub unit: String,
    /// 1-based element indices: `table[a][b]` is the index of `a ∘ b`
    pub table: Vec<Vec<u64>>,
}

impl MonoidSection {
    pub fn from_monoid(m: &Monoid) -> Self {
        MonoidSection {
            elements: m
                .names()
                .iter()
                .zip(m.elements())
                .map(|(name, map)| {
                    (
                        name.clone(),
                        map.targets().iter().map(|&t| (t + 1) as u64).collect(),
                    )
                })
                .collect(),
            unit: m.name(m.unit()).to_string(),
            table: m
                .table()
                .iter()
                .map(|row| row.iter().map(|&x| (x + 1) as u64).collect())
                .collect(),
        }
    }

    pub fn to_monoid(&self) -> Result<Monoid> {
        let k = self.elements.len();
        let mut names = Vec::with_capacity(k);
        let mut elements = Vec::with_capacity(k);
        for (name, targets) in &self.elements {
            let mut map = Vec::with_capacity(targets.len());
            for &t in targets {
                if t == 0 || t > targets.len() as u64 {
                    return Err(Error::Parse(format!(
                        "monoid element `{name}` has an out-of-range entry {t}"
                    )));
                }
                map.push((t - 1) as usize);
            }
            names.push(name.clone());
            elements.push(InputMap::new(map));
        }
        let mut table = Vec::with_capacity(k);
        for row in &self.table {
            let mut out = Vec::with_capacity(row.len());
            for &x in row {
                if x == 0 || x > k as u64 {
                    return Err(Error::Parse("monoid table entry out of range".into()));
                }
                out.push((x - 1) as usize);
            }
            table.push(out);
        }
        Monoid::from_parts(elements, names, table)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSection {
    pub size: u64,
    /// element name -> `n x n` coefficient matrix `a^{sigma}_{i,j}`
    pub coefficients: IndexMap<String, Vec<Vec<[f64; 2]>>>,
    /// element name -> trace of the image
    pub character: IndexMap<String, [f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultipliersSection {
    pub sizes: Vec<u64>,
    pub radical_dim: u64,
    pub blocks: Vec<BlockSection>,
}

impl MultipliersSection {
    pub fn from_multiplier_set(ms: &MultiplierSet) -> Self {
        let names = ms.monoid().names();
        MultipliersSection {
            sizes: ms.sizes().iter().map(|&n| n as u64).collect(),
            radical_dim: ms.radical_dim() as u64,
            blocks: ms
                .blocks()
                .iter()
                .map(|block| BlockSection {
                    size: block.size() as u64,
                    coefficients: names
                        .iter()
                        .zip(block.images())
                        .map(|(name, image)| (name.clone(), complex_matrix_to_rows(image)))
                        .collect(),
                    character: names
                        .iter()
                        .zip(block.character())
                        .map(|(name, z)| (name.clone(), [z.re, z.im]))
                        .collect(),
                })
                .collect(),
        }
    }
}

/// Rebuilds a `MultiplierSet` from the monoid and multipliers sections of a
/// report.
pub fn multiplier_set_from_sections(
    monoid: &MonoidSection,
    mult: &MultipliersSection,
) -> Result<MultiplierSet> {
    let m = monoid.to_monoid()?;
    let mut blocks = Vec::with_capacity(mult.blocks.len());
    for section in &mult.blocks {
        let n = section.size as usize;
        let mut images = Vec::with_capacity(m.len());
        for name in m.names() {
            let rows = section.coefficients.get(name).ok_or_else(|| {
                Error::Parse(format!("multiplier block misses element `{name}`"))
            })?;
            images.push(rows_to_complex_matrix(rows, n, name)?);
        }
        blocks.push(MultiplierSet::block_from_parts(n, images));
    }
    Ok(MultiplierSet::from_parts(
        m,
        blocks,
        mult.radical_dim as usize,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraSection {
    pub predicted: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
}

impl From<&CheckResult> for CheckEntry {
    fn from(c: &CheckResult) -> Self {
        CheckEntry {
            name: c.name.clone(),
            pass: c.pass,
            value: c.value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuotientEntry {
    /// classes as sorted lists of 1-based nodes
    pub partition: Vec<Vec<u64>>,
    pub network: NetworkDocument,
}

/// The structured report emitted by every subcommand; sections are present
/// as the subcommand's contract requires.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monoid: Option<MonoidSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multipliers: Option<MultipliersSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectra: Option<SpectraSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<CheckEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotients: Option<Vec<QuotientEntry>>,
}

impl ReportDocument {
    pub fn check_finite(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite();
        if let Some(mult) = &self.multipliers {
            for block in &mult.blocks {
                for rows in block.coefficients.values() {
                    if !rows.iter().flatten().flatten().all(|&x| ok(x)) {
                        return Err(Error::NonFinite("multiplier coefficient"));
                    }
                }
                if !block.character.values().flatten().all(|&x| ok(x)) {
                    return Err(Error::NonFinite("multiplier character"));
                }
            }
        }
        if let Some(spectra) = &self.spectra {
            let all = spectra
                .predicted
                .iter()
                .chain(spectra.oracle.iter().flatten());
            if !all.flatten().all(|&x| ok(x)) {
                return Err(Error::NonFinite("spectrum value"));
            }
            if let Some(d) = spectra.max_distance {
                if !ok(d) {
                    return Err(Error::NonFinite("match distance"));
                }
            }
        }
        if let Some(checks) = &self.checks {
            if !checks.iter().filter_map(|c| c.value).all(ok) {
                return Err(Error::NonFinite("check value"));
            }
        }
        Ok(())
    }
}

pub fn partition_to_classes(part: &Partition) -> Vec<Vec<u64>> {
    part.classes()
        .into_iter()
        .map(|class| class.into_iter().map(|p| (p + 1) as u64).collect())
        .collect()
}

fn complex_matrix_to_rows(m: &Array2<Complex64>) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[[i, j]].re, m[[i, j]].im]).collect())
        .collect()
}

fn rows_to_complex_matrix(rows: &[Vec<[f64; 2]>], dim: usize, what: &str) -> Result<Array2<Complex64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Parse(format!(
            "`{what}` must be a {dim} x {dim} complex matrix"
        )));
    }
    Ok(Array2::from_shape_fn((dim, dim), |(i, j)| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

pub fn complex_to_pairs(vals: &[Complex64]) -> Vec<[f64; 2]> {
    vals.iter().map(|z| [z.re, z.im]).collect()
}

// ---------------------------------------------------------------------------
// structured (JSON) serialization with 17-significant-digit floats

struct SigDigitFormatter<'a> {
    inner: serde_json::ser::PrettyFormatter<'a>,
}

impl<'a> SigDigitFormatter<'a> {
    fn new() -> Self {
        SigDigitFormatter {
            inner: serde_json::ser::PrettyFormatter::new(),
        }
    }
}

impl serde_json::ser::Formatter for SigDigitFormatter<'_> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        // 1 + 16 mantissa digits: enough to reproduce any f64 exactly
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.inner.end_object_value(writer)
    }
}

fn to_structured<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter::new());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    let mut s = String::from_utf8(out).expect("serialized JSON is UTF-8");
    s.push('\n');
    Ok(s)
}

fn parse_error(e: &serde_json::Error) -> Error {
    Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
}

pub fn serialize_network(net: &Network, monoid_labels: bool) -> Result<String> {
    to_structured(&NetworkDocument::from_network(net, monoid_labels))
}

pub fn parse_network_document(text: &str) -> Result<NetworkDocument> {
    serde_json::from_str(text).map_err(|e| parse_error(&e))
}

/// Parses and validates a network document.
pub fn parse_network(text: &str) -> Result<Network> {
    parse_network_document(text)?.to_network()
}

pub fn serialize_coefficients(c: &Coefficients) -> Result<String> {
    to_structured(&CoefficientDocument::from_coefficients(c))
}

pub fn parse_coefficient_document(text: &str) -> Result<CoefficientDocument> {
    serde_json::from_str(text).map_err(|e| parse_error(&e))
}

pub fn parse_coefficients(text: &str) -> Result<Coefficients> {
    parse_coefficient_document(text)?.to_coefficients()
}

/// Serializes a report in the structured format; rejects non-finite numbers.
pub fn serialize_report(report: &ReportDocument) -> Result<String> {
    report.check_finite()?;
    to_structured(report)
}

pub fn parse_report(text: &str) -> Result<ReportDocument> {
    serde_json::from_str(text).map_err(|e| parse_error(&e))
}

// ---------------------------------------------------------------------------
// human-readable rendering

fn fmt_complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        format!("{re:.9}")
    } else if im < 0.0 {
        format!("{re:.9}{im:.9}i")
    } else {
        format!("{re:.9}+{im:.9}i")
    }
}

/// Renders a report for terminal output. Only the structured format is
/// byte-stability-contracted; this rendering favours readability.
pub fn render_text(report: &ReportDocument) -> String {
    let mut out = String::new();
    use std::fmt::Write as _;
    if let Some(net) = &report.network {
        let _ = writeln!(out, "network: {} nodes", net.nodes);
        for (label, targets) in &net.arrows {
            let entries: Vec<String> = targets.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(out, "  {label}: [{}]", entries.join(","));
        }
    }
    if let Some(monoid) = &report.monoid {
        let _ = writeln!(out, "monoid: {} elements, unit {}", monoid.elements.len(), monoid.unit);
        for (name, map) in &monoid.elements {
            let entries: Vec<String> = map.iter().map(|t| t.to_string()).collect();
            let _ = writeln!(out, "  {name} = [{}]", entries.join(","));
        }
        let _ = writeln!(out, "  table (1-based element indices):");
        for row in &monoid.table {
            let entries: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "    [{}]", entries.join(","));
        }
    }
    if let Some(mult) = &report.multipliers {
        let sizes: Vec<String> = mult.sizes.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(
            out,
            "multipliers: {} blocks of sizes [{}], radical dimension {}",
            mult.blocks.len(),
            sizes.join(","),
            mult.radical_dim
        );
        for (l, block) in mult.blocks.iter().enumerate() {
            let _ = writeln!(out, "  block {} (size {}):", l + 1, block.size);
            let terms: Vec<String> = block
                .character
                .iter()
                .filter(|(_, z)| z[0] != 0.0 || z[1] != 0.0)
                .map(|(name, z)| format!("{}·{name}", fmt_complex(z[0], z[1])))
                .collect();
            let _ = writeln!(out, "    character: {}", terms.join(" + "));
            if block.size > 1 {
                for (name, rows) in &block.coefficients {
                    let any = rows.iter().flatten().any(|p| p[0] != 0.0 || p[1] != 0.0);
                    if !any {
                        continue;
                    }
                    let rendered: Vec<String> = rows
                        .iter()
                        .map(|row| {
                            let entries: Vec<String> =
                                row.iter().map(|p| fmt_complex(p[0], p[1])).collect();
                            format!("[{}]", entries.join(", "))
                        })
                        .collect();
                    let _ = writeln!(out, "    a^{name} = [{}]", rendered.join(", "));
                }
            }
        }
    }
    if let Some(mult) = &report.multiplicities {
        let entries: Vec<String> = mult.iter().map(|m| m.to_string()).collect();
        let _ = writeln!(out, "multiplicities: [{}]", entries.join(", "));
    }
    if let Some(spectra) = &report.spectra {
        let entries: Vec<String> = spectra
            .predicted
            .iter()
            .map(|p| fmt_complex(p[0], p[1]))
            .collect();
        let _ = writeln!(out, "predicted spectrum: {{{}}}", entries.join(", "));
        if let Some(oracle) = &spectra.oracle {
            let entries: Vec<String> = oracle.iter().map(|p| fmt_complex(p[0], p[1])).collect();
            let _ = writeln!(out, "oracle spectrum:    {{{}}}", entries.join(", "));
        }
        if let Some(d) = spectra.max_distance {
            let _ = writeln!(out, "max match distance: {d:.3e}");
        }
    }
    if let Some(checks) = &report.checks {
        for check in checks {
            let status = if check.pass { "PASS" } else { "FAIL" };
            match check.value {
                Some(v) => {
                    let _ = writeln!(out, "check {}: {status} ({v:.3e})", check.name);
                }
                None => {
                    let _ = writeln!(out, "check {}: {status}", check.name);
                }
            }
        }
    }
    if let Some(quotients) = &report.quotients {
        let _ = writeln!(out, "balanced partitions: {}", quotients.len());
        for entry in quotients {
            let classes: Vec<String> = entry
                .partition
                .iter()
                .map(|class| {
                    let nodes: Vec<String> = class.iter().map(|p| p.to_string()).collect();
                    format!("{{{}}}", nodes.join(","))
                })
                .collect();
            let _ = writeln!(out, "  partition {}:", classes.join(" "));
            for (label, targets) in &entry.network.arrows {
                let entries: Vec<String> = targets.iter().map(|t| t.to_string()).collect();
                let _ = writeln!(out, "    {label}: [{}]", entries.join(","));
            }
        }
    }
    out
}
