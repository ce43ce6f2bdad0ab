//! `nodal-atlas`: exact node counts and related tables from the command line.
//!
//! Exit status is 0 on success, 2 when the request is invalid, and 3 when an
//! internal consistency check fails (non-integral count, disagreeing oracles,
//! non-zero residual).

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use nodal_atlas::bell::{complete_bell, eval_complete_bell, partial_bell, BellError};
use nodal_atlas::check::run_checks;
use nodal_atlas::chow::{c_correction_general, c_correction_p2, q_general, q_p2_closed, q_p2_extraction, ChowError};
use nodal_atlas::enumerator::{ampleness_warning, ATable, EnumeratorError, A_FORMS_FILE, KAZARIAN_FILE};
use nodal_atlas::exact::{parse_rational, Rational, UniPolyD};
use nodal_atlas::kazarian::{KazarianError, KazarianTable, MultisingularityType};
use nodal_atlas::partition::{enumerate_partitions, PartitionError};
use nodal_atlas::qseries::{
    discriminant, eisenstein_g2, gyz_channel_residual, recover_b1, recover_b2, recover_log_b1, recover_log_b2, residual_support, Channel,
    PowerSeries, SeriesError, DEFAULT_ORDER,
};
use nodal_atlas::surface::ChernNumbers;

use output::{Doc, Format};

const DATA_ENV: &str = "NODAL_ATLAS_DATA";

#[derive(Parser)]
#[command(name = "nodal-atlas", version, about = "Exact node polynomials, Severi degrees and related tables")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct SurfaceArgs {
    /// `p2` for the projective plane (use with --degree)
    surface: Option<String>,
    /// Same as the positional `p2`
    #[arg(long)]
    p2: bool,
    /// Degree of the plane curves
    #[arg(long, allow_hyphen_values = true)]
    degree: Option<i64>,
    /// Chern numbers `∂,k,s,x` of an arbitrary polarized surface
    #[arg(long, allow_hyphen_values = true)]
    chern: Option<String>,
}

struct Surface {
    chern: ChernNumbers,
    degree: Option<i64>,
}

impl SurfaceArgs {
    fn resolve(&self) -> Result<Option<Surface>, CliError> {
        if let Some(s) = &self.surface {
            if s != "p2" {
                return Err(CliError::Validation(format!("unknown surface {s:?} (only p2 is built in)")));
            }
        }
        let plane = self.p2 || self.surface.is_some();
        match (&self.chern, plane || self.degree.is_some()) {
            (Some(_), true) => Err(CliError::Validation("give either p2 --degree d or --chern, not both".into())),
            (Some(c), false) => {
                let chern = c.parse().map_err(|e: nodal_atlas::surface::ChernParseError| CliError::Validation(e.to_string()))?;
                Ok(Some(Surface { chern, degree: None }))
            }
            (None, true) => {
                let d = self.degree.ok_or_else(|| CliError::Validation("p2 needs --degree".into()))?;
                if d < 1 {
                    return Err(CliError::Validation(format!("degree must be at least 1, got {d}")));
                }
                Ok(Some(Surface { chern: ChernNumbers::p2(d), degree: Some(d) }))
            }
            (None, false) => Ok(None),
        }
    }

    fn require(&self) -> Result<Surface, CliError> {
        self.resolve()?
            .ok_or_else(|| CliError::Validation("a surface is required: p2 --degree d or --chern ∂,k,s,x".into()))
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Oracle {
    Closed,
    Extraction,
    Both,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum SeriesKind {
    G2,
    Delta,
    B1,
    B2,
    LogB1,
    LogB2,
}

#[derive(Subcommand)]
enum Command {
    /// Number of r-nodal curves in the linear system
    Count {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// Number of nodes r
        #[arg(long)]
        nodes: usize,
        /// Emit every r from 0 up to --nodes
        #[arg(long)]
        all: bool,
    },
    /// Node polynomial Z_r in ∂, k, s, x
    Zr {
        #[arg(long)]
        r: usize,
    },
    /// Equivalence Q_n of the small diagonal
    Qn {
        #[arg(long)]
        n: usize,
        /// Polynomial in d for the plane instead of a general surface
        #[arg(long)]
        p2: bool,
        /// Which plane computation to use
        #[arg(long, value_enum, default_value_t = Oracle::Closed)]
        oracle: Oracle,
    },
    /// Correction term C_n (n <= 4)
    Cn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p2: bool,
    },
    /// Complete or partial Bell polynomial
    Bell {
        #[arg(long)]
        r: usize,
        /// Number of blocks for the partial polynomial P_{r,l}
        #[arg(long)]
        l: Option<usize>,
        /// Comma-separated values x_1,…,x_r to evaluate at
        #[arg(long, allow_hyphen_values = true)]
        eval: Option<String>,
    },
    /// Set partitions of [r] with their Möbius coefficients
    Partitions {
        #[arg(long)]
        r: usize,
    },
    /// Thom polynomials S_α and multisingularity counts
    Kazarian {
        /// Type such as A1^2*A2
        #[arg(long = "type")]
        ty: Option<String>,
        /// List the whole table
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        surface: SurfaceArgs,
    },
    /// q-series: G2, Δ, B1, B2, or a channel residual check
    Series {
        #[arg(value_enum)]
        which: Option<SeriesKind>,
        /// Check the log generating-function identity
        #[arg(long)]
        gyz_check: bool,
        /// Channel for --gyz-check (d, k, s, x); all four if omitted
        #[arg(long)]
        channel: Option<String>,
        /// Truncation order T (series known through q^T)
        #[arg(long)]
        order: Option<usize>,
    },
    /// Successive ratios D_{n+1}/D_n, E_{n+1}/E_n, F_{n+1}/F_n, G_{n+1}/G_n
    Ratios,
    /// Reproduce every table and consistency identity
    Check {
        #[arg(long)]
        order: Option<usize>,
    },
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Consistency(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Consistency(_) => 3,
        }
    }
}

impl From<EnumeratorError> for CliError {
    fn from(e: EnumeratorError) -> Self {
        match e {
            EnumeratorError::NonIntegral { .. } | EnumeratorError::Bell(BellError::PathsDisagree { .. }) => {
                CliError::Consistency(e.to_string())
            }
            EnumeratorError::Data(_) | EnumeratorError::Io { .. } => CliError::Consistency(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ChowError> for CliError {
    fn from(e: ChowError) -> Self {
        match e {
            ChowError::Bell(BellError::PathsDisagree { .. }) => CliError::Consistency(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<BellError> for CliError {
    fn from(e: BellError) -> Self {
        match e {
            BellError::PathsDisagree { .. } => CliError::Consistency(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::Table(inner) => inner.into(),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<KazarianError> for CliError {
    fn from(e: KazarianError) -> Self {
        match e {
            KazarianError::Data(_) | KazarianError::Io { .. } => CliError::Consistency(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<PartitionError> for CliError {
    fn from(e: PartitionError) -> Self {
        CliError::Validation(e.to_string())
    }
}

fn data_file(name: &str) -> Option<PathBuf> {
    let dir = std::env::var_os(DATA_ENV)?;
    let path = PathBuf::from(dir).join(name);
    path.exists().then_some(path)
}

fn a_table() -> Result<ATable, CliError> {
    match data_file(A_FORMS_FILE) {
        Some(p) => Ok(ATable::load(&p)?),
        None => Ok(ATable::embedded()),
    }
}

fn kazarian_table() -> Result<KazarianTable, CliError> {
    match data_file(KAZARIAN_FILE) {
        Some(p) => Ok(KazarianTable::load(&p)?),
        None => Ok(KazarianTable::embedded()),
    }
}

fn s(v: impl ToString) -> Value {
    Value::String(v.to_string())
}

fn poly_json(p: &UniPolyD) -> Value {
    json!({ "coefficients": p, "text": p.to_string() })
}

fn series_json(p: &PowerSeries) -> Value {
    json!({ "order": s(p.order()), "coefficients": p })
}

fn series_rows(p: &PowerSeries) -> Vec<Vec<String>> {
    p.coeffs().iter().enumerate().map(|(n, c)| vec![n.to_string(), c.to_string()]).collect()
}

fn surface_json(surface: &Surface) -> Value {
    let mut v = json!({ "chern": surface.chern });
    if let Some(d) = surface.degree {
        v["degree"] = s(d);
    }
    v
}

fn warn_ampleness(surface: &Surface, r: usize) {
    if let Some(d) = surface.degree {
        if let Some(w) = ampleness_warning(d, r) {
            eprintln!("{w}");
        }
    }
}

fn cmd_count(surface: &SurfaceArgs, nodes: usize, all: bool) -> Result<Doc, CliError> {
    let surface = surface.require()?;
    let table = a_table()?;
    let range: Vec<usize> = if all { (0..=nodes).collect() } else { vec![nodes] };
    let mut rows = Vec::new();
    for &r in &range {
        warn_ampleness(&surface, r);
        rows.push((r, table.node_count(r, &surface.chern)?));
    }
    let csv: Vec<Vec<String>> = rows.iter().map(|(r, n)| vec![r.to_string(), n.to_string()]).collect();
    let doc = if all {
        let text = rows.iter().map(|(r, n)| format!("{r}\t{n}")).collect::<Vec<_>>().join("\n");
        let counts: Vec<Value> = rows.iter().map(|(r, n)| json!({ "nodes": s(r), "count": s(n) })).collect();
        Doc::new(text, json!({ "surface": surface_json(&surface), "counts": counts }))
    } else {
        let (r, n) = &rows[0];
        Doc::new(n.to_string(), json!({ "surface": surface_json(&surface), "nodes": s(r), "count": s(n) }))
    };
    Ok(doc.table(&["nodes", "count"], csv))
}

fn cmd_zr(r: usize) -> Result<Doc, CliError> {
    let z = a_table()?.node_polynomial(r)?;
    let rows = z
        .poly
        .terms()
        .map(|(e, c)| e.iter().map(|v| v.to_string()).chain([c.to_string()]).collect())
        .collect();
    Ok(Doc::new(z.to_string(), json!({ "r": s(r), "variables": ["d", "k", "s", "x"], "terms": z.poly, "text": z.to_string() }))
        .table(&["d", "k", "s", "x", "coefficient"], rows))
}

fn cmd_qn(n: usize, p2: bool, oracle: Oracle) -> Result<Doc, CliError> {
    if !p2 {
        let q = q_general(n)?;
        let row = q.coeffs().iter().map(|c| c.to_string()).collect();
        return Ok(Doc::new(q.to_string(), json!({ "n": s(n), "form": q })).table(&["d", "k", "s", "x"], vec![row]));
    }
    let q = match oracle {
        Oracle::Closed => q_p2_closed(n)?,
        Oracle::Extraction => q_p2_extraction(n)?,
        Oracle::Both => {
            let a = q_p2_closed(n)?;
            let b = q_p2_extraction(n)?;
            if a != b {
                return Err(CliError::Consistency(format!("closed form {a} differs from extraction {b}")));
            }
            a
        }
    };
    Ok(poly_doc(n, &q))
}

fn poly_doc(n: usize, p: &UniPolyD) -> Doc {
    let rows = (0..3).map(|i| vec![i.to_string(), p.coeff(i).to_string()]).collect();
    Doc::new(p.to_string(), json!({ "n": s(n), "polynomial": poly_json(p) })).table(&["power_of_d", "coefficient"], rows)
}

fn cmd_cn(n: usize, p2: bool) -> Result<Doc, CliError> {
    if p2 {
        return Ok(poly_doc(n, &c_correction_p2(n)?));
    }
    let c = c_correction_general(n)?;
    let row = c.coeffs().iter().map(|v| v.to_string()).collect();
    Ok(Doc::new(c.to_string(), json!({ "n": s(n), "form": c })).table(&["d", "k", "s", "x"], vec![row]))
}

fn parse_values(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(|v| parse_rational(v.trim()).map_err(|e| CliError::Validation(e.to_string())))
        .collect()
}

fn cmd_bell(r: usize, l: Option<usize>, eval: Option<&str>) -> Result<Doc, CliError> {
    if let Some(values) = eval {
        if l.is_some() {
            return Err(CliError::Validation("--eval applies to the complete polynomial only".into()));
        }
        let v = eval_complete_bell(r, &parse_values(values)?)?;
        return Ok(Doc::new(v.to_string(), json!({ "r": s(r), "value": s(&v) }))
            .table(&["r", "value"], vec![vec![r.to_string(), v.to_string()]]));
    }
    let p = match l {
        Some(l) => partial_bell(r, l)?,
        None => complete_bell(r)?,
    };
    let header: Vec<String> = (1..=r).map(|i| format!("x{i}")).chain(["coefficient".to_string()]).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = p
        .terms()
        .map(|(e, c)| e.iter().map(|v| v.to_string()).chain([c.to_string()]).collect())
        .collect();
    let mut j = json!({ "r": s(r), "terms": p, "text": p.to_string() });
    if let Some(l) = l {
        j["l"] = s(l);
    }
    Ok(Doc::new(p.to_string(), j).table(&header, rows))
}

fn cmd_partitions(r: usize) -> Result<Doc, CliError> {
    let parts = enumerate_partitions(r)?;
    let rows: Vec<Vec<String>> = parts
        .iter()
        .map(|p| vec![p.to_string(), p.num_blocks().to_string(), p.mobius_coefficient().to_string()])
        .collect();
    let text = rows.iter().map(|r| format!("{}\t{}", r[0], r[2])).collect::<Vec<_>>().join("\n");
    let items: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "partition": r[0], "blocks": r[1], "mobius": r[2] }))
        .collect();
    Ok(Doc::new(text, json!({ "r": s(r), "count": s(parts.len()), "partitions": items }))
        .table(&["partition", "blocks", "mobius"], rows))
}

fn cmd_kazarian(ty: Option<&str>, list: bool, surface: &SurfaceArgs) -> Result<Doc, CliError> {
    let table = kazarian_table()?;
    let surface = surface.resolve()?;
    let types: Vec<MultisingularityType> = match (ty, list) {
        (Some(t), false) => vec![t.parse()?],
        (None, true) => table.entries().map(|(t, _)| t.clone()).collect(),
        _ => return Err(CliError::Validation("give exactly one of --type or --list".into())),
    };
    let mut rows = Vec::new();
    let mut items = Vec::new();
    let mut lines = Vec::new();
    for t in &types {
        let form = table.s_alpha(t)?;
        let count = match &surface {
            Some(sf) => Some(table.count_multisingular(t, &sf.chern)?),
            None => None,
        };
        let mut item = json!({
            "type": t,
            "codim": s(t.codim()),
            "aut": s(t.aut_order()),
            "s_alpha": form,
        });
        let mut line = format!("{t}\tS = {form}");
        let mut row: Vec<String> = vec![t.to_string(), t.codim().to_string(), t.aut_order().to_string()];
        row.extend(form.coeffs().iter().map(|c| c.to_string()));
        if let Some(c) = &count {
            item["count"] = s(c);
            line.push_str(&format!("\tN = {c}"));
            row.push(c.to_string());
        }
        items.push(item);
        lines.push(line);
        rows.push(row);
    }
    let mut header = vec!["type", "codim", "aut", "d", "k", "s", "x"];
    if surface.is_some() {
        header.push("count");
    }
    let mut j = json!({ "entries": items });
    if let Some(sf) = &surface {
        j["surface"] = surface_json(sf);
    }
    Ok(Doc::new(lines.join("\n"), j).table(&header, rows))
}

fn cmd_series(which: Option<SeriesKind>, gyz: bool, channel: Option<&str>, order: Option<usize>) -> Result<Doc, CliError> {
    let table = a_table()?;
    if gyz {
        if which.is_some() {
            return Err(CliError::Validation("--gyz-check takes no series name".into()));
        }
        let order = order.unwrap_or(table.len());
        let channels = match channel {
            Some(c) => vec![c.parse::<Channel>()?],
            None => Channel::ALL.to_vec(),
        };
        let mut failing = Vec::new();
        let mut items = Vec::new();
        let mut lines = Vec::new();
        let mut rows = Vec::new();
        for ch in channels {
            let res = gyz_channel_residual(ch, order, &table)?;
            let support = residual_support(&res);
            let shown = if support.is_empty() { "0".to_string() } else { res.to_string() };
            lines.push(if channel.is_some() { format!("residual: {shown}") } else { format!("{ch}: residual: {shown}") });
            for (n, c) in res.coeffs().iter().enumerate() {
                rows.push(vec![ch.to_string(), n.to_string(), c.to_string()]);
            }
            items.push(json!({ "channel": ch.name(), "zero": support.is_empty(), "residual": series_json(&res) }));
            if !support.is_empty() {
                failing.push(format!("{ch}-channel residual non-zero at q^{support:?}"));
            }
        }
        let doc = Doc::new(lines.join("\n"), json!({ "order": s(order), "channels": items }))
            .table(&["channel", "n", "coefficient"], rows);
        if failing.is_empty() {
            return Ok(doc);
        }
        return Err(CliError::Consistency(format!("{}\n{}", render_for_error(&doc), failing.join("; "))));
    }
    let which = which.ok_or_else(|| CliError::Validation("name a series (g2, delta, b1, b2, log-b1, log-b2) or pass --gyz-check".into()))?;
    let series = match which {
        SeriesKind::G2 => eisenstein_g2(order.unwrap_or(DEFAULT_ORDER)),
        SeriesKind::Delta => discriminant(order.unwrap_or(DEFAULT_ORDER)),
        SeriesKind::B1 => recover_b1(order.unwrap_or(table.len()), &table)?,
        SeriesKind::B2 => recover_b2(order.unwrap_or(table.len()), &table)?,
        SeriesKind::LogB1 => recover_log_b1(order.unwrap_or(table.len()), &table)?,
        SeriesKind::LogB2 => recover_log_b2(order.unwrap_or(table.len()), &table)?,
    };
    Ok(Doc::new(series.to_string(), series_json(&series)).table(&["n", "coefficient"], series_rows(&series)))
}

// The document still goes to stdout on a consistency failure; the error text
// carries it so `run` can print both.
fn render_for_error(doc: &Doc) -> String {
    doc.text.clone()
}

fn cmd_ratios() -> Result<Doc, CliError> {
    let table = a_table()?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for row in table.ratio_table() {
        let rendered = row.rendered();
        let exact: Vec<Value> = row.ratios.iter().map(|r| r.as_ref().map_or(Value::Null, s)).collect();
        items.push(json!({ "n": s(row.n), "exact": exact, "rendered": rendered }));
        let mut r = vec![row.n.to_string()];
        r.extend(rendered);
        rows.push(r);
    }
    let text = std::iter::once("n\tD\tE\tF\tG".to_string())
        .chain(rows.iter().map(|r| r.join("\t")))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Doc::new(text, json!({ "rows": items })).table(&["n", "D", "E", "F", "G"], rows))
}

fn cmd_check(order: Option<usize>) -> Result<Doc, CliError> {
    let table = a_table()?;
    let order = order.unwrap_or(table.len());
    let report = run_checks(&table, &kazarian_table()?, order);
    let rows: Vec<Vec<String>> = report
        .items
        .iter()
        .map(|i| vec![i.name.clone(), if i.passed { "pass" } else { "fail" }.to_string(), i.detail.clone()])
        .collect();
    let text = report
        .items
        .iter()
        .map(|i| {
            let mark = if i.passed { "PASS" } else { "FAIL" };
            if i.detail.is_empty() {
                format!("{mark}  {}", i.name)
            } else {
                format!("{mark}  {}  [{}]", i.name, i.detail)
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let doc = Doc::new(text, json!({ "order": s(order), "passed": report.all_passed(), "items": report.items }))
        .table(&["check", "status", "detail"], rows);
    if report.all_passed() {
        Ok(doc)
    } else {
        Err(CliError::Consistency(render_for_error(&doc)))
    }
}

fn dispatch(cli: &Cli) -> Result<Doc, CliError> {
    match &cli.command {
        Command::Count { surface, nodes, all } => cmd_count(surface, *nodes, *all),
        Command::Zr { r } => cmd_zr(*r),
        Command::Qn { n, p2, oracle } => cmd_qn(*n, *p2, *oracle),
        Command::Cn { n, p2 } => cmd_cn(*n, *p2),
        Command::Bell { r, l, eval } => cmd_bell(*r, *l, eval.as_deref()),
        Command::Partitions { r } => cmd_partitions(*r),
        Command::Kazarian { ty, list, surface } => cmd_kazarian(ty.as_deref(), *list, surface),
        Command::Series { which, gyz_check, channel, order } => cmd_series(*which, *gyz_check, channel.as_deref(), *order),
        Command::Ratios => cmd_ratios(),
        Command::Check { order } => cmd_check(*order),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    match dispatch(&cli) {
        Ok(doc) => {
            if let Err(e) = doc.write(cli.format, &mut stdout.lock()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Validation(m) => eprintln!("error: {m}"),
                CliError::Consistency(m) => eprintln!("consistency failure:\n{m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
