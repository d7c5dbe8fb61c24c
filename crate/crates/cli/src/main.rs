//! `binconf`: generate, inspect, split and glue point-line configurations.
//!
//! Exit status: 0 on success, 1 when a predicate comes out negative, 2 on
//! usage, parse or input errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use binconf::format::{
    parse_gluing, parse_manifest, parse_structure, write_gluing, write_manifest, write_structure,
    ManifestEntry,
};
use binconf::glue::{
    classify_gluings, decompose, glue, validate_gluing_named, DecomposeError, GluingLimits,
};
use binconf::hyperplane::{enumerate_hyperplanes, HyperplaneOptions};
use binconf::iso::{find_isomorphism, hex};
use binconf::triangle::{
    build_custom_triangle, build_family_triangle, verify_triangle, Cell, CellOutcome, ExplicitMaps,
    FirstValid, GluingChooser, SeededRandom, TriangleError, TriangleFamily,
};
use binconf::{ConfigTriangle, FamilySpec, GluingMap, IncidenceStructure, Point};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "binconf", version, about = "Binomial point-line configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct JsonFlag {
    /// Print a machine-readable report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a family member, e.g. `GS:5,2`, `V:3,3`, `K:4`, `veblen`.
    Gen {
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the configuration type and binomial signature.
    Type {
        #[arg(default_value = "-")]
        file: String,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Check the partial-linear-space and configuration axioms.
    Verify {
        #[arg(default_value = "-")]
        file: String,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Emit the dual structure.
    Dual {
        #[arg(default_value = "-")]
        file: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List every hyperplane.
    Hyperplanes {
        #[arg(default_value = "-")]
        file: String,
        /// Keep only hyperplanes whose restriction is a configuration.
        #[arg(long)]
        require_configuration: bool,
        /// Refuse structures with more points than this.
        #[arg(long, default_value_t = HyperplaneOptions::default().max_points)]
        max_points: usize,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Split a binomial configuration at a hyperplane into K1, K2 and the
    /// map at infinity.
    Decompose {
        file: String,
        /// Whitespace-separated point ids, or `index:N` (also a bare `N` when
        /// no point is called `N`) for the N-th hyperplane as listed by
        /// `hyperplanes`.
        #[arg(long)]
        hyperplane: String,
        /// Write `<prefix>.k1.cfg`, `<prefix>.k2.cfg` and `<prefix>.map`.
        #[arg(short, long)]
        output: Option<String>,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Glue the lines of the first structure onto the points of the second.
    Compose {
        file1: String,
        file2: String,
        #[arg(long)]
        map: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Test two structures for isomorphism.
    Iso {
        file1: String,
        file2: String,
        /// Print the point and line correspondence.
        #[arg(long)]
        witness: bool,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Partition every valid bijection by the isomorphism class of the glued
    /// structure.
    ClassifyGluings {
        file1: String,
        file2: String,
        /// Refuse first structures with more lines than this.
        #[arg(long, default_value_t = GluingLimits::default().max_domain)]
        max_domain: usize,
        #[command(flatten)]
        json: JsonFlag,
    },
    /// Build a family triangle or one grown from a custom boundary.
    Triangle {
        #[arg(long, conflicts_with = "custom", requires = "depth")]
        family: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        /// Manifest of `m k <structure-file|-> <gluing-file|->` rows.
        #[arg(long, required_unless_present = "family")]
        custom: Option<PathBuf>,
        /// Inner cells without a gluing file use a seeded random map
        /// instead of the first valid one.
        #[arg(long, requires = "custom")]
        seed: Option<u64>,
        /// Run every per-cell check; exit 1 if any fails.
        #[arg(long)]
        verify: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        json: JsonFlag,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}

/// The error chain joined by `: `, skipping causes whose text the previous
/// message already ends with.
fn describe(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let msg = cause.to_string();
        if out.ends_with(&msg) {
            continue;
        }
        if !out.is_empty() {
            out.push_str(": ");
        }
        out.push_str(&msg);
    }
    out
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Gen { spec, output } => {
            let spec: FamilySpec = spec.parse()?;
            emit(&write_structure(&spec.build()?), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Type { file, json } => {
            let k = load_structure(&file)?;
            print_report(json.json, type_json(&k), type_line(&k));
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { file, json } => verify(&load_structure(&file)?, json.json),
        Command::Dual { file, output } => {
            emit(&write_structure(&load_structure(&file)?.dual()), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Hyperplanes { file, require_configuration, max_points, json } => {
            hyperplanes(&load_structure(&file)?, require_configuration, max_points, json.json)
        }
        Command::Decompose { file, hyperplane, output, json } => {
            run_decompose(&load_structure(&file)?, &hyperplane, output.as_deref(), json.json)
        }
        Command::Compose { file1, file2, map, output } => {
            let k1 = load_structure(&file1)?;
            let k2 = load_structure(&file2)?;
            let pairs = parse_gluing(&read_input(&map)?).with_context(|| map.clone())?;
            let map = validate_gluing_named(&k1, &k2, &pairs).with_context(|| map.clone())?;
            emit(&write_structure(&glue(&k1, &k2, &map)?), output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Iso { file1, file2, witness, json } => {
            iso(&load_structure(&file1)?, &load_structure(&file2)?, witness, json.json)
        }
        Command::ClassifyGluings { file1, file2, max_domain, json } => {
            classify(&load_structure(&file1)?, &load_structure(&file2)?, max_domain, json.json)
        }
        Command::Triangle { family, depth, custom, seed, verify, output, json } => {
            let t = match (family, custom) {
                (Some(family), _) => {
                    let family: TriangleFamily = family.parse()?;
                    let depth = depth.ok_or_else(|| anyhow!("--family needs --depth"))?;
                    build_family_triangle(family, depth)?
                }
                (None, Some(manifest)) => custom_triangle(&manifest, seed)?,
                (None, None) => bail!("give --family or --custom"),
            };
            triangle_output(&t, verify, output.as_deref(), json.json)
        }
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading standard input")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_structure(path: &str) -> Result<IncidenceStructure> {
    let text = read_input(path)?;
    let name = if path == "-" { "<stdin>" } else { path };
    parse_structure(&text).with_context(|| name.to_string())
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => match io::stdout().write_all(text.as_bytes()) {
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r.context("writing standard output"),
        },
    }
}

fn print_report(as_json: bool, report: Value, text: String) {
    let out = if as_json { format!("{report:#}") } else { text };
    // a closed pipe (`| head`) is not an error worth reporting
    let _ = writeln!(io::stdout(), "{out}");
}

fn type_line(k: &IncidenceStructure) -> String {
    match k.configuration_type() {
        None => "not a configuration".to_string(),
        Some(t) => match t.binomial_signature() {
            Some(s) => format!("{t}, binomial {s}"),
            None => t.to_string(),
        },
    }
}

fn type_value(k: &IncidenceStructure) -> Value {
    match k.configuration_type() {
        Some(t) => json!({ "nu": t.nu, "rho": t.rho, "beta": t.beta, "kappa": t.kappa }),
        None => Value::Null,
    }
}

fn type_json(k: &IncidenceStructure) -> Value {
    let binomial = k
        .configuration_type()
        .and_then(|t| t.binomial_signature())
        .map_or(Value::Null, |s| json!({ "k": s.k, "m": s.m }));
    json!({
        "points": k.num_points(),
        "lines": k.num_lines(),
        "partial_linear_space": k.is_partial_linear_space(),
        "configuration": type_value(k),
        "binomial": binomial,
    })
}

fn distinct(values: Vec<usize>) -> Vec<usize> {
    let mut v = values;
    v.sort_unstable();
    v.dedup();
    v
}

fn verify(k: &IncidenceStructure, as_json: bool) -> Result<ExitCode> {
    let mut diagnostics = Vec::new();
    let lines: Vec<_> = k.lines().collect();
    for (i, &a) in lines.iter().enumerate() {
        for &b in &lines[i + 1..] {
            let shared: Vec<&str> = k
                .points_on(a)
                .iter()
                .filter(|&&p| k.is_incident(p, b))
                .map(|&p| k.point_name(p))
                .collect();
            if shared.len() >= 2 {
                diagnostics.push(format!(
                    "lines {} and {} share points {}",
                    k.line_name(a),
                    k.line_name(b),
                    shared.join(" ")
                ));
            }
        }
    }
    let pls = k.is_partial_linear_space();
    let ranks = distinct(k.point_ranks());
    let sizes = distinct(k.line_sizes());
    if ranks.len() > 1 {
        diagnostics.push(format!("point ranks vary: {ranks:?}"));
    }
    if sizes.len() > 1 {
        diagnostics.push(format!("line sizes vary: {sizes:?}"));
    }
    let config = k.configuration_type();
    let report = json!({
        "partial_linear_space": pls,
        "configuration": config.is_some(),
        "type": type_value(k),
        "diagnostics": diagnostics,
    });
    let mut text = vec![
        format!("partial linear space: {}", if pls { "yes" } else { "no" }),
        format!("configuration: {}", config.map_or("no".to_string(), |t| t.to_string())),
    ];
    text.extend(diagnostics.iter().cloned());
    print_report(as_json, report, text.join("\n"));
    Ok(status(pls && config.is_some()))
}

fn hyperplanes(
    k: &IncidenceStructure,
    require_configuration: bool,
    max_points: usize,
    as_json: bool,
) -> Result<ExitCode> {
    let opts = HyperplaneOptions { max_points, ..HyperplaneOptions::default() };
    let views = enumerate_hyperplanes(k, opts)?;
    let mut rows = Vec::new();
    let mut text = Vec::new();
    for (index, view) in views.iter().enumerate() {
        let restriction = view.configuration_type();
        if require_configuration && restriction.is_none() {
            continue;
        }
        let deep: Vec<&str> = view.deep_lines().iter().map(|&l| k.line_name(l)).collect();
        text.push(format!(
            "{index}: {{{}}} size {}, {} deep lines, restriction {}",
            view.point_names().join(" "),
            view.points().len(),
            deep.len(),
            restriction.map_or("not a configuration".to_string(), |t| t.to_string()),
        ));
        rows.push(json!({
            "index": index,
            "points": view.point_names(),
            "deep_lines": deep,
            "restriction": restriction
                .map_or(Value::Null, |t| json!({ "nu": t.nu, "rho": t.rho, "beta": t.beta, "kappa": t.kappa })),
        }));
    }
    text.insert(0, format!("{} hyperplanes", rows.len()));
    let found = !rows.is_empty();
    print_report(as_json, json!({ "count": rows.len(), "hyperplanes": rows }), text.join("\n"));
    Ok(status(found))
}

/// Resolves `--hyperplane` to a point set.
fn hyperplane_points(k: &IncidenceStructure, spec: &str) -> Result<Vec<Point>> {
    let trimmed = spec.trim();
    let index = match trimmed.strip_prefix("index:") {
        Some(n) => Some(n.trim().parse::<usize>().with_context(|| format!("bad index {n:?}"))?),
        None if k.point_named(trimmed).is_none() => trimmed.parse::<usize>().ok(),
        None => None,
    };
    if let Some(i) = index {
        let sets = binconf::hyperplane::enumerate_hyperplane_sets(k, HyperplaneOptions::default())?;
        let count = sets.len();
        return sets
            .into_iter()
            .nth(i)
            .ok_or_else(|| anyhow!("hyperplane index {i} out of range ({count} hyperplanes)"));
    }
    let mut points: Vec<Point> = trimmed
        .split_whitespace()
        .map(|id| k.point_named(id).ok_or_else(|| anyhow!("unknown point {id:?}")))
        .collect::<Result<_>>()?;
    points.sort_unstable();
    points.dedup();
    Ok(points)
}

fn map_pairs(map: &GluingMap) -> Vec<[&str; 2]> {
    let mut pairs: Vec<[&str; 2]> = map.pairs().map(|(a, b)| [a, b]).collect();
    pairs.sort();
    pairs
}

fn run_decompose(
    k: &IncidenceStructure,
    spec: &str,
    output: Option<&str>,
    as_json: bool,
) -> Result<ExitCode> {
    let set = hyperplane_points(k, spec)?;
    let names: Vec<&str> = set.iter().map(|&p| k.point_name(p)).collect();
    let d = match decompose(k, &set) {
        Ok(d) => d,
        Err(e @ (DecomposeError::Hyperplane(_) | DecomposeError::Glue(_))) => return Err(e.into()),
        Err(e) => {
            let report =
                json!({ "decomposed": false, "hyperplane": names, "reason": e.to_string() });
            print_report(as_json, report, format!("no decomposition: {e}"));
            return Ok(ExitCode::from(1));
        }
    };
    if let Some(prefix) = output {
        fs::write(format!("{prefix}.k1.cfg"), write_structure(&d.reduct_part))?;
        fs::write(format!("{prefix}.k2.cfg"), write_structure(&d.hyperplane_part))?;
        fs::write(format!("{prefix}.map"), write_gluing(&d.infinity))?;
    }
    let report = json!({
        "decomposed": true,
        "hyperplane": names,
        "signature": { "k": d.signature.k, "m": d.signature.m },
        "k1": type_json(&d.reduct_part),
        "k2": type_json(&d.hyperplane_part),
        "infinity": map_pairs(&d.infinity),
    });
    let mut text = format!(
        "{}\nK1 (reduct): {}\nK2 (restriction): {}\n",
        type_line(k),
        type_line(&d.reduct_part),
        type_line(&d.hyperplane_part),
    );
    if output.is_none() {
        text.push_str("infinity:\n");
        text.push_str(&write_gluing(&d.infinity));
    }
    print_report(as_json, report, text.trim_end().to_string());
    Ok(ExitCode::SUCCESS)
}

fn iso(
    a: &IncidenceStructure,
    b: &IncidenceStructure,
    witness: bool,
    as_json: bool,
) -> Result<ExitCode> {
    let found = find_isomorphism(a, b)?;
    let mut report = json!({ "isomorphic": found.is_some() });
    let mut text = if found.is_some() { "isomorphic" } else { "not isomorphic" }.to_string();
    if let (true, Some(map)) = (witness, &found) {
        let (points, lines) = map.named_pairs(a, b);
        for (x, y) in points.iter().chain(&lines) {
            text.push_str(&format!("\n{x} -> {y}"));
        }
        report["witness"] = json!({ "points": pairs(&points), "lines": pairs(&lines) });
    }
    print_report(as_json, report, text);
    Ok(status(found.is_some()))
}

fn pairs<'a>(v: &[(&'a str, &'a str)]) -> Vec<[&'a str; 2]> {
    v.iter().map(|&(x, y)| [x, y]).collect()
}

fn classify(
    k1: &IncidenceStructure,
    k2: &IncidenceStructure,
    max_domain: usize,
    as_json: bool,
) -> Result<ExitCode> {
    let limits = GluingLimits { max_domain, ..GluingLimits::default() };
    let classes = classify_gluings(k1, k2, limits)?;
    let total: usize = classes.iter().map(|c| c.size).sum();
    let mut text = vec![format!("{} classes", classes.len())];
    let mut rows = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let glued = glue(k1, k2, &c.representative)?;
        let pairs = map_pairs(&c.representative);
        let shown: Vec<String> = pairs.iter().map(|[a, b]| format!("{a}->{b}")).collect();
        text.push(format!(
            "class {}: {} maps, {}; representative {}",
            i + 1,
            c.size,
            type_line(&glued),
            shown.join(" ")
        ));
        rows.push(json!({
            "size": c.size,
            "type": type_value(&glued),
            "certificate": hex(&c.certificate),
            "representative": pairs,
        }));
    }
    let report = json!({ "class_count": classes.len(), "map_count": total, "classes": rows });
    print_report(as_json, report, text.join("\n"));
    Ok(ExitCode::SUCCESS)
}

/// Explicit maps where the manifest gives one, a fallback elsewhere.
struct ManifestChooser {
    explicit: ExplicitMaps,
    fallback: Box<dyn GluingChooser>,
}

impl GluingChooser for ManifestChooser {
    fn choose(
        &mut self,
        cell: Cell,
        k1: &IncidenceStructure,
        k2: &IncidenceStructure,
    ) -> Result<Option<GluingMap>, TriangleError> {
        if self.explicit.maps.contains_key(&cell) {
            self.explicit.choose(cell, k1, k2)
        } else {
            self.fallback.choose(cell, k1, k2)
        }
    }
}

fn custom_triangle(manifest: &Path, seed: Option<u64>) -> Result<ConfigTriangle> {
    let text =
        fs::read_to_string(manifest).with_context(|| format!("reading {}", manifest.display()))?;
    let entries = parse_manifest(&text).with_context(|| manifest.display().to_string())?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    // rows with an index below 2 (written for family triangles) are ignored
    let entries: Vec<&ManifestEntry> = entries.iter().filter(|e| e.m >= 2 && e.k >= 2).collect();
    let depth =
        entries.iter().map(|e| e.m.max(e.k)).max().ok_or_else(|| anyhow!("empty manifest"))?;
    let mut boundary: BTreeMap<Cell, IncidenceStructure> = BTreeMap::new();
    let mut explicit = ExplicitMaps::default();
    for e in entries {
        let on_boundary = e.m == 2 || e.k == 2;
        match (&e.structure, on_boundary) {
            (Some(file), true) => {
                let path = base.join(file);
                let k = parse_structure(
                    &fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?,
                )
                .with_context(|| path.display().to_string())?;
                boundary.insert((e.m, e.k), k);
            }
            (None, true) => bail!("boundary cell ({},{}) needs a structure file", e.m, e.k),
            _ => {}
        }
        if let (Some(file), false) = (&e.gluing, on_boundary) {
            let path = base.join(file);
            let pairs = parse_gluing(
                &fs::read_to_string(&path)
                    .with_context(|| format!("reading {}", path.display()))?,
            )
            .with_context(|| path.display().to_string())?;
            explicit.maps.insert((e.m, e.k), pairs);
        }
    }
    let take = |cell: Cell| {
        boundary.get(&cell).cloned().ok_or_else(|| anyhow!("boundary cell {cell:?} missing"))
    };
    let row = (2..=depth).map(|k| take((2, k))).collect::<Result<Vec<_>>>()?;
    let column = (2..=depth).map(|m| take((m, 2))).collect::<Result<Vec<_>>>()?;
    let fallback: Box<dyn GluingChooser> = match seed {
        Some(s) => Box::new(SeededRandom::new(s)),
        None => Box::new(FirstValid),
    };
    let mut chooser = ManifestChooser { explicit, fallback };
    Ok(build_custom_triangle(row, column, &mut chooser)?)
}

fn outcome_name(o: Option<&CellOutcome>) -> &'static str {
    match o {
        Some(CellOutcome::Boundary) => "boundary",
        Some(CellOutcome::Glued) => "glued",
        Some(CellOutcome::NoValidGluing) => "no-valid-gluing",
        Some(CellOutcome::Blocked) | None => "blocked",
    }
}

fn triangle_output(
    t: &ConfigTriangle,
    verify: bool,
    output: Option<&Path>,
    as_json: bool,
) -> Result<ExitCode> {
    let report = verify.then(|| verify_triangle(t));
    if let Some(dir) = output {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut manifest = Vec::new();
        for (m, k) in t.cells() {
            let Some(entry) = t.entry(m, k) else { continue };
            let cfg = format!("cell-{m}-{k}.cfg");
            fs::write(dir.join(&cfg), write_structure(entry))?;
            let gluing = match t.gluing(m, k) {
                Some(map) => {
                    let name = format!("cell-{m}-{k}.map");
                    fs::write(dir.join(&name), write_gluing(map))?;
                    Some(name)
                }
                None => None,
            };
            manifest.push(ManifestEntry { m, k, structure: Some(cfg), gluing });
        }
        fs::write(dir.join("manifest.txt"), write_manifest(&manifest))?;
    }
    let mut text = vec![format!("{} triangle, depth {}", t.provenance(), t.depth())];
    let mut cells = Vec::new();
    for (m, k) in t.cells() {
        let entry = t.entry(m, k);
        let outcome = outcome_name(t.outcome(m, k));
        let passed = report
            .as_ref()
            .and_then(|r| r.cells.iter().find(|c| c.cell == (m, k)))
            .map(|c| c.passed());
        let ty = entry.map_or("-".to_string(), type_line);
        let check = match passed {
            Some(true) => " ok",
            Some(false) => " FAILED",
            None => "",
        };
        text.push(format!("({m},{k}) {outcome}: {ty}{check}"));
        cells.push(json!({
            "m": m,
            "k": k,
            "outcome": outcome,
            "type": entry.map_or(Value::Null, type_value),
            "passed": passed,
        }));
    }
    let all = report.as_ref().map(|r| r.passed());
    if let Some(r) = &report {
        let failed = r.failed_cells();
        text.push(if failed.is_empty() {
            "all cells verified".to_string()
        } else {
            format!("verification failed at {failed:?}")
        });
    }
    let value = json!({
        "provenance": t.provenance().to_string(),
        "depth": t.depth(),
        "cells": cells,
        "verified": all,
    });
    print_report(as_json, value, text.join("\n"));
    Ok(status(all.unwrap_or(true)))
}
