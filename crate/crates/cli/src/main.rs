//! `chainfill` command-line front end. Results go to stdout, diagnostics to
//! stderr. Exit codes: 0 success, 1 failed check or negative answer, 2 usage
//! or parse error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use chainfill::catalog::{
    classify, generate_family, instances, verify_catalog, Catalog, CatalogRow, FamilySpec, RowReport,
    KNOWN_DISCREPANCIES,
};
use chainfill::chains::Registry;
use chainfill::exactalg::abelian_iso;
use chainfill::homology::{h1_family, h1_in};
use chainfill::manifolds::{FilledBlock, FillingTuple, Manifold};
use chainfill::moves::{equivalent_in, normalize, Verdict};
use chainfill::notation::{parse_expr_in, parse_slopes, print_expr};
use chainfill::symmetry::{canonical_rep, factor_reason, orbit};
use clap::{Parser, Subcommand};
use serde_json::json;

/// Environment variable naming a data directory that replaces the built-in
/// fixtures.
const DATA_ENV: &str = "CHAINFILL_DATA";

#[derive(Parser)]
#[command(name = "chainfill", version, about = "Graph-manifold notation, moves and homology of chain-link fillings")]
struct Cli {
    /// Emit machine-readable JSON mirroring the text output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate an expression, printing its canonical text.
    Parse { expr: String },
    /// Print the normal form of an expression.
    Normalize { expr: String },
    /// Print the first homology group of an expression.
    Homology { expr: String },
    /// Decide whether two expressions describe the same manifold.
    Equiv { left: String, right: String },
    /// Describe a filling of a chain family.
    Fill {
        family: String,
        #[arg(allow_hyphen_values = true)]
        slopes: String,
        /// Print the first homology group instead of the description.
        #[arg(long)]
        homology: bool,
    },
    /// List the symmetry orbit of a filling tuple.
    Orbit {
        family: String,
        #[arg(allow_hyphen_values = true)]
        slopes: String,
        /// Use the one-cusp slope action instead of the cusp symmetries.
        #[arg(long)]
        slope_action: bool,
    },
    /// Report whether a filling factors through a smaller manifold.
    FactorCheck {
        family: String,
        #[arg(allow_hyphen_values = true)]
        slopes: String,
    },
    /// Check the catalog rows three ways.
    VerifyCatalog {
        /// Only rows of this table.
        #[arg(long)]
        table: Option<u32>,
        /// Count known misprinted rows as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Enumerate a parametrized family with its case labels.
    Enumerate {
        family_id: String,
        /// Largest |p| and |q| of each coprime pair.
        #[arg(long, default_value_t = 2)]
        bound: i64,
    },
    /// Check first homology across the named identities and blow-downs.
    Identities,
}

/// A failed run: exit code and message for stderr.
struct Failure(u8, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

struct Context {
    reg: Registry,
    catalog: Catalog,
    json: bool,
}

/// Output buffer and exit code of a successful run.
#[derive(Default)]
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn json(&mut self, v: serde_json::Value) {
        self.line(serde_json::to_string_pretty(&v).expect("json values serialize"));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = match load(cli.json) {
        Ok(c) => c,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };
    match run(&ctx, cli.command) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load(json: bool) -> Result<Context, Failure> {
    match std::env::var_os(DATA_ENV) {
        Some(dir) => {
            let dir = PathBuf::from(dir);
            let reg = Registry::load_dir(&dir).map_err(|e| Failure(2, format!("{DATA_ENV}: {e}")))?;
            let catalog = Catalog::load_dir(&dir).map_err(|e| Failure(2, format!("{DATA_ENV}: {e}")))?;
            Ok(Context { reg, catalog, json })
        }
        None => Ok(Context { reg: Registry::builtin().clone(), catalog: Catalog::builtin(), json }),
    }
}

fn expr(ctx: &Context, text: &str) -> Result<Manifold, Failure> {
    parse_expr_in(&ctx.reg, text).map_err(|e| usage(format!("{text:?}: {e}")))
}

fn tuple(text: &str) -> Result<FillingTuple, Failure> {
    parse_slopes(text).map_err(|e| usage(format!("slopes {text:?}: {e}")))
}

fn family<'a>(ctx: &'a Context, name: &str) -> Result<&'a chainfill::chains::Family, Failure> {
    ctx.reg.family(name).ok_or_else(|| usage(format!("unknown family {name}")))
}

fn run(ctx: &Context, command: Command) -> Result<Output, Failure> {
    let mut out = Output::default();
    match command {
        Command::Parse { expr: text } => {
            let m = expr(ctx, &text)?;
            if ctx.json {
                out.json(json!({ "expr": print_expr(&m), "tree": m }));
            } else {
                out.line(print_expr(&m));
            }
        }
        Command::Normalize { expr: text } => {
            let n = normalize(&expr(ctx, &text)?);
            if ctx.json {
                out.json(json!({ "normal_form": print_expr(&n) }));
            } else {
                out.line(print_expr(&n));
            }
        }
        Command::Homology { expr: text } => {
            let g = h1_in(&ctx.reg, &expr(ctx, &text)?).map_err(|e| Failure(1, e.to_string()))?;
            if ctx.json {
                out.json(json!({ "h1": g.to_string() }));
            } else {
                out.line(g.to_string());
            }
        }
        Command::Equiv { left, right } => {
            let v = equivalent_in(&ctx.reg, &expr(ctx, &left)?, &expr(ctx, &right)?);
            if matches!(v, Verdict::No { .. }) {
                out.code = 1;
            }
            if ctx.json {
                out.json(serde_json::to_value(&v).expect("verdict serializes"));
            } else {
                out.line(v.to_string());
            }
        }
        Command::Fill { family: name, slopes, homology } => fill(ctx, &mut out, &name, &slopes, homology)?,
        Command::Orbit { family: name, slopes, slope_action } => {
            let fam = family(ctx, &name)?;
            let t = tuple(&slopes)?;
            let group = if slope_action { fam.slope_action_group() } else { fam.symmetry_group() }
                .map_err(|e| Failure(1, e.to_string()))?;
            let orb = orbit(&group, &t).map_err(|e| usage(e.to_string()))?;
            let orb: Vec<String> = orb.iter().map(|t| t.trimmed().to_string()).collect();
            if ctx.json {
                out.json(json!({ "family": name, "orbit": orb }));
            } else {
                orb.iter().for_each(|t| out.line(t));
            }
        }
        Command::FactorCheck { family: name, slopes } => {
            let fam = family(ctx, &name)?;
            let t = tuple(&slopes)?;
            if t.len() > fam.cusps {
                return Err(usage(format!("{} slopes for the {} cusps of {name}", t.len(), fam.cusps)));
            }
            let reason = factor_reason(fam, &t);
            if ctx.json {
                out.json(json!({ "factors": reason.is_some(), "reason": reason.as_ref().map(ToString::to_string) }));
            } else {
                match reason {
                    Some(r) => out.line(format!("factors: true ({r})")),
                    None => out.line("factors: false"),
                }
            }
        }
        Command::VerifyCatalog { table, strict } => verify(ctx, &mut out, table, strict),
        Command::Enumerate { family_id, bound } => enumerate(ctx, &mut out, &family_id, bound)?,
        Command::Identities => {
            let mut all = ctx.reg.identities().to_vec();
            all.extend(ctx.reg.blowdown_identities());
            let mut reports = Vec::new();
            for id in &all {
                let r = ctx.reg.check_identity(id).map_err(|e| Failure(1, format!("{}: {e}", id.text)))?;
                if !r.pass {
                    out.code = 1;
                }
                reports.push(r);
            }
            if ctx.json {
                out.json(serde_json::to_value(&reports).expect("reports serialize"));
            } else {
                reports.iter().for_each(|r| out.line(r.to_string()));
                let passed = reports.iter().filter(|r| r.pass).count();
                out.line(format!("{passed}/{} identities agree on H1", reports.len()));
            }
        }
    }
    Ok(out)
}

fn fill(ctx: &Context, out: &mut Output, name: &str, slopes: &str, homology: bool) -> Result<(), Failure> {
    let fam = family(ctx, name)?;
    let t = tuple(slopes)?;
    if t.len() > fam.cusps {
        return Err(usage(format!("{} slopes for the {} cusps of {name}", t.len(), fam.cusps)));
    }
    if homology {
        let g = h1_family(&ctx.reg, name, &t).map_err(|e| Failure(1, e.to_string()))?;
        if ctx.json {
            out.json(json!({ "family": name, "slopes": t.to_string(), "h1": g.to_string() }));
        } else {
            out.line(g.to_string());
        }
        return Ok(());
    }
    // A catalog row in the same symmetry orbit gives a description.
    let group = fam.symmetry_group().ok();
    let key = |t: &FillingTuple| match &group {
        Some(g) => canonical_rep(g, t).ok(),
        None => Some(t.padded(fam.cusps)),
    };
    let want = key(&t);
    let row = ctx
        .catalog
        .rows
        .iter()
        .filter_map(|raw| CatalogRow::parse(&ctx.reg, raw).ok())
        .find(|row| row.family == name && want.is_some() && key(&row.slopes) == want);
    let (description, table) = match row {
        Some(row) => (print_expr(&row.expr), Some(row.table)),
        None => (print_expr(&Manifold::Filled(FilledBlock::new(name, fam.cusps, t.clone()))), None),
    };
    if ctx.json {
        out.json(json!({ "family": name, "slopes": t.to_string(), "expr": description, "table": table }));
    } else {
        match table {
            Some(n) => out.line(format!("{description}  (table {n})")),
            None => out.line(description),
        }
    }
    Ok(())
}

fn is_known(r: &RowReport) -> bool {
    let slopes = r.text.split('|').nth(2).map(str::trim);
    KNOWN_DISCREPANCIES.iter().any(|&(t, s)| r.table == Some(t) && slopes == Some(s))
}

fn verify(ctx: &Context, out: &mut Output, table: Option<u32>, strict: bool) {
    let reports = verify_catalog(&ctx.reg, &ctx.catalog, table);
    let (mut pass, mut fail, mut known) = (0, 0, 0);
    let mut lines = Vec::new();
    for r in &reports {
        let status = if r.pass {
            pass += 1;
            "PASS"
        } else if !strict && is_known(r) {
            known += 1;
            "KNOWN"
        } else {
            fail += 1;
            "FAIL"
        };
        let groups = format!(
            "expr {} | filling {} | listed {}",
            r.from_expr.as_deref().unwrap_or("-"),
            r.from_family.as_deref().unwrap_or("-"),
            r.listed.as_deref().unwrap_or("-")
        );
        let mut line = format!("{status} {} [{groups}]", r.label());
        if let Some(e) = &r.error {
            let _ = write!(line, " error: {e}");
        }
        lines.push(line);
    }
    if fail > 0 {
        out.code = 1;
    }
    if ctx.json {
        out.json(json!({ "rows": reports, "pass": pass, "fail": fail, "known": known }));
    } else {
        lines.iter().for_each(|l| out.line(l));
        out.line(format!("{pass} passed, {fail} failed, {known} known misprints"));
    }
}

fn enumerate(ctx: &Context, out: &mut Output, id: &str, bound: i64) -> Result<(), Failure> {
    let spec: FamilySpec = id.parse().map_err(|e: chainfill::catalog::CatalogError| usage(e.to_string()))?;
    if bound < 0 {
        return Err(usage("--bound must be non-negative"));
    }
    let mut cases: BTreeMap<u8, usize> = BTreeMap::new();
    let (mut count, mut mismatches) = (0usize, 0usize);
    let mut rows = Vec::new();
    for p in instances(spec, bound) {
        let Ok(m) = generate_family(&ctx.reg, spec, &p) else { continue };
        count += 1;
        let g = h1_in(&ctx.reg, &m).map_err(|e| Failure(1, e.to_string()))?;
        let c = classify(spec, &p);
        let agrees = match &c {
            Some(c) => {
                *cases.entry(c.case).or_insert(0) += 1;
                h1_in(&ctx.reg, &normalize(&c.output)).is_ok_and(|h| abelian_iso(&g, &h))
            }
            None => true,
        };
        if !agrees {
            mismatches += 1;
        }
        let params: Vec<String> = if spec.takes_pairs() {
            p.chunks(2).map(|c| format!("({},{})", c[0], c[1])).collect()
        } else {
            p.iter().map(ToString::to_string).collect()
        };
        let params = params.join(",");
        if ctx.json {
            rows.push(json!({
                "params": params,
                "expr": print_expr(&m),
                "h1": g.to_string(),
                "case": c.as_ref().map(|c| c.case),
                "detail": c.as_ref().map(|c| c.detail.clone()),
                "h1_agrees": agrees,
            }));
        } else {
            let case = c.map_or(String::new(), |c| format!(" | case {}", c.case));
            let flag = if agrees { "" } else { " | H1 MISMATCH" };
            out.line(format!("{params} | {} | {g}{case}{flag}", print_expr(&m)));
        }
    }
    if mismatches > 0 {
        out.code = 1;
    }
    if ctx.json {
        out.json(json!({ "family": spec.id(), "bound": bound, "instances": rows, "cases": cases, "mismatches": mismatches }));
    } else {
        let cases: Vec<String> = cases.iter().map(|(k, v)| format!("{k}:{v}")).collect();
        let cases = if cases.is_empty() { "none".to_string() } else { cases.join(" ") };
        out.line(format!("# {count} instances; cases {cases}; {mismatches} H1 mismatches"));
    }
    Ok(())
}
