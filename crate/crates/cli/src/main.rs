mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use obdalab_core::chase::{certain_answers_at_depth, oracle_depth};
use obdalab_core::circuit::{circuit_to_hgp3, eval_nbp, hgp_to_np_circuit, parse_circuit, parse_nbp};
use obdalab_core::encoder::encode_hgp;
use obdalab_core::hgp::{eval_hgp, parse_hgp};
use obdalab_core::logic::{parse_data, parse_ontology, parse_query};
use obdalab_core::rewrite::{
    count_independent_sets, default_tree_depth, ndl_rewriting_with, pe_rewriting_with, tree_witnesses_bounded,
    RewriteOptions,
};
use obdalab_core::suite::{run_suite, sizes_csv, Fault, SuiteKind, SuiteReport};

use config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "obdalab", version, about = "Ontology-mediated query rewriting and hypergraph programs")]
struct Cli {
    /// Seed for generated test instances.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Chase depth for `answer` and the test oracles; tree depth for `rewrite`.
    #[arg(long, global = true)]
    depth_limit: Option<usize>,
    /// Where generated files go.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<FaultArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FaultArg {
    DropInclusion,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Pe,
    Ndl,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CompileTo {
    Hgp3,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Hgp,
    Circuit,
    Nbp,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum SuiteArg {
    Rewriter,
    Encoder,
    Translators,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certain answers of a query over data and an ontology.
    Answer { ontology: PathBuf, data: PathBuf, query: PathBuf },
    /// Rewrite a query under an ontology.
    Rewrite {
        ontology: PathBuf,
        query: PathBuf,
        #[arg(long, value_enum, default_value = "pe")]
        target: Target,
    },
    /// Encode a hypergraph program as an ontology, a Boolean query and an input map.
    Encode { program: PathBuf },
    /// Compile a circuit into a degree-3 hypergraph program.
    Compile {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value = "hgp3")]
        to: CompileTo,
        #[arg(long)]
        monotone: bool,
    },
    /// Circuit with one certificate input per hyperedge.
    Hgp2circuit { program: PathBuf },
    /// Evaluate a hypergraph program, circuit or branching program.
    Eval {
        file: PathBuf,
        /// Input bits, x1 first.
        bits: String,
        /// File kind; guessed from the extension when omitted.
        #[arg(long, value_enum)]
        kind: Option<Kind>,
    },
    /// Run the randomized differential suites.
    Selftest {
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => bail!("input bits must be 0 or 1, found `{c}`"),
        })
        .collect()
}

fn guess_kind(path: &Path) -> Result<Kind> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("hgp") => Ok(Kind::Hgp),
        Some("circuit" | "circ") => Ok(Kind::Circuit),
        Some("nbp") => Ok(Kind::Nbp),
        _ => bail!("cannot tell the kind of {}; pass --kind", path.display()),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    VerificationFailed,
}

fn run(cli: Cli) -> Result<Outcome> {
    let cfg = RunConfig {
        seed: cli.seed,
        depth_limit: cli.depth_limit,
        out_dir: cli.out_dir.clone(),
        fault: cli.inject_fault.map(|FaultArg::DropInclusion| Fault::DropInclusion),
        ..RunConfig::default()
    };
    match cli.command {
        Command::Answer { ontology, data, query } => {
            let t = parse_ontology(&read(&ontology)?).context("ontology")?;
            let d = parse_data(&read(&data)?).context("data")?;
            let q = parse_query(&read(&query)?).context("query")?;
            let depth = cfg.depth_limit.unwrap_or_else(|| oracle_depth(&q, &t));
            let answers = certain_answers_at_depth(&d, &t, &q, depth);
            if q.is_boolean() {
                println!("{}", !answers.is_empty());
            } else {
                for tuple in answers {
                    println!("{}", tuple.join(","));
                }
            }
        }
        Command::Rewrite { ontology, query, target } => {
            let t = parse_ontology(&read(&ontology)?).context("ontology")?;
            let q = parse_query(&read(&query)?).context("query")?;
            let opts = RewriteOptions {
                tree_depth: cfg.depth_limit,
                ..Default::default()
            };
            match target {
                Target::Pe => {
                    let r = pe_rewriting_with(&q, &t, &opts);
                    println!("{}", r.query);
                    println!("# size={} disjuncts={}", r.query.size(), r.disjuncts);
                }
                Target::Ndl => {
                    let p = ndl_rewriting_with(&q, &t, &opts);
                    let depth = opts.tree_depth.unwrap_or_else(|| default_tree_depth(&q, &t));
                    let ws = tree_witnesses_bounded(&q, &t, depth, q.num_vars());
                    print!("{p}");
                    println!("# size={} disjuncts={}", p.size(), count_independent_sets(&ws));
                }
            }
        }
        Command::Encode { program } => {
            let h = parse_hgp(&read(&program)?).context("hypergraph program")?;
            let enc = encode_hgp(&h);
            let stem = program.file_stem().and_then(|s| s.to_str()).unwrap_or("encoding");
            for (ext, text) in [
                ("ontology", enc.ontology.to_string()),
                ("query", format!("{}\n", enc.query)),
                ("inputmap", enc.input_map.to_string()),
            ] {
                let path = write(&cfg.out_dir, &format!("{stem}.{ext}"), &text)?;
                println!("{}", path.display());
            }
        }
        Command::Compile { circuit, to: CompileTo::Hgp3, monotone } => {
            let c = parse_circuit(&read(&circuit)?).context("circuit")?;
            print!("{}", circuit_to_hgp3(&c, monotone)?);
        }
        Command::Hgp2circuit { program } => {
            let h = parse_hgp(&read(&program)?).context("hypergraph program")?;
            print!("{}", hgp_to_np_circuit(&h));
        }
        Command::Eval { file, bits, kind } => {
            let kind = match kind {
                Some(k) => k,
                None => guess_kind(&file)?,
            };
            let x = parse_bits(&bits)?;
            let text = read(&file)?;
            let value = match kind {
                Kind::Hgp => eval_hgp(&parse_hgp(&text)?, &x)?,
                Kind::Nbp => eval_nbp(&parse_nbp(&text)?, &x)?,
                Kind::Circuit => {
                    let c = parse_circuit(&text)?;
                    // all inputs given: plain evaluation; only x: exists y
                    if x.len() == c.num_x() + c.num_y() && c.num_y() > 0 {
                        c.eval(&x[..c.num_x()], &x[c.num_x()..])?
                    } else {
                        c.exists_y(&x)?
                    }
                }
            };
            println!("{}", u8::from(value));
        }
        Command::Selftest { suite, count } => {
            let cfg = RunConfig { count, ..cfg };
            return selftest(&cfg, suite);
        }
    }
    Ok(Outcome::Ok)
}

fn selftest(cfg: &RunConfig, suite: SuiteArg) -> Result<Outcome> {
    let kinds: Vec<SuiteKind> = match suite {
        SuiteArg::Rewriter => vec![SuiteKind::Rewriter],
        SuiteArg::Encoder => vec![SuiteKind::Encoder],
        SuiteArg::Translators => vec![SuiteKind::Translators],
        SuiteArg::All => SuiteKind::ALL.to_vec(),
    };
    let suite_cfg = cfg.suite();
    let reports: Vec<SuiteReport> = kinds.iter().map(|&k| run_suite(k, &suite_cfg)).collect();
    let mut sizes = Vec::new();
    let mut failed = false;
    for r in &reports {
        print!("{r}");
        sizes.extend(r.sizes.iter().cloned());
        for f in &r.failures {
            failed = true;
            let dir = cfg.out_dir.join("failures").join(&f.instance);
            for (name, text) in &f.files {
                write(&dir, name, text)?;
            }
        }
    }
    let csv = write(&cfg.out_dir, "sizes.csv", &sizes_csv(&sizes))?;
    println!("sizes written to {}", csv.display());
    if failed {
        println!("counterexamples written to {}", cfg.out_dir.join("failures").display());
        Ok(Outcome::VerificationFailed)
    } else {
        Ok(Outcome::Ok)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
