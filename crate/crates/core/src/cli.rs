//! Command-line front end. `run` is pure apart from reading files and the
//! supplied stdin, so it can be driven from tests.

use std::collections::BTreeSet;
use std::io::Read;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::construct::{
    construct_network, is_displayed, line_tree_from_permutation, one_component_network,
    permutation_from_line_tree, DEFAULT_DISPLAY_BUDGET,
};
use crate::error::{Error, Result};
use crate::golden::golden_checks;
use crate::instance::InstanceFile;
use crate::lts::{lineage_taxon_strings, LtsMap, Ordering};
use crate::newick::{parse_extended_newick, parse_newick};
use crate::reduction::{encode_2scs, end_to_end_tcn_instance, verify_equivalence, TwoScsInstance};
use crate::scs::{ScsMode, ScsOptions, DEFAULT_STATE_BUDGET};
use crate::solver::{assemble_supersequence, solve_line_trees_fast, solve_min_tcn, SolveReport, SolverOptions, DEFAULT_MAX_TAXA};
use crate::taxon::{parse_word, render_word, Taxon, TaxonSet, Word, DEFAULT_RESERVED_NAME};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandResult {
    fn ok(stdout: String) -> Self {
        CommandResult { exit_code: 0, stdout, stderr: String::new() }
    }
}

#[derive(Parser, Debug)]
#[command(name = "tcn", version, about = "Tree-child networks from shortest common supersequences")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    /// Name of the reserved extra leaf.
    #[arg(long, global = true, default_value = DEFAULT_RESERVED_NAME)]
    ell: String,
    /// State budget of the exact SCS solver.
    #[arg(long, global = true, default_value_t = DEFAULT_STATE_BUDGET)]
    scs_states: usize,
    /// Budget on embeddings tried by the display checker.
    #[arg(long, global = true, default_value_t = DEFAULT_DISPLAY_BUDGET)]
    display_budget: usize,
    /// Largest taxon count for which all orderings are enumerated.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_TAXA)]
    max_taxa: usize,
    /// Use majority merge instead of exact SCS.
    #[arg(long, global = true)]
    heuristic: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Line tree of a permutation.
    P2t { permutation: String },
    /// Permutation of a line tree.
    T2p { newick: String },
    /// One-component network of a string.
    Nq {
        q: String,
        /// Comma-separated symbols; defaults to those occurring in Q.
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Lineage taxon strings of a tree under an ordering.
    Lts {
        newick: String,
        #[arg(long)]
        order: String,
    },
    /// Shortest common supersequence of strings.
    Scs {
        strings: Vec<String>,
        /// Instance file with a `strings` key (`-` for stdin).
        #[arg(long)]
        instance: Option<String>,
    },
    /// Network from an ordering and per-taxon strings (`--beta a=ecb`).
    Construct {
        #[arg(long)]
        order: String,
        #[arg(long = "beta")]
        betas: Vec<String>,
    },
    /// Whether a tree is displayed in a network.
    CheckDisplay { tree: String, network: String },
    /// Minimum tree-child network over all orderings.
    Solve { instance: String },
    /// Optimal network for line trees sharing their lowest leaf.
    SolveFast { instance: String },
    /// Common supersequence assembled from LTSs under an ordering.
    AssembleQ {
        instance: String,
        #[arg(long)]
        order: String,
    },
    /// Encode a 2-SCS instance as a permutation SCS instance.
    Reduce { instance: String },
    /// Decide a small 2-SCS instance on both sides of the encoding.
    VerifyReduction { instance: String },
    /// Line trees and reticulation target for a 2-SCS instance.
    HardnessInstance { instance: String },
    /// Check the built-in worked examples.
    Selftest,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Capacity(_) => 3,
        Error::Conditions(_)
        | Error::WrongCase(_)
        | Error::NotInImage(_)
        | Error::NotLineTreeProfile(_)
        | Error::InvalidWitness(_)
        | Error::Invariant(_) => 1,
        _ => 2,
    }
}

pub fn run<I, T>(argv: I, stdin: &mut dyn Read) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                CommandResult::ok(text)
            } else {
                CommandResult { exit_code: code, stdout: String::new(), stderr: text }
            };
        }
    };
    match dispatch(&cli, stdin) {
        Ok(r) => r,
        Err(e) => CommandResult {
            exit_code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

impl Global {
    fn ell(&self) -> Result<Taxon> {
        Taxon::new(&self.ell)
    }

    fn scs(&self) -> ScsOptions {
        ScsOptions {
            mode: if self.heuristic { ScsMode::Heuristic } else { ScsMode::Exact },
            state_budget: self.scs_states,
        }
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions {
            scs: self.scs(),
            display_budget: self.display_budget,
            max_taxa: self.max_taxa,
            ..SolverOptions::default()
        }
    }

    fn emit(&self, plain: String, value: Value) -> CommandResult {
        if self.json {
            CommandResult::ok(format!("{}\n", serde_json::to_string_pretty(&value).expect("json")))
        } else {
            CommandResult::ok(plain)
        }
    }
}

fn read_instance(path: &str, stdin: &mut dyn Read) -> Result<InstanceFile> {
    let mut text = String::new();
    if path == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| Error::InvalidInput(format!("reading stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("reading {path}: {e}")))?;
    }
    InstanceFile::from_json(&text)
}

fn parse_ordering(text: &str) -> Result<Ordering> {
    Ordering::new(parse_word(text, None)?)
}

fn lts_json(map: &LtsMap, ord: &Ordering) -> Value {
    let obj: serde_json::Map<String, Value> = ord
        .taxa()
        .iter()
        .map(|t| (t.to_string(), json!(map.get(t).map(|w| render_word(w)).unwrap_or_default())))
        .collect();
    Value::Object(obj)
}

fn report_out(g: &Global, r: &SolveReport) -> CommandResult {
    let plain = format!(
        "hn {}\nordering {}\nnetwork {}\n",
        r.hn,
        r.best_ordering,
        r.network.canonical_form()
    );
    g.emit(plain, r.to_json())
}

fn two_scs(inst: &InstanceFile) -> Result<TwoScsInstance> {
    let budget = inst
        .budget
        .ok_or_else(|| Error::InvalidInput("instance has no budget".into()))?;
    if inst.strings.is_none() {
        return Err(Error::InvalidInput("instance has no strings".into()));
    }
    TwoScsInstance::new(inst.taxon_set()?.members().to_vec(), inst.parsed_strings()?, budget)
}

fn word_json(w: &[Taxon]) -> Value {
    json!(render_word(w))
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<CommandResult> {
    let g = &cli.global;
    Ok(match &cli.command {
        Command::P2t { permutation } => {
            let p = parse_word(permutation, None)?;
            let nw = line_tree_from_permutation(&p, &g.ell()?)?.canonical_form();
            g.emit(format!("{nw}\n"), json!({ "permutation": render_word(&p), "newick": nw }))
        }
        Command::T2p { newick } => {
            let p = permutation_from_line_tree(&parse_newick(newick)?, &g.ell()?)?;
            g.emit(format!("{}\n", render_word(&p)), json!({ "permutation": render_word(&p), "newick": newick }))
        }
        Command::Nq { q, alphabet } => {
            let ell = g.ell()?;
            let sigma: Vec<Taxon> = match alphabet {
                Some(a) => parse_word(a, None)?,
                None => parse_word(q, None)?.into_iter().collect::<BTreeSet<_>>().into_iter().collect(),
            };
            let set = TaxonSet::with_reserved(&sigma, ell)?;
            let word = parse_word(q, Some(&set))?;
            let net = one_component_network(&word, &set)?;
            let nw = net.canonical_form();
            g.emit(
                format!("{nw}\n"),
                json!({ "q": render_word(&word), "network": nw, "hn": net.hybridization_number(), "tree_child": net.is_tree_child() }),
            )
        }
        Command::Lts { newick, order } => {
            let ord = parse_ordering(order)?;
            let map = lineage_taxon_strings(&parse_newick(newick)?, &ord)?;
            let plain: String = ord
                .taxa()
                .iter()
                .map(|t| format!("{t}: {}\n", render_word(&map[t])))
                .collect();
            g.emit(plain, lts_json(&map, &ord))
        }
        Command::Scs { strings, instance } => {
            let words: Vec<Word> = match instance {
                Some(path) => {
                    let inst = read_instance(path, stdin)?;
                    let mut w = inst.parsed_strings()?;
                    for s in strings {
                        w.push(parse_word(s, Some(&inst.taxon_set()?))?);
                    }
                    w
                }
                None => strings.iter().map(|s| parse_word(s, None)).collect::<Result<_>>()?,
            };
            let sol = g.scs().solve(&words)?;
            g.emit(
                format!("{}\n", render_word(&sol)),
                json!({ "scs": render_word(&sol), "length": sol.len(), "exact": !g.heuristic }),
            )
        }
        Command::Construct { order, betas } => {
            let ord = parse_ordering(order)?;
            let set = TaxonSet::new(ord.taxa().to_vec(), None)?;
            let mut map = LtsMap::new();
            for b in betas {
                let (t, s) = b
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidInput(format!("expected taxon=string, got {b:?}")))?;
                let t = Taxon::new(t)?;
                if map.insert(t.clone(), parse_word(s, Some(&set))?).is_some() {
                    return Err(Error::InvalidInput(format!("string for {t} given twice")));
                }
            }
            for t in ord.taxa() {
                map.entry(t.clone()).or_default();
            }
            let net = construct_network(&ord, &map)?;
            let nw = net.canonical_form();
            g.emit(format!("{nw}\n"), json!({ "network": nw, "hn": net.hybridization_number() }))
        }
        Command::CheckDisplay { tree, network } => {
            let shown = is_displayed(&parse_newick(tree)?, &parse_extended_newick(network)?, g.display_budget)?;
            let mut r = g.emit(
                format!("{}\n", if shown { "displayed" } else { "not displayed" }),
                json!({ "displayed": shown }),
            );
            r.exit_code = if shown { 0 } else { 1 };
            r
        }
        Command::Solve { instance } => {
            let inst = read_instance(instance, stdin)?;
            report_out(g, &solve_min_tcn(&inst.parsed_trees()?, &g.solver())?)
        }
        Command::SolveFast { instance } => {
            let inst = read_instance(instance, stdin)?;
            let reserved = inst.reserved.as_deref().map(Taxon::new).transpose()?;
            report_out(g, &solve_line_trees_fast(&inst.parsed_trees()?, reserved.as_ref(), &g.solver())?)
        }
        Command::AssembleQ { instance, order } => {
            let inst = read_instance(instance, stdin)?;
            let ell = match &inst.reserved {
                Some(r) => Taxon::new(r)?,
                None => g.ell()?,
            };
            let ord = parse_ordering(order)?;
            let q = assemble_supersequence(&inst.parsed_trees()?, &ord, &ell, &g.scs())?;
            g.emit(format!("{}\n", render_word(&q)), json!({ "q": render_word(&q), "length": q.len() }))
        }
        Command::Reduce { instance } => {
            let enc = encode_2scs(&two_scs(&read_instance(instance, stdin)?)?)?;
            let set = TaxonSet::new(enc.alphabet(), None)?;
            CommandResult::ok(InstanceFile::with_strings(&set, &enc.permutations, Some(enc.budget)).to_json())
        }
        Command::VerifyReduction { instance } => {
            let r = verify_equivalence(&two_scs(&read_instance(instance, stdin)?)?)?;
            let agree = r.agree();
            let value = json!({
                "agree": agree,
                "source_budget": r.source_budget,
                "source_scs": word_json(&r.source_scs),
                "source_feasible": r.source_feasible,
                "encoded_scs_length": r.encoded_scs_len,
                "encoded_budget": r.encoded_budget,
                "encoded_feasible": r.encoded_feasible,
                "forward_roundtrip": r.forward_roundtrip.as_deref().map(word_json),
                "decoded": r.decoded.as_deref().map(word_json),
            });
            let plain = format!(
                "source scs {} (length {}, budget {}, feasible {})\nencoded scs length {} (budget {}, feasible {})\n{}\n",
                render_word(&r.source_scs),
                r.source_scs.len(),
                r.source_budget,
                r.source_feasible,
                r.encoded_scs_len,
                r.encoded_budget,
                r.encoded_feasible,
                if agree { "agree" } else { "disagree" }
            );
            let mut out = g.emit(plain, value);
            out.exit_code = if agree { 0 } else { 1 };
            out
        }
        Command::HardnessInstance { instance } => {
            let h = end_to_end_tcn_instance(&two_scs(&read_instance(instance, stdin)?)?, &g.ell()?)?;
            let set = TaxonSet::with_reserved(&h.encoded.alphabet(), h.reserved.clone())?;
            let mut file = InstanceFile::with_trees(&set, &h.trees);
            file.budget = Some(h.target);
            CommandResult::ok(file.to_json())
        }
        Command::Selftest => {
            let checks = golden_checks();
            let all = checks.iter().all(|c| c.passed);
            let plain: String = checks
                .iter()
                .map(|c| format!("{} {} ({})\n", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
                .collect();
            let value = json!(checks
                .iter()
                .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                .collect::<Vec<_>>());
            let mut out = g.emit(plain, value);
            out.exit_code = if all { 0 } else { 1 };
            out
        }
    })
}
