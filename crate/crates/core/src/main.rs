use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use mealy::census::{ground_truth_budget, run_census, CensusConfig, Filter};
use mealy::criteria::{decide, derivations, DecideConfig, Decision, RuleSet};
use mealy::dot::{helix_to_dot, machine_to_dot, power_to_dot};
use mealy::fixtures::{fixture, fixture_names, random_machines, RandomKind, DEFAULT_SEED};
use mealy::helix::{cycle_lengths, cycle_profile, helix_graph, is_union_of_cycles};
use mealy::minimize::{md_reduce, minimize, Side};
use mealy::semigroup::{enumerate_order, growth_series, Budget, Mode};
use mealy::transform::{dual, inverse, power};
use mealy::{classify, Error, MealyMachine};

const EXIT_PARSE: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_RESOURCE: u8 = 4;
const EXIT_UNKNOWN: u8 = 5;

#[derive(Parser)]
#[command(name = "mealy", version, about = "Finiteness of semigroups generated by Mealy automata")]
struct Cli {
    /// Worker threads for censuses and enumerations (results do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Inline machine (`mealy 2 2 : ...` or JSON), fixture name, or file path (`-` reads standard input).
    input: String,

    /// Print machines as JSON instead of the compact format.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Semigroup,
    Group,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Any,
    Invertible,
    Bireversible,
}

#[derive(Subcommand)]
enum Command {
    /// Invertible, reversible, IR and bireversible flags.
    Classify(Input),
    /// Exchange the roles of states and letters.
    Dual(Input),
    /// Inverse machine of an invertible machine.
    Inverse(Input),
    /// Merge states with equal production functions.
    Minimize(Input),
    /// Alternate minimization of the machine and its dual.
    Reduce(Input),
    /// Helix graph of order (n, k), or a cycle profile of the extension.
    Helix {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// CSV cycle profile for all orders up to (K, L).
        #[arg(long, num_args = 2, value_names = ["K", "L"])]
        profile: Option<Vec<usize>>,
    },
    /// Order of the generated semigroup or group by breadth-first closure.
    Order {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "semigroup")]
        mode: ModeArg,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// Also print the number of elements of each word length up to N.
        #[arg(long, value_name = "N")]
        growth: Option<usize>,
    },
    /// Decide finiteness with the criteria and print the derivation.
    Decide {
        #[command(flatten)]
        input: Input,
        /// Comma-separated rules; `all`, `previous`, `new` name groups, `bfs` adds enumeration.
        #[arg(long, default_value = "all,bfs")]
        rules: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        /// List every derivation instead of the first.
        #[arg(long)]
        all: bool,
        /// Exit with a distinct status when the verdict is unknown.
        #[arg(long)]
        require_decision: bool,
    },
    /// Census of all classes of q-state p-letter machines.
    Census {
        /// Number of states.
        #[arg(long)]
        q: usize,
        /// Number of letters.
        #[arg(long)]
        p: usize,
        /// `all`, `invertible`, `reversible` or `inv_or_rev`.
        #[arg(long, default_value = "all")]
        filter: String,
        /// Comma-separated rules, as for `decide`.
        #[arg(long, default_value = "all")]
        rules: String,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Also run a BFS enumeration with this element budget on every class.
        #[arg(long, value_name = "BUDGET")]
        ground_truth: Option<usize>,
        /// Write CSV here instead of printing a table.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print CSV to standard output.
        #[arg(long)]
        csv: bool,
    },
    /// List fixtures, or print one.
    Fixture {
        name: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Graphviz export of a machine, a power automaton or a helix graph.
    Dot {
        #[command(flatten)]
        input: Input,
        /// Export the power automaton on state words of length N.
        #[arg(long, value_name = "N")]
        power: Option<usize>,
        /// Export the helix graph of order (N, K).
        #[arg(long, num_args = 2, value_names = ["N", "K"])]
        helix: Option<Vec<usize>>,
    },
    /// Random machines from a seeded generator.
    Random {
        /// Number of states.
        #[arg(long)]
        q: usize,
        /// Number of letters.
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "any")]
        kind: KindArg,
        #[arg(long)]
        json: bool,
    },
}

enum Failure {
    Lib(Error),
    Io(String),
    Unknown,
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read_input(spec: &str) -> Result<MealyMachine, Failure> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with("mealy") || trimmed.starts_with('{') {
        return Ok(MealyMachine::parse_any(spec)?);
    }
    if spec == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(e.to_string()))?;
        return Ok(MealyMachine::parse_any(&s)?);
    }
    if Path::new(spec).is_file() {
        let s = std::fs::read_to_string(spec).map_err(|e| Failure::Io(format!("{spec}: {e}")))?;
        return Ok(MealyMachine::parse_any(&s)?);
    }
    Ok(fixture(spec)?)
}

fn show(m: &MealyMachine, json: bool) -> String {
    if json {
        m.to_json()
    } else {
        m.to_string()
    }
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Semigroup => Mode::Semigroup,
        ModeArg::Group => Mode::Group,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Classify(i) => {
            let f = classify(&read_input(&i.input)?);
            if i.json {
                println!("{}", serde_json::to_string(&f).expect("flags serialize"));
            } else {
                println!("invertible {}", f.invertible);
                println!("reversible {}", f.reversible);
                println!("ir {}", f.ir);
                println!("bireversible {}", f.bireversible);
            }
        }
        Command::Dual(i) => println!("{}", show(&dual(&read_input(&i.input)?), i.json)),
        Command::Inverse(i) => println!("{}", show(&inverse(&read_input(&i.input)?)?, i.json)),
        Command::Minimize(i) => println!("{}", show(&minimize(&read_input(&i.input)?), i.json)),
        Command::Reduce(i) => {
            let (r, trace) = md_reduce(&read_input(&i.input)?);
            for s in &trace.steps {
                let side = match s.side {
                    Side::Primal => "minimize",
                    Side::Dual => "minimize dual",
                };
                println!("{side}: ({}, {}) -> ({}, {})", s.before.0, s.before.1, s.after.0, s.after.1);
            }
            println!("{}", show(&r, i.json));
        }
        Command::Helix { input, n, k, profile } => {
            let m = read_input(&input.input)?;
            if let Some(pr) = profile {
                print!("{}", cycle_profile(&m, pr[0], pr[1])?.to_csv());
            } else {
                let h = helix_graph(&m, n, k)?;
                let cycles = is_union_of_cycles(&h);
                println!("nodes {}", h.node_count());
                println!("union_of_cycles {cycles}");
                if cycles {
                    let lens = cycle_lengths(&h)?;
                    let lens: Vec<String> = lens.iter().map(usize::to_string).collect();
                    println!("cycle_lengths {}", lens.join(" "));
                }
            }
        }
        Command::Order { input, mode: md, budget, growth } => {
            let m = read_input(&input.input)?;
            if let Some(n) = growth {
                let g: Vec<String> = growth_series(&m, n).iter().map(usize::to_string).collect();
                println!("growth {}", g.join(" "));
            }
            let r = enumerate_order(&m, mode(md), Budget::elements(budget))?;
            match r.order {
                Some(order) => println!("{order}"),
                None => return Err(Failure::Budget(format!("budget exceeded after {} elements", r.elements_seen))),
            }
        }
        Command::Decide { input, rules, depth, budget, all, require_decision } => {
            let m = read_input(&input.input)?;
            let config = DecideConfig { rules: rules.parse()?, depth, budget: Budget::elements(budget) };
            let decision = if all {
                let ds = derivations(&m, &config);
                if input.json {
                    println!("{}", serde_json::to_string_pretty(&ds).expect("derivations serialize"));
                } else {
                    for d in &ds {
                        println!("{}\t{d}", d.decision);
                    }
                }
                ds.first().map_or(Decision::Unknown, |d| d.decision)
            } else {
                let v = decide(&m, &config);
                if input.json {
                    println!("{}", v.to_json());
                } else {
                    println!("{}", v.decision);
                    if let Some(d) = &v.derivation {
                        println!("{d}");
                    }
                }
                v.decision
            };
            if require_decision && decision == Decision::Unknown {
                return Err(Failure::Unknown);
            }
        }
        Command::Census { q, p, filter, rules, depth, ground_truth, out, csv } => {
            let filter: Filter = filter.parse()?;
            let rules: RuleSet = rules.parse()?;
            let config = CensusConfig {
                decide: DecideConfig { rules, depth, ..DecideConfig::default() },
                ground_truth: ground_truth.map(ground_truth_budget),
            };
            let report = run_census(q, p, filter, &config)?;
            match out {
                Some(path) => std::fs::write(&path, report.to_csv())
                    .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
                None if csv => print!("{}", report.to_csv()),
                None => print!("{}", report.to_table()),
            }
        }
        Command::Fixture { name, json } => match name {
            Some(name) => println!("{}", show(&fixture(&name)?, json)),
            None => {
                for name in fixture_names() {
                    println!("{name}");
                }
            }
        },
        Command::Dot { input, power: pw, helix } => {
            let m = read_input(&input.input)?;
            let name = input.input.trim();
            let name = if name.starts_with("mealy") || name.starts_with('{') { "machine" } else { name };
            if let Some(h) = helix {
                print!("{}", helix_to_dot(&helix_graph(&m, h[0], h[1])?, name));
            } else if let Some(n) = pw {
                print!("{}", power_to_dot(&power(&m, n, 1)?, n, name));
            } else {
                print!("{}", machine_to_dot(&m, name));
            }
        }
        Command::Random { q, p, count, seed, kind, json } => {
            let kind = match kind {
                KindArg::Any => RandomKind::Any,
                KindArg::Invertible => RandomKind::Invertible,
                KindArg::Bireversible => RandomKind::Bireversible,
            };
            for m in random_machines(q, p, kind, count, seed)? {
                println!("{}", show(&m, json));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let code = match &f {
                // an unresolvable input is treated like malformed input
                Failure::Lib(Error::UnknownFixture(_)) => EXIT_PARSE,
                Failure::Lib(e) if e.is_precondition() => EXIT_PRECONDITION,
                Failure::Lib(Error::SizeLimit { .. }) => EXIT_RESOURCE,
                Failure::Lib(_) | Failure::Io(_) => EXIT_PARSE,
                Failure::Budget(_) => EXIT_RESOURCE,
                Failure::Unknown => EXIT_UNKNOWN,
            };
            match f {
                Failure::Lib(e) => eprintln!("error: {e}"),
                Failure::Io(e) => eprintln!("error: {e}"),
                Failure::Budget(e) => eprintln!("error: {e}"),
                Failure::Unknown => eprintln!("error: no decision reached"),
            }
            ExitCode::from(code)
        }
    }
}
