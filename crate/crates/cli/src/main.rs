//! `branchlab`: command-line access to the tree-group engine.

mod output;

use std::path::Path;
use std::process::ExitCode;

use branchlab::ball::Ball;
use branchlab::diag::{
    char_interval, char_sum_check, component_tower, distinctness_search, orbits, r_invariance_check, r_invariant,
    symmetrization_identity_check,
};
use branchlab::dsl::{self, ParseError};
use branchlab::nonfree::{anf_construct, lemma_brute_force, lemma_subsets_verify, tnf_certificate, verify_anf, verify_tnf};
use branchlab::rational::serialize_q;
use branchlab::{catalog, Alphabet, Automorphism, Error, GroupDef, Vertex, DEFAULT_BUDGET, Q};
use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use output::{cell, Format, Report};

#[derive(Parser)]
#[command(name = "branchlab", version, about = "Exact computation with groups acting on rooted trees")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Maximum number of states in a section closure.
    #[arg(long, global = true, env = "BRANCHLAB_BUDGET", default_value_t = DEFAULT_BUDGET, value_parser = positive)]
    budget: usize,
    /// Seed for randomized sweeps; echoed in the output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GroupArg {
    /// Catalog name or path to a `.grp` file.
    #[arg(long, default_value = "grigorchuk")]
    group: String,
}

#[derive(Args, Clone)]
struct ElementArg {
    #[command(flatten)]
    group: GroupArg,
    /// Word in the generators, e.g. `a*b^-1*c` or `abac`.
    #[arg(long)]
    element: String,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in groups or show one in `.grp` form.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Minimal automaton of an element, and its image of a vertex.
    Eval {
        #[command(flatten)]
        el: ElementArg,
        #[arg(long)]
        vertex: Option<String>,
    },
    /// Section of an element at a vertex.
    Section {
        #[command(flatten)]
        el: ElementArg,
        #[arg(long)]
        vertex: String,
    },
    /// Decides whether an element is the identity.
    Trivial {
        #[command(flatten)]
        el: ElementArg,
    },
    /// Exact measure of the fixed-point set with level bounds.
    FixMeasure {
        #[command(flatten)]
        el: ElementArg,
        /// Deepest level for the `m_k` bounds.
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
    /// Character value, or with `--component` the interval of one component.
    Char {
        #[command(flatten)]
        el: ElementArg,
        #[arg(long, requires_all = ["n", "level", "depth"])]
        component: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        level: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Gram matrix of character values and its semidefiniteness.
    PsdCheck {
        #[command(flatten)]
        group: GroupArg,
        /// Comma-separated words.
        #[arg(long, value_delimiter = ',', conflicts_with = "random")]
        elements: Vec<String>,
        /// Draw this many words from the ball instead.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 6)]
        radius: usize,
    },
    /// Separating certificate for the level-`k` vertices.
    TnfCert {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 6)]
        radius: usize,
    },
    /// Element whose support approximates a union of cylinders.
    Anf {
        #[command(flatten)]
        group: GroupArg,
        /// Comma-separated cylinder vertices; an empty item is the root.
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<String>,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 5)]
        radius: usize,
        #[arg(long, default_value_t = 8)]
        max_rounds: usize,
    },
    /// Exhaustive check of the subset lemma in symmetric groups.
    LemmaCheck {
        #[arg(long)]
        n_max: usize,
        /// Also run the direct search over generator pairs (degree at most 4).
        #[arg(long)]
        brute_force: bool,
    },
    /// Orbits on distinct unordered `n`-tuples of a level.
    Orbits {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: usize,
    },
    /// Components of the diagonal action, optionally as a tower over levels.
    Components {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        tower: bool,
    },
    /// Character intervals of every component at one level.
    CharInterval {
        #[command(flatten)]
        el: ElementArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        depth: usize,
    },
    /// Separates components by disjoint character intervals.
    Separate {
        #[command(flatten)]
        group: GroupArg,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        level: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
    /// Symmetrization identity for disjoint vertex sets.
    SymCheck {
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long)]
        level: usize,
        /// Sets separated by `;`, vertices by `,`: `00,01;10`.
        #[arg(long)]
        sets: String,
    },
    /// Invariance of `r` under the switch group, or `r` of one tuple.
    RInvariant {
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Comma-separated binary vertices; prints their `r` only.
        #[arg(long)]
        tuple: Option<String>,
    },
    /// Parses a `.grp` file and prints it back in canonical form.
    Parse { path: String },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Catalog { action: CatalogAction::List } => "catalog list",
            Command::Catalog { action: CatalogAction::Show { .. } } => "catalog show",
            Command::Eval { .. } => "eval",
            Command::Section { .. } => "section",
            Command::Trivial { .. } => "trivial",
            Command::FixMeasure { .. } => "fix-measure",
            Command::Char { .. } => "char",
            Command::PsdCheck { .. } => "psd-check",
            Command::TnfCert { .. } => "tnf-cert",
            Command::Anf { .. } => "anf",
            Command::LemmaCheck { .. } => "lemma-check",
            Command::Orbits { .. } => "orbits",
            Command::Components { .. } => "components",
            Command::CharInterval { .. } => "char-interval",
            Command::Separate { .. } => "separate",
            Command::SymCheck { .. } => "sym-check",
            Command::RInvariant { .. } => "r-invariant",
            Command::Parse { .. } => "parse",
        }
    }
}

enum Failure {
    Core(Error),
    /// A parse error in a named file.
    File(String, ParseError),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::BudgetExceeded { .. }) => 3,
            Failure::Core(Error::Stalled { .. } | Error::Verification(_)) => 1,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::File(path, e) => format!("{path}:{}:{}: {}", e.line, e.column, e.kind),
            Failure::Usage(m) => m.clone(),
        }
    }
}

type Outcome = Result<(Report, bool), Failure>;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable report")
}

fn rational(x: &Q) -> Value {
    #[derive(Serialize)]
    struct R<'a>(#[serde(serialize_with = "serialize_q")] &'a Q);
    to_value(&R(x))
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn read_grp(path: &str) -> Result<GroupDef, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
    dsl::parse(&text).map_err(|e| Failure::File(path.to_string(), e))
}

fn load_group(arg: &GroupArg) -> Result<GroupDef, Failure> {
    if arg.group.ends_with(".grp") || Path::new(&arg.group).is_file() {
        read_grp(&arg.group)
    } else {
        Ok(catalog::load(&arg.group)?.group)
    }
}

fn load_element(arg: &ElementArg) -> Result<(GroupDef, Automorphism), Failure> {
    let group = load_group(&arg.group)?;
    let g = group.parse_element(&arg.element)?;
    Ok((group, g))
}

fn parse_vertex(s: &str, alphabet: Alphabet) -> Result<Vertex, Failure> {
    Ok(Vertex::parse(s.trim(), alphabet)?)
}

fn run(cmd: &Command, budget: usize, seed: u64) -> Outcome {
    match cmd {
        Command::Catalog { action: CatalogAction::List } => {
            let entries = catalog::list();
            let rows = entries
                .iter()
                .map(|e| {
                    vec![
                        e.name.clone(),
                        e.group.degree().to_string(),
                        e.group.generators().len().to_string(),
                        e.level_transitive.to_string(),
                    ]
                })
                .collect();
            let groups: Vec<Value> = entries
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "degree": e.group.degree(),
                        "generators": e.group.generators().iter().map(|g| g.name.clone()).collect::<Vec<_>>(),
                        "level_transitive": e.level_transitive,
                        "description": e.description,
                    })
                })
                .collect();
            let report = Report::new(json!({ "groups": groups, "names": catalog::NAMES }))
                .with_table(vec!["name", "degree", "generators", "level_transitive"], rows);
            Ok((report, true))
        }
        Command::Catalog { action: CatalogAction::Show { name } } => {
            let e = catalog::load(name)?;
            let body = json!({
                "name": e.name,
                "degree": e.group.degree(),
                "level_transitive": e.level_transitive,
                "weakly_branch_evidence_depth": e.weakly_branch_evidence_depth,
                "relations": e.relations,
                "description": e.description,
                "grp": dsl::emit(&e.group),
            });
            Ok((Report::new(body), true))
        }
        Command::Eval { el, vertex } => {
            let (group, g) = load_element(el)?;
            let machine = group.minimize(&g, budget)?;
            let mut body = json!({
                "element": group.format(&g),
                "trivial": machine.is_identity(),
                "states": machine.len(),
                "automaton": machine.to_text().lines().collect::<Vec<_>>(),
            });
            if let Some(v) = vertex {
                let v = parse_vertex(v, group.alphabet())?;
                body["vertex"] = to_value(&v);
                body["image"] = to_value(&group.image(&g, &v));
            }
            Ok((Report::new(body), true))
        }
        Command::Section { el, vertex } => {
            let (group, g) = load_element(el)?;
            let v = parse_vertex(vertex, group.alphabet())?;
            let s = group.section(&g, &v);
            let body = json!({
                "element": group.format(&g),
                "vertex": v,
                "image": group.image(&g, &v),
                "section": group.format(&s),
                "section_trivial": group.is_trivial(&s, budget)?,
            });
            Ok((Report::new(body), true))
        }
        Command::Trivial { el } => {
            let (group, g) = load_element(el)?;
            let body = json!({ "element": group.format(&g), "trivial": group.is_trivial(&g, budget)? });
            Ok((Report::new(body), true))
        }
        Command::FixMeasure { el, levels } => {
            let (group, g) = load_element(el)?;
            let system = group.fix_system(&g, budget)?;
            let fix = system.fix_measure();
            let bounds: Vec<_> = (0..=*levels).map(|k| system.level_bound(k)).collect();
            let rows = bounds
                .iter()
                .map(|b| vec![b.level.to_string(), cell(&to_value(&b.lower)), cell(&to_value(&b.upper))])
                .collect();
            let body = json!({
                "element": group.format(&g),
                "fix_measure": fix,
                "supp_measure": fix.complement(),
                "level_bounds": bounds.iter().map(|b| json!([b.level, b.lower, b.upper])).collect::<Vec<_>>(),
            });
            Ok((Report::new(body).with_table(vec!["level", "lower", "upper"], rows), true))
        }
        Command::Char { el, component: None, .. } => {
            let (group, g) = load_element(el)?;
            let body = json!({ "element": group.format(&g), "char": group.char_value(&g, budget)? });
            Ok((Report::new(body), true))
        }
        Command::Char { el, component: Some(c), n, level, depth } => {
            let (group, g) = load_element(el)?;
            let (n, level, depth) = (n.unwrap_or(1), level.unwrap_or(0), depth.unwrap_or(0));
            let part = orbits(&group, n, level, budget)?;
            let iv = char_interval(&group, &part, *c, &g, depth, budget)?;
            let row = vec![iv.component.to_string(), iv.element.clone(), cell(&to_value(&iv.lower)), cell(&to_value(&iv.upper))];
            let report = Report::new(to_value(&iv)).with_table(vec!["component", "element", "lower", "upper"], vec![row]);
            Ok((report, true))
        }
        Command::PsdCheck { group, elements, random, radius } => {
            let group = load_group(group)?;
            let words: Vec<String> = match random {
                Some(count) => {
                    let ball: Vec<String> = Ball::new(&group, *radius).map(|w| group.format_word(&w)).collect();
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    (0..*count).map(|_| ball.choose(&mut rng).expect("ball contains the identity").clone()).collect()
                }
                None if elements.is_empty() => return Err(Failure::Usage("give --elements or --random".into())),
                None => elements.clone(),
            };
            let gs = words.iter().map(|w| group.parse_element(w)).collect::<Result<Vec<_>, _>>()?;
            let gram = group.gram_psd_check(&gs, budget)?;
            let ok = gram.psd;
            let mut body = to_value(&gram);
            body["elements"] = json!(gs.iter().map(|g| group.format(g)).collect::<Vec<_>>());
            Ok((Report::new(body), ok))
        }
        Command::TnfCert { group, level, radius } => {
            let group = load_group(group)?;
            let cert = tnf_certificate(&group, *level, *radius, budget)?;
            let verified = cert.achieved && verify_tnf(&group, &cert, budget)?;
            if cert.achieved && !verified {
                return Err(Error::Verification("certificate does not separate the level".into()).into());
            }
            let ok = cert.achieved;
            let mut body = to_value(&cert);
            body["verified"] = json!(verified);
            Ok((Report::new(body), ok))
        }
        Command::Anf { group, set, eps, radius, max_rounds } => {
            let group = load_group(group)?;
            let target = set.iter().map(|s| parse_vertex(s, group.alphabet())).collect::<Result<Vec<_>, _>>()?;
            let eps: Q = eps.trim().parse().map_err(|_| Failure::Usage(format!("bad rational `{eps}`, expected p/q")))?;
            let approx = anf_construct(&group, &target, &eps, *radius, *max_rounds, budget)?;
            if !verify_anf(&group, &approx, budget)? {
                return Err(Error::Verification("support or defect disagrees with a fresh computation".into()).into());
            }
            let ok = approx.achieved;
            let mut body = to_value(&approx);
            body["verified"] = json!(true);
            Ok((Report::new(body), ok))
        }
        Command::LemmaCheck { n_max, brute_force } => {
            let report = lemma_subsets_verify(*n_max)?;
            let mut ok = report.counterexamples.is_empty();
            let rows = report
                .cases
                .iter()
                .map(|c| vec![c.n.to_string(), c.k.to_string(), c.admissible.to_string(), c.subgroups.to_string(), c.transitive.to_string()])
                .collect();
            let mut body = to_value(&report);
            if *brute_force {
                if *n_max > 4 {
                    return Err(Failure::Usage("--brute-force supports --n-max up to 4".into()));
                }
                let direct: Vec<_> = (1..=*n_max).flat_map(lemma_brute_force).collect();
                ok &= direct.is_empty();
                body["brute_force_counterexamples"] = to_value(&direct);
            }
            Ok((Report::new(body).with_table(vec!["n", "k", "admissible", "subgroups", "transitive"], rows), ok))
        }
        Command::Orbits { group, n, level } | Command::Components { group, n, level, tower: false } => {
            let group = load_group(group)?;
            let part = orbits(&group, *n, *level, budget)?;
            let rows = part
                .orbits
                .iter()
                .map(|o| {
                    let rep: Vec<String> = o.representative.iter().map(Vertex::to_string).collect();
                    vec![o.id.to_string(), o.size.to_string(), cell(&to_value(&o.weight)), rep.join(" ")]
                })
                .collect();
            let mut body = to_value(&part);
            body["distinct_mass"] = rational(&part.distinct_mass());
            Ok((Report::new(body).with_table(vec!["id", "size", "weight", "representative"], rows), true))
        }
        Command::Components { group, n, level, tower: true } => {
            let group = load_group(group)?;
            let tower = component_tower(&group, *n, *level, budget)?;
            let consistent = tower.is_consistent();
            let rows = tower
                .levels
                .iter()
                .flat_map(|l| &l.nodes)
                .map(|c| {
                    vec![
                        c.level.to_string(),
                        c.id.to_string(),
                        c.parent.map_or_else(String::new, |p| p.to_string()),
                        c.size.to_string(),
                        cell(&to_value(&c.weight)),
                    ]
                })
                .collect();
            let mut body = to_value(&tower);
            body["consistent"] = json!(consistent);
            let report = Report::new(body).with_table(vec!["level", "id", "parent", "size", "weight"], rows);
            Ok((report, consistent))
        }
        Command::CharInterval { el, n, level, depth } => {
            let (group, g) = load_element(el)?;
            let part = orbits(&group, *n, *level, budget)?;
            let intervals = (0..part.orbits.len())
                .map(|c| char_interval(&group, &part, c, &g, *depth, budget))
                .collect::<Result<Vec<_>, _>>()?;
            let sum = char_sum_check(&group, *n, &g, *depth, budget)?;
            let rows = intervals
                .iter()
                .map(|iv| vec![iv.component.to_string(), iv.element.clone(), cell(&to_value(&iv.lower)), cell(&to_value(&iv.upper))])
                .collect();
            let ok = sum.holds;
            let body = json!({ "element": group.format(&g), "n": n, "level": level, "depth": depth, "intervals": intervals, "sum_rule": sum });
            Ok((Report::new(body).with_table(vec!["component", "element", "lower", "upper"], rows), ok))
        }
        Command::Separate { group, n_max, level, depth, radius } => {
            let group = load_group(group)?;
            let report = distinctness_search(&group, *n_max, *level, *depth, *radius, budget)?;
            let rows = report
                .pairs
                .iter()
                .map(|p| {
                    vec![
                        format!("{}:{}", p.first.n, p.first.id),
                        format!("{}:{}", p.second.n, p.second.id),
                        p.separator.clone().unwrap_or_default(),
                    ]
                })
                .collect();
            let ok = report.unresolved == 0;
            Ok((Report::new(to_value(&report)).with_table(vec!["first", "second", "separator"], rows), ok))
        }
        Command::SymCheck { degree, level, sets } => {
            let alphabet = Alphabet::new(*degree)?;
            let sets = sets
                .split(';')
                .map(|s| {
                    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| parse_vertex(t, alphabet)).collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let report = symmetrization_identity_check(alphabet, *level, &sets, budget)?;
            let ok = report.holds;
            Ok((Report::new(to_value(&report)), ok))
        }
        Command::RInvariant { tuple: Some(tuple), .. } => {
            let alphabet = Alphabet::new(2)?;
            let vs = tuple.split(',').map(|t| parse_vertex(t, alphabet)).collect::<Result<Vec<_>, _>>()?;
            let r = r_invariant(&vs)?;
            Ok((Report::new(json!({ "tuple": vs, "r": r })), true))
        }
        Command::RInvariant { j, n, tuple: None } => {
            let report = r_invariance_check(*j, *n, budget)?;
            let ok = report.invariant && report.equal_masses && report.constant_on_orbits;
            let rows = report
                .classes
                .iter()
                .map(|c| vec![c.r.clone(), c.tuples.to_string(), cell(&to_value(&c.mass))])
                .collect();
            Ok((Report::new(to_value(&report)).with_table(vec!["r", "tuples", "mass"], rows), ok))
        }
        Command::Parse { path } => {
            let group = read_grp(path)?;
            let body = json!({
                "path": path,
                "degree": group.degree(),
                "generators": group.generators().iter().map(|g| g.name.clone()).collect::<Vec<_>>(),
                "canonical": dsl::emit(&group),
            });
            Ok((Report::new(body), true))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let name = cli.command.name();
    match run(&cli.command, cli.budget, cli.seed) {
        Ok((report, ok)) => {
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = output::write(&mut stdout, name, cli.seed, cli.format, report) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("{name}: verification failed");
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
