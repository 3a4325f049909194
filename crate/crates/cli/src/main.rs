use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wlcc_core::acceptance::run_all;
use wlcc_core::census::{census16_to_dir, shrikhande_rook_pair};
use wlcc_core::closure::{closure_of_graph, wl2_equivalent};
use wlcc_core::generators::{
    cyclic_pls, fano, mobius_kantor, pappus, pls_to_config, skew_config, t16, PartialLinearSpace, SimpleGraph,
};
use wlcc_core::oracle::graph_iso;
use wlcc_core::reduction::{decide_amenable, decide_separable_traced, Amenability, Separability};
use wlcc_core::structure::{check_irredundant, classify_cell, classify_interspace, dcc};
use wlcc_core::{verify_coherence, CoherentConfiguration, ColoredSquareMatrix, Error, Rainbow};

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "wlcc", version, about = "WL2 closure, separability and amenability for fibers of size <= 4")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coherent closure of a colored graph.
    Close {
        /// Input `.ccm` file (`-` or omitted reads stdin).
        input: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cell and interspace taxonomy of a coherent configuration.
    Classify { input: Option<PathBuf> },
    /// Separability of a coherent configuration.
    Separable { input: Option<PathBuf> },
    /// Whether WL2 identifies a colored graph of color multiplicity <= 4.
    Amenable {
        input: Option<PathBuf>,
        /// Write the WL2-equivalent non-isomorphic companion here.
        #[arg(long)]
        companion: Option<PathBuf>,
    },
    /// WL2 equivalence of two colored graphs.
    Equiv { a: PathBuf, b: PathBuf },
    /// Isomorphism of two colored graphs (backtracking oracle).
    Iso {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        ignore_vertex_colors: bool,
    },
    /// Generate an instance.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Output file (a directory for `shrikhande-rook`); stdout when omitted.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
    },
    /// The 436 non-amenable graphs on 16 vertices.
    Census16 {
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the acceptance suite.
    Selftest,
}

#[derive(Subcommand)]
enum Family {
    /// Skew-connected configuration over a graph in edge-list format.
    Cfi { graph: PathBuf },
    /// Cyclic (n_3)-configuration with lines {i, i+2, i+3}.
    Cyclic { n: usize },
    Fano,
    Mk,
    Pappus,
    T16,
    /// Configuration of a partial linear space in `.pls` format.
    Pls { input: PathBuf },
    ShrikhandeRook,
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Failure { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_INPUT, msg: e.to_string() }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn read_input(path: Option<&Path>) -> io::Result<String> {
    match path {
        Some(p) if p != Path::new("-") => fs::read_to_string(p),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn read_graph(path: Option<&Path>) -> std::result::Result<ColoredSquareMatrix, Failure> {
    let text = read_input(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        msg: format!("{}: {e}", path.map_or("<stdin>".into(), |p| p.display().to_string())),
    })?;
    Ok(ColoredSquareMatrix::parse_ccm(&text)?)
}

fn read_config(path: Option<&Path>) -> std::result::Result<CoherentConfiguration, Failure> {
    let m = read_graph(path)?;
    Ok(verify_coherence(&Rainbow::new(m)?)?)
}

fn emit(out: &mut impl Write, text: &str, path: Option<&Path>) -> Outcome {
    match path {
        Some(p) => fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn close(out: &mut impl Write, input: Option<&Path>, output: Option<&Path>) -> Outcome {
    let g = read_graph(input)?;
    let cl = closure_of_graph(&g)?;
    let c = &cl.config;
    let sizes: Vec<String> = c.fibers().iter().map(|f| f.len().to_string()).collect();
    match output {
        Some(p) => {
            fs::write(p, c.matrix().to_ccm())?;
            writeln!(out, "rounds {}", cl.rounds)?;
            writeln!(out, "fibers {}", sizes.join(" "))?;
        }
        None => {
            eprintln!("rounds {}", cl.rounds);
            eprintln!("fibers {}", sizes.join(" "));
            out.write_all(c.matrix().to_ccm().as_bytes())?;
        }
    }
    Ok(())
}

fn classify(out: &mut impl Write, input: Option<&Path>) -> Outcome {
    let c = read_config(input)?;
    writeln!(out, "fiber\tsize\tcell")?;
    for x in 0..c.num_fibers() {
        writeln!(out, "{x}\t{}\t{}", c.fiber(x).len(), classify_cell(&c, x)?)?;
    }
    writeln!(out, "x\ty\tinterspace\tmatching")?;
    for x in 0..c.num_fibers() {
        for y in x + 1..c.num_fibers() {
            let ic = classify_interspace(&c, x, y)?;
            writeln!(out, "{x}\t{y}\t{}\t{}", ic.tag, if ic.contains_matching { "yes" } else { "no" })?;
        }
    }
    match check_irredundant(&c) {
        Ok(()) => writeln!(out, "irredundant yes")?,
        Err(r) => writeln!(out, "irredundant no ({r})")?,
    }
    Ok(())
}

fn separable(out: &mut impl Write, input: Option<&Path>) -> Outcome {
    let c = read_config(input)?;
    let (verdict, red) = decide_separable_traced(&c)?;
    match &verdict {
        Separability::Separable => writeln!(out, "SEPARABLE")?,
        Separability::NonSeparable(w) => {
            writeln!(out, "NON-SEPARABLE")?;
            let comp = &w.component;
            let h = dcc(&comp.config)?;
            let name = |x: usize| comp.points[comp.config.fiber(x)[0]];
            let members: Vec<String> = h.hyperedges[w.hyperedge].iter().map(|&x| name(x).to_string()).collect();
            writeln!(out, "witness fiber {} hyperedge {}", name(w.fiber), members.join(" "))?;
        }
    }
    for step in &red.trace {
        writeln!(out, "trace {step}")?;
    }
    Ok(())
}

fn amenable(out: &mut impl Write, input: Option<&Path>, companion: Option<&Path>) -> Outcome {
    let g = read_graph(input)?;
    match decide_amenable(&g)? {
        Amenability::Amenable => writeln!(out, "AMENABLE")?,
        Amenability::NonAmenable(h) => {
            writeln!(out, "NON-AMENABLE")?;
            if let Some(p) = companion {
                fs::write(p, h.to_ccm())?;
            }
        }
    }
    Ok(())
}

fn equiv(out: &mut impl Write, a: &Path, b: &Path) -> Outcome {
    let (g, h) = (read_graph(Some(a))?, read_graph(Some(b))?);
    match wl2_equivalent(&g, &h)? {
        Some(w) => writeln!(out, "EQUIVALENT rounds {}", w.rounds)?,
        None => writeln!(out, "NOT-EQUIVALENT")?,
    }
    Ok(())
}

fn iso(out: &mut impl Write, a: &Path, b: &Path, ignore_vertex_colors: bool) -> Outcome {
    let (g, h) = (read_graph(Some(a))?, read_graph(Some(b))?);
    match graph_iso(&g, &h, !ignore_vertex_colors)? {
        Some(phi) => {
            let img: Vec<String> = phi.forward().iter().map(usize::to_string).collect();
            writeln!(out, "ISOMORPHIC {}", img.join(" "))?;
        }
        None => writeln!(out, "NON-ISOMORPHIC")?,
    }
    Ok(())
}

fn generate(out: &mut impl Write, family: &Family, output: Option<&Path>) -> Outcome {
    let pls = |d: &PartialLinearSpace| pls_to_config(d, &BTreeMap::new());
    let config = match family {
        Family::Cfi { graph } => skew_config(&SimpleGraph::parse(&fs::read_to_string(graph)?)?)?,
        Family::Cyclic { n } => pls(&cyclic_pls(*n)?)?,
        Family::Fano => pls(&fano())?,
        Family::Mk => pls(&mobius_kantor())?,
        Family::Pappus => pls(&pappus())?,
        Family::T16 => t16(),
        Family::Pls { input } => pls(&PartialLinearSpace::parse(&fs::read_to_string(input)?)?)?,
        Family::ShrikhandeRook => {
            let p = shrikhande_rook_pair();
            return match output {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    fs::write(dir.join("shrikhande.ccm"), p.shrikhande.to_ccm())?;
                    fs::write(dir.join("rook.ccm"), p.rook.to_ccm())?;
                    Ok(())
                }
                None => emit(out, &format!("{}{}", p.shrikhande.to_ccm(), p.rook.to_ccm()), None),
            };
        }
    };
    emit(out, &config.matrix().to_ccm(), output)
}

fn census(out: &mut impl Write, dir: &Path) -> Outcome {
    let report = census16_to_dir(dir)?;
    writeln!(out, "classes {}", report.classes())?;
    writeln!(out, "graphs {}", report.graphs())?;
    Ok(())
}

fn selftest(out: &mut impl Write) -> Outcome {
    let results = run_all();
    for r in &results {
        writeln!(out, "{r}")?;
    }
    if results.iter().all(|r| r.passed) {
        Ok(())
    } else {
        Err(Failure { code: EXIT_INTERNAL, msg: "acceptance suite failed".into() })
    }
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(v) = std::env::var("WLCC_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Failure { code: EXIT_USAGE, msg: format!("WLCC_THREADS must be a number, got {v:?}") })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure { code: EXIT_INTERNAL, msg: e.to_string() })
}

fn run(cli: Cli) -> Outcome {
    configure_threads()?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match &cli.command {
        Command::Close { input, output } => close(&mut out, input.as_deref(), output.as_deref()),
        Command::Classify { input } => classify(&mut out, input.as_deref()),
        Command::Separable { input } => separable(&mut out, input.as_deref()),
        Command::Amenable { input, companion } => amenable(&mut out, input.as_deref(), companion.as_deref()),
        Command::Equiv { a, b } => equiv(&mut out, a, b),
        Command::Iso { a, b, ignore_vertex_colors } => iso(&mut out, a, b, *ignore_vertex_colors),
        Command::Gen { family, output } => generate(&mut out, family, output.as_deref()),
        Command::Census16 { out: dir } => census(&mut out, dir),
        Command::Selftest => selftest(&mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("wlcc: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
