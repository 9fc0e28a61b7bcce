//! `nilalg` command-line front end.
//!
//! Document arguments are inline JSON when they start with `[` or `{`, and
//! file paths otherwise. Results go to stdout as JSON (CSV for
//! `circle-table`); diagnostics go to stderr.
//!
//! Exit status: 0 success, 1 I/O or schema error, 2 precondition or
//! hypothesis violation, 3 negative mathematical result.

mod doc;
mod verbs;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use verbs::{CheckArgs, ChiefArgs, DivideArgs, Failure, Output, PolymapArgs};

#[derive(Parser)]
#[command(
    name = "nilalg",
    version,
    about = "Exact computations with nilpotent algebras and their quasigroups"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Solve a square system; with --affine, decide an affine system over any algebra.
    Solve {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        system: String,
        #[arg(long)]
        affine: bool,
    },
    /// Express the pivot unknowns of a full-rank system through the free ones.
    Implicit {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        system: String,
        /// Values of the free unknowns, to evaluate the parametrization.
        #[arg(long)]
        free: Option<String>,
    },
    /// Scalar Jacobian of a system at zero.
    Jacobian {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        system: String,
    },
    /// Baker-Campbell-Hausdorff product of two elements of a nilpotent Lie algebra.
    Bch {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Cayley table of an operation on a finite algebra, as CSV.
    CircleTable {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 4096)]
        limit: usize,
    },
    /// Left or right division, or a rational power with --power.
    Divide {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        op: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        c: Option<String>,
        #[arg(long, default_value = "left")]
        side: String,
        #[arg(long)]
        power: Option<String>,
    },
    /// Derived expressions for + and the product in terms of the operation.
    Reconstruct {
        #[arg(long)]
        op: String,
        #[arg(long)]
        class: usize,
        #[arg(long, default_value = "nonassociative")]
        variety: String,
    },
    /// Compare the class c and class c-1 reconstructions on class c-1.
    Coherence {
        #[arg(long)]
        op: String,
        #[arg(long)]
        class: usize,
        #[arg(long, default_value = "nonassociative")]
        variety: String,
    },
    /// Whether a matrix is an automorphism.
    AutCheck {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        matrix: String,
    },
    /// Determinant of an automorphism.
    AutDet {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        matrix: String,
    },
    /// Index of a subgroup of the Malcev lattice.
    Index {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        subgroup: String,
    },
    /// Compare |det| with the ratio of indices of a subgroup and its image.
    IndexRatio {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        matrix: String,
        #[arg(long)]
        subgroup: String,
    },
    /// Truncated substitution maps x -> a1 x + ... + ac x^c.
    Polymap {
        #[arg(long)]
        class: usize,
        #[arg(long, default_value = "Q")]
        field: String,
        /// compose, invert, commutator, conjugate, power, root, log, exp, lower-central, derived.
        #[arg(long)]
        action: String,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// The filiform algebra L(k), or its extension by the weight derivation.
    Filiform {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        extend: bool,
    },
    /// Rank read off a chief series.
    PoRank {
        #[arg(long)]
        algebra: String,
    },
    /// Dimension of a Cartan subalgebra.
    Cartan {
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// A chief series with tagged factors.
    ChiefSeries {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Two elements to compare in the induced order.
        #[arg(long, num_args = 2, value_names = ["X", "Y"])]
        compare: Option<Vec<String>>,
        /// Check that the operation is monotone for the order.
        #[arg(long)]
        op: Option<String>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
    /// Validate documents; with --op, check the quasigroup identities.
    Check {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        system: Option<String>,
        #[arg(long)]
        op: Option<String>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn ok(o: Output) -> Result<(Output, i32), Failure> {
    Ok((o, 0))
}

fn run(verb: Verb) -> Result<(Output, i32), Failure> {
    match verb {
        Verb::Solve {
            algebra,
            system,
            affine,
        } => verbs::solve(&algebra, &system, affine),
        Verb::Implicit {
            algebra,
            system,
            free,
        } => ok(verbs::implicit(&algebra, &system, free.as_deref())?),
        Verb::Jacobian { algebra, system } => ok(verbs::jacobian(&algebra, &system)?),
        Verb::Bch { algebra, x, y } => ok(verbs::bch(&algebra, &x, &y)?),
        Verb::CircleTable { algebra, op, limit } => ok(verbs::circle_table(&algebra, &op, limit)?),
        Verb::Divide {
            algebra,
            op,
            a,
            c,
            side,
            power,
        } => ok(verbs::divide(DivideArgs {
            algebra: &algebra,
            op: &op,
            a: &a,
            c: c.as_deref(),
            side: &side,
            power: power.as_deref(),
        })?),
        Verb::Reconstruct { op, class, variety } => ok(verbs::reconstruct(&op, class, &variety)?),
        Verb::Coherence { op, class, variety } => ok(verbs::coherence(&op, class, &variety)?),
        Verb::AutCheck { algebra, matrix } => ok(verbs::aut_check(&algebra, &matrix)?),
        Verb::AutDet { algebra, matrix } => ok(verbs::aut_det(&algebra, &matrix)?),
        Verb::Index { algebra, subgroup } => ok(verbs::index(&algebra, &subgroup)?),
        Verb::IndexRatio {
            algebra,
            matrix,
            subgroup,
        } => ok(verbs::index_ratio(&algebra, &matrix, &subgroup)?),
        Verb::Polymap {
            class,
            field,
            action,
            f,
            g,
            n,
        } => ok(verbs::polymap(PolymapArgs {
            class,
            field: &field,
            action: &action,
            f: f.as_deref(),
            g: g.as_deref(),
            n,
        })?),
        Verb::Filiform { k, extend } => ok(verbs::filiform(k, extend)?),
        Verb::PoRank { algebra } => ok(verbs::po_rank(&algebra)?),
        Verb::Cartan { algebra, seed } => ok(verbs::cartan(&algebra, seed)?),
        Verb::ChiefSeries {
            algebra,
            seed,
            compare,
            op,
            samples,
        } => {
            let compare = compare.as_ref().map(|v| (v[0].as_str(), v[1].as_str()));
            ok(verbs::chief_series(ChiefArgs {
                algebra: &algebra,
                seed,
                compare,
                op: op.as_deref(),
                samples,
            })?)
        }
        Verb::Check {
            algebra,
            system,
            op,
            samples,
            seed,
        } => verbs::check(CheckArgs {
            algebra: &algebra,
            system: system.as_deref(),
            op: op.as_deref(),
            samples,
            seed,
        }),
    }
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn json_text(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = match run(cli.verb) {
        Ok((Output::Json(v), status)) => {
            emit(&json_text(&v));
            status
        }
        Ok((Output::Csv(s), status)) => {
            emit(&s);
            status
        }
        Err(f) => {
            eprintln!("nilalg: {}: {}", f.code, f.message);
            emit(&json_text(&f.document()));
            f.status
        }
    };
    ExitCode::from(status as u8)
}
