#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub struct Run {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary from the fixtures directory so documents can be named
/// by file name.
pub fn nilalg(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_nilalg"))
        .args(args)
        .current_dir(fixtures())
        .output()
        .expect("binary runs");
    Run {
        status: out.status.code().expect("exit status"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

pub fn json(r: &Run) -> serde_json::Value {
    serde_json::from_str(&r.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}):\n{}", r.stdout))
}

/// `(golden name, expected exit status, arguments)`.
pub const CASES: &[(&str, i32, &[&str])] = &[
    (
        "solve_square",
        0,
        &[
            "solve",
            "--algebra",
            "heisenberg.json",
            "--system",
            "square.json",
        ],
    ),
    (
        "solve_ef_affine",
        3,
        &[
            "solve",
            "--algebra",
            "ef.json",
            "--system",
            "ef_system.json",
            "--affine",
        ],
    ),
    (
        "solve_ef_square",
        3,
        &[
            "solve",
            "--algebra",
            "ef.json",
            "--system",
            "ef_system.json",
        ],
    ),
    (
        "implicit",
        0,
        &[
            "implicit",
            "--algebra",
            "heisenberg.json",
            "--system",
            "implicit.json",
            "--free",
            "[[\"1\",\"2\",\"3\"]]",
        ],
    ),
    (
        "jacobian",
        0,
        &[
            "jacobian",
            "--algebra",
            "heisenberg.json",
            "--system",
            "square.json",
        ],
    ),
    (
        "bch_heisenberg",
        0,
        &[
            "bch",
            "--algebra",
            "heisenberg.json",
            "--x",
            "[1,0,0]",
            "--y",
            "[0,1,0]",
        ],
    ),
    (
        "bch_lie3",
        0,
        &[
            "bch",
            "--algebra",
            "lie3.json",
            "--x",
            "[1,0,0,0,0]",
            "--y",
            "[0,1,0,0,0]",
        ],
    ),
    (
        "circle_table_gf3",
        0,
        &[
            "circle-table",
            "--algebra",
            "gf3_line.json",
            "--op",
            "op_quadratic_gf3.json",
        ],
    ),
    (
        "circle_table_gf2",
        0,
        &[
            "circle-table",
            "--algebra",
            "gf2.json",
            "--op",
            "op_gf2.json",
        ],
    ),
    (
        "divide_right",
        0,
        &[
            "divide",
            "--algebra",
            "heisenberg.json",
            "--op",
            "op_bch.json",
            "--a",
            "[1,2,0]",
            "--c",
            "[0,0,1]",
            "--side",
            "right",
        ],
    ),
    (
        "divide_left",
        0,
        &[
            "divide",
            "--algebra",
            "heisenberg.json",
            "--op",
            "op_product.json",
            "--a",
            "[1,2,0]",
            "--c",
            "[0,0,1]",
        ],
    ),
    (
        "divide_power",
        0,
        &[
            "divide",
            "--algebra",
            "heisenberg.json",
            "--op",
            "op_bch.json",
            "--a",
            "[1,2,0]",
            "--power",
            "1/2",
        ],
    ),
    (
        "reconstruct_quadratic",
        0,
        &["reconstruct", "--op", "op_quadratic.json", "--class", "2"],
    ),
    (
        "reconstruct_lie",
        0,
        &[
            "reconstruct",
            "--op",
            "op_lie.json",
            "--class",
            "3",
            "--variety",
            "lie",
        ],
    ),
    (
        "reconstruct_k_eq_l",
        2,
        &[
            "reconstruct",
            "--op",
            "op_k_eq_l.json",
            "--class",
            "2",
            "--variety",
            "lie",
        ],
    ),
    (
        "reconstruct_gf2",
        2,
        &[
            "reconstruct",
            "--op",
            "op_gf2.json",
            "--class",
            "2",
            "--variety",
            "commutative",
        ],
    ),
    (
        "coherence",
        0,
        &[
            "coherence",
            "--op",
            "op_lie.json",
            "--class",
            "3",
            "--variety",
            "lie",
        ],
    ),
    (
        "aut_check_yes",
        0,
        &[
            "aut-check",
            "--algebra",
            "heisenberg.json",
            "--matrix",
            "aut.json",
        ],
    ),
    (
        "aut_check_no",
        0,
        &[
            "aut-check",
            "--algebra",
            "heisenberg.json",
            "--matrix",
            "not_aut.json",
        ],
    ),
    (
        "aut_det",
        0,
        &[
            "aut-det",
            "--algebra",
            "heisenberg.json",
            "--matrix",
            "aut.json",
        ],
    ),
    (
        "index",
        0,
        &[
            "index",
            "--algebra",
            "heisenberg.json",
            "--subgroup",
            "subgroup_heis.json",
        ],
    ),
    (
        "index_infinite",
        3,
        &[
            "index",
            "--algebra",
            "heisenberg.json",
            "--subgroup",
            "subgroup_infinite.json",
        ],
    ),
    (
        "index_ratio_z",
        0,
        &[
            "index-ratio",
            "--algebra",
            "z1.json",
            "--matrix",
            "z1_phi.json",
            "--subgroup",
            "z1_h.json",
        ],
    ),
    (
        "index_ratio_z2",
        0,
        &[
            "index-ratio",
            "--algebra",
            "z2.json",
            "--matrix",
            "z2_phi.json",
            "--subgroup",
            "z2_h.json",
        ],
    ),
    (
        "index_ratio_heisenberg",
        0,
        &[
            "index-ratio",
            "--algebra",
            "heisenberg.json",
            "--matrix",
            "aut.json",
            "--subgroup",
            "subgroup_heis_ratio.json",
        ],
    ),
    (
        "polymap_compose",
        0,
        &[
            "polymap",
            "--class",
            "4",
            "--action",
            "compose",
            "--f",
            "[1,1,0,0]",
            "--g",
            "[2,0,1,0]",
        ],
    ),
    (
        "polymap_invert",
        0,
        &[
            "polymap",
            "--class",
            "5",
            "--action",
            "invert",
            "--f",
            "[1,1,0,0,0]",
        ],
    ),
    (
        "polymap_commutator",
        0,
        &[
            "polymap",
            "--class",
            "5",
            "--action",
            "commutator",
            "--f",
            "[1,1,0,0,0]",
            "--g",
            "[1,0,1,0,0]",
        ],
    ),
    (
        "polymap_conjugate",
        0,
        &[
            "polymap",
            "--class",
            "4",
            "--action",
            "conjugate",
            "--f",
            "[1,1,0,0]",
            "--g",
            "[2,0,0,0]",
        ],
    ),
    (
        "polymap_power",
        0,
        &[
            "polymap",
            "--class",
            "4",
            "--action",
            "power",
            "--f",
            "[1,1,0,0]",
            "--n",
            "3",
        ],
    ),
    (
        "polymap_root",
        0,
        &[
            "polymap",
            "--class",
            "4",
            "--action",
            "root",
            "--f",
            "[1,2,0,0]",
            "--n",
            "2",
        ],
    ),
    (
        "polymap_log",
        0,
        &[
            "polymap",
            "--class",
            "4",
            "--action",
            "log",
            "--f",
            "[1,1,0,0]",
        ],
    ),
    (
        "polymap_exp",
        0,
        &[
            "polymap", "--class", "4", "--action", "exp", "--f", "[1,0,0]",
        ],
    ),
    (
        "polymap_lower_central",
        0,
        &["polymap", "--class", "8", "--action", "lower-central"],
    ),
    (
        "polymap_derived",
        0,
        &["polymap", "--class", "8", "--action", "derived"],
    ),
    ("filiform_2", 0, &["filiform", "--k", "2"]),
    (
        "filiform_3_extend",
        0,
        &["filiform", "--k", "3", "--extend"],
    ),
    (
        "po_rank_weighted",
        0,
        &["po-rank", "--algebra", "weighted.json"],
    ),
    (
        "po_rank_heisenberg",
        0,
        &["po-rank", "--algebra", "heisenberg.json"],
    ),
    (
        "cartan_weighted",
        0,
        &["cartan", "--algebra", "weighted.json", "--seed", "7"],
    ),
    (
        "cartan_default_seed",
        0,
        &["cartan", "--algebra", "ef.json"],
    ),
    (
        "chief_series_heisenberg",
        0,
        &[
            "chief-series",
            "--algebra",
            "heisenberg.json",
            "--compare",
            "[0,1,0]",
            "[0,0,5]",
            "--op",
            "op_bch.json",
            "--samples",
            "100",
        ],
    ),
    (
        "chief_series_weighted_seeded",
        0,
        &["chief-series", "--algebra", "weighted.json", "--seed", "3"],
    ),
    (
        "check_heisenberg",
        0,
        &["check", "--algebra", "heisenberg.json"],
    ),
    (
        "check_identities_gf3",
        0,
        &[
            "check",
            "--algebra",
            "gf3_line.json",
            "--op",
            "op_quadratic_gf3.json",
        ],
    ),
    (
        "check_identities_sampled",
        0,
        &[
            "check",
            "--algebra",
            "heisenberg.json",
            "--op",
            "op_product.json",
            "--seed",
            "4",
            "--samples",
            "50",
        ],
    ),
    (
        "check_bad_index",
        1,
        &["check", "--algebra", "bad_index.json"],
    ),
    (
        "check_bad_scalar",
        1,
        &["check", "--algebra", "bad_scalar.json"],
    ),
    (
        "check_bad_flag",
        1,
        &["check", "--algebra", "bad_flag.json"],
    ),
    (
        "missing_file",
        1,
        &["po-rank", "--algebra", "no_such_file.json"],
    ),
];

pub fn golden_name(name: &str, args: &[&str]) -> String {
    let ext = if args.first() == Some(&"circle-table") {
        "csv"
    } else {
        "json"
    };
    format!("{name}.{ext}")
}
