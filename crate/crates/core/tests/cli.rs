//! Command-line front end: outputs, determinism and exit codes.

use std::fs;
use std::path::PathBuf;

use lowreg::cli_experiments::{main_with, parse_tau_list};

fn out_dir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("lowreg-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn run(args: &[&str], out: &PathBuf) -> i32 {
    let mut v = vec!["lowreg".to_string()];
    v.extend(args.iter().map(|s| s.to_string()));
    v.push("--out".into());
    v.push(out.display().to_string());
    main_with(v)
}

fn tree_count(eq: &str, p: &str) -> usize {
    let out = out_dir(&format!("trees-{eq}-{p}"));
    assert_eq!(run(&["trees", "--eq", eq, "--order", p], &out), 0);
    let js: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("trees.json")).unwrap()).unwrap();
    assert!(fs::read_to_string(out.join("trees.dot")).unwrap().contains("digraph"));
    js["trees"].as_array().unwrap().len()
}

/// Data rows with the trailing wall-time column removed.
fn rows_without_timing(path: &PathBuf) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| match l.rfind(',') {
            Some(i) if !l.starts_with('#') => l[..i].to_string(),
            _ => l.to_string(),
        })
        .collect()
}

fn column(path: &PathBuf, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(j).unwrap().parse().unwrap()).collect()
}

#[test]
fn tree_census_files() {
    assert_eq!(tree_count("gp", "1"), 2);
    assert_eq!(tree_count("gp", "2"), 9);
    assert_eq!(tree_count("nls", "1"), 1);
}

#[test]
fn derive_writes_scheme_files() {
    for (eq, p, s) in [("gp", "1", "1"), ("gp", "2", "2"), ("sg", "1", "0.75")] {
        let out = out_dir(&format!("derive-{eq}-{p}"));
        assert_eq!(run(&["derive", "--eq", eq, "--order", p, "--sobolev", s], &out), 0);
        let js: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("scheme.json")).unwrap()).unwrap();
        assert!(js.is_object());
        let txt = fs::read_to_string(out.join("scheme.txt")).unwrap();
        assert!(txt.contains("resonant"), "{eq} p={p}: {txt}");
    }
}

#[test]
fn converge_is_deterministic_and_hashed() {
    let args = ["converge", "--eq", "gp", "--scheme", "gp1", "--modes", "16", "--tau-list", "2^-2..2^-4", "--t-end", "0.5", "--seed", "3"];
    let a = out_dir("det-a");
    let b = out_dir("det-b");
    assert_eq!(run(&args, &a), 0);
    assert_eq!(run(&args, &b), 0);
    let ra = rows_without_timing(&a.join("converge.csv"));
    assert_eq!(ra, rows_without_timing(&b.join("converge.csv")));
    assert!(ra[0].starts_with("# config_sha256="));
    assert!(ra[1].ends_with("wall_time_s") || ra[1].contains("residual"));
}

#[test]
fn converge_reports_scheme_orders() {
    for (scheme, lo, hi) in [("gp1", 0.85, 1.15), ("gp2", 1.8, 2.2)] {
        let out = out_dir(&format!("order-{scheme}"));
        let args = ["converge", "--eq", "gp", "--scheme", scheme, "--data", "smooth", "--modes", "32", "--tau-list", "2^-4..2^-7"];
        assert_eq!(run(&args, &out), 0);
        let s = column(&out.join("converge.csv"), "slope")[0];
        assert!((lo..=hi).contains(&s), "{scheme}: slope {s}");
    }
}

#[test]
fn tree_order_zero_step_row() {
    let out = out_dir("tree-order");
    let args = ["tree-order", "--eq", "gp", "--order", "1", "--tree", "0", "--modes", "16", "--tau-list", "2^-3..2^-6,0"];
    assert_eq!(run(&args, &out), 0);
    let path = out.join("tree_order.csv");
    let taus = column(&path, "tau");
    let errs = column(&path, "err_l2");
    assert_eq!(*taus.last().unwrap(), 0.0);
    assert_eq!(*errs.last().unwrap(), 0.0);
    assert!(column(&path, "slope")[0] >= 1.8);
}

#[test]
fn usage_errors_exit_with_two() {
    let out = out_dir("usage");
    assert_eq!(run(&["converge", "--tau-list", "0.1,0.05"], &out), 2);
    assert_eq!(run(&["converge", "--tau-list", "0.1,0.2,0.05"], &out), 2);
    assert_eq!(run(&["converge", "--tau-list", "0.1,0.1,0.05"], &out), 2);
    assert_eq!(run(&["trees", "--eq", "kdv"], &out), 2);
    assert_eq!(run(&["bogus"], &out), 2);
    assert_eq!(run(&["converge", "--eq", "sg", "--mass", "0"], &out), 2);
}

#[test]
fn unconverged_reference_exits_with_three() {
    let out = out_dir("oracle");
    let args = ["converge", "--eq", "gp", "--scheme", "gp1", "--sobolev", "0", "--modes", "128", "--tau-list", "2^-1..2^-3"];
    assert_eq!(run(&args, &out), 3);
}

#[test]
fn tau_list_syntax() {
    assert_eq!(parse_tau_list("2^-1..2^-3").unwrap(), vec![0.5, 0.25, 0.125]);
    assert_eq!(parse_tau_list("0.1, 0.05,2^-5").unwrap(), vec![0.1, 0.05, 0.03125]);
    assert!(parse_tau_list("abc").is_err());
}
