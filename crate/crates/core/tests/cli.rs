use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planchlab")).args(args).output().expect("binary runs")
}

fn run_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planchlab"))
        .args(args)
        .env("PLANCHLAB_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

// Splits one CSV line, honoring double-quoted fields.
fn fields(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(String::new()),
            c => out.last_mut().unwrap().push(c),
        }
    }
    out
}

/// Header and data rows, skipping the config line.
fn table(o: &Output) -> (Vec<String>, Vec<Vec<String>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    let header = fields(lines.next().unwrap());
    let rows = lines.map(fields).collect();
    (header, rows)
}

#[test]
fn enumerate_four() {
    let o = run(&["enumerate", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&o);
    assert_eq!(header, ["partition", "dim", "prob", "prob_exact"]);
    assert_eq!(rows.len(), 5);
    let dims: Vec<&str> = rows.iter().map(|r| r[1].as_str()).collect();
    assert_eq!(dims, ["1", "3", "2", "3", "1"]);
    assert_eq!(rows[1][0], "3,1");
    assert_eq!(rows[1][3], "3/8");
}

#[test]
fn sine_kernel_at_half_density() {
    let o = run(&["kernel", "sine", "--d", "0", "--phi", "1.5707963267948966"]);
    let (_, rows) = table(&o);
    assert_eq!(rows[0][2], "0.5");
}

#[test]
fn poisson_variance_row() {
    let o = run(&["variance", "poisson", "--theta", "50", "--a", "-25", "--b", "25"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&o);
    assert_eq!(&header[..8], ["theta", "a", "b", "L", "var_io", "var_trace", "predicted", "ratio"]);
    let io: f64 = rows[0][4].parse().unwrap();
    let tr: f64 = rows[0][5].parse().unwrap();
    assert!((io - tr).abs() < 1e-6);
    assert_eq!(rows[0][3], "51");
}

#[test]
fn sweep_reports_slope() {
    let o = run(&["variance", "poisson", "--theta", "200", "--sweep", "16,32,64"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&o);
    assert_eq!(header.last().unwrap(), "slope");
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.last() == rows[0].last()));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--n", "x"]).status.code(), Some(2));
    let o = run(&["variance", "poisson", "--theta", "5", "--a", "-1000", "--b", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.trim().lines().count(), 1);
    assert_eq!(run(&["enumerate", "--n", "41"]).status.code(), Some(3));
    assert_eq!(run(&["pattern", "density", "--pattern", "0,13"]).status.code(), Some(2));
    assert_eq!(run(&["descents", "--partition", "2,3", "--from", "0", "--to", "3"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn descents_of_small_partition() {
    let o = run(&["descents", "--partition", "3,1", "--from", "-4", "--to", "3"]);
    let (_, rows) = table(&o);
    let bits: String = rows.iter().map(|r| r[1].as_str()).collect();
    // descents of (3,1) at 3−1 = 2, 1−2 = −1 and every k ≤ −3
    assert_eq!(bits, "11010010");
}

#[test]
fn json_mirrors_csv() {
    let o = run(&["--format", "json", "kernel", "bessel", "--x", "0", "--y", "1", "--theta", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["config"]["command"], "kernel bessel");
    assert_eq!(v["config"]["theta"], 2.0);
    let csv = run(&["kernel", "bessel", "--x", "0", "--y", "1", "--theta", "2"]);
    let (_, rows) = table(&csv);
    let from_csv: f64 = rows[0][3].parse().unwrap();
    assert_eq!(v["rows"][0]["value"].as_f64().unwrap(), from_csv);
}

#[test]
fn output_is_thread_independent() {
    let args = ["variance", "mc", "--n", "400", "--a", "-10", "--b", "10", "--pattern", "0,1", "--samples", "300", "--seed", "5"];
    let one = run_with_threads(&args, "1");
    let four = run_with_threads(&args, "4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run_with_threads(&args, "many").status.code(), Some(2));
}

#[test]
fn writes_to_file() {
    let dir = std::env::temp_dir().join(format!("planchlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sample.csv");
    let o = run(&["sample", "--n", "10", "--samples", "3", "--seed", "1", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("\"output\":"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn clt_sine_runs() {
    let o = run(&["clt", "--mode", "plain", "--source", "sine", "--a", "0", "--b", "31", "--samples", "200", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = table(&o);
    assert_eq!(header[0], "source");
    assert_eq!(rows[0][0], "sine");
    assert_eq!(run(&["clt", "--mode", "plain", "--a", "0", "--b", "31", "--samples", "200", "--seed", "3"]).status.code(), Some(2));
}
