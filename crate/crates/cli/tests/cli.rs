use std::fs;
use std::process::{Command, Output};

fn ecgray(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecgray"))
        .args(args)
        .env_remove("ECGRAY_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn encode_and_decode_unary() {
    let out = ecgray(&["encode", "--codec", "unary:m=5", "--value", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "11100\n");
    let out = ecgray(&["decode", "--codec", "unary:m=5", "--input", "11100"]);
    assert_eq!(stdout(&out), "3\n");
}

#[test]
fn gray_codeword_of_one() {
    let out = ecgray(&["encode", "--codec", "gray:inner=pairtriple", "--value", "1"]);
    let word = stdout(&out);
    let word = word.trim();
    assert_eq!(word.len(), 30);
    let ones: Vec<usize> = word
        .char_indices()
        .filter(|&(_, c)| c == '1')
        .map(|(i, _)| i + 1)
        .collect();
    assert_eq!(ones, [4]);
}

#[test]
fn config_is_echoed() {
    let out = ecgray(&[
        "--seed",
        "9",
        "encode",
        "--codec",
        "unary:m=5",
        "--value",
        "0",
    ]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("# config: seed=9"), "{err}");
}

#[test]
fn count_codewords_small() {
    let out = ecgray(&[
        "count-codewords",
        "--rows",
        "101/011",
        "--t",
        "3",
        "--verify",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "6\n6\n");
    let out = ecgray(&["count-codewords", "--rows", "101/011", "--t", "0"]);
    assert_eq!(stdout(&out), "0\n");
}

#[test]
fn count_codewords_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    fs::write(
        &path,
        "# hamming\n4 7\n1000110\n0100101\n0010011\n0001111\n",
    )
    .unwrap();
    let out = ecgray(&[
        "count-codewords",
        "--matrix",
        path.to_str().unwrap(),
        "--t",
        "15",
        "--verify",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], lines[1]);
}

#[test]
fn descriptor_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("code.txt");
    fs::write(
        &path,
        "# gray over a repetition code\ngray:\n  inner=(repetition:d=3)\n",
    )
    .unwrap();
    let arg = format!("@{}", path.display());
    let word = stdout(&ecgray(&["encode", "--codec", &arg, "--value", "5"]));
    let inline = stdout(&ecgray(&[
        "encode",
        "--codec",
        "gray:inner=(repetition:d=3)",
        "--value",
        "5",
    ]));
    assert_eq!(word, inline);
}

#[test]
fn exit_codes() {
    assert_eq!(ecgray(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        ecgray(&["encode", "--codec", "unary:m=5"]).status.code(),
        Some(1)
    );
    assert_eq!(ecgray(&["--help"]).status.code(), Some(0));
    assert_eq!(
        ecgray(&["encode", "--codec", "unary:m=5", "--value", "6"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ecgray(&["encode", "--codec", "nosuch:x=1", "--value", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ecgray(&["decode", "--codec", "unary:m=5", "--input", "10x"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulate_is_deterministic_and_passes() {
    let args = [
        "--seed",
        "4",
        "simulate",
        "--codec",
        "gray:inner=pairtriple",
        "--p",
        "0.05",
        "--trials",
        "5000",
    ];
    let a = ecgray(&args);
    let b = ecgray(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let csv = stdout(&a);
    assert!(csv.starts_with("t,empirical,stderr,bound,adversarial,adversarial_stderr,pass\n"));
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn seed_from_environment() {
    let args = [
        "simulate",
        "--codec",
        "gray:inner=pairtriple",
        "--p",
        "0.1",
        "--trials",
        "2000",
        "--format",
        "json",
    ];
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_ecgray"))
            .args(args)
            .env("ECGRAY_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("17"), run("17"));
    assert_ne!(run("17"), run("18"));
    let json = String::from_utf8(run("17")).unwrap();
    assert!(json.contains("\"seed\": 17"), "{json}");
}

#[test]
fn histogram_build_query_dump() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("counts.csv");
    let sketch = dir.path().join("s.bin");
    fs::write(&input, "element,count\n3,40\n9,2\n").unwrap();
    let (i, s) = (input.to_str().unwrap(), sketch.to_str().unwrap());
    let out = ecgray(&[
        "hist",
        "build",
        "--eps",
        "1",
        "--universe",
        "256",
        "--n",
        "60",
        "--input",
        i,
        "--out",
        s,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let bytes = fs::read(&sketch).unwrap();
    assert_eq!(&bytes[..4], b"ECGH");

    let out = ecgray(&["hist", "query", "--sketch", s, "--element", "3", "200"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("3,"));

    let dump = stdout(&ecgray(&["hist", "dump", "--sketch", s]));
    assert!(dump.contains("\"table_columns\""));

    fs::write(&sketch, &bytes[..bytes.len() - 3]).unwrap();
    assert_eq!(
        ecgray(&["hist", "query", "--sketch", s, "--element", "3"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn histogram_of_empty_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("empty.csv");
    let sketch = dir.path().join("e.bin");
    fs::write(&input, "").unwrap();
    let (i, s) = (input.to_str().unwrap(), sketch.to_str().unwrap());
    assert!(ecgray(&[
        "hist",
        "build",
        "--eps",
        "1",
        "--universe",
        "64",
        "--input",
        i,
        "--out",
        s
    ])
    .status
    .success());
    assert_eq!(
        stdout(&ecgray(&["hist", "query", "--sketch", s, "--element", "5"])),
        "5,0\n"
    );
}

#[test]
fn histogram_debug_mode_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.csv");
    let sketch = dir.path().join("d.bin");
    fs::write(&input, "1,1\n2,2\n").unwrap();
    let (i, s) = (input.to_str().unwrap(), sketch.to_str().unwrap());
    let out = ecgray(&[
        "hist",
        "build",
        "--eps",
        "1",
        "--universe",
        "64",
        "--n",
        "10",
        "--input",
        i,
        "--out",
        s,
        "--debug-exact",
    ]);
    assert!(out.status.success());
    let dump = stdout(&ecgray(&["hist", "dump", "--sketch", s]));
    assert!(dump.contains("\"non_private_debug\": true"), "{dump}");
}

#[test]
fn expander_export() {
    let dir = tempfile::tempdir().unwrap();
    let parity = dir.path().join("h.txt");
    let generator = dir.path().join("g.txt");
    let out = ecgray(&[
        "expander",
        "--d",
        "96",
        "--dv",
        "3",
        "--dc",
        "4",
        "--alpha",
        "0.05",
        "--parity-out",
        parity.to_str().unwrap(),
        "--generator-out",
        generator.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let h = fs::read_to_string(&parity).unwrap();
    assert!(h.starts_with("72 96\n"));
    for row in h.lines().skip(1) {
        assert_eq!(row.chars().filter(|&c| c == '1').count(), 4);
    }
    assert!(fs::read_to_string(&generator)
        .unwrap()
        .starts_with("24 96\n"));
    let arg = format!(
        "linear:file=({}),distance=2,decoder=bitflip",
        generator.display()
    );
    let out = ecgray(&["info", "--codec", &arg]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
