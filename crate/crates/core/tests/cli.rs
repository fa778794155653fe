use std::path::Path;
use std::process::{Command, Output};

fn lprev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lprev")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const TOY: &str = "omega a b c\nf 1 1/2 0\ng 0 2/3 1\n";

#[test]
fn gen_reduce_project_vertices_chain() {
    let d = tempfile::tempdir().unwrap();
    let k = write(d.path(), "toy.gmb", TOY);
    let path = |n: &str| d.path().join(n).to_str().unwrap().to_owned();

    assert!(lprev(&["gen", "--gambles", &k, "--out", &path("gen.hrep"), "--provenance", &path("prov.txt")])
        .status
        .success());
    let gen = std::fs::read_to_string(path("gen.hrep")).unwrap();
    assert!(gen.starts_with("# coords: f g I_a I_b I_c\nH 15 5\n"));
    assert_eq!(std::fs::read_to_string(path("prov.txt")).unwrap().lines().count(), 15);

    assert!(lprev(&["reduce", "--in", &path("gen.hrep"), "--out", &path("red.hrep")]).status.success());
    assert!(lprev(&["project", "--in", &path("red.hrep"), "--keep", "f,g", "--out", &path("proj.hrep")])
        .status
        .success());
    let o = lprev(&["vertices", "--in", &path("proj.hrep"), "--adj", &path("e.adj")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "# coords: f g\nV 4 2\n0 0\n0 1\n1/2 2/3\n1 0\n");
    assert_eq!(std::fs::read_to_string(path("e.adj")).unwrap().lines().count(), 4);

    // positional coordinates select the same projection
    let by_index = lprev(&["project", "--in", &path("red.hrep"), "--keep", "1,2"]);
    assert_eq!(stdout(&by_index), std::fs::read_to_string(path("proj.hrep")).unwrap());
}

#[test]
fn check_modes_and_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let k = write(d.path(), "toy.gmb", TOY);
    let good = write(d.path(), "good.txt", "f 1/2\ng 2/3\n");
    let bad = write(d.path(), "bad.txt", "f 1/2\ng 3/4\n");
    let loss = write(d.path(), "loss.txt", "f 1\ng 1\n");
    for mode in [None, Some("--direct"), Some("--envelope")] {
        let run = |p: &str| {
            let mut args = vec!["check", "--gambles", &k, "--prevision", p];
            args.extend(mode);
            lprev(&args)
        };
        let o = run(&good);
        assert_eq!(o.status.code(), Some(0), "{mode:?}");
        assert_eq!(stdout(&o), "coherent\n");
        for p in [&bad, &loss] {
            let o = run(p);
            assert_eq!(o.status.code(), Some(1), "{mode:?} {p}");
            assert!(stdout(&o).starts_with("incoherent\n"));
        }
    }
    let missing = write(d.path(), "missing.txt", "f 1/2\n");
    assert_eq!(lprev(&["check", "--gambles", &k, "--prevision", &missing]).status.code(), Some(2));
    let unknown = write(d.path(), "unknown.txt", "f 1/2\nz 0\n");
    assert_eq!(lprev(&["check", "--gambles", &k, "--prevision", &unknown]).status.code(), Some(2));
    let o = lprev(&["check", "--gambles", &k, "--prevision", &good, "--direct", "--envelope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(lprev(&[]).status.code(), Some(2));
    assert_eq!(lprev(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lprev(&["gen", "--gambles", "/nonexistent/k.gmb"]).status.code(), Some(2));
    assert_eq!(lprev(&["pipeline", "--family", "zzz", "--omega", "3"]).status.code(), Some(2));
    assert_eq!(lprev(&["pipeline", "--preset", "nope"]).status.code(), Some(2));
    assert_eq!(lprev(&["pipeline", "--family", "lu"]).status.code(), Some(2));
    assert_eq!(lprev(&["--help"]).status.code(), Some(0));

    let d = tempfile::tempdir().unwrap();
    let k = write(d.path(), "k.gmb", "omega a b\nf 1 1/x\n");
    let o = lprev(&["gen", "--gambles", &k]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k.gmb:2"));
    let c = write(d.path(), "c.gmb", "omega a b\nf 1 1\n");
    assert_eq!(lprev(&["gen", "--gambles", &c]).status.code(), Some(2));
}

#[test]
fn budget_exceeded_keeps_constraints() {
    let o = lprev(&["pipeline", "--family", "pset", "--omega", "4", "--max-vertices", "10"]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("irredundant 48\n"), "{s}");
    assert!(s.contains("vertices skipped"), "{s}");
}

#[test]
fn normalization_maps_prevision_values() {
    let d = tempfile::tempdir().unwrap();
    // f doubled and shifted by one: same polytope after rescaling
    let k = write(d.path(), "k.gmb", "omega a b c\nf 3 2 1\ng 0 2/3 1\n");
    let p = write(d.path(), "p.txt", "f 2\ng 2/3\n");
    let o = lprev(&["check", "--gambles", &k, "--prevision", &p]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let q = write(d.path(), "q.txt", "f 5/2\ng 2/3\n");
    assert_eq!(lprev(&["check", "--gambles", &k, "--prevision", &q]).status.code(), Some(1));
}

#[test]
fn credal_and_extend() {
    let d = tempfile::tempdir().unwrap();
    let k = write(d.path(), "toy.gmb", TOY);
    let p = write(d.path(), "p.txt", "f 1/2\ng 2/3\n");
    let o = lprev(&["credal", "--gambles", &k, "--prevision", &p]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "# coords: a b c\nV 1 3\n0 1 0\n");
    let o = lprev(&["extend", "--gambles", &k, "--prevision", &p, "--target", "1,1,0", "--target", "0,0,1"]);
    assert_eq!(stdout(&o), "t1 1\nt2 0\n");
    let loss = write(d.path(), "loss.txt", "f 1\ng 1\n");
    assert_eq!(lprev(&["credal", "--gambles", &k, "--prevision", &loss]).status.code(), Some(1));
}

#[test]
fn table_and_plotdata() {
    let o = lprev(&["table", "--family", "lu", "--from", "2", "--to", "4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let rows: Vec<&str> = s.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[2].ends_with("\t9\t8\tok"), "{}", rows[2]);
    assert!(rows[3].ends_with("\t16\t20\tok"), "{}", rows[3]);

    let o = lprev(&["plotdata", "--preset", "toy"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("# vertex point a b c\n"));
    // the vertex (1/2, 2/3) has the single credal mass (0, 1, 0)
    assert!(s.lines().any(|l| l.ends_with(" 0 1 0")));
}

#[test]
fn output_independent_of_jobs() {
    let runs: Vec<String> = ["1", "2", "4"]
        .iter()
        .map(|j| stdout(&lprev(&["--jobs", j, "table", "--family", "vb", "--from", "2", "--to", "3"])))
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
    assert!(runs[0].contains("\t15\t49\tok"));
}
