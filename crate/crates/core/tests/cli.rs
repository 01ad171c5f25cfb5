//! End-to-end runs of the `flipdist` binary.

use std::path::PathBuf;
use std::process::Command;
use std::sync::Arc;

use flipdist::instances::{gen_convex, gen_random_points, initial_triangulation, Instance};
use flipdist::oracle::{bfs_distance, flip_graph};
use flipdist::triangulation::{Edge, Triangulation};
use flipdist::PointSet;

const SQUARE: &str = "\
flipdist 1
points 4
0 0 0
1 1 0
2 1 1
3 0 1
tstart 5
0 1
0 2
0 3
1 2
2 3
tend 5
0 1
0 3
1 2
1 3
2 3
";

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_flipdist")).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn scratch(name: &str, contents: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn hexagon_pair_at(distance: usize) -> (Triangulation, Triangulation) {
    let all = flip_graph(&initial_triangulation(Arc::new(gen_convex(6).unwrap()))).nodes;
    all.iter()
        .flat_map(|a| all.iter().map(move |b| (a, b)))
        .find(|(a, b)| bfs_distance(a, b, 10).unwrap().unwrap().distance == distance)
        .map(|(a, b)| (a.clone(), b.clone()))
        .unwrap()
}

#[test]
fn random_points_match_golden_file() {
    let golden = Instance::parse(&std::fs::read_to_string(data("random_n7_seed1.txt")).unwrap()).unwrap();
    let ps = gen_random_points(7, 1, 1000).unwrap();
    assert_eq!(ps.coords(), golden.points.coords());
    let (code, out, _) = run(&["gen", "--mode", "random", "--n", "7", "--seed", "1", "--bound", "1000"]);
    assert_eq!(code, 0);
    assert_eq!(out, std::fs::read_to_string(data("random_n7_seed1.txt")).unwrap());
}

#[test]
fn pentagon_serialization_is_byte_stable() {
    let text = std::fs::read_to_string(data("pentagon.txt")).unwrap();
    assert_eq!(Instance::parse(&text).unwrap().serialize(), text);
    let (code, out, _) = run(&["gen", "--mode", "convex", "--n", "5", "--walk", "2", "--seed", "7", "--k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, text);
}

#[test]
fn gen_rejects_tiny_n() {
    assert_eq!(run(&["gen", "--mode", "convex", "--n", "2"]).0, 2);
    assert_eq!(run(&["gen", "--mode", "wobbly", "--n", "5"]).0, 2);
    assert_eq!(run(&[]).0, 2);
}

#[test]
fn square_distance_one() {
    let f = scratch("square.txt", SQUARE);
    let (code, out, _) = run(&["solve", "--in", &f, "--max-k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "distance=1\n0-2 -> 1-3\n");
    let (code, out, _) = run(&["oracle", "--in", &f]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("distance=1"));
}

#[test]
fn identical_triangulations_decide_zero() {
    let ps = Arc::new(PointSet::new(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap());
    let t = Triangulation::build(
        ps,
        &[Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3), Edge::new(0, 3), Edge::new(0, 2)],
    )
    .unwrap();
    let inst = Instance::new(t.clone(), t, Some(0)).unwrap();
    let f = scratch("same.txt", &inst.serialize());
    let (code, out, _) = run(&["solve", "--in", &f, "--decide"]);
    assert_eq!((code, out.as_str()), (0, "decision=YES\n"));
}

#[test]
fn hexagon_decide_agrees_with_oracle() {
    let (a, b) = hexagon_pair_at(3);
    let yes = scratch("hex3.txt", &Instance::new(a.clone(), b.clone(), Some(3)).unwrap().serialize());
    let (code, out, _) = run(&["oracle", "--in", &yes]);
    assert_eq!((code, out.lines().next()), (0, Some("distance=3")));
    let (code, out, _) = run(&["solve", "--in", &yes, "--decide"]);
    assert_eq!((code, out.lines().next()), (0, Some("decision=YES")));
    assert_eq!(out.lines().count(), 4);
    for k in [2, 4] {
        let no = scratch(&format!("hex3_k{k}.txt"), &Instance::new(a.clone(), b.clone(), Some(k)).unwrap().serialize());
        let (code, out, _) = run(&["solve", "--in", &no, "--decide"]);
        assert_eq!((code, out.as_str()), (1, "decision=NO\n"));
    }
    let missing_k = scratch("hex3_nok.txt", &Instance::new(a, b, None).unwrap().serialize());
    assert_eq!(run(&["solve", "--in", &missing_k, "--decide"]).0, 2);
}

#[test]
fn caps_below_distance() {
    let f = data("pentagon.txt");
    let (code, out, _) = run(&["oracle", "--in", &f, "--cap", "1"]);
    assert_eq!((code, out.as_str()), (1, "distance=>1\n"));
    let (code, out, _) = run(&["solve", "--in", &f, "--max-k", "1"]);
    assert_eq!((code, out.as_str()), (1, "distance=>1\n"));
}

#[test]
fn replay_of_witness_and_corruption() {
    let f = data("pentagon.txt");
    let (_, witness, _) = run(&["oracle", "--in", &f]);
    let seq = scratch("pentagon_witness.txt", &witness);
    let (code, out, _) = run(&["verify", "--in", &f, "--replay", &seq]);
    assert_eq!(code, 0);
    assert_eq!(out, "replay=ok flips=2 endpoint_match=true\n");

    // Solver output replays the same way.
    let (_, solved, _) = run(&["solve", "--in", &f, "--trace"]);
    let seq = scratch("pentagon_solved.txt", &solved);
    assert_eq!(run(&["verify", "--in", &f, "--replay", &seq]).1, "replay=ok flips=2 endpoint_match=true\n");

    // Swapped order: the second flip's edge does not exist yet.
    let lines: Vec<&str> = witness.lines().skip(1).collect();
    let swapped = scratch("pentagon_swapped.txt", &format!("{}\n{}\n", lines[1], lines[0]));
    let (code, out, _) = run(&["verify", "--in", &f, "--replay", &swapped]);
    assert_eq!((code, out.as_str()), (1, "replay=invalid at=0\n"));

    let garbage = scratch("pentagon_garbage.txt", "0-2 => 1-3\n");
    assert_eq!(run(&["verify", "--in", &f, "--replay", &garbage]).0, 1);

    // Valid but short of the target.
    let short = scratch("pentagon_short.txt", &format!("{}\n", lines[0]));
    let (code, out, _) = run(&["verify", "--in", &f, "--replay", &short]);
    assert_eq!((code, out.as_str()), (1, "replay=ok flips=1 endpoint_match=false\n"));
}

#[test]
fn workers_do_not_change_output() {
    let (a, b) = hexagon_pair_at(4);
    let f = scratch("hex4.txt", &Instance::new(a, b, Some(4)).unwrap().serialize());
    let one = run(&["solve", "--in", &f, "--trace"]);
    assert_eq!(one.0, 0);
    assert!(one.1.starts_with("distance=4\n"));
    assert!(one.1.contains("iteration=1 start="));
    for w in ["2", "4", "7"] {
        assert_eq!(run(&["solve", "--in", &f, "--trace", "--workers", w]), one);
    }
}

#[test]
fn dot_output_is_written() {
    let f = data("pentagon.txt");
    let dot = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("pentagon.dot");
    let (code, _, _) = run(&["solve", "--in", &f, "--dot", dot.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("digraph"));
}

#[test]
fn malformed_instance_is_a_usage_error() {
    let f = scratch("broken.txt", "flipdist 1\npoints 3\n0 0 0\n1 1 1\n2 2 2\n");
    assert_eq!(run(&["solve", "--in", &f]).0, 2);
    assert_eq!(run(&["oracle", "--in", &f]).0, 2);
    assert_eq!(run(&["solve", "--in", "/nonexistent/instance.txt"]).0, 2);
}

#[test]
fn stats_and_cross_and_bench() {
    let (code, out, _) = run(&["oracle", "--stats", "--n", "6"]);
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows[0], "n,order,diameter,distance,pairs");
    assert!(rows[1..].iter().all(|r| r.starts_with("6,14,4,")));

    let (code, out, _) = run(&["verify", "--mode", "cross", "--n", "5", "--trials", "20", "--seed", "1"]);
    assert_eq!((code, out.as_str()), (0, "ok=20 fail=0\n"));

    let (code, out, _) = run(&["bench", "--n", "7", "--kmax", "3", "--trials", "2"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("k,trials,median_ms,max_ms,solved"));
    let ks: Vec<usize> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(!ks.is_empty() && ks.windows(2).all(|w| w[0] < w[1]));
}
