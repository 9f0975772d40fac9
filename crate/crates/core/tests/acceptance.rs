//! Acceptance run: each criterion prints one PASS/FAIL line; any failure
//! makes the target fail.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rainbow_core::arith::{int, ratio, Ratio};
use rainbow_core::connectivity::{check_strong_connectivity, closed_walk_one_mod_k, odd_closed_tight_walk};
use rainbow_core::framework::{color_v123, generate_family, verify_framework, FrameworkOptions};
use rainbow_core::hypergraph::{system_to_onek, KGraph, OneKGraph, Point};
use rainbow_core::instances::{check_x_trap, complete_system, random_system, xy_obstruction, xy_obstruction_unchecked};
use rainbow_core::matching::{lift_link_matchings, max_fractional_matching_with, uniform_weights, Arithmetic};
use rainbow_core::sequential::{shorten_walk, SeqWalk};
use rainbow_core::solver::{find_rainbow_hamilton, verify_hamilton, SearchConfig, SearchStatus};
use rainbow_core::vicinity::{build_max_vicinity, kruskal_katona_shadow, verify_vicinity};

use common::*;

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn within(start: Instant, limit: Duration) -> bool {
    start.elapsed() < limit
}

fn oracle_solver() -> Verdict {
    let start = Instant::now();
    let (mut mismatches, mut found) = (0, 0);
    let levels = [ratio(1, 10), ratio(1, 5), ratio(3, 10), ratio(2, 5), ratio(1, 2)];
    for seed in 0..50u64 {
        let n = 5 + (seed % 3) as usize;
        let sys = random_system(n, 3, &levels[(seed / 3 % 5) as usize], seed).unwrap();
        let out = find_rainbow_hamilton(&sys, &SearchConfig::default()).unwrap();
        let expected = brute_force_rainbow(&sys);
        let solver_found = match out.status {
            SearchStatus::Found => verify_hamilton(&sys, out.cycle.as_ref().unwrap()),
            SearchStatus::Absent => false,
            SearchStatus::Exhausted => !expected,
        };
        found += usize::from(expected);
        if solver_found != expected || (out.status == SearchStatus::Exhausted) {
            mismatches += 1;
        }
    }
    let ok = mismatches == 0 && within(start, Duration::from_secs(300));
    verdict(ok, format!("50 systems, {found} with a cycle, {mismatches} mismatches, {:.1?}", start.elapsed()))
}

fn completeness_witness() -> Verdict {
    let start = Instant::now();
    let mut all = true;
    for n in 5..=9 {
        let sys = complete_system(n, 3).unwrap();
        let out = find_rainbow_hamilton(&sys, &SearchConfig::default()).unwrap();
        all &= out.status == SearchStatus::Found
            && out.cycle.as_ref().is_some_and(|c| verify_hamilton(&sys, c) && replay_hamilton(&sys, c));
    }
    verdict(all && within(start, Duration::from_secs(10)), format!("n = 5..9, {:.1?}", start.elapsed()))
}

fn kruskal_katona() -> Verdict {
    let start = Instant::now();
    let mut violations = 0;
    let mut checked = 0;
    for g in all_graphs(6) {
        let report = kruskal_katona_shadow(&g, None).unwrap();
        let e = g.edge_count();
        let covered = (0..6).filter(|&v| g.edges().iter().any(|ed| ed.contains(&v))).count();
        // e ≥ C(x,2) ⟹ covered ≥ x for x ≥ 2, at every integer and at the real root
        let integral = (2..=6usize).all(|x| e < x * x.saturating_sub(1) / 2 || covered >= x);
        let real = e == 0 || covered * (covered.max(1) - 1) >= 2 * e;
        checked += 1;
        if report.covered != covered || !integral || !real || !report.lovasz_holds {
            violations += 1;
        }
    }
    let ok = checked == 1 << 15 && violations == 0 && within(start, Duration::from_secs(60));
    verdict(ok, format!("{checked} graphs on 6 vertices, {violations} violations, {:.1?}", start.elapsed()))
}

fn matching_sandwich() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=12);
        let p: f64 = rng.gen_range(0.1..0.8);
        let g = KGraph::new(n, 2, (0..n).combinations(2).filter(|_| rng.gen_bool(p))).unwrap();
        let nu = int(matching_number(&g) as i64);
        let m = max_fractional_matching_with(&g, &uniform_weights(n), Arithmetic::Exact).unwrap();
        let nu_star = m.size();
        if !(nu <= nu_star && nu_star <= &nu * ratio(3, 2)) || !m.exact {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("200 graphs, {violations} violations"))
}

fn lift() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    for case in 0..20 {
        let colors = 2 + case % 3;
        let n = 3 * colors;
        let mut edges = Vec::new();
        for c in 0..colors {
            let mut perm: Vec<Point> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            for chunk in perm.chunks(3) {
                edges.push((c, chunk.to_vec()));
            }
            for e in (0..n).combinations(3) {
                if rng.gen_bool(0.05) {
                    edges.push((c, e));
                }
            }
        }
        let r = OneKGraph::new(colors, n, 3, edges).unwrap();
        let b = uniform_weights(n);
        let per_color: Vec<_> = (0..colors)
            .map(|c| max_fractional_matching_with(&r.link(c, &[]).unwrap(), &b, Arithmetic::Exact).unwrap())
            .collect();
        let m = per_color[0].size();
        let Ok(lifted) = lift_link_matchings(&r, &per_color, &b) else {
            violations += 1;
            continue;
        };
        // loads recomputed from the lifted edges: points ≤ 1, colors ≤ 1
        let w = &lifted.matching;
        let mut load = vec![Ratio::default(); n + colors];
        let mut size = Ratio::default();
        for (e, x) in w.edges.iter().zip(&w.weights) {
            size += x;
            for &v in e {
                load[v] += x;
            }
            let color = e.iter().copied().find(|&v| v >= n);
            let pts: Vec<Point> = e.iter().copied().filter(|&v| v < n).collect();
            if color.is_none_or(|c| !r.contains(c - n, &pts)) {
                violations += 1;
            }
        }
        let loads_ok = load.iter().all(|l| *l <= int(1));
        if !loads_ok || size != &m / int(3) || lifted.size != size {
            violations += 1;
        }
    }
    verdict(violations == 0, format!("20 instances, {violations} violations"))
}

fn closed_walks() -> Verdict {
    let mut failures = 0;
    let mut checked = 0;
    let levels = [ratio(1, 2), ratio(3, 5), ratio(7, 10), ratio(4, 5)];
    for seed in 0..50u64 {
        let n = 5 + (seed % 3) as usize;
        let r = system_to_onek(&random_system(n, 3, &levels[(seed % 4) as usize], 100 + seed).unwrap());
        let family = build_max_vicinity(&r).unwrap();
        let h = generate_family(&r, &family).unwrap();
        for vic in family.iter().filter(|v| color_v123(v)) {
            checked += 1;
            match closed_walk_one_mod_k(&h, vic) {
                Ok(w) => {
                    let walk = &w.walk;
                    let ok = walk.closed && walk.len() % 3 == 1 && replay_walk(&h, walk) && replay_walk(&r, walk);
                    failures += usize::from(!ok);
                }
                Err(_) => failures += 1,
            }
        }
    }
    verdict(checked > 0 && failures == 0, format!("50 instances, {checked} colors with V1-V3, {failures} failures"))
}

fn random_walk(g: &OneKGraph, rng: &mut ChaCha8Rng, steps: usize) -> Option<SeqWalk> {
    let edges: Vec<(usize, Vec<Point>)> = g.edges().map(|(c, e)| (c, e.to_vec())).collect();
    if edges.is_empty() {
        return None;
    }
    let (c, mut pts) = edges[rng.gen_range(0..edges.len())].clone();
    for i in (1..pts.len()).rev() {
        pts.swap(i, rng.gen_range(0..=i));
    }
    let mut colors = vec![c];
    for _ in 0..steps {
        let tail = &pts[pts.len() - 2..];
        let options: Vec<(usize, Point)> = edges
            .iter()
            .filter(|(_, e)| tail.iter().all(|v| e.contains(v)))
            .map(|(c, e)| (*c, *e.iter().find(|v| !tail.contains(v)).unwrap()))
            .collect();
        if options.is_empty() {
            break;
        }
        let (c, p) = options[rng.gen_range(0..options.len())];
        colors.push(c);
        pts.push(p);
    }
    Some(SeqWalk::open(colors, pts))
}

fn shortening() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = 0;
    let mut done = 0;
    let mut seed = 0;
    while done < 1000 {
        seed += 1;
        let t = rng.gen_range(4..=8);
        let g = system_to_onek(&random_system(t, 3, &ratio(1, 2), seed).unwrap());
        let steps = rng.gen_range(1..=300);
        let Some(w) = random_walk(&g, &mut rng, steps) else { continue };
        done += 1;
        let Ok(s) = shorten_walk(&g, &w) else {
            failures += 1;
            continue;
        };
        let k = 3;
        let bound = k * t.pow(k as u32 + 1);
        let ends = s.start_tuple(k) == w.start_tuple(k) && s.end_tuple(k) == w.end_tuple(k);
        let ok = ends && s.len() % k == w.len() % k && s.len() <= w.len() && s.len() <= bound && replay_walk(&g, &s);
        failures += usize::from(!ok);
    }
    verdict(failures == 0, format!("{done} walks, {failures} failures"))
}

fn check_two_graph(g: &KGraph) -> bool {
    let Ok(witnesses) = check_strong_connectivity(g) else { return false };
    let directed: Vec<(Point, Point)> = g.edges().iter().flat_map(|e| [(e[0], e[1]), (e[1], e[0])]).collect();
    if witnesses.len() != directed.len() * directed.len() {
        return false;
    }
    let pairs_ok = directed.iter().cartesian_product(&directed).all(|(a, b)| {
        witnesses.iter().any(|w| {
            w.from == *a && w.to == *b && {
                let p = &w.walk;
                p.len() >= 2
                    && (p[0], p[1]) == *a
                    && (p[p.len() - 2], p[p.len() - 1]) == *b
                    && is_graph_walk(g, p, false)
            }
        })
    });
    let start = g.edges()[0][0];
    let odd = odd_closed_tight_walk(g, start)
        .is_ok_and(|w| w.len() % 2 == 1 && w.contains(&start) && is_graph_walk(g, &w, true));
    pairs_ok && odd
}

fn strong_connectivity() -> Verdict {
    let (mut checked, mut failures) = (0, 0);
    let mut run = |g: KGraph| {
        if edges_connected(&g) && has_triangle(&g) {
            checked += 1;
            failures += usize::from(!check_two_graph(&g));
        }
    };
    for n in 3..=6 {
        all_graphs(n).for_each(&mut run);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..400 {
        let n = 7 + i % 2;
        let p: f64 = rng.gen_range(0.2..0.9);
        run(KGraph::new(n, 2, (0..n).combinations(2).filter(|_| rng.gen_bool(p))).unwrap());
    }
    verdict(failures == 0 && checked > 0, format!("{checked} connected graphs with a triangle, {failures} failures"))
}

fn x_trap() -> Verdict {
    let start = Instant::now();
    let mut all = true;
    for (n, x) in [(9, 2), (9, 3), (12, 2), (12, 3)] {
        let sys = if 3 * x < n { xy_obstruction(n, x) } else { xy_obstruction_unchecked(n, x) }.unwrap();
        let xs: Vec<Point> = (0..x).collect();
        let predicate = sys
            .graphs()
            .iter()
            .all(|g| g.edges().iter().all(|e| e.iter().filter(|v| xs.contains(v)).count() != 2));
        all &= predicate && check_x_trap(&sys, &xs).unwrap().holds;
    }
    verdict(all && within(start, Duration::from_secs(30)), format!("n ∈ {{9, 12}}, |X| ∈ {{2, 3}}, {:.1?}", start.elapsed()))
}

fn vicinity_to_framework() -> Verdict {
    let start = Instant::now();
    let r = OneKGraph::complete(21, 21, 3);
    let (gamma, delta) = (ratio(1, 100), ratio(5, 9));
    let family = build_max_vicinity(&r).unwrap();
    let v = verify_vicinity(&r, &family, &gamma, &delta).unwrap();
    let h = generate_family(&r, &family).unwrap();
    let f = verify_framework(&h, &ratio(1, 20), &gamma, &delta, &FrameworkOptions::default()).unwrap();
    let ok = v.holds() && f.f1_holds() && f.f2_holds() && f.f3_holds() && f.f5_holds();
    let ok = ok && within(start, Duration::from_secs(120));
    verdict(
        ok,
        format!(
            "V1-V6 {}, F1 {} F2 {} F3 {} F5 {}, {:.1?}",
            v.holds(),
            f.f1_holds(),
            f.f2_holds(),
            f.f3_holds(),
            f.f5_holds(),
            start.elapsed()
        ),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_rhk")).current_dir(dir).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_cli(d, &["gen", "random", "--n", "7", "--k", "3", "--target", "0.5", "--seed", "11", "--output", "r7.json"]);
    run_cli(d, &["gen", "random", "--n", "9", "--k", "3", "--target", "0.6", "--seed", "12", "--output", "r9.json"]);
    run_cli(d, &["gen", "complete", "--n", "9", "--k", "3", "--output", "c9.json"]);
    let matrix: Vec<Vec<&str>> = vec![
        vec!["gen", "random", "--n", "8", "--k", "3", "--target", "5/9", "--seed", "3"],
        vec!["gen", "random", "--n", "8", "--k", "3", "--target", "5/9", "--seed", "3", "--jobs", "4"],
        vec!["gen", "xy", "--n", "12", "--x-size", "3", "--trap", "--seed", "1"],
        vec!["solve", "--input", "r7.json", "--seed", "1"],
        vec!["solve", "--input", "r7.json", "--exact", "--seed", "1", "--jobs", "3"],
        vec!["probe", "--n", "6", "--grid", "0.3:0.6:0.1", "--trials", "3", "--seed", "5"],
        vec!["match", "--input", "c9.json", "--mode", "robust", "--gamma", "0.1", "--seed", "2"],
        vec!["vicinity", "verify", "--input", "c9.json", "--gamma", "0.01", "--delta", "5/9", "--seed", "2"],
        vec!["framework", "verify", "--input", "c9.json", "--gamma", "0.01", "--delta", "5/9", "--seed", "2"],
        vec!["pipeline", "run", "--input", "r9.json", "--alpha", ".05", "--gamma", ".02", "--delta", ".5556", "--seed", "9"],
        vec!["absorb", "gadget", "--k", "3", "--seed", "4"],
        vec!["connect", "check", "--input", "r7.json", "--color", "2", "--seed", "4"],
    ];
    let mut differing = Vec::new();
    for args in &matrix {
        let a = run_cli(d, args);
        let b = run_cli(d, args);
        if a != b || a.1.is_empty() {
            differing.push(args.join(" "));
        }
    }
    verdict(differing.is_empty(), format!("{} invocations, differing: {:?}", matrix.len(), differing))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("solver agrees with brute force on 50 random systems", oracle_solver),
        ("complete systems n = 5..9 have verified cycles", completeness_witness),
        ("Lovász form of Kruskal-Katona on all graphs of order 6", kruskal_katona),
        ("ν ≤ ν* ≤ 1.5ν on 200 random graphs", matching_sandwich),
        ("lifted link matchings respect loads with size m/k", lift),
        ("V1-V3 colors yield closed walks of length 1 mod k", closed_walks),
        ("walk shortening keeps ends and residue within the bound", shortening),
        ("strong connectivity witnesses and odd closed walks", strong_connectivity),
        ("X/Y obstruction traps tight paths in X", x_trap),
        ("complete (1,3)-graph at t = 21 passes V1-V6 and F1, F2, F3, F5", vicinity_to_framework),
        ("seeded CLI runs are byte-identical", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let v = check();
        println!("acceptance {:>2} {}: {name} ({})", i + 1, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("acceptance: {} of 11 passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
