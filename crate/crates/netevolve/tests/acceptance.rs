//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails.
//!
//!   cargo test -p netevolve --test acceptance

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use netevolve::evolution::{
    classify_small_world, correlate_attachment, pearson, spearman, static_attributes, Proxy, ProxyRow,
    SmallWorldThresholds, DEFAULT_STATIC_TOLERANCE,
};
use netevolve::generators::{generate, generate_events, GeneratorSpec, SeededRng};
use netevolve::graph::{build_cumulative_snapshots, GraphBuilder};
use netevolve::ingest::{expand_publications, write_edge_events, InputKind, PublicationRecord};
use netevolve::metrics::{degree_histogram, density_weighted, path_stats, MetricsRow};
use netevolve::powerlaw::{fit_loglog, fit_powerlaw, PowerLawFit};
use netevolve::report::{run_analysis_on, write_csv, write_json, AnalysisConfig, Slicing};
use netevolve::{ActorId, GraphSnapshot, Timestamp};

use common::{clique_pair_counts, path_oracle, pearson_oracle, random_corpus, random_graph, spearman_oracle};

type Outcome = Result<String, String>;

/// Name, check and optional time budget of one criterion.
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `n` actors and one pair carrying all `w` interactions.
fn graph_with_counts(n: usize, w: u64) -> GraphSnapshot {
    let mut b = GraphBuilder::new();
    let ids: Vec<ActorId> = (0..n).map(|i| ActorId::new(format!("a{i:04}")).unwrap()).collect();
    for id in &ids {
        b.add_actor(id.clone());
    }
    b.add_interaction(&ids[0], &ids[1], w).unwrap();
    b.build("fixture")
}

fn density_formula() -> Outcome {
    let expected = [(43, 73, 8.08), (58, 153, 9.26), (76, 213, 7.47), (98, 286, 6.02)];
    let mut got = Vec::new();
    for (n, w, pct) in expected {
        let d = 100.0 * density_weighted(&graph_with_counts(n, w)).map_err(|e| e.to_string())?;
        ensure((d - pct).abs() <= 0.005, || format!("N={n} W={w}: {d:.4}% vs {pct}%"))?;
        got.push(format!("{d:.2}"));
    }
    let d = 100.0 * density_weighted(&graph_with_counts(818, 1580)).map_err(|e| e.to_string())?;
    let rounded = format!("{d:.1}");
    ensure(rounded == "0.5", || format!("N=818 W=1580: {d:.4}% rounds to {rounded}"))?;
    Ok(format!("{}%; 818/1580 -> {rounded}%", got.join("%, ")))
}

fn path_stat_oracle() -> Outcome {
    let mut rng = SeededRng::new(2024);
    let mut checked = 0;
    for g in 0..200 {
        let s = random_graph(&mut rng, 100);
        match (path_stats(&s).ok(), path_oracle(&s)) {
            (None, None) => {}
            (Some(p), Some((diameter, avg))) => {
                ensure(p.diameter == diameter, || {
                    format!("graph {g} ({}): diameter {} vs oracle {diameter}", s.label(), p.diameter)
                })?;
                ensure((p.avg_distance - avg).abs() <= 1e-9, || {
                    format!("graph {g} ({}): avg distance {} vs oracle {avg}", s.label(), p.avg_distance)
                })?;
                checked += 1;
            }
            (p, o) => return Err(format!("graph {g} ({}): definedness differs {p:?} vs {o:?}", s.label())),
        }
    }
    Ok(format!("200 graphs, {checked} with edges, all equal to Floyd-Warshall"))
}

fn powerlaw_recovery() -> Outcome {
    let ks = [1usize, 2, 4, 8, 16];
    let check = |fit: PowerLawFit, lambda0: f64, what: &str| {
        ensure((fit.lambda - lambda0).abs() <= 1e-9 && (fit.r_squared - 1.0).abs() <= 1e-9, || {
            format!("{what} lambda0={lambda0}: lambda {} r2 {}", fit.lambda, fit.r_squared)
        })
    };
    for lambda0 in [1.0, 1.5, 2.0, 3.0] {
        let c = 4096.0;
        let points: Vec<(f64, f64)> = ks
            .iter()
            .map(|&k| ((k as f64).log10(), (c * (k as f64).powf(-lambda0)).log10()))
            .collect();
        check(fit_loglog(&points).map_err(|e| e.to_string())?, lambda0, "points")?;
        // integer exponents give integer counts, so the histogram path applies too
        if lambda0.fract() == 0.0 {
            let hist: BTreeMap<usize, usize> = ks.iter().map(|&k| (k, 4096 / k.pow(lambda0 as u32))).collect();
            check(fit_powerlaw(&hist).map_err(|e| e.to_string())?, lambda0, "histogram")?;
        }
    }
    Ok("lambda0 in {1, 1.5, 2, 3} recovered, r2 = 1".into())
}

fn ba_scale_free() -> Outcome {
    let (n, m) = (5000usize, 3usize);
    let edges = m * (m + 1) / 2 + (n - m - 1) * m;
    let p = edges as f64 / (n * (n - 1) / 2) as f64;
    let mut ba_beats_er = 0;
    let mut summary = Vec::new();
    for seed in 1..=5u64 {
        let ba = generate(&GeneratorSpec::ba(n, m, seed)).map_err(|e| e.to_string())?;
        let er = generate(&GeneratorSpec::er(n, p, seed)).map_err(|e| e.to_string())?;
        let fb = fit_powerlaw(&degree_histogram(&ba)).map_err(|e| e.to_string())?;
        let fe = fit_powerlaw(&degree_histogram(&er)).map_err(|e| e.to_string())?;
        ensure((1.5..=3.5).contains(&fb.lambda) && fb.r_squared > 0.7, || {
            format!("seed {seed}: BA lambda {:.3} r2 {:.3}", fb.lambda, fb.r_squared)
        })?;
        if fe.r_squared < fb.r_squared {
            ba_beats_er += 1;
        }
        summary.push(format!("{:.2}/{:.2}|{:.2}", fb.lambda, fb.r_squared, fe.r_squared));
    }
    ensure(ba_beats_er >= 4, || format!("BA r2 above ER in only {ba_beats_er}/5 seeds"))?;
    Ok(format!(
        "BA lambda/r2|ER r2 per seed: {}; BA fits better in {ba_beats_er}/5",
        summary.join(", ")
    ))
}

fn row(label: &str, n: usize, links: usize, sum: u64, clustering: f64, diameter: usize) -> MetricsRow {
    let mut r = MetricsRow::counts(label, n, links, sum);
    let pairs = (n * (n - 1)) as f64;
    r.density_weighted = Some(2.0 * sum as f64 / pairs);
    r.density_simple = Some(2.0 * links as f64 / pairs);
    r.clustering = Some(clustering);
    r.diameter = Some(diameter);
    r
}

fn small_world_verdicts() -> Outcome {
    let t = SmallWorldThresholds::default();
    // R^2 is not tabulated; "good fit" is taken as 0.9
    let fit = |lambda: f64| PowerLawFit {
        lambda,
        intercept: 0.0,
        r_squared: 0.9,
        n_points: 10,
    };
    let academic = row("2010", 10130, 22962, 23730, 0.76, 9);
    let kilmore = row("T1-T4", 98, 153, 286, 0.17, 5);
    let va = classify_small_world(&academic, Some(&fit(2.06)), &t);
    let vk = classify_small_world(&kilmore, Some(&fit(1.11)), &t);
    ensure(va.verdict == Some(true), || format!("2010 row: {va:?}"))?;
    ensure(vk.verdict == Some(false), || format!("T1-T4 row: {vk:?}"))?;
    ensure(vk.failing_flags() == ["clustering_high"], || {
        format!("T1-T4 fails on {:?}, expected clustering only", vk.failing_flags())
    })?;
    Ok("2010 -> small world; T1-T4 -> not small world (clustering)".into())
}

fn static_detection() -> Outcome {
    let actors = [818, 1466, 2168, 3220, 4005, 5320, 6623, 7992, 9021, 10130];
    let links = [1571, 2859, 3792, 6409, 8307, 10852, 14334, 17435, 20259, 22962];
    let sums = [1580, 2903, 3849, 6513, 8476, 11040, 14568, 17735, 20985, 23730];
    let clustering = [0.79, 0.75, 0.72, 0.74, 0.74, 0.74, 0.74, 0.75, 0.76, 0.76];
    let diameter = [3, 3, 3, 3, 3, 4, 5, 8, 8, 9];
    let rows: Vec<MetricsRow> = (0..10)
        .map(|i| row(&(2001 + i).to_string(), actors[i], links[i], sums[i], clustering[i], diameter[i]))
        .collect();
    let attrs = static_attributes(&rows, DEFAULT_STATIC_TOLERANCE).map_err(|e| e.to_string())?;
    let find = |name: &str| {
        attrs
            .iter()
            .find(|a| a.metric == name)
            .ok_or_else(|| format!("{name} missing from static attributes"))
    };
    let c = find("clustering")?;
    let d = find("density_weighted")?;
    ensure(c.is_static, || format!("clustering not static: {c:?}"))?;
    ensure(!d.is_static, || format!("weighted density static: {d:?}"))?;
    Ok(format!(
        "clustering range {:.3} <= {:.3}; weighted density range {:.5} > {:.5}",
        c.range,
        DEFAULT_STATIC_TOLERANCE * c.mean,
        d.range,
        DEFAULT_STATIC_TOLERANCE * d.mean
    ))
}

fn clique_expansion() -> Outcome {
    let mut rng = SeededRng::new(7);
    for corpus_no in 0..100 {
        let corpus = random_corpus(&mut rng, 50, 8, 40);
        let records: Vec<PublicationRecord> = corpus
            .iter()
            .enumerate()
            .map(|(i, authors)| PublicationRecord::new(i.to_string(), Timestamp::Period(0), authors).unwrap())
            .collect();
        let interactions = expand_publications(&records);
        let built = build_cumulative_snapshots(&interactions.events, &[Timestamp::Period(0)], &["all".into()])
            .map_err(|e| e.to_string())?;
        let s = &built.snapshots[0];
        let expected = clique_pair_counts(&corpus);
        let got: BTreeMap<(String, String), u64> = s
            .edges()
            .map(|(i, j, w)| ((s.actor(i).to_string(), s.actor(j).to_string()), w))
            .collect();
        ensure(got == expected, || format!("corpus {corpus_no}: pair weights differ"))?;
        ensure(s.n_links() == expected.len(), || format!("corpus {corpus_no}: link count"))?;
        ensure(s.sum_links() == expected.values().sum::<u64>(), || format!("corpus {corpus_no}: weight sum"))?;
    }
    Ok("100 corpora match the pairwise counter".into())
}

fn planted_driver_fixture() -> (Vec<ProxyRow>, Vec<MetricsRow>) {
    let mut rng = SeededRng::new(99);
    let mut proxies = Vec::new();
    let mut rows = Vec::new();
    for t in 0..10 {
        let label = format!("P{t}");
        let c = 0.2 + 0.05 * t as f64 + 0.01 * rng.next_f64();
        let mut r = MetricsRow::counts(&label, 100, 200, 300);
        r.centralization_degree = Some(c);
        r.centralization_betweenness = Some(rng.next_f64());
        r.centralization_closeness = Some(rng.next_f64());
        rows.push(r);
        proxies.push(ProxyRow {
            label,
            pref_attachment: Some(1.0 + rng.next_f64()),
            homophily: Some(rng.next_f64() - 0.5),
            // the planted driver: an increasing function of centralization
            embedding: Some(3.0 * c * c + 1.0),
            multi_connectivity: Some(5.0 + 2.0 * rng.next_f64()),
        });
    }
    (proxies, rows)
}

fn correlation_routines() -> Outcome {
    let mut rng = SeededRng::new(11);
    let mut worst: f64 = 0.0;
    for series in 0..100 {
        let n = 3 + rng.below(60) as usize;
        let x: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        // some ties in y to exercise average ranks
        let y: Vec<f64> = (0..n).map(|_| (rng.next_f64() * 8.0).floor()).collect();
        let (Ok(p), Ok(s)) = (pearson(&x, &y), spearman(&x, &y)) else {
            continue;
        };
        let (po, so) = (pearson_oracle(&x, &y), spearman_oracle(&x, &y));
        worst = worst.max((p - po).abs()).max((s - so).abs());
        ensure((p - po).abs() <= 1e-12, || format!("series {series}: pearson {p} vs {po}"))?;
        ensure((s - so).abs() <= 1e-12, || format!("series {series}: spearman {s} vs {so}"))?;

        let fx: Vec<f64> = x.iter().map(|v| (3.0 * v).exp() + v.powi(3)).collect();
        let gy: Vec<f64> = y.iter().map(|v| (v + 1.0).ln()).collect();
        let st = spearman(&fx, &gy).map_err(|e| e.to_string())?;
        ensure(st == s, || format!("series {series}: spearman after transforms {st} vs {s}"))?;
        let neg: Vec<f64> = gy.iter().map(|v| -v).collect();
        let sr = spearman(&fx, &neg).map_err(|e| e.to_string())?;
        ensure((sr + s).abs() <= 1e-12, || format!("series {series}: reversed spearman {sr} vs {}", -s))?;
    }
    let (proxies, rows) = planted_driver_fixture();
    let report = correlate_attachment(&proxies, &rows).map_err(|e| e.to_string())?;
    ensure(report.ranked_drivers.first() == Some(&Proxy::Embedding), || {
        format!("ranking {:?}", report.ranked_drivers)
    })?;
    Ok(format!(
        "max |error| {worst:.1e} over 100 series; monotone invariance exact; planted driver ranked first"
    ))
}

fn analysis_bytes(config: &AnalysisConfig, input: &[u8]) -> Result<(Vec<u8>, Vec<u8>), String> {
    let bundle = run_analysis_on(config, input).map_err(|e| e.to_string())?;
    let (mut json, mut csv) = (Vec::new(), Vec::new());
    write_json(&bundle, &mut json).map_err(|e| e.to_string())?;
    write_csv(&bundle, &mut csv).map_err(|e| e.to_string())?;
    Ok((json, csv))
}

fn determinism() -> Outcome {
    let events = generate_events(&GeneratorSpec::ba(1500, 2, 5)).map_err(|e| e.to_string())?;
    let mut input = Vec::new();
    write_edge_events(&mut input, &events, &[]).map_err(|e| e.to_string())?;
    let breakpoints = (1..=6).map(|k| Timestamp::Period(250 * k)).collect();
    let mut config = AnalysisConfig::new("ba.csv", InputKind::Events, Slicing::Breakpoints(breakpoints));

    config.threads = Some(1);
    let first = analysis_bytes(&config, &input)?;
    let second = analysis_bytes(&config, &input)?;
    ensure(first == second, || "two single-thread runs differ".into())?;
    let threads = std::thread::available_parallelism().map_or(4, |n| n.get()).max(4);
    config.threads = Some(threads);
    let parallel = analysis_bytes(&config, &input)?;
    ensure(first == parallel, || format!("1 vs {threads} threads differ"))?;
    Ok(format!(
        "JSON ({} B) and CSV ({} B) identical across runs and 1 vs {threads} threads",
        first.0.len(),
        first.1.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("density formula reproduction", density_formula, None),
        ("path-stat oracle equivalence", path_stat_oracle, Some(Duration::from_secs(30))),
        ("exact power-law recovery", powerlaw_recovery, None),
        ("BA scale-free detection", ba_scale_free, Some(Duration::from_secs(60))),
        ("small-world verdict reproduction", small_world_verdicts, None),
        ("static-attribute detection", static_detection, None),
        ("clique expansion correctness", clique_expansion, None),
        ("correlation routines", correlation_routines, None),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(limit)) = (&outcome, budget) {
            if elapsed > *limit {
                outcome = Err(format!("took {elapsed:.1?}, budget {limit:?}"));
            }
        }
        match outcome {
            Ok(detail) => println!("PASS  {}. {name} [{elapsed:.2?}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL  {}. {name} [{elapsed:.2?}]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
