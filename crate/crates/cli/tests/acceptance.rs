//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test -p tactics-cli --test acceptance -- --nocapture`
//! to see them).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;
use tactics_core::coverage::{across_coverage, coverage_pair, objective};
use tactics_core::encoder::validate_annotations;
use tactics_core::fixtures::{template_ladder, EXPECTED_COVERAGE_FILE};
use tactics_core::gateway::{
    Gateway, GatewayConfig, GatewayError, ScriptedTransport, TransportFailure,
};
use tactics_core::miner::{beam_search, exhaustive_search, MinerConfig};
use tactics_core::pattern::{build_compound, oracle_match, CompoundPattern};
use tactics_core::stats::{krippendorff_alpha, rank_correlation, RatingsMatrix};
use tactics_core::synth::{generate_corpus, NoiseConfig};
use tactics_core::{parse_sequence, MatchResult, ResponseRecord, Tactic, TacticSequence, WriterClass};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tactics"))
}

fn fixtures_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn letters(s: &str) -> Vec<Tactic> {
    s.chars().map(|c| Tactic::from_letter(c).unwrap()).collect()
}

fn synth_sequences(corpus: &tactics_core::Corpus) -> Vec<TacticSequence> {
    corpus
        .responses()
        .iter()
        .map(|r| match r {
            ResponseRecord::Encoded(e) => e.sequence.clone(),
            ResponseRecord::Annotated(_) => unreachable!("synth emits encoded records"),
        })
        .collect()
}

/// Criterion 1: the production matcher and the exhaustive oracle agree on
/// matched-flag and length for all 137,257 sequences of length <= 6 over
/// {P,V,A,I,X,E,R}, for each ladder rung and each compound, in under 60 s.
#[test]
fn criterion_1_matcher_oracle_equivalence() {
    let start = Instant::now();
    let alphabet = letters("PVAIXER");
    let mut sequences: Vec<Vec<Tactic>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<Tactic>> = vec![Vec::new()];
    for _ in 0..6 {
        let mut next = Vec::with_capacity(frontier.len() * alphabet.len());
        for prefix in &frontier {
            for &t in &alphabet {
                let mut s = prefix.clone();
                s.push(t);
                next.push(s);
            }
        }
        sequences.extend(next.iter().cloned());
        frontier = next;
    }
    assert_eq!(sequences.len(), 137_257);

    let ladder = template_ladder();
    let mut targets: Vec<(String, CompoundPattern)> = Vec::new();
    for (k, rung) in ladder.iter().enumerate() {
        targets.push((format!("rung {}", k + 1), CompoundPattern::from(rung.clone())));
        targets.push((format!("compound {}", k + 1), build_compound(&ladder[..=k]).unwrap()));
    }
    assert_eq!(targets.len(), 10);

    let mut disagreements = 0usize;
    for (name, pattern) in &targets {
        for seq in &sequences {
            let fast = pattern.match_prefix(seq);
            let slow = oracle_match(pattern, seq).unwrap();
            if fast != slow {
                disagreements += 1;
                eprintln!("{name} disagrees on {seq:?}: {fast:?} vs {slow:?}");
            }
        }
    }
    let elapsed = start.elapsed();
    assert_eq!(disagreements, 0);
    assert!(elapsed.as_secs() < 60, "equivalence sweep took {elapsed:?}");
    println!(
        "ACCEPTANCE PASS 1: matcher/oracle equivalence on 10 x 137,257 sequences, \
         0 disagreements in {elapsed:.2?}"
    );
}

/// Criterion 2: `match` on the fixture corpus reproduces the checked-in
/// oracle-computed report byte for byte, and the named per-example values
/// hold.
#[test]
fn criterion_2_fixture_table_mechanics() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("coverage.json");
    let status = bin()
        .args(["match", "--corpus"])
        .arg(fixtures_dir().join("corpus.jsonl"))
        .arg("--patterns")
        .arg(fixtures_dir().join("table3.pat"))
        .args(["--group-by", "writer", "--format", "json", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let produced = std::fs::read_to_string(&out).unwrap();
    assert_eq!(produced, EXPECTED_COVERAGE_FILE, "match output drifted from expectations");

    let ladder = template_ladder();
    let rung1 = &ladder[0];
    let m = rung1.match_prefix(&letters("PVAIV"));
    assert_eq!(m, MatchResult::Matched { length: 4 });
    assert_eq!(m.length().unwrap() as f64 / 5.0, 0.8);
    assert_eq!(
        rung1.match_prefix(&letters("XPVEAIP")),
        MatchResult::Matched { length: 7 }
    );
    assert_eq!(rung1.match_prefix(&letters("QPV")), MatchResult::NoMatch);
    let row2 = build_compound(&ladder[..2]).unwrap();
    assert_eq!(row2.match_prefix(&letters("PVA")), MatchResult::Matched { length: 3 });
    assert_eq!(ladder[1].match_prefix(&letters("PVA")), MatchResult::NoMatch);
    println!("ACCEPTANCE PASS 2: fixture coverage table reproduced exactly, examples verified");
}

/// Criterion 3: across coverage is nonincreasing down the compound ladder
/// on 200 randomly generated corpora.
#[test]
fn criterion_3_compound_monotonicity() {
    let ladder = template_ladder();
    let mut corpora = 0usize;
    let mut violations = 0usize;
    for seed in 0..200u64 {
        let noise = NoiseConfig {
            prefix_noise_prob: [0.0, 0.1, 0.25, 0.4][(seed % 4) as usize],
            tail_len_geometric: [0.0, 0.2, 0.5][(seed % 3) as usize],
            max_repeat: 3,
            seed,
        };
        let planted = &ladder[(seed % 5) as usize];
        let corpus = generate_corpus(planted, &noise, 50).unwrap();
        let group = synth_sequences(&corpus);
        let mut prev = f64::INFINITY;
        for k in 0..ladder.len() {
            let compound = build_compound(&ladder[..=k]).unwrap();
            let across = across_coverage(&compound, &group).unwrap();
            if across > prev {
                violations += 1;
                eprintln!("seed {seed}: across rose at rung {}", k + 1);
            }
            prev = across;
        }
        corpora += 1;
    }
    assert_eq!(corpora, 200);
    assert_eq!(violations, 0);
    println!("ACCEPTANCE PASS 3: across coverage nonincreasing on 200 corpora, 0 violations");
}

/// Criterion 4: on 1,000 sequences planted from rung 1 with prefix noise
/// 0.1 (seed 7), the mined ladder's best objective reaches the planted
/// pattern's own objective, and the planted pattern's across coverage is
/// within 0.02 of 0.9.
#[test]
fn criterion_4_planted_template_recovery() {
    let planted = &template_ladder()[0];
    let noise = NoiseConfig { prefix_noise_prob: 0.1, seed: 7, ..NoiseConfig::default() };
    let corpus = generate_corpus(planted, &noise, 1000).unwrap();
    let group = synth_sequences(&corpus);

    let across = across_coverage(planted, &group).unwrap();
    assert!(
        (across - 0.9).abs() <= 0.02,
        "planted across coverage {across} outside 0.9 +/- 0.02"
    );

    let (a, w) = coverage_pair(planted, &group).unwrap();
    let bar = objective(a, w.unwrap());
    let cfg = MinerConfig {
        beam_width: 10,
        max_atoms: 4,
        max_set_size: 4,
        ..MinerConfig::default()
    };
    let mined = beam_search(&group, &cfg).unwrap();
    assert!(
        mined.best.objective >= bar,
        "mined objective {} below planted bar {bar}",
        mined.best.objective
    );
    println!(
        "ACCEPTANCE PASS 4: planted template recovered (mined {:.4} >= planted {:.4}, across {:.3})",
        mined.best.objective, bar, across
    );
}

/// Criterion 5: with beam width >= candidate count, beam search reaches the
/// exhaustive optimum objective on 50 random small instances.
#[test]
fn criterion_5_beam_matches_exhaustive() {
    let alphabets = ["PVA", "XEA", "PIQ", "VRA", "XPV"];
    let mut agreements = 0usize;
    for instance in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + instance);
        let alphabet = letters(alphabets[(instance % 5) as usize]);
        let n = rng.gen_range(3..=8);
        let mut group: Vec<TacticSequence> = Vec::with_capacity(n);
        for _ in 0..n {
            let len = rng.gen_range(0..=5);
            let raw: String =
                (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())].code()).collect();
            group.push(parse_sequence(&raw).unwrap().sequence);
        }
        if group.iter().all(|s| s.is_empty()) {
            group.push(parse_sequence("P").unwrap().sequence);
        }
        // 3 letters -> at most 7 sets x 2 quantifiers = 14 candidates.
        let cfg = MinerConfig { beam_width: 14, max_atoms: 2, ..MinerConfig::default() };
        let exhaustive = exhaustive_search(&group, &cfg).unwrap();
        let beam = beam_search(&group, &cfg).unwrap();
        assert_eq!(
            beam.best.objective, exhaustive.objective,
            "instance {instance}: beam {} vs exhaustive {} ({})",
            beam.best.pattern, exhaustive.text, exhaustive.objective
        );
        agreements += 1;
    }
    assert_eq!(agreements, 50);
    println!("ACCEPTANCE PASS 5: beam reached the exhaustive optimum on all 50 instances");
}

/// Criterion 6: frozen statistics oracles and permutation invariance.
#[test]
fn criterion_6_statistics_oracles() {
    assert_eq!(rank_correlation(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap(), 0.5);

    let perfect: RatingsMatrix = vec![
        vec![Some(true), Some(false), Some(true), Some(false), Some(true)],
        vec![Some(true), Some(false), Some(true), Some(false), Some(true)],
    ];
    assert_eq!(krippendorff_alpha(&perfect).unwrap(), 1.0);

    // Direct-formula hand computation for the systematic disagreement
    // fixture r1: 1,1,0,0 / r2: 0,0,1,1 — an independent route to alpha.
    let fixture: RatingsMatrix = vec![
        vec![Some(true), Some(true), Some(false), Some(false)],
        vec![Some(false), Some(false), Some(true), Some(true)],
    ];
    let oracle_alpha = {
        // Every item has one 0 and one 1: observed disagreement Do is
        // (1/n) * sum_u 2*c0*c1/(m_u - 1) = 8/8; expected disagreement De
        // is 2*n0*n1 / (n(n-1)) = 32/56.
        let do_ = 8.0f64 / 8.0;
        let de = 32.0f64 / 56.0;
        1.0 - do_ / de
    };
    let alpha = krippendorff_alpha(&fixture).unwrap();
    assert!((alpha - oracle_alpha).abs() <= 1e-12);
    assert_eq!(alpha, -0.75);

    // Permutation invariance, 100 shuffles each.
    let base: RatingsMatrix = vec![
        vec![Some(true), Some(false), None, Some(true), Some(false), Some(true)],
        vec![Some(true), Some(true), Some(false), Some(true), None, Some(false)],
        vec![Some(false), Some(false), Some(false), Some(true), Some(true), Some(true)],
    ];
    let alpha0 = krippendorff_alpha(&base).unwrap();
    let xs = [0.9, 0.1, 0.5, 0.7, 0.3, 0.2];
    let ys = [0.8, 0.2, 0.4, 0.9, 0.1, 0.15];
    let rho0 = rank_correlation(&xs, &ys).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let mut raters: Vec<usize> = (0..base.len()).collect();
        let mut items: Vec<usize> = (0..base[0].len()).collect();
        shuffle(&mut raters, &mut rng);
        shuffle(&mut items, &mut rng);
        let permuted: RatingsMatrix = raters
            .iter()
            .map(|&r| items.iter().map(|&i| base[r][i]).collect())
            .collect();
        assert_eq!(krippendorff_alpha(&permuted).unwrap(), alpha0);

        let mut idx: Vec<usize> = (0..xs.len()).collect();
        shuffle(&mut idx, &mut rng);
        let px: Vec<f64> = idx.iter().map(|&i| xs[i]).collect();
        let py: Vec<f64> = idx.iter().map(|&i| ys[i]).collect();
        assert!((rank_correlation(&px, &py).unwrap() - rho0).abs() <= 1e-12);
    }
    println!("ACCEPTANCE PASS 6: statistics oracles exact, invariant under 100 permutations");
}

fn shuffle(indices: &mut [usize], rng: &mut ChaCha8Rng) {
    for i in (1..indices.len()).rev() {
        let j = rng.gen_range(0..=i);
        indices.swap(i, j);
    }
}

/// Criterion 7: `mine` and `synth` produce byte-identical outputs across
/// consecutive runs with identical flags.
#[test]
fn criterion_7_cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let synth_args = |out: &std::path::Path| {
        let mut cmd = bin();
        cmd.args([
            "synth",
            "--pattern",
            "^X?[PV]+ [XE]? [AIP]+",
            "--count",
            "300",
            "--prefix-noise",
            "0.15",
            "--tail",
            "0.3",
            "--seed",
            "21",
            "--out",
        ])
        .arg(out);
        cmd
    };
    let synth_a = dir.path().join("synth_a.jsonl");
    let synth_b = dir.path().join("synth_b.jsonl");
    assert!(synth_args(&synth_a).status().unwrap().success());
    assert!(synth_args(&synth_b).status().unwrap().success());
    let bytes_a = std::fs::read(&synth_a).unwrap();
    assert_eq!(bytes_a, std::fs::read(&synth_b).unwrap());
    assert!(!bytes_a.is_empty());

    let mine_args = |out: &std::path::Path| {
        let mut cmd = bin();
        cmd.args(["mine", "--corpus"])
            .arg(&synth_a)
            .args(["--beam", "8", "--max-atoms", "3", "--seed", "5", "--out"])
            .arg(out);
        cmd
    };
    let mine_a = dir.path().join("mine_a.json");
    let mine_b = dir.path().join("mine_b.json");
    assert!(mine_args(&mine_a).status().unwrap().success());
    assert!(mine_args(&mine_b).status().unwrap().success());
    let mined_bytes = std::fs::read(&mine_a).unwrap();
    assert_eq!(mined_bytes, std::fs::read(&mine_b).unwrap());
    assert!(!mined_bytes.is_empty());
    println!("ACCEPTANCE PASS 7: synth and mine outputs byte-identical across runs");
}

/// Criterion 8: gateway contract under the scripted mock — valid spans on
/// all 50 cases, designated errors for malformed output, unresolved quotes,
/// and retry exhaustion, and `--mock` works with no network or API key.
#[test]
fn criterion_8_gateway_contract() {
    let bank = [
        ("I'm so sorry this landed on you.", 'X'),
        ("It sounds like the week never let up.", 'P'),
        ("Anyone would be worn down by that.", 'V'),
        ("Maybe block out one quiet evening.", 'A'),
        ("The clinic line is open around the clock.", 'I'),
        ("You have handled harder things before.", 'E'),
    ];
    let mut texts = Vec::new();
    let mut replies = Vec::new();
    for case in 0..50usize {
        let k = case % 4 + 1;
        let picks: Vec<_> = (0..k).map(|j| bank[(case + j) % bank.len()]).collect();
        let text: String =
            picks.iter().map(|(s, _)| *s).collect::<Vec<_>>().join(" ");
        let items: Vec<String> = picks
            .iter()
            .map(|(s, t)| format!(r#"{{"quote": {}, "tactic": "{t}"}}"#, serde_json::to_string(s).unwrap()))
            .collect();
        texts.push(text);
        replies.push(Ok(format!("[{}]", items.join(", "))));
    }
    let transport = Arc::new(ScriptedTransport::new(replies));
    let gateway = Gateway::new(GatewayConfig::default(), transport.clone())
        .with_sleeper(Arc::new(|_| {}));
    let writer = WriterClass::new(2, "mock-tagger").unwrap();
    let mut valid = 0usize;
    for (case, text) in texts.iter().enumerate() {
        let tagged = gateway.tag_response(&format!("case-{case}"), writer.clone(), text).unwrap();
        assert!(validate_annotations(&tagged).is_empty());
        assert_eq!(tagged.spans.len(), case % 4 + 1);
        valid += 1;
    }
    assert_eq!(valid, 50);
    assert_eq!(transport.calls(), 50);

    // Designated errors.
    let g = |script| {
        Gateway::new(GatewayConfig { max_retries: 1, ..GatewayConfig::default() },
            Arc::new(ScriptedTransport::new(script)))
            .with_sleeper(Arc::new(|_| {}))
    };
    let err = g(vec![Ok("here you go: X everywhere".into())])
        .tag_response("m", writer.clone(), "text")
        .unwrap_err();
    assert!(matches!(err, GatewayError::MalformedModelOutput(_)));
    let err = g(vec![Ok(r#"[{"quote": "missing", "tactic": "V"}]"#.into())])
        .tag_response("u", writer.clone(), "text without that quote")
        .unwrap_err();
    assert!(matches!(err, GatewayError::UnresolvedQuote { .. }));
    let err = g(vec![
        Err(TransportFailure::new("down")),
        Err(TransportFailure::new("down")),
    ])
    .tag_response("t", writer.clone(), "text")
    .unwrap_err();
    assert!(matches!(err, GatewayError::Transport { attempts: 2, .. }));

    // --mock end to end: no API key, no network.
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("tag_input.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            r#"{"id":"a","writer":{"study":2,"source":"human"},"text":"It was a long week."}"#,
            "\n",
            r#"{"id":"b","writer":{"study":2,"source":"human"},"text":"Nobody noticed my work."}"#,
            "\n"
        ),
    )
    .unwrap();
    let out = dir.path().join("tagged.jsonl");
    let status = bin()
        .args(["tag", "--mock", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(&out)
        .env_remove("EMPATHY_GATEWAY_API_KEY")
        .status()
        .unwrap();
    assert!(status.success());
    let tagged = std::fs::read_to_string(&out).unwrap();
    assert_eq!(tagged.lines().count(), 2);

    // Without --mock the HTTP transport refuses to start without a key:
    // exit code 3, proving the mock path is the only offline one.
    let status = bin()
        .args(["tag", "--corpus"])
        .arg(&corpus)
        .arg("--out")
        .arg(dir.path().join("never.jsonl"))
        .env_remove("EMPATHY_GATEWAY_API_KEY")
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
    println!("ACCEPTANCE PASS 8: gateway contract holds on 50 mock cases and error paths");
}

/// Exit-code contract spot checks used throughout the suite.
#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    // Usage error: unknown flag.
    let status = bin().args(["stats", "--nonsense"]).status().unwrap();
    assert_eq!(status.code(), Some(1));
    // Data error: empty corpus.
    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let output = bin().args(["stats", "--corpus"]).arg(&empty).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("EmptyGroup"), "stderr: {stderr}");
    // Data error names the offending record id.
    let bad = dir.path().join("bad.jsonl");
    std::fs::write(
        &bad,
        r#"{"id":"broken","writer":{"study":1,"source":"h"},"text":"abc","spans":[{"start":0,"end":99,"tactic":"P"}]}"#,
    )
    .unwrap();
    let output = bin().args(["encode", "--corpus"]).arg(&bad).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("broken"));
}

/// The BTreeMap used for tag output is exercised elsewhere; this pins the
/// stats JSON surface: group object shape and letter-keyed prevalence.
#[test]
fn stats_json_surface_is_stable() {
    let output = bin()
        .args(["stats", "--corpus"])
        .arg(fixtures_dir().join("corpus.jsonl"))
        .args(["--group-by", "writer"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let groups = value["groups"].as_array().unwrap();
    assert_eq!(groups.len(), 2);
    for group in groups {
        assert!(group["group"].is_string());
        assert!(group["descriptives"]["word_count"]["mean"].is_number());
        let prevalence: BTreeMap<String, f64> =
            serde_json::from_value(group["prevalence"].clone()).unwrap();
        assert_eq!(prevalence.len(), 10);
    }
    assert!(value["correlations"].as_array().unwrap().len() == 1);
}
