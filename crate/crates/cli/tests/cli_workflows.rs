//! End-to-end subcommand flows: encode -> stats, report formats, irr, and
//! respond under the mock transport.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tactics"))
}

fn fixtures_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

#[test]
fn encode_then_stats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let encoded = dir.path().join("encoded.jsonl");
    let status = bin()
        .args(["encode", "--corpus"])
        .arg(fixtures_dir().join("corpus.jsonl"))
        .args(["--jobs", "2", "--out"])
        .arg(&encoded)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&encoded).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(text.contains(r#""sequence":"PVAIV""#), "span record f01 encodes to PVAIV");
    assert!(text.contains(r#""sequence":"XEPVA""#), "span record f09 encodes to XEPVA");

    // The encoded corpus feeds straight back into stats.
    let output = bin()
        .args(["stats", "--corpus"])
        .arg(&encoded)
        .args(["--group-by", "study"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["groups"].as_array().unwrap().len(), 1);
    assert_eq!(value["groups"][0]["n"], 12);
}

#[test]
fn match_renders_csv_and_markdown() {
    for (format, needle) in [
        ("csv", "pattern_index,pattern_text,writer_study,writer_source"),
        ("md", "| pattern | template |"),
    ] {
        let output = bin()
            .args(["match", "--corpus"])
            .arg(fixtures_dir().join("corpus.jsonl"))
            .arg("--patterns")
            .arg(fixtures_dir().join("table3.pat"))
            .args(["--group-by", "writer", "--format", format])
            .output()
            .unwrap();
        assert!(output.status.success());
        let text = String::from_utf8(output.stdout).unwrap();
        assert!(text.starts_with(needle), "{format} output started with: {text}");
        if format == "csv" {
            // Percentages render at one decimal in CSV.
            assert!(text.contains("66.7"), "csv: {text}");
            assert!(text.contains("88.8") || text.contains("88.7"), "csv: {text}");
        }
    }
}

#[test]
fn match_rejects_non_nested_ladders() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pat");
    std::fs::write(&bad, "^X?[PV]+\n^[PV]+[AIP]+\n").unwrap();
    let output = bin()
        .args(["match", "--corpus"])
        .arg(fixtures_dir().join("corpus.jsonl"))
        .arg("--patterns")
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("does not extend"));
}

#[test]
fn irr_reports_per_tactic_alphas() {
    let dir = tempfile::tempdir().unwrap();
    let ratings = dir.path().join("ratings.csv");
    std::fs::write(
        &ratings,
        "rater,item_id,tactic,present\n\
         r1,s1,P,1\nr1,s2,P,1\nr1,s3,P,0\nr1,s4,P,0\n\
         r2,s1,P,0\nr2,s2,P,0\nr2,s3,P,1\nr2,s4,P,1\n\
         r1,s1,V,1\nr1,s2,V,0\nr2,s1,V,1\nr2,s2,V,0\n",
    )
    .unwrap();
    let output = bin().args(["irr", "--ratings"]).arg(&ratings).output().unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(value["per_tactic"]["P"], -0.75);
    assert_eq!(value["per_tactic"]["V"], 1.0);
    assert_eq!(value["average"], 0.125);
}

#[test]
fn respond_mock_writes_replies_with_word_counts() {
    let dir = tempfile::tempdir().unwrap();
    let posts = dir.path().join("posts.jsonl");
    std::fs::write(
        &posts,
        concat!(
            r#"{"id":"p1","text":"I bombed the interview I prepared weeks for."}"#,
            "\n",
            r#"{"id":"p2","text":"My flatmate moved out without a word."}"#,
            "\n"
        ),
    )
    .unwrap();
    let out = dir.path().join("replies.jsonl");
    let status = bin()
        .args(["respond", "--mock", "--corpus"])
        .arg(&posts)
        .arg("--out")
        .arg(&out)
        .env_remove("EMPATHY_GATEWAY_API_KEY")
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<serde_json::Value> =
        text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["id"], "p1");
    assert_eq!(lines[0]["word_count"], 120);
    assert_eq!(lines[0]["word_limit_warning"], false);
}

#[test]
fn tag_refuses_records_without_text() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("seq_only.jsonl");
    std::fs::write(
        &corpus,
        r#"{"id":"nope","writer":{"study":1,"source":"h"},"sequence":"PV"}"#,
    )
    .unwrap();
    let output = bin()
        .args(["tag", "--mock", "--corpus"])
        .arg(&corpus)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("nope"));
}

#[test]
fn mine_accepts_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let synth = bin()
        .args(["synth", "--pattern", "^[PV]+ [AI]+", "--count", "80", "--seed", "9", "--out"])
        .arg(&corpus)
        .status()
        .unwrap();
    assert!(synth.success());
    let config = dir.path().join("miner.toml");
    std::fs::write(&config, "beam_width = 5\nmax_atoms = 6\nmax_set_size = 2\n").unwrap();
    let output = bin()
        .args(["mine", "--corpus"])
        .arg(&corpus)
        .arg("--config")
        .arg(&config)
        .args(["--max-atoms", "2"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let value: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    // Flag overrides the config file; the rest comes from the file.
    assert_eq!(value["config"]["max_atoms"], 2);
    assert_eq!(value["config"]["beam_width"], 5);
    assert_eq!(value["results"][0]["group"], "all");
    let patterns = value["results"][0]["ladder"]["patterns"].as_array().unwrap();
    assert!(!patterns.is_empty());
    assert!(patterns.len() <= 2);
}
