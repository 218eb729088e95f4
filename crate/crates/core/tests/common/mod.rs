#![allow(dead_code)]

pub mod dists;
pub mod oracle;
pub mod pairs;
pub mod synthetic;

use std::path::PathBuf;

pub struct Fixture {
    pub language: &'static str,
    pub name: String,
    pub source: String,
}

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// Every fixture program, sorted by language then file name.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = Vec::new();
    for (language, ext) in [("python", "py"), ("sql", "sql")] {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(fixture_dir().join(language))
            .expect("fixture directory")
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == ext))
            .collect();
        paths.sort();
        for path in paths {
            out.push(Fixture {
                language,
                name: path.file_stem().unwrap().to_string_lossy().into_owned(),
                source: std::fs::read_to_string(&path).unwrap(),
            });
        }
    }
    out
}

pub fn fixture(language: &str, name: &str) -> String {
    let ext = if language == "python" { "py" } else { "sql" };
    std::fs::read_to_string(fixture_dir().join(language).join(format!("{name}.{ext}"))).unwrap()
}

pub fn golden(name: &str) -> String {
    std::fs::read_to_string(fixture_dir().join("golden").join(name)).unwrap()
}

/// Ten tasks of five samples each, drawn from the fixtures with overlapping
/// windows so every task mixes programs of differing similarity. Each task
/// carries a synthetic `pass_rate` external metric.
pub fn corpus() -> Vec<structural_entropy::harness::TaskRecord> {
    let all = fixtures();
    let mut tasks = Vec::new();
    for (lang, count) in [("python", 5), ("sql", 5)] {
        let pool: Vec<&Fixture> = all.iter().filter(|f| f.language == lang).collect();
        for t in 0..count {
            let samples =
                [0, 1, 3, 6, 10].iter().map(|o| pool[(t * 2 + o) % pool.len()].source.clone()).collect();
            let pass_rate = ((t * 7 + lang.len()) % 10) as f64 / 10.0;
            tasks.push(structural_entropy::harness::TaskRecord {
                task_id: format!("{lang}-{t:02}"),
                language: lang.to_string(),
                samples,
                external_metrics: Some([("pass_rate".to_string(), pass_rate)].into()),
            });
        }
    }
    tasks
}
