//! Subcommand arguments and their implementations.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use subnet_mine::baseline::{mine_naive, BaselineLimits};
use subnet_mine::generator::{generate, plant, verify, GeneratorParams, GroundTruth, PlantSpec};
use subnet_mine::miner::{mine as mine_ng, ExtensionMode, MiningConfig, MisMode, ResultDoc};
use subnet_mine::netgraph::{to_c_netgraph, to_e_netgraph};
use subnet_mine::petri::{dual, parse_cenet, serialize_cenet, OverlapKind, PetriNet};

/// What a command reports back for its manifest.
#[derive(Debug, Default)]
pub struct Run {
    pub code: u8,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

fn parse_overlap(s: &str) -> Result<OverlapKind, String> {
    match s {
        "c" => Ok(OverlapKind::CType),
        "e" => Ok(OverlapKind::EType),
        _ => Err(format!("unknown overlap kind {s:?} (expected c or e)")),
    }
}

/// `LO:HI`, or a single number for both ends.
fn parse_range(s: &str) -> Result<[usize; 2], String> {
    let bad = || format!("bad range {s:?} (expected LO:HI)");
    let (lo, hi) = s.split_once(':').unwrap_or((s, s));
    let lo = lo.parse().map_err(|_| bad())?;
    let hi = hi.parse().map_err(|_| bad())?;
    if lo > hi {
        return Err(bad());
    }
    Ok([lo, hi])
}

fn read_net(path: &Path) -> Result<PetriNet> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_cenet(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Writes through a sibling temporary file so readers never see a partial file.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let name = path.file_name().with_context(|| format!("{} is not a file path", path.display()))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))
}

fn show(p: &Path) -> String {
    p.display().to_string()
}

#[derive(Args, Debug, Clone)]
pub struct NetParams {
    /// Glue nets on conditions (c) or events (e).
    #[arg(long, default_value = "c", value_parser = parse_overlap)]
    pub overlap: OverlapKind,
    /// Most nodes identified per attachment.
    #[arg(long, visible_alias = "max-arcs", default_value_t = 3)]
    pub max_overlaps: usize,
    /// Input conditions per basic net, LO:HI.
    #[arg(long, default_value = "1:3", value_parser = parse_range)]
    pub cond_in: [usize; 2],
    /// Output conditions per basic net, LO:HI.
    #[arg(long, default_value = "1:3", value_parser = parse_range)]
    pub cond_out: [usize; 2],
    #[arg(long, default_value_t = 10)]
    pub event_alphabet: usize,
    #[arg(long, default_value_t = 10)]
    pub cond_alphabet: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl NetParams {
    fn params(&self, events: usize) -> GeneratorParams {
        GeneratorParams {
            overlap: self.overlap,
            events,
            max_overlaps: self.max_overlaps,
            cond_in: self.cond_in,
            cond_out: self.cond_out,
            event_alphabet: self.event_alphabet,
            cond_alphabet: self.cond_alphabet,
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Number of basic nets attached to the first one.
    #[arg(long)]
    pub events: usize,
    #[command(flatten)]
    pub net: NetParams,
    /// Small net (`.cenet`) to plant copies of; repeatable.
    #[arg(long)]
    pub plant: Vec<PathBuf>,
    /// Support threshold the planted copies must exceed.
    #[arg(long, requires = "plant")]
    pub min_sup: Option<usize>,
    /// Largest copy count per overlap kind; defaults to min-sup + 3.
    #[arg(long, requires = "plant")]
    pub copy_bound: Option<usize>,
    /// Most events a planting net may have.
    #[arg(long, default_value_t = 10)]
    pub plant_max_events: usize,
    /// Truth file; defaults to the output path with a `.truth` extension.
    #[arg(long, requires = "plant")]
    pub truth: Option<PathBuf>,
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn gen(a: &GenArgs) -> Result<Run> {
    let params = a.net.params(a.events);
    params.validate()?;
    let mut run = Run { seed: Some(a.net.seed), outputs: vec![show(&a.output)], ..Run::default() };
    let (net, truth) = if a.plant.is_empty() {
        (generate(&params)?, None)
    } else {
        let min_sup = a.min_sup.context("--plant needs --min-sup")?;
        let nets = a.plant.iter().map(|p| read_net(p)).collect::<Result<Vec<_>>>()?;
        let spec = PlantSpec {
            nets,
            max_events: a.plant_max_events,
            max_overlaps: a.net.max_overlaps,
            min_sup,
            copy_bound: a.copy_bound.unwrap_or(min_sup + 3),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(a.net.seed);
        let (net, truth) = plant(&spec, &params, &mut rng)?;
        run.inputs = a.plant.iter().map(|p| show(p)).collect();
        (net, Some(truth))
    };
    write_atomic(&a.output, &serialize_cenet(&net))?;
    println!(
        "nodes {} events {} conditions {} arcs {}",
        net.node_count(),
        net.events().len(),
        net.conditions().len(),
        net.arc_count()
    );
    if let Some(truth) = &truth {
        let path = a.truth.clone().unwrap_or_else(|| a.output.with_extension("truth"));
        write_atomic(&path, &truth.to_json())?;
        for p in &truth.patterns {
            println!(
                "planted {} c-copies {} e-copies {} broken {} expected support {}",
                p.code, p.c_copies, p.e_copies, p.broken_copies, p.expected_support
            );
        }
        run.outputs.push(show(&path));
    }
    run.config = json!({
        "generator": params,
        "plant": a.plant.iter().map(|p| show(p)).collect::<Vec<_>>(),
        "min_sup": a.min_sup,
        "copy_bound": truth.as_ref().map(|t| t.copy_bound),
        "plant_max_events": a.plant_max_events,
    });
    Ok(run)
}

#[derive(Args, Debug)]
pub struct MineArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub min_sup: usize,
    /// exact, greedy or auto:N (exact up to N overlap-graph vertices per component).
    #[arg(long, default_value = "auto:60")]
    pub mis: MisMode,
    /// paper (grow the independent set) or complete (grow every embedding).
    #[arg(long, default_value = "paper")]
    pub extension: ExtensionMode,
    #[arg(long, default_value = "bigcarl", value_parser = ["bigcarl", "digcarl"])]
    pub engine: String,
    /// Highest level (edge count) to mine; bigcarl only.
    #[arg(long)]
    pub max_level: Option<usize>,
    /// Largest pattern in events; required cap for digcarl (default 4).
    #[arg(long)]
    pub max_events: Option<usize>,
    /// Tie branches the canonical traversal of the big graph may explore.
    #[arg(long, default_value_t = 64)]
    pub traversal_budget: usize,
    /// Evaluate candidates on one thread.
    #[arg(long)]
    pub sequential: bool,
    /// Give up after this many seconds; digcarl only.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Mine the dual net, so patterns are c-type subnets.
    #[arg(long)]
    pub ctype: bool,
    #[arg(short, long)]
    pub output: PathBuf,
}

pub const DEFAULT_DIGCARL_CAP: usize = 4;

pub fn mine(a: &MineArgs) -> Result<Run> {
    let mut net = read_net(&a.input)?;
    if a.ctype {
        net = dual(&net);
    }
    let mut run = Run { inputs: vec![show(&a.input)], outputs: vec![show(&a.output)], ..Run::default() };
    let doc = if a.engine == "digcarl" {
        if a.max_level.is_some() {
            bail!("--max-level applies to bigcarl only");
        }
        let time_limit = a.time_limit.map(Duration::try_from_secs_f64).transpose().context("bad --time-limit")?;
        let limits = BaselineLimits { time_limit, ..BaselineLimits::new(a.max_events.unwrap_or(DEFAULT_DIGCARL_CAP)) };
        run.config = json!({
            "engine": "digcarl",
            "min_sup": a.min_sup,
            "max_events": limits.max_events,
            "max_occurrences": limits.max_occurrences,
            "time_limit": a.time_limit,
            "ctype": a.ctype,
        });
        mine_naive(&net, a.min_sup, &limits)?
    } else {
        if a.time_limit.is_some() {
            bail!("--time-limit applies to digcarl only");
        }
        let cfg = MiningConfig {
            mis: a.mis,
            extension: a.extension,
            max_level: a.max_level,
            max_nodes: a.max_events,
            traversal_budget: a.traversal_budget,
            parallel: !a.sequential,
            ..MiningConfig::new(a.min_sup)
        };
        run.config = json!({ "engine": "bigcarl", "mining": cfg, "ctype": a.ctype });
        let ng = to_e_netgraph(&net)?;
        mine_ng(&ng, &cfg)?.to_doc(&ng)
    };
    write_atomic(&a.output, &doc.to_json())?;
    for s in &doc.levels_explored {
        println!("level {}: candidates {} frequent {}", s.level, s.candidates, s.frequent);
    }
    println!("patterns {} stop {}", doc.patterns().count(), serde_json::to_string(&doc.stop)?.trim_matches('"'));
    Ok(run)
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Write one CSV row per input.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Append rows to an existing CSV instead of replacing it.
    #[arg(long, requires = "csv")]
    pub append: bool,
}

#[derive(Debug, Serialize)]
pub struct StatsRow {
    pub nodes: usize,
    pub arcs: usize,
    pub ng_edges: usize,
    pub ratio: f64,
}

pub fn net_stats(net: &PetriNet) -> Result<StatsRow> {
    let ng = to_e_netgraph(net)?;
    let arcs = net.arc_count();
    let ratio = if arcs == 0 { 0.0 } else { ng.edge_count() as f64 / arcs as f64 };
    Ok(StatsRow { nodes: net.node_count(), arcs, ng_edges: ng.edge_count(), ratio })
}

pub fn stats(a: &StatsArgs) -> Result<Run> {
    let mut rows = Vec::new();
    for path in &a.inputs {
        let net = read_net(path)?;
        let row = net_stats(&net)?;
        println!(
            "{}: nodes {} events {} conditions {} arcs (AB) {} net-graph edges (AE) {} AE/AB {:.4}",
            path.display(),
            row.nodes,
            net.events().len(),
            net.conditions().len(),
            row.arcs,
            row.ng_edges,
            row.ratio
        );
        rows.push(row);
    }
    let mut run = Run {
        config: json!({ "csv": a.csv.as_ref().map(|p| show(p)), "append": a.append }),
        inputs: a.inputs.iter().map(|p| show(p)).collect(),
        ..Run::default()
    };
    if let Some(csv_path) = &a.csv {
        let existing = a.append && fs::metadata(csv_path).is_ok_and(|m| m.len() > 0);
        let mut w = csv::WriterBuilder::new().has_headers(!existing).from_writer(Vec::new());
        for r in &rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().context("flushing CSV")?;
        if a.append {
            let mut f = fs::OpenOptions::new().create(true).append(true).open(csv_path)?;
            f.write_all(&bytes)?;
        } else {
            write_atomic(csv_path, std::str::from_utf8(&bytes)?)?;
        }
        run.outputs.push(show(csv_path));
    }
    Ok(run)
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub net: PathBuf,
    pub truth: PathBuf,
    pub result: PathBuf,
}

pub fn check(a: &CheckArgs) -> Result<Run> {
    let net = read_net(&a.net)?;
    let truth_text = fs::read_to_string(&a.truth).with_context(|| format!("reading {}", a.truth.display()))?;
    let truth = GroundTruth::from_json(&truth_text).with_context(|| format!("parsing {}", a.truth.display()))?;
    let doc_text = fs::read_to_string(&a.result).with_context(|| format!("reading {}", a.result.display()))?;
    let doc = ResultDoc::from_json(&doc_text).with_context(|| format!("parsing {}", a.result.display()))?;
    truth.audit(&net).map_err(|e| anyhow::anyhow!("truth does not match net: {e}"))?;
    for p in doc.patterns() {
        for e in &p.embeddings {
            if !e.events.iter().all(|id| net.events().contains_key(id))
                || !e.conditions.iter().all(|id| net.conditions().contains_key(id))
            {
                bail!("result does not match net: embedding {:?} of {} is not in the net", e.events, p.code);
            }
        }
    }
    let verdicts = verify(&truth, &doc);
    for v in &verdicts {
        let found = v.found.map_or("absent".to_string(), |s| s.to_string());
        println!("{} {} expected {} found {}", if v.pass { "PASS" } else { "FAIL" }, v.code, v.expected, found);
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    println!("{} of {} planted patterns recovered", verdicts.len() - failed, verdicts.len());
    Ok(Run {
        code: if failed == 0 { 0 } else { 1 },
        config: json!({ "patterns": verdicts.len(), "failed": failed }),
        inputs: vec![show(&a.net), show(&a.truth), show(&a.result)],
        ..Run::default()
    })
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Attachment counts of the generated nets.
    #[arg(long, value_delimiter = ',', required = true)]
    pub events: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "bigcarl,digcarl", value_parser = ["bigcarl", "digcarl"])]
    pub engines: Vec<String>,
    #[arg(long, default_value_t = 10)]
    pub min_sup: usize,
    /// Event cap of digcarl.
    #[arg(long, default_value_t = 3)]
    pub digcarl_cap: usize,
    /// Seconds before a run is killed and its row marked `timeout`.
    #[arg(long, default_value_t = 600.0)]
    pub time_limit: f64,
    #[arg(long, default_value = "1:1", value_parser = parse_range)]
    pub cond_in: [usize; 2],
    #[arg(long, default_value = "1:1", value_parser = parse_range)]
    pub cond_out: [usize; 2],
    #[arg(long, default_value = "c", value_parser = parse_overlap)]
    pub overlap: OverlapKind,
    #[arg(long, visible_alias = "max-arcs", default_value_t = 3)]
    pub max_overlaps: usize,
    #[arg(long, default_value_t = 4)]
    pub event_alphabet: usize,
    #[arg(long, default_value_t = 4)]
    pub cond_alphabet: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct BenchRow {
    pub events: usize,
    pub nodes: usize,
    pub arcs: usize,
    pub ng_edges: usize,
    pub engine: String,
    /// `ok`, `timeout` or `error`.
    pub status: String,
    pub seconds: f64,
    pub peak_heap_bytes: Option<usize>,
    pub patterns: Option<usize>,
}

/// Runs `mine` in a child process so a run past the limit can be killed.
fn bench_cell(
    dir: &Path,
    net_path: &Path,
    engine: &str,
    a: &BenchArgs,
) -> Result<(String, f64, Option<usize>, Option<usize>)> {
    let result = dir.join(format!("{engine}.json"));
    let manifest = dir.join(format!("{engine}.jsonl"));
    let mut cmd = Command::new(std::env::current_exe()?);
    cmd.arg("--manifest").arg(&manifest).arg("mine").arg(net_path);
    cmd.args(["--engine", engine, "--min-sup", &a.min_sup.to_string()]);
    if engine == "digcarl" {
        cmd.args(["--max-events", &a.digcarl_cap.to_string()]);
    }
    cmd.arg("-o").arg(&result).stdout(Stdio::null()).stderr(Stdio::null());
    let limit = Duration::try_from_secs_f64(a.time_limit).context("bad --time-limit")?;
    let start = Instant::now();
    let mut child = cmd.spawn()?;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if start.elapsed() > limit {
            child.kill()?;
            child.wait()?;
            break None;
        }
        std::thread::sleep(Duration::from_millis(10));
    };
    let seconds = start.elapsed().as_secs_f64();
    match status {
        None => Ok(("timeout".into(), seconds, None, None)),
        Some(s) if !s.success() => Ok(("error".into(), seconds, None, None)),
        Some(_) => {
            let line = fs::read_to_string(&manifest)?;
            let m: serde_json::Value = serde_json::from_str(line.lines().last().context("empty manifest")?)?;
            let doc = ResultDoc::from_json(&fs::read_to_string(&result)?)?;
            let wall = m["wall_seconds"].as_f64().unwrap_or(seconds);
            let peak = m["peak_heap_bytes"].as_u64().map(|p| p as usize);
            Ok(("ok".into(), wall, peak, Some(doc.patterns().count())))
        }
    }
}

pub fn bench(a: &BenchArgs) -> Result<Run> {
    let dir = tempfile::tempdir()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for &events in &a.events {
        let params = GeneratorParams {
            overlap: a.overlap,
            events,
            max_overlaps: a.max_overlaps,
            cond_in: a.cond_in,
            cond_out: a.cond_out,
            event_alphabet: a.event_alphabet,
            cond_alphabet: a.cond_alphabet,
            seed: a.seed,
        };
        let net = generate(&params)?;
        let st = net_stats(&net)?;
        let net_path = dir.path().join(format!("net-{events}.cenet"));
        fs::write(&net_path, serialize_cenet(&net))?;
        for engine in &a.engines {
            let (status, seconds, peak, patterns) = bench_cell(dir.path(), &net_path, engine, a)?;
            eprintln!("events {events} arcs {} {engine}: {status} {seconds:.3}s", st.arcs);
            w.serialize(BenchRow {
                events,
                nodes: st.nodes,
                arcs: st.arcs,
                ng_edges: st.ng_edges,
                engine: engine.clone(),
                status,
                seconds,
                peak_heap_bytes: peak,
                patterns,
            })?;
        }
    }
    let bytes = w.into_inner().context("flushing CSV")?;
    write_atomic(&a.output, std::str::from_utf8(&bytes)?)?;
    let engines: BTreeSet<&String> = a.engines.iter().collect();
    Ok(Run {
        config: json!({
            "events": a.events,
            "engines": engines,
            "min_sup": a.min_sup,
            "digcarl_cap": a.digcarl_cap,
            "time_limit": a.time_limit,
            "overlap": a.overlap,
            "max_overlaps": a.max_overlaps,
            "cond_in": a.cond_in,
            "cond_out": a.cond_out,
            "event_alphabet": a.event_alphabet,
            "cond_alphabet": a.cond_alphabet,
        }),
        seed: Some(a.seed),
        outputs: vec![show(&a.output)],
        ..Run::default()
    })
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    pub input: PathBuf,
    /// ngraph (e-type net graph), cgraph (c-type net graph) or dual (a `.cenet`).
    #[arg(long, value_parser = ["ngraph", "cgraph", "dual"])]
    pub to: String,
    #[arg(short, long)]
    pub output: PathBuf,
}

pub fn transform(a: &TransformArgs) -> Result<Run> {
    let net = read_net(&a.input)?;
    let text = match a.to.as_str() {
        "ngraph" => to_e_netgraph(&net)?.to_ngraph(),
        "cgraph" => to_c_netgraph(&net)?.to_ngraph(),
        _ => serialize_cenet(&dual(&net)),
    };
    write_atomic(&a.output, &text)?;
    Ok(Run {
        config: json!({ "to": a.to }),
        inputs: vec![show(&a.input)],
        outputs: vec![show(&a.output)],
        ..Run::default()
    })
}
