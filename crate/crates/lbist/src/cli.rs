//! Command-line surface: run manifests, the attack search, fusebox
//! provisioning and self-test, the socket server/agent, and scripted
//! simulated-network scenarios.
//!
//! Exit codes: 0 success; 1 self-test FAIL (or transport failure); 2 usage,
//! configuration, or missing-fusebox errors; 3 attack found nothing; 4
//! attack space cap exceeded.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::attack::{enumerate_aliasing_faults, AttackConstraints, AttackError};
use crate::dut::{FaultMode, FaultSet, Nlfsr};
use crate::engine::{
    keyed_selftest, provision, run_trace, ConfigTemplate, Fusebox, LbistConfig, TestKey,
};
use crate::registers::{BitVec, Gf2Poly};
use crate::remote::{
    simnet_run, DeviceAgent, DeviceModel, ManagerConfig, Message, NetConditions, Scenario,
    SchedulePolicy, Script, ScriptAction, SessionOutcome, SignatureMode, TestManager,
    TriggerReason,
};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Lines,
}

impl OutputFormat {
    fn parse(text: &str) -> Result<OutputFormat> {
        match text {
            "table" => Ok(OutputFormat::Table),
            "lines" => Ok(OutputFormat::Lines),
            other => bail!("unknown output format '{other}' (expected table or lines)"),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Table => "table",
            OutputFormat::Lines => "lines",
        })
    }
}

/// A run manifest: the DUT model, register configuration, fault overlay,
/// and output format, loaded from a `key = value` text file.
#[derive(Clone, Debug)]
pub struct RunManifest {
    pub dut: Nlfsr,
    pub template: ConfigTemplate,
    pub seed: Option<BitVec>,
    pub faults: FaultSet,
    pub mode: FaultMode,
    pub format: OutputFormat,
}

impl RunManifest {
    /// Loads a manifest file. The `dut` path is resolved relative to the
    /// manifest's directory.
    ///
    /// ```text
    /// dut = sample4.model
    /// lfsr_poly = 1+x+x^2+x^3+x^4
    /// seed = 1011
    /// misr_poly = 1+x^3+x^4
    /// misr_init = 0000
    /// patterns = 8
    /// faults = s1:=0
    /// mode = capture-only
    /// format = table
    /// ```
    pub fn load(path: &Path) -> Result<RunManifest> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));

        let mut dut = None;
        let mut lfsr_poly = None;
        let mut seed = None;
        let mut misr_poly = None;
        let mut misr_init = None;
        let mut patterns = None;
        let mut faults = FaultSet::empty();
        let mut mode = FaultMode::CaptureOnly;
        let mut format = OutputFormat::Table;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!("{}:{}: expected 'key = value'", path.display(), lineno + 1)
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "dut" => {
                    let model_path = dir.join(value);
                    let model_text = fs::read_to_string(&model_path)
                        .with_context(|| format!("reading DUT model {}", model_path.display()))?;
                    dut = Some(Nlfsr::parse_model(&model_text)?);
                }
                "lfsr_poly" => lfsr_poly = Some(Gf2Poly::parse(value)?),
                "seed" => seed = Some(BitVec::parse(value)?),
                "misr_poly" => misr_poly = Some(Gf2Poly::parse(value)?),
                "misr_init" => misr_init = Some(BitVec::parse(value)?),
                "patterns" => {
                    patterns = Some(value.parse::<u32>().with_context(|| {
                        format!("{}:{}: bad pattern count", path.display(), lineno + 1)
                    })?)
                }
                "faults" => faults = FaultSet::parse(value)?,
                "mode" => mode = FaultMode::parse(value)?,
                "format" => format = OutputFormat::parse(value)?,
                other => bail!("{}:{}: unknown key '{other}'", path.display(), lineno + 1),
            }
        }

        let dut = dut.ok_or_else(|| anyhow!("manifest missing 'dut'"))?;
        let lfsr_poly = lfsr_poly.ok_or_else(|| anyhow!("manifest missing 'lfsr_poly'"))?;
        let misr_poly = misr_poly.ok_or_else(|| anyhow!("manifest missing 'misr_poly'"))?;
        let misr_init = match misr_init {
            Some(init) => init,
            None => BitVec::zeros(misr_poly.degree())?,
        };
        let pattern_count = patterns.ok_or_else(|| anyhow!("manifest missing 'patterns'"))?;

        Ok(RunManifest {
            dut,
            template: ConfigTemplate {
                prpg_poly: lfsr_poly,
                misr_poly,
                misr_init,
                pattern_count,
            },
            seed,
            faults,
            mode,
            format,
        })
    }

    fn config(&self) -> Result<LbistConfig> {
        let seed = self
            .seed
            .clone()
            .ok_or_else(|| anyhow!("this command needs a 'seed' in the manifest or --seed"))?;
        Ok(self.template.instantiate(seed))
    }
}

#[derive(Parser)]
#[command(
    name = "lbist",
    about = "Logic BIST simulation: signature analysis, Trojan aliasing attacks, and keyed/remote self-test countermeasures",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ManifestArgs {
    /// Run manifest file
    #[arg(long)]
    manifest: PathBuf,
    /// Override the manifest seed
    #[arg(long)]
    seed: Option<String>,
    /// Override the manifest fault list, e.g. "s1:=0,s3:=1"
    #[arg(long)]
    faults: Option<String>,
    /// Override the fault mode: capture-only or read-and-capture
    #[arg(long)]
    mode: Option<String>,
    /// Output format: table or lines
    #[arg(long)]
    format: Option<String>,
}

impl ManifestArgs {
    fn load(&self) -> Result<RunManifest> {
        let mut manifest = RunManifest::load(&self.manifest)?;
        if let Some(seed) = &self.seed {
            manifest.seed = Some(BitVec::parse(seed)?);
        }
        if let Some(faults) = &self.faults {
            manifest.faults = FaultSet::parse(faults)?;
        }
        if let Some(mode) = &self.mode {
            manifest.mode = FaultMode::parse(mode)?;
        }
        if let Some(format) = &self.format {
            manifest.format = OutputFormat::parse(format)?;
        }
        Ok(manifest)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one test cycle and print the per-cycle trace and signature
    Simulate(ManifestArgs),
    /// Search for stuck-at fault sets that alias to the golden signature
    Attack {
        #[command(flatten)]
        manifest: ManifestArgs,
        /// Candidate stages, comma-separated (default: all)
        #[arg(long)]
        stages: Option<String>,
        /// Largest number of simultaneously pinned stages
        #[arg(long, default_value_t = 1)]
        max_faults: usize,
        /// Enumeration cap on fault assignments
        #[arg(long, default_value_t = AttackConstraints::DEFAULT_SPACE_CAP)]
        cap: u64,
    },
    /// Derive a seed from a key and program the fusebox with the expected signature
    Provision {
        #[command(flatten)]
        manifest: ManifestArgs,
        /// Test key (bit string)
        #[arg(long)]
        key: String,
        /// Fusebox file path
        #[arg(long)]
        fusebox: PathBuf,
    },
    /// Run the keyed self-test against the provisioned fusebox
    Selftest {
        #[command(flatten)]
        manifest: ManifestArgs,
        /// Fusebox file path
        #[arg(long)]
        fusebox: PathBuf,
    },
    /// Run the test-management server on a TCP socket
    Serve {
        /// Listen address, e.g. 127.0.0.1:7450
        #[arg(long)]
        listen: String,
        /// Model registration ID=MANIFEST (repeatable)
        #[arg(long = "model", value_name = "ID=MANIFEST", required = true)]
        models: Vec<String>,
        /// Scenario for scheduled tests: signature-report or local-verdict
        #[arg(long, default_value = "signature-report")]
        scenario: String,
        /// Periodic test interval in seconds (omit for manual/trigger-only)
        #[arg(long)]
        interval: Option<u64>,
        /// Report timeout in seconds
        #[arg(long, default_value_t = 5)]
        timeout: u64,
        /// Retransmissions before a session times out
        #[arg(long, default_value_t = 2)]
        retries: u32,
        /// Expected signatures: on-the-fly or precomputed
        #[arg(long, default_value = "on-the-fly")]
        signatures: String,
        /// Registry file to load and persist
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Append session log lines to this file
        #[arg(long)]
        log: Option<PathBuf>,
        /// Server seed-derivation secret
        #[arg(long)]
        secret: Option<u64>,
    },
    /// Run a device agent against a test-management server
    Agent {
        /// Server address, e.g. 127.0.0.1:7450
        #[arg(long)]
        connect: String,
        /// This device's identifier
        #[arg(long)]
        device_id: u32,
        /// Model ID the server knows this device by
        #[arg(long)]
        model_id: u32,
        #[command(flatten)]
        manifest: ManifestArgs,
        /// On start, request a test of another device: TARGET,REASON
        #[arg(long)]
        trigger: Option<String>,
    },
    /// Run a scripted simulated-network scenario and print the event trace
    Simnet {
        /// Scenario script file
        #[arg(long)]
        scenario: PathBuf,
    },
}

/// Parses argv and runs; the returned code is the process exit status.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Attack {
            manifest,
            stages,
            max_faults,
            cap,
        } => cmd_attack(&manifest, stages.as_deref(), max_faults, cap),
        Command::Provision {
            manifest,
            key,
            fusebox,
        } => cmd_provision(&manifest, &key, &fusebox),
        Command::Selftest { manifest, fusebox } => cmd_selftest(&manifest, &fusebox),
        Command::Serve {
            listen,
            models,
            scenario,
            interval,
            timeout,
            retries,
            signatures,
            registry,
            log,
            secret,
        } => cmd_serve(
            &listen,
            &models,
            &scenario,
            interval,
            timeout,
            retries,
            &signatures,
            registry,
            log,
            secret,
        ),
        Command::Agent {
            connect,
            device_id,
            model_id,
            manifest,
            trigger,
        } => cmd_agent(&connect, device_id, model_id, &manifest, trigger.as_deref()),
        Command::Simnet { scenario } => cmd_simnet(&scenario),
    }
}

fn cmd_simulate(args: &ManifestArgs) -> Result<u8> {
    let manifest = args.load()?;
    let cfg = manifest.config()?;
    let trace = run_trace(&manifest.dut, &cfg, &manifest.faults, manifest.mode)?;
    match manifest.format {
        OutputFormat::Table => print!("{}", trace.render_table()),
        OutputFormat::Lines => print!("{}", trace.render_lines()),
    }
    Ok(0)
}

fn cmd_attack(
    args: &ManifestArgs,
    stages: Option<&str>,
    max_faults: usize,
    cap: u64,
) -> Result<u8> {
    let manifest = args.load()?;
    let cfg = manifest.config()?;
    let candidate_stages = match stages {
        Some(text) if !text.trim().is_empty() => text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| anyhow!("bad stage index '{s}'"))
            })
            .collect::<Result<Vec<_>>>()?,
        Some(_) => Vec::new(),
        None => (0..manifest.dut.width()).collect(),
    };
    let mut constraints = AttackConstraints::new(candidate_stages, max_faults, manifest.mode);
    constraints.space_cap = cap;
    match enumerate_aliasing_faults(&manifest.dut, &cfg, &constraints) {
        Ok(report) => {
            match manifest.format {
                OutputFormat::Table => print!("{}", report.render_table()),
                OutputFormat::Lines => print!("{}", report.render_lines()),
            }
            Ok(if report.found() { 0 } else { 3 })
        }
        Err(AttackError::SpaceCapExceeded { space, cap }) => {
            eprintln!("error: enumeration space {space} exceeds cap {cap} (raise with --cap)");
            Ok(4)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_provision(args: &ManifestArgs, key: &str, fusebox_path: &Path) -> Result<u8> {
    let manifest = args.load()?;
    let key = TestKey::parse(key)?;
    let fusebox = Fusebox::at(fusebox_path);
    let record = provision(&manifest.dut, &manifest.template, &key, &fusebox)?;
    println!(
        "provisioned version={} key={} signature={}",
        record.version, record.key, record.expected_signature
    );
    Ok(0)
}

fn cmd_selftest(args: &ManifestArgs, fusebox_path: &Path) -> Result<u8> {
    let manifest = args.load()?;
    let fusebox = Fusebox::at(fusebox_path);
    let Some(record) = fusebox.load()? else {
        eprintln!(
            "error: no provisioned record at {} (run provision first)",
            fusebox_path.display()
        );
        return Ok(2);
    };
    let verdict = keyed_selftest(
        &manifest.dut,
        &manifest.template,
        &record,
        &manifest.faults,
        manifest.mode,
    )?;
    println!(
        "{} computed={} expected={} version={}",
        verdict.outcome, verdict.computed, verdict.expected, record.version
    );
    Ok(if verdict.is_pass() { 0 } else { 1 })
}

fn parse_scenario_flag(text: &str) -> Result<Scenario> {
    Scenario::parse(text).ok_or_else(|| anyhow!("unknown scenario '{text}'"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_serve(
    listen: &str,
    models: &[String],
    scenario: &str,
    interval: Option<u64>,
    timeout: u64,
    retries: u32,
    signatures: &str,
    registry: Option<PathBuf>,
    log: Option<PathBuf>,
    secret: Option<u64>,
) -> Result<u8> {
    let mut config = ManagerConfig {
        timeout,
        retries,
        scenario: parse_scenario_flag(scenario)?,
        schedule: match interval {
            Some(interval) => SchedulePolicy::Periodic { interval },
            None => SchedulePolicy::Manual,
        },
        signature_mode: match signatures {
            "on-the-fly" => SignatureMode::OnTheFly,
            "precomputed" => SignatureMode::Precomputed,
            other => bail!("unknown signature mode '{other}'"),
        },
        ..ManagerConfig::default()
    };
    if let Some(secret) = secret {
        config.secret = secret;
    }
    let mut manager = TestManager::new(config);
    for entry in models {
        let (id, path) = entry
            .split_once('=')
            .ok_or_else(|| anyhow!("--model expects ID=MANIFEST, got '{entry}'"))?;
        let model_id: u32 = id.trim().parse().context("bad model id")?;
        let manifest = RunManifest::load(Path::new(path.trim()))?;
        manager.register_model(
            model_id,
            DeviceModel {
                dut: manifest.dut,
                template: manifest.template,
            },
        );
    }
    if let Some(path) = &registry {
        if path.exists() {
            manager.load_registry(path)?;
            eprintln!("[serve] loaded registry from {}", path.display());
        }
    }
    if let Some(path) = &log {
        manager.set_log_file(path);
    }

    let server = crate::remote::socket::SocketServer::spawn(listen, manager)
        .map_err(|e| anyhow!("bind {listen}: {e}"))?;
    eprintln!("[serve] listening on {}", server.addr());
    loop {
        std::thread::sleep(std::time::Duration::from_secs(1));
        if let Some(path) = &registry {
            server.with_manager(|m| m.save_registry(path)).ok();
        }
    }
}

fn cmd_agent(
    connect: &str,
    device_id: u32,
    model_id: u32,
    args: &ManifestArgs,
    trigger: Option<&str>,
) -> Result<u8> {
    let manifest = args.load()?;
    let agent = DeviceAgent::new(device_id, model_id, manifest.dut, manifest.template)
        .with_faults(manifest.faults, manifest.mode);
    let trigger_msg = match trigger {
        Some(text) => {
            let (target, reason) = text
                .split_once(',')
                .ok_or_else(|| anyhow!("--trigger expects TARGET,REASON"))?;
            Some(Message::TriggerRequest {
                requester_id: device_id,
                target_id: target.trim().parse().context("bad trigger target")?,
                reason: TriggerReason::parse(reason.trim())
                    .ok_or_else(|| anyhow!("unknown trigger reason '{reason}'"))?,
            })
        }
        None => None,
    };
    eprintln!("[agent {device_id}] connecting to {connect}");
    crate::remote::socket::run_agent(connect, agent, trigger_msg, None)
        .map_err(|e| anyhow!("agent connection failed: {e}"))?;
    Ok(0)
}

/// Scenario script for `simnet`. Line-oriented:
///
/// ```text
/// conditions drop=0.3 dup=0.2 delay=0..2 seed=42
/// timeout 5
/// retries 2
/// scenario signature-report
/// schedule periodic 25
/// secret 99
/// model 1 sample4.manifest
/// device 7 model=1
/// device 8 model=1 faults=s1:=0 mode=capture-only
/// at 0 hello 7
/// at 1 test 7 signature-report
/// at 30 trigger 7 8 comm-failure
/// run 200
/// ```
///
/// Device options: `model` (hardware it runs), `claim` (model id it claims
/// at enrollment, when different), `faults`, `mode`, `exec` (execution
/// latency in ticks).
pub struct ScenarioFile {
    pub conditions: NetConditions,
    pub manager: TestManager,
    pub agents: Vec<DeviceAgent>,
    pub script: Script,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<ScenarioFile> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading scenario {}", path.display()))?;
        let dir = path.parent().unwrap_or_else(|| Path::new("."));

        let mut conditions = NetConditions::default();
        let mut config = ManagerConfig::default();
        let mut models: Vec<(u32, DeviceModel)> = Vec::new();
        let mut agents: Vec<DeviceAgent> = Vec::new();
        let mut steps: Vec<(u64, ScriptAction)> = Vec::new();
        let mut run_until = None;

        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| anyhow!("{}:{}: {msg}", path.display(), lineno + 1);
            let fields: Vec<&str> = line.split_whitespace().collect();
            let arg = |i: usize| {
                fields
                    .get(i)
                    .copied()
                    .ok_or_else(|| err(format!("missing argument {i} on '{line}'")))
            };
            match fields[0] {
                "conditions" => {
                    for field in &fields[1..] {
                        let (k, v) = field
                            .split_once('=')
                            .ok_or_else(|| err(format!("bad condition '{field}'")))?;
                        match k {
                            "drop" => conditions.drop_probability = v.parse()?,
                            "dup" => conditions.duplicate_probability = v.parse()?,
                            "delay" => {
                                let (lo, hi) = v
                                    .split_once("..")
                                    .ok_or_else(|| err(format!("bad delay range '{v}'")))?;
                                conditions.delay_min = lo.parse()?;
                                conditions.delay_max = hi.parse()?;
                            }
                            "seed" => conditions.rng_seed = v.parse()?,
                            other => return Err(err(format!("unknown condition '{other}'"))),
                        }
                    }
                    conditions.validate().map_err(err)?;
                }
                "timeout" => config.timeout = arg(1)?.parse()?,
                "retries" => config.retries = arg(1)?.parse()?,
                "secret" => config.secret = arg(1)?.parse()?,
                "scenario" => {
                    config.scenario = parse_scenario_flag(fields.get(1).copied().unwrap_or(""))?
                }
                "schedule" => match fields.get(1).copied() {
                    Some("manual") => config.schedule = SchedulePolicy::Manual,
                    Some("periodic") => {
                        let interval = fields
                            .get(2)
                            .ok_or_else(|| err("periodic needs an interval".into()))?
                            .parse()?;
                        config.schedule = SchedulePolicy::Periodic { interval };
                    }
                    other => return Err(err(format!("unknown schedule {other:?}"))),
                },
                "model" => {
                    let id: u32 = arg(1)?.parse()?;
                    let manifest = RunManifest::load(&dir.join(arg(2)?))?;
                    models.push((
                        id,
                        DeviceModel {
                            dut: manifest.dut,
                            template: manifest.template,
                        },
                    ));
                }
                "device" => {
                    let device_id: u32 = arg(1)?.parse()?;
                    let mut model_id = None;
                    let mut claim = None;
                    let mut faults = FaultSet::empty();
                    let mut mode = FaultMode::CaptureOnly;
                    let mut exec = 0;
                    for field in &fields[2..] {
                        let (k, v) = field
                            .split_once('=')
                            .ok_or_else(|| err(format!("bad device option '{field}'")))?;
                        match k {
                            "model" => model_id = Some(v.parse::<u32>()?),
                            // Model id claimed at enrollment, when it differs
                            // from the hardware the device actually runs.
                            "claim" => claim = Some(v.parse::<u32>()?),
                            "faults" => faults = FaultSet::parse(v)?,
                            "mode" => mode = FaultMode::parse(v)?,
                            "exec" => exec = v.parse()?,
                            other => return Err(err(format!("unknown device option '{other}'"))),
                        }
                    }
                    let model_id = model_id.ok_or_else(|| err("device needs model=<id>".into()))?;
                    let model = models
                        .iter()
                        .find(|(id, _)| *id == model_id)
                        .map(|(_, m)| m.clone())
                        .ok_or_else(|| {
                            err(format!("device references unknown model {model_id}"))
                        })?;
                    agents.push(
                        DeviceAgent::new(
                            device_id,
                            claim.unwrap_or(model_id),
                            model.dut,
                            model.template,
                        )
                        .with_faults(faults, mode)
                        .with_exec_ticks(exec),
                    );
                }
                "at" => {
                    let time: u64 = arg(1)?.parse()?;
                    let action = match arg(2)? {
                        "hello" => ScriptAction::Hello {
                            device: arg(3)?.parse()?,
                        },
                        "test" => ScriptAction::StartTest {
                            device: arg(3)?.parse()?,
                            scenario: parse_scenario_flag(
                                fields.get(4).copied().unwrap_or("signature-report"),
                            )?,
                        },
                        "trigger" => ScriptAction::Trigger {
                            requester: arg(3)?.parse()?,
                            target: arg(4)?.parse()?,
                            reason: TriggerReason::parse(fields.get(5).copied().unwrap_or(""))
                                .ok_or_else(|| err("bad trigger reason".into()))?,
                        },
                        other => return Err(err(format!("unknown action '{other}'"))),
                    };
                    steps.push((time, action));
                }
                "run" => run_until = Some(arg(1)?.parse()?),
                other => return Err(err(format!("unknown directive '{other}'"))),
            }
        }

        let mut manager = TestManager::new(config);
        for (id, model) in models {
            manager.register_model(id, model);
        }
        let run_until = run_until.ok_or_else(|| anyhow!("scenario missing 'run <until>'"))?;
        Ok(ScenarioFile {
            conditions,
            manager,
            agents,
            script: Script { steps, run_until },
        })
    }
}

fn cmd_simnet(path: &Path) -> Result<u8> {
    let scenario = ScenarioFile::load(path)?;
    let sim = simnet_run(
        scenario.manager,
        scenario.agents,
        scenario.conditions,
        scenario.script,
    );
    print!("{}", sim.trace_text());
    println!("--- session log ---");
    for line in sim.manager().log() {
        println!("{line}");
    }
    let sessions = sim.manager().sessions();
    let count = |o: SessionOutcome| sessions.values().filter(|s| s.outcome == Some(o)).count();
    println!(
        "--- summary: sessions={} pass={} fail={} timeout={} open={}",
        sessions.len(),
        count(SessionOutcome::Pass),
        count(SessionOutcome::Fail),
        count(SessionOutcome::Timeout),
        sessions.values().filter(|s| s.outcome.is_none()).count()
    );
    Ok(0)
}
