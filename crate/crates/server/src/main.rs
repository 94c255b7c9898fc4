use std::fs::File;
use std::io::BufReader;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use tagmap_core::{compute_stats, parse_event_log, render_report, sessionize, FilterParams};
use tagmap_server::http::{router, HttpConfig};
use tagmap_server::journal::{read_records, JournalEntry};
use tagmap_server::service::Service;

#[derive(Parser)]
#[command(
    name = "tagmap",
    version,
    about = "Social bookmark manager with contextual tag maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve(ServeArgs),
    /// Write a snapshot of the state rebuilt from the journal.
    Snapshot {
        #[arg(long, env = "TAGMAP_JOURNAL", default_value = "tagmap-journal.jsonl")]
        journal: PathBuf,
        #[arg(long, env = "TAGMAP_SNAPSHOT")]
        snapshot: PathBuf,
    },
    /// Print the state rebuilt from the journal (and snapshot) as JSON.
    Dump {
        #[arg(long, env = "TAGMAP_JOURNAL", default_value = "tagmap-journal.jsonl")]
        journal: PathBuf,
        #[arg(long, env = "TAGMAP_SNAPSHOT")]
        snapshot: Option<PathBuf>,
    },
    /// Print the list-vs-visualization usage report.
    Report {
        /// JSON-lines file of click events.
        #[arg(long, conflicts_with = "journal", required_unless_present = "journal")]
        events: Option<PathBuf>,
        /// Read click events from a service journal instead.
        #[arg(long)]
        journal: Option<PathBuf>,
        /// Inactivity timeout between clicks of one session, in seconds.
        #[arg(long, env = "TAGMAP_SESSION_GAP", default_value_t = tagmap_core::sessions::DEFAULT_GAP_SECS)]
        gap: u64,
        /// Print JSON instead of the text table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "TAGMAP_BIND", default_value = "127.0.0.1:8080")]
    bind: SocketAddr,
    #[arg(long, env = "TAGMAP_JOURNAL", default_value = "tagmap-journal.jsonl")]
    journal: PathBuf,
    /// Loaded at startup when present and rewritten on shutdown.
    #[arg(long, env = "TAGMAP_SNAPSHOT")]
    snapshot: Option<PathBuf>,
    /// Directory served under /app.
    #[arg(long, env = "TAGMAP_STATIC_DIR")]
    static_dir: Option<PathBuf>,
    #[arg(long, env = "TAGMAP_SESSION_GAP", default_value_t = tagmap_core::sessions::DEFAULT_GAP_SECS)]
    session_gap: u64,
    #[arg(long, env = "TAGMAP_DEPTH", default_value_t = FilterParams::default().depth)]
    depth: usize,
    #[arg(long, env = "TAGMAP_MAX_NEIGHBORS", default_value_t = FilterParams::default().max_neighbors)]
    max_neighbors: usize,
    #[arg(long, env = "TAGMAP_MAX_NODES", default_value_t = FilterParams::default().max_nodes)]
    max_nodes: usize,
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_target(false)
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Serve(args) => serve(args),
        Command::Snapshot { journal, snapshot } => {
            let service = Service::open(&journal, Some(&snapshot))
                .with_context(|| format!("loading {}", journal.display()))?;
            let seq = service.snapshot(&snapshot)?;
            println!("wrote {} at seq {seq}", snapshot.display());
            Ok(())
        }
        Command::Dump { journal, snapshot } => {
            let service = Service::open(&journal, snapshot.as_deref())
                .with_context(|| format!("loading {}", journal.display()))?;
            let state = service.state();
            let dump = serde_json::json!({
                "seq": state.last_seq,
                "store": state.store.export(),
                "events": state.events,
            });
            println!("{}", serde_json::to_string_pretty(&dump)?);
            Ok(())
        }
        Command::Report {
            events,
            journal,
            gap,
            json,
        } => report(events.as_deref(), journal.as_deref(), gap, json),
    }
}

fn serve(args: ServeArgs) -> Result<()> {
    let default_filter = FilterParams {
        depth: args.depth,
        max_neighbors: args.max_neighbors,
        max_nodes: args.max_nodes,
        ..FilterParams::default()
    };
    default_filter
        .validate()
        .context("invalid default filter")?;
    if let Some(dir) = &args.static_dir {
        if !dir.is_dir() {
            bail!("static directory {} does not exist", dir.display());
        }
    }
    let service = Service::open(&args.journal, args.snapshot.as_deref())
        .with_context(|| format!("cannot start from journal {}", args.journal.display()))?;
    let service = Arc::new(service);
    let (users, triples, seq) =
        service.read(|s| (s.store.users().count(), s.store.len(), s.last_seq));
    tracing::info!("loaded {triples} triples from {users} users (seq {seq})");

    let app = router(
        service.clone(),
        HttpConfig {
            default_filter,
            session_gap: args.session_gap,
            static_dir: args.static_dir,
            ..HttpConfig::default()
        },
    );
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind(args.bind)
            .await
            .with_context(|| format!("cannot bind {}", args.bind))?;
        tracing::info!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
                tracing::info!("shutting down");
            })
            .await
            .context("server error")
    })?;

    if let Some(path) = service.snapshot_path() {
        let seq = service.snapshot(path)?;
        tracing::info!("wrote snapshot {} at seq {seq}", path.display());
    }
    Ok(())
}

fn report(events: Option<&Path>, journal: Option<&Path>, gap: u64, json: bool) -> Result<()> {
    let clicks = match (events, journal) {
        (Some(path), _) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            parse_event_log(BufReader::new(file))?
        }
        (None, Some(path)) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            read_records(path, BufReader::new(file))?
                .into_iter()
                .filter_map(|r| match r.entry {
                    JournalEntry::Event(e) => Some(e),
                    _ => None,
                })
                .collect()
        }
        (None, None) => bail!("either --events or --journal is required"),
    };
    let stats = compute_stats(&sessionize(&clicks, gap));
    if json {
        println!("{}", serde_json::to_string_pretty(&stats)?);
    } else {
        print!("{}", render_report(&stats));
    }
    Ok(())
}
