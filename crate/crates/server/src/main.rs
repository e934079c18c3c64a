use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cynote_core::backup::{dump, transport};
use cynote_core::config::Config;
use cynote_core::model::Table;
use cynote_server::{app, AppState};

#[derive(Parser)]
#[command(name = "cynote", version, about = "Electronic laboratory notebook service")]
struct Cli {
    /// TOML configuration file; built-in defaults apply when absent.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve the HTTP API.
    Serve,
    /// Write the text dump of the database to stdout or a file.
    Export {
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Upload a dump and its attachments to the configured destination.
    Backup {
        /// Authorized account recorded as the actor.
        #[arg(long)]
        actor: String,
    },
    /// Report missing ids in every append-only table.
    Gaps,
    /// Parse a dump file and cross-check its contents.
    CheckDump { path: PathBuf },
}

fn load(path: Option<&PathBuf>) -> Result<Config, String> {
    match path {
        Some(p) => Config::load(p).map_err(|e| e.to_string()),
        None => Ok(Config::default()),
    }
}

fn run(cli: Cli) -> Result<(), String> {
    let config = load(cli.config.as_ref())?;
    let err = |e: cynote_core::Error| e.to_string();
    match cli.command {
        Command::Serve => {
            let state = AppState::from_config(&config).map_err(err)?;
            let addr = format!("{}:{}", config.server.bind, config.server.port);
            let rt = tokio::runtime::Runtime::new().map_err(|e| e.to_string())?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind(&addr).await.map_err(|e| format!("{addr}: {e}"))?;
                eprintln!("listening on http://{addr}");
                axum::serve(listener, app(state))
                    .with_graceful_shutdown(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await
                    .map_err(|e| e.to_string())
            })
        }
        Command::Export { output } => {
            let store = cynote_core::Store::open_with_config(&config).map_err(err)?;
            let text = store.export_text().map_err(err)?;
            match output {
                Some(p) => std::fs::write(&p, text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
        Command::Backup { actor } => {
            let store = cynote_core::Store::open_with_config(&config).map_err(err)?;
            let mut t = transport::from_config(&config.backup);
            let m = store.backup(t.as_mut(), &actor).map_err(err)?;
            println!("{}/{}", m.remote_dir, m.dump_name);
            for name in &m.attachment_names {
                println!("{}/{name}", m.remote_dir);
            }
            Ok(())
        }
        Command::Gaps => {
            let store = cynote_core::Store::open_with_config(&config).map_err(err)?;
            let mut clean = true;
            for table in Table::ALL {
                let r = store.detect_sequence_gaps(table).map_err(err)?;
                clean &= r.missing.is_empty();
                println!("{:<14} high_water={:<6} present={:<6} missing={:?}", table.name(), r.high_water, r.present, r.missing);
            }
            if clean {
                Ok(())
            } else {
                Err("gaps found".into())
            }
        }
        Command::CheckDump { path } => {
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let db = dump::import(&text).map_err(err)?;
            for t in &db.tables {
                println!("{:<14} {} rows", t.table.name(), t.rows.len());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cynote: {e}");
            ExitCode::FAILURE
        }
    }
}
