use clap::Parser;
use plcert_cli::{configure_threads, run, Cli, Failure};

fn main() {
    let cli = Cli::parse();
    let code = configure_threads().and_then(|()| run(cli)).unwrap_or_else(|e| {
        eprintln!("plcert: {e}");
        if let Failure::Invalid(report) = &e {
            if let Ok(json) = serde_json::to_string_pretty(report) {
                eprintln!("{json}");
            }
        }
        e.exit_code()
    });
    std::process::exit(code);
}
