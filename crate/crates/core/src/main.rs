use clap::Parser;

use fiflab::cli::{configure_threads, run, Cli};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {}", e.message());
        std::process::exit(e.code());
    }
    std::process::exit(run(&cli));
}
