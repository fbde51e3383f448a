use ringrad_cli::CliError;

fn main() {
    match ringrad_cli::run(std::env::args_os()) {
        Ok(()) => {}
        Err(CliError::Clap(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
