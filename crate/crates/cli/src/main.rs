use clap::Parser;

fn main() {
    let cli = clairaut_cli::Cli::parse();
    std::process::exit(clairaut_cli::run(&cli));
}
