use clap::Parser;

fn main() {
    let cli = nakernel_cli::Cli::parse();
    std::process::exit(nakernel_cli::run(&cli));
}
