use clap::Parser;

fn main() {
    let cli = bsfwm::cli::Cli::parse();
    std::process::exit(bsfwm::cli::run(cli));
}
