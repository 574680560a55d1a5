//! Prints the built-in experiment configuration as JSON, a starting point for
//! custom `--config` files.

fn main() {
    println!("{}", bsfwm::cli::ExperimentConfig::builtin().to_json());
}
