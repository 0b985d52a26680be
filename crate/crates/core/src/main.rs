use clap::Parser;

fn main() {
    let args = qfock::cli::Args::parse();
    std::process::exit(qfock::cli::run(&args));
}
