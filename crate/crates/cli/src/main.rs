fn main() {
    let outcome = shrinker_cli::run_command(std::env::args_os());
    if let (Some(report), false) = (&outcome.report, outcome.wrote_json) {
        print!("{report}");
    }
    std::process::exit(outcome.exit_code);
}
