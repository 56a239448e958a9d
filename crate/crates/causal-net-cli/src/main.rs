use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let (code, output) = causal_net_cli::run(&argv);
    print!("{output}");
    ExitCode::from(code)
}
