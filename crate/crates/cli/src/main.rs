use clap::Parser;
use fricke_cli::commands::{run, Cli, OutputFormat};

/// Exit codes: 0 on success, 1 when a requested check fails, 2 on usage or
/// parse errors (clap uses 2 for argument errors as well).
fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(result) => {
            match cli.format {
                OutputFormat::Plain => {
                    let text = result.text.trim_end();
                    if !text.is_empty() {
                        println!("{text}");
                    }
                }
                OutputFormat::Json => {
                    println!("{}", serde_json::to_string_pretty(&result.json).expect("serializable"));
                }
            }
            std::process::exit(if result.check_failed { 1 } else { 0 });
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
