use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    if let Ok(n) = std::env::var("ADELIC_ZETA_THREADS") {
        let limited = n
            .trim()
            .parse::<usize>()
            .map_err(|e| adelic_zeta::Error::Parse(format!("ADELIC_ZETA_THREADS: {e}")))
            .and_then(adelic_zeta::par::limit_threads);
        if let Err(e) = limited {
            eprintln!("{}", serde_json::json!({ "error": e.code(), "message": e.to_string() }));
            return ExitCode::from(2);
        }
    }
    let res = adelic_zeta_cli::run(std::env::args_os());
    print!("{}", res.stdout);
    eprint!("{}", res.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(res.code as u8)
}
