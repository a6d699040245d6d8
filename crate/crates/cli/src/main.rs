use std::process::ExitCode;

fn main() -> ExitCode {
    let report = fusionwb_cli::run(std::env::args().skip(1));
    let text = report.render();
    print!("{text}");
    if report.show_timings {
        eprint!("{}", report.render_timings());
    }
    if let Some(path) = &report.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code())
}
