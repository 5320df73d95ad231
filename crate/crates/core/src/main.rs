use clap::Parser;
use windroot::cli::{run, Args, EXIT_PARSE};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("WINDROOT_LOG")).init();
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    std::process::exit(run(&args));
}
