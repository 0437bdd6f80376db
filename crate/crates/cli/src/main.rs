//! `m2s`: generate, solve and analyze weighted MAX-2-SAT / Ising instances.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/output or parse error,
//! 3 resource limit exceeded, 4 `--verify` found a mismatch.

mod commands;
mod input;

use std::process::ExitCode;

use clap::Parser;

use commands::{Cli, Usage, VerifyFailed};

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    if err.downcast_ref::<VerifyFailed>().is_some() {
        return 4;
    }
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<m2s_core::Error>() {
            return match e {
                m2s_core::Error::ResourceLimit(_) => 3,
                m2s_core::Error::InvalidArgument(_) | m2s_core::Error::Precondition(_) => 1,
                _ => 2,
            };
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_classes_map_to_exit_codes() {
        let core = |e: m2s_core::Error| exit_code(&anyhow::Error::new(e).context("while solving"));
        assert_eq!(core(m2s_core::Error::ResourceLimit("x".into())), 3);
        assert_eq!(core(m2s_core::Error::InvalidArgument("x".into())), 1);
        assert_eq!(
            core(m2s_core::Error::Parse {
                line: 1,
                msg: "x".into()
            }),
            2
        );
        assert_eq!(exit_code(&anyhow::Error::new(Usage("x".into()))), 1);
        assert_eq!(exit_code(&anyhow::Error::new(VerifyFailed("x".into()))), 4);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(exit_code(&anyhow::Error::new(io)), 2);
    }

    #[test]
    fn parser_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
