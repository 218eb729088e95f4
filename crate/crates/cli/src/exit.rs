use std::process::ExitCode;

use structural_entropy::harness::HarnessError;
use structural_entropy::{DistributionError, FrontendError};

pub const USAGE: u8 = 2;
pub const PARSE_FAILURE: u8 = 3;
pub const INSUFFICIENT_DATA: u8 = 4;
pub const IO: u8 = 5;
pub const MALFORMED_INPUT: u8 = 6;
pub const OTHER: u8 = 1;

fn frontend(e: &FrontendError) -> u8 {
    match e {
        FrontendError::UnknownLanguage(_) | FrontendError::DuplicateLanguage(_) => USAGE,
        FrontendError::EmptyInput { .. }
        | FrontendError::ParseFailure { .. }
        | FrontendError::InvalidTree(_) => PARSE_FAILURE,
        FrontendError::BackendRejected { .. } => OTHER,
    }
}

fn harness(e: &HarnessError) -> u8 {
    match e {
        HarnessError::Frontend(f) => frontend(f),
        HarnessError::InvalidConfig(_) => USAGE,
        HarnessError::Distribution(DistributionError::InvalidEpsilon(_)) => USAGE,
        HarnessError::InsufficientData(_) | HarnessError::EmptyDataset | HarnessError::EmptyReport => {
            INSUFFICIENT_DATA
        }
        HarnessError::Io(_) => IO,
        HarnessError::MalformedRecord { .. }
        | HarnessError::Json(_)
        | HarnessError::Csv(_)
        | HarnessError::DuplicateTask(_) => MALFORMED_INPUT,
        HarnessError::Distribution(_) | HarnessError::Metric(_) => OTHER,
    }
}

/// Exit code for the first recognised error in the chain.
pub fn code_for(err: &anyhow::Error) -> ExitCode {
    let code = err
        .chain()
        .find_map(|cause| {
            if let Some(e) = cause.downcast_ref::<HarnessError>() {
                Some(harness(e))
            } else if let Some(e) = cause.downcast_ref::<FrontendError>() {
                Some(frontend(e))
            } else if cause.downcast_ref::<std::io::Error>().is_some() {
                Some(IO)
            } else if cause.downcast_ref::<serde_json::Error>().is_some() {
                Some(MALFORMED_INPUT)
            } else {
                None
            }
        })
        .unwrap_or(OTHER);
    ExitCode::from(code)
}
