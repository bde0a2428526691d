//! Recognition algorithms with re-verifiable certificates: binary and U24
//! detection, TU signing, regularity, graphic and cographic recognition,
//! forbidden-minor search and MFMC-failure detection.

mod binary;
mod graphic;
mod mfmc;
mod minors;
mod signing;

use serde::{Deserialize, Serialize};

pub(crate) use mfmc::transversal_in;
pub use binary::{find_u24_minor, is_binary, BinaryCheck};
pub use graphic::{is_cographic, is_graphic, GraphCertificate, DEFAULT_GRAPHIC_BUDGET};
pub use mfmc::{
    f7star_containing, find_clique_transversal_circuit, mfmc_fails, mfmc_fails_matroid, transfer_minor, MfmcVerdict, MfmcWitness,
    TransversalWitness, DEFAULT_TRANSVERSAL_BUDGET,
};
pub use minors::{
    clique_f7_certificate, delta5_catalog_check, delta5_f7_certificate, minor_search, minor_search_containing, shift_certificate, CatalogFinding, MinorCertificate,
    DEFAULT_MINOR_BUDGET,
};
pub use signing::{is_regular, sign_and_test_tu, RegularityResult, SigningResult, TuStatus, ViolationCertificate, ViolationKind};

/// Outcome of a bounded search. `Exhausted` means the search space was
/// covered completely and nothing exists; `BudgetExceeded` means nothing was
/// found before the budget ran out, which proves nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Search<T> {
    Found(T),
    Exhausted,
    BudgetExceeded,
}

impl<T> Search<T> {
    pub fn found(&self) -> Option<&T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn into_found(self) -> Option<T> {
        match self {
            Search::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, Search::Found(_))
    }
}

/// Three-valued answer used wherever a recognizer may run out of budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::Yes
        } else {
            Verdict::No
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Yes => "true",
            Verdict::No => "false",
            Verdict::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}
