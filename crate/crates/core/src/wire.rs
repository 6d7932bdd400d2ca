//! Text layout shared between request renderers and the mock provider.
//!
//! Template assets and rendered ranking requests must keep these labels for
//! the offline mock to understand them; a real model only reads them as prose.

pub const START: &str = "<START>";
pub const END: &str = "<END>";

/// Line prefix carrying the chain-of-thought example in initialization requests.
pub const EXAMPLE_LABEL: &str = "Example prompt:";
/// Line prefix of each parent prompt, followed by its 1-based number and `:`.
pub const PARENT_LABEL: &str = "Prompt ";

pub const SESSION_HEADER: &str = "Session:";
pub const CANDIDATES_HEADER: &str = "Candidates:";
/// Separates an item title from its comma-separated categories.
pub const CATEGORY_SEPARATOR: &str = " | categories: ";
