// API payload shapes, mirroring the service's OpenAPI schema one to one.
// The dashboard displays these fields verbatim; it never derives numbers
// the API does not already expose.
export const STRATEGIES = [
    "blind",
    "blind_coverage",
    "grammar",
    "grammar_coverage",
    "typed",
];
export const TRIAGE_STATES = ["new", "confirmed", "duplicate", "wontfix"];
