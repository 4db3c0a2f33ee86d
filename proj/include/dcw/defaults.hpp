#pragma once

#include <string>

// Versioned numeric defaults (tolerances, chain sizing) compiled into the
// binary from config/defaults.json.  Every reported run carries the content
// hash of the defaults it was checked against, so results stay auditable
// when the numbers are retuned.

namespace dcw {

// Raw bytes of the embedded defaults file.
const char* defaults_json_text();

// Git-style blob hash of the embedded defaults file: the SHA-1 of
// "blob <size>\0" followed by the file bytes, in lowercase hex.  Matches
// `git hash-object config/defaults.json`.
std::string defaults_sha1();

int defaults_version();

// "bl_family_version" from the embedded file; must agree with the compiled
// bl_family_version constant (the unit suite enforces this).
int bl_family_version_default();

// Lookup in the "tolerances" table; throws std::out_of_range on unknown keys
// so a misspelled name cannot silently fall back to a stale constant.
double default_tolerance(const std::string& name);

// Lookup in the "chain" table (burn_in_sweeps_per_n, ess_floor,
// recorded_sweeps).
double chain_default(const std::string& name);

}  // namespace dcw
