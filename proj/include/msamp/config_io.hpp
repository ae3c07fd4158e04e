#pragma once

#include <iosfwd>
#include <string>

#include "msamp/model.hpp"

namespace msamp {

/// Flat `key = value` text format, one key per SystemConfig field. Lines
/// starting with '#' are comments. Lists are whitespace separated.
///
///   L = 4096
///   U = 2
///   F = 4
///   alpha = 1 1
///   lambda = 0.1 0.1
///   sigma.1 = 1 1 0.5 0.5        # F entries: diagonal
///   sigma.2 = (1,0) (0,0) ...    # F*F entries: row-major, "(re,im)" or "re"
///   noise_var = 0.1
///   T = 10
///   nu = 1 1
///   dict = haar                  # haar | fourier
///   seed = 1
///   mc_samples = 100000
SystemConfig read_config(std::istream& in);
SystemConfig read_config_file(const std::string& path);
void write_config(std::ostream& out, const SystemConfig& config);
void write_config_file(const std::string& path, const SystemConfig& config);

/// FNV-1a hash of the canonical text serialization, as 16 hex digits.
std::string config_hash(const SystemConfig& config);

}  // namespace msamp
