#pragma once

#include <stdexcept>
#include <string>

namespace lorentz {

/// Malformed input: bad spec file, unknown key, parameter outside its
/// admissible range. Maps to CLI exit code 2.
struct spec_error : std::runtime_error {
    explicit spec_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric safety guard fired: capacity limit, root-finder failure,
/// non-decaying autocorrelation tail, unresolved kernel. Exit code 3.
struct numeric_guard_error : std::runtime_error {
    explicit numeric_guard_error(const std::string& what) : std::runtime_error(what) {}
};

/// A statistical check failed while running with --strict. Exit code 4.
struct stat_failure : std::runtime_error {
    explicit stat_failure(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lorentz
