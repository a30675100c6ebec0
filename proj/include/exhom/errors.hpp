#pragma once

#include <stdexcept>
#include <string>

namespace exhom {

// Error taxonomy mirrors the CLI exit codes.
enum class errc {
    ok = 0,
    verdict = 1,      // a mathematical check failed, or an internal contradiction
    schema = 2,       // malformed input file
    model = 3,        // model-level math failure (Jacobi / d^2, bad window)
    window = 4,       // frequency escaped the torus window
    unsupported = 5,  // input outside the engine's exact-computation domain
};

struct error : std::runtime_error {
    errc code;
    error(errc c, const std::string& what) : std::runtime_error(what), code(c) {}
};

[[noreturn]] inline void fail(errc c, const std::string& what) { throw error(c, what); }

}  // namespace exhom
