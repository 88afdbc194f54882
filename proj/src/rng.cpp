#include "prwlab/rng.hpp"

#include "prwlab/error.hpp"

namespace prwlab {

RngStream::RngStream(std::uint64_t seed) noexcept {
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        word = z ^ (z >> 31);
    }
}

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::domain: return "domain";
        case ErrorKind::grid_mismatch: return "grid_mismatch";
        case ErrorKind::missing_moment: return "missing_moment";
        case ErrorKind::not_converged: return "not_converged";
        case ErrorKind::unsupported: return "unsupported";
        case ErrorKind::bracket_failure: return "bracket_failure";
        case ErrorKind::parse: return "parse";
        case ErrorKind::validation: return "validation";
        case ErrorKind::io: return "io";
    }
    return "unknown";
}

}  // namespace prwlab
