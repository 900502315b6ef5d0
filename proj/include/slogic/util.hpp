#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace slogic {

// User-facing failures (bad input files, missing artifacts). The CLI maps
// these to exit code 1, everything else to 2.
class UserError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// FNV-1a 64-bit, used for artifact/manifest hashing.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL);
std::uint64_t hash_file(const std::string& path);
std::string hex64(std::uint64_t h);

// Chunked parallel map over [0, n). fn(i) must only write to slot i of its
// output; results are then independent of the thread count. threads <= 1
// runs inline.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

class StopWatch {
public:
    StopWatch() : start_(std::chrono::steady_clock::now()) {}
    double elapsed_ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace slogic
