#pragma once

#include <atomic>
#include <stdexcept>
#include <string>

namespace memkernel {

/// Invalid argument outside the admissible parameter range.
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Argument inside the admissible range but outside the representable domain
/// (overflow of the result, evaluation beyond a declared bound).
class range_error : public std::range_error {
public:
    explicit range_error(const std::string& what) : std::range_error(what) {}
};

/// Inconsistent configuration, e.g. an inversion contour crossing a declared pole
/// or an unknown kernel id.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested tolerance not reached (quadrature non-convergence, divided-difference
/// blow-up on non-smooth input, series divergence past its horizon).
class accuracy_error : public std::runtime_error {
public:
    accuracy_error(const std::string& what, double achieved = 0.0)
        : std::runtime_error(what), achieved_tolerance_(achieved) {}
    double achieved_tolerance() const { return achieved_tolerance_; }

private:
    double achieved_tolerance_;
};

/// A quantity violated a structural guarantee beyond numerical noise
/// (density below -1e-8, negative mean square displacement).
class integrity_error : public std::runtime_error {
public:
    explicit integrity_error(const std::string& what) : std::runtime_error(what) {}
};

/// File input/output failure.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

namespace diag {

/// Process-wide event counters for logged (non-throwing) numerical events.
struct Counters {
    std::atomic<long> clamped_density_values{0};
    std::atomic<long> endpoint_half_weights{0};
    std::atomic<long> truncation_warnings{0};
    std::atomic<long> inversion_cross_check_warnings{0};
};

inline Counters& counters() {
    static Counters c;
    return c;
}

}  // namespace diag

}  // namespace memkernel
