#pragma once

#include <stdexcept>
#include <string>

namespace impulse_floquet {

/// A time argument fell outside the domain of a piecewise function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A coefficient evaluator returned a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, double t) : std::runtime_error(what), t_(t) {}
    double time() const noexcept { return t_; }

private:
    double t_;
};

/// The propagated state stopped being finite.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double last_good_t)
        : std::runtime_error(what), last_good_t_(last_good_t) {}
    double last_good_time() const noexcept { return last_good_t_; }

private:
    double last_good_t_;
};

/// Malformed JSON system descriptor; `field()` is a path such as "impulses[1].alpha".
class DescriptorError : public std::runtime_error {
public:
    DescriptorError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A random-system constraint could not be met within the iteration budget.
class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace impulse_floquet
