#ifndef BPINT_ERRORS_HPP
#define BPINT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bpint {

// Bad parameters: non-finite input, empty factor list, negative coefficient, ...
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// The requested value does not exist: K(k) at k>=1, divergent integral, ...
class singularity_error : public domain_error {
public:
    explicit singularity_error(const std::string& what) : domain_error(what) {}
};

// A method was asked to operate outside its validity region
// (e.g. the closed form on a spec whose largest coefficient still fits a polygon).
class out_of_domain_error : public domain_error {
public:
    explicit out_of_domain_error(const std::string& what) : domain_error(what) {}
};

// Several coefficients tie for the maximum, so "the largest side" is ill-defined.
class indeterminate_max_error : public domain_error {
public:
    explicit indeterminate_max_error(const std::string& what) : domain_error(what) {}
};

// A Pochhammer denominator sits on a non-positive integer.
class pole_error : public domain_error {
public:
    explicit pole_error(const std::string& what) : domain_error(what) {}
};

// Inconsistent evaluation budget or too little data for the requested analysis.
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace bpint

#endif
