#pragma once

// Thin wrappers over Boost.Math adaptive quadrature that report the
// achieved error and throw when an absolute error target is not met.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace mcshare {

class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved, double target)
        : std::runtime_error(format(what, achieved, target)), achieved_(achieved), target_(target)
    {
    }

    double achieved() const noexcept { return achieved_; }
    double target() const noexcept { return target_; }

private:
    static std::string format(const std::string& what, double achieved, double target)
    {
        std::ostringstream s;
        s << what << ": quadrature error " << achieved << " exceeds target " << target;
        return s.str();
    }

    double achieved_;
    double target_;
};

namespace quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive 31-point Gauss-Kronrod on a finite interval.
template <class F>
Result gauss_kronrod(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 40)
{
    Result r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol, &r.error);
    return r;
}

/// Tanh-sinh on a finite interval; tolerates endpoint singularities and
/// integrand mass packed against an endpoint.
template <class F>
Result tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-13)
{
    static thread_local boost::math::quadrature::tanh_sinh<double> integrator(20);
    Result r;
    double l1 = 0.0;
    r.value = integrator.integrate(f, a, b, rel_tol, &r.error, &l1);
    return r;
}

inline void require(const Result& r, double abs_target, const char* what)
{
    if (!std::isfinite(r.value) || !(r.error <= abs_target))
        throw QuadratureError(what, r.error, abs_target);
}

} // namespace quad
} // namespace mcshare
