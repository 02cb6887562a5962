#pragma once

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

namespace newsrace::detail {

// Integral of f over the open unit interval. The integrand is never evaluated
// at 0 or 1, so endpoint singularities of quantile functions are fine.
template <class F>
double integrate_unit(F&& f, double tol = 1e-13) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, 0.0, 1.0, tol);
}

// Integral over u in (0,1) of h(u, 1 - u). Each half is integrated in the
// variable closest to its endpoint, so h always receives the small coordinate
// exactly and can choose quantile() or quantile_complement() accordingly.
template <class H>
double integrate_driver(H&& h, double tol = 1e-13) {
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    const double lower = integrator.integrate([&](double t) { return h(t, 1.0 - t); }, 0.0, 0.5, tol);
    const double upper = integrator.integrate([&](double t) { return h(1.0 - t, t); }, 0.0, 0.5, tol);
    return lower + upper;
}

template <class F>
double integrate_interval(F&& f, double a, double b, double tol = 1e-13) {
    if (!(b > a)) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> integrator;
    return integrator.integrate(f, a, b, tol);
}

}  // namespace newsrace::detail
