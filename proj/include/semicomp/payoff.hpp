#pragma once

#include <functional>
#include <string>

namespace semicomp {

// Terminal test function f together with its a.e. derivatives and the shape
// flags the ordering checks rely on.
struct Payoff {
    std::string name;
    std::function<double(double)> f;
    std::function<double(double)> df;   // a.e. first derivative
    std::function<double(double)> d2f;  // a.e. second derivative
    bool convex = false;
    bool increasing = false;  // nondecreasing
    int growth = 1;           // polynomial growth degree bound (0, 1 or 2)

    static Payoff constant(double v);
    static Payoff affine(double a, double b);         // a + b*y
    static Payoff hinge(double sign, double strike);  // (sign*y - k)^+
    static Payoff call(double strike);                // (y - k)^+
    static Payoff put(double strike);                 // (k - y)^+
    static Payoff square();                           // y^2
    static Payoff abs_value();                        // |y|
    static Payoff softplus(double beta = 4.0);        // log(1+e^{beta y})/beta

    // Spot-checks the declared flags against sampled values; throws
    // ConfigError on an inconsistency.
    void validate() const;
};

} // namespace semicomp
