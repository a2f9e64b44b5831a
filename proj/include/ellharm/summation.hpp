#pragma once

#include <cmath>

namespace ellharm {

/// Neumaier's variant of Kahan summation. Unlike plain Kahan it stays
/// compensated when an addend is larger in magnitude than the running sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    CompensatedSum& operator+=(double value) {
        const double t = sum + value;
        if (std::abs(sum) >= std::abs(value))
            comp += (sum - t) + value;
        else
            comp += (value - t) + sum;
        sum = t;
        return *this;
    }

    double value() const { return sum + comp; }
};

} // namespace ellharm
