#ifndef HOMODYNE_QUADRATURE_HPP
#define HOMODYNE_QUADRATURE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace homodyne {

// Composite Simpson weights for n+1 equispaced nodes (n even intervals),
// already scaled by h/3. Summation in ascending-node order keeps results
// bit-reproducible.
inline std::vector<double> simpson_weights(std::size_t intervals, double h) {
    std::vector<double> w(intervals + 1, 0.0);
    const double c = h / 3.0;
    w[0] = c;
    w[intervals] = c;
    for (std::size_t j = 1; j < intervals; ++j) w[j] = (j % 2 == 1) ? 4.0 * c : 2.0 * c;
    return w;
}

// Simpson sum of tabulated values on a uniform grid; values.size() must be
// odd (even interval count).
template <typename T>
T simpson_sum(std::span<const T> values, double h) {
    const std::size_t n = values.size() - 1;
    T odd{}, even{};
    for (std::size_t j = 1; j < n; j += 2) odd += values[j];
    for (std::size_t j = 2; j < n; j += 2) even += values[j];
    return (values[0] + values[n] + 4.0 * odd + 2.0 * even) * (h / 3.0);
}

// Composite Simpson of f on [a, b] with the given even interval count.
template <typename F>
double simpson(F&& f, double a, double b, std::size_t intervals) {
    const double h = (b - a) / static_cast<double>(intervals);
    double odd = 0.0, even = 0.0;
    for (std::size_t j = 1; j < intervals; j += 2) odd += f(a + h * static_cast<double>(j));
    for (std::size_t j = 2; j < intervals; j += 2) even += f(a + h * static_cast<double>(j));
    return (f(a) + f(b) + 4.0 * odd + 2.0 * even) * (h / 3.0);
}

// Round up to the nearest even integer, at least 2.
inline std::size_t even_intervals(double count) {
    auto n = static_cast<std::size_t>(count) + 1;
    if (n < 2) n = 2;
    if (n % 2 != 0) ++n;
    return n;
}

} // namespace homodyne

#endif
