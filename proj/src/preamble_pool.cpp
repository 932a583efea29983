#include "ralp/preamble_pool.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace ralp {

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; static_cast<long>(d) * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

namespace {

// exp(2*pi*i * num / n) with the phase reduced mod n first, so large cubes
// never reach the trig functions.
std::complex<double> unit_phase(long num, int n) {
    const long r = ((num % n) + n) % n;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace

PreamblePool::PreamblePool(int n, int l2_size, Eigen::MatrixXcd vectors)
    : n_(n), l2_size_(l2_size), vectors_(std::move(vectors)) {}

PreamblePool PreamblePool::build(int n, int l2_size) {
    if (n < 5 || !is_prime(n))
        throw std::invalid_argument("PreamblePool: n must be a prime >= 5, got " +
                                    std::to_string(n));
    if (l2_size < 1 || l2_size > n * (n - 1))
        throw std::invalid_argument("PreamblePool: l2_size must be in [1, n*(n-1)], got " +
                                    std::to_string(l2_size));

    Eigen::MatrixXcd vectors(n, n + l2_size);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int col = 0; col < n + l2_size; ++col) {
        // Column order: family u = 0 first (layer 1), then families u >= 1
        // in lexicographic (u, v) order (layer 2).
        const int flat = col < n ? col : n + (col - n);  // (u, v) flattened as u*n + v
        const long u = flat / n;
        const long v = flat % n;
        for (int k = 0; k < n; ++k) {
            const long shifted = k + u;
            const long phase = shifted * shifted * shifted + v * k;
            vectors(k, col) = scale * unit_phase(phase, n);
        }
    }
    return PreamblePool(n, l2_size, std::move(vectors));
}

Eigen::MatrixXcd::ConstColXpr PreamblePool::vector(int l) const {
    if (l < 0 || l >= size())
        throw std::out_of_range("PreamblePool::vector: index " + std::to_string(l) +
                                " outside pool of size " + std::to_string(size()));
    return vectors_.col(l);
}

std::complex<double> PreamblePool::cross_correlation(int a, int b) const {
    if (a < 0 || a >= size() || b < 0 || b >= size())
        throw std::out_of_range("PreamblePool::cross_correlation: index outside pool");
    // Eigen's dot conjugates its first argument, giving x_b^H x_a.
    return vectors_.col(b).dot(vectors_.col(a));
}

void PreamblePool::write_gram_csv(std::ostream& out) const {
    const Eigen::MatrixXcd gram = vectors_.adjoint() * vectors_;
    char buf[32];
    for (int r = 0; r < gram.rows(); ++r) {
        for (int c = 0; c < gram.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.12g", std::abs(gram(r, c)));
            if (c) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

}  // namespace ralp
