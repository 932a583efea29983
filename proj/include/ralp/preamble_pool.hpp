#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>

namespace ralp {

// Pool of unit-norm preamble sequences built from cubic phase ramps over a
// prime-length alphabet:
//
//     x[k] = exp(2*pi*i * ((k + u)^3 + v*k mod n) / n) / sqrt(n),  k = 0..n-1.
//
// The shift index u selects a family of n sequences; within one family the
// n modulation indices v give an orthonormal basis, and any two sequences
// from different families have inner-product magnitude exactly 1/sqrt(n)
// (the cross term reduces to a quadratic Gauss sum because n is prime and
// n != 3).  Columns are laid out as
//
//     [0, n)             layer-1 preambles: family u = 0, v ascending
//     [n, n + l2_size)   layer-2 preambles: families u = 1, 2, ... in
//                        lexicographic (u, v) order
//
// so layer 1 is orthonormal and every layer-1 / layer-2 pair has coherence
// 1/sqrt(n).
class PreamblePool {
public:
    // n must be a prime >= 5; l2_size in [1, n*(n-1)].
    static PreamblePool build(int n, int l2_size);

    int n() const { return n_; }
    int l1_size() const { return n_; }
    int l2_size() const { return l2_size_; }
    int size() const { return n_ + l2_size_; }  // total columns

    // n x (n + l2_size); column l is the l-th preamble.
    const Eigen::MatrixXcd& vectors() const { return vectors_; }

    Eigen::MatrixXcd::ConstColXpr vector(int l) const;

    // Views of the two layers as contiguous column blocks.
    auto l1_block() const { return vectors_.leftCols(n_); }
    auto l2_block() const { return vectors_.rightCols(l2_size_); }

    // Inner product <x_a, x_b> = x_b^H x_a between two pool columns.
    std::complex<double> cross_correlation(int a, int b) const;

    // Writes the |Gram| matrix of the whole pool as CSV (one row per
    // preamble, magnitudes only).
    void write_gram_csv(std::ostream& out) const;

private:
    PreamblePool(int n, int l2_size, Eigen::MatrixXcd vectors);

    int n_;
    int l2_size_;
    Eigen::MatrixXcd vectors_;
};

bool is_prime(int n);

}  // namespace ralp
