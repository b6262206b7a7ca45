#include "parambvp/truncation.hpp"

#include <cmath>
#include <random>

#include "parambvp/errors.hpp"

namespace parambvp {

TruncatedSpace::TruncatedSpace(int N) : dimension(N) {
    if (N < 2) throw DomainError("truncated space needs dimension >= 2");
}

double TruncatedSpace::norm(const RVector& x) const {
    if (x.size() != dimension) throw ShapeError("vector does not live in this space");
    return x.cwiseAbs().maxCoeff();
}

RVector partial_sum(const RVector& x, int n) {
    if (n < 1 || n > x.size())
        throw DomainError("partial-sum cutoff " + std::to_string(n) + " outside 1.." +
                          std::to_string(x.size()));
    RVector out = x;
    out.tail(x.size() - n).setZero();
    return out;
}

RVector DiagonalScaling::apply(const RVector& x) const {
    if (x.size() != dimension) throw ShapeError("vector does not live in this space");
    return diagonal.cwiseProduct(x);
}

RVector DiagonalScaling::apply_inverse(const RVector& x) const {
    if (x.size() != dimension) throw ShapeError("vector does not live in this space");
    return inverse_diagonal.cwiseProduct(x);
}

double DiagonalScaling::norm() const { return diagonal.cwiseAbs().maxCoeff(); }

double DiagonalScaling::inverse_norm() const { return inverse_diagonal.cwiseAbs().maxCoeff(); }

DiagonalScaling inverse_blowup_pair(int index, int N) {
    if (N < 2) throw DomainError("truncated space needs dimension >= 2");
    if (index < 1 || index > N)
        throw DomainError("scaled coordinate " + std::to_string(index) + " outside 1.." +
                          std::to_string(N));
    DiagonalScaling op;
    op.dimension = N;
    op.index = index;
    op.diagonal = RVector::Ones(N);
    op.inverse_diagonal = RVector::Ones(N);
    op.diagonal[index - 1] = 1.0 / index;
    op.inverse_diagonal[index - 1] = static_cast<double>(index);
    return op;
}

std::vector<TruncationDemoRow> truncation_demo(int N, unsigned seed) {
    const TruncatedSpace space(N);
    RVector x(N);
    for (int k = 0; k < N; ++k) x[k] = std::ldexp(1.0, -k); // 1, 1/2, 1/4, …

    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    Eigen::MatrixXd T(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) T(i, j) = unit(rng);
    const RVector Tx = T * x;

    std::vector<TruncationDemoRow> rows;
    rows.reserve(N);
    for (int n = 1; n <= N; ++n) {
        const DiagonalScaling op = inverse_blowup_pair(n, N);
        TruncationDemoRow row;
        row.n = n;
        row.sn_error = space.norm(partial_sum(x, n) - x);
        row.tsn_error = space.norm(RVector(T * partial_sum(x, n)) - Tx);
        row.in_error = space.norm(op.apply(x) - x);
        row.inverse_norm = op.inverse_norm();
        rows.push_back(row);
    }
    return rows;
}

} // namespace parambvp
