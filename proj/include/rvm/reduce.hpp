#ifndef RVM_REDUCE_HPP
#define RVM_REDUCE_HPP

#include <cstddef>
#include <span>

namespace rvm {

/// Pairwise summation over a fixed-shape tree.
///
/// The split points depend only on the length of the input, never on the
/// number of threads, so the result is bit-identical from run to run.
inline double pairwise_sum(std::span<const double> values)
{
    constexpr std::size_t leaf = 32;
    if (values.size() <= leaf) {
        double s = 0.0;
        for (double v : values)
            s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Pairwise sum of `op(i)` for i in [0, n), same tree shape as pairwise_sum.
template <typename Op>
double pairwise_sum_by(std::size_t begin, std::size_t end, const Op& op)
{
    constexpr std::size_t leaf = 32;
    if (end - begin <= leaf) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i)
            s += op(i);
        return s;
    }
    const std::size_t mid = begin + (end - begin) / 2;
    return pairwise_sum_by(begin, mid, op) + pairwise_sum_by(mid, end, op);
}

template <typename Op>
double pairwise_sum_by(std::size_t n, const Op& op)
{
    return pairwise_sum_by(std::size_t{0}, n, op);
}

} // namespace rvm

#endif
