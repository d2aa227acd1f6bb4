#include "cmssa/fastdtw.hpp"

#include "cmssa/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cmssa::cluster {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_inputs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    if (a.rows() == 0 || b.rows() == 0)
        fail(ErrorKind::degenerate_input, "dynamic time warping needs non-empty series");
    if (a.cols() != b.cols())
        fail(ErrorKind::shape, "series channel counts differ (" + std::to_string(a.cols()) + " vs "
                                   + std::to_string(b.cols()) + ")");
}

// Ragged cost table restricted to the window.
class WindowTable {
public:
    explicit WindowTable(const SearchWindow& window)
        : window_(window)
    {
        offsets_.resize(window.lo.size() + 1, 0);
        for (std::size_t i = 0; i < window.lo.size(); ++i)
            offsets_[i + 1] = offsets_[i] + static_cast<std::size_t>(window.hi[i] - window.lo[i] + 1);
        cells_.assign(offsets_.back(), inf);
    }

    bool contains(Index i, Index j) const
    {
        return i >= 0 && j >= 0 && i < static_cast<Index>(window_.lo.size()) && j >= window_.lo[i]
               && j <= window_.hi[i];
    }

    double get(Index i, Index j) const { return contains(i, j) ? cells_[index(i, j)] : inf; }
    void set(Index i, Index j, double v) { cells_[index(i, j)] = v; }

private:
    std::size_t index(Index i, Index j) const
    {
        return offsets_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(j - window_.lo[i]);
    }

    const SearchWindow& window_;
    std::vector<std::size_t> offsets_;
    std::vector<double> cells_;
};

} // namespace

SearchWindow SearchWindow::full(Index rows, Index cols)
{
    return {std::vector<Index>(static_cast<std::size_t>(rows), 0),
            std::vector<Index>(static_cast<std::size_t>(rows), cols - 1)};
}

double local_cost(const Eigen::MatrixXd& a, Index i, const Eigen::MatrixXd& b, Index j)
{
    double sum = 0.0;
    for (Index c = 0; c < a.cols(); ++c) {
        const double diff = a(i, c) - b(j, c);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

WarpPath dtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    check_inputs(a, b);
    return constrained_dtw(a, b, SearchWindow::full(a.rows(), b.rows()));
}

WarpPath constrained_dtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SearchWindow& window)
{
    check_inputs(a, b);
    const Index n = a.rows();
    const Index m = b.rows();
    if (static_cast<Index>(window.lo.size()) != n || window.hi.size() != window.lo.size())
        fail(ErrorKind::shape, "search window does not cover every row");

    WindowTable table(window);
    for (Index i = 0; i < n; ++i) {
        for (Index j = window.lo[i]; j <= window.hi[i]; ++j) {
            const double cost = local_cost(a, i, b, j);
            if (i == 0 && j == 0) {
                table.set(i, j, cost);
                continue;
            }
            const double prev = std::min({table.get(i - 1, j), table.get(i, j - 1), table.get(i - 1, j - 1)});
            table.set(i, j, cost + prev);
        }
    }

    WarpPath path;
    path.distance = table.get(n - 1, m - 1);
    if (!std::isfinite(path.distance))
        fail(ErrorKind::numeric, "search window does not connect (0, 0) to the final cell");

    Index i = n - 1;
    Index j = m - 1;
    path.cells.emplace_back(i, j);
    while (i > 0 || j > 0) {
        const double diag = table.get(i - 1, j - 1);
        const double up = table.get(i - 1, j);
        const double left = table.get(i, j - 1);
        if (diag <= up && diag <= left) {
            --i;
            --j;
        } else if (up <= left) {
            --i;
        } else {
            --j;
        }
        path.cells.emplace_back(i, j);
    }
    std::reverse(path.cells.begin(), path.cells.end());
    return path;
}

Eigen::MatrixXd coarsen(const Eigen::MatrixXd& x)
{
    const Index half = x.rows() / 2;
    Eigen::MatrixXd out(half, x.cols());
    for (Index i = 0; i < half; ++i)
        out.row(i) = 0.5 * (x.row(2 * i) + x.row(2 * i + 1));
    return out;
}

SearchWindow expand_window(const WarpPath& coarse, Index rows, Index cols, Index radius)
{
    Index coarse_rows = 0;
    for (const auto& [i, j] : coarse.cells)
        coarse_rows = std::max(coarse_rows, i + 1);

    // column range per coarse row after widening every path cell by radius
    std::vector<Index> clo(static_cast<std::size_t>(coarse_rows + radius), std::numeric_limits<Index>::max());
    std::vector<Index> chi(clo.size(), std::numeric_limits<Index>::min());
    for (const auto& [i, j] : coarse.cells) {
        for (Index r = std::max<Index>(0, i - radius); r <= i + radius && r < static_cast<Index>(clo.size()); ++r) {
            clo[static_cast<std::size_t>(r)] = std::min(clo[static_cast<std::size_t>(r)], j - radius);
            chi[static_cast<std::size_t>(r)] = std::max(chi[static_cast<std::size_t>(r)], j + radius);
        }
    }

    SearchWindow window;
    window.lo.assign(static_cast<std::size_t>(rows), 0);
    window.hi.assign(static_cast<std::size_t>(rows), cols - 1);
    Index last_lo = 0;
    Index last_hi = 0;
    for (Index i = 0; i < rows; ++i) {
        const auto c = static_cast<std::size_t>(i / 2);
        Index lo = last_lo;
        Index hi = last_hi;
        if (c < clo.size() && clo[c] <= chi[c]) {
            lo = 2 * clo[c];
            hi = 2 * chi[c] + 1;
        }
        lo = std::clamp<Index>(lo, 0, cols - 1);
        hi = std::clamp<Index>(hi, 0, cols - 1);
        window.lo[static_cast<std::size_t>(i)] = lo;
        window.hi[static_cast<std::size_t>(i)] = hi;
        last_lo = lo;
        last_hi = hi;
    }

    // make ranges monotone and connected so the final cell stays reachable
    window.lo.front() = 0;
    window.hi.back() = cols - 1;
    for (Index i = 1; i < rows; ++i) {
        auto& lo = window.lo[static_cast<std::size_t>(i)];
        auto& hi = window.hi[static_cast<std::size_t>(i)];
        const Index prev_lo = window.lo[static_cast<std::size_t>(i - 1)];
        const Index prev_hi = window.hi[static_cast<std::size_t>(i - 1)];
        hi = std::max(hi, prev_hi);
        lo = std::clamp<Index>(lo, prev_lo, std::min(prev_hi + 1, hi));
    }
    return window;
}

WarpPath fastdtw(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Index radius)
{
    check_inputs(a, b);
    if (radius < 0)
        fail(ErrorKind::parameter, "FastDTW radius must be >= 0");
    const Index min_size = radius + 2;
    if (a.rows() < min_size || b.rows() < min_size)
        return dtw(a, b);

    const auto coarse = fastdtw(coarsen(a), coarsen(b), radius);
    return constrained_dtw(a, b, expand_window(coarse, a.rows(), b.rows(), radius));
}

double fastdtw_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Index radius)
{
    return fastdtw(a, b, radius).distance;
}

} // namespace cmssa::cluster
