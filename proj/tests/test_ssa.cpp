#include <doctest.h>

#include "cmssa/basis_io.hpp"
#include "cmssa/error.hpp"
#include "cmssa/ssa.hpp"

#include "contract.hpp"
#include "oracles.hpp"

#include <filesystem>

using namespace cmssa;
using namespace cmssa::ssa;

namespace {

ingest::CenteredSeries centered(const Eigen::MatrixXd& v)
{
    return ingest::center(ingest::TimeSeries(v, "s"));
}

ingest::CenteredSeries raw(const Eigen::MatrixXd& v)
{
    ingest::CenteredSeries c;
    c.values = v;
    c.channel_means = Eigen::RowVectorXd::Zero(v.cols());
    c.id = "raw";
    return c;
}

CovarianceMatrix cov_of(const Eigen::MatrixXd& m)
{
    return {m, 10};
}

EigenBasis identity_basis(Index window, Index channels)
{
    EigenBasis b;
    b.vectors = Eigen::MatrixXd::Identity(window * channels, window * channels);
    b.eigenvalues = Eigen::VectorXd::Ones(window * channels);
    b.window = window;
    b.channels = channels;
    return b;
}

template <typename Fn>
ErrorKind kind_of(Fn&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::numeric;
}

} // namespace

TEST_CASE("hankelize")
{
    SUBCASE("single channel")
    {
        const auto h = hankelize(raw(Eigen::VectorXd::LinSpaced(5, 1, 5)), 3);
        Eigen::MatrixXd expected(3, 3);
        expected << 1, 2, 3, 2, 3, 4, 3, 4, 5;
        CHECK(h.values == expected);
        CHECK(h.window == 3);
        CHECK(*h.source_length == 5);
    }
    SUBCASE("window equal to length gives one concatenated row")
    {
        Eigen::MatrixXd x(3, 2);
        x << 1, 4, 2, 5, 3, 6;
        const auto h = hankelize(raw(x), 3);
        CHECK(h.rows() == 1);
        Eigen::RowVectorXd expected(6);
        expected << 1, 2, 3, 4, 5, 6;
        CHECK(h.values.row(0) == expected);
    }
    SUBCASE("two channels are concatenated in channel order")
    {
        Eigen::MatrixXd x(4, 2);
        x << 1, 10, 2, 20, 3, 30, 4, 40;
        const auto h = hankelize(raw(x), 2);
        Eigen::MatrixXd expected(3, 4);
        expected << 1, 2, 10, 20, 2, 3, 20, 30, 3, 4, 30, 40;
        CHECK(h.values == expected);
    }
    SUBCASE("errors")
    {
        CHECK(kind_of([] { hankelize(raw(Eigen::VectorXd::Ones(3)), 4); }) == ErrorKind::window_too_large);
        CHECK(kind_of([] { hankelize(raw(Eigen::VectorXd::Ones(3)), 0); }) == ErrorKind::parameter);
    }
    SUBCASE("property: randomized Hankel index spot checks")
    {
        std::mt19937_64 rng(1);
        for (int trial = 0; trial < 100; ++trial) {
            const int t = 1 + static_cast<int>(rng() % 30);
            const int d = 1 + static_cast<int>(rng() % 3);
            const int w = 1 + static_cast<int>(rng() % t);
            const Eigen::MatrixXd x = oracle::random_matrix(rng, t, d);
            const auto h = hankelize(raw(x), w);
            REQUIRE(h.rows() == t - w + 1);
            REQUIRE(h.values.cols() == d * w);
            for (int probe = 0; probe < 20; ++probe) {
                // 1-based indices: entry (r, (j-1)W + c) equals x^{(j)}_{r+c-1}
                const int r = 1 + static_cast<int>(rng() % (t - w + 1));
                const int c = 1 + static_cast<int>(rng() % w);
                const int j = 1 + static_cast<int>(rng() % d);
                CHECK(h.values(r - 1, (j - 1) * w + c - 1) == x(r + c - 2, j - 1));
            }
        }
    }
}

TEST_CASE("stack")
{
    std::mt19937_64 rng(2);
    const auto a = hankelize(raw(oracle::random_matrix(rng, 4, 2)), 2);
    const auto b = hankelize(raw(oracle::random_matrix(rng, 4, 2)), 2);
    const std::vector<TrajectoryMatrix> both{a, b};
    const auto s = stack(both);
    CHECK(s.rows() == 6);
    CHECK(s.values.cols() == 4);
    CHECK(s.values.topRows(3) == a.values);
    CHECK(s.values.bottomRows(3) == b.values);
    CHECK_FALSE(s.source_length.has_value());

    const std::vector<TrajectoryMatrix> one{a};
    CHECK(stack(one).values == a.values);

    CHECK(kind_of([] { stack(std::vector<TrajectoryMatrix>{}); }) == ErrorKind::degenerate_input);
    const auto c = hankelize(raw(oracle::random_matrix(rng, 4, 2)), 3);
    CHECK(kind_of([&] { stack(std::vector<TrajectoryMatrix>{a, c}); }) == ErrorKind::shape);
}

TEST_CASE("covariance")
{
    SUBCASE("identical rows give the zero matrix")
    {
        TrajectoryMatrix h;
        h.values = Eigen::MatrixXd::Ones(4, 3) * 2.5;
        h.window = 3;
        h.channels = 1;
        CHECK(covariance(h).values.isZero(0.0));
    }
    SUBCASE("2x1 hand computation")
    {
        TrajectoryMatrix h;
        h.values = Eigen::Vector2d(0, 2);
        h.window = 1;
        h.channels = 1;
        const auto c = covariance(h);
        CHECK(c.values(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(c.row_count == 2);
    }
    SUBCASE("single row is insufficient")
    {
        TrajectoryMatrix h;
        h.values = Eigen::RowVector3d(1, 2, 3);
        CHECK(kind_of([&] { covariance(h); }) == ErrorKind::insufficient_data);
    }
    SUBCASE("property: symmetric, PSD, eigenvalue sum equals trace")
    {
        std::mt19937_64 rng(3);
        for (int trial = 0; trial < 30; ++trial) {
            const int w = 2 + trial % 5;
            const auto h = hankelize(centered(oracle::random_matrix(rng, 3 * w + trial, 2)), w);
            const auto c = covariance(h);
            CHECK(c.values == c.values.transpose());
            const Eigen::VectorXd ev = oracle::jacobi_eigen(c.values).values;
            CHECK(ev.minCoeff() >= -1e-9 * ev.maxCoeff());
            CHECK(ev.sum() == doctest::Approx(c.values.trace()).epsilon(1e-10));
        }
    }
}

TEST_CASE("contrast")
{
    const Eigen::Matrix2d cx = Eigen::Vector2d(3, 1).asDiagonal();
    const Eigen::Matrix2d cy = Eigen::Matrix2d::Identity();
    CHECK(contrast(cov_of(cx), cov_of(cy), 0.0).values == cx);
    CHECK(contrast(cov_of(cx), cov_of(cx), 1.0).values.isZero(0.0));
    const Eigen::Matrix2d expected = Eigen::Vector2d(1, -1).asDiagonal();
    CHECK(contrast(cov_of(cx), cov_of(cy), 2.0).values == expected);

    CHECK(kind_of([&] { contrast(cov_of(cx), cov_of(cy), -0.5); }) == ErrorKind::parameter);
    CHECK(kind_of([&] { contrast(cov_of(cx), cov_of(Eigen::Matrix3d::Identity()), 1.0); }) == ErrorKind::shape);
}

TEST_CASE("top_eigenbasis")
{
    SUBCASE("diagonal matrix")
    {
        const Eigen::Matrix3d c = Eigen::Vector3d(5, 2, 1).asDiagonal();
        const auto b = top_eigenbasis(cov_of(c), 2, 3, 1, 0.0);
        CHECK(b.eigenvalues(0) == doctest::Approx(5.0));
        CHECK(b.eigenvalues(1) == doctest::Approx(2.0));
        CHECK(b.vectors.col(0).isApprox(Eigen::Vector3d::UnitX().eval()));
        CHECK(b.vectors.col(1).isApprox(Eigen::Vector3d::UnitY().eval()));
        CHECK(contract::check_basis(b, c).ok());
    }
    SUBCASE("ordering is algebraic, not by magnitude")
    {
        const Eigen::Matrix2d c = Eigen::Vector2d(1, -3).asDiagonal();
        const auto b = top_eigenbasis(cov_of(c), 1, 2, 1, 1.0);
        CHECK(b.eigenvalues(0) == doctest::Approx(1.0));
        CHECK(b.vectors.col(0).isApprox(Eigen::Vector2d::UnitX().eval()));
        CHECK(b.alpha == 1.0);
    }
    SUBCASE("random symmetric 6x6 against a Jacobi oracle")
    {
        std::mt19937_64 rng(4);
        for (int trial = 0; trial < 20; ++trial) {
            const Eigen::MatrixXd c = oracle::random_symmetric(rng, 6);
            const auto b = top_eigenbasis(cov_of(c), 6, 3, 2, 0.5);
            const auto ref = oracle::jacobi_eigen(c);
            CHECK((b.eigenvalues - ref.values).cwiseAbs().maxCoeff() <= 1e-10);
            const Eigen::MatrixXd rebuilt = b.vectors * b.eigenvalues.asDiagonal() * b.vectors.transpose();
            CHECK((rebuilt - c).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK(contract::check_basis(b, c).ok());
        }
    }
    SUBCASE("errors")
    {
        const Eigen::Matrix2d c = Eigen::Matrix2d::Identity();
        CHECK(kind_of([&] { top_eigenbasis(cov_of(c), 0, 2, 1, 0.0); }) == ErrorKind::parameter);
        CHECK(kind_of([&] { top_eigenbasis(cov_of(c), 3, 2, 1, 0.0); }) == ErrorKind::parameter);
        Eigen::Matrix2d asym;
        asym << 1, 2, 0, 1;
        CHECK(kind_of([&] { top_eigenbasis(cov_of(asym), 1, 2, 1, 0.0); }) == ErrorKind::parameter);
    }
    SUBCASE("rank-deficient covariance keeps null-space vectors")
    {
        TrajectoryMatrix h;
        h.values = Eigen::MatrixXd::Zero(5, 4);
        h.values.col(0) = Eigen::VectorXd::LinSpaced(5, -2, 2);
        h.window = 4;
        h.channels = 1;
        const auto c = covariance(h);
        const auto b = top_eigenbasis(c, 4, 4, 1, 0.0);
        CHECK(b.components() == 4);
        CHECK(contract::check_basis(b, c.values).ok());
    }
}

TEST_CASE("project")
{
    std::mt19937_64 rng(5);
    const auto x = centered(oracle::random_matrix(rng, 9, 2));
    SUBCASE("identity basis reproduces the trajectory matrix")
    {
        CHECK(project(x, identity_basis(3, 2)) == hankelize(x, 3).values);
    }
    SUBCASE("zero series gives zero PCs")
    {
        CHECK(project(raw(Eigen::MatrixXd::Zero(9, 2)), identity_basis(3, 2)).isZero(0.0));
    }
    SUBCASE("K = 1 shape")
    {
        const auto fit = fit_mssa(std::vector{ingest::TimeSeries(x.values, "x")}, 3, 1);
        const auto a = project(x, fit);
        CHECK(a.rows() == 7);
        CHECK(a.cols() == 1);
    }
    SUBCASE("errors")
    {
        CHECK(kind_of([&] { project(raw(Eigen::MatrixXd::Zero(2, 2)), identity_basis(3, 2)); })
              == ErrorKind::window_too_large);
        CHECK(kind_of([&] { project(raw(Eigen::MatrixXd::Zero(9, 1)), identity_basis(3, 2)); }) == ErrorKind::schema);
    }
}

TEST_CASE("reconstruct")
{
    SUBCASE("completeness with K = DW")
    {
        std::mt19937_64 rng(6);
        for (int trial = 0; trial < 30; ++trial) {
            const int w = 2 + trial % 6;
            const int d = 1 + trial % 2;
            const int t = w + 1 + static_cast<int>(rng() % (3 * w));
            const ingest::TimeSeries s(oracle::random_matrix(rng, t, d), "s");
            const auto b = fit_mssa(std::vector{s}, w, d * w);
            const auto x = ingest::center(s);
            const auto dec = reconstruct(x, b);
            CHECK(dec.pcs.cols() == d * w);
            CHECK(dec.rcs.cols() == d * d * w);
            CHECK((dec.summed() - x.values).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK((dec.summed_with_means() - s.values()).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    SUBCASE("T = W boundary against the naive formula")
    {
        std::mt19937_64 rng(7);
        const Eigen::MatrixXd x = oracle::random_matrix(rng, 5, 2);
        const auto e = oracle::random_orthonormal(rng, 10, 3);
        EigenBasis b;
        b.vectors = e;
        b.eigenvalues = Eigen::Vector3d(3, 2, 1);
        b.window = 5;
        b.channels = 2;
        const auto dec = reconstruct(raw(x), b);
        const auto ref = oracle::naive_reconstruct(x, e, 5);
        for (Index k = 0; k < 3; ++k)
            CHECK((dec.component(k) - ref[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff() <= 1e-12);
    }
    SUBCASE("zero series gives zero RCs")
    {
        const auto dec = reconstruct(raw(Eigen::MatrixXd::Zero(8, 2)), identity_basis(3, 2));
        CHECK(dec.rcs.isZero(0.0));
        CHECK(dec.rcs.rows() == 8);
        CHECK(dec.rcs.cols() == 12);
    }
    SUBCASE("property: vectorized path matches the triple loop")
    {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 200; ++trial) {
            const int w = 1 + static_cast<int>(rng() % 4);
            const int d = 1 + static_cast<int>(rng() % 2);
            const int t = w + static_cast<int>(rng() % (13 - w));
            const int k = 1 + static_cast<int>(rng() % (d * w));
            const Eigen::MatrixXd x = oracle::random_matrix(rng, t, d);
            EigenBasis b;
            b.vectors = oracle::random_orthonormal(rng, d * w, k);
            b.eigenvalues = Eigen::VectorXd::LinSpaced(k, k, 1);
            b.window = w;
            b.channels = d;
            const auto dec = reconstruct(raw(x), b);
            const auto ref = oracle::naive_reconstruct(x, b.vectors, w);
            for (int c = 0; c < k; ++c)
                CHECK((dec.component(c) - ref[static_cast<std::size_t>(c)]).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("cMSSA at alpha = 0 is bitwise MSSA")
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const std::vector fg{ingest::TimeSeries(oracle::random_matrix(rng, 40, 2), "a"),
                             ingest::TimeSeries(oracle::random_matrix(rng, 30, 2), "b")};
        const std::vector bg{ingest::TimeSeries(oracle::random_matrix(rng, 55, 2), "y")};
        const auto m = fit_mssa(fg, 6, 4);
        const auto c = fit_cmssa(fg, bg, 6, 4, 0.0);
        CHECK(m.vectors == c.vectors);
        CHECK(m.eigenvalues == c.eigenvalues);
        const auto x = ingest::center(fg[0]);
        CHECK(project(x, m) == project(x, c));
        CHECK(reconstruct(x, m).rcs == reconstruct(x, c).rcs);
    }
}

TEST_CASE("contrastive fits satisfy the eigen contract and are deterministic")
{
    std::mt19937_64 rng(10);
    const std::vector fg{ingest::TimeSeries(oracle::random_matrix(rng, 60, 2), "a")};
    const std::vector bg{ingest::TimeSeries(oracle::random_matrix(rng, 80, 2), "y")};
    const ContrastiveFit fit(fg, bg, 8);
    for (double a : {0.0, 0.1, 1.0, 5.0, 100.0}) {
        const auto b = fit.basis(5, a);
        const auto c = contrast(fit.foreground_covariance(), fit.background_covariance(), a);
        CHECK(contract::check_basis(b, c.values).ok());
        const auto again = fit_cmssa(fg, bg, 8, 5, a);
        CHECK(again.vectors == b.vectors);
    }
    const std::vector one_channel{ingest::TimeSeries(oracle::random_matrix(rng, 60, 1), "z")};
    CHECK(kind_of([&] { ContrastiveFit(fg, one_channel, 8); }) == ErrorKind::schema);
}

TEST_CASE("EigenBasis JSON round trip is value-exact")
{
    std::mt19937_64 rng(12);
    const std::vector fg{ingest::TimeSeries(oracle::random_matrix(rng, 50, 2), "a")};
    const std::vector bg{ingest::TimeSeries(oracle::random_matrix(rng, 50, 2), "b")};
    const auto b = fit_cmssa(fg, bg, 5, 3, 0.731);
    const auto path = std::filesystem::temp_directory_path() / "cmssa_basis_test.json";
    save_basis(path, b);
    const auto back = load_basis(path);
    CHECK(back.vectors == b.vectors);
    CHECK(back.eigenvalues == b.eigenvalues);
    CHECK(back.window == 5);
    CHECK(back.channels == 2);
    CHECK(back.alpha == 0.731);
    std::filesystem::remove(path);

    auto j = to_json(b);
    j["vectors"].erase(0);
    CHECK(kind_of([&] { basis_from_json(j); }) == ErrorKind::schema);
}
