#include <doctest.h>

#include "cmssa/error.hpp"
#include "cmssa/mhealth.hpp"
#include "cmssa/time_series.hpp"

#include "oracles.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cmssa;
using namespace cmssa::ingest;

namespace {

std::vector<TimeSeries> parse(const std::string& text, CsvLayout layout = {})
{
    std::istringstream in(text);
    return parse_collection(in, layout, "test.csv");
}

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::numeric;
}

} // namespace

TEST_CASE("load_collection reads one series back")
{
    const auto c = parse("series_id,label,ch1,ch2\n"
                         "a,,1,10\na,,2,20\na,,3,30\na,,4,40\na,,5,50\n");
    REQUIRE(c.size() == 1);
    CHECK(c[0].length() == 5);
    CHECK(c[0].channels() == 2);
    CHECK(c[0].id() == "a");
    CHECK_FALSE(c[0].label().has_value());
    CHECK(c[0].values()(4, 1) == 50.0);
}

TEST_CASE("load_collection keeps file order and labels")
{
    const auto c = parse("series_id,label,x\nb,run,1\nb,run,2\na,walk,3\n");
    REQUIRE(c.size() == 2);
    CHECK(c[0].id() == "b");
    CHECK(*c[0].label() == "run");
    CHECK(c[1].length() == 1);
}

TEST_CASE("interleaved series ids are rejected")
{
    CHECK(kind_of([] { parse("series_id,label,x\na,,1\nb,,2\na,,3\n"); }) == ErrorKind::parse);
}

TEST_CASE("parse errors carry the line number")
{
    try {
        parse("series_id,label,x\na,,1\na,,oops\n");
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        CHECK(std::string(e.what()).find("test.csv:3") != std::string::npos);
    }
    CHECK(kind_of([] { parse("series_id,label,x\na,,1,2\n"); }) == ErrorKind::parse);
    CHECK(kind_of([] { parse("id,x\na,1\n"); }) == ErrorKind::parse);
}

TEST_CASE("non-finite values name the series and row")
{
    try {
        parse("series_id,label,x\nq,,1\nq,,nan\n");
        FAIL("expected data error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::data);
        const std::string msg = e.what();
        CHECK(msg.find("'q'") != std::string::npos);
        CHECK(msg.find("row 2") != std::string::npos);
    }
    CHECK(kind_of([] { parse("series_id,label,x\nq,,inf\n"); }) == ErrorKind::data);
}

TEST_CASE("channel selection by header name")
{
    CsvLayout layout;
    layout.channels = {"ecg2", "ecg1"};
    const auto c = parse("series_id,label,acc,ecg1,ecg2\ns,Jogging,9,1,2\ns,Jogging,9,3,4\n", layout);
    REQUIRE(c.size() == 1);
    CHECK(c[0].channels() == 2);
    CHECK(c[0].values()(0, 0) == 2.0);
    CHECK(c[0].values()(1, 1) == 3.0);

    layout.channels = {"missing"};
    CHECK(kind_of([&] { parse("series_id,label,x\na,,1\n", layout); }) == ErrorKind::schema);
}

TEST_CASE("delimiter from layout and environment")
{
    CsvLayout layout;
    layout.delimiter = ';';
    const auto c = parse("series_id;label;x;y\na;;1;2\n", layout);
    CHECK(c[0].channels() == 2);

    ::setenv("CMSSA_DELIMITER", "tab", 1);
    CHECK(CsvLayout::from_environment().delimiter == '\t');
    ::setenv("CMSSA_DELIMITER", ";", 1);
    CHECK(CsvLayout::from_environment().delimiter == ';');
    ::unsetenv("CMSSA_DELIMITER");
    CHECK(CsvLayout::from_environment().delimiter == ',');
}

TEST_CASE("load is deterministic and write round-trips exactly")
{
    std::mt19937_64 rng(7);
    std::vector<TimeSeries> series;
    for (int i = 0; i < 3; ++i)
        series.emplace_back(oracle::random_matrix(rng, 4 + i, 2) * 1e3, "s" + std::to_string(i),
                            i == 1 ? std::optional<std::string>() : std::optional<std::string>("L"));
    std::ostringstream out;
    write_collection(out, series);
    const auto a = parse(out.str());
    const auto b = parse(out.str());
    REQUIRE(a.size() == 3);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].values() == series[i].values());
        CHECK(a[i].values() == b[i].values());
        CHECK(a[i].label() == series[i].label());
    }
}

TEST_CASE("missing file is an i/o error naming the path")
{
    try {
        load_collection("/nonexistent/file.csv");
        FAIL("expected");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io);
        CHECK(std::string(e.what()).find("/nonexistent/file.csv") != std::string::npos);
    }
}

TEST_CASE("TimeSeries invariants")
{
    CHECK(kind_of([] { TimeSeries(Eigen::MatrixXd(0, 2), "e"); }) == ErrorKind::degenerate_input);
    Eigen::MatrixXd bad(2, 1);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN();
    CHECK(kind_of([&] { TimeSeries(bad, "nan"); }) == ErrorKind::data);
    std::vector<TimeSeries> mixed{TimeSeries(Eigen::MatrixXd::Zero(3, 1), "a"),
                                  TimeSeries(Eigen::MatrixXd::Zero(3, 2), "b")};
    CHECK(kind_of([&] { require_uniform_channels(mixed); }) == ErrorKind::schema);
}

TEST_CASE("center")
{
    SUBCASE("constant channel")
    {
        const auto c = center(TimeSeries(Eigen::Vector3d(5, 5, 5), "c"));
        CHECK(c.values.isZero(0.0));
        CHECK(c.channel_means(0) == 5.0);
    }
    SUBCASE("arithmetic identity")
    {
        const auto c = center(TimeSeries(Eigen::Vector3d(1, 2, 3), "c"));
        CHECK(c.values == Eigen::MatrixXd(Eigen::Vector3d(-1, 0, 1)));
        CHECK(c.channel_means(0) == 2.0);
    }
    SUBCASE("already centered input is unchanged")
    {
        const Eigen::MatrixXd v = Eigen::Vector3d(-1, 0, 1);
        const auto c = center(TimeSeries(v, "c"));
        CHECK(c.values == v);
        CHECK(c.channel_means(0) == 0.0);
    }
    SUBCASE("property: zero column means and exact-ish round trip")
    {
        std::mt19937_64 rng(11);
        for (int trial = 0; trial < 50; ++trial) {
            const Eigen::MatrixXd v = (oracle::random_matrix(rng, 3 + trial, 1 + trial % 3).array() * 10.0 + 4.0).matrix();
            const auto c = center(TimeSeries(v, "r"));
            for (Eigen::Index j = 0; j < v.cols(); ++j) {
                const double sd = std::sqrt((c.values.col(j).array().square()).mean());
                CHECK(std::abs(c.values.col(j).mean()) <= 1e-10 * (sd + 1.0));
            }
            CHECK((c.restored() - v).cwiseAbs().maxCoeff() <= 1e-12 * (v.cwiseAbs().maxCoeff() + 1.0));
        }
    }
}

TEST_CASE("split_halves")
{
    const auto even = split_halves(TimeSeries(Eigen::VectorXd::LinSpaced(10, 0, 9), "x", "L"));
    CHECK(even.first.length() == 5);
    CHECK(even.second.length() == 5);
    CHECK(even.first.id() == "x/1");
    CHECK(even.second.id() == "x/2");
    CHECK(*even.second.label() == "L");

    const auto odd = split_halves(TimeSeries(Eigen::VectorXd::LinSpaced(11, 0, 10), "x"));
    CHECK(odd.first.length() == 6);
    CHECK(odd.second.length() == 5);

    CHECK(kind_of([] { split_halves(TimeSeries(Eigen::VectorXd::Ones(1), "x")); }) == ErrorKind::degenerate_input);

    SUBCASE("property: halves concatenate to the original")
    {
        std::mt19937_64 rng(3);
        for (int t = 2; t < 30; ++t) {
            const Eigen::MatrixXd v = oracle::random_matrix(rng, t, 2);
            const auto [a, b] = split_halves(TimeSeries(v, "p"));
            Eigen::MatrixXd joined(t, 2);
            joined << a.values(), b.values();
            CHECK(joined == v);
        }
    }
}

TEST_CASE("MHEALTH log import splits activity runs")
{
    const auto dir = std::filesystem::temp_directory_path() / "cmssa_mhealth_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "mHealth_subject1.log");
        auto row = [&](double e1, double e2, int label) {
            for (int c = 0; c < 24; ++c) {
                const double v = c == 3 ? e1 : c == 4 ? e2 : c == 23 ? label : 0.5;
                out << v << (c == 23 ? '\n' : '\t');
            }
        };
        for (int i = 0; i < 4; ++i)
            row(i, -i, 0);
        for (int i = 0; i < 6; ++i)
            row(10 + i, 20 + i, 10);
        for (int i = 0; i < 3; ++i)
            row(1, 1, 1);
        for (int i = 0; i < 2; ++i)
            row(i, i, 0);
    }
    const auto runs = load_mhealth_log(dir / "mHealth_subject1.log", "subject1");
    REQUIRE(runs.size() == 4);
    CHECK(*runs[1].label() == "Jogging");
    CHECK(runs[1].channels() == 2);
    CHECK(runs[1].values()(5, 1) == 25.0);

    const auto split = load_mhealth_directory(dir);
    CHECK(split.foreground.size() == 2); // one jogging run, halved
    CHECK(split.background.size() == 4); // two NULL runs, halved
    CHECK(split.foreground[0].length() == 3);
    std::filesystem::remove_all(dir);
}
