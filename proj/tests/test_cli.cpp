#include <catch2/catch_amalgamated.hpp>

#include "gts/cli/config.hpp"
#include "gts/cli/ingest.hpp"

#include <sstream>
#include <stdexcept>
#include <string>

using namespace gts;
using namespace gts::cli;

namespace {

GroupedHierarchy two_by_two() {
    std::istringstream in("# test\nattributes = sex, region\nsex = F, M\nregion = A, B\n");
    return parse_hierarchy(in);
}

std::string error_of(const std::string& csv) {
    std::istringstream in(csv);
    try {
        (void)parse_panel(in, two_by_two());
    } catch (const std::runtime_error& e) {
        return e.what();
    }
    return {};
}

const std::string kHeader = "year,sex,region,deaths,exposure\n";
const std::string kYear2000 = "2000,F,A,1,100\n2000,F,B,2,100\n2000,M,A,3,100\n2000,M,B,4,100\n";

}  // namespace

TEST_CASE("Hierarchy declarations parse and round trip", "[cli]") {
    const auto h = two_by_two();
    REQUIRE(h.size() == 9);
    std::istringstream again(format_hierarchy(h));
    REQUIRE(parse_hierarchy(again).keys() == h.keys());
    std::istringstream bad("attributes = sex\nregion = A\n");
    REQUIRE_THROWS_AS(parse_hierarchy(bad), std::runtime_error);
}

TEST_CASE("Valid panels ingest with aggregate rows checked", "[cli]") {
    std::istringstream in(kHeader + kYear2000 + "2000,T,T,10,400\n2000,F,T,3,200\n");
    const auto got = parse_panel(in, two_by_two());
    REQUIRE(got.report.rows == 6);
    REQUIRE(got.report.aggregate_rows == 2);
    REQUIRE(got.panel.node(0).rate[0] == Catch::Approx(0.025));

    std::ostringstream out;
    write_panel(out, got.panel);
    std::istringstream back(out.str());
    REQUIRE(parse_panel(back, two_by_two()).panel.rate_matrix() == got.panel.rate_matrix());
}

TEST_CASE("Ingestion errors cite the offending line", "[cli]") {
    REQUIRE(error_of("year,sex,deaths,exposure\n").find("header") != std::string::npos);
    REQUIRE(error_of(kHeader + "2000,X,A,1,100\n").find("line 2") != std::string::npos);
    REQUIRE(error_of(kHeader + kYear2000 + "2000,F,A,1,100\n").find("duplicate") != std::string::npos);
    REQUIRE(error_of(kHeader + "2000,F,A,1,0\n").find("nonpositive exposure") != std::string::npos);
    REQUIRE(error_of(kHeader + "2000,F,A,-1,10\n").find("negative deaths") != std::string::npos);
    REQUIRE(error_of(kHeader + "2000,F,A,1,100\n").find("missing row") != std::string::npos);
    REQUIRE(error_of(kHeader + kYear2000 + "2000,T,T,11,400\n").find("line 6") != std::string::npos);
}

TEST_CASE("Single-attribute hierarchy", "[cli]") {
    std::istringstream hs("attributes = sex\nsex = F, M\n");
    const auto h = parse_hierarchy(hs);
    REQUIRE(h.size() == 3);
    std::istringstream in("year,sex,deaths,exposure\n2000,F,1,10\n2000,M,3,30\n");
    REQUIRE(parse_panel(in, h).panel.node(0).rate[0] == Catch::Approx(0.1));
}

TEST_CASE("Run configuration round trip and hashing", "[cli]") {
    RunConfig c;
    c.panel = "p.csv";
    c.hierarchy = "h.cfg";
    c.methods = {"ols", "bottom-up"};
    c.horizon = 7;
    c.intervals = true;
    c.seed = 99;
    c.threads = 2;
    const RunConfig back = parse_config(serialize(c));
    REQUIRE(back == c);

    RunConfig moved = c;
    moved.out_dir = "elsewhere";
    moved.threads = 8;
    REQUIRE(config_hash(moved) == config_hash(c));
    moved.seed = 100;
    REQUIRE(config_hash(moved) != config_hash(c));

    REQUIRE_THROWS_AS(parse_config("no-such-key = 1\n"), std::runtime_error);
    c.alpha = 1.5;
    REQUIRE_THROWS_AS(validate(c), std::invalid_argument);
    c.alpha = 0.2;
    c.methods = {"median"};
    REQUIRE_THROWS_AS(validate(c), std::invalid_argument);
}
