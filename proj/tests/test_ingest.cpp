#include "vulnet/detail/csv.hpp"
#include "vulnet/errors.hpp"
#include "vulnet/ingest.hpp"
#include "vulnet/synthetic.hpp"

#include <doctest.h>

#include "support.hpp"

#include <Eigen/Dense>

using namespace vulnet;

namespace {

IngestSource canonical_source(const std::filesystem::path& flows,
                              const std::filesystem::path& final_use,
                              const std::string& label = "") {
    IngestSource source;
    source.format = TableFormat::canonical;
    source.flows = flows;
    source.final_use = final_use;
    source.label = label;
    return source;
}

} // namespace

TEST_CASE("csv primitives") {
    auto fields = detail::split_fields("a,b,,c\r");
    REQUIRE(fields.size() == 4);
    CHECK(fields[0] == "a");
    CHECK(fields[2] == "");
    CHECK(fields[3] == "c"); // trailing CR stripped

    double v = 0.0;
    CHECK(detail::parse_double("1.5e3", v));
    CHECK(v == 1500.0);
    CHECK_FALSE(detail::parse_double("1.5x", v));
    CHECK_FALSE(detail::parse_double("", v));

    // 17 significant digits reproduce any double bit for bit.
    for (double x : {1.0 / 3.0, 0.1, 123456789.123456789, 5e-324, 1e308}) {
        double back = 0.0;
        REQUIRE(detail::parse_double(detail::format_double(x), back));
        CHECK(back == x);
    }
}

TEST_CASE("canonical round trip reproduces the table exactly") {
    SyntheticParams params;
    params.seed = 7;
    params.countries = 3;
    params.sectors = 2;
    params.density = 0.4;
    auto economy = generate_economy(params);

    support::TempDir dir("roundtrip");
    emit_canonical(economy.table, dir / "flows.csv", dir / "final.csv");
    FlowTable back = parse_icio(canonical_source(dir / "flows.csv", dir / "final.csv",
                                                 economy.table.metadata().source_label));

    CHECK(back.index() == economy.table.index());
    REQUIRE(back.records().size() == economy.table.records().size());
    for (std::size_t i = 0; i < back.records().size(); ++i) {
        CHECK(back.records()[i].supplier == economy.table.records()[i].supplier);
        CHECK(back.records()[i].user == economy.table.records()[i].user);
        CHECK(back.records()[i].value == economy.table.records()[i].value);
    }
    CHECK(support::exact_equal(back.final_use(), economy.table.final_use()));
    CHECK(back.metadata().source_label == economy.table.metadata().source_label);

    auto x_a = build_flow_matrix(economy.table, economy.table.index());
    auto x_b = build_flow_matrix(back, back.index());
    CHECK(support::exact_equal(Eigen::MatrixXd(x_a.intermediate), Eigen::MatrixXd(x_b.intermediate)));
}

TEST_CASE("canonical parse errors carry file and line context") {
    support::TempDir dir("badfiles");
    const auto flows = dir / "flows.csv";
    const auto final_use = dir / "final.csv";
    support::write_file(final_use,
                        "supplier_country,supplier_sector,final_use\nAAA,S1,2.0\nBBB,S1,3.0\n");

    SUBCASE("wrong header") {
        support::write_file(flows, "supplier,user,value\n");
        CHECK_THROWS_WITH_AS(parse_icio(canonical_source(flows, final_use)),
                             doctest::Contains("flows.csv:1"), ParseError);
    }
    SUBCASE("wrong field count") {
        support::write_file(
            flows, "supplier_country,supplier_sector,user_country,user_sector,value\n"
                   "AAA,S1,BBB,S1,1.0\nAAA,S1,BBB\n");
        CHECK_THROWS_WITH_AS(parse_icio(canonical_source(flows, final_use)),
                             doctest::Contains(":3"), ParseError);
    }
    SUBCASE("malformed number names the column") {
        support::write_file(
            flows, "supplier_country,supplier_sector,user_country,user_sector,value\n"
                   "AAA,S1,BBB,S1,12x\n");
        CHECK_THROWS_WITH_AS(parse_icio(canonical_source(flows, final_use)),
                             doctest::Contains(":2:5"), ParseError);
    }
    SUBCASE("non-finite value rejected") {
        support::write_file(
            flows, "supplier_country,supplier_sector,user_country,user_sector,value\n"
                   "AAA,S1,BBB,S1,inf\n");
        CHECK_THROWS_AS(parse_icio(canonical_source(flows, final_use)), ParseError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_WITH_AS(parse_icio(canonical_source(dir / "absent.csv", final_use)),
                             doctest::Contains("absent.csv"), ParseError);
    }
}

TEST_CASE("negative flows clamp to zero and are counted") {
    support::TempDir dir("clamp");
    support::write_file(dir / "final.csv",
                        "supplier_country,supplier_sector,final_use\nAAA,S1,5.0\nBBB,S1,5.0\n");
    support::write_file(dir / "flows.csv",
                        "supplier_country,supplier_sector,user_country,user_sector,value\n"
                        "AAA,S1,BBB,S1,2.0\n"
                        "BBB,S1,AAA,S1,-0.25\n");
    FlowTable table = parse_icio(canonical_source(dir / "flows.csv", dir / "final.csv"));
    CHECK(table.metadata().clamped_negatives == 1);
    CHECK(table.records()[1].value == 0.0);
}

TEST_CASE("oecd wide layout") {
    support::TempDir dir("oecd");
    // S1/S2 become sectors because they appear in row labels; HFCE never
    // does, so AAA_HFCE and BBB_HFCE are final-demand columns. VA and
    // TOTAL are bare labels, ignored entirely.
    support::write_file(dir / "table.csv",
                        ",AAA_S1,AAA_S2,BBB_S1,BBB_S2,AAA_HFCE,BBB_HFCE,TOTAL\n"
                        "AAA_S1,1.0,2.0,0.0,0.5,3.0,1.0,7.5\n"
                        "AAA_S2,0.0,0.0,4.0,0.0,2.0,0.0,6.0\n"
                        "BBB_S1,0.5,0.0,1.0,0.0,0.0,2.5,4.0\n"
                        "BBB_S2,1.5,0.0,0.0,0.0,1.0,1.0,3.5\n"
                        "VA,10,10,10,10,0,0,40\n");
    IngestSource source;
    source.format = TableFormat::oecd;
    source.flows = dir / "table.csv";
    FlowTable table = parse_icio(source);

    CHECK(table.index().countries() == std::vector<std::string>{"AAA", "BBB"});
    CHECK(table.index().sectors() == std::vector<std::string>{"S1", "S2"});
    CHECK(table.metadata().source_label == "table.csv");

    auto flows = build_flow_matrix(table, table.index());
    Eigen::MatrixXd x = Eigen::MatrixXd(flows.intermediate);
    Eigen::MatrixXd expected(4, 4);
    // X(user, supplier); rows of the file are suppliers.
    expected << 1.0, 0.0, 0.5, 1.5, //
        2.0, 0.0, 0.0, 0.0,         //
        0.0, 4.0, 1.0, 0.0,         //
        0.5, 0.0, 0.0, 0.0;
    CHECK(support::exact_equal(x, expected));

    Eigen::VectorXd fu(4);
    fu << 4.0, 2.0, 2.5, 2.0;
    CHECK(support::exact_equal(flows.final_use, fu));
}

TEST_CASE("oecd layout rejects a canonical final-use companion") {
    support::TempDir dir("oecdarg");
    support::write_file(dir / "table.csv", ",AAA_S1\nAAA_S1,1.0\n");
    support::write_file(dir / "final.csv", "supplier_country,supplier_sector,final_use\n");
    IngestSource source;
    source.format = TableFormat::oecd;
    source.flows = dir / "table.csv";
    source.final_use = dir / "final.csv";
    CHECK_THROWS_AS(parse_icio(source), ArgumentError);
}

TEST_CASE("ground truth sidecar round trip") {
    SyntheticParams params;
    params.seed = 11;
    params.countries = 2;
    params.sectors = 3;
    params.density = 0.5;
    auto economy = generate_economy(params);

    support::TempDir dir("truth");
    write_ground_truth(economy.sidecar(), economy.table.index(), dir / "truth.csv");
    auto back = read_ground_truth(dir / "truth.csv", economy.table.index());
    CHECK(support::exact_equal(back.z, economy.z));
    CHECK(support::exact_equal(back.allocation_colsums, economy.allocation_colsums));
    CHECK(support::exact_equal(back.beta, economy.beta));
}
