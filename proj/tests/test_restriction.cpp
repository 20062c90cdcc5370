#include "vulnet/errors.hpp"
#include "vulnet/restriction.hpp"

#include <doctest.h>

#include "support.hpp"

using namespace vulnet;

namespace {

// C = 3, S = 1: nodes TGT:S1 = 0, SRC:S1 = 1, OTH:S1 = 2.
CountrySectorIndex three_countries() {
    return CountrySectorIndex({"TGT", "SRC", "OTH"}, {"S1"});
}

Eigen::MatrixXd example_shares() {
    Eigen::MatrixXd a(3, 3);
    // columns are suppliers; column SRC delivers (0.2, 0.3, 0.5)
    a << 0.0, 0.2, 0.25, //
        0.5, 0.3, 0.25,  //
        0.5, 0.5, 0.5;
    return a;
}

RestrictionSpec src_to_tgt() {
    RestrictionSpec spec;
    spec.target_country = "TGT";
    spec.source_country = "SRC";
    return spec;
}

} // namespace

TEST_CASE("spec text round trips") {
    RestrictionSpec spec;
    spec.target_country = "IND";
    spec.source_country = "CHN";
    CHECK(spec.to_text() == "target=IND source=CHN sectors=ALL");
    auto parsed = parse_restriction_spec(spec.to_text());
    CHECK(parsed.target_country == "IND");
    CHECK(parsed.source_country == "CHN");
    CHECK(parsed.all_sectors());

    spec.restricted_sectors = {"S03", "S01"};
    CHECK(spec.to_text() == "target=IND source=CHN sectors=S03,S01");
    parsed = parse_restriction_spec(spec.to_text());
    CHECK(parsed.restricted_sectors == std::vector<std::string>{"S03", "S01"});
}

TEST_CASE("spec parser rejects malformed records") {
    CHECK_THROWS_AS(parse_restriction_spec("target=IND source=CHN"), ParseError);
    CHECK_THROWS_AS(parse_restriction_spec("target=IND source=CHN sectors="), ParseError);
    CHECK_THROWS_AS(parse_restriction_spec("target=IND source=CHN sectors=S01,,S02"),
                    ParseError);
    CHECK_THROWS_AS(parse_restriction_spec("target=IND source=CHN sectors=ALL extra=1"),
                    ParseError);
    CHECK_THROWS_AS(parse_restriction_spec("garbage"), ParseError);
}

TEST_CASE("selectors mark target rows and restricted columns") {
    // C = 3, S = 2; target is the second country, source the third.
    CountrySectorIndex index({"AAA", "BBB", "CCC"}, {"S1", "S2"});
    RestrictionSpec spec;
    spec.target_country = "BBB";
    spec.source_country = "CCC";

    auto sel = make_selectors(spec, index);
    Eigen::VectorXd q(6), r(6);
    q << 0, 0, 1, 1, 0, 0;
    r << 0, 0, 0, 0, 1, 1;
    CHECK(support::exact_equal(sel.q, q));
    CHECK(support::exact_equal(sel.r, r));
    CHECK(support::exact_equal(sel.mu, sel.q));
    CHECK(support::exact_equal(sel.nu, sel.r));
    CHECK(sel.target_rows == std::vector<std::uint32_t>{2, 3});
    CHECK(sel.restricted_columns == std::vector<std::uint32_t>{4, 5});

    spec.restricted_sectors = {"S2", "S2"}; // duplicates collapse
    auto narrow = make_selectors(spec, index);
    CHECK(narrow.restricted_columns == std::vector<std::uint32_t>{5});
    CHECK(narrow.r[4] == 0.0);
}

TEST_CASE("selector validation") {
    auto index = three_countries();
    auto spec = src_to_tgt();
    spec.source_country = "TGT";
    CHECK_THROWS_AS(make_selectors(spec, index), SpecError);

    spec = src_to_tgt();
    spec.target_country = "XXX";
    CHECK_THROWS_AS(make_selectors(spec, index), SchemaError);

    spec = src_to_tgt();
    spec.restricted_sectors = {"S9"};
    CHECK_THROWS_AS(make_selectors(spec, index), SchemaError);
}

TEST_CASE("restriction zeroes target rows and rescales the remainder") {
    auto index = three_countries();
    auto A = support::allocation_from_dense(example_shares());
    auto sel = make_selectors(src_to_tgt(), index);

    auto psi = target_shares(A, sel);
    CHECK(psi[0] == 0.0);
    CHECK(psi[1] == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(psi[2] == 0.0);

    auto restricted = apply_restriction(A, sel);
    CHECK(restricted.skipped_inactive == 0);
    CHECK(restricted.restricted_columns == std::vector<std::uint32_t>{1});
    REQUIRE(restricted.columns.size() == 1);
    REQUIRE(restricted.columns[0].size() == 2);
    // (0.2, 0.3, 0.5) with the target row dropped becomes (0, 0.375, 0.625).
    CHECK(restricted.columns[0][0].first == 1);
    CHECK(restricted.columns[0][0].second == doctest::Approx(0.375).epsilon(1e-12));
    CHECK(restricted.columns[0][1].first == 2);
    CHECK(restricted.columns[0][1].second == doctest::Approx(0.625).epsilon(1e-12));
    CHECK(restricted.normalizers[1] == doctest::Approx(1.25).epsilon(1e-12));

    auto materialized = restricted.materialize();
    Eigen::MatrixXd dense = Eigen::MatrixXd(materialized.shares);
    CHECK(dense(0, 1) == 0.0); // exact zero on the target row
    CHECK(dense.col(1).sum() == doctest::Approx(1.0).epsilon(1e-9));
    // unrestricted columns are bitwise identical
    Eigen::MatrixXd benchmark = Eigen::MatrixXd(A.shares);
    CHECK(support::exact_equal(dense.col(0), benchmark.col(0)));
    CHECK(support::exact_equal(dense.col(2), benchmark.col(2)));
    CHECK(materialized.active == A.active);
}

TEST_CASE("total dependence refuses renormalization") {
    auto index = three_countries();
    Eigen::MatrixXd shares = example_shares();
    shares.col(1) << 1.0, 0.0, 0.0; // everything goes to the target
    auto A = support::allocation_from_dense(shares);
    auto sel = make_selectors(src_to_tgt(), index);

    try {
        apply_restriction(A, sel);
        FAIL("expected TotalDependenceError");
    } catch (const TotalDependenceError& e) {
        CHECK(e.column == 1);
        CHECK(e.target_share == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("dependence epsilon boundary") {
    auto index = three_countries();
    auto sel = make_selectors(src_to_tgt(), index);
    Eigen::MatrixXd shares = example_shares();

    // just below the refusal threshold: renormalization still runs
    shares.col(1) << 1.0 - 2e-9, 2e-9, 0.0;
    auto ok = apply_restriction(support::allocation_from_dense(shares), sel);
    CHECK(ok.restricted_columns.size() == 1);

    // inside the epsilon band: refused even though psi < 1
    shares.col(1) << 1.0 - 1e-10, 1e-10, 0.0;
    CHECK_THROWS_AS(apply_restriction(support::allocation_from_dense(shares), sel),
                    TotalDependenceError);
}

TEST_CASE("inactive restricted suppliers are skipped and counted") {
    auto index = three_countries();
    Eigen::MatrixXd shares = example_shares();
    shares.col(1).setZero(); // SRC sells nothing
    auto A = support::allocation_from_dense(shares);
    auto sel = make_selectors(src_to_tgt(), index);

    auto restricted = apply_restriction(A, sel);
    CHECK(restricted.skipped_inactive == 1);
    CHECK(restricted.restricted_columns.empty());
    auto materialized = restricted.materialize();
    CHECK(support::exact_equal_sparse(materialized.shares, A.shares));
}

TEST_CASE("restricted kernel keeps benchmark column sums") {
    auto index = three_countries();
    auto A = support::allocation_from_dense(example_shares());
    auto beta = support::leakage_from({0.3, 0.4, 0.5});
    auto benchmark = build_kernel(A, beta);
    validate_kernel(benchmark);

    auto sel = make_selectors(src_to_tgt(), index);
    auto kernel = restricted_kernel(apply_restriction(A, sel), beta);
    CHECK(kernel.certified());
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(kernel.column_sums[j] ==
              doctest::Approx(1.0 - beta.beta[j]).epsilon(1e-9));
        CHECK(kernel.column_sums[j] ==
              doctest::Approx(benchmark.column_sums[j]).epsilon(1e-9));
    }
    // target row of the restricted column is gone from the kernel too
    CHECK(Eigen::MatrixXd(kernel.K)(0, 1) == 0.0);
}
