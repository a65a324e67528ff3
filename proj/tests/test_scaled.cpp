#include <doctest.h>

#include "mapf/scaled.hpp"

using namespace mapf;

TEST_CASE("suboptimality parsing accepts rationals, integers, and decimals") {
    auto w = SuboptFactor::parse("3/2");
    REQUIRE(w);
    CHECK(w->num == 3);
    CHECK(w->den == 2);

    w = SuboptFactor::parse("1.5");
    REQUIRE(w);
    CHECK(w->num == 3);
    CHECK(w->den == 2);

    w = SuboptFactor::parse("2");
    REQUIRE(w);
    CHECK(w->num == 2);
    CHECK(w->den == 1);

    w = SuboptFactor::parse("1.25");
    REQUIRE(w);
    CHECK(w->num == 5);
    CHECK(w->den == 4);

    CHECK(SuboptFactor::parse("6/4")->num == 3);  // reduced
}

TEST_CASE("suboptimality parsing rejects invalid factors") {
    CHECK(!SuboptFactor::parse("0.5"));     // below 1
    CHECK(!SuboptFactor::parse("2/3"));     // below 1
    CHECK(!SuboptFactor::parse("0"));
    CHECK(!SuboptFactor::parse("-2"));
    CHECK(!SuboptFactor::parse("abc"));
    CHECK(!SuboptFactor::parse(""));
    CHECK(!SuboptFactor::parse("1.0001"));  // denominator 10000 > 1000
    CHECK(SuboptFactor::parse("1.128"));    // 141/125, denominator fine
}

TEST_CASE("scaled arithmetic is exact") {
    const SuboptFactor w = SuboptFactor::make(3, 2);
    CHECK(w.scale(4).v == 8);            // 4 in halves
    CHECK(w.scale_weighted(4).v == 12);  // 6 in halves
    CHECK(w.scale(1) + w.scale_weighted(1) == Scaled{5});
    CHECK(w.scale(5) > w.scale_weighted(3));  // 5 > 4.5
    CHECK(w.scale(3) == w.scale_weighted(2)); // 3 == 1.5 * 2
}

TEST_CASE("string form is canonical") {
    CHECK(SuboptFactor::make(3, 2).str() == "3/2");
    CHECK(SuboptFactor::make(2, 1).str() == "2");
    CHECK(SuboptFactor::parse("1.5")->str() == "3/2");
}
