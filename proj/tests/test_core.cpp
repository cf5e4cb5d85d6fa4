#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pricer/core.hpp"

using namespace pricer;

TEST_CASE("discount_to_price definitional cases") {
    CHECK(discount_to_price(Money::from_inr(2000), 30).str() == "1400.00");
    CHECK(discount_to_price(Money::from_inr(2000), 0).str() == "2000.00");
    // 999 * 0.67 = 669.33
    CHECK(discount_to_price(Money::from_inr(999), 33).str() == "669.33");
}

TEST_CASE("discount_to_price rejects out-of-range discounts") {
    CHECK_THROWS_AS(discount_to_price(Money::from_inr(100), -1), DomainError);
    CHECK_THROWS_AS(discount_to_price(Money::from_inr(100), 100), DomainError);
    CHECK_THROWS_AS(discount_to_price(Money::from_inr(100), 150), DomainError);
    CHECK_THROWS_AS(discount_to_price(Money{0}, 10), DomainError);
}

TEST_CASE("price_to_discount definitional cases") {
    CHECK(price_to_discount(Money::from_inr(2000), Money::from_inr(1400)) ==
          Catch::Approx(30.0).margin(1e-12));
    CHECK(price_to_discount(Money::from_inr(2000), Money::from_inr(2000)) == 0.0);
    CHECK(price_to_discount(Money::from_inr(1400), Money::from_inr(1200)) ==
          Catch::Approx(100.0 * (1.0 - 1200.0 / 1400.0)));
    CHECK_THROWS_AS(price_to_discount(Money::from_inr(100), Money::from_inr(101)), DomainError);
    CHECK_THROWS_AS(price_to_discount(Money::from_inr(100), Money{0}), DomainError);
}

TEST_CASE("price/discount round trip within half a basis point") {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<std::int64_t> mrp_paise(100 * 100, 10000 * 100);
    std::uniform_real_distribution<double> disc(0.0, 95.0);
    for (int i = 0; i < 2000; ++i) {
        Money mrp{mrp_paise(rng)};
        double d = disc(rng);
        double back = price_to_discount(mrp, discount_to_price(mrp, d));
        CHECK(std::abs(back - d) <= 0.005);
    }
}

TEST_CASE("discount_to_price strictly decreasing in the discount") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> mrp_paise(100 * 100, 10000 * 100);
    std::uniform_real_distribution<double> disc(0.0, 90.0);
    for (int i = 0; i < 1000; ++i) {
        Money mrp{mrp_paise(rng)};
        double d1 = disc(rng), d2 = d1 + 0.5 + disc(rng) / 20.0;
        if (d2 >= 100) continue;
        CHECK(discount_to_price(mrp, d2) < discount_to_price(mrp, d1));
    }
}

TEST_CASE("money parsing and rendering") {
    CHECK(parse_money("1234").paise == 123400);
    CHECK(parse_money("1234.5").paise == 123450);
    CHECK(parse_money("1234.56").paise == 123456);
    CHECK(parse_money("-3.07").paise == -307);
    CHECK(Money{123456}.str() == "1234.56");
    CHECK(Money{-307}.str() == "-3.07");
    CHECK(Money{5}.str() == "0.05");
    CHECK_THROWS_AS(parse_money("12a4"), DomainError);
    CHECK_THROWS_AS(parse_money(""), DomainError);
}

TEST_CASE("date round trip and weekday") {
    Date d = Date::from_ymd(2026, 8, 9);
    CHECK(d.str() == "2026-08-09");
    CHECK(parse_date("2026-08-09") == d);
    CHECK(d.weekday() == 6);  // a Sunday
    CHECK(Date::from_ymd(1970, 1, 1).weekday() == 3);  // a Thursday
    CHECK((d + 1).str() == "2026-08-10");
    CHECK((d - 9).str() == "2026-07-31");
    CHECK(d - Date::from_ymd(2026, 8, 1) == 8);

    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> serial(-20000, 40000);
    for (int i = 0; i < 500; ++i) {
        Date x = Date::from_serial(serial(rng));
        int y;
        unsigned m, day;
        x.to_ymd(y, m, day);
        CHECK(Date::from_ymd(y, static_cast<int>(m), static_cast<int>(day)) == x);
    }
}

TEST_CASE("timestamp parse and format") {
    Timestamp t = parse_timestamp("2026-01-05T13:40:02");
    CHECK(format_timestamp(t) == "2026-01-05T13:40:02");
    CHECK(timestamp_date(t) == Date::from_ymd(2026, 1, 5));
    CHECK(parse_timestamp("2026-01-05") == parse_timestamp("2026-01-05T00:00:00"));
    CHECK_THROWS_AS(parse_timestamp("junk"), DomainError);
}

TEST_CASE("enum parsing") {
    CHECK(parse_gender("men") == Gender::men);
    CHECK(parse_gender("unisex") == Gender::unisex);
    CHECK_THROWS_AS(parse_gender("other"), DomainError);
    CHECK(parse_event_type("cart") == EventType::cart);
    CHECK(parse_event_type("order") == EventType::order);
    CHECK_THROWS_AS(parse_event_type("wishlist"), DomainError);
}
