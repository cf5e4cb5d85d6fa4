#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pricer {

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on missing files, unreadable paths and other I/O failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when row-level rejects exceed the tolerated fraction of a load.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a model fit diverges or produces an unusable state.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Money
// ---------------------------------------------------------------------------

/**
 * INR amount held as integer paise (1/100 INR).
 *
 * All price arithmetic in the optimizer sums prices into an equality
 * constraint, so amounts are kept exact; doubles appear only at the
 * boundary (rendering, demand-weighted math).
 */
struct Money {
    std::int64_t paise = 0;

    static constexpr Money from_paise(std::int64_t p) { return Money{p}; }

    /// Nearest-paise conversion from a decimal INR amount.
    static Money from_inr(double inr) {
        return Money{static_cast<std::int64_t>(std::llround(inr * 100.0))};
    }

    double inr() const { return static_cast<double>(paise) / 100.0; }

    /// Renders as a decimal string with two fraction digits, e.g. "1400.00".
    std::string str() const {
        char buf[48];
        std::int64_t a = paise < 0 ? -paise : paise;
        std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", paise < 0 ? "-" : "",
                      static_cast<long long>(a / 100), static_cast<long long>(a % 100));
        return buf;
    }

    friend constexpr Money operator+(Money a, Money b) { return Money{a.paise + b.paise}; }
    friend constexpr Money operator-(Money a, Money b) { return Money{a.paise - b.paise}; }
    friend constexpr auto operator<=>(Money a, Money b) = default;
};

/// Parses "1234", "1234.5" or "1234.56" into paise. Throws DomainError on junk.
inline Money parse_money(std::string_view s) {
    if (s.empty()) throw DomainError("empty money literal");
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-') { neg = true; i = 1; }
    std::int64_t whole = 0, frac = 0;
    int frac_digits = 0;
    bool any = false, in_frac = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (in_frac) throw DomainError("bad money literal: " + std::string(s));
            in_frac = true;
            continue;
        }
        if (c < '0' || c > '9') throw DomainError("bad money literal: " + std::string(s));
        any = true;
        if (!in_frac) {
            whole = whole * 10 + (c - '0');
        } else if (frac_digits < 2) {
            frac = frac * 10 + (c - '0');
            ++frac_digits;
        }
        // digits beyond 2 decimals are ignored (inputs are currency-rounded)
    }
    if (!any) throw DomainError("bad money literal: " + std::string(s));
    if (frac_digits == 1) frac *= 10;
    std::int64_t p = whole * 100 + frac;
    return Money{neg ? -p : p};
}

// ---------------------------------------------------------------------------
// Date
// ---------------------------------------------------------------------------

/// Calendar day, stored as a serial count of days since 1970-01-01.
struct Date {
    std::int32_t serial = 0;

    static Date from_serial(std::int32_t s) { return Date{s}; }

    static Date from_ymd(int y, int m, int d) {
        // days-from-civil (Howard Hinnant's algorithm)
        y -= m <= 2;
        const int era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                             static_cast<unsigned>(d) - 1u;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return Date{static_cast<std::int32_t>(era * 146097 + static_cast<int>(doe) - 719468)};
    }

    void to_ymd(int& y, unsigned& m, unsigned& d) const {
        std::int64_t z = serial + 719468;
        const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
        const unsigned doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        d = doy - (153 * mp + 2) / 5 + 1;
        m = mp + (mp < 10 ? 3 : -9);
        y = static_cast<int>(yy + (m <= 2));
    }

    /// ISO-8601, e.g. "2026-01-05".
    std::string str() const {
        int y; unsigned m, d;
        to_ymd(y, m, d);
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y, m, d);
        return buf;
    }

    /// 0 = Monday ... 6 = Sunday.
    int weekday() const {
        int w = (serial + 3) % 7;  // 1970-01-01 was a Thursday
        return w < 0 ? w + 7 : w;
    }

    friend Date operator+(Date a, int days) { return Date{a.serial + days}; }
    friend Date operator-(Date a, int days) { return Date{a.serial - days}; }
    friend int operator-(Date a, Date b) { return a.serial - b.serial; }
    friend constexpr auto operator<=>(Date a, Date b) = default;
};

inline Date parse_date(std::string_view s) {
    int y, m, d;
    if (std::sscanf(std::string(s).c_str(), "%d-%d-%d", &y, &m, &d) != 3 ||
        m < 1 || m > 12 || d < 1 || d > 31)
        throw DomainError("bad date literal: " + std::string(s));
    return Date::from_ymd(y, m, d);
}

/// Seconds since the Unix epoch; granular ordering for clickstream events.
using Timestamp = std::int64_t;

/// "2026-01-05T13:40:02" -> epoch seconds (no timezone handling; data is one market).
inline Timestamp parse_timestamp(std::string_view s) {
    int y, mo, d, h = 0, mi = 0, sec = 0;
    int n = std::sscanf(std::string(s).c_str(), "%d-%d-%dT%d:%d:%d", &y, &mo, &d, &h, &mi, &sec);
    if (n < 3) throw DomainError("bad timestamp literal: " + std::string(s));
    return static_cast<Timestamp>(Date::from_ymd(y, mo, d).serial) * 86400 + h * 3600 + mi * 60 + sec;
}

inline std::string format_timestamp(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) { rem += 86400; --days; }
    Date day = Date::from_serial(static_cast<std::int32_t>(days));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02d", day.str().c_str(),
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

inline Date timestamp_date(Timestamp t) {
    std::int64_t days = t / 86400;
    if (t % 86400 < 0) --days;
    return Date::from_serial(static_cast<std::int32_t>(days));
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

using ProductId = std::string;
using UserId = std::string;

enum class Gender { men, women, unisex };

inline std::string_view to_string(Gender g) {
    switch (g) {
        case Gender::men: return "men";
        case Gender::women: return "women";
        default: return "unisex";
    }
}

inline Gender parse_gender(std::string_view s) {
    if (s == "men") return Gender::men;
    if (s == "women") return Gender::women;
    if (s == "unisex") return Gender::unisex;
    throw DomainError("bad gender value: " + std::string(s));
}

enum class EventType { list, pdp, click, cart, order };

inline std::string_view to_string(EventType e) {
    switch (e) {
        case EventType::list: return "list";
        case EventType::pdp: return "pdp";
        case EventType::click: return "click";
        case EventType::cart: return "cart";
        default: return "order";
    }
}

inline EventType parse_event_type(std::string_view s) {
    if (s == "list") return EventType::list;
    if (s == "pdp") return EventType::pdp;
    if (s == "click") return EventType::click;
    if (s == "cart") return EventType::cart;
    if (s == "order") return EventType::order;
    throw DomainError("bad event type: " + std::string(s));
}

/// Static product attributes from the catalog feed.
struct CatalogEntry {
    ProductId product_id;
    std::string brand;
    std::string article_type;
    Gender gender = Gender::unisex;
    Money mrp;
    Money buying_cost;
    double base_discount_pct = 0.0;  // in [0, 100)
    std::string color;
};

/// One product-day of trading: price shown, discount, units sold, stock.
struct DemandObservation {
    ProductId product_id;
    Date date;
    Money price;
    double discount_pct = 0.0;
    std::int64_t quantity_sold = 0;
    std::int64_t inventory = 0;
};

/// One user-product interaction from the clickstream feed.
struct ClickstreamEvent {
    UserId user_id;
    ProductId product_id;
    EventType event_type = EventType::list;
    Timestamp timestamp = 0;
};

/// Search-ranking snapshot row for one live product.
struct SortRankRecord {
    ProductId product_id;
    std::int64_t rank = 0;   // positive
    double score = 0.0;      // >= 0
};

// ---------------------------------------------------------------------------
// Price/discount arithmetic
// ---------------------------------------------------------------------------

/**
 * Selling price at a discount: mrp * (1 - discount_pct/100), rounded to the
 * paise, half-up. The inverse of price_to_discount up to that rounding.
 */
inline Money discount_to_price(Money mrp, double discount_pct) {
    if (mrp.paise <= 0) throw DomainError("discount_to_price: mrp must be positive");
    if (!(discount_pct >= 0.0) || discount_pct >= 100.0)
        throw DomainError("discount_to_price: discount_pct out of [0, 100)");
    long double exact = static_cast<long double>(mrp.paise) *
                        (1.0L - static_cast<long double>(discount_pct) / 100.0L);
    return Money{static_cast<std::int64_t>(std::floor(exact + 0.5L))};
}

/// Discount percentage implied by a selling price: 100 * (1 - price/mrp).
inline double price_to_discount(Money mrp, Money price) {
    if (mrp.paise <= 0) throw DomainError("price_to_discount: mrp must be positive");
    if (price.paise <= 0 || price > mrp)
        throw DomainError("price_to_discount: price must be in (0, mrp]");
    return 100.0 * (1.0 - static_cast<double>(price.paise) / static_cast<double>(mrp.paise));
}

}  // namespace pricer
