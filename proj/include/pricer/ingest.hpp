#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/csv.hpp"

namespace pricer {

/// The four §-style data feeds joined into one canonical snapshot.
struct Dataset {
    std::vector<CatalogEntry> catalog;            // sorted by product_id
    std::vector<DemandObservation> price_history; // day level, sorted by (product_id, date)
    std::vector<ClickstreamEvent> clickstream;    // sorted by (timestamp, user, product, event)
    std::vector<SortRankRecord> sort_ranks;       // sorted by rank
    Date as_of;

    const CatalogEntry* find_product(const ProductId& id) const {
        auto it = std::lower_bound(catalog.begin(), catalog.end(), id,
                                   [](const CatalogEntry& e, const ProductId& k) {
                                       return e.product_id < k;
                                   });
        if (it == catalog.end() || it->product_id != id) return nullptr;
        return &*it;
    }
};

/// One rejected input row or one violated dataset invariant, with provenance.
struct Violation {
    std::string source;  // file name or "dataset"
    std::size_t row = 0; // 1-based data row within the file, 0 if not row-level
    std::string reason;  // short machine-matchable category
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool empty() const { return violations.empty(); }

    std::map<std::string, std::size_t> counts_by_reason() const {
        std::map<std::string, std::size_t> c;
        for (const auto& v : violations) ++c[v.reason];
        return c;
    }

    std::string summary() const {
        std::string s;
        for (const auto& [reason, n] : counts_by_reason()) {
            if (!s.empty()) s += ", ";
            s += reason + ": " + std::to_string(n);
        }
        return s.empty() ? "no violations" : s;
    }
};

struct LoadResult {
    Dataset dataset;
    ValidationReport rejects;  // row-level rejects, kept for reporting
};

namespace detail {

inline std::int64_t parse_count(const std::string& s, const char* what) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw DomainError(std::string("bad ") + what + ": " + s);
    }
    if (pos != s.size()) throw DomainError(std::string("bad ") + what + ": " + s);
    return v;
}

inline double parse_real(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DomainError(std::string("bad ") + what + ": " + s);
    }
    if (pos != s.size()) throw DomainError(std::string("bad ") + what + ": " + s);
    return v;
}

}  // namespace detail

/**
 * Checks every Dataset invariant and reports each violation with provenance.
 * A valid dataset yields an empty report; this never throws.
 */
inline ValidationReport validate_dataset(const Dataset& d) {
    ValidationReport rep;
    auto add = [&](std::string reason, std::string detail) {
        rep.violations.push_back({"dataset", 0, std::move(reason), std::move(detail)});
    };

    std::unordered_set<std::string> seen_products;
    for (const auto& e : d.catalog) {
        if (!seen_products.insert(e.product_id).second)
            add("duplicate product", e.product_id);
        if (e.mrp.paise <= 0) add("mrp not positive", e.product_id);
        if (e.buying_cost > e.mrp) add("cost exceeds MRP", e.product_id);
        if (e.base_discount_pct < 0 || e.base_discount_pct >= 100)
            add("discount out of range", e.product_id);
    }

    std::optional<Date> lo, hi;
    std::unordered_set<std::int32_t> days_seen;
    for (const auto& o : d.price_history) {
        const CatalogEntry* entry = d.find_product(o.product_id);
        if (!entry) {
            add("unknown product", o.product_id + " in price history");
            continue;
        }
        if (o.quantity_sold < 0) add("negative quantity", o.product_id + " " + o.date.str());
        if (o.inventory < 0) add("negative inventory", o.product_id + " " + o.date.str());
        if (o.discount_pct < 0 || o.discount_pct >= 100)
            add("discount out of range", o.product_id + " " + o.date.str());
        else {
            Money expect = discount_to_price(entry->mrp, o.discount_pct);
            if (std::llabs(expect.paise - o.price.paise) > 1)
                add("price-discount mismatch",
                    o.product_id + " " + o.date.str() + ": price " + o.price.str() +
                        " vs expected " + expect.str());
        }
        if (!lo || o.date < *lo) lo = o.date;
        if (!hi || o.date > *hi) hi = o.date;
        days_seen.insert(o.date.serial);
    }
    if (!d.price_history.empty()) {
        if (*hi != d.as_of - 1)
            add("price history range", "ends at " + hi->str() + ", expected " + (d.as_of - 1).str());
        for (std::int32_t s = lo->serial; s <= hi->serial; ++s)
            if (!days_seen.count(s))
                add("gap in price history", Date::from_serial(s).str());
    } else {
        add("empty price history", "");
    }

    for (const auto& ev : d.clickstream)
        if (!d.find_product(ev.product_id))
            add("unknown product", ev.product_id + " in clickstream");

    std::unordered_set<std::string> ranked;
    for (const auto& r : d.sort_ranks) {
        if (!d.find_product(r.product_id))
            add("unknown product", r.product_id + " in sort ranks");
        if (!ranked.insert(r.product_id).second) add("duplicate rank row", r.product_id);
        if (r.rank <= 0) add("bad rank", r.product_id);
        if (r.score < 0) add("bad score", r.product_id);
    }
    return rep;
}

namespace detail {

struct HourRow {
    ProductId product_id;
    Date date;
    int hour;
    Money price;
    double discount_pct;
    std::int64_t quantity;
    std::int64_t inventory;
};

/// Hour rows of one product-day -> one DemandObservation.
/// Price is the quantity-weighted mean (plain mean when nothing sold);
/// quantities sum; inventory is the latest hour's remaining stock.
inline DemandObservation aggregate_day(const CatalogEntry& entry,
                                       std::vector<HourRow>& rows) {
    std::sort(rows.begin(), rows.end(),
              [](const HourRow& a, const HourRow& b) { return a.hour < b.hour; });
    std::int64_t qty = 0;
    for (const auto& r : rows) qty += r.quantity;

    long double num = 0.0L, den = 0.0L;
    for (const auto& r : rows) {
        long double w = qty > 0 ? static_cast<long double>(r.quantity) : 1.0L;
        num += w * static_cast<long double>(r.price.paise);
        den += w;
    }
    Money price{static_cast<std::int64_t>(std::floor(num / den + 0.5L))};

    DemandObservation o;
    o.product_id = rows.front().product_id;
    o.date = rows.front().date;
    o.price = price;
    o.discount_pct = price_to_discount(entry.mrp, price);
    o.quantity_sold = qty;
    o.inventory = rows.back().inventory;
    return o;
}

}  // namespace detail

/**
 * Loads catalog.csv, price_history.csv, clickstream.csv and sort_rank.csv
 * from root_path, rejecting (not dropping) bad rows, aggregating hour-level
 * price rows to day level, and validating the assembled dataset.
 *
 * Throws IoError when a file is missing, ValidationError when more than 1%
 * of data rows are rejected or the assembled dataset breaks an invariant.
 */
inline LoadResult load_dataset(const std::string& root_path, Date as_of) {
    namespace fs = std::filesystem;
    for (const char* name :
         {"catalog.csv", "price_history.csv", "clickstream.csv", "sort_rank.csv"})
        if (!fs::exists(fs::path(root_path) / name))
            throw IoError("missing input file: " + (fs::path(root_path) / name).string());

    LoadResult result;
    Dataset& d = result.dataset;
    d.as_of = as_of;
    std::size_t total_rows = 0;
    auto reject = [&](const std::string& file, std::size_t row, std::string reason,
                      std::string detail) {
        result.rejects.violations.push_back({file, row, std::move(reason), std::move(detail)});
    };

    // catalog
    {
        auto t = csv::read_file((fs::path(root_path) / "catalog.csv").string());
        std::size_t c_id = t.col("product_id"), c_brand = t.col("brand"),
                    c_article = t.col("article_type"), c_gender = t.col("gender"),
                    c_mrp = t.col("mrp"), c_cost = t.col("buying_cost"),
                    c_disc = t.col("base_discount_pct"), c_color = t.col("color");
        std::unordered_set<std::string> seen;
        total_rows += t.rows.size();
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto& r = t.rows[i];
            try {
                CatalogEntry e;
                e.product_id = r.at(c_id);
                e.brand = r.at(c_brand);
                e.article_type = r.at(c_article);
                e.gender = parse_gender(r.at(c_gender));
                e.mrp = parse_money(r.at(c_mrp));
                e.buying_cost = parse_money(r.at(c_cost));
                e.base_discount_pct = detail::parse_real(r.at(c_disc), "base_discount_pct");
                e.color = r.at(c_color);
                if (e.product_id.empty()) throw DomainError("empty product_id");
                if (e.mrp.paise <= 0) {
                    reject("catalog.csv", i + 1, "mrp not positive", e.product_id);
                    continue;
                }
                if (e.buying_cost > e.mrp || e.buying_cost.paise < 0) {
                    reject("catalog.csv", i + 1, "cost exceeds MRP", e.product_id);
                    continue;
                }
                if (e.base_discount_pct < 0 || e.base_discount_pct >= 100) {
                    reject("catalog.csv", i + 1, "discount out of range", e.product_id);
                    continue;
                }
                if (!seen.insert(e.product_id).second) {
                    reject("catalog.csv", i + 1, "duplicate product", e.product_id);
                    continue;
                }
                d.catalog.push_back(std::move(e));
            } catch (const std::exception& ex) {
                reject("catalog.csv", i + 1, "unparseable row", ex.what());
            }
        }
        std::sort(d.catalog.begin(), d.catalog.end(),
                  [](const CatalogEntry& a, const CatalogEntry& b) {
                      return a.product_id < b.product_id;
                  });
    }

    // price history (hour level in the feed, day level in the Dataset)
    {
        auto t = csv::read_file((fs::path(root_path) / "price_history.csv").string());
        std::size_t c_id = t.col("product_id"), c_date = t.col("date"), c_hour = t.col("hour"),
                    c_price = t.col("price"), c_disc = t.col("discount_pct"),
                    c_qty = t.col("quantity_sold"), c_inv = t.col("inventory");
        total_rows += t.rows.size();
        std::map<std::pair<ProductId, std::int32_t>, std::vector<detail::HourRow>> by_day;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto& r = t.rows[i];
            try {
                detail::HourRow h;
                h.product_id = r.at(c_id);
                h.date = parse_date(r.at(c_date));
                h.hour = static_cast<int>(detail::parse_count(r.at(c_hour), "hour"));
                h.price = parse_money(r.at(c_price));
                h.discount_pct = detail::parse_real(r.at(c_disc), "discount_pct");
                h.quantity = detail::parse_count(r.at(c_qty), "quantity_sold");
                h.inventory = detail::parse_count(r.at(c_inv), "inventory");
                const CatalogEntry* entry = d.find_product(h.product_id);
                if (!entry) {
                    reject("price_history.csv", i + 1, "unknown product", h.product_id);
                    continue;
                }
                if (h.hour < 0 || h.hour > 23) {
                    reject("price_history.csv", i + 1, "bad hour", r.at(c_hour));
                    continue;
                }
                if (h.quantity < 0) {
                    reject("price_history.csv", i + 1, "negative quantity", h.product_id);
                    continue;
                }
                if (h.inventory < 0) {
                    reject("price_history.csv", i + 1, "negative inventory", h.product_id);
                    continue;
                }
                if (h.discount_pct < 0 || h.discount_pct >= 100) {
                    reject("price_history.csv", i + 1, "discount out of range", h.product_id);
                    continue;
                }
                Money expect = discount_to_price(entry->mrp, h.discount_pct);
                if (std::llabs(expect.paise - h.price.paise) > 1) {
                    reject("price_history.csv", i + 1, "price-discount mismatch",
                           h.product_id + " " + h.date.str());
                    continue;
                }
                by_day[{h.product_id, h.date.serial}].push_back(std::move(h));
            } catch (const std::exception& ex) {
                reject("price_history.csv", i + 1, "unparseable row", ex.what());
            }
        }
        for (auto& [key, rows] : by_day)
            d.price_history.push_back(detail::aggregate_day(*d.find_product(key.first), rows));
        // map iteration is already (product_id, date) ordered
    }

    // clickstream
    {
        auto t = csv::read_file((fs::path(root_path) / "clickstream.csv").string());
        std::size_t c_user = t.col("user_id"), c_id = t.col("product_id"),
                    c_type = t.col("event_type"), c_ts = t.col("timestamp");
        total_rows += t.rows.size();
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto& r = t.rows[i];
            try {
                ClickstreamEvent ev;
                ev.user_id = r.at(c_user);
                ev.product_id = r.at(c_id);
                ev.event_type = parse_event_type(r.at(c_type));
                ev.timestamp = parse_timestamp(r.at(c_ts));
                if (!d.find_product(ev.product_id)) {
                    reject("clickstream.csv", i + 1, "unknown product", ev.product_id);
                    continue;
                }
                d.clickstream.push_back(std::move(ev));
            } catch (const std::exception& ex) {
                reject("clickstream.csv", i + 1, "unparseable row", ex.what());
            }
        }
        std::sort(d.clickstream.begin(), d.clickstream.end(),
                  [](const ClickstreamEvent& a, const ClickstreamEvent& b) {
                      return std::tie(a.timestamp, a.user_id, a.product_id, a.event_type) <
                             std::tie(b.timestamp, b.user_id, b.product_id, b.event_type);
                  });
    }

    // sort ranks
    {
        auto t = csv::read_file((fs::path(root_path) / "sort_rank.csv").string());
        std::size_t c_id = t.col("product_id"), c_rank = t.col("rank"), c_score = t.col("score");
        total_rows += t.rows.size();
        std::unordered_set<std::string> ranked;
        for (std::size_t i = 0; i < t.rows.size(); ++i) {
            const auto& r = t.rows[i];
            try {
                SortRankRecord s;
                s.product_id = r.at(c_id);
                s.rank = detail::parse_count(r.at(c_rank), "rank");
                s.score = detail::parse_real(r.at(c_score), "score");
                if (!d.find_product(s.product_id)) {
                    reject("sort_rank.csv", i + 1, "unknown product", s.product_id);
                    continue;
                }
                if (s.rank <= 0) {
                    reject("sort_rank.csv", i + 1, "bad rank", s.product_id);
                    continue;
                }
                if (s.score < 0) {
                    reject("sort_rank.csv", i + 1, "bad score", s.product_id);
                    continue;
                }
                if (!ranked.insert(s.product_id).second) {
                    reject("sort_rank.csv", i + 1, "duplicate rank row", s.product_id);
                    continue;
                }
                d.sort_ranks.push_back(std::move(s));
            } catch (const std::exception& ex) {
                reject("sort_rank.csv", i + 1, "unparseable row", ex.what());
            }
        }
        std::sort(d.sort_ranks.begin(), d.sort_ranks.end(),
                  [](const SortRankRecord& a, const SortRankRecord& b) {
                      return std::tie(a.rank, a.product_id) < std::tie(b.rank, b.product_id);
                  });
    }

    if (total_rows > 0 &&
        static_cast<double>(result.rejects.violations.size()) > 0.01 * static_cast<double>(total_rows))
        throw ValidationError("too many rejected rows (" +
                              std::to_string(result.rejects.violations.size()) + " of " +
                              std::to_string(total_rows) + "): " + result.rejects.summary());

    ValidationReport structural = validate_dataset(d);
    if (!structural.empty())
        throw ValidationError("dataset invariant violations: " + structural.summary());
    return result;
}

/// Canonical day-level serialization; same dataset -> identical bytes.
inline void save_dataset(const Dataset& d, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        csv::Writer w((fs::path(dir) / "catalog.csv").string());
        w.write_row({"product_id", "brand", "article_type", "gender", "mrp", "buying_cost",
                     "base_discount_pct", "color"});
        for (const auto& e : d.catalog)
            w.write_row({e.product_id, e.brand, e.article_type, std::string(to_string(e.gender)),
                         e.mrp.str(), e.buying_cost.str(), csv::fmt(e.base_discount_pct), e.color});
    }
    {
        csv::Writer w((fs::path(dir) / "price_history.csv").string());
        w.write_row({"product_id", "date", "hour", "price", "discount_pct", "quantity_sold",
                     "inventory"});
        for (const auto& o : d.price_history)
            w.write_row({o.product_id, o.date.str(), "0", o.price.str(), csv::fmt(o.discount_pct),
                         std::to_string(o.quantity_sold), std::to_string(o.inventory)});
    }
    {
        csv::Writer w((fs::path(dir) / "clickstream.csv").string());
        w.write_row({"user_id", "product_id", "event_type", "timestamp"});
        for (const auto& ev : d.clickstream)
            w.write_row({ev.user_id, ev.product_id, std::string(to_string(ev.event_type)),
                         format_timestamp(ev.timestamp)});
    }
    {
        csv::Writer w((fs::path(dir) / "sort_rank.csv").string());
        w.write_row({"product_id", "rank", "score"});
        for (const auto& s : d.sort_ranks)
            w.write_row({s.product_id, std::to_string(s.rank), csv::fmt(s.score)});
    }
}

/// Rejects report to CSV for operator inspection.
inline void save_rejects(const ValidationReport& rep, const std::string& path) {
    csv::Writer w(path);
    w.write_row({"source", "row", "reason", "detail"});
    for (const auto& v : rep.violations)
        w.write_row({v.source, std::to_string(v.row), v.reason, v.detail});
}

}  // namespace pricer
