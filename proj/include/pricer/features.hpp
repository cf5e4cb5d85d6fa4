#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/embedding.hpp"
#include "pricer/ingest.hpp"

namespace pricer {

/// Assembled model input for one product-day.
struct FeatureVector {
    ProductId product_id;
    Date date;
    std::map<std::string, double> observed;
    std::map<std::string, double> engineered;
    double sort_score = 0.0;
    Eigen::VectorXd embedding;
};

using NamedReals = std::map<std::string, double>;

namespace detail {

inline void check_day_in_range(const Dataset& d, Date day) {
    if (d.price_history.empty()) throw DomainError("dataset has no price history");
    Date lo = d.price_history.front().date, hi = d.price_history.front().date;
    for (const auto& o : d.price_history) {
        lo = std::min(lo, o.date);
        hi = std::max(hi, o.date);
    }
    if (day < lo || day > hi)
        throw DomainError("day " + day.str() + " outside price history range [" + lo.str() +
                          ", " + hi.str() + "]");
}

}  // namespace detail

/**
 * Browsing and trading counts for `day` only: quantity_sold, list_count,
 * pdp_count, cart_count, inventory per catalog product (zeros when idle).
 */
inline std::map<ProductId, NamedReals> build_observed_features(const Dataset& d, Date day) {
    detail::check_day_in_range(d, day);
    std::map<ProductId, NamedReals> out;
    for (const auto& e : d.catalog)
        out[e.product_id] = {{"quantity_sold", 0.0},
                             {"list_count", 0.0},
                             {"pdp_count", 0.0},
                             {"cart_count", 0.0},
                             {"inventory", 0.0}};
    for (const auto& o : d.price_history) {
        if (o.date != day) continue;
        auto& m = out[o.product_id];
        m["quantity_sold"] = static_cast<double>(o.quantity_sold);
        m["inventory"] = static_cast<double>(o.inventory);
    }
    for (const auto& ev : d.clickstream) {
        if (timestamp_date(ev.timestamp) != day) continue;
        auto& m = out[ev.product_id];
        switch (ev.event_type) {
            case EventType::list: m["list_count"] += 1.0; break;
            case EventType::pdp: m["pdp_count"] += 1.0; break;
            case EventType::cart: m["cart_count"] += 1.0; break;
            default: break;
        }
    }
    return out;
}

/**
 * Trailing-window features over [day-7, day-1]: sales_7d, visibility_7d,
 * the BAG (brand, article_type, gender) quantity share, and a day-of-week
 * one-hot so seasonality has somewhere to land.
 */
inline std::map<ProductId, NamedReals> build_engineered_features(const Dataset& d, Date day) {
    detail::check_day_in_range(d, day);
    Date lo = d.price_history.front().date;
    for (const auto& o : d.price_history) lo = std::min(lo, o.date);
    if (day - 7 < lo)
        throw DomainError("insufficient history before " + day.str() + ": need 7 days, have " +
                          std::to_string(day - lo));

    std::map<ProductId, double> window_qty;
    for (const auto& e : d.catalog) window_qty[e.product_id] = 0.0;
    for (const auto& o : d.price_history)
        if (o.date >= day - 7 && o.date <= day - 1)
            window_qty[o.product_id] += static_cast<double>(o.quantity_sold);

    std::map<ProductId, double> window_vis;
    for (const auto& ev : d.clickstream) {
        Date evd = timestamp_date(ev.timestamp);
        if (evd >= day - 7 && evd <= day - 1 &&
            (ev.event_type == EventType::list || ev.event_type == EventType::pdp))
            window_vis[ev.product_id] += 1.0;
    }

    // BAG-group totals over the same window
    std::map<std::string, double> bag_total;
    auto bag_key = [](const CatalogEntry& e) {
        return e.brand + "\x1f" + e.article_type + "\x1f" + std::string(to_string(e.gender));
    };
    for (const auto& e : d.catalog) bag_total[bag_key(e)] += window_qty[e.product_id];

    int dow = day.weekday();
    std::map<ProductId, NamedReals> out;
    for (const auto& e : d.catalog) {
        NamedReals m;
        m["sales_7d"] = window_qty[e.product_id];
        auto vit = window_vis.find(e.product_id);
        m["visibility_7d"] = vit == window_vis.end() ? 0.0 : vit->second;
        double total = bag_total[bag_key(e)];
        m["bag_ratio"] = total > 0.0 ? window_qty[e.product_id] / total : 0.0;
        for (int i = 0; i < 7; ++i)
            m["dow_" + std::to_string(i)] = (i == dow) ? 1.0 : 0.0;
        out[e.product_id] = std::move(m);
    }
    return out;
}

/// Search score per product; products absent from the snapshot get 0
/// (not live in search). A product ranked twice is a broken snapshot.
inline std::map<ProductId, double> attach_sort_rank(const Dataset& d) {
    std::map<ProductId, double> out;
    for (const auto& e : d.catalog) out[e.product_id] = 0.0;
    std::map<ProductId, int> seen;
    for (const auto& r : d.sort_ranks) {
        if (++seen[r.product_id] > 1)
            throw DomainError("duplicate rank row: " + r.product_id);
        out[r.product_id] = r.score;
    }
    return out;
}

/// Feature matrix in the documented column order, rows sorted by product_id.
struct FeatureMatrix {
    std::vector<ProductId> product_ids;
    std::vector<std::string> columns;
    Eigen::MatrixXd X;        // one row per product
    Eigen::VectorXd labels;   // quantity_sold on `day`, aligned with rows
    Date day;
};

/**
 * Assembles per-product rows for `day`.
 *
 * Column order: quantity_sold, list_count, pdp_count, cart_count, inventory,
 * sales_7d, visibility_7d, bag_ratio, dow_0..dow_6, sort_score,
 * emb_0..emb_{d-1}. Labels are the quantity sold on `day` itself; training
 * for next-day demand pairs the features of day t with the labels of day t+1.
 */
inline FeatureMatrix assemble_feature_matrix(const Dataset& d, Date day,
                                             const EmbeddingTable& embeddings) {
    if (embeddings.vectors.empty()) throw DomainError("missing embeddings");
    auto observed = build_observed_features(d, day);
    auto engineered = build_engineered_features(d, day);
    auto sort_scores = attach_sort_rank(d);

    const int dim = embeddings.dimension;
    FeatureMatrix fm;
    fm.day = day;
    fm.columns = {"quantity_sold", "list_count", "pdp_count", "cart_count", "inventory",
                  "sales_7d", "visibility_7d", "bag_ratio"};
    for (int i = 0; i < 7; ++i) fm.columns.push_back("dow_" + std::to_string(i));
    fm.columns.push_back("sort_score");
    for (int i = 0; i < dim; ++i) fm.columns.push_back("emb_" + std::to_string(i));

    for (const auto& e : d.catalog) fm.product_ids.push_back(e.product_id);
    std::sort(fm.product_ids.begin(), fm.product_ids.end());

    const auto n = static_cast<Eigen::Index>(fm.product_ids.size());
    fm.X.resize(n, static_cast<Eigen::Index>(fm.columns.size()));
    fm.labels = Eigen::VectorXd::Zero(n);

    for (Eigen::Index row = 0; row < n; ++row) {
        const ProductId& id = fm.product_ids[static_cast<std::size_t>(row)];
        const NamedReals& obs = observed.at(id);
        const NamedReals& eng = engineered.at(id);
        Eigen::Index col = 0;
        for (const char* k : {"quantity_sold", "list_count", "pdp_count", "cart_count",
                              "inventory"})
            fm.X(row, col++) = obs.at(k);
        for (const char* k : {"sales_7d", "visibility_7d", "bag_ratio"})
            fm.X(row, col++) = eng.at(k);
        for (int i = 0; i < 7; ++i) fm.X(row, col++) = eng.at("dow_" + std::to_string(i));
        fm.X(row, col++) = sort_scores.at(id);
        auto vit = embeddings.vectors.find(id);
        for (int i = 0; i < dim; ++i)
            fm.X(row, col++) = vit == embeddings.vectors.end() ? 0.0 : vit->second(i);
        fm.labels(row) = obs.at("quantity_sold");
    }
    if (!fm.X.allFinite()) throw DomainError("feature matrix contains non-finite values");
    return fm;
}

/// Feature matrix to CSV (product_id, date, then the documented columns).
inline void save_feature_matrix(const FeatureMatrix& fm, const std::string& path) {
    csv::Writer w(path);
    std::vector<std::string> header = {"product_id", "date"};
    header.insert(header.end(), fm.columns.begin(), fm.columns.end());
    header.push_back("label");
    w.write_row(header);
    for (Eigen::Index r = 0; r < fm.X.rows(); ++r) {
        std::vector<std::string> row = {fm.product_ids[static_cast<std::size_t>(r)],
                                        fm.day.str()};
        for (Eigen::Index c = 0; c < fm.X.cols(); ++c) row.push_back(csv::fmt(fm.X(r, c)));
        row.push_back(csv::fmt(fm.labels(r)));
        w.write_row(row);
    }
}

}  // namespace pricer
