#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/csv.hpp"
#include "pricer/embedding.hpp"

namespace pricer {

enum class ElasticityMethod { regression, arc, cold_start };

inline std::string_view to_string(ElasticityMethod m) {
    switch (m) {
        case ElasticityMethod::regression: return "regression";
        case ElasticityMethod::arc: return "arc";
        default: return "cold_start";
    }
}

inline ElasticityMethod parse_elasticity_method(std::string_view s) {
    if (s == "regression") return ElasticityMethod::regression;
    if (s == "arc") return ElasticityMethod::arc;
    if (s == "cold_start") return ElasticityMethod::cold_start;
    throw DomainError("bad elasticity method: " + std::string(s));
}

/// Per-product price elasticity of demand, refreshed on every pipeline run.
struct ElasticityEstimate {
    ProductId product_id;
    double ed = 0.0;  // clamped to [-5, 5]
    ElasticityMethod method = ElasticityMethod::arc;
    int n_points = 0;  // distinct historical prices (or neighbors) used
    Date updated_on;
};

inline double clamp_elasticity(double ed) { return std::clamp(ed, -5.0, 5.0); }

/**
 * Elasticity from one product's day-level history.
 *
 * With five or more distinct prices and strictly positive sales, ed is the
 * slope of ln Q on ln P. With at least two distinct prices it is the
 * finite-difference form (dQ/Q)*(P/dP) over the two most recent
 * distinct-price days, the earlier day serving as the (Q, P) base. Fewer
 * than two distinct prices cannot identify elasticity: returns nullopt so
 * the caller falls back to embedding neighbors.
 */
inline std::optional<ElasticityEstimate> estimate_elasticity(
    const std::vector<DemandObservation>& history, Date updated_on) {
    if (history.empty()) throw DomainError("estimate_elasticity: empty history");
    std::vector<DemandObservation> h = history;
    std::sort(h.begin(), h.end(), [](const DemandObservation& a, const DemandObservation& b) {
        return a.date < b.date;
    });

    std::vector<std::int64_t> distinct;
    for (const auto& o : h) distinct.push_back(o.price.paise);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    ElasticityEstimate est;
    est.product_id = h.front().product_id;
    est.updated_on = updated_on;

    bool all_positive = std::all_of(h.begin(), h.end(), [](const DemandObservation& o) {
        return o.quantity_sold > 0;
    });

    if (distinct.size() >= 5 && all_positive) {
        // least-squares slope of ln Q on ln P
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(h.size());
        for (const auto& o : h) {
            double x = std::log(static_cast<double>(o.price.paise));
            double y = std::log(static_cast<double>(o.quantity_sold));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double denom = sxx - sx * sx / n;
        if (denom < 1e-12) throw DomainError("estimate_elasticity: degenerate price spread");
        est.ed = clamp_elasticity((sxy - sx * sy / n) / denom);
        est.method = ElasticityMethod::regression;
        est.n_points = static_cast<int>(distinct.size());
        return est;
    }

    if (distinct.size() >= 2) {
        const DemandObservation& later = h.back();
        const DemandObservation* earlier = nullptr;
        for (auto it = h.rbegin(); it != h.rend(); ++it) {
            if (it->price.paise != later.price.paise) {
                earlier = &*it;
                break;
            }
        }
        if (!earlier) throw std::logic_error("estimate_elasticity: no distinct price found");

        double dq = static_cast<double>(later.quantity_sold - earlier->quantity_sold);
        double dp = static_cast<double>(later.price.paise - earlier->price.paise);
        double q = static_cast<double>(earlier->quantity_sold);
        double p = static_cast<double>(earlier->price.paise);
        double ed;
        if (dq == 0.0)
            ed = 0.0;  // perfectly inelastic
        else if (q == 0.0)
            ed = (dq > 0.0) == (dp > 0.0) ? 5.0 : -5.0;  // jump from zero sales
        else
            ed = (dq * p) / (q * dp);
        est.ed = clamp_elasticity(ed);
        est.method = ElasticityMethod::arc;
        est.n_points = 2;
        return est;
    }

    return std::nullopt;  // cold start
}

/**
 * Elasticity transfer for products without usable history: the
 * similarity-weighted mean over the k nearest known products in embedding
 * space. Negative cosines are clamped to zero weight; if every weight
 * vanishes the plain mean of the k neighbors is used.
 */
inline ElasticityEstimate cold_start_elasticity(const ProductId& product_id,
                                                const EmbeddingTable& embeddings,
                                                const std::vector<ElasticityEstimate>& known,
                                                int k, Date updated_on) {
    auto self = embeddings.vectors.find(product_id);
    if (self == embeddings.vectors.end())
        throw DomainError("cold_start_elasticity: no embedding for " + product_id);
    if (known.empty()) throw DomainError("cold_start_elasticity: no known estimates");
    if (k < 1) throw DomainError("cold_start_elasticity: k must be positive");

    struct Neighbor {
        double sim;
        double ed;
        const ProductId* id;
    };
    std::vector<Neighbor> neighbors;
    for (const auto& e : known) {
        if (e.product_id == product_id) continue;
        auto it = embeddings.vectors.find(e.product_id);
        if (it == embeddings.vectors.end()) continue;
        neighbors.push_back({cosine_similarity(self->second, it->second), e.ed, &e.product_id});
    }
    if (neighbors.empty())
        throw DomainError("cold_start_elasticity: no embedded neighbor with a known estimate");

    std::sort(neighbors.begin(), neighbors.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return *a.id < *b.id;
    });
    if (static_cast<int>(neighbors.size()) > k) neighbors.resize(static_cast<std::size_t>(k));

    double wsum = 0.0, acc = 0.0;
    for (const auto& nb : neighbors) {
        double w = std::max(nb.sim, 0.0);
        wsum += w;
        acc += w * nb.ed;
    }
    double ed;
    if (wsum > 1e-12) {
        ed = acc / wsum;
    } else {
        ed = 0.0;
        for (const auto& nb : neighbors) ed += nb.ed;
        ed /= static_cast<double>(neighbors.size());
    }

    ElasticityEstimate est;
    est.product_id = product_id;
    est.ed = clamp_elasticity(ed);
    est.method = ElasticityMethod::cold_start;
    est.n_points = static_cast<int>(neighbors.size());
    est.updated_on = updated_on;
    return est;
}

/**
 * Demand at new_price from the finite-difference elasticity form:
 * max(0, d + ed * (new_price - base_price) * d / base_price). Multiplying
 * before dividing keeps clean integer cases exact.
 */
inline double project_demand(Money base_price, double base_demand, double ed, Money new_price) {
    if (base_price.paise <= 0) throw DomainError("project_demand: base_price must be positive");
    if (base_demand < 0) throw DomainError("project_demand: base_demand must be non-negative");
    double dp = static_cast<double>(new_price.paise - base_price.paise);
    double projected =
        base_demand + (ed * dp * base_demand) / static_cast<double>(base_price.paise);
    return std::max(0.0, projected);
}

/// One (discount, price, projected demand) candidate.
struct LadderEntry {
    double discount_pct = 0.0;
    Money price;
    double projected_demand = 0.0;
};

/// The three price-demand candidates per product, ascending by discount:
/// base-delta, base, base+delta. Entries may repeat when clamping collides;
/// the optimizer treats duplicates as ties.
struct PriceLadder {
    ProductId product_id;
    std::array<LadderEntry, 3> entries;

    const LadderEntry& base() const { return entries[1]; }
};

inline PriceLadder build_price_ladder(const CatalogEntry& entry, double base_demand, double ed,
                                      double delta_pct) {
    if (delta_pct <= 0) throw DomainError("build_price_ladder: delta_pct must be positive");
    if (base_demand < 0) throw DomainError("build_price_ladder: negative base demand");

    auto clamp_discount = [](double d) { return std::clamp(d, 0.0, 90.0); };
    double base = clamp_discount(entry.base_discount_pct);
    std::array<double, 3> discounts = {clamp_discount(base - delta_pct), base,
                                       clamp_discount(base + delta_pct)};

    Money base_price = discount_to_price(entry.mrp, base);
    PriceLadder ladder;
    ladder.product_id = entry.product_id;
    for (std::size_t j = 0; j < 3; ++j) {
        LadderEntry le;
        le.discount_pct = discounts[j];
        le.price = discount_to_price(entry.mrp, discounts[j]);
        le.projected_demand = project_demand(base_price, base_demand, ed, le.price);
        ladder.entries[j] = le;
    }
    return ladder;
}

/// Elasticities to CSV: product_id,ed,method,n_points,updated_on.
inline void save_elasticities(const std::vector<ElasticityEstimate>& estimates,
                              const std::string& path) {
    csv::Writer w(path);
    w.write_row({"product_id", "ed", "method", "n_points", "updated_on"});
    for (const auto& e : estimates)
        w.write_row({e.product_id, csv::fmt(e.ed, 17), std::string(to_string(e.method)),
                     std::to_string(e.n_points), e.updated_on.str()});
}

inline std::vector<ElasticityEstimate> load_elasticities(const std::string& path) {
    auto t = csv::read_file(path);
    std::size_t c_id = t.col("product_id"), c_ed = t.col("ed"), c_m = t.col("method"),
                c_n = t.col("n_points"), c_u = t.col("updated_on");
    std::vector<ElasticityEstimate> out;
    for (const auto& r : t.rows) {
        ElasticityEstimate e;
        e.product_id = r.at(c_id);
        e.ed = std::stod(r.at(c_ed));
        e.method = parse_elasticity_method(r.at(c_m));
        e.n_points = std::stoi(r.at(c_n));
        e.updated_on = parse_date(r.at(c_u));
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace pricer
