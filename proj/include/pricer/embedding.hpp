#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pricer/core.hpp"
#include "pricer/csv.hpp"

namespace pricer {

/// Learned product vectors plus the training recipe that produced them.
struct EmbeddingTable {
    int dimension = 0;
    std::map<ProductId, Eigen::VectorXd> vectors;
    struct Meta {
        int epochs = 0;
        int window = 0;
        int negatives = 0;
        std::uint64_t seed = 0;
    } meta;
};

inline double cosine_similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double na = a.norm(), nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

namespace detail {

/// Implicit interaction score; list/pdp impressions are not interactions.
inline double implicit_score(EventType e) {
    switch (e) {
        case EventType::click: return 1.0;
        case EventType::cart: return 3.0;
        case EventType::order: return 5.0;
        default: return 0.0;
    }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

/**
 * Skip-gram with negative sampling over per-user interaction sequences.
 *
 * Each user's click/cart/order events, ordered by timestamp, form one
 * sentence of product tokens. The negative-sampling noise distribution is
 * the score-weighted product frequency raised to 3/4, and each positive
 * pair's update is scaled by its events' implicit scores, so carts and
 * orders pull products together harder than stray clicks.
 *
 * Deterministic for a fixed seed (single-threaded, one RNG stream).
 */
inline EmbeddingTable train_product_embeddings(const std::vector<ClickstreamEvent>& clickstream,
                                               int dimension, int epochs, int window,
                                               int negatives, std::uint64_t seed) {
    if (dimension <= 0) throw DomainError("embedding dimension must be positive");
    if (epochs <= 0 || window <= 0 || negatives <= 0)
        throw DomainError("epochs, window and negatives must be positive");

    struct Token {
        std::size_t product;
        double score;
    };

    // per-user sentences, time ordered
    std::vector<ClickstreamEvent> events;
    events.reserve(clickstream.size());
    for (const auto& ev : clickstream)
        if (detail::implicit_score(ev.event_type) > 0.0) events.push_back(ev);
    std::stable_sort(events.begin(), events.end(),
                     [](const ClickstreamEvent& a, const ClickstreamEvent& b) {
                         return std::tie(a.user_id, a.timestamp, a.product_id) <
                                std::tie(b.user_id, b.timestamp, b.product_id);
                     });

    std::map<ProductId, std::size_t> vocab;
    std::vector<ProductId> products;
    for (const auto& ev : events)
        if (vocab.emplace(ev.product_id, 0).second) {}
    for (auto& [id, idx] : vocab) {
        idx = products.size();
        products.push_back(id);
    }

    std::vector<std::vector<Token>> sentences;
    {
        std::vector<Token> cur;
        const UserId* cur_user = nullptr;
        auto flush = [&] {
            if (cur.size() >= 2) sentences.push_back(cur);
            cur.clear();
        };
        for (const auto& ev : events) {
            if (!cur_user || *cur_user != ev.user_id) {
                flush();
                cur_user = &ev.user_id;
            }
            cur.push_back({vocab.at(ev.product_id), detail::implicit_score(ev.event_type)});
        }
        flush();
    }
    if (products.size() < 2 || sentences.empty())
        throw DomainError("degenerate interaction corpus: need >=2 products and a user with >=2 interactions");

    // noise distribution: (score-weighted frequency)^0.75
    std::vector<double> noise_cdf(products.size(), 0.0);
    {
        std::vector<double> freq(products.size(), 0.0);
        for (const auto& s : sentences)
            for (const auto& t : s) freq[t.product] += t.score;
        double total = 0.0;
        for (std::size_t i = 0; i < freq.size(); ++i) {
            total += std::pow(freq[i], 0.75);
            noise_cdf[i] = total;
        }
        for (auto& v : noise_cdf) v /= total;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto sample_noise = [&]() -> std::size_t {
        double u = unit(rng);
        auto it = std::lower_bound(noise_cdf.begin(), noise_cdf.end(), u);
        return static_cast<std::size_t>(std::distance(noise_cdf.begin(), it));
    };

    const auto n = static_cast<Eigen::Index>(products.size());
    Eigen::MatrixXd in(n, dimension), out = Eigen::MatrixXd::Zero(n, dimension);
    {
        std::uniform_real_distribution<double> init(-0.5 / dimension, 0.5 / dimension);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int j = 0; j < dimension; ++j) in(i, j) = init(rng);
    }

    const double max_score = 5.0;
    const double lr0 = 0.05;
    std::int64_t total_steps = 0;
    for (const auto& s : sentences) total_steps += static_cast<std::int64_t>(s.size());
    total_steps *= epochs;
    std::int64_t step = 0;

    Eigen::VectorXd grad_in(dimension);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (const auto& sentence : sentences) {
            for (std::size_t i = 0; i < sentence.size(); ++i, ++step) {
                double lr = lr0 * std::max(1.0 - static_cast<double>(step) /
                                                     static_cast<double>(total_steps),
                                           0.01);
                std::size_t lo = i >= static_cast<std::size_t>(window) ? i - window : 0;
                std::size_t hi = std::min(sentence.size() - 1, i + static_cast<std::size_t>(window));
                for (std::size_t j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    std::size_t center = sentence[i].product;
                    std::size_t context = sentence[j].product;
                    double pair_w =
                        0.5 * (sentence[i].score + sentence[j].score) / max_score;
                    grad_in.setZero();
                    // positive pair
                    {
                        double g = (1.0 - detail::sigmoid(in.row(center).dot(out.row(context)))) *
                                   lr * pair_w;
                        grad_in += g * out.row(context).transpose();
                        out.row(context) += g * in.row(center);
                    }
                    for (int k = 0; k < negatives; ++k) {
                        std::size_t neg = sample_noise();
                        if (neg == context) continue;
                        double g = -detail::sigmoid(in.row(center).dot(out.row(neg))) * lr * pair_w;
                        grad_in += g * out.row(neg).transpose();
                        out.row(neg) += g * in.row(center);
                    }
                    in.row(center) += grad_in.transpose();
                }
            }
        }
    }

    if (!in.allFinite()) throw TrainingError("embedding training diverged");

    EmbeddingTable table;
    table.dimension = dimension;
    table.meta = {epochs, window, negatives, seed};
    for (Eigen::Index i = 0; i < n; ++i)
        table.vectors[products[static_cast<std::size_t>(i)]] = in.row(i).transpose();
    return table;
}

/// Flat text format: one line per product, id then d reals.
inline void save_embeddings(const EmbeddingTable& t, const std::string& path) {
    std::ofstream outf(path);
    if (!outf) throw IoError("cannot open for write: " + path);
    outf << t.dimension << ' ' << t.meta.epochs << ' ' << t.meta.window << ' '
         << t.meta.negatives << ' ' << t.meta.seed << '\n';
    outf.precision(17);
    for (const auto& [id, v] : t.vectors) {
        outf << id;
        for (Eigen::Index i = 0; i < v.size(); ++i) outf << ' ' << v(i);
        outf << '\n';
    }
}

inline EmbeddingTable load_embeddings(const std::string& path) {
    std::ifstream inf(path);
    if (!inf) throw IoError("cannot open " + path);
    EmbeddingTable t;
    inf >> t.dimension >> t.meta.epochs >> t.meta.window >> t.meta.negatives >> t.meta.seed;
    if (!inf || t.dimension <= 0) throw IoError("bad embedding file header: " + path);
    ProductId id;
    while (inf >> id) {
        Eigen::VectorXd v(t.dimension);
        for (int i = 0; i < t.dimension; ++i)
            if (!(inf >> v(i))) throw IoError("truncated embedding row in " + path);
        t.vectors[id] = std::move(v);
    }
    return t;
}

}  // namespace pricer
