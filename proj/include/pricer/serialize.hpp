#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "pricer/core.hpp"

namespace pricer::serialize {

// Doubles travel as %a hexfloat so artifacts round-trip bit-exactly.

inline void write_scalar(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    os << buf << '\n';
}

inline double read_scalar(std::istream& is) {
    std::string tok;
    if (!(is >> tok)) throw IoError("artifact: truncated scalar");
    double v = 0.0;
    if (std::sscanf(tok.c_str(), "%la", &v) != 1)
        throw IoError("artifact: bad scalar '" + tok + "'");
    return v;
}

inline void write_vector(std::ostream& os, const Eigen::VectorXd& v) {
    os << v.size() << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i) write_scalar(os, v(i));
}

inline Eigen::VectorXd read_vector(std::istream& is) {
    Eigen::Index n = 0;
    if (!(is >> n) || n < 0) throw IoError("artifact: bad vector length");
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = read_scalar(is);
    return v;
}

inline void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
    os << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) write_scalar(os, m(i, j));
}

inline Eigen::MatrixXd read_matrix(std::istream& is) {
    Eigen::Index r = 0, c = 0;
    if (!(is >> r >> c) || r < 0 || c < 0) throw IoError("artifact: bad matrix shape");
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = read_scalar(is);
    return m;
}

/// Reads and checks a "<tag> <version>" header line.
inline void expect_tag(std::istream& is, const std::string& tag, int version) {
    std::string t;
    int v = 0;
    if (!(is >> t >> v) || t != tag || v != version)
        throw IoError("artifact: expected '" + tag + " " + std::to_string(version) +
                      "', got '" + t + " " + std::to_string(v) + "'");
}

}  // namespace pricer::serialize
