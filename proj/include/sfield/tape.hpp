// Copyright (c) 2026 the scatterfield authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "sfield/common.hpp"

namespace sfield {

/// Minimal scalar reverse-mode tape over doubles. This is the independent
/// gradient oracle the hand-written adjoints are tested against; the training
/// path never uses it. Each node stores its parents and the local partials
/// captured during the forward evaluation.
class Tape {
  public:
    int input(double v) { return push(v, -1, -1, 0, 0); }
    int unary(double v, int p, double dp) { return push(v, p, -1, dp, 0); }
    int binary(double v, int a, int b, double da, double db) { return push(v, a, b, da, db); }

    double val(int i) const { return nodes_[std::size_t(i)].val; }
    double adj(int i) const { return nodes_[std::size_t(i)].adj; }
    std::size_t size() const { return nodes_.size(); }

    /// Reverse sweep seeding d(root)/d(root) = 1. Resets previous adjoints.
    void backward(int root) {
        for (auto& n : nodes_) n.adj = 0;
        nodes_[std::size_t(root)].adj = 1;
        for (int i = int(nodes_.size()) - 1; i >= 0; --i) {
            const Node& n = nodes_[std::size_t(i)];
            if (n.pa >= 0) nodes_[std::size_t(n.pa)].adj += n.da * n.adj;
            if (n.pb >= 0) nodes_[std::size_t(n.pb)].adj += n.db * n.adj;
        }
    }

  private:
    struct Node {
        double val, adj, da, db;
        int pa, pb;
    };

    int push(double v, int a, int b, double da, double db) {
        nodes_.push_back({v, 0, da, db, a, b});
        return int(nodes_.size()) - 1;
    }

    std::vector<Node> nodes_;
};

/// Handle for ergonomic expression building on a tape.
struct TVar {
    Tape* tape = nullptr;
    int i = -1;

    double v() const { return tape->val(i); }
    double grad() const { return tape->adj(i); }
};

inline TVar var(Tape& t, double v) { return {&t, t.input(v)}; }

inline TVar operator+(TVar a, TVar b) { return {a.tape, a.tape->binary(a.v() + b.v(), a.i, b.i, 1, 1)}; }
inline TVar operator-(TVar a, TVar b) { return {a.tape, a.tape->binary(a.v() - b.v(), a.i, b.i, 1, -1)}; }
inline TVar operator*(TVar a, TVar b) {
    return {a.tape, a.tape->binary(a.v() * b.v(), a.i, b.i, b.v(), a.v())};
}
inline TVar operator/(TVar a, TVar b) {
    const double q = a.v() / b.v();
    return {a.tape, a.tape->binary(q, a.i, b.i, 1.0 / b.v(), -q / b.v())};
}
inline TVar operator-(TVar a) { return {a.tape, a.tape->unary(-a.v(), a.i, -1)}; }

inline TVar operator+(TVar a, double c) { return {a.tape, a.tape->unary(a.v() + c, a.i, 1)}; }
inline TVar operator+(double c, TVar a) { return a + c; }
inline TVar operator-(TVar a, double c) { return a + (-c); }
inline TVar operator-(double c, TVar a) { return {a.tape, a.tape->unary(c - a.v(), a.i, -1)}; }
inline TVar operator*(TVar a, double c) { return {a.tape, a.tape->unary(a.v() * c, a.i, c)}; }
inline TVar operator*(double c, TVar a) { return a * c; }
inline TVar operator/(TVar a, double c) { return a * (1.0 / c); }

inline TVar exp(TVar a) {
    const double e = std::exp(a.v());
    return {a.tape, a.tape->unary(e, a.i, e)};
}
inline TVar log(TVar a) { return {a.tape, a.tape->unary(std::log(a.v()), a.i, 1.0 / a.v())}; }
inline TVar sqr(TVar a) { return {a.tape, a.tape->unary(a.v() * a.v(), a.i, 2.0 * a.v())}; }

/// Stop-gradient: same value, detached from its parents.
inline TVar sg(TVar a) { return {a.tape, a.tape->input(a.v())}; }

}  // namespace sfield
