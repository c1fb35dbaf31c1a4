// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Analytic FLOP accounting. Costs are derived from matrix dimensions via the
// fixed model below, never from hardware counters, so ledgers are exactly
// reproducible and comparable across machines.
//
// Cost model (real floating-point operations):
//   * one complex multiply-add                   = 8 real flops
//   * product of an (m x k) by (k x n) complex
//     matrix                                     = m*k*n CMACs = 8*m*k*n
//   * Hermitian rank update A A^H, A (s x u),
//     lower triangle only                        = u*s*(s+1)/2 CMACs
//   * Hermitian Cholesky factorisation of s x s  = s*(s^2-1)/6 CMACs
//   * log-det accumulation over s pivots         = s logs + s adds = 2*s
//   * flops_logdet(s) = (4/3)*s*(s^2-1) + 2*s   (factorisation + accumulation)
//   * one capacity evaluation of an s-antenna,
//     u-user submatrix:
//       column scaling       2*s*u
//       Gram rank update     8*u*s*(s+1)/2
//       identity shift       s
//       log-det              flops_logdet(s)
//   * subcarrier averaging over m evaluations    = m  (m-1 adds + 1 divide)

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rpnsel {

// Real-flop cost of an s x s Hermitian factorisation plus log accumulation.
// s*(s^2-1) is divisible by 3, so the value is exact in integer arithmetic.
inline std::uint64_t flops_logdet(int n) {
    if (n < 1) throw std::invalid_argument("flops_logdet: n must be >= 1");
    const std::uint64_t s = static_cast<std::uint64_t>(n);
    return 4 * (s * (s * s - 1)) / 3 + 2 * s;
}

// Real-flop cost of one sum-capacity evaluation (single subcarrier).
inline std::uint64_t flops_capacity_eval(int n_selected, int n_users) {
    const std::uint64_t s = static_cast<std::uint64_t>(n_selected);
    const std::uint64_t u = static_cast<std::uint64_t>(n_users);
    return 2 * s * u + 8 * u * s * (s + 1) / 2 + s + flops_logdet(n_selected);
}

// Subcarrier-averaged evaluation over m subcarriers.
inline std::uint64_t flops_capacity_avg(int n_selected, int n_users, int n_subcarriers) {
    const std::uint64_t m = static_cast<std::uint64_t>(n_subcarriers);
    return m * flops_capacity_eval(n_selected, n_users) + m;
}

// One recorded evaluation: which algorithm/phase asked for it and the matrix
// dimensions that determine its cost.
struct FlopEvent {
    std::string algorithm;
    std::string phase;
    int n_selected = 0;
    int n_users = 0;
    int n_subcarriers = 0;

    std::uint64_t flops() const { return flops_capacity_avg(n_selected, n_users, n_subcarriers); }
};

// Monotone counters of capacity-evaluation work keyed by (algorithm, phase),
// with the full event list retained so tests can recompute totals.
class FlopLedger {
  public:
    struct Counters {
        std::uint64_t complex_macs = 0;     // Gram-product multiply-adds
        std::uint64_t real_ops = 0;         // scalings, shifts, logs, averaging
        std::uint64_t factorisations = 0;   // Cholesky factorisation count
        std::uint64_t evaluations = 0;      // capacity evaluations (averaged)
        std::uint64_t flops = 0;            // total real flops per the model
    };

    void record_capacity_eval(const std::string& algorithm, const std::string& phase,
                              int n_selected, int n_users, int n_subcarriers) {
        if (n_selected < 1 || n_users < 1 || n_subcarriers < 1)
            throw std::invalid_argument("FlopLedger: dimensions must be >= 1");
        const std::uint64_t s = static_cast<std::uint64_t>(n_selected);
        const std::uint64_t u = static_cast<std::uint64_t>(n_users);
        const std::uint64_t m = static_cast<std::uint64_t>(n_subcarriers);

        Counters& c = counters_[{algorithm, phase}];
        c.complex_macs += m * (u * s * (s + 1) / 2 + s * (s * s - 1) / 6);
        c.real_ops += m * (2 * s * u + s + 2 * s) + m;
        c.factorisations += m;
        c.evaluations += 1;
        c.flops += flops_capacity_avg(n_selected, n_users, n_subcarriers);
        events_.push_back({algorithm, phase, n_selected, n_users, n_subcarriers});
    }

    std::uint64_t total_flops() const {
        std::uint64_t t = 0;
        for (const auto& [key, c] : counters_) t += c.flops;
        return t;
    }

    std::uint64_t total_flops(const std::string& algorithm) const {
        std::uint64_t t = 0;
        for (const auto& [key, c] : counters_)
            if (key.first == algorithm) t += c.flops;
        return t;
    }

    const Counters& counters(const std::string& algorithm, const std::string& phase) const {
        static const Counters kEmpty{};
        auto it = counters_.find({algorithm, phase});
        return it == counters_.end() ? kEmpty : it->second;
    }

    const std::vector<FlopEvent>& events() const { return events_; }

    void merge(const FlopLedger& other) {
        for (const auto& [key, c] : other.counters_) {
            Counters& mine = counters_[key];
            mine.complex_macs += c.complex_macs;
            mine.real_ops += c.real_ops;
            mine.factorisations += c.factorisations;
            mine.evaluations += c.evaluations;
            mine.flops += c.flops;
        }
        events_.insert(events_.end(), other.events_.begin(), other.events_.end());
    }

    void clear() {
        counters_.clear();
        events_.clear();
    }

  private:
    std::map<std::pair<std::string, std::string>, Counters> counters_;
    std::vector<FlopEvent> events_;
};

}  // namespace rpnsel
