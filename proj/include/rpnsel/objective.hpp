// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 rpnsel contributors
//
// Selection objectives over a channel tensor: the subcarrier-averaged
// log-det capacity used by every selection algorithm, and the post-ZF
// water-filled sum rate used for reporting.

#pragma once

#include "rpnsel/channel.hpp"
#include "rpnsel/flops.hpp"
#include "rpnsel/numerics.hpp"

#include <span>
#include <string>
#include <vector>

namespace rpnsel {

// Subcarrier-averaged capacity of an antenna subset with uniform power.
// n_ts_override replaces the N_TS that enters the power scaling (used by the
// neighbourhood guard in global-count mode); by default N_TS = |selection|.
// With uniform P the objective reduces to log2 det(I + (rho/N_TS) H_c H_c^H),
// evaluated here by adjusting rho so the sum_capacity contract (row count ==
// n_selected) holds for any override. Each call is accounted to the ledger
// when one is supplied.
inline double selection_objective(const ChannelTensor& h, std::span<const int> selection,
                                  double rho, FlopLedger* ledger = nullptr,
                                  const std::string& algorithm = "", const std::string& phase = "",
                                  int n_ts_override = 0) {
    if (selection.empty()) return 0.0;
    const int rows = static_cast<int>(selection.size());
    const int n_ts = n_ts_override > 0 ? n_ts_override : rows;
    const SnrConfig snr(rho * rows / static_cast<double>(n_ts), rows, h.n_users());
    const PowerAllocation p = PowerAllocation::uniform(h.n_users());

    double acc = 0.0;
    for (int k = 0; k < h.n_subcarriers(); ++k)
        acc += sum_capacity(h.submatrix(k, selection), p, snr);
    if (ledger)
        ledger->record_capacity_eval(algorithm.empty() ? "unattributed" : algorithm,
                                     phase.empty() ? "objective" : phase, rows, h.n_users(),
                                     h.n_subcarriers());
    return acc / h.n_subcarriers();
}

// Post-ZF water-filled rate of a selection, averaged over subcarriers with
// per-subcarrier water filling. Rank-deficient subcarriers fall back to
// uniform power and clear the feasibility flag; selections smaller than the
// user count are ZF-infeasible outright.
struct ZfRateResult {
    double rate = 0.0;
    bool feasible = true;
};

inline ZfRateResult zf_waterfilled_rate(const ChannelTensor& h, std::span<const int> selection,
                                        double rho) {
    ZfRateResult out;
    if (static_cast<int>(selection.size()) < h.n_users()) {
        out.feasible = false;
        return out;
    }
    const SnrConfig snr(rho, static_cast<int>(selection.size()), h.n_users());
    double acc = 0.0;
    for (int k = 0; k < h.n_subcarriers(); ++k) {
        const ComplexMatrix h_c = h.submatrix(k, selection);
        try {
            const std::vector<double> gains = zf_gains(h_c, snr);
            const PowerAllocation p = waterfill_gains(gains, snr.power_scale());
            double rate = 0.0;
            for (std::size_t i = 0; i < gains.size(); ++i)
                rate += std::log2(1.0 + snr.power_scale() * p.weights[i] * gains[i]);
            acc += rate;
        } catch (const std::domain_error&) {
            out.feasible = false;
            acc += sum_capacity(h_c, PowerAllocation::uniform(h.n_users()), snr);
        }
    }
    out.rate = acc / h.n_subcarriers();
    return out;
}

}  // namespace rpnsel
