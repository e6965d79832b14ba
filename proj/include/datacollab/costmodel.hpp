#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "datacollab/alignment.hpp"

namespace dc {

/// Inputs of the analytic traffic / break-even / transfer-time models.
/// bits_per_scalar is a modeling parameter only; it never changes compute
/// precision anywhere in the library.
struct CostParams {
  std::int64_t anchor_rows = 0;      // a
  std::int64_t feature_dim = 0;      // m
  std::int64_t latent_dim = 0;       // l
  std::int64_t users = 0;            // c
  double mean_samples = 0.0;         // n_bar
  double model_params = 0.0;         // N
  std::int64_t bits_per_scalar = 0;  // q
  double gamma = 0.0;                // anchor replication factor, >= 0
  double rounds = 0.0;               // R
  double participation = 1.0;        // p in (0,1]
  double goodput_bps = 0.0;          // beta, bits/s
  double rtt_seconds = 0.0;          // tau

  void validate() const;
  static CostParams from_json(const std::string& json_text);
  std::string to_json() const;
};

/// Additive FLOP terms; total is always the exact sum of the terms.
/// pmin/qmax are min/max of {a, c*l} (the FLOP-analysis p and q, distinct
/// from the traffic model's bit width).
struct FlopBreakdown {
  AlignMethod method;
  double total = 0.0;
  std::vector<std::pair<std::string, double>> terms;
  double pmin = 0.0;
  double qmax = 0.0;
};

FlopBreakdown flops_imakura(std::int64_t a, std::int64_t l, std::int64_t c);
FlopBreakdown flops_kawakami(std::int64_t a, std::int64_t l, std::int64_t c);
FlopBreakdown flops_odc(std::int64_t a, std::int64_t l, std::int64_t c);

/// Leading-term peak memory in scalar counts.
double peak_mem(AlignMethod method, std::int64_t a, std::int64_t l, std::int64_t c);

struct TrafficBreakdown {
  double uplink_bytes = 0.0;
  double downlink_bytes = 0.0;
  double anchor_bytes = 0.0;
  double total_bytes = 0.0;
};

/// One-shot DC traffic: (q/8) [ c((n_bar + a) l + l^2 + N) + gamma a m ].
TrafficBreakdown dc_traffic(const CostParams& p);

/// Cumulative FL traffic: 2 R p c N q / 8.
double fl_traffic(const CostParams& p);

/// FL rounds at which cumulative FL traffic equals one-shot DC traffic;
/// exactly independent of the bit width.
double break_even_rounds(const CostParams& p);

enum class TransferKind { DC, FL };

/// Engineering estimate: payload over the bottleneck plus per-phase RTTs
/// (3 for DC's three phases, 2 per FL round).
double transfer_time(const CostParams& p, TransferKind which);

/// Full JSON report (totals, breakdowns, R*, decimal-GB strings) consumed
/// by the `cost` CLI subcommand.
std::string cost_report_json(const CostParams& p);

}  // namespace dc
