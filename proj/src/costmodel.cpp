#include "datacollab/costmodel.hpp"

#include <cmath>

#include "json.hpp"

namespace dc {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw ValidationError(std::string("cost params: ") + what);
}

std::pair<double, double> pmin_qmax(std::int64_t a, std::int64_t l, std::int64_t c) {
  const double cl = static_cast<double>(c) * static_cast<double>(l);
  const double av = static_cast<double>(a);
  return {std::min(av, cl), std::max(av, cl)};
}

void check_flop_dims(std::int64_t a, std::int64_t l, std::int64_t c) {
  if (l < 1 || c < 1 || a <= l)
    throw ValidationError("flop model: requires a > l >= 1 and c >= 1");
}

double sum_terms(FlopBreakdown& b) {
  double total = 0.0;
  for (const auto& [name, value] : b.terms) total += value;
  return total;
}

std::string gb_decimal(double bytes) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f GB", bytes / 1e9);
  return buf;
}

}  // namespace

void CostParams::validate() const {
  require(anchor_rows >= 1, "anchor_rows must be >= 1");
  require(feature_dim >= 1, "feature_dim must be >= 1");
  require(latent_dim >= 1, "latent_dim must be >= 1");
  require(users >= 1, "users must be >= 1");
  require(mean_samples > 0.0, "mean_samples must be > 0");
  require(model_params > 0.0, "model_params must be > 0");
  require(bits_per_scalar >= 1, "bits_per_scalar must be >= 1");
  require(gamma >= 0.0, "gamma must be >= 0");
  require(rounds >= 0.0, "rounds must be >= 0");
  require(participation > 0.0 && participation <= 1.0, "participation must be in (0,1]");
  require(goodput_bps > 0.0, "goodput_bps must be > 0");
  require(rtt_seconds >= 0.0, "rtt_seconds must be >= 0");
}

CostParams CostParams::from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("cost params JSON: ") + e.what());
  }
  CostParams p;
  try {
    p.anchor_rows = j.at("a").get<std::int64_t>();
    p.feature_dim = j.at("m").get<std::int64_t>();
    p.latent_dim = j.at("l").get<std::int64_t>();
    p.users = j.at("c").get<std::int64_t>();
    p.mean_samples = j.at("n_bar").get<double>();
    p.model_params = j.at("N").get<double>();
    p.bits_per_scalar = j.at("q").get<std::int64_t>();
    p.gamma = j.at("gamma").get<double>();
    p.rounds = j.value("R", 1.0);
    p.participation = j.value("p", 1.0);
    p.goodput_bps = j.value("beta", 1e9);
    p.rtt_seconds = j.value("tau", 0.0);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("cost params JSON: ") + e.what());
  }
  p.validate();
  return p;
}

std::string CostParams::to_json() const {
  nlohmann::json j;
  j["a"] = anchor_rows;
  j["m"] = feature_dim;
  j["l"] = latent_dim;
  j["c"] = users;
  j["n_bar"] = mean_samples;
  j["N"] = model_params;
  j["q"] = bits_per_scalar;
  j["gamma"] = gamma;
  j["R"] = rounds;
  j["p"] = participation;
  j["beta"] = goodput_bps;
  j["tau"] = rtt_seconds;
  return j.dump(2);
}

FlopBreakdown flops_imakura(std::int64_t a, std::int64_t l, std::int64_t c) {
  check_flop_dims(a, l, c);
  const auto [p, q] = pmin_qmax(a, l, c);
  const double av = static_cast<double>(a), lv = static_cast<double>(l),
               cv = static_cast<double>(c);
  FlopBreakdown b;
  b.method = AlignMethod::Imakura;
  b.pmin = p;
  b.qmax = q;
  b.terms = {
      {"concat_svd_4qp2", 4.0 * q * p * p},
      {"concat_svd_8p3", 8.0 * p * p * p},
      {"target_product", 2.0 * av * lv * lv},
      {"per_user_pinv_fit", cv * (6.0 * av * lv * lv + 8.0 * lv * lv * lv)},
  };
  b.total = sum_terms(b);
  return b;
}

FlopBreakdown flops_kawakami(std::int64_t a, std::int64_t l, std::int64_t c) {
  check_flop_dims(a, l, c);
  const auto [p, q] = pmin_qmax(a, l, c);
  const double av = static_cast<double>(a), lv = static_cast<double>(l),
               cv = static_cast<double>(c);
  FlopBreakdown b;
  b.method = AlignMethod::Kawakami;
  b.pmin = p;
  b.qmax = q;
  b.terms = {
      {"per_user_qr", cv * (2.0 * av * lv * lv - (2.0 / 3.0) * lv * lv * lv)},
      {"concat_svd_4qp2", 4.0 * q * p * p},
      {"concat_svd_8p3", 8.0 * p * p * p},
      {"column_recovery", cv * (4.0 / 3.0) * lv * lv * lv},
  };
  b.total = sum_terms(b);
  return b;
}

FlopBreakdown flops_odc(std::int64_t a, std::int64_t l, std::int64_t c) {
  check_flop_dims(a, l, c);
  const auto [p, q] = pmin_qmax(a, l, c);
  const double av = static_cast<double>(a), lv = static_cast<double>(l),
               cv = static_cast<double>(c);
  FlopBreakdown b;
  b.method = AlignMethod::ODC;
  b.pmin = p;
  b.qmax = q;
  b.terms = {
      {"cross_products", cv * 2.0 * av * lv * lv},
      {"target_products", cv * 2.0 * lv * lv * lv},
      {"small_svds", cv * 12.0 * lv * lv * lv},
      {"polar_products", cv * 2.0 * lv * lv * lv},
  };
  b.total = sum_terms(b);
  return b;
}

double peak_mem(AlignMethod method, std::int64_t a, std::int64_t l, std::int64_t c) {
  check_flop_dims(a, l, c);
  const double av = static_cast<double>(a), lv = static_cast<double>(l),
               cv = static_cast<double>(c);
  const double concat = av * cv * lv;
  switch (method) {
    case AlignMethod::Imakura: return concat + av * lv + cv * lv * lv;
    case AlignMethod::Kawakami: return concat + cv * lv * lv;
    case AlignMethod::ODC: return concat + cv * lv * lv + 2.0 * lv * lv;
  }
  throw ValidationError("peak_mem: unknown method");
}

TrafficBreakdown dc_traffic(const CostParams& p) {
  p.validate();
  const double q8 = static_cast<double>(p.bits_per_scalar) / 8.0;
  const double c = static_cast<double>(p.users);
  const double a = static_cast<double>(p.anchor_rows);
  const double m = static_cast<double>(p.feature_dim);
  const double l = static_cast<double>(p.latent_dim);
  TrafficBreakdown t;
  t.uplink_bytes = q8 * c * (p.mean_samples + a) * l;
  t.downlink_bytes = q8 * c * (l * l + p.model_params);
  t.anchor_bytes = q8 * p.gamma * a * m;
  t.total_bytes = t.uplink_bytes + t.downlink_bytes + t.anchor_bytes;
  return t;
}

double fl_traffic(const CostParams& p) {
  p.validate();
  return 2.0 * p.rounds * p.participation * static_cast<double>(p.users) * p.model_params *
         static_cast<double>(p.bits_per_scalar) / 8.0;
}

double break_even_rounds(const CostParams& p) {
  p.validate();
  const double a = static_cast<double>(p.anchor_rows);
  const double m = static_cast<double>(p.feature_dim);
  const double l = static_cast<double>(p.latent_dim);
  const double c = static_cast<double>(p.users);
  const double n = p.model_params;
  // The bit width cancels exactly; q never appears below.
  return (p.mean_samples + a) * l / (2.0 * p.participation * n) +
         (l * l + n) / (2.0 * p.participation * n) +
         p.gamma * a * m / (2.0 * p.participation * c * n);
}

double transfer_time(const CostParams& p, TransferKind which) {
  p.validate();
  if (which == TransferKind::DC)
    return 8.0 * dc_traffic(p).total_bytes / p.goodput_bps + 3.0 * p.rtt_seconds;
  return 8.0 * fl_traffic(p) / p.goodput_bps + 2.0 * p.rounds * p.rtt_seconds;
}

std::string cost_report_json(const CostParams& p) {
  const TrafficBreakdown dc_bytes = dc_traffic(p);
  const double fl_bytes = fl_traffic(p);
  const double r_star = break_even_rounds(p);

  nlohmann::json j;
  j["params"] = nlohmann::json::parse(p.to_json());
  j["dc_traffic"] = {
      {"uplink_bytes", dc_bytes.uplink_bytes},
      {"downlink_bytes", dc_bytes.downlink_bytes},
      {"anchor_bytes", dc_bytes.anchor_bytes},
      {"total_bytes", dc_bytes.total_bytes},
      {"total_gb", gb_decimal(dc_bytes.total_bytes)},
  };
  j["fl_traffic"] = {
      {"total_bytes", fl_bytes},
      {"total_gb", gb_decimal(fl_bytes)},
  };
  j["break_even_rounds"] = r_star;
  j["break_even_rounds_ceil"] = std::ceil(r_star);
  j["transfer_time_s"] = {
      {"dc", transfer_time(p, TransferKind::DC)},
      {"fl", transfer_time(p, TransferKind::FL)},
  };

  for (const auto& [name, fn] : {
           std::pair<const char*, FlopBreakdown (*)(std::int64_t, std::int64_t, std::int64_t)>{
               "imakura", flops_imakura},
           {"kawakami", flops_kawakami},
           {"odc", flops_odc},
       }) {
    const FlopBreakdown b = fn(p.anchor_rows, p.latent_dim, p.users);
    nlohmann::json terms = nlohmann::json::object();
    for (const auto& [term, value] : b.terms) terms[term] = value;
    j["flops"][name] = {{"total", b.total}, {"terms", terms}};
    j["peak_memory_scalars"][name] =
        peak_mem(b.method, p.anchor_rows, p.latent_dim, p.users);
  }
  return j.dump(2);
}

}  // namespace dc
