#include "fblock/json_io.hpp"

#include <cmath>
#include <stdexcept>

namespace fblock {

namespace {

std::vector<double> to_vector(std::span<const double> v) { return {v.begin(), v.end()}; }

// JSON has no infinity; unbounded values are written as null.
Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const ChannelSpec& spec) {
  return Json{{"noise", to_vector(spec.noise())}, {"power", spec.power()}};
}

ChannelSpec channel_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("noise") || !j.contains("power")) {
    throw std::invalid_argument("channel JSON needs \"noise\" and \"power\"");
  }
  return ChannelSpec(j.at("noise").get<std::vector<double>>(), j.at("power").get<double>());
}

Json to_json(const WaterfillResult& wf) {
  return Json{{"lambda", wf.lambda}, {"pstar", to_vector(wf.pstar.values())}, {"mu", wf.mu}};
}

Json to_json(const EncoderConfig& config) {
  Json j{{"name", config.name},
         {"block_length", config.block_length},
         {"message_count", config.message_count},
         {"codebook_seed", config.codebook_seed}};
  if (config.allocation) j["allocation"] = to_vector(config.allocation->values());
  return j;
}

EncoderConfig encoder_config_from_json(const Json& j) {
  EncoderConfig c;
  if (!j.is_object()) throw std::invalid_argument("encoder config must be a JSON object");
  if (j.contains("name")) c.name = j.at("name").get<std::string>();
  if (j.contains("block_length")) c.block_length = j.at("block_length").get<std::size_t>();
  if (j.contains("message_count")) c.message_count = j.at("message_count").get<std::uint64_t>();
  if (j.contains("codebook_seed")) c.codebook_seed = j.at("codebook_seed").get<std::uint64_t>();
  if (j.contains("allocation")) c.allocation = PowerAllocation(j.at("allocation").get<std::vector<double>>());
  return c;
}

Json to_json(const MgfEstimate& est) {
  return Json{{"mean", number(est.mean)},
              {"std_error", number(est.std_error)},
              {"log_mean", number(est.log_mean)},
              {"trials", est.trials}};
}

Json to_json(const ConverseReport& r) {
  const double ln2 = std::log(2.0);
  Json j{{"n", r.n},
         {"eps", r.eps},
         {"tau", r.tau},
         {"exact_cardinality", r.exact_cardinality},
         {"log_m_bound_nats", r.log_m_bound},
         {"log_m_bound_bits", r.log_m_bound_bits},
         {"first_order_nats", r.first_order},
         {"second_order_nats", r.second_order},
         {"second_order_bits", r.second_order / ln2},
         {"second_order_limit_nats", r.second_order_limit},
         {"far_term_bound", number(r.far_term_bound)},
         {"n0", number(r.n0)},
         {"far_term_valid", r.far_term_valid}};
  if (r.near_term) {
    j["near_term"] = Json{{"estimate", r.near_term->value}, {"std_error", r.near_term->std_error},
                          {"trials", r.near_term->trials}};
  }
  return j;
}

}  // namespace fblock
