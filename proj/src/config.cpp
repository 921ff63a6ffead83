#include "mgdm/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mgdm {

namespace {

using nlohmann::json;

// +/-inf round-trips as a string since JSON has no infinity literal
json num_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double parse_num_or_inf(const json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("field '" + field + "': expected a number or \"inf\"/\"-inf\"");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) j.at(key).get_to(out);
}

void read_inf(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = parse_num_or_inf(j.at(key), key);
}

}  // namespace

LpMode default_port_mode(int m) {
  switch (m) {
    case 3: return parse_mode("LP01");
    case 4: return parse_mode("LP11a");
    case 5: return parse_mode("LP02");
    case 6: return parse_mode("LP31a");
    default: return enumerate_group(m).members.front();
  }
}

void RunConfig::validate() const {
  try {
    fiber.validate();
    if (!mux.ports.empty()) mux.validate();
    crosstalk.validate();
    tx.validate();
    if (capture.scope_rate != 0.0) capture.validate();
    else if (capture.total_samples <= 0 || capture.electrical_noise_sigma < 0)
      throw std::invalid_argument("capture: invalid total_samples or noise sigma");
    fec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (channels.empty()) throw ConfigError("channels must be nonempty");
  std::set<int> seen;
  for (int m : channels) {
    if (m < 3) throw ConfigError("channels: group orders must be >= 3");
    if (!seen.insert(m).second) throw ConfigError("channels must be distinct");
  }
  if (channels.size() > 4) throw ConfigError("at most 4 channels (one per delay line)");
  if (!mux.ports.empty() && mux.ports.size() != channels.size())
    throw ConfigError("mux.ports must match channels in length (or be empty for defaults)");
  if (sequences < 0) throw ConfigError("sequences must be >= 0");
  if (!(osnr_db > 0)) throw ConfigError("osnr_db must be positive (or \"inf\")");
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  RunConfig c;
  try {
    if (j.contains("fiber")) {
      const json& f = j["fiber"];
      read(f, "a", c.fiber.a);
      read(f, "n1", c.fiber.n1);
      read(f, "delta", c.fiber.delta);
      read(f, "alpha", c.fiber.alpha);
      read(f, "L", c.fiber.L);
      read(f, "lambda", c.fiber.lambda);
      read(f, "epsilon", c.fiber.epsilon);
    }
    if (j.contains("mux")) {
      const json& m = j["mux"];
      if (m.contains("ports")) {
        c.mux.ports.clear();
        for (const auto& p : m["ports"]) c.mux.ports.push_back(parse_mode(p.get<std::string>()));
      }
      read_inf(m, "selectivity_db", c.mux.selectivity_db);
      read(m, "insertion_loss_db", c.mux.insertion_loss_db);
      read(m, "seed", c.mux.seed);
    }
    if (j.contains("crosstalk")) {
      const json& x = j["crosstalk"];
      read_inf(x, "xt_db", c.crosstalk.xt_db);
      read(x, "drift_sigma", c.crosstalk.drift_sigma);
      read(x, "random_walk", c.crosstalk.random_walk);
      read(x, "seed", c.crosstalk.seed);
    }
    if (j.contains("tx")) {
      const json& t = j["tx"];
      read(t, "bit_rate", c.tx.bit_rate);
      read(t, "samples_per_bit", c.tx.samples_per_bit);
      read(t, "prbs_order", c.tx.prbs_order);
      if (t.contains("port_delay_bits")) {
        const auto v = t["port_delay_bits"].get<std::vector<int>>();
        if (v.size() != 4) throw ConfigError("tx.port_delay_bits must list 4 delays");
        std::copy(v.begin(), v.end(), c.tx.port_delay_bits.begin());
      }
      read(t, "rise_time_bits", c.tx.rise_time_bits);
      read(t, "extinction_db", c.tx.extinction_db);
    }
    if (j.contains("capture")) {
      const json& s = j["capture"];
      read(s, "scope_rate", c.capture.scope_rate);
      read(s, "total_samples", c.capture.total_samples);
      read(s, "electrical_noise_sigma", c.capture.electrical_noise_sigma);
    }
    if (j.contains("fec")) {
      const json& f = j["fec"];
      read(f, "n", c.fec.n);
      read(f, "k", c.fec.k);
      read(f, "b", c.fec.b);
    }
    read(j, "channels", c.channels);
    read(j, "sequences", c.sequences);
    read(j, "master_seed", c.master_seed);
    read_inf(j, "osnr_db", c.osnr_db);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config error: ") + e.what());
  }

  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
  json j;
  j["fiber"] = {{"a", c.fiber.a},         {"n1", c.fiber.n1},
                {"delta", c.fiber.delta}, {"alpha", c.fiber.alpha},
                {"L", c.fiber.L},         {"lambda", c.fiber.lambda},
                {"epsilon", c.fiber.epsilon}};
  json ports = json::array();
  for (const LpMode& p : c.mux.ports) ports.push_back(to_string(p));
  j["mux"] = {{"ports", ports},
              {"selectivity_db", num_or_inf(c.mux.selectivity_db)},
              {"insertion_loss_db", c.mux.insertion_loss_db},
              {"seed", c.mux.seed}};
  j["crosstalk"] = {{"xt_db", num_or_inf(c.crosstalk.xt_db)},
                    {"drift_sigma", c.crosstalk.drift_sigma},
                    {"random_walk", c.crosstalk.random_walk},
                    {"seed", c.crosstalk.seed}};
  j["tx"] = {{"bit_rate", c.tx.bit_rate},
             {"samples_per_bit", c.tx.samples_per_bit},
             {"prbs_order", c.tx.prbs_order},
             {"port_delay_bits", c.tx.port_delay_bits},
             {"rise_time_bits", c.tx.rise_time_bits},
             {"extinction_db", c.tx.extinction_db}};
  j["capture"] = {{"scope_rate", c.capture.scope_rate},
                  {"total_samples", c.capture.total_samples},
                  {"electrical_noise_sigma", c.capture.electrical_noise_sigma}};
  j["fec"] = {{"n", c.fec.n}, {"k", c.fec.k}, {"b", c.fec.b}};
  j["channels"] = c.channels;
  j["sequences"] = c.sequences;
  j["master_seed"] = c.master_seed;
  j["osnr_db"] = num_or_inf(c.osnr_db);
  return j.dump(2) + "\n";
}

}  // namespace mgdm
