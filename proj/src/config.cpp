#include "fedsae/config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "fedsae/errors.hpp"

namespace fedsae {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("bad value for '" + key + "': '" + text + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("bad boolean for '" + key + "': '" + text + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : split_list(text)) out.push_back(parse_value<int>("list", item));
  if (out.empty()) throw ConfigError("empty list: '" + text + "'");
  return out;
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

RunConfig config_from_key_values(const KeyValues& kv) {
  RunConfig c;
  auto& ds = c.dataset;
  auto& syn = ds.synthetic;
  auto& ex = c.experiment;

  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"dataset", [&](auto&, auto& v) {
         if (v != "synthetic" && v != "csv") throw ConfigError("dataset must be synthetic or csv");
         ds.kind = v;
       }},
      {"synthetic_alpha", [&](auto& k, auto& v) { syn.alpha = parse_value<double>(k, v); }},
      {"synthetic_beta", [&](auto& k, auto& v) { syn.beta = parse_value<double>(k, v); }},
      {"num_clients", [&](auto& k, auto& v) { syn.num_clients = parse_value<int>(k, v); }},
      {"dim", [&](auto& k, auto& v) { syn.dim = parse_value<int>(k, v); }},
      {"num_classes", [&](auto& k, auto& v) { syn.num_classes = parse_value<int>(k, v); }},
      {"total_samples", [&](auto& k, auto& v) { syn.total_samples = parse_value<long>(k, v); }},
      {"power_law_exponent", [&](auto& k, auto& v) { syn.power_law_exponent = parse_value<double>(k, v); }},
      {"csv_path", [&](auto&, auto& v) { ds.csv_path = v; }},
      {"label_column", [&](auto&, auto& v) { ds.label_column = v; }},
      {"classes_per_client", [&](auto& k, auto& v) { ds.classes_per_client = parse_value<int>(k, v); }},
      {"algorithms", [&](auto&, auto& v) {
         c.algorithms.clear();
         for (const std::string& name : split_list(v)) c.algorithms.push_back(parse_algorithm(name));
         if (c.algorithms.empty()) throw ConfigError("algorithms must not be empty");
       }},
      {"rounds", [&](auto& k, auto& v) { ex.rounds = parse_value<int>(k, v); }},
      {"clients_per_round", [&](auto& k, auto& v) { ex.clients_per_round = parse_value<int>(k, v); }},
      {"fixed_epochs", [&](auto& k, auto& v) { ex.fixed_epochs = parse_value<double>(k, v); }},
      {"learning_rate", [&](auto& k, auto& v) { ex.training.learning_rate = parse_value<double>(k, v); }},
      {"batch_size", [&](auto& k, auto& v) { ex.training.batch_size = parse_value<int>(k, v); }},
      {"inverse_ratio", [&](auto& k, auto& v) { ex.predictor.inverse_ratio = parse_value<double>(k, v); }},
      {"gamma1", [&](auto& k, auto& v) { ex.predictor.gamma1 = parse_value<double>(k, v); }},
      {"gamma2", [&](auto& k, auto& v) { ex.predictor.gamma2 = parse_value<double>(k, v); }},
      {"ema_alpha", [&](auto& k, auto& v) { ex.predictor.smoothness = parse_value<double>(k, v); }},
      {"initial_low", [&](auto& k, auto& v) { ex.predictor.initial_low = parse_value<double>(k, v); }},
      {"initial_high", [&](auto& k, auto& v) { ex.predictor.initial_high = parse_value<double>(k, v); }},
      {"fassa_partial_rule", [&](auto&, auto& v) {
         if (v == "declared") {
           ex.predictor.partial_rule = FassaPartialRule::kDeclared;
         } else if (v == "literal") {
           ex.predictor.partial_rule = FassaPartialRule::kLiteral;
         } else {
           throw ConfigError("fassa_partial_rule must be declared or literal");
         }
       }},
      {"selection_beta", [&](auto& k, auto& v) { ex.selection.beta = parse_value<double>(k, v); }},
      {"al_rounds", [&](auto& k, auto& v) { ex.selection.al_rounds = parse_value<int>(k, v); }},
      {"values_from_uploaders_only",
       [&](auto& k, auto& v) { ex.selection.values_from_uploaders_only = parse_bool(k, v); }},
      {"seed", [&](auto& k, auto& v) { ex.seed = parse_value<std::uint64_t>(k, v); }},
      {"threads", [&](auto& k, auto& v) { ex.threads = parse_value<int>(k, v); }},
      {"sweep_algorithm", [&](auto&, auto& v) { c.sweep_algorithm = parse_algorithm(v); }},
      {"sweep_al_rounds", [&](auto&, auto& v) { c.sweep_al_rounds = parse_int_list(v); }},
      {"target_accuracy", [&](auto& k, auto& v) {
         if (v.empty() || v == "none") {
           c.target_accuracy.reset();
         } else {
           c.target_accuracy = parse_value<double>(k, v);
         }
       }},
      {"out_dir", [&](auto&, auto& v) { c.out_dir = v; }},
  };

  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(key, value);
  }
  syn.seed = ex.seed;
  return c;
}

KeyValues to_key_values(const RunConfig& c) {
  const auto& syn = c.dataset.synthetic;
  const auto& ex = c.experiment;
  std::string algorithms;
  for (Algorithm a : c.algorithms) algorithms += (algorithms.empty() ? "" : ",") + to_string(a);
  std::string sweep;
  for (int n : c.sweep_al_rounds) sweep += (sweep.empty() ? "" : ",") + std::to_string(n);

  return {
      {"dataset", c.dataset.kind},
      {"synthetic_alpha", format_double(syn.alpha)},
      {"synthetic_beta", format_double(syn.beta)},
      {"num_clients", std::to_string(syn.num_clients)},
      {"dim", std::to_string(syn.dim)},
      {"num_classes", std::to_string(syn.num_classes)},
      {"total_samples", std::to_string(syn.total_samples)},
      {"power_law_exponent", format_double(syn.power_law_exponent)},
      {"csv_path", c.dataset.csv_path},
      {"label_column", c.dataset.label_column},
      {"classes_per_client", std::to_string(c.dataset.classes_per_client)},
      {"algorithms", algorithms},
      {"rounds", std::to_string(ex.rounds)},
      {"clients_per_round", std::to_string(ex.clients_per_round)},
      {"fixed_epochs", format_double(ex.fixed_epochs)},
      {"learning_rate", format_double(ex.training.learning_rate)},
      {"batch_size", std::to_string(ex.training.batch_size)},
      {"inverse_ratio", format_double(ex.predictor.inverse_ratio)},
      {"gamma1", format_double(ex.predictor.gamma1)},
      {"gamma2", format_double(ex.predictor.gamma2)},
      {"ema_alpha", format_double(ex.predictor.smoothness)},
      {"initial_low", format_double(ex.predictor.initial_low)},
      {"initial_high", format_double(ex.predictor.initial_high)},
      {"fassa_partial_rule",
       ex.predictor.partial_rule == FassaPartialRule::kLiteral ? "literal" : "declared"},
      {"selection_beta", format_double(ex.selection.beta)},
      {"al_rounds", std::to_string(ex.selection.al_rounds)},
      {"values_from_uploaders_only", ex.selection.values_from_uploaders_only ? "true" : "false"},
      {"seed", std::to_string(ex.seed)},
      {"threads", std::to_string(ex.threads)},
      {"sweep_algorithm", to_string(c.sweep_algorithm)},
      {"sweep_al_rounds", sweep},
      {"target_accuracy", c.target_accuracy ? format_double(*c.target_accuracy) : "none"},
      {"out_dir", c.out_dir},
  };
}

RunConfig load_config_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    nlohmann::json manifest;
    try {
      manifest = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("manifest is not valid JSON: " + std::string(e.what()));
    }
    if (!manifest.contains("config") || !manifest["config"].is_object()) {
      throw ConfigError("manifest has no \"config\" object: " + path);
    }
    KeyValues kv;
    for (const auto& [key, value] : manifest["config"].items()) {
      if (!value.is_string()) throw ConfigError("manifest config values must be strings: " + key);
      kv[key] = value.get<std::string>();
    }
    return config_from_key_values(kv);
  }
  return config_from_key_values(parse_key_values(text));
}

}  // namespace fedsae
