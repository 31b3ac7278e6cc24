#include "fcvi/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fcvi {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Parser {
  std::string source;
  std::size_t line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(source + ":" + std::to_string(line_no) + ": " + msg);
  }

  double to_double(const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      const double x = std::stod(v, &pos);
      if (pos != v.size()) fail("invalid number for '" + key + "': " + v);
      return x;
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      fail("invalid number for '" + key + "': " + v);
    }
  }

  long long to_int(const std::string& key, const std::string& v) const {
    try {
      std::size_t pos = 0;
      const long long x = std::stoll(v, &pos);
      if (pos != v.size()) fail("invalid integer for '" + key + "': " + v);
      return x;
    } catch (const ConfigError&) {
      throw;
    } catch (...) {
      fail("invalid integer for '" + key + "': " + v);
    }
  }

  std::size_t to_size(const std::string& key, const std::string& v) const {
    const long long x = to_int(key, v);
    if (x < 0) fail("'" + key + "' must be nonnegative");
    return static_cast<std::size_t>(x);
  }

  bool to_bool(const std::string& key, const std::string& v) const {
    if (v == "true") return true;
    if (v == "false") return false;
    fail("invalid boolean for '" + key + "' (use true/false): " + v);
  }
};

}  // namespace

ParsedConfig parse_config_text(const std::string& text,
                               const std::string& source_name) {
  ParsedConfig cfg;
  ScenarioSchedule& sch = cfg.schedule;
  sch.sample_rounds.clear();
  sch.clients.clear();

  Parser p{source_name};
  std::string section;
  ClientSpec* client = nullptr;
  bool sample_rounds_set = false;
  bool modes_set = false, seeds_set = false;
  // Per-client totals given via `counts`; resolved against beta at the end.
  std::vector<std::vector<std::size_t>> client_totals;

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++p.line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      client = nullptr;
      if (section.rfind("client", 0) == 0) {
        const std::string idpart = trim(section.substr(6));
        if (idpart.empty()) p.fail("client section needs an id: [client <id>]");
        ClientSpec spec;
        spec.id = static_cast<int>(p.to_int("client id", idpart));
        spec.leave_round = 0;  // resolved to rounds+1 below when unset
        sch.clients.push_back(spec);
        client = &sch.clients.back();
        client_totals.emplace_back();
        section = "client";
      } else if (section != "scenario" && section != "train" &&
                 section != "monitor" && section != "selftrain" &&
                 section != "aggregation" && section != "report" &&
                 section != "run") {
        p.fail("unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    if (section.empty()) p.fail("key '" + key + "' outside any section");

    if (section == "scenario") {
      if (key == "name") sch.name = value;
      else if (key == "rounds") sch.total_rounds = p.to_size(key, value);
      else if (key == "classes") sch.num_classes = p.to_size(key, value);
      else if (key == "feature_dim") sch.feature_dim = p.to_size(key, value);
      else if (key == "hidden_units") sch.hidden_units = p.to_size(key, value);
      else if (key == "sigma") sch.sigma = p.to_double(key, value);
      else if (key == "mean_scale") sch.mean_scale = p.to_double(key, value);
      else if (key == "beta") sch.beta = p.to_double(key, value);
      else if (key == "test_per_class") sch.test_per_class = p.to_size(key, value);
      else p.fail("unknown key '" + key + "' in [scenario]");
    } else if (section == "train") {
      if (key == "learning_rate") sch.train.learning_rate = p.to_double(key, value);
      else if (key == "batch_size") sch.train.batch_size = p.to_size(key, value);
      else if (key == "local_epochs") sch.train.local_epochs = p.to_size(key, value);
      else p.fail("unknown key '" + key + "' in [train]");
    } else if (section == "monitor") {
      if (key == "eps_zero") sch.eps_zero = p.to_double(key, value);
      else if (key == "eps_steady") sch.eps_steady = p.to_double(key, value);
      else if (key == "eps_denominator_scale")
        sch.eps_denominator_scale = p.to_double(key, value);
      else if (key == "every_round") sch.monitor_every_round = p.to_bool(key, value);
      else p.fail("unknown key '" + key + "' in [monitor]");
    } else if (section == "selftrain") {
      if (key == "tau") sch.selftrain.tau = p.to_double(key, value);
      else if (key == "max_iters") sch.selftrain.max_iters = p.to_size(key, value);
      else if (key == "consume_selected")
        sch.selftrain.consume_selected = p.to_bool(key, value);
      else p.fail("unknown key '" + key + "' in [selftrain]");
    } else if (section == "aggregation") {
      if (key == "mode") {
        if (value == "uniform") sch.aggregation = AggregationMode::Uniform;
        else if (value == "proportional")
          sch.aggregation = AggregationMode::ProportionalToLabeledSize;
        else p.fail("aggregation.mode must be 'uniform' or 'proportional'");
      } else {
        p.fail("unknown key '" + key + "' in [aggregation]");
      }
    } else if (section == "report") {
      if (key == "sample_rounds") {
        sch.sample_rounds.clear();
        for (const auto& item : split_list(value))
          sch.sample_rounds.push_back(p.to_size(key, item));
        sample_rounds_set = true;
      } else {
        p.fail("unknown key '" + key + "' in [report]");
      }
    } else if (section == "run") {
      if (key == "modes") {
        cfg.modes.clear();
        for (const auto& item : split_list(value)) {
          try {
            cfg.modes.push_back(mode_from_string(item));
          } catch (const std::invalid_argument& e) {
            p.fail(e.what());
          }
        }
        modes_set = true;
      } else if (key == "seeds") {
        cfg.seeds.clear();
        for (const auto& item : split_list(value))
          cfg.seeds.push_back(static_cast<std::uint64_t>(p.to_int(key, item)));
        seeds_set = true;
      } else {
        p.fail("unknown key '" + key + "' in [run]");
      }
    } else if (section == "client") {
      if (client == nullptr) p.fail("internal: no current client");
      if (key == "join") client->join_round = p.to_size(key, value);
      else if (key == "leave") client->leave_round = p.to_size(key, value);
      else if (key == "counts") {
        client_totals.back().clear();
        for (const auto& item : split_list(value))
          client_totals.back().push_back(p.to_size(key, item));
      } else if (key == "labeled_counts") {
        client->labeled_counts.clear();
        for (const auto& item : split_list(value))
          client->labeled_counts.push_back(p.to_size(key, item));
      } else if (key == "unlabeled_counts") {
        client->unlabeled_counts.clear();
        for (const auto& item : split_list(value))
          client->unlabeled_counts.push_back(p.to_size(key, item));
      } else {
        p.fail("unknown key '" + key + "' in [client]");
      }
    }
  }

  p.line_no = 0;
  for (std::size_t i = 0; i < sch.clients.size(); ++i) {
    ClientSpec& c = sch.clients[i];
    if (c.leave_round == 0) c.leave_round = sch.total_rounds + 1;
    const std::string who = "[client " + std::to_string(c.id) + "]";
    const bool have_totals = i < client_totals.size() && !client_totals[i].empty();
    const bool have_pools = !c.labeled_counts.empty() || !c.unlabeled_counts.empty();
    if (have_totals && have_pools)
      throw ConfigError(source_name + ": " + who +
                        " must use either 'counts' or explicit "
                        "'labeled_counts'/'unlabeled_counts', not both");
    if (have_totals) {
      c.labeled_counts = stratified_labeled_counts(client_totals[i], sch.beta);
      c.unlabeled_counts.resize(client_totals[i].size());
      for (std::size_t l = 0; l < client_totals[i].size(); ++l)
        c.unlabeled_counts[l] = client_totals[i][l] - c.labeled_counts[l];
    } else if (have_pools) {
      if (c.labeled_counts.empty())
        c.labeled_counts.assign(c.unlabeled_counts.size(), 0);
      if (c.unlabeled_counts.empty())
        c.unlabeled_counts.assign(c.labeled_counts.size(), 0);
    } else {
      throw ConfigError(source_name + ": missing key 'counts' for " + who);
    }
  }
  if (!sample_rounds_set) sch.sample_rounds = sch.default_sample_rounds();
  if (!modes_set) cfg.modes = {Mode::Fcvi, Mode::FedavgSupervised};
  if (!seeds_set) cfg.seeds = {1};
  if (cfg.modes.empty()) throw ConfigError(source_name + ": run.modes must list at least one mode");
  if (cfg.seeds.empty()) throw ConfigError(source_name + ": run.seeds must list at least one seed");

  try {
    sch.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source_name + ": " + e.what());
  }
  return cfg;
}

ParsedConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.filename().string());
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

}  // namespace

std::string render_config(const ParsedConfig& cfg) {
  const ScenarioSchedule& s = cfg.schedule;
  std::ostringstream o;
  o << "[scenario]\n"
    << "name = " << s.name << "\n"
    << "rounds = " << s.total_rounds << "\n"
    << "classes = " << s.num_classes << "\n"
    << "feature_dim = " << s.feature_dim << "\n"
    << "hidden_units = " << s.hidden_units << "\n"
    << "sigma = " << format_double(s.sigma) << "\n"
    << "mean_scale = " << format_double(s.mean_scale) << "\n"
    << "beta = " << format_double(s.beta) << "\n"
    << "test_per_class = " << s.test_per_class << "\n\n";
  o << "[train]\n"
    << "learning_rate = " << format_double(s.train.learning_rate) << "\n"
    << "batch_size = " << s.train.batch_size << "\n"
    << "local_epochs = " << s.train.local_epochs << "\n\n";
  o << "[monitor]\n"
    << "eps_zero = " << format_double(s.eps_zero) << "\n"
    << "eps_steady = " << format_double(s.eps_steady) << "\n"
    << "eps_denominator_scale = " << format_double(s.eps_denominator_scale) << "\n"
    << "every_round = " << (s.monitor_every_round ? "true" : "false") << "\n\n";
  o << "[selftrain]\n"
    << "tau = " << format_double(s.selftrain.tau) << "\n"
    << "max_iters = " << s.selftrain.max_iters << "\n"
    << "consume_selected = " << (s.selftrain.consume_selected ? "true" : "false")
    << "\n\n";
  o << "[aggregation]\n"
    << "mode = "
    << (s.aggregation == AggregationMode::Uniform ? "uniform" : "proportional")
    << "\n\n";
  o << "[report]\n"
    << "sample_rounds = " << join(s.sample_rounds) << "\n\n";
  o << "[run]\n"
    << "modes = ";
  for (std::size_t i = 0; i < cfg.modes.size(); ++i) {
    if (i) o << ",";
    o << to_string(cfg.modes[i]);
  }
  o << "\nseeds = " << join(cfg.seeds) << "\n";
  for (const auto& c : s.clients) {
    o << "\n[client " << c.id << "]\n"
      << "join = " << c.join_round << "\n"
      << "leave = " << c.leave_round << "\n"
      << "labeled_counts = " << join(c.labeled_counts) << "\n"
      << "unlabeled_counts = " << join(c.unlabeled_counts) << "\n";
  }
  return o.str();
}

}  // namespace fcvi
