#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rtmix/rtmix.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kInput = 3,
  kSettings = 4,
  kNumerical = 5,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(rtmix_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  rtmix_status status;
};

int exit_code(rtmix_status s) {
  switch (s) {
    case RTMIX_OK:
      return kOk;
    case RTMIX_ERR_IO:
    case RTMIX_ERR_FORMAT:
    case RTMIX_ERR_ROW:
      return kInput;
    case RTMIX_ERR_ARGUMENT:
    case RTMIX_ERR_DOMAIN:
    case RTMIX_ERR_INFEASIBLE_SPLIT:
    case RTMIX_ERR_ALIGNMENT:
      return kSettings;
    case RTMIX_ERR_NUMERICAL:
    case RTMIX_ERR_INIT:
    case RTMIX_ERR_FOLD:
      return kNumerical;
    default:
      return kInternal;
  }
}

void check(rtmix_status s) {
  if (s != RTMIX_OK)
    throw ApiError(s, std::string(rtmix_status_name(s)) + ": " + rtmix_last_error());
}

template <class F>
std::string fetch_text(F&& f) {
  size_t len = 0;
  rtmix_status s = f(nullptr, 0, &len);
  if (s != RTMIX_OK && s != RTMIX_ERR_BUFFER) check(s);
  std::vector<char> buf(len + 1);
  check(f(buf.data(), buf.size(), &len));
  return std::string(buf.data(), len);
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Dataset = Handle<rtmix_dataset, rtmix_dataset_free>;
using Folds = Handle<rtmix_folds, rtmix_folds_free>;
using Fit = Handle<rtmix_fit, rtmix_fit_free>;
using Elpd = Handle<rtmix_elpd, rtmix_elpd_free>;
using Comparison = Handle<rtmix_comparison, rtmix_comparison_free>;
using Recovery = Handle<rtmix_recovery, rtmix_recovery_free>;
using Ppc = Handle<rtmix_ppc, rtmix_ppc_free>;

// ---- settings -------------------------------------------------------------

struct Settings {
  std::string command;
  std::string data;
  std::string model;
  std::string out;
  size_t k = 10;
  size_t participants = 37;
  size_t items = 15;
  size_t replicates = 10;
  size_t draws = 200;
  double level = 0.95;
  rtmix_sampler_config sampler{};
  std::map<std::string, double> truth;
};

const std::vector<std::string> kSamplerKeys{"seed",          "chains",       "warmup",
                                            "samples",       "target_accept", "max_leapfrog",
                                            "path_length"};

std::vector<std::string> allowed_keys(const std::string& command) {
  std::vector<std::string> keys;
  if (command == "fit") keys = {"data", "model"};
  if (command == "compare") keys = {"data", "k"};
  if (command == "simulate") keys = {"model", "participants", "items", "seed"};
  if (command == "recover") keys = {"model", "participants", "items", "replicates", "level"};
  if (command == "ppc") keys = {"data", "model", "draws"};
  if (command != "simulate") keys.insert(keys.end(), kSamplerKeys.begin(), kSamplerKeys.end());
  return keys;
}

bool takes_truth(const std::string& command) {
  return command == "simulate" || command == "recover";
}

std::vector<std::string> truth_names(const std::string& model) {
  if (model == "linear") return {"beta0", "beta1", "sigma_e", "sigma_u", "sigma_w"};
  return {"beta", "delta", "p_sr", "p_or", "sigma_e", "sigma_e_prime", "sigma_u", "sigma_w"};
}

std::map<std::string, double> default_truth(const std::string& model) {
  if (model == "linear") {
    rtmix_linear_truth t;
    rtmix_linear_truth_init(&t);
    return {{"beta0", t.beta0},
            {"beta1", t.beta1},
            {"sigma_e", t.sigma_e},
            {"sigma_u", t.sigma_u},
            {"sigma_w", t.sigma_w}};
  }
  rtmix_mixture_truth t;
  rtmix_mixture_truth_init(&t);
  return {{"beta", t.beta},       {"delta", t.delta},
          {"p_sr", t.p_sr},       {"p_or", t.p_or},
          {"sigma_e", t.sigma_e}, {"sigma_e_prime", t.sigma_e_prime},
          {"sigma_u", t.sigma_u}, {"sigma_w", t.sigma_w}};
}

std::string normalize_key(std::string key) {
  for (char& c : key)
    if (c == '-') c = '_';
  return key;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const std::string s = trim(text);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
    throw UsageError("invalid value for " + key + ": '" + text + "'");
  return value;
}

// Values arrive as strings from flags, key=value files and JSON alike.
void apply(Settings& st, const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(raw_key);
  if (key.rfind("truth.", 0) == 0) {
    if (!takes_truth(st.command))
      throw UsageError("'" + key + "' does not apply to " + st.command);
    st.truth[key.substr(6)] = parse_number<double>(key, value);
    return;
  }
  if (key == "command") {
    if (value != st.command)
      throw UsageError("config is for command '" + value + "', not '" + st.command + "'");
    return;
  }
  const auto keys = allowed_keys(st.command);
  if (std::find(keys.begin(), keys.end(), key) == keys.end())
    throw UsageError("unknown setting '" + raw_key + "' for " + st.command);

  if (key == "data") st.data = value;
  else if (key == "model") st.model = value;
  else if (key == "k") st.k = parse_number<size_t>(key, value);
  else if (key == "participants") st.participants = parse_number<size_t>(key, value);
  else if (key == "items") st.items = parse_number<size_t>(key, value);
  else if (key == "replicates") st.replicates = parse_number<size_t>(key, value);
  else if (key == "draws") st.draws = parse_number<size_t>(key, value);
  else if (key == "level") st.level = parse_number<double>(key, value);
  else if (key == "seed") st.sampler.seed = parse_number<uint64_t>(key, value);
  else if (key == "chains") st.sampler.n_chains = parse_number<size_t>(key, value);
  else if (key == "warmup") st.sampler.n_warmup = parse_number<size_t>(key, value);
  else if (key == "samples") st.sampler.n_samples = parse_number<size_t>(key, value);
  else if (key == "target_accept") st.sampler.target_accept = parse_number<double>(key, value);
  else if (key == "max_leapfrog") st.sampler.max_leapfrog = parse_number<size_t>(key, value);
  else if (key == "path_length") st.sampler.path_length = parse_number<double>(key, value);
}

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw UsageError("config values must be strings or numbers");
}

void load_config(Settings& st, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ApiError(RTMIX_ERR_IO, "cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const std::string head = trim(text);

  if (!head.empty() && head.front() == '{') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception& e) {
      throw UsageError("config " + path + ": " + e.what());
    }
    for (const auto& [key, value] : doc.items()) {
      if (key == "truth" && value.is_object()) {
        for (const auto& [name, v] : value.items()) apply(st, "truth." + name, json_scalar(v));
      } else {
        apply(st, key, json_scalar(value));
      }
    }
    return;
  }

  std::istringstream lines(text);
  std::string line;
  for (size_t n = 1; std::getline(lines, line); ++n) {
    const std::string s = trim(line.substr(0, line.find('#')));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + " line " + std::to_string(n) + ": expected key=value");
    apply(st, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
}

void finalize(Settings& st) {
  if (st.command != "compare") {
    if (st.model.empty()) throw UsageError("--model is required");
    rtmix_model m;
    if (rtmix_model_parse(st.model.c_str(), &m) != RTMIX_OK)
      throw UsageError("--model must be linear or mixture, got '" + st.model + "'");
  }
  if ((st.command == "fit" || st.command == "compare" || st.command == "ppc") && st.data.empty())
    throw UsageError("--data is required");
  if (st.out.empty()) throw UsageError("--out is required");

  if (takes_truth(st.command)) {
    const auto names = truth_names(st.model);
    for (const auto& [name, value] : st.truth)
      if (std::find(names.begin(), names.end(), name) == names.end())
        throw UsageError("unknown " + st.model + " parameter '" + name + "'");
    auto full = default_truth(st.model);
    for (const auto& [name, value] : st.truth) full[name] = value;
    st.truth = full;
  }
}

json effective_config(const Settings& st) {
  json j;
  j["command"] = st.command;
  for (const std::string& key : allowed_keys(st.command)) {
    if (key == "data") j[key] = st.data;
    else if (key == "model") j[key] = st.model;
    else if (key == "k") j[key] = st.k;
    else if (key == "participants") j[key] = st.participants;
    else if (key == "items") j[key] = st.items;
    else if (key == "replicates") j[key] = st.replicates;
    else if (key == "draws") j[key] = st.draws;
    else if (key == "level") j[key] = st.level;
    else if (key == "seed") j[key] = st.sampler.seed;
    else if (key == "chains") j[key] = st.sampler.n_chains;
    else if (key == "warmup") j[key] = st.sampler.n_warmup;
    else if (key == "samples") j[key] = st.sampler.n_samples;
    else if (key == "target_accept") j[key] = st.sampler.target_accept;
    else if (key == "max_leapfrog") j[key] = st.sampler.max_leapfrog;
    else if (key == "path_length") j[key] = st.sampler.path_length;
  }
  if (takes_truth(st.command)) {
    json t = json::object();
    for (const std::string& name : truth_names(st.model)) t[name] = st.truth.at(name);
    j["truth"] = t;
  }
  return j;
}

// ---- outputs ---------------------------------------------------------------

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
  if (!out) throw ApiError(RTMIX_ERR_IO, "cannot write " + p.string());
}

fs::path prepare_out(const Settings& st) {
  const fs::path dir(st.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ApiError(RTMIX_ERR_IO, "cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / "config.json", effective_config(st).dump(2) + "\n");
  return dir;
}

// A header-only file is as unusable as an empty one, so both are input errors.
void load_data(const std::string& path, Dataset& data) {
  check(rtmix_dataset_load_csv(path.c_str(), data.out()));
  if (rtmix_dataset_size(data.get()) == 0)
    throw ApiError(RTMIX_ERR_FORMAT, "format error: " + path + " contains no trials");
}

rtmix_model model_of(const std::string& name) {
  rtmix_model m;
  check(rtmix_model_parse(name.c_str(), &m));
  return m;
}

void print(const std::string& text) {
  std::cout << text;
  if (!text.empty() && text.back() != '\n') std::cout << '\n';
  std::cout.flush();
}

void print_warnings(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty()) std::cerr << "warning: " << line << '\n';
}

void run_fit(const Settings& st, const fs::path& dir, const rtmix_dataset* data, Fit& fit) {
  check(rtmix_fit_run(data, model_of(st.model), &st.sampler, fit.out()));
  check(rtmix_fit_save_draws_csv(fit.get(), (dir / "draws.csv").c_str()));
  check(rtmix_fit_save_diagnostics_json(fit.get(), (dir / "diagnostics.json").c_str()));
  check(rtmix_fit_save_names_json(fit.get(), (dir / "names.json").c_str()));
  check(rtmix_fit_save_summary_csv(fit.get(), (dir / "summary.csv").c_str()));
  print_warnings(fetch_text([&](char* b, size_t c, size_t* l) {
    return rtmix_fit_warnings(fit.get(), b, c, l);
  }));
}

void cmd_fit(const Settings& st) {
  const fs::path dir = prepare_out(st);
  Dataset data;
  load_data(st.data, data);
  Fit fit;
  run_fit(st, dir, data.get(), fit);
  const std::string table = fetch_text([&](char* b, size_t c, size_t* l) {
    return rtmix_fit_summary_table(fit.get(), b, c, l);
  });
  write_file(dir / "summary.txt", table);
  print(table);
}

void cmd_compare(const Settings& st) {
  const fs::path dir = prepare_out(st);
  Dataset data;
  load_data(st.data, data);
  Folds folds;
  check(rtmix_folds_make(data.get(), st.k, st.sampler.seed, folds.out()));
  check(rtmix_folds_save_csv(folds.get(), (dir / "folds.csv").c_str()));

  Elpd linear, mixture;
  check(rtmix_kfold_run(data.get(), RTMIX_MODEL_LINEAR, folds.get(), &st.sampler, linear.out()));
  check(rtmix_elpd_save_json(linear.get(), (dir / "elpd_linear.json").c_str()));
  check(rtmix_kfold_run(data.get(), RTMIX_MODEL_MIXTURE, folds.get(), &st.sampler, mixture.out()));
  check(rtmix_elpd_save_json(mixture.get(), (dir / "elpd_mixture.json").c_str()));
  for (const auto* e : {&linear, &mixture})
    if (size_t n = rtmix_elpd_warning_count(e->get()))
      std::cerr << "warning: " << n << " fold fit warning(s), see the elpd JSON files\n";

  Comparison cmp;
  check(rtmix_compare(mixture.get(), linear.get(), cmp.out()));
  check(rtmix_comparison_save_json(cmp.get(), (dir / "comparison.json").c_str()));
  const std::string table = fetch_text([&](char* b, size_t c, size_t* l) {
    return rtmix_comparison_table(linear.get(), mixture.get(), cmp.get(), b, c, l);
  });
  write_file(dir / "comparison.txt", table);
  print(table);
}

void simulate_into(const Settings& st, uint64_t seed, Dataset& data) {
  const rtmix_design design{st.participants, st.items, seed};
  const auto& t = st.truth;
  if (st.model == "linear") {
    const rtmix_linear_truth lt{t.at("beta0"), t.at("beta1"), t.at("sigma_e"), t.at("sigma_u"),
                                t.at("sigma_w")};
    check(rtmix_simulate_linear(&lt, &design, data.out()));
  } else {
    const rtmix_mixture_truth mt{t.at("beta"),    t.at("delta"),         t.at("p_sr"),
                                 t.at("p_or"),    t.at("sigma_e"),       t.at("sigma_e_prime"),
                                 t.at("sigma_u"), t.at("sigma_w")};
    check(rtmix_simulate_mixture(&mt, &design, data.out()));
  }
}

void cmd_simulate(const Settings& st) {
  const fs::path dir = prepare_out(st);
  Dataset data;
  simulate_into(st, st.sampler.seed, data);
  check(rtmix_dataset_save_csv(data.get(), (dir / "data.csv").c_str()));
  print("wrote " + std::to_string(rtmix_dataset_size(data.get())) + " trials to " +
        (dir / "data.csv").string());
}

std::string replicate_tag(size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%03zu", r + 1);
  return buf;
}

void cmd_recover(const Settings& st) {
  const fs::path dir = prepare_out(st);
  const auto names = truth_names(st.model);
  std::vector<const char*> cnames;
  std::vector<double> values;
  for (const std::string& n : names) {
    cnames.push_back(n.c_str());
    values.push_back(st.truth.at(n));
  }

  std::map<std::string, size_t> covered;
  json replicates = json::array();
  double coverage_sum = 0.0;
  for (size_t r = 0; r < st.replicates; ++r) {
    const uint64_t seed = rtmix_derive_seed(st.sampler.seed, RTMIX_STREAM_REPLICATE, r);
    Dataset data;
    simulate_into(st, seed, data);
    rtmix_sampler_config config = st.sampler;
    config.seed = seed;
    Fit fit;
    check(rtmix_fit_run(data.get(), model_of(st.model), &config, fit.out()));
    Recovery rec;
    check(rtmix_recovery_check(fit.get(), cnames.data(), values.data(), names.size(), st.level,
                               rec.out()));
    const std::string text = fetch_text([&](char* b, size_t c, size_t* l) {
      return rtmix_recovery_json(rec.get(), b, c, l);
    });
    write_file(dir / ("recovery_" + replicate_tag(r) + ".json"), text);

    const json report = json::parse(text);
    for (const auto& p : report["parameters"])
      if (p["covered"].get<bool>()) ++covered[p["name"].get<std::string>()];
    const double rate = rtmix_recovery_coverage(rec.get());
    coverage_sum += rate;
    replicates.push_back({{"replicate", r + 1},
                          {"seed", seed},
                          {"coverage_rate", rate},
                          {"max_rhat", rtmix_fit_max_rhat(fit.get())},
                          {"divergences", rtmix_fit_divergences(fit.get())}});
    char line[128];
    std::snprintf(line, sizeof line, "replicate %zu/%zu  coverage %.3f  max R-hat %.3f",
                  r + 1, st.replicates, rate, rtmix_fit_max_rhat(fit.get()));
    print(line);
  }

  json params = json::array();
  std::ostringstream table;
  table << "parameter        covered\n";
  for (const std::string& n : names) {
    const size_t c = covered[n];
    params.push_back({{"name", n},
                      {"true", st.truth.at(n)},
                      {"covered", c},
                      {"rate", st.replicates ? static_cast<double>(c) / st.replicates : 0.0}});
    char line[96];
    std::snprintf(line, sizeof line, "%-16s %zu/%zu\n", n.c_str(), c, st.replicates);
    table << line;
  }
  const double aggregate = st.replicates ? coverage_sum / st.replicates : 0.0;
  char line[64];
  std::snprintf(line, sizeof line, "aggregate coverage %.3f\n", aggregate);
  table << line;

  json agg;
  agg["model"] = st.model;
  agg["level"] = st.level;
  agg["replicates"] = st.replicates;
  agg["coverage_rate"] = aggregate;
  agg["parameters"] = params;
  agg["per_replicate"] = replicates;
  write_file(dir / "recovery.json", agg.dump(2) + "\n");
  write_file(dir / "recovery.txt", table.str());
  print(table.str());
}

void cmd_ppc(const Settings& st) {
  const fs::path dir = prepare_out(st);
  Dataset data;
  load_data(st.data, data);
  Fit fit;
  run_fit(st, dir, data.get(), fit);
  Ppc ppc;
  check(rtmix_ppc_run(fit.get(), data.get(), st.draws, st.sampler.seed, ppc.out()));
  check(rtmix_ppc_save_json(ppc.get(), (dir / "ppc.json").c_str()));
  check(rtmix_ppc_save_csv(ppc.get(), (dir / "ppc.csv").c_str()));
  const std::string table = fetch_text([&](char* b, size_t c, size_t* l) {
    return rtmix_ppc_table(ppc.get(), b, c, l);
  });
  write_file(dir / "ppc.txt", table);
  print(table);
}

// ---- command line ------------------------------------------------------------

struct Flags {
  std::map<std::string, CLI::Option*> options;
  CLI::Option* config = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* set = nullptr;
};

void add_flags(CLI::App& app, const std::string& command, Flags& f) {
  auto add = [&](const std::string& key, const std::string& help) {
    std::string flag = "--" + key;
    for (char& c : flag)
      if (c == '_') c = '-';
    f.options[key] = app.add_option(flag, help);
  };
  for (const std::string& key : allowed_keys(command)) {
    if (key == "data") add(key, "reading-time CSV (participant,item,condition,rt)");
    else if (key == "model") add(key, "linear or mixture");
    else if (key == "k") add(key, "number of folds (default 10)");
    else if (key == "participants") add(key, "simulated participants (default 37)");
    else if (key == "items") add(key, "simulated items (default 15)");
    else if (key == "replicates") add(key, "number of simulated datasets (default 10)");
    else if (key == "draws") add(key, "posterior draws used for replicates (default 200)");
    else if (key == "level") add(key, "credible interval level (default 0.95)");
    else if (key == "seed") add(key, "master seed (default 1)");
    else if (key == "chains") add(key, "chains (default 4)");
    else if (key == "warmup") add(key, "warmup iterations per chain (default 1000)");
    else if (key == "samples") add(key, "retained iterations per chain (default 1000)");
    else if (key == "target_accept") add(key, "step-size adaptation target (default 0.8)");
    else if (key == "max_leapfrog") add(key, "leapfrog step cap (default 1024)");
    else if (key == "path_length") add(key, "integration time per transition (default 4)");
  }
  if (takes_truth(command))
    f.set = app.add_option("--set", "true parameter value, name=value (repeatable)");
  f.config = app.add_option("--config", "key=value or JSON config file; flags override it");
  f.out = app.add_option("--out", "output directory");
}

Settings resolve(const std::string& command, const Flags& f) {
  Settings st;
  st.command = command;
  rtmix_sampler_config_init(&st.sampler);
  if (f.config->count()) load_config(st, f.config->as<std::string>());
  for (const auto& [key, opt] : f.options)
    if (opt->count()) apply(st, key, opt->as<std::string>());
  if (f.set && f.set->count()) {
    for (const std::string& kv : f.set->as<std::vector<std::string>>()) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects name=value, got '" + kv + "'");
      apply(st, "truth." + trim(kv.substr(0, eq)), kv.substr(eq + 1));
    }
  }
  if (f.out->count()) st.out = f.out->as<std::string>();
  finalize(st);
  return st;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian lognormal and mixture models of reading times"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rtmix_version()));

  const std::vector<std::pair<std::string, std::string>> commands{
      {"fit", "sample the posterior of one model"},
      {"compare", "K-fold cross-validated elpd of both models"},
      {"simulate", "write a simulated dataset"},
      {"recover", "simulate, fit and check interval coverage over replicates"},
      {"ppc", "fit a model and run posterior predictive checks"}};
  std::map<std::string, Flags> flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    subs[name] = app.add_subcommand(name, help);
    add_flags(*subs[name], name, flags[name]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    for (const auto& [name, help] : commands) {
      if (!subs[name]->parsed()) continue;
      const Settings st = resolve(name, flags[name]);
      if (name == "fit") cmd_fit(st);
      else if (name == "compare") cmd_compare(st);
      else if (name == "simulate") cmd_simulate(st);
      else if (name == "recover") cmd_recover(st);
      else cmd_ppc(st);
    }
  } catch (const UsageError& e) {
    std::cerr << "rtmix: " << e.what() << '\n';
    return kUsage;
  } catch (const ApiError& e) {
    std::cerr << "rtmix: " << e.what() << '\n';
    return exit_code(e.status);
  } catch (const std::exception& e) {
    std::cerr << "rtmix: internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
