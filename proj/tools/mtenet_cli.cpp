// Command-line front end: wires JSON configs to the synthetic-data,
// training, evaluation, gradient-audit and OOD-scoring pipelines and emits
// machine-readable CSV/JSON results.
//
// Exit codes: 0 success, 1 usage/config error, 2 data/IO error,
// 3 audit failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtenet/audit.hpp"
#include "mtenet/data.hpp"
#include "mtenet/losses.hpp"
#include "mtenet/metrics.hpp"
#include "mtenet/net.hpp"
#include "mtenet/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json default_config() {
  return json{
      {"seed", 1},
      {"data.kind", "synthetic"},
      {"data.seed", 2025},
      {"data.normalize", true},
      {"data.train_csv", ""},
      {"data.test_csv", ""},
      {"data.target", "y"},
      {"data.region", ""},
      {"net.hidden", json::array({100, 100, 100})},
      {"net.activation", "tanh"},
      {"train.lr", 0.01},
      {"train.weight_decay", 1e-3},
      {"train.reg_coeff", 1e-2},
      {"train.batch_size", 128},
      {"train.epochs", 400},
      {"train.aux", "lipschitz_mse"},
      {"train.conflict_window", 500},
      {"eval.checkpoint", ""},
      {"ood.count", 500},
      {"ood.seed", 7},
      {"audit.fd_samples", 1000},
      {"audit.fuzz_samples", 100000},
      {"audit.prop1_nets", 200},
      {"audit.seed", 99},
      {"audit.perturb_d_alpha", 0.0},
  };
}

// Flat JSON with dotted keys; overrides use the same typing rules (the
// value text is parsed as JSON when possible, otherwise kept as a string).
json resolve_config(const std::string& config_path,
                    const std::vector<std::string>& overrides,
                    const std::optional<long long>& seed) {
  json cfg = default_config();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config " + config_path);
    json file_cfg;
    try {
      in >> file_cfg;
    } catch (const json::parse_error& e) {
      throw UsageError("config " + config_path + ": " + e.what());
    }
    if (!file_cfg.is_object()) {
      throw UsageError("config " + config_path + ": expected a JSON object");
    }
    for (const auto& [key, value] : file_cfg.items()) {
      if (!cfg.contains(key)) {
        throw UsageError("config " + config_path + ": unknown key '" + key +
                         "'");
      }
      cfg[key] = value;
    }
  }
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw UsageError("--set expects key=value, got '" + kv + "'");
    }
    const std::string key = kv.substr(0, eq);
    const std::string text = kv.substr(eq + 1);
    if (!cfg.contains(key)) {
      throw UsageError("--set: unknown key '" + key + "'");
    }
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    cfg[key] = value;
  }
  if (seed) cfg["seed"] = *seed;
  return cfg;
}

double as_number(const json& cfg, const std::string& key) {
  if (!cfg.at(key).is_number()) {
    throw UsageError("config key '" + key + "' must be a number");
  }
  return cfg.at(key).get<double>();
}

long long as_integer(const json& cfg, const std::string& key) {
  if (!cfg.at(key).is_number_integer()) {
    throw UsageError("config key '" + key + "' must be an integer");
  }
  return cfg.at(key).get<long long>();
}

std::string as_string(const json& cfg, const std::string& key) {
  if (!cfg.at(key).is_string()) {
    throw UsageError("config key '" + key + "' must be a string");
  }
  return cfg.at(key).get<std::string>();
}

bool as_bool(const json& cfg, const std::string& key) {
  if (!cfg.at(key).is_boolean()) {
    throw UsageError("config key '" + key + "' must be a boolean");
  }
  return cfg.at(key).get<bool>();
}

mtenet::AuxLossKind parse_aux(const std::string& name) {
  if (name == "none") return mtenet::AuxLossKind::none;
  if (name == "plain_mse") return mtenet::AuxLossKind::plain_mse;
  if (name == "lipschitz_mse") return mtenet::AuxLossKind::lipschitz_mse;
  throw UsageError("train.aux must be none, plain_mse or lipschitz_mse");
}

mtenet::NetConfig net_config_from(const json& cfg, int input_dim) {
  mtenet::NetConfig nc;
  nc.input_dim = input_dim;
  nc.hidden.clear();
  if (!cfg.at("net.hidden").is_array()) {
    throw UsageError("net.hidden must be an array of integers");
  }
  for (const auto& h : cfg.at("net.hidden")) {
    if (!h.is_number_integer()) {
      throw UsageError("net.hidden must be an array of integers");
    }
    nc.hidden.push_back(h.get<int>());
  }
  const std::string act = as_string(cfg, "net.activation");
  if (act == "tanh") {
    nc.activation = mtenet::Activation::tanh;
  } else if (act == "relu") {
    nc.activation = mtenet::Activation::relu;
  } else {
    throw UsageError("net.activation must be tanh or relu");
  }
  nc.seed = static_cast<std::uint64_t>(as_integer(cfg, "seed"));
  return nc;
}

mtenet::TrainConfig train_config_from(const json& cfg) {
  mtenet::TrainConfig tc;
  tc.learning_rate = as_number(cfg, "train.lr");
  tc.weight_decay = as_number(cfg, "train.weight_decay");
  tc.reg_coeff = as_number(cfg, "train.reg_coeff");
  tc.batch_size = static_cast<int>(as_integer(cfg, "train.batch_size"));
  tc.epochs = static_cast<int>(as_integer(cfg, "train.epochs"));
  tc.aux = parse_aux(as_string(cfg, "train.aux"));
  tc.seed = static_cast<std::uint64_t>(as_integer(cfg, "seed"));
  tc.conflict_window = static_cast<int>(as_integer(cfg, "train.conflict_window"));
  return tc;
}

struct ResolvedData {
  mtenet::Dataset train;
  mtenet::Dataset test;
};

ResolvedData resolve_data(const json& cfg) {
  ResolvedData out;
  const std::string kind = as_string(cfg, "data.kind");
  if (kind == "synthetic") {
    auto [train, test] = mtenet::gen_synthetic(
        static_cast<std::uint64_t>(as_integer(cfg, "data.seed")));
    out.train = std::move(train);
    out.test = std::move(test);
  } else if (kind == "csv") {
    const std::string target = as_string(cfg, "data.target");
    const std::string region = as_string(cfg, "data.region");
    out.train = mtenet::load_csv(as_string(cfg, "data.train_csv"), target, region);
    const std::string test_path = as_string(cfg, "data.test_csv");
    if (!test_path.empty()) {
      out.test = mtenet::load_csv(test_path, target, region);
    }
  } else {
    throw UsageError("data.kind must be synthetic or csv");
  }
  if (as_bool(cfg, "data.normalize")) {
    const mtenet::Normalization stats = mtenet::zscore_fit(out.train);
    out.train = mtenet::zscore_apply(out.train, stats);
    if (out.test.size() > 0) out.test = mtenet::zscore_apply(out.test, stats);
  }
  return out;
}

fs::path prepare_out_dir(const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + out_dir +
                             ": " + ec.message());
  }
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void echo_config(const json& cfg, const fs::path& dir) {
  write_text(dir / "config.json", cfg.dump(2) + "\n");
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json metrics_to_json(const mtenet::MetricsReport& r) {
  return json{{"rmse", r.rmse},
              {"mean_nll", r.mean_nll},
              {"ci", r.ci},
              {"ece", r.ece},
              {"count", r.count}};
}

int cmd_synth_data(const json& cfg, const std::string& out_dir) {
  const fs::path dir = prepare_out_dir(out_dir);
  auto [train, test] = mtenet::gen_synthetic(
      static_cast<std::uint64_t>(as_integer(cfg, "data.seed")));
  const auto dump = [](const mtenet::Dataset& d) {
    std::string text = "x,y,region\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
      text += fmt(d.inputs[i][0]) + "," + fmt(d.targets[i]) + "," +
              (d.regions[i] == mtenet::Region::dense ? "dense" : "sparse") +
              "\n";
    }
    return text;
  };
  write_text(dir / "synth_train.csv", dump(train));
  write_text(dir / "synth_test.csv", dump(test));
  echo_config(cfg, dir);
  std::cout << "wrote " << train.size() << " train rows, " << test.size()
            << " test rows to " << dir.string() << "\n";
  return 0;
}

int cmd_train(const json& cfg, const std::string& out_dir) {
  const fs::path dir = prepare_out_dir(out_dir);
  ResolvedData data = resolve_data(cfg);
  const int input_dim = static_cast<int>(data.train.feature_dim());
  const mtenet::NetConfig nc = net_config_from(cfg, input_dim);
  const mtenet::TrainConfig tc = train_config_from(cfg);

  const mtenet::TrainResult result = mtenet::train(data.train, nc, tc);

  std::string losses = "epoch,nll,aux,reg,total\n";
  for (const mtenet::EpochLog& row : result.losses) {
    losses += std::to_string(row.epoch) + "," + fmt(row.nll) + "," +
              fmt(row.aux) + "," + fmt(row.reg) + "," + fmt(row.total) + "\n";
  }
  write_text(dir / "losses.csv", losses);

  if (tc.aux != mtenet::AuxLossKind::none) {
    std::string trace = "iteration,cosine,moving_avg\n";
    for (const auto& e : result.trace.entries) {
      trace += std::to_string(e.iteration) + ",";
      if (e.cosine) trace += fmt(*e.cosine);
      trace += ",";
      if (e.moving_avg) trace += fmt(*e.moving_avg);
      trace += "\n";
    }
    write_text(dir / "trace.csv", trace);
  }

  mtenet::save_checkpoint((dir / "checkpoint").string(), nc, result.params);

  json resolved = cfg;
  resolved["net.input_dim"] = input_dim;
  echo_config(resolved, dir);

  const mtenet::EpochLog& last = result.losses.back();
  std::cout << "epoch " << last.epoch << ": nll " << last.nll << " aux "
            << last.aux << " reg " << last.reg << " total " << last.total
            << "\n";
  return 0;
}

int cmd_eval(const json& cfg, const std::string& out_dir) {
  const fs::path dir = prepare_out_dir(out_dir);
  const std::string checkpoint = as_string(cfg, "eval.checkpoint");
  if (checkpoint.empty()) throw UsageError("eval.checkpoint is required");
  auto [nc, params] = mtenet::load_checkpoint(checkpoint);
  const mtenet::EvidentialNet net(nc);

  ResolvedData data = resolve_data(cfg);
  const mtenet::Dataset& eval_set =
      data.test.size() > 0 ? data.test : data.train;
  json report = metrics_to_json(mtenet::evaluate(net, params, eval_set));
  if (eval_set.regions.size() == eval_set.size()) {
    report["rmse_dense"] =
        mtenet::evaluate(net, params,
                         mtenet::filter_region(eval_set, mtenet::Region::dense))
            .rmse;
    report["rmse_sparse"] =
        mtenet::evaluate(net, params,
                         mtenet::filter_region(eval_set, mtenet::Region::sparse))
            .rmse;
  }
  write_text(dir / "metrics.json", report.dump(2) + "\n");
  echo_config(cfg, dir);
  std::cout << report.dump(2) << "\n";
  return 0;
}

json suite_to_json(const mtenet::audit::SuiteResult& s) {
  return json{{"pass", s.pass}, {"worst", s.worst}, {"detail", s.detail}};
}

int cmd_grad_audit(const json& cfg, const std::string& out_dir) {
  const fs::path dir = prepare_out_dir(out_dir);
  mtenet::audit::AuditConfig ac;
  ac.fd_samples = static_cast<int>(as_integer(cfg, "audit.fd_samples"));
  ac.fuzz_samples = static_cast<int>(as_integer(cfg, "audit.fuzz_samples"));
  ac.prop1_nets = static_cast<int>(as_integer(cfg, "audit.prop1_nets"));
  ac.seed = static_cast<std::uint64_t>(as_integer(cfg, "audit.seed"));
  ac.perturb_d_alpha = as_number(cfg, "audit.perturb_d_alpha");

  const mtenet::audit::AuditReport report = mtenet::audit::run_audit(ac);
  const json out{{"pass", report.pass},
                 {"finite_difference", suite_to_json(report.finite_difference)},
                 {"sign_fuzz", suite_to_json(report.sign_fuzz)},
                 {"cosine_check", suite_to_json(report.cosine_check)},
                 {"shrinkage", suite_to_json(report.shrinkage)},
                 {"fd_seconds", report.fd_seconds},
                 {"fuzz_seconds", report.fuzz_seconds}};
  write_text(dir / "audit.json", out.dump(2) + "\n");
  echo_config(cfg, dir);

  const auto line = [](const char* name, const mtenet::audit::SuiteResult& s) {
    std::cout << (s.pass ? "PASS " : "FAIL ") << name << ": " << s.detail
              << "\n";
  };
  line("finite_difference", report.finite_difference);
  line("sign_fuzz", report.sign_fuzz);
  line("cosine_check", report.cosine_check);
  line("shrinkage", report.shrinkage);
  return report.pass ? 0 : 3;
}

int cmd_ood_eval(const json& cfg, const std::string& out_dir) {
  const fs::path dir = prepare_out_dir(out_dir);
  const std::string checkpoint = as_string(cfg, "eval.checkpoint");
  if (checkpoint.empty()) throw UsageError("eval.checkpoint is required");
  auto [nc, params] = mtenet::load_checkpoint(checkpoint);
  const mtenet::EvidentialNet net(nc);

  ResolvedData data = resolve_data(cfg);
  const mtenet::Dataset& id_set = data.test.size() > 0 ? data.test : data.train;

  const int n_ood = static_cast<int>(as_integer(cfg, "ood.count"));
  std::vector<std::vector<double>> ood_inputs = mtenet::make_ood_inputs(
      static_cast<std::uint64_t>(as_integer(cfg, "ood.seed")), n_ood);
  if (id_set.normalization) {
    const mtenet::Normalization& stats = *id_set.normalization;
    for (auto& x : ood_inputs) {
      for (std::size_t j = 0; j < x.size(); ++j) {
        x[j] = (x[j] - stats.feature_mean[j]) / stats.feature_std[j];
      }
    }
  }

  const auto score = [&](const std::vector<double>& x) {
    mtenet::EvidentialOutput m = net.forward(params, x);
    if (id_set.normalization) {
      m = mtenet::affine_transformed(m, id_set.normalization->target_std,
                                     id_set.normalization->target_mean);
    }
    return mtenet::predictive_summary(m);
  };

  std::string scores_csv = "set,epistemic,aleatoric\n";
  std::vector<double> id_epi, id_alea, ood_epi, ood_alea;
  for (const auto& x : id_set.inputs) {
    const mtenet::PredictiveSummary s = score(x);
    id_epi.push_back(s.epistemic);
    id_alea.push_back(s.aleatoric);
    scores_csv += "id," + fmt(s.epistemic) + "," + fmt(s.aleatoric) + "\n";
  }
  for (const auto& x : ood_inputs) {
    const mtenet::PredictiveSummary s = score(x);
    ood_epi.push_back(s.epistemic);
    ood_alea.push_back(s.aleatoric);
    scores_csv += "ood," + fmt(s.epistemic) + "," + fmt(s.aleatoric) + "\n";
  }

  const json report{{"epistemic_auroc", mtenet::auroc(id_epi, ood_epi)},
                    {"aleatoric_auroc", mtenet::auroc(id_alea, ood_alea)},
                    {"id_count", id_epi.size()},
                    {"ood_count", ood_epi.size()}};
  write_text(dir / "ood.json", report.dump(2) + "\n");
  write_text(dir / "ood_scores.csv", scores_csv);

  // density-plot input: binned counts of log10 scores, 30 bins per measure
  const auto histogram = [](const std::vector<double>& id,
                            const std::vector<double>& ood,
                            const std::string& name) {
    std::vector<double> logs;
    for (const double v : id) logs.push_back(std::log10(v));
    for (const double v : ood) logs.push_back(std::log10(v));
    const auto [lo_it, hi_it] = std::minmax_element(logs.begin(), logs.end());
    const double lo = *lo_it;
    const double width = std::max(1e-12, (*hi_it - lo) / 30.0);
    std::vector<long> id_bins(30, 0), ood_bins(30, 0);
    const auto bin_of = [&](double v) {
      return std::min<long>(29, static_cast<long>((std::log10(v) - lo) / width));
    };
    for (const double v : id) ++id_bins[bin_of(v)];
    for (const double v : ood) ++ood_bins[bin_of(v)];
    std::string rows;
    for (int b = 0; b < 30; ++b) {
      rows += name + "," + fmt(lo + b * width) + "," + fmt(lo + (b + 1) * width) +
              "," + std::to_string(id_bins[b]) + "," +
              std::to_string(ood_bins[b]) + "\n";
    }
    return rows;
  };
  write_text(dir / "ood_hist.csv",
             "measure,log10_lo,log10_hi,id_count,ood_count\n" +
                 histogram(id_epi, ood_epi, "epistemic") +
                 histogram(id_alea, ood_alea, "aleatoric"));
  echo_config(cfg, dir);
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evidential regression toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  std::optional<long long> seed;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--set", overrides, "override, key=value (repeatable)");
    sub->add_option("--seed", seed, "override the master seed");
  };

  CLI::App* synth = app.add_subcommand("synth-data", "generate the synthetic dataset");
  CLI::App* train = app.add_subcommand("train", "train a model, emit a run directory");
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  CLI::App* audit = app.add_subcommand("grad-audit", "run the gradient property audit");
  CLI::App* ood = app.add_subcommand("ood-eval", "score OOD inputs with a checkpoint");
  for (CLI::App* sub : {synth, train, eval, audit, ood}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    const json cfg = resolve_config(config_path, overrides, seed);
    if (synth->parsed()) return cmd_synth_data(cfg, out_dir);
    if (train->parsed()) return cmd_train(cfg, out_dir);
    if (eval->parsed()) return cmd_eval(cfg, out_dir);
    if (audit->parsed()) return cmd_grad_audit(cfg, out_dir);
    if (ood->parsed()) return cmd_ood_eval(cfg, out_dir);
    std::cerr << "error: no command\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
