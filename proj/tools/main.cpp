#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prophet_lab/analysis.hpp"
#include "prophet_lab/errors.hpp"
#include "prophet_lab/evaluation.hpp"
#include "prophet_lab/instances.hpp"
#include "prophet_lab/policies.hpp"
#include "prophet_lab/spec_parse.hpp"
#include "prophet_lab/verify.hpp"

namespace {

using namespace prophet_lab;

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

const char* kCsvHeader =
    "label,policy,mode,roe,eor,eoir,pbm,pbm_p,ev,eopt,"
    "ci_roe,ci_eor,ci_eoir,ci_pbm,ci_pbm_p,ci_ev,ci_eopt";

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string report_row(const MetricReport& r) {
  std::ostringstream os;
  os << csv_field(r.instance_label) << ',' << csv_field(r.policy_name) << ','
     << (r.mode == EvalMode::Exact ? "exact" : "mc") << ',' << num(r.roe) << ',' << num(r.eor)
     << ',' << num(r.eoir) << ',' << num(r.pbm) << ',' << num(r.pbm_p) << ','
     << num(r.expected_value) << ',' << num(r.expected_opt) << ',' << num(r.ci_roe) << ','
     << num(r.ci_eor) << ',' << num(r.ci_eoir) << ',' << num(r.ci_pbm) << ','
     << num(r.ci_pbm_p) << ',' << num(r.ci_ev) << ',' << num(r.ci_eopt);
  return os.str();
}

std::string report_json(const MetricReport& r) {
  nlohmann::json j;
  j["label"] = r.instance_label;
  j["policy"] = r.policy_name;
  j["mode"] = r.mode == EvalMode::Exact ? "exact" : "mc";
  j["trials"] = r.trials;
  j["roe"] = r.roe;
  j["eor"] = r.eor;
  j["eoir"] = std::isinf(r.eoir) ? nlohmann::json("inf") : nlohmann::json(r.eoir);
  j["pbm"] = r.pbm;
  j["pbm_p"] = std::isnan(r.pbm_p) ? nlohmann::json() : nlohmann::json(r.pbm_p);
  j["ev"] = r.expected_value;
  j["eopt"] = r.expected_opt;
  j["expected_utility"] = r.expected_utility;
  j["ci"] = {{"roe", r.ci_roe}, {"eor", r.ci_eor},     {"eoir", r.ci_eoir}, {"pbm", r.ci_pbm},
             {"pbm_p", r.ci_pbm_p}, {"ev", r.ci_ev},   {"eopt", r.ci_eopt}};
  if (!r.ratio_distribution.empty()) {
    nlohmann::json rd = nlohmann::json::array();
    for (auto [v, p] : r.ratio_distribution) rd.push_back({v, p});
    j["ratio_distribution"] = rd;
  }
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j.dump(2);
}

Instance resolve_instance(const std::string& gen_spec, const std::string& path) {
  if (!gen_spec.empty() && !path.empty())
    throw BadParams("give either a generator spec or an instance file, not both");
  if (!gen_spec.empty()) return make_generator(gen_spec);
  if (!path.empty()) return load_instance(path);
  throw BadParams("an instance is required: --gen or --instance");
}

void write_out(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream f(out_path);
  if (!f) throw BadParams("cannot open output file: " + out_path);
  f << text << '\n';
}

int cmd_gen(const std::string& gen_spec, const std::string& out_path, int64_t shuffle_seed,
            bool do_shuffle) {
  Instance inst = make_generator(gen_spec);
  if (do_shuffle) inst = shuffle_arrival_order(inst, static_cast<uint64_t>(shuffle_seed));
  double ef = expected_optimum(inst);
  double em = expected_max(inst.dist);
  std::fprintf(stderr, "%s\n  n=%d  family=%s\n  E[f]=%s  E[max]=%s\n", inst.label.c_str(),
               inst.n(), inst.family.describe().c_str(), num(ef).c_str(), num(em).c_str());
  write_out(instance_to_json(inst), out_path);
  return 0;
}

int cmd_eval(const std::string& gen_spec, const std::string& inst_path,
             const std::vector<std::string>& policy_specs, const std::string& mode,
             long long trials, uint64_t seed, double utility_cap, const std::string& format,
             const std::string& out_path) {
  Instance inst = resolve_instance(gen_spec, inst_path);
  std::ostringstream body;
  bool first = true;
  for (const std::string& ps : policy_specs) {
    PolicyPtr pol = parse_policy(ps, inst);
    MetricReport rep;
    if (mode == "exact")
      rep = evaluate_exact(inst, *pol, utility_cap);
    else if (mode == "mc")
      rep = evaluate_monte_carlo(inst, *pol, trials, seed, utility_cap);
    else if (mode == "auto")
      rep = evaluate_auto(inst, *pol, trials, seed, utility_cap);
    else
      throw BadParams("mode must be exact, mc, or auto");
    if (format == "json") {
      if (!first) body << '\n';
      body << report_json(rep);
    } else {
      if (first) body << kCsvHeader << '\n';
      body << report_row(rep);
      if (&ps != &policy_specs.back()) body << '\n';
    }
    first = false;
    std::fprintf(stderr, "%-28s %s  roe=%s eor=%s pbm=%s\n", rep.policy_name.c_str(),
                 rep.mode == EvalMode::Exact ? "exact" : "mc", num(rep.roe).c_str(),
                 num(rep.eor).c_str(), num(rep.pbm).c_str());
    if (std::isfinite(utility_cap))
      std::fprintf(stderr, "%-28s E[min(value,%s)]=%s\n", "", num(utility_cap).c_str(),
                   num(rep.expected_utility).c_str());
  }
  write_out(body.str(), out_path);
  return 0;
}

int cmd_reduce(const std::string& gen_spec, const std::string& inst_path,
               const std::string& direction, std::string sub_spec, double gamma, double delta,
               double k, double c_flag, double alpha_flag, long long trials, uint64_t seed) {
  Instance inst = resolve_instance(gen_spec, inst_path);
  double alpha = alpha_flag;
  double metric = 0.0, floor = 0.0;
  std::string metric_name;

  if (direction == "roe2eor") {
    if (sub_spec.empty()) sub_spec = "optimal_roe";
    RandomizedThreshold thr = solve_gamma_threshold(inst.dist, gamma);
    Instance core = truncate_instance(inst, thr);
    PolicyPtr sub = parse_policy(sub_spec, core);
    if (alpha <= 0.0) alpha = evaluate_auto(core, *sub, trials, seed).roe;
    ReductionParams params;
    params.gamma = gamma;
    params.delta = delta;
    params.k = k;
    params.alpha = alpha;
    params.c = c_flag > 0.0 ? c_flag : ReductionParams::required_c(delta, k, alpha);
    PolicyPtr comp = roe_to_eor_policy(inst, sub, params);
    metric = evaluate_auto(inst, *comp, trials, seed).eor;
    metric_name = "eor";
    double f_star = gamma * std::log(1.0 / gamma) / (params.c + 1.0);
    double f_comb = (gamma / delta) * ((k - delta) / k) * alpha;
    floor = std::min(f_star, f_comb);
    try {
      ReductionAudit audit = reduction_audit(inst, params);
      std::fprintf(stderr,
                   "audit: tau=%s a=%s W=%s branch=%s alpha=%s c=%s (needs %s)\n"
                   "       Pr[f>dW]=%s (<= %s)  E[a|f<=dW]=%s (>= %s)\n"
                   "       eor=%s floors: superstar %s, combinatorial %s  claims %s\n",
                   num(audit.threshold.tau).c_str(),
                   num(audit.threshold.accept_prob_at_atom).c_str(),
                   num(audit.core_value).c_str(),
                   audit.superstar_branch ? "superstar" : "combinatorial",
                   num(audit.alpha).c_str(), num(audit.c).c_str(), num(audit.c_required).c_str(),
                   num(audit.p_exceed).c_str(), num(audit.exceed_bound).c_str(),
                   num(audit.cond_value).c_str(), num(audit.cond_bound).c_str(),
                   num(audit.eor).c_str(), num(audit.floor_superstar).c_str(),
                   num(audit.floor_combinatorial).c_str(), audit.claims_ok ? "ok" : "VIOLATED");
    } catch (const TooLarge& ex) {
      std::fprintf(stderr, "audit skipped: %s\n", ex.what());
    }
  } else if (direction == "eor2roe") {
    if (sub_spec.empty()) sub_spec = "optimal_eor";
    PolicyPtr sub = parse_policy(sub_spec, inst);
    if (alpha <= 0.0) alpha = evaluate_auto(inst, *sub, trials, seed).eor;
    PolicyPtr comp = eor_to_roe_policy(inst, sub, alpha);
    metric = evaluate_auto(inst, *comp, trials, seed).roe;
    metric_name = "roe";
    floor = alpha / 68.0;
  } else if (direction == "single_sample") {
    if (sub_spec.empty()) sub_spec = "sample_threshold";
    PolicyPtr sub = parse_policy(sub_spec, inst);
    if (alpha <= 0.0) alpha = measure_sample_alpha(inst, sub, gamma, trials, seed);
    ReductionParams params;
    params.gamma = gamma;
    params.delta = delta;
    params.k = k;
    params.alpha = alpha;
    params.c = c_flag > 0.0 ? c_flag : ReductionParams::required_c(delta, k, alpha);
    PolicyPtr comp =
        single_sample_roe_to_eor_policy(inst, sub, params, RngStream::keyed(seed, 0xF, 0xF));
    metric = evaluate_auto(inst, *comp, trials, seed).eor;
    metric_name = "eor";
    floor = alpha / 144.0;
    std::fprintf(stderr, "single-sample: eor=%s vs alpha/144=%s; tighter alpha/96=%s %s\n",
                 num(metric).c_str(), num(floor).c_str(), num(alpha / 96.0).c_str(),
                 metric >= alpha / 96.0 - 1e-9 ? "(also met)" : "(not met)");
  } else {
    throw BadParams("direction must be roe2eor, eor2roe, or single_sample");
  }

  bool ok = metric >= floor - 1e-9;
  std::cout << "label,direction,sub,alpha," << metric_name << ",floor,ok\n"
            << csv_field(inst.label) << ',' << direction << ',' << csv_field(sub_spec) << ','
            << num(alpha) << ',' << num(metric) << ',' << num(floor) << ','
            << (ok ? "true" : "false") << '\n';
  return ok ? 0 : 1;
}

int cmd_verify(const std::string& suite, uint64_t seed) {
  std::vector<CheckResult> results = run_verify_suite(suite, seed);
  bool all_pass = true;
  std::cout << "suite,name,pass\n";
  for (const CheckResult& r : results) {
    std::fprintf(stderr, "%s %-32s %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                 r.detail.c_str());
    std::cout << csv_field(suite) << ',' << csv_field(r.name) << ','
              << (r.pass ? "true" : "false") << '\n';
    all_pass = all_pass && r.pass;
  }
  return all_pass ? 0 : 1;
}

int cmd_sweep(const std::string& gen_spec, const std::string& param,
              const std::string& values_csv, const std::vector<std::string>& policy_specs,
              long long trials, uint64_t seed) {
  CallSpec base = parse_call(gen_spec);
  std::vector<std::string> values;
  std::stringstream ss(values_csv);
  std::string item;
  while (std::getline(ss, item, ',')) values.push_back(item);
  if (values.empty()) throw BadParams("--values needs at least one entry");

  std::cout << kCsvHeader << '\n';
  for (const std::string& v : values) {
    CallSpec call = base;
    bool replaced = false;
    for (auto& [key, val] : call.args)
      if (key == param) {
        val = v;
        replaced = true;
      }
    if (!replaced) call.args.emplace_back(param, v);
    std::string spec = call.name + "(";
    for (size_t i = 0; i < call.args.size(); ++i) {
      if (i) spec += ",";
      spec += call.args[i].first + "=" + call.args[i].second;
    }
    spec += ")";
    for (const std::string& ps : policy_specs) {
      try {
        Instance inst = make_generator(spec);
        PolicyPtr pol = parse_policy(ps, inst);
        MetricReport rep = evaluate_auto(inst, *pol, trials, seed);
        std::cout << report_row(rep) << '\n';
      } catch (const std::exception& ex) {
        std::fprintf(stderr, "warning: skipping %s / %s: %s\n", spec.c_str(), ps.c_str(),
                     ex.what());
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prophet inequality laboratory"};
  app.require_subcommand(1);

  std::string gen_spec, inst_path, out_path;
  std::string mode = "auto", format = "csv", suite = "all", direction, sub_spec, param,
              values_csv;
  std::vector<std::string> policy_specs;
  long long trials = 100000;
  uint64_t seed = 1;
  double utility_cap = std::numeric_limits<double>::infinity();
  double gamma = 0.5, delta = 2.0, k = 3.0, c_flag = 0.0, alpha_flag = 0.0;
  int64_t shuffle_seed = 0;

  CLI::App* gen = app.add_subcommand("gen", "generate an instance and print/store its JSON");
  gen->add_option("--gen", gen_spec, "generator spec, e.g. example2(n=3)")->required();
  gen->add_option("--out", out_path, "write JSON here instead of stdout");
  CLI::Option* shuffle_opt =
      gen->add_option("--shuffle-order", shuffle_seed, "shuffle the arrival order (seed)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate policies on an instance");
  eval->add_option("--gen", gen_spec, "generator spec");
  eval->add_option("--instance", inst_path, "instance JSON file");
  eval->add_option("--policy", policy_specs, "policy spec (repeatable)")->required();
  eval->add_option("--mode", mode, "exact, mc, or auto (default auto)");
  eval->add_option("--trials", trials, "Monte Carlo trials");
  eval->add_option("--seed", seed, "Monte Carlo seed");
  eval->add_option("--utility-cap", utility_cap, "cap for E[min(value, cap)]");
  eval->add_option("--format", format, "csv or json");
  eval->add_option("--out", out_path, "write rows here instead of stdout");

  CLI::App* reduce = app.add_subcommand("reduce", "run a ratio reduction and check its floor");
  reduce->add_option("--gen", gen_spec, "generator spec");
  reduce->add_option("--instance", inst_path, "instance JSON file");
  reduce->add_option("--direction", direction, "roe2eor, eor2roe, or single_sample")->required();
  reduce->add_option("--sub", sub_spec, "subroutine policy spec");
  reduce->add_option("--gamma", gamma, "core event probability");
  reduce->add_option("--delta", delta, "overshoot factor");
  reduce->add_option("--k", k, "claim split parameter");
  reduce->add_option("--c", c_flag, "superstar cutoff multiplier");
  reduce->add_option("--alpha", alpha_flag, "subroutine guarantee; measured when absent");
  reduce->add_option("--trials", trials, "Monte Carlo trials for measurements");
  reduce->add_option("--seed", seed, "Monte Carlo seed");

  CLI::App* verify = app.add_subcommand("verify", "run a named self-check suite");
  verify->add_option("--suite", suite,
                     "distributions, feasibility, instances, policies, evaluation, analysis, "
                     "reductions, or all");
  verify->add_option("--seed", seed, "seed for randomized checks");

  CLI::App* sweep = app.add_subcommand("sweep", "evaluate policies over a parameter grid");
  sweep->add_option("--gen", gen_spec, "generator spec to vary")->required();
  sweep->add_option("--param", param, "generator argument to sweep")->required();
  sweep->add_option("--values", values_csv, "comma-separated values")->required();
  sweep->add_option("--policy", policy_specs, "policy spec (repeatable)")->required();
  sweep->add_option("--trials", trials, "Monte Carlo trials");
  sweep->add_option("--seed", seed, "Monte Carlo seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_spec, out_path, shuffle_seed, shuffle_opt->count() > 0);
    if (eval->parsed())
      return cmd_eval(gen_spec, inst_path, policy_specs, mode, trials, seed, utility_cap, format,
                      out_path);
    if (reduce->parsed())
      return cmd_reduce(gen_spec, inst_path, direction, sub_spec, gamma, delta, k, c_flag,
                        alpha_flag, trials, seed);
    if (verify->parsed()) return cmd_verify(suite, seed);
    if (sweep->parsed()) return cmd_sweep(gen_spec, param, values_csv, policy_specs, trials, seed);
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  }
  return 2;
}
