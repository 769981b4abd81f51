#pragma once

// The `mvop` command line: compute, darboux, poised-check, verify and
// sample-nodes over a JSON run configuration.
//
// Exit codes: 0 success, 1 unexpected error, 2 factorization, 3 poisedness,
// 4 verification, 5 configuration.

#include "mvop/serialize.hpp"
#include "mvop/tolerances.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace mvop::cli {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kFactorization = 2,
  kPoisedness = 3,
  kVerification = 4,
  kConfig = 5,
};

struct Options {
  std::string command;
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scalar;
  bool verify = false;
};

inline const std::vector<std::string>& scalar_modes() {
  static const std::vector<std::string> modes{"rational", "float", "complex-rational", "complex-float"};
  return modes;
}

/// Parsed configuration with defaults and command-line overrides applied.
struct RunConfig {
  Json raw;
  std::filesystem::path base_dir;
  std::string scalar = "rational";
  int dimension = 0;
  int degree = 0;
  std::optional<std::vector<int>> degrees;
  long budget = 100;
  std::uint64_t seed = 0;
  bool confluent = true;
  Tolerances tol;
  std::vector<std::string> notes;

  const Json* darboux() const { return raw.contains("darboux") ? &raw.at("darboux") : nullptr; }
};

namespace detail {

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline int measure_dimension(const Json& m) {
  const auto type = m.at("type").get<std::string>();
  if (type == "box") return static_cast<int>(m.at("bounds").size());
  if (type == "discrete") {
    const auto& pts = m.at("points");
    if (pts.empty()) throw ParseError("discrete measure needs points");
    return static_cast<int>(pts.at(0).size());
  }
  throw ParseError("unknown measure type '" + type + "'");
}

/// True when auto-searched nodes need line-restriction sampling, which
/// exact scalars cannot represent.
inline bool needs_float_sampling(const Json& darboux, int dimension) {
  if (darboux.contains("nodes") || darboux.contains("nodes_file")) return false;
  for (const auto& f : darboux.value("factors", Json::array()))
    if (!f.contains("points") && poly_from_json<ComplexRational>(f.at("poly"), dimension).degree() > 1) return true;
  return false;
}

}  // namespace detail

inline RunConfig load_config(const Options& opts) {
  RunConfig cfg;
  cfg.raw = detail::read_json_file(opts.config_path);
  cfg.base_dir = std::filesystem::path(opts.config_path).parent_path();
  const Json& j = cfg.raw;
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  try {
    if (!j.contains("measure")) throw ParseError("config needs a measure");
    cfg.dimension = detail::measure_dimension(j.at("measure"));
    if (j.contains("dimension") && j.at("dimension").get<int>() != cfg.dimension)
      throw ParseError("dimension " + j.at("dimension").dump() + " does not match the measure dimension " +
                       std::to_string(cfg.dimension));
    cfg.degree = j.at("degree").get<int>();
    if (cfg.degree < 0) throw ParseError("degree must be >= 0");
    cfg.scalar = opts.scalar.value_or(j.value("scalar", std::string("rational")));
    if (std::find(scalar_modes().begin(), scalar_modes().end(), cfg.scalar) == scalar_modes().end())
      throw ParseError("unknown scalar mode '" + cfg.scalar + "'");
    if (j.contains("degrees")) cfg.degrees = j.at("degrees").get<std::vector<int>>();
    if (j.contains("search")) {
      const auto& s = j.at("search");
      cfg.budget = s.value("budget", cfg.budget);
      cfg.seed = s.value("seed", cfg.seed);
      cfg.confluent = s.value("confluent", cfg.confluent);
    }
    if (opts.seed) cfg.seed = *opts.seed;
    if (j.contains("tolerances")) {
      const auto& t = j.at("tolerances");
      cfg.tol.cholesky = t.value("cholesky", cfg.tol.cholesky);
      cfg.tol.poised = t.value("poised", cfg.tol.poised);
      cfg.tol.division = t.value("division", cfg.tol.division);
      cfg.tol.variety = t.value("variety", cfg.tol.variety);
      cfg.tol.verify = t.value("verify", cfg.tol.verify);
    }
    cfg.tol = Tolerances::from_env(cfg.tol);
    if (const Json* d = cfg.darboux(); d && detail::needs_float_sampling(*d, cfg.dimension)) {
      if (cfg.scalar == "rational") cfg.scalar = "float";
      if (cfg.scalar == "complex-rational") cfg.scalar = "complex-float";
      if (cfg.scalar != opts.scalar.value_or(j.value("scalar", std::string("rational"))))
        cfg.notes.push_back("nonlinear factor without supplied points: nodes come from float root finding, scalar set to " +
                            cfg.scalar);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

template <Scalar T>
class Runner {
 public:
  explicit Runner(const RunConfig& cfg) : cfg_(cfg) {}

  int compute(Json& out) {
    out = family_json(family());
    return kOk;
  }

  int darboux(Json& out, bool verify) {
    const auto& fam = family();
    const auto& sp = spec();
    out = header("mvop-darboux");
    std::optional<Resolvent<T>> res;
    if (verify) res = resolvent_via_two_choleskys(fam, sp, CholeskyOptions{cfg_.tol.cholesky});
    Json transforms = Json::array();
    int code = kOk;
    for (int k : degrees()) {
      Json t{{"degree", k}};
      auto nodes = acquire_nodes(k, t);
      if (!nodes) {
        code = worst(code, kPoisedness);
        transforms.push_back(std::move(t));
        continue;
      }
      auto sm = build_sample_matrices(fam, sp, *nodes, k, cfg_.tol);
      auto pr = poisedness(sm.square, cfg_.tol.poised);
      t["nodes"] = node_set_json(*nodes);
      t["poisedness"] = poisedness_json(pr);
      if (!pr.poised) {
        t["message"] = not_poised_message(sp);
        code = worst(code, kPoisedness);
        transforms.push_back(std::move(t));
        continue;
      }
      auto tp = christoffel_transform(fam, sp, *nodes, k, cfg_.tol);
      t["polynomials"] = poly_list_json(*fam.basis(), k, tp);
      if (res) {
        OracleComparison<T> cmp{max_coefficient_deviation(tp, res->transformed.polynomial_block(k)), false, tp,
                                res->transformed.polynomial_block(k)};
        cmp.exact_match = cmp.formula == cmp.oracle;
        bool passed = oracle_passed(cmp);
        t["verification"] = Json{{"deviation", mvop::detail::format_double(cmp.deviation)},
                                 {"exact_match", cmp.exact_match},
                                 {"passed", passed}};
        if (!passed) code = worst(code, kVerification);
      }
      transforms.push_back(std::move(t));
    }
    out["transforms"] = std::move(transforms);
    out["status"] = status_text(code);
    return code;
  }

  int poised_check(Json& out) {
    const auto& fam = family();
    const auto& sp = spec();
    out = header("mvop-poised-check");
    Json results = Json::array();
    int code = kOk;
    for (int k : degrees()) {
      Json t{{"degree", k}};
      auto nodes = acquire_nodes(k, t);
      if (!nodes) {
        code = worst(code, kPoisedness);
        results.push_back(std::move(t));
        continue;
      }
      auto sm = build_sample_matrices(fam, sp, *nodes, k, cfg_.tol);
      auto pr = poisedness(sm.square, cfg_.tol.poised);
      t["nodes"] = node_set_json(*nodes);
      t["poised"] = pr.poised;
      t["det"] = scalar_json(pr.determinant);
      t["poisedness"] = poisedness_json(pr);
      t["counts"] = count_report_json(node_count_diagnostics(sp, *nodes, k));
      if (!pr.poised) {
        t["message"] = not_poised_message(sp);
        code = worst(code, kPoisedness);
      }
      results.push_back(std::move(t));
    }
    out["results"] = std::move(results);
    out["poised"] = code == kOk;
    return code;
  }

  int verify(Json& out) {
    const auto& fam = family();
    const auto& sp = spec();
    out = header("mvop-verify");
    int code = kOk;
    bool all = true;

    auto g = build_moment_matrix(*fam.measure(), fam.degree());
    const auto& chol = fam.cholesky();
    auto rebuilt = (chol.s_inv * chol.h_matrix() * chol.s_inv.transpose()).dense();
    IdentityReport structure;
    structure.checks.push_back(mvop::detail::compare_matrices("cholesky_reconstruction", rebuilt, g.dense(), cfg_.tol.verify,
                                                              "G = S^-1 H S^-T"));
    out["structure"] = identity_report_json(structure);
    all = all && structure.all_passed();

    auto res = resolvent_via_two_choleskys(fam, sp, CholeskyOptions{cfg_.tol.cholesky});
    auto ids = resolvent_band_identities(res, fam, sp, cfg_.tol);
    out["identities"] = identity_report_json(ids);
    all = all && ids.all_passed();

    Json per = Json::array();
    for (int k : degrees()) {
      Json t{{"degree", k}};
      auto nodes = acquire_nodes(k, t);
      if (!nodes) {
        code = worst(code, kPoisedness);
        per.push_back(std::move(t));
        continue;
      }
      t["nodes"] = node_set_json(*nodes);
      auto sm = build_sample_matrices(fam, sp, *nodes, k, cfg_.tol);
      auto pr = poisedness(sm.square, cfg_.tol.poised);
      t["poisedness"] = poisedness_json(pr);
      auto kr = kernel_check(res, fam, sp, *nodes, cfg_.tol);
      bool kernel_ok = is_exact_v<T> ? kr.exact_zero : kr.max_residual <= cfg_.tol.verify;
      t["kernel"] = residual_json(kr);
      t["kernel"]["passed"] = kernel_ok;
      auto fc = sigma_factorization_check(fam, sp, *nodes, k, cfg_.tol);
      t["sigma_factorization"] = Json{{"deviation", mvop::detail::format_double(fc.deviation)}, {"passed", fc.holds}};
      all = all && kernel_ok && fc.holds;
      if (!pr.poised) {
        t["message"] = not_poised_message(sp);
        code = worst(code, kPoisedness);
        per.push_back(std::move(t));
        continue;
      }
      auto cmp = verify_against_oracle(fam, sp, *nodes, k, res, cfg_.tol);
      bool passed = oracle_passed(cmp);
      t["oracle"] = Json{{"deviation", mvop::detail::format_double(cmp.deviation)},
                         {"exact_match", cmp.exact_match},
                         {"passed", passed}};
      all = all && passed;
      per.push_back(std::move(t));
    }
    out["degrees"] = std::move(per);
    out["all_passed"] = all;
    if (!all) code = worst(code, kVerification);
    out["status"] = status_text(code);
    return code;
  }

  int sample_nodes(Json& out) {
    out = header("mvop-nodes");
    out["seed"] = cfg_.seed;
    Json sets = Json::array();
    int code = kOk;
    for (int k : degrees()) {
      Json t{{"degree", k}};
      auto outcome = run_search(k);
      t["search"] = search_json(outcome);
      if (outcome.success()) {
        t["certificate"] = poisedness_json(outcome.certificate);
        t["nodes"] = node_set_json(outcome.nodes);
      } else {
        messages.push_back("degree " + std::to_string(k) + ": " + outcome.message);
        code = worst(code, kPoisedness);
      }
      sets.push_back(std::move(t));
    }
    out["sets"] = std::move(sets);
    return code;
  }

  std::vector<std::string> messages;

 private:
  static int worst(int a, int b) { return a == kOk ? b : a; }

  static const char* status_text(int code) {
    switch (code) {
      case kOk: return "ok";
      case kPoisedness: return "not-poised";
      case kVerification: return "verification-failed";
      default: return "error";
    }
  }

  Json header(const char* format) {
    const auto& sp = spec();
    Json factors = Json::array();
    for (const auto& f : sp.factors) factors.push_back(Json{{"poly", format_poly(f.poly)}, {"power", f.power}});
    Json h{{"format", format},
           {"version", 1},
           {"scalar", ScalarTraits<T>::name},
           {"dimension", cfg_.dimension},
           {"degree", cfg_.degree},
           {"ordering", kOrdering},
           {"q", format_poly(sp.q)},
           {"m", sp.m},
           {"factors", std::move(factors)}};
    if (!cfg_.notes.empty()) h["notes"] = cfg_.notes;
    return h;
  }

  std::string not_poised_message(const DarbouxSpec<T>& sp) const {
    std::string msg = "node set is not poised";
    if (sp.confluent() && !cfg_.confluent)
      msg += "; poised sets with plain (j = 0) nodes do not exist when a factor is repeated (Q = R^d, d > 1)";
    return msg;
  }

  bool oracle_passed(const OracleComparison<T>& cmp) const {
    if constexpr (is_exact_v<T>) return cmp.exact_match;
    double scale = 1;
    for (const auto& p : cmp.oracle) scale = std::max(scale, p.max_coefficient());
    return cmp.deviation <= cfg_.tol.verify * scale;
  }

  const MVOPRFamily<T>& family() {
    if (!family_) {
      auto m = measure();
      family_.emplace(MVOPRFamily<T>::from_measure(m, cfg_.degree, CholeskyOptions{cfg_.tol.cholesky}));
    }
    return *family_;
  }

  MeasurePtr<T> measure() {
    const Json& m = cfg_.raw.at("measure");
    return config_guard([&]() -> MeasurePtr<T> {
      const auto type = m.at("type").get<std::string>();
      if (type == "box") {
        std::vector<std::pair<T, T>> bounds;
        for (const auto& b : m.at("bounds")) {
          if (!b.is_array() || b.size() != 2) throw ParseError("box bounds must be [a, b] pairs");
          bounds.emplace_back(scalar_from_json<T>(b[0]), scalar_from_json<T>(b[1]));
        }
        if (m.contains("weight"))
          return std::make_shared<BoxMeasure<T>>(bounds, poly_from_json<T>(m.at("weight"), cfg_.dimension));
        return std::make_shared<BoxMeasure<T>>(bounds);
      }
      std::vector<std::vector<T>> pts;
      for (const auto& p : m.at("points")) pts.push_back(vector_from_json<T>(p));
      return std::make_shared<DiscreteMeasure<T>>(std::move(pts), vector_from_json<T>(m.at("weights")));
    });
  }

  const DarbouxSpec<T>& spec() {
    if (!spec_) {
      spec_ = config_guard([&] {
        const Json* d = cfg_.darboux();
        if (!d || !d->contains("factors") || d->at("factors").empty()) return DarbouxSpec<T>::identity(cfg_.dimension);
        std::vector<Factor<T>> fs;
        for (const auto& f : d->at("factors")) fs.push_back({poly_from_json<T>(f.at("poly"), cfg_.dimension), f.value("power", 1)});
        return DarbouxSpec<T>::make(cfg_.dimension, std::move(fs));
      });
    }
    return *spec_;
  }

  std::vector<int> degrees() {
    const auto& sp = spec();
    std::vector<int> ks;
    if (cfg_.degrees) ks = *cfg_.degrees;
    else
      for (int k = 0; k + sp.m <= cfg_.degree; ++k) ks.push_back(k);
    for (int k : ks) {
      if (k < 0) throw ParseError("transform degrees must be >= 0");
      if (k + sp.m > cfg_.degree)
        throw DegreeOverflow("degree-" + std::to_string(k) + " transform with deg Q = " + std::to_string(sp.m) +
                             " needs truncation degree L >= " + std::to_string(k + sp.m) + " (have " +
                             std::to_string(cfg_.degree) + ")");
    }
    return ks;
  }

  /// Nodes from the config, a node file, or a seeded search; nullopt after a
  /// failed search (details recorded in `t`).
  std::optional<NodeSet<T>> acquire_nodes(int k, Json& t) {
    if (auto given = configured_nodes(k)) {
      t["node_source"] = "config";
      return given;
    }
    auto outcome = run_search(k);
    t["node_source"] = "search";
    t["search"] = search_json(outcome);
    if (!outcome.success()) {
      messages.push_back("degree " + std::to_string(k) + ": " + outcome.message);
      return std::nullopt;
    }
    return outcome.nodes;
  }

  SearchOutcome<T> run_search(int k) {
    const auto& sp = spec();
    if (!samplers_) {
      samplers_ = config_guard([&] {
        std::vector<HypersurfaceSampler<T>> out;
        const Json* d = cfg_.darboux();
        for (int a = 0; a < sp.factor_count(); ++a) {
          const Json& f = d->at("factors").at(static_cast<std::size_t>(a));
          if (f.contains("points")) {
            std::vector<std::vector<T>> pts;
            for (const auto& p : f.at("points")) pts.push_back(vector_from_json<T>(p));
            out.emplace_back(sp.factors[static_cast<std::size_t>(a)].poly, std::move(pts), cfg_.tol.variety);
          } else {
            out.emplace_back(sp.factors[static_cast<std::size_t>(a)].poly);
          }
        }
        return out;
      });
    }
    SearchOptions so;
    so.confluent = cfg_.confluent;
    so.tol = cfg_.tol;
    return search_poised(family(), sp, k, cfg_.budget, cfg_.seed + static_cast<std::uint64_t>(k), so, &*samplers_);
  }

  std::optional<NodeSet<T>> configured_nodes(int k) {
    const Json* d = cfg_.darboux();
    if (!d) return std::nullopt;
    return config_guard([&]() -> std::optional<NodeSet<T>> {
      if (d->contains("nodes")) return pick_nodes(d->at("nodes"), k);
      if (d->contains("nodes_file")) {
        auto path = std::filesystem::path(d->at("nodes_file").get<std::string>());
        if (path.is_relative()) path = cfg_.base_dir / path;
        Json file = detail::read_json_file(path);
        if (file.contains("sets")) {
          for (const auto& s : file.at("sets"))
            if (s.at("degree").get<int>() == k) {
              if (!s.contains("nodes")) throw ParseError("node file has no nodes for degree " + std::to_string(k));
              return node_set_from_json<T>(s.at("nodes"), cfg_.dimension);
            }
          throw ParseError("node file has no set for degree " + std::to_string(k));
        }
        return pick_nodes(file.at("nodes"), k);
      }
      return std::nullopt;
    });
  }

  /// An array applies to every degree; an object maps "k" to an array.
  NodeSet<T> pick_nodes(const Json& nodes, int k) {
    if (nodes.is_object()) {
      auto key = std::to_string(k);
      if (!nodes.contains(key)) throw ParseError("no nodes configured for degree " + key);
      return node_set_from_json<T>(nodes.at(key), cfg_.dimension);
    }
    return node_set_from_json<T>(nodes, cfg_.dimension);
  }

  /// Maps errors raised while translating config values to ParseError.
  template <class F>
  static auto config_guard(F&& f) -> decltype(f()) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const NodeOffVariety&) {
      throw;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("invalid config: ") + e.what());
    } catch (const Error& e) {
      throw ParseError(e.what());
    }
  }

  const RunConfig& cfg_;
  std::optional<MVOPRFamily<T>> family_;
  std::optional<DarbouxSpec<T>> spec_;
  std::optional<std::vector<HypersurfaceSampler<T>>> samplers_;
};

template <Scalar T>
int dispatch(const Options& opts, const RunConfig& cfg, Json& out, std::vector<std::string>& messages) {
  Runner<T> r(cfg);
  int code = kUnexpected;
  if (opts.command == "compute") code = r.compute(out);
  else if (opts.command == "darboux") code = r.darboux(out, opts.verify);
  else if (opts.command == "poised-check") code = r.poised_check(out);
  else if (opts.command == "verify") code = r.verify(out);
  else if (opts.command == "sample-nodes") code = r.sample_nodes(out);
  messages = r.messages;
  return code;
}

inline int run(const Options& opts, std::ostream& out, std::ostream& err) {
  auto fail = [&](int code, const std::string& msg) {
    err << "mvop: " << msg << "\n";
    return code;
  };
  try {
    auto cfg = load_config(opts);
    Json doc;
    std::vector<std::string> messages;
    int code = kUnexpected;
    if (cfg.scalar == "rational") code = dispatch<Rational>(opts, cfg, doc, messages);
    else if (cfg.scalar == "float") code = dispatch<double>(opts, cfg, doc, messages);
    else if (cfg.scalar == "complex-rational") code = dispatch<ComplexRational>(opts, cfg, doc, messages);
    else code = dispatch<ComplexDouble>(opts, cfg, doc, messages);
    const std::string text = doc.dump(2) + "\n";
    if (opts.out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(opts.out_path, std::ios::binary);
      if (!f) return fail(kConfig, "cannot write " + opts.out_path);
      f << text;
    }
    for (const auto& m : messages) err << "mvop: " << m << "\n";
    if (code == kPoisedness) err << "mvop: node set not poised\n";
    if (code == kVerification) err << "mvop: verification failed\n";
    return code;
  } catch (const SingularBlock& e) {
    return fail(kFactorization, e.what());
  } catch (const SingularMatrix& e) {
    return fail(kFactorization, e.what());
  } catch (const NotPoised& e) {
    return fail(kPoisedness, e.what());
  } catch (const RootFindingFailure& e) {
    return fail(kPoisedness, e.what());
  } catch (const InexactDivision& e) {
    return fail(kVerification, e.what());
  } catch (const ParseError& e) {
    return fail(kConfig, e.what());
  } catch (const DegreeOverflow& e) {
    return fail(kConfig, e.what());
  } catch (const DimensionMismatch& e) {
    return fail(kConfig, e.what());
  } catch (const NodeOffVariety& e) {
    return fail(kConfig, e.what());
  } catch (const CapacityError& e) {
    return fail(kConfig, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(kConfig, std::string("invalid config: ") + e.what());
  } catch (const std::exception& e) {
    return fail(kUnexpected, e.what());
  }
}

/// Parses argv and runs one subcommand.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Multivariate orthogonal polynomials and Christoffel transforms", "mvop"};
  app.require_subcommand(1);
  Options opts;
  std::uint64_t seed = 0;
  std::string scalar;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"compute", "write the monic orthogonal family of the configured measure"},
      {"darboux", "Christoffel-transformed polynomials for the configured perturbation"},
      {"poised-check", "poisedness certificates for configured or searched nodes"},
      {"verify", "identity checklist and oracle comparison"},
      {"sample-nodes", "search for poised node sets and write them as a node file"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "search seed (overrides search.seed)");
    sub->add_option("--scalar", scalar, "scalar mode")->check(CLI::IsMember(scalar_modes()));
    sub->add_option("--out", opts.out_path, "output file (default stdout)");
    if (name == "darboux") sub->add_flag("--verify", opts.verify, "compare against the perturbed-moment Cholesky");
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "mvop: " << e.what() << "\n";
    return kConfig;
  }
  for (auto* s : subs)
    if (s->parsed()) {
      opts.command = s->get_name();
      if (s->count("--seed")) opts.seed = seed;
      if (s->count("--scalar")) opts.scalar = scalar;
    }
  return run(opts, out, err);
}

}  // namespace mvop::cli
