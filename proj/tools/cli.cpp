#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dnsvec/bench.hpp"
#include "dnsvec/encoder.hpp"
#include "dnsvec/parser.hpp"
#include "dnsvec/reasoner.hpp"

namespace dnsvec::cli {

namespace {

using json = nlohmann::ordered_json;

enum class Format { Human, Machine };

constexpr double kGradTolerance = 1e-5;

struct Options {
  std::string ontology;
  std::string situation;
  std::string description;
  std::string mode = "heaviside";
  std::string format = "human";
  bool clamp = false;
  std::uint64_t seed = 42;
  std::size_t max_entities = 4;
  std::size_t max_depth = 2;
  bool strict_oracle = false;
  std::size_t trials = 100;
  std::vector<std::size_t> sizes{32, 64, 128, 256};
  std::string shape = "chain";
  int repeats = 5;
};

std::string fixed(double value, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::string sci(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", value);
  return buf;
}

std::string join(const std::vector<std::string>& items, std::string_view sep = ", ") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

/// Reports a failure and returns its exit status.
class Reporter {
 public:
  Reporter(Format format, std::ostream& out, std::ostream& err) : format_(format), out_(out), err_(err) {}

  int fail(const std::string& file, const Error& e) const {
    if (format_ == Format::Machine) {
      json error = {{"kind", to_string(e.kind())}, {"message", e.what()}};
      if (!file.empty()) error["file"] = file;
      if (e.span()) {
        error["line"] = e.span()->line;
        error["column"] = e.span()->column;
        error["length"] = e.span()->length;
      }
      if (!e.path().empty()) error["path"] = e.path();
      out_ << json{{"status", "error"}, {"error", std::move(error)}}.dump(2) << '\n';
    } else {
      std::string where = file;
      if (e.span()) {
        where += ":" + std::to_string(e.span()->line) + ":" + std::to_string(e.span()->column);
      }
      err_ << (where.empty() ? "" : where + ": ") << "error[" << to_string(e.kind()) << "]: " << e.what()
           << '\n';
    }
    return kExitFailure;
  }

  int fail(const std::string& file, const std::exception& e) const {
    if (format_ == Format::Machine) {
      out_ << json{{"status", "error"}, {"error", {{"kind", "IOError"}, {"message", e.what()}, {"file", file}}}}
                  .dump(2)
           << '\n';
    } else {
      err_ << (file.empty() ? "" : file + ": ") << "error: " << e.what() << '\n';
    }
    return kExitFailure;
  }

 private:
  Format format_;
  std::ostream& out_;
  std::ostream& err_;
};

/// Ontology plus everything derived from it.
struct Model {
  Ontology ontology;
  Encoder encoder;
  BasisMap bases;

  explicit Model(Ontology o) : ontology(std::move(o)), encoder(ontology), bases(encoder.build_all_bases()) {}
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
};

// Tracks which file a failure belongs to.
struct FileError {
  std::string file;
  std::exception_ptr error;
};

template <typename F>
auto in_file(const std::string& file, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (...) {
    throw FileError{file, std::current_exception()};
  }
}

std::unique_ptr<Model> load_model(const std::string& path) {
  return in_file(path, [&] { return std::make_unique<Model>(load_ontology(path)); });
}

Situation load_situation_file(const std::string& path) {
  return in_file(path, [&] { return load_situation(path); });
}

Vector encode_file(const Model& model, const std::string& path, const Situation& s) {
  return in_file(path, [&] { return model.encoder.encode_situation(s); });
}

Activation parse_mode(const std::string& mode) {
  return mode == "relu" ? Activation::Relu : Activation::Heaviside;
}

// ---------------------------------------------------------------------------

int cmd_validate(const Options& opt, Format format, std::ostream& out) {
  const auto model = load_model(opt.ontology);
  const Ontology& o = model->ontology;
  if (format == Format::Machine) {
    out << json{{"status", "ok"},
                {"descriptions", o.description_count()},
                {"roles", o.role_count()},
                {"dim", o.dim()},
                {"warnings", o.warnings()}}
               .dump(2)
        << '\n';
  } else {
    const std::size_t nd = o.description_count();
    const std::size_t nr = o.role_count();
    out << nd << (nd == 1 ? " description, " : " descriptions, ") << nr << (nr == 1 ? " role, " : " roles, ")
        << "dim " << o.dim() << '\n';
    for (const auto& w : o.warnings()) out << "warning: " << w << '\n';
  }
  return kExitOk;
}

int cmd_encode(const Options& opt, Format format, std::ostream& out) {
  const auto model = load_model(opt.ontology);
  const Situation s = load_situation_file(opt.situation);
  const Vector v = encode_file(*model, opt.situation, s);
  const Ontology& o = model->ontology;
  if (format == Format::Machine) {
    json index = json::array();
    for (auto id : o.elements()) index.push_back(o.name(id));
    out << json{{"situation", s.id}, {"dim", o.dim()}, {"index", std::move(index)}, {"vector", to_json(v)}}
               .dump(2)
        << '\n';
  } else {
    for (auto id : o.elements()) {
      std::ostringstream value;
      value << v(static_cast<Eigen::Index>(id.index));
      out << o.name(id) << ' ' << value.str() << '\n';
    }
  }
  return kExitOk;
}

int cmd_infer(const Options& opt, Format format, std::ostream& out) {
  const auto model = load_model(opt.ontology);
  const Situation s = load_situation_file(opt.situation);
  const Vector v = encode_file(*model, opt.situation, s);
  const Ontology& o = model->ontology;
  const Activation mode = parse_mode(opt.mode);
  const auto reports = satisfy_all(o, model->bases, v, mode);
  auto shown = [&](double p) { return opt.clamp ? std::min(p, 1.0) : p; };

  if (format == Format::Machine) {
    json items = json::array();
    for (const auto& r : reports) {
      json active = json::array();
      for (bool a : r.active_mask) active.push_back(a);
      items.push_back({{"name", o.name(r.description)},
                       {"probability", shown(r.probability)},
                       {"coefficients", to_json(r.coefficients)},
                       {"active", std::move(active)},
                       {"residual", r.residual_norm}});
    }
    out << json{{"situation", s.id}, {"mode", to_string(mode)}, {"clamp", opt.clamp}, {"descriptions", std::move(items)}}
               .dump(2)
        << '\n';
    return kExitOk;
  }

  std::vector<const SatisfactionReport*> order;
  for (const auto& r : reports) order.push_back(&r);
  std::stable_sort(order.begin(), order.end(), [&](const auto* a, const auto* b) {
    if (a->probability != b->probability) return a->probability > b->probability;
    return o.name(a->description) < o.name(b->description);
  });
  for (const auto* r : order) out << o.name(r->description) << ' ' << fixed(shown(r->probability)) << '\n';
  return kExitOk;
}

int cmd_explain(const Options& opt, Format format, std::ostream& out) {
  const auto model = load_model(opt.ontology);
  const Ontology& o = model->ontology;
  auto d = o.find(opt.description);
  if (!d || !o.is_description(*d)) {
    std::vector<std::string> names;
    for (auto id : o.descriptions()) names.push_back(o.name(id));
    throw FileError{opt.ontology, std::make_exception_ptr(Error(
                                      ErrorKind::UnknownDescription,
                                      "unknown description '" + opt.description + "'; available: " + join(names)))};
  }
  const Situation s = load_situation_file(opt.situation);
  const Vector v = encode_file(*model, opt.situation, s);
  const Activation mode = parse_mode(opt.mode);
  const auto report = satisfaction(model->bases.at(*d), v, mode);
  const auto verdict = in_file(opt.situation, [&] { return symbolic_satisfies(o, s, *d); });

  if (format == Format::Machine) {
    json components = json::array();
    for (std::size_t i = 0; i < verdict.trace.size(); ++i) {
      const auto& m = verdict.trace[i];
      components.push_back({{"name", o.name(m.component)},
                            {"coefficient", report.coefficients(static_cast<Eigen::Index>(i))},
                            {"active", static_cast<bool>(report.active_mask[i])},
                            {"matched", m.matched},
                            {"entities", m.entities}});
    }
    out << json{{"description", o.name(*d)},
                {"situation", s.id},
                {"mode", to_string(mode)},
                {"probability", report.probability},
                {"residual", report.residual_norm},
                {"satisfied", verdict.satisfied},
                {"nearly_satisfied", verdict.nearly_satisfied},
                {"components", std::move(components)}}
               .dump(2)
        << '\n';
    return kExitOk;
  }

  out << o.name(*d) << ": p = " << fixed(report.probability) << " (" << to_string(mode) << "), residual "
      << fixed(report.residual_norm) << '\n';
  for (std::size_t i = 0; i < verdict.trace.size(); ++i) {
    const auto& m = verdict.trace[i];
    out << "  " << o.name(m.component) << ": coeff " << fixed(report.coefficients(static_cast<Eigen::Index>(i)))
        << (report.active_mask[i] ? " active" : " inactive");
    if (m.matched) {
      out << ", matched by " << join(m.entities) << '\n';
    } else {
      out << ", unmatched\n";
    }
  }
  return kExitOk;
}

json counterexample_json(const Ontology& o, const Counterexample& c) {
  json active = json::array();
  for (bool a : c.report.active_mask) active.push_back(a);
  json trace = json::array();
  for (const auto& m : c.verdict.trace) {
    trace.push_back({{"component", o.name(m.component)}, {"matched", m.matched}, {"entities", m.entities}});
  }
  return {{"description", o.name(c.report.description)},
          {"violated", c.violated},
          {"situation", json::parse(serialize_situation(c.situation))},
          {"coefficients", to_json(c.report.coefficients)},
          {"active", std::move(active)},
          {"probability", c.report.probability},
          {"satisfied", c.verdict.satisfied},
          {"nearly_satisfied", c.verdict.nearly_satisfied},
          {"oracle", std::move(trace)}};
}

int cmd_verify(const Options& opt, Format format, std::ostream& out) {
  const auto model = load_model(opt.ontology);
  const Ontology& o = model->ontology;
  std::vector<std::string> roles;
  for (auto r : o.roles()) roles.push_back(o.name(r));
  const auto situations = enumerate_situations(roles, opt.max_entities, opt.max_depth);
  const auto semantics = opt.strict_oracle ? OracleSemantics::Strict : OracleSemantics::Flattened;
  const auto report = verify_theorems(model->encoder, model->bases, situations, semantics);

  if (format == Format::Machine) {
    json examples = json::array();
    for (const auto& c : report.counterexamples) examples.push_back(counterexample_json(o, c));
    out << json{{"semantics", to_string(semantics)},
                {"max_entities", opt.max_entities},
                {"max_depth", opt.max_depth},
                {"situations", report.situations},
                {"checks", report.checks},
                {"counterexamples", std::move(examples)}}
               .dump(2)
        << '\n';
  } else {
    out << report.situations << " situations, " << report.checks << " checks, " << report.counterexamples.size()
        << " counterexamples (" << to_string(semantics) << " nesting)\n";
    constexpr std::size_t kShown = 10;
    for (std::size_t i = 0; i < std::min(kShown, report.counterexamples.size()); ++i) {
      out << "counterexample: " << counterexample_json(o, report.counterexamples[i]).dump() << '\n';
    }
    if (report.counterexamples.size() > kShown) {
      out << "... " << report.counterexamples.size() - kShown << " more (use --format machine)\n";
    }
  }
  return report.ok() ? kExitOk : kExitFailure;
}

int cmd_gradcheck(const Options& opt, Format format, std::ostream& out) {
  const auto model = load_model(opt.ontology);
  const auto result = gradcheck(model->encoder, model->bases, opt.trials, opt.seed);
  const bool complete = result.trials == opt.trials;
  const bool pass = complete && result.max_relative_error <= kGradTolerance;
  if (format == Format::Machine) {
    out << json{{"trials", result.trials},
                {"requested", opt.trials},
                {"rejected", result.rejected},
                {"seed", opt.seed},
                {"max_relative_error", result.max_relative_error},
                {"tolerance", kGradTolerance},
                {"vacuous", opt.trials == 0},
                {"pass", pass}}
               .dump(2)
        << '\n';
  } else if (opt.trials == 0) {
    out << "0 trials: vacuous pass\n";
  } else {
    out << result.trials << " trials (" << result.rejected << " near-kink samples rejected), max relative error "
        << sci(result.max_relative_error) << " (tolerance " << sci(kGradTolerance) << "): "
        << (pass ? "pass" : "FAIL") << '\n';
    if (!complete) out << "could only sample " << result.trials << " of " << opt.trials << " points\n";
  }
  return pass ? kExitOk : kExitFailure;
}

int cmd_bench(const Options& opt, Format format, std::ostream& out) {
  const auto shape = *parse_shape(opt.shape);
  const auto result = run_bench(opt.sizes, shape, opt.seed, opt.repeats);
  if (format == Format::Machine) {
    json rows = json::array();
    for (const auto& r : result.rows) {
      rows.push_back({{"descriptions", r.descriptions}, {"dim", r.dim}, {"columns", r.columns}, {"seconds", r.seconds}});
    }
    json doc = {{"shape", to_string(shape)}, {"seed", opt.seed}, {"rows", std::move(rows)}};
    doc["exponent"] = result.exponent ? json(*result.exponent) : json(nullptr);
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  char line[128];
  std::snprintf(line, sizeof line, "%8s %8s %8s %12s\n", "|D|", "dim", "columns", "seconds");
  out << line;
  for (const auto& r : result.rows) {
    std::snprintf(line, sizeof line, "%8zu %8zu %8zu %12.6f\n", r.descriptions, r.dim, r.columns, r.seconds);
    out << line;
  }
  if (result.exponent) out << "growth exponent " << fixed(*result.exponent, 2) << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Vector-space reasoner for Descriptions-and-Situations ontologies", "dnsvec"};
  app.require_subcommand(1);

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"human", "machine"}));
  };
  auto add_ontology = [&](CLI::App* sub) {
    sub->add_option("ontology", opt.ontology, "Ontology file (.sandra or .json, '-' for stdin)")->required();
  };
  auto add_mode = [&](CLI::App* sub) {
    sub->add_option("--mode", opt.mode, "Activation")->check(CLI::IsMember({"heaviside", "relu"}));
  };

  auto* validate = app.add_subcommand("validate", "Check an ontology and all of its bases");
  add_ontology(validate);
  add_format(validate);

  auto* encode = app.add_subcommand("encode", "Print the vector of a situation");
  add_ontology(encode);
  encode->add_option("situation", opt.situation, "Situation file")->required();
  add_format(encode);

  auto* infer = app.add_subcommand("infer", "Satisfaction probability of every description");
  add_ontology(infer);
  infer->add_option("situation", opt.situation, "Situation file")->required();
  add_mode(infer);
  infer->add_flag("--clamp", opt.clamp, "Display min(p, 1)");
  add_format(infer);

  auto* explain = app.add_subcommand("explain", "Per-component report for one description");
  add_ontology(explain);
  explain->add_option("situation", opt.situation, "Situation file")->required();
  explain->add_option("description", opt.description, "Description name")->required();
  add_mode(explain);
  add_format(explain);

  auto* verify = app.add_subcommand("verify", "Compare geometric and symbolic satisfaction exhaustively");
  add_ontology(verify);
  verify->add_option("--max-entities", opt.max_entities, "Entities per situation tree");
  verify->add_option("--max-depth", opt.max_depth, "Nesting depth");
  verify->add_flag("--strict-oracle", opt.strict_oracle, "Require nested situations for description components");
  add_format(verify);

  auto* grad = app.add_subcommand("gradcheck", "Analytic Jacobian against finite differences");
  add_ontology(grad);
  grad->add_option("--trials", opt.trials, "Random points");
  grad->add_option("--seed", opt.seed, "Random seed");
  add_format(grad);

  auto* bench = app.add_subcommand("bench", "Time basis construction on synthetic ontologies");
  bench->add_option("--sizes", opt.sizes, "Numbers of descriptions")->delimiter(',');
  bench->add_option("--shape", opt.shape, "chain, tree or dense")->check(CLI::IsMember({"chain", "tree", "dense"}));
  bench->add_option("--seed", opt.seed, "Random seed");
  bench->add_option("--repeats", opt.repeats, "Timing repeats (best is kept)")->check(CLI::PositiveNumber);
  add_format(bench);

  std::vector<char*> argv;
  std::vector<std::string> storage(args.empty() ? std::vector<std::string>{"dnsvec"} : args);
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  const Format format = opt.format == "machine" ? Format::Machine : Format::Human;
  const Reporter reporter(format, out, err);
  try {
    try {
      if (validate->parsed()) return cmd_validate(opt, format, out);
      if (encode->parsed()) return cmd_encode(opt, format, out);
      if (infer->parsed()) return cmd_infer(opt, format, out);
      if (explain->parsed()) return cmd_explain(opt, format, out);
      if (verify->parsed()) return cmd_verify(opt, format, out);
      if (grad->parsed()) return cmd_gradcheck(opt, format, out);
      if (bench->parsed()) return cmd_bench(opt, format, out);
    } catch (const FileError& fe) {
      try {
        std::rethrow_exception(fe.error);
      } catch (const Error& e) {
        return reporter.fail(fe.file, e);
      } catch (const std::exception& e) {
        return reporter.fail(fe.file, e);
      }
    }
  } catch (const Error& e) {
    return reporter.fail({}, e);
  } catch (const std::exception& e) {
    return reporter.fail({}, e);
  }
  return kExitUsage;
}

}  // namespace dnsvec::cli
