#include "esdv/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

namespace esdv::cli {

namespace {

struct Failure {
  int code;
  std::string message;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Failure{exit_input, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string &path, const std::string &text,
                  std::ostream &out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file << text;
  if (!file)
    throw Failure{exit_input, "cannot write '" + path + "'"};
}

struct Inputs {
  std::string manifest_bytes;
  std::string params_bytes;
  ingest::ValuationModel model;
  ingest::ParameterSet params;
};

Inputs load(const std::string &manifest, const std::string &params) {
  Inputs in;
  in.manifest_bytes = read_file(manifest);
  in.params_bytes = read_file(params);
  try {
    in.model = ingest::parse_model_manifest(in.manifest_bytes);
  } catch (const Error &e) {
    throw Failure{exit_input, manifest + ": " + e.what()};
  }
  try {
    in.params = ingest::with_transfers(
        in.model, ingest::parse_params_csv(in.params_bytes));
  } catch (const Error &e) {
    throw Failure{exit_input, params + ": " + e.what()};
  }
  return in;
}

struct Findings {
  taxonomy::ValidationReport cascade;
  taxonomy::ValidationReport double_counting;
  ingest::BindResult bound;

  std::size_t count() const {
    return cascade.violations.size() + double_counting.violations.size() +
           bound.errors.size();
  }
};

Findings validate(const Inputs &in) {
  Findings f;
  try {
    f.cascade = taxonomy::validate_cascade(in.model.cascade);
    f.double_counting =
        taxonomy::check_double_counting(in.model.cascade, in.model);
  } catch (const StructuralError &e) {
    throw Failure{exit_input, e.what()};
  }
  f.bound = ingest::bind(in.model, in.params);
  return f;
}

void print_findings(const Findings &f, std::ostream &os) {
  auto print = [&](const taxonomy::ValidationReport &r) {
    for (const auto &v : r.violations)
      os << v.code << ": " << v.message << '\n';
  };
  print(f.cascade);
  print(f.double_counting);
  for (const auto &e : f.bound.errors)
    os << report::binding_code(e) << ": " << e.message() << '\n';
}

report::ReportDocument evaluate_document(const Inputs &in, Findings &f) {
  report::ReportDocument doc;
  doc.digest = report::inputs_digest(in.manifest_bytes, in.params_bytes);
  doc.region = in.model.region;
  doc.year = in.model.year;
  doc.cascade = f.cascade;
  doc.double_counting = f.double_counting;
  doc.binding = f.bound.errors;

  std::vector<kernels::LineItemResult> results;
  try {
    results = ingest::evaluate(f.bound.model);
  } catch (const EvaluationError &e) {
    throw Failure{exit_evaluation, e.what()};
  }
  for (std::size_t i = 0; i < results.size(); ++i)
    doc.items.push_back(
        {results[i], in.model.items[i].kernel, in.model.items[i].node});
  doc.ledger = kernels::build_ledger(results);
  return doc;
}

std::string render(const report::ReportDocument &doc,
                   const std::string &format) {
  return format == "json" ? report::render_json(doc)
                          : report::render_table(doc);
}

template <class F> int guarded(std::ostream &err, F &&body) {
  try {
    return body();
  } catch (const Failure &f) {
    err << "esdv: " << f.message << '\n';
    return f.code;
  }
}

} // namespace

int cmd_validate(const std::string &manifest, const std::string &params,
                 std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    Inputs in = load(manifest, params);
    Findings f = validate(in);
    print_findings(f, out);
    if (f.count() > 0) {
      out << f.count() << " finding(s)\n";
      return int(exit_findings);
    }
    out << "ok: " << in.model.items.size() << " item(s), "
        << in.params.parameters.size() << " parameter(s), no findings\n";
    return int(exit_ok);
  });
}

int cmd_value(const ValueOptions &opts, std::ostream &out, std::ostream &err) {
  return guarded(err, [&] {
    Inputs in = load(opts.manifest, opts.params);
    Findings f = validate(in);
    if (f.count() > 0) {
      print_findings(f, err);
      return int(exit_findings);
    }
    report::ReportDocument doc = evaluate_document(in, f);
    write_output(opts.out, render(doc, opts.format), out);
    return int(exit_ok);
  });
}

int cmd_sensitivity(const SensitivityOptions &opts, std::ostream &out,
                    std::ostream &err) {
  return guarded(err, [&] {
    Inputs in = load(opts.manifest, opts.params);
    Findings f = validate(in);
    if (f.count() > 0) {
      print_findings(f, err);
      return int(exit_findings);
    }
    report::ReportDocument doc = evaluate_document(in, f);

    sensitivity::SensitivityConfig config;
    config.samples = opts.samples;
    config.seed = opts.seed;
    config.delta = opts.delta;
    config.threads = opts.threads;
    try {
      config.distribution = sensitivity::distribution_from_string(opts.dist);
      doc.sensitivity = sensitivity::monte_carlo(in.model, in.params, config);
    } catch (const std::invalid_argument &e) {
      throw Failure{exit_sensitivity, e.what()};
    } catch (const Error &e) {
      throw Failure{exit_sensitivity, e.what()};
    }
    write_output(opts.out, render(doc, opts.format), out);
    return int(exit_ok);
  });
}

int run(int argc, const char *const *argv, std::ostream &out,
        std::ostream &err) {
  CLI::App app{"Values urban ecosystem services and disservices from a model "
               "manifest and a parameter table.",
               "esdv"};
  app.set_version_flag("--version", std::string(report::tool_version));
  app.require_subcommand(1);

  std::string manifest, params;
  auto add_inputs = [&](CLI::App *cmd) {
    cmd->add_option("manifest", manifest, "Model manifest (JSON)")->required();
    cmd->add_option("params", params, "Parameter table (CSV)")->required();
  };

  auto *validate_cmd =
      app.add_subcommand("validate", "Lint the cascade and bind parameters");
  add_inputs(validate_cmd);

  ValueOptions value_opts;
  auto *value_cmd = app.add_subcommand("value", "Evaluate the ledger");
  add_inputs(value_cmd);
  value_cmd->add_option("--out", value_opts.out,
                        "Output path (default stdout)");
  value_cmd->add_option("--format", value_opts.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));

  SensitivityOptions sens_opts;
  sens_opts.format = "json";
  auto *sens_cmd = app.add_subcommand(
      "sensitivity", "Evaluate the ledger with Monte-Carlo and elasticities");
  add_inputs(sens_cmd);
  sens_cmd->add_option("--out", sens_opts.out, "Output path (default stdout)");
  sens_cmd->add_option("--format", sens_opts.format, "table or json")
      ->check(CLI::IsMember({"table", "json"}));
  sens_cmd->add_option("--samples", sens_opts.samples, "Monte-Carlo draws");
  sens_cmd->add_option("--seed", sens_opts.seed, "Random seed");
  sens_cmd->add_option("--dist", sens_opts.dist, "uniform or triangular");
  sens_cmd->add_option("--delta", sens_opts.delta,
                       "Relative step for elasticities");
  sens_cmd->add_option("--threads", sens_opts.threads,
                       "Worker threads (does not change results)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? int(exit_ok) : int(exit_input);
  }

  if (*validate_cmd)
    return cmd_validate(manifest, params, out, err);
  if (*value_cmd) {
    value_opts.manifest = manifest;
    value_opts.params = params;
    return cmd_value(value_opts, out, err);
  }
  sens_opts.manifest = manifest;
  sens_opts.params = params;
  return cmd_sensitivity(sens_opts, out, err);
}

} // namespace esdv::cli
