#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "ellrisk/error.hpp"
#include "ellrisk/measures.hpp"

namespace ellrisk::cli {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(s);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (text.empty() || used != text.size() || !std::isfinite(v))
    throw Error(ErrorCode::ParseError, where + ": '" + text + "' is not a number");
  return v;
}

Vector parse_list(const std::string& text, const std::string& what) {
  const auto cells = split(text, ',');
  Vector v(static_cast<Eigen::Index>(cells.size()));
  for (std::size_t i = 0; i < cells.size(); ++i) v[static_cast<Eigen::Index>(i)] = parse_number(cells[i], what);
  return v;
}

Matrix parse_matrix(const std::string& text) {
  const auto rows = split(text, ';');
  const auto n = static_cast<Eigen::Index>(rows.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector r = parse_list(rows[static_cast<std::size_t>(i)], "--sigma row " + std::to_string(i + 1));
    if (r.size() != n) throw Error(ErrorCode::DimensionMismatch, "--sigma must be square");
    m.row(i) = r.transpose();
  }
  return m;
}

json to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v[i]));
  return a;
}

json to_json(const Matrix& m) {
  json a = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(Vector(m.row(i).transpose())));
  return a;
}

Vector json_vector(const json& j, const std::string& what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, what + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::ParseError, what + "[" + std::to_string(i) + "] is not a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot write " + path);
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path);
}

struct ModelFlags {
  std::string model_path;
  std::string family = "normal";
  std::optional<double> shape;
  std::string mu, sigma;
};

void add_model_flags(CLI::App* cmd, ModelFlags& m) {
  cmd->add_option("--model", m.model_path, "model JSON file");
  cmd->add_option("--family", m.family, "normal, student_t, logistic, laplace, pearson_vii");
  cmd->add_option("--shape", m.shape, "degrees of freedom (student_t) or exponent t (pearson_vii)");
  cmd->add_option("--mu", m.mu, "comma-separated location");
  cmd->add_option("--sigma", m.sigma, "scale matrix, rows separated by ';'");
}

EllipticalDist load_model(const ModelFlags& m) {
  if (!m.model_path.empty()) {
    json j;
    try {
      j = json::parse(read_file(m.model_path));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::ParseError, m.model_path + ": " + e.what());
    }
    return model_from_json(j);
  }
  if (m.mu.empty() || m.sigma.empty())
    throw CLI::ValidationError("model", "give --model or both --mu and --sigma");
  return EllipticalDist(parse_list(m.mu, "--mu"), parse_matrix(m.sigma), family_from_name(m.family, m.shape));
}

Vector band_vector(const std::string& text, int n, double fallback, const std::string& what) {
  if (text.empty()) return Vector::Constant(n, fallback);
  const Vector v = parse_list(text, what);
  if (v.size() == 1) return Vector::Constant(n, v[0]);
  if (v.size() != n)
    throw Error(ErrorCode::DimensionMismatch, what + " has " + std::to_string(v.size()) + " entries, model has " +
                                                  std::to_string(n));
  return v;
}

json band_json(const Vector& p, const Vector& q) { return json{{"p", to_json(p)}, {"q", to_json(q)}}; }

// DTE/DTV of every component through its univariate marginal.
std::pair<Vector, Vector> component_measure(const EllipticalDist& dist, const TruncationBand& band, bool variance,
                                            const MeasureOptions& opt) {
  const int n = dist.dim();
  Vector value(n), error(n);
  for (int k = 0; k < n; ++k) {
    const EllipticalDist mk = n == 1 ? dist : marginal(dist, k);
    const auto r = variance ? dtv(mk, band.p[k], band.q[k], opt) : dte(mk, band.p[k], band.q[k], opt);
    value[k] = r.value;
    error[k] = r.error;
  }
  return {value, error};
}

const std::vector<std::string> kMeasures = {"dte", "dtv", "mdte", "mdtcov", "mdtcorr", "mdtccov", "mtce", "mtcov"};

json run_measure(const EllipticalDist& dist, const std::string& p_text, const std::string& q_text,
                 const std::vector<std::string>& measures, const MeasureOptions& opt) {
  const int n = dist.dim();
  const TruncationBand band{band_vector(p_text, n, 0.0, "--p"), band_vector(q_text, n, 1.0, "--q")};
  const TruncationBand tail{band.p, Vector::Ones(n)};
  const std::string family = dist.family().describe();
  json entries = json::array();
  std::optional<double> band_prob;
  for (const auto& name : measures) {
    json e;
    e["measure"] = name;
    e["family"] = family;
    e["seed"] = opt.seed;
    e["band"] = band_json(band.p, band.q);
    if (name == "dte" || name == "dtv") {
      band.validate(n);
      const auto [v, err] = component_measure(dist, band, name == "dtv", opt);
      e["value"] = to_json(v);
      e["error_estimate"] = to_json(err);
    } else if (name == "mdte" || name == "mtce") {
      const auto r = name == "mdte" ? mdte(dist, band, opt) : mtce(dist, band.p, opt);
      if (name == "mtce") e["band"] = band_json(tail.p, tail.q);
      e["value"] = to_json(r.value);
      e["error_estimate"] = to_json(r.error);
      e["band_prob"] = r.band_prob;
      e["converged"] = r.converged;
      if (name == "mdte") band_prob = r.band_prob;
    } else {
      MatrixResult r;
      if (name == "mdtcov") r = mdtcov(dist, band, opt);
      else if (name == "mdtcorr") r = mdtcorr(dist, band, opt);
      else if (name == "mdtccov") r = mdtccov(dist, band, opt);
      else r = mtcov(dist, band.p, opt);
      if (name == "mtcov") e["band"] = band_json(tail.p, tail.q);
      e["value"] = to_json(r.value);
      e["error_estimate"] = to_json(r.error);
      e["band_prob"] = r.band_prob;
      e["converged"] = r.converged;
      if (name != "mtcov") band_prob = r.band_prob;
    }
    entries.push_back(e);
  }
  json report;
  report["family"] = family;
  report["seed"] = opt.seed;
  report["accuracy"] = opt.accuracy;
  report["band"] = band_json(band.p, band.q);
  report["band_prob"] = band_prob ? json(*band_prob) : json(nullptr);
  report["measures"] = entries;
  return report;
}

struct Sweep {
  std::string var;
  double from, to, step;
};

std::pair<std::string, double> key_value(const std::string& text, const std::string& flag) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw CLI::ValidationError(flag, "expected key=value, got '" + text + "'");
  return {trim(text.substr(0, eq)), parse_number(trim(text.substr(eq + 1)), flag)};
}

Sweep parse_sweep(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw CLI::ValidationError("--sweep", "expected p=a:b:step or q=a:b:step");
  Sweep s;
  s.var = trim(text.substr(0, eq));
  if (s.var != "p" && s.var != "q") throw CLI::ValidationError("--sweep", "sweep variable must be p or q");
  const auto parts = split(text.substr(eq + 1), ':');
  if (parts.size() != 3) throw CLI::ValidationError("--sweep", "expected a:b:step");
  s.from = parse_number(parts[0], "--sweep");
  s.to = parse_number(parts[1], "--sweep");
  s.step = parse_number(parts[2], "--sweep");
  if (!(s.step > 0.0) || s.to < s.from) throw CLI::ValidationError("--sweep", "need a <= b and step > 0");
  return s;
}

std::string run_curve(const EllipticalDist& dist, int component, const std::vector<std::string>& fixes,
                      const std::string& sweep_text, const MeasureOptions& opt) {
  if (component < 1 || component > dist.dim())
    throw Error(ErrorCode::DimensionMismatch, "--component must lie in 1.." + std::to_string(dist.dim()));
  const EllipticalDist m = dist.dim() == 1 ? dist : marginal(dist, component - 1);
  const Sweep sweep = parse_sweep(sweep_text);
  std::map<std::string, double> fixed;
  for (const auto& f : fixes) {
    const auto [k, v] = key_value(f, "--fix");
    if (k != "p" && k != "q" && k != "sum" && k != "diff")
      throw CLI::ValidationError("--fix", "fixed parameter must be p, q, sum or diff");
    fixed[k] = v;
  }
  if (fixed.size() != 1) throw CLI::ValidationError("--fix", "give exactly one --fix");
  const auto [key, c] = *fixed.begin();
  if (key == sweep.var) throw CLI::ValidationError("--fix", "cannot fix the swept variable");

  std::ostringstream csv;
  csv << std::setprecision(15) << "parameter,p,q,dte,dtv\n";
  const auto points = static_cast<long>(std::floor((sweep.to - sweep.from) / sweep.step + 1e-9));
  for (long i = 0; i <= points; ++i) {
    const double x = std::round((sweep.from + static_cast<double>(i) * sweep.step) * 1e12) / 1e12;
    double p, q;
    if (sweep.var == "p") {
      p = x;
      q = key == "q" ? c : key == "sum" ? c - x : x + c;
    } else {
      q = x;
      p = key == "p" ? c : key == "sum" ? c - x : x - c;
    }
    p = std::round(p * 1e12) / 1e12;
    q = std::round(q * 1e12) / 1e12;
    const double e = dte(m, p, q, opt).value;
    const double v = dtv(m, p, q, opt).value;
    csv << x << ',' << p << ',' << q << ',' << e << ',' << v << '\n';
  }
  return csv.str();
}

}  // namespace

ReturnsTable parse_returns_csv(std::istream& in) {
  ReturnsTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw Error(ErrorCode::ParseError, "empty CSV: no header row");
  t.columns = split(trim(line), ',');
  const std::size_t width = t.columns.size();
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty()) continue;
    const auto cells = split(s, ',');
    if (cells.size() != width)
      throw Error(ErrorCode::ParseError, "row " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                             " fields, found " + std::to_string(cells.size()));
    std::vector<double> r(width);
    for (std::size_t c = 0; c < width; ++c)
      r[c] = parse_number(cells[c], "row " + std::to_string(line_no) + ", column " + std::to_string(c + 1));
    rows.push_back(std::move(r));
  }
  t.rows = Matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < width; ++c)
      t.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
  return t;
}

json model_to_json(const EllipticalDist& dist) {
  json j;
  j["family"] = dist.family().name();
  if (dist.family().has_shape()) j["shape"] = dist.family().shape;
  j["mu"] = to_json(dist.mu());
  j["sigma"] = to_json(dist.sigma());
  return j;
}

EllipticalDist model_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "model must be a JSON object");
  for (const char* key : {"family", "mu", "sigma"})
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, std::string("model is missing '") + key + "'");
  if (!j["family"].is_string()) throw Error(ErrorCode::ParseError, "model 'family' must be a string");
  std::optional<double> shape;
  if (j.contains("shape") && !j["shape"].is_null()) {
    if (!j["shape"].is_number()) throw Error(ErrorCode::ParseError, "model 'shape' must be a number");
    shape = j["shape"].get<double>();
  }
  const Vector mu = json_vector(j["mu"], "mu");
  const json& s = j["sigma"];
  if (!s.is_array()) throw Error(ErrorCode::ParseError, "sigma must be an array of rows");
  Matrix sigma(static_cast<Eigen::Index>(s.size()), mu.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vector row = json_vector(s[i], "sigma[" + std::to_string(i) + "]");
    if (row.size() != mu.size()) throw Error(ErrorCode::DimensionMismatch, "sigma rows must match mu");
    sigma.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return EllipticalDist(mu, sigma, family_from_name(j["family"].get<std::string>(), shape));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Doubly truncated risk measures for elliptical distributions", "ellrisk"};
  app.require_subcommand(1);

  std::string output;
  std::uint64_t seed = kDefaultSeed;
  double accuracy = 1e-9;
  std::string path = "auto";

  auto* fit = app.add_subcommand("fit", "fit a normal model to a returns CSV by maximum likelihood");
  std::string fit_family = "normal", fit_input;
  fit->add_option("--family", fit_family, "only normal is supported");
  fit->add_option("--input", fit_input, "CSV with a header row of asset names")->required();
  fit->add_option("--output", output, "model JSON path (stdout if omitted)");

  auto* measure = app.add_subcommand("measure", "compute truncated risk measures");
  ModelFlags mflags;
  std::string p_text, q_text;
  std::vector<std::string> measures;
  add_model_flags(measure, mflags);
  measure->add_option("--p", p_text, "lower level(s); scalar broadcast or comma list");
  measure->add_option("--q", q_text, "upper level(s); scalar broadcast or comma list");
  measure->add_option("--measures", measures, "subset of dte,dtv,mdte,mdtcov,mdtcorr,mdtccov,mtce,mtcov")
      ->delimiter(',')
      ->check(CLI::IsMember(kMeasures));
  measure->add_option("--accuracy", accuracy, "absolute integration accuracy")->check(CLI::PositiveNumber);
  measure->add_option("--seed", seed, "seed for randomized integration (default 0)");
  measure->add_option("--path", path, "auto or generic")->check(CLI::IsMember({"auto", "generic"}));
  measure->add_option("--output", output, "report JSON path (stdout if omitted)");

  auto* curve = app.add_subcommand("curve", "DTE/DTV of one component over a grid of levels");
  ModelFlags cflags;
  int component = 1;
  std::vector<std::string> fixes;
  std::string sweep;
  add_model_flags(curve, cflags);
  curve->add_option("--component", component, "1-based component index");
  curve->add_option("--fix", fixes, "p=, q=, sum= (p+q) or diff= (q-p)")->required();
  curve->add_option("--sweep", sweep, "p=a:b:step or q=a:b:step")->required();
  curve->add_option("--accuracy", accuracy, "absolute integration accuracy")->check(CLI::PositiveNumber);
  curve->add_option("--seed", seed, "seed for randomized integration (default 0)");
  curve->add_option("--output", output, "CSV path (stdout if omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    const MeasureOptions opt{accuracy, seed, path == "generic" ? Path::Generic : Path::Auto};
    if (fit->parsed()) {
      if (family_from_name(fit_family).kind != FamilyKind::Normal)
        throw Error(ErrorCode::DomainError, "fit supports --family normal only, got '" + fit_family + "'");
      std::istringstream in(read_file(fit_input));
      const ReturnsTable table = parse_returns_csv(in);
      json j = model_to_json(fit_normal_mle(table.rows));
      j["columns"] = table.columns;
      write_output(output, j.dump(2) + "\n", out);
    } else if (measure->parsed()) {
      if (measures.empty()) measures = {"mdte", "mdtcov", "mdtcorr"};
      const json report = run_measure(load_model(mflags), p_text, q_text, measures, opt);
      write_output(output, report.dump(2) + "\n", out);
    } else if (curve->parsed()) {
      write_output(output, run_curve(load_model(cflags), component, fixes, sweep, opt), out);
    }
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace ellrisk::cli
