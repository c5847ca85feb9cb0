#include "rgpt/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

namespace rgpt {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadData("cannot open file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    // trim surrounding whitespace
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_real(const std::string& field, const std::filesystem::path& file, std::size_t line,
                  std::size_t column) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw BadData(file.string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                  ": cannot parse '" + field + "' as a real number");
  }
}

ordered_json parse_json_file(const std::filesystem::path& path) {
  try {
    return ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw BadData(path.string() + ": " + e.what());
  }
}

}  // namespace

Manifest read_manifest(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  const std::filesystem::path base = path.parent_path();

  Manifest m;
  if (!j.contains("risks") || !j["risks"].is_array() || j["risks"].empty())
    throw BadConfig("manifest field 'risks' must be a non-empty array");

  std::vector<RiskEntry> constrained, auxiliary;
  for (const auto& r : j["risks"]) {
    RiskEntry entry;
    if (!r.contains("name")) throw BadConfig("manifest risk entry is missing 'name'");
    if (!r.contains("file")) throw BadConfig("manifest risk entry is missing 'file'");
    entry.name = r["name"].get<std::string>();
    entry.file = base / r["file"].get<std::string>();
    entry.constrained = r.value("constrained", false);
    if (entry.constrained) {
      if (!r.contains("alpha"))
        throw BadConfig("constrained risk '" + entry.name + "' is missing 'alpha'");
      entry.alpha = r["alpha"].get<double>();
      constrained.push_back(entry);
    } else {
      auxiliary.push_back(entry);
    }
  }
  if (constrained.empty()) throw BadConfig("manifest needs at least one constrained risk");
  m.risks = std::move(constrained);
  m.risks.insert(m.risks.end(), auxiliary.begin(), auxiliary.end());

  if (j.contains("priors")) m.priors_file = base / j["priors"].get<std::string>();
  m.pseudocount = j.value("pseudocount", 0.0);
  m.flip_priors = j.value("flip_priors", false);
  return m;
}

Matrix read_risk_csv(const std::filesystem::path& path, std::vector<std::string>& labels) {
  std::ifstream in(path);
  if (!in) throw BadData("cannot open risk file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw BadData(path.string() + ": empty file");
  labels = split_csv_line(line);
  if (labels.empty()) throw BadData(path.string() + ":1: empty header row");

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != labels.size())
      throw BadData(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(labels.size()) + " columns, got " +
                    std::to_string(fields.size()));
    std::vector<double> row;
    for (std::size_t c = 0; c < fields.size(); ++c)
      row.push_back(parse_real(fields[c], path, line_no, c + 1));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw BadData(path.string() + ": no sample rows");

  Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(labels.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < labels.size(); ++c)
      out(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  return out;
}

RiskTable load_risk_table(const Manifest& manifest, SelectionProblem& problem) {
  RiskTable table;
  std::vector<double> alphas;
  Index n_constrained = 0;
  for (const RiskEntry& entry : manifest.risks) {
    std::vector<std::string> labels;
    Matrix slice = read_risk_csv(entry.file, labels);
    if (table.values.empty()) {
      table.labels = labels;
      table.n_samples = slice.rows();
      table.n_hyperparams = slice.cols();
    } else {
      if (labels != table.labels)
        throw BadData(entry.file.string() + ": hyperparameter labels differ across risk files");
      if (slice.rows() != table.n_samples)
        throw BadData(entry.file.string() + ": sample count differs across risk files");
    }
    table.values.push_back(std::move(slice));
    if (entry.constrained) {
      alphas.push_back(entry.alpha);
      ++n_constrained;
    }
  }
  problem.n_constrained = n_constrained;
  problem.alphas = Eigen::Map<const Vector>(alphas.data(), static_cast<Index>(alphas.size()));
  return table;
}

Matrix read_priors(const std::filesystem::path& path, const std::vector<std::string>& labels,
                   bool flip) {
  std::ifstream in(path);
  if (!in) throw BadData("cannot open priors file: " + path.string());
  const Index n = static_cast<Index>(labels.size());

  std::string line;
  if (!std::getline(in, line)) throw BadData(path.string() + ": empty file");
  const std::vector<std::string> header = split_csv_line(line);

  Matrix eta = Matrix::Constant(n, n, 0.5);
  if (header.size() == 3 && header[0] == "i" && header[1] == "j" && header[2] == "eta") {
    std::map<std::string, Index> by_label;
    for (Index i = 0; i < n; ++i) by_label[labels[static_cast<std::size_t>(i)]] = i;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      const std::vector<std::string> fields = split_csv_line(line);
      if (fields.size() != 3)
        throw BadData(path.string() + ":" + std::to_string(line_no) + ": expected 3 columns");
      const auto it_i = by_label.find(fields[0]);
      const auto it_j = by_label.find(fields[1]);
      if (it_i == by_label.end() || it_j == by_label.end())
        throw BadData(path.string() + ":" + std::to_string(line_no) +
                      ": unknown hyperparameter label");
      const double v = parse_real(fields[2], path, line_no, 3);
      eta(it_i->second, it_j->second) = v;
      eta(it_j->second, it_i->second) = 1.0 - v;
    }
  } else {
    if (static_cast<Index>(header.size()) != n || header != labels)
      throw BadData(path.string() + ": header must be the hyperparameter labels or 'i,j,eta'");
    std::size_t line_no = 1;
    Index row = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty() || line == "\r") continue;
      if (row >= n) throw BadData(path.string() + ": more rows than hyperparameters");
      const std::vector<std::string> fields = split_csv_line(line);
      if (static_cast<Index>(fields.size()) != n)
        throw BadData(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(n) + " columns");
      for (Index c = 0; c < n; ++c)
        eta(row, c) = parse_real(fields[static_cast<std::size_t>(c)], path, line_no,
                                 static_cast<std::size_t>(c) + 1);
      ++row;
    }
    if (row != n) throw BadData(path.string() + ": fewer rows than hyperparameters");
  }

  // Priors elicited in the "1 = more reliable" convention are transposed into
  // the data-probability orientation.
  if (flip) eta.transposeInPlace();
  for (Index i = 0; i < n; ++i) eta(i, i) = 0.5;
  return eta;
}

Scenario read_scenario(const std::filesystem::path& path) {
  const ordered_json j = parse_json_file(path);
  Scenario sc;

  auto read_matrix = [&](const char* key) {
    if (!j.contains(key)) return Matrix(0, 0);
    const auto& rows = j[key];
    if (!rows.is_array() || rows.empty()) throw BadConfig(std::string(key) + " must be an array");
    const Index r = static_cast<Index>(rows.size());
    const Index c = static_cast<Index>(rows[0].size());
    Matrix m(r, c);
    for (Index i = 0; i < r; ++i) {
      if (static_cast<Index>(rows[static_cast<std::size_t>(i)].size()) != c)
        throw BadConfig(std::string(key) + " rows must have equal length");
      for (Index k = 0; k < c; ++k)
        m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
    }
    return m;
  };

  sc.spec.constrained_means = read_matrix("constrained_means");
  if (sc.spec.constrained_means.size() == 0)
    throw BadConfig("scenario is missing 'constrained_means'");
  sc.spec.aux_means = read_matrix("aux_means");
  if (sc.spec.aux_means.size() == 0)
    sc.spec.aux_means = Matrix(sc.spec.constrained_means.rows(), 0);

  const std::string corr = j.value("correlation", std::string("independent"));
  if (corr == "independent")
    sc.spec.correlation = SyntheticSpec::Correlation::Independent;
  else if (corr == "shared_noise")
    sc.spec.correlation = SyntheticSpec::Correlation::SharedNoise;
  else
    throw BadConfig("correlation must be 'independent' or 'shared_noise'");
  sc.spec.rho = j.value("rho", 0.0);
  if (!j.contains("n_samples")) throw BadConfig("scenario is missing 'n_samples'");
  sc.spec.n_samples = j["n_samples"].get<Index>();
  sc.spec.seed = j.value("seed", std::uint64_t{0});

  if (!j.contains("alphas")) throw BadConfig("scenario is missing 'alphas'");
  const auto& alphas = j["alphas"];
  sc.problem.n_constrained = static_cast<Index>(alphas.size());
  sc.problem.alphas.resize(sc.problem.n_constrained);
  for (Index l = 0; l < sc.problem.n_constrained; ++l)
    sc.problem.alphas[l] = alphas[static_cast<std::size_t>(l)].get<double>();
  if (sc.problem.n_constrained != sc.spec.constrained_means.cols())
    throw BadConfig("alphas length must match constrained_means columns");

  sc.problem.delta = j.value("delta", 0.1);
  sc.problem.split_fraction = j.value("split_fraction", 0.5);
  sc.problem.seed = sc.spec.seed;

  sc.use_structured_prior = j.value("prior", std::string()) == "structured";
  sc.pseudocount = j.value("pseudocount", 0.0);
  validate_spec(sc.spec);
  return sc;
}

ordered_json fdr_report_to_json(const FdrReport& report) {
  ordered_json j;
  j["trials"] = report.trials;
  j["delta"] = report.delta;
  j["mean_fdp"] = report.mean_fdp;
  j["se_fdp"] = report.se_fdp;
  j["mean_power"] = report.mean_power;
  j["se_power"] = report.se_power;
  ordered_json records = ordered_json::array();
  for (const TrialOutcome& r : report.records) {
    records.push_back(ordered_json{{"trial", r.trial},
                                   {"n_discovered", r.n_discovered},
                                   {"n_false", r.n_false},
                                   {"fdp", r.fdp},
                                   {"power", r.power}});
  }
  j["records"] = records;
  return j;
}

std::string fdr_report_to_csv(const FdrReport& report) {
  std::ostringstream os;
  os << "trial,n_discovered,n_false,fdp,power\n";
  char buf[64];
  for (const TrialOutcome& r : report.records) {
    os << r.trial << ',' << r.n_discovered << ',' << r.n_false << ',';
    std::snprintf(buf, sizeof(buf), "%.10g", r.fdp);
    os << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.10g", r.power);
    os << buf << '\n';
  }
  return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BadData("cannot write file: " + path.string());
  out << content;
}

}  // namespace rgpt
