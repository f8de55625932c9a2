#include "gpfit_cli/model_file.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "gpfit_cli/io.hpp"

namespace gpfit::cli {

namespace {

std::string join(const double* data, Index count) {
  std::string out;
  for (Index i = 0; i < count; ++i) {
    if (i) out += ',';
    out += format_number(data[i]);
  }
  return out;
}

std::string join(const Vector& v) { return join(v.data(), v.size()); }

struct Entry {
  std::string value;
  std::size_t line = 0;
};

class Fields {
 public:
  Fields(std::map<std::string, Entry> entries, std::string source)
      : entries_(std::move(entries)), source_(std::move(source)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  const Entry& at(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw InputError(source_ + ": missing field '" + key + "'");
    return it->second;
  }

  std::vector<double> numbers(const std::string& key, std::size_t expected) const {
    const Entry& e = at(key);
    std::vector<double> values;
    try {
      values = parse_number_list(e.value, key);
    } catch (const InputError& err) {
      throw InputError(where(e) + err.what());
    }
    if (values.size() != expected) {
      throw InputError(where(e) + key + " has " + std::to_string(values.size()) + " values, expected " +
                       std::to_string(expected));
    }
    return values;
  }

  double real(const std::string& key) const { return numbers(key, 1).front(); }

  std::uint64_t count(const std::string& key) const {
    const Entry& e = at(key);
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(e.value, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != e.value.size() || e.value.front() == '-') {
      throw InputError(where(e) + key + " must be a non-negative integer");
    }
    return v;
  }

 private:
  std::string where(const Entry& e) const { return source_ + ":" + std::to_string(e.line) + ": "; }

  std::map<std::string, Entry> entries_;
  std::string source_;
};

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

std::string serialize_model(const ModelFile& file) {
  const GpModel& m = file.model;
  const Index n = m.n();
  const Index d = m.d();
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> X = m.X();

  std::ostringstream os;
  os << "# gpfit model\n";
  os << "schema_version = " << kModelSchemaVersion << '\n';
  os << "n = " << n << '\n';
  os << "d = " << d << '\n';
  os << "X = " << join(X.data(), n * d) << '\n';
  os << "Y = " << join(m.Y()) << '\n';
  os << "beta_hat = " << join(m.beta_hat().beta()) << '\n';
  os << "mu_hat = " << format_number(m.mu_hat()) << '\n';
  os << "sigma2_hat = " << format_number(m.sigma2_hat()) << '\n';
  os << "delta_lb = " << format_number(m.delta_lb()) << '\n';
  os << "nug_thres = " << format_number(m.nug_thres()) << '\n';
  os << "deviance_at_fit = " << format_number(m.deviance_at_fit()) << '\n';
  os << "seed = " << file.seed << '\n';
  os << "control = " << file.plan.n_candidates << ',' << file.plan.n_best << ',' << file.plan.n_clusters << '\n';
  os << "maxit = " << file.plan.maxit << '\n';
  os << "total_deviance_evals = " << file.total_evaluations << '\n';
  if (file.input_box) {
    os << "input_lower = " << join(file.input_box->lower()) << '\n';
    os << "input_upper = " << join(file.input_box->upper()) << '\n';
  }
  return os.str();
}

ModelFile parse_model(std::istream& in, const std::string& source) {
  std::map<std::string, Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto strip = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      if (a == std::string::npos) return std::string();
      const auto b = s.find_last_not_of(" \t\r");
      return s.substr(a, b - a + 1);
    };
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    if (entries.count(key)) {
      throw InputError(source + ":" + std::to_string(line_no) + ": duplicate field '" + key + "'");
    }
    entries[key] = Entry{std::move(value), line_no};
  }
  if (entries.empty()) throw InputError(source + ": not a gpfit model file");

  const Fields f(std::move(entries), source);
  const std::uint64_t version = f.count("schema_version");
  if (version != static_cast<std::uint64_t>(kModelSchemaVersion)) {
    throw InputError(source + ": unsupported schema_version " + std::to_string(version));
  }
  const auto n = static_cast<Index>(f.count("n"));
  const auto d = static_cast<Index>(f.count("d"));
  if (n < 2 || d < 1) throw InputError(source + ": invalid model dimensions");

  const std::vector<double> xs = f.numbers("X", static_cast<std::size_t>(n * d));
  const DesignMatrix X =
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(xs.data(), n, d);
  const Vector Y = to_vector(f.numbers("Y", static_cast<std::size_t>(n)));
  const Vector beta = to_vector(f.numbers("beta_hat", static_cast<std::size_t>(d)));

  const std::vector<double> control = f.numbers("control", 3);
  MultistartPlan plan;
  plan.n_candidates = static_cast<std::size_t>(control[0]);
  plan.n_best = static_cast<std::size_t>(control[1]);
  plan.n_clusters = static_cast<std::size_t>(control[2]);
  plan.maxit = static_cast<std::size_t>(f.count("maxit"));

  std::optional<Box> box;
  if (f.has("input_lower") || f.has("input_upper")) {
    box = Box(to_vector(f.numbers("input_lower", static_cast<std::size_t>(d))),
              to_vector(f.numbers("input_upper", static_cast<std::size_t>(d))));
  }

  GpModel model = GpModel::restore(X, Y, CorrParams(beta), f.real("nug_thres"), f.real("mu_hat"),
                                   f.real("sigma2_hat"), f.real("delta_lb"), f.real("deviance_at_fit"));
  return ModelFile{std::move(model), f.count("seed"), plan, f.count("total_deviance_evals"), std::move(box)};
}

void save_model(const std::string& path, const ModelFile& file) { write_file_atomic(path, serialize_model(file)); }

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open model file");
  return parse_model(in, path);
}

}  // namespace gpfit::cli
