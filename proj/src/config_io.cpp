#include "msamp/config_io.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace msamp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  std::vector<T> out;
  T v{};
  while (is >> v) out.push_back(v);
  if (!is.eof()) throw std::invalid_argument("config: cannot parse value of '" + key + "'");
  return out;
}

template <typename T>
T parse_scalar(const std::string& key, const std::string& value) {
  auto list = parse_list<T>(key, value);
  if (list.size() != 1) throw std::invalid_argument("config: '" + key + "' expects one value");
  return list.front();
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

bool is_real_diagonal(const CMatrix& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) {
      if (i != j && m(i, j) != Complex(0.0, 0.0)) return false;
      if (i == j && m(i, j).imag() != 0.0) return false;
    }
  return true;
}

}  // namespace

SystemConfig read_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has no '='");
    const std::string key = trim(line.substr(0, eq));
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second)
      throw std::invalid_argument("config: duplicate key '" + key + "'");
  }

  SystemConfig c;
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto need = [&](const std::string& key) {
    auto v = take(key);
    if (!v) throw std::invalid_argument("config: missing key '" + key + "'");
    return *v;
  };

  c.L = parse_scalar<Index>("L", need("L"));
  c.U = parse_scalar<Index>("U", need("U"));
  c.F = parse_scalar<Index>("F", need("F"));
  c.alpha = parse_list<double>("alpha", need("alpha"));
  c.lambda = parse_list<double>("lambda", need("lambda"));
  c.noise_var = parse_scalar<double>("noise_var", need("noise_var"));
  c.T = parse_scalar<int>("T", need("T"));
  c.nu = parse_list<double>("nu", need("nu"));
  if (auto v = take("dict")) c.dict_kind = parse_dictionary_kind(*v);
  if (auto v = take("seed")) c.seed = parse_scalar<std::uint64_t>("seed", *v);
  if (auto v = take("mc_samples")) c.mc_samples = parse_scalar<Index>("mc_samples", *v);

  for (Index u = 1; u <= c.U; ++u) {
    const std::string key = "sigma." + std::to_string(u);
    const auto entries = parse_list<Complex>(key, need(key));
    CMatrix s = CMatrix::Zero(c.F, c.F);
    if (static_cast<Index>(entries.size()) == c.F) {
      for (Index i = 0; i < c.F; ++i) s(i, i) = entries[static_cast<std::size_t>(i)];
    } else if (static_cast<Index>(entries.size()) == c.F * c.F) {
      for (Index i = 0; i < c.F; ++i)
        for (Index j = 0; j < c.F; ++j) s(i, j) = entries[static_cast<std::size_t>(i * c.F + j)];
    } else {
      throw std::invalid_argument("config: '" + key + "' needs F or F*F entries");
    }
    c.sigma.push_back(std::move(s));
  }
  if (!kv.empty()) throw std::invalid_argument("config: unknown key '" + kv.begin()->first + "'");
  c.validate();
  return c;
}

SystemConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return read_config(in);
}

void write_config(std::ostream& out, const SystemConfig& c) {
  auto list = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(v[i]);
    return s;
  };
  out << "L = " << c.L << "\n"
      << "U = " << c.U << "\n"
      << "F = " << c.F << "\n"
      << "alpha = " << list(c.alpha) << "\n"
      << "lambda = " << list(c.lambda) << "\n";
  for (std::size_t u = 0; u < c.sigma.size(); ++u) {
    const CMatrix& s = c.sigma[u];
    out << "sigma." << (u + 1) << " =";
    if (is_real_diagonal(s)) {
      for (Index i = 0; i < s.rows(); ++i) out << " " << fmt(s(i, i).real());
    } else {
      for (Index i = 0; i < s.rows(); ++i)
        for (Index j = 0; j < s.cols(); ++j)
          out << " (" << fmt(s(i, j).real()) << "," << fmt(s(i, j).imag()) << ")";
    }
    out << "\n";
  }
  out << "noise_var = " << fmt(c.noise_var) << "\n"
      << "T = " << c.T << "\n"
      << "nu = " << list(c.nu) << "\n"
      << "dict = " << to_string(c.dict_kind) << "\n"
      << "seed = " << c.seed << "\n"
      << "mc_samples = " << c.mc_samples << "\n";
}

void write_config_file(const std::string& path, const SystemConfig& config) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file '" + path + "'");
  write_config(out, config);
}

std::string config_hash(const SystemConfig& config) {
  std::ostringstream os;
  write_config(os, config);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(os.str())));
  return buf;
}

}  // namespace msamp
