#include "cbmf/model_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace cbmf {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("model file: bad number '" + s + "'");
  return v;
}

template <class T>
T parse_int(const std::string& s, int base = 10) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, base);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw InputError("model file: bad integer '" + s + "'");
  return v;
}

void write_rows(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << fmt(m(r, c));
    out << '\n';
  }
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string line() {
    std::string s;
    if (!std::getline(in_, s)) throw InputError("model file: unexpected end of file");
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
  }

  // "key value" with an exact key.
  std::string field(const std::string& key) {
    std::string s = line();
    auto sp = s.find(' ');
    if (sp == std::string::npos || s.substr(0, sp) != key) throw InputError("model file: expected '" + key + "', got '" + s + "'");
    return s.substr(sp + 1);
  }

  std::vector<std::string> words() {
    std::istringstream ss(line());
    std::vector<std::string> out;
    for (std::string w; ss >> w;) out.push_back(w);
    return out;
  }

  Vector vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = parse_double(line());
    return v;
  }

  Matrix matrix(const std::string& tag, Eigen::Index rows, Eigen::Index cols) {
    auto head = words();
    if (head.size() != 3 || head[0] != tag || parse_int<long long>(head[1]) != rows || parse_int<long long>(head[2]) != cols) {
      throw InputError("model file: expected section " + tag + " " + std::to_string(rows) + " " + std::to_string(cols));
    }
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      auto w = words();
      if (static_cast<Eigen::Index>(w.size()) != cols) throw InputError("model file: row width mismatch in " + tag);
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_double(w[static_cast<std::size_t>(c)]);
    }
    return m;
  }

 private:
  std::istream& in_;
};

}  // namespace

void write_model(std::ostream& out, const ModelFile& f) {
  const auto& m = f.model;
  const auto& h = f.hyper;
  if (static_cast<std::size_t>(m.P.rows()) != f.n_users) throw InputError("model P rows do not match header");
  const std::size_t v_rows = m.variant == Variant::RC ? f.n_attrs : f.n_items;
  if (static_cast<std::size_t>(m.V.rows()) != v_rows || m.V.cols() != m.P.cols()) throw InputError("model factor shape mismatch");
  if (!h.gamma) throw InputError("model gamma must be resolved before writing");

  char fp[17];
  std::snprintf(fp, sizeof fp, "%016llx", static_cast<unsigned long long>(f.fingerprint));
  out << "cbmf-model " << ModelFile::kFormatVersion << '\n'
      << "variant " << to_string(m.variant) << '\n'
      << "n_users " << f.n_users << '\n'
      << "n_items " << f.n_items << '\n'
      << "n_attrs " << f.n_attrs << '\n'
      << "k " << m.P.cols() << '\n'
      << "lambda " << fmt(h.lambda) << '\n'
      << "gamma " << fmt(*h.gamma) << '\n'
      << "eta " << fmt(h.eta) << '\n'
      << "epsilon " << fmt(h.epsilon) << '\n'
      << "max_iters " << h.max_iters << '\n'
      << "c " << h.c << '\n'
      << "theta " << fmt(h.theta) << '\n'
      << "seed " << h.seed << '\n'
      << "rating_min " << fmt(m.rating_min) << '\n'
      << "rating_max " << fmt(m.rating_max) << '\n'
      << "fingerprint " << fp << '\n';
  out << "[anova]\n"
      << "mu " << fmt(m.anova.mu) << '\n'
      << "alpha " << m.anova.alpha.size() << '\n';
  for (double a : m.anova.alpha) out << fmt(a) << '\n';
  out << "beta " << m.anova.beta.size() << '\n';
  for (double b : m.anova.beta) out << fmt(b) << '\n';
  out << "[P] " << m.P.rows() << ' ' << m.P.cols() << '\n';
  write_rows(out, m.P);
  out << (m.variant == Variant::RC ? "[B] " : "[Q] ") << m.V.rows() << ' ' << m.V.cols() << '\n';
  write_rows(out, m.V);
}

void write_model(const std::filesystem::path& path, const ModelFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write model file: " + path.string());
  write_model(out, file);
}

ModelFile read_model(std::istream& in) {
  Reader rd(in);
  ModelFile f;
  auto magic = rd.words();
  if (magic.size() != 2 || magic[0] != "cbmf-model") throw InputError("not a cbmf model file");
  if (parse_int<int>(magic[1]) != ModelFile::kFormatVersion) throw InputError("unsupported model format version " + magic[1]);

  f.model.variant = parse_variant(rd.field("variant"));
  f.n_users = parse_int<std::size_t>(rd.field("n_users"));
  f.n_items = parse_int<std::size_t>(rd.field("n_items"));
  f.n_attrs = parse_int<std::size_t>(rd.field("n_attrs"));
  f.hyper.k = parse_int<int>(rd.field("k"));
  f.hyper.lambda = parse_double(rd.field("lambda"));
  f.hyper.gamma = parse_double(rd.field("gamma"));
  f.hyper.eta = parse_double(rd.field("eta"));
  f.hyper.epsilon = parse_double(rd.field("epsilon"));
  f.hyper.max_iters = parse_int<int>(rd.field("max_iters"));
  f.hyper.c = parse_int<int>(rd.field("c"));
  f.hyper.theta = parse_double(rd.field("theta"));
  f.hyper.seed = parse_int<std::uint64_t>(rd.field("seed"));
  f.model.rating_min = parse_double(rd.field("rating_min"));
  f.model.rating_max = parse_double(rd.field("rating_max"));
  f.fingerprint = parse_int<std::uint64_t>(rd.field("fingerprint"), 16);

  if (rd.line() != "[anova]") throw InputError("model file: missing [anova] section");
  f.model.anova.mu = parse_double(rd.field("mu"));
  if (parse_int<std::size_t>(rd.field("alpha")) != f.n_users) throw InputError("model file: alpha length mismatch");
  f.model.anova.alpha = rd.vector(static_cast<Eigen::Index>(f.n_users));
  if (parse_int<std::size_t>(rd.field("beta")) != f.n_items) throw InputError("model file: beta length mismatch");
  f.model.anova.beta = rd.vector(static_cast<Eigen::Index>(f.n_items));

  const auto K = static_cast<Eigen::Index>(f.hyper.k);
  f.model.P = rd.matrix("[P]", static_cast<Eigen::Index>(f.n_users), K);
  if (f.model.variant == Variant::RC) f.model.V = rd.matrix("[B]", static_cast<Eigen::Index>(f.n_attrs), K);
  else f.model.V = rd.matrix("[Q]", static_cast<Eigen::Index>(f.n_items), K);
  return f;
}

ModelFile read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open model file: " + path.string());
  return read_model(in);
}

}  // namespace cbmf
