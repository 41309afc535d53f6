#include "gcsieve/model_io.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace gcsieve {

namespace {

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t start = 0;
  for (std::size_t k = 0; k < byte && k < text.size(); ++k)
    if (text[k] == '\n') {
      ++line;
      start = k + 1;
    }
  const std::size_t end = text.find('\n', start);
  return "line " + std::to_string(line) + ": " + text.substr(start, end == std::string::npos ? end : end - start);
}

// Value of a subexpression: a scalar until an operator symbol is involved.
struct Term {
  bool scalar = true;
  cplx s{0.0, 0.0};
  CMatrix m;
};

class ExprParser {
 public:
  ExprParser(const std::string& text, const OperatorSpace& space, const std::map<std::string, double>& params)
      : text_(text), space_(space), params_(params) {}

  CMatrix parse() {
    Term t = sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return to_matrix(t);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression \"" + text_ + "\" at column " + std::to_string(pos_ + 1) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  CMatrix to_matrix(const Term& t) const {
    if (!t.scalar) return t.m;
    return t.s * identity(space_.rep.dim);
  }

  Term add(Term a, const Term& b, double sign) const {
    if (a.scalar && b.scalar) {
      a.s += sign * b.s;
      return a;
    }
    Term r;
    r.scalar = false;
    r.m = to_matrix(a) + sign * to_matrix(b);
    return r;
  }

  static Term mul(const Term& a, const Term& b) {
    Term r;
    if (a.scalar && b.scalar) {
      r.s = a.s * b.s;
      return r;
    }
    r.scalar = false;
    if (a.scalar) r.m = a.s * b.m;
    else if (b.scalar) r.m = b.s * a.m;
    else r.m = a.m * b.m;
    return r;
  }

  Term sum() {
    Term t = product();
    for (;;) {
      if (accept('+')) t = add(t, product(), 1.0);
      else if (accept('-')) t = add(t, product(), -1.0);
      else return t;
    }
  }

  Term product() {
    Term t = unary();
    for (;;) {
      if (accept('*')) {
        t = mul(t, unary());
      } else if (accept('/')) {
        const Term d = unary();
        if (!d.scalar) fail("division by an operator");
        if (d.s == cplx(0.0)) fail("division by zero");
        Term inv;
        inv.s = 1.0 / d.s;
        t = mul(t, inv);
      } else {
        return t;
      }
    }
  }

  Term unary() {
    if (accept('-')) {
      Term neg;
      neg.s = -1.0;
      return mul(neg, unary());
    }
    if (accept('+')) return unary();
    return power();
  }

  Term power() {
    Term base = atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be a non-negative integer");
    const int e = std::stoi(text_.substr(start, pos_ - start));
    Term r;
    r.s = 1.0;
    for (int k = 0; k < e; ++k) r = mul(r, base);
    return r;
  }

  Term atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    if (accept('(')) {
      Term t = sum();
      if (!accept(')')) fail("missing ')'");
      return t;
    }
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      Term t;
      try {
        t.s = std::stod(text_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      const std::string name = text_.substr(start, pos_ - start);
      if (name == "sqrt") {
        if (!accept('(')) fail("sqrt needs '('");
        Term arg = sum();
        if (!accept(')')) fail("missing ')'");
        if (!arg.scalar) fail("sqrt of an operator");
        arg.s = std::sqrt(arg.s);
        return arg;
      }
      Term t;
      if (name == "i") {
        t.s = kI;
      } else if (name == "pi") {
        t.s = 3.14159265358979323846;
      } else if (auto p = params_.find(name); p != params_.end()) {
        t.s = p->second;
      } else if (auto o = space_.symbols.find(name); o != space_.symbols.end()) {
        t.scalar = false;
        t.m = o->second;
      } else {
        pos_ = start;
        fail("unknown symbol '" + name + "'");
      }
      return t;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& text_;
  const OperatorSpace& space_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

template <class T>
T field(const nlohmann::json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string(where) + ": bad \"" + key + "\": " + e.what());
  }
}

}  // namespace

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": JSON syntax error near " + line_context(text, e.byte ? e.byte - 1 : 0));
  }
}

OperatorSpace make_space(const nlohmann::json& spec) {
  const auto kind = field<std::string>(spec, "kind", "space");
  OperatorSpace s;
  try {
    if (kind == "boson") {
      const int modes = spec.value("modes", 1);
      s.rep = boson_rep(field<int>(spec, "cutoff", "space"), modes);
      for (int m = 1; m <= modes; ++m) {
        const std::string suffix = modes == 1 ? "" : std::to_string(m);
        const CMatrix a = s.rep.op("a" + suffix);
        s.symbols["a" + suffix] = a;
        s.symbols["adag" + suffix] = a.adjoint();
        s.symbols["n" + suffix] = a.adjoint() * a;
        s.symbols["x" + suffix] = s.rep.op("x" + suffix);
        s.symbols["p" + suffix] = s.rep.op("p" + suffix);
      }
    } else if (kind == "spin" || kind == "collective") {
      if (kind == "spin") {
        const auto& jv = spec.at("J");
        s.rep = jv.is_string() ? make_representation("su2-spinJ:J=" + jv.get<std::string>())
                               : spin_rep(jv.get<double>());
      } else {
        s.rep = collective_spin_rep(field<int>(spec, "N", "space"));
      }
      for (const char* name : {"Jx", "Jy", "Jz", "Jp", "Jm"}) s.symbols[name] = s.rep.op(name);
    } else if (kind == "qubit") {
      s.rep = spin_rep(0.5);
      s.symbols["sx"] = pauli::x();
      s.symbols["sy"] = pauli::y();
      s.symbols["sz"] = pauli::z();
      s.symbols["sp"] = pauli::plus();
      s.symbols["sm"] = pauli::minus();
    } else {
      throw ConfigError("space: unknown kind \"" + kind + "\"");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("space: ") + e.what());
  }
  s.symbols["I"] = identity(s.rep.dim);
  return s;
}

CMatrix parse_operator(const std::string& expr, const OperatorSpace& space,
                       const std::map<std::string, double>& params) {
  return ExprParser(expr, space, params).parse();
}

ModelFile model_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("model: expected a JSON object");
  ModelFile f;
  f.space = make_space(field<nlohmann::json>(j, "space", "model"));
  const auto params = j.value("parameters", std::map<std::string, double>{});
  const std::string h = j.value("hamiltonian", std::string("0"));
  CMatrix ham = parse_operator(h, f.space, params);

  std::vector<CMatrix> ls;
  std::vector<std::string> labels;
  for (const auto& spec : j.value("lindblad", nlohmann::json::array())) {
    const auto op = field<std::string>(spec, "op", "lindblad");
    double rate = 1.0;
    if (const auto it = spec.find("rate"); it != spec.end()) {
      if (it->is_number()) {
        rate = it->get<double>();
      } else if (it->is_string() && params.count(it->get<std::string>())) {
        rate = params.at(it->get<std::string>());
      } else {
        throw ConfigError("lindblad \"" + op + "\": rate must be a number or a parameter name");
      }
    }
    if (!(rate >= 0.0)) throw ConfigError("lindblad \"" + op + "\": rate must be non-negative");
    if (rate == 0.0) continue;
    ls.push_back(std::sqrt(rate) * parse_operator(op, f.space, params));
    labels.push_back(op);
  }
  f.model = make_model(std::move(ham), std::move(ls), std::move(labels), j.value("certify_wcl", false));
  return f;
}

ModelFile load_model(const std::filesystem::path& path) {
  try {
    return model_from_json(load_json(path));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

PureState state_from_json(const nlohmann::json& j, Eigen::Index dim) {
  if (j.contains("basis")) {
    const auto k = j.at("basis").get<Eigen::Index>();
    if (k < 0 || k >= dim) throw ConfigError("state: basis index out of range");
    return PureState::basis(dim, k);
  }
  const auto& amps = j.at("amplitudes");
  if (static_cast<Eigen::Index>(amps.size()) != dim)
    throw ConfigError("state: expected " + std::to_string(dim) + " amplitudes, got " + std::to_string(amps.size()));
  CVector v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const auto& a = amps[static_cast<std::size_t>(k)];
    v(k) = a.is_array() ? cplx(a.at(0).get<double>(), a.at(1).get<double>()) : cplx(a.get<double>(), 0.0);
  }
  return PureState::normalized(v);
}

PureState load_state(const std::filesystem::path& path, Eigen::Index dim) {
  try {
    return state_from_json(load_json(path), dim);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace gcsieve
