#include "qpframe/json_io.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

#include "json.hpp"

namespace qpframe {

namespace {

using njson = nlohmann::ordered_json;

std::string rational_str(const Rational& q) { return q.get_str(); }

njson jpadic(const PadicRational& x) {
  njson j;
  if (x.is_zero()) {
    j["u"] = "0";
    j["v"] = 0;
  } else {
    j["u"] = x.unit().get_str();
    j["v"] = x.vexp();
  }
  return j;
}

njson jball(const Ball& b) {
  njson j;
  j["gamma"] = b.gamma();
  j["center"] = jpadic(b.center());
  return j;
}

njson jcyc(const CycScalar& s) {
  njson terms = njson::array();
  for (const auto& [key, q] : s.terms()) {
    njson t;
    t["q"] = rational_str(q);
    t["h"] = key.first;
    t["r"] = rational_str(key.second);
    terms.push_back(std::move(t));
  }
  njson j;
  j["terms"] = std::move(terms);
  return j;
}

njson jfunction(const PFunction& f) {
  njson atoms = njson::array();
  for (const auto& at : f.atoms()) {
    njson a;
    a["coeff"] = jcyc(at.coeff);
    a["b"] = jpadic(at.modulation);
    a["ball"] = jball(at.support);
    atoms.push_back(std::move(a));
  }
  njson j;
  j["p"] = f.prime();
  j["atoms"] = std::move(atoms);
  return j;
}

njson jtable(const CoefficientTable& t) {
  njson entries = njson::array();
  for (const auto& [idx, coeff] : t.entries) {
    njson e;
    e["l"] = idx.l + 1;
    e["j"] = idx.j;
    e["a"] = jpadic(idx.a);
    e["coeff"] = jcyc(coeff);
    entries.push_back(std::move(e));
  }
  njson j;
  j["p"] = t.p;
  j["entries"] = std::move(entries);
  if (t.tail) {
    njson terms = njson::array();
    for (const auto& term : t.tail->terms) {
      auto m = term.t.abs2().as_rational();
      if (!m)
        throw std::runtime_error(
            "field 'tail': a tail mass is not rational and cannot be "
            "exported");
      njson e;
      e["l"] = term.l + 1;
      e["a"] = jpadic(term.a);
      e["m"] = rational_str(*m);
      terms.push_back(std::move(e));
    }
    njson tail;
    tail["j_min"] = t.tail->j_min;
    tail["terms"] = std::move(terms);
    j["tail"] = std::move(tail);
  } else {
    j["tail"] = nullptr;
  }
  j["truncated"] = t.truncated;
  return j;
}

njson jset(const MultiframeletSet& s) {
  njson parts = njson::array();
  for (const auto& part : s.parts) {
    njson balls = njson::array();
    for (const auto& b : part.balls) balls.push_back(jball(b));
    njson jp;
    jp["balls"] = std::move(balls);
    parts.push_back(std::move(jp));
  }
  njson j;
  j["p"] = s.p;
  j["parts"] = std::move(parts);
  return j;
}

std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// ---- parsing helpers ----

njson parse_text(const std::string& text, const char* what) {
  try {
    return njson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("malformed JSON for ") + what + ": " +
                             e.what());
  }
}

const njson& field(const njson& j, const char* name, const char* where) {
  if (!j.is_object())
    throw std::runtime_error(std::string("expected an object for ") + where);
  auto it = j.find(name);
  if (it == j.end())
    throw std::runtime_error(std::string("missing field '") + name + "' in " +
                             where);
  return *it;
}

long long get_integer(const njson& j, const char* name, const char* where) {
  const njson& v = field(j, name, where);
  if (!v.is_number_integer())
    throw std::runtime_error(std::string("field '") + name + "' in " + where +
                             " must be an integer");
  return v.get<long long>();
}

std::string get_string(const njson& j, const char* name, const char* where) {
  const njson& v = field(j, name, where);
  if (!v.is_string())
    throw std::runtime_error(std::string("field '") + name + "' in " + where +
                             " must be a string");
  return v.get<std::string>();
}

Integer parse_integer(const std::string& s, const char* name,
                      const char* where) {
  try {
    return Integer(s, 10);
  } catch (const std::invalid_argument&) {
    throw std::runtime_error(std::string("field '") + name + "' in " + where +
                             " is not a decimal integer");
  }
}

Rational parse_rational(const std::string& s, const char* name,
                        const char* where) {
  Rational q;
  if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0 || q.get_den() == 0)
    throw std::runtime_error(std::string("field '") + name + "' in " + where +
                             " is not a rational number");
  q.canonicalize();
  return q;
}

PadicRational parse_padic(const njson& j, long p, const char* where) {
  Integer u = parse_integer(get_string(j, "u", where), "u", where);
  long long v = get_integer(j, "v", where);
  if (u == 0) return PadicRational(p);
  return PadicRational(p, u, v);
}

Ball parse_ball(const njson& j, long p, const char* where) {
  long long gamma = get_integer(j, "gamma", where);
  return Ball(gamma, parse_padic(field(j, "center", where), p, where));
}

CycScalar parse_cyc(const njson& j, long p, const char* where) {
  const njson& terms = field(j, "terms", where);
  if (!terms.is_array())
    throw std::runtime_error(std::string("field 'terms' in ") + where +
                             " must be an array");
  CycScalar out(p);
  for (const auto& t : terms) {
    Rational q = parse_rational(get_string(t, "q", where), "q", where);
    long long h = get_integer(t, "h", where);
    if (h != 0 && h != 1)
      throw std::runtime_error(std::string("field 'h' in ") + where +
                               " must be 0 or 1");
    Rational r = parse_rational(get_string(t, "r", where), "r", where);
    out += CycScalar(p, q, static_cast<int>(h), RationalAngle(r));
  }
  return out;
}

long parse_prime(const njson& j, const char* where) {
  long long p = get_integer(j, "p", where);
  if (p < 2)
    throw std::runtime_error(std::string("field 'p' in ") + where +
                             " must be at least 2");
  return static_cast<long>(p);
}

PFunction parse_function(const njson& j, const char* where) {
  long p = parse_prime(j, where);
  const njson& atoms = field(j, "atoms", where);
  if (!atoms.is_array())
    throw std::runtime_error(std::string("field 'atoms' in ") + where +
                             " must be an array");
  std::vector<Atom> out;
  for (const auto& a : atoms)
    out.emplace_back(parse_cyc(field(a, "coeff", "atom"), p, "atom.coeff"),
                     parse_padic(field(a, "b", "atom"), p, "atom.b"),
                     parse_ball(field(a, "ball", "atom"), p, "atom.ball"));
  return PFunction(p, std::move(out));
}

}  // namespace

std::string to_json(const PadicRational& x) { return jpadic(x).dump(); }
std::string to_json(const Ball& b) { return jball(b).dump(); }
std::string to_json(const CycScalar& s) { return jcyc(s).dump(); }
std::string to_json(const PFunction& f) { return jfunction(f).dump(); }

std::string to_json(const GeneratorSet& gens) {
  njson list = njson::array();
  for (const auto& g : gens.generators) list.push_back(jfunction(g));
  njson j;
  j["p"] = gens.p;
  j["label"] = gens.label;
  j["generators"] = std::move(list);
  return j.dump();
}

std::string to_json(const CoefficientTable& t) { return jtable(t).dump(); }
std::string to_json(const MultiframeletSet& s) { return jset(s).dump(); }

std::string corpus_to_json(const std::vector<PFunction>& corpus) {
  njson arr = njson::array();
  for (const auto& f : corpus) arr.push_back(jfunction(f));
  return arr.dump();
}

std::string table_to_csv(const CoefficientTable& t) {
  std::string out = "l,j,a,coeff_re,coeff_im,abs2\n";
  for (const auto& [idx, coeff] : t.entries) {
    auto [re, im] = coeff.approx_eval(53);
    auto [m, mi] = coeff.abs2().approx_eval(53);
    (void)mi;
    out += std::to_string(idx.l + 1) + "," + std::to_string(idx.j) + "," +
           idx.a.to_string() + "," + fmt_double(re) + "," + fmt_double(im) +
           "," + fmt_double(m) + "\n";
  }
  return out;
}

PadicRational padic_from_json(const std::string& text, long p) {
  return parse_padic(parse_text(text, "PadicRational"), p, "PadicRational");
}

PFunction pfunction_from_json(const std::string& text) {
  return parse_function(parse_text(text, "PFunction"), "PFunction");
}

std::vector<PFunction> corpus_from_json(const std::string& text) {
  njson j = parse_text(text, "corpus");
  if (!j.is_array())
    throw std::runtime_error("corpus document must be a JSON array");
  std::vector<PFunction> out;
  for (const auto& f : j) out.push_back(parse_function(f, "corpus member"));
  return out;
}

GeneratorSet generator_set_from_json(const std::string& text) {
  njson j = parse_text(text, "GeneratorSet");
  GeneratorSet out;
  out.p = parse_prime(j, "GeneratorSet");
  out.label = get_string(j, "label", "GeneratorSet");
  const njson& gens = field(j, "generators", "GeneratorSet");
  if (!gens.is_array())
    throw std::runtime_error(
        "field 'generators' in GeneratorSet must be an array");
  for (const auto& g : gens) {
    out.generators.push_back(parse_function(g, "generator"));
    if (out.generators.back().prime() != out.p)
      throw std::runtime_error(
          "field 'p' of a generator disagrees with the set prime");
  }
  return out;
}

CoefficientTable table_from_json(const std::string& text) {
  njson j = parse_text(text, "CoefficientTable");
  CoefficientTable out;
  out.p = parse_prime(j, "CoefficientTable");
  const njson& entries = field(j, "entries", "CoefficientTable");
  if (!entries.is_array())
    throw std::runtime_error(
        "field 'entries' in CoefficientTable must be an array");
  for (const auto& e : entries) {
    long long l = get_integer(e, "l", "entry");
    if (l < 1)
      throw std::runtime_error("field 'l' in entry must be at least 1");
    FrameIndex idx{static_cast<long>(l - 1), get_integer(e, "j", "entry"),
                   parse_padic(field(e, "a", "entry"), out.p, "entry.a")};
    CycScalar coeff = parse_cyc(field(e, "coeff", "entry"), out.p, "entry");
    if (!out.entries.emplace(idx, coeff).second)
      throw std::runtime_error("duplicate (l, j, a) entry in table");
  }
  if (j.contains("tail") && !j["tail"].is_null())
    throw std::runtime_error(
        "field 'tail': exported tails carry masses only and cannot be "
        "re-imported; re-run the analysis");
  if (j.contains("truncated")) {
    if (!j["truncated"].is_boolean())
      throw std::runtime_error(
          "field 'truncated' in CoefficientTable must be a boolean");
    out.truncated = j["truncated"].get<bool>();
  }
  return out;
}

MultiframeletSet set_from_json(const std::string& text) {
  njson j = parse_text(text, "MultiframeletSet");
  long p = parse_prime(j, "MultiframeletSet");
  const njson& parts = field(j, "parts", "MultiframeletSet");
  if (!parts.is_array())
    throw std::runtime_error(
        "field 'parts' in MultiframeletSet must be an array");
  std::vector<BallUnionSet> built;
  for (const auto& part : parts) {
    const njson& balls = field(part, "balls", "part");
    if (!balls.is_array())
      throw std::runtime_error("field 'balls' in part must be an array");
    std::vector<Ball> bs;
    for (const auto& b : balls) bs.push_back(parse_ball(b, p, "ball"));
    try {
      built.push_back(make_ball_union(p, std::move(bs)));
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(std::string("field 'balls': ") + e.what());
    }
  }
  try {
    return make_multiframelet_set(p, std::move(built));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("field 'parts': ") + e.what());
  }
}

}  // namespace qpframe
