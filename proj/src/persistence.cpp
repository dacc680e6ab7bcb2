#include "rkam/persistence.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rkam/errors.hpp"

#ifndef RKAM_VERSION
#define RKAM_VERSION "0.0.0"
#endif

namespace rkam {

namespace {

constexpr double kValidationTol = 1e-12;

std::string type_name(const Json& j) { return j.type_name(); }

[[noreturn]] void bad_field(const std::string& ctx, const std::string& key, const std::string& msg) {
  throw ParseError(ctx + "." + key + ": " + msg);
}

std::vector<int> int_array(const Json& j, const std::string& ctx) {
  if (!j.is_array()) throw ParseError(ctx + ": expected array, got " + type_name(j));
  std::vector<int> out;
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer()) {
      throw ParseError(ctx + "[" + std::to_string(i) + "]: expected integer");
    }
    out.push_back(j[i].get<int>());
  }
  return out;
}

}  // namespace

const char* version_string() { return RKAM_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path + "'");
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) {
    fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for '" + path + "': " + ec.message());
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw IoError("write failed on '" + tmp + "'");
  }
  fs::rename(tmp, p, ec);
  if (ec) throw IoError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_text_file(path)); }

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const size_t upto = std::min(e.byte, text.size());
    size_t line = 1, col = 1;
    for (size_t i = 0; i + 1 < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(what + ":" + std::to_string(line) + ":" + std::to_string(col) +
                     ": malformed JSON");
  }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

StrictObject::StrictObject(const Json& j, std::string context) : j_(j), ctx_(std::move(context)) {
  if (!j_.is_object()) throw ParseError(ctx_ + ": expected object, got " + type_name(j_));
}

bool StrictObject::has(const std::string& key) const { return j_.contains(key); }

const Json& StrictObject::at(const std::string& key) {
  if (!j_.contains(key)) bad_field(ctx_, key, "missing");
  used_.insert(key);
  return j_.at(key);
}

double StrictObject::number(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_number()) bad_field(ctx_, key, "expected number, got " + type_name(v));
  return v.get<double>();
}

double StrictObject::number(const std::string& key, double fallback) {
  return has(key) ? number(key) : fallback;
}

int StrictObject::integer(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_number_integer()) bad_field(ctx_, key, "expected integer, got " + type_name(v));
  return v.get<int>();
}

int StrictObject::integer(const std::string& key, int fallback) {
  return has(key) ? integer(key) : fallback;
}

bool StrictObject::boolean(const std::string& key, bool fallback) {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_boolean()) bad_field(ctx_, key, "expected boolean, got " + type_name(v));
  return v.get<bool>();
}

std::string StrictObject::string(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_string()) bad_field(ctx_, key, "expected string, got " + type_name(v));
  return v.get<std::string>();
}

std::string StrictObject::string(const std::string& key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> StrictObject::numbers(const std::string& key) {
  const Json& v = at(key);
  if (!v.is_array()) bad_field(ctx_, key, "expected array, got " + type_name(v));
  std::vector<double> out;
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) bad_field(ctx_, key + "[" + std::to_string(i) + "]", "expected number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> StrictObject::numbers(const std::string& key,
                                          const std::vector<double>& fallback) {
  return has(key) ? numbers(key) : fallback;
}

void StrictObject::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it) {
    if (!used_.count(it.key())) throw ParseError(ctx_ + "." + it.key() + ": unknown key");
  }
}

Json field_to_json(const FourierField& f) {
  Json j;
  j["d"] = f.d();
  j["m"] = f.m();
  j["N"] = f.cutoff();
  j["q_y"] = f.q_y();
  j["r"] = f.r();
  j["parity"] = to_string(f.parity());
  j["autonomous"] = f.autonomous();
  Json coeffs = Json::array();
  if (!f.empty()) {
    const ModeSet& ms = f.modes();
    const MonomialBasis& pw = f.powers();
    for (int p = 0; p < pw.size(); ++p) {
      for (size_t i = 0; i < ms.size(); ++i) {
        for (int c = 0; c < f.m(); ++c) {
          const cdouble v = f.at(p, i, c);
          if (v == cdouble(0.0, 0.0)) continue;
          Json e;
          e["power"] = std::vector<int>(pw.exponent(p), pw.exponent(p) + f.d());
          e["l"] = ms.l(i);
          e["k"] = std::vector<int>(ms.k(i), ms.k(i) + f.d());
          e["comp"] = c;
          e["re"] = v.real();
          e["im"] = v.imag();
          coeffs.push_back(std::move(e));
        }
      }
    }
  }
  j["coeffs"] = std::move(coeffs);
  return j;
}

FourierField field_from_json(const Json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  const int d = o.integer("d"), m = o.integer("m"), N = o.integer("N"), q = o.integer("q_y");
  const double r = o.number("r");
  const std::string ps = o.string("parity");
  const bool autonomous = o.boolean("autonomous", false);
  if (d < 1 || m < 1 || N < 0 || q < 0) throw ParseError(ctx + ": bad shape");
  if (!(r >= 0.0)) throw ParseError(ctx + ".r: must be nonnegative");
  Parity parity;
  try {
    parity = parity_from_string(ps);
  } catch (const Error&) {
    bad_field(ctx, "parity", "unknown parity '" + ps + "'");
  }
  FourierField f(d, m, N, q, r, Parity::kNone, autonomous);
  const Json& coeffs = o.at("coeffs");
  if (!coeffs.is_array()) bad_field(ctx, "coeffs", "expected array");
  for (size_t n = 0; n < coeffs.size(); ++n) {
    const std::string ec = ctx + ".coeffs[" + std::to_string(n) + "]";
    StrictObject e(coeffs[n], ec);
    auto power = int_array(e.at("power"), ec + ".power");
    auto k = int_array(e.at("k"), ec + ".k");
    const int l = e.integer("l"), c = e.integer("comp");
    const double re = e.number("re"), im = e.number("im");
    e.finish();
    if (static_cast<int>(power.size()) != d || static_cast<int>(k.size()) != d) {
      throw ParseError(ec + ": index length differs from d");
    }
    const int p = f.powers().index(power.data());
    const long i = f.modes().find(k.data(), l);
    if (p < 0 || i < 0 || c < 0 || c >= m) throw ParseError(ec + ": index outside the field");
    f.at(p, static_cast<size_t>(i), c) = cdouble(re, im);
  }
  o.finish();
  const double scale = f.max_abs_coeff();
  if (f.reality_defect() > kValidationTol * scale) {
    throw ValidationError(ctx + ": coefficients are not those of a real field");
  }
  if (f.parity_defect(parity) > kValidationTol * scale) {
    throw ValidationError(ctx + ": coefficients are not " + to_string(parity) +
                          " as the parity tag declares");
  }
  f.set_parity(parity);
  return f;
}

Json embedding_to_json(const TorusEmbedding& e) {
  Json j;
  j["type"] = "torus_embedding";
  j["d"] = e.d;
  j["map_case"] = e.map_case;
  j["omega"] = e.omega;
  j["grid"] = e.grid;
  j["displacement"] = field_to_json(e.displacement);
  return j;
}

TorusEmbedding embedding_from_json(const Json& j, const std::string& ctx) {
  StrictObject o(j, ctx);
  if (o.string("type") != "torus_embedding") bad_field(ctx, "type", "expected torus_embedding");
  TorusEmbedding e;
  e.d = o.integer("d");
  e.map_case = o.boolean("map_case", false);
  e.omega = o.numbers("omega");
  e.grid = o.integer("grid");
  e.displacement = field_from_json(o.at("displacement"), ctx + ".displacement");
  o.finish();
  if (static_cast<int>(e.omega.size()) != e.d || e.displacement.d() != e.d ||
      e.displacement.m() != 2 * e.d) {
    throw ValidationError(ctx + ": dimensions of omega and displacement do not match d");
  }
  if (e.displacement.autonomous() != e.map_case) {
    throw ValidationError(ctx + ": map embeddings are autonomous, flow embeddings are not");
  }
  return e;
}

void save_embedding(const std::string& path, const TorusEmbedding& e) {
  write_text_file(path, dump_json(embedding_to_json(e)));
}

TorusEmbedding load_embedding(const std::string& path) {
  return embedding_from_json(parse_json(read_text_file(path), path), path);
}

std::string convergence_csv(const ConvergenceReport& rep) {
  std::string out = "m,cutoff,sup_f,sup_g,min_divisor,inversion_iters,invariance_residual\n";
  for (const auto& s : rep.steps) {
    out += std::to_string(s.m) + "," + std::to_string(s.cutoff) + "," + format_double(s.sup_f) +
           "," + format_double(s.sup_g) + "," + format_double(s.min_divisor) + "," +
           std::to_string(s.inversion_iters) + "," + format_double(s.invariance_residual) + "\n";
  }
  return out;
}

std::string stability_csv(const StabilityReport& rep) {
  std::string out =
      "orbit,level,theta,x0,y0,reference_norm,max_norm,ratio,energy_drift,steps,status\n";
  for (size_t i = 0; i < rep.orbits.size(); ++i) {
    const auto& r = rep.orbits[i];
    std::string status = r.failed ? "failed" : "ok";
    out += std::to_string(i) + "," + format_double(r.level) + "," + format_double(r.theta) + "," +
           format_double(r.x0) + "," + format_double(r.y0) + "," +
           format_double(r.reference_norm) + "," + format_double(r.max_norm) + "," +
           format_double(r.ratio) + "," + format_double(r.energy_drift) + "," +
           std::to_string(r.steps) + "," + status + "\n";
  }
  return out;
}

Json manifest_to_json(const RunManifest& m) {
  Json j;
  j["version"] = m.version;
  j["seed"] = m.seed;
  j["seconds"] = m.seconds;
  j["config"] = m.config;
  Json dg = Json::object();
  for (const auto& [name, hex] : m.digests) dg[name] = hex;
  j["digests"] = dg;
  return j;
}

RunManifest manifest_from_json(const Json& j) {
  StrictObject o(j, "manifest");
  RunManifest m;
  m.version = o.string("version");
  const Json& seed = o.at("seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
    bad_field("manifest", "seed", "expected nonnegative integer");
  }
  m.seed = seed.get<std::uint64_t>();
  m.seconds = o.number("seconds");
  m.config = o.at("config");
  const Json& dg = o.at("digests");
  if (!dg.is_object()) bad_field("manifest", "digests", "expected object");
  for (auto it = dg.begin(); it != dg.end(); ++it) {
    if (!it.value().is_string()) bad_field("manifest.digests", it.key(), "expected string");
    m.digests[it.key()] = it.value().get<std::string>();
  }
  o.finish();
  return m;
}

std::vector<std::string> check_digests(const RunManifest& m, const std::string& dir) {
  std::vector<std::string> bad;
  for (const auto& [name, hex] : m.digests) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    std::string now;
    try {
      now = sha256_file(path);
    } catch (const IoError&) {
      bad.push_back(name);
      continue;
    }
    if (now != hex) bad.push_back(name);
  }
  return bad;
}

}  // namespace rkam
